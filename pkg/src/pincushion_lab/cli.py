"""
Command-line entry point for Pincushion Lab.

Results go to stdout and are byte-stable for fixed inputs and seeds.
Diagnostics go to stderr as a single line. Exit codes: 0 success (a
``not-member`` answer included), 1 domain error, 2 usage or input error.
"""

import argparse
import sys
from collections.abc import Callable
from collections.abc import Sequence
from pathlib import Path
from typing import NoReturn

from . import __version__
from .config import ProjectionOptions
from .errors import FormatError
from .errors import PincushionError
from .errors import UsageError
from .graph_core import SimplicialGraph
from .graph_core import pins
from .graph_core import read_graph
from .lin_io import read_family
from .lin_io import records_to_csv_text
from .lin_io import serialize_family
from .lin_io import write_family
from .lin_io import write_records_csv
from .lin_lab import Kind
from .lin_lab import generate_gamma_family
from .lin_lab import perturb
from .lin_lab import project_to_gamma_commuting
from .lin_lab import sweep
from .logging_config import setup_logging
from .pincushion import min_level
from .pincushion import serialize_trace
from .pincushion import vertex_roles
from .raag import format_group_word
from .raag import parse_group_word
from .raag import raag_invert
from .raag import raag_is_trivial
from .raag import raag_normal_form
from .words import equivalent
from .words import format_word
from .words import is_reduced
from .words import matching_permutation
from .words import normal_form
from .words import parse_word
from .words import reduce

Handler = Callable[[argparse.Namespace], list[str]]


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting on bad input."""

    def error(self, message: str) -> NoReturn:
        msg = f"{self.prog}: {message}"
        raise UsageError(msg)


def _flag(value: bool) -> str:  # noqa: FBT001
    return "true" if value else "false"


def _deltas(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        msg = f"invalid delta list {text!r}"
        raise argparse.ArgumentTypeError(msg) from None
    if not values:
        msg = "at least one delta is required"
        raise argparse.ArgumentTypeError(msg)
    return values


def _non_negative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        msg = f"expected an integer, got {text!r}"
        raise argparse.ArgumentTypeError(msg) from None
    if value < 0:
        msg = f"expected a non-negative integer, got {value}"
        raise argparse.ArgumentTypeError(msg)
    return value


def _positive(text: str) -> int:
    value = _non_negative(text)
    if value == 0:
        msg = "expected a positive integer"
        raise argparse.ArgumentTypeError(msg)
    return value


def _graph(args: argparse.Namespace) -> SimplicialGraph:
    return read_graph(Path(args.graph))


# =============================================================================
# Handlers
# =============================================================================


def _classify(args: argparse.Namespace) -> list[str]:
    result = min_level(_graph(args), max_level=args.max_level)
    if result.trace is None:
        return ["not-member"]
    lines = [f"member {result.min_level}"]
    if args.certificate:
        lines.extend(serialize_trace(result.trace).splitlines())
    return lines


def _pins(args: argparse.Namespace) -> list[str]:
    g = _graph(args)
    pin_set = pins(g)
    return [v for v in g.vertices if v in pin_set]


def _roles(args: argparse.Namespace) -> list[str]:
    return [f"{v} {role}" for v, role in vertex_roles(_graph(args)).items()]


def _word(args: argparse.Namespace) -> list[str]:
    g = _graph(args)
    if args.action in {"equal", "permutation"}:
        if len(args.words) != 2:
            msg = f"word {args.action} takes exactly two quoted words"
            raise UsageError(msg)
        w1, w2 = (parse_word(g, text) for text in args.words)
        if args.action == "equal":
            return [_flag(equivalent(w1, w2))]
        return [" ".join(str(i) for i in matching_permutation(w1, w2).images)]

    w = parse_word(g, args.words)
    if args.action == "reduce":
        return [format_word(reduce(w))]
    if args.action == "normal-form":
        return [format_word(normal_form(w))]
    return [_flag(is_reduced(w))]


def _raag(args: argparse.Namespace) -> list[str]:
    gw = parse_group_word(_graph(args), args.words)
    if args.action == "normal-form":
        return [format_group_word(raag_normal_form(gw))]
    if args.action == "inverse":
        return [format_group_word(raag_invert(gw))]
    return [_flag(raag_is_trivial(gw))]


def _lin_sweep(args: argparse.Namespace) -> list[str]:
    records = sweep(
        _graph(args),
        args.deltas,
        args.trials,
        args.seed,
        Kind(args.kind),
        ProjectionOptions(workers=args.workers),
        leg_dim=args.leg_dim,
    )
    if args.out:
        write_records_csv(records, Path(args.out))
        return []
    return records_to_csv_text(records).splitlines()


def _lin_project(args: argparse.Namespace) -> list[str]:
    g = _graph(args)
    a = read_family(g, Path(args.family))
    b, record = project_to_gamma_commuting(g, a, kind=Kind(args.kind))
    if args.out:
        write_family(b, Path(args.out))
    return [
        f"pre_edge_defect {record.before.max_edge_commutator!r}",
        f"pre_normality {record.before.max_normality!r}",
        f"epsilon {record.epsilon!r}",
        f"post_edge_defect {record.after.max_edge_commutator!r}",
        f"post_normality {record.after.max_normality!r}",
        f"iterations {record.iterations}",
        f"converged {_flag(record.converged)}",
    ]


def _lin_generate(args: argparse.Namespace) -> list[str]:
    fam = generate_gamma_family(_graph(args), args.leg_dim, args.seed, Kind(args.kind))
    if args.delta:
        fam = perturb(fam, args.delta, [args.seed, 1])
    if args.out:
        write_family(fam, Path(args.out))
        return []
    return serialize_family(fam).splitlines()


# =============================================================================
# Parser
# =============================================================================


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="pincushion",
        description="Pincushion graphs, graph-product words and a selective Lin laboratory",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--debug", action="store_true", help="Enable debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    classify = commands.add_parser("classify", help="Smallest pincushion level of a graph")
    classify.add_argument("graph")
    classify.add_argument("--max-level", type=_non_negative, default=None)
    classify.add_argument("--certificate", action="store_true")
    classify.set_defaults(handler=_classify)

    pins_cmd = commands.add_parser("pins", help="Vertices of degree one")
    pins_cmd.add_argument("graph")
    pins_cmd.set_defaults(handler=_pins)

    roles = commands.add_parser("roles", help="Vertex roles for stable graph products")
    roles.add_argument("graph")
    roles.set_defaults(handler=_roles)

    word = commands.add_parser("word", help="Graph-product word calculus")
    word.add_argument(
        "action", choices=["reduce", "normal-form", "equal", "reduced?", "permutation"]
    )
    word.add_argument("graph")
    word.add_argument("words", nargs="*")
    word.set_defaults(handler=_word)

    raag = commands.add_parser("raag", help="Right-angled Artin group words")
    raag.add_argument("action", choices=["normal-form", "trivial?", "inverse"])
    raag.add_argument("graph")
    raag.add_argument("words", nargs="*")
    raag.set_defaults(handler=_raag)

    lin = commands.add_parser("lin", help="Almost-commuting matrix experiments")
    lin_commands = lin.add_subparsers(dest="lin_command", required=True)
    kinds = [k.value for k in Kind]

    lin_sweep = lin_commands.add_parser("sweep", help="Perturb-and-project sweep as CSV")
    lin_sweep.add_argument("graph")
    lin_sweep.add_argument("--deltas", type=_deltas, required=True)
    lin_sweep.add_argument("--trials", type=_non_negative, required=True)
    lin_sweep.add_argument("--seed", type=_non_negative, required=True)
    lin_sweep.add_argument("--kind", choices=kinds, required=True)
    lin_sweep.add_argument("--leg-dim", type=_positive, default=2)
    lin_sweep.add_argument("--workers", type=_positive, default=1)
    lin_sweep.add_argument("--out")
    lin_sweep.set_defaults(handler=_lin_sweep)

    lin_project = lin_commands.add_parser("project", help="Project one family")
    lin_project.add_argument("graph")
    lin_project.add_argument("family")
    lin_project.add_argument("--kind", choices=kinds, default=Kind.NORMAL.value)
    lin_project.add_argument("--out")
    lin_project.set_defaults(handler=_lin_project)

    lin_generate = lin_commands.add_parser("generate", help="Write a random family file")
    lin_generate.add_argument("graph")
    lin_generate.add_argument("--seed", type=_non_negative, required=True)
    lin_generate.add_argument("--kind", choices=kinds, default=Kind.NORMAL.value)
    lin_generate.add_argument("--leg-dim", type=_positive, default=2)
    lin_generate.add_argument("--delta", type=float, default=0.0)
    lin_generate.add_argument("--out")
    lin_generate.set_defaults(handler=_lin_generate)

    return parser


def _fail(message: str, code: int) -> int:
    first_line = message.strip().splitlines()[0] if message.strip() else "error"
    print(f"error: {first_line}", file=sys.stderr)
    return code


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, dispatch, print results. Returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.debug:
            setup_logging(debug_mode=True)
        handler: Handler = args.handler
        lines = handler(args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 0
    except (UsageError, FormatError) as e:
        return _fail(str(e), 2)
    except OSError as e:
        return _fail(f"{e.strerror or e}: {e.filename}", 2)
    except PincushionError as e:
        return _fail(str(e), 1)

    for line in lines:
        print(line)
    return 0


def main() -> None:
    sys.exit(run())
