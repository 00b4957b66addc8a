"""
File formats for the matrix laboratory.

Sweep records are written as CSV with a fixed header. Matrix families use a
plain text format: a ``matrix <vertex> <n>`` header followed by ``n`` rows
of ``n`` whitespace-separated complex entries written ``a+bi``.
"""

import csv
import io
import math
from collections.abc import Iterable
from pathlib import Path

import numpy as np

from .errors import FormatError
from .errors import LinLabError
from .graph_core import SimplicialGraph
from .graph_core import read_text_file
from .lin_lab import DefectReport
from .lin_lab import ExperimentRecord
from .lin_lab import MatrixFamily
from .lin_lab import new_family

CSV_HEADER = (
    "delta",
    "trial",
    "seed",
    "pre_edge_defect",
    "pre_normality",
    "epsilon",
    "post_edge_defect",
    "post_normality",
    "iterations",
    "converged",
)


def _real(x: float) -> str:
    """Shortest decimal that reads back to the same double."""
    return repr(float(x))


def _record_row(record: ExperimentRecord) -> list[str]:
    return [
        _real(record.delta),
        str(record.trial),
        str(record.seed),
        _real(record.before.max_edge_commutator),
        _real(record.before.max_normality),
        _real(record.epsilon),
        _real(record.after.max_edge_commutator),
        _real(record.after.max_normality),
        str(record.iterations),
        "true" if record.converged else "false",
    ]


def records_to_csv_text(records: Iterable[ExperimentRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(_record_row(r) for r in records)
    return buffer.getvalue()


def write_records_csv(records: Iterable[ExperimentRecord], path: Path) -> None:
    Path(path).write_text(records_to_csv_text(records), encoding="utf-8")


def read_records_csv(path: Path) -> list[ExperimentRecord]:
    """Load records written by :func:`write_records_csv`.

    Only the CSV columns survive the trip: the self-adjoint and unitary
    defects come back as zero.
    """
    records = []
    reader = csv.DictReader(io.StringIO(read_text_file(path)))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        msg = f"Unexpected CSV header: {reader.fieldnames}"
        raise FormatError(msg, 1)
    for lineno, row in enumerate(reader, start=2):
        try:
            records.append(
                ExperimentRecord(
                    delta=float(row["delta"]),
                    trial=int(row["trial"]),
                    seed=int(row["seed"]),
                    before=DefectReport(
                        max_edge_commutator=float(row["pre_edge_defect"]),
                        max_normality=float(row["pre_normality"]),
                        max_selfadjoint=0.0,
                        max_unitary=0.0,
                    ),
                    epsilon=float(row["epsilon"]),
                    after=DefectReport(
                        max_edge_commutator=float(row["post_edge_defect"]),
                        max_normality=float(row["post_normality"]),
                        max_selfadjoint=0.0,
                        max_unitary=0.0,
                    ),
                    iterations=int(row["iterations"]),
                    converged=row["converged"] == "true",
                )
            )
        except (TypeError, ValueError) as e:
            msg = f"bad record: {e}"
            raise FormatError(msg, lineno) from e
    return records


# =============================================================================
# Family files
# =============================================================================


def format_complex(z: complex) -> str:
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{_real(z.real)}{sign}{_real(abs(z.imag))}i"


def parse_complex(token: str) -> complex:
    if not token.endswith("i"):
        msg = f"complex entry must end in 'i': {token!r}"
        raise ValueError(msg)
    return complex(token[:-1] + "j")


def serialize_family(fam: MatrixFamily) -> str:
    lines = []
    for v in fam.graph.vertices:
        lines.append(f"matrix {v} {fam.dimension}")
        lines.extend(" ".join(format_complex(complex(z)) for z in row) for row in fam[v])
    return "".join(f"{line}\n" for line in lines)


def parse_family(g: SimplicialGraph, text: str) -> MatrixFamily:
    """Read a family file; every vertex of ``g`` must appear exactly once."""
    rows = [
        (lineno, line.split("#", 1)[0].split())
        for lineno, line in enumerate(text.splitlines(), start=1)
    ]
    rows = [(lineno, tokens) for lineno, tokens in rows if tokens]

    entries: dict[str, np.ndarray] = {}
    pos = 0
    while pos < len(rows):
        lineno, tokens = rows[pos]
        if tokens[0] != "matrix" or len(tokens) != 3 or not tokens[2].isdecimal():
            msg = f"expected 'matrix <vertex> <n>', got {' '.join(tokens)!r}"
            raise FormatError(msg, lineno)
        vertex, n = tokens[1], int(tokens[2])
        if vertex in entries:
            msg = f"vertex {vertex!r} appears twice"
            raise FormatError(msg, lineno)
        if vertex not in g:
            msg = f"vertex {vertex!r} is not in the graph"
            raise FormatError(msg, lineno)
        if n < 1:
            msg = f"matrix {vertex!r} must have positive dimension"
            raise FormatError(msg, lineno)
        if pos + n >= len(rows):
            msg = f"matrix {vertex!r} needs {n} rows"
            raise FormatError(msg, lineno)
        matrix = np.zeros((n, n), dtype=np.complex128)
        for r in range(n):
            row_lineno, row = rows[pos + 1 + r]
            if len(row) != n:
                msg = f"expected {n} entries, got {len(row)}"
                raise FormatError(msg, row_lineno)
            try:
                matrix[r] = [parse_complex(token) for token in row]
            except ValueError as e:
                raise FormatError(str(e), row_lineno) from e
        entries[vertex] = matrix
        pos += n + 1

    missing = sorted(set(g.vertices) - set(entries))
    if missing:
        msg = f"no matrix given for vertices {missing}"
        raise FormatError(msg)
    try:
        return new_family(g, entries)
    except LinLabError as e:
        raise FormatError(str(e)) from e


def read_family(g: SimplicialGraph, path: Path) -> MatrixFamily:
    return parse_family(g, read_text_file(path))


def write_family(fam: MatrixFamily, path: Path) -> None:
    Path(path).write_text(serialize_family(fam), encoding="utf-8")
