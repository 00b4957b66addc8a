"""
Numerical laboratory for selective almost-commuting matrices.

Families of matrices indexed by graph vertices are generated so that they
commute exactly along the edges, perturbed into contractions that only almost
commute, and pushed back to an exactly commuting normal (or self-adjoint, or
unitary) family by a penalty method. All norms are the normalized
Hilbert-Schmidt norm ``sqrt(tr(A* A) / n)``.

Gradient convention: for a real function ``f`` of a complex matrix ``B`` the
gradient is ``df/dRe(B) + i df/dIm(B)``, so that
``f(B + H) = f(B) + Re tr(grad* H) + o(H)``.
"""

from collections import deque
from collections.abc import Callable
from collections.abc import Iterable
from collections.abc import Mapping
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from enum import StrEnum
from statistics import median

import numpy as np
from numpy.typing import ArrayLike
from numpy.typing import NDArray
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from scipy.linalg import polar
from scipy.optimize import OptimizeResult
from scipy.optimize import minimize
from scipy.stats import unitary_group

from .config import DEFAULT_DIMENSION_LIMIT
from .config import ProjectionOptions
from .config import logger
from .errors import DimensionLimitError
from .errors import LinLabError
from .errors import NumericalError
from .graph_core import SimplicialGraph

ComplexArray = NDArray[np.complex128]
FloatArray = NDArray[np.float64]
StepCallback = Callable[[float, int, float], None]

# Barzilai-Borwein steps are clipped to this range.
_MIN_STEP = 1e-12
_MAX_STEP = 1e12


class Kind(StrEnum):
    NORMAL = "normal"
    SELFADJOINT = "selfadjoint"
    UNITARY = "unitary"


class MatrixFamily(BaseModel):
    """Square complex matrices of one common dimension, one per vertex."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    graph: SimplicialGraph
    dimension: int = Field(ge=1)
    entries: dict[str, np.ndarray]

    def __getitem__(self, v: str) -> ComplexArray:
        return self.entries[v]


class DefectReport(BaseModel):
    """Worst-case relation defects of a family, in the normalized HS norm."""

    model_config = ConfigDict(frozen=True)

    max_edge_commutator: float = Field(ge=0)
    max_normality: float = Field(ge=0)
    max_selfadjoint: float = Field(ge=0)
    max_unitary: float = Field(ge=0)


class ExperimentRecord(BaseModel):
    """One perturb-and-project trial."""

    model_config = ConfigDict(frozen=True)

    delta: float
    trial: int
    seed: int
    before: DefectReport
    epsilon: float = Field(ge=0)
    after: DefectReport
    iterations: int = Field(ge=0)
    converged: bool


def new_family(
    g: SimplicialGraph,
    entries: Mapping[str, ArrayLike],
    dimension: int | None = None,
) -> MatrixFamily:
    """Validate and copy matrices into a family over ``g``.

    ``dimension`` is only needed for graphs without vertices.
    """
    keys = {str(v) for v in entries}
    if keys != set(g.vertices):
        msg = (
            f"Family vertices {sorted(keys)} do not match graph vertices "
            f"{list(g.vertices)}"
        )
        raise LinLabError(msg)

    matrices: dict[str, ComplexArray] = {}
    for v in g.vertices:
        m = np.array(entries[v], dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            msg = f"Matrix for vertex {v!r} is not square: shape {m.shape}"
            raise LinLabError(msg)
        if not np.all(np.isfinite(m)):
            msg = f"Matrix for vertex {v!r} has non-finite entries"
            raise LinLabError(msg)
        matrices[v] = m

    dims = {m.shape[0] for m in matrices.values()}
    if dimension is not None:
        dims.add(dimension)
    if len(dims) != 1:
        msg = f"Matrices have differing dimensions: {sorted(dims)}"
        raise LinLabError(msg)
    n = dims.pop()
    if n < 1:
        msg = "Matrix dimension must be at least 1"
        raise LinLabError(msg)
    return MatrixFamily(graph=g, dimension=n, entries=matrices)


def _square(a: ArrayLike, name: str = "matrix") -> ComplexArray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        msg = f"{name} must be a non-empty square matrix, got shape {m.shape}"
        raise LinLabError(msg)
    return m


def hs_norm(a: ArrayLike) -> float:
    """Normalized Hilbert-Schmidt norm ``sqrt(tr(A* A) / n)``."""
    m = _square(a)
    return float(np.linalg.norm(m) / np.sqrt(m.shape[0]))


def commutator(a: ArrayLike, b: ArrayLike) -> ComplexArray:
    x = _square(a, "left operand")
    y = _square(b, "right operand")
    if x.shape != y.shape:
        msg = f"Commutator of matrices with shapes {x.shape} and {y.shape}"
        raise LinLabError(msg)
    return x @ y - y @ x


def gamma_defect(fam: MatrixFamily) -> DefectReport:
    g = fam.graph
    identity = np.eye(fam.dimension)
    edge = [hs_norm(commutator(fam[v], fam[w])) for v, w in sorted(g.edges)]
    normality = [hs_norm(commutator(fam[v], fam[v].conj().T)) for v in g.vertices]
    selfadjoint = [hs_norm(fam[v] - fam[v].conj().T) for v in g.vertices]
    unitary = [hs_norm(identity - fam[v] @ fam[v].conj().T) for v in g.vertices]
    return DefectReport(
        max_edge_commutator=max(edge, default=0.0),
        max_normality=max(normality, default=0.0),
        max_selfadjoint=max(selfadjoint, default=0.0),
        max_unitary=max(unitary, default=0.0),
    )


# =============================================================================
# Tensor-leg generator and perturbation
# =============================================================================


def tensor_legs(g: SimplicialGraph) -> list[tuple[str, str]]:
    """Non-adjacent vertex pairs, loops ``(v, v)`` included, in sorted order."""
    return [
        (v, w)
        for i, v in enumerate(g.vertices)
        for w in g.vertices[i:]
        if v == w or not g.has_edge(v, w)
    ]


def _embed(local: ComplexArray, support: Sequence[int], legs: int, leg_dim: int) -> ComplexArray:
    """Place ``local`` on the ``support`` legs, identity on the rest."""
    rest = [k for k in range(legs) if k not in support]
    full = np.kron(local, np.eye(leg_dim ** len(rest)))
    order = np.argsort(list(support) + rest)
    tensor = full.reshape((leg_dim,) * (2 * legs))
    tensor = tensor.transpose([*order, *(legs + order)])
    return tensor.reshape(leg_dim**legs, leg_dim**legs)


def _random_local(size: int, kind: Kind, rng: np.random.Generator) -> ComplexArray:
    u = np.asarray(unitary_group.rvs(size, random_state=rng), dtype=np.complex128)
    if kind is Kind.UNITARY:
        return np.asarray(u, dtype=np.complex128)
    if kind is Kind.SELFADJOINT:
        spectrum = rng.uniform(-1.0, 1.0, size)
    else:
        radius = np.sqrt(rng.uniform(0.0, 1.0, size))
        spectrum = radius * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, size))
    return np.asarray((u * spectrum) @ u.conj().T, dtype=np.complex128)


def generate_gamma_family(
    g: SimplicialGraph,
    leg_dim: int,
    seed: int | Sequence[int] | None,
    kind: Kind = Kind.NORMAL,
    *,
    dimension_limit: int = DEFAULT_DIMENSION_LIMIT,
) -> MatrixFamily:
    """Random family commuting exactly according to ``g`` and generically no more.

    Each non-edge (loops included) is a tensor leg of dimension ``leg_dim``;
    vertex ``v`` acts on the legs whose pair contains ``v``. Two vertices share
    a leg exactly when they are not adjacent.
    """
    if leg_dim < 2:
        msg = f"leg_dim must be at least 2, got {leg_dim}"
        raise LinLabError(msg)
    legs = tensor_legs(g)
    dimension = leg_dim ** len(legs)
    if dimension >= dimension_limit:
        msg = (
            f"Tensor dimension {leg_dim}^{len(legs)} = {dimension} is not below "
            f"the limit {dimension_limit}"
        )
        raise DimensionLimitError(msg)

    rng = np.random.default_rng(seed)
    entries: dict[str, ComplexArray] = {}
    for v in g.vertices:
        support = [k for k, pair in enumerate(legs) if v in pair]
        local = _random_local(leg_dim ** len(support), kind, rng)
        entries[v] = _embed(local, support, len(legs), leg_dim)
    logger.debug(
        f"Generated {kind} family: {len(legs)} legs of dimension {leg_dim}, "
        f"total dimension {dimension}"
    )
    return MatrixFamily(graph=g, dimension=dimension, entries=entries)


def perturb(fam: MatrixFamily, delta: float, seed: int | Sequence[int] | None) -> MatrixFamily:
    """Add ``delta`` times complex Gaussian noise, then rescale to contractions."""
    if delta < 0:
        msg = f"delta must be non-negative, got {delta}"
        raise LinLabError(msg)
    n = fam.dimension
    rng = np.random.default_rng(seed)
    entries: dict[str, ComplexArray] = {}
    for v in fam.graph.vertices:
        noise = (
            rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        ) / np.sqrt(2 * n)
        b = fam[v] + delta * noise
        entries[v] = b / max(1.0, float(np.linalg.norm(b, 2)))
    return MatrixFamily(graph=fam.graph, dimension=n, entries=entries)


def polar_retraction(a: ArrayLike) -> ComplexArray:
    """Unitary factor of the polar decomposition."""
    u, _ = polar(_square(a))
    return np.asarray(u, dtype=np.complex128)


# =============================================================================
# Objective and gradient
# =============================================================================


def _adjoint(x: ComplexArray) -> ComplexArray:
    return np.conj(np.swapaxes(x, -1, -2))


class _Problem:
    """Objective and gradient on stacked matrices (vertex order of the graph)."""

    def __init__(self, a: MatrixFamily, lam: float, kind: Kind) -> None:
        g = a.graph
        index = {v: i for i, v in enumerate(g.vertices)}
        pairs = sorted(g.edges)
        self.left = np.array([index[v] for v, _ in pairs], dtype=np.intp)
        self.right = np.array([index[w] for _, w in pairs], dtype=np.intp)
        self.n = a.dimension
        self.target = stack(a)
        self.lam = lam
        self.kind = kind

    def value(self, x: ComplexArray) -> float:
        total = float(np.sum(np.abs(x - self.target) ** 2))
        penalty = 0.0
        if self.left.size:
            xi, xj = x[self.left], x[self.right]
            penalty += float(np.sum(np.abs(xi @ xj - xj @ xi) ** 2))
        if self.kind is Kind.NORMAL:
            xh = _adjoint(x)
            penalty += float(np.sum(np.abs(x @ xh - xh @ x) ** 2))
        return (total + self.lam * penalty) / self.n

    def gradient(self, x: ComplexArray) -> ComplexArray:
        grad = 2.0 * (x - self.target)
        if self.left.size:
            xi, xj = x[self.left], x[self.right]
            c = xi @ xj - xj @ xi
            xih, xjh = _adjoint(xi), _adjoint(xj)
            np.add.at(grad, self.left, 2.0 * self.lam * (c @ xjh - xjh @ c))
            np.add.at(grad, self.right, 2.0 * self.lam * (xih @ c - c @ xih))
        if self.kind is Kind.NORMAL:
            xh = _adjoint(x)
            c = x @ xh - xh @ x
            grad += 4.0 * self.lam * (c @ x - x @ c)
        grad /= self.n
        if self.kind is Kind.SELFADJOINT:
            grad = 0.5 * (grad + _adjoint(grad))
        return grad

    def direction(self, x: ComplexArray, grad: ComplexArray) -> ComplexArray:
        """Descent direction: the gradient, projected to the tangent space for unitaries."""
        if self.kind is Kind.UNITARY:
            w = _adjoint(x) @ grad
            return x @ (0.5 * (w - _adjoint(w)))
        return grad

    def retract(self, y: ComplexArray) -> ComplexArray:
        if self.kind is Kind.UNITARY:
            return np.stack([polar_retraction(m) for m in y]) if len(y) else y
        if self.kind is Kind.SELFADJOINT:
            return 0.5 * (y + _adjoint(y))
        return y


def stack(fam: MatrixFamily) -> ComplexArray:
    n = fam.dimension
    if not fam.graph.vertices:
        return np.zeros((0, n, n), dtype=np.complex128)
    return np.stack([fam[v] for v in fam.graph.vertices])


def unstack(g: SimplicialGraph, x: ComplexArray) -> MatrixFamily:
    return MatrixFamily(
        graph=g,
        dimension=x.shape[-1],
        entries={v: np.array(x[i]) for i, v in enumerate(g.vertices)},
    )


def _check_pair(g: SimplicialGraph, a: MatrixFamily, b: MatrixFamily, lam: float) -> None:
    if a.graph != g or b.graph != g:
        msg = "Families must live over the given graph"
        raise LinLabError(msg)
    if a.dimension != b.dimension:
        msg = f"Family dimensions differ: {a.dimension} vs {b.dimension}"
        raise LinLabError(msg)
    if lam < 0:
        msg = f"lambda must be non-negative, got {lam}"
        raise LinLabError(msg)


def objective(
    g: SimplicialGraph, a: MatrixFamily, b: MatrixFamily, lam: float, kind: Kind
) -> float:
    """Squared distance to ``a`` plus ``lam`` times the squared relation defects of ``b``.

    The normality term only applies to the normal kind.
    """
    _check_pair(g, a, b, lam)
    return _Problem(a, lam, kind).value(stack(b))


def gradient(
    g: SimplicialGraph, a: MatrixFamily, b: MatrixFamily, lam: float, kind: Kind
) -> MatrixFamily:
    """Gradient of :func:`objective` with respect to each ``b_v``."""
    _check_pair(g, a, b, lam)
    return unstack(g, _Problem(a, lam, kind).gradient(stack(b)))


def finite_difference_gradient(
    f: Callable[[MatrixFamily], float], fam: MatrixFamily, h: float = 1e-5
) -> MatrixFamily:
    """Central differences along every real and imaginary matrix direction."""
    h2 = h / 2.0
    x0 = stack(fam)
    out = np.zeros_like(x0)
    for idx in np.ndindex(x0.shape):
        for unit in (1.0, 1j):
            xp = x0.copy()
            xp[idx] += h2 * unit
            xm = x0.copy()
            xm[idx] -= h2 * unit
            slope = (f(unstack(fam.graph, xp)) - f(unstack(fam.graph, xm))) / h
            out[idx] += unit * slope
    return unstack(fam.graph, out)


# =============================================================================
# Penalty-method projection
# =============================================================================


def _check_finite(g: SimplicialGraph, x: ComplexArray, value: float, stage: float, iteration: int) -> None:
    if np.isfinite(value) and np.all(np.isfinite(x)):
        return
    bad = [v for i, v in enumerate(g.vertices) if not np.all(np.isfinite(x[i]))]
    where = f"vertex {bad[0]!r}" if bad else "the objective"
    msg = f"Non-finite value at {where} (lambda={stage:g}, iteration {iteration})"
    raise NumericalError(msg)


def _initial_point(x: ComplexArray, kind: Kind) -> ComplexArray:
    if kind is Kind.SELFADJOINT:
        return 0.5 * (x + _adjoint(x))
    if kind is Kind.UNITARY and len(x):
        return np.stack([polar_retraction(m) for m in x])
    return x.copy()


def _stationarity(d: ComplexArray) -> float:
    """Largest normalized Hilbert-Schmidt norm among the vertex blocks of ``d``."""
    if not d.size:
        return 0.0
    n = d.shape[-1]
    return float(np.sqrt(np.max(np.sum(np.abs(d) ** 2, axis=(1, 2))) / n))


class _StallMonitor:
    """Best value of a stage over a sliding window of accepted steps."""

    def __init__(self, value: float, options: ProjectionOptions) -> None:
        self.best = value
        self.rtol = options.stall_rtol
        self.trail = deque([value], maxlen=options.stall_window + 1)

    def update(self, value: float) -> bool:
        """Record an accepted value; True once a full window brought no progress."""
        self.best = min(self.best, value)
        self.trail.append(self.best)
        if len(self.trail) < (self.trail.maxlen or 0):
            return False
        return self.trail[0] - self.best <= self.rtol * abs(self.trail[0])


def _to_real(x: ComplexArray) -> FloatArray:
    return np.concatenate([x.real.ravel(), x.imag.ravel()])


def _from_real(v: FloatArray, shape: tuple[int, ...]) -> ComplexArray:
    half = v.size // 2
    return (v[:half] + 1j * v[half:]).reshape(shape)


def _lbfgs_stage(
    problem: _Problem,
    x: ComplexArray,
    g: SimplicialGraph,
    options: ProjectionOptions,
    on_step: StepCallback | None,
) -> tuple[ComplexArray, int, bool]:
    """One penalty stage for the normal and self-adjoint kinds.

    Both live in a linear space of matrices, so the stage is handed to
    L-BFGS-B over the real and imaginary parts. Its line search only accepts
    decreasing steps.
    """
    lam = problem.lam
    shape = x.shape
    iteration = 0

    def fun(v: FloatArray) -> tuple[float, FloatArray]:
        z = problem.retract(_from_real(v, shape))
        value = problem.value(z)
        _check_finite(g, z, value, lam, iteration)
        return value, _to_real(problem.gradient(z))

    value = problem.value(x)
    _check_finite(g, x, value, lam, 0)
    if _stationarity(problem.gradient(x)) <= options.grad_tol:
        return x, 0, False
    monitor = _StallMonitor(value, options)

    def callback(intermediate_result: OptimizeResult) -> None:
        nonlocal iteration
        iteration += 1
        current = float(intermediate_result.fun)
        if on_step is not None:
            on_step(lam, iteration, current)
        z = problem.retract(_from_real(intermediate_result.x, shape))
        if _stationarity(problem.gradient(z)) <= options.grad_tol:
            raise StopIteration
        if monitor.update(current):
            logger.debug(f"lambda={lam:g}: no progress over {options.stall_window} iterations")
            raise StopIteration

    result = minimize(
        fun,
        _to_real(x),
        jac=True,
        method="L-BFGS-B",
        callback=callback,
        options={
            "maxiter": options.max_iterations,
            "maxfun": options.max_iterations * options.max_backtracks,
            "ftol": 0.0,
            "gtol": 0.0,
        },
    )
    exhausted = result.status == 1
    if exhausted:
        logger.debug(f"lambda={lam:g}: iteration budget of {options.max_iterations} exhausted")
    elif result.status == 2:
        logger.debug(f"lambda={lam:g}: line search stalled at iteration {iteration}")
    return problem.retract(_from_real(result.x, shape)), iteration, exhausted


def _descend(
    problem: _Problem,
    x: ComplexArray,
    g: SimplicialGraph,
    options: ProjectionOptions,
    on_step: StepCallback | None,
) -> tuple[ComplexArray, int, bool]:
    """One penalty stage on the unitary group.

    Riemannian gradient steps with Barzilai-Borwein trial sizes, Armijo
    backtracking and a polar retraction. Returns the end point, iterations
    used, and whether the budget ran out.
    """
    lam = problem.lam
    value = problem.value(x)
    _check_finite(g, x, value, lam, 0)
    grad = problem.gradient(x)
    d = problem.direction(x, grad)
    step = 1.0 / (1.0 + lam)
    monitor = _StallMonitor(value, options)

    for it in range(options.max_iterations):
        if _stationarity(d) <= options.grad_tol:
            return x, it, False
        slope = float(np.real(np.vdot(grad, d)))
        for _ in range(options.max_backtracks):
            candidate = problem.retract(x - step * d)
            candidate_value = problem.value(candidate)
            _check_finite(g, candidate, candidate_value, lam, it + 1)
            if candidate_value <= value - options.armijo * step * slope:
                break
            step *= 0.5
        else:
            logger.debug(f"lambda={lam:g}: line search stalled at iteration {it}")
            return x, it, False

        new_grad = problem.gradient(candidate)
        new_d = problem.direction(candidate, new_grad)
        s = candidate - x
        sy = float(np.real(np.vdot(s, new_d - d)))
        step = float(np.real(np.vdot(s, s))) / sy if sy > 0 else 2.0 * step
        step = min(max(step, _MIN_STEP), _MAX_STEP)
        x, value, grad, d = candidate, candidate_value, new_grad, new_d
        if on_step is not None:
            on_step(lam, it + 1, value)
        if monitor.update(value):
            logger.debug(f"lambda={lam:g}: no progress over {options.stall_window} iterations")
            return x, it + 1, False

    logger.debug(f"lambda={lam:g}: iteration budget of {options.max_iterations} exhausted")
    return x, options.max_iterations, True


def project_to_gamma_commuting(
    g: SimplicialGraph,
    a: MatrixFamily,
    options: ProjectionOptions | None = None,
    *,
    kind: Kind = Kind.NORMAL,
    delta: float = 0.0,
    trial: int = 0,
    seed: int = 0,
    on_step: StepCallback | None = None,
) -> tuple[MatrixFamily, ExperimentRecord]:
    """Find a nearby family that commutes exactly according to ``g``.

    Minimizes one penalty stage per weight in the schedule, warm-starting
    every stage from the previous one. Normal and self-adjoint stages use
    L-BFGS-B; unitary stages use retracted gradient steps. ``delta``, ``trial`` and ``seed`` are only
    copied into the returned record.
    """
    options = options or ProjectionOptions()
    if a.graph != g:
        msg = "Family does not live over the given graph"
        raise LinLabError(msg)

    x = _initial_point(stack(a), kind)
    stage = _descend if kind is Kind.UNITARY else _lbfgs_stage
    total_iterations = 0
    exhausted = False
    with np.errstate(over="ignore", invalid="ignore"):
        for lam in options.lambda_schedule:
            problem = _Problem(a, lam, kind)
            x, used, ran_out = stage(problem, x, g, options, on_step)
            total_iterations += used
            exhausted = exhausted or ran_out

    b = unstack(g, x)
    before = gamma_defect(a)
    after = gamma_defect(b)
    epsilon = sum(hs_norm(a[v] - b[v]) for v in g.vertices)
    converged = not exhausted and after.max_edge_commutator <= options.hard_tolerance
    record = ExperimentRecord(
        delta=delta,
        trial=trial,
        seed=seed,
        before=before,
        epsilon=epsilon,
        after=after,
        iterations=total_iterations,
        converged=converged,
    )
    logger.debug(
        f"Projection ({kind}): epsilon={epsilon:.3e}, "
        f"edge defect {before.max_edge_commutator:.3e} -> "
        f"{after.max_edge_commutator:.3e}, {total_iterations} iterations"
    )
    return b, record


# =============================================================================
# Sweep harness
# =============================================================================


def trial_seed(base_seed: int, trial: int) -> int:
    """64-bit seed of one trial, shared by every delta."""
    state = np.random.SeedSequence([base_seed, trial]).generate_state(1, np.uint64)
    return int(state[0])


def _delta_bits(delta: float) -> int:
    return int(np.float64(delta).view(np.uint64))


def sweep(
    g: SimplicialGraph,
    deltas: Iterable[float],
    trials: int,
    base_seed: int,
    kind: Kind = Kind.NORMAL,
    options: ProjectionOptions | None = None,
    *,
    leg_dim: int = 2,
    dimension_limit: int = DEFAULT_DIMENSION_LIMIT,
) -> list[ExperimentRecord]:
    """Generate, perturb and project for every (delta, trial) pair.

    Deterministic for a fixed ``base_seed`` regardless of ``options.workers``.
    Records come back ordered by delta descending, then trial ascending.
    """
    options = options or ProjectionOptions()
    delta_list = [float(d) for d in deltas]
    if any(not d > 0 for d in delta_list):
        msg = f"deltas must be positive, got {delta_list}"
        raise LinLabError(msg)
    if trials < 0:
        msg = f"trials must be non-negative, got {trials}"
        raise LinLabError(msg)
    if base_seed < 0:
        msg = f"base seed must be non-negative, got {base_seed}"
        raise LinLabError(msg)

    # Dimension limit is checked before any trial is scheduled.
    if trials and delta_list:
        generate_gamma_family(g, leg_dim, 0, kind, dimension_limit=dimension_limit)

    def run_trial(trial: int) -> list[ExperimentRecord]:
        seed = trial_seed(base_seed, trial)
        exact = generate_gamma_family(g, leg_dim, seed, kind, dimension_limit=dimension_limit)
        records = []
        for delta in delta_list:
            a = perturb(exact, delta, [seed, _delta_bits(delta)])
            _, record = project_to_gamma_commuting(
                g, a, options, kind=kind, delta=delta, trial=trial, seed=seed
            )
            logger.debug(
                f"trial {trial} delta={delta:g}: epsilon={record.epsilon:.3e} "
                f"converged={record.converged}"
            )
            records.append(record)
        return records

    with ThreadPoolExecutor(max_workers=options.workers) as pool:
        results = [r for batch in pool.map(run_trial, range(trials)) for r in batch]
    results.sort(key=lambda r: (-r.delta, r.trial))

    for delta in sorted(set(delta_list), reverse=True):
        eps = [r.epsilon for r in results if r.delta == delta]
        if eps:
            mid = median(eps)
            logger.info(
                f"delta={delta:g}: median epsilon {mid:.3e} "
                f"(ratio {mid / delta:.3g}) over {len(eps)} trials"
            )
    return results
