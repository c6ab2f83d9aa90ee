"""Energy minimization: gradient descent, exact coordinate descent, staged pipelines."""

from __future__ import annotations

import logging
import math
import zlib
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .energy import (
    AdmissibleFunction,
    LocalField,
    energy,
    gradient_lipschitz_bound,
)
from .graph import Graph

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

GRADIENT_TOL = "gradient_tol"
MAX_ITERS = "max_iters"
NO_IMPROVEMENT = "no_coordinate_improvement"


class SolverError(RuntimeError):
    """The optimizer hit a non-finite energy or gradient."""


@dataclass(frozen=True)
class SolverParams:
    max_iters: int = 5000
    grad_tol: float = 1e-6
    step_rule: str = "lipschitz_auto"  # or "fixed"
    eta: float = 0.01  # used by step_rule="fixed"
    restarts: int = 5
    seed: int = 0
    coordinate_sweeps: int = 200
    sample_points_per_degree: int = 16

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be > 0")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.coordinate_sweeps < 1:
            raise ValueError("coordinate_sweeps must be >= 1")
        if self.sample_points_per_degree < 8:
            raise ValueError("sample_points_per_degree must be >= 8")
        if self.step_rule not in ("lipschitz_auto", "fixed"):
            raise ValueError(f"unknown step rule {self.step_rule!r}")
        if self.step_rule == "fixed" and not self.eta > 0:
            raise ValueError("fixed step size must be > 0")


@dataclass
class SolveTrace:
    """Result of one optimizer run, or of a whole pipeline.

    ``energy_per_iteration[0]`` is the starting energy. For pipelines,
    ``stages`` holds each stage's own trace and ``history`` its energies (energies
    of different coupling functions are not comparable).
    """

    energy_per_iteration: list[float]
    final_configuration: np.ndarray
    final_energy: float
    iterations_used: int
    termination_reason: str
    g: AdmissibleFunction | None = None
    method: str = ""
    stages: list["SolveTrace"] = field(default_factory=list)
    restart: int = 0
    update_energies: list[float] | None = None

    @property
    def history(self) -> list[list[float]]:
        if self.stages:
            return [s.energy_per_iteration for s in self.stages]
        return [self.energy_per_iteration]


def stream_seed(seed: int, name: str, *index: int) -> np.random.SeedSequence:
    """Independent, named random stream derived from a single user seed."""
    return np.random.SeedSequence(entropy=seed, spawn_key=(zlib.crc32(name.encode()), *index))


def random_configuration(n: int, seed) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.random.default_rng(seed).uniform(0.0, TWO_PI, n)


# ---------------------------------------------------------------------------
# univariate trigonometric polynomials


@lru_cache(maxsize=64)
def _sample_tables(degree: int, points: int):
    t = np.linspace(0.0, TWO_PI, points, endpoint=False)
    kt = np.multiply.outer(t, np.arange(1, degree + 1))
    return t, np.cos(kt), np.sin(kt)


def minimize_trig_poly(
    field: LocalField,
    sample_points_per_degree: int = 16,
    candidates: int = 3,
    current: float | None = None,
) -> float:
    """Global minimizer in ``[0, 2π)`` of ``Σ A_k cos(kt) + B_k sin(kt)``.

    The polynomial is sampled on ``max(64, sample_points_per_degree · d)``
    equispaced points; the lowest ``candidates`` discrete local minima are
    polished by safeguarded Newton iteration on ``h'`` inside their bracket.
    A zero field returns ``current`` (or 0).
    """
    if field.is_zero():
        return 0.0 if current is None else float(current)
    d = field.degree
    A, B = np.asarray(field.A, dtype=float), np.asarray(field.B, dtype=float)
    points = max(64, sample_points_per_degree * d)
    ts, cos_t, sin_t = _sample_tables(d, points)
    h = cos_t @ A + sin_t @ B
    rise = np.empty_like(h)  # rise[i] = h[i+1] - h[i], cyclically
    np.subtract(h[1:], h[:-1], out=rise[:-1])
    rise[-1] = h[0] - h[-1]
    is_min = rise >= 0
    is_min[1:] &= rise[:-1] <= 0
    is_min[0] &= rise[-1] <= 0
    idx = np.flatnonzero(is_min)
    idx = idx[np.argsort(h[idx], kind="stable")[:candidates]]

    delta = TWO_PI / points
    a_list, b_list = A.tolist(), B.tolist()
    best_t = float(ts[idx[0]])
    best_h = _trig_value(a_list, b_list, best_t)
    for j in idx:
        t = _polish(a_list, b_list, float(ts[j]) - delta, float(ts[j]) + delta, float(ts[j]))
        val = _trig_value(a_list, b_list, t)
        if val < best_h:
            best_t, best_h = t, val
    return best_t % TWO_PI


def _trig_value(a, b, t):
    c1, s1 = math.cos(t), math.sin(t)
    ck, sk = c1, s1
    total = 0.0
    for ak, bk in zip(a, b):
        total += ak * ck + bk * sk
        ck, sk = ck * c1 - sk * s1, sk * c1 + ck * s1
    return total


def _trig_derivs(a, b, t):
    """First and second derivative of the trigonometric polynomial at ``t``."""
    c1, s1 = math.cos(t), math.sin(t)
    ck, sk = c1, s1
    d1 = d2 = 0.0
    for k, (ak, bk) in enumerate(zip(a, b), start=1):
        d1 += k * (bk * ck - ak * sk)
        d2 -= k * k * (ak * ck + bk * sk)
        ck, sk = ck * c1 - sk * s1, sk * c1 + ck * s1
    return d1, d2


def _polish(a, b, lo, hi, t):
    """Locate the critical point of a sampled local minimum inside ``[lo, hi]``.

    Newton steps on ``h'`` are kept inside a sign-change bracket and replaced by
    bisection when they leave it; without a bracket the sample point is returned.
    """
    g_mid, _ = _trig_derivs(a, b, t)
    if g_mid < 0:
        lo = t
        if _trig_derivs(a, b, hi)[0] < 0:
            return t
    else:
        hi = t
        if _trig_derivs(a, b, lo)[0] > 0:
            return t
    t = 0.5 * (lo + hi)
    for _ in range(80):
        d1, d2 = _trig_derivs(a, b, t)
        if d1 < 0:
            lo = t
        else:
            hi = t
        step = d1 / d2 if d2 > 0 else math.inf
        t_new = t - step
        if not lo <= t_new <= hi:
            t_new = 0.5 * (lo + hi)
        if abs(t_new - t) < 1e-13 or hi - lo < 1e-13:
            return t_new
        t = t_new
    return t


# ---------------------------------------------------------------------------
# optimizers


def _check_start(graph: Graph, theta0) -> np.ndarray:
    theta = np.array(theta0, dtype=float)
    if theta.shape != (graph.n,):
        raise ValueError(f"expected {graph.n} angles, got shape {theta.shape}")
    return np.mod(theta, TWO_PI)


def _value_and_grad(graph: Graph, g: AdmissibleFunction, theta: np.ndarray):
    diff = theta[graph.u] - theta[graph.v]
    kd = np.multiply.outer(diff, g.harmonics)
    value = 2.0 * float(graph.w @ (np.cos(kd) @ g.coeffs))
    edge_term = -2.0 * graph.w * (np.sin(kd) @ (g.harmonics * g.coeffs))
    grad = np.bincount(graph.u, weights=edge_term, minlength=graph.n)
    grad -= np.bincount(graph.v, weights=edge_term, minlength=graph.n)
    return value, grad


def gradient_descent(graph: Graph, g: AdmissibleFunction, theta0, params: SolverParams) -> SolveTrace:
    """Plain gradient descent on the torus.

    With ``step_rule="lipschitz_auto"`` the step is ``1/L`` for a global bound
    ``L`` on the Hessian norm, so the energy never increases.
    """
    theta = _check_start(graph, theta0)
    if graph.num_edges == 0:
        return SolveTrace([0.0], theta, 0.0, 0, GRADIENT_TOL, g=g, method="gd")
    if params.step_rule == "fixed":
        eta = params.eta
    else:
        eta = 1.0 / gradient_lipschitz_bound(graph, g)

    value, grad = _value_and_grad(graph, g, theta)
    energies = [value]
    reason = MAX_ITERS
    iters = 0
    for iters in range(params.max_iters + 1):
        if not (math.isfinite(value) and np.all(np.isfinite(grad))):
            raise SolverError(f"non-finite energy or gradient at iteration {iters}: f = {value}")
        if float(np.linalg.norm(grad)) <= params.grad_tol:
            reason = GRADIENT_TOL
            break
        if iters == params.max_iters:
            break
        theta = np.mod(theta - eta * grad, TWO_PI)
        value, grad = _value_and_grad(graph, g, theta)
        energies.append(value)
    final = energy(graph, g, theta)
    return SolveTrace(energies, theta, final, iters, reason, g=g, method="gd")


def coordinate_descent(
    graph: Graph,
    g: AdmissibleFunction,
    theta0,
    params: SolverParams,
    rng: np.random.Generator | None = None,
    record_updates: bool = False,
) -> SolveTrace:
    """Exact coordinate descent.

    Each sweep visits the vertices in a fresh random order and moves every
    angle to the global minimizer of its local field. A move is only accepted
    if it lowers the field, so the energy is monotone. Stops when a sweep gains
    less than ``grad_tol`` or after ``coordinate_sweeps`` sweeps.
    """
    theta = _check_start(graph, theta0)
    if rng is None:
        rng = np.random.default_rng(params.seed)
    current = energy(graph, g, theta)
    if not math.isfinite(current):
        raise SolverError(f"non-finite starting energy {current}")
    energies = [current]
    updates = [current] if record_updates else None
    reason = MAX_ITERS
    sweeps = 0
    spd = params.sample_points_per_degree
    # per-vertex cos(kθ), sin(kθ), refreshed on every accepted move
    k = g.harmonics
    coef2 = 2.0 * g.coeffs
    cos_k = np.cos(np.multiply.outer(k, theta))
    sin_k = np.sin(np.multiply.outer(k, theta))
    adj = graph.adjacency
    indptr, indices, data = adj.indptr, adj.indices, adj.data
    for sweeps in range(1, params.coordinate_sweeps + 1):
        running = current
        for i in rng.permutation(graph.n):
            lo, hi = indptr[i], indptr[i + 1]
            if lo == hi:
                continue
            nb, w = indices[lo:hi], data[lo:hi]
            fld = LocalField(coef2 * (cos_k[:, nb] @ w), coef2 * (sin_k[:, nb] @ w))
            if fld.is_zero():
                continue
            t = minimize_trig_poly(fld, spd, current=theta[i])
            a, b = fld.A.tolist(), fld.B.tolist()
            h_new, h_old = _trig_value(a, b, t), _trig_value(a, b, theta[i])
            if h_new < h_old:
                theta[i] = t
                cos_k[:, i] = np.cos(k * t)
                sin_k[:, i] = np.sin(k * t)
                running += h_new - h_old
                if record_updates:
                    updates.append(running)
        new = energy(graph, g, theta)
        if not math.isfinite(new):
            raise SolverError(f"non-finite energy after sweep {sweeps}")
        energies.append(new)
        gain = current - new
        current = new
        if gain < params.grad_tol:
            reason = NO_IMPROVEMENT
            break
    return SolveTrace(energies, theta, current, sweeps, reason, g=g, method="cd",
                      update_energies=updates)


# ---------------------------------------------------------------------------
# pipelines

METHODS = {"gd": "gd", "gradient": "gd", "gradient_descent": "gd",
           "cd": "cd", "coordinate": "cd", "coordinate_descent": "cd"}


@dataclass(frozen=True)
class Stage:
    g: AdmissibleFunction
    method: str = "gd"
    params: SolverParams = SolverParams()

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; use 'gd' or 'cd'")
        object.__setattr__(self, "method", METHODS[self.method])


def default_schedule(params: SolverParams = SolverParams(), final=None) -> list[Stage]:
    """Cosine gradient descent, then coordinate descent on the 5-harmonic tent series."""
    from .energy import cosine, fourier_tent

    return [Stage(cosine(), "gd", params), Stage(final or fourier_tent(5), "cd", params)]


def _run_stage(graph, stage: Stage, theta, rng) -> SolveTrace:
    if stage.method == "gd":
        return gradient_descent(graph, stage.g, theta, stage.params)
    return coordinate_descent(graph, stage.g, theta, stage.params, rng=rng)


def _run_once(graph: Graph, schedule, seed: int, restart: int, theta0=None) -> SolveTrace:
    theta = random_configuration(graph.n, stream_seed(seed, "init", restart)) if theta0 is None else theta0
    stages = []
    for s, stage in enumerate(schedule):
        rng = np.random.default_rng(stream_seed(seed, "order", restart, s))
        trace = _run_stage(graph, stage, theta, rng)
        log.debug("restart %d stage %d (%s, %s): %d iterations, f = %.6g (%s)",
                  restart, s, stage.g.spec, stage.method, trace.iterations_used,
                  trace.final_energy, trace.termination_reason)
        stages.append(trace)
        theta = trace.final_configuration
    last = stages[-1]
    return replace(last, stages=stages, restart=restart)


def solve_pipeline(graph: Graph, schedule, seed: int = 0, restarts: int = 1, theta0=None) -> SolveTrace:
    """Run the stages in order, each warm-started from the previous one.

    Stage 1 starts from a random configuration (or ``theta0``). With several
    restarts, the run with the lowest final-stage energy wins (first on ties).
    """
    schedule = list(schedule)
    if not schedule:
        raise ValueError("schedule must contain at least one stage")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    best = None
    for r in range(restarts):
        trace = _run_once(graph, schedule, seed, r, theta0)
        if best is None or trace.final_energy < best.final_energy:
            best = trace
    return best
