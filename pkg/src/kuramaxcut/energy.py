"""Coupling functions and the Kuramoto-type energy ``f(θ) = Σ_ij a_ij g(θ_i − θ_j)``.

Coupling functions are finite cosine series ``g(x) = Σ_k c_k cos(kx)`` with
``g(0) = 1`` and ``g(π) = −1``. Energies use the ordered-pair convention, so
every edge contributes twice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .graph import Graph

TWO_PI = 2.0 * math.pi

ADMISSIBLE_TOL = 1e-9
CHECK_GRID_POINTS = 10_000
CONSTANT_GRID_POINTS = 100_000
CONSTANT_X_MIN = 1e-6


class InadmissibleFunctionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class AdmissibleFunction:
    """``g(x) = Σ_{k=1..d} coeffs[k-1] cos(kx)``."""

    coeffs: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @property
    def harmonics(self) -> np.ndarray:
        return np.arange(1, self.degree + 1)

    @property
    def curvature_bound(self) -> float:
        """``Σ k² |c_k|``, an upper bound on ``|g''|``."""
        return float(np.sum(self.harmonics**2 * np.abs(self.coeffs)))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.cos(np.multiply.outer(x, self.harmonics)) @ self.coeffs

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        k = self.harmonics
        return -np.sin(np.multiply.outer(x, k)) @ (k * self.coeffs)

    @property
    def spec(self) -> str:
        """Round-trippable descriptor accepted by :func:`parse_function`."""
        if self.name == "cosine" or self.name.startswith("tent:"):
            return self.name
        terms = [f"{k}:{float(c)!r}" for k, c in zip(self.harmonics.tolist(), self.coeffs) if c != 0.0]
        return "custom:" + ",".join(terms)

    def __eq__(self, other):
        if not isinstance(other, AdmissibleFunction):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"AdmissibleFunction({self.spec})"


def validate(g: AdmissibleFunction, tol: float = ADMISSIBLE_TOL) -> AdmissibleFunction:
    """Check normalization and the ``[-1, 1]`` range on a dense grid."""
    c = g.coeffs
    if g.degree == 0:
        raise InadmissibleFunctionError("coefficient list is empty")
    if not np.all(np.isfinite(c)):
        raise InadmissibleFunctionError("coefficients must be finite")
    at_zero = float(c.sum())
    at_pi = float(np.sum(c * (-1.0) ** g.harmonics))
    if abs(at_zero - 1.0) > tol:
        raise InadmissibleFunctionError(f"g(0) = {at_zero!r}, expected 1")
    if abs(at_pi + 1.0) > tol:
        raise InadmissibleFunctionError(f"g(pi) = {at_pi!r}, expected -1")
    x = np.linspace(0.0, TWO_PI, CHECK_GRID_POINTS, endpoint=False)
    values = g(x)
    worst = float(np.max(np.abs(values)))
    if worst > 1.0 + tol:
        i = int(np.argmax(np.abs(values)))
        raise InadmissibleFunctionError(
            f"|g(x)| = {worst!r} > 1 at x = {x[i]:.6f}; maximum must sit at 0 and minimum at pi"
        )
    return g


def cosine() -> AdmissibleFunction:
    return AdmissibleFunction(np.array([1.0]), name="cosine")


def fourier_tent(m: int) -> AdmissibleFunction:
    """Normalized truncation of the tent ``1 − (2/π) d(0, x)`` to its first ``m`` odd harmonics."""
    if m < 1:
        raise ValueError(f"tent harmonic count must be >= 1, got {m}")
    k = np.arange(1, 2 * m, 2)
    weights = 1.0 / k**2
    coeffs = np.zeros(2 * m - 1)
    coeffs[k - 1] = weights / weights.sum()
    return AdmissibleFunction(coeffs, name=f"tent:{m}")


def custom(terms: dict[int, float]) -> AdmissibleFunction:
    """Build from ``{harmonic: coefficient}`` and validate."""
    if not terms:
        raise InadmissibleFunctionError("no coefficients given")
    if min(terms) < 1:
        raise InadmissibleFunctionError("harmonic indices start at 1")
    coeffs = np.zeros(max(terms))
    for k, c in terms.items():
        coeffs[k - 1] += c
    return validate(AdmissibleFunction(coeffs, name="custom"))


def make_function(kind: str, arg=None) -> AdmissibleFunction:
    """``make_function("cosine")``, ``make_function("tent", 5)``, ``make_function("custom", {1: 1.0})``."""
    if kind == "cosine":
        return cosine()
    if kind in ("tent", "fourier_tent"):
        return fourier_tent(int(arg))
    if kind == "custom":
        return custom(dict(arg))
    raise ValueError(f"unknown function kind {kind!r}")


def parse_function(spec: str) -> AdmissibleFunction:
    """Parse ``cosine``, ``tent:<m>`` or ``custom:<k>:<c>,<k>:<c>,...``."""
    spec = spec.strip()
    head, _, rest = spec.partition(":")
    if head == "cosine" and not rest:
        return cosine()
    if head == "tent":
        try:
            return fourier_tent(int(rest))
        except ValueError as exc:
            raise ValueError(f"bad tent spec {spec!r}: {exc}") from None
    if head == "custom":
        terms: dict[int, float] = {}
        for item in rest.split(","):
            k, sep, c = item.partition(":")
            if not sep:
                raise ValueError(f"bad custom term {item!r}; expected '<harmonic>:<coefficient>'")
            try:
                k_i, c_f = int(k), float(c)
            except ValueError:
                raise ValueError(f"bad custom term {item!r}") from None
            if k_i in terms:
                raise ValueError(f"harmonic {k_i} given twice")
            terms[k_i] = c_f
        return custom(terms)
    raise ValueError(f"unknown function spec {spec!r}")


def eval_g(g: AdmissibleFunction, x):
    return g(np.mod(x, TWO_PI))


# ---------------------------------------------------------------------------
# energy and derivatives


def _angles(graph: Graph, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (graph.n,):
        raise ValueError(f"expected {graph.n} angles, got shape {theta.shape}")
    return theta


def energy(graph: Graph, g: AdmissibleFunction, theta) -> float:
    theta = _angles(graph, theta)
    if graph.num_edges == 0:
        return 0.0
    diff = theta[graph.u] - theta[graph.v]
    return 2.0 * float(graph.w @ g(diff))


def energy_gradient(graph: Graph, g: AdmissibleFunction, theta) -> np.ndarray:
    theta = _angles(graph, theta)
    diff = theta[graph.u] - theta[graph.v]
    edge_term = 2.0 * graph.w * g.derivative(diff)
    grad = np.bincount(graph.u, weights=edge_term, minlength=graph.n)
    grad -= np.bincount(graph.v, weights=edge_term, minlength=graph.n)
    return grad


def gradient_lipschitz_bound(graph: Graph, g: AdmissibleFunction) -> float:
    """Gershgorin bound on the Hessian norm: ``4 · max weighted degree · Σ k²|c_k|``."""
    if graph.num_edges == 0:
        return 0.0
    return 4.0 * float(graph.weighted_degree.max()) * g.curvature_bound


@dataclass(frozen=True)
class LocalField:
    """``h(t) = Σ_k A_k cos(kt) + B_k sin(kt)``: the energy as a function of one angle."""

    A: np.ndarray
    B: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.A)

    def is_zero(self) -> bool:
        return not (np.any(self.A) or np.any(self.B))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        kt = np.multiply.outer(t, np.arange(1, self.degree + 1))
        return np.cos(kt) @ self.A + np.sin(kt) @ self.B

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        k = np.arange(1, self.degree + 1)
        kt = np.multiply.outer(t, k)
        return np.cos(kt) @ (k * self.B) - np.sin(kt) @ (k * self.A)


def local_field(graph: Graph, g: AdmissibleFunction, theta, i: int) -> LocalField:
    theta = _angles(graph, theta)
    if not 0 <= i < graph.n:
        raise IndexError(f"vertex {i} out of range for n={graph.n}")
    nbrs, w = graph.neighbors(i)
    k = g.harmonics
    k_theta = np.multiply.outer(k, theta[nbrs])
    A = 2.0 * g.coeffs * (np.cos(k_theta) @ w)
    B = 2.0 * g.coeffs * (np.sin(k_theta) @ w)
    return LocalField(A, B)


# ---------------------------------------------------------------------------
# rounding constant


@dataclass(frozen=True)
class ApproximationConstant:
    value: float
    argmin: float


def rounding_ratio(g: AdmissibleFunction, x):
    """``(2/π) · x / (1 − g(x))``."""
    x = np.asarray(x, dtype=float)
    return (2.0 / math.pi) * x / (1.0 - g(x))


def approximation_constant(
    g: AdmissibleFunction, grid_points: int = CONSTANT_GRID_POINTS, xatol: float = 1e-10
) -> ApproximationConstant:
    """``min over (0, π] of (2/π) x / (1 − g(x))``: dense grid, then bounded refinement."""
    x = np.linspace(CONSTANT_X_MIN, math.pi, grid_points)
    gap = 1.0 - g(x)
    if np.any(gap <= 0.0):
        bad = float(x[np.argmax(gap <= 0.0)])
        raise InadmissibleFunctionError(f"1 - g(x) <= 0 at x = {bad:.6g}; g is not admissible")
    r = (2.0 / math.pi) * x / gap
    i = int(np.argmin(r))
    best_x, best_r = float(x[i]), float(r[i])
    lo, hi = float(x[max(i - 1, 0)]), float(x[min(i + 1, grid_points - 1)])
    if hi > lo:
        res = minimize_scalar(
            lambda t: float(rounding_ratio(g, t)),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": xatol},
        )
        if res.fun < best_r:
            best_x, best_r = float(res.x), float(res.fun)
    return ApproximationConstant(best_r, best_x)
