"""Exact Max-Cut oracle for small graphs and checks of the rounding guarantee."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .energy import AdmissibleFunction, approximation_constant, energy
from .graph import Graph, total_weight
from .rounding import Cut, cut_weight, expected_cut

MAX_ORACLE_VERTICES = 26
BOUND_TOL = 1e-9
LOW_BLOCK_BITS = 16


class VerificationError(AssertionError):
    """A guarantee that should hold by construction was violated."""


@dataclass
class VerificationReport:
    maxcut_exact: float | None = None
    energy_bound_ok: bool | None = None
    theorem_bound: float | None = None
    theorem_ok: bool | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def brute_force_maxcut(graph: Graph) -> tuple[float, Cut]:
    """Exact Max-Cut by enumerating all ``2^(n-1)`` partitions with vertex 0 on side A.

    Vertices ``1..m`` (the low block) are tabulated at once; the remaining
    high vertices are walked in Gray-code order so that each step flips a
    single vertex and updates the block's coupling terms in ``O(deg)``.
    """
    n = graph.n
    if n > MAX_ORACLE_VERTICES:
        raise ValueError(f"brute force limited to n <= {MAX_ORACLE_VERTICES}, got n = {n}")
    if n <= 1 or graph.num_edges == 0:
        return 0.0, Cut(np.ones(n, dtype=bool), 0.0)

    # bit 1 means side B; vertex 0 stays on side A
    m = min(n - 1, LOW_BLOCK_BITS)
    high = np.arange(m + 1, n)
    masks = np.arange(1 << m, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(m)) & 1).astype(float)  # column j = vertex j+1
    low_x = np.hstack([np.zeros((1 << m, 1)), bits])  # vertices 0..m

    adj = graph.adjacency.toarray()
    inner = adj[: m + 1, : m + 1]
    # cut among vertices 0..m: Σ_{i<j} w_ij (x_i + x_j - 2 x_i x_j)
    base = 0.5 * (2.0 * low_x @ inner.sum(axis=1) - 2.0 * np.einsum("ij,jk,ik->i", low_x, inner, low_x))
    cross = adj[: m + 1, m + 1:]  # low block x high block
    cross_deg = cross.sum(axis=1)
    hh = adj[m + 1:, m + 1:]

    x_high = np.zeros(len(high))
    s = np.zeros(m + 1)  # Σ_{v high, x_v = 1} w_uv
    high_cut = 0.0
    best_val, best_low, best_high = -1.0, 0, x_high.copy()
    for step in range(1 << len(high)):
        if step:
            j = (step & -step).bit_length() - 1  # Gray code: flip bit j
            same = x_high == x_high[j]
            # hh has a zero diagonal, so j itself contributes nothing
            high_cut += hh[j, same].sum() - hh[j, ~same].sum()
            x_high[j] = 1.0 - x_high[j]
            s += cross[:, j] * (1.0 if x_high[j] else -1.0)
        values = base + high_cut + s.sum() + low_x @ (cross_deg - 2.0 * s)
        i = int(np.argmax(values))
        if values[i] > best_val + 1e-12:
            best_val, best_low, best_high = float(values[i]), i, x_high.copy()

    x = np.concatenate([low_x[best_low], best_high])
    side = x < 0.5
    weight = cut_weight(graph, side)
    return weight, Cut(side, weight)


def two_point_configuration(cut: Cut) -> np.ndarray:
    """Side A at angle 0, side B at π."""
    return np.where(cut.side, 0.0, math.pi)


def combinatorial_energy_bound(graph: Graph, maxcut: float) -> float:
    """``2W − 4·MaxCut``, the energy of the two-point configuration."""
    return 2.0 * total_weight(graph) - 4.0 * maxcut


def check_energy_upper_bound(graph: Graph, g: AdmissibleFunction, achieved_energy: float,
                             oracle: tuple[float, Cut] | None = None) -> bool:
    """Whether ``achieved_energy ≤ 2W − 4·MaxCut``.

    Also confirms that the oracle's two-point configuration has exactly that
    energy; raises :class:`VerificationError` if it does not.
    """
    maxcut, cut = oracle if oracle is not None else brute_force_maxcut(graph)
    bound = combinatorial_energy_bound(graph, maxcut)
    witness = energy(graph, g, two_point_configuration(cut))
    if abs(witness - bound) > BOUND_TOL * max(1.0, abs(bound)):
        raise VerificationError(f"two-point energy {witness!r} differs from 2W - 4 MaxCut = {bound!r}")
    return achieved_energy <= bound + BOUND_TOL * max(1.0, abs(bound))


def theorem_lower_bound(graph: Graph, g: AdmissibleFunction, theta, constant: float | None = None) -> float:
    """``c(g) · (W/2 − f(θ)/4)``."""
    c = approximation_constant(g).value if constant is None else constant
    return c * (0.5 * total_weight(graph) - 0.25 * energy(graph, g, theta))


def check_theorem_bound(graph: Graph, g: AdmissibleFunction, theta,
                        constant: float | None = None) -> VerificationReport:
    """Expected rounded cut against ``c(g) · (W/2 − f/4)``; holds for every configuration."""
    c = approximation_constant(g).value if constant is None else constant
    bound = theorem_lower_bound(graph, g, theta, c)
    exp = expected_cut(graph, theta)
    ok = exp >= bound - BOUND_TOL
    return VerificationReport(
        theorem_bound=bound,
        theorem_ok=bool(ok),
        details={"expected_cut": exp, "constant": c, "slack": exp - bound},
    )


@dataclass
class RatioCheck:
    ratio: float | None
    maxcut_exact: float
    hypothesis_holds: bool
    asserted: bool
    constant: float


def check_ratio_vs_oracle(graph: Graph, g: AdmissibleFunction, theta, final_energy: float | None = None,
                          oracle: tuple[float, Cut] | None = None, strict: bool = True) -> RatioCheck:
    """``expected_cut / MaxCut`` for a solver output.

    When the final energy is at most ``2W − 4·MaxCut`` the ratio must reach
    ``c(g)``; with ``strict`` a violation raises :class:`VerificationError`.
    Otherwise the ratio is reported without a guarantee. ``ratio`` is None
    when ``MaxCut = 0``.
    """
    oracle = oracle if oracle is not None else brute_force_maxcut(graph)
    maxcut = oracle[0]
    f = energy(graph, g, theta) if final_energy is None else final_energy
    c = approximation_constant(g).value
    if maxcut == 0:
        return RatioCheck(None, 0.0, False, False, c)
    holds = check_energy_upper_bound(graph, g, f, oracle)
    ratio = expected_cut(graph, theta) / maxcut
    if holds and strict and ratio < c - BOUND_TOL:
        raise VerificationError(f"ratio {ratio!r} below c(g) = {c!r} although f <= 2W - 4 MaxCut")
    return RatioCheck(ratio, maxcut, holds, holds, c)


def verify_solution(graph: Graph, g: AdmissibleFunction, theta, final_energy: float | None = None) -> VerificationReport:
    """Theorem check, plus oracle checks when the graph is small enough."""
    report = check_theorem_bound(graph, g, theta)
    f = energy(graph, g, theta) if final_energy is None else final_energy
    report.details["energy"] = f
    if graph.n <= MAX_ORACLE_VERTICES:
        oracle = brute_force_maxcut(graph)
        report.maxcut_exact = oracle[0]
        report.energy_bound_ok = check_energy_upper_bound(graph, g, f, oracle)
        report.details["energy_bound"] = combinatorial_energy_bound(graph, oracle[0])
        rc = check_ratio_vs_oracle(graph, g, theta, f, oracle, strict=False)
        report.details["ratio"] = rc.ratio
        report.details["ratio_ok"] = (
            None if rc.ratio is None or not rc.hypothesis_holds else bool(rc.ratio >= rc.constant - BOUND_TOL)
        )
    return report
