"""Random-line rounding of circle configurations into cuts.

A line through the origin at angle ``φ ∈ [0, π)`` puts vertex ``i`` on side A
iff ``θ_i ∈ [φ, φ + π)`` (mod 2π). The partition only changes when ``φ``
crosses a breakpoint ``θ_i mod π``, so all distinct cuts can be enumerated.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import Graph

TWO_PI = 2.0 * math.pi
BREAKPOINT_TOL = 1e-12


@dataclass(frozen=True)
class Cut:
    side: np.ndarray  # bool per vertex, True = side A
    weight: float


@dataclass(frozen=True)
class SweepResult:
    """Exact distribution of the rounded cut over a uniformly random line.

    Interval ``i`` spans ``[breakpoints[i], breakpoints[i+1])``; the last one
    wraps around to ``breakpoints[0] + π``.
    """

    breakpoints: np.ndarray
    cut_per_interval: np.ndarray
    best: Cut
    expected: float

    @property
    def interval_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = self.breakpoints
        hi = np.append(self.breakpoints[1:], self.breakpoints[0] + math.pi)
        return lo, hi

    @property
    def worst(self) -> float:
        return float(self.cut_per_interval.min())

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["angle_lo", "angle_hi", "cut_weight"])
        for lo, hi, c in zip(*self.interval_bounds, self.cut_per_interval):
            writer.writerow([repr(float(lo)), repr(float(hi)), repr(float(c))])
        return buf.getvalue()


def read_sweep_csv(path: str | Path) -> list[tuple[float, float, float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return [(float(r["angle_lo"]), float(r["angle_hi"]), float(r["cut_weight"])) for r in reader]


def circle_distance(a, b):
    """Geodesic distance on the unit circle, in ``[0, π]``."""
    d = np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), TWO_PI)
    out = np.minimum(d, TWO_PI - d)
    return float(out) if np.ndim(out) == 0 else out


def tent(x):
    """The distance kernel ``1 − (2/π) d(0, x)``."""
    return 1.0 - (2.0 / math.pi) * circle_distance(x, 0.0)


def separation_probability(theta_i, theta_j):
    return circle_distance(theta_i, theta_j) / math.pi


def _angles(graph: Graph, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (graph.n,):
        raise ValueError(f"expected {graph.n} angles, got shape {theta.shape}")
    return theta


def expected_cut(graph: Graph, theta) -> float:
    theta = _angles(graph, theta)
    if graph.num_edges == 0:
        return 0.0
    d = circle_distance(theta[graph.u], theta[graph.v])
    return float(graph.w @ np.atleast_1d(d)) / math.pi


def cut_weight(graph: Graph, side) -> float:
    side = np.asarray(side, dtype=bool)
    return float(graph.w @ (side[graph.u] != side[graph.v]))


def sides_at_angle(theta, phi: float) -> np.ndarray:
    """Side-A membership: ``θ_i ∈ [φ, φ + π)`` mod 2π."""
    return np.mod(np.asarray(theta, dtype=float) - phi, TWO_PI) < math.pi


def cut_at_angle(graph: Graph, theta, phi: float) -> Cut:
    theta = _angles(graph, theta)
    side = sides_at_angle(theta, phi)
    return Cut(side, cut_weight(graph, side))


def _breakpoints(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deduplicated sorted breakpoints and, per vertex, the index of its breakpoint."""
    beta = np.mod(theta, math.pi)
    # values that round up to π belong with 0
    beta[beta >= math.pi] = 0.0
    order = np.argsort(beta, kind="stable")
    sorted_beta = beta[order]
    new_group = np.ones(len(beta), dtype=bool)
    new_group[1:] = np.diff(sorted_beta) > BREAKPOINT_TOL
    group_of_sorted = np.cumsum(new_group) - 1
    groups = np.empty(len(beta), dtype=np.int64)
    groups[order] = group_of_sorted
    points = sorted_beta[new_group]
    # merge a group near π with the one at 0
    if len(points) > 1 and points[0] + math.pi - points[-1] <= BREAKPOINT_TOL:
        groups[groups == len(points) - 1] = 0
        points = points[:-1]
    return points, groups


def _summarize(graph, theta, points, cuts, phis) -> SweepResult:
    lengths = np.diff(np.append(points, points[0] + math.pi))
    best_i = int(np.argmax(cuts))
    best = cut_at_angle(graph, theta, float(phis[best_i]) % math.pi)
    expected = float(lengths @ cuts) / math.pi
    return SweepResult(points, cuts, best, expected)


def sweep_all_cuts(graph: Graph, theta, method: str = "incremental") -> SweepResult:
    """Cut weight on every interval between consecutive breakpoints.

    ``method="incremental"`` starts from one directly evaluated partition and
    flips the vertices of each breakpoint in turn (``O(n log n + Σ deg)``);
    ``method="direct"`` re-evaluates the cut at every interval midpoint.
    """
    theta = _angles(graph, theta)
    if graph.n == 0:
        raise ValueError("cannot sweep an empty vertex set")
    points, groups = _breakpoints(theta.copy())
    k = len(points)
    upper = np.append(points[1:], points[0] + math.pi)
    mids = 0.5 * (points + upper)

    if method == "direct":
        cuts = np.array([cut_at_angle(graph, theta, m % math.pi).weight for m in mids])
        return _summarize(graph, theta, points, cuts, mids)
    if method != "incremental":
        raise ValueError(f"unknown sweep method {method!r}")

    side = sides_at_angle(theta, mids[0])
    current = cut_weight(graph, side)
    cuts = np.empty(k)
    cuts[0] = current
    members = np.argsort(groups, kind="stable")
    starts = np.searchsorted(groups[members], np.arange(k + 1))
    adj = graph.adjacency
    indptr, indices, data = adj.indptr, adj.indices, adj.data
    for j in range(1, k):
        for vtx in members[starts[j]:starts[j + 1]]:
            nb = indices[indptr[vtx]:indptr[vtx + 1]]
            wt = data[indptr[vtx]:indptr[vtx + 1]]
            same = side[nb] == side[vtx]
            # flipping vtx cuts the previously uncut edges and uncuts the rest
            current += float(wt[same].sum() - wt[~same].sum())
            side[vtx] = not side[vtx]
        cuts[j] = current
    return _summarize(graph, theta, points, cuts, mids)


def monte_carlo_cuts(graph: Graph, theta, n_lines: int, seed: int, chunk: int = 4096) -> np.ndarray:
    """Cut weights for ``n_lines`` independent uniform random lines."""
    theta = _angles(graph, theta)
    rng = np.random.default_rng(seed)
    phis = rng.uniform(0.0, math.pi, n_lines)
    out = np.empty(n_lines)
    for s in range(0, n_lines, chunk):
        ph = phis[s:s + chunk]
        side = np.mod(theta[None, :] - ph[:, None], TWO_PI) < math.pi
        out[s:s + chunk] = (side[:, graph.u] != side[:, graph.v]) @ graph.w
    return out
