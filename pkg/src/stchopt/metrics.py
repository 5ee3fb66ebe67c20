"""Pareto archives, non-dominated filtering, and hypervolume indicators.

Hypervolume is exact in 2-D (sorted sweep) and 3-D (dimension-sweep
slicing). A seeded Monte Carlo estimator serves as an independent oracle
for testing the exact routines. The hypervolume-difference pipeline
normalizes objectives by the reference front's bounding box so values are
comparable across problems of very different objective scales.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np

from .problems.base import ReferenceFront


def _filter_2d_sorted(P: np.ndarray) -> np.ndarray:
    """Non-dominated subset of a lex-sorted, duplicate-free 2-D point set."""
    f2 = P[:, 1]
    cummin = np.minimum.accumulate(f2)
    keep = np.empty(P.shape[0], dtype=bool)
    keep[0] = True
    keep[1:] = f2[1:] < cummin[:-1]
    return P[keep]


def _filter_3d_sorted(P: np.ndarray) -> np.ndarray:
    """Non-dominated subset of a lex-sorted, duplicate-free 3-D point set.

    Single sweep in lexicographic order: a point can only be dominated by
    an earlier one, and the minimal f3 among kept points with f2 <= q2 is
    read off a staircase (f2 increasing, f3 strictly decreasing).
    """
    xs: list[float] = []
    ys: list[float] = []
    keep = np.zeros(P.shape[0], dtype=bool)
    for i, (_, f2, f3) in enumerate(P):
        j = bisect.bisect_right(xs, f2) - 1
        if j >= 0 and ys[j] <= f3:
            continue
        keep[i] = True
        lo = bisect.bisect_left(xs, f2)
        hi = lo
        while hi < len(xs) and ys[hi] >= f3:
            hi += 1
        xs[lo:hi] = [f2]
        ys[lo:hi] = [f3]
    return P[keep]


def _filter_small(P: np.ndarray) -> np.ndarray:
    """Iterative mask filter; fine for sets up to a few thousand points."""
    keep = np.arange(P.shape[0])
    costs = P
    i = 0
    while i < costs.shape[0]:
        # survivors: strictly better than costs[i] somewhere, or costs[i] itself
        mask = np.any(costs < costs[i], axis=1)
        mask[i] = True
        keep = keep[mask]
        costs = costs[mask]
        i = int(mask[:i].sum()) + 1
    return P[np.sort(keep)]


def _filter_general(P: np.ndarray) -> np.ndarray:
    """Divide-and-conquer wrapper so huge inputs stay tractable."""
    if P.shape[0] <= 4096:
        return _filter_small(P)
    half = P.shape[0] // 2
    merged = np.unique(np.vstack([_filter_general(P[:half]), _filter_general(P[half:])]), axis=0)
    if merged.shape[0] < P.shape[0]:
        return _filter_general(merged)
    return _filter_small(merged)


def nondominated_filter(points) -> np.ndarray:
    """Maximal non-dominated subset of a point set (minimization).

    Duplicates keep one copy; the result is sorted lexicographically by
    objective values.
    """
    P = np.asarray(points, dtype=np.float64)
    if P.size == 0:
        return P.reshape(0, P.shape[1] if P.ndim == 2 else 0)
    if P.ndim != 2:
        raise ValueError(f"expected (k, m) points, got shape {P.shape}")
    P = np.unique(P, axis=0)  # collapse duplicates, lexicographic sort
    if P.shape[1] == 2:
        return _filter_2d_sorted(P)
    if P.shape[1] == 3:
        return _filter_3d_sorted(P)
    return _filter_general(P)


@dataclass
class ParetoArchive:
    """Non-dominated set of (decision, objective) pairs with an HV reference point."""

    reference_point: np.ndarray
    decisions: np.ndarray = field(default=None)
    objectives: np.ndarray = field(default=None)

    def __post_init__(self):
        self.reference_point = np.asarray(self.reference_point, dtype=np.float64)
        m = self.reference_point.shape[0]
        if self.objectives is None:
            self.objectives = np.empty((0, m))
        if self.decisions is None:
            self.decisions = np.empty((0, 0))

    @classmethod
    def from_points(cls, decisions, objectives, reference_point) -> "ParetoArchive":
        """Build an archive, filtering to the non-dominated subset."""
        X = np.asarray(decisions, dtype=np.float64)
        F = np.asarray(objectives, dtype=np.float64)
        front = nondominated_filter(F)
        # map filtered objective rows back to their decisions (first match)
        idx = []
        used = np.zeros(F.shape[0], dtype=bool)
        for row in front:
            j = int(np.flatnonzero(~used & np.all(F == row, axis=1))[0])
            used[j] = True
            idx.append(j)
        return cls(
            reference_point=reference_point,
            decisions=X[idx],
            objectives=F[idx],
        )

    def __len__(self) -> int:
        return self.objectives.shape[0]


def _check_points(points, ref: np.ndarray) -> tuple[np.ndarray, int]:
    """Keep points strictly dominating the reference point; count the rest."""
    P = np.asarray(points, dtype=np.float64)
    if P.size == 0:
        return P.reshape(0, ref.shape[0]), 0
    inside = np.all(P < ref, axis=1)
    return P[inside], int((~inside).sum())


def hypervolume_2d(points, ref) -> float:
    """Exact 2-D hypervolume of a non-dominated point set w.r.t. ``ref``.

    Points not strictly dominating the reference point are excluded.
    """
    ref = np.asarray(ref, dtype=np.float64)
    if ref.shape != (2,):
        raise ValueError("reference point must have 2 components")
    P, _ = _check_points(points, ref)
    if P.shape[0] == 0:
        return 0.0
    # dominated points contribute nothing; drop them so the sweep is exact
    P = _filter_2d_sorted(np.unique(P, axis=0))
    next_f1 = np.append(P[1:, 0], ref[0])
    return float(np.sum((next_f1 - P[:, 0]) * (ref[1] - P[:, 1])))


def hypervolume_3d(points, ref) -> float:
    """Exact 3-D hypervolume via slicing along the third objective.

    Sweeps the points in increasing f3, maintaining the 2-D staircase of
    the active set; each slice contributes its 2-D area times its height.
    """
    ref = np.asarray(ref, dtype=np.float64)
    if ref.shape != (3,):
        raise ValueError("reference point must have 3 components")
    P, _ = _check_points(points, ref)
    if P.shape[0] == 0:
        return 0.0
    P = P[np.lexsort((P[:, 1], P[:, 0], P[:, 2]))]
    levels = np.unique(P[:, 2])
    uppers = np.append(levels[1:], ref[2])
    xs: list[float] = []
    ys: list[float] = []
    total = 0.0
    idx = 0
    for z, z_next in zip(levels, uppers):
        while idx < P.shape[0] and P[idx, 2] <= z:
            qx, qy = P[idx, 0], P[idx, 1]
            idx += 1
            j = bisect.bisect_right(xs, qx) - 1
            if j >= 0 and ys[j] <= qy:
                continue
            lo = bisect.bisect_left(xs, qx)
            hi = lo
            while hi < len(xs) and ys[hi] >= qy:
                hi += 1
            xs[lo:hi] = [qx]
            ys[lo:hi] = [qy]
        xarr = np.array(xs)
        yarr = np.array(ys)
        area = float(np.sum((np.append(xarr[1:], ref[0]) - xarr) * (ref[1] - yarr)))
        total += area * (z_next - z)
    return float(total)


def hypervolume(points, ref) -> float:
    """Exact hypervolume for 2 or 3 objectives."""
    ref = np.asarray(ref, dtype=np.float64)
    if ref.shape[0] == 2:
        return hypervolume_2d(points, ref)
    if ref.shape[0] == 3:
        return hypervolume_3d(points, ref)
    raise ValueError(f"hypervolume supports m in {{2, 3}}, got m={ref.shape[0]}")


def hypervolume_mc(
    points, ref, samples: int, seed: int, chunk: int = 1_000_000
) -> tuple[float, float]:
    """Monte Carlo hypervolume estimate and its standard error.

    Samples uniformly in the box spanned by the points' min-corner and the
    reference point and counts the dominated fraction.
    """
    if samples < 10_000:
        raise ValueError(f"need at least 1e4 samples, got {samples}")
    ref = np.asarray(ref, dtype=np.float64)
    P, _ = _check_points(points, ref)
    if P.shape[0] == 0:
        return 0.0, 0.0
    lo = P.min(axis=0)
    if np.any(ref <= lo):
        raise ValueError("degenerate sampling box: reference point must exceed min-corner")
    box_vol = float(np.prod(ref - lo))
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        U = rng.uniform(lo, ref, size=(k, ref.shape[0]))
        dominated = np.zeros(k, dtype=bool)
        for p in P:
            dominated |= np.all(U >= p, axis=1)
        hits += int(dominated.sum())
        done += k
    frac = hits / samples
    stderr = box_vol * np.sqrt(frac * (1.0 - frac) / samples)
    return frac * box_vol, float(stderr)


def normalized_hypervolume(
    points, front: ReferenceFront
) -> tuple[float, int]:
    """Hypervolume of ``points`` in front-normalized objective units.

    Returns (hv, dropped) where dropped counts points that do not strictly
    dominate the reference point after normalization.
    """
    f_min, f_max = front.objective_bounds()
    span = np.where(f_max > f_min, f_max - f_min, 1.0)
    ref = (front.reference_point - f_min) / span
    P = np.asarray(points, dtype=np.float64)
    if P.size == 0:
        return 0.0, 0
    Pn = (P - f_min) / span
    _, dropped = _check_points(Pn, ref)
    return hypervolume(Pn, ref), dropped


def delta_hv(archive: ParetoArchive, front: ReferenceFront) -> tuple[float, int]:
    """Hypervolume gap between a reference front and an archive.

    Both sets are normalized by the front's bounding box first, so the
    magnitudes are comparable across problems. Returns (delta, dropped)
    where dropped counts archive points outside the reference box.
    """
    if archive.reference_point.shape != front.reference_point.shape or not np.allclose(
        archive.reference_point, front.reference_point
    ):
        raise ValueError("archive and front must share the same reference point")
    hv_star, _ = normalized_hypervolume(front.points, front)
    hv, dropped = normalized_hypervolume(archive.objectives, front)
    return hv_star - hv, dropped
