"""Reference Pareto fronts for the benchmark suite.

F1-F6 have closed-form fronts. The engineering problems are swept with a
Sobol scan of the decision box followed by non-dominated filtering; the
result is cached to a CSV file so repeated hypervolume evaluations are
cheap and reproducible.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
from scipy.stats import qmc

from .base import Problem, ReferenceFront
from .synthetic import SyntheticProblem

# The reference point sits this fraction beyond the front's bounding box,
# i.e. at 1.1 in front-normalized objective units.
REF_MARGIN = 1.1


def _reference_point(points: np.ndarray) -> np.ndarray:
    f_min = points.min(axis=0)
    f_max = points.max(axis=0)
    span = np.where(f_max > f_min, f_max - f_min, 1.0)
    return f_min + REF_MARGIN * span


def _analytic_front(problem: SyntheticProblem, resolution: int) -> np.ndarray:
    t = np.linspace(0.0, 1.0, resolution)
    return problem.front_point(t)


def _sweep_front(problem: Problem, resolution: int, seed: int = 0) -> np.ndarray:
    from ..metrics import nondominated_filter  # deferred: metrics imports problems.base

    budget = resolution * 1000
    sampler = qmc.Sobol(d=problem.n, scramble=True, seed=seed)
    # Largest power-of-two sample within the budget keeps Sobol balance.
    unit = sampler.random_base2(int(np.log2(budget)))
    X = problem.lower + unit * (problem.upper - problem.lower)
    # Include the box corners; extreme points often sit there.
    corners = np.stack(np.meshgrid(*zip(problem.lower, problem.upper), indexing="ij"), axis=-1)
    X = np.vstack([X, corners.reshape(-1, problem.n)])
    F = problem.evaluate_batch(X)
    front = nondominated_filter(F)
    if front.shape[0] > resolution:
        # Thin to the requested resolution; an evenly spaced subset of a
        # non-dominated set stays non-dominated.
        idx = np.unique(np.round(np.linspace(0, front.shape[0] - 1, resolution)).astype(int))
        front = front[idx]
    return front


def _cache_path(cache_dir: Path, problem: Problem, resolution: int) -> Path:
    return cache_dir / f"front_{problem.name}_r{resolution}.csv"


def _write_cache(path: Path, problem: Problem, source: str, front: ReferenceFront) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([problem.name, source, *(repr(float(v)) for v in front.reference_point)])
        for row in front.points:
            writer.writerow([repr(float(v)) for v in row])


def _read_cache(path: Path) -> ReferenceFront | None:
    if not path.exists():
        return None
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    name, source, *ref = rows[0]
    points = np.array([[float(v) for v in row] for row in rows[1:]])
    return ReferenceFront(
        points=points,
        source=source,
        reference_point=np.array([float(v) for v in ref]),
    )


def reference_front(
    problem: Problem,
    resolution: int = 1000,
    cache_dir: str | Path | None = None,
    seed: int = 0,
) -> ReferenceFront:
    """Build (or load from cache) the reference front of a problem.

    Args:
        problem: any shipped problem instance.
        resolution: number of sampled front points for analytic fronts; for
            swept fronts the scan budget is resolution * 1000 evaluations.
        cache_dir: directory for CSV caching of swept fronts; None disables
            caching.
        seed: RNG seed for the Sobol scramble of swept fronts.
    """
    if resolution < 100:
        raise ValueError(f"resolution must be >= 100, got {resolution}")
    if isinstance(problem, SyntheticProblem):
        points = _analytic_front(problem, resolution)
        source = "analytic"
    else:
        if cache_dir is not None:
            cached = _read_cache(_cache_path(Path(cache_dir), problem, resolution))
            if cached is not None:
                return cached
        points = _sweep_front(problem, resolution, seed=seed)
        source = "dense_sweep"
    front = ReferenceFront(
        points=points,
        source=source,
        reference_point=_reference_point(points),
    )
    if source == "dense_sweep" and cache_dir is not None:
        _write_cache(_cache_path(Path(cache_dir), problem, resolution), problem, source, front)
    return front
