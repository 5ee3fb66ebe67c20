"""Problem abstractions shared by the benchmark suite.

A problem is an evaluatable vector function over a box, with an analytic
Jacobian. Evaluation is vectorized over a leading batch dimension; the
single-point API wraps the batched one.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

BOUNDS_TOL = 1e-9


@dataclass(frozen=True)
class ReferenceFront:
    """A reference Pareto front in objective space.

    Attributes:
        points: (k, m) non-dominated objective vectors, lexicographically sorted.
        source: "analytic" for closed-form fronts, "dense_sweep" for fronts
            obtained by non-dominated filtering of a dense decision-space scan.
        reference_point: (m,) point dominated by every front point, used for
            hypervolume computation.
    """

    points: np.ndarray
    source: str
    reference_point: np.ndarray

    @property
    def m(self) -> int:
        return self.points.shape[1]

    def objective_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Componentwise bounding box of the front."""
        return self.points.min(axis=0), self.points.max(axis=0)


class Problem(ABC):
    """A box-constrained multi-objective problem with analytic derivatives."""

    name: str
    n: int
    m: int
    lower: np.ndarray
    upper: np.ndarray
    integrality: np.ndarray  # per-variable bool flags, gear train only

    def __init__(self, name: str, lower, upper, m: int, integrality=None):
        self.name = name
        self.lower = np.asarray(lower, dtype=np.float64)
        self.upper = np.asarray(upper, dtype=np.float64)
        if np.any(self.lower >= self.upper):
            raise ValueError(f"{name}: bounds must satisfy lower < upper")
        self.n = self.lower.shape[0]
        self.m = m
        if integrality is None:
            integrality = np.zeros(self.n, dtype=bool)
        self.integrality = np.asarray(integrality, dtype=bool)

    def _check_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n:
            raise ValueError(f"{self.name}: expected {self.n} variables, got {X.shape[1]}")
        if np.any(X < self.lower - BOUNDS_TOL) or np.any(X > self.upper + BOUNDS_TOL):
            raise ValueError(f"{self.name}: input outside the box bounds")
        return X

    @abstractmethod
    def _evaluate(self, X: np.ndarray) -> np.ndarray:
        """Batched objective values, X (k, n) -> (k, m)."""

    @abstractmethod
    def _jacobian(self, X: np.ndarray) -> np.ndarray:
        """Batched Jacobians, X (k, n) -> (k, m, n)."""

    def evaluate_batch(self, X) -> np.ndarray:
        return self._evaluate(self._check_batch(X))

    def jacobian_batch(self, X) -> np.ndarray:
        return self._jacobian(self._check_batch(X))

    def evaluate(self, x) -> np.ndarray:
        return self.evaluate_batch(np.asarray(x)[None, :])[0]

    def jacobian(self, x) -> np.ndarray:
        return self.jacobian_batch(np.asarray(x)[None, :])[0]

    def sample_x(self, rng: np.random.Generator, k: int | None = None) -> np.ndarray:
        """Uniform sample(s) in the box."""
        if k is None:
            return rng.uniform(self.lower, self.upper)
        return rng.uniform(self.lower, self.upper, size=(k, self.n))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r}, n={self.n}, m={self.m})"


def hinge_and_grad(g: np.ndarray, dg: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Constraint-violation term max(-g, 0) and its subgradient.

    ``g`` has shape (k,) and ``dg`` shape (k, n). At the kink (-g == 0) the
    zero (minimal-norm) subgradient is used.
    """
    active = (-g) > 0
    value = np.where(active, -g, 0.0)
    grad = np.where(active[:, None], -dg, 0.0)
    return value, grad
