"""One-dimensional convex bi-objective toy used for convergence races.

f1 = x^2 and f2 = (x - 1)^2 over x in [-1, 2]: every x in [0, 1] is
Pareto optimal and the balanced preference targets x = 0.5. Small enough
that a fine grid scan provides an independent oracle for the optimum.
"""

from __future__ import annotations

import numpy as np

from .base import Problem


class ConvexToy(Problem):
    """f1 = x^2, f2 = (x - 1)^2 on the interval [-1, 2]."""

    def __init__(self):
        super().__init__("toy", [-1.0], [2.0], m=2)

    def _evaluate(self, X):
        x = X[:, 0]
        return np.stack([x**2, (x - 1.0) ** 2], axis=1)

    def _jacobian(self, X):
        x = X[:, 0]
        J = np.empty((X.shape[0], 2, 1))
        J[:, 0, 0] = 2.0 * x
        J[:, 1, 0] = 2.0 * (x - 1.0)
        return J
