"""Synthetic bi-objective benchmark problems F1-F6.

All six share the same skeleton: the first variable sweeps the trade-off,
the remaining variables must track a coupling curve of x1 to reach the
front. F1-F3 have convex fronts (f2 = 1 - sqrt(f1) at zero penalty),
F4-F6 concave ones (f2 = 1 - f1^2). The three coupling variants are a
shifted quadratic, a position-dependent power, and a sine wave.

Index bookkeeping follows the 1-based convention of the formulas:
J1 = odd j in [2, n], J2 = even j in [2, n].
"""

from __future__ import annotations

import numpy as np

from .base import Problem

# Guard for d/dx1 of x1^p (p < 1) and of sqrt(x1*g2) at the x1 = 0 boundary.
_EPS = 1e-12


class SyntheticProblem(Problem):
    """One of F1-F6, parameterized by front shape and coupling kind."""

    def __init__(self, name: str, coupling: str, concave: bool, n: int = 20):
        if n < 3:
            raise ValueError("need n >= 3 so both index sets are nonempty")
        if coupling not in ("quad", "pow", "sin"):
            raise ValueError(f"unknown coupling {coupling!r}")
        # The sine coupling ranges over [-1, 1]; the quadratic and power
        # targets stay in [0, 1].
        lo = np.zeros(n)
        hi = np.ones(n)
        if coupling == "sin":
            lo[1:] = -1.0
        super().__init__(name, lo, hi, m=2)
        self.coupling = coupling
        self.concave = concave
        j = np.arange(2, n + 1)  # 1-based tail indices
        self._j = j
        self._mask1 = j % 2 == 1
        self._mask2 = j % 2 == 0

    def _coupling(self, x1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Coupling targets c_j(x1) and derivatives dc_j/dx1, both (k, n-1)."""
        j = self._j[None, :]
        x1 = x1[:, None]
        if self.coupling == "quad":
            c = (2 * x1 - 1) ** 2 * np.ones_like(j, dtype=np.float64)
            dc = 4 * (2 * x1 - 1) * np.ones_like(j, dtype=np.float64)
        elif self.coupling == "pow":
            p = 0.5 * (1.0 + 3.0 * (j - 2) / (self.n - 2))
            c = x1**p
            dc = p * np.maximum(x1, _EPS) ** (p - 1)
        else:
            arg = 4 * np.pi * x1 + j * np.pi / self.n
            c = np.sin(arg)
            dc = 4 * np.pi * np.cos(arg)
        return c, dc

    def _penalties(self, X: np.ndarray):
        x1 = X[:, 0]
        tail = X[:, 1:]
        c, dc = self._coupling(x1)
        diff = tail - c
        n1 = int(self._mask1.sum())
        n2 = int(self._mask2.sum())
        g1 = 1.0 + np.sum(diff[:, self._mask1] ** 2, axis=1) / n1
        g2 = 1.0 + np.sum(diff[:, self._mask2] ** 2, axis=1) / n2
        return x1, diff, dc, g1, g2, n1, n2

    def _evaluate(self, X: np.ndarray) -> np.ndarray:
        x1, _, _, g1, g2, _, _ = self._penalties(X)
        f1 = g1 * x1
        if self.concave:
            f2 = g2 - x1**2 / g2
        else:
            f2 = g2 - np.sqrt(x1 * g2)
        return np.stack([f1, f2], axis=1)

    def _jacobian(self, X: np.ndarray) -> np.ndarray:
        x1, diff, dc, g1, g2, n1, n2 = self._penalties(X)
        k = X.shape[0]
        J = np.zeros((k, 2, self.n))

        # dg/dx1 and dg/dx_j for both penalty groups
        dg1_dx1 = np.sum(-2 * diff[:, self._mask1] * dc[:, self._mask1], axis=1) / n1
        dg2_dx1 = np.sum(-2 * diff[:, self._mask2] * dc[:, self._mask2], axis=1) / n2
        dg1_dtail = np.zeros_like(diff)
        dg1_dtail[:, self._mask1] = 2 * diff[:, self._mask1] / n1
        dg2_dtail = np.zeros_like(diff)
        dg2_dtail[:, self._mask2] = 2 * diff[:, self._mask2] / n2

        J[:, 0, 0] = g1 + x1 * dg1_dx1
        J[:, 0, 1:] = x1[:, None] * dg1_dtail

        if self.concave:
            # f2 = g2 - x1^2 / g2
            J[:, 1, 0] = dg2_dx1 - 2 * x1 / g2 + (x1**2) * dg2_dx1 / g2**2
            J[:, 1, 1:] = dg2_dtail * (1.0 + (x1**2) / g2**2)[:, None]
        else:
            # f2 = g2 - sqrt(x1 * g2)
            root = np.sqrt(np.maximum(x1 * g2, _EPS))
            J[:, 1, 0] = dg2_dx1 - (g2 + x1 * dg2_dx1) / (2 * root)
            J[:, 1, 1:] = dg2_dtail * (1.0 - x1 / (2 * root))[:, None]
        return J

    def front_point(self, t: np.ndarray) -> np.ndarray:
        """Analytic front image of f1 = t at zero penalty."""
        t = np.asarray(t, dtype=np.float64)
        f2 = 1.0 - t**2 if self.concave else 1.0 - np.sqrt(t)
        return np.stack([t, f2], axis=-1)

    def front_decision(self, x1: float) -> np.ndarray:
        """A zero-penalty decision vector with first variable x1."""
        c, _ = self._coupling(np.array([x1]))
        return np.concatenate([[x1], c[0]])


def make_synthetic(name: str, n: int = 20) -> SyntheticProblem:
    """Build one of F1-F6 by name."""
    table = {
        "F1": ("quad", False),
        "F2": ("pow", False),
        "F3": ("sin", False),
        "F4": ("quad", True),
        "F5": ("pow", True),
        "F6": ("sin", True),
    }
    if name not in table:
        raise KeyError(f"unknown synthetic problem {name!r}")
    coupling, concave = table[name]
    return SyntheticProblem(name, coupling, concave, n=n)
