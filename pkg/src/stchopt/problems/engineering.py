"""Real-world engineering design benchmark problems.

Five problems: four-bar truss, hatch cover, disk brake, gear train, and
rocket injector. Constraint violations appear as extra objectives of the
form sum_i max(-g_i, 0); at the hinge kink the zero subgradient is used.
The gear train's integer variables are relaxed to a continuous box for
gradient-based optimization; ``evaluate_rounded`` reports the integral
objective values.
"""

from __future__ import annotations

import numpy as np

from .base import Problem, hinge_and_grad


class FourBarTruss(Problem):
    """Structural volume vs joint displacement of a four-bar truss.

    Constants F = 10, E = 2e5, L = 200, sigma = 10, so a = F/sigma = 1.
    """

    F = 10.0
    E = 2.0e5
    L = 200.0
    SIGMA = 10.0

    def __init__(self):
        a = self.F / self.SIGMA
        lo = np.array([a, np.sqrt(2) * a, np.sqrt(2) * a, a])
        hi = np.array([3 * a, 3 * a, 3 * a, 3 * a])
        super().__init__("BarTruss", lo, hi, m=2)

    def _evaluate(self, X):
        x1, x2, x3, x4 = X.T
        f1 = self.L * (2 * x1 + np.sqrt(2) * x2 + np.sqrt(x3) + x4)
        c = self.F * self.L / self.E
        f2 = c * (2 / x1 + 2 * np.sqrt(2) / x2 - 2 * np.sqrt(2) / x3 + 2 / x4)
        return np.stack([f1, f2], axis=1)

    def _jacobian(self, X):
        x1, x2, x3, x4 = X.T
        k = X.shape[0]
        c = self.F * self.L / self.E
        J = np.empty((k, 2, 4))
        J[:, 0, 0] = 2 * self.L
        J[:, 0, 1] = np.sqrt(2) * self.L
        J[:, 0, 2] = self.L / (2 * np.sqrt(x3))
        J[:, 0, 3] = self.L
        J[:, 1, 0] = -2 * c / x1**2
        J[:, 1, 1] = -2 * np.sqrt(2) * c / x2**2
        J[:, 1, 2] = 2 * np.sqrt(2) * c / x3**2
        J[:, 1, 3] = -2 * c / x4**2
        return J


class HatchCover(Problem):
    """Hatch cover weight vs total constraint violation (2 variables)."""

    E = 700000.0

    def __init__(self):
        super().__init__("HatchCover", [0.5, 0.5], [4.0, 50.0], m=2)

    def _constraints(self, X):
        """Constraint values g (k, 4) and gradients dg (k, 4, 2)."""
        x1, x2 = X.T
        k = X.shape[0]
        g = np.empty((k, 4))
        dg = np.zeros((k, 4, 2))
        # g1 = 1 - sigma_b / 700, sigma_b = 4500 / (x1 x2)
        g[:, 0] = 1.0 - 4500.0 / (700.0 * x1 * x2)
        dg[:, 0, 0] = 4500.0 / (700.0 * x1**2 * x2)
        dg[:, 0, 1] = 4500.0 / (700.0 * x1 * x2**2)
        # g2 = 1 - tau / 450, tau = 1800 / x2
        g[:, 1] = 1.0 - 1800.0 / (450.0 * x2)
        dg[:, 1, 1] = 1800.0 / (450.0 * x2**2)
        # g3 = 1 - delta / 1.5, delta = 56.2e4 / (E x1 x2^2)
        c3 = 56.2e4 / (1.5 * self.E)
        g[:, 2] = 1.0 - c3 / (x1 * x2**2)
        dg[:, 2, 0] = c3 / (x1**2 * x2**2)
        dg[:, 2, 1] = 2 * c3 / (x1 * x2**3)
        # g4 = 1 - sigma_b / sigma_k, sigma_k = E x1^2 / 100
        c4 = 4500.0 * 100.0 / self.E
        g[:, 3] = 1.0 - c4 / (x1**3 * x2)
        dg[:, 3, 0] = 3 * c4 / (x1**4 * x2)
        dg[:, 3, 1] = c4 / (x1**3 * x2**2)
        return g, dg

    def _evaluate(self, X):
        x1, x2 = X.T
        f1 = x1 + 120.0 * x2
        g, dg = self._constraints(X)
        f2 = np.zeros(X.shape[0])
        for i in range(4):
            v, _ = hinge_and_grad(g[:, i], dg[:, i])
            f2 += v
        return np.stack([f1, f2], axis=1)

    def _jacobian(self, X):
        k = X.shape[0]
        J = np.zeros((k, 2, 2))
        J[:, 0, 0] = 1.0
        J[:, 0, 1] = 120.0
        g, dg = self._constraints(X)
        for i in range(4):
            _, grad = hinge_and_grad(g[:, i], dg[:, i])
            J[:, 1, :] += grad
        return J


class DiskBrake(Problem):
    """Disk brake mass, stopping time, and constraint violation (3 objectives)."""

    def __init__(self):
        lo = np.array([55.0, 75.0, 1000.0, 11.0])
        hi = np.array([80.0, 110.0, 3000.0, 20.0])
        super().__init__("DiskBrake", lo, hi, m=3)

    def _constraints(self, X):
        x1, x2, x3, x4 = X.T
        k = X.shape[0]
        A = x2**2 - x1**2
        B = x2**3 - x1**3
        g = np.empty((k, 4))
        dg = np.zeros((k, 4, 4))
        # g1 = (x2 - x1) - 20
        g[:, 0] = (x2 - x1) - 20.0
        dg[:, 0, 0] = -1.0
        dg[:, 0, 1] = 1.0
        # g2 = 0.4 - x3 / (3.14 A)
        g[:, 1] = 0.4 - x3 / (3.14 * A)
        dg[:, 1, 0] = -2 * x1 * x3 / (3.14 * A**2)
        dg[:, 1, 1] = 2 * x2 * x3 / (3.14 * A**2)
        dg[:, 1, 2] = -1.0 / (3.14 * A)
        # g3 = 1 - c3 x3 B / A^2
        c3 = 2.22e-3
        g[:, 2] = 1.0 - c3 * x3 * B / A**2
        dg[:, 2, 0] = -c3 * x3 * (-3 * x1**2 * A + 4 * B * x1) / A**3
        dg[:, 2, 1] = -c3 * x3 * (3 * x2**2 * A - 4 * B * x2) / A**3
        dg[:, 2, 2] = -c3 * B / A**2
        # g4 = c4 x3 x4 B / A - 900
        c4 = 2.66e-2
        g[:, 3] = c4 * x3 * x4 * B / A - 900.0
        dg[:, 3, 0] = c4 * x3 * x4 * (-3 * x1**2 * A + 2 * B * x1) / A**2
        dg[:, 3, 1] = c4 * x3 * x4 * (3 * x2**2 * A - 2 * B * x2) / A**2
        dg[:, 3, 2] = c4 * x4 * B / A
        dg[:, 3, 3] = c4 * x3 * B / A
        return g, dg

    def _evaluate(self, X):
        x1, x2, x3, x4 = X.T
        A = x2**2 - x1**2
        B = x2**3 - x1**3
        f1 = 4.9e-5 * A * (x4 - 1.0)
        f2 = 9.82e6 * A / (x3 * x4 * B)
        g, dg = self._constraints(X)
        f3 = np.zeros(X.shape[0])
        for i in range(4):
            v, _ = hinge_and_grad(g[:, i], dg[:, i])
            f3 += v
        return np.stack([f1, f2, f3], axis=1)

    def _jacobian(self, X):
        x1, x2, x3, x4 = X.T
        k = X.shape[0]
        A = x2**2 - x1**2
        B = x2**3 - x1**3
        J = np.zeros((k, 3, 4))
        J[:, 0, 0] = 4.9e-5 * (-2 * x1) * (x4 - 1.0)
        J[:, 0, 1] = 4.9e-5 * (2 * x2) * (x4 - 1.0)
        J[:, 0, 3] = 4.9e-5 * A
        f2 = 9.82e6 * A / (x3 * x4 * B)
        J[:, 1, 0] = 9.82e6 * (-2 * x1 * B + 3 * x1**2 * A) / (x3 * x4 * B**2)
        J[:, 1, 1] = 9.82e6 * (2 * x2 * B - 3 * x2**2 * A) / (x3 * x4 * B**2)
        J[:, 1, 2] = -f2 / x3
        J[:, 1, 3] = -f2 / x4
        g, dg = self._constraints(X)
        for i in range(4):
            _, grad = hinge_and_grad(g[:, i], dg[:, i])
            J[:, 2, :] += grad
        return J


class GearTrain(Problem):
    """Gear ratio error, largest gear size, and constraint violation.

    The four tooth counts are integers in {12, ..., 60}; the continuous
    relaxation over [12, 60]^4 is used for optimization.
    """

    TARGET = 6.931

    def __init__(self):
        lo = np.full(4, 12.0)
        hi = np.full(4, 60.0)
        super().__init__("GearTrain", lo, hi, m=3, integrality=np.ones(4, dtype=bool))

    def _ratio_terms(self, X):
        x1, x2, x3, x4 = X.T
        r = self.TARGET - (x3 * x4) / (x1 * x2)
        dr = np.stack(
            [
                x3 * x4 / (x1**2 * x2),
                x3 * x4 / (x1 * x2**2),
                -x4 / (x1 * x2),
                -x3 / (x1 * x2),
            ],
            axis=1,
        )
        return r, dr

    def _evaluate(self, X):
        r, _ = self._ratio_terms(X)
        f1 = np.abs(r)
        f2 = np.max(X, axis=1)
        g1 = 0.5 - f1 / self.TARGET
        f3 = np.where(-g1 > 0, -g1, 0.0)
        return np.stack([f1, f2, f3], axis=1)

    def _jacobian(self, X):
        k = X.shape[0]
        r, dr = self._ratio_terms(X)
        J = np.zeros((k, 3, 4))
        df1 = np.sign(r)[:, None] * dr  # zero subgradient at r == 0
        J[:, 0, :] = df1
        # f2 = max of variables; ties broken by lowest index
        argmax = np.argmax(X, axis=1)
        J[np.arange(k), 1, argmax] = 1.0
        g1 = 0.5 - np.abs(r) / self.TARGET
        dg1 = -df1 / self.TARGET
        active = -g1 > 0
        J[:, 2, :] = np.where(active[:, None], -dg1, 0.0)
        return J

    def evaluate_rounded(self, X) -> np.ndarray:
        """Objective values after rounding to the nearest integer teeth counts."""
        single = np.asarray(X).ndim == 1
        X = self._check_batch(X)
        F = self._evaluate(np.clip(np.rint(X), self.lower, self.upper))
        return F[0] if single else F


# Rocket injector objectives as (coefficient, exponents-per-variable) terms.
_RE37_F1 = [
    (0.692, (0, 0, 0, 0)),
    (0.477, (1, 0, 0, 0)),
    (-0.687, (0, 1, 0, 0)),
    (-0.080, (0, 0, 1, 0)),
    (-0.0650, (0, 0, 0, 1)),
    (-0.167, (2, 0, 0, 0)),
    (-0.0129, (1, 1, 0, 0)),
    (0.0796, (0, 2, 0, 0)),
    (-0.00634, (1, 0, 1, 0)),
    (-0.0257, (0, 1, 1, 0)),
    (0.0877, (0, 0, 2, 0)),
    (-0.0521, (1, 0, 0, 1)),
    (0.00156, (0, 1, 0, 1)),
    (0.00198, (0, 0, 1, 1)),
    (0.0184, (0, 0, 0, 2)),
]
_RE37_F2 = [
    (0.153, (0, 0, 0, 0)),
    (0.322, (1, 0, 0, 0)),
    (-0.396, (0, 1, 0, 0)),
    (-0.424, (0, 0, 1, 0)),
    (-0.0226, (0, 0, 0, 1)),
    (-0.175, (2, 0, 0, 0)),
    (-0.0185, (1, 1, 0, 0)),
    (0.0701, (0, 2, 0, 0)),
    (-0.251, (1, 0, 1, 0)),
    (-0.179, (0, 1, 1, 0)),
    (0.0150, (0, 0, 2, 0)),
    (-0.0134, (1, 0, 0, 1)),
    (0.0296, (0, 1, 0, 1)),
    (0.0752, (0, 0, 1, 1)),
    (0.0192, (0, 0, 0, 2)),
]
_RE37_F3 = [
    (0.370, (0, 0, 0, 0)),
    (0.205, (1, 0, 0, 0)),
    (-0.0307, (0, 1, 0, 0)),
    (-0.108, (0, 0, 1, 0)),
    (-1.019, (0, 0, 0, 1)),
    (-0.135, (2, 0, 0, 0)),
    (-0.0141, (1, 1, 0, 0)),
    (0.0998, (0, 2, 0, 0)),
    (-0.208, (1, 0, 1, 0)),
    (-0.0301, (0, 1, 1, 0)),
    (0.226, (0, 0, 2, 0)),
    (-0.353, (1, 0, 0, 1)),
    (0.0497, (0, 0, 1, 1)),
    (0.423, (0, 0, 0, 2)),
    (0.202, (2, 1, 0, 0)),
    (-0.281, (2, 0, 1, 0)),
    (-0.342, (1, 2, 0, 0)),
    (-0.245, (0, 2, 1, 0)),
    (0.281, (0, 1, 2, 0)),
    (-0.184, (1, 0, 0, 2)),
    (-0.281, (1, 1, 1, 0)),
]


class RocketInjector(Problem):
    """Three response-surface objectives of the rocket injector design."""

    def __init__(self):
        super().__init__("RocketInjector", np.zeros(4), np.ones(4), m=3)
        self._polys = [_RE37_F1, _RE37_F2, _RE37_F3]

    def _evaluate(self, X):
        k = X.shape[0]
        F = np.zeros((k, 3))
        for i, terms in enumerate(self._polys):
            for coeff, exps in terms:
                term = np.full(k, coeff)
                for v, e in enumerate(exps):
                    if e:
                        term = term * X[:, v] ** e
                F[:, i] += term
        return F

    def _jacobian(self, X):
        k = X.shape[0]
        J = np.zeros((k, 3, 4))
        for i, terms in enumerate(self._polys):
            for coeff, exps in terms:
                for v, e in enumerate(exps):
                    if not e:
                        continue
                    term = np.full(k, coeff * e)
                    for u, eu in enumerate(exps):
                        if u == v:
                            if eu > 1:
                                term = term * X[:, u] ** (eu - 1)
                        elif eu:
                            term = term * X[:, u] ** eu
                    J[:, i, v] += term
        return J
