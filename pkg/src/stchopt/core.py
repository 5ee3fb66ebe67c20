"""Scalarization functions for gradient-based multi-objective optimization.

Implements three ways to collapse an m-dimensional objective vector into a
scalar given a preference vector on the simplex:

* linear scalarization (weighted sum),
* Tchebycheff scalarization (weighted max of gaps to an ideal point), and
* its smooth log-sum-exp counterpart, which is differentiable everywhere
  and bounds the weighted max from above within ``mu * log(m)``.

All functions operate on plain float64 numpy arrays and are pure.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

SIMPLEX_TOL = 1e-9


class Kind(enum.Enum):
    """Scalarization family selector."""

    LS = "ls"
    TCH = "tch"
    STCH = "stch"


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite, got {arr}")
    return arr


def _check_same_length(a: np.ndarray, b: np.ndarray, what: str) -> None:
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {what} ({a.shape[0]} vs {b.shape[0]})")


@dataclass(frozen=True)
class Preference:
    """Preference vector on the (m-1)-simplex.

    Entries are nonnegative and sum to one within a small tolerance.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = _as_vector(self.values, "preference")
        if arr.shape[0] < 2:
            raise ValueError("preference needs at least 2 entries")
        if np.any(arr < 0):
            raise ValueError(f"preference entries must be >= 0, got {arr}")
        if abs(arr.sum() - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"preference must sum to 1, got sum {arr.sum()!r}")
        object.__setattr__(self, "values", arr)

    @property
    def m(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class IdealPoint:
    """Componentwise lower bound on achievable objective values.

    When derived from observed minima, ``epsilon`` is the margin subtracted
    from each observed minimum so that all gaps stay strictly positive.
    """

    z_star: np.ndarray
    epsilon: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "z_star", _as_vector(self.z_star, "z_star"))
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")


@dataclass(frozen=True)
class ScalarizationSpec:
    """Configuration bundle for the scalarization functions.

    Attributes:
        kind: which scalarization family to use.
        ideal: ideal point (only used by TCH/STCH).
        mu: smoothing parameter, required > 0 for STCH.
        normalization: optional (f_min, f_max) pair; when present, objectives
            are mapped through (f - f_min) / (f_max - f_min) before
            scalarizing, and gradients are scaled accordingly.
    """

    kind: Kind
    ideal: IdealPoint
    mu: float = 0.1
    normalization: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        if self.kind == Kind.STCH and self.mu <= 0:
            raise ValueError(f"mu must be > 0 for the smooth scalarization, got {self.mu}")
        if self.normalization is not None:
            f_min = _as_vector(self.normalization[0], "f_min")
            f_max = _as_vector(self.normalization[1], "f_max")
            _check_same_length(f_min, f_max, "normalization bounds")
            if np.any(f_max <= f_min):
                raise ValueError("normalization bounds must satisfy f_max > f_min componentwise")
            object.__setattr__(self, "normalization", (f_min, f_max))


@dataclass
class ScalarizationResult:
    """Value plus the gradient-combination weights of the smooth scalarization.

    ``weights[i]`` already includes the preference factor lambda_i, so the
    gradient with respect to the decision variables is exactly
    ``weights @ jacobian``. Divide by ``weights.sum()`` to obtain a simplex
    vector.
    """

    value: float
    weights: np.ndarray
    gradient: np.ndarray | None = field(default=None)


def _apply_normalization(f: np.ndarray, spec: ScalarizationSpec) -> np.ndarray:
    if spec.normalization is None:
        return f
    f_min, f_max = spec.normalization
    _check_same_length(f, f_min, "objectives vs normalization bounds")
    return (f - f_min) / (f_max - f_min)


def _jacobian_scale(spec: ScalarizationSpec, m: int) -> np.ndarray:
    """Per-objective chain-rule factor from the normalization map."""
    if spec.normalization is None:
        return np.ones(m)
    f_min, f_max = spec.normalization
    return 1.0 / (f_max - f_min)


def normalize(f, f_min, f_max) -> np.ndarray:
    """Map objectives through the affine normalization (f - f_min) / span.

    Values outside [f_min, f_max] pass through linearly; no clamping, so
    gradients stay informative outside the nominal range.
    """
    f = _as_vector(f, "objectives")
    f_min = _as_vector(f_min, "f_min")
    f_max = _as_vector(f_max, "f_max")
    _check_same_length(f, f_min, "objectives vs f_min")
    _check_same_length(f, f_max, "objectives vs f_max")
    if np.any(f_max <= f_min):
        raise ValueError("degenerate normalization bounds: need f_max > f_min")
    return (f - f_min) / (f_max - f_min)


def eval_ls(f, pref: Preference) -> float:
    """Linear scalarization: the preference-weighted sum of objectives."""
    f = _as_vector(f, "objectives")
    _check_same_length(f, pref.values, "objectives vs preference")
    return float(pref.values @ f)


def weighted_gaps(f, pref: Preference, spec: ScalarizationSpec) -> np.ndarray:
    """The vector y_i = lambda_i * (f_i - z*_i), after optional normalization."""
    f = _as_vector(f, "objectives")
    _check_same_length(f, pref.values, "objectives vs preference")
    fh = _apply_normalization(f, spec)
    z = spec.ideal.z_star
    _check_same_length(fh, z, "objectives vs ideal point")
    return pref.values * (fh - z)


def eval_tch(f, pref: Preference, spec: ScalarizationSpec) -> tuple[float, int]:
    """Tchebycheff scalarization value and its active objective index.

    Returns ``(max_i y_i, argmax_i y_i)`` with ties broken by lowest index.
    """
    y = weighted_gaps(f, pref, spec)
    k = int(np.argmax(y))
    return float(y[k]), k


def tch_subgradient(f, jacobian, pref: Preference, spec: ScalarizationSpec) -> np.ndarray:
    """One valid subgradient of the Tchebycheff scalarization.

    Picks the row of the Jacobian belonging to the active objective,
    scaled by its preference weight (and normalization factor).
    """
    jacobian = np.asarray(jacobian, dtype=np.float64)
    _, k = eval_tch(f, pref, spec)
    if jacobian.shape[0] != pref.m:
        raise ValueError(
            f"dimension mismatch: jacobian has {jacobian.shape[0]} rows, expected {pref.m}"
        )
    scale = _jacobian_scale(spec, pref.m)
    return pref.values[k] * scale[k] * jacobian[k]


def stch_from_gaps(y: np.ndarray, lam: np.ndarray, mu: float) -> tuple[float, np.ndarray]:
    """Stabilized log-sum-exp of weighted gaps, plus combination weights.

    Shifts by the max gap before exponentiating, so the result is finite
    for any finite inputs and any mu > 0.
    """
    y_max = np.max(y)
    e = np.exp((y - y_max) / mu)
    denom = e.sum()
    value = float(y_max + mu * np.log(denom))
    weights = lam * e / denom
    return value, weights


def eval_stch(f, pref: Preference, spec: ScalarizationSpec) -> ScalarizationResult:
    """Smooth Tchebycheff scalarization: mu * log sum exp(y_i / mu).

    The returned weights satisfy grad = weights @ jacobian for the
    unnormalized objectives; with normalization active, the per-objective
    scale factors are folded into the weights.
    """
    if spec.mu <= 0:
        raise ValueError(f"mu must be > 0, got {spec.mu}")
    y = weighted_gaps(f, pref, spec)
    value, weights = stch_from_gaps(y, pref.values, spec.mu)
    return ScalarizationResult(value=value, weights=weights)


def grad_stch(f, jacobian, pref: Preference, spec: ScalarizationSpec) -> np.ndarray:
    """Gradient of the smooth scalarization with respect to the decision vector."""
    jacobian = np.asarray(jacobian, dtype=np.float64)
    result = eval_stch(f, pref, spec)
    if jacobian.shape[0] != pref.m:
        raise ValueError(
            f"dimension mismatch: jacobian has {jacobian.shape[0]} rows, expected {pref.m}"
        )
    scale = _jacobian_scale(spec, pref.m)
    return (result.weights * scale) @ jacobian


def sample_preference(rng: np.random.Generator, m: int, floor: float = 0.0) -> Preference:
    """Sample a preference uniformly on the simplex, optionally floored.

    Uses the exponential-spacing construction (normalized iid exponentials),
    then mixes with the floor: lam <- (1 - m*floor) * lam_raw + floor, which
    guarantees every entry is at least ``floor``.
    """
    if m < 2:
        raise ValueError(f"need m >= 2 objectives, got {m}")
    if floor < 0 or floor * m >= 1:
        raise ValueError(f"invalid floor {floor} for m={m}: need 0 <= floor*m < 1")
    raw = rng.exponential(size=m)
    raw /= raw.sum()
    lam = (1.0 - m * floor) * raw + floor
    lam /= lam.sum()  # kill accumulated rounding so the invariant holds exactly
    return Preference(lam)
