"""Single-preference optimizers.

Projected gradient descent for the smooth scalarizations (linear and
smooth Tchebycheff), projected subgradient descent for the nonsmooth
Tchebycheff scalarization, and a multiple-gradient-descent baseline that
steps along the min-norm convex combination of objective gradients.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Kind, Preference, ScalarizationSpec, eval_ls, eval_stch, eval_tch
from .problems.base import Problem


class DivergenceError(RuntimeError):
    """Raised when a solve produces a non-finite scalarization value."""

    def __init__(self, message: str, trajectory: "Trajectory"):
        super().__init__(message)
        self.trajectory = trajectory


@dataclass(frozen=True)
class SolveConfig:
    """Knobs of a single solve.

    ``step_schedule`` is "constant" (eta_t = step_size) or "inv_sqrt_t"
    (eta_t = step_size / sqrt(t), the usual subgradient schedule).
    ``tolerance`` is a gradient-norm stopping threshold; it only applies to
    smooth scalarizations, the nonsmooth one always runs the full budget.
    """

    max_iters: int = 200
    step_size: float = 0.1
    step_schedule: str = "constant"
    seed: int = 0
    record_every: int = 1
    tolerance: float = 0.0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.step_size <= 0:
            raise ValueError("step_size must be > 0")
        if self.tolerance < 0:
            raise ValueError("tolerance must be >= 0")
        if self.step_schedule not in ("constant", "inv_sqrt_t"):
            raise ValueError(f"unknown step schedule {self.step_schedule!r}")

    def eta(self, t: int) -> float:
        if self.step_schedule == "inv_sqrt_t":
            return self.step_size / np.sqrt(t)
        return self.step_size


@dataclass
class TrajectoryRecord:
    iteration: int
    x: np.ndarray
    f: np.ndarray
    value: float
    grad_norm: float


@dataclass
class Trajectory:
    """Recorded iterates of one solve plus cost counters.

    ``evaluations`` counts objective-vector evaluations; ``gradient_rows``
    counts evaluated Jacobian rows (the adaptive-gradient baseline pays m
    rows plus a QP per step, the scalarized solvers one combined gradient).
    """

    records: list[TrajectoryRecord] = field(default_factory=list)
    evaluations: int = 0
    gradient_rows: int = 0
    qp_solves: int = 0
    converged: bool = False

    @property
    def final(self) -> TrajectoryRecord:
        return self.records[-1]

    def write_csv(self, path: str | Path, header_lines: list[str] | None = None) -> None:
        """Export as CSV: iter, evals, x..., f..., value, grad_norm."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        n = self.records[0].x.shape[0]
        m = self.records[0].f.shape[0]
        with open(path, "w", newline="") as fh:
            for line in header_lines or []:
                fh.write(f"# {line}\n")
            writer = csv.writer(fh)
            writer.writerow(
                ["iter", "evals"]
                + [f"x{i + 1}" for i in range(n)]
                + [f"f{i + 1}" for i in range(m)]
                + ["value", "grad_norm"]
            )
            for rec in self.records:
                writer.writerow(
                    [rec.iteration, rec.iteration]
                    + [repr(float(v)) for v in rec.x]
                    + [repr(float(v)) for v in rec.f]
                    + [repr(float(rec.value)), repr(float(rec.grad_norm))]
                )


def project_box(x, lower, upper) -> np.ndarray:
    """Componentwise clamp onto the box."""
    return np.clip(x, lower, upper)


def _direction(problem: Problem, x: np.ndarray, spec: ScalarizationSpec, pref: Preference):
    """Scalarization value and descent direction at x."""
    f = problem.evaluate(x)
    J = problem.jacobian(x)
    from .core import grad_stch, tch_subgradient, _jacobian_scale  # local to avoid cycle noise

    if spec.kind == Kind.LS:
        scale = _jacobian_scale(spec, pref.m)
        if spec.normalization is not None:
            fh = (f - spec.normalization[0]) / (spec.normalization[1] - spec.normalization[0])
        else:
            fh = f
        value = eval_ls(fh, pref)
        grad = (pref.values * scale) @ J
    elif spec.kind == Kind.TCH:
        value, _ = eval_tch(f, pref, spec)
        grad = tch_subgradient(f, J, pref, spec)
    elif spec.kind == Kind.STCH:
        value = eval_stch(f, pref, spec).value
        grad = grad_stch(f, J, pref, spec)
    else:
        raise ValueError(f"unsupported scalarization kind {spec.kind}")
    return f, value, grad


def solve_scalarized(
    problem: Problem,
    spec: ScalarizationSpec,
    pref: Preference,
    config: SolveConfig,
    x0: np.ndarray | None = None,
) -> Trajectory:
    """Projected (sub)gradient descent on a scalarized objective.

    The start point is sampled uniformly in the box from ``config.seed``
    unless ``x0`` is given. Smooth scalarizations stop early once the
    gradient norm drops below ``config.tolerance``.
    """
    rng = np.random.default_rng(config.seed)
    x = problem.sample_x(rng) if x0 is None else project_box(
        np.asarray(x0, dtype=np.float64), problem.lower, problem.upper
    )
    smooth = spec.kind in (Kind.LS, Kind.STCH)
    traj = Trajectory()

    f, value, grad = _direction(problem, x, spec, pref)
    traj.evaluations += 1
    traj.gradient_rows += 1
    gnorm = float(np.linalg.norm(grad))
    traj.records.append(TrajectoryRecord(0, x.copy(), f.copy(), value, gnorm))

    last_t = 0
    for t in range(1, config.max_iters + 1):
        if smooth and config.tolerance > 0 and gnorm < config.tolerance:
            break
        x = project_box(x - config.eta(t) * grad, problem.lower, problem.upper)
        f, value, grad = _direction(problem, x, spec, pref)
        traj.evaluations += 1
        traj.gradient_rows += 1
        gnorm = float(np.linalg.norm(grad))
        last_t = t
        if not np.isfinite(value):
            traj.records.append(TrajectoryRecord(t, x.copy(), f.copy(), value, gnorm))
            raise DivergenceError(
                f"non-finite scalarization value at iteration {t}", traj
            )
        if t % config.record_every == 0:
            traj.records.append(TrajectoryRecord(t, x.copy(), f.copy(), value, gnorm))
    if smooth and config.tolerance > 0 and gnorm < config.tolerance:
        traj.converged = True
    if traj.records[-1].iteration != last_t:
        traj.records.append(TrajectoryRecord(last_t, x.copy(), f.copy(), value, gnorm))
    return traj


def min_norm_weights(gradients) -> np.ndarray:
    """Weights on the simplex minimizing the norm of the combined gradient.

    Two objectives are solved in closed form; more via Frank-Wolfe with
    exact line search (200 iterations, 1e-9 duality-gap stop).
    """
    G = np.asarray(gradients, dtype=np.float64)
    m = G.shape[0]
    if m < 2:
        raise ValueError("need at least 2 gradients")
    gram = G @ G.T
    if m == 2:
        v11, v12, v22 = gram[0, 0], gram[0, 1], gram[1, 1]
        denom = v11 + v22 - 2 * v12
        if denom <= 0:
            # parallel gradients: the shorter one wins, tie at the midpoint
            gamma = 1.0 if v11 < v22 else (0.0 if v22 < v11 else 0.5)
        else:
            gamma = np.clip((v22 - v12) / denom, 0.0, 1.0)
        return np.array([gamma, 1.0 - gamma])

    # Away-step variant: plain Frank-Wolfe zigzags at O(1/k) and cannot hit
    # tight tolerances in 200 iterations; away steps restore linear
    # convergence on this quadratic over the simplex.
    alpha = np.full(m, 1.0 / m)
    for _ in range(200):
        grad = 2.0 * gram @ alpha
        i = int(np.argmin(grad))
        gap = float(grad @ alpha - grad[i])
        if gap < 1e-9:
            break
        support = np.flatnonzero(alpha > 1e-15)
        v = int(support[np.argmax(grad[support])])
        d_fw = -alpha.copy()
        d_fw[i] += 1.0
        d_aw = alpha.copy()
        d_aw[v] -= 1.0
        if grad @ d_fw <= grad @ d_aw:
            d, step_max = d_fw, 1.0
        else:
            d = d_aw
            step_max = alpha[v] / (1.0 - alpha[v]) if alpha[v] < 1.0 else 1e16
        curvature = float(d @ gram @ d)
        if curvature <= 0:
            step = step_max
        else:
            step = float(np.clip(-(grad @ d) / (2.0 * curvature), 0.0, step_max))
        if step == 0.0:
            break
        alpha = alpha + step * d
    alpha = np.maximum(alpha, 0.0)
    return alpha / alpha.sum()


def solve_mgda(
    problem: Problem,
    config: SolveConfig,
    x0: np.ndarray | None = None,
) -> Trajectory:
    """Multiple gradient descent: step along the min-norm combined gradient.

    Stops when the combined direction norm drops below ``config.tolerance``
    (Pareto stationarity) or after ``max_iters``.
    """
    rng = np.random.default_rng(config.seed)
    x = problem.sample_x(rng) if x0 is None else project_box(
        np.asarray(x0, dtype=np.float64), problem.lower, problem.upper
    )
    traj = Trajectory()
    for t in range(0, config.max_iters + 1):
        f = problem.evaluate(x)
        J = problem.jacobian(x)
        alpha = min_norm_weights(J)
        d = alpha @ J
        dnorm = float(np.linalg.norm(d))
        traj.evaluations += 1
        traj.gradient_rows += problem.m
        traj.qp_solves += 1
        if not np.all(np.isfinite(f)):
            traj.records.append(TrajectoryRecord(t, x.copy(), f.copy(), np.nan, dnorm))
            raise DivergenceError(f"non-finite objectives at iteration {t}", traj)
        if t % config.record_every == 0 or t == config.max_iters:
            traj.records.append(TrajectoryRecord(t, x.copy(), f.copy(), float(alpha @ f), dnorm))
        if config.tolerance > 0 and dnorm < config.tolerance:
            traj.converged = True
            if traj.records[-1].iteration != t:
                traj.records.append(
                    TrajectoryRecord(t, x.copy(), f.copy(), float(alpha @ f), dnorm)
                )
            break
        if t < config.max_iters:
            x = project_box(x - config.eta(t + 1) * d, problem.lower, problem.upper)
    return traj
