"""Pareto set learning: a preference-conditioned MLP trained end-to-end.

The model maps a preference vector to a decision vector; training pushes
each mapped solution to minimize the chosen scalarization under its own
preference, so after training the model traces the whole trade-off
surface. The network is plain numpy with manual reverse-mode gradients:
three hidden layers of 256 rectifier units and a logistic output affinely
mapped into the problem box, which keeps every emitted solution feasible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Kind
from .metrics import ParetoArchive
from .problems.base import Problem

HIDDEN = 256


class TrainingDiverged(RuntimeError):
    """Raised when the training loss becomes non-finite."""


@dataclass
class MlpModel:
    """Preference-to-solution network with the problem box baked in."""

    weights: list[np.ndarray]  # (out, in) per layer
    biases: list[np.ndarray]
    lower: np.ndarray
    upper: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.weights[0].shape[1]

    @property
    def n(self) -> int:
        return self.weights[-1].shape[0]

    def parameter_count(self) -> int:
        return sum(W.size + b.size for W, b in zip(self.weights, self.biases))

    def forward_batch(self, lams: np.ndarray) -> tuple[np.ndarray, dict]:
        """Map (k, m) preferences to (k, n) in-box solutions, keeping a cache."""
        a = np.asarray(lams, dtype=np.float64)
        cache = {"acts": [a], "zs": []}
        for W, b in zip(self.weights[:-1], self.biases[:-1]):
            z = a @ W.T + b
            cache["zs"].append(z)
            a = np.maximum(z, 0.0)
            cache["acts"].append(a)
        z = a @ self.weights[-1].T + self.biases[-1]
        cache["zs"].append(z)
        s = 1.0 / (1.0 + np.exp(-z))
        cache["sigmoid"] = s
        x = self.lower + (self.upper - self.lower) * s
        return x, cache

    def forward(self, lam: np.ndarray) -> np.ndarray:
        return self.forward_batch(np.asarray(lam)[None, :])[0][0]

    def backward_batch(
        self, cache: dict, upstream: np.ndarray
    ) -> list[tuple[np.ndarray, np.ndarray]]:
        """Parameter gradients of mean_k upstream_k . x_k.

        ``upstream`` is dLoss/dx of shape (k, n); returns per-layer (dW, db)
        averaged over the batch. Rectifier units at exactly zero
        pre-activation propagate zero gradient.
        """
        k = upstream.shape[0]
        s = cache["sigmoid"]
        delta = upstream * (self.upper - self.lower) * s * (1.0 - s)
        grads: list[tuple[np.ndarray, np.ndarray]] = []
        for layer in range(len(self.weights) - 1, -1, -1):
            a_prev = cache["acts"][layer]
            dW = delta.T @ a_prev / k
            db = delta.mean(axis=0)
            grads.append((dW, db))
            if layer > 0:
                delta = (delta @ self.weights[layer]) * (cache["zs"][layer - 1] > 0)
        grads.reverse()
        return grads

    def save(self, path: str | Path) -> None:
        """Write a JSON checkpoint (shapes, row-major parameters, metadata)."""
        payload = {
            "meta": self.meta,
            "lower": self.lower.tolist(),
            "upper": self.upper.tolist(),
            "layers": [
                {"weight": W.tolist(), "bias": b.tolist()}
                for W, b in zip(self.weights, self.biases)
            ],
        }
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(json.dumps(payload))

    @classmethod
    def load(cls, path: str | Path) -> "MlpModel":
        payload = json.loads(Path(path).read_text())
        return cls(
            weights=[np.array(layer["weight"]) for layer in payload["layers"]],
            biases=[np.array(layer["bias"]) for layer in payload["layers"]],
            lower=np.array(payload["lower"]),
            upper=np.array(payload["upper"]),
            meta=payload["meta"],
        )


def init_model(problem: Problem, seed: int, hidden: int = HIDDEN) -> MlpModel:
    """Fan-in-scaled uniform weight init, zero biases, seeded."""
    rng = np.random.default_rng(seed)
    sizes = [problem.m, hidden, hidden, hidden, problem.n]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpModel(weights, biases, problem.lower.copy(), problem.upper.copy())


@dataclass(frozen=True)
class TrainConfig:
    """Training budget and loss selection for Pareto set learning.

    Total evaluation budget is iterations * prefs_per_iter. The ideal point
    lives in normalized objective units (default: 0.1 below the observed
    minimum of each normalized objective). The smoothing parameter ``mu``
    defaults tighter than the solver-side default because the loss operates
    on normalized objectives, where a larger mu leaves a visible
    smoothing bias in the learned front.
    """

    kind: Kind = Kind.STCH
    mu: float = 0.02
    iterations: int = 2000
    prefs_per_iter: int = 10
    optimizer: str = "adam"
    learning_rate: float = 1e-3
    seed: int = 0
    pref_floor: float = 1e-3
    ideal_offset: float = 0.1

    def __post_init__(self):
        if self.iterations < 1 or self.prefs_per_iter < 1:
            raise ValueError("iterations and prefs_per_iter must be >= 1")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.kind == Kind.STCH and self.mu <= 0:
            raise ValueError("mu must be > 0 for the smooth loss")


class _Adam:
    """Adaptive-moment optimizer over a flat list of parameter arrays."""

    def __init__(self, params: list[np.ndarray], lr: float, betas=(0.9, 0.999), eps=1e-8):
        self.lr = lr
        self.b1, self.b2 = betas
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        self.t += 1
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.b1
            m += (1 - self.b1) * g
            v *= self.b2
            v += (1 - self.b2) * g * g
            mhat = m / (1 - self.b1**self.t)
            vhat = v / (1 - self.b2**self.t)
            p -= self.lr * mhat / (np.sqrt(vhat) + self.eps)


def _sample_pref_batch(rng: np.random.Generator, k: int, m: int, floor: float) -> np.ndarray:
    raw = rng.exponential(size=(k, m))
    raw /= raw.sum(axis=1, keepdims=True)
    lam = (1.0 - m * floor) * raw + floor
    return lam / lam.sum(axis=1, keepdims=True)


def _loss_and_upstream(
    F: np.ndarray,
    J: np.ndarray,
    lams: np.ndarray,
    config: TrainConfig,
    f_min: np.ndarray,
    span: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-preference loss values and dLoss/dx rows.

    Objectives are normalized by (f_min, span) before scalarizing; the
    chain-rule factor 1/span scales the Jacobian rows.
    """
    Fh = (F - f_min) / span
    Jh = J / span[None, :, None]
    if config.kind == Kind.LS:
        losses = np.sum(lams * Fh, axis=1)
        upstream = np.einsum("km,kmn->kn", lams, Jh)
        return losses, upstream
    z_star = -config.ideal_offset
    Y = lams * (Fh - z_star)
    if config.kind == Kind.TCH:
        active = np.argmax(Y, axis=1)
        rows = np.arange(F.shape[0])
        losses = Y[rows, active]
        upstream = lams[rows, active][:, None] * Jh[rows, active, :]
        return losses, upstream
    # smooth Tchebycheff, stabilized
    y_max = Y.max(axis=1, keepdims=True)
    E = np.exp((Y - y_max) / config.mu)
    denom = E.sum(axis=1, keepdims=True)
    losses = (y_max + config.mu * np.log(denom))[:, 0]
    W = lams * E / denom
    upstream = np.einsum("km,kmn->kn", W, Jh)
    return losses, upstream


def train(
    problem: Problem,
    config: TrainConfig,
    normalization: tuple[np.ndarray, np.ndarray] | None = None,
) -> tuple[MlpModel, np.ndarray]:
    """Train a Pareto set model; returns (model, per-iteration mean loss).

    ``normalization`` is the (f_min, f_max) pair used to put objectives on
    a common scale inside the loss, typically the reference front's
    bounding box. None means raw objectives.
    """
    if normalization is None:
        f_min = np.zeros(problem.m)
        span = np.ones(problem.m)
    else:
        f_min = np.asarray(normalization[0], dtype=np.float64)
        f_max = np.asarray(normalization[1], dtype=np.float64)
        span = np.where(f_max > f_min, f_max - f_min, 1.0)

    model = init_model(problem, config.seed)
    model.meta = {
        "problem": problem.name,
        "loss": config.kind.value,
        "mu": config.mu,
        "seed": config.seed,
        "iterations": config.iterations,
        "prefs_per_iter": config.prefs_per_iter,
    }
    rng = np.random.default_rng(config.seed + 1)
    params = [p for pair in zip(model.weights, model.biases) for p in pair]
    opt = _Adam(params, config.learning_rate) if config.optimizer == "adam" else None

    history = np.empty(config.iterations)
    for it in range(config.iterations):
        lams = _sample_pref_batch(rng, config.prefs_per_iter, problem.m, config.pref_floor)
        X, cache = model.forward_batch(lams)
        F = problem.evaluate_batch(X)
        J = problem.jacobian_batch(X)
        losses, upstream = _loss_and_upstream(F, J, lams, config, f_min, span)
        mean_loss = float(losses.mean())
        if not np.isfinite(mean_loss):
            raise TrainingDiverged(f"non-finite loss at iteration {it}")
        history[it] = mean_loss
        grads = model.backward_batch(cache, upstream)
        flat_grads = [g for pair in grads for g in pair]
        if opt is not None:
            opt.step(params, flat_grads)
        else:
            for p, g in zip(params, flat_grads):
                p -= config.learning_rate * g
    return model, history


def preference_grid(m: int, count: int) -> np.ndarray:
    """Deterministic, evenly spread preferences for front sampling.

    For two objectives this is a uniform grid on lambda_1; for three a
    simplex lattice with at least ``count`` points.
    """
    if m == 2:
        t = np.linspace(0.0, 1.0, count)
        return np.stack([t, 1.0 - t], axis=1)
    if m == 3:
        h = 1
        while (h + 1) * (h + 2) // 2 < count:
            h += 1
        pts = [
            (i / h, j / h, (h - i - j) / h)
            for i in range(h + 1)
            for j in range(h + 1 - i)
        ]
        return np.array(pts)
    raise ValueError(f"preference grids support m in {{2, 3}}, got {m}")


def sample_front(
    model: MlpModel,
    preferences: np.ndarray,
    problem: Problem,
    reference_point: np.ndarray,
) -> ParetoArchive:
    """Evaluate the model on each preference and keep the non-dominated set."""
    X, _ = model.forward_batch(np.asarray(preferences, dtype=np.float64))
    F = problem.evaluate_batch(X)
    return ParetoArchive.from_points(X, F, reference_point)
