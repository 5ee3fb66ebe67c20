"""Experiment runner: solve, race, psl, and table subcommands.

Every command is deterministic given its configuration: re-running with
the same flags produces byte-identical output files. All outputs are CSV
or JSON with a header block recording the exact configuration. Exit
codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .core import IdealPoint, Kind, Preference, ScalarizationSpec
from .metrics import delta_hv
from .problems import PROBLEM_NAMES, get_problem, reference_front
from .problems.base import Problem, ReferenceFront
from .problems.toy import ConvexToy
from .psl import TrainConfig, TrainingDiverged, preference_grid, sample_front, train
from .solvers import DivergenceError, SolveConfig, solve_mgda, solve_scalarized

METHODS = ("ls", "tch", "stch", "mgda")
PSL_METHODS = ("ls", "tch", "stch")
DEFAULT_MU = 0.1
# The preference-conditioned training loss works on normalized objectives,
# where a tighter smoothing parameter removes the O(mu log m) bias that is
# visible at delta-hypervolume scale.
DEFAULT_PSL_MU = 0.02
DEFAULT_IDEAL_OFFSET = 0.1
FULL_BUDGET = {"iterations": 2000, "seeds": 30}
DESK_BUDGET = {"iterations": 500, "seeds": 10}


class ConfigError(ValueError):
    """Bad command configuration; reported with exit code 2."""


def _merge_config(defaults: dict, config_path: str | None, flags: dict) -> dict:
    """defaults < JSON config file < explicit flags."""
    merged = dict(defaults)
    if config_path:
        try:
            loaded = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {config_path}: {exc}") from exc
        unknown = set(loaded) - set(defaults)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        merged.update(loaded)
    merged.update({k: v for k, v in flags.items() if v is not None})
    return merged


def _header_lines(params: dict) -> list[str]:
    lines = [f"stchopt version={__version__}"]
    lines += [f"{k}={params[k]}" for k in sorted(params)]
    return lines


def _write_csv(path: Path, header: list[str], columns: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) if isinstance(v, float) else str(v) for v in row) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _resolve_problem(name: str, n: int) -> Problem:
    try:
        return get_problem(name, n=n)
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc


def _problem_front(problem: Problem, out_dir: Path, resolution: int) -> ReferenceFront:
    cache = out_dir / "fronts"
    return reference_front(problem, resolution=resolution, cache_dir=cache)


def _build_spec(
    kind: Kind,
    mu: float,
    front: ReferenceFront | None,
    m: int,
    ideal_offset: float = DEFAULT_IDEAL_OFFSET,
) -> ScalarizationSpec:
    """Scalarization over front-normalized objectives, ideal point just below 0."""
    normalization = None
    if front is not None:
        f_min, f_max = front.objective_bounds()
        span = np.where(f_max > f_min, f_max - f_min, 1.0)
        normalization = (f_min, f_min + span)
    return ScalarizationSpec(
        kind=kind,
        ideal=IdealPoint(np.full(m, -ideal_offset), epsilon=ideal_offset),
        mu=mu,
        normalization=normalization,
    )


def _parse_lambda(text: str, m: int) -> Preference:
    try:
        values = np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise ConfigError(f"cannot parse preference {text!r}") from exc
    if values.shape[0] != m:
        raise ConfigError(f"preference has {values.shape[0]} entries, problem needs {m}")
    total = values.sum()
    if total <= 0 or np.any(values < 0):
        raise ConfigError(f"preference entries must be nonnegative with positive sum: {text!r}")
    return Preference(values / total)


# ---------------------------------------------------------------- solve


def cmd_solve(opts: dict) -> int:
    problem = _resolve_problem(opts["problem"], opts["n"])
    method = opts["method"]
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}; known: {', '.join(METHODS)}")
    out_dir = Path(opts["out"])
    front = None
    if method != "mgda" and not isinstance(problem, ConvexToy):
        front = _problem_front(problem, out_dir, opts["resolution"])

    config = SolveConfig(
        max_iters=opts["iters"],
        step_size=opts["step"],
        step_schedule="inv_sqrt_t" if method == "tch" else "constant",
        seed=opts["seed"],
        record_every=opts["record_every"],
        tolerance=opts["tol"],
    )
    started = time.perf_counter()
    if method == "mgda":
        pref = None
        spec = None
        traj = solve_mgda(problem, config)
    else:
        pref = _parse_lambda(opts["lam"], problem.m)
        spec = _build_spec(Kind(method), opts["mu"], front, problem.m)
        traj = solve_scalarized(problem, spec, pref, config)
    elapsed = time.perf_counter() - started

    params = {
        "command": "solve",
        "problem": problem.name,
        "method": method,
        "lambda": opts["lam"] if method != "mgda" else "",
        "mu": opts["mu"],
        "z_star": -DEFAULT_IDEAL_OFFSET,
        "iters": opts["iters"],
        "step": opts["step"],
        "seed": opts["seed"],
        "tol": opts["tol"],
    }
    traj.write_csv(out_dir / "trajectory.csv", _header_lines(params))

    final = traj.final
    summary = {
        "config": params,
        "final_x": final.x.tolist(),
        "final_f": final.f.tolist(),
        "final_value": final.value,
        "grad_norm": final.grad_norm,
        "evaluations": traj.evaluations,
        "gradient_rows": traj.gradient_rows,
        "qp_solves": traj.qp_solves,
        "converged": traj.converged,
    }
    if spec is not None and spec.kind in (Kind.TCH, Kind.STCH):
        from .core import weighted_gaps

        y = weighted_gaps(final.f, pref, spec)
        summary["balance_residual"] = float(np.max(y) - np.min(y))
    _write_json(out_dir / "summary.json", summary)
    # wall time goes to stdout only so output files stay reproducible
    print(f"solve finished in {elapsed:.3f}s -> {out_dir}")
    return 0


# ---------------------------------------------------------------- race


def toy_tch_oracle(pref: Preference, spec: ScalarizationSpec, resolution: int = 2_000_001):
    """Grid-search optimum of the Tchebycheff value on the toy interval."""
    xs = np.linspace(-1.0, 2.0, resolution)
    F = np.stack([xs**2, (xs - 1.0) ** 2], axis=1)
    y = pref.values * (F - spec.ideal.z_star)
    values = y.max(axis=1)
    k = int(np.argmin(values))
    return float(xs[k]), float(values[k])


def cmd_race(opts: dict) -> int:
    out_dir = Path(opts["out"])
    problem = ConvexToy()
    pref = Preference(np.array([0.5, 0.5]))
    spec_stch = _build_spec(Kind.STCH, opts["mu"], None, 2)
    spec_tch = _build_spec(Kind.TCH, opts["mu"], None, 2)
    _, oracle_value = toy_tch_oracle(pref, spec_tch)

    iters = opts["iters"]
    trials = opts["trials"]
    gaps = {"tch": [], "stch": []}
    for trial in range(trials):
        seed = opts["seed"] + trial
        for method, spec in (("tch", spec_tch), ("stch", spec_stch)):
            config = SolveConfig(
                max_iters=iters,
                step_size=opts["step"],
                step_schedule="inv_sqrt_t" if method == "tch" else "constant",
                seed=seed,
                record_every=1,
            )
            traj = solve_scalarized(problem, spec, pref, config)
            trial_gaps = np.empty(iters + 1)
            for rec in traj.records:
                y = pref.values * (rec.f - spec_tch.ideal.z_star)
                trial_gaps[rec.iteration] = max(float(y.max()) - oracle_value, 0.0)
            gaps[method].append(trial_gaps)

    tch = np.array(gaps["tch"])
    stch = np.array(gaps["stch"])
    params = {
        "command": "race",
        "trials": trials,
        "iters": iters,
        "mu": opts["mu"],
        "z_star": -DEFAULT_IDEAL_OFFSET,
        "step": opts["step"],
        "seed": opts["seed"],
        "oracle_value": oracle_value,
    }
    rows = [
        (
            t,
            float(tch[:, t].mean()),
            float(np.median(tch[:, t])),
            float(stch[:, t].mean()),
            float(np.median(stch[:, t])),
        )
        for t in range(iters + 1)
    ]
    _write_csv(
        out_dir / "race.csv",
        _header_lines(params),
        ["evals", "mean_gap_tch", "median_gap_tch", "mean_gap_stch", "median_gap_stch"],
        rows,
    )
    print(f"race written -> {out_dir / 'race.csv'}")
    return 0


# ---------------------------------------------------------------- psl


def run_psl_cell(
    problem: Problem,
    front: ReferenceFront,
    method: str,
    iterations: int,
    seeds: list[int],
    mu: float,
    learning_rate: float,
    prefs_per_iter: int = 10,
    n_test_prefs: int = 100,
    keep_models: bool = False,
):
    """Train one (problem, loss) cell over seeds; returns per-seed results."""
    f_min, f_max = front.objective_bounds()
    span = np.where(f_max > f_min, f_max - f_min, 1.0)
    normalization = (f_min, f_min + span)
    grid = preference_grid(problem.m, n_test_prefs)
    results = []
    for seed in seeds:
        config = TrainConfig(
            kind=Kind(method),
            mu=mu,
            iterations=iterations,
            prefs_per_iter=prefs_per_iter,
            learning_rate=learning_rate,
            seed=seed,
        )
        model, history = train(problem, config, normalization=normalization)
        archive = sample_front(model, grid, problem, front.reference_point)
        dhv, dropped = delta_hv(archive, front)
        results.append(
            {
                "seed": seed,
                "dhv": float(dhv),
                "dropped": int(dropped),
                "final_loss": float(history[-1]),
                "model": model if keep_models else None,
                "archive": archive if keep_models else None,
                "history": history if keep_models else None,
            }
        )
    return results


def cmd_psl(opts: dict) -> int:
    problem = _resolve_problem(opts["problem"], opts["n"])
    method = opts["loss"]
    if method not in PSL_METHODS:
        raise ConfigError(f"unknown psl loss {method!r}; known: {', '.join(PSL_METHODS)}")
    budget = DESK_BUDGET if opts["budget"] == "desk" else FULL_BUDGET
    iterations = opts["iters"] if opts["iters"] is not None else budget["iterations"]
    n_seeds = opts["seeds"] if opts["seeds"] is not None else budget["seeds"]
    out_dir = Path(opts["out"])
    front = _problem_front(problem, out_dir, opts["resolution"])

    results = run_psl_cell(
        problem,
        front,
        method,
        iterations,
        seeds=list(range(opts["seed"], opts["seed"] + n_seeds)),
        mu=opts["mu"],
        learning_rate=opts["lr"],
        keep_models=True,
    )
    params = {
        "command": "psl",
        "problem": problem.name,
        "loss": method,
        "mu": opts["mu"],
        "z_star": -DEFAULT_IDEAL_OFFSET,
        "budget": opts["budget"],
        "iterations": iterations,
        "seeds": n_seeds,
        "seed0": opts["seed"],
        "lr": opts["lr"],
        "front_source": front.source,
        "reference_point": ",".join(repr(v) for v in front.reference_point),
    }
    header = _header_lines(params)
    _write_csv(
        out_dir / "dhv_report.csv",
        header,
        ["problem", "method", "seed", "dhv", "dropped"],
        [(problem.name, method, r["seed"], r["dhv"], r["dropped"]) for r in results],
    )
    first = results[0]
    first["model"].save(out_dir / "model.json")
    _write_csv(
        out_dir / "front.csv",
        header,
        [f"f{i + 1}" for i in range(problem.m)],
        [tuple(float(v) for v in row) for row in first["archive"].objectives],
    )
    _write_csv(
        out_dir / "loss_history.csv",
        header,
        ["iteration", "mean_loss"],
        [(i, float(v)) for i, v in enumerate(first["history"])],
    )
    dhvs = np.array([r["dhv"] for r in results])
    _write_json(
        out_dir / "summary.json",
        {
            "config": params,
            "mean_dhv": float(dhvs.mean()),
            "std_dhv": float(dhvs.std(ddof=1)) if len(dhvs) > 1 else 0.0,
            "n_seeds": len(dhvs),
            "dropped_total": int(sum(r["dropped"] for r in results)),
        },
    )
    print(f"psl {problem.name}/{method}: mean dhv {dhvs.mean():.4e} -> {out_dir}")
    return 0


# ---------------------------------------------------------------- table


def _cell_path(out_dir: Path, problem: str, method: str) -> Path:
    return out_dir / "cells" / f"{problem}_{method}.json"


def _run_table_cell(args_tuple):
    problem_name, method, iterations, seeds, mu, lr, n, out_dir, resolution = args_tuple
    cell_file = _cell_path(out_dir, problem_name, method)
    if cell_file.exists():
        return json.loads(cell_file.read_text())
    problem = get_problem(problem_name, n=n)
    front = _problem_front(problem, out_dir, resolution)
    try:
        results = run_psl_cell(
            problem, front, method, iterations, seeds=seeds, mu=mu, learning_rate=lr
        )
        dhvs = np.array([r["dhv"] for r in results])
        payload = {
            "problem": problem_name,
            "method": method,
            "status": "ok",
            "mean_dhv": float(dhvs.mean()),
            "std_dhv": float(dhvs.std(ddof=1)) if len(dhvs) > 1 else 0.0,
            "n_seeds": len(dhvs),
            "per_seed": [{"seed": r["seed"], "dhv": r["dhv"], "dropped": r["dropped"]} for r in results],
        }
    except (TrainingDiverged, FloatingPointError) as exc:
        payload = {
            "problem": problem_name,
            "method": method,
            "status": f"failed: {exc}",
            "mean_dhv": None,
            "std_dhv": None,
            "n_seeds": 0,
            "per_seed": [],
        }
    _write_json(cell_file, payload)
    return payload


def cmd_table(opts: dict) -> int:
    problems = opts["problems"].split(",") if opts["problems"] else list(PROBLEM_NAMES)
    methods = opts["methods"].split(",") if opts["methods"] else list(PSL_METHODS)
    for name in problems:
        if name not in PROBLEM_NAMES:
            raise ConfigError(f"unknown problem {name!r}")
    for method in methods:
        if method not in PSL_METHODS:
            raise ConfigError(f"unknown table method {method!r}")
    budget = DESK_BUDGET if opts["budget"] == "desk" else FULL_BUDGET
    iterations = opts["iters"] if opts["iters"] is not None else budget["iterations"]
    n_seeds = opts["seeds"] if opts["seeds"] is not None else budget["seeds"]
    seeds = list(range(opts["seed"], opts["seed"] + n_seeds))
    out_dir = Path(opts["out"])

    tasks = [
        (p, method, iterations, seeds, opts["mu"], opts["lr"], opts["n"], out_dir, opts["resolution"])
        for p in problems
        for method in methods
    ]
    workers = opts["workers"]
    if workers > 1:
        # fronts are cached up front so workers never race on cache files
        for p in problems:
            _problem_front(get_problem(p, n=opts["n"]), out_dir, opts["resolution"])
        import multiprocessing as mp

        with mp.Pool(workers) as pool:
            cells = pool.map(_run_table_cell, tasks)
    else:
        cells = [_run_table_cell(t) for t in tasks]

    params = {
        "command": "table",
        "problems": ",".join(problems),
        "methods": ",".join(methods),
        "iterations": iterations,
        "seeds": n_seeds,
        "seed0": opts["seed"],
        "mu": opts["mu"],
        "z_star": -DEFAULT_IDEAL_OFFSET,
        "lr": opts["lr"],
        "budget": opts["budget"],
    }
    rows = []
    for cell in cells:
        mean = cell["mean_dhv"]
        std = cell["std_dhv"]
        rows.append(
            (
                cell["problem"],
                cell["method"],
                repr(mean) if mean is not None else "failed",
                repr(std) if std is not None else "failed",
                cell["n_seeds"],
            )
        )
    _write_csv(
        out_dir / "table.csv",
        _header_lines(params),
        ["problem", "method", "mean_dhv", "std_dhv", "n_seeds"],
        rows,
    )
    print(f"table written -> {out_dir / 'table.csv'}")
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stchopt", description="multi-objective optimization experiment runner"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, help="base RNG seed")

    p_solve = sub.add_parser("solve", help="single-preference solve")
    add_common(p_solve)
    p_solve.add_argument("--problem", help="problem id (F1..F6, RE names, toy)")
    p_solve.add_argument("--method", help="ls | tch | stch | mgda")
    p_solve.add_argument("--lambda", dest="lam", help="comma-separated preference")
    p_solve.add_argument("--mu", type=float)
    p_solve.add_argument("--iters", type=int)
    p_solve.add_argument("--step", type=float)
    p_solve.add_argument("--tol", type=float)
    p_solve.add_argument("--record-every", type=int, dest="record_every")
    p_solve.add_argument("--n", type=int, help="decision dimension for F1-F6")
    p_solve.add_argument("--resolution", type=int)

    p_race = sub.add_parser("race", help="TCH vs STCH convergence race on the toy")
    add_common(p_race)
    p_race.add_argument("--trials", type=int)
    p_race.add_argument("--iters", type=int)
    p_race.add_argument("--mu", type=float)
    p_race.add_argument("--step", type=float)

    p_psl = sub.add_parser("psl", help="train a Pareto set model and report dhv")
    add_common(p_psl)
    p_psl.add_argument("--problem")
    p_psl.add_argument("--loss", help="ls | tch | stch")
    p_psl.add_argument("--mu", type=float)
    p_psl.add_argument("--iters", type=int)
    p_psl.add_argument("--seeds", type=int, help="number of seeded runs")
    p_psl.add_argument("--lr", type=float)
    p_psl.add_argument("--budget", choices=["full", "desk"])
    p_psl.add_argument("--n", type=int)
    p_psl.add_argument("--resolution", type=int)

    p_table = sub.add_parser("table", help="dhv table across problems and methods")
    add_common(p_table)
    p_table.add_argument("--problems", help="comma-separated subset; default all 11")
    p_table.add_argument("--methods", help="comma-separated subset of ls,tch,stch")
    p_table.add_argument("--mu", type=float)
    p_table.add_argument("--iters", type=int)
    p_table.add_argument("--seeds", type=int)
    p_table.add_argument("--lr", type=float)
    p_table.add_argument("--budget", choices=["full", "desk"])
    p_table.add_argument("--n", type=int)
    p_table.add_argument("--resolution", type=int)
    p_table.add_argument("--workers", type=int)

    return parser


DEFAULTS = {
    "solve": {
        "problem": "toy",
        "method": "stch",
        "lam": "0.5,0.5",
        "mu": DEFAULT_MU,
        "iters": 200,
        "step": 0.2,
        "tol": 0.0,
        "record_every": 1,
        "seed": 0,
        "n": 20,
        "resolution": 1000,
        "out": "out/solve",
    },
    "race": {
        "trials": 100,
        "iters": 200,
        "mu": DEFAULT_MU,
        "step": 0.5,
        "seed": 0,
        "out": "out/race",
    },
    "psl": {
        "problem": "F1",
        "loss": "stch",
        "mu": DEFAULT_PSL_MU,
        "iters": None,
        "seeds": None,
        "lr": 1e-3,
        "budget": "full",
        "seed": 0,
        "n": 20,
        "resolution": 1000,
        "out": "out/psl",
    },
    "table": {
        "problems": None,
        "methods": None,
        "mu": DEFAULT_PSL_MU,
        "iters": None,
        "seeds": None,
        "lr": 1e-3,
        "budget": "full",
        "seed": 0,
        "n": 20,
        "resolution": 1000,
        "workers": 1,
        "out": "out/table",
    },
}

COMMANDS = {"solve": cmd_solve, "race": cmd_race, "psl": cmd_psl, "table": cmd_table}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config", None)
    try:
        opts = _merge_config(DEFAULTS[command], config_path, args)
        return COMMANDS[command](opts)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DivergenceError, TrainingDiverged) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
