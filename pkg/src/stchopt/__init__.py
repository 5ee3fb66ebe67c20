"""Gradient-based multi-objective optimization toolkit.

Smooth Tchebycheff scalarization with classical baselines (linear
scalarization, nonsmooth Tchebycheff, multiple gradient descent), a
benchmark problem suite, preference-conditioned Pareto set learning, and
hypervolume-based evaluation.
"""

__version__ = "0.1.0"

from .core import (
    IdealPoint,
    Kind,
    Preference,
    ScalarizationResult,
    ScalarizationSpec,
    eval_ls,
    eval_stch,
    eval_tch,
    grad_stch,
    normalize,
    sample_preference,
    tch_subgradient,
)
from .metrics import (
    ParetoArchive,
    delta_hv,
    hypervolume,
    hypervolume_2d,
    hypervolume_3d,
    hypervolume_mc,
    nondominated_filter,
)
from .problems import get_problem, list_problems, reference_front
from .solvers import (
    DivergenceError,
    SolveConfig,
    Trajectory,
    min_norm_weights,
    project_box,
    solve_mgda,
    solve_scalarized,
)

__all__ = [
    "__version__",
    "Kind",
    "Preference",
    "IdealPoint",
    "ScalarizationSpec",
    "ScalarizationResult",
    "eval_ls",
    "eval_tch",
    "eval_stch",
    "grad_stch",
    "tch_subgradient",
    "normalize",
    "sample_preference",
    "ParetoArchive",
    "nondominated_filter",
    "hypervolume",
    "hypervolume_2d",
    "hypervolume_3d",
    "hypervolume_mc",
    "delta_hv",
    "get_problem",
    "list_problems",
    "reference_front",
    "SolveConfig",
    "Trajectory",
    "DivergenceError",
    "solve_scalarized",
    "solve_mgda",
    "min_norm_weights",
    "project_box",
]
