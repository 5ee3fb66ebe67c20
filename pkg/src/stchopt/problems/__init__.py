"""Benchmark problem suite: six synthetic bi-objective problems and five
engineering design problems, with analytic Jacobians and reference fronts."""

from __future__ import annotations

from .base import Problem, ReferenceFront
from .engineering import DiskBrake, FourBarTruss, GearTrain, HatchCover, RocketInjector
from .fronts import reference_front
from .synthetic import SyntheticProblem, make_synthetic
from .toy import ConvexToy

SYNTHETIC_NAMES = ("F1", "F2", "F3", "F4", "F5", "F6")
ENGINEERING_NAMES = ("BarTruss", "HatchCover", "DiskBrake", "GearTrain", "RocketInjector")
PROBLEM_NAMES = SYNTHETIC_NAMES + ENGINEERING_NAMES


def get_problem(name: str, n: int = 20) -> Problem:
    """Instantiate a problem by name; ``n`` applies to F1-F6 only."""
    if name in SYNTHETIC_NAMES:
        return make_synthetic(name, n=n)
    engineering = {
        "BarTruss": FourBarTruss,
        "HatchCover": HatchCover,
        "DiskBrake": DiskBrake,
        "GearTrain": GearTrain,
        "RocketInjector": RocketInjector,
    }
    if name in engineering:
        return engineering[name]()
    if name == "toy":
        return ConvexToy()
    raise KeyError(f"unknown problem {name!r}; known: {', '.join(PROBLEM_NAMES + ('toy',))}")


def list_problems(n: int = 20) -> list[Problem]:
    """All eleven shipped problems."""
    return [get_problem(name, n=n) for name in PROBLEM_NAMES]


__all__ = [
    "Problem",
    "ReferenceFront",
    "SyntheticProblem",
    "make_synthetic",
    "ConvexToy",
    "FourBarTruss",
    "HatchCover",
    "DiskBrake",
    "GearTrain",
    "RocketInjector",
    "reference_front",
    "get_problem",
    "list_problems",
    "PROBLEM_NAMES",
    "SYNTHETIC_NAMES",
    "ENGINEERING_NAMES",
]
