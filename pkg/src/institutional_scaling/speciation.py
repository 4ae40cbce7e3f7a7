"""Per-environment optima on a configuration grid and trust aggregation."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .scaling_law import Environment, institutional_fitness


class CoarseGridWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ConfigGrid:
    scales: tuple[float, ...]
    precisions: tuple[int, ...] = (16,)

    def __post_init__(self):
        scales = tuple(float(n) for n in self.scales)
        precisions = tuple(int(b) for b in self.precisions)
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "precisions", precisions)
        if not scales or not precisions:
            raise ValidationError("config grid must be non-empty")
        if any(n <= 0 for n in scales):
            raise ValidationError("grid scales must be positive")
        if any(b <= a for a, b in zip(scales, scales[1:])):
            raise ValidationError("grid scales must be strictly increasing")


@dataclass(frozen=True)
class GridOptimum:
    scale: float
    precision: int
    fitness: float


@dataclass(frozen=True)
class IncidentProfile:
    rates: tuple[float, ...] = ()

    def __post_init__(self):
        rates = tuple(float(r) for r in self.rates)
        object.__setattr__(self, "rates", rates)
        for k, r in enumerate(rates):
            if not (0.0 <= r < 1.0):
                raise ValidationError(f"rates[{k}] must lie in [0, 1), got {r!r}")


def optimal_config(env: Environment, grid: ConfigGrid) -> GridOptimum:
    """Exhaustive argmax of institutional fitness over the grid.

    Ties go to the smaller scale, then to the larger bit-width.
    """
    best = None
    for n in grid.scales:
        for b in sorted(grid.precisions, reverse=True):
            value = institutional_fitness(n, b, env)
            if best is None or value > best.fitness:
                best = GridOptimum(n, b, value)
    return best


def config_distance(a: GridOptimum, b: GridOptimum) -> float:
    return abs(math.log(a.scale) - math.log(b.scale))


def weight_distance(e1: Environment, e2: Environment) -> float:
    d = np.subtract(e1.weights.as_tuple(), e2.weights.as_tuple())
    return float(np.sqrt(np.dot(d, d)))


def empirical_kappa(
    env_pairs: Sequence[tuple[Environment, Environment]], grid: ConfigGrid
) -> float:
    """Smallest ratio of log-scale optimum separation to weight separation."""
    if not env_pairs:
        raise ValidationError("need at least one environment pair")
    ratios = []
    for e1, e2 in env_pairs:
        dw = weight_distance(e1, e2)
        if dw == 0:
            raise ValidationError(
                f"environments {e1.name!r} and {e2.name!r} have identical weights"
            )
        ratios.append(config_distance(optimal_config(e1, grid), optimal_config(e2, grid)) / dw)
    kappa = min(ratios)
    if kappa == 0:
        warnings.warn(
            "optimal configurations coincide on this grid; refine the grid",
            CoarseGridWarning,
            stacklevel=2,
        )
    return kappa


def aggregate_trust(profile: IncidentProfile) -> tuple[float, float]:
    """Exact product of per-context survival and its exponential approximation."""
    exact = math.prod(1.0 - r for r in profile.rates)
    approx = math.exp(-math.fsum(profile.rates))
    return exact, approx
