"""Pure evaluators for the four fitness components.

Scale ``N`` is measured in billions of parameters everywhere. Each index is
clamped to ``[0, 1]``; callers that differentiate must stay away from the
clamp plateaus (see :func:`unclamped_threshold`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .errors import DomainError, UnknownBitWidthError, ValidationError

WEIGHT_SUM_TOL = 1e-9

#: Illustrative grid multipliers, larger for lower bit-widths.
DEFAULT_GAMMA_GRID = {16: 1.0, 8: 1.5, 4: 4.0}

#: Kaplan et al. parameter-count exponent.
KAPLAN_ALPHA = 0.076


def clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


@dataclass(frozen=True)
class FitnessVector:
    """Capability, trust, affordability and sovereignty scores.

    Components are clamped into ``[0, 1]`` on construction.
    """

    capability: float
    trust: float
    affordability: float
    sovereignty: float

    def __post_init__(self):
        for name in ("capability", "trust", "affordability", "sovereignty"):
            value = float(getattr(self, name))
            if math.isnan(value):
                raise ValidationError(f"fitness component {name} is NaN")
            object.__setattr__(self, name, clamp01(value))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.capability, self.trust, self.affordability, self.sovereignty)


@dataclass(frozen=True)
class WeightVector:
    w_C: float
    w_T: float
    w_A: float
    w_S: float

    def __post_init__(self):
        values = self.as_tuple()
        for name, value in zip(("w_C", "w_T", "w_A", "w_S"), values):
            if not math.isfinite(value):
                raise ValidationError(f"weights.{name} must be finite, got {value!r}")
            if value < 0:
                raise ValidationError(f"weights.{name} must be >= 0, got {value!r}")
        total = math.fsum(values)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(f"weights must sum to 1 (got sum {total!r})")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.w_C, self.w_T, self.w_A, self.w_S)


@dataclass(frozen=True)
class ScalingParams:
    """Shape parameters of the capability, trust and affordability terms.

    ``N_c`` is the capability knee and ``N_r`` the affordability reference,
    both in billions of parameters.
    """

    N_c: float
    alpha: float = KAPLAN_ALPHA
    T_0: float = 1.0
    beta: float = 1e-5
    gamma: float = 2.0
    N_r: float = 1.0
    delta: float = 1.0
    allow_zero_beta: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("N_c", "alpha", "gamma", "N_r", "delta"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"scaling.{name} must be > 0, got {value!r}")
        if not (0 < self.T_0 <= 1):
            raise ValidationError(f"scaling.T_0 must lie in (0, 1], got {self.T_0!r}")
        if not math.isfinite(self.beta) or self.beta < 0 or (
            self.beta == 0 and not self.allow_zero_beta
        ):
            raise ValidationError(f"scaling.beta must be > 0, got {self.beta!r}")


@dataclass(frozen=True)
class EnergyModel:
    """Quantization energy model.

    ``gamma_grid`` maps bit-width to a carbon-adjusted grid multiplier. The
    table must include ``b_ref`` and be non-increasing in bit-width.
    """

    b_ref: int = 16
    d: float = 1.0
    gamma_grid: Mapping[int, float] = field(
        default_factory=lambda: dict(DEFAULT_GAMMA_GRID)
    )

    def __post_init__(self):
        table = {int(k): float(v) for k, v in dict(self.gamma_grid).items()}
        object.__setattr__(self, "gamma_grid", table)
        if not (math.isfinite(self.d) and self.d > 0):
            raise ValidationError(f"energy.d must be > 0, got {self.d!r}")
        if self.b_ref not in table:
            raise ValidationError(
                f"energy.gamma_grid must contain the reference bit-width {self.b_ref}"
            )
        for bits, mult in table.items():
            if bits <= 0:
                raise ValidationError(f"energy.gamma_grid key {bits} must be positive")
            if not (math.isfinite(mult) and mult >= 1):
                raise ValidationError(
                    f"energy.gamma_grid[{bits}] must be >= 1, got {mult!r}"
                )
        ordered = sorted(table)
        for lo, hi in zip(ordered, ordered[1:]):
            if table[lo] < table[hi]:
                raise ValidationError(
                    "energy.gamma_grid must be non-increasing in bit-width "
                    f"({lo}: {table[lo]} < {hi}: {table[hi]})"
                )

    def multiplier(self, b: int) -> float:
        try:
            return self.gamma_grid[int(b)]
        except KeyError:
            raise UnknownBitWidthError(
                f"bit-width {b} not in energy.gamma_grid {sorted(self.gamma_grid)}"
            ) from None


def scalar_fitness(f: FitnessVector, w: WeightVector) -> float:
    """Inner product of weights and fitness components."""
    if not isinstance(w, WeightVector):
        w = WeightVector(*w)
    value = math.fsum(wi * fi for wi, fi in zip(w.as_tuple(), f.as_tuple()))
    return clamp01(value)


def capability_index(N: float, params: ScalingParams) -> float:
    """``1 - (N_c / N) ** alpha`` clamped to the unit interval."""
    if not N > 0:
        raise DomainError(f"scale N must be > 0, got {N!r}")
    if math.isinf(N):
        return 1.0
    ratio = math.exp(params.alpha * (math.log(params.N_c) - math.log(N)))
    return clamp01(1.0 - ratio)


def trust_index(N: float, params: ScalingParams) -> float:
    if not N >= 0:
        raise DomainError(f"scale N must be >= 0, got {N!r}")
    if N == 0 or params.beta == 0:
        return params.T_0
    exponent = params.beta * N**params.gamma
    return params.T_0 * math.exp(-exponent)


def quantization_energy(b: int, model: EnergyModel) -> float:
    """Relative energy score ``(b_ref / b) * d * gamma_grid(b)``.

    Lower bit-widths cost more energy once the grid multiplier is included.
    """
    mult = model.multiplier(b)
    return (model.b_ref / b) * model.d * mult


def phi_from_chi(chi: float, chi_ref: float) -> float:
    if not chi > 0 or not chi_ref > 0:
        raise DomainError(f"energy scores must be > 0, got chi={chi!r}, chi_ref={chi_ref!r}")
    return min(1.0, math.log1p(chi_ref) / math.log1p(chi))


def phi(b: int, model: EnergyModel) -> float:
    """Quantization efficiency multiplier in ``(0, 1]``; 1 at ``b_ref``."""
    chi = quantization_energy(b, model)
    chi_ref = quantization_energy(model.b_ref, model)
    return phi_from_chi(chi, chi_ref)


def affordability_index(
    N: float, b: int, params: ScalingParams, model: EnergyModel
) -> float:
    if not N > 0:
        raise DomainError(f"scale N must be > 0, got {N!r}")
    eff = phi(b, model)
    if math.isinf(N):
        return 0.0
    log_raw = params.delta * (math.log(params.N_r) - math.log(N)) + math.log(eff)
    if log_raw >= 0:
        return 1.0
    return math.exp(log_raw)


def unclamped_threshold(b: int, params: ScalingParams, model: EnergyModel) -> float:
    """Scale above which no fitness component sits on a clamp plateau."""
    return max(params.N_c, params.N_r * phi(b, model) ** (1.0 / params.delta))
