"""Institutional fitness as a function of scale, and its optimum.

The optimizer brackets every interior maximum with a log-spaced gradient
scan, narrows each bracket with golden-section search in ``log N`` and then
polishes the stationary point by bisection on the analytic gradient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    NoDivergenceError,
    NoInteriorOptimumError,
    RegionError,
    ValidationError,
)
from .fitness_core import (
    KAPLAN_ALPHA,
    EnergyModel,
    ScalingParams,
    WeightVector,
    affordability_index,
    capability_index,
    phi,
    trust_index,
    unclamped_threshold,
)

GRADIENT_TOL = 1e-8
SCAN_POINTS = 512
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Environment:
    name: str
    weights: WeightVector
    sovereignty_sigma: float
    scaling: ScalingParams
    energy: EnergyModel = EnergyModel()

    def __post_init__(self):
        if not isinstance(self.weights, WeightVector):
            raise ValidationError("weights must be a WeightVector")
        if not (0.0 <= self.sovereignty_sigma <= 1.0):
            raise ValidationError(
                f"sigma must lie in [0, 1], got {self.sovereignty_sigma!r}"
            )


@dataclass(frozen=True)
class OptimumReport:
    n_star: float
    fitness_at_star: float
    gradient_residual: float
    bracket: tuple[float, float]
    iterations: int

    @property
    def n_star_3sf(self) -> float:
        return float(f"{self.n_star:.3g}")


def institutional_fitness(N: float, b: int, env: Environment) -> float:
    """Weighted sum of capability, trust, affordability and sovereignty."""
    w = env.weights
    c = capability_index(N, env.scaling)
    t = trust_index(N, env.scaling)
    a = affordability_index(N, b, env.scaling, env.energy)
    return math.fsum(
        (w.w_C * c, w.w_T * t, w.w_A * a, w.w_S * env.sovereignty_sigma)
    )


def fitness_components(N: float, b: int, env: Environment) -> dict[str, float]:
    return {
        "capability": capability_index(N, env.scaling),
        "trust": trust_index(N, env.scaling),
        "affordability": affordability_index(N, b, env.scaling, env.energy),
        "sovereignty": env.sovereignty_sigma,
    }


def _gradient_terms(N, b, env):
    p, w = env.scaling, env.weights
    eff = phi(b, env.energy)
    # all three terms are formed in log space to stay finite over 1e-3..1e6
    cap = w.w_C * p.alpha * math.exp(
        p.alpha * math.log(p.N_c) - (p.alpha + 1) * math.log(N)
    )
    if p.beta == 0:
        trust = 0.0
    else:
        n_gamma = N**p.gamma
        trust = (
            w.w_T
            * p.beta
            * p.gamma
            * p.T_0
            * math.exp((p.gamma - 1) * math.log(N) - p.beta * n_gamma)
        )
    afford = w.w_A * p.delta * eff * math.exp(
        p.delta * math.log(p.N_r) - (p.delta + 1) * math.log(N)
    )
    return cap, trust, afford


def fitness_gradient(N: float, b: int, env: Environment) -> float:
    """Analytic ``dF/dN`` in fitness per billion parameters.

    Raises :class:`RegionError` when ``N`` lies on a clamp plateau.
    """
    if not N > 0:
        raise DomainError(f"scale N must be > 0, got {N!r}")
    threshold = unclamped_threshold(b, env.scaling, env.energy)
    if not N > threshold:
        raise RegionError(
            f"gradient undefined at N={N!r}: clamped below N={threshold!r}"
        )
    cap, trust, afford = _gradient_terms(N, b, env)
    return cap - trust - afford


def marginal_balance(N: float, b: int, env: Environment) -> tuple[float, float]:
    """Marginal capability gain and combined marginal trust/cost loss."""
    cap, trust, afford = _gradient_terms(N, b, env)
    return cap, trust + afford


def kaplan_loss(N: float, N_c: float, alpha_N: float = KAPLAN_ALPHA) -> float:
    if not N > 0:
        raise DomainError(f"scale N must be > 0, got {N!r}")
    return math.exp(alpha_N * (math.log(N_c) - math.log(N)))


def _check_bracket(env, b, search):
    low, high = map(float, search)
    if not (0 < low < high and math.isfinite(high)):
        raise ValidationError(f"invalid search bracket {search!r}")
    threshold = unclamped_threshold(b, env.scaling, env.energy)
    if not low > threshold:
        raise ValidationError(
            f"bracket low {low!r} must exceed the unclamp threshold {threshold!r}"
        )
    return low, high


def _scan(env, b, low, high, points=SCAN_POINTS):
    grid = np.exp(np.linspace(math.log(low), math.log(high), points))
    grid[0], grid[-1] = low, high
    grads = np.array([fitness_gradient(float(n), b, env) for n in grid])
    return grid, grads


def _golden_max(fn, lo, hi, iters=40):
    """Golden-section maximization of ``fn`` over ``[lo, hi]``."""
    a, c = lo, hi
    x1 = c - _INV_PHI * (c - a)
    x2 = a + _INV_PHI * (c - a)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(iters):
        if f1 >= f2:
            c, x2, f2 = x2, x1, f1
            x1 = c - _INV_PHI * (c - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (c - a)
            f2 = fn(x2)
    return a, c


def _polish_root(env, b, lo, hi, tol=GRADIENT_TOL, max_iter=200):
    """Bisection on the gradient, expecting ``g(lo) > 0 > g(hi)``."""
    g_lo = fitness_gradient(lo, b, env)
    g_hi = fitness_gradient(hi, b, env)
    increasing = g_lo < 0 < g_hi
    iterations = 0
    mid, g_mid = lo, g_lo
    for iterations in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        g_mid = fitness_gradient(mid, b, env)
        if g_mid == 0 or (abs(g_mid) < tol and (hi - lo) <= 1e-12 * mid):
            break
        if (g_mid > 0) != increasing:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.finfo(float).eps * mid:
            break
    return mid, g_mid, iterations


def stationary_points(env: Environment, b: int, search) -> list[tuple[float, str, int]]:
    """All roots of the gradient on the bracket as ``(N, kind, iterations)``.

    ``kind`` is ``"max"`` for a ``+ -> -`` sign change and ``"min"`` otherwise.
    """
    low, high = _check_bracket(env, b, search)
    grid, grads = _scan(env, b, low, high)
    roots = []
    for i in range(len(grid) - 1):
        g0, g1 = grads[i], grads[i + 1]
        if g0 == 0 or (g0 > 0) == (g1 > 0):
            continue
        lo, hi = float(grid[i]), float(grid[i + 1])
        kind = "max" if g0 > 0 else "min"
        iters = 0
        if kind == "max":
            # golden-section on F in log N, then keep the sub-bracket only if
            # it still straddles the sign change
            la, lc = _golden_max(
                lambda u: institutional_fitness(math.exp(u), b, env),
                math.log(lo),
                math.log(hi),
            )
            iters += 40
            a, c = math.exp(la), math.exp(lc)
            if (
                lo < a < c < hi
                and fitness_gradient(a, b, env) > 0
                and fitness_gradient(c, b, env) < 0
            ):
                lo, hi = a, c
        root, _, n = _polish_root(env, b, lo, hi)
        roots.append((root, kind, iters + n))
    return roots


def find_optimal_scale(
    env: Environment, b: int = 16, search=(1.0, 1000.0)
) -> OptimumReport:
    """Locate the scale maximizing institutional fitness on ``search``.

    When several interior maxima exist the one with the highest fitness is
    returned, ties going to the smaller scale.
    """
    low, high = _check_bracket(env, b, search)
    g_low = fitness_gradient(low, b, env)
    g_high = fitness_gradient(high, b, env)
    maxima = [r for r in stationary_points(env, b, (low, high)) if r[1] == "max"]
    if not maxima:
        raise NoInteriorOptimumError(
            f"fitness is monotone on [{low!r}, {high!r}] "
            f"(dF/dN={g_low:.3e} at low, {g_high:.3e} at high); widen the bracket"
        )
    best = None
    for n, _, iters in maxima:
        value = institutional_fitness(n, b, env)
        if best is None or value > best[1]:
            best = (n, value, iters)
    n_star, value, iters = best
    residual = abs(fitness_gradient(n_star, b, env))
    return OptimumReport(
        n_star=n_star,
        fitness_at_star=value,
        gradient_residual=residual,
        bracket=(low, high),
        iterations=iters,
    )


def divergence_zone_start(env: Environment, b: int = 16, search=(1.0, 1000.0)) -> float:
    """Largest stationary scale beyond which the gradient stays negative."""
    low, high = _check_bracket(env, b, search)
    if not fitness_gradient(high, b, env) < 0:
        raise NoDivergenceError(
            f"dF/dN is not negative at the top of [{low!r}, {high!r}]"
        )
    roots = stationary_points(env, b, (low, high))
    if not roots:
        raise NoDivergenceError(
            f"dF/dN never changes sign on [{low!r}, {high!r}]; fitness is decreasing"
        )
    n, kind, _ = roots[-1]
    return n
