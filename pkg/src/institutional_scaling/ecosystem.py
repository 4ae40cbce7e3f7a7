"""Ecosystem simulation, entropy-rate punctuation detection and breakpoints.

The ecosystem state is a list of ``(config, environment, frequency)``
entries. Frequencies evolve under exponential replicator dynamics driven by
institutional fitness; punctuation events are spikes in the rate of change
of the Shannon entropy of the normalized frequencies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError, ValidationError
from .orchestration import symbiotic_multiplier
from .scaling_law import Environment, institutional_fitness

#: Multiple of the early-trajectory median |dH/dt| used as the default threshold.
ADAPTIVE_LAMBDA_FACTOR = 5.0
#: Lower bound on the adaptive threshold so exactly stationary runs stay quiet.
LAMBDA_FLOOR = 1e-9
MIN_SEGMENT_POINTS = 3


@dataclass(frozen=True)
class ModelConfig:
    scale_n: float
    precision_b: int = 16
    agentic_depth_k: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.scale_n) and self.scale_n > 0):
            raise ValidationError(f"config.scale_n must be > 0, got {self.scale_n!r}")
        if int(self.precision_b) != self.precision_b or self.precision_b <= 0:
            raise ValidationError(
                f"config.precision_b must be a positive integer, got {self.precision_b!r}"
            )
        if int(self.agentic_depth_k) != self.agentic_depth_k or self.agentic_depth_k < 1:
            raise ValidationError(
                f"config.agentic_depth_k must be an integer >= 1, got {self.agentic_depth_k!r}"
            )


@dataclass(frozen=True)
class Entry:
    config: ModelConfig
    env_name: str
    frequency: float


@dataclass(frozen=True)
class EcosystemState:
    entries: tuple[Entry, ...]
    time: float = 0.0

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise ValidationError("ecosystem state needs at least one entry")
        for i, e in enumerate(entries):
            if not math.isfinite(e.frequency) or e.frequency < 0:
                raise ValidationError(
                    f"entries[{i}].frequency must be finite and >= 0, got {e.frequency!r}"
                )
        if not any(e.frequency > 0 for e in entries):
            raise ValidationError("ecosystem state needs an entry with positive frequency")

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([e.frequency for e in self.entries], dtype=float)

    def with_frequencies(self, freqs, time) -> "EcosystemState":
        entries = tuple(
            replace(e, frequency=float(n)) for e, n in zip(self.entries, freqs)
        )
        return EcosystemState(entries, time)


@dataclass(frozen=True)
class Trajectory:
    states: tuple[EcosystemState, ...]
    dt: float

    def __post_init__(self):
        states = tuple(self.states)
        object.__setattr__(self, "states", states)
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValidationError(f"trajectory dt must be > 0, got {self.dt!r}")
        for i in range(1, len(states)):
            step = states[i].time - states[i - 1].time
            if not math.isclose(step, self.dt, rel_tol=1e-9, abs_tol=1e-12):
                raise ValidationError(
                    f"trajectory timestamps must be uniformly spaced by {self.dt}; "
                    f"states[{i}] is {step!r} after its predecessor"
                )

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.states])

    def entropies(self) -> np.ndarray:
        return np.array([shannon_entropy(s) for s in self.states])


@dataclass(frozen=True)
class RateSeries:
    """Entropy-rate samples at window centers."""

    times: np.ndarray
    rates: np.ndarray
    window: int = 1

    def __len__(self):
        return len(self.rates)


@dataclass(frozen=True)
class PunctuationEvent:
    index: int
    time: float
    rate: float


@dataclass(frozen=True)
class CapabilitySeries:
    t: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)
        if t.ndim != 1 or t.shape != v.shape:
            raise ValidationError("capability series needs matching 1-D t and values")
        if np.any(np.diff(t) <= 0):
            raise ValidationError("capability series times must be strictly increasing")

    @classmethod
    def from_points(cls, points):
        t, v = zip(*points)
        return cls(np.array(t), np.array(v))


@dataclass(frozen=True)
class BreakpointFit:
    """Result of a two-segment fit.

    ``t_star`` is the fitted break time and ``index`` the sample nearest to
    it. For the discontinuous fit ``t_star`` is the last pre-break sample.
    ``candidate_sse`` holds the best SSE for every admissible split.
    """

    t_star: float
    slope_pre: float
    slope_post: float
    sse: float
    index: int
    continuous: bool
    candidate_sse: np.ndarray = field(repr=False)


def _entropy_of(freqs) -> float:
    freqs = [float(n) for n in freqs]
    total = math.fsum(freqs)
    if not total > 0:
        raise DomainError("entropy undefined for all-zero frequencies")
    # fsum is exactly rounded, so the result does not depend on entry order
    return max(0.0, -math.fsum(n / total * math.log(n / total) for n in freqs if n > 0))


def shannon_entropy(state: EcosystemState) -> float:
    """Entropy in nats of the normalized configuration-deployment frequencies."""
    return _entropy_of(e.frequency for e in state.entries)


def entropy_rate(traj: Trajectory, window: int = 1) -> RateSeries:
    """Finite-difference ``dH/dt`` over ``window`` steps, stamped at window centers."""
    if int(window) != window or window < 1:
        raise ValidationError(f"window must be an integer >= 1, got {window!r}")
    n = len(traj.states)
    if n <= window:
        raise ValidationError(
            f"trajectory of {n} states is too short for window {window}"
        )
    h = traj.entropies()
    t = traj.times
    rates = (h[window:] - h[:-window]) / (window * traj.dt)
    centers = 0.5 * (t[window:] + t[:-window])
    return RateSeries(centers, rates, int(window))


def adaptive_lambda(series: RateSeries) -> float:
    """Default threshold: a multiple of the median |rate| over the first quartile."""
    mags = np.abs(np.asarray(series.rates))
    if mags.size == 0:
        return LAMBDA_FLOOR
    head = mags[: max(1, mags.size // 4)]
    return max(ADAPTIVE_LAMBDA_FACTOR * float(np.median(head)), LAMBDA_FLOOR)


def detect_punctuations(
    series: RateSeries, lambda_crit: float | None = None, window: int | None = None
) -> list[PunctuationEvent]:
    """Local maxima of ``|dH/dt|`` above ``lambda_crit``.

    Non-maximum suppression keeps only the strongest peak within ``window``
    samples. Events are returned in chronological order.
    """
    if lambda_crit is None:
        lambda_crit = adaptive_lambda(series)
    if not lambda_crit > 0:
        raise ValidationError(f"lambda_crit must be > 0, got {lambda_crit!r}")
    window = series.window if window is None else window
    mags = np.abs(np.asarray(series.rates, dtype=float))
    n = mags.size
    peaks = []
    for i in range(n):
        if mags[i] <= lambda_crit:
            continue
        left = mags[i - 1] if i > 0 else -np.inf
        right = mags[i + 1] if i < n - 1 else -np.inf
        if mags[i] >= left and mags[i] >= right:
            peaks.append(i)
    # strongest first; equal magnitudes resolve to the earlier index
    peaks.sort(key=lambda i: (-mags[i], i))
    kept: list[int] = []
    for i in peaks:
        if all(abs(i - j) > window for j in kept):
            kept.append(i)
    kept.sort()
    return [
        PunctuationEvent(i, float(series.times[i]), float(series.rates[i])) for i in kept
    ]


def entry_fitness(
    entry: Entry, envs: Mapping[str, Environment], eta_table: Mapping[str, float] | None = None
) -> float:
    """Institutional fitness of one entry, with the orchestration multiplier
    applied for multi-agent configurations (complete communication graph)."""
    try:
        env = envs[entry.env_name]
    except KeyError:
        raise ValidationError(
            f"environment {entry.env_name!r} not in registry {sorted(envs)}"
        ) from None
    cfg = entry.config
    base = institutional_fitness(cfg.scale_n, cfg.precision_b, env)
    k = cfg.agentic_depth_k
    eta = (eta_table or {}).get(entry.env_name, 0.0)
    if k > 1 and eta:
        base *= symbiotic_multiplier(eta, 1.0, k)
    return base


def step_replicator(
    state: EcosystemState,
    envs: Mapping[str, Environment],
    eta_table: Mapping[str, float] | None = None,
    dt: float = 1.0,
) -> EcosystemState:
    """One step of ``n_i <- n_i * exp(dt * (F_i - F_mean))``, total preserved."""
    fit = [entry_fitness(e, envs, eta_table) for e in state.entries]
    freqs = [e.frequency for e in state.entries]
    total = math.fsum(freqs)
    # shifting by the minimum keeps equal fitness values exactly equal
    base = min(fit)
    rel = [f - base for f in fit]
    mean = math.fsum(n * r for n, r in zip(freqs, rel)) / total
    grown = [n * math.exp(dt * (r - mean)) for n, r in zip(freqs, rel)]
    scale = total / math.fsum(grown)
    new = [g * scale for g in grown]
    return state.with_frequencies(new, state.time + dt)


def fit_piecewise_breakpoint(series: CapabilitySeries, continuous: bool = True) -> BreakpointFit:
    """Least-squares fit of two line segments with one break.

    Every split leaves at least three samples on each side. With
    ``continuous=True`` the segments meet at a kink that may fall anywhere
    between the two samples around the split: the optimum is either the
    crossing of the two independent line fits, when it lies in that gap, or
    a kink at one of the two samples. With ``continuous=False`` the two lines
    are independent and the break is reported at the last pre-break sample.

    Near-ties (within :func:`breakpoint_tie_tolerance`) go to the earliest split.
    """
    t, y = series.t, series.values
    n = t.size
    k = MIN_SEGMENT_POINTS
    if n < 2 * k:
        raise ValidationError(f"breakpoint fit needs at least {2 * k} points, got {n}")
    fits = [_split_fit(t, y, j, continuous) for j in range(k - 1, n - k)]
    sse = np.array([f[0] for f in fits])
    best = int(np.flatnonzero(sse <= sse.min() + breakpoint_tie_tolerance(y))[0])
    total, t_star, s1, s2 = fits[best]
    return BreakpointFit(
        t_star=float(t_star),
        slope_pre=float(s1),
        slope_post=float(s2),
        sse=float(total),
        index=int(np.argmin(np.abs(t - t_star))),
        continuous=continuous,
        candidate_sse=sse,
    )


def _split_fit(t, y, j, continuous):
    s1, a1, r1 = _line_fit(t[: j + 1], y[: j + 1])
    s2, a2, r2 = _line_fit(t[j + 1 :], y[j + 1 :])
    if not continuous:
        return r1 + r2, t[j], s1, s2
    if s1 != s2:
        cross = (a2 - a1) / (s1 - s2)
        if t[j] <= cross <= t[j + 1]:
            return r1 + r2, cross, s1, s2
    return min((hinge_fit(t, y, tau) for tau in (t[j], t[j + 1])), key=lambda f: f[0])


def hinge_fit(t, y, tau):
    """Continuous two-slope fit with the kink fixed at ``tau``.

    Returns ``(sse, tau, slope_pre, slope_post)``.
    """
    t = np.asarray(t, dtype=float)
    x = t - tau
    design = np.column_stack([np.ones_like(t), x, np.maximum(x, 0.0)])
    coef, *_ = np.linalg.lstsq(design, np.asarray(y, dtype=float), rcond=None)
    resid = y - design @ coef
    return float(resid @ resid), float(tau), float(coef[1]), float(coef[1] + coef[2])


def breakpoint_tie_tolerance(values) -> float:
    y = np.asarray(values, dtype=float)
    return 1e-12 * max(float(np.sum((y - y.mean()) ** 2)), 1.0)


def _line_fit(t, y):
    """Slope, intercept and SSE of an ordinary least-squares line."""
    t_mean, y_mean = t.mean(), y.mean()
    tc = t - t_mean
    yc = y - y_mean
    slope = float(np.dot(tc, yc) / np.dot(tc, tc))
    resid = yc - slope * tc
    return slope, float(y_mean - slope * t_mean), float(np.dot(resid, resid))


def synthetic_capability_series(
    start: float = 2022.0,
    end: float = 2026.35,
    break_t: float = 2024.27,
    slope_pre: float = 8.3,
    slope_post: float = 15.5,
    level: float = 120.0,
    noise: float = 0.0,
    rng: np.random.Generator | None = None,
    per_year: int = 12,
) -> CapabilitySeries:
    """Regular samples of a continuous two-slope trend meeting at ``break_t``."""
    count = int(round((end - start) * per_year)) + 1
    t = start + np.arange(count) / per_year
    y = level + np.where(t <= break_t, slope_pre, slope_post) * (t - break_t)
    if noise:
        if rng is None:
            raise ValidationError("noise requires a random generator")
        y = y + rng.normal(0.0, noise, size=t.size)
    return CapabilitySeries(t, y)


def simulate(
    initial: EcosystemState,
    envs: Mapping[str, Environment],
    steps: int,
    dt: float = 1.0,
    eta_table: Mapping[str, float] | None = None,
    shocks: Sequence = (),
    noise: float = 0.0,
    rng: np.random.Generator | None = None,
) -> Trajectory:
    """Run the replicator for ``steps`` steps.

    ``shocks`` holds ``(step, apply)`` pairs; ``apply(envs)`` returns the
    updated registry and is called before the transition out of ``step``.
    ``noise`` adds log-normal jitter to the frequencies after each step.
    """
    if int(steps) != steps or steps < 0:
        raise ValidationError(f"steps must be a non-negative integer, got {steps!r}")
    if noise and rng is None:
        raise ValidationError("noise requires a random generator")
    envs = dict(envs)
    by_step: dict[int, list] = {}
    for step, apply in shocks:
        by_step.setdefault(int(step), []).append(apply)
    states = [initial]
    state = initial
    for k in range(int(steps)):
        for apply in by_step.get(k, ()):
            envs = apply(envs)
        state = step_replicator(state, envs, eta_table, dt)
        if noise:
            jitter = np.exp(noise * rng.standard_normal(len(state.entries)))
            freqs = state.frequencies * jitter
            freqs *= math.fsum(state.frequencies) / math.fsum(freqs)
            state = state.with_frequencies(freqs, state.time)
        states.append(state)
    return Trajectory(tuple(states), dt)
