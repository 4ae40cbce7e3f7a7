"""Loss evaluators for RLHF, DPO and GRPO on small categorical policies."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, ValidationError

PROB_SUM_TOL = 1e-9


@dataclass(frozen=True)
class CategoricalPolicy:
    probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if not probs:
            raise ValidationError("policy needs at least one outcome")
        if any(not (p >= 0 and math.isfinite(p)) for p in probs):
            raise ValidationError("probabilities must be finite and >= 0")
        if abs(math.fsum(probs) - 1.0) > PROB_SUM_TOL:
            raise ValidationError(f"probabilities sum to {math.fsum(probs)!r}, not 1")


@dataclass(frozen=True)
class PreferencePair:
    logprob_winner_policy: float
    logprob_winner_ref: float
    logprob_loser_policy: float
    logprob_loser_ref: float

    def __post_init__(self):
        for name, v in vars(self).items():
            if not (math.isfinite(v) and v <= 0):
                raise ValidationError(f"{name} must be a finite log-probability, got {v!r}")

    @property
    def margin(self) -> float:
        return (self.logprob_winner_policy - self.logprob_winner_ref) - (
            self.logprob_loser_policy - self.logprob_loser_ref
        )


@dataclass(frozen=True)
class GrpoGroup:
    ratios: tuple[float, ...]
    advantages: tuple[float, ...]
    clip_eps: float = 0.2

    def __post_init__(self):
        r = tuple(float(x) for x in self.ratios)
        a = tuple(float(x) for x in self.advantages)
        object.__setattr__(self, "ratios", r)
        object.__setattr__(self, "advantages", a)
        if not r or len(r) != len(a):
            raise ValidationError("group needs matching, non-empty ratios and advantages")
        if any(not (x > 0 and math.isfinite(x)) for x in r):
            raise ValidationError("probability ratios must be positive and finite")
        if not (0 < self.clip_eps < 1):
            raise ValidationError(f"clip_eps must lie in (0, 1), got {self.clip_eps!r}")


def kl_divergence(p: CategoricalPolicy, q: CategoricalPolicy) -> float:
    if len(p.probs) != len(q.probs):
        raise ValidationError("policies are over different outcome sets")
    terms = []
    for i, (pi, qi) in enumerate(zip(p.probs, q.probs)):
        if pi == 0:
            continue
        if qi == 0:
            raise DomainError(f"q[{i}] = 0 where p[{i}] = {pi}; KL is infinite")
        terms.append(pi * math.log(pi / qi))
    return max(0.0, math.fsum(terms))


def rlhf_objective(
    policy: CategoricalPolicy,
    ref: CategoricalPolicy,
    rewards: Sequence[float],
    beta: float,
) -> float:
    """Expected reward minus ``beta`` times KL to the reference policy."""
    if len(rewards) != len(policy.probs):
        raise ValidationError("one reward per outcome required")
    if beta < 0:
        raise ValidationError(f"beta must be >= 0, got {beta!r}")
    expected = math.fsum(p * r for p, r in zip(policy.probs, rewards))
    if policy.probs == ref.probs:
        return expected
    return expected - beta * kl_divergence(policy, ref)


def softplus(x: float) -> float:
    if x > 30:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


def dpo_loss(pair: PreferencePair, beta: float) -> float:
    """``-log sigmoid(beta * margin)``, evaluated as ``softplus(-beta * margin)``."""
    if not beta > 0:
        raise ValidationError(f"beta must be > 0, got {beta!r}")
    return softplus(-beta * pair.margin)


def grpo_loss(group: GrpoGroup) -> float:
    eps = group.clip_eps
    terms = [
        min(r * a, min(max(r, 1 - eps), 1 + eps) * a)
        for r, a in zip(group.ratios, group.advantages)
    ]
    return -math.fsum(terms) / len(terms)


def normalize_group_advantages(raw_scores: Sequence[float]) -> np.ndarray:
    """Z-score rewards within a group using the population std.

    A zero-variance group yields all-zero advantages.
    """
    s = np.asarray(raw_scores, dtype=float)
    if s.size < 1:
        raise ValidationError("group must contain at least one score")
    centered = s - s.mean()
    std = float(np.sqrt(np.mean(centered**2)))
    if std == 0 or std <= 1e-15 * max(1.0, float(np.max(np.abs(s)))):
        return np.zeros_like(s)
    return centered / std
