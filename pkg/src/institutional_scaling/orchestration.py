"""Multi-agent orchestration correction and the scaling-inversion search."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DomainError, ThresholdNotReachedError, ValidationError
from .fitness_core import ScalingParams


@dataclass(frozen=True)
class CommunicationGraph:
    """Directed graph of ``k_agents`` agents and their effective edges."""

    k_agents: int
    effective_edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        if int(self.k_agents) != self.k_agents or self.k_agents < 1:
            raise ValidationError(f"k_agents must be an integer >= 1, got {self.k_agents!r}")
        edges = frozenset((int(i), int(j)) for i, j in self.effective_edges)
        object.__setattr__(self, "effective_edges", edges)
        for i, j in edges:
            if i == j:
                raise ValidationError(f"self-loop on agent {i}")
            if not (0 <= i < self.k_agents and 0 <= j < self.k_agents):
                raise ValidationError(
                    f"edge ({i}, {j}) references an agent outside 0..{self.k_agents - 1}"
                )

    @classmethod
    def complete(cls, k: int) -> "CommunicationGraph":
        return cls(k, frozenset(itertools.permutations(range(k), 2)))

    def relabel(self, mapping: Sequence[int]) -> "CommunicationGraph":
        return CommunicationGraph(
            self.k_agents, frozenset((mapping[i], mapping[j]) for i, j in self.effective_edges)
        )


@dataclass(frozen=True)
class AgentMember:
    scale: float
    role: str = ""


@dataclass(frozen=True)
class AgentSystem:
    members: tuple[AgentMember, ...]
    graph: CommunicationGraph
    eta: float = 0.0

    def __post_init__(self):
        members = tuple(
            m if isinstance(m, AgentMember) else AgentMember(*m) for m in self.members
        )
        object.__setattr__(self, "members", members)
        if len(members) != self.graph.k_agents:
            raise ValidationError(
                f"{len(members)} members but graph has {self.graph.k_agents} agents"
            )
        for i, m in enumerate(members):
            if not m.scale > 0:
                raise ValidationError(f"members[{i}].scale must be > 0, got {m.scale!r}")
        if not (self.eta >= 0 and math.isfinite(self.eta)):
            raise ValidationError(f"eta must be >= 0, got {self.eta!r}")

    @property
    def total_scale(self) -> float:
        return math.fsum(m.scale for m in self.members)

    @property
    def k(self) -> int:
        return self.graph.k_agents


def communication_density(g: CommunicationGraph) -> float:
    """Fraction of ordered agent pairs that exchange information.

    A single agent has no pairs; its density is reported as 0.
    """
    k = g.k_agents
    if k < 2:
        return 0.0
    return len(g.effective_edges) / (k * (k - 1))


def symbiotic_multiplier(eta: float, rho: float, k: int) -> float:
    return 1.0 + eta * rho / math.sqrt(k)


def agent_fitness(base_fitness: float, system: AgentSystem) -> float:
    """Base fitness times the orchestration multiplier.

    The result is deliberately left unclamped and may exceed 1.
    """
    if not (0.0 <= base_fitness <= 1.0):
        raise DomainError(f"base fitness must lie in [0, 1], got {base_fitness!r}")
    rho = communication_density(system.graph)
    return base_fitness * symbiotic_multiplier(system.eta, rho, system.k)


def marginal_capability(N: float, params: ScalingParams, w_C: float = 1.0) -> float:
    return w_C * params.alpha * math.exp(
        params.alpha * math.log(params.N_c) - (params.alpha + 1) * math.log(N)
    )


def convergence_threshold(
    params: ScalingParams, w_C: float, mu: float, bracket=(1.0, 1e6), tol: float = 1e-12
) -> float:
    """Smallest scale on ``bracket`` whose weighted marginal capability is below ``mu``."""
    low, high = map(float, bracket)
    if not (0 < low < high):
        raise ValidationError(f"invalid bracket {bracket!r}")
    if mu < 0 or not math.isfinite(mu):
        raise ValidationError(f"mu must be finite and >= 0, got {mu!r}")
    if marginal_capability(low, params, w_C) < mu:
        return low
    if not marginal_capability(high, params, w_C) < mu:
        raise ThresholdNotReachedError(
            f"marginal capability stays >= mu={mu!r} on [{low!r}, {high!r}]"
        )
    lo, hi = low, high
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if marginal_capability(mid, params, w_C) < mu:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class InversionResult:
    system: AgentSystem | None
    agent_fitness: float | None
    frontier_fitness: float
    verdict: bool
    hypothesis_met: bool
    subsets_evaluated: int


def enumerate_subsets(
    pool: Sequence[float], max_k: int, frontier_scale: float, min_k: int = 1
) -> Iterable[tuple[int, ...]]:
    """Index tuples of pool subsets with ``min_k`` to ``max_k`` members and
    total scale strictly below ``frontier_scale``."""
    for k in range(min_k, min(max_k, len(pool)) + 1):
        for combo in itertools.combinations(range(len(pool)), k):
            if math.fsum(pool[i] for i in combo) < frontier_scale:
                yield combo


def inversion_search(
    env,
    frontier_scale: float,
    candidate_pool: Sequence[float],
    max_k: int,
    eta: float,
    b: int = 16,
    min_k: int = 1,
) -> InversionResult:
    """Best sub-frontier orchestrated system versus a frontier generalist.

    Each subset is scored at its aggregate scale with a complete
    communication graph. Ties keep the first subset in enumeration order
    (fewer members, then earlier pool positions). ``min_k`` restricts the
    search to systems of at least that many members.
    """
    from .scaling_law import institutional_fitness

    pool = [float(x) for x in candidate_pool]
    if not pool:
        raise ValidationError("candidate pool is empty")
    if any(not x > 0 for x in pool):
        raise ValidationError("candidate scales must be > 0")
    if int(max_k) != max_k or max_k < 1:
        raise ValidationError(f"max_k must be an integer >= 1, got {max_k!r}")
    if int(min_k) != min_k or not 1 <= min_k <= max_k:
        raise ValidationError(f"min_k must be an integer in [1, max_k], got {min_k!r}")
    w = env.weights
    hypothesis = w.w_T + w.w_S > 0.5
    frontier = institutional_fitness(frontier_scale, b, env)
    best = None
    count = 0
    for combo in enumerate_subsets(pool, max_k, frontier_scale, min_k):
        count += 1
        k = len(combo)
        system = AgentSystem(
            tuple(AgentMember(pool[i], f"member{i}") for i in combo),
            CommunicationGraph.complete(k),
            eta,
        )
        base = institutional_fitness(system.total_scale, b, env)
        score = agent_fitness(base, system)
        if best is None or score > best[1]:
            best = (system, score)
    if best is None:
        return InversionResult(None, None, frontier, False, hypothesis, 0)
    return InversionResult(
        best[0], best[1], frontier, best[1] > frontier, hypothesis, count
    )
