"""Environment-dependent fitness of AI model configurations.

Evaluates the weighted capability, trust, affordability and sovereignty
indices, locates optimal model scales, scores orchestrated multi-model
systems, simulates deployment ecosystems under replicator dynamics and
detects punctuation events in entropy and capability series.
"""

__version__ = "0.1.0"

from .alignment import (
    CategoricalPolicy,
    GrpoGroup,
    PreferencePair,
    dpo_loss,
    grpo_loss,
    kl_divergence,
    normalize_group_advantages,
    rlhf_objective,
)
from .calibration import load_figure2, load_figure3
from .ecosystem import (
    CapabilitySeries,
    EcosystemState,
    Entry,
    ModelConfig,
    Trajectory,
    detect_punctuations,
    entropy_rate,
    fit_piecewise_breakpoint,
    shannon_entropy,
    simulate,
    step_replicator,
    synthetic_capability_series,
)
from .errors import (
    DomainError,
    FormatError,
    InstitutionalError,
    NoDivergenceError,
    NoInteriorOptimumError,
    NumericalError,
    ValidationError,
)
from .fitness_core import (
    EnergyModel,
    FitnessVector,
    ScalingParams,
    WeightVector,
    affordability_index,
    capability_index,
    quantization_energy,
    scalar_fitness,
    trust_index,
)
from .harness import run_scenario, sweep_fitness_curve
from .io import load_environment, load_scenario, save_environment
from .orchestration import (
    AgentMember,
    AgentSystem,
    CommunicationGraph,
    agent_fitness,
    communication_density,
    convergence_threshold,
    inversion_search,
)
from .scaling_law import (
    Environment,
    divergence_zone_start,
    find_optimal_scale,
    fitness_gradient,
    institutional_fitness,
)
from .speciation import ConfigGrid, IncidentProfile, aggregate_trust, empirical_kappa, optimal_config
