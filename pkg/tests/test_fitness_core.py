import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from institutional_scaling.errors import DomainError, UnknownBitWidthError, ValidationError
from institutional_scaling.fitness_core import (
    EnergyModel,
    FitnessVector,
    ScalingParams,
    WeightVector,
    affordability_index,
    capability_index,
    phi,
    phi_from_chi,
    quantization_energy,
    scalar_fitness,
    trust_index,
)

unit = st.floats(0.0, 1.0)
scales = st.floats(1e-3, 1e5)


@st.composite
def weight_vectors(draw):
    raw = [draw(st.floats(0.0, 1.0)) for _ in range(4)]
    total = math.fsum(raw)
    if total == 0:
        raw, total = [1.0, 0.0, 0.0, 0.0], 1.0
    w = [x / total for x in raw]
    w[3] = 1.0 - math.fsum(w[:3])
    return WeightVector(*(max(0.0, x) for x in w))


# -- types ---------------------------------------------------------------------


def test_fitness_vector_clamps_on_construction():
    f = FitnessVector(1.5, -0.2, 0.5, 1.0)
    assert f.as_tuple() == (1.0, 0.0, 0.5, 1.0)


def test_weight_vector_rejects_negative_component():
    with pytest.raises(ValidationError, match="w_T"):
        WeightVector(0.6, -0.1, 0.3, 0.2)


def test_weight_sum_error_reports_actual_sum():
    with pytest.raises(ValidationError, match="0.99"):
        WeightVector(0.5, 0.2, 0.2, 0.09)


def test_weight_sum_tolerance_is_absolute_1e9():
    WeightVector(0.25, 0.25, 0.25, 0.25 + 5e-10)
    with pytest.raises(ValidationError):
        WeightVector(0.25, 0.25, 0.25, 0.25 + 5e-9)


@pytest.mark.parametrize("field", ["N_c", "alpha", "gamma", "N_r", "delta"])
def test_scaling_params_require_positive(field):
    with pytest.raises(ValidationError, match=field):
        ScalingParams(**{"N_c": 1.0, field: 0.0})


def test_zero_beta_only_when_allowed():
    with pytest.raises(ValidationError, match="beta"):
        ScalingParams(N_c=1.0, beta=0.0)
    ScalingParams(N_c=1.0, beta=0.0, allow_zero_beta=True)


def test_energy_model_table_must_be_non_increasing():
    with pytest.raises(ValidationError, match="non-increasing"):
        EnergyModel(gamma_grid={16: 2.0, 8: 1.0})


def test_energy_model_table_needs_reference():
    with pytest.raises(ValidationError, match="reference"):
        EnergyModel(b_ref=16, gamma_grid={8: 1.5})


def test_energy_model_multipliers_at_least_one():
    with pytest.raises(ValidationError):
        EnergyModel(gamma_grid={16: 0.5})


# -- scalar fitness ------------------------------------------------------------


def test_scalar_fitness_degenerate_weight():
    f = FitnessVector(0.5, 0.2, 0.9, 0.1)
    assert scalar_fitness(f, WeightVector(1, 0, 0, 0)) == 0.5


def test_scalar_fitness_all_ones():
    assert scalar_fitness(FitnessVector(1, 1, 1, 1), WeightVector(0.1, 0.2, 0.3, 0.4)) == 1.0


def test_scalar_fitness_startup_weights():
    f = FitnessVector(0.8, 0.6, 0.7, 0.9)
    w = WeightVector(0.45, 0.10, 0.30, 0.15)
    # 0.36 + 0.06 + 0.21 + 0.135
    assert scalar_fitness(f, w) == pytest.approx(0.765, abs=1e-15)


@given(weight_vectors(), st.tuples(unit, unit, unit, unit), st.integers(0, 3), st.floats(0, 1))
def test_scalar_fitness_monotone_in_each_component(w, comps, idx, bump):
    f = FitnessVector(*comps)
    raised = list(comps)
    raised[idx] = min(1.0, raised[idx] + bump)
    assert scalar_fitness(FitnessVector(*raised), w) >= scalar_fitness(f, w)


@given(weight_vectors(), st.tuples(unit, unit, unit, unit), st.permutations(range(4)))
def test_scalar_fitness_permutation_invariant(w, comps, perm):
    wt = w.as_tuple()
    w_perm = WeightVector(*(wt[i] for i in perm))
    f_perm = FitnessVector(*(comps[i] for i in perm))
    assert scalar_fitness(f_perm, w_perm) == scalar_fitness(FitnessVector(*comps), w)


# -- capability and trust ----------------------------------------------------------


def test_capability_at_knee_is_zero():
    assert capability_index(3.0, ScalingParams(N_c=3.0)) == 0.0


def test_capability_limit_is_one():
    assert capability_index(math.inf, ScalingParams(N_c=3.0)) == 1.0
    assert capability_index(1e300, ScalingParams(N_c=3.0, alpha=1.0)) == pytest.approx(1.0)


def test_capability_twice_knee_linear_exponent():
    assert capability_index(4.0, ScalingParams(N_c=2.0, alpha=1.0)) == pytest.approx(0.5, abs=1e-15)


def test_capability_domain():
    with pytest.raises(DomainError):
        capability_index(0.0, ScalingParams(N_c=1.0))


@given(scales, scales, st.floats(0.01, 2.0))
def test_capability_monotone(n1, n2, alpha):
    p = ScalingParams(N_c=1.0, alpha=alpha)
    lo, hi = sorted((n1, n2))
    assert capability_index(lo, p) <= capability_index(hi, p)


def test_trust_at_zero_scale():
    assert trust_index(0.0, ScalingParams(N_c=1.0, T_0=0.8)) == 0.8


def test_trust_with_zero_beta_is_constant():
    p = ScalingParams(N_c=1.0, T_0=0.9, beta=0.0, allow_zero_beta=True)
    assert {trust_index(n, p) for n in (0.0, 1.0, 1e3, 1e9)} == {0.9}


def test_trust_exponential_value():
    p = ScalingParams(N_c=1.0, T_0=1.0, beta=0.01, gamma=1.0)
    assert trust_index(100.0, p) == pytest.approx(0.36787944117144233, rel=1e-15)


def test_trust_domain():
    with pytest.raises(DomainError):
        trust_index(-1.0, ScalingParams(N_c=1.0))


@given(st.lists(st.floats(0.0, 200.0), min_size=2, max_size=20, unique=True),
       st.floats(1e-4, 1e-2), st.floats(0.5, 2.0))
def test_trust_strictly_decreasing(grid, beta, gamma):
    p = ScalingParams(N_c=1.0, beta=beta, gamma=gamma)
    values = [trust_index(n, p) for n in sorted(grid)]
    # strict where the exponent difference is representable
    for (a, va), (b, vb) in zip(zip(sorted(grid), values), zip(sorted(grid)[1:], values[1:])):
        if beta * (b**gamma - a**gamma) > 1e-12:
            assert vb < va


# -- energy and affordability --------------------------------------------------------


def test_energy_at_reference():
    m = EnergyModel(d=2.5)
    assert quantization_energy(16, m) == 2.5 * m.gamma_grid[16]


def test_energy_halving_bits_doubles_with_flat_grid():
    m = EnergyModel(gamma_grid={16: 1.0, 8: 1.0, 4: 1.0})
    assert quantization_energy(8, m) == 2 * quantization_energy(16, m)
    assert quantization_energy(4, m) == 2 * quantization_energy(8, m)


def test_energy_hand_value():
    m = EnergyModel(b_ref=16, d=10.0, gamma_grid={16: 1.0, 4: 3.0})
    assert quantization_energy(4, m) == 120.0


def test_energy_unknown_bits_is_lookup_error():
    with pytest.raises(UnknownBitWidthError, match="bit-width 2"):
        quantization_energy(2, EnergyModel())
    with pytest.raises(KeyError):
        quantization_energy(2, EnergyModel())


def test_energy_non_increasing_in_bits():
    m = EnergyModel(gamma_grid={32: 1.0, 16: 1.0, 8: 1.5, 4: 4.0, 2: 9.0})
    bits = sorted(m.gamma_grid)
    energies = [quantization_energy(b, m) for b in bits]
    assert all(a >= b for a, b in zip(energies, energies[1:]))


def test_phi_reference_is_one():
    assert phi(16, EnergyModel()) == 1.0


def test_phi_below_one_when_energy_higher():
    m = EnergyModel()
    assert quantization_energy(4, m) > quantization_energy(16, m)
    assert 0 < phi(4, m) < 1


def test_phi_log_ratio_half():
    assert phi_from_chi(math.e**2 - 1, math.e - 1) == pytest.approx(0.5, abs=1e-15)


def test_phi_rejects_non_positive():
    with pytest.raises(DomainError):
        phi_from_chi(0.0, 1.0)


@given(st.floats(1e-6, 1e6), st.floats(1e-6, 1e6))
def test_phi_in_unit_interval(chi, chi_ref):
    assert 0 < phi_from_chi(chi, chi_ref) <= 1


def test_affordability_at_reference_clamped():
    p = ScalingParams(N_c=1.0, N_r=5.0)
    assert affordability_index(5.0, 16, p, EnergyModel()) == 1.0


def test_affordability_quarter():
    p = ScalingParams(N_c=1.0, N_r=5.0, delta=1.0)
    assert affordability_index(20.0, 16, p, EnergyModel()) == pytest.approx(0.25, abs=1e-15)


def test_affordability_clamps_raw_two():
    p = ScalingParams(N_c=1.0, N_r=5.0, delta=1.0)
    assert affordability_index(2.5, 16, p, EnergyModel()) == 1.0


@given(scales, scales, st.sampled_from([4, 8, 16]))
def test_affordability_non_increasing(n1, n2, b):
    p = ScalingParams(N_c=1.0, N_r=2.0, delta=0.7)
    lo, hi = sorted((n1, n2))
    m = EnergyModel()
    assert affordability_index(lo, b, p, m) >= affordability_index(hi, b, p, m)


@settings(max_examples=200)
@given(scales, st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.floats(0.01, 3.0),
       st.floats(1e-8, 1.0), st.floats(0.2, 3.0), st.sampled_from([4, 8, 16]))
def test_all_indices_in_unit_interval(n, n_c, n_r, alpha, beta, gamma, b):
    p = ScalingParams(N_c=n_c, N_r=n_r, alpha=alpha, beta=beta, gamma=gamma)
    m = EnergyModel()
    for value in (capability_index(n, p), trust_index(n, p), affordability_index(n, b, p, m)):
        assert 0.0 <= value <= 1.0
