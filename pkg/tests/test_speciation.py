import inspect
import math
from dataclasses import replace

import pytest
from conftest import make_env
from hypothesis import given
from hypothesis import strategies as st

from institutional_scaling.errors import ValidationError
from institutional_scaling.scaling_law import find_optimal_scale
from institutional_scaling.speciation import (
    CoarseGridWarning,
    ConfigGrid,
    IncidentProfile,
    aggregate_trust,
    empirical_kappa,
    optimal_config,
    weight_distance,
)

FINE_GRID = ConfigGrid(tuple(float(n) for n in range(5, 401, 5)))


def test_grid_validation():
    with pytest.raises(ValidationError):
        ConfigGrid(())
    with pytest.raises(ValidationError):
        ConfigGrid((2.0, 1.0))
    with pytest.raises(ValidationError):
        ConfigGrid((-1.0, 1.0))


def test_single_cell_grid(figure2_envs):
    opt = optimal_config(figure2_envs["eps1"], ConfigGrid((33.0,), (8,)))
    assert (opt.scale, opt.precision) == (33.0, 8)


def test_constant_fitness_picks_smallest_scale_and_widest_precision():
    env = make_env((0, 0, 0, 1), sigma=0.4)
    opt = optimal_config(env, ConfigGrid((3.0, 30.0, 300.0), (4, 16, 8)))
    assert (opt.scale, opt.precision, opt.fitness) == (3.0, 16, 0.4)


def test_eu_grid_optimum_nearest_45(figure2_envs):
    grid = ConfigGrid(tuple(float(n) for n in range(10, 401)))
    opt = optimal_config(figure2_envs["eps2"], grid)
    n_star = find_optimal_scale(figure2_envs["eps2"]).n_star
    assert abs(opt.scale - n_star) <= 1.0
    assert opt.scale == 45.0


@pytest.mark.parametrize("key", ["eps1", "eps2", "eps3"])
def test_grid_agrees_with_continuous_optimum(figure2_envs, key):
    env = figure2_envs[key]
    opt = optimal_config(env, FINE_GRID)
    n_star = find_optimal_scale(env).n_star
    assert abs(opt.scale - n_star) <= 5.0


def test_kappa_rejects_identical_weights(figure2_envs):
    env = figure2_envs["eps2"]
    twin = replace(env, name="eu_twin")
    with pytest.raises(ValidationError, match="eu_twin"):
        empirical_kappa([(env, twin)], FINE_GRID)


def test_kappa_startup_vs_sovereign(figure2_envs):
    e1, e3 = figure2_envs["eps1"], figure2_envs["eps3"]
    kappa = empirical_kappa([(e1, e3)], FINE_GRID)
    n1 = optimal_config(e1, FINE_GRID).scale
    n3 = optimal_config(e3, FINE_GRID).scale
    dw = math.sqrt(sum((a - b) ** 2 for a, b in zip(e1.weights.as_tuple(), e3.weights.as_tuple())))
    assert kappa == pytest.approx(abs(math.log(n1) - math.log(n3)) / dw, rel=1e-14)
    assert kappa > 0


def test_kappa_positive_on_figure2_pack(figure2_envs):
    e = figure2_envs
    pairs = [(e["eps1"], e["eps2"]), (e["eps1"], e["eps3"]), (e["eps2"], e["eps3"])]
    assert empirical_kappa(pairs, FINE_GRID) > 0


def test_coarse_grid_warns_with_zero_kappa(figure2_envs):
    grid = ConfigGrid((1000.0,))
    with pytest.warns(CoarseGridWarning):
        kappa = empirical_kappa([(figure2_envs["eps1"], figure2_envs["eps3"])], grid)
    assert kappa == 0.0


def test_weight_distance_euclidean(figure2_envs):
    d = weight_distance(figure2_envs["eps1"], figure2_envs["eps2"])
    assert d == pytest.approx(math.sqrt(0.35**2 + 0.25**2 + 0.05**2 + 0.15**2), rel=1e-14)


# -- trust aggregation -------------------------------------------------------------


def test_empty_profile():
    assert aggregate_trust(IncidentProfile(())) == (1.0, 1.0)


def test_zero_rates():
    assert aggregate_trust(IncidentProfile((0.0, 0.0, 0.0))) == (1.0, 1.0)


def test_ten_contexts():
    exact, approx = aggregate_trust(IncidentProfile((0.01,) * 10))
    assert exact == pytest.approx(0.99**10, rel=1e-15)
    assert approx == pytest.approx(math.exp(-0.1), rel=1e-15)
    assert round(exact, 6) == 0.904382
    assert round(approx, 6) == 0.904837


def test_rate_bounds():
    with pytest.raises(ValidationError):
        IncidentProfile((1.0,))
    with pytest.raises(ValidationError):
        IncidentProfile((-0.1,))


@given(st.lists(st.floats(0.0, 0.99), max_size=30))
def test_exact_never_exceeds_approx(rates):
    exact, approx = aggregate_trust(IncidentProfile(tuple(rates)))
    assert exact <= approx


@given(st.lists(st.floats(0.0, 0.5), max_size=20), st.floats(1e-6, 0.5))
def test_appending_context_strictly_lowers_exact(rates, extra):
    before, _ = aggregate_trust(IncidentProfile(tuple(rates)))
    after, _ = aggregate_trust(IncidentProfile(tuple(rates) + (extra,)))
    assert after < before or before == 0.0


def test_small_rate_relative_gap(rng):
    for _ in range(1000):
        k = int(rng.integers(1, 11))
        rates = rng.uniform(0.0, 0.01, size=k)
        exact, approx = aggregate_trust(IncidentProfile(tuple(rates)))
        assert abs(exact - approx) / approx < 1e-3


def test_trust_aggregation_shares_no_inputs_with_affordability():
    # the only input is the incident profile, so affordability shocks cannot reach it
    assert list(inspect.signature(aggregate_trust).parameters) == ["profile"]
    profile = IncidentProfile((0.01, 0.02, 0.005))
    assert aggregate_trust(profile) == aggregate_trust(IncidentProfile(profile.rates))
