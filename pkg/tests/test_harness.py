import csv
import io
import json
import math
from dataclasses import replace

import pytest

from institutional_scaling.errors import ValidationError
from institutional_scaling.harness import (
    SWEEP_HEADER,
    run_scenario,
    sweep_csv,
    sweep_fitness_curve,
    to_csv,
)
from institutional_scaling.io import load_scenario
from institutional_scaling.scaling_law import find_optimal_scale


def parse(text):
    return list(csv.reader(io.StringIO(text)))


def test_two_sample_sweep(figure2_envs):
    rows = sweep_fitness_curve(figure2_envs["eps1"], (1.0, 400.0, 2))
    assert [r[0] for r in rows] == [1.0, 400.0]


def test_sweep_rejects_single_sample(figure2_envs):
    with pytest.raises(ValidationError):
        sweep_fitness_curve(figure2_envs["eps1"], (1.0, 400.0, 1))


@pytest.mark.parametrize("key, target", [("eps1", 140.0), ("eps2", 45.0), ("eps3", 23.0)])
def test_sweep_peak_near_figure_optimum(figure2_envs, key, target):
    rows = sweep_fitness_curve(figure2_envs[key], (1.0, 400.0, 200))
    n_best = max(rows, key=lambda r: r[1])[0]
    assert abs(n_best - target) <= 0.10 * target


def test_monotone_fixture_sweep_non_decreasing(capability_env):
    rows = parse(sweep_csv(sweep_fitness_curve(capability_env, (1.0, 400.0, 200))))
    fitness = [float(r[1]) for r in rows[1:]]
    assert all(b >= a for a, b in zip(fitness, fitness[1:]))


def test_sweep_gradient_sentinel_on_plateau(figure2_envs):
    env = replace(figure2_envs["eps1"], scaling=replace(figure2_envs["eps1"].scaling, N_c=5.0))
    rows = sweep_fitness_curve(env, (1.0, 10.0, 10))
    assert math.isnan(rows[0][2])
    assert not math.isnan(rows[-1][2])
    text = sweep_csv(rows)
    assert ",nan\n" in text


def test_csv_format(figure2_envs):
    text = sweep_csv(sweep_fitness_curve(figure2_envs["eps2"], (1.0, 400.0, 7)))
    lines = text.split("\n")
    assert lines[0] == ",".join(SWEEP_HEADER)
    assert lines[-1] == ""
    assert "\r" not in text
    rows = parse(text)[1:]
    original = sweep_fitness_curve(figure2_envs["eps2"], (1.0, 400.0, 7))
    # shortest round-trip formatting reproduces every float exactly
    assert [[float(x) for x in r] for r in rows] == [list(r) for r in original]


def test_csv_quotes_fields_with_commas():
    assert to_csv(("a", "b"), [("x,y", 1)]) == 'a,b\n"x,y",1\n'


# -- scenarios ----------------------------------------------------------------------


def scenario(fixture_dir, name):
    return load_scenario(fixture_dir / f"{name}.json")


def test_zero_steps(fixture_dir):
    spec = replace(scenario(fixture_dir, "stationary"), steps=0, shocks=())
    report = run_scenario(spec)
    assert len(report.trajectory.states) == 1
    assert report.events == ()


def test_deepseek_single_event_at_shock(fixture_dir):
    spec = scenario(fixture_dir, "deepseek_moment")
    report = run_scenario(spec)
    assert [e.index for e in report.events] == [spec.shocks[0].step]
    assert report.lambda_source == "adaptive"


def test_deepseek_strict_override(fixture_dir):
    spec = scenario(fixture_dir, "deepseek_moment")
    adaptive = run_scenario(spec).lambda_crit
    report = run_scenario(spec, lambda_crit=10 * adaptive)
    assert [e.index for e in report.events] == [spec.shocks[0].step]
    assert report.lambda_source == "override"


def test_stationary_has_no_events(fixture_dir):
    report = run_scenario(scenario(fixture_dir, "stationary"))
    assert report.events == ()
    assert all(r == 0.0 for r in report.rates.rates)


def test_two_shocks_two_events_in_order(fixture_dir):
    spec = scenario(fixture_dir, "two_shocks")
    events = run_scenario(spec).events
    assert [e.index for e in events] == sorted({s.step for s in spec.shocks})
    assert events[0].time < events[1].time


def test_summary_contents(fixture_dir):
    spec = scenario(fixture_dir, "deepseek_moment")
    summary = json.loads(run_scenario(spec).summary_json())
    assert summary["rng"] == "numpy.random.PCG64"
    assert summary["seed"] == spec.seed
    assert [e["step"] for e in summary["events"]] == [20]


def test_seed_override_recorded(fixture_dir):
    spec = scenario(fixture_dir, "stationary")
    assert run_scenario(spec, seed=99).summary()["seed"] == 99


def test_noisy_run_is_reproducible(fixture_dir):
    spec = replace(scenario(fixture_dir, "deepseek_moment"), noise=0.01)
    a, b = run_scenario(spec), run_scenario(spec)
    assert a.trajectory_csv() == b.trajectory_csv()
    assert a.entropy_csv() == b.entropy_csv()
    assert run_scenario(spec, seed=1).trajectory_csv() != a.trajectory_csv()


def test_report_files(tmp_path, fixture_dir):
    report = run_scenario(scenario(fixture_dir, "two_shocks"))
    report.write(tmp_path)
    assert sorted(p.name for p in tmp_path.iterdir()) == ["entropy.csv", "summary.json", "trajectory.csv"]
    traj = parse((tmp_path / "trajectory.csv").read_text())
    assert traj[0] == ["step", "time", "entry", "env_name", "scale_n", "precision_b",
                       "agentic_depth_k", "frequency"]
    assert len(traj) == 1 + 61 * 3
    ent = parse((tmp_path / "entropy.csv").read_text())
    assert ent[0] == ["step", "time", "entropy", "rate_time", "entropy_rate"]
    assert ent[-1][3:] == ["nan", "nan"]


def test_optimum_consistent_with_sweep(figure2_envs):
    env = figure2_envs["eps2"]
    rows = sweep_fitness_curve(env, (1.0, 400.0, 400))
    best = max(rows, key=lambda r: r[1])
    assert best[1] <= find_optimal_scale(env).fitness_at_star
