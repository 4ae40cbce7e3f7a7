"""Parameter sweeps, scenario execution and tabular output.

CSV output is RFC 4180 with ``\\n`` line endings and shortest round-trip
float formatting (``repr``), so identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .ecosystem import (
    PunctuationEvent,
    RateSeries,
    Trajectory,
    adaptive_lambda,
    detect_punctuations,
    entropy_rate,
    simulate,
)
from .errors import FormatError, RegionError, ValidationError
from .io import ScenarioSpec, apply_shock
from .scaling_law import Environment, fitness_gradient, institutional_fitness

#: Written in the gradient column where the gradient is undefined.
GRADIENT_SENTINEL = "nan"

#: Documented generator algorithm for scenario noise.
RNG_ALGORITHM = "numpy.random.PCG64"


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def to_csv(header, rows) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_text(path, text: str) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise FormatError(f"cannot write {path}: {exc.strerror or exc}") from None


# -- sweeps ------------------------------------------------------------------


def sweep_fitness_curve(env: Environment, n_range=(1.0, 400.0, 200), b: int = 16):
    """Rows of ``(N, F, dF/dN)`` on a log-spaced grid.

    The gradient is ``nan`` where ``N`` sits on a clamp plateau.
    """
    low, high, samples = n_range
    if int(samples) != samples or samples < 2:
        raise ValidationError(f"samples must be an integer >= 2, got {samples!r}")
    if not (0 < low < high):
        raise ValidationError(f"invalid range [{low!r}, {high!r}]")
    grid = np.exp(np.linspace(math.log(low), math.log(high), int(samples)))
    grid[0], grid[-1] = low, high
    rows = []
    for n in grid:
        n = float(n)
        try:
            g = fitness_gradient(n, b, env)
        except RegionError:
            g = math.nan
        rows.append((n, institutional_fitness(n, b, env), g))
    return rows


SWEEP_HEADER = ("N", "fitness", "gradient")


def sweep_csv(rows) -> str:
    return to_csv(SWEEP_HEADER, rows)


# -- scenarios ---------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioReport:
    spec: ScenarioSpec
    trajectory: Trajectory
    rates: RateSeries | None
    events: tuple[PunctuationEvent, ...]
    lambda_crit: float | None
    lambda_source: str

    def trajectory_csv(self) -> str:
        rows = []
        for step, state in enumerate(self.trajectory.states):
            for i, e in enumerate(state.entries):
                c = e.config
                rows.append((step, state.time, i, e.env_name, c.scale_n,
                             c.precision_b, c.agentic_depth_k, e.frequency))
        return to_csv(
            ("step", "time", "entry", "env_name", "scale_n", "precision_b",
             "agentic_depth_k", "frequency"),
            rows,
        )

    def entropy_csv(self) -> str:
        h = self.trajectory.entropies()
        rate_by_index = {}
        if self.rates is not None:
            rate_by_index = {i: (t, r) for i, (t, r) in enumerate(zip(self.rates.times, self.rates.rates))}
        rows = []
        for step, (state, hv) in enumerate(zip(self.trajectory.states, h)):
            t_rate, r = rate_by_index.get(step, (math.nan, math.nan))
            rows.append((step, state.time, hv, t_rate, r))
        return to_csv(("step", "time", "entropy", "rate_time", "entropy_rate"), rows)

    def summary(self) -> dict:
        h = self.trajectory.entropies()
        return {
            "scenario": self.spec.name,
            "steps": self.spec.steps,
            "dt": self.spec.dt,
            "seed": self.spec.seed,
            "rng": RNG_ALGORITHM,
            "window": self.spec.window,
            "lambda_crit": self.lambda_crit,
            "lambda_source": self.lambda_source,
            "shocks": [{"step": s.step, "path": s.path, "value": s.value} for s in self.spec.shocks],
            "events": [
                {"step": ev.index, "time": ev.time, "rate": ev.rate} for ev in self.events
            ],
            "entropy_initial": float(h[0]),
            "entropy_final": float(h[-1]),
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2) + "\n"

    def write(self, out_dir) -> None:
        out = Path(out_dir)
        write_text(out / "trajectory.csv", self.trajectory_csv())
        write_text(out / "entropy.csv", self.entropy_csv())
        write_text(out / "summary.json", self.summary_json())


def run_scenario(spec: ScenarioSpec, lambda_crit: float | None = None, seed: int | None = None) -> ScenarioReport:
    """Simulate the scenario and detect punctuation events.

    ``lambda_crit`` and ``seed`` override the values stored in the spec.
    Event ``step`` indices name the transition ``step -> step + window``, so
    a shock at step ``s`` that acts immediately shows up as an event at ``s``.
    """
    if seed is not None:
        spec = replace(spec, seed=seed)
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    shocks = [
        (s.step, lambda envs, s=s: apply_shock(envs, s.path, s.value))
        for s in spec.shocks
    ]
    traj = simulate(
        spec.initial_state,
        spec.environments,
        spec.steps,
        spec.dt,
        spec.eta_table,
        shocks,
        noise=spec.noise,
        rng=rng,
    )
    if len(traj.states) <= spec.window:
        return ScenarioReport(spec, traj, None, (), None, "none")
    rates = entropy_rate(traj, spec.window)
    lam = lambda_crit if lambda_crit is not None else spec.lambda_crit
    source = "override" if lam is not None else "adaptive"
    if lam is None:
        lam = adaptive_lambda(rates)
    events = tuple(detect_punctuations(rates, lam))
    return ScenarioReport(spec, traj, rates, events, lam, source)
