"""JSON (de)serialization of environments, scenarios and fixtures.

Environment schema::

    {"name": str,
     "weights": {"w_C", "w_T", "w_A", "w_S"},
     "sigma": float,
     "scaling": {"N_c", "alpha", "T_0", "beta", "gamma", "N_r", "delta"},
     "energy": {"b_ref", "d", "gamma_grid": {"16": 1.0, ...}}}

Validation failures name the offending field path.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any

from .ecosystem import EcosystemState, Entry, ModelConfig
from .errors import FormatError, ValidationError
from .fitness_core import EnergyModel, ScalingParams, WeightVector
from .scaling_law import Environment

WEIGHT_KEYS = ("w_C", "w_T", "w_A", "w_S")
SCALING_KEYS = ("N_c", "alpha", "T_0", "beta", "gamma", "N_r", "delta")


def default_fixture_dir() -> Path:
    return Path(str(resources.files("institutional_scaling") / "fixtures"))


def read_json(path) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: JSON parse error at line {exc.lineno}: {exc.msg}") from None


def write_json(path, data) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(data, indent=2, sort_keys=False) + "\n", encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot write {path}: {exc.strerror or exc}") from None


def _number(obj, key, where):
    if not isinstance(obj, dict):
        raise ValidationError(f"{where}: expected an object")
    if key not in obj:
        raise ValidationError(f"{where}.{key}: missing")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ValidationError(f"{where}.{key}: expected a finite number, got {v!r}")
    return float(v)


def _reraise(where, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def environment_from_dict(data: dict, where: str = "environment") -> Environment:
    if not isinstance(data, dict):
        raise ValidationError(f"{where}: expected an object")
    name = data.get("name")
    if not isinstance(name, str) or not name:
        raise ValidationError(f"{where}.name: expected a non-empty string")
    w = data.get("weights")
    weights = _reraise(
        f"{where}.weights",
        WeightVector,
        *(_number(w, k, f"{where}.weights") for k in WEIGHT_KEYS),
    )
    sigma = _number(data, "sigma", where)
    if not (0.0 <= sigma <= 1.0):
        raise ValidationError(f"{where}.sigma: must lie in [0, 1], got {sigma!r}")
    s = data.get("scaling")
    scaling = _reraise(
        f"{where}.scaling",
        ScalingParams,
        **{k: _number(s, k, f"{where}.scaling") for k in SCALING_KEYS},
    )
    e = data.get("energy", {})
    grid = e.get("gamma_grid") if isinstance(e, dict) else None
    if not isinstance(grid, dict) or not grid:
        raise ValidationError(f"{where}.energy.gamma_grid: expected a non-empty object")
    table = {}
    for k in grid:
        try:
            bits = int(k)
        except ValueError:
            raise ValidationError(f"{where}.energy.gamma_grid: key {k!r} is not an integer") from None
        table[bits] = _number(grid, k, f"{where}.energy.gamma_grid")
    b_ref = _number(e, "b_ref", f"{where}.energy")
    if b_ref != int(b_ref):
        raise ValidationError(f"{where}.energy.b_ref: expected an integer, got {b_ref!r}")
    energy = _reraise(
        f"{where}.energy",
        EnergyModel,
        b_ref=int(b_ref),
        d=_number(e, "d", f"{where}.energy"),
        gamma_grid=table,
    )
    return Environment(name, weights, sigma, scaling, energy)


def environment_to_dict(env: Environment) -> dict:
    return {
        "name": env.name,
        "weights": dict(zip(WEIGHT_KEYS, env.weights.as_tuple())),
        "sigma": env.sovereignty_sigma,
        "scaling": {k: getattr(env.scaling, k) for k in SCALING_KEYS},
        "energy": {
            "b_ref": env.energy.b_ref,
            "d": env.energy.d,
            "gamma_grid": {str(k): v for k, v in sorted(env.energy.gamma_grid.items(), reverse=True)},
        },
    }


def load_environment(path) -> Environment:
    """Read and validate an environment JSON file."""
    path = Path(path)
    return environment_from_dict(read_json(path), where=path.name)


def save_environment(env: Environment, path) -> None:
    write_json(path, environment_to_dict(env))


def resolve(path, fixture_dir=None) -> Path:
    """Interpret a bare file name relative to the fixture directory."""
    p = Path(path)
    if p.exists() or p.is_absolute():
        return p
    base = Path(fixture_dir) if fixture_dir else default_fixture_dir()
    return base / p


# -- scenarios ---------------------------------------------------------------


@dataclass(frozen=True)
class Shock:
    step: int
    path: str
    value: float


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    environments: dict[str, Environment]
    initial_state: EcosystemState
    steps: int
    dt: float = 1.0
    shocks: tuple[Shock, ...] = ()
    lambda_crit: float | None = None
    seed: int = 0
    eta_table: dict[str, float] = field(default_factory=dict)
    window: int = 1
    noise: float = 0.0

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 0:
            raise ValidationError(f"steps: must be a non-negative integer, got {self.steps!r}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValidationError(f"dt: must be > 0, got {self.dt!r}")
        if self.lambda_crit is not None and not self.lambda_crit > 0:
            raise ValidationError(f"lambda_crit: must be > 0, got {self.lambda_crit!r}")
        if self.noise < 0:
            raise ValidationError(f"noise: must be >= 0, got {self.noise!r}")
        for i, e in enumerate(self.initial_state.entries):
            if e.env_name not in self.environments:
                raise ValidationError(
                    f"initial_state.entries[{i}].env_name: unknown environment {e.env_name!r}"
                )
            env = self.environments[e.env_name]
            if e.config.precision_b not in env.energy.gamma_grid:
                raise ValidationError(
                    f"initial_state.entries[{i}].config.precision_b: "
                    f"{e.config.precision_b} not in energy table of {e.env_name!r}"
                )
        for name in self.eta_table:
            if name not in self.environments:
                raise ValidationError(f"eta_table.{name}: unknown environment")
        # dry-run every shock so bad paths fail before any step is taken
        envs = dict(self.environments)
        for i, shock in enumerate(sorted(self.shocks, key=lambda s: s.step)):
            if not (0 <= shock.step < self.steps):
                raise ValidationError(
                    f"shocks[{i}].step: {shock.step} outside [0, {self.steps})"
                )
            envs = _reraise(f"shocks[{i}]", apply_shock, envs, shock.path, shock.value)


_SECTIONS = {"weights": WEIGHT_KEYS, "scaling": SCALING_KEYS}


def apply_shock(envs: dict[str, Environment], path: str, value: float) -> dict[str, Environment]:
    """Return a registry copy with one parameter replaced.

    Paths look like ``<env>.sigma``, ``<env>.scaling.N_r``,
    ``<env>.weights.w_A``, ``<env>.energy.d`` or
    ``<env>.energy.gamma_grid.<bits>``.
    """
    parts = path.split(".")
    if not parts or parts[0] not in envs:
        raise ValidationError(f"path {path!r}: unknown environment {parts[0]!r}")
    data = environment_to_dict(envs[parts[0]])
    node = data
    for key in parts[1:-1]:
        if not isinstance(node, dict) or key not in node:
            raise ValidationError(f"path {path!r}: no field {key!r}")
        node = node[key]
    leaf = parts[-1]
    if len(parts) < 2 or not isinstance(node, dict) or leaf not in node or isinstance(node[leaf], dict):
        raise ValidationError(f"path {path!r}: does not name a numeric parameter")
    if leaf == "name":
        raise ValidationError(f"path {path!r}: the name is not a parameter")
    node[leaf] = value
    out = dict(envs)
    out[parts[0]] = environment_from_dict(data, where=parts[0])
    return out


def state_from_dict(data: dict, where="initial_state") -> EcosystemState:
    if not isinstance(data, dict) or not isinstance(data.get("entries"), list):
        raise ValidationError(f"{where}.entries: expected a list")
    entries = []
    for i, item in enumerate(data["entries"]):
        w = f"{where}.entries[{i}]"
        cfg = item.get("config") if isinstance(item, dict) else None
        if not isinstance(cfg, dict):
            raise ValidationError(f"{w}.config: expected an object")
        config = _reraise(
            f"{w}.config",
            ModelConfig,
            _number(cfg, "scale_n", f"{w}.config"),
            int(_number(cfg, "precision_b", f"{w}.config")),
            int(cfg.get("agentic_depth_k", 1)),
        )
        env_name = item.get("env_name")
        if not isinstance(env_name, str):
            raise ValidationError(f"{w}.env_name: expected a string")
        entries.append(Entry(config, env_name, _number(item, "frequency", w)))
    time = float(data.get("time", 0.0))
    return _reraise(where, EcosystemState, tuple(entries), time)


def state_to_dict(state: EcosystemState) -> dict:
    return {
        "time": state.time,
        "entries": [
            {
                "config": {
                    "scale_n": e.config.scale_n,
                    "precision_b": e.config.precision_b,
                    "agentic_depth_k": e.config.agentic_depth_k,
                },
                "env_name": e.env_name,
                "frequency": e.frequency,
            }
            for e in state.entries
        ],
    }


def scenario_from_dict(data: dict, fixture_dir=None, where="scenario") -> ScenarioSpec:
    if not isinstance(data, dict):
        raise ValidationError(f"{where}: expected an object")
    envs = {}
    for i, item in enumerate(data.get("environments", [])):
        if isinstance(item, str):
            env = load_environment(resolve(item, fixture_dir))
        else:
            env = environment_from_dict(item, where=f"{where}.environments[{i}]")
        if env.name in envs:
            raise ValidationError(f"{where}.environments[{i}]: duplicate name {env.name!r}")
        envs[env.name] = env
    if not envs:
        raise ValidationError(f"{where}.environments: at least one environment required")
    shocks = []
    for i, s in enumerate(data.get("shocks", [])):
        if not isinstance(s, dict) or not isinstance(s.get("path"), str):
            raise ValidationError(f"{where}.shocks[{i}]: expected {{step, path, value}}")
        shocks.append(Shock(int(_number(s, "step", f"{where}.shocks[{i}]")), s["path"],
                            _number(s, "value", f"{where}.shocks[{i}]")))
    lam = data.get("lambda_crit")
    name = data.get("name")
    if not isinstance(name, str) or not name:
        raise ValidationError(f"{where}.name: expected a non-empty string")
    return ScenarioSpec(
        name=name,
        environments=envs,
        initial_state=state_from_dict(data.get("initial_state"), f"{where}.initial_state"),
        steps=int(_number(data, "steps", where)),
        dt=float(data.get("dt", 1.0)),
        shocks=tuple(shocks),
        lambda_crit=None if lam is None else float(lam),
        seed=int(data.get("seed", 0)),
        eta_table={k: float(v) for k, v in data.get("eta_table", {}).items()},
        window=int(data.get("window", 1)),
        noise=float(data.get("noise", 0.0)),
    )


def scenario_to_dict(spec: ScenarioSpec) -> dict:
    return {
        "name": spec.name,
        "environments": [environment_to_dict(e) for e in spec.environments.values()],
        "initial_state": state_to_dict(spec.initial_state),
        "steps": spec.steps,
        "dt": spec.dt,
        "shocks": [{"step": s.step, "path": s.path, "value": s.value} for s in spec.shocks],
        "lambda_crit": spec.lambda_crit,
        "seed": spec.seed,
        "eta_table": dict(spec.eta_table),
        "window": spec.window,
        "noise": spec.noise,
    }


def load_scenario(path, fixture_dir=None) -> ScenarioSpec:
    path = Path(path)
    return scenario_from_dict(read_json(path), fixture_dir or path.parent, where=path.name)


def with_lambda(spec: ScenarioSpec, lambda_crit: float | None) -> ScenarioSpec:
    return replace(spec, lambda_crit=lambda_crit)
