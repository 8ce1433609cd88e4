"""Run configuration: YAML schema, validation and defaults.

A config file describes exactly one run::

    scenario:
      family: Cosine        # Cylinder | Cosine | Bump
      r0: 3.0
      epsilon: 0.02
      k: 1
      n: 2
      d: 1.0
      m: 201
    law: AreaPreserving     # AreaPreserving | VolumePreserving | PlainMCF
    stepper:
      scheme: IMEX          # IMEX | IMEXEuler | ExplicitEuler | ExplicitRK2
      dt: auto
      cfl_safety: 0.8
      t_end: 10.0
      max_steps: 200000
      pinch_floor: 1.0e-3
      record_every: 10
    tolerances:
      area_rel: 1.0e-4
      volume_rel: 1.0e-8
      convergence: 1.0e-6
      cylinder: 1.0e-5
    output:
      dir: capflow_out
      csv: true
      snapshots_every: 0
      json_summary: true

Only ``scenario`` (with ``family`` and the family's required parameters) and
``law`` are required.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import yaml

from .flow import FlowLaw
from .scenarios import FAMILY_PARAMETERS, Family, InvalidScenarioError, ScenarioSpec, build
from .stepper import Scheme, StepperConfig, Tolerances

__all__ = ["ConfigError", "OutputConfig", "SimConfig", "parse_config", "load_config", "config_to_dict", "from_dict"]


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry (dotted path)."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


@dataclass(frozen=True)
class OutputConfig:
    dir: str = "capflow_out"
    csv: bool = True
    snapshots_every: int = 0
    json_summary: bool = True


@dataclass(frozen=True)
class SimConfig:
    scenario: ScenarioSpec
    law: FlowLaw = FlowLaw.AREA_PRESERVING
    stepper: StepperConfig = field(default_factory=StepperConfig)
    tolerances: Tolerances = field(default_factory=Tolerances)
    output: OutputConfig = field(default_factory=OutputConfig)


_SECTIONS = ("scenario", "law", "stepper", "tolerances", "output")
_GEOMETRY_KEYS = ("n", "d", "m")
_INT_KEYS = {"n", "m", "k", "max_steps", "record_every", "snapshots_every"}
_POSITIVE_KEYS = {
    "r0", "width", "d", "dt", "cfl_safety", "pinch_floor",
    "area_rel", "volume_rel", "convergence", "cylinder",
}  # fmt: skip


def _number(key: str, value, *, integer: bool = False, positive: bool = False):
    if isinstance(value, bool):
        raise ConfigError(key, f"expected a number, got {value!r}")
    if isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            raise ConfigError(key, f"expected a number, got {value!r}") from None
    if not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    if integer:
        if float(value) != int(value):
            raise ConfigError(key, f"expected an integer, got {value!r}")
        value = int(value)
    else:
        value = float(value)
    if positive and not value > 0:
        raise ConfigError(key, f"must be positive, got {value!r}")
    return value


def _mapping(key: str, value) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(key, f"expected a mapping, got {type(value).__name__}")
    return value


def _reject_unknown(section: str, given: dict, allowed) -> None:
    for k in given:
        if k not in allowed:
            raise ConfigError(f"{section}.{k}" if section else str(k), f"unknown key (allowed: {', '.join(allowed)})")


def _convert(section: str, raw: dict) -> dict:
    out = {}
    for k, v in raw.items():
        key = f"{section}.{k}"
        if k in _INT_KEYS:
            out[k] = _number(key, v, integer=True)
        elif k in _POSITIVE_KEYS:
            out[k] = _number(key, v, positive=True)
        else:
            out[k] = v
    return out


def _scenario(raw) -> ScenarioSpec:
    raw = _mapping("scenario", raw)
    if "family" not in raw:
        raise ConfigError("scenario.family", "missing required key")
    try:
        family = Family.parse(raw["family"])
    except ValueError as exc:
        raise ConfigError("scenario.family", str(exc)) from None
    required, optional = FAMILY_PARAMETERS[family]
    _reject_unknown("scenario", raw, ("family",) + required + optional + _GEOMETRY_KEYS)
    for k in required:
        if k not in raw:
            raise ConfigError(f"scenario.{k}", f"missing required key for family {family.value}")
    values = _convert("scenario", {k: v for k, v in raw.items() if k != "family"})
    for k in ("epsilon", "amplitude", "center"):
        if k in values:
            values[k] = _number(f"scenario.{k}", values[k])
    for k, lo in (("n", 2), ("m", 5), ("k", 1)):
        if k in values and values[k] < lo:
            raise ConfigError(f"scenario.{k}", f"must be >= {lo}, got {values[k]}")
    try:
        spec = ScenarioSpec(family=family, **values)
        build(spec)
    except InvalidScenarioError as exc:
        raise ConfigError("scenario", f"invalid scenario: {exc}") from None
    return spec


def _law(raw) -> FlowLaw:
    try:
        return FlowLaw.parse(raw)
    except ValueError as exc:
        raise ConfigError("law", str(exc)) from None


def _stepper(raw) -> StepperConfig:
    raw = _mapping("stepper", raw)
    allowed = tuple(f.name for f in dataclasses.fields(StepperConfig))
    _reject_unknown("stepper", raw, allowed)
    values = dict(raw)
    if values.get("dt", "auto") == "auto":
        values.pop("dt", None)
    values = _convert("stepper", values)
    if "t_end" in values:
        values["t_end"] = _number("stepper.t_end", values["t_end"])
        if values["t_end"] < 0:
            raise ConfigError("stepper.t_end", f"must be >= 0, got {values['t_end']}")
    for k in ("max_steps", "record_every"):
        if k in values and values[k] < 1:
            raise ConfigError(f"stepper.{k}", f"must be >= 1, got {values[k]}")
    if "scheme" in values:
        try:
            values["scheme"] = Scheme.parse(values["scheme"])
        except ValueError as exc:
            raise ConfigError("stepper.scheme", str(exc)) from None
    try:
        return StepperConfig(**values)
    except ValueError as exc:
        raise ConfigError("stepper", str(exc)) from None


def _tolerances(raw) -> Tolerances:
    raw = _mapping("tolerances", raw)
    _reject_unknown("tolerances", raw, tuple(f.name for f in dataclasses.fields(Tolerances)))
    return Tolerances(**_convert("tolerances", raw))


def _output(raw) -> OutputConfig:
    raw = _mapping("output", raw)
    _reject_unknown("output", raw, tuple(f.name for f in dataclasses.fields(OutputConfig)))
    values = _convert("output", raw)
    for k in ("csv", "json_summary"):
        if k in values and not isinstance(values[k], bool):
            raise ConfigError(f"output.{k}", f"expected true/false, got {values[k]!r}")
    if "dir" in values:
        if not isinstance(values["dir"], str) or not values["dir"]:
            raise ConfigError("output.dir", f"expected a path, got {values['dir']!r}")
    if values.get("snapshots_every", 0) < 0:
        raise ConfigError("output.snapshots_every", "must be >= 0")
    return OutputConfig(**values)


def from_dict(raw) -> SimConfig:
    """Validate an already-parsed mapping and apply defaults."""
    raw = _mapping("<config>", raw)
    _reject_unknown("", raw, _SECTIONS)
    for k in ("scenario", "law"):
        if k not in raw:
            raise ConfigError(k, "missing required key")
    return SimConfig(
        scenario=_scenario(raw["scenario"]),
        law=_law(raw["law"]),
        stepper=_stepper(raw.get("stepper")),
        tolerances=_tolerances(raw.get("tolerances")),
        output=_output(raw.get("output")),
    )


def parse_config(text: str) -> SimConfig:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<config>", f"not valid YAML: {exc}") from None
    return from_dict(raw)


def load_config(path) -> SimConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_to_dict(cfg: SimConfig) -> dict:
    """Plain mapping that :func:`from_dict` turns back into ``cfg``."""
    st = cfg.stepper
    return {
        "scenario": cfg.scenario.as_dict(),
        "law": cfg.law.value,
        "stepper": {
            "scheme": st.scheme.value,
            "dt": st.dt,
            "cfl_safety": st.cfl_safety,
            "t_end": st.t_end,
            "max_steps": st.max_steps,
            "pinch_floor": st.pinch_floor,
            "record_every": st.record_every,
        },
        "tolerances": dataclasses.asdict(cfg.tolerances),
        "output": dataclasses.asdict(cfg.output),
    }
