"""Declarative experiment configuration.

A config is a YAML mapping. Top-level keys:

``kind``
    one of :data:`KINDS`.
``magnets``
    list of preset names (``M1``, ``M2``) or mappings with ``name`` and any
    of ``preset``, ``Ms``, ``diameter``, ``thickness``, ``alpha``, ``Hki``.
``designs``
    circuit variants (``A_sot``, ``B_series_fet``) for the device kinds.
``classes``
    anisotropy classes (``IMA_circular``, ``PMA_compensated``) for the
    magnet kinds.
``sweep``
    kind-specific numbers; see :data:`SWEEP_DEFAULTS`. Durations ending in
    ``_tau`` are multiples of the analytic correlation time.
``ensemble_size``, ``base_seed``, ``output_dir``, ``temperature``
    as named.
``dt``
    per-class timestep in seconds; ``auto`` scales the PMA step to
    tau_c / 1000.

:func:`validate` fills defaults and applies the tolerance profile; every
rejection is a :class:`~lbmbsn.errors.ConfigError` naming the field.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import yaml

from .device import Variant
from .errors import ConfigError, ParameterError
from .magnet import PRESETS, AnisotropyClass, MagnetSpec

KINDS = ("tauc_sweep", "ip_sweep", "boltzmann", "sigmoid", "step_response", "power_trace",
         "collapse_report")
MAGNET_KINDS = {"tauc_sweep", "ip_sweep", "boltzmann"}
DEVICE_KINDS = {"sigmoid", "step_response", "power_trace", "collapse_report"}


@dataclass(frozen=True)
class Profile:
    duration_scale: float
    tolerance_scale: float


# smoke runs 10x shorter, so statistical scatter grows by sqrt(10)
PROFILES = {
    "strict": Profile(1.0, 1.0),
    "smoke": Profile(0.1, math.sqrt(10.0)),
}

_SIGMOID = {"n_points": 17, "span": 4.0, "avg_window_tau": 1000.0}
_STEP = {"step_from": -10.0, "step_to": 0.0, "duration_tau": 10.0, "pre_tau": 10.0}

SWEEP_DEFAULTS = {
    "tauc_sweep": {"ns_min": 1e5, "ns_max": 1e7, "n_points": 5, "ima_duration_tau": 2000.0,
                   "pma_duration_tau": 100.0, "ima_max_lag_tau": 5.0, "pma_max_lag_tau": 4.0},
    "ip_sweep": {"ns_min": 1e5, "ns_max": 1e7, "n_points": 5, "n_bias": 9, "bias_span": 0.6,
                 "ima_point_tau": 1000.0, "pma_point_tau": 1500.0},
    "boltzmann": {"ima_duration_tau": 6000.0, "pma_duration_tau": 40000.0, "bins": 101},
    "sigmoid": dict(_SIGMOID),
    "step_response": dict(_STEP),
    "power_trace": {"duration_tau": 200.0, "off_input_V": -0.5},
    "collapse_report": {**_SIGMOID, **_STEP},
}

# smoke never shrinks a duration below what its estimator needs
DURATION_FLOORS = {
    "tauc_sweep": {"ima_duration_tau": 60.0, "pma_duration_tau": 50.0},
    "ip_sweep": {"ima_point_tau": 100.0, "pma_point_tau": 150.0},
    "boltzmann": {"ima_duration_tau": 2200.0, "pma_duration_tau": 4000.0},
    "sigmoid": {"avg_window_tau": 100.0},
    "step_response": {"duration_tau": 5.0, "pre_tau": 5.0},
    "power_trace": {"duration_tau": 50.0},
    "collapse_report": {"avg_window_tau": 100.0, "duration_tau": 5.0, "pre_tau": 5.0},
}
INT_KEYS = {"n_points", "n_bias", "bins"}
SIGNED_KEYS = {"step_from", "step_to", "off_input_V"}
NULLABLE_KEYS = {"ns_min", "ns_max"}

DEFAULT_DT = {AnisotropyClass.IMA_CIRCULAR.value: 1e-13, AnisotropyClass.PMA_COMPENSATED.value: "auto"}
DEFAULT_ENSEMBLE = {"step_response": 100, "collapse_report": 100}
MIN_ENSEMBLE = {"step_response": 100, "collapse_report": 100}

_TOP_KEYS = {"kind", "magnets", "designs", "classes", "sweep", "ensemble_size", "base_seed",
             "output_dir", "temperature", "dt", "profile"}
_MAGNET_KEYS = {"name", "preset", "Ms", "diameter", "thickness", "alpha", "Hki"}


@dataclass
class ExperimentSpec:
    kind: str
    magnets: list[dict]
    designs: list[str]
    classes: list[str]
    sweep: dict
    ensemble_size: int
    base_seed: int
    output_dir: str
    temperature: float = 300.0
    dt: dict = field(default_factory=lambda: dict(DEFAULT_DT))
    profile: str = "strict"

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        """Hash of everything that determines the results (not the output location)."""
        d = self.to_dict()
        d.pop("output_dir")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @property
    def tolerance_scale(self) -> float:
        return PROFILES[self.profile].tolerance_scale

    def magnet_specs(self) -> list[MagnetSpec]:
        return [build_magnet(m, self.temperature) for m in self.magnets]


def build_magnet(entry: dict, temperature: float = 300.0,
                 kind: AnisotropyClass | str = AnisotropyClass.IMA_CIRCULAR) -> MagnetSpec:
    base = PRESETS[entry.get("preset", "M1")]
    kw = {k: entry[k] for k in ("Ms", "diameter", "thickness", "alpha", "Hki") if k in entry}
    spec = MagnetSpec(Ms=kw.get("Ms", base.Ms), diameter=kw.get("diameter", base.diameter),
                      thickness=kw.get("thickness", base.thickness), alpha=kw.get("alpha", base.alpha),
                      temperature=temperature, name=entry["name"])
    spec = spec.as_class(kind)
    if "Hki" in entry and spec.anisotropy_class is AnisotropyClass.IMA_CIRCULAR:
        spec = replace(spec, Hki=float(entry["Hki"]))
    return spec


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", path=str(path)) from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML: {exc}", path=str(path)) from None
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping", path="<root>")
    return raw


def _number(value, path, positive=True, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        try:
            value = float(value)  # YAML reads 1e5 without a dot as a string
        except (TypeError, ValueError):
            raise ConfigError(f"expected a number, got {value!r}", path=path) from None
    if not math.isfinite(value):
        raise ConfigError("must be finite", path=path)
    if integer:
        if value != int(value):
            raise ConfigError("must be an integer", path=path)
        value = int(value)
    if positive and not value > 0:
        raise ConfigError("must be positive", path=path)
    return value


def _magnets(raw) -> list[dict]:
    if raw is None:
        raw = ["M1", "M2"]
    if not isinstance(raw, list) or not raw:
        raise ConfigError("must be a non-empty list", path="magnets")
    out, seen = [], set()
    for i, item in enumerate(raw):
        p = f"magnets[{i}]"
        if isinstance(item, str):
            item = {"name": item, "preset": item}
        if not isinstance(item, dict):
            raise ConfigError("must be a preset name or a mapping", path=p)
        unknown = set(item) - _MAGNET_KEYS
        if unknown:
            raise ConfigError(f"unknown field(s) {sorted(unknown)}", path=p)
        if "name" not in item:
            raise ConfigError("missing magnet name", path=f"{p}.name")
        entry = {"name": str(item["name"])}
        if "preset" in item or not ({"Ms", "diameter", "thickness"} <= set(item)):
            preset = str(item.get("preset", item["name"]))
            if preset not in PRESETS:
                raise ConfigError(f"unknown magnet preset {preset!r}", path=f"{p}.preset")
            entry["preset"] = preset
        for k in ("Ms", "diameter", "thickness", "alpha"):
            if k in item:
                entry[k] = _number(item[k], f"{p}.{k}")
        if "Hki" in item:
            entry["Hki"] = _number(item["Hki"], f"{p}.Hki", positive=False)
        if entry["name"] in seen:
            raise ConfigError(f"duplicate magnet name {entry['name']!r}", path=f"{p}.name")
        seen.add(entry["name"])
        try:
            build_magnet(entry)
        except ParameterError as exc:
            raise ConfigError(str(exc), path=p) from None
        out.append(entry)
    return out


def _enum_list(raw, allowed, path, default):
    if raw is None:
        return list(default)
    if isinstance(raw, str):
        raw = [raw]
    if not isinstance(raw, list) or not raw:
        raise ConfigError("must be a non-empty list", path=path)
    out = []
    for i, v in enumerate(raw):
        if v not in allowed:
            raise ConfigError(f"{v!r} is not one of {sorted(allowed)}", path=f"{path}[{i}]")
        if v in out:
            raise ConfigError(f"duplicate entry {v!r}", path=f"{path}[{i}]")
        out.append(v)
    return out


def _sweep(kind, raw, profile: Profile) -> dict:
    defaults = SWEEP_DEFAULTS[kind]
    raw = {} if raw is None else raw
    if not isinstance(raw, dict):
        raise ConfigError("must be a mapping", path="sweep")
    unknown = set(raw) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown field(s) {sorted(unknown)} for kind {kind}", path="sweep")
    out = {}
    for key, default in defaults.items():
        value = raw.get(key, default)
        p = f"sweep.{key}"
        if value is None:
            if key not in NULLABLE_KEYS:
                raise ConfigError("must be set", path=p)
            out[key] = None
            continue
        out[key] = _number(value, p, positive=key not in SIGNED_KEYS, integer=key in INT_KEYS)
    floors = DURATION_FLOORS[kind]
    for key, floor in floors.items():
        scaled = out[key] * profile.duration_scale
        out[key] = max(scaled, min(floor, out[key]))
    if "ns_min" in out and (out["ns_min"] is None) != (out["ns_max"] is None):
        raise ConfigError("ns_min and ns_max must be given together", path="sweep.ns_max")
    if out.get("ns_min") is not None and not out["ns_max"] >= out["ns_min"]:
        raise ConfigError("ns_max must not be below ns_min", path="sweep.ns_max")
    if "n_points" in out and out["n_points"] < (9 if kind in ("sigmoid", "collapse_report") else 1):
        raise ConfigError("too few points", path="sweep.n_points")
    if "n_bias" in out and out["n_bias"] < 3:
        raise ConfigError("need at least 3 bias points", path="sweep.n_bias")
    if "step_from" in out and out["step_from"] == out["step_to"]:
        raise ConfigError("step must change the input", path="sweep.step_to")
    return out


def _dt(raw) -> dict:
    out = dict(DEFAULT_DT)
    if raw is None:
        return out
    if not isinstance(raw, dict):
        raise ConfigError("must be a mapping of anisotropy class to seconds", path="dt")
    for k, v in raw.items():
        if k not in out:
            raise ConfigError(f"unknown anisotropy class {k!r}", path="dt")
        out[k] = "auto" if v == "auto" else _number(v, f"dt.{k}")
    if out[AnisotropyClass.IMA_CIRCULAR.value] == "auto":
        raise ConfigError("IMA timestep must be explicit", path=f"dt.{AnisotropyClass.IMA_CIRCULAR.value}")
    return out


def validate(raw: dict, profile: str | None = None, seed: int | None = None,
             output_dir: str | None = None) -> ExperimentSpec:
    """Normalize a parsed config; CLI overrides (profile, seed, output) win over the file."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping", path="<root>")
    raw = copy.deepcopy(raw)
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown field(s) {sorted(unknown)}", path="<root>")
    kind = raw.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"unknown kind {kind!r}; expected one of {list(KINDS)}", path="kind")
    profile = profile or raw.get("profile", "strict")
    if profile not in PROFILES:
        raise ConfigError(f"unknown profile {profile!r}", path="profile")

    magnets = _magnets(raw.get("magnets"))
    designs = _enum_list(raw.get("designs"), {v.value for v in Variant}, "designs",
                         [v.value for v in Variant])
    classes = _enum_list(raw.get("classes"), {c.value for c in AnisotropyClass}, "classes",
                         [c.value for c in AnisotropyClass])
    sweep = _sweep(kind, raw.get("sweep"), PROFILES[profile])

    ens = raw.get("ensemble_size", DEFAULT_ENSEMBLE.get(kind, 4))
    ens = _number(ens, "ensemble_size", integer=True)
    if ens < MIN_ENSEMBLE.get(kind, 1):
        raise ConfigError(f"must be at least {MIN_ENSEMBLE[kind]} for {kind}", path="ensemble_size")

    base_seed = seed if seed is not None else raw.get("base_seed", 0)
    base_seed = _number(base_seed, "base_seed", positive=False, integer=True)
    if base_seed < 0:
        raise ConfigError("must be non-negative", path="base_seed")

    temperature = _number(raw.get("temperature", 300.0), "temperature")
    out_dir = output_dir or raw.get("output_dir") or f"runs/{kind}"
    return ExperimentSpec(kind=kind, magnets=magnets, designs=designs, classes=classes,
                          sweep=sweep, ensemble_size=ens, base_seed=base_seed,
                          output_dir=str(out_dir), temperature=float(temperature),
                          dt=_dt(raw.get("dt")), profile=profile)


def default_config(kind: str) -> dict:
    if kind not in KINDS:
        raise ConfigError(f"unknown kind {kind!r}", path="kind")
    return {"kind": kind}


def dump_spec(spec: ExperimentSpec, path) -> None:
    Path(path).write_text(yaml.safe_dump(spec.to_dict(), sort_keys=True))
