"""Experiment configuration files for magnon_benchkit.

An experiment is a sectioned INI file with four blocks:

  [system]  cavity, magnon and coupling parameters
  [sweep]   frequency grid, bias range, time grid and drive pulse
  [task]    command-specific options (design sweeps, fit settings, windows)
  [output]  output path, log file, trace decimation

Physical keys carry their unit as a suffix (``kappa_a_mhz``,
``bias_field_mt``, ``cavity_dims_mm``). Any unit of the quantity's family is
accepted, but a quantity may appear only once. Values are converted to SI
here and nowhere else; frequencies become angular frequencies (rad/s).
"""

from __future__ import annotations

import configparser
import math
import pathlib
from collections.abc import Mapping
from dataclasses import dataclass, field

from .physics import (
    GAMMA_YIG,
    RHO_YIG,
    SPIN_FE3,
    CavityMode,
    CoupledSystem,
    MagnonMode,
    SpherePosition,
    coupling_strength,
    overlap_eta,
    te101_frequency,
)

__all__ = [
    "ConfigError",
    "FIT_TARGETS",
    "MIN_FREQ_POINTS",
    "UNITS",
    "SystemConfig",
    "SweepConfig",
    "TaskConfig",
    "OutputConfig",
    "ExperimentConfig",
    "parse_config",
    "load_config",
]

TWO_PI = 2.0 * math.pi


class ConfigError(ValueError):
    """Invalid experiment configuration."""


# unit suffix -> SI factor, per quantity family
UNITS: dict[str, dict[str, float]] = {
    "frequency": {"ghz": 1e9, "mhz": 1e6, "khz": 1e3, "hz": 1.0},
    "field": {"t": 1.0, "mt": 1e-3},
    "length": {"m": 1.0, "mm": 1e-3, "um": 1e-6},
    "time": {"s": 1.0, "us": 1e-6, "ns": 1e-9},
    "volume": {"m3": 1.0, "mm3": 1e-9},
    "gyro": {"ghz_per_t": 1e9, "mhz_per_mt": 1e9, "hz_per_t": 1.0},
}

# families whose values become angular frequencies
_ANGULAR = {"frequency", "gyro"}

_SYSTEM_KEYS = {
    "cavity_freq": "frequency",
    "kappa_a": "frequency",
    "kappa_a1": "frequency",
    "kappa_m": "frequency",
    "magnon_offset": "frequency",
    "g": "frequency",
    "gamma": "gyro",
    "bias_field": "field",
    "cavity_dims": "length",
    "sphere_diameter": "length",
    "sphere_radius": "length",
    "sphere_x": "length",
    "sphere_wall_offset": "length",
    "mode_volume": "volume",
}
_SYSTEM_PLAIN = {"g_source", "eta", "spin", "spin_density"}

_SWEEP_KEYS = {
    "freq_start": "frequency",
    "freq_stop": "frequency",
    "freq_span": "frequency",
    "b_start": "field",
    "b_stop": "field",
    "t_max": "time",
    "dt": "time",
    "pulse_on": "time",
    "pulse_off": "time",
    "pulse_edge": "time",
    "carrier_offset": "frequency",
}
_SWEEP_PLAIN = {"freq_points", "b_points", "pulse", "pulse_amplitude"}

_INIT_PREFIX = "init_"
_FIT_PARAM_KEYS = {
    "omega_a": "frequency",
    "omega_m": "frequency",
    "omega_m0": "frequency",
    "kappa_a": "frequency",
    "kappa_a1": "frequency",
    "kappa_m": "frequency",
    "g": "frequency",
    "kappa": "frequency",
    "gamma": "gyro",
}
_TASK_KEYS = {
    "diameters": "length",
    "positions": "length",
    "window_start": "time",
    "window_stop": "time",
    **{_INIT_PREFIX + k: fam for k, fam in _FIT_PARAM_KEYS.items()},
}
_TASK_PLAIN = {
    "scales",
    "data",
    "model",
    "target",
    "restarts",
    "seed",
    "noise",
    "free",
    "max_iter",
    "workers",
    "usc_threshold",
}
_OUTPUT_PLAIN = {"path", "log_file", "decimate"}

_SECTIONS: dict[str, tuple[dict[str, str], set[str]]] = {
    "system": (_SYSTEM_KEYS, _SYSTEM_PLAIN),
    "sweep": (_SWEEP_KEYS, _SWEEP_PLAIN),
    "task": (_TASK_KEYS, _TASK_PLAIN),
    "output": ({}, _OUTPUT_PLAIN),
}

G_SOURCES = ("direct", "geometry")
FIT_MODELS = ("auto", "spectrum", "field_map", "decay", "lorentzian")
FIT_TARGETS = ("auto", "power", "complex")
# central differences (group delay) need three samples
MIN_FREQ_POINTS = 3


@dataclass(frozen=True)
class SystemConfig:
    cavity: CavityMode
    magnon: MagnonMode
    g: float
    g_source: str
    eta: float | None = None
    position: SpherePosition | None = None
    bias_field: float | None = None

    @property
    def coupled(self) -> CoupledSystem:
        if self.bias_field is None:
            return CoupledSystem.on_resonance(self.cavity, self.magnon, self.g)
        return CoupledSystem(self.cavity, self.magnon, self.g, self.bias_field)


@dataclass(frozen=True)
class SweepConfig:
    freq_start: float | None = None
    freq_stop: float | None = None
    freq_span: float | None = None
    freq_points: int = 2001
    b_start: float | None = None
    b_stop: float | None = None
    b_points: int = 41
    t_max: float | None = None
    dt: float | None = None
    pulse: str = "none"
    pulse_on: float = 0.0
    pulse_off: float | None = None
    pulse_edge: float = 1e-9
    pulse_amplitude: float = 1.0
    carrier_offset: float = 0.0


@dataclass(frozen=True)
class TaskConfig:
    diameters: tuple[float, ...] = ()
    scales: tuple[float, ...] = (1.0,)
    positions: tuple[float, ...] = ()
    data: str | None = None
    model: str = "auto"
    target: str = "auto"
    restarts: int | None = None
    seed: int = 0
    noise: float = 0.0
    free: tuple[str, ...] = ()
    max_iter: int = 500
    window: tuple[float, float] | None = None
    workers: int | None = None
    usc_threshold: float = 0.05
    init: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class OutputConfig:
    path: str | None = None
    log_file: str | None = None
    decimate: int = 1


@dataclass(frozen=True)
class ExperimentConfig:
    system: SystemConfig | None
    sweep: SweepConfig
    task: TaskConfig
    output: OutputConfig
    source: str = "<string>"


# --- raw value parsing --------------------------------------------------------------


def _number(section: str, key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse number {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"[{section}] {key}: value must be finite")
    return value


def _numbers(section: str, key: str, text: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"[{section}] {key}: empty list")
    return tuple(_number(section, key, p) for p in parts)


def _integer(section: str, key: str, text: str) -> int:
    value = _number(section, key, text)
    if value != int(value):
        raise ConfigError(f"[{section}] {key}: expected an integer, got {text!r}")
    return int(value)


def _split_unit(key: str, families: Mapping[str, str]) -> tuple[str, str, float] | None:
    """Return (base, family, factor) for a unit-suffixed key, or None."""
    for base, family in families.items():
        prefix = base + "_"
        if key.startswith(prefix):
            unit = key[len(prefix) :]
            factor = UNITS[family].get(unit)
            if factor is not None:
                if family in _ANGULAR:
                    factor *= TWO_PI
                return base, family, factor
    return None


def _section_values(parser: configparser.ConfigParser, section: str):
    families, plain = _SECTIONS[section]
    quantities: dict[str, tuple[float, ...]] = {}
    raw: dict[str, str] = {}
    if not parser.has_section(section):
        return quantities, raw
    seen: dict[str, str] = {}
    for key, text in parser.items(section):
        if key in plain:
            raw[key] = text.strip()
            continue
        match = _split_unit(key, families)
        if match is None:
            raise ConfigError(f"[{section}] unknown key {key!r}")
        base, _family, factor = match
        if base in seen:
            raise ConfigError(f"[{section}] {base} given twice ({seen[base]} and {key})")
        seen[base] = key
        quantities[base] = tuple(v * factor for v in _numbers(section, key, text))
    return quantities, raw


def _scalar(q: Mapping[str, tuple[float, ...]], section: str, name: str) -> float | None:
    values = q.get(name)
    if values is None:
        return None
    if len(values) != 1:
        raise ConfigError(f"[{section}] {name}: expected a single value")
    return values[0]


# --- section builders ---------------------------------------------------------------


def _build_system(q, raw) -> SystemConfig | None:
    if not q and not raw:
        return None
    source = raw.get("g_source", "").lower()
    if source not in G_SOURCES:
        raise ConfigError(f"[system] g_source must be one of {G_SOURCES}")

    def need(name: str) -> float:
        value = _scalar(q, "system", name)
        if value is None:
            raise ConfigError(f"[system] missing {name}_<unit>")
        return value

    dims = q.get("cavity_dims")
    if dims is not None and len(dims) != 3:
        raise ConfigError("[system] cavity_dims needs three lengths")
    if "sphere_diameter" in q and "sphere_radius" in q:
        raise ConfigError("[system] give sphere_diameter or sphere_radius, not both")
    radius = _scalar(q, "system", "sphere_radius")
    diameter = _scalar(q, "system", "sphere_diameter")
    if diameter is not None:
        radius = diameter / 2.0
    eta_text = raw.get("eta")
    has_position = "sphere_x" in q or "sphere_wall_offset" in q

    if source == "direct":
        if "g" not in q:
            raise ConfigError("[system] g_source = direct requires g_<unit>")
        if eta_text is not None or has_position:
            raise ConfigError("[system] g_source = direct forbids eta and sphere position keys")
    else:
        if "g" in q:
            raise ConfigError("[system] g_source = geometry forbids g_<unit>")
        if dims is None or radius is None:
            raise ConfigError("[system] g_source = geometry requires cavity_dims and sphere size")
        if eta_text is not None and has_position:
            raise ConfigError("[system] give eta or a sphere position, not both")

    freq = _scalar(q, "system", "cavity_freq")
    if freq is None:
        if dims is None:
            raise ConfigError("[system] missing cavity_freq_<unit> (or cavity_dims)")
        freq = TWO_PI * te101_frequency(dims)
    kappa_a = need("kappa_a")
    kappa_a1 = _scalar(q, "system", "kappa_a1")
    try:
        cavity = CavityMode(
            omega_a=freq,
            kappa_a=kappa_a,
            kappa_a1=0.5 * kappa_a if kappa_a1 is None else kappa_a1,
            dims=tuple(dims) if dims is not None else None,
            mode_volume=_scalar(q, "system", "mode_volume"),
        )
        offset = _scalar(q, "system", "magnon_offset")
        gamma = _scalar(q, "system", "gamma")
        magnon = MagnonMode(
            kappa_m=need("kappa_m"),
            radius=0.0 if radius is None else radius,
            omega_m0=0.0 if offset is None else offset,
            gamma=GAMMA_YIG if gamma is None else gamma,
            spin_density=(
                _number("system", "spin_density", raw["spin_density"])
                if "spin_density" in raw
                else RHO_YIG
            ),
            spin=_number("system", "spin", raw["spin"]) if "spin" in raw else SPIN_FE3,
        )
        eta: float | None = None
        position: SpherePosition | None = None
        if source == "direct":
            g = need("g")
        else:
            if eta_text is not None:
                eta = _number("system", "eta", eta_text)
            else:
                position = SpherePosition(
                    x=_scalar(q, "system", "sphere_x") or 0.0,
                    wall_offset=_scalar(q, "system", "sphere_wall_offset") or 0.0,
                )
                eta = overlap_eta(position, cavity)
            g = coupling_strength(cavity, magnon, eta)
        bias = _scalar(q, "system", "bias_field")
        system = SystemConfig(
            cavity=cavity,
            magnon=magnon,
            g=g,
            g_source=source,
            eta=eta,
            position=position,
            bias_field=bias,
        )
        _ = system.coupled
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"[system] {exc}") from exc
    return system


def _build_sweep(q, raw) -> SweepConfig:
    kwargs: dict[str, object] = {}
    for name in _SWEEP_KEYS:
        value = _scalar(q, "sweep", name)
        if value is not None:
            kwargs[name] = value
    if "freq_points" in raw:
        kwargs["freq_points"] = _integer("sweep", "freq_points", raw["freq_points"])
        if kwargs["freq_points"] < MIN_FREQ_POINTS:
            raise ConfigError(f"[sweep] freq_points must be >= {MIN_FREQ_POINTS}")
    if "b_points" in raw:
        kwargs["b_points"] = _integer("sweep", "b_points", raw["b_points"])
        if kwargs["b_points"] < 1:
            raise ConfigError("[sweep] b_points must be >= 1")
    if "pulse_amplitude" in raw:
        kwargs["pulse_amplitude"] = _number("sweep", "pulse_amplitude", raw["pulse_amplitude"])
    pulse = raw.get("pulse", "none").lower()
    if pulse not in ("none", "impulse", "rectangular", "raised-cosine"):
        raise ConfigError("[sweep] pulse must be none, rectangular or raised-cosine")
    kwargs["pulse"] = "none" if pulse == "impulse" else pulse
    if kwargs["pulse"] != "none" and "pulse_off" not in kwargs:
        raise ConfigError("[sweep] a drive pulse needs pulse_off_<unit>")
    if "freq_span" in kwargs and ("freq_start" in kwargs or "freq_stop" in kwargs):
        raise ConfigError("[sweep] give freq_span or freq_start/freq_stop, not both")
    return SweepConfig(**kwargs)  # type: ignore[arg-type]


def _build_task(q, raw) -> TaskConfig:
    kwargs: dict[str, object] = {}
    if "diameters" in q:
        kwargs["diameters"] = q["diameters"]
    if "positions" in q:
        kwargs["positions"] = q["positions"]
    if "scales" in raw:
        kwargs["scales"] = _numbers("task", "scales", raw["scales"])
    if "data" in raw:
        kwargs["data"] = raw["data"]
    if "target" in raw:
        target = raw["target"].lower()
        if target not in FIT_TARGETS:
            raise ConfigError(f"[task] target must be one of {FIT_TARGETS}")
        kwargs["target"] = target
    if "model" in raw:
        model = raw["model"].lower()
        if model not in FIT_MODELS:
            raise ConfigError(f"[task] model must be one of {FIT_MODELS}")
        kwargs["model"] = model
    for key in ("restarts", "seed", "max_iter", "workers"):
        if key in raw:
            kwargs[key] = _integer("task", key, raw[key])
    for key in ("noise", "usc_threshold"):
        if key in raw:
            kwargs[key] = _number("task", key, raw[key])
    if "free" in raw:
        kwargs["free"] = tuple(p.strip() for p in raw["free"].split(",") if p.strip())
    start = _scalar(q, "task", "window_start")
    stop = _scalar(q, "task", "window_stop")
    if (start is None) != (stop is None):
        raise ConfigError("[task] window needs both window_start and window_stop")
    if start is not None and stop is not None:
        kwargs["window"] = (start, stop)
    init = {}
    for key in q:
        if key.startswith(_INIT_PREFIX):
            init[key[len(_INIT_PREFIX) :]] = _scalar(q, "task", key)
    kwargs["init"] = init
    return TaskConfig(**kwargs)  # type: ignore[arg-type]


def _build_output(raw) -> OutputConfig:
    decimate = _integer("output", "decimate", raw["decimate"]) if "decimate" in raw else 1
    if decimate < 1:
        raise ConfigError("[output] decimate must be >= 1")
    return OutputConfig(
        path=raw.get("path") or None,
        log_file=raw.get("log_file") or None,
        decimate=decimate,
    )


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), strict=True
    )
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    unknown = [s for s in parser.sections() if s not in _SECTIONS]
    if unknown:
        raise ConfigError(f"{source}: unknown section(s) {', '.join(unknown)}")
    values = {name: _section_values(parser, name) for name in _SECTIONS}
    return ExperimentConfig(
        system=_build_system(*values["system"]),
        sweep=_build_sweep(*values["sweep"]),
        task=_build_task(*values["task"]),
        output=_build_output(values["output"][1]),
        source=source,
    )


def load_config(path: str | pathlib.Path) -> ExperimentConfig:
    p = pathlib.Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    return parse_config(text, source=str(p))
