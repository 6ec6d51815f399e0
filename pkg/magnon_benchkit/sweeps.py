"""Reusable sweep routines turning configured experiments into columnar tables."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence

import numpy as np

from .columnar import ColumnarOutput
from .config import SweepConfig
from .dynamics import DrivePulse, RingdownMap, TimeTrace, max_step
from .estimation import synthesize
from .physics import CoupledSystem, DesignPoint
from .spectra import FrequencyGrid, field_map, group_delay, normal_modes_rwa, spectrum

__all__ = [
    "TWO_PI",
    "build_points",
    "feature_scale",
    "frequency_grid",
    "bias_points",
    "drive_pulse",
    "time_grid",
    "spectrum_table",
    "map_table",
    "trace_table",
    "ringdown_table",
    "design_table",
    "position_table",
]

log = logging.getLogger("magnon_benchkit.sweeps")

TWO_PI = 2.0 * math.pi
GHZ = TWO_PI * 1e9
MHZ = TWO_PI * 1e6
NS = 1e-9
MT = 1e-3
MM = 1e-3

DEFAULT_SPAN_FACTOR = 5.0


def build_points(*, start: float, stop: float, points: int, mode: str = "linear") -> np.ndarray:
    """Build sweep points (inclusive endpoints).

    mode is 'linear' for uniform spacing or 'log' for geometric spacing.
    """
    if points < 2:
        raise ValueError("points must be >= 2")
    if stop <= start:
        raise ValueError("stop must be > start")
    mode = mode.lower()
    if mode not in ("log", "linear"):
        raise ValueError("mode must be 'log' or 'linear'")
    if mode == "linear":
        return np.linspace(start, stop, points)
    if start <= 0:
        raise ValueError("log spacing needs start > 0")
    return np.geomspace(start, stop, points)


def feature_scale(system: CoupledSystem) -> float:
    """Widest spectral scale of the system: max(g, kappa_a, kappa_m)."""
    return max(system.g, system.cavity.kappa_a, system.magnon.kappa_m)


def frequency_grid(
    sweep: SweepConfig, system: CoupledSystem, points: int | None = None
) -> FrequencyGrid:
    n = points or sweep.freq_points
    if sweep.freq_start is not None or sweep.freq_stop is not None:
        if sweep.freq_start is None or sweep.freq_stop is None:
            raise ValueError("frequency sweep needs both start and stop")
        return FrequencyGrid(sweep.freq_start, sweep.freq_stop, n)
    centre = system.cavity.omega_a
    if sweep.freq_span is not None:
        return FrequencyGrid.around(centre, 0.5 * sweep.freq_span, n)
    half = DEFAULT_SPAN_FACTOR * feature_scale(system) + abs(system.detuning)
    return FrequencyGrid.around(centre, half, n)


def bias_points(sweep: SweepConfig, system: CoupledSystem) -> np.ndarray:
    if sweep.b_start is not None and sweep.b_stop is not None:
        return build_points(start=sweep.b_start, stop=sweep.b_stop, points=sweep.b_points)
    if (sweep.b_start is None) != (sweep.b_stop is None):
        raise ValueError("bias sweep needs both b_start and b_stop")
    centre = system.resonant_field
    half = DEFAULT_SPAN_FACTOR * feature_scale(system) / system.magnon.gamma
    return build_points(
        start=max(centre - half, 0.0), stop=centre + half, points=sweep.b_points
    )


def drive_pulse(sweep: SweepConfig, system: CoupledSystem) -> DrivePulse | None:
    if sweep.pulse == "none":
        return None
    return DrivePulse(
        carrier=system.cavity.omega_a + sweep.carrier_offset,
        amplitude=sweep.pulse_amplitude,
        t_on=sweep.pulse_on,
        t_off=float(sweep.pulse_off),
        shape=sweep.pulse,
        edge_time=sweep.pulse_edge,
    )


def time_grid(
    sweep: SweepConfig,
    system: CoupledSystem,
    pulse: DrivePulse | None,
    b_values: Sequence[float] = (),
) -> tuple[float, float]:
    """(t_max, dt); defaults cover five energy lifetimes of the slowest mode.

    The default step resolves every bias field in ``b_values`` as well.
    """
    t_max = sweep.t_max
    if t_max is None:
        modes = normal_modes_rwa(system)
        slowest = min(-modes.omega_plus.imag, -modes.omega_minus.imag)
        t_max = 5.0 / (2.0 * slowest)
        if pulse is not None:
            t_max += pulse.t_off
    dt = sweep.dt
    if dt is None:
        carrier = None if pulse is None else pulse.carrier
        limits = [max_step(system.with_bias(float(b)), carrier) for b in b_values]
        limit = min([max_step(system, carrier), *limits])
        dt = min(0.25 * limit, t_max / 100.0)
    log.debug("time grid: t_max=%.4g s, dt=%.4g s", t_max, dt)
    return float(t_max), float(dt)


def spectrum_table(
    system: CoupledSystem, grid: FrequencyGrid, noise: float = 0.0, seed: int = 0
) -> ColumnarOutput:
    """freq, |r|^2, arg r, group delay. Noise, when set, applies to |r|^2 only."""
    spec = spectrum(system, grid)
    power = synthesize(system, grid, noise=noise, seed=seed) if noise > 0 else spec.power
    delay = group_delay(spec)
    comments = []
    if noise > 0:
        comments.append(f"additive gaussian noise std={noise:g} on power (seed {seed})")
    return ColumnarOutput.from_columns(
        [("freq", "GHz"), ("power", "1"), ("phase", "rad"), ("delay", "ns")],
        [grid.omega / GHZ, power, spec.phase, delay / NS],
        comments,
    )


def map_table(system: CoupledSystem, b_values, grid: FrequencyGrid) -> ColumnarOutput:
    """Long-format bias-field map: one row per (B, freq) pair, B outermost."""
    b = np.asarray(b_values, dtype=float)
    power = field_map(system, b, grid)
    bb, ff = np.meshgrid(b, grid.omega, indexing="ij")
    return ColumnarOutput.from_columns(
        [("b", "mT"), ("freq", "GHz"), ("power", "1")],
        [bb.ravel() / MT, ff.ravel() / GHZ, power.ravel()],
    )


def trace_table(trace: TimeTrace, comments: Sequence[str] = ()) -> ColumnarOutput:
    return ColumnarOutput.from_columns(
        [("t", "ns"), ("energy", "1"), ("out_power", "1"), ("magnon_energy", "1")],
        [trace.t / NS, trace.energy, trace.out_power, trace.magnon_energy],
        comments,
    )


def ringdown_table(rmap: RingdownMap) -> ColumnarOutput:
    bb, tt = np.meshgrid(rmap.b, rmap.t, indexing="ij")
    return ColumnarOutput.from_columns(
        [("b", "mT"), ("t", "ns"), ("energy", "1")],
        [bb.ravel() / MT, tt.ravel() / NS, rmap.energy.ravel()],
    )


def design_table(points: Sequence[DesignPoint]) -> ColumnarOutput:
    return ColumnarOutput.from_columns(
        [
            ("diameter", "mm"),
            ("scale", "1"),
            ("cavity_freq", "GHz"),
            ("mode_volume", "mm3"),
            ("spins", "1"),
            ("f_eff", "GHz"),
            ("g", "MHz"),
        ],
        [
            [p.diameter / MM for p in points],
            [p.scale for p in points],
            [p.omega_a / GHZ for p in points],
            [p.mode_volume / 1e-9 for p in points],
            [p.spins for p in points],
            [p.f_eff / 1e9 for p in points],
            [p.g / MHZ for p in points],
        ],
    )


def position_table(rows: Sequence[tuple[float, float, float]]) -> ColumnarOutput:
    return ColumnarOutput.from_columns(
        [("x", "mm"), ("eta", "1"), ("g", "MHz")],
        [[r[0] / MM for r in rows], [r[1] for r in rows], [r[2] / MHZ for r in rows]],
    )
