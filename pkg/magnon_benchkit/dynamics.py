"""Time-domain simulation of the driven, damped cavity-magnon oscillators.

Equations of motion (frame rotating at the drive carrier w_d):

    da/dt = -(i (w_a - w_d) + k_a) a - i g m + sqrt(2 k_a1) s(t)
    dm/dt = -(i (w_m - w_d) + k_m) m - i g a
    out   = -s(t) + sqrt(2 k_a1) a

integrated with a classical fixed-step 4th-order Runge-Kutta scheme.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import NamedTuple

import numpy as np

from .physics import CoupledSystem, DomainError

__all__ = [
    "PULSE_SHAPES",
    "StepSizeError",
    "CoupledEquations",
    "DrivePulse",
    "TimeTrace",
    "RingdownMap",
    "LifetimeFit",
    "max_step",
    "simulate",
    "rabi_period",
    "generalized_rabi_frequency",
    "ringdown_map",
    "extract_lifetime",
    "lifetime_from_energy",
]

log = logging.getLogger("magnon_benchkit.dynamics")

PULSE_SHAPES = ("rectangular", "raised-cosine")
STEP_FRACTION = 0.02


class StepSizeError(DomainError):
    """The integration step does not resolve the fastest rotating-frame scale."""


@dataclass(frozen=True)
class CoupledEquations:
    """Raw coefficients of the equations of motion.

    Unlike CoupledSystem this accepts zero loss rates, which the lossless
    accuracy checks need.
    """

    omega_a: float
    omega_m: float
    kappa_a: float
    kappa_a1: float
    kappa_m: float
    g: float

    def __post_init__(self) -> None:
        if min(self.kappa_a, self.kappa_a1, self.kappa_m, self.g) < 0:
            raise ValueError("rates must be >= 0")
        if self.kappa_a1 > self.kappa_a:
            raise ValueError("kappa_a1 must be <= kappa_a")

    @classmethod
    def from_system(cls, system: CoupledSystem) -> CoupledEquations:
        cav = system.cavity
        return cls(
            omega_a=cav.omega_a,
            omega_m=system.omega_m,
            kappa_a=cav.kappa_a,
            kappa_a1=cav.kappa_a1,
            kappa_m=system.magnon.kappa_m,
            g=system.g,
        )


@dataclass(frozen=True)
class DrivePulse:
    carrier: float
    amplitude: float
    t_on: float
    t_off: float
    shape: str = "raised-cosine"
    edge_time: float = 1e-9

    def __post_init__(self) -> None:
        if not (0 <= self.t_on < self.t_off):
            raise ValueError("pulse times must satisfy 0 <= t_on < t_off")
        if not self.amplitude >= 0:
            raise ValueError("amplitude must be >= 0")
        if self.shape not in PULSE_SHAPES:
            raise ValueError(f"shape must be one of {PULSE_SHAPES}")
        if not self.edge_time >= 0:
            raise ValueError("edge_time must be >= 0")

    @property
    def duration(self) -> float:
        return self.t_off - self.t_on

    def envelope(self, t: float) -> float:
        if t < self.t_on or t >= self.t_off:
            return 0.0
        if self.shape == "rectangular" or self.edge_time == 0:
            return self.amplitude
        edge = min(self.edge_time, 0.5 * self.duration)
        rise = t - self.t_on
        fall = self.t_off - t
        if rise < edge:
            return self.amplitude * 0.5 * (1.0 - math.cos(math.pi * rise / edge))
        if fall < edge:
            return self.amplitude * 0.5 * (1.0 - math.cos(math.pi * fall / edge))
        return self.amplitude


@dataclass(frozen=True, eq=False)
class TimeTrace:
    t: np.ndarray
    a: np.ndarray
    m: np.ndarray
    out: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.t, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise ValueError("time grid needs at least two samples")
        steps = np.diff(t)
        if np.any(steps <= 0):
            raise ValueError("time grid must be strictly increasing")
        if not np.allclose(steps, steps[0], rtol=1e-6, atol=0.0):
            raise ValueError("time grid must be uniform")
        for name in ("a", "m", "out"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.shape != t.shape:
                raise ValueError(f"{name} must match the time grid")
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "t", t)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def energy(self) -> np.ndarray:
        """Cavity energy |a|^2."""
        return np.abs(self.a) ** 2

    @property
    def magnon_energy(self) -> np.ndarray:
        return np.abs(self.m) ** 2

    @property
    def excitations(self) -> np.ndarray:
        return self.energy + self.magnon_energy

    @property
    def out_power(self) -> np.ndarray:
        return np.abs(self.out) ** 2


class LifetimeFit(NamedTuple):
    tau: float
    stderr: float
    poor_fit: bool
    r_squared: float


@dataclass(frozen=True, eq=False)
class RingdownMap:
    b: np.ndarray
    t: np.ndarray
    energy: np.ndarray


def _equations(system: CoupledSystem | CoupledEquations) -> CoupledEquations:
    if isinstance(system, CoupledEquations):
        return system
    return CoupledEquations.from_system(system)


def max_step(system: CoupledSystem | CoupledEquations, carrier: float | None = None) -> float:
    """Largest step accepted by simulate() for this system and drive carrier."""
    eq = _equations(system)
    frame = eq.omega_a if carrier is None else carrier
    fastest = max(
        eq.g,
        eq.kappa_a,
        eq.kappa_m,
        abs(eq.omega_a - eq.omega_m),
        abs(eq.omega_a - frame),
        abs(eq.omega_m - frame),
    )
    if fastest == 0:
        return math.inf
    return STEP_FRACTION * 2.0 * math.pi / fastest


def simulate(
    system: CoupledSystem | CoupledEquations,
    pulse: DrivePulse | None,
    t_max: float,
    dt: float,
    decimate: int = 1,
) -> TimeTrace:
    """Integrate the equations of motion from t = 0 to ``t_max``.

    With a pulse both modes start empty. Without one (impulse mode) the cavity
    starts at a(0) = 1 and the frame rotates at w_a. Every ``decimate``-th
    step is stored.
    """
    eq = _equations(system)
    if not (t_max > 0 and dt > 0):
        raise DomainError("t_max and dt must be > 0")
    if decimate < 1:
        raise DomainError("decimate must be >= 1")
    carrier = eq.omega_a if pulse is None else pulse.carrier
    limit = max_step(eq, carrier)
    if dt > limit:
        raise StepSizeError(f"dt={dt:.4g} s exceeds the step limit {limit:.4g} s")

    n_steps = int(round(t_max / dt))
    if n_steps < 1:
        raise DomainError("t_max must cover at least one step")
    da = 1j * (eq.omega_a - carrier) + eq.kappa_a
    dm = 1j * (eq.omega_m - carrier) + eq.kappa_m
    ig = 1j * eq.g
    port = math.sqrt(2.0 * eq.kappa_a1)
    drive = pulse.envelope if pulse is not None else (lambda _t: 0.0)

    def rhs(t: float, a: complex, m: complex) -> tuple[complex, complex]:
        return -da * a - ig * m + port * drive(t), -dm * m - ig * a

    a: complex = 0j if pulse is not None else 1.0 + 0j
    m: complex = 0j
    n_keep = n_steps // decimate + 1
    a_out = np.empty(n_keep, dtype=complex)
    m_out = np.empty(n_keep, dtype=complex)
    s_out = np.empty(n_keep, dtype=float)
    a_out[0], m_out[0], s_out[0] = a, m, drive(0.0)
    half = 0.5 * dt
    k = 1
    for j in range(n_steps):
        t = j * dt
        k1a, k1m = rhs(t, a, m)
        k2a, k2m = rhs(t + half, a + half * k1a, m + half * k1m)
        k3a, k3m = rhs(t + half, a + half * k2a, m + half * k2m)
        k4a, k4m = rhs(t + dt, a + dt * k3a, m + dt * k3m)
        a = a + dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        m = m + dt / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m)
        if (j + 1) % decimate == 0 and k < n_keep:
            a_out[k], m_out[k] = a, m
            s_out[k] = drive((j + 1) * dt)
            k += 1
    t_grid = np.arange(n_keep) * (dt * decimate)
    log.debug("simulated %d steps (dt=%.3g s, stored %d)", n_steps, dt, n_keep)
    return TimeTrace(t=t_grid, a=a_out, m=m_out, out=-s_out + port * a_out)


def rabi_period(g: float) -> float:
    if not g > 0:
        raise DomainError("Rabi period needs g > 0")
    return math.pi / g


def generalized_rabi_frequency(g: float, detuning: float) -> float:
    """Angular beat frequency of the cavity energy, sqrt(4 g^2 + detuning^2)."""
    return math.sqrt(4.0 * g * g + detuning * detuning)


def ringdown_map(
    system: CoupledSystem,
    pulse: DrivePulse | None,
    b_values,
    t_max: float,
    dt: float,
    decimate: int = 1,
    workers: int | None = None,
) -> RingdownMap:
    """Cavity energy traces, one row per bias field, in input order.

    ``workers`` > 1 integrates the rows in that many worker processes.
    """
    b = np.atleast_1d(np.asarray(b_values, dtype=float))
    if b.ndim != 1 or b.size == 0:
        raise DomainError("bias fields must be a non-empty 1-D sequence")
    systems = [system.with_bias(float(x)) for x in b]
    carrier = system.cavity.omega_a if pulse is None else pulse.carrier
    for s in systems:
        limit = max_step(s, carrier)
        if dt > limit:
            raise StepSizeError(f"dt={dt:.4g} s exceeds the step limit {limit:.4g} s")

    row = partial(simulate, pulse=pulse, t_max=t_max, dt=dt, decimate=decimate)
    if workers is not None and workers > 1 and len(systems) > 1:
        # the integrator loop holds the GIL; rows go to separate processes
        with ProcessPoolExecutor(max_workers=min(workers, len(systems))) as pool:
            traces = list(pool.map(row, systems))
    else:
        traces = [row(s) for s in systems]
    energy = np.vstack([tr.energy for tr in traces])
    return RingdownMap(b=b, t=traces[0].t, energy=energy)


def extract_lifetime(trace: TimeTrace, window: tuple[float, float] | None = None) -> LifetimeFit:
    """Fit log(energy) to a line over ``window``; tau is the energy 1/e time."""
    return lifetime_from_energy(trace.t, trace.energy, window)


def lifetime_from_energy(
    t, energy, window: tuple[float, float] | None = None
) -> LifetimeFit:
    """extract_lifetime on a bare (t, energy) pair sampled on a uniform grid."""
    t = np.asarray(t, dtype=float)
    e = np.asarray(energy, dtype=float)
    if t.ndim != 1 or t.shape != e.shape or t.size < 2:
        raise DomainError("t and energy must be matching 1-D arrays")
    step = float(t[1] - t[0])
    if window is None:
        t0, t1 = float(t[0]), float(t[-1])
    else:
        t0, t1 = (float(w) for w in window)
    tol = 1e-9 * step
    if t1 <= t0 or t0 < t[0] - tol or t1 > t[-1] + tol:
        raise DomainError("lifetime window must lie inside the trace")
    sel = (t >= t0 - tol) & (t <= t1 + tol)
    if int(np.count_nonzero(sel)) < 4:
        raise DomainError("lifetime window needs at least 4 samples")
    tw = t[sel]
    ew = e[sel]
    if np.any(ew <= 0):
        raise DomainError("energy must be > 0 inside the lifetime window")
    y = np.log(ew)
    coeffs, cov = np.polyfit(tw, y, 1, cov=True)
    slope = float(coeffs[0])
    if slope * (tw[-1] - tw[0]) > -1e-9:
        raise DomainError("energy does not decay inside the lifetime window")
    tau = -1.0 / slope
    stderr = math.sqrt(max(float(cov[0, 0]), 0.0)) / (slope * slope)
    fitted = np.polyval(coeffs, tw)
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    monotone = bool(np.all(np.diff(ew) <= 0))
    poor = (not monotone) or r_squared < 0.99
    if poor:
        log.warning(
            "lifetime fit is poor (monotone=%s, R^2=%.4f); window may contain oscillations",
            monotone,
            r_squared,
        )
    return LifetimeFit(tau=tau, stderr=stderr, poor_fit=poor, r_squared=r_squared)
