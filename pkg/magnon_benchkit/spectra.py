"""Frequency-domain forward models.

Public API:
  reflection_coefficient(omega, omega_a, omega_m, kappa_a, kappa_a1, kappa_m, g)
  reflection(system, omega) -> complex
  spectrum(system, grid) -> ReflectionSpectrum
  field_map(system, b_values, grid) -> |r|^2 array (row per bias field)
  normal_modes_rwa(system) / normal_modes_full(system) -> NormalModes
  exceptional_point(system) -> g at which the RWA eigenvalues coalesce
  mit_observables(system) -> MitObservables
  purcell_kappa(system) -> (kappa_eff, F_P)
  group_delay(spectrum) -> per-point delay (s)

The complex time convention is exp(-i omega t): decaying eigenvalues carry a
negative imaginary part.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .physics import CoupledSystem, DomainError, NumericError
from .regimes import cooperativity

__all__ = [
    "FrequencyGrid",
    "ReflectionSpectrum",
    "NormalModes",
    "MitObservables",
    "FULL_MODEL_LABEL",
    "reflection_coefficient",
    "reflection",
    "spectrum",
    "field_map",
    "normal_modes_rwa",
    "normal_modes_full",
    "exceptional_point",
    "mit_observables",
    "purcell_kappa",
    "group_delay",
]

log = logging.getLogger("magnon_benchkit.spectra")

FULL_MODEL_LABEL = "full dipole coupling, perturbative losses (model-dependent)"


@dataclass(frozen=True)
class FrequencyGrid:
    start: float
    stop: float
    points: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("grid bounds must be finite")
        if self.stop <= self.start:
            raise ValueError("stop must be > start")
        if int(self.points) < 2:
            raise ValueError("points must be >= 2")
        object.__setattr__(self, "points", int(self.points))

    @classmethod
    def around(cls, center: float, half_span: float, points: int = 2001) -> FrequencyGrid:
        return cls(center - half_span, center + half_span, points)

    @property
    def omega(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)

    @property
    def step(self) -> float:
        return (self.stop - self.start) / (self.points - 1)


@dataclass(frozen=True, eq=False)
class ReflectionSpectrum:
    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.points,):
            raise ValueError("values must hold one entry per grid point")
        object.__setattr__(self, "values", values)

    @property
    def omega(self) -> np.ndarray:
        return self.grid.omega

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    @property
    def phase(self) -> np.ndarray:
        return np.angle(self.values)


@dataclass(frozen=True)
class NormalModes:
    omega_plus: complex
    omega_minus: complex
    model: str = "rwa"

    def __post_init__(self) -> None:
        tol = 1e-9 * max(abs(self.omega_plus), abs(self.omega_minus), 1.0)
        if self.omega_plus.imag > tol or self.omega_minus.imag > tol:
            raise ValueError("normal modes must not grow (imaginary parts <= 0)")

    @property
    def splitting(self) -> float:
        return self.omega_plus.real - self.omega_minus.real


class MitObservables(NamedTuple):
    height: float
    linewidth: float
    matched: bool


def reflection_coefficient(omega, omega_a, omega_m, kappa_a, kappa_a1, kappa_m, g):
    """Single-port reflection of the cavity coupled to the magnon.

    All arguments broadcast with numpy rules.
    """
    omega = np.asarray(omega, dtype=float)
    magnon = 1j * (np.asarray(omega_m) - omega) + kappa_m
    cavity = 1j * (np.asarray(omega_a) - omega) + kappa_a + np.square(g) / magnon
    return -1.0 + 2.0 * np.asarray(kappa_a1) / cavity


def _system_args(system: CoupledSystem) -> tuple[float, ...]:
    cav = system.cavity
    return (cav.omega_a, system.omega_m, cav.kappa_a, cav.kappa_a1, system.magnon.kappa_m, system.g)


def reflection(system: CoupledSystem, omega):
    r = reflection_coefficient(omega, *_system_args(system))
    return complex(r) if np.ndim(r) == 0 else r


def spectrum(system: CoupledSystem, grid: FrequencyGrid) -> ReflectionSpectrum:
    return ReflectionSpectrum(grid, reflection_coefficient(grid.omega, *_system_args(system)))


def field_map(system: CoupledSystem, b_values, grid: FrequencyGrid) -> np.ndarray:
    """|r|^2 with one row per bias field and one column per grid frequency."""
    b = np.atleast_1d(np.asarray(b_values, dtype=float))
    if b.ndim != 1 or b.size == 0:
        raise DomainError("bias fields must be a non-empty 1-D sequence")
    if np.any(b < 0):
        raise DomainError("bias fields must be >= 0")
    if b.size > 1 and np.any(np.diff(b) <= 0):
        raise DomainError("bias fields must be strictly ascending")
    magnon = system.magnon
    cav = system.cavity
    omega_m = magnon.gamma * b[:, None] + magnon.omega_m0
    r = reflection_coefficient(
        grid.omega[None, :],
        cav.omega_a,
        omega_m,
        cav.kappa_a,
        cav.kappa_a1,
        magnon.kappa_m,
        system.g,
    )
    return np.abs(r) ** 2


def normal_modes_rwa(system: CoupledSystem) -> NormalModes:
    """Eigenvalues of [[w_a - i k_a, g], [g, w_m - i k_m]]."""
    a = complex(system.cavity.omega_a, -system.cavity.kappa_a)
    b = complex(system.omega_m, -system.magnon.kappa_m)
    mean = 0.5 * (a + b)
    root = np.sqrt(complex(0.25 * (a - b) ** 2 + system.g**2))
    lam1, lam2 = mean + root, mean - root
    # a tie in the real part (below the exceptional point) keeps the less damped mode on top
    if (lam1.real, lam1.imag) < (lam2.real, lam2.imag):
        lam1, lam2 = lam2, lam1
    return NormalModes(complex(lam1), complex(lam2), model="rwa")


def normal_modes_full(system: CoupledSystem) -> NormalModes:
    """Positive-frequency polariton branches including counter-rotating terms.

    Solves (w^2 - w_a^2)(w^2 - w_m^2) = 4 g^2 w_a w_m for the lossless
    oscillators. Loss rates are attached from the RWA eigenvector weights.
    """
    wa = system.cavity.omega_a
    wm = system.omega_m
    g = system.g
    if wm <= 0:
        raise NumericError("beyond-RWA branches need omega_m > 0")
    mean = 0.5 * (wa * wa + wm * wm)
    root = math.sqrt((0.5 * (wa * wa - wm * wm)) ** 2 + 4.0 * g * g * wa * wm)
    x_plus = mean + root
    x_minus = mean - root
    if x_minus <= 0:
        raise NumericError(
            f"no positive lower polariton branch (g/sqrt(w_a w_m) = {g / math.sqrt(wa * wm):.3g})"
        )
    ratio = g / min(wa, wm)
    if ratio > 0.3:
        log.warning("g/omega = %.3g lies beyond the validated range (<= 0.3)", ratio)
    _, vecs = np.linalg.eigh(np.array([[wa, g], [g, wm]], dtype=float))
    weights = np.abs(vecs) ** 2
    kappas = np.array([system.cavity.kappa_a, system.magnon.kappa_m])
    decay_minus, decay_plus = (weights.T @ kappas).tolist()
    return NormalModes(
        complex(math.sqrt(x_plus), -decay_plus),
        complex(math.sqrt(x_minus), -decay_minus),
        model=FULL_MODEL_LABEL,
    )


def exceptional_point(system: CoupledSystem) -> float:
    return 0.5 * abs(system.cavity.kappa_a - system.magnon.kappa_m)


def _resonant(system: CoupledSystem) -> bool:
    return math.isclose(system.omega_m, system.cavity.omega_a, rel_tol=1e-9)


def mit_observables(system: CoupledSystem) -> MitObservables:
    """Transparency window height and FWHM for a matched, resonant system."""
    cav = system.cavity
    kappa_m = system.magnon.kappa_m
    C = cooperativity(system.g, cav.kappa_a, kappa_m)
    matched = math.isclose(cav.kappa_a1, 0.5 * cav.kappa_a, rel_tol=1e-9)
    if not matched:
        log.warning(
            "MIT closed form assumes kappa_a1 = kappa_a/2 (got kappa_a1/kappa_a = %.4g)",
            cav.kappa_a1 / cav.kappa_a,
        )
    if not _resonant(system):
        log.warning("MIT closed form assumes omega_m == omega_a")
    height = (C / (1.0 + C)) ** 2
    return MitObservables(height=height, linewidth=2.0 * (1.0 + C) * kappa_m, matched=matched)


def purcell_kappa(system: CoupledSystem) -> tuple[float, float]:
    """Purcell-enhanced cavity decay rate and factor, (kappa_a (1 + C), 1 + C)."""
    if not _resonant(system):
        log.warning("Purcell formula assumes omega_m == omega_a")
    C = cooperativity(system.g, system.cavity.kappa_a, system.magnon.kappa_m)
    factor = 1.0 + C
    return system.cavity.kappa_a * factor, factor


def group_delay(spec: ReflectionSpectrum) -> np.ndarray:
    """tau_g = d(arg r)/d omega by central differences on the unwrapped phase.

    Positive values are delays under the exp(-i omega t) convention.
    """
    if spec.grid.points < 3:
        raise DomainError("group delay needs at least 3 grid points")
    phase = np.unwrap(np.angle(spec.values))
    return np.gradient(phase, spec.omega)
