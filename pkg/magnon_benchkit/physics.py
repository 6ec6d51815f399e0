"""Physical types and forward formulas for the magnon / cavity-photon system.

All quantities are SI internally: angular frequencies and decay rates in rad/s,
fields in tesla, lengths in metres. Every decay rate is an amplitude
half-linewidth (fields decay as exp(-kappa t), energy as exp(-2 kappa t)).

Public API:
  CavityMode, MagnonMode, CoupledSystem, SpherePosition
  spin_count(magnon) -> N
  magnon_frequency(magnon, b0) -> omega_m
  te101_frequency(dims) -> f (Hz)
  te101_field(x, y, cavity) -> (h_x, h_y)
  overlap_eta(pos, cavity) -> eta
  coupling_strength(cavity, magnon, eta) -> g
  effective_frequency(cavity, magnon) -> f_eff (Hz)
  position_sweep(cavity, magnon, positions) -> [(x, eta, g), ...]
  design_sweep(cavity, magnon, diameters, scales) -> [DesignPoint, ...]
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "HBAR",
    "MU0",
    "C_LIGHT",
    "GAMMA_YIG",
    "RHO_YIG",
    "SPIN_FE3",
    "DomainError",
    "NumericError",
    "CavityMode",
    "MagnonMode",
    "CoupledSystem",
    "SpherePosition",
    "DesignPoint",
    "sphere_volume",
    "spin_count",
    "magnon_frequency",
    "te101_frequency",
    "te101_field",
    "overlap_eta",
    "coupling_strength",
    "effective_frequency",
    "position_sweep",
    "design_sweep",
]

HBAR = 1.054571817e-34  # J s
MU0 = 1.25663706e-6  # N / A^2
C_LIGHT = 2.99792458e8  # m / s

GAMMA_YIG = 2.0 * math.pi * 28e9  # rad / (s T)
RHO_YIG = 4.22e27  # spins / m^3
SPIN_FE3 = 2.5


class DomainError(ValueError):
    """An input lies outside the domain of the requested operation."""


class NumericError(ArithmeticError):
    """A numerical solution required by the model does not exist."""


Dims = tuple[float, float, float]


@dataclass(frozen=True)
class CavityMode:
    """Microwave resonator mode.

    ``dims`` are the inner box lengths (L_x, L_y, L_z). The TE101 field varies
    along x and y and is uniform along the short z axis. ``mode_volume``
    defaults to the geometric box volume. Both may be omitted for systems whose
    coupling strength is given directly.
    """

    omega_a: float
    kappa_a: float
    kappa_a1: float
    dims: Dims | None = None
    mode_volume: float | None = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.omega_a) or self.omega_a <= 0:
            raise ValueError("omega_a must be > 0")
        if not math.isfinite(self.kappa_a) or self.kappa_a <= 0:
            raise ValueError("kappa_a must be > 0")
        if not (0 < self.kappa_a1 <= self.kappa_a):
            raise ValueError("kappa_a1 must satisfy 0 < kappa_a1 <= kappa_a")
        if self.dims is not None:
            dims = tuple(float(d) for d in self.dims)
            if len(dims) != 3 or any(not math.isfinite(d) or d <= 0 for d in dims):
                raise ValueError("dims must be three lengths > 0")
            object.__setattr__(self, "dims", dims)
            if self.mode_volume is None:
                object.__setattr__(self, "mode_volume", dims[0] * dims[1] * dims[2])
        if self.mode_volume is not None and not self.mode_volume > 0:
            raise ValueError("mode_volume must be > 0")

    @property
    def frequency(self) -> float:
        """Resonance frequency in Hz."""
        return self.omega_a / (2.0 * math.pi)

    def require_volume(self) -> float:
        if self.mode_volume is None:
            raise DomainError("cavity has no geometry: set dims or mode_volume")
        return float(self.mode_volume)

    def require_dims(self) -> Dims:
        if self.dims is None:
            raise DomainError("cavity has no box dimensions")
        return self.dims


@dataclass(frozen=True)
class MagnonMode:
    """Uniform (Kittel) magnon mode of a YIG sphere.

    A zero radius stands for "no sphere": it carries no spins and couples to
    nothing.
    """

    kappa_m: float
    radius: float
    omega_m0: float = 0.0
    gamma: float = GAMMA_YIG
    spin_density: float = RHO_YIG
    spin: float = SPIN_FE3

    def __post_init__(self) -> None:
        if not math.isfinite(self.kappa_m) or self.kappa_m <= 0:
            raise ValueError("kappa_m must be > 0")
        if not math.isfinite(self.radius) or self.radius < 0:
            raise ValueError("radius must be >= 0")
        if not self.spin_density > 0:
            raise ValueError("spin_density must be > 0")
        if not self.spin > 0:
            raise ValueError("spin must be > 0")
        if not self.gamma > 0:
            raise ValueError("gamma must be > 0")

    @property
    def volume(self) -> float:
        return sphere_volume(self.radius)


@dataclass(frozen=True)
class CoupledSystem:
    cavity: CavityMode
    magnon: MagnonMode
    g: float
    bias_field: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.g) or self.g < 0:
            raise ValueError("g must be >= 0")
        if not math.isfinite(self.bias_field) or self.bias_field < 0:
            raise ValueError("bias_field must be >= 0")

    @classmethod
    def on_resonance(cls, cavity: CavityMode, magnon: MagnonMode, g: float) -> CoupledSystem:
        """Bias the magnon so that omega_m(B0) == omega_a."""
        b0 = (cavity.omega_a - magnon.omega_m0) / magnon.gamma
        if b0 < 0:
            raise DomainError("magnon offset lies above the cavity; no resonant bias exists")
        return cls(cavity=cavity, magnon=magnon, g=g, bias_field=b0)

    @property
    def omega_m(self) -> float:
        return magnon_frequency(self.magnon, self.bias_field)

    @property
    def detuning(self) -> float:
        """omega_m - omega_a (rad/s)."""
        return self.omega_m - self.cavity.omega_a

    @property
    def resonant_field(self) -> float:
        return (self.cavity.omega_a - self.magnon.omega_m0) / self.magnon.gamma

    def with_bias(self, bias_field: float) -> CoupledSystem:
        return replace(self, bias_field=float(bias_field))

    def with_coupling(self, g: float) -> CoupledSystem:
        return replace(self, g=float(g))


@dataclass(frozen=True)
class SpherePosition:
    """Sphere location: ``x`` from the field maximum along the long axis,
    ``wall_offset`` from the wall along y (0 for a wall-mounted sphere)."""

    x: float
    wall_offset: float = 0.0


def sphere_volume(radius: float) -> float:
    return 4.0 / 3.0 * math.pi * radius**3


def spin_count(magnon: MagnonMode) -> float:
    return magnon.spin_density * sphere_volume(magnon.radius)


def magnon_frequency(magnon: MagnonMode, b0: float) -> float:
    if b0 < 0:
        raise DomainError("bias field must be >= 0")
    return magnon.gamma * b0 + magnon.omega_m0


def te101_frequency(dims: Sequence[float]) -> float:
    lx, ly = float(dims[0]), float(dims[1])
    return 0.5 * C_LIGHT * math.sqrt(1.0 / lx**2 + 1.0 / ly**2)


def te101_field(x, y, cavity: CavityMode):
    """Normalised TE101 magnetic field in the x-y plane.

    ``x`` is measured from the cavity centre, ``y`` from the wall. The
    components are scaled so that |h| = 1 at the centre of the wall
    (x = 0, y = 0), where the sphere couples best.
    """
    lx, ly, _ = cavity.require_dims()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u = x + lx / 2.0
    # H_x ~ (1/L_y) sin(pi u/L_x) cos(pi y/L_y), H_y ~ -(1/L_x) cos(pi u/L_x) sin(pi y/L_y)
    hx = np.sin(np.pi * u / lx) * np.cos(np.pi * y / ly)
    hy = -(ly / lx) * np.cos(np.pi * u / lx) * np.sin(np.pi * y / ly)
    return hx, hy


def overlap_eta(pos: SpherePosition, cavity: CavityMode) -> float:
    lx, ly, _ = cavity.require_dims()
    tol = 1e-12 * lx
    if abs(pos.x) > lx / 2.0 + tol:
        raise DomainError(f"sphere x={pos.x:g} m lies outside the cavity (|x| <= {lx / 2:g} m)")
    if pos.wall_offset < -tol or pos.wall_offset > ly + tol:
        raise DomainError(f"sphere wall offset {pos.wall_offset:g} m lies outside the cavity")
    hx, hy = te101_field(pos.x, pos.wall_offset, cavity)
    eta = math.sqrt(float(hx) ** 2 + float(hy) ** 2)
    return min(1.0, max(0.0, eta))


def coupling_strength(cavity: CavityMode, magnon: MagnonMode, eta: float) -> float:
    if not (0.0 <= eta <= 1.0):
        raise DomainError("eta must lie in [0, 1]")
    volume = cavity.require_volume()
    n_spins = spin_count(magnon)
    vacuum = math.sqrt(HBAR * cavity.omega_a * MU0 / volume)
    return 0.5 * eta * magnon.gamma * vacuum * math.sqrt(2.0 * n_spins * magnon.spin)


def effective_frequency(cavity: CavityMode, magnon: MagnonMode) -> float:
    return cavity.frequency * magnon.volume / cavity.require_volume()


def position_sweep(
    cavity: CavityMode, magnon: MagnonMode, positions: Iterable[float], wall_offset: float = 0.0
) -> list[tuple[float, float, float]]:
    """Return ``[(x, eta, g), ...]`` for a sphere moved along x."""
    out: list[tuple[float, float, float]] = []
    for x in positions:
        eta = overlap_eta(SpherePosition(float(x), wall_offset), cavity)
        out.append((float(x), eta, coupling_strength(cavity, magnon, eta)))
    return out


@dataclass(frozen=True)
class DesignPoint:
    diameter: float
    scale: float
    omega_a: float
    mode_volume: float
    spins: float
    f_eff: float
    g: float


def design_sweep(
    cavity: CavityMode,
    magnon: MagnonMode,
    diameters: Iterable[float],
    scales: Iterable[float] = (1.0,),
    eta: float = 1.0,
) -> list[DesignPoint]:
    """Forward design over sphere diameters and cavity scale factors.

    A scale factor shrinks or grows every box dimension; with a box geometry
    the TE101 frequency follows the new dimensions, otherwise the configured
    frequency is kept and only the volume scales.
    """
    points: list[DesignPoint] = []
    scale_list = [float(s) for s in scales]
    for diameter in diameters:
        sphere = replace(magnon, radius=float(diameter) / 2.0)
        for scale in scale_list:
            if scale <= 0:
                raise DomainError("cavity scale factors must be > 0")
            if scale == 1.0:
                scaled = cavity
            elif cavity.dims is not None:
                dims = tuple(d * scale for d in cavity.dims)
                scaled = replace(
                    cavity,
                    omega_a=2.0 * math.pi * te101_frequency(dims),
                    dims=dims,
                    mode_volume=None,
                )
            else:
                scaled = replace(cavity, mode_volume=cavity.require_volume() * scale**3)
            points.append(
                DesignPoint(
                    diameter=float(diameter),
                    scale=scale,
                    omega_a=scaled.omega_a,
                    mode_volume=scaled.require_volume(),
                    spins=spin_count(sphere),
                    f_eff=effective_frequency(scaled, sphere),
                    g=coupling_strength(scaled, sphere, eta),
                )
            )
    return points
