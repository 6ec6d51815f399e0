"""Coupling-regime classification and figures of merit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .physics import CoupledSystem, DomainError

__all__ = [
    "USC_THRESHOLD",
    "USC_THRESHOLD_LITERATURE",
    "REGIMES",
    "RegimeReport",
    "cooperativity",
    "classify",
    "classify_rates",
]

USC_THRESHOLD = 0.05
USC_THRESHOLD_LITERATURE = 0.1

REGIMES = ("strong", "MIT", "Purcell", "weak")


@dataclass(frozen=True)
class RegimeReport:
    regime: str
    usc: bool
    C: float
    g_over_omega: float
    F_P: float
    coherent: bool
    usc_threshold: float = USC_THRESHOLD
    notes: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")


def cooperativity(g: float, kappa_a: float, kappa_m: float) -> float:
    if kappa_a <= 0 or kappa_m <= 0:
        raise DomainError("cooperativity needs kappa_a > 0 and kappa_m > 0")
    if g < 0:
        raise DomainError("g must be >= 0")
    return g * g / (kappa_a * kappa_m)


def _compare(g: float, kappa: float, name: str, notes: list[str]) -> bool:
    if g == kappa:
        notes.append(f"tie: g == {name}, resolved toward the stronger label")
        return True
    relation = ">" if g > kappa else "<"
    notes.append(f"g {relation} {name} ({g / kappa:.4g}x)")
    return g > kappa


def classify_rates(
    g: float,
    kappa_a: float,
    kappa_m: float,
    omega: float | None = None,
    usc_threshold: float = USC_THRESHOLD,
) -> RegimeReport:
    """Classify from bare rates; ``omega`` is the smaller mode frequency."""
    C = cooperativity(g, kappa_a, kappa_m)
    notes: list[str] = []
    above_a = _compare(g, kappa_a, "kappa_a", notes)
    above_m = _compare(g, kappa_m, "kappa_m", notes)
    if above_a and above_m:
        regime = "strong"
    elif above_m:
        regime = "MIT"
    elif above_a:
        regime = "Purcell"
    else:
        regime = "weak"
    if omega is not None and omega > 0:
        ratio = g / omega
        usc = ratio >= usc_threshold
        notes.append(
            f"g/omega = {ratio:.4g}: usc threshold {usc_threshold:g} "
            f"(literature convention {USC_THRESHOLD_LITERATURE:g} -> "
            f"{'usc' if ratio >= USC_THRESHOLD_LITERATURE else 'not usc'})"
        )
    else:
        ratio = math.nan
        usc = False
        notes.append("g/omega unavailable: no mode frequency given")
    coherent = C >= 1.0
    notes.append(f"C = {C:.6g} ({'>=' if coherent else '<'} 1)")
    return RegimeReport(
        regime=regime,
        usc=usc,
        C=C,
        g_over_omega=ratio,
        F_P=1.0 + C,
        coherent=coherent,
        usc_threshold=usc_threshold,
        notes=tuple(notes),
    )


def classify(system: CoupledSystem, usc_threshold: float = USC_THRESHOLD) -> RegimeReport:
    omega_a = system.cavity.omega_a
    omega_m = system.omega_m
    omega = min(omega_a, omega_m) if omega_m > 0 else omega_a
    return classify_rates(
        system.g,
        system.cavity.kappa_a,
        system.magnon.kappa_m,
        omega=omega,
        usc_threshold=usc_threshold,
    )
