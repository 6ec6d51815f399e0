"""Human-readable and machine-readable renderings of command results."""

from __future__ import annotations

import configparser
import io
import math
from collections.abc import Iterable, Mapping

from .dynamics import LifetimeFit
from .estimation import Derived, FitResult
from .physics import DesignPoint
from .regimes import RegimeReport

__all__ = [
    "param_unit",
    "format_frequency",
    "design_report",
    "regime_report",
    "fit_report",
    "fit_block",
    "lifetime_report",
    "rabi_report",
]

Sections = list[tuple[str, list[str]]]

TWO_PI = 2.0 * math.pi

# parameter name -> (key suffix, divisor from SI)
_PARAM_UNITS: dict[str, tuple[str, float]] = {
    "omega_a": ("ghz", TWO_PI * 1e9),
    "omega_m": ("ghz", TWO_PI * 1e9),
    "omega_m0": ("ghz", TWO_PI * 1e9),
    "kappa_a": ("mhz", TWO_PI * 1e6),
    "kappa_a1": ("mhz", TWO_PI * 1e6),
    "kappa_m": ("mhz", TWO_PI * 1e6),
    "kappa": ("mhz", TWO_PI * 1e6),
    "g": ("mhz", TWO_PI * 1e6),
    "gamma": ("ghz_per_t", TWO_PI * 1e9),
}
_DISPLAY_UNITS = {"ghz": " GHz", "mhz": " MHz", "ghz_per_t": " GHz/T"}


def param_unit(name: str) -> tuple[str, float]:
    """Interface unit suffix and SI divisor for a fit parameter ('' for plain)."""
    return _PARAM_UNITS.get(name, ("", 1.0))


def _key(name: str) -> str:
    suffix, _ = param_unit(name)
    return f"{name}_{suffix}" if suffix else name


def _value(name: str, value: float) -> float:
    return value / param_unit(name)[1]


def format_frequency(hz: float) -> str:
    """Ordinary frequency with an auto-selected unit."""
    for unit, scale in (("GHz", 1e9), ("MHz", 1e6), ("kHz", 1e3)):
        if abs(hz) >= scale:
            return f"{hz / scale:.6g} {unit}"
    return f"{hz:.6g} Hz"


def _mhz(rate: float) -> str:
    return f"{rate / (TWO_PI * 1e6):.6g} MHz"


def _clean_lines(lines: Iterable[str | None]) -> list[str]:
    out: list[str] = []
    for line in lines:
        if line is None:
            continue
        text = str(line).rstrip()
        if text:
            out.append(text)
    return out or ["(none)"]


def _format_sections(sections: Sections) -> str:
    blocks: list[str] = []
    for title, lines in sections:
        blocks.append(title)
        for line in _clean_lines(lines):
            blocks.append(f"  {line}")
        blocks.append("")
    return "\n".join(blocks).strip()


def _regime_lines(report: RegimeReport) -> list[str]:
    lines = [
        f"Regime: {report.regime}",
        f"C = {report.C:.6g}",
        f"F_P = 1 + C = {report.F_P:.6g}",
        f"coherent (C >= 1): {'yes' if report.coherent else 'no'}",
    ]
    if math.isnan(report.g_over_omega):
        lines.append("g/omega: n/a")
    else:
        lines.append(f"g/omega = {report.g_over_omega:.4g}")
    lines.append(f"usc (threshold {report.usc_threshold:g}): {'yes' if report.usc else 'no'}")
    return lines


def regime_report(report: RegimeReport) -> str:
    return _format_sections([("Regime", _regime_lines(report)), ("Notes", list(report.notes))])


def design_report(
    *,
    omega_a: float,
    mode_volume: float,
    spins: float,
    eta: float | None,
    g: float,
    f_eff: float,
    regime: RegimeReport,
    table: Iterable[DesignPoint] = (),
) -> str:
    design = [
        f"Cavity frequency: {format_frequency(omega_a / TWO_PI)}",
        f"Mode volume: {mode_volume / 1e-9:.6g} mm^3",
        f"Spin count N: {spins:.6g}",
        f"Overlap eta: {eta:.6g}" if eta is not None else "Overlap eta: n/a (g given directly)",
        f"Coupling g: {_mhz(g)}",
        f"f_eff: {format_frequency(f_eff)}",
    ]
    sections: Sections = [("Design", design), ("Regime prediction", _regime_lines(regime))]
    rows = [
        f"d={p.diameter * 1e3:.4g} mm scale={p.scale:g}: g={_mhz(p.g)}, "
        f"f_a={format_frequency(p.omega_a / TWO_PI)}"
        for p in table
    ]
    if rows:
        sections.append(("Sweep", rows))
    return _format_sections(sections)


def fit_report(result: FitResult, derived: Derived | None, regime: RegimeReport | None) -> str:
    status = [
        f"Model: {result.model}",
        f"Converged: {'yes' if result.converged else 'no'} ({result.message})",
        f"Iterations: {result.iterations}",
        f"Residual norm: {result.residual_norm:.6g}",
    ]
    if result.singular:
        status.append("Warning: singular Jacobian, standard errors unreliable")
    params = []
    for name, value in result.params.items():
        suffix, _ = param_unit(name)
        unit = _DISPLAY_UNITS.get(suffix, "")
        err = result.stderr.get(name)
        shown = f"{_value(name, value):.9g}"
        if err is None:
            params.append(f"{name} = {shown}{unit} (fixed)")
        else:
            params.append(f"{name} = {shown} +/- {_value(name, err):.3g}{unit}")
    sections: Sections = [("Fit", status), ("Parameters", params)]
    if derived is not None:
        rabi = "inf" if math.isinf(derived.rabi_period) else f"{derived.rabi_period / 1e-9:.6g}"
        sections.append(
            (
                "Derived",
                [
                    f"C = {derived.C:.6g}",
                    f"F_P = {derived.F_P:.6g}",
                    f"splitting 2g = {_mhz(derived.splitting)}",
                    f"Rabi period pi/g = {rabi} ns",
                ],
            )
        )
    if regime is not None:
        sections.append(("Regime", _regime_lines(regime)))
    return _format_sections(sections)


def _block_value(value: float) -> str:
    return format(float(value), ".12g")


def fit_block(
    result: FitResult,
    derived: Derived | None = None,
    regime: RegimeReport | None = None,
    extra: Mapping[str, float] | None = None,
) -> str:
    """INI rendering of a fit, readable with configparser."""
    parser = configparser.ConfigParser(interpolation=None)
    parser["fit"] = {
        "model": result.model,
        "converged": str(result.converged).lower(),
        "singular": str(result.singular).lower(),
        "iterations": str(result.iterations),
        "residual_norm": _block_value(result.residual_norm),
        "message": result.message,
    }
    parser["params"] = {_key(n): _block_value(_value(n, v)) for n, v in result.params.items()}
    parser["stderr"] = {_key(n): _block_value(_value(n, v)) for n, v in result.stderr.items()}
    if derived is not None or regime is not None or extra:
        section: dict[str, str] = {}
        if derived is not None:
            section["c"] = _block_value(derived.C)
            section["f_p"] = _block_value(derived.F_P)
            section["splitting_mhz"] = _block_value(derived.splitting / (TWO_PI * 1e6))
            section["rabi_period_ns"] = _block_value(derived.rabi_period / 1e-9)
        for key, value in (extra or {}).items():
            section[key] = _block_value(value)
        if regime is not None:
            section["regime"] = regime.regime
            section["usc"] = str(regime.usc).lower()
        parser["derived"] = section
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue().rstrip() + "\n"


def lifetime_report(fit: LifetimeFit, window: tuple[float, float]) -> str:
    lines = [
        f"Window: {window[0] / 1e-9:.6g} .. {window[1] / 1e-9:.6g} ns",
        f"tau = {fit.tau / 1e-9:.6g} +/- {fit.stderr / 1e-9:.3g} ns",
        f"energy decay rate 1/tau = {_mhz(1.0 / fit.tau)}",
        f"R^2 = {fit.r_squared:.6f}",
    ]
    if fit.poor_fit:
        lines.append("Warning: poor exponential fit (oscillations or multi-rate decay in window)")
    return _format_sections([("Lifetime", lines)])


def rabi_report(*, predicted: float, measured: float, extinction_db: float) -> str:
    lines = [
        f"Predicted period pi/g = {predicted / 1e-9:.6g} ns",
        f"Measured beat period = {measured / 1e-9:.6g} ns",
        f"Deviation = {100.0 * (measured - predicted) / predicted:+.3g} %",
        f"Node extinction = {extinction_db:.3g} dB",
    ]
    return _format_sections([("Rabi oscillation", lines)])
