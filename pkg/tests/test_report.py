import configparser
import math

import pytest

from magnon_benchkit.dynamics import LifetimeFit
from magnon_benchkit.estimation import FitResult, derived_quantities
from magnon_benchkit.regimes import classify_rates
from magnon_benchkit.report import (
    design_report,
    fit_block,
    fit_report,
    format_frequency,
    lifetime_report,
    param_unit,
    rabi_report,
    regime_report,
)

MHZ = 2 * math.pi * 1e6
GHZ = 2 * math.pi * 1e9


def _result():
    return FitResult(
        model="spectrum",
        params={
            "omega_a": 7.875 * GHZ,
            "omega_m": 7.875 * GHZ,
            "kappa_a": 2.67 * MHZ,
            "kappa_a1": 1.335 * MHZ,
            "kappa_m": 2.13 * MHZ,
            "g": 10.8 * MHZ,
        },
        stderr={"g": 0.01 * MHZ, "kappa_a": 0.02 * MHZ, "kappa_m": 0.02 * MHZ},
        residual_norm=1e-3,
        iterations=7,
        converged=True,
        message="relative cost decrease below tolerance",
    )


def test_format_frequency_picks_unit():
    assert format_frequency(7.875e9) == "7.875 GHz"
    assert format_frequency(2.5e3) == "2.5 kHz"
    assert format_frequency(12.0) == "12 Hz"


def test_param_units():
    assert param_unit("g") == ("mhz", MHZ)
    assert param_unit("gamma")[0] == "ghz_per_t"
    assert param_unit("log_energy0") == ("", 1.0)


def test_fit_block_parses_back():
    result = _result()
    regime = classify_rates(10.8 * MHZ, 2.67 * MHZ, 2.13 * MHZ, omega=7.875 * GHZ)
    text = fit_block(result, derived_quantities(result), regime, {"crossing_field_mt": 281.25})
    parser = configparser.ConfigParser(interpolation=None)
    parser.read_string(text)
    assert parser["fit"]["converged"] == "true"
    assert float(parser["params"]["g_mhz"]) == pytest.approx(10.8)
    assert float(parser["params"]["omega_a_ghz"]) == pytest.approx(7.875)
    assert float(parser["stderr"]["g_mhz"]) == pytest.approx(0.01)
    assert "omega_a_ghz" not in parser["stderr"]
    assert float(parser["derived"]["rabi_period_ns"]) == pytest.approx(46.2963, rel=1e-5)
    assert float(parser["derived"]["crossing_field_mt"]) == 281.25
    assert parser["derived"]["regime"] == "strong"


def test_fit_report_marks_fixed_parameters():
    text = fit_report(_result(), None, None)
    assert text.startswith("Fit\n")
    assert "omega_a = 7.875 GHz (fixed)" in text
    assert "g = 10.8 +/- 0.01 MHz" in text
    assert "Derived" not in text


def test_regime_report_sections():
    text = regime_report(classify_rates(1.0, 2.0, 3.0))
    assert "Regime: weak" in text
    assert "g/omega: n/a" in text
    assert "\nNotes\n" in text


def test_design_report_without_overlap():
    regime = classify_rates(10.8 * MHZ, 2.67 * MHZ, 2.13 * MHZ, omega=7.875 * GHZ)
    text = design_report(
        omega_a=7.875 * GHZ,
        mode_volume=8127e-9,
        spins=1.03e17,
        eta=None,
        g=10.8 * MHZ,
        f_eff=0.0239e9,
        regime=regime,
    )
    assert "Mode volume: 8127 mm^3" in text
    assert "n/a (g given directly)" in text
    assert "Sweep" not in text


def test_lifetime_and_rabi_reports():
    fit = LifetimeFit(tau=35.8e-9, stderr=0.1e-9, poor_fit=True, r_squared=0.95)
    text = lifetime_report(fit, (30e-9, 200e-9))
    assert "Window: 30 .. 200 ns" in text
    assert "tau = 35.8 +/- 0.1 ns" in text
    assert "Warning: poor exponential fit" in text
    rabi = rabi_report(predicted=46.3e-9, measured=46.5e-9, extinction_db=25.0)
    assert "Deviation = +0.432 %" in rabi
    assert "Node extinction = 25 dB" in rabi
