import math

import pytest

from magnon_benchkit.config import ConfigError, load_config, parse_config
from magnon_benchkit.physics import GAMMA_YIG

MHZ = 2 * math.pi * 1e6
GHZ = 2 * math.pi * 1e9

STRONG = """
[system]
g_source = direct
cavity_freq_ghz = 7.875
kappa_a_mhz = 2.67
kappa_m_mhz = 2.13
g_mhz = 10.8

[sweep]
freq_span_mhz = 90
freq_points = 901
b_start_mt = 279
b_stop_mt = 283.5
b_points = 46

[output]
path = out.csv
"""

GEOMETRY = """
[system]
g_source = geometry
cavity_freq_ghz = 7.875
cavity_dims_mm = 43, 21, 9
sphere_diameter_mm = 0.36
sphere_x_mm = 0
kappa_a_mhz = 2.67
kappa_m_mhz = 2.13
"""


def test_direct_system_in_si():
    cfg = parse_config(STRONG)
    system = cfg.system.coupled
    assert system.cavity.omega_a == pytest.approx(7.875 * GHZ)
    assert system.cavity.kappa_a1 == pytest.approx(1.335 * MHZ)
    assert system.g == pytest.approx(10.8 * MHZ)
    assert system.bias_field == pytest.approx(0.28125)
    assert cfg.sweep.freq_span == pytest.approx(90 * MHZ)
    assert cfg.sweep.b_start == pytest.approx(0.279)
    assert cfg.sweep.b_points == 46
    assert cfg.output.path == "out.csv"


def test_geometry_system_computes_coupling():
    cfg = parse_config(GEOMETRY)
    assert cfg.system.g_source == "geometry"
    assert cfg.system.eta == pytest.approx(1.0)
    assert cfg.system.g / MHZ == pytest.approx(9.03, rel=1e-2)
    assert cfg.system.magnon.radius == pytest.approx(0.18e-3)


def test_gyromagnetic_units_agree():
    text = STRONG.replace("g_mhz = 10.8", "g_mhz = 10.8\ngamma_mhz_per_mt = 28")
    assert parse_config(text).system.magnon.gamma == pytest.approx(GAMMA_YIG)


def test_time_and_init_keys():
    cfg = parse_config(
        STRONG
        + """
[task]
window_start_ns = 10
window_stop_ns = 300
init_g_mhz = 9
model = field_map
restarts = 4
"""
    )
    assert cfg.task.window == pytest.approx((10e-9, 300e-9))
    assert cfg.task.init["g"] == pytest.approx(9 * MHZ)
    assert cfg.task.model == "field_map"
    assert cfg.task.restarts == 4


@pytest.mark.parametrize(
    "edit, message",
    [
        (("kappa_m_mhz = 2.13", "kappa_m_mhz = 2.13\nkappa_m_ghz = 0.002"), "given twice"),
        (("kappa_m_mhz = 2.13", "kappa_m_furlongs = 2.13"), "unknown key"),
        (("g_mhz = 10.8", "g_mhz = 10.8\neta = 0.5"), "forbids eta"),
        (("g_mhz = 10.8", "g_mhz = ten"), "cannot parse"),
        (("g_source = direct", "g_source = magic"), "g_source"),
        (("kappa_a_mhz = 2.67", "kappa_a_mhz = 2.67\nkappa_a1_mhz = 5"), "kappa_a1"),
        (("[output]", "[plots]"), "unknown section"),
        (("freq_span_mhz = 90", "freq_span_mhz = 90\nfreq_start_ghz = 7.8"), "not both"),
        (("freq_points = 901", "freq_points = 2"), "freq_points must be >= 3"),
        (("b_points = 46", "b_points = 0"), "b_points must be >= 1"),
        (("g_mhz = 10.8", "g_mhz = 10.8\ngamma_ghz_per_t = 0"), "gamma must be > 0"),
        (("[output]", "[task]\ntarget = phase\n\n[output]"), "target must be one of"),
    ],
)
def test_invalid_configs(edit, message):
    old, new = edit
    with pytest.raises(ConfigError, match=message):
        parse_config(STRONG.replace(old, new))


def test_geometry_forbids_direct_g():
    with pytest.raises(ConfigError, match="forbids g"):
        parse_config(GEOMETRY + "g_mhz = 10\n")


def test_pulse_needs_end_time():
    with pytest.raises(ConfigError, match="pulse_off"):
        parse_config(STRONG.replace("[output]", "pulse = raised-cosine\n\n[output]"))


def test_window_needs_both_ends():
    with pytest.raises(ConfigError, match="window"):
        parse_config(STRONG + "\n[task]\nwindow_start_ns = 10\n")


def test_missing_system_block_is_allowed():
    cfg = parse_config("[sweep]\nfreq_points = 11\n")
    assert cfg.system is None
    assert cfg.sweep.freq_points == 11


def test_load_config_from_file(tmp_path):
    path = tmp_path / "strong.ini"
    path.write_text(STRONG, encoding="utf-8")
    assert load_config(path).source == str(path)
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.ini")


def test_explicit_zero_offset_is_kept():
    cfg = parse_config(STRONG.replace("g_mhz = 10.8", "g_mhz = 10.8\nmagnon_offset_ghz = 0"))
    assert cfg.system.magnon.omega_m0 == 0.0
    shifted = parse_config(STRONG.replace("g_mhz = 10.8", "g_mhz = 10.8\nmagnon_offset_ghz = -1"))
    assert shifted.system.magnon.omega_m0 == pytest.approx(-1 * GHZ)


def test_fit_target_defaults_to_auto():
    assert parse_config(STRONG).task.target == "auto"
    assert parse_config(STRONG + "\n[task]\ntarget = Complex\n").task.target == "complex"
    assert parse_config(STRONG).task.restarts is None
