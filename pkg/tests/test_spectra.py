import math

import numpy as np
import pytest

from magnon_benchkit import dsp
from magnon_benchkit.physics import NumericError
from magnon_benchkit.regimes import cooperativity
from magnon_benchkit.spectra import (
    FrequencyGrid,
    exceptional_point,
    field_map,
    group_delay,
    mit_observables,
    normal_modes_full,
    normal_modes_rwa,
    purcell_kappa,
    reflection,
    reflection_coefficient,
    spectrum,
)

MHZ = 2 * math.pi * 1e6
GHZ = 2 * math.pi * 1e9


def test_critically_coupled_bare_cavity_has_zero_reflection(make_system):
    system = make_system(7.875, 2.67, 2.13, 0.0)
    assert abs(reflection(system, system.cavity.omega_a)) < 1e-12


def test_reflection_is_passive(strong_system, mit_system, purcell_system, usc_system):
    for system in (strong_system, mit_system, purcell_system, usc_system):
        grid = FrequencyGrid.around(system.cavity.omega_a, 10 * system.g + 10 * MHZ, 4001)
        assert np.all(spectrum(system, grid).power <= 1.0 + 1e-12)


def test_strong_splitting_matches_eigenvalues(strong_system):
    modes = normal_modes_rwa(strong_system)
    half_diff = 0.5 * (2.67 - 2.13) * MHZ
    expected = 2 * math.sqrt((10.8 * MHZ) ** 2 - half_diff**2)
    assert modes.splitting == pytest.approx(expected, rel=1e-9)
    assert modes.omega_plus.imag < 0 and modes.omega_minus.imag < 0
    total = modes.omega_plus.imag + modes.omega_minus.imag
    assert total == pytest.approx(-(2.67 + 2.13) * MHZ, rel=1e-9)


def test_below_exceptional_point_modes_share_frequency(purcell_system):
    assert exceptional_point(purcell_system) == pytest.approx(0.5 * (19 - 1.07) * MHZ)
    assert purcell_system.g < exceptional_point(purcell_system)
    modes = normal_modes_rwa(purcell_system)
    assert abs(modes.splitting) < 1.0
    slow = max(modes.omega_plus.imag, modes.omega_minus.imag)
    assert -slow / MHZ == pytest.approx(2.2215, rel=1e-3)


def test_mit_height_matches_spectrum_at_resonance(mit_system):
    obs = mit_observables(mit_system)
    assert obs.matched
    assert obs.height == pytest.approx(0.6035, rel=1e-3)
    r = reflection(mit_system, mit_system.cavity.omega_a)
    assert abs(r) ** 2 == pytest.approx(obs.height, rel=1e-9)


@pytest.mark.parametrize("C", [1.0, 3.76, 10.0])
def test_mit_window_width(make_system, C):
    kappa_a, kappa_m = 50.0, 0.02
    g = math.sqrt(C * kappa_a * kappa_m)
    system = make_system(5.0, kappa_a, kappa_m, g)
    obs = mit_observables(system)
    half = 5 * (1 + C) * kappa_m * MHZ
    spec = spectrum(system, FrequencyGrid.around(system.cavity.omega_a, half, 20001))
    above = spec.omega[spec.power >= 0.5 * obs.height]
    assert above.max() - above.min() == pytest.approx(obs.linewidth, rel=2e-2)


def test_purcell_factor(purcell_system):
    kappa_eff, factor = purcell_kappa(purcell_system)
    assert factor == pytest.approx(1.95, rel=1e-3)
    assert kappa_eff == pytest.approx(1.07 * MHZ * factor, rel=1e-12)


def test_mit_group_delay_is_positive(mit_system):
    grid = FrequencyGrid.around(mit_system.cavity.omega_a, 2 * MHZ, 4001)
    delay = group_delay(spectrum(mit_system, grid))
    g, ka, km = 5.4 * MHZ, 34.9 * MHZ, 0.24 * MHZ
    C = g * g / (ka * km)
    expected = (g * g / (km * km) - 1) / (ka * C * (1 + C))
    assert delay[2000] > 0
    assert delay[2000] == pytest.approx(expected, rel=1e-2)
    assert 1.4e-7 < delay[2000] < 1.55e-7


def test_undercoupled_cavity_advances(make_system):
    system = make_system(7.875, 2.67, 2.13, 0.0, kappa_a1_mhz=0.5)
    grid = FrequencyGrid.around(system.cavity.omega_a, 10 * MHZ, 2001)
    assert group_delay(spectrum(system, grid))[1000] < 0


def test_field_map_rows_follow_bias(strong_system):
    grid = FrequencyGrid.around(strong_system.cavity.omega_a, 50 * MHZ, 501)
    b0 = strong_system.bias_field
    rows = field_map(strong_system, [b0 - 1e-3, b0, b0 + 1e-3], grid)
    assert rows.shape == (3, 501)
    np.testing.assert_allclose(rows[1], spectrum(strong_system, grid).power, rtol=1e-12)
    with pytest.raises(ValueError):
        field_map(strong_system, [b0, b0 - 1e-3], grid)


def test_full_model_branches_at_resonance(usc_system):
    modes = normal_modes_full(usc_system)
    ratio = 2 * 2.5 / 37.5
    assert modes.omega_plus.real / GHZ == pytest.approx(37.5 * math.sqrt(1 + ratio), rel=1e-9)
    assert modes.omega_minus.real / GHZ == pytest.approx(37.5 * math.sqrt(1 - ratio), rel=1e-9)
    assert "model-dependent" in modes.model


def test_full_model_rejects_collapsed_branch(usc_system):
    with pytest.raises(NumericError):
        normal_modes_full(usc_system.with_coupling(20 * GHZ))


def test_grid_validation():
    with pytest.raises(ValueError):
        FrequencyGrid(2.0, 1.0, 10)
    with pytest.raises(ValueError):
        FrequencyGrid(1.0, 2.0, 1)


def test_passivity_over_random_parameters():
    rng = np.random.default_rng(2024)
    n = 10_000
    omega_a = rng.uniform(1.0, 40.0, n) * GHZ
    kappa_a = rng.uniform(0.01, 100.0, n) * MHZ
    kappa_a1 = kappa_a * rng.uniform(0.0, 1.0, n)
    kappa_m = rng.uniform(0.01, 100.0, n) * MHZ
    g = rng.uniform(0.0, 200.0, n) * MHZ
    omega_m = omega_a + rng.uniform(-300.0, 300.0, n) * MHZ
    omega = omega_a + rng.uniform(-500.0, 500.0, n) * MHZ
    r = reflection_coefficient(omega, omega_a, omega_m, kappa_a, kappa_a1, kappa_m, g)
    assert r.shape == (n,)
    assert np.all(np.abs(r) <= 1.0 + 1e-9)


def test_mit_height_closed_form_over_random_cooperativities():
    rng = np.random.default_rng(5)
    kappa_a, kappa_m = 50.0 * MHZ, 0.02 * MHZ
    omega_a = 5.0 * GHZ
    for C in 10 ** rng.uniform(-1.0, 2.0, 50):
        g = math.sqrt(C * kappa_a * kappa_m)
        r = reflection_coefficient(omega_a, omega_a, omega_a, kappa_a, 0.5 * kappa_a, kappa_m, g)
        expected = (cooperativity(g, kappa_a, kappa_m) / (1 + C)) ** 2
        assert abs(abs(r) ** 2 - expected) < 1e-12


def test_resonant_spectrum_is_symmetric(strong_system, mit_system, purcell_system):
    for system in (strong_system, mit_system, purcell_system):
        omega_a = system.cavity.omega_a
        delta = np.linspace(0.0, 60.0, 301) * MHZ
        cav = system.cavity
        args = (omega_a, omega_a, cav.kappa_a, cav.kappa_a1, system.magnon.kappa_m, system.g)
        above = np.abs(reflection_coefficient(omega_a + delta, *args))
        below = np.abs(reflection_coefficient(omega_a - delta, *args))
        np.testing.assert_allclose(above, below, rtol=0, atol=1e-9)


def test_dips_sit_on_normal_mode_frequencies(make_system):
    system = make_system(7.875, 0.1, 0.1, 10.8)
    grid = FrequencyGrid.around(system.cavity.omega_a, 30 * MHZ, 2001)
    spec = spectrum(system, grid)
    dips = dsp.find_dips(grid.omega, spec.power)
    assert dips.size == 2
    modes = normal_modes_rwa(system)
    expected = sorted([modes.omega_minus.real, modes.omega_plus.real])
    found = sorted(grid.omega[dips])
    assert np.all(np.abs(np.subtract(found, expected)) <= grid.step)


def test_rwa_deviation_grows_quadratically(make_system):
    ratios = [0.001, 0.01, 0.067, 0.2]
    deviations = []
    for ratio in ratios:
        f_ghz = 10.0
        system = make_system(f_ghz, 1.0, 1.0, ratio * f_ghz * 1e3)
        rwa = normal_modes_rwa(system).splitting
        full = normal_modes_full(system).splitting
        deviations.append(abs(full - rwa) / rwa)
    assert deviations[2] < 5e-3
    assert np.all(np.diff(deviations) > 0)
    scaled = np.array(deviations) / np.square(ratios)
    np.testing.assert_allclose(scaled, 0.5, rtol=0.1)
