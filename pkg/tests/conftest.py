import math
import sys
from pathlib import Path

import pytest

# Ensure project root (parent of tests/) is on sys.path for imports without installation
ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from magnon_benchkit.physics import CavityMode, CoupledSystem, MagnonMode  # noqa: E402

MHZ = 2.0 * math.pi * 1e6
GHZ = 2.0 * math.pi * 1e9

# (cavity GHz, kappa_a MHz, kappa_m MHz, g MHz)
STRONG = (7.875, 2.67, 2.13, 10.8)
MIT = (5.5272, 34.9, 0.24, 5.4)
PURCELL = (7.5376, 1.07, 19.0, 4.395)
USC = (37.5, 33.0, 15.0, 2500.0)


def build_system(f_ghz, ka_mhz, km_mhz, g_mhz, kappa_a1_mhz=None, detuning_mhz=0.0):
    cavity = CavityMode(
        omega_a=f_ghz * GHZ,
        kappa_a=ka_mhz * MHZ,
        kappa_a1=(0.5 * ka_mhz if kappa_a1_mhz is None else kappa_a1_mhz) * MHZ,
    )
    magnon = MagnonMode(kappa_m=km_mhz * MHZ, radius=0.0)
    system = CoupledSystem.on_resonance(cavity, magnon, g_mhz * MHZ)
    if detuning_mhz:
        system = system.with_bias(system.bias_field + detuning_mhz * MHZ / magnon.gamma)
    return system


@pytest.fixture
def make_system():
    return build_system


@pytest.fixture
def strong_system():
    return build_system(*STRONG)


@pytest.fixture
def mit_system():
    return build_system(*MIT)


@pytest.fixture
def purcell_system():
    return build_system(*PURCELL)


@pytest.fixture
def usc_system():
    return build_system(*USC)
