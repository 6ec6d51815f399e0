"""magnon_benchkit package

Coupled magnon / cavity-photon models: forward design from geometry,
reflection spectra, time-domain ringdown, regime classification and
least-squares parameter extraction.
"""

from .physics import (
    CavityMode,
    CoupledSystem,
    DomainError,
    MagnonMode,
    NumericError,
    SpherePosition,
)

__all__ = [
    "CavityMode",
    "MagnonMode",
    "CoupledSystem",
    "SpherePosition",
    "DomainError",
    "NumericError",
    "__version__",
]

# Synchronized with pyproject.toml version
__version__ = "0.1.0"
