"""Odd periodic traveling waves of the generalized Klein-Gordon equation

    phi_tt - phi_xx - phi + phi^(2k+1) = 0,

their period maps, spectra, stability index and time evolution.
"""

from .errors import (
    BlowUpError,
    DomainError,
    EnergyLevelError,
    InfeasibleError,
    IntegrationError,
    KGWaveError,
    NoSolutionError,
    ParameterError,
    ParityError,
    ResolutionError,
    StencilError,
    SymmetryError,
)
from .specfun import complete_E, complete_K, jacobi
from .waves import (
    PeriodicWave,
    WaveParams,
    energy_from_period,
    explicit_phi4,
    explicit_phi6,
    ode_residual,
    shoot,
    wave_from_energy,
)

__version__ = "0.1.0"

__all__ = [
    "BlowUpError",
    "DomainError",
    "EnergyLevelError",
    "InfeasibleError",
    "IntegrationError",
    "KGWaveError",
    "NoSolutionError",
    "ParameterError",
    "ParityError",
    "PeriodicWave",
    "ResolutionError",
    "StencilError",
    "SymmetryError",
    "WaveParams",
    "complete_E",
    "complete_K",
    "energy_from_period",
    "explicit_phi4",
    "explicit_phi6",
    "jacobi",
    "ode_residual",
    "shoot",
    "wave_from_energy",
]
