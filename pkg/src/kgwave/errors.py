"""Exception hierarchy shared by every kgwave module."""


class KGWaveError(Exception):
    """Base class for all library errors (mapped to exit code 1 by the CLI)."""


class DomainError(KGWaveError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ParameterError(KGWaveError, ValueError):
    """Parameters are individually valid but jointly admit no solution."""


class EnergyLevelError(DomainError):
    """Energy level B outside the open interval (0, B_omega)."""


class NoSolutionError(KGWaveError):
    """No periodic wave with the requested period exists."""


class IntegrationError(KGWaveError, RuntimeError):
    """An ODE integration failed or an expected event was not detected."""


class ResolutionError(KGWaveError):
    """A sampled wave is not resolved by the requested grid."""


class SymmetryError(KGWaveError):
    """An assembled operator matrix is not symmetric to working precision."""


class StencilError(DomainError):
    """A finite-difference stencil leaves the admissible parameter range."""


class InfeasibleError(KGWaveError):
    """No admissible constants satisfy a required inequality."""


class ParityError(KGWaveError, ValueError):
    """A parity-restricted operation was requested outside its sector."""


class BlowUpError(KGWaveError):
    """A time evolution left the bounded regime."""
