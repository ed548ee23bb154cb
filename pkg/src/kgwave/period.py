"""The period map L(omega, B) of the odd orbits and its monotonicity in B."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, StencilError
from .waves import _check_energy, _check_k, b_omega, shoot, turning_points

_GL_START = 32
_GL_MAX = 1 << 15
_GL_RTOL = 2e-15


@lru_cache(maxsize=None)
def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    # map [-1, 1] -> [0, pi/2]
    return (nodes + 1.0) * (math.pi / 4.0), weights * (math.pi / 4.0)


def period_quadrature(k: int, omega: float, B: float) -> float:
    """Period of the orbit at energy level B, by quadrature.

    With ``h = b2 sin(t)`` the inverse-square-root endpoint singularities
    cancel and

        L = 4 sqrt(omega) * int_0^{pi/2} dt / sqrt(1 - b2^(2k) S(t) / (k+1)),
        S(t) = sum_{j=0}^{k} sin(t)^(2j),

    an analytic integrand handled by Gauss-Legendre with order doubling.
    """
    k = _check_k(k)
    _, b2 = turning_points(k, omega, B)
    u = b2 ** (2 * k) / (k + 1)
    n = _GL_START
    prev = None
    while n <= _GL_MAX:
        t, w = _gauss_legendre(n)
        s2 = np.sin(t) ** 2
        # Horner evaluation of 1 + s2 + ... + s2^k
        S = np.ones_like(s2)
        for _ in range(k):
            S = 1.0 + s2 * S
        val = 4.0 * math.sqrt(omega) * float(np.dot(w, 1.0 / np.sqrt(1.0 - u * S)))
        if prev is not None and abs(val - prev) <= _GL_RTOL * val:
            return val
        prev = val
        n *= 2
    return prev  # pragma: no cover - only reachable at the separatrix cutoff


def period_shooting(k: int, omega: float, B: float) -> float:
    """Period as the first-return time of the planar system."""
    return shoot(k, omega, B).period


def _fd_step(B: float, bw: float) -> float:
    return min(1e-6, 1e-3 * B, 1e-3 * (bw - B))


def dL_dB(k: int, omega: float, B: float, step: float | None = None) -> float:
    """Central finite difference of :func:`period_quadrature` in B."""
    k = _check_k(k)
    _check_energy(k, omega, B)
    bw = b_omega(k, omega)
    d = _fd_step(B, bw) if step is None else step
    if not (0.0 < B - d and B + d < bw):
        raise StencilError(f"stencil B +/- {d:g} leaves (0, B_omega)")
    return (period_quadrature(k, omega, B + d) - period_quadrature(k, omega, B - d)) / (2.0 * d)


@dataclass(frozen=True)
class DerivativeCheck:
    value: float
    half_step_value: float
    rel_disagreement: float
    flagged: bool

    @property
    def positive(self) -> bool:
        return self.value > 0


def dL_dB_checked(k: int, omega: float, B: float, gate: float = 1e-4) -> DerivativeCheck:
    """``dL_dB`` plus the half-step consistency gate."""
    d = _fd_step(B, b_omega(k, omega))
    full = dL_dB(k, omega, B, d)
    half = dL_dB(k, omega, B, 0.5 * d)
    rel = abs(full - half) / abs(half)
    return DerivativeCheck(full, half, rel, rel > gate)


@dataclass(frozen=True)
class PeriodMapSample:
    k: int
    omega: float
    B: float
    L_quadrature: float
    L_shooting: float
    L_B: float
    flagged: bool = False

    @property
    def rel_mismatch(self) -> float:
        return abs(self.L_quadrature - self.L_shooting) / self.L_shooting


def sample_period_map(k: int, omega: float, B: float) -> PeriodMapSample:
    chk = dL_dB_checked(k, omega, B)
    return PeriodMapSample(
        k=int(k),
        omega=float(omega),
        B=float(B),
        L_quadrature=period_quadrature(k, omega, B),
        L_shooting=period_shooting(k, omega, B),
        L_B=chk.value,
        flagged=chk.flagged,
    )


# --- monotonicity certificate -------------------------------------------------


def I_closed(k: int, h):
    """``I(h) = (F'^2 - 2 F F'') / F'^3`` in closed form, F = h^2/2 - h^(2k+2)/(2k+2)."""
    h = np.asarray(h, dtype=float)
    p = h ** (2 * k)
    return -k * h ** (2 * k - 1) * (1 + 2 * k - p) / ((1 + k) * (p - 1.0) ** 3)


def dI_closed(k: int, h):
    """Closed-form derivative of :func:`I_closed`."""
    h = np.asarray(h, dtype=float)
    p = h ** (2 * k)
    bracket = (-2 * k - 8 * k * k - 2) * p + (2 * k + 1) * p * p + 1 - 4 * k * k
    return -k * h ** (2 * k - 2) / ((k + 1) * (p - 1.0) ** 4) * bracket


def _dI_fd(k: int, h: np.ndarray) -> np.ndarray:
    # Five-point stencil, step scaled to the distance from 0 and from +-1.
    ah = np.abs(h)
    d = 1e-3 * np.minimum(ah, 1.0 - ah)
    d = np.where(ah == 0.0, 1e-4, d)
    f = lambda z: I_closed(k, z)  # noqa: E731
    return (f(h - 2 * d) - 8 * f(h - d) + 8 * f(h + d) - f(h + 2 * d)) / (12 * d)


@dataclass(frozen=True, eq=False)
class MonotonicityTable:
    k: int
    h: np.ndarray
    I: np.ndarray
    dI: np.ndarray
    dI_fd: np.ndarray

    @property
    def strictly_increasing(self) -> bool:
        nz = self.h != 0.0
        return bool(np.all(self.dI[nz] > 0.0))

    @property
    def max_fd_rel_error(self) -> float:
        scale = np.where(self.dI != 0.0, np.abs(self.dI), 1.0)
        return float(np.max(np.abs(self.dI_fd - self.dI) / scale))

    def rows(self):
        return list(zip(self.h.tolist(), self.I.tolist(), self.dI.tolist()))


def monotonicity_certificate(k: int, h_grid, fd_rtol: float = 1e-6) -> MonotonicityTable:
    """Tabulate I and I' on ``h_grid`` and check ``I' > 0`` and the closed form.

    Raises
    ------
    DomainError
        If a grid point has ``|h| >= 1``.
    AssertionError
        If I' fails to be positive off zero or disagrees with finite differences.
    """
    k = _check_k(k)
    h = np.asarray(h_grid, dtype=float)
    if np.any(np.abs(h) >= 1.0):
        raise DomainError("monotonicity certificate needs |h| < 1")
    table = MonotonicityTable(k, h, I_closed(k, h), dI_closed(k, h), _dI_fd(k, h))
    if not table.strictly_increasing:
        raise AssertionError(f"I'(h) <= 0 somewhere on the grid for k={k}")
    if table.max_fd_rel_error > fd_rtol:
        raise AssertionError(
            f"closed-form I' disagrees with finite differences: {table.max_fd_rel_error:.3g}"
        )
    return table
