"""The theta constant of the linearised equation around an odd periodic wave.

``ybar`` solves ``-omega y'' - y + (2k+1) h^(2k) y = 0`` with ``y(0) = 0`` and
``y'(0) = 1/h'(0)``.  Because ``h'`` is a periodic solution and the Wronskian
``ybar' h' - ybar h''`` equals 1, there is a constant theta with
``ybar(x + L) = ybar(x) + theta h'(x)``, and ``theta = ybar(L) / h'(0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import _fourier
from .errors import DomainError, IntegrationError
from .waves import ODE_ATOL, ODE_RTOL, PeriodicWave

KERNEL_TOL_FACTOR = 1e-6


@dataclass(frozen=True, eq=False)
class YbarSolution:
    """``ybar`` and ``ybar'`` sampled on ``periods`` copies of the wave grid."""

    x: np.ndarray
    ybar: np.ndarray
    ybar_prime: np.ndarray
    hprime: np.ndarray
    initial_slope: float
    wronskian_drift: float
    dense: object

    def __call__(self, x):
        return self.dense(np.asarray(x, dtype=float))


def _augmented_rhs(k: int, omega: float, with_potential: bool):
    p = 2 * k + 1

    def rhs(_t, y):
        h, xi, yb, ybp = y
        pot = p * h ** (2 * k) if with_potential else 0.0
        return [xi, (-h + h**p) / omega, ybp, (-yb + pot * yb) / omega]

    return rhs


def solve_ybar(
    wave: PeriodicWave,
    *,
    periods: int = 1,
    initial_slope: float | None = None,
    drop_potential: bool = False,
) -> YbarSolution:
    """Integrate the variational initial-value problem alongside the wave.

    The wave itself is re-integrated from ``(0, sqrt(2B))`` in the same ODE
    system so the potential is available to full integrator accuracy.

    Parameters
    ----------
    periods
        Number of periods to cover (2 is needed for the translation check).
    initial_slope
        Override ``ybar'(0)``; defaults to ``1/h'(0)``.
    drop_potential
        Replace ``(2k+1) h^(2k)`` by 0 (constant-coefficient control problem).
    """
    k, omega, B, L = wave.k, wave.omega, wave.params.B, wave.L
    hp0 = math.sqrt(2.0 * B)
    if hp0 <= 0.0:
        raise DomainError("h'(0) must be positive")
    slope = 1.0 / hp0 if initial_slope is None else float(initial_slope)
    span = periods * L
    sol = solve_ivp(
        _augmented_rhs(k, omega, not drop_potential),
        (0.0, span),
        [0.0, hp0, 0.0, slope],
        method="DOP853",
        rtol=ODE_RTOL,
        atol=ODE_ATOL,
        dense_output=True,
    )
    if sol.status != 0:
        raise IntegrationError(f"variational IVP failed: {sol.message}")
    x = _fourier.grid(periods * wave.N, span)
    x = np.append(x, span)
    h, xi, yb, ybp = sol.sol(x)
    hpp = (-h + h ** (2 * k + 1)) / omega
    w = ybp * xi - yb * hpp
    drift = float(np.max(np.abs(w - w[0]))) if drop_potential else float(np.max(np.abs(w - 1.0)))

    def dense(xq):
        return sol.sol(xq)[2]

    return YbarSolution(x, yb, ybp, xi, slope, drift, dense)


@dataclass(frozen=True)
class ThetaResult:
    theta: float
    ybar_at_L: float
    hprime_at_0: float
    wronskian_drift: float
    L: float
    relation_defect: float

    @property
    def tol_kernel(self) -> float:
        return KERNEL_TOL_FACTOR * self.L


def theta(wave: PeriodicWave, ybar: YbarSolution | None = None) -> ThetaResult:
    """Compute theta and check ``ybar(x+L) - ybar(x) = theta h'(x)`` on the grid.

    ``ybar`` must carry the normalisation ``ybar'(0) = 1/h'(0)``; a solution
    with any other initial slope is rejected.
    """
    hp0 = math.sqrt(2.0 * wave.params.B)
    if ybar is None:
        ybar = solve_ybar(wave, periods=2)
    elif not math.isclose(ybar.initial_slope, 1.0 / hp0, rel_tol=1e-14):
        raise DomainError("theta requires the normalisation ybar'(0) = 1/h'(0)")
    N = wave.N
    if ybar.x.size < 2 * N + 1:
        raise DomainError("theta needs ybar over two periods")
    yL = float(ybar.ybar[N])
    th = yL / hp0
    defect = ybar.ybar[N : 2 * N] - ybar.ybar[:N] - th * ybar.hprime[:N]
    return ThetaResult(
        theta=th,
        ybar_at_L=yL,
        hprime_at_0=hp0,
        wronskian_drift=ybar.wronskian_drift,
        L=wave.L,
        relation_defect=float(np.max(np.abs(defect))),
    )


def kernel_dimension_criterion(result: ThetaResult) -> str:
    """``"simple"`` if ``|theta| > 1e-6 L`` else ``"double"`` (ties count as double)."""
    return "simple" if abs(result.theta) > result.tol_kernel else "double"
