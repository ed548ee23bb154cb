"""Odd periodic solutions of ``-omega h'' - h + h^(2k+1) = 0``.

Two constructions are provided: the closed-form snoidal waves for k = 1 and
k = 2, parametrised by a fixed period ``L0`` and the modulus ``kappa``, and a
shooting construction valid for every integer k >= 1, parametrised by the
energy level B of the planar first integral

    E(h, xi) = xi^2/2 + h^2/(2 omega) - h^(2k+2)/((2k+2) omega).

Every wave is normalised with ``h(0) = 0`` and ``h'(0) = sqrt(2B) > 0``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import _fourier
from .errors import (
    DomainError,
    EnergyLevelError,
    IntegrationError,
    NoSolutionError,
    ParameterError,
)
from .specfun import check_modulus, complete_K, jacobi

log = logging.getLogger(__name__)

DEFAULT_N = 512
ODE_RTOL = 1e-12
ODE_ATOL = 1e-12


def b_omega(k: int, omega: float) -> float:
    """Energy of the separatrix, ``B_omega = k / (2 omega (k + 1))``."""
    return k / (2.0 * omega * (k + 1))


def _check_k(k) -> int:
    if int(k) != k or k < 1:
        raise DomainError(f"k must be an integer >= 1, got {k!r}")
    return int(k)


def _check_energy(k: int, omega: float, B: float) -> None:
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega!r}")
    bw = b_omega(k, omega)
    if not 0.0 < B < bw:
        raise EnergyLevelError(f"energy level B={B!r} outside (0, B_omega={bw!r})")


@dataclass(frozen=True)
class WaveParams:
    k: int
    omega: float
    B: float
    L: float
    kappa: float | None = None

    @property
    def c(self) -> float | None:
        """Positive wave speed ``sqrt(1 - omega)``; None when omega > 1."""
        if self.omega > 1.0:
            return None
        return math.sqrt(1.0 - self.omega)

    @property
    def B_omega(self) -> float:
        return b_omega(self.k, self.omega)

    @property
    def A(self) -> float:
        """Integration constant of the quadrature form, ``A = omega * B``."""
        return self.omega * self.B

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "omega": self.omega,
            "B": self.B,
            "L": self.L,
            "kappa": self.kappa,
            "c": self.c,
        }


@dataclass(frozen=True, eq=False)
class PeriodicWave:
    """One sampled odd periodic wave on ``N`` equispaced points of ``[0, L)``."""

    params: WaveParams
    x: np.ndarray
    h: np.ndarray
    hprime: np.ndarray

    def __post_init__(self):
        for arr in (self.x, self.h, self.hprime):
            arr.setflags(write=False)

    @property
    def N(self) -> int:
        return self.h.size

    @property
    def L(self) -> float:
        return self.params.L

    @property
    def k(self) -> int:
        return self.params.k

    @property
    def omega(self) -> float:
        return self.params.omega

    def second_derivative(self) -> np.ndarray:
        return _fourier.derivative(self.h, self.L, 2)

    def quadrature_defect(self) -> float:
        """Max deviation of the first integral from ``omega * B`` on the grid."""
        k, w = self.k, self.omega
        q = 0.5 * w * self.hprime**2 + 0.5 * self.h**2 - self.h ** (2 * k + 2) / (2 * k + 2)
        return float(np.max(np.abs(q - w * self.params.B)))

    def oddness_defect(self) -> float:
        """Max of ``|h(x) + h(-x mod L)|`` over the grid."""
        return float(np.max(np.abs(self.h + np.roll(self.h[::-1], 1))))


def _wave_from_samples(params: WaveParams, x, h, hp) -> PeriodicWave:
    return PeriodicWave(params, np.asarray(x, float), np.asarray(h, float), np.asarray(hp, float))


def ode_residual(wave: PeriodicWave) -> float:
    """Max of ``|-omega h'' - h + h^(2k+1)|`` with ``h''`` by spectral differentiation."""
    h = wave.h
    r = -wave.omega * wave.second_derivative() - h + h ** (2 * wave.k + 1)
    return float(np.max(np.abs(r)))


# --- closed-form waves -----------------------------------------------------


def _speed_or_raise(omega: float) -> None:
    if omega >= 1.0:
        raise ParameterError(
            f"omega={omega:.17g} >= 1: no real wave speed for this (L0, kappa)"
        )


def explicit_phi4(L0: float, kappa: float, N: int = DEFAULT_N) -> PeriodicWave:
    """Snoidal wave ``h = a sn(4K x / L0, kappa)`` of the k = 1 equation."""
    kappa = check_modulus(kappa)
    if not L0 > 0:
        raise DomainError("L0 must be positive")
    if N < 16:
        raise DomainError("N must be at least 16")
    K = complete_K(kappa)
    a = math.sqrt(2.0) * kappa / math.sqrt(kappa**2 + 1.0)
    omega = L0**2 / (16.0 * K**2 * (1.0 + kappa**2))
    _speed_or_raise(omega)
    beta = 4.0 * K / L0
    x = _fourier.grid(N, L0)
    sn, cn, dn = jacobi(beta * x, kappa)
    h = a * sn
    hp = a * beta * cn * dn
    B = 0.5 * (a * beta) ** 2
    return _wave_from_samples(WaveParams(1, omega, B, L0, kappa), x, h, hp)


def phi6_b(kappa: float) -> float:
    return (kappa**2 + 1.0 - math.sqrt(kappa**4 - kappa**2 + 1.0)) / 3.0


def phi6_omega(L0: float, kappa: float) -> float:
    s = kappa**4 - kappa**2 + 1.0
    return L0**2 / (16.0 * complete_K(kappa) ** 2 * math.sqrt(s))


def phi6_amplitude_printed(kappa: float) -> float:
    """Amplitude ``a(kappa)`` exactly as it is usually printed (4th root of 1458 form)."""
    s = kappa**4 - kappa**2 + 1.0
    inner = ((-1.0 - kappa**6 + 1.5 * kappa**4 + 1.5 * kappa**2) * math.sqrt(s) + s**2) * s**3
    return 1458.0**0.25 * max(inner, 0.0) ** 0.25 / s


def _phi6_crest_mismatch(kappa: float, a: float) -> float:
    # First-integral mismatch between x = 0 and the crest x = L0/4, where
    # sn = 1, h = a / sqrt(1 - b) and h' = 0.  Scaled by omega; free of L0.
    b = phi6_b(kappa)
    s = kappa**4 - kappa**2 + 1.0
    crest = a / math.sqrt(1.0 - b)
    return 0.5 * a * a / math.sqrt(s) - (0.5 * crest**2 - crest**6 / 6.0)


def _phi6_amplitude_numeric(kappa: float) -> float:
    b = phi6_b(kappa)
    # mismatch < 0 for small a, > 0 once the crest passes 1.
    return brentq(
        lambda a: _phi6_crest_mismatch(kappa, a),
        1e-3 * kappa,
        math.sqrt(1.0 - b),
        xtol=1e-16,
        rtol=1e-15,
    )


PHI6_RESIDUAL_GATE = 1e-6
PHI6_MISMATCH_RTOL = 1e-10


@lru_cache(maxsize=256)
def phi6_amplitude(kappa: float) -> tuple[float, str]:
    """Amplitude of the k = 2 wave and where it came from.

    Returns ``(a, "printed")`` when the printed formula satisfies the first
    integral, otherwise ``(a, "numeric")`` with ``a`` re-solved from it.
    """
    a = phi6_amplitude_printed(kappa)
    scale = 0.5 * a * a / math.sqrt(kappa**4 - kappa**2 + 1.0)
    if a > 0 and abs(_phi6_crest_mismatch(kappa, a)) <= PHI6_MISMATCH_RTOL * scale:
        return a, "printed"
    log.info("printed phi^6 amplitude rejected at kappa=%g; using the solved amplitude", kappa)
    return _phi6_amplitude_numeric(kappa), "numeric"


def explicit_phi6(L0: float, kappa: float, N: int = DEFAULT_N) -> PeriodicWave:
    """Wave ``h = a sn / sqrt(1 - b sn^2)`` of the k = 2 equation.

    The amplitude comes from :func:`phi6_amplitude`; the resulting wave is
    gated on its ODE residual (``PHI6_RESIDUAL_GATE``) and a warning is logged
    if the gate is missed.
    """
    kappa = check_modulus(kappa)
    if kappa == 0.0:
        raise DomainError("kappa must be positive for the phi^6 wave")
    if not L0 > 0:
        raise DomainError("L0 must be positive")
    if N < 16:
        raise DomainError("N must be at least 16")
    K = complete_K(kappa)
    b = phi6_b(kappa)
    omega = phi6_omega(L0, kappa)
    _speed_or_raise(omega)
    beta = 4.0 * K / L0
    x = _fourier.grid(N, L0)
    sn, cn, dn = jacobi(beta * x, kappa)
    denom = 1.0 - b * sn * sn
    a, _source = phi6_amplitude(kappa)
    h = a * sn / np.sqrt(denom)
    hp = a * beta * cn * dn / denom**1.5
    B = 0.5 * (a * beta) ** 2
    wave = _wave_from_samples(WaveParams(2, omega, B, L0, kappa), x, h, hp)
    res = ode_residual(wave)
    if res > PHI6_RESIDUAL_GATE:
        log.warning("phi^6 wave residual %.3g exceeds the gate at kappa=%g", res, kappa)
    return wave


# --- shooting construction ---------------------------------------------------


def turning_points(k: int, omega: float, B: float) -> tuple[float, float]:
    """Extremes ``(b1, b2) = (-b2, b2)`` of the orbit at energy level B.

    ``b2`` is the root in (0, 1) of ``h^2 - h^(2k+2)/(k+1) = 2 omega B``,
    located by bisection to the last representable digit.
    """
    k = _check_k(k)
    _check_energy(k, omega, B)
    target = 2.0 * omega * B
    lo, hi = 0.0, 1.0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if mid * mid - mid ** (2 * k + 2) / (k + 1) < target:
            lo = mid
        else:
            hi = mid
    b2 = 0.5 * (lo + hi)
    return -b2, b2


def _planar_rhs(k: int, omega: float):
    def rhs(_t, y):
        h, xi = y[0], y[1]
        return [xi, (-h + h ** (2 * k + 1)) / omega]

    return rhs


class Orbit:
    """Dense solution of the planar system over one period, evaluable anywhere."""

    def __init__(self, k, omega, B, period, t_split, first, second):
        self.k, self.omega, self.B = k, omega, B
        self.period = period
        self._t_split = t_split
        self._first = first
        self._second = second

    def __call__(self, x):
        """Return ``(h(x), h'(x))`` for arbitrary real ``x`` (periodic extension)."""
        x = np.mod(np.asarray(x, dtype=float), self.period)
        h = np.empty_like(x)
        hp = np.empty_like(x)
        early = x <= self._t_split
        if np.any(early):
            y = self._first(x[early])
            h[early], hp[early] = y[0], y[1]
        if np.any(~early):
            y = self._second(x[~early])
            h[~early], hp[~early] = y[0], y[1]
        return h, hp


def shoot(k: int, omega: float, B: float, horizon: float | None = None) -> Orbit:
    """Integrate the planar system from ``(0, sqrt(2B))`` to the first return.

    The run is split at the upward zero of ``xi`` (three quarters of a period)
    so that the terminal event ``h = 0`` with ``xi > 0`` cannot fire at the
    starting point.
    """
    k = _check_k(k)
    _check_energy(k, omega, B)
    if horizon is None:
        horizon = 10.0 * 2.0 * math.pi * math.sqrt(omega)
    rhs = _planar_rhs(k, omega)
    opts = dict(method="DOP853", rtol=ODE_RTOL, atol=ODE_ATOL, dense_output=True)

    def xi_up(_t, y):
        return y[1]

    xi_up.terminal = True
    xi_up.direction = 1.0

    def h_up(_t, y):
        return y[0]

    h_up.terminal = True
    h_up.direction = 1.0

    y0 = [0.0, math.sqrt(2.0 * B)]
    first = solve_ivp(rhs, (0.0, horizon), y0, events=xi_up, **opts)
    if first.status != 1:
        raise IntegrationError(f"no return detected within horizon {horizon:g}")
    t1 = float(first.t_events[0][0])
    second = solve_ivp(rhs, (t1, horizon), first.y_events[0][0], events=h_up, **opts)
    if second.status != 1:
        raise IntegrationError(f"no return detected within horizon {horizon:g}")
    period = float(second.t_events[0][0])
    return Orbit(k, omega, B, period, t1, first.sol, second.sol)


def wave_from_energy(k: int, omega: float, B: float, N: int = DEFAULT_N) -> PeriodicWave:
    """Odd periodic wave at energy level B, sampled on N points of one period."""
    orbit = shoot(k, omega, B)
    x = _fourier.grid(N, orbit.period)
    h, hp = orbit(x)
    # project onto exact oddness; integrator error is symmetric-agnostic
    h = 0.5 * (h - np.roll(h[::-1], 1))
    hp = 0.5 * (hp + np.roll(hp[::-1], 1))
    return _wave_from_samples(WaveParams(int(k), float(omega), float(B), orbit.period), x, h, hp)


def energy_from_period(k: int, omega: float, L0: float) -> float:
    """Energy level B in (0, B_omega) whose orbit has period ``L0``.

    The period map is strictly increasing in B, so the root is unique; it is
    bracketed between the centre and the separatrix and refined with Brent's
    bisection-safeguarded method.
    """
    from .period import period_quadrature

    k = _check_k(k)
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega!r}")
    l_center = 2.0 * math.pi * math.sqrt(omega)
    if not L0 > l_center:
        raise NoSolutionError(
            f"L0={L0:.17g} <= 2 pi sqrt(omega)={l_center:.17g}: no wave with this period"
        )
    bw = b_omega(k, omega)
    lo, hi = 0.0, bw
    # Walk the upper bracket toward the separatrix until the period exceeds L0.
    frac = 0.5
    while True:
        if frac < 1e-15:
            raise NoSolutionError(f"period {L0:g} too close to the separatrix")
        cand = bw * (1.0 - frac)
        if period_quadrature(k, omega, cand) > L0:
            hi = cand
            break
        lo = cand
        frac *= 0.25

    def f(B):
        if B <= 0.0:
            return l_center - L0
        return period_quadrature(k, omega, B) - L0

    return brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
