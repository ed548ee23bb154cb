"""Stability index d''(c) of the traveling waves and the stability verdict.

Along the family of waves with fixed period ``L0`` the speed is
``c = sqrt(1 - omega)`` and

    d''(c) = -int h'^2 + 2 (1 - omega) d/domega int h'^2.

Three evaluations are provided: a direct one (finite differences along the
family), a closed form for k = 1 in terms of complete elliptic integrals, and
a simplified one that only needs the derivative of ``h'(0)`` along the family.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, KGWaveError, ParameterError
from .specfun import KAPPA_MAX, check_modulus, complete_E, complete_K
from .spectra import kg_block_spectrum, odd_spectrum
from .waves import (
    DEFAULT_N,
    _check_k,
    energy_from_period,
    phi6_amplitude,
    phi6_omega,
    wave_from_energy,
)

log = logging.getLogger(__name__)

RICHARDSON_GATE = 1e-3
# half-step disagreement above which the omega stencil hands over to the B one
STENCIL_SWITCH = 1e-6
ROUTE_RTOL = 0.01
ROUTE_FLOOR = 1e-6
KAPPA_STEP = 1e-6
SPECTRUM_N = 256


def omega_max(L0: float) -> float:
    """Largest omega for which a wave of period L0 exists (exclusive)."""
    return (L0 / (2.0 * math.pi)) ** 2


def phi4_omega(L0: float, kappa: float) -> float:
    K = complete_K(kappa)
    return L0**2 / (16.0 * K * K * (1.0 + kappa * kappa))


# --- the fixed-period family -------------------------------------------------


@dataclass(frozen=True)
class FamilyPoint:
    """Integrals of one wave of the fixed-period family."""

    omega: float
    B: float
    hp0: float
    I1: float  # int h'^2
    I2: float  # int h^2
    Ip: float  # int h^(2k+2)


def family_point(k: int, L0: float, omega: float, N: int = DEFAULT_N) -> FamilyPoint:
    B = energy_from_period(k, omega, L0)
    w = wave_from_energy(k, omega, B, N)
    dx = w.L / w.N
    return FamilyPoint(
        omega=float(omega),
        B=B,
        hp0=math.sqrt(2.0 * B),
        I1=float(np.sum(w.hprime**2) * dx),
        I2=float(np.sum(w.h**2) * dx),
        Ip=float(np.sum(w.h ** (2 * k + 2)) * dx),
    )


def omega_from_energy(k: int, L0: float, B: float, guess: float | None = None) -> float:
    """The omega on the period-L0 family whose wave has energy level B.

    L(omega, B) increases with omega; ``guess`` seeds a local bracket.
    """
    from .period import period_quadrature

    top = min(omega_max(L0), k / (2.0 * B * (k + 1))) * (1.0 - 1e-15)

    def g(w):
        return period_quadrature(k, w, B) - L0

    if guess is None:
        lo, hi = 1e-12 * top, top
    else:
        lo, hi, width = guess, min(guess, top), 1e-3 * guess
        while g(lo) > 0:
            lo = max(lo - width, 0.5 * lo)
            width *= 2
        width = 1e-3 * guess
        while hi < top and g(hi) < 0:
            hi = min(hi + width, top)
            width *= 2
    return brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)


@dataclass(frozen=True)
class FamilyDerivative:
    """Omega-derivatives at a family point, with the half-step check.

    ``method`` is ``"omega"`` for central differences in omega, or
    ``"energy"`` when the family is parametrised by B instead (used where
    the omega stencil would reach the end of the family).
    """

    center: FamilyPoint
    step: float
    dI1: float
    dI2: float
    dIp: float
    dhp0: float
    richardson: float
    flagged: bool
    method: str = "omega"


def omega_step(L0: float, omega: float) -> float:
    return 1e-4 * omega


_ATTRS = ("I1", "I2", "Ip", "hp0")


def _stencil(points: dict, attr: str, s: float, d: float) -> float:
    return (getattr(points[s], attr) - getattr(points[-s], attr)) / (2.0 * s * d)


def _energy_stencil(k: int, L0: float, center: FamilyPoint, N: int) -> FamilyDerivative:
    d = 1e-4 * center.B
    pts = {}
    for s in (-1.0, -0.5, 0.5, 1.0):
        B = center.B + s * d
        pts[s] = family_point(k, L0, omega_from_energy(k, L0, B, center.omega), N)
    dw = {s: _stencil(pts, "omega", s, d) for s in (1.0, 0.5)}
    dv = {(a, s): _stencil(pts, a, s, d) / dw[s] for a in _ATTRS for s in (1.0, 0.5)}
    full, half = dv[("I1", 1.0)], dv[("I1", 0.5)]
    rel = abs(full - half) / max(abs(half), 1e-300)
    return FamilyDerivative(
        center, d, full, dv[("I2", 1.0)], dv[("Ip", 1.0)], dv[("hp0", 1.0)],
        rel, rel > RICHARDSON_GATE, "energy",
    )  # fmt: skip


def family_derivative(k: int, L0: float, omega: float, N: int = DEFAULT_N) -> FamilyDerivative:
    """Derivatives of the family integrals and of h'(0) with respect to omega.

    Central differences with step ``1e-4 omega`` and a half-step consistency
    check.  If the stencil leaves the family or its half-step disagreement
    exceeds ``STENCIL_SWITCH``, the family is re-parametrised by its energy
    level B (smooth up to the linear limit, where omega is not) and the chain
    rule is applied.  ``flagged`` marks a final disagreement above
    ``RICHARDSON_GATE``.
    """
    k = _check_k(k)
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega}")
    if not omega < omega_max(L0):
        raise DomainError(f"no wave of period {L0} at omega={omega} (need 2 pi sqrt(omega) < L0)")
    center = family_point(k, L0, omega, N)
    d = omega_step(L0, omega)
    if omega + d < omega_max(L0) * (1.0 - 1e-12):
        pts = {s: family_point(k, L0, omega + s * d, N) for s in (-1.0, -0.5, 0.5, 1.0)}
        full, half = _stencil(pts, "I1", 1.0, d), _stencil(pts, "I1", 0.5, d)
        rel = abs(full - half) / max(abs(half), 1e-300)
        if rel <= STENCIL_SWITCH:
            return FamilyDerivative(
                center, d, full, _stencil(pts, "I2", 1.0, d), _stencil(pts, "Ip", 1.0, d),
                _stencil(pts, "hp0", 1.0, d), rel, False, "omega",
            )  # fmt: skip
        log.info("omega stencil half-step disagreement %.3g; switching to the energy parametrisation", rel)
    fd = _energy_stencil(k, L0, center, N)
    if fd.flagged:
        log.warning("Richardson gate missed (%.3g) at k=%d L0=%g omega=%g", fd.richardson, k, L0, omega)
    return fd


def _check_speed_range(omega: float) -> None:
    if not 0.0 < omega <= 1.0:
        raise DomainError(f"omega must lie in (0, 1] for a real speed, got {omega}")


# --- the three routes ----------------------------------------------------------


def d2_direct(
    k: int,
    L0: float,
    omega: float,
    c: float | None = None,
    N: int = DEFAULT_N,
    *,
    deriv: FamilyDerivative | None = None,
) -> float:
    """``-int h'^2 + 2 c^2 d/domega int h'^2`` along the fixed-period family.

    ``c`` defaults to the positive root of ``c^2 = 1 - omega``; either sign
    gives the same value.
    """
    _check_speed_range(omega)
    if c is None:
        c = math.sqrt(1.0 - omega)
    elif not math.isclose(c * c, 1.0 - omega, rel_tol=1e-12, abs_tol=1e-14):
        raise ParameterError(f"c^2 = {c * c} does not match 1 - omega = {1 - omega}")
    fd = deriv if deriv is not None else family_derivative(k, L0, omega, N)
    return -fd.center.I1 + 2.0 * c * c * fd.dI1


def d2_simplified(
    k: int,
    L0: float,
    omega: float,
    N: int = DEFAULT_N,
    *,
    deriv: FamilyDerivative | None = None,
) -> float:
    """Form using only ``int h'^2`` and ``eta'(0) = d h'(0) / domega``."""
    _check_speed_range(omega)
    fd = deriv if deriv is not None else family_derivative(k, L0, omega, N)
    p = fd.center
    return (
        -p.I1 / omega
        + 2.0 * L0 * (1.0 - omega) * p.hp0 * fd.dhp0
        + (1.0 - omega) / omega * p.hp0**2 * L0
    )


class Phi4Closed(NamedTuple):
    d2: float
    p: float
    q: float


def p_phi4(kappa: float) -> float:
    """``(1 + kappa^2) E - (1 - kappa^2) K``."""
    k2 = kappa * kappa
    return (1.0 + k2) * complete_E(kappa) - (1.0 - k2) * complete_K(kappa)


def quarter_cn2dn2(kappa: float) -> float:
    """Closed form of ``int_0^K cn^2 dn^2``."""
    kappa = check_modulus(kappa)
    if kappa == 0.0:
        return math.pi / 4.0
    return p_phi4(kappa) / (3.0 * kappa * kappa)


def _central_kappa(f, kappa: float, step: float = KAPPA_STEP) -> float:
    return (f(kappa + step) - f(kappa - step)) / (2.0 * step)


def d2_closed_phi4(L0: float, kappa: float) -> Phi4Closed:
    """Closed-form d''(c) of the k = 1 family at modulus ``kappa``.

    With ``int h'^2 = 32 K p / (3 (1 + kappa^2) L0)`` and
    ``omega = L0^2 / (16 K^2 (1 + kappa^2))``,

        d'' = -32 K p / (3 (1 + kappa^2) L0) + 1024 (1 - omega) q / (3 L0^3),

    where ``q`` is the ratio of the kappa-derivatives of
    ``K p / (1 + kappa^2)`` and ``1 / (K^2 (1 + kappa^2))``.
    """
    kappa = check_modulus(kappa)
    if not 0.0 < kappa < 1.0:
        raise DomainError(f"modulus out of range: kappa={kappa} (need 0 < kappa < 1)")
    if kappa + KAPPA_STEP >= 1.0 or kappa - KAPPA_STEP <= 0.0:
        raise DomainError("kappa too close to the ends of (0, 1) for the difference stencil")
    omega = phi4_omega(L0, kappa)
    if omega >= 1.0:
        raise ParameterError(f"omega = {omega:.6g} >= 1: no real speed at L0={L0}, kappa={kappa}")
    K = complete_K(kappa)
    p = p_phi4(kappa)

    def num(z):
        return complete_K(z) * p_phi4(z) / (1.0 + z * z)

    def den(z):
        return 1.0 / (complete_K(z) ** 2 * (1.0 + z * z))

    q = _central_kappa(num, kappa) / _central_kappa(den, kappa)
    d2 = -32.0 * K * p / (3.0 * (1.0 + kappa**2) * L0) + 1024.0 / (3.0 * L0**3) * (1.0 - omega) * q
    return Phi4Closed(d2, p, q)


class BetaTau(NamedTuple):
    beta: float
    tau: float
    tau_sign: int
    prefactor: float


def phi6_hprime0(L0: float, kappa: float) -> float:
    return phi6_amplitude(kappa)[0] * 4.0 * complete_K(kappa) / L0


def beta_tau_phi6(L0: float, kappa: float) -> BetaTau:
    """The quantity beta(kappa) of the k = 2 family and the sign of tau.

    ``beta = 2 L0 (1 - omega) h'(0) eta'(0) + (1 - omega)/omega h'(0)^2 L0``
    with ``eta'(0) = (d h'(0)/dkappa) / (d omega/dkappa)``; tau is beta divided
    by ``72 (kappa + 1) kappa^2 / L0^3 * (L0 - 16 K^2 sqrt(s))``.
    """
    kappa = check_modulus(kappa)
    if not KAPPA_STEP < kappa < 1.0 - KAPPA_STEP:
        raise DomainError(f"modulus out of range: kappa={kappa} (need 0 < kappa < 1)")
    omega = phi6_omega(L0, kappa)
    if omega >= 1.0:
        raise ParameterError(
            f"omega = {omega:.6g} >= 1 at L0={L0}, kappa={kappa}: the tau prefactor has the wrong sign"
        )
    hp0 = phi6_hprime0(L0, kappa)
    dhp = _central_kappa(lambda z: phi6_hprime0(L0, z), kappa)
    dom = _central_kappa(lambda z: phi6_omega(L0, z), kappa)
    eta = dhp / dom
    beta = 2.0 * L0 * (1.0 - omega) * hp0 * eta + (1.0 - omega) / omega * hp0**2 * L0
    s = kappa**4 - kappa**2 + 1.0
    K = complete_K(kappa)
    pref = 72.0 * (kappa + 1.0) * kappa**2 / L0**3 * (-16.0 * K * K * math.sqrt(s) + L0)
    tau = beta / pref
    return BetaTau(beta, tau, int(np.sign(tau)), pref)


# --- consistency relations ----------------------------------------------------


def d_of_c(k: int, L0: float, c: float, N: int = DEFAULT_N) -> float:
    """``d(c) = E(h, c h') - c F(h, c h')`` on the fixed-period family."""
    omega = 1.0 - c * c
    p = family_point(k, L0, omega, N)
    return 0.5 * (omega * p.I1 - p.I2 + p.Ip / (k + 1))


def d1_check(k: int, L0: float, c: float, N: int = DEFAULT_N, step: float = 1e-4) -> tuple[float, float]:
    """``(central difference of d(c), -c int h'^2)``."""
    h = step * c
    fd = (d_of_c(k, L0, c + h, N) - d_of_c(k, L0, c - h, N)) / (2.0 * h)
    return fd, -c * family_point(k, L0, 1.0 - c * c, N).I1


class IdentityAudit(NamedTuple):
    first: float
    second: float


def identity_audit(k: int, L0: float, omega: float, N: int = DEFAULT_N) -> IdentityAudit:
    """Relative residuals of two integral identities along the family.

    ``first``:  int h'^2 + k/(k+1) d/domega int h^(2k+2) = 0
    ``second``: omega/2 dI1 + I1 - dI2/2 + (2k+1)/(2k+2) dIp = 0
    """
    fd = family_derivative(k, L0, omega, N)
    I1 = fd.center.I1
    t1 = (I1, k / (k + 1) * fd.dIp)
    t2 = (0.5 * omega * fd.dI1, I1, -0.5 * fd.dI2, (2 * k + 1) / (2 * k + 2) * fd.dIp)
    return IdentityAudit(
        abs(sum(t1)) / max(abs(t) for t in t1),
        abs(sum(t2)) / max(abs(t) for t in t2),
    )


# --- classification -------------------------------------------------------------


def kappa_from_omega(k: int, L0: float, omega: float) -> float | None:
    """Modulus of the closed-form k = 1, 2 wave with this omega, if any."""
    if k == 1:
        f = phi4_omega
    elif k == 2:
        f = phi6_omega
    else:
        return None
    lo, hi = 1e-12, KAPPA_MAX
    glo, ghi = f(L0, lo) - omega, f(L0, hi) - omega
    if glo * ghi > 0:
        return None
    return brentq(lambda z: f(L0, z) - omega, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def omega_from_kappa(k: int, L0: float, kappa: float) -> float:
    kappa = check_modulus(kappa)
    if k == 1:
        return phi4_omega(L0, kappa)
    if k == 2:
        return phi6_omega(L0, kappa)
    raise ParameterError("a kappa parametrisation exists only for k = 1 and k = 2")


VERDICTS = ("unstable_in_X", "stable_in_X_odd", "undetermined")


@dataclass(frozen=True)
class StabilityReport:
    k: int
    L0: float
    kappa: float | None
    omega: float
    c: float | None
    d2_direct: float | None
    d2_closed: float | None
    d2_simplified: float | None
    n_negative: int | None
    n_zero: int | None
    verdict: str
    beta: float | None = None
    tau_sign: int | None = None
    reasons: tuple[str, ...] = ()
    diagnostics: dict = field(default_factory=dict, compare=False)

    CSV_COLUMNS = (
        "k", "L0", "kappa", "omega", "c", "d2_direct", "d2_closed", "d2_simplified",
        "beta", "tau_sign", "n_neg", "n_zero", "verdict",
    )  # fmt: skip

    def csv_row(self) -> list:
        return [
            self.k, self.L0, self.kappa, self.omega, self.c, self.d2_direct, self.d2_closed,
            self.d2_simplified, self.beta, self.tau_sign, self.n_negative, self.n_zero, self.verdict,
        ]  # fmt: skip

    def as_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["reasons"] = list(self.reasons)
        return out


def _routes_agree(values: list[float]) -> bool:
    for i, a in enumerate(values):
        for b in values[i + 1 :]:
            if abs(a - b) > ROUTE_RTOL * max(abs(a), abs(b), ROUTE_FLOOR):
                return False
    return True


def classify(
    k: int,
    L0: float,
    omega: float,
    N: int = DEFAULT_N,
    spectrum_N: int = SPECTRUM_N,
    kappa: float | None = None,
) -> StabilityReport:
    """Combine spectral counts and the d'' routes into a verdict.

    Never raises for numerical reasons: failures produce ``undetermined``
    with the reason attached.
    """
    k = _check_k(k)
    reasons: list[str] = []
    diag: dict = {"N": N, "spectrum_N": spectrum_N}
    rec = dict(
        k=k, L0=float(L0), kappa=kappa, omega=float(omega), c=None, d2_direct=None,
        d2_closed=None, d2_simplified=None, n_negative=None, n_zero=None,
    )  # fmt: skip
    if rec["kappa"] is None:
        rec["kappa"] = kappa_from_omega(k, L0, omega) if omega > 0 else None

    def done(verdict):
        return StabilityReport(**rec, verdict=verdict, reasons=tuple(reasons), diagnostics=diag)

    if omega > 1.0 + 1e-14:
        reasons.append("omega > 1: no real wave speed")
        return done("undetermined")
    c = 0.0 if omega >= 1.0 else math.sqrt(1.0 - omega)
    rec["c"] = c

    try:
        B = energy_from_period(k, omega, L0)
        wave = wave_from_energy(k, omega, B, N)
        diag["B"] = B
        kg = kg_block_spectrum(wave, c, spectrum_N)
        rec["n_negative"], rec["n_zero"] = kg.n_negative, kg.n_zero
        diag["kg_eigenvalues"] = kg.eigenvalues[:4].tolist()
        if c == 0.0:
            odd = odd_spectrum(wave, spectrum_N)
            sigma = float(odd.eigenvalues[0])
            diag["odd_sigma"] = sigma
            diag["odd_counts"] = [odd.n_negative, odd.n_zero]
            if sigma > 0 and odd.n_zero == 0:
                return done("stable_in_X_odd")
            reasons.append(f"odd-sector spectrum not positive (sigma={sigma:.3g})")
            return done("undetermined")

        fd = family_derivative(k, L0, omega, N)
        diag["richardson"] = fd.richardson
        rec["d2_direct"] = d2_direct(k, L0, omega, c, N, deriv=fd)
        rec["d2_simplified"] = d2_simplified(k, L0, omega, N, deriv=fd)
        routes = [rec["d2_direct"], rec["d2_simplified"]]
        if k == 1 and rec["kappa"] is not None:
            rec["d2_closed"] = d2_closed_phi4(L0, rec["kappa"]).d2
            routes.append(rec["d2_closed"])
        if k == 2 and rec["kappa"] is not None:
            bt = beta_tau_phi6(L0, rec["kappa"])
            rec["beta"], rec["tau_sign"] = bt.beta, bt.tau_sign
    except KGWaveError as exc:
        reasons.append(f"{type(exc).__name__}: {exc}")
        return done("undetermined")

    if fd.flagged:
        reasons.append(f"Richardson gate missed ({fd.richardson:.3g})")
    if not _routes_agree(routes):
        reasons.append("d'' routes disagree beyond 1%")
    if (kg.n_negative, kg.n_zero) != (1, 1):
        reasons.append(f"KG inertia is ({kg.n_negative}, {kg.n_zero}), not (1, 1)")
    if not all(r < 0 for r in routes):
        reasons.append("d'' is not negative on every route")
    return done("undetermined" if reasons else "unstable_in_X")


def _classify_kappa(args) -> StabilityReport:
    k, L0, kappa, N, spectrum_N = args
    try:
        omega = omega_from_kappa(k, L0, kappa)
    except KGWaveError as exc:
        return StabilityReport(
            k=k, L0=L0, kappa=kappa, omega=float("nan"), c=None, d2_direct=None,
            d2_closed=None, d2_simplified=None, n_negative=None, n_zero=None,
            verdict="undetermined", reasons=(f"{type(exc).__name__}: {exc}",),
        )  # fmt: skip
    return classify(k, L0, omega, N, spectrum_N, kappa=kappa)


def stability_sweep(
    k: int,
    L0: float,
    kappas,
    N: int = DEFAULT_N,
    spectrum_N: int = SPECTRUM_N,
    jobs: int = 1,
) -> list[StabilityReport]:
    """:func:`classify` over a kappa grid (k = 1, 2); rows keep the grid order."""
    tasks = [(k, float(L0), float(z), N, spectrum_N) for z in kappas]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_classify_kappa, tasks))
    return [_classify_kappa(t) for t in tasks]
