import math

import numpy as np
import pytest
from scipy.integrate import quad

from kgwave import specfun, stability
from kgwave.errors import ParameterError

TWO_PI = 2.0 * math.pi


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


@pytest.mark.parametrize("kappa", [0.2, 0.5, 0.8])
def test_cn2dn2_integral(kappa):
    K = specfun.complete_K(kappa)

    def integrand(x):
        _, cn, dn = specfun.jacobi(x, kappa)
        return float(cn**2 * dn**2)

    numeric = quad(integrand, 0, K, epsabs=0, epsrel=1e-13)[0]
    assert abs(numeric - stability.quarter_cn2dn2(kappa)) <= 1e-10


def test_p_signs():
    for kappa in np.arange(1, 10) / 10:
        assert stability.p_phi4(kappa) > 0
    assert abs(stability.p_phi4(1e-8)) < 1e-14


def test_phi4_routes():
    omega = stability.phi4_omega(TWO_PI, 0.5)
    fd = stability.family_derivative(1, TWO_PI, omega)
    direct = stability.d2_direct(1, TWO_PI, omega, deriv=fd)
    simple = stability.d2_simplified(1, TWO_PI, omega, deriv=fd)
    closed = stability.d2_closed_phi4(TWO_PI, 0.5)
    assert direct < 0 and simple < 0 and closed.d2 < 0
    assert closed.p > 0 and closed.q < 0
    assert rel(direct, closed.d2) < 1e-5
    assert rel(direct, simple) < 1e-5
    assert direct == pytest.approx(-3.99579, abs=1e-4)
    assert not fd.flagged


def test_phi6_routes_and_tau():
    omega = stability.omega_from_kappa(2, TWO_PI, 0.6)
    fd = stability.family_derivative(2, TWO_PI, omega)
    direct = stability.d2_direct(2, TWO_PI, omega, deriv=fd)
    simple = stability.d2_simplified(2, TWO_PI, omega, deriv=fd)
    assert direct < 0 and rel(direct, simple) < 0.01
    assert direct == pytest.approx(-2.31647, abs=1e-4)
    bt = stability.beta_tau_phi6(TWO_PI, 0.6)
    assert bt.beta < 0 and bt.tau > 0 and bt.tau_sign == 1
    assert rel(simple, -fd.center.I1 / omega + bt.beta) <= 1e-6


@pytest.mark.parametrize("kappa", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_tau_positive(kappa):
    bt = stability.beta_tau_phi6(TWO_PI, kappa)
    assert bt.tau > 0 and bt.beta < 0


def test_tau_prefactor_error():
    with pytest.raises(ParameterError):
        stability.beta_tau_phi6(20.0, 0.1)


def test_speed_sign_symmetry():
    omega = stability.phi4_omega(8.0, 0.8)
    fd = stability.family_derivative(1, 8.0, omega)
    c = math.sqrt(1 - omega)
    a = stability.d2_direct(1, 8.0, omega, c, deriv=fd)
    b = stability.d2_direct(1, 8.0, omega, -c, deriv=fd)
    assert abs(a - b) <= 1e-12 * abs(a)


@pytest.mark.parametrize("k,kappa", [(1, 0.3), (2, 0.7)])
def test_first_derivative(k, kappa):
    omega = stability.omega_from_kappa(k, TWO_PI, kappa)
    fd, exact = stability.d1_check(k, TWO_PI, math.sqrt(1 - omega))
    assert rel(fd, exact) <= 1e-4


@pytest.mark.parametrize("k", [1, 2])
def test_integral_identities(k):
    omega = stability.omega_from_kappa(k, TWO_PI, 0.5)
    audit = stability.identity_audit(k, TWO_PI, omega)
    assert audit.first <= 1e-6
    assert audit.second <= 1e-5


def test_near_linear_limit_uses_fallback():
    omega = stability.omega_from_kappa(2, TWO_PI, 0.1)
    fd = stability.family_derivative(2, TWO_PI, omega)
    assert not fd.flagged
    assert fd.richardson < stability.RICHARDSON_GATE


def test_classify_examples():
    r1 = stability.classify(1, TWO_PI, stability.phi4_omega(TWO_PI, 0.5))
    assert r1.verdict == "unstable_in_X" and (r1.n_negative, r1.n_zero) == (1, 1)
    assert r1.kappa == pytest.approx(0.5, abs=1e-10)
    r2 = stability.classify(2, TWO_PI, stability.omega_from_kappa(2, TWO_PI, 0.6))
    assert r2.verdict == "unstable_in_X" and r2.tau_sign == 1
    r3 = stability.classify(3, 8.0, 1.0)
    assert r3.verdict == "stable_in_X_odd"
    assert r3.diagnostics["odd_sigma"] > 0


def test_classify_undetermined():
    r = stability.classify(1, TWO_PI, 1.5)
    assert r.verdict == "undetermined" and r.reasons
    r = stability.classify(1, 5.0, 0.9)
    assert r.verdict == "undetermined"


def test_report_serialisation():
    r = stability.classify(1, 8.0, stability.phi4_omega(8.0, 0.5))
    assert len(r.csv_row()) == len(r.CSV_COLUMNS)
    assert r.as_dict()["verdict"] == r.verdict


def test_sweep_order():
    rows = stability.stability_sweep(1, 8.0, [0.7, 0.3])
    assert [round(r.kappa, 12) for r in rows] == [0.7, 0.3]
