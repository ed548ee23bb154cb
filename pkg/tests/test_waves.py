import math

import numpy as np
import pytest

from kgwave import specfun, waves
from kgwave.errors import EnergyLevelError, NoSolutionError, ParameterError

TWO_PI = 2.0 * math.pi


def matched_numeric(wave):
    B = 0.5 * wave.hprime[0] ** 2
    return waves.wave_from_energy(wave.k, wave.omega, B, N=wave.N)


def test_phi4_parameters(phi4_wave):
    p = phi4_wave.params
    K = specfun.complete_K(0.5)
    assert p.omega == pytest.approx(4 * math.pi**2 / (16 * K**2 * 1.25), rel=1e-14)
    assert p.omega == pytest.approx(0.6946, abs=5e-5)
    assert p.c == pytest.approx(0.552617858055265, abs=1e-12)
    assert np.max(phi4_wave.h) == pytest.approx(math.sqrt(2) * 0.5 / math.sqrt(1.25), abs=1e-12)
    assert p.c**2 + p.omega == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("kappa", [0.2, 0.5, 0.8, 0.9])
def test_phi4_residual(kappa):
    assert waves.ode_residual(waves.explicit_phi4(TWO_PI, kappa, N=512)) <= 1e-8


@pytest.mark.parametrize("kappa", [0.2, 0.5, 0.6, 0.8])
def test_phi6_residual(kappa):
    assert waves.ode_residual(waves.explicit_phi6(TWO_PI, kappa, N=512)) <= 1e-6


def test_phi6_b_limits():
    assert waves.phi6_b(0.0) == 0.0
    assert waves.phi6_b(1.0) == pytest.approx(1 / 3, abs=1e-15)


def test_phi6_printed_amplitude_is_rejected():
    a, source = waves.phi6_amplitude(0.6)
    assert source == "numeric"
    assert not math.isclose(a, waves.phi6_amplitude_printed(0.6), rel_tol=1e-3)


def test_small_modulus_amplitude():
    w = waves.explicit_phi4(TWO_PI, 1e-4, N=64)
    assert np.max(np.abs(w.h)) < 2e-4


def test_phi4_rejects_nonreal_speed():
    with pytest.raises(ParameterError):
        waves.explicit_phi4(20.0, 0.1)


@pytest.mark.parametrize("builder,kappas", [(waves.explicit_phi4, (0.2, 0.5, 0.8)), (waves.explicit_phi6, (0.2, 0.5, 0.6, 0.8))])
def test_closed_form_matches_shooting(builder, kappas):
    for kappa in kappas:
        w = builder(TWO_PI, kappa, N=512)
        num = matched_numeric(w)
        assert num.L == pytest.approx(TWO_PI, abs=1e-8)
        assert np.max(np.abs(num.h - w.h)) <= 1e-6


def test_phi4_pointwise_agreement(phi4_wave):
    num = matched_numeric(phi4_wave)
    assert np.max(np.abs(num.h - phi4_wave.h)) <= 1e-7


@pytest.mark.parametrize("k,omega,frac", [(1, 1.0, 0.3), (2, 0.5, 0.7), (3, 4.0, 0.5)])
def test_wave_invariants(k, omega, frac):
    w = waves.wave_from_energy(k, omega, frac * waves.b_omega(k, omega), N=512)
    assert w.h[0] == 0.0
    assert w.hprime[0] == pytest.approx(math.sqrt(2 * w.params.B), rel=1e-12)
    assert w.quadrature_defect() <= 1e-9
    assert w.oddness_defect() <= 1e-10
    assert np.max(np.abs(w.h)) < 1.0
    assert np.count_nonzero(np.diff(np.sign(w.hprime)) != 0) == 2
    zeros = np.count_nonzero(w.h == 0.0) + np.count_nonzero(w.h[:-1] * w.h[1:] < 0)
    assert zeros == 2


def test_closed_form_quadrature_identity(phi4_wave, phi6_wave):
    assert phi4_wave.quadrature_defect() <= 1e-9
    assert phi6_wave.quadrature_defect() <= 1e-9
    assert phi4_wave.oddness_defect() <= 1e-10


def test_center_limit_period():
    w = waves.wave_from_energy(1, 2.0, 1e-8, N=32)
    assert w.L == pytest.approx(TWO_PI * math.sqrt(2.0), rel=1e-6)


def test_separatrix_growth():
    bw = waves.b_omega(1, 1.0)
    L = [waves.shoot(1, 1.0, f * bw).period for f in (0.999, 0.9999, 0.99999)]
    assert L[0] > 2 * TWO_PI
    assert L[0] < L[1] < L[2]


@pytest.mark.parametrize("B", [0.0, -0.1, 0.25, 0.3])
def test_energy_level_errors(B):
    with pytest.raises(EnergyLevelError):
        waves.wave_from_energy(1, 1.0, B)


def test_energy_from_period_recovers_explicit(phi4_wave):
    B = waves.energy_from_period(1, phi4_wave.omega, TWO_PI)
    K = specfun.complete_K(0.5)
    a = math.sqrt(2) * 0.5 / math.sqrt(1.25)
    assert B == pytest.approx(8 * a**2 * K**2 / TWO_PI**2, abs=1e-8)


def test_energy_from_period_round_trip():
    B = waves.energy_from_period(3, 0.5, 7.0)
    assert waves.shoot(3, 0.5, B).period == pytest.approx(7.0, abs=1e-9)


def test_energy_from_period_center_limit():
    L0 = TWO_PI * 1.000001
    assert waves.energy_from_period(1, 1.0, L0) < 1e-4


def test_energy_from_period_no_solution():
    with pytest.raises(NoSolutionError):
        waves.energy_from_period(1, 1.0, 6.0)


def test_turning_points():
    b1, b2 = waves.turning_points(1, 1.0, 0.2)
    assert b1 == -b2
    assert abs(b2**2 - b2**4 / 2 - 0.4) < 1e-14
    _, small = waves.turning_points(2, 1.5, 1e-10)
    assert small == pytest.approx(math.sqrt(2 * 1.5 * 1e-10), rel=1e-6)
    _, big = waves.turning_points(1, 1.0, waves.b_omega(1, 1.0) * (1 - 1e-10))
    assert big > 0.999


def test_residual_negative_control(phi4_wave):
    bad = waves._wave_from_samples(phi4_wave.params, phi4_wave.x, 1.1 * phi4_wave.h, 1.1 * phi4_wave.hprime)
    assert waves.ode_residual(bad) > 1e-3
    zero = waves._wave_from_samples(phi4_wave.params, phi4_wave.x, 0 * phi4_wave.h, 0 * phi4_wave.h)
    assert waves.ode_residual(zero) == 0.0


def test_kink_limit():
    errs = []
    for kappa in (0.99, 0.999, 0.9999):
        w = waves.explicit_phi4(TWO_PI, kappa, N=1024)
        window = w.x <= w.L / 8
        kink = np.tanh(w.x[window] / math.sqrt(2 * w.omega))
        errs.append(np.max(np.abs(w.h[window] - kink)))
    assert errs[0] > errs[1] > errs[2]


def test_wave_is_immutable(phi4_wave):
    with pytest.raises(ValueError):
        phi4_wave.h[0] = 1.0
