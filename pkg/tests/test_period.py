import math

import numpy as np
import pytest

from kgwave import period, waves
from kgwave.errors import DomainError, EnergyLevelError


def test_quadrature_center_limit():
    for omega in (0.25, 1.0, 4.0):
        L = period.period_quadrature(2, omega, 1e-6 * waves.b_omega(2, omega))
        assert L / (2 * math.pi * math.sqrt(omega)) == pytest.approx(1.0, abs=1e-4)


def test_quadrature_matches_closed_form(phi4_wave):
    B = 0.5 * phi4_wave.hprime[0] ** 2
    assert period.period_quadrature(1, phi4_wave.omega, B) == pytest.approx(2 * math.pi, abs=1e-8)


def test_quadrature_blows_up_at_separatrix():
    bw = waves.b_omega(1, 1.0)
    L = [period.period_quadrature(1, 1.0, f * bw) for f in (0.9, 0.99, 0.999)]
    assert L[0] < L[1] < L[2]


@pytest.mark.parametrize("k,omega,frac", [(1, 1.0, None), (2, 0.5, 0.5), (5, 2.0, 0.9)])
def test_dL_dB_positive(k, omega, frac):
    B = 0.1 if frac is None else frac * waves.b_omega(k, omega)
    assert period.dL_dB(k, omega, B) > 0


def test_sample_invariants():
    s = period.sample_period_map(3, 4.0, 0.5 * waves.b_omega(3, 4.0))
    assert s.rel_mismatch <= 1e-8
    assert s.L_B > 0
    assert not s.flagged


def test_energy_errors():
    with pytest.raises(EnergyLevelError):
        period.period_quadrature(1, 1.0, 0.3)


def test_monotonicity_values():
    t = period.monotonicity_certificate(1, [0.0])
    assert t.I[0] == 0.0
    assert t.dI[0] == pytest.approx(1.5, abs=1e-15)
    t2 = period.monotonicity_certificate(2, [0.5])
    assert t2.dI[0] > 0


@pytest.mark.parametrize("k", range(1, 7))
def test_monotonicity_grid(k):
    h = np.round(np.arange(-0.999, 0.9995, 1e-3), 12)
    table = period.monotonicity_certificate(k, h)
    assert table.strictly_increasing
    assert table.max_fd_rel_error <= 1e-6


def test_monotonicity_domain():
    with pytest.raises(DomainError):
        period.monotonicity_certificate(1, [0.5, 1.0])
