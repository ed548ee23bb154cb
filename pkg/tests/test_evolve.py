import math

import numpy as np
import pytest

from kgwave import _fourier, evolve, spectra, waves
from kgwave.errors import BlowUpError, DomainError, ParityError


@pytest.fixture(scope="module")
def wave256():
    return waves.explicit_phi4(2 * math.pi, 0.5, N=256)


def c_of(wave):
    return wave.params.c


def test_unperturbed_seed(wave256):
    s = evolve.seed_traveling(wave256, c_of(wave256), 0.0)
    np.testing.assert_array_equal(s.phi, wave256.h)
    np.testing.assert_array_equal(s.psi, c_of(wave256) * wave256.hprime)


def test_generic_seed_distance(wave256):
    c = c_of(wave256)
    s = evolve.seed_traveling(wave256, c, 1e-3)
    d = math.sqrt(spectra.x_norm_sq(s.phi - wave256.h, s.psi - c * wave256.hprime, wave256.L))
    assert abs(d - 1e-3) <= 1e-12
    assert evolve.orbit_distance(s, wave256, c) == pytest.approx(1e-3, rel=1e-8)


def test_odd_seed_parity(still_wave):
    s = evolve.seed_traveling(still_wave, 0.0, 1e-3, "odd", seed=3)
    assert np.max(np.abs(evolve.even_part(s.phi))) <= 1e-12
    assert np.max(np.abs(evolve.even_part(s.psi))) <= 1e-12


def test_odd_seed_needs_rest(wave256):
    with pytest.raises(ParityError):
        evolve.seed_traveling(wave256, c_of(wave256), 1e-3, "odd")


def test_seed_speed_mismatch(wave256):
    with pytest.raises(DomainError):
        evolve.seed_traveling(wave256, 0.1, 0.0)


def test_reversibility():
    rng = np.random.default_rng(1)
    L = 10.0
    phi = spectra.resample(0.3 * rng.standard_normal(16), 128)
    psi = spectra.resample(0.3 * rng.standard_normal(16), 128)
    s0 = evolve.FieldState(0.0, phi, psi, L, 1)
    dt = 0.25 * s0.dx
    back = evolve.step(evolve.step(s0, dt), -dt)
    assert np.max(np.abs(back.phi - phi)) <= 1e-12
    assert np.max(np.abs(back.psi - psi)) <= 1e-12


def test_linear_dispersion():
    L, n, m = 2 * math.pi, 32, 2
    x = _fourier.grid(n, L)
    q = 2 * math.pi * m / L
    nu = math.sqrt(q * q - 1)
    s = evolve.FieldState(0.0, np.cos(q * x), np.zeros(n), L, 1)
    dt, steps = 1e-4, 10000
    for _ in range(steps):
        s = evolve.step(s, dt, linear=True)
    exact = math.cos(nu * dt * steps) * np.cos(q * x)
    assert np.max(np.abs(s.phi - exact)) <= 1e-8


def test_transport_short(phi4_wave):
    c = c_of(phi4_wave)
    s = evolve.seed_traveling(phi4_wave, c, 0.0)
    dt = 0.25 * s.dx
    for _ in range(1000):
        s = evolve.step(s, dt)
    assert evolve.transport_error(s, phi4_wave, c) <= 1e-6


def test_transport_second_order(wave256):
    c = c_of(wave256)
    errs = []
    for factor in (0.25, 0.125):
        tr = evolve.run_experiment(wave256, c, 0.0, T=10.0, dt=factor * wave256.L / wave256.N, symmetry="half_shift")
        errs.append(evolve.transport_error(tr.final, wave256, c))
    assert 3.0 < errs[0] / errs[1] < 5.0


def test_cfl_guard(wave256):
    s = evolve.seed_traveling(wave256, c_of(wave256), 0.0)
    with pytest.raises(DomainError):
        evolve.step(s, 0.6 * s.dx)


def test_blow_up(still_wave):
    n, L = still_wave.N, still_wave.L
    s = evolve.FieldState(0.0, np.full(n, 1e4), np.zeros(n), L, 1)
    with pytest.raises(BlowUpError):
        for _ in range(200):
            s = evolve.step(s, 0.25 * s.dx)
    start = evolve.FieldState(0.0, np.full(n, 1e4), np.zeros(n), L, 1)
    tr = evolve.run_experiment(still_wave, 0.0, 0.0, T=5.0, state=start)
    assert tr.terminated and tr.reason == "blow_up"


def test_conserved_quantities(wave256):
    zero = evolve.FieldState(0.0, np.zeros(32), np.zeros(32), 5.0, 2)
    assert evolve.conserved(zero) == (0.0, 0.0)
    c = c_of(wave256)
    s = evolve.seed_traveling(wave256, c, 0.0)
    _, F = evolve.conserved(s)
    I1 = wave256.L / wave256.N * np.sum(wave256.hprime**2)
    assert F == pytest.approx(c * I1, rel=1e-12)


def test_energy_drift_long(still_wave):
    s = evolve.seed_traveling(still_wave, 0.0, 1e-3, "odd")
    tr = evolve.run_experiment(still_wave, 0.0, 1e-3, "odd", T=10000 * 0.25 * s.dx, sample_dt=0.25 * s.dx * 500)
    assert tr.energy_drift <= 1e-6


def test_orbit_distance_translations(wave256):
    c = c_of(wave256)
    for r in (0.37, 1.9, wave256.L / 2):
        h, p = evolve.shift_wave(wave256, c, r)
        assert evolve.orbit_distance(evolve.FieldState(0.0, h, p, wave256.L, 1), wave256, c) <= 1e-10
    neg = evolve.FieldState(0.0, -wave256.h, -c * wave256.hprime, wave256.L, 1)
    assert evolve.orbit_distance(neg, wave256, c) <= 1e-10


def test_orbit_distance_orthogonal_perturbation(still_wave):
    eps = 1e-3
    u, v = evolve.perturbation(still_wave, 0.0, "odd", seed=5)
    s = evolve.FieldState(0.0, still_wave.h + eps * u, eps * v, still_wave.L, 1)
    d = evolve.orbit_distance(s, still_wave, 0.0)
    assert 0.5 * eps <= d <= eps * (1 + 1e-9)


def test_unprojected_parity(still_wave):
    tr = evolve.run_experiment(still_wave, 0.0, 1e-3, "odd", T=10.0, symmetry=None)
    assert np.max(np.abs(evolve.even_part(tr.final.phi))) <= 1e-10
    assert np.max(np.abs(evolve.even_part(tr.final.psi))) <= 1e-10


def test_trace_metadata(still_wave):
    tr = evolve.run_experiment(still_wave, 0.0, 0.0, "odd", T=2.0)
    assert tr.meta["symmetry"] == "parity" and tr.reason == "completed"
    assert tr.times[-1] == pytest.approx(2.0)
    assert tr.max_distance <= 1e-9


def test_unknown_symmetry(still_wave):
    with pytest.raises(DomainError):
        evolve.run_experiment(still_wave, 0.0, 0.0, T=1.0, symmetry="mirror")
