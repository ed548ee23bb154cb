"""Time evolution of ``phi_tt = phi_xx + phi - phi^(2k+1)`` on a periodic domain.

The scheme is Stormer-Verlet (leapfrog) in time with spectral evaluation of
``phi_xx``.  A traveling wave ``h`` enters as the initial datum
``(phi, psi) = (h, c h')``; it moves as ``phi(x, t) = h(x + c t)``.

Two exact symmetries of the equation can be enforced after every step, which
removes round-off components that the linearised flow would otherwise amplify:

``"parity"``      odd functions, ``f(-x) = -f(x)``;
``"half_shift"``  ``f(x + L/2) = -f(x)``, satisfied by every odd wave built here.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import _fourier
from .errors import BlowUpError, DomainError, ParityError
from .spectra import kg_block_spectrum, x_norm_sq
from .waves import PeriodicWave

log = logging.getLogger(__name__)

BLOW_UP = 1e6
CFL = 0.5
DEFAULT_CFL = 0.25
SYMMETRIES = (None, "parity", "half_shift")


@dataclass(frozen=True, eq=False)
class FieldState:
    t: float
    phi: np.ndarray
    psi: np.ndarray
    L: float
    k: int

    def __post_init__(self):
        for name in ("phi", "psi"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.phi.shape != self.psi.shape or self.phi.ndim != 1:
            raise DomainError("phi and psi must be 1-d arrays of equal length")

    @property
    def N(self) -> int:
        return self.phi.size

    @property
    def dx(self) -> float:
        return self.L / self.N


@dataclass(frozen=True, eq=False)
class OrbitTrace:
    times: np.ndarray
    distances: np.ndarray
    energies: np.ndarray
    momenta: np.ndarray
    terminated: bool = False
    reason: str = "completed"
    meta: dict = field(default_factory=dict)
    final: FieldState | None = None

    @property
    def energy_drift(self) -> float:
        return float(np.max(np.abs(self.energies - self.energies[0])) / abs(self.energies[0]))

    @property
    def momentum_drift(self) -> float:
        """Drift of F relative to its initial value (absolute if F(0) = 0)."""
        scale = abs(self.momenta[0]) or 1.0
        return float(np.max(np.abs(self.momenta - self.momenta[0])) / scale)

    @property
    def max_distance(self) -> float:
        return float(np.max(self.distances))


# --- symmetry projections -------------------------------------------------------


def odd_part(f: np.ndarray) -> np.ndarray:
    """Odd part about x = 0 on a periodic grid."""
    return 0.5 * (f - np.roll(f[::-1], 1))


def even_part(f: np.ndarray) -> np.ndarray:
    return 0.5 * (f + np.roll(f[::-1], 1))


def half_shift_part(f: np.ndarray) -> np.ndarray:
    """Component with ``f(x + L/2) = -f(x)`` (odd Fourier harmonics only)."""
    if f.size % 2:
        raise DomainError("half-shift projection needs an even grid")
    return 0.5 * (f - np.roll(f, -(f.size // 2)))


def _projector(symmetry):
    if symmetry is None:
        return None
    if symmetry == "parity":
        return odd_part
    if symmetry == "half_shift":
        return half_shift_part
    raise DomainError(f"unknown symmetry {symmetry!r}; expected one of {SYMMETRIES}")


def project(state: FieldState, symmetry) -> FieldState:
    proj = _projector(symmetry)
    if proj is None:
        return state
    return FieldState(state.t, proj(state.phi), proj(state.psi), state.L, state.k)


# --- the scheme --------------------------------------------------------------------


def force(phi: np.ndarray, L: float, k: int, linear: bool = False) -> np.ndarray:
    """``phi_xx + phi - phi^(2k+1)`` (without the power when ``linear``)."""
    out = _fourier.derivative(phi, L, 2) + phi
    if not linear:
        out -= phi ** (2 * k + 1)
    return out


def _check_dt(dt: float, dx: float) -> None:
    if not abs(dt) <= CFL * dx:
        raise DomainError(f"|dt| = {abs(dt):.3g} exceeds the bound {CFL} dx = {CFL * dx:.3g}")


def step(state: FieldState, dt: float, *, linear: bool = False) -> FieldState:
    """One Stormer-Verlet step; a negative ``dt`` runs the scheme backwards."""
    _check_dt(dt, state.dx)
    with np.errstate(over="ignore", invalid="ignore"):
        phi, psi = _verlet(state.phi, state.psi, None, dt, state.L, state.k, linear)[:2]
    if not np.all(np.isfinite(phi)) or np.max(np.abs(phi)) > BLOW_UP:
        raise BlowUpError(f"|phi| exceeded {BLOW_UP:g} at t = {state.t + dt:.6g}")
    return FieldState(state.t + dt, phi, psi, state.L, state.k)


def _verlet(phi, psi, f0, dt, L, k, linear):
    if f0 is None:
        f0 = force(phi, L, k, linear)
    half = psi + 0.5 * dt * f0
    phi1 = phi + dt * half
    f1 = force(phi1, L, k, linear)
    return phi1, half + 0.5 * dt * f1, f1


def conserved(state: FieldState) -> tuple[float, float]:
    """``E = 1/2 int (phi_x^2 + psi^2 - phi^2 + phi^(2k+2)/(k+1))`` and ``F = int phi_x psi``."""
    k, dx = state.k, state.dx
    phi, psi = state.phi, state.psi
    px = _fourier.derivative(phi, state.L, 1)
    E = 0.5 * dx * float(np.sum(px * px + psi * psi - phi * phi + phi ** (2 * k + 2) / (k + 1)))
    F = dx * float(np.sum(px * psi))
    return E, F


# --- initial data ------------------------------------------------------------------


def _wave_state(wave: PeriodicWave, c: float) -> tuple[np.ndarray, np.ndarray]:
    return np.array(wave.h), c * np.array(wave.hprime)


def _check_speed(wave: PeriodicWave, c: float) -> None:
    if not abs(c) < 1.0:
        raise DomainError(f"|c| must be < 1, got {c}")
    if not math.isclose(c * c, 1.0 - wave.omega, rel_tol=1e-12, abs_tol=1e-14):
        raise DomainError(f"c^2 = {c * c!r} does not match 1 - omega = {1.0 - wave.omega!r}")


def _unit(u: np.ndarray, v: np.ndarray, L: float) -> tuple[np.ndarray, np.ndarray]:
    n = math.sqrt(x_norm_sq(u, v, L))
    return u / n, v / n


def perturbation(
    wave: PeriodicWave, c: float, mode: str = "generic", seed: int = 0, modes: int = 16
) -> tuple[np.ndarray, np.ndarray]:
    """Unit X-norm perturbation direction.

    ``generic``: ground state of the Klein-Gordon block operator (the direction
    that lowers the Lyapunov functional).  ``odd``: random odd pair with
    algebraically decaying sine coefficients, drawn from ``seed``.
    """
    n = wave.N
    if mode == "generic":
        rep = kg_block_spectrum(wave, c)
        vec = rep.eigenvectors[:, 0]
        u, v = vec[:n].copy(), vec[n:].copy()
        # fix the eigenvector sign deterministically
        j = int(np.argmax(np.abs(np.concatenate([u, v]))))
        if np.concatenate([u, v])[j] < 0:
            u, v = -u, -v
    elif mode == "odd":
        if c != 0.0:
            raise ParityError(f"odd perturbations need c = 0 (parity is not preserved at c={c})")
        rng = np.random.default_rng(seed)
        x = _fourier.grid(n, wave.L)
        m = np.arange(1, modes + 1)
        basis = np.sin(2.0 * math.pi * np.outer(x, m) / wave.L)
        u = basis @ (rng.standard_normal(modes) / m**2)
        v = basis @ (rng.standard_normal(modes) / m**1.5)
        u, v = odd_part(u), odd_part(v)
    else:
        raise DomainError(f"unknown mode {mode!r}; expected 'generic' or 'odd'")
    return _unit(u, v, wave.L)


def seed_traveling(
    wave: PeriodicWave, c: float, epsilon: float, mode: str = "generic", seed: int = 0
) -> FieldState:
    """``(h, c h') + epsilon * (unit X-norm perturbation)`` at t = 0."""
    _check_speed(wave, c)
    if mode == "odd" and c != 0.0:
        raise ParityError(f"odd perturbations need c = 0 (parity is not preserved at c={c})")
    if not epsilon >= 0:
        raise DomainError(f"epsilon must be >= 0, got {epsilon}")
    phi, psi = _wave_state(wave, c)
    if epsilon > 0:
        u, v = perturbation(wave, c, mode, seed)
        phi, psi = phi + epsilon * u, psi + epsilon * v
    return FieldState(0.0, phi, psi, wave.L, wave.k)


# --- distances ------------------------------------------------------------------------


def _coeffs(state_phi, state_psi, L):
    n = state_phi.size
    q = _fourier.wavenumbers(n, L)
    w = np.full(q.size, 2.0)
    w[0] = 1.0
    if n % 2 == 0:
        w[-1] = 1.0
    return np.fft.rfft(state_phi), np.fft.rfft(state_psi), q, w


def _x_norm_sq_hat(U, V, q, w, L, n):
    uw = (1.0 + q * q) * np.abs(U) ** 2 + np.abs(V) ** 2
    if n % 2 == 0:
        # the Nyquist mode carries no derivative in the spectral convention
        uw[-1] = np.abs(U[-1]) ** 2 + np.abs(V[-1]) ** 2
    return float(L / n**2 * np.dot(w, uw))


def shift_wave(wave: PeriodicWave, c: float, r: float) -> tuple[np.ndarray, np.ndarray]:
    """``(h, c h')`` evaluated at ``x + r`` by Fourier interpolation."""
    n, L = wave.N, wave.L
    H, P, q, _ = _coeffs(np.asarray(wave.h), c * np.asarray(wave.hprime), L)
    e = np.exp(1j * q * r)
    if n % 2 == 0:
        e[-1] = e[-1].real
    return np.fft.irfft(H * e, n=n), np.fft.irfft(P * e, n=n)


def orbit_distance(state: FieldState, wave: PeriodicWave, c: float) -> float:
    """X-norm distance from the state to the translation orbit of ``(h, c h')``.

    Grid shifts are scanned with one FFT correlation; the best one is refined
    by a parabola through its neighbours and two Newton steps on the
    (trigonometric) correlation.
    """
    n, L = state.N, state.L
    if wave.N != n or not math.isclose(wave.L, L, rel_tol=1e-12):
        raise DomainError("state and wave must share the grid")
    A, Bv, q, w = _coeffs(state.phi, state.psi, L)
    H, P, _, _ = _coeffs(np.asarray(wave.h), c * np.asarray(wave.hprime), L)
    xw = 1.0 + q * q
    if n % 2 == 0:
        xw[-1] = 1.0
    # C(r) = <state, wave(. + r)>_X = sum_m w_m Re(Z_m e^{i q_m r}) * L / n^2
    Z = xw * A.conj() * H + Bv.conj() * P
    corr = np.fft.irfft(Z.conj(), n=n)  # proportional to C at r = -j dx
    j = int(np.argmax(corr))
    dx = L / n
    c0, cm, cp = corr[j], corr[(j - 1) % n], corr[(j + 1) % n]
    denom = cm - 2.0 * c0 + cp
    off = 0.5 * (cm - cp) / denom if denom < 0 else 0.0
    r = -(j + off) * dx

    def derivs(r):
        e = Z * np.exp(1j * q * r)
        return float(np.dot(w, np.real(1j * q * e))), float(np.dot(w, np.real(-q * q * e)))

    for _ in range(2):
        d1, d2 = derivs(r)
        if d2 >= 0:
            break
        r -= max(-dx, min(dx, d1 / d2))

    e = np.exp(1j * q * r)
    if n % 2 == 0:
        e[-1] = e[-1].real
    return math.sqrt(max(_x_norm_sq_hat(A - H * e, Bv - P * e, q, w, L, n), 0.0))


def transport_error(state: FieldState, wave: PeriodicWave, c: float) -> float:
    """Sup-norm distance to the exact traveling solution ``(h, c h')(x + c t)``."""
    h, p = shift_wave(wave, c, c * state.t)
    return float(max(np.max(np.abs(state.phi - h)), np.max(np.abs(state.psi - p))))


# --- experiments ---------------------------------------------------------------------------


def run_experiment(
    wave: PeriodicWave,
    c: float,
    epsilon: float,
    mode: str = "generic",
    T: float = 200.0,
    sample_dt: float = 1.0,
    *,
    dt: float | None = None,
    seed: int = 0,
    symmetry: str | None = "auto",
    state: FieldState | None = None,
    stop_distance: float | None = None,
) -> OrbitTrace:
    """Evolve seeded data to time T, sampling the orbit distance every ``sample_dt``.

    ``symmetry="auto"`` enforces parity in the odd mode and nothing otherwise.
    ``stop_distance`` ends the run early once the distance exceeds it.  A
    blow-up truncates the trace and marks it terminated.
    """
    if symmetry == "auto":
        symmetry = "parity" if mode == "odd" else None
    proj = _projector(symmetry)
    if state is None:
        state = seed_traveling(wave, c, epsilon, mode, seed)
    dx = state.dx
    if dt is None:
        dt = DEFAULT_CFL * dx
    _check_dt(dt, dx)
    per_sample = max(1, math.ceil(sample_dt / dt - 1e-9))
    dt = sample_dt / per_sample
    n_samples = int(round(T / sample_dt))
    L, k = state.L, state.k
    phi, psi = np.array(state.phi), np.array(state.psi)
    if proj is not None:
        phi, psi = proj(phi), proj(psi)

    times, dists, Es, Fs = [], [], [], []

    def record(t):
        s = FieldState(t, phi, psi, L, k)
        E, F = conserved(s)
        times.append(t)
        dists.append(orbit_distance(s, wave, c))
        Es.append(E)
        Fs.append(F)

    record(state.t)
    f = force(phi, L, k)
    reason, terminated = "completed", False
    for i in range(1, n_samples + 1):
        # overflow is detected explicitly below
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(per_sample):
                phi, psi, f = _verlet(phi, psi, f, dt, L, k, False)
                if proj is not None:
                    phi, psi, f = proj(phi), proj(psi), proj(f)
        if not np.all(np.isfinite(phi)) or np.max(np.abs(phi)) > BLOW_UP:
            reason, terminated = "blow_up", True
            log.info("blow-up before t = %g; trace truncated", state.t + i * sample_dt)
            break
        record(state.t + i * sample_dt)
        if stop_distance is not None and dists[-1] > stop_distance:
            reason = "escaped"
            break

    meta = {
        "k": k, "L": L, "N": state.N, "c": c, "epsilon": epsilon, "mode": mode,
        "seed": seed, "T": T, "sample_dt": sample_dt, "dt": dt, "symmetry": symmetry,
        "termination": reason,
    }  # fmt: skip
    final = FieldState(times[-1], phi, psi, L, k) if not terminated else None
    return OrbitTrace(
        np.array(times), np.array(dists), np.array(Es), np.array(Fs), terminated, reason, meta, final
    )
