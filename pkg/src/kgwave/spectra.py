"""Fourier-collocation spectra of the linearised operators around a wave.

* ``hill``: ``-omega d^2 - 1 + (2k+1) h^(2k)`` on L-periodic functions.
* ``kg_block``: the 2x2 operator
  ``[[-d^2 - 1 + (2k+1) h^(2k), c d], [-c d, 1]]`` on pairs.
* ``hill_odd``: the scalar operator restricted to odd functions (sine basis).

Eigenvalues are computed with dense symmetric solvers; the matrices are
assembled from Trefethen's periodic differentiation matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _fourier
from .errors import DomainError, InfeasibleError, ResolutionError, SymmetryError
from .waves import PeriodicWave

TOL_ZERO_FACTOR = 1e-6
RESOLUTION_TAIL = 1e-10
SYMMETRY_RTOL = 1e-12
N_EIGENVECTORS = 4


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    kind: str
    eigenvalues: np.ndarray
    n_negative: int
    n_zero: int
    zero_eigenvector_match: float
    tol_zero: float
    eigenvectors: np.ndarray = field(repr=False)
    meta: dict = field(default_factory=dict)

    @property
    def inertial_index(self) -> tuple[int, int]:
        return self.n_negative, self.n_zero

    def as_dict(self, n_eigs: int = 10) -> dict:
        return {
            "kind": self.kind,
            **self.meta,
            "eigenvalues": [float(v) for v in self.eigenvalues[:n_eigs]],
            "n_negative": self.n_negative,
            "n_zero": self.n_zero,
            "zero_match": self.zero_eigenvector_match,
        }


def resample(f: np.ndarray, n: int) -> np.ndarray:
    """Trigonometric interpolation of a periodic sample onto ``n`` points."""
    m = f.size
    if n == m:
        return np.array(f, dtype=float)
    fh = np.fft.rfft(f) * (n / m)
    keep = min(n, m) // 2
    out = np.zeros(n // 2 + 1, dtype=complex)
    out[:keep] = fh[:keep]
    return np.fft.irfft(out, n=n)


def _potential(wave: PeriodicWave, n: int) -> tuple[np.ndarray, np.ndarray]:
    if n % 2 or n < 64:
        raise DomainError(f"N must be even and >= 64, got {n}")
    h = resample(wave.h, n)
    tail = _fourier.spectral_tail(h)
    if tail > RESOLUTION_TAIL:
        raise ResolutionError(f"wave not resolved on {n} points (spectral tail {tail:.2e})")
    return h, (2 * wave.k + 1) * h ** (2 * wave.k)


def _check_symmetric(mat: np.ndarray) -> None:
    scale = np.max(np.abs(mat))
    if np.max(np.abs(mat - mat.T)) > SYMMETRY_RTOL * scale:
        raise SymmetryError("assembled operator is not symmetric")


def _match(vec: np.ndarray, ref: np.ndarray) -> float:
    nr = np.linalg.norm(ref)
    if nr == 0.0:
        return 0.0
    return float(abs(np.dot(vec, ref)) / (np.linalg.norm(vec) * nr))


def _report(kind, vals, vecs, tol, ref, meta) -> SpectrumReport:
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    n_neg = int(np.sum(vals < -tol))
    n_zero = int(np.sum(np.abs(vals) <= tol))
    if ref is None:
        match = 0.0
    else:
        match = _match(vecs[:, int(np.argmin(np.abs(vals)))], ref)
    keep = min(N_EIGENVECTORS, vals.size)
    return SpectrumReport(kind, vals, n_neg, n_zero, match, tol, vecs[:, :keep].copy(), meta)


def _meta(wave: PeriodicWave, n: int, c) -> dict:
    return {
        "k": wave.k,
        "omega": wave.omega,
        "B": wave.params.B,
        "c": c,
        "N": n,
    }


def hill_matrix(potential: np.ndarray, omega: float, length: float) -> np.ndarray:
    """Collocation matrix of ``-omega d^2 + potential`` (the ``-1`` is part of ``potential``)."""
    n = potential.size
    mat = -omega * _fourier.diff_matrix_2(n, length)
    mat[np.diag_indices(n)] += potential
    return mat


def kg_matrix(potential: np.ndarray, c: float, length: float) -> np.ndarray:
    """Block matrix ``[[-D2 + potential, c D1], [-c D1, I]]``."""
    n = potential.size
    d1 = _fourier.diff_matrix_1(n, length)
    top = hill_matrix(potential, 1.0, length)
    return np.block([[top, c * d1], [-c * d1, np.eye(n)]])


def hill_tol_zero(omega: float, length: float) -> float:
    return TOL_ZERO_FACTOR * omega * (2.0 * math.pi / length) ** 2


def hill_spectrum(wave: PeriodicWave, N: int | None = None) -> SpectrumReport:
    """Periodic spectrum of ``-omega d^2 - 1 + (2k+1) h^(2k)``."""
    n = wave.N if N is None else int(N)
    h, p = _potential(wave, n)
    mat = hill_matrix(p - 1.0, wave.omega, wave.L)
    _check_symmetric(mat)
    vals, vecs = np.linalg.eigh(mat)
    hp = _fourier.derivative(h, wave.L, 1)
    tol = hill_tol_zero(wave.omega, wave.L)
    return _report("hill", vals, vecs, tol, hp, _meta(wave, n, wave.params.c))


def kg_block_spectrum(wave: PeriodicWave, c: float, N: int | None = None) -> SpectrumReport:
    """Spectrum of the 2x2 Klein-Gordon operator in the plain L2 x L2 product."""
    if not math.isclose(c * c, 1.0 - wave.omega, rel_tol=1e-12, abs_tol=1e-14):
        raise DomainError(f"kg block needs c^2 = 1 - omega (c={c!r}, omega={wave.omega!r})")
    n = wave.N if N is None else int(N)
    h, p = _potential(wave, n)
    mat = kg_matrix(p - 1.0, c, wave.L)
    _check_symmetric(mat)
    vals, vecs = np.linalg.eigh(mat)
    hp = _fourier.derivative(h, wave.L, 1)
    hpp = _fourier.derivative(h, wave.L, 2)
    ref = np.concatenate([hp, c * hpp])
    tol = TOL_ZERO_FACTOR * (2.0 * math.pi / wave.L) ** 2
    return _report("kg_block", vals, vecs, tol, ref, _meta(wave, n, c))


def odd_basis(n: int) -> np.ndarray:
    """Grid-orthonormal columns ``sqrt(2/n) sin(2 pi m j / n)``, m = 1..n/2-1."""
    j = np.arange(n)[:, None]
    m = np.arange(1, n // 2)[None, :]
    return math.sqrt(2.0 / n) * np.sin(2.0 * math.pi * m * j / n)


def odd_spectrum(wave: PeriodicWave, N: int | None = None) -> SpectrumReport:
    """Spectrum of the scalar operator on odd L-periodic functions.

    The collocation matrix is compressed onto the sine basis, which it leaves
    invariant because the potential is even.  Eigenvectors are returned on the
    grid.
    """
    n = wave.N if N is None else int(N)
    _, p = _potential(wave, n)
    mat = hill_matrix(p - 1.0, wave.omega, wave.L)
    _check_symmetric(mat)
    S = odd_basis(n)
    red = S.T @ mat @ S
    red = 0.5 * (red + red.T)
    vals, coef = np.linalg.eigh(red)
    vecs = S @ coef
    tol = hill_tol_zero(wave.omega, wave.L)
    return _report("hill_odd", vals, vecs, tol, None, _meta(wave, n, wave.params.c))


# --- coercivity on the odd sector ----------------------------------------------


@dataclass(frozen=True)
class CoercivityReport:
    sigma: float
    gamma: float
    gamma_tilde: float
    M_k: float
    a: float
    b: float | None
    method: str
    gamma_sharp: float
    n_samples: int
    violations: int
    min_ratio: float


def _random_odd(rng, n: int, length: float, modes: int) -> np.ndarray:
    x = _fourier.grid(n, length)
    m = np.arange(1, modes + 1)
    amp = rng.standard_normal(modes) / m**1.5
    return np.sin(2.0 * math.pi * np.outer(x, m) / length) @ amp


def x_norm_sq(u: np.ndarray, v: np.ndarray, length: float) -> float:
    """``||u||_{H1}^2 + ||v||_{L2}^2`` by the periodic trapezoid rule."""
    w = length / u.size
    ux = _fourier.derivative(u, length, 1)
    return float(w * (np.dot(ux, ux) + np.dot(u, u) + np.dot(v, v)))


def kg_form(u: np.ndarray, v: np.ndarray, potential: np.ndarray, c: float, length: float) -> float:
    """Quadratic form ``<L_KG (u, v), (u, v)>`` in the L2 x L2 pairing."""
    w = length / u.size
    mat = kg_matrix(potential, c, length)
    z = np.concatenate([u, v])
    return float(w * z @ (mat @ z))


def coercivity_constants(
    wave: PeriodicWave, n_samples: int = 50, seed: int = 0, modes: int = 32
) -> CoercivityReport:
    """Coercivity constant of the c = 0 operator on odd pairs.

    With ``sigma`` the smallest odd eigenvalue and ``M_k = (2k+1) max|h|^(2k)``,
    the (a, b) inequality chain gives ``gamma = min(a, m) / (a + b omega/sigma)``
    with ``m = b - a - b omega/sigma - M_k``; it is feasible only when
    ``omega < sigma``.  Otherwise the bound is taken from the two estimates
    ``Q(u) >= sigma ||u||^2`` and ``Q(u) >= omega ||u'||^2 - ||u||^2``, which give
    ``gamma = 1 / ((1 + 1/sigma)/omega + 1/sigma)``.
    The returned ``gamma_tilde = min(gamma, 1)`` is then tested on random odd
    pairs and on the first odd eigenmode.
    """
    if not math.isclose(wave.omega, 1.0, rel_tol=0.0, abs_tol=1e-12):
        raise DomainError("coercivity constants are defined for c = 0 (omega = 1)")
    omega = wave.omega
    odd = odd_spectrum(wave)
    sigma = float(odd.eigenvalues[0])
    if sigma <= 0.0:
        raise InfeasibleError(f"odd-sector operator is not positive (sigma={sigma:.3g})")
    M_k = (2 * wave.k + 1) * float(np.max(np.abs(wave.h))) ** (2 * wave.k)
    a = 1.0
    if omega < sigma:
        b = 2.0 * (1.0 + M_k) / (1.0 - omega / sigma)
        margin = b - a - b * omega / sigma - M_k
        gamma = min(a, margin) / (a + b * omega / sigma)
        method = "ab_chain"
    else:
        b = None
        gamma = 1.0 / ((1.0 + 1.0 / sigma) / omega + 1.0 / sigma)
        method = "direct"
    gamma_tilde = min(gamma, 1.0)

    n, length = wave.N, wave.L
    p = (2 * wave.k + 1) * wave.h ** (2 * wave.k) - 1.0
    # sharpest constant: generalised eigenproblem Q(u) = g ||u||_H1^2 on odd u
    S = odd_basis(n)
    A = S.T @ hill_matrix(p, omega, length) @ S
    G = S.T @ (np.eye(n) - _fourier.diff_matrix_2(n, length)) @ S
    gamma_sharp = float(np.min(np.linalg.eigvals(np.linalg.solve(G, A)).real))

    rng = np.random.default_rng(seed)
    pairs = [(odd.eigenvectors[:, 0], np.zeros(n))]
    for _ in range(n_samples):
        pairs.append((_random_odd(rng, n, length, modes), _random_odd(rng, n, length, modes)))
    ratios = np.array([kg_form(u, v, p, 0.0, length) / x_norm_sq(u, v, length) for u, v in pairs])
    violations = int(np.sum(ratios < gamma_tilde))
    return CoercivityReport(
        sigma=sigma,
        gamma=gamma,
        gamma_tilde=gamma_tilde,
        M_k=M_k,
        a=a,
        b=b,
        method=method,
        gamma_sharp=gamma_sharp,
        n_samples=len(pairs),
        violations=violations,
        min_ratio=float(ratios.min()),
    )
