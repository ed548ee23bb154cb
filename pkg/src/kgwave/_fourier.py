"""Fourier differentiation on a uniform periodic grid."""

from __future__ import annotations

import numpy as np


def grid(n: int, length: float) -> np.ndarray:
    """``n`` equispaced points on ``[0, length)``."""
    return np.arange(n) * (length / n)


def wavenumbers(n: int, length: float) -> np.ndarray:
    """Angular wavenumbers in ``numpy.fft.rfft`` order."""
    return 2.0 * np.pi / length * np.arange(n // 2 + 1)


def derivative(f: np.ndarray, length: float, order: int = 1) -> np.ndarray:
    """Spectral derivative of a real periodic sample.

    For odd orders the Nyquist coefficient is discarded, which keeps the
    operator antisymmetric (the convention of Trefethen's matrices).
    """
    n = f.shape[-1]
    fh = np.fft.rfft(f)
    mult = (1j * wavenumbers(n, length)) ** order
    if order % 2 == 1 and n % 2 == 0:
        mult[-1] = 0.0
    return np.fft.irfft(fh * mult, n=n)


def diff_matrix_1(n: int, length: float) -> np.ndarray:
    """First-derivative collocation matrix (antisymmetric, even ``n``)."""
    if n % 2:
        raise ValueError("n must be even")
    h = 2.0 * np.pi / n
    j = np.arange(n)
    diff = j[:, None] - j[None, :]
    with np.errstate(divide="ignore"):
        col = 0.5 * (-1.0) ** diff / np.tan(0.5 * h * diff)
    col[diff == 0] = 0.0
    return col * (2.0 * np.pi / length)


def diff_matrix_2(n: int, length: float) -> np.ndarray:
    """Second-derivative collocation matrix (symmetric, even ``n``)."""
    if n % 2:
        raise ValueError("n must be even")
    h = 2.0 * np.pi / n
    j = np.arange(n)
    diff = j[:, None] - j[None, :]
    with np.errstate(divide="ignore"):
        mat = -0.5 * (-1.0) ** diff / np.sin(0.5 * h * diff) ** 2
    np.fill_diagonal(mat, -(np.pi**2) / (3.0 * h * h) - 1.0 / 6.0)
    return mat * (2.0 * np.pi / length) ** 2


def spectral_tail(f: np.ndarray) -> float:
    """Magnitude of the upper-eighth Fourier band relative to the largest coefficient."""
    coeffs = np.abs(np.fft.rfft(f))
    top = coeffs.max()
    if top == 0.0:
        return 0.0
    cut = int(len(coeffs) * 7 / 8)
    return float(coeffs[cut:].max() / top)
