"""Complete elliptic integrals and Jacobi elliptic functions.

Every function takes the *modulus* ``kappa`` as its elliptic argument, not the
parameter ``m = kappa**2`` used by ``scipy.special``.  Convert at the boundary
with ``m = kappa**2``.

K and E come from the arithmetic-geometric mean; sn, cn, dn from the
descending Landen (AGM) recursion, see DLMF 19.8 and 22.20(ii).
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DomainError

#: Largest modulus accepted wherever K(kappa) is needed.
KAPPA_MAX = 1.0 - 1e-12

_AGM_TOL = 4 * np.finfo(float).eps


class EllipticTriple(NamedTuple):
    """Values (sn, cn, dn) at one point or on an array of points."""

    sn: np.ndarray | float
    cn: np.ndarray | float
    dn: np.ndarray | float


def check_modulus(kappa: float, *, allow_one: bool = False) -> float:
    """Validate a modulus and return it as a float.

    Raises
    ------
    DomainError
        If ``kappa`` is not finite, negative, or too close to 1.
    """
    kappa = float(kappa)
    upper = 1.0 if allow_one else KAPPA_MAX
    if not math.isfinite(kappa) or kappa < 0.0 or kappa > upper:
        raise DomainError(f"modulus out of range: kappa={kappa!r} (need 0 <= kappa < 1)")
    return kappa


def _agm_ladder(kappa: float) -> tuple[list[float], list[float], list[float]]:
    # a_0 = 1, b_0 = kappa', c_0 = kappa; stop when c_n is at rounding level.
    a = [1.0]
    b = [math.sqrt((1.0 - kappa) * (1.0 + kappa))]
    c = [kappa]
    while abs(c[-1]) > _AGM_TOL * a[-1]:
        an, bn = a[-1], b[-1]
        a.append(0.5 * (an + bn))
        b.append(math.sqrt(an * bn))
        c.append(0.5 * (an - bn))
        if len(a) > 64:  # pragma: no cover - quadratic convergence makes this unreachable
            raise RuntimeError("AGM failed to converge")
    return a, b, c


def complete_K(kappa: float) -> float:
    """Complete elliptic integral of the first kind, K(kappa).

    ``K = pi / (2 * AGM(1, sqrt(1 - kappa**2)))``.
    """
    kappa = check_modulus(kappa)
    a, _, _ = _agm_ladder(kappa)
    return math.pi / (2.0 * a[-1])


def complete_E(kappa: float) -> float:
    """Complete elliptic integral of the second kind, E(kappa), for 0 <= kappa <= 1."""
    kappa = check_modulus(kappa, allow_one=True)
    if kappa == 1.0:
        return 1.0
    if kappa > KAPPA_MAX:
        # Leading terms of the expansion about kappa = 1; remainder O(k'^4 log k').
        kp2 = (1.0 - kappa) * (1.0 + kappa)
        return 1.0 + 0.5 * kp2 * (math.log(4.0 / math.sqrt(kp2)) - 0.5)
    a, _, c = _agm_ladder(kappa)
    s = sum(2.0 ** (n - 1) * cn * cn for n, cn in enumerate(c))
    return math.pi / (2.0 * a[-1]) * (1.0 - s)


def jacobi(x, kappa: float) -> EllipticTriple:
    """Jacobi elliptic functions sn, cn, dn of ``x`` with modulus ``kappa``.

    ``x`` may be a scalar or an array; the result has matching shape.
    """
    kappa = check_modulus(kappa)
    x_arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x_arr)):
        raise DomainError("jacobi: x must be finite")
    if kappa == 0.0:
        sn, cn, dn = np.sin(x_arr), np.cos(x_arr), np.ones_like(x_arr)
    else:
        a, _, c = _agm_ladder(kappa)
        n_levels = len(a) - 1
        phi = (2.0**n_levels) * a[-1] * x_arr
        for n in range(n_levels, 0, -1):
            phi = 0.5 * (phi + np.arcsin(c[n] / a[n] * np.sin(phi)))
        sn = np.sin(phi)
        cn = np.cos(phi)
        # 1 - kappa^2 sn^2 = cn^2 + kappa'^2 sn^2 avoids cancellation near x = K.
        kp2 = (1.0 - kappa) * (1.0 + kappa)
        dn = np.sqrt(cn * cn + kp2 * sn * sn)
    if x_arr.ndim == 0:
        return EllipticTriple(float(sn), float(cn), float(dn))
    return EllipticTriple(sn, cn, dn)
