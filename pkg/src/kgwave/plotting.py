"""Report figures written to files with the non-interactive Agg backend."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# PNG metadata would otherwise carry the matplotlib version string
_META = {"Software": None}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=110, metadata=_META)
    plt.close(fig)
    return path


def plot_wave(wave, path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(wave.x, wave.h, label="h")
    ax.plot(wave.x, wave.hprime, "--", label="h'")
    ax.axhline(0.0, color="0.7", lw=0.6)
    p = wave.params
    ax.set_title(f"k={p.k}  omega={p.omega:.6g}  B={p.B:.6g}  L={p.L:.6g}")
    ax.set_xlabel("x")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_spectrum(eigenvalues, tol_zero: float, path, title: str = "", n_show: int = 20) -> Path:
    ev = np.asarray(eigenvalues)[:n_show]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    colors = ["C3" if v < -tol_zero else ("C2" if abs(v) <= tol_zero else "C0") for v in ev]
    ax.scatter(np.arange(ev.size), ev, c=colors, s=18)
    ax.axhline(0.0, color="0.5", lw=0.6)
    ax.set_xlabel("index")
    ax.set_ylabel("eigenvalue")
    ax.set_title(title)
    return _save(fig, path)


def plot_ddc(reports, path) -> Path:
    """d''(c) against kappa for every route, plus tau(kappa) when available."""
    kap = np.array([r.kappa if r.kappa is not None else np.nan for r in reports], dtype=float)
    has_tau = any(r.beta is not None for r in reports)
    fig, axes = plt.subplots(1, 2 if has_tau else 1, figsize=(10 if has_tau else 6, 3.8), squeeze=False)
    ax = axes[0, 0]
    for attr, style in (("d2_direct", "o-"), ("d2_simplified", "s--"), ("d2_closed", "^:")):
        vals = np.array([np.nan if getattr(r, attr) is None else getattr(r, attr) for r in reports])
        if np.any(np.isfinite(vals)):
            ax.plot(kap, vals, style, label=attr, ms=4)
    ax.axhline(0.0, color="0.5", lw=0.6)
    ax.set_xlabel("kappa")
    ax.set_ylabel("d''(c)")
    ax.legend(frameon=False)
    if has_tau:
        from .stability import beta_tau_phi6

        ax2 = axes[0, 1]
        tau = []
        for r in reports:
            try:
                tau.append(beta_tau_phi6(r.L0, r.kappa).tau)
            except Exception:  # noqa: BLE001 - a missing point just leaves a gap
                tau.append(np.nan)
        ax2.plot(kap, tau, "o-", ms=4)
        ax2.axhline(0.0, color="0.5", lw=0.6)
        ax2.set_xlabel("kappa")
        ax2.set_ylabel("tau(kappa)")
    fig.suptitle(f"k={reports[0].k}  L0={reports[0].L0:.6g}")
    return _save(fig, path)


def plot_trace(trace, path, epsilon: float | None = None) -> Path:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    d = np.maximum(trace.distances, 1e-300)
    ax.semilogy(trace.times, d)
    if epsilon:
        ax.axhline(epsilon, color="0.6", lw=0.6, ls=":")
        ax.axhline(10 * epsilon, color="C2", lw=0.6, ls="--", label="10 eps")
        ax.axhline(100 * epsilon, color="C3", lw=0.6, ls="--", label="100 eps")
        ax.legend(frameon=False)
    ax.set_xlabel("t")
    ax.set_ylabel("distance to the orbit")
    m = trace.meta
    ax.set_title(f"mode={m.get('mode')}  c={m.get('c', 0):.4g}  eps={m.get('epsilon')}")
    return _save(fig, path)


def plot_period_sweep(rows, path) -> Path:
    """|L_B| against |theta| on log axes (the identity puts points on the diagonal)."""
    LB = np.array([r["L_B"] for r in rows if r.get("status") != "skipped"], dtype=float)
    th = np.array([r["theta"] for r in rows if r.get("status") != "skipped"], dtype=float)
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ax.loglog(np.abs(th), np.abs(LB), "o", ms=4)
    if LB.size:
        lo, hi = np.min(np.abs(LB)), np.max(np.abs(LB))
        ax.loglog([lo, hi], [lo, hi], color="0.6", lw=0.6)
    ax.set_xlabel("|theta|")
    ax.set_ylabel("L_B")
    return _save(fig, path)
