"""Command-line front end: ``kgwave <subcommand> [options]``.

Every subcommand writes its bulk output (CSV or JSON, plus a PNG figure) into
``--out`` and prints a short summary on stdout.  Exit codes: 0 success,
1 domain or numerical error, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import io as kio
from .errors import KGWaveError, ParameterError
from .waves import DEFAULT_N, b_omega, energy_from_period, explicit_phi4, explicit_phi6, ode_residual
from .waves import wave_from_energy

log = logging.getLogger("kgwave")

LOG_LEVELS = {"error": logging.ERROR, "warning": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


class UsageError(Exception):
    pass


# --- shared argument groups ------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="bulk output format")
    p.add_argument("--out", default=".", help="output directory (created if missing)")
    p.add_argument("--seed", type=int, default=0, help="random seed for perturbations")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    p.add_argument("--no-plot", action="store_true", help="skip the PNG figure")


def _wave_args(p: argparse.ArgumentParser, default_k: int = 1, default_L0: float | None = None) -> None:
    p.add_argument("--k", type=int, default=default_k, help="nonlinearity exponent (phi^(2k+1))")
    p.add_argument("--L0", type=float, default=default_L0, help="period")
    p.add_argument("--kappa", type=float, help="elliptic modulus of the closed-form wave (k = 1, 2)")
    p.add_argument("--omega", type=float, help="omega = 1 - c^2")
    p.add_argument("--B", type=float, help="energy level (with --omega)")
    p.add_argument("--N", type=int, default=DEFAULT_N, help="grid points")


def kappa_grid(text: str) -> np.ndarray:
    """``a:b:n`` -> n equispaced values from a to b (inclusive)."""
    try:
        a, b, n = text.split(":")
        vals = np.linspace(float(a), float(b), int(n))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a:b:n, got {text!r}") from exc
    if int(n) < 1:
        raise argparse.ArgumentTypeError("n must be positive")
    return np.round(vals, 12)


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_wave(args, allow_family: bool = True):
    """Wave from exactly one parametrisation: kappa, (omega, B), or omega on a period-L0 family."""
    has_kappa = args.kappa is not None
    has_omega = args.omega is not None
    if has_kappa and (has_omega or args.B is not None):
        raise UsageError("--kappa and --omega/--B are mutually exclusive")
    if has_kappa:
        if args.L0 is None:
            raise UsageError("--kappa needs --L0")
        if args.k == 1:
            return explicit_phi4(args.L0, args.kappa, args.N)
        if args.k == 2:
            return explicit_phi6(args.L0, args.kappa, args.N)
        raise ParameterError(f"no closed-form wave for k={args.k}; use --omega/--B")
    if has_omega and args.B is not None:
        return wave_from_energy(args.k, args.omega, args.B, args.N)
    if has_omega and allow_family and args.L0 is not None:
        B = energy_from_period(args.k, args.omega, args.L0)
        return wave_from_energy(args.k, args.omega, B, args.N)
    if args.B is not None:
        raise UsageError("--B needs --omega")
    raise UsageError("give either --kappa (with --L0) or --omega with --B" + (" or --L0" if allow_family else ""))


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _g(x) -> str:
    return "-" if x is None else f"{x:.6g}"


# --- subcommands ---------------------------------------------------------------------


def cmd_wave(args) -> int:
    wave = build_wave(args)
    out = _outdir(args)
    res = ode_residual(wave)
    extra = {"residual": res, "oddness_defect": wave.oddness_defect(), "A": wave.params.A}
    if wave.k == 2 and wave.params.kappa is not None:
        from .waves import phi6_amplitude

        extra["amplitude_source"] = phi6_amplitude(wave.params.kappa)[1]
    if args.format == "csv":
        path = kio.write_wave_csv(out / "wave.csv", wave)
        kio.write_json(out / "wave_params.json", kio.wave_json(wave, **extra))
    else:
        path = kio.write_json(
            out / "wave.json",
            kio.wave_json(wave, **extra, x=wave.x, h=wave.h, hprime=wave.hprime),
        )
    if not args.no_plot:
        from .plotting import plot_wave

        plot_wave(wave, out / "wave.png")
    p = wave.params
    print(f"wave k={p.k} omega={p.omega:.12g} B={p.B:.12g} L={p.L:.12g} residual={res:.3e} -> {path}")
    return 0


PERIOD_COLUMNS = (
    "k", "omega", "B", "L_quad", "L_shoot", "L_B", "theta", "L_B_plus_theta",
    "B_frac", "rel_LB_theta", "status",
)  # fmt: skip


def _period_row(task) -> dict:
    from .floquet import theta
    from .period import sample_period_map

    k, omega, B, frac, N = task
    row = dict.fromkeys(PERIOD_COLUMNS)
    row.update(k=k, omega=omega, B=B, B_frac=frac)
    if not 0.0 < B < b_omega(k, omega):
        row["status"] = "skipped"
        return row
    s = sample_period_map(k, omega, B)
    th = theta(wave_from_energy(k, omega, B, N)).theta
    row.update(
        L_quad=s.L_quadrature,
        L_shoot=s.L_shooting,
        L_B=s.L_B,
        theta=th,
        L_B_plus_theta=s.L_B + th,
        rel_LB_theta=abs(s.L_B + th) / abs(th),
        status="flagged" if s.flagged else "ok",
    )
    return row


def _pool_map(fn, tasks, jobs: int):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def cmd_period_sweep(args) -> int:
    if args.B is not None:
        if len(args.omega) != 1 or len(args.k) != 1:
            raise UsageError("--B (single-point mode) needs exactly one --k and one --omega")
        k, om = args.k[0], args.omega[0]
        tasks = [(k, om, args.B, args.B / b_omega(k, om), args.N)]
    else:
        tasks = [
            (k, om, f * b_omega(k, om), f, args.N) for k in args.k for om in args.omega for f in args.B_frac
        ]
    rows = _pool_map(_period_row, tasks, args.jobs)
    out = _outdir(args)
    if args.format == "csv":
        path = kio.write_csv(out / "period_sweep.csv", PERIOD_COLUMNS, ([r[c] for c in PERIOD_COLUMNS] for r in rows))
    else:
        path = kio.write_json(out / "period_sweep.json", {"rows": rows})
    done = [r for r in rows if r["status"] != "skipped"]
    if not args.no_plot and done:
        from .plotting import plot_period_sweep

        plot_period_sweep(rows, out / "period_sweep.png")
    pos = all(r["L_B"] > 0 for r in done)
    worst = max((r["rel_LB_theta"] for r in done), default=float("nan"))
    mism = max((abs(r["L_quad"] - r["L_shoot"]) / r["L_shoot"] for r in done), default=float("nan"))
    print(
        f"period-sweep rows={len(rows)} computed={len(done)} skipped={len(rows) - len(done)} "
        f"L_B>0={'yes' if pos else 'no'} max|L_B+theta|/|theta|={worst:.3e} "
        f"max L mismatch={mism:.3e} -> {path}"
    )
    return 0


def cmd_floquet(args) -> int:
    from .floquet import kernel_dimension_criterion, solve_ybar, theta

    wave = build_wave(args)
    yb = solve_ybar(wave, periods=2)
    res = theta(wave, yb)
    out = _outdir(args)
    summary = {
        "params": wave.params.as_dict(),
        "theta": res.theta,
        "ybar_at_L": res.ybar_at_L,
        "hprime_at_0": res.hprime_at_0,
        "wronskian_drift": res.wronskian_drift,
        "relation_defect": res.relation_defect,
        "kernel": kernel_dimension_criterion(res),
    }
    n = wave.N + 1
    if args.format == "csv":
        path = kio.write_csv(out / "floquet.csv", ("x", "ybar", "ybar_prime"), zip(yb.x[:n], yb.ybar[:n], yb.ybar_prime[:n]))
        kio.write_json(out / "floquet_summary.json", summary)
    else:
        summary.update(x=yb.x[:n], ybar=yb.ybar[:n], ybar_prime=yb.ybar_prime[:n])
        path = kio.write_json(out / "floquet.json", summary)
    print(
        f"floquet theta={res.theta:.12g} wronskian_drift={res.wronskian_drift:.2e} "
        f"kernel={summary['kernel']} -> {path}"
    )
    return 0


def cmd_spectrum(args) -> int:
    from . import spectra

    wave = build_wave(args)
    out = _outdir(args)
    n = args.spectrum_N or wave.N
    c = None
    if args.kind == "hill":
        rep = spectra.hill_spectrum(wave, n)
    elif args.kind == "odd":
        rep = spectra.odd_spectrum(wave, n)
    else:
        if wave.omega > 1.0:
            raise ParameterError(f"omega = {wave.omega} > 1: no real speed for the KG operator")
        c = math.sqrt(max(1.0 - wave.omega, 0.0))
        rep = spectra.kg_block_spectrum(wave, c, n)
    summary = rep.as_dict(n_eigs=args.n_eigs)
    summary["tol_zero"] = rep.tol_zero
    if args.kind == "odd" and math.isclose(wave.omega, 1.0, abs_tol=1e-12):
        co = spectra.coercivity_constants(wave, seed=args.seed)
        summary["coercivity"] = co.__dict__
    if args.format == "csv":
        path = kio.write_csv(out / "spectrum.csv", ("index", "eigenvalue"), enumerate(rep.eigenvalues.tolist()))
        kio.write_json(out / "spectrum_summary.json", summary)
    else:
        summary["eigenvalues"] = rep.eigenvalues
        path = kio.write_json(out / "spectrum.json", summary)
    if not args.no_plot:
        from .plotting import plot_spectrum

        plot_spectrum(rep.eigenvalues, rep.tol_zero, out / "spectrum.png", f"{rep.kind}  N={n}")
    line = f"spectrum kind={rep.kind} N={n} n_neg={rep.n_negative} n_zero={rep.n_zero}"
    if rep.kind != "hill_odd":
        line += f" zero_match={rep.zero_eigenvector_match:.12f}"
    if "coercivity" in summary:
        co = summary["coercivity"]
        line += f" gamma_tilde={co['gamma_tilde']:.6g} violations={co['violations']}"
    print(f"{line} -> {path}")
    return 0


def cmd_ddc(args) -> int:
    from .stability import StabilityReport, classify, stability_sweep

    if args.kappa_grid is not None and (args.omega is not None or args.kappa is not None):
        raise UsageError("--kappa-grid excludes --kappa and --omega")
    if args.L0 is None:
        raise UsageError("ddc needs --L0")
    if args.kappa_grid is not None:
        if args.k not in (1, 2):
            raise UsageError("--kappa-grid is available for k = 1, 2; use --omega otherwise")
        reports = stability_sweep(args.k, args.L0, args.kappa_grid, args.N, args.spectrum_N, args.jobs)
    elif args.kappa is not None:
        reports = stability_sweep(args.k, args.L0, [args.kappa], args.N, args.spectrum_N)
    elif args.omega is not None:
        reports = [classify(args.k, args.L0, args.omega, args.N, args.spectrum_N)]
    else:
        raise UsageError("give --kappa-grid, --kappa or --omega")
    out = _outdir(args)
    if args.format == "csv":
        path = kio.write_csv(out / "ddc.csv", StabilityReport.CSV_COLUMNS, (r.csv_row() for r in reports))
    else:
        path = kio.write_json(out / "ddc.json", {"reports": [r.as_dict() for r in reports]})
    if not args.no_plot and any(r.d2_direct is not None for r in reports):
        from .plotting import plot_ddc

        plot_ddc(reports, out / "ddc.png")
    print(f"{'kappa':>8} {'omega':>10} {'d2_direct':>12} {'d2_closed':>12} {'d2_simpl':>12} {'tau':>4} {'n,z':>5}  verdict")
    for r in reports:
        nz = "-" if r.n_negative is None else f"{r.n_negative},{r.n_zero}"
        tau = "n/a" if r.tau_sign is None else {1: "+", -1: "-"}.get(r.tau_sign, "0")
        print(
            f"{_g(r.kappa):>8} {_g(r.omega):>10} {_g(r.d2_direct):>12} {_g(r.d2_closed):>12} "
            f"{_g(r.d2_simplified):>12} {tau:>4} {nz:>5}  {r.verdict}"
        )
        for why in r.reasons:
            print(f"{'':>8} note: {why}")
    print(f"ddc rows={len(reports)} -> {path}")
    return 0


def cmd_evolve(args) -> int:
    from .evolve import run_experiment

    if args.c is not None:
        if args.omega is not None or args.kappa is not None:
            raise UsageError("--c excludes --omega and --kappa")
        if not abs(args.c) < 1.0:
            raise ParameterError(f"|c| must be < 1, got {args.c}")
        args.omega = 1.0 - args.c * args.c
    wave = build_wave(args)
    if wave.omega > 1.0:
        raise ParameterError(f"omega = {wave.omega} > 1: the wave has no real speed")
    c = args.c if args.c is not None else math.sqrt(1.0 - wave.omega)
    sym = {"auto": "auto", "none": None, "parity": "parity", "half-shift": "half_shift"}[args.symmetry]
    dt = None if args.dt_factor is None else args.dt_factor * wave.L / wave.N
    stop = None if args.stop_factor is None else args.stop_factor * args.epsilon
    trace = run_experiment(
        wave, c, args.epsilon, args.mode, args.T, args.sample_dt,
        dt=dt, seed=args.seed, symmetry=sym, stop_distance=stop,
    )  # fmt: skip
    out = _outdir(args)
    manifest = {**trace.meta, "params": wave.params.as_dict(), "max_distance": trace.max_distance,
                "energy_drift": trace.energy_drift, "momentum_drift": trace.momentum_drift}  # fmt: skip
    cols = ("t", "distance", "E", "F")
    rows = zip(trace.times.tolist(), trace.distances.tolist(), trace.energies.tolist(), trace.momenta.tolist())
    if args.format == "csv":
        path = kio.write_csv(out / "evolve.csv", cols, rows)
        kio.write_json(out / "evolve_manifest.json", manifest)
    else:
        manifest.update(t=trace.times, distance=trace.distances, E=trace.energies, F=trace.momenta)
        path = kio.write_json(out / "evolve.json", manifest)
    if not args.no_plot:
        from .plotting import plot_trace

        plot_trace(trace, out / "evolve.png", args.epsilon or None)
    print(
        f"evolve mode={args.mode} c={c:.6g} eps={args.epsilon:g} t_end={trace.times[-1]:g} "
        f"max_distance={trace.max_distance:.3e} energy_drift={trace.energy_drift:.2e} "
        f"termination={trace.reason} -> {path}"
    )
    return 0


# --- parser ------------------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kgwave", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wave", help="construct one periodic wave")
    _wave_args(p)
    _common(p)
    p.set_defaults(func=cmd_wave)

    p = sub.add_parser("period-sweep", help="period map, its B-derivative and theta over a grid")
    p.add_argument("--k", type=_int_list, default=[1, 2, 3, 5], help="comma-separated k values")
    p.add_argument("--omega", type=_float_list, default=[0.25, 1.0, 4.0], help="comma-separated omegas")
    p.add_argument("--B-frac", type=_float_list, default=[0.1, 0.5, 0.9], help="B as fractions of B_omega")
    p.add_argument("--B", type=float, help="single energy level (one k and one omega)")
    p.add_argument("--N", type=int, default=DEFAULT_N)
    _common(p)
    p.set_defaults(func=cmd_period_sweep)

    p = sub.add_parser("floquet", help="theta constant of the linearised equation")
    _wave_args(p)
    _common(p)
    p.set_defaults(func=cmd_floquet)

    p = sub.add_parser("spectrum", help="spectra of the linearised operators")
    _wave_args(p)
    p.add_argument("--kind", choices=("hill", "kg", "odd"), default="kg")
    p.add_argument("--spectrum-N", type=int, default=None, help="grid for the operator (default: wave grid)")
    p.add_argument("--n-eigs", type=int, default=10, help="eigenvalues listed in the summary")
    _common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("ddc", help="stability index d''(c) and the verdict")
    _wave_args(p)
    p.add_argument("--kappa-grid", type=kappa_grid, help="a:b:n grid of moduli (k = 1, 2)")
    p.add_argument("--spectrum-N", type=int, default=256)
    _common(p)
    p.set_defaults(func=cmd_ddc)

    p = sub.add_parser("evolve", help="time evolution of a perturbed wave")
    _wave_args(p, default_L0=8.0)
    p.add_argument("--c", type=float, help="wave speed (sets omega = 1 - c^2 on the period-L0 family)")
    p.add_argument("--mode", choices=("generic", "odd"), default="generic")
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--T", type=float, default=200.0)
    p.add_argument("--sample-dt", type=float, default=1.0)
    p.add_argument("--dt-factor", type=float, default=None, help="time step as a multiple of dx (default 0.25)")
    p.add_argument("--symmetry", choices=("auto", "none", "parity", "half-shift"), default="auto")
    p.add_argument("--stop-factor", type=float, default=None, help="stop once distance > factor * epsilon")
    _common(p)
    p.set_defaults(func=cmd_evolve, N=256)
    return parser


def _configure_logging() -> None:
    level = os.environ.get("KGWAVE_LOG", "warning").lower()
    logging.basicConfig(
        level=LOG_LEVELS.get(level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv=None) -> int:
    _configure_logging()
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except KGWaveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
