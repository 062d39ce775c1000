"""Command-line interface.

Subcommands: poles, evolve, spectrogram, tmax, scan-tmax-L, scan-freq-x,
scan-freq-alpha, window, oracle-compare.  Global flags --config / --out /
--threads / --tol plus per-parameter overrides (--V, --E, --L,
--mass-ratio); flags win over config-file values.  Every command emits CSV
(stdout or --out) whose first line is a provenance comment sufficient to
reproduce the run.

Exit codes: 0 success, 2 validation error, 3 numerical non-convergence,
4 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .analysis import find_time_domain_resonance, spectrogram
from .config import (CsvTable, RunConfig, apply_overrides, emit_csv,
                     parse_config, parse_grid)
from .errors import (MissingRequired, NumericalError, QTransientError,
                     ValidationError)
from .oracle import cn_evolve, default_cn_config
from .propagator import pole_cache, trace
from .resonances import find_poles
from .stationary import transmission
from .sweeps import opacity_window
from .systems import length_for_alpha, make_system

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _build_parser():
    p = argparse.ArgumentParser(
        prog="qtransient",
        description="Transient quantum-shutter dynamics of a rectangular barrier")
    p.add_argument("--config", help="INI config file ([system]/[numerics])")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker threads for parameter scans")
    p.add_argument("--tol", type=float, help="pole-sum relative tolerance")
    p.add_argument("--V", type=float, help="barrier height in eV")
    p.add_argument("--E", type=float, help="incident energy in eV")
    p.add_argument("--L", type=float, help="barrier width in nm")
    p.add_argument("--mass-ratio", type=float, help="effective mass m/m_e")

    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("poles", help="resonance pole table")
    sp.add_argument("--n", type=int, default=32, help="number of ladder poles")

    for name, doc in (("evolve", "|Psi(x,t)|^2 trace at fixed x"),
                      ("spectrogram", "omega_av(t), sigma(t) at fixed x")):
        sp = sub.add_parser(name, help=doc)
        sp.add_argument("--x", type=float, help="probe position in nm (default L)")
        sp.add_argument("--tmin", type=float, required=True)
        sp.add_argument("--tmax", type=float, required=True)
        sp.add_argument("--steps", type=int, default=400)

    sp = sub.add_parser("tmax", help="time-domain-resonance peak at fixed x")
    sp.add_argument("--x", type=float, help="probe position in nm (default L)")

    sp = sub.add_parser("scan-tmax-L", help="t_max versus barrier width")
    sp.add_argument("--grid", required=True,
                    help="L grid start:stop:count[:lin|log]")

    sp = sub.add_parser("scan-freq-x", help="peak frequency ratio versus x")
    sp.add_argument("--grid", required=True,
                    help="x grid start:stop:count[:lin|log]")

    sp = sub.add_parser("scan-freq-alpha",
                        help="peak frequency ratio versus opacity at fixed u")
    sp.add_argument("--grid", required=True,
                    help="alpha grid start:stop:count[:lin|log]")
    sp.add_argument("--u", type=float, required=True, help="V/E ratio (> 1)")

    sp = sub.add_parser("window", help="opacity window [alpha_c, alpha_u]")
    sp.add_argument("--u", type=float, required=True, help="V/E ratio (> 1)")
    sp.add_argument("--alpha-min", type=float, default=1.2)
    sp.add_argument("--alpha-max", type=float, default=6.0)

    sp = sub.add_parser("oracle-compare",
                        help="analytic trace versus Crank-Nicolson oracle")
    sp.add_argument("--x", type=float, help="probe position in nm (default L)")
    sp.add_argument("--tmin", type=float, required=True)
    sp.add_argument("--tmax", type=float, required=True)
    sp.add_argument("--steps", type=int, default=60)
    return p


def _load_config(args, default_E=None, need_L=True) -> RunConfig:
    """File config (if given) with CLI flags layered on top.

    Commands that derive their own width from an opacity grid (need_L
    false) and their own energy from u (default_E) accept configs without
    those keys.
    """
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = parse_config(fh.read())
    else:
        values = {"V_eV": args.V, "E_eV": args.E, "L_nm": args.L}
        if values["E_eV"] is None and default_E is not None:
            values["E_eV"] = default_E(values["V_eV"])
        if values["L_nm"] is None and not need_L:
            values["L_nm"] = 1.0   # placeholder, unused by these commands
        for key, value in values.items():
            if value is None:
                raise MissingRequired(
                    f"missing required key {key!r}: pass --config or the flag")
        cfg = RunConfig(mass_ratio=args.mass_ratio
                        if args.mass_ratio is not None else 1.0, **values)
        args = argparse.Namespace(**{**vars(args), "V": None, "E": None,
                                     "L": None, "mass_ratio": None})
    return apply_overrides(cfg, V_eV=args.V, E_eV=args.E, L_nm=args.L,
                           mass_ratio=args.mass_ratio, tol=args.tol,
                           out=args.out)


def _system(cfg: RunConfig):
    return make_system(cfg.V_eV, cfg.E_eV, cfg.L_nm, cfg.mass_ratio)


def _provenance(cfg: RunConfig, args, extra=()):
    items = [("command", args.command)] + cfg.provenance_items()
    items += [("threads", args.threads)] + list(extra)
    return tuple(items)


def _time_grid(args):
    if not (0 < args.tmin < args.tmax) or args.steps < 2:
        raise ValidationError("need 0 < tmin < tmax and steps >= 2")
    return np.linspace(args.tmin, args.tmax, args.steps)


def _scan_map(values, worker, threads):
    """Deterministic parallel map: output order follows input order."""
    values = list(values)
    if threads <= 1 or len(values) <= 1:
        return [worker(v) for v in values]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, values))


def cmd_poles(args):
    cfg = _load_config(args)
    sys_ = _system(cfg)
    n = min(args.n, cfg.max_poles)
    ps = find_poles(sys_, n)
    rows = [(p.n, p.k.real, p.k.imag, p.E.real, p.E.imag, p.residual)
            for p in ps.poles]
    return CsvTable(columns=("n", "Re_k", "Im_k", "Re_E", "Im_E", "residual"),
                    rows=tuple(rows),
                    provenance=_provenance(cfg, args, [("n", n)]))


def cmd_evolve(args):
    cfg = _load_config(args)
    sys_ = _system(cfg)
    x = args.x if args.x is not None else sys_.L
    t = _time_grid(args)
    tr = trace(x, t, sys_, tol=cfg.tol, cap=cfg.max_poles)
    T2 = abs(transmission(sys_.k, sys_)) ** 2
    rows = [(float(tt), p.real, p.imag, abs(p) ** 2, abs(p) ** 2 / T2,
             tr.n_terms_used)
            for tt, p in zip(t, tr.psi)]
    return CsvTable(
        columns=("t_fs", "re_psi", "im_psi", "abs2", "abs2_over_T2", "n_terms"),
        rows=tuple(rows),
        provenance=_provenance(cfg, args, [("x", x), ("tmin", args.tmin),
                                           ("tmax", args.tmax),
                                           ("steps", args.steps)]))


def cmd_spectrogram(args):
    cfg = _load_config(args)
    sys_ = _system(cfg)
    x = args.x if args.x is not None else sys_.L
    t = _time_grid(args)
    sg = spectrogram(sys_, x, t, tol=cfg.tol, cap=cfg.max_poles)
    T2 = abs(transmission(sys_.k, sys_)) ** 2
    rows = [(float(tt), a2 / T2, om, om / sys_.omegaV, sg_)
            for tt, a2, om, sg_ in zip(t, sg.abs2, sg.omega_av, sg.sigma)]
    return CsvTable(
        columns=("t_fs", "abs2_over_T2", "omega_av", "omega_ratio", "sigma"),
        rows=tuple(rows),
        provenance=_provenance(cfg, args, [("x", x), ("tmin", args.tmin),
                                           ("tmax", args.tmax),
                                           ("steps", args.steps)]))


def _tdr_row(tdr, independent):
    return (independent, tdr.t_max, tdr.omega_ratio, tdr.exists)


def cmd_tmax(args):
    cfg = _load_config(args)
    sys_ = _system(cfg)
    x = args.x if args.x is not None else sys_.L
    tdr = find_time_domain_resonance(sys_, x=x, tol=cfg.tol, cap=cfg.max_poles)
    rows = [(tdr.x, tdr.exists, tdr.t_max, tdr.height, tdr.height_ratio,
             tdr.omega_av, tdr.sigma, tdr.omega_ratio)]
    return CsvTable(
        columns=("x_nm", "exists", "t_max_fs", "abs2_peak", "height_ratio",
                 "omega_av", "sigma", "omega_ratio"),
        rows=tuple(rows), provenance=_provenance(cfg, args, [("x", x)]))


def cmd_scan_tmax_L(args):
    cfg = _load_config(args)
    grid = parse_grid(args.grid, "--grid")

    def worker(L):
        sys_ = make_system(cfg.V_eV, cfg.E_eV, L, cfg.mass_ratio)
        return _tdr_row(find_time_domain_resonance(sys_, tol=cfg.tol,
                                                   cap=cfg.max_poles), L)

    rows = _scan_map(grid.values(), worker, args.threads)
    return CsvTable(columns=("L_nm", "t_max_fs", "omega_ratio", "exists"),
                    rows=tuple(rows),
                    provenance=_provenance(cfg, args, [("grid", grid)]))


def cmd_scan_freq_x(args):
    cfg = _load_config(args)
    sys_ = _system(cfg)
    grid = parse_grid(args.grid, "--grid")

    def worker(x):
        return _tdr_row(find_time_domain_resonance(sys_, x=x, tol=cfg.tol,
                                                   cap=cfg.max_poles), x)

    rows = _scan_map(grid.values(), worker, args.threads)
    return CsvTable(columns=("x_nm", "t_max_fs", "omega_ratio", "exists"),
                    rows=tuple(rows),
                    provenance=_provenance(cfg, args, [("grid", grid)]))


def cmd_scan_freq_alpha(args):
    cfg = _load_config(args, default_E=lambda V: (V or 0) / args.u,
                       need_L=False)
    grid = parse_grid(args.grid, "--grid")
    if args.u <= 1:
        raise ValidationError(f"--u must be > 1 (tunneling), got {args.u}")

    def worker(alpha):
        L = length_for_alpha(alpha, cfg.V_eV, cfg.mass_ratio)
        sys_ = make_system(cfg.V_eV, cfg.V_eV / args.u, L, cfg.mass_ratio)
        return _tdr_row(find_time_domain_resonance(sys_, tol=cfg.tol,
                                                   cap=cfg.max_poles), alpha)

    rows = _scan_map(grid.values(), worker, args.threads)
    return CsvTable(columns=("alpha", "t_max_fs", "omega_ratio", "exists"),
                    rows=tuple(rows),
                    provenance=_provenance(cfg, args,
                                           [("grid", grid), ("u", args.u)]))


def cmd_window(args):
    cfg = _load_config(args, default_E=lambda V: (V or 0) / args.u,
                       need_L=False)
    if args.u <= 1:
        raise ValidationError(f"--u must be > 1 (tunneling), got {args.u}")
    alpha_c, alpha_u = opacity_window(
        args.u, cfg.V_eV, cfg.mass_ratio, sweep_tol=cfg.tol,
        alpha_span=(args.alpha_min, args.alpha_max))
    return CsvTable(columns=("u", "alpha_c", "alpha_u"),
                    rows=((args.u, alpha_c, alpha_u),),
                    provenance=_provenance(
                        cfg, args, [("u", args.u),
                                    ("alpha_min", args.alpha_min),
                                    ("alpha_max", args.alpha_max)]))


def cmd_oracle_compare(args):
    cfg = _load_config(args)
    sys_ = _system(cfg)
    x = args.x if args.x is not None else sys_.L
    t = _time_grid(args)
    an = trace(x, t, sys_, tol=cfg.tol, cap=cfg.max_poles)
    cn_cfg = default_cn_config(sys_, float(t[-1]))
    cn = cn_evolve(sys_, cn_cfg, [x], t)
    rows = []
    for tt, a2, c2 in zip(t, an.abs2, cn.abs2[0]):
        rel = abs(a2 - c2) / a2 if a2 > 0 else float("nan")
        rows.append((float(tt), float(a2), float(c2), rel))
    return CsvTable(columns=("t_fs", "abs2_analytic", "abs2_cn", "rel_err"),
                    rows=tuple(rows),
                    provenance=_provenance(cfg, args,
                                           [("x", x), ("tmin", args.tmin),
                                            ("tmax", args.tmax),
                                            ("steps", args.steps)]))


_COMMANDS = {
    "poles": cmd_poles,
    "evolve": cmd_evolve,
    "spectrogram": cmd_spectrogram,
    "tmax": cmd_tmax,
    "scan-tmax-L": cmd_scan_tmax_L,
    "scan-freq-x": cmd_scan_freq_x,
    "scan-freq-alpha": cmd_scan_freq_alpha,
    "window": cmd_window,
    "oracle-compare": cmd_oracle_compare,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        table = _COMMANDS[args.command](args)
        emit_csv(table, args.out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except QTransientError as exc:   # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":          # pragma: no cover
    raise SystemExit(main())
