"""Batch command-line front end.

Every experiment is a subcommand that writes a CSV table, a PNG figure (unless
--no-plot) and a JSON manifest echoing the full configuration.  Identical
argv and seed reproduce identical CSV bytes.  Exit codes: 0 success, 2 usage
error, 1 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .cf import DepthExhausted, expand
from .distributions import (AngularWeight, CesaroSpec, McConfig,
                            SurvivalCurve, cesaro_survival_nodes,
                            disk_survival_curve, disk_survival_weighted,
                            scaled_survival, slit_survival_mc)
from .ergodic import (THRESHOLD_RATE, cesaro_limit, cesaro_limit_asymptote,
                      limit_curve, threshold_index)
from .kinetic import CosineBump, moment_compare
from .slits import Direction, HorizonError, slit_partition, slit_survival
from .tracer import ObstacleConfig, exit_time_pair, free_path
from . import reporting

OUTDIR_ENV = "LORENTZGAS_OUTDIR"


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--outdir", default=None,
                    help=f"output directory (default ${OUTDIR_ENV} or '.')")
    sp.add_argument("--prefix", default="", help="output filename prefix")
    sp.add_argument("--no-plot", action="store_true",
                    help="skip figure rendering, emit data files only")


def _direction(parser, args) -> Direction:
    if getattr(args, "theta", None) is not None and getattr(args, "alpha", None) is not None:
        parser.error("--theta and --alpha are mutually exclusive")
    if getattr(args, "theta", None) is not None:
        if not 0.0 < args.theta < math.pi / 4:
            parser.error(f"--theta must lie in (0, pi/4), got {args.theta}")
        return Direction(args.theta)
    if getattr(args, "alpha", None) is not None:
        if not 0.0 < args.alpha < 1.0:
            parser.error(f"--alpha must lie in (0,1), got {args.alpha}")
        return Direction.from_slope(args.alpha)
    parser.error("one of --theta or --alpha is required")


def _check(parser, ok: bool, msg: str) -> None:
    if not ok:
        parser.error(msg)


class _Run:
    """Collects output paths and writes the manifest at the end."""

    def __init__(self, args, name: str, params: dict, seed=None):
        outdir = args.outdir or os.environ.get(OUTDIR_ENV) or "."
        self.dir = Path(outdir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.prefix = args.prefix
        self.name = name
        self.params = params
        self.seed = seed
        self.plot = not args.no_plot
        self.outputs: list[str] = []
        self.started = _utcnow()

    def path(self, suffix: str) -> Path:
        p = self.dir / f"{self.prefix}{self.name}{suffix}"
        self.outputs.append(p.name)
        return p

    def finish(self) -> None:
        manifest = self.dir / f"{self.prefix}{self.name}.json"
        reporting.write_manifest(
            manifest, subcommand=self.name, parameters=self.params,
            seed=self.seed, version=__version__, started=self.started,
            finished=_utcnow(), outputs=self.outputs)


def _cmd_cf(parser, args) -> int:
    _check(parser, 0.0 < args.alpha < 1.0, "--alpha must lie in (0,1)")
    _check(parser, args.depth >= 1, "--depth must be >= 1")
    run = _Run(args, "cf", {"alpha": args.alpha, "depth": args.depth})
    cf = expand(args.alpha, args.depth)
    rows = []
    m = len(cf.d)
    for n in range(m):
        a_n = cf.a[n - 1] if 1 <= n <= len(cf.a) else None
        qd = None
        if n + 1 < m:
            qd = abs(cf.q[n] * cf.d[n + 1] + cf.q[n + 1] * cf.d[n] - 1.0)
        rows.append((n, a_n, cf.p[n], cf.q[n], cf.d[n], qd))
    reporting.write_csv(run.path(".csv"),
                        ["n", "a_n", "p_n", "q_n", "d_n", "qd_residual"], rows)
    if run.plot:
        ns = list(range(1, m - 1))
        reporting.plot_error_decay(
            run.path(".png"), ns, [cf.d[n] for n in ns],
            [1.0 / cf.q[n + 1] for n in ns],
            [1.0 / (cf.q[n] + cf.q[n + 1]) for n in ns])
    run.finish()
    return 0


def _cmd_partition(parser, args) -> int:
    direction = _direction(parser, args)
    _check(parser, 0.0 < args.r < 0.5, "--r must lie in (0, 1/2)")
    run = _Run(args, "partition",
               {"r": args.r, "theta": direction.theta, "alpha": direction.alpha})
    part = slit_partition(args.r, direction)
    rows = [
        ("A", part.l_a, part.s_a, part.l_a * part.s_a),
        ("B", part.l_b, part.s_b, part.l_b * part.s_b),
        ("C", part.l_c, part.s_c, part.l_c * part.s_c),
    ]
    reporting.write_csv(run.path(".csv"),
                        ["strip", "length", "width", "area"], rows)
    if run.plot:
        reporting.plot_partition(run.path(".png"), part)
    run.finish()
    return 0


def _cmd_psi_curve(parser, args) -> int:
    direction = _direction(parser, args)
    _check(parser, 0.0 < args.r < 0.5, "--r must lie in (0, 1/2)")
    _check(parser, args.points >= 2, "--points must be >= 2")
    _check(parser, args.mc_samples >= 0, "--mc-samples must be >= 0")
    run = _Run(args, "psi-curve",
               {"r": args.r, "theta": direction.theta, "tmax": args.tmax,
                "points": args.points, "mc_samples": args.mc_samples,
                "workers": args.workers},
               seed=args.seed)
    part = slit_partition(args.r, direction)
    tmax = args.tmax if args.tmax is not None else part.l_c / direction.cos
    ts = np.linspace(0.0, tmax, args.points)
    vals = slit_survival(args.r, direction, ts, part=part)
    curves = [("exact", ts, vals, None)]
    reporting.write_csv(run.path(".csv"), ["t", "value", "stderr"],
                        SurvivalCurve.exact(ts, vals).rows())
    if args.mc_samples:
        mc = McConfig(samples=args.mc_samples, seed=args.seed, workers=args.workers)
        est, err = slit_survival_mc(args.r, direction, ts, mc)
        reporting.write_csv(run.path("_mc.csv"), ["t", "value", "stderr"],
                            SurvivalCurve.estimated(ts, est, err).rows())
        curves.append(("monte carlo", ts, est, err))
    if run.plot:
        reporting.plot_survival(run.path(".png"), "slit exit-time survival", curves)
    run.finish()
    return 0


def _cmd_tau(parser, args) -> int:
    _check(parser, 0.0 < args.r < 0.5, "--r must lie in (0, 1/2)")
    _check(parser, args.tmax > 0, "--tmax must be positive")
    if args.samples:
        run = _Run(args, "tau", {"r": args.r, "samples": args.samples,
                                 "tmax": args.tmax}, seed=args.seed)
        rng = np.random.default_rng(args.seed)
        rows = []
        taus = []
        cfg = ObstacleConfig(args.r)
        got = 0
        while got < args.samples:
            x = rng.random(2)
            w = x - np.round(x)
            if w[0] ** 2 + w[1] ** 2 <= (args.r / 2) ** 2:
                continue
            theta = rng.uniform(1e-6, math.pi / 4 - 1e-6)
            direction = Direction(theta)
            tau, lam = exit_time_pair(cfg, direction, x)
            rows.append((x[0], x[1], theta, tau, lam))
            taus.append(tau)
            got += 1
        reporting.write_csv(run.path(".csv"),
                            ["x0", "y0", "theta", "tau", "lambda"], rows)
        if run.plot:
            finite = [t for t in taus if math.isfinite(t)]
            reporting.plot_histogram(run.path(".png"), "free path lengths",
                                     "tau", finite)
    else:
        if args.x0 is None or args.y0 is None or args.theta is None:
            parser.error("single-ray mode needs --x0, --y0 and --theta")
        direction = Direction(args.theta)
        run = _Run(args, "tau", {"r": args.r, "x0": args.x0, "y0": args.y0,
                                 "theta": args.theta, "tmax": args.tmax})
        cfg = ObstacleConfig(args.r)
        tau = free_path(cfg, (args.x0, args.y0), direction.v, t_max=args.tmax)
        _, lam = exit_time_pair(cfg, direction, (args.x0, args.y0))
        reporting.write_csv(run.path(".csv"),
                            ["x0", "y0", "theta", "tau", "lambda"],
                            [(args.x0, args.y0, args.theta, tau, lam)])
        if run.plot:
            reporting.plot_histogram(run.path(".png"), "free path length",
                                     "tau", [tau if math.isfinite(tau) else args.tmax])
    run.finish()
    return 0


def _cmd_phi_curve(parser, args) -> int:
    _check(parser, 0.0 < args.r < 0.5, "--r must lie in (0, 1/2)")
    _check(parser, args.points >= 2, "--points must be >= 2")
    _check(parser, args.samples >= 1, "--samples must be >= 1")
    _check(parser, 0.0 <= args.tmin < args.tmax, "need 0 <= tmin < tmax")
    mc = McConfig(samples=args.samples, seed=args.seed, workers=args.workers)
    cfg = ObstacleConfig(args.r)
    ts = np.linspace(args.tmin, args.tmax, args.points)
    if args.theta is not None or args.alpha is not None:
        direction = _direction(parser, args)
        run = _Run(args, "phi-curve",
                   {"r": args.r, "mode": "directional", "theta": direction.theta,
                    "tmin": args.tmin, "tmax": args.tmax, "points": args.points,
                    "samples": args.samples, "workers": args.workers},
                   seed=args.seed)
        part = slit_partition(args.r, direction)
        est, err = disk_survival_curve(cfg, direction, ts, mc)
        lo = slit_survival(args.r, direction, ts + args.r / 2, part=part)
        hi = slit_survival(args.r, direction, np.maximum(ts - args.r / 2, 0.0),
                           part=part)
        rows = list(zip(ts, est, err, lo, hi))
        reporting.write_csv(run.path(".csv"),
                            ["t", "value", "stderr", "psi_lower", "psi_upper"], rows)
        curves = [("disk survival (mc)", ts, est, err),
                  ("slit survival at t+r/2", ts, lo, None),
                  ("slit survival at t-r/2", ts, hi, None)]
    else:
        weight = AngularWeight(args.weight)
        run = _Run(args, "phi-curve",
                   {"r": args.r, "mode": "weighted", "weight": args.weight,
                    "tmin": args.tmin, "tmax": args.tmax, "points": args.points,
                    "samples": args.samples, "workers": args.workers},
                   seed=args.seed)
        pts = [disk_survival_weighted(cfg, float(t), weight, mc) for t in ts]
        curve = SurvivalCurve.estimated(ts, [p[0] for p in pts], [p[1] for p in pts])
        reporting.write_csv(run.path(".csv"), ["t", "value", "stderr"], curve.rows())
        curves = [("disk survival (mc)", ts, [p[0] for p in pts],
                   [p[1] for p in pts])]
    if run.plot:
        reporting.plot_survival(run.path(".png"), "free-path survival", curves)
    run.finish()
    return 0


def _cmd_cesaro(parser, args) -> int:
    _check(parser, args.tstar > math.sqrt(2.0), "--tstar must exceed sqrt(2)")
    _check(parser, 0.0 < args.eps < args.eps_star <= 0.25,
           "need 0 < eps < eps-star <= 0.25")
    _check(parser, args.nodes >= 2, "--nodes must be >= 2")
    _check(parser, args.samples >= 1, "--samples must be >= 1")
    run = _Run(args, "cesaro",
               {"tstar": args.tstar, "eps": args.eps, "eps_star": args.eps_star,
                "nodes": args.nodes, "samples": args.samples,
                "weight": args.weight, "workers": args.workers},
               seed=args.seed)
    spec = CesaroSpec(eps=args.eps, eps_star=args.eps_star, grid_points=args.nodes)
    weight = AngularWeight(args.weight)
    mc = McConfig(samples=args.samples, seed=args.seed, workers=args.workers)
    rows = cesaro_survival_nodes(args.tstar, weight, spec, mc)
    w = spec.trapezoid_weights() / spec.log_width
    value = float(sum(wi * est for wi, (_, _, est, _) in zip(w, rows)))
    stderr = math.sqrt(sum((wi * se) ** 2 for wi, (_, _, _, se) in zip(w, rows)))
    limit = cesaro_limit(args.tstar)
    reporting.write_csv(run.path(".csv"),
                        ["r", "t", "estimate", "stderr", "quad_weight"],
                        [(r, t, est, se, wi)
                         for wi, (r, t, est, se) in zip(w, rows)])
    reporting.write_csv(run.path("_summary.csv"),
                        ["t_star", "value", "stderr", "limit", "asymptote"],
                        [(args.tstar, value, stderr, limit,
                          cesaro_limit_asymptote(args.tstar))])
    if run.plot:
        reporting.plot_cesaro_nodes(run.path(".png"), rows, value, limit)
    run.finish()
    return 0


def _cmd_lambda_curve(parser, args) -> int:
    _check(parser, 1.0 < args.tmin < args.tmax, "need 1 < tmin < tmax")
    _check(parser, args.points >= 2, "--points must be >= 2")
    _check(parser, args.m_sup > 0, "--m-sup must be positive")
    run = _Run(args, "lambda-curve",
               {"tmin": args.tmin, "tmax": args.tmax, "points": args.points,
                "m_sup": args.m_sup})
    grid = np.exp(np.linspace(math.log(args.tmin), math.log(args.tmax), args.points))
    rows = limit_curve(grid, m_sup=args.m_sup)
    reporting.write_csv(run.path(".csv"),
                        ["t_star", "lambda", "asymptote", "bound"], rows)
    if run.plot:
        reporting.plot_limit_curve(run.path(".png"), rows)
    run.finish()
    return 0


def _cmd_nstat(parser, args) -> int:
    _check(parser, 0.0 < args.eps < 1.0, "--eps must lie in (0,1)")
    _check(parser, args.count >= 1, "--count must be >= 1")
    run = _Run(args, "nstat", {"eps": args.eps, "count": args.count},
               seed=args.seed)
    rng = np.random.default_rng(args.seed)
    log_eps = abs(math.log(args.eps))
    rows = []
    ratios = []
    for _ in range(args.count):
        alpha = float(rng.random())
        if not 0.0 < alpha < 1.0:
            continue
        n = threshold_index(alpha, args.eps)
        ratio = n / log_eps
        rows.append((alpha, n, ratio))
        ratios.append(ratio)
    med = float(np.median(ratios))
    reporting.write_csv(run.path(".csv"), ["alpha", "N", "ratio"], rows)
    reporting.write_csv(run.path("_summary.csv"),
                        ["eps", "count", "median_ratio", "expected_rate"],
                        [(args.eps, len(rows), med, THRESHOLD_RATE)])
    if run.plot:
        reporting.plot_histogram(run.path(".png"),
                                 "threshold index growth", "N/|ln eps|",
                                 ratios, vline=THRESHOLD_RATE,
                                 vline_label="12 ln2 / pi^2")
    run.finish()
    return 0


def _cmd_kinetic(parser, args) -> int:
    _check(parser, args.t > 0, "--t must be positive")
    _check(parser, 0.0 < args.eps < args.eps_star <= 0.25,
           "need 0 < eps < eps-star <= 0.25")
    _check(parser, args.nodes >= 2, "--nodes must be >= 2")
    _check(parser, args.samples >= 1, "--samples must be >= 1")
    run = _Run(args, "kinetic",
               {"t": args.t, "eps": args.eps, "eps_star": args.eps_star,
                "nodes": args.nodes, "samples": args.samples,
                "fin_plateau": args.fin_plateau, "fin_taper": args.fin_taper,
                "chi_plateau": args.chi_plateau, "chi_taper": args.chi_taper,
                "workers": args.workers},
               seed=args.seed)
    fin = CosineBump(plateau=args.fin_plateau, taper=args.fin_taper)
    chi = CosineBump(plateau=args.chi_plateau, taper=args.chi_taper)
    spec = CesaroSpec(eps=args.eps, eps_star=args.eps_star, grid_points=args.nodes)
    mc = McConfig(samples=args.samples, seed=args.seed, workers=args.workers)
    res = moment_compare(fin, chi, args.t, spec, mc)
    reporting.write_csv(run.path(".csv"),
                        ["t", "averaged", "limit", "abs_error"],
                        [(args.t, res.averaged, res.limit, res.abs_error)])
    reporting.write_csv(run.path("_nodes.csv"), ["r", "moment"], list(res.nodes))
    if run.plot:
        reporting.plot_kinetic(run.path(".png"), res.nodes, res.averaged, res.limit)
    run.finish()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lorentzgas",
        description="Free path length statistics for the periodic Lorentz gas")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("cf", help="continued-fraction table of one alpha")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--depth", type=int, default=20)
    _add_common(sp)

    sp = sub.add_parser("partition", help="three-strip partition of the slit torus")
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--theta", type=float)
    sp.add_argument("--alpha", type=float)
    _add_common(sp)

    sp = sub.add_parser("psi-curve", help="exact slit-survival curve, optional MC overlay")
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--theta", type=float)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--tmax", type=float, default=None)
    sp.add_argument("--points", type=int, default=200)
    sp.add_argument("--mc-samples", type=int, default=0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    _add_common(sp)

    sp = sub.add_parser("tau", help="free path lengths, single ray or random batch")
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--x0", type=float)
    sp.add_argument("--y0", type=float)
    sp.add_argument("--theta", type=float)
    sp.add_argument("--samples", type=int, default=0)
    sp.add_argument("--tmax", type=float, default=100.0)
    sp.add_argument("--seed", type=int, default=0)
    _add_common(sp)

    sp = sub.add_parser("phi-curve", help="disk-survival curve (fixed direction or angle-averaged)")
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--theta", type=float)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--weight", choices=["uniform-octant", "uniform-circle"],
                    default="uniform-octant")
    sp.add_argument("--tmin", type=float, default=0.0)
    sp.add_argument("--tmax", type=float, required=True)
    sp.add_argument("--points", type=int, default=20)
    sp.add_argument("--samples", type=int, default=20000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    _add_common(sp)

    sp = sub.add_parser("cesaro", help="log-size average of the rescaled survival")
    sp.add_argument("--tstar", type=float, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--eps-star", dest="eps_star", type=float, default=0.25)
    sp.add_argument("--nodes", type=int, default=30)
    sp.add_argument("--samples", type=int, default=100000)
    sp.add_argument("--weight", choices=["uniform-octant", "uniform-circle"],
                    default="uniform-octant")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    _add_common(sp)

    sp = sub.add_parser("lambda-curve", help="closed-form limit curve and asymptote")
    sp.add_argument("--tmin", type=float, default=5.0)
    sp.add_argument("--tmax", type=float, default=80.0)
    sp.add_argument("--points", type=int, default=16)
    sp.add_argument("--m-sup", dest="m_sup", type=float, default=1.0)
    _add_common(sp)

    sp = sub.add_parser("nstat", help="threshold-index growth statistics")
    sp.add_argument("--eps", type=float, default=1e-10)
    sp.add_argument("--count", type=int, default=500)
    sp.add_argument("--seed", type=int, default=0)
    _add_common(sp)

    sp = sub.add_parser("kinetic", help="size-averaged transport moment against its limit")
    sp.add_argument("--t", type=float, default=15.0)
    sp.add_argument("--eps", type=float, default=1e-2)
    sp.add_argument("--eps-star", dest="eps_star", type=float, default=0.25)
    sp.add_argument("--nodes", type=int, default=12)
    sp.add_argument("--samples", type=int, default=20000)
    sp.add_argument("--fin-plateau", type=float, default=1.0)
    sp.add_argument("--fin-taper", type=float, default=0.5)
    sp.add_argument("--chi-plateau", type=float, default=34.0)
    sp.add_argument("--chi-taper", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    _add_common(sp)

    return parser


_HANDLERS = {
    "cf": _cmd_cf,
    "partition": _cmd_partition,
    "psi-curve": _cmd_psi_curve,
    "tau": _cmd_tau,
    "phi-curve": _cmd_phi_curve,
    "cesaro": _cmd_cesaro,
    "lambda-curve": _cmd_lambda_curve,
    "nstat": _cmd_nstat,
    "kinetic": _cmd_kinetic,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](parser, args)
    except (ValueError, DepthExhausted, HorizonError, RuntimeError) as exc:
        print(f"lorentzgas {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
