"""Command line interface: ``lotstab {solve,embed,verify,sweep,crofton}``.

Exit codes: 0 success, 1 a check or expectation failed, 2 invalid input.
The output directory is ``--out``, else ``$LOTSTAB_OUT``, else the
configuration's ``output.dir``.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys

import numpy as np

from . import __version__
from . import verify as V
from .config import (GN_COLUMNS, MEASURE_COLUMNS, ExperimentConfig, build_source, load_config,
                     parse_config, preset)
from .errors import ConfigError, LotstabError, NonConvergence
from .lot import bracket, dual_difference, embed, lot_distance, variance
from .measures import DiscreteMeasure, wasserstein_1d, w1_discrete, w2_discrete

log = logging.getLogger("lotstab")

OUT_ENV = "LOTSTAB_OUT"
REPORT_COLUMNS = ["check_id", "instance", "lhs", "rhs", "ratio", "tolerance", "slack", "passed",
                  "digest", "aux", "inputs"]
SUMMARY_COLUMNS = ["check_id", "instances", "failures", "max_ratio", "passed"]
FIT_COLUMNS = ["x", "y", "slope", "intercept", "residual", "expected", "tol", "passed"]
CROFTON_COLUMNS = ["shape", "lines", "seed", "estimate", "stderr", "exact"]


def fmt(v) -> str:
    """Fixed float formatting for every CSV cell."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.12e" % float(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in sorted(v.items())}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return "%.12e" % float(v)
    return str(v)


def write_csv(path: str, header: list, rows) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(x) for x in r])
    return path


def report_row(r: V.CheckReport) -> list:
    return [r.check_id, r.instance, r.lhs, r.rhs, r.ratio, r.tolerance, r.slack, r.passed, r.digest,
            json.dumps(_jsonable(r.aux), sort_keys=True), json.dumps(_jsonable(r.inputs), sort_keys=True)]


def _out_dir(args, cfg: ExperimentConfig | None = None) -> str:
    if args.out:
        return args.out
    if os.environ.get(OUT_ENV):
        return os.environ[OUT_ENV]
    return cfg.output_dir if cfg is not None else "lotstab-out"


def _source_config(args, dim: int):
    if args.config:
        cfg = load_config(args.config, need_sweep=False)
    else:
        dom = {"kind": "interval", "params": [0, 1]} if dim == 1 else {"kind": "box", "params": [0, 0, 1, 1]}
        cfg = parse_config({"source": {"domain": dom}}, need_sweep=False)
    if args.resolution is not None or args.seed is not None:
        cfg = cfg.with_overrides(resolution=args.resolution, seed=args.seed, need_sweep=False)
    if cfg.domain().dim != dim:
        raise ConfigError("source and target dimensions differ")
    return cfg


def _read_target(path: str) -> DiscreteMeasure:
    try:
        return DiscreteMeasure.from_csv(path)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"invalid target file {path}: {exc}") from None


# subcommands ---------------------------------------------------------------------


def cmd_solve(args) -> int:
    mu = _read_target(args.target)
    cfg = _source_config(args, mu.dim)
    rho = build_source(cfg.source)
    try:
        e = embed(rho, mu)
    except NonConvergence as exc:
        log.error("%s", exc)
        res = exc.result
        status = 1
    else:
        res, status = e.result, 0
    out = _out_dir(args, cfg)
    d = rho.dim
    header = [f"x{i + 1}" for i in range(d)] + ["index"] + [f"T{i + 1}" for i in range(d)] + ["phi"]
    assign = res.assignment if res.assignment is not None else np.full(len(rho), -1)
    rows = (list(c) + [int(a)] + list(t) + [p] for c, a, t, p in zip(rho.centers, assign, res.T, res.phi))
    write_csv(os.path.join(out, "transport.csv"), header, rows)
    summary = {k: _jsonable(v) for k, v in res.summary().items()}
    with open(os.path.join(out, "summary.json"), "w") as fh:
        json.dump(summary, fh, sort_keys=True, indent=1)
        fh.write("\n")
    print(json.dumps(summary, sort_keys=True))
    return status


def _w(mu0, mu1, p):
    if mu0.dim == 1:
        return wasserstein_1d(mu0, mu1, p=p)
    return w1_discrete(mu0, mu1) if p == 1 else w2_discrete(mu0, mu1)


def cmd_embed(args) -> int:
    mus = [_read_target(p) for p in args.targets]
    dims = {m.dim for m in mus}
    if len(dims) != 1:
        raise ConfigError("targets have different dimensions")
    cfg = _source_config(args, dims.pop())
    rho = build_source(cfg.source)
    embs = [embed(rho, m) for m in mus]
    rows = []
    for i in range(len(mus)):
        for j in range(len(mus)):
            rows.append([i, j, lot_distance(embs[i], embs[j]), _w(mus[i], mus[j], 2)])
    out = _out_dir(args, cfg)
    path = write_csv(os.path.join(out, "embed.csv"), ["i", "j", "lot_distance", "W2"], rows)
    print(path)
    return 0


def cmd_verify(args) -> int:
    seed = 0 if args.seed is None else args.seed
    if args.check != "all" and args.check not in V.CHECKS:
        raise ConfigError(f"unknown check {args.check!r}; available: all, {', '.join(V.CHECKS)}")
    ids = list(V.CHECKS) if args.check == "all" else [args.check]
    results = V.run_all(seed=seed, size=args.instances, crofton_lines=args.lines, checks=ids)
    out = _out_dir(args)
    summary = []
    for cid, reps in results.items():
        write_csv(os.path.join(out, f"verify-{cid}.csv"), REPORT_COLUMNS, (report_row(r) for r in reps))
        fails = [r for r in reps if not r.passed]
        ratios = [r.ratio for r in reps if math.isfinite(r.ratio)]
        summary.append([cid, len(reps), len(fails), max(ratios) if ratios else 0.0, not fails])
        for r in fails:
            log.error("FAIL %s [%s]: lhs=%.6e rhs=%.6e aux=%s inputs=%s", cid, r.instance, r.lhs, r.rhs,
                      json.dumps(_jsonable(r.aux)), json.dumps(_jsonable(r.inputs)))
    write_csv(os.path.join(out, "verify-summary.csv"), SUMMARY_COLUMNS, summary)
    width = max(len(s[0]) for s in summary)
    for cid, n, nf, mr, ok in summary:
        print(f"{cid:<{width}}  {'PASS' if ok else 'FAIL'}  {n:5d} instances  {nf:4d} failures  max ratio {mr:.4g}")
    return 0 if all(s[4] for s in summary) else 1


def cmd_sweep(args) -> int:
    if args.preset:
        cfg = preset(args.preset)
    elif args.config:
        cfg = load_config(args.config)
    else:
        raise ConfigError("sweep needs --config or --preset")
    cfg = cfg.with_overrides(seed=args.seed, resolution=args.resolution)
    return run(cfg, _out_dir(args, cfg), plots=not args.no_plots and cfg.plots)


def cmd_crofton(args) -> int:
    seed = 0 if args.seed is None else args.seed
    r = V.check_crofton(args.shape, args.lines, seed)
    row = [args.shape, args.lines, seed, r.aux["estimate"], r.aux["stderr"], r.aux["exact"]]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(CROFTON_COLUMNS)
    w.writerow([fmt(x) for x in row])
    if args.out or os.environ.get(OUT_ENV):
        write_csv(os.path.join(_out_dir(args), "crofton.csv"), CROFTON_COLUMNS, [row])
    return 0


# sweeps ------------------------------------------------------------------------------


def _base_measure(cfg: ExperimentConfig, rng) -> DiscreteMeasure:
    base = cfg.targets["base"]
    dom = cfg.domain()
    lo, hi = dom.bounds
    lo, hi = np.atleast_1d(lo).astype(float), np.atleast_1d(hi).astype(float)
    kind = base["kind"]
    if kind == "file":
        return _read_target(base["path"])
    k = int(base.get("atoms", 200 if dom.dim == 1 else 16))
    if kind == "random":
        return V.random_measure(rng, dom.dim, (k, k), (lo, hi))
    if dom.dim == 1:
        pts = lo + (hi - lo) * ((np.arange(k) + 0.5) / k)[:, None]
    else:
        m = max(1, int(round(math.sqrt(k))))
        g = (np.arange(m) + 0.5) / m
        X, Y = np.meshgrid(g, g)
        pts = lo + (hi - lo) * np.stack([X.ravel(), Y.ravel()], axis=1)
        inside = dom.contains(pts)
        pts = pts[inside]
    return DiscreteMeasure(pts)


def sweep_rows(cfg: ExperimentConfig) -> tuple[list, list]:
    """Rows of the sweep table for the configured family."""
    fam = cfg.targets["family"]
    if fam == "gn-sharpness":
        L = cfg.targets["L"]
        rows = []
        for e in cfg.sweep_values:
            r = V.check_gn_sharpness(L, e)
            rows.append([e, r.lhs, r.rhs, r.aux["l2_squared"]])
        return GN_COLUMNS, rows
    rho = build_source(cfg.source)
    rng = np.random.default_rng(cfg.seed)
    if fam == "files":
        mus = [_read_target(p) for p in cfg.targets["files"]]
        mu0, family = mus[0], mus
    else:
        mu0 = _base_measure(cfg, rng)
        direction = np.asarray(cfg.targets["direction"])
        family = []
        for e in cfg.sweep_values:
            if fam == "shift":
                family.append(mu0.translate(e * direction))
            elif fam == "dilation":
                family.append(mu0.scale(1.0 + e))
            else:
                family.append(_base_measure(cfg, np.random.default_rng([cfg.seed, int(round(e))])))
    e0 = embed(rho, mu0)
    rows = []
    for e, mu in zip(cfg.sweep_values, family):
        e1 = embed(rho, mu)
        sc = V.check_strong_convexity(rho, mu0, mu, e0=e0, e1=e1)
        rows.append([e, bracket(e0, e1, mu0, mu), variance(*dual_difference(e0, e1)),
                     variance(e1.phi - e0.phi, rho.masses), lot_distance(e0, e1),
                     _w(mu0, mu, 1), _w(mu0, mu, 2), sc.ratio])
    return MEASURE_COLUMNS, rows


def run(cfg: ExperimentConfig, out: str, plots: bool = True) -> int:
    """Run a configured sweep; writes the sweep table, fits and plots."""
    from .plotting import plot_loglog

    header, rows = sweep_rows(cfg)
    write_csv(os.path.join(out, f"{cfg.name}-sweep.csv"), header, rows)
    table = np.asarray(rows, dtype=float)
    fit_rows = []
    ok = True
    for f in cfg.fits:
        x = table[:, header.index(f["x"])]
        y = table[:, header.index(f["y"])]
        keep = (x > 0) & (y > 0)
        try:
            fit = V.fit_holder_exponent(x[keep], y[keep])
        except LotstabError as exc:
            raise ConfigError(f"fit {f['y']} vs {f['x']}: {exc}") from None
        passed = f["slope"] is None or abs(fit.slope - float(f["slope"])) <= f["tol"]
        ok &= passed
        fit_rows.append([f["x"], f["y"], fit.slope, fit.intercept, fit.residual,
                         "" if f["slope"] is None else float(f["slope"]), f["tol"], passed])
        if plots:
            plot_loglog(x[keep], y[keep], fit, os.path.join(out, f"{cfg.name}-{f['y']}-vs-{f['x']}.svg"),
                        xlabel=f["x"], ylabel=f["y"], title=cfg.name)
        print(f"{f['y']} vs {f['x']}: slope {fit.slope:.3f}" + ("" if f["slope"] is None else
              f" (expected {float(f['slope']):g} +- {f['tol']:g}) {'PASS' if passed else 'FAIL'}"))
    write_csv(os.path.join(out, f"{cfg.name}-fits.csv"), FIT_COLUMNS, fit_rows)
    return 0 if ok else 1


# argument parsing -----------------------------------------------------------------------


def _columns(title: str, cols: list) -> str:
    return f"{title} columns: {', '.join(cols)}"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML experiment configuration")
    common.add_argument("--seed", type=int, default=None, help="random seed")
    common.add_argument("--resolution", type=int, default=None, help="grid cells per axis (64..4096)")
    common.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or config)")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress")

    p = argparse.ArgumentParser(prog="lotstab", parents=[common],
                                description="Brenier maps, the LOT embedding and stability checks.",
                                epilog="Exit codes: 0 success, 1 failed check, 2 invalid input.")
    p.add_argument("--version", action="version", version=f"lotstab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    raw = argparse.RawDescriptionHelpFormatter

    s = sub.add_parser("solve", parents=[common], formatter_class=raw,
                       help="solve the transport problem from the source to a target",
                       epilog=_columns("transport.csv", ["x1[,x2]", "index", "T1[,T2]", "phi"])
                       + "\nsummary.json keys: iterations, grad_inf_norm, objective")
    s.add_argument("target", help="target CSV (x1[,x2],weight)")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("embed", parents=[common], formatter_class=raw,
                       help="pairwise LOT and W2 distances of targets",
                       epilog=_columns("embed.csv", ["i", "j", "lot_distance", "W2"]))
    s.add_argument("targets", nargs="+", help="target CSV files")
    s.set_defaults(func=cmd_embed)

    s = sub.add_parser("verify", parents=[common], formatter_class=raw,
                       help="run a named check or all of them",
                       epilog=_columns("verify-<check>.csv", REPORT_COLUMNS) + "\n"
                       + _columns("verify-summary.csv", SUMMARY_COLUMNS) + "\nchecks:\n"
                       + "\n".join(f"  {k:18s} {v}" for k, v in V.CHECKS.items()))
    s.add_argument("check", help="check id or 'all'")
    s.add_argument("--instances", type=int, default=50, help="random pairs per dimension (default 50)")
    s.add_argument("--lines", type=int, default=1_000_000, help="lines for the Crofton estimates")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", parents=[common], formatter_class=raw,
                       help="run a configured or preset parameter sweep",
                       epilog=_columns("<name>-sweep.csv", MEASURE_COLUMNS) + " (gn-sharpness: "
                       + ", ".join(GN_COLUMNS) + ")\n" + _columns("<name>-fits.csv", FIT_COLUMNS))
    s.add_argument("--preset", help="builtin preset: sharpness-1d, gn-sharpness, shift-1d, dilation-1d, translation-2d")
    s.add_argument("--no-plots", action="store_true", help="skip SVG plots")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("crofton", parents=[common], formatter_class=raw,
                       help="Crofton boundary estimate of a standard shape",
                       epilog=_columns("output", CROFTON_COLUMNS))
    s.add_argument("--shape", choices=["square", "disk", "segment"], default="square")
    s.add_argument("--lines", type=int, default=1_000_000)
    s.set_defaults(func=cmd_crofton)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return int(args.func(args))
    except ConfigError as exc:
        print(f"lotstab: configuration error: {exc}", file=sys.stderr)
        return 2
    except (LotstabError, ValueError) as exc:
        print(f"lotstab: invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
