"""
Command-line entry point: ``delaycycles <subcommand> [options]``.

Exit status is 0 on success, 1 on a usage or domain error, and 2 when a
numerical routine fails.
"""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import logging
import math
import sys
import time
from pathlib import Path

from . import __version__
from .dde_sim import SimConfig, find_separatrix, integrate, measure_amplitude
from .elliptic import complete_K, jacobi, nome
from .errors import DomainError, InsufficientDataError, NumericalError
from .harmonic_balance import characteristic_roots, damped_hb_solutions, undamped_amplitudes
from .melnikov import default_scan_step, melnikov_integral, scan_zeros
from . import reproduce as rp

SCHEMA_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2
REPRODUCE_TARGETS = ("table1", "table2", "fig1", "fig2", "fig3", "fig4", "fig5", "fig7")

log = logging.getLogger("delaycycles")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(v) -> str:
    """Fixed CSV number format: 6 significant digits."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return f"{v:.6g}"
    return str(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):
        return obj.item()
    return obj


def json_text(payload: dict) -> str:
    return json.dumps(_jsonable({"schema": SCHEMA_VERSION, **payload}), indent=2, sort_keys=True) + "\n"


class Outputs:
    """Collects written files so the manifest can digest them."""

    def __init__(self):
        self.files: list[Path] = []

    def write(self, path, text: str):
        path = Path(path)
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
        self.files.append(path)

    def digests(self) -> dict[str, str]:
        return {str(p): hashlib.sha256(p.read_bytes()).hexdigest() for p in self.files}


def _emit(args, outputs: Outputs, header, rows, payload: dict, *, default: str = "csv"):
    """Write to --csv/--json when given, otherwise print the default format."""
    if args.csv:
        outputs.write(args.csv, csv_text(header, rows))
    if args.json:
        outputs.write(args.json, json_text(payload))
    if not args.csv and not args.json:
        sys.stdout.write(csv_text(header, rows) if default == "csv" else json_text(payload))


def aligned(header, rows) -> str:
    cells = [[str(h) for h in header]] + [[c if isinstance(c, str) else fmt(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


# ---- subcommands -----------------------------------------------------------


def cmd_elliptic_eval(args, out: Outputs):
    sn, cn, dn = jacobi(args.z, args.m)
    payload = {"m": args.m, "z": args.z, "sn": sn, "cn": cn, "dn": dn, "K": complete_K(args.m)}
    payload["q"] = nome(args.m) if args.m > 0 else 0.0
    if args.terms:
        from .elliptic import cn_series, dn_series, sn_series

        if args.m > 0:
            payload["series"] = {
                "terms": args.terms,
                "sn": sn_series(args.z, args.m, args.terms),
                "cn": cn_series(args.z, args.m, args.terms),
                "dn": dn_series(args.z, args.m, args.terms),
            }
    cols = ["m", "z", "sn", "cn", "dn", "K", "q"]
    _emit(args, out, cols, [[payload[k] for k in cols]], payload, default="json")


def cmd_simulate(args, out: Outputs):
    cfg = SimConfig(T=args.delay, alpha=args.alpha, x0=args.x0, v0=args.v0, dt=args.dt, t_end=args.t_end)
    traj = integrate(cfg)
    if args.csv:
        rows = zip(traj.times.tolist(), traj.x.tolist(), traj.v.tolist())
        out.write(args.csv, csv_text(["t", "x", "xdot"], rows))
    summary = {"T": cfg.T, "alpha": cfg.alpha, "x0": cfg.x0, "v0": cfg.v0, "dt": cfg.dt, "t_end": cfg.t_end,
               "diverged": traj.diverged, "divergence_time": traj.divergence_time,
               "amplitude": None, "period": None, "converged": False}
    if not traj.diverged:
        try:
            est = measure_amplitude(traj, args.settle)
            summary.update(amplitude=est.amplitude, period=est.period, converged=est.converged,
                           n_peaks=est.n_peaks, spread=est.spread)
        except InsufficientDataError as exc:
            summary["note"] = str(exc)
    if args.json:
        out.write(args.json, json_text(summary))
    if args.summary or not (args.csv or args.json):
        sys.stdout.write(json_text(summary))


def cmd_separatrix(args, out: Outputs):
    x = find_separatrix(args.delay, args.alpha, args.lo, args.hi, args.tol, t_end=args.t_end)
    payload = {"T": args.delay, "alpha": args.alpha, "lo": args.lo, "hi": args.hi, "tol": args.tol, "x0": x}
    _emit(args, out, ["T", "alpha", "separatrix_x0"], [(args.delay, args.alpha, x)], payload, default="json")


def cmd_hb(args, out: Outputs):
    if args.alpha is None or args.alpha == 0.0:
        sols = undamped_amplitudes(args.delay, args.n_max)
    else:
        sols = damped_hb_solutions(args.delay, args.alpha)
    rows = [(s.n, s.omega, s.A, "stable" if s.stable else "unstable") for s in sols]
    payload = {"T": args.delay, "alpha": args.alpha or 0.0,
               "solutions": [{"n": s.n, "omega": s.omega, "A": s.A, "stable_label": s.stable} for s in sols]}
    _emit(args, out, ["n", "omega", "A", "label"], rows, payload)


def cmd_hopf_curve(args, out: Outputs):
    rows = rp.hopf_curve_rows(args.alpha_min, args.alpha_max, args.steps)
    _emit(args, out, ["alpha", "T_crit"], rows, {"rows": [{"alpha": a, "T_crit": t} for a, t in rows]})


def cmd_folds(args, out: Outputs):
    rows = rp.fold_rows(args.n_max, args.t_max, args.steps, include_inactive=args.include_inactive)
    _emit(args, out, ["n", "beta", "T", "alpha"], rows,
          {"rows": [dict(zip(["n", "beta", "T", "alpha"], r)) for r in rows]})


def cmd_eigen(args, out: Outputs):
    roots = characteristic_roots(args.delay, args.alpha, args.n_branches)
    payload = {"T": args.delay, "alpha": args.alpha,
               "roots": [{"re": r.lam.real, "im": r.lam.imag, "residual": r.residual} for r in roots]}
    _emit(args, out, ["re", "im", "residual"], [(r.lam.real, r.lam.imag, r.residual) for r in roots],
          payload, default="json")


def cmd_melnikov(args, out: Outputs):
    T = args.delay
    step = args.a1_step if args.a1_step else default_scan_step(T)
    n = int(math.floor((args.a1_max - args.a1_min) / step + 1e-9)) + 1
    grid = [args.a1_min + i * step for i in range(n)]
    rows = [(a, melnikov_integral(a, T)) for a in grid]
    zeros = scan_zeros(T, args.a1_min, args.a1_max, step, args.tol)
    zpayload = {"T": T, "zeros": [{"n": z.n, "a1": z.a1, "bracket": list(z.bracket)} for z in zeros]}
    if args.zeros_json:
        out.write(args.zeros_json, json_text(zpayload))
    _emit(args, out, ["a1", "value"], rows, {"T": T, "samples": [{"a1": a, "value": v} for a, v in rows], **zpayload})


def cmd_melnikov_compare(args, out: Outputs):
    try:
        delays = [float(s) for s in args.delays.split(",") if s.strip()]
    except ValueError as exc:
        raise UsageError(f"--delays: {exc}") from None
    rows = rp.compare_rows(delays)
    _emit(args, out, ["T", "numeric_zero", "hb_amplitude", "analytic_amplitude"], rows,
          {"rows": [dict(zip(["T", "numeric_zero", "hb_amplitude", "analytic_amplitude"], r)) for r in rows]})


def _table1(args, out: Outputs, csv_path=None):
    rows = rp.table1_rows()
    header = ["n", "A", "printed", "note"]
    data = [(r["n"], r["A"], r["printed"], r["note"]) for r in rows]
    text_rows = [(str(r["n"]), f"{r['A']:.2f}", "" if r["printed"] is None else f"{r['printed']:.2f}", r["note"]) for r in rows]
    sys.stdout.write(aligned(header, text_rows))
    if csv_path:
        out.write(csv_path, csv_text(header, data))
    return rows


def cmd_table1(args, out: Outputs):
    rows = _table1(args, out, args.csv)
    if args.json:
        out.write(args.json, json_text({"rows": rows}))


def _fmt_list(vals):
    return " ".join(f"{v:.2f}" for v in vals) if vals else "DNE"


def _table2(args, out: Outputs, csv_path=None, json_path=None):
    def progress(msg):
        print(msg, file=sys.stderr, flush=True)

    rows = rp.table2_rows(simulate=args.simulate, workers=args.threads, progress=progress)
    header = ["T", "alpha", "eigenvalue", "calculated", "observed"]
    text_rows, csv_rows = [], []
    for r in rows:
        lam = r["eigenvalue"]
        eig = "NRP" if r["nrp"] else f"{lam.real:.2f} +/- {lam.imag:.2f}i"
        obs = "skipped" if r["observed"] is None else _fmt_list(r["observed"])
        text_rows.append((fmt(r["T"]), fmt(r["alpha"]), eig, _fmt_list(r["calculated"]), obs))
        csv_rows.append((r["T"], r["alpha"], lam.real, lam.imag,
                         " ".join(fmt(v) for v in r["calculated"]) or "DNE",
                         obs if r["observed"] is None or not r["observed"] else " ".join(fmt(v) for v in r["observed"])))
    sys.stdout.write(aligned(header, text_rows))
    if csv_path:
        out.write(csv_path, csv_text(["T", "alpha", "eig_re", "eig_im", "calculated", "observed"], csv_rows))
    if json_path:
        out.write(json_path, json_text({"rows": rows}))
    return rows


def cmd_table2(args, out: Outputs):
    _table2(args, out, args.csv, args.json)


def cmd_reproduce(args, out: Outputs):
    d = Path(args.out_dir)
    t = args.target
    if t == "table1":
        _table1(args, out, d / "table1.csv")
    elif t == "table2":
        _table2(args, out, d / "table2.csv")
    elif t == "fig1":
        header, rows = rp.fig1_rows()
        out.write(d / "fig1.csv", csv_text(header, rows))
    elif t in ("fig2", "fig3"):
        T = 0.05 if t == "fig2" else 0.2
        out.write(d / f"{t}.csv", csv_text(["a1", "value"], rp.melnikov_curve_rows(T)))
    elif t == "fig4":
        delays = [round(0.05 * k, 2) for k in range(1, 21)]
        out.write(d / "fig4.csv", csv_text(["T", "numeric_zero", "hb_amplitude", "analytic_amplitude"],
                                           rp.compare_rows(delays)))
    elif t == "fig5":
        out.write(d / "fig5.csv", csv_text(["alpha", "T_crit"], rp.hopf_curve_rows(0.0, 2.0, 201)))
    elif t == "fig7":
        out.write(d / "fig7_folds.csv", csv_text(["n", "beta", "T", "alpha"], rp.fold_rows(8, 3.0, 61)))
        out.write(d / "fig7_hopf.csv", csv_text(["alpha", "T_crit"], rp.hopf_curve_rows(0.0, 3.0, 301)))


# ---- parser ----------------------------------------------------------------


def _common(p):
    p.add_argument("--csv", metavar="PATH", help="write CSV output here")
    p.add_argument("--json", metavar="PATH", help="write JSON output here")
    p.add_argument("--manifest", metavar="PATH", help="write a run manifest (parameters, timing, digests)")
    p.add_argument("--threads", type=int, default=1, metavar="N", help="worker processes for independent runs")
    p.add_argument("--seedless", action="store_true",
                   help="reserved; every algorithm here is deterministic")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="delaycycles", description=__doc__.splitlines()[1])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="integrate the delayed oscillator")
    p.add_argument("--delay", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--v0", type=float, default=0.0)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--t-end", type=float, default=200.0)
    p.add_argument("--settle", type=float, default=0.5, help="fraction of the run discarded as transient")
    p.add_argument("--summary", action="store_true", help="print the amplitude summary as JSON")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("separatrix", help="bisect on x0 for a basin boundary")
    p.add_argument("--delay", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, default=150.0)
    p.set_defaults(func=cmd_separatrix)

    p = sub.add_parser("hb", help="harmonic-balance amplitudes")
    p.add_argument("--delay", type=float, required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--n-max", type=int, default=9)
    p.set_defaults(func=cmd_hb)

    p = sub.add_parser("hopf-curve", help="critical delay versus damping")
    p.add_argument("--alpha-min", type=float, default=0.0)
    p.add_argument("--alpha-max", type=float, default=2.0)
    p.add_argument("--steps", type=int, default=201)
    p.set_defaults(func=cmd_hopf_curve)

    p = sub.add_parser("folds", help="saddle-node-of-cycles curves")
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--t-max", type=float, default=3.0)
    p.add_argument("--steps", type=int, default=61)
    p.add_argument("--include-inactive", action="store_true", help="also emit branches with cos(beta) < 0")
    p.set_defaults(func=cmd_folds)

    p = sub.add_parser("eigen", help="characteristic roots of the linearisation")
    p.add_argument("--delay", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--n-branches", type=int, default=3)
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("melnikov", help="sample the Melnikov integral and its zeros")
    p.add_argument("--delay", type=float, required=True)
    p.add_argument("--a1-min", type=float, default=1.0)
    p.add_argument("--a1-max", type=float, required=True)
    p.add_argument("--a1-step", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--zeros-json", metavar="PATH")
    p.set_defaults(func=cmd_melnikov)

    p = sub.add_parser("melnikov-compare", help="first Melnikov zero against harmonic balance")
    p.add_argument("--delays", required=True, help="comma-separated delays")
    p.set_defaults(func=cmd_melnikov_compare)

    p = sub.add_parser("elliptic-eval", help="sn, cn, dn, K and q at one point")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--z", type=float, default=0.0)
    p.add_argument("--terms", type=int, default=None, help="also evaluate the nome series")
    p.set_defaults(func=cmd_elliptic_eval)

    p = sub.add_parser("table1", help="undamped amplitude ladder at T = 0.3")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("table2", help="damped amplitudes, eigenvalues, and (optionally) simulations")
    p.add_argument("--simulate", action="store_true")
    p.set_defaults(func=cmd_table2)

    p = sub.add_parser("reproduce", help="regenerate a table or figure data set")
    p.add_argument("target", choices=REPRODUCE_TARGETS)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--simulate", action="store_true", help="table2: fill the observed column")
    p.set_defaults(func=cmd_reproduce)

    for action in sub.choices.values():
        _common(action)
    return parser


def _params(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func",)}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    out = Outputs()
    t0 = time.perf_counter()
    try:
        args.func(args, out)
    except (UsageError, DomainError) as exc:
        print(f"delaycycles: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"delaycycles: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.manifest:
        manifest = {
            "subcommand": args.command,
            "parameters": _params(args),
            "version": __version__,
            "duration_s": time.perf_counter() - t0,
            "outputs": out.digests(),
        }
        Path(args.manifest).write_text(json_text(manifest), encoding="utf-8")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
