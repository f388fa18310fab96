"""Command-line entry point: ``chebpert <subcommand> ...``.

Subcommands write CSV (or JSON) to stdout unless an output path is given.
Errors are reported on stderr with exit status 2 (bad input) or 1 (numerical
failure).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .cheb_core import cheb_nodes
from .dbar_extension import ExtensionParams, L_field
from .errors import ChebpertError, InvalidArgumentError
from .harness import (
    ExperimentConfig,
    _fmt,
    dumps_report,
    parse_int_list,
    read_config,
    run_experiment,
)
from .orthopoly import stieltjes_recurrence
from .szego import build_szego, szego_S, szego_S_boundary, theta_phase
from .weights import parse_weight


def _writer(out):
    return csv.writer(out, lineterminator="\n")


def _parse_complex_list(text: str) -> np.ndarray:
    vals = []
    for tok in filter(None, (t.strip() for t in text.split(","))):
        try:
            vals.append(complex(tok.replace(" ", "")))
        except ValueError:
            raise InvalidArgumentError(f"cannot parse complex number {tok!r}") from None
    if not vals:
        raise InvalidArgumentError("--at needs at least one point")
    return np.array(vals, dtype=complex)


def cmd_recurrence(args, out):
    w = parse_weight(args.weight)
    t = stieltjes_recurrence(w, args.kind, args.nmax, args.nquad)
    wr = _writer(out)
    wr.writerow(["n", "a_n", "b_n", "h_n"])
    a = t.a
    h = t.h
    for n in range(t.n_max + 1):
        # a_0 is undefined; leave the cell empty
        wr.writerow([n, _fmt(a[n - 1]) if n > 0 else "", _fmt(t.b[n]), _fmt(h[n])])


def cmd_szego(args, out):
    w = parse_weight(args.weight)
    sd = build_szego(w)
    sd.require_resolved()
    wr = _writer(out)
    if args.at is not None:
        z = _parse_complex_list(args.at)
        S = np.atleast_1d(szego_S(sd, z))
        wr.writerow(["re_z", "im_z", "re_S", "im_S"])
        for zi, si in zip(z, S):
            wr.writerow([_fmt(zi.real), _fmt(zi.imag), _fmt(si.real), _fmt(si.imag)])
        return
    G = args.interval_grid if args.interval_grid is not None else 65
    if G < 1:
        raise InvalidArgumentError("--interval-grid must be >= 1")
    x = cheb_nodes(G)[::-1]
    th = theta_phase(sd, x)
    Sp = szego_S_boundary(sd, x, 1)
    wr.writerow(["x", "theta", "re_S_plus", "im_S_plus"])
    for xi, ti, si in zip(x, np.atleast_1d(th), np.atleast_1d(Sp)):
        wr.writerow([_fmt(xi), _fmt(ti), _fmt(si.real), _fmt(si.imag)])


def cmd_asymptotics(args, out):
    w = parse_weight(args.weight)
    ns = parse_int_list(args.n)
    cfg = ExperimentConfig(weight=args.weight, kind=args.kind, n=tuple(ns), nquad=args.nquad)
    rep = run_experiment(cfg, w)
    wr = _writer(out)
    wr.writerow(["n", "err_interval", "err_exterior", "err_a", "err_b", "eps_n"])
    for row in zip(rep.n_list, rep.err_interval, rep.err_exterior, rep.err_a, rep.err_b, rep.eps):
        wr.writerow([_fmt(v) for v in row])


def cmd_verify(args, out):
    cfg = read_config(args.config)
    rep = run_experiment(cfg)
    text = dumps_report(rep)
    if args.out is None:
        out.write(text)
        return
    base = Path(args.out)
    base.parent.mkdir(parents=True, exist_ok=True)
    base.with_suffix(".json").write_text(text)
    rep.write_csv(base.with_suffix(".csv"))


def cmd_extension(args, out):
    w = parse_weight(args.weight)
    p = ExtensionParams(n=args.n, r=args.r, R=args.R, grid=args.grid, m=w.m, method=args.method)
    f = L_field(w, p)
    summary = {k: (v if isinstance(v, str) else float(v) if isinstance(v, float) else v) for k, v in f.summary().items()}
    if args.out is not None:
        base = Path(args.out)
        base.parent.mkdir(parents=True, exist_ok=True)
        f.write_csv(f"{base}_upper.csv", f"{base}_lower.csv")
        Path(f"{base}_summary.json").write_text(_summary_json(summary))
    out.write(_summary_json(summary))


def _summary_json(d) -> str:
    items = [f"  {json.dumps(k)}: {json.dumps(v) if isinstance(v, str) else _fmt(v)}" for k, v in d.items()]
    return "{\n" + ",\n".join(items) + "\n}\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="chebpert",
        description="Orthogonal polynomials for perturbed Chebyshev weights: recurrences, "
        "Szego data, asymptotic checks and d-bar extensions.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("recurrence", help="recurrence coefficients as CSV (n, a_n, b_n, h_n)")
    p.add_argument("--weight", required=True)
    p.add_argument("--kind", type=int, default=1, choices=(1, 2, 3, 4))
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--nquad", type=int, default=None)
    p.set_defaults(func=cmd_recurrence)

    p = sub.add_parser("szego", help="Szego function values off the cut, or theta on the interval")
    p.add_argument("--weight", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--at", help="comma-separated complex points, e.g. '2,0.3+0.2j'")
    g.add_argument("--interval-grid", type=int, help="number of Chebyshev points on [-1, 1]")
    p.set_defaults(func=cmd_szego)

    p = sub.add_parser("asymptotics", help="per-n asymptotic errors as CSV")
    p.add_argument("--weight", required=True)
    p.add_argument("--kind", type=int, default=1, choices=(1, 2, 3, 4))
    p.add_argument("--n", required=True, help="comma-separated degrees, strictly increasing")
    p.add_argument("--nquad", type=int, default=None)
    p.set_defaults(func=cmd_asymptotics)

    p = sub.add_parser("verify", help="run an experiment from a config file; JSON report")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="output stem; writes <stem>.json and <stem>.csv")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("extension", help="sample the d-bar extension; CSVs and summary JSON")
    p.add_argument("--weight", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=float, default=1.5)
    p.add_argument("--R", type=float, default=2.0)
    p.add_argument("--grid", type=int, default=128)
    p.add_argument("--method", choices=("fd", "exact"), default="fd")
    p.add_argument("--out", default=None, help="output stem for <stem>_upper.csv, <stem>_lower.csv, <stem>_summary.json")
    p.set_defaults(func=cmd_extension)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args.func(args, sys.stdout)
    except (InvalidArgumentError, ValueError, OSError) as exc:
        print(f"chebpert {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ChebpertError, ArithmeticError, RuntimeError) as exc:
        print(f"chebpert {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
