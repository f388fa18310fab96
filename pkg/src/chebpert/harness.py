"""Verification experiments: predicted vs actual strong asymptotics, rate fits, reports.

A run builds the Szego data and one recurrence table, then for each degree n
measures

* err_recur    = max(|a_n - 1/2|, |b_n|),
* err_interval = max over a 512-point Chebyshev grid of |actual - predicted|,
* err_exterior = max over 16 points of |z| = 2 of |actual / predicted - 1|,

alongside eps_n.  Reports are plain JSON with a fixed key order and floats
written with 17 significant digits, so identical configs give identical bytes.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .cheb_core import cheb_nodes
from .errors import InsufficientDataError, InvalidArgumentError
from .orthopoly import (
    RecurrenceTable,
    default_nquad,
    eval_exterior_ratio,
    eval_scaled_monic,
    stieltjes_recurrence,
)
from .szego import (
    SzegoData,
    build_szego,
    phi,
    s_inf_product,
    szego_S,
    szego_Si,
    theta_i,
    theta_phase,
)
from .weights import WeightSpec, epsilon_n, get_kind, parse_weight

__all__ = [
    "INTERVAL_GRID",
    "EXTERIOR_POINTS",
    "NOISE_FLOOR",
    "RATIO_BAND",
    "SLOPE_SLACK",
    "predict_interval",
    "predict_exterior",
    "fit_rate",
    "ExperimentConfig",
    "ExperimentReport",
    "run_experiment",
    "dumps_report",
    "parse_config",
    "read_config",
]

INTERVAL_GRID = 512
EXTERIOR_POINTS = 16
EXTERIOR_RADIUS = 2.0
NOISE_FLOOR = 1e-13  # errors at or below this are rounding, not asymptotics
RATIO_BAND = 50.0
SLOPE_SLACK = 0.5
MIN_FIT_POINTS = 4


def _check_n(t: RecurrenceTable, n: int) -> int:
    if int(n) != n or not 0 <= n <= t.n_max:
        raise InvalidArgumentError(f"n = {n!r} outside 0..{t.n_max}")
    return int(n)


def predict_interval(sd: SzegoData, kind, t: RecurrenceTable, n: int, x, rho=None):
    """Return (predicted, actual) for the on-interval formula.

    predicted = cos(n arccos x + theta(x) + theta_i(x)),
    actual    = pi_n(x) (S_i S)(inf) sqrt(rho(x) |v_i(x)|) / 2.

    ``rho`` defaults to exp of the stored log(rho) series.
    """
    kind = get_kind(kind)
    n = _check_n(t, n)
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1):
        raise InvalidArgumentError("x must lie in [-1, 1]")
    predicted = np.cos(n * np.arccos(x) + theta_phase(sd, x) + theta_i(kind, x))
    rho_x = np.exp(sd.logrho_coeffs(x)) if rho is None else np.asarray(rho(x), dtype=float)
    actual = (
        eval_scaled_monic(t, n, x)
        * s_inf_product(sd, kind)
        * np.sqrt(rho_x * np.abs(kind.v_abs(x)))
        / 2
    )
    if predicted.ndim == 0:
        return float(predicted), float(actual)
    return predicted, actual


def predict_exterior(sd: SzegoData, kind, t: RecurrenceTable, n: int, z):
    """Return (predicted, actual) with predicted = (S_i S)(z) / (S_i S)(inf) and
    actual = P_n(z) (2 / phi(z))^n."""
    kind = get_kind(kind)
    n = _check_n(t, n)
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(phi(z)) < 1.5):
        raise InvalidArgumentError("predict_exterior needs |phi(z)| >= 1.5")
    predicted = szego_Si(kind, z) * szego_S(sd, z) / s_inf_product(sd, kind)
    actual = eval_exterior_ratio(t, n, z)
    if np.ndim(predicted) == 0:
        return complex(predicted), complex(actual)
    return predicted, actual


def fit_rate(ns: Sequence[int], errs: Sequence[float]) -> float:
    """Least-squares slope of log(err) against log(n).

    Non-positive errors are dropped with a warning; fewer than four remaining
    points is an error.
    """
    ns = np.asarray(ns, dtype=float)
    errs = np.asarray(errs, dtype=float)
    if ns.shape != errs.shape:
        raise InvalidArgumentError("ns and errs must have the same length")
    keep = errs > 0
    if not keep.all():
        warnings.warn(f"fit_rate: dropping {int((~keep).sum())} non-positive error(s)", RuntimeWarning, stacklevel=2)
    if keep.sum() < MIN_FIT_POINTS:
        raise InsufficientDataError(
            f"need at least {MIN_FIT_POINTS} positive errors to fit a rate, got {int(keep.sum())}"
        )
    slope, _ = np.polyfit(np.log(ns[keep]), np.log(errs[keep]), 1)
    return float(slope)


# ---------------------------------------------------------------------------
# experiments


@dataclass(frozen=True)
class ExperimentConfig:
    weight: str
    kind: int
    n: tuple[int, ...]
    nquad: Optional[int] = None

    def __post_init__(self):
        ns = tuple(int(v) for v in self.n)
        if not ns:
            raise InvalidArgumentError("n list is empty")
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise InvalidArgumentError(f"n list must be strictly increasing, got {list(ns)}")
        if ns[0] < 2:
            raise InvalidArgumentError("degrees must be >= 2 (eps_n needs log n > 0)")
        object.__setattr__(self, "n", ns)
        object.__setattr__(self, "kind", get_kind(self.kind).i)

    def echo(self) -> dict:
        return {"weight": self.weight, "kind": self.kind, "n": list(self.n), "nquad": self.nquad}


@dataclass
class ExperimentReport:
    weight_label: str
    kind: int
    m: int
    n_list: list[int]
    err_recur: list[float]
    err_interval: list[float]
    err_exterior: list[float]
    eps: list[float]
    err_a: list[float]
    err_b: list[float]
    fitted_slopes: dict
    passed: dict
    config_echo: dict
    nquad: int = 0
    notes: list[str] = field(default_factory=list)

    def columns(self) -> dict:
        return {
            "n": self.n_list,
            "err_recur": self.err_recur,
            "err_a": self.err_a,
            "err_b": self.err_b,
            "err_interval": self.err_interval,
            "err_exterior": self.err_exterior,
            "eps_n": self.eps,
        }

    def to_dict(self) -> dict:
        return {
            "config": dict(self.config_echo, weight_label=self.weight_label, m=self.m, nquad_used=self.nquad),
            "columns": self.columns(),
            "slopes": self.fitted_slopes,
            "pass": self.passed,
        }

    def write_csv(self, path):
        cols = self.columns()
        keys = list(cols)
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(keys)
            for row in zip(*(cols[k] for k in keys)):
                wr.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    return format(v, ".17g")


def _encode(obj, indent=0):
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + ", ".join(_encode(v, indent + 1) for v in obj) + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    return _fmt(obj)


def dumps_report(report: ExperimentReport) -> str:
    """Deterministic JSON text: fixed key order, 17 significant digits."""
    return _encode(report.to_dict()) + "\n"


def _slope_or_na(ns, errs):
    errs = np.asarray(errs)
    if np.max(errs) <= NOISE_FLOOR:
        return "n/a"
    usable = errs > NOISE_FLOOR
    if usable.sum() < MIN_FIT_POINTS:
        return "n/a"
    return fit_rate(np.asarray(ns)[usable], errs[usable])


def run_experiment(cfg: ExperimentConfig, w: Optional[WeightSpec] = None) -> ExperimentReport:
    """Populate all error columns for one (weight, kind) pair."""
    w = parse_weight(cfg.weight) if w is None else w
    kind = get_kind(cfg.kind)
    ns = list(cfg.n)
    n_max = ns[-1]
    nquad = cfg.nquad if cfg.nquad is not None else default_nquad(n_max)

    sd = build_szego(w)
    sd.require_resolved()
    t = stieltjes_recurrence(w, kind, n_max, nquad)

    x = cheb_nodes(INTERVAL_GRID)
    zc = EXTERIOR_RADIUS * np.exp(2j * np.pi * np.arange(EXTERIOR_POINTS) / EXTERIOR_POINTS)
    a = t.a
    err_a, err_b, e_int, e_ext, eps = [], [], [], [], []
    for n in ns:
        # a_n is defined for n >= 1; b_n for n >= 0
        err_a.append(float(abs(a[n - 1] - 0.5)))
        err_b.append(float(abs(t.b[n])))
        pred, act = predict_interval(sd, kind, t, n, x, rho=w.rho)
        e_int.append(float(np.max(np.abs(act - pred))))
        pz, az = predict_exterior(sd, kind, t, n, zc)
        e_ext.append(float(np.max(np.abs(az / pz - 1))))
        eps.append(float(epsilon_n(w, n)))
    err_recur = [max(p, q) for p, q in zip(err_a, err_b)]

    cols = {"err_recur": err_recur, "err_interval": e_int, "err_exterior": e_ext, "eps_n": eps}
    slopes = {}
    for name, vals in cols.items():
        if len(ns) < MIN_FIT_POINTS:
            slopes[name] = "n/a"
        else:
            slopes[name] = _slope_or_na(ns, vals)

    passed = {"finite_nonnegative": all(math.isfinite(v) and v >= 0 for vals in cols.values() for v in vals)}
    eps_slope = slopes["eps_n"]
    for name in ("err_recur", "err_interval", "err_exterior"):
        s = slopes[name]
        passed[f"{name}_slope_within_eps_slope_plus_{SLOPE_SLACK}"] = (
            "n/a" if s == "n/a" or eps_slope == "n/a" else bool(s <= eps_slope + SLOPE_SLACK)
        )
    ratios = [e / d for e, d in zip(e_int, eps) if d > 0 and e > NOISE_FLOOR]
    if len(ratios) >= 2 and len(ratios) == len(ns):
        passed["interval_ratio_band"] = bool(max(ratios) / min(ratios) <= RATIO_BAND)
        passed["interval_ratio_C"] = max(ratios)
        passed["interval_ratio_spread"] = max(ratios) / min(ratios)
    else:
        passed["interval_ratio_band"] = "n/a"

    return ExperimentReport(
        weight_label=w.label,
        kind=kind.i,
        m=w.m,
        n_list=ns,
        err_recur=err_recur,
        err_interval=e_int,
        err_exterior=e_ext,
        eps=eps,
        err_a=err_a,
        err_b=err_b,
        fitted_slopes=slopes,
        passed=passed,
        config_echo=cfg.echo(),
        nquad=nquad,
    )


# ---------------------------------------------------------------------------
# config files: "key = value" lines, '#' comments, keys as the CLI flags

CONFIG_KEYS = ("weight", "kind", "n", "nquad")


def parse_config(text: str) -> ExperimentConfig:
    vals: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgumentError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-")
        if key not in CONFIG_KEYS:
            raise InvalidArgumentError(f"config line {lineno}: unknown key {key!r} (allowed: {', '.join(CONFIG_KEYS)})")
        if key in vals:
            raise InvalidArgumentError(f"config line {lineno}: duplicate key {key!r}")
        vals[key] = value
    for key in ("weight", "kind", "n"):
        if key not in vals:
            raise InvalidArgumentError(f"config is missing required key {key!r}")
    try:
        kind = int(vals["kind"])
        ns = tuple(parse_int_list(vals["n"]))
        nquad = int(vals["nquad"]) if "nquad" in vals else None
    except ValueError as exc:
        raise InvalidArgumentError(f"config value is not an integer: {exc}") from None
    return ExperimentConfig(weight=vals["weight"], kind=kind, n=ns, nquad=nquad)


def read_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def parse_int_list(text: str) -> list[int]:
    """Comma or whitespace separated integers."""
    parts = [p for p in text.replace(",", " ").split() if p]
    if not parts:
        raise InvalidArgumentError("empty integer list")
    return [int(p) for p in parts]
