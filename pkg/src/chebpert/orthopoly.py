"""Recurrence coefficients and polynomial values for rho(x)|v_i(x)| dx / sqrt(1 - x^2).

Monic polynomials satisfy x P_n = P_{n+1} + b_n P_n + a_n^2 P_{n-1}.  On the
interval P_n is of size 2^-n, so everything is carried in the scaled form
pi_n = 2^n P_n, which obeys

    pi_{n+1} = 2 (x - b_n) pi_n - 4 a_n^2 pi_{n-1},   pi_0 = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .cheb_core import cheb_nodes
from .errors import AccuracyDomainError, InvalidArgumentError, NumericDomainError, PrecisionLossError
from .szego import phi
from .weights import WeightSpec, get_kind

__all__ = [
    "RecurrenceTable",
    "gauss_cheb_integrate",
    "default_nquad",
    "stieltjes_recurrence",
    "eval_scaled_monic",
    "eval_exterior_ratio",
    "second_kind_R",
]


@dataclass(frozen=True)
class RecurrenceTable:
    """Monic recurrence data for one (weight, kind) pair.

    ``a_sq[n-1]`` holds a_n^2 for n = 1..n_max and ``b[n]`` holds b_n for
    n = 0..n_max.  Squared norms are stored scaled: ``h_scaled[n]`` is the
    integral of pi_n^2, i.e. 4^n h_n, because h_n itself underflows near
    n = 500.
    """

    a_sq: np.ndarray
    b: np.ndarray
    h_scaled: np.ndarray
    n_max: int
    N_quad: int
    weight_label: str
    kind: int

    def __post_init__(self):
        for name in ("a_sq", "b", "h_scaled"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def h(self) -> np.ndarray:
        """Squared norms h_n of the monic P_n (may underflow to 0 for large n)."""
        return np.ldexp(self.h_scaled, -2 * np.arange(self.n_max + 1))

    @property
    def a(self) -> np.ndarray:
        return np.sqrt(self.a_sq)


def gauss_cheb_integrate(f: Callable, N: int) -> float:
    """(pi/N) sum f(x_j): integral of f(x)/sqrt(1-x^2), exact up to degree 2N-1."""
    x = cheb_nodes(N)
    fx = np.asarray(f(x)) + 0 * x
    if not np.all(np.isfinite(fx)):
        j = int(np.flatnonzero(~np.isfinite(fx))[0])
        raise NumericDomainError(f"integrand is not finite at node x = {x[j]!r}")
    return float(math.fsum(fx) * math.pi / N) if not np.iscomplexobj(fx) else complex(fx.sum() * math.pi / N)


def default_nquad(n_max: int) -> int:
    """8 n_max rounded up to a power of two, at least 1024."""
    return max(1024, 1 << max(0, math.ceil(math.log2(8 * max(n_max, 1)))))


def stieltjes_recurrence(
    w: WeightSpec, kind, n_max: int, N_quad: Optional[int] = None
) -> RecurrenceTable:
    """Discretized Stieltjes procedure on the N_quad-point Gauss-Chebyshev rule."""
    kind = get_kind(kind)
    if int(n_max) != n_max or n_max < 1:
        raise InvalidArgumentError(f"n_max must be a positive integer, got {n_max!r}")
    n_max = int(n_max)
    if N_quad is None:
        N_quad = default_nquad(n_max)
    if N_quad < 8 * n_max:
        raise InvalidArgumentError(f"N_quad = {N_quad} is below 8 * n_max = {8 * n_max}")

    x = cheb_nodes(N_quad)
    wt = np.asarray(w.rho(x), dtype=float) * np.abs(kind.v_abs(x)) * (math.pi / N_quad)

    b = np.empty(n_max + 1)
    a_sq = np.empty(n_max)
    H = np.empty(n_max + 1)
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    for n in range(n_max + 1):
        pw = p * p * wt
        H[n] = pw.sum()
        if n > 0:
            if not H[n] > 1e-6 * H[0]:
                raise PrecisionLossError(
                    f"squared norm of pi_{n} collapsed to {H[n]:.3e} (h_0 = {H[0]:.3e}); "
                    f"increase N_quad beyond {N_quad}"
                )
            a_sq[n - 1] = H[n] / (4 * H[n - 1])
        b[n] = (pw * x).sum() / H[n]
        if n < n_max:
            p_next = 2 * (x - b[n]) * p - (4 * a_sq[n - 1] * p_prev if n > 0 else 0.0)
            p_prev, p = p, p_next

    return RecurrenceTable(
        a_sq=a_sq,
        b=b,
        h_scaled=H,
        n_max=n_max,
        N_quad=N_quad,
        weight_label=w.label,
        kind=kind.i,
    )


def _check_n(t: RecurrenceTable, n):
    if int(n) != n or n < 0 or n > t.n_max:
        raise InvalidArgumentError(f"n = {n!r} outside 0..{t.n_max}")
    return int(n)


def eval_scaled_monic(t: RecurrenceTable, n: int, x):
    """pi_n(x) = 2^n P_n(x); real or complex x, scalar or array."""
    n = _check_n(t, n)
    x = np.asarray(x)
    p_prev = np.zeros_like(x, dtype=np.result_type(x, float))
    p = np.ones_like(p_prev)
    for k in range(n):
        p, p_prev = 2 * (x - t.b[k]) * p - (4 * t.a_sq[k - 1] * p_prev if k > 0 else 0), p
    return p[()] if p.ndim == 0 else p


def eval_exterior_ratio(t: RecurrenceTable, n: int, z):
    """pi_n(z) / phi(z)^n = P_n(z) (2/phi(z))^n, computed without overflow."""
    n = _check_n(t, n)
    ph = np.asarray(phi(z), dtype=complex)
    z = np.asarray(z, dtype=complex)
    r_prev = np.zeros_like(ph)
    r = np.ones_like(ph)
    u = 1.0 / ph
    for k in range(n):
        r, r_prev = 2 * (z - t.b[k]) * u * r - (4 * t.a_sq[k - 1] * u * u * r_prev if k > 0 else 0), r
    return r[()] if r.ndim == 0 else r


def _dist_to_cut(z):
    z = np.asarray(z, dtype=complex)
    xr = np.clip(z.real, -1, 1)
    return np.abs(z - xr)


def second_kind_R(w: WeightSpec, kind, t: RecurrenceTable, n: int, z):
    """Function of the second kind

        R_n(z) = 1/(2 pi i) int P_n(x) rho(x) v_i(x) / ((x - z) w_+(x)) dx.

    With w_+(x) = i sqrt(1-x^2) this is (1/2pi) times the Gauss-Chebyshev
    integral of P_n rho v_i / (z - x).  Only trusted at distance >= 0.1 from
    the cut.
    """
    kind = get_kind(kind)
    n = _check_n(t, n)
    z = np.asarray(z, dtype=complex)
    if np.any(_dist_to_cut(z) < 0.1):
        raise AccuracyDomainError("second_kind_R needs dist(z, [-1, 1]) >= 0.1")
    N = t.N_quad
    x = cheb_nodes(N)
    f = eval_scaled_monic(t, n, x) * np.asarray(w.rho(x), dtype=float) * kind.v(x)
    vals = (f / (z[..., None] - x)).sum(axis=-1) * (math.pi / N) / (2 * math.pi)
    out = vals * 2.0**-n
    return out[()] if out.ndim == 0 else out
