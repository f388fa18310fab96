"""Explicit ingredients of the strong asymptotics: w, phi, S, theta, S_i, theta_i.

The Szego function of rho is carried by the Chebyshev expansion of log rho,
log rho(x) = sum_k c_k T_k(x).  With u = 1/phi(z),

    log S(z) = -c_0/2 - 1/2 sum_{k>=1} c_k u^k,

and on the cut (u = exp(-/+ i arccos x)) the boundary values give
sqrt(rho) S_+ = exp(i theta) with theta(x) = 1/2 sum_{k>=1} c_k sin(k arccos x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cheb_core import ChebSeries, cheb_coeffs
from .errors import InvalidArgumentError, ResolutionError
from .weights import WeightSpec, get_kind

__all__ = [
    "SzegoData",
    "resolve_series",
    "build_szego",
    "sqrt_w",
    "sqrt_w_boundary",
    "phi",
    "phi_boundary",
    "szego_S",
    "szego_S_boundary",
    "theta_phase",
    "szego_Si",
    "szego_Si_boundary",
    "theta_i",
    "s_inf_product",
]

TAIL_TOL = 1e-13
MAX_NODES = 8192


def _scalar_out(out):
    return out[()] if isinstance(out, np.ndarray) and out.ndim == 0 else out


def _check_off_cut(z):
    z = np.asarray(z, dtype=complex)
    on_cut = (z.imag == 0) & (np.abs(z.real) <= 1)
    if np.any(on_cut):
        raise InvalidArgumentError(
            "point lies on the cut [-1, 1]; use the *_boundary variant with side=+1 or -1"
        )
    return z


def _check_side(side):
    if side not in (1, -1):
        raise InvalidArgumentError(f"side must be +1 or -1, got {side!r}")


def _interval(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1):
        raise InvalidArgumentError("x must lie in [-1, 1]")
    return x


# ---------------------------------------------------------------------------
# w and phi


def sqrt_w(z):
    """Branch of sqrt(z^2 - 1) analytic off [-1, 1] with w(z)/z -> 1."""
    z = _check_off_cut(z)
    return _scalar_out(np.sqrt(z - 1) * np.sqrt(z + 1))


def sqrt_w_boundary(x, side: int):
    """w_{+/-}(x) = +/- i sqrt(1 - x^2)."""
    _check_side(side)
    x = _interval(x)
    return _scalar_out(side * 1j * np.sqrt((1 - x) * (1 + x)))


def phi(z):
    """Conformal map z + w(z) of the exterior of [-1, 1] onto |u| > 1."""
    z = _check_off_cut(z)
    return _scalar_out(z + np.sqrt(z - 1) * np.sqrt(z + 1))


def phi_boundary(x, side: int):
    """phi_{+/-}(x) = x +/- i sqrt(1 - x^2)."""
    _check_side(side)
    x = _interval(x)
    return _scalar_out(x + side * 1j * np.sqrt((1 - x) * (1 + x)))


# ---------------------------------------------------------------------------
# Szego function of rho


@dataclass(frozen=True)
class SzegoData:
    logrho_coeffs: ChebSeries
    s_inf: float
    N_s: int
    resolved: bool = True
    tail: float = 0.0

    def require_resolved(self):
        if not self.resolved:
            raise ResolutionError(
                f"log(rho) expansion is under-resolved: relative tail {self.tail:.3e} with "
                f"{self.N_s} nodes exceeds {TAIL_TOL:g}"
            )


def resolve_series(f: Callable, tol: float = TAIL_TOL, n_min: int = 16, n_max: int = MAX_NODES):
    """Chebyshev interpolant of ``f`` on the smallest power-of-two grid whose
    tail falls below ``tol`` relative to the largest coefficient.

    Returns ``(series, resolved, tail)``.  The last two coefficients are
    inspected so that parity zeros cannot fake convergence.
    """
    n = n_min
    while True:
        s = cheb_coeffs(f, n)
        c = np.abs(s.coeffs)
        scale = c.max()
        tail = 0.0 if scale == 0 else float(c[-2:].max() / scale)
        if tail <= tol or n >= n_max:
            return s, tail <= tol, tail
        n *= 2


def build_szego(w: WeightSpec) -> SzegoData:
    series, ok, tail = resolve_series(w.log_rho)
    return SzegoData(
        logrho_coeffs=series,
        s_inf=math.exp(-0.5 * series.coeffs[0]),
        N_s=len(series),
        resolved=ok,
        tail=tail,
    )


def _horner_u(c, u):
    """sum_{k>=1} c_k u^k."""
    acc = np.zeros_like(u)
    for ck in c[:0:-1]:
        acc = (acc + ck) * u
    return acc


def szego_S(sd: SzegoData, z):
    """S(z) off the cut, via the series in 1/phi(z)."""
    sd.require_resolved()
    u = 1.0 / phi(z)
    c = sd.logrho_coeffs.coeffs
    return _scalar_out(np.exp(-0.5 * c[0] - 0.5 * _horner_u(c, np.asarray(u, dtype=complex))))


def szego_S_boundary(sd: SzegoData, x, side: int):
    """S_+(x) or S_-(x) on [-1, 1]."""
    sd.require_resolved()
    u = 1.0 / phi_boundary(x, side)
    c = sd.logrho_coeffs.coeffs
    return _scalar_out(np.exp(-0.5 * c[0] - 0.5 * _horner_u(c, np.asarray(u, dtype=complex))))


def _sine_clenshaw(c, x):
    """sum_{k>=1} c_k sin(k arccos x)."""
    x = np.asarray(x, dtype=float)
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    for ck in c[:0:-1]:
        b1, b2 = ck + 2 * x * b1 - b2, b1
    return b1 * np.sqrt((1 - x) * (1 + x))


def theta_phase(sd: SzegoData, x):
    """Phase theta(x) with sqrt(rho) S_+/- = exp(+/- i theta)."""
    sd.require_resolved()
    x = _interval(x)
    out = 0.5 * _sine_clenshaw(sd.logrho_coeffs.coeffs, x)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# closed-form Szego functions of |v_i|


def szego_Si(kind, z):
    kind = get_kind(kind)
    z = _check_off_cut(z)
    return _scalar_out(_Si(kind.i, z, phi(z), sqrt_w(z)))


def szego_Si_boundary(kind, x, side: int):
    kind = get_kind(kind)
    x = _interval(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        return _scalar_out(_Si(kind.i, x.astype(complex), phi_boundary(x, side), sqrt_w_boundary(x, side)))


def _Si(i, z, ph, w):
    if i == 1:
        return np.ones_like(np.asarray(ph, dtype=complex))
    if i == 2:
        return ph / w
    # (z +/- 1)/phi stays off the negative axis, so the principal root is analytic
    if i == 3:
        return 1.0 / np.sqrt((z + 1) / ph)
    return 1.0 / np.sqrt((z - 1) / ph)


def theta_i(kind, x):
    kind = get_kind(kind)
    x = _interval(x)
    psi = np.arccos(x)
    if kind.i == 1:
        out = np.zeros_like(psi)
    elif kind.i == 2:
        out = -np.arcsin(x)  # arccos(x) - pi/2, exactly odd
    elif kind.i == 3:
        out = 0.5 * psi
    else:
        out = 0.5 * psi - np.pi / 2
    return float(out) if out.ndim == 0 else out


def s_inf_product(sd: SzegoData, kind) -> float:
    """(S_i S)(infinity)."""
    return get_kind(kind).s_inf * sd.s_inf
