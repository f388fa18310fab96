"""Continuous extension of 1/rho off [-1, 1] with controlled d-bar derivative.

Pieces, for a degree-n polynomial l approximating 1/rho:

* lambda(x) = (1/rho(x) - l(x)) / sqrt(1 - x^2), extended by zero off [-1, 1];
* Lambda(x + iy) = (1/|y|) int_0^|y| lambda(x + t) dt, the horizontal average;
* psi_r, a C^1 bump equal to 1 on [-1, 1] and 0 outside E_r = {|phi| < r};
* L = -/+ i w Lambda psi_r in the upper/lower half plane and ell = l + L.

l is built so that 1/rho - l vanishes with m - 1 >= 2 derivatives at both
endpoints; then lambda and lambda' are continuous and vanish there.

Lambda is evaluated through the closed-form antiderivative of lambda: with
x = cos(t) and 1/rho - l = sum e_k T_k,

    int_{-1}^{x} lambda = e_0 (pi - t) - sum_{k>=1} e_k sin(k t) / k.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import legendre as Leg
from numpy.polynomial import polynomial as P
from scipy.special import roots_legendre

from .cheb_core import ChebSeries, cheb_coeffs, cheb_nodes, clenshaw
from .errors import InvalidArgumentError, ResolutionError
from .szego import _sine_clenshaw, phi, resolve_series, sqrt_w
from .weights import WeightSpec, epsilon_n

__all__ = [
    "ExtensionParams",
    "ExtensionField",
    "Residual",
    "build_l_n",
    "lambda_n",
    "Lambda_n",
    "bump_psi",
    "ellipse_axes",
    "L_field",
]

ENDPOINT_GUARD = 1e-8
FD_NOISE_LIMIT = 0.1
_EPS = np.finfo(float).eps


def ellipse_axes(r: float) -> tuple[float, float]:
    """Semi-axes of the ellipse |phi(z)| = r."""
    return 0.5 * (r + 1 / r), 0.5 * (r - 1 / r)


# ---------------------------------------------------------------------------
# polynomial approximant


@lru_cache(maxsize=8)
def _gauss_legendre(N):
    return roots_legendre(N)


def build_l_n(w: WeightSpec, n: int) -> ChebSeries:
    """Degree-n polynomial approximant of 1/rho whose error vanishes with its
    first m - 1 derivatives at both endpoints.

    Working with the resolved Chebyshev interpolant f of 1/rho: l^(m) is the
    unweighted L2 (Legendre) projection of f^(m) onto degree n - m, and l
    takes the Taylor data of f at x = 1.  The projection error is orthogonal
    to every polynomial of degree < m, which forces the same contact at -1.
    """
    m = w.m
    if int(n) != n or n <= 2 * m:
        raise InvalidArgumentError(f"build_l_n needs an integer n > 2m = {2 * m}, got {n!r}")
    n = int(n)
    f, ok, tail = resolve_series(w.inv_rho)
    if not ok:
        raise ResolutionError(f"1/rho is under-resolved on {len(f)} nodes (relative tail {tail:.2e})")
    c = f.coeffs
    big = np.flatnonzero(np.abs(c) > 8 * _EPS * np.abs(c).max())
    if big.size and big[-1] <= n:
        # 1/rho is (numerically) a polynomial of degree <= n
        out = np.zeros(n + 1)
        out[big] = c[big]
        return ChebSeries(out)

    dm = C.chebder(c, m) if c.size > m else np.zeros(1)
    deg = n - m
    N = (dm.size + deg) // 2 + 1
    xg, wg = _gauss_legendre(N)
    V = Leg.legvander(xg, deg)
    leg = (V * (wg * C.chebval(xg, dm))[:, None]).sum(axis=0) * (2 * np.arange(deg + 1) + 1) / 2
    q = cheb_coeffs(lambda x: Leg.legval(x, leg), deg + 1).coeffs

    lc = np.zeros(n + 1)
    lc[: deg + m + 1] = C.chebint(q, m, lbnd=1.0)[: deg + m + 1]
    d = c
    fact = 1.0
    for j in range(m):
        taylor = C.poly2cheb(P.polypow([-1.0, 1.0], j)) * (C.chebval(1.0, d) / fact)
        lc[: taylor.size] += taylor
        d = C.chebder(d) if d.size > 1 else np.zeros(1)
        fact *= j + 1
    lc[: 2 * m] += _endpoint_fix(c, lc, m)
    return ChebSeries(lc)


def _endpoint_fix(c, lc, m):
    """Degree 2m-1 correction zeroing the first m derivatives of c - lc at +-1.

    The integrate-back step meets these conditions only up to rounding
    amplified by the endpoint values of f^(m), which for a finitely smooth
    1/rho are dominated by the interpolant's tail (about 1e-10 for m = 3,
    1e-7 for m = 4).  Removing the leftover makes lambda vanish at +-1.
    """
    e = np.array(c, dtype=float)
    e[: lc.size] -= lc
    rows, rhs = [], []
    basis = np.eye(2 * m)
    for j in range(m):
        dj = C.chebder(e, j) if j else e
        for x0 in (-1.0, 1.0):
            rows.append([C.chebval(x0, C.chebder(b, j) if j else b) for b in basis])
            rhs.append(C.chebval(x0, dj))
    return np.linalg.solve(np.array(rows), np.array(rhs))


def lambda_n(w: WeightSpec, l: ChebSeries, x):
    """(1/rho - l)/sqrt(1 - x^2); zero in the endpoint guard band and off [-1, 1]."""
    out = Residual(w, l).lam(x)
    return float(out) if out.ndim == 0 else out


class Residual:
    """Chebyshev representation of 1/rho - l and the derived lambda, Lambda.

    Coefficients of 1/rho come from the resolved interpolant, the same series
    build_l_n matches at the endpoints.  A residual entirely below the
    rounding level of that transform is set to zero, so an exactly
    representable 1/rho gives an identically vanishing residual.
    """

    def __init__(self, w: WeightSpec, l: ChebSeries):
        d, ok, tail = resolve_series(w.inv_rho)
        if not ok:
            raise ResolutionError(
                f"1/rho is under-resolved on {len(d)} nodes (relative tail {tail:.2e})"
            )
        size = max(len(d), len(l))
        e = np.zeros(size)
        e[: len(d)] += d.coeffs
        e[: len(l)] -= l.coeffs
        if np.abs(e).max() <= 8 * _EPS * np.abs(d.coeffs).max():
            e[:] = 0.0
        self.coeffs = e
        self._sine = np.zeros_like(e)
        self._sine[1:] = e[1:] / np.arange(1, size)

    def g(self, x):
        return clenshaw(self.coeffs, np.asarray(x, dtype=float))

    def lam(self, x):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x) < 1 - ENDPOINT_GUARD
        xs = np.where(inside, x, 0.0)
        return np.where(inside, self.g(xs) / np.sqrt((1 - xs) * (1 + xs)), 0.0)

    def antiderivative(self, x):
        """int_{-1}^{x} lambda(s) ds for any real x."""
        x = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
        u, inv = np.unique(x, return_inverse=True)
        vals = self.coeffs[0] * (math.pi - np.arccos(u)) - _sine_clenshaw(self._sine, u)
        return vals[inv].reshape(x.shape)

    def Lambda(self, z):
        z = np.asarray(z, dtype=complex)
        x, a = z.real, np.abs(z.imag)
        small = a < 1e-6
        a_safe = np.where(small, 1.0, a)
        avg = (self.antiderivative(x + a_safe) - self.antiderivative(x)) / a_safe
        out = np.where(small, self.lam(x + 0.5 * a), avg)
        return out


def Lambda_n(w: WeightSpec, l: ChebSeries, z):
    """Average of lambda over [x, x + |y|] for z = x + iy (lambda(x) when y = 0)."""
    out = Residual(w, l).Lambda(z)
    return float(out) if np.ndim(out) == 0 else out


def _abs_phi(z):
    z = np.asarray(z, dtype=complex)
    on_cut = (z.imag == 0) & (np.abs(z.real) <= 1)
    zz = np.where(on_cut, 2.0, z)
    return np.where(on_cut, 1.0, np.abs(phi(zz)))


def bump_psi(r: float, z):
    """Quintic smoothstep in |phi(z)|: 1 on [-1, 1], 0 where |phi(z)| >= r."""
    if not r > 1:
        raise InvalidArgumentError(f"bump_psi needs r > 1, got {r!r}")
    u = np.clip((_abs_phi(z) - 1) / (r - 1), 0.0, 1.0)
    out = 1 - u**3 * (10 - 15 * u + 6 * u**2)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# field on half-plane grids


@dataclass(frozen=True)
class ExtensionParams:
    n: int
    r: float
    R: float
    grid: int = 128
    m: Optional[int] = None  # smoothness order used for the n > 2m check
    method: str = "fd"  # "fd": central differences of Lambda psi; "exact": averaging identity

    def __post_init__(self):
        if not 1 < self.r < self.R:
            raise InvalidArgumentError(f"need 1 < r < R, got r={self.r}, R={self.R}")
        if self.grid < 64:
            raise InvalidArgumentError(f"grid must be >= 64 points per unit, got {self.grid}")
        if self.m is not None and self.n <= 2 * self.m:
            raise InvalidArgumentError(f"need n > 2m = {2 * self.m}, got n={self.n}")
        if self.method not in ("fd", "exact"):
            raise InvalidArgumentError(f"method must be 'fd' or 'exact', got {self.method!r}")


@dataclass
class HalfPlane:
    """Samples on one closed half-plane grid; arrays are indexed [row, col]."""

    sign: int  # +1 upper, -1 lower
    x: np.ndarray
    y: np.ndarray
    ell: np.ndarray
    L: np.ndarray
    dbar_L: np.ndarray  # NaN where no central stencil exists
    ratio_local: np.ndarray

    def rows(self):
        X, Y = np.meshgrid(self.x, self.y)
        for zx, zy, L, d, q in zip(X.ravel(), Y.ravel(), self.L.ravel(), self.dbar_L.ravel(), self.ratio_local.ravel()):
            yield zx, zy, L.real, L.imag, abs(d), q


@dataclass
class ExtensionField:
    params: ExtensionParams
    weight_label: str
    upper: HalfPlane
    lower: HalfPlane
    bound_ratio: float
    interval_defect: float
    scale: float  # n * eps_n / log n
    eps_n: float
    lambda_norm: float
    lambda_prime_norm: float
    max_abs_dbar: float
    fd_noise: float
    l: ChebSeries = field(repr=False)

    def summary(self) -> dict:
        p = self.params
        return {
            "weight": self.weight_label,
            "n": p.n,
            "r": p.r,
            "R": p.R,
            "grid": p.grid,
            "dbar_method": p.method,
            "bump": "quintic smoothstep in |phi|",
            "bound_ratio": self.bound_ratio,
            "interval_defect": self.interval_defect,
            "scale_n_eps_over_log_n": self.scale,
            "eps_n": self.eps_n,
            "lambda_norm": self.lambda_norm,
            "lambda_prime_norm": self.lambda_prime_norm,
            "max_abs_dbar_L": self.max_abs_dbar,
            "fd_noise": self.fd_noise,
        }

    def write_csv(self, upper_path, lower_path):
        header = ["re_z", "im_z", "re_L", "im_L", "abs_dbar_L", "bound_ratio_local"]
        for half, path in ((self.upper, upper_path), (self.lower, lower_path)):
            with open(path, "w", newline="") as fh:
                wr = csv.writer(fh, lineterminator="\n")
                wr.writerow(header)
                for row in half.rows():
                    wr.writerow([_num(v) for v in row])


def _num(v):
    v = float(v)
    return "nan" if math.isnan(v) else format(v, ".17g")


def _dbar(U, h, dy):
    """Central-difference (d_x + i d_y)/2 at interior points; NaN on the border."""
    out = np.full(U.shape, np.nan, dtype=complex)
    dx = (U[1:-1, 2:] - U[1:-1, :-2]) / (2 * h)
    dyv = (U[2:, 1:-1] - U[:-2, 1:-1]) / (2 * dy)
    out[1:-1, 1:-1] = 0.5 * (dx + 1j * dyv)
    return out


def _dbar_psi(r, Z):
    """Analytic d-bar of bump_psi off the real axis (0 where the bump is flat)."""
    ap = np.abs(phi(Z))
    u = (ap - 1) / (r - 1)
    inside = (u > 0) & (u < 1)
    gp = -30 * u**2 * (1 - u) ** 2
    # d-bar |phi| = |phi| / (2 conj(w)) since phi' = phi / w
    return np.where(inside, gp / (r - 1) * ap / (2 * np.conj(sqrt_w(Z))), 0.0)


def _dbar_exact(res: Residual, r, X, Y, Lam, psi):
    """d-bar (Lambda psi) for y > 0 from the averaging identity

        d_x Lambda = (lambda(x + y) - lambda(x)) / y,
        d_y Lambda = (lambda(x + y) - Lambda) / y,

    NaN on the row y = 0.
    """
    out = np.full(X.shape, np.nan, dtype=complex)
    pos = Y > 0
    x, y = X[pos], Y[pos]
    lam_xy = res.lam(x + y)
    dL = 0.5 * ((lam_xy - res.lam(x)) / y + 1j * (lam_xy - Lam[pos]) / y)
    out[pos] = psi[pos] * dL + Lam[pos] * _dbar_psi(r, x + 1j * y)
    return out


def L_field(w: WeightSpec, p: ExtensionParams) -> ExtensionField:
    """Sample l, L and d-bar L on the upper and lower half-plane grids."""
    if p.n <= 2 * w.m:
        raise InvalidArgumentError(f"need n > 2m = {2 * w.m}, got n={p.n}")
    l = build_l_n(w, p.n)
    res = Residual(w, l)
    h = 1.0 / p.grid
    a_r, b_r = ellipse_axes(p.r)
    I = math.ceil(a_r / h) + 2
    J = math.ceil(b_r / h) + 2
    xs = h * np.arange(-I, I + 1)
    ys = h * np.arange(0, J + 1)
    X, Y = np.meshgrid(xs, ys)

    # Lambda and psi are symmetric under conjugation; compute once
    Z = X + 1j * Y
    Lam = res.Lambda(Z)
    psi = bump_psi(p.r, Z)
    U = Lam * psi
    on_cut = (Y == 0) & (np.abs(X) <= 1)
    w_up = np.where(on_cut, 1j * np.sqrt(np.clip((1 - X) * (1 + X), 0, None)), 0)
    w_off = sqrt_w(np.where(on_cut, 2.0, Z))
    w_up = np.where(on_cut, w_up, w_off)
    lvals = clenshaw(l.coeffs, Z)

    eps = epsilon_n(w, p.n)
    scale = p.n * eps / math.log(p.n)

    halves = []
    D_fd = _dbar(U, h, h)
    if p.method == "exact":
        D_up = _dbar_exact(res, p.r, X, Y, Lam, psi)
        D_up[np.isnan(D_fd)] = np.nan  # same open-grid support as the stencil
    else:
        D_up = D_fd
    for sign in (1, -1):
        wz = w_up if sign == 1 else np.conj(w_up)
        D = D_up if sign == 1 else np.conj(D_up)
        L = -sign * 1j * wz * U
        dbar_L = -sign * 1j * wz * D
        # |w| = sqrt|1 - z^2|, so the local ratio is |d-bar (Lambda psi)| / scale
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(np.isnan(D), np.nan, np.abs(D) / scale if scale > 0 else np.where(np.abs(D) == 0, 0.0, np.inf))
        yv = ys if sign == 1 else -ys
        halves.append(
            HalfPlane(
                sign=sign,
                x=xs,
                y=yv,
                ell=(lvals if sign == 1 else np.conj(lvals)) + L,
                L=L,
                dbar_L=dbar_L,
                ratio_local=ratio,
            )
        )

    # FD noise: compare step h against step 2h (fd) or against the exact value
    both = ~np.isnan(D_up)
    max_d = float(np.max(np.abs(D_up[both]))) if both.any() else 0.0
    if p.method == "exact":
        fd_noise = float(np.max(np.abs(D_fd[both] - D_up[both]))) if both.any() else 0.0
    else:
        D2 = np.full(U.shape, np.nan, dtype=complex)
        D2[2:-2, 2:-2] = 0.5 * (
            (U[2:-2, 4:] - U[2:-2, :-4]) / (4 * h) + 1j * (U[4:, 2:-2] - U[:-4, 2:-2]) / (4 * h)
        )
        both = ~np.isnan(D2)
        inv_norm = float(np.max(np.abs(w.inv_rho(cheb_nodes(1025)))))
        noise_floor = 100 * _EPS * inv_norm / h**2
        fd_noise = float(np.max(np.abs(D_up[both] - D2[both]))) if both.any() else 0.0
        if fd_noise > FD_NOISE_LIMIT * max_d + noise_floor:
            raise ResolutionError(
                f"finite-difference d-bar is unreliable on this grid: steps h and 2h differ by "
                f"{fd_noise:.3e} against a maximum of {max_d:.3e}; increase grid beyond {p.grid} "
                f"or use method='exact'"
            )

    valid = ~np.isnan(halves[0].ratio_local)
    bound_ratio = float(np.max(halves[0].ratio_local[valid])) if valid.any() else 0.0

    xi = np.concatenate([cheb_nodes(2049), xs[np.abs(xs) <= 1]])
    ell_x = clenshaw(l.coeffs, xi) + np.sqrt((1 - xi) * (1 + xi)) * res.lam(xi)
    interval_defect = float(np.max(np.abs(ell_x - np.asarray(w.inv_rho(xi), dtype=float))))

    dense = np.linspace(-1, 1, 20001)
    lam_d = res.lam(dense)
    lam_norm = float(np.max(np.abs(lam_d)))
    lam_prime_norm = float(np.max(np.abs(np.diff(lam_d)) / np.diff(dense)))

    return ExtensionField(
        params=p,
        weight_label=w.label,
        upper=halves[0],
        lower=halves[1],
        bound_ratio=bound_ratio,
        interval_defect=interval_defect,
        scale=scale,
        eps_n=eps,
        lambda_norm=lam_norm,
        lambda_prime_norm=lam_prime_norm,
        max_abs_dbar=float(np.nanmax(np.abs(halves[0].dbar_L))) if valid.any() else 0.0,
        fd_noise=fd_noise,
        l=l,
    )
