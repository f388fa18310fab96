"""Weight family rho(x) |v_i(x)| / sqrt(1 - x^2) on [-1, 1].

A :class:`WeightSpec` carries the positive density rho together with its
smoothness order m and access to derivatives of 1/rho; a :class:`Kind` picks
one of the four Chebyshev endpoint factors v_i.  The rate scale

    eps_n = log(n) / n^m * omega((1/rho)^(m); 1/n)

is computed by :func:`epsilon_n`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.ndimage import maximum_filter1d, minimum_filter1d

from .cheb_core import cheb_nodes
from .errors import InvalidArgumentError, NumericDomainError

__all__ = [
    "Kind",
    "KINDS",
    "WeightSpec",
    "get_kind",
    "v_abs",
    "modulus_of_continuity",
    "epsilon_n",
    "parse_weight",
    "const_weight",
    "exp_weight",
    "recip_poly_weight",
    "holder_weight",
]

OMEGA_GRID = 8192
FD_SPACING = 2.0**-13  # sample grid of the differenced m-th derivative (m = 3)
FD_NOISE = 1e-4  # target rounding noise of iterated differences, relative to |1/rho|
POSITIVITY_GRID = 4097


# ---------------------------------------------------------------------------
# kinds


@dataclass(frozen=True)
class Kind:
    i: int
    v: Callable  # signed polynomial v_i
    v_abs: Callable
    k: int  # endpoint exponent
    s_inf: float  # S_i(infinity)

    def __repr__(self):
        return f"Kind({self.i})"


# factored forms keep the endpoint zeros exact
KINDS = {
    1: Kind(1, lambda z: np.ones_like(np.asarray(z)), lambda x: np.ones_like(np.asarray(x, dtype=float)), 0, 1.0),
    2: Kind(2, lambda z: (z - 1) * (z + 1), lambda x: (1 - x) * (1 + x), 2, 2.0),
    3: Kind(3, lambda z: z + 1, lambda x: 1 + x, 1, math.sqrt(2.0)),
    4: Kind(4, lambda z: z - 1, lambda x: 1 - x, 1, math.sqrt(2.0)),
}


def get_kind(i) -> Kind:
    if isinstance(i, Kind):
        return i
    try:
        return KINDS[int(i)]
    except (KeyError, ValueError, TypeError):
        raise InvalidArgumentError(f"kind must be one of 1, 2, 3, 4; got {i!r}") from None


def v_abs(kind, x):
    """|v_i(x)| for x in [-1, 1]."""
    kind = get_kind(kind)
    out = np.abs(kind.v_abs(np.asarray(x, dtype=float)))
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# densities


def _central_fd(f, x, order, h):
    """Central difference of the given order with one Richardson step."""

    def raw(step):
        j = np.arange(order + 1)
        w = np.array([(-1) ** int(k) * math.comb(order, int(k)) for k in j], dtype=float)
        pts = x[..., None] + (order / 2 - j) * step
        return (f(pts) * w).sum(axis=-1) / step**order

    return (4 * raw(h / 2) - raw(h)) / 3


def _leibniz_inverse_derivs(rho_derivs, order, x):
    """Derivatives 0..order of 1/rho from derivatives of rho (u * rho = 1)."""
    r = [rho_derivs(k, x) for k in range(order + 1)]
    u = [1.0 / r[0]]
    for k in range(1, order + 1):
        acc = sum(math.comb(k, j) * u[j] * r[k - j] for j in range(k))
        u.append(-acc / r[0])
    return u


@dataclass(frozen=True)
class WeightSpec:
    """Positive density rho on [-1, 1] with smoothness order m.

    ``inv_rho_derivs(k, x)``, when available, returns the k-th derivative of
    1/rho for k <= m.  Without a closed-form m-th derivative one is built by
    iterated central differences on a grid of spacing 2**-13.
    """

    rho: Callable
    m: int
    inv_rho_m_deriv: Optional[Callable] = None
    label: str = "custom"
    inv_rho: Optional[Callable] = field(default=None, repr=False, compare=False)
    log_rho: Optional[Callable] = field(default=None, repr=False, compare=False)
    inv_rho_derivs: Optional[Callable] = field(default=None, repr=False, compare=False)
    m_deriv_is_fd: bool = field(default=False, init=False, compare=False)

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 3:
            raise InvalidArgumentError(f"smoothness order m must be an integer >= 3, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        if self.inv_rho is None:
            object.__setattr__(self, "inv_rho", lambda x: 1.0 / self.rho(x))
        if self.log_rho is None:
            object.__setattr__(self, "log_rho", lambda x: np.log(self.rho(x)))
        if self.inv_rho_m_deriv is None and self.inv_rho_derivs is not None:
            m = self.m
            object.__setattr__(self, "inv_rho_m_deriv", lambda x: self.inv_rho_derivs(m, x))

        x = cheb_nodes(POSITIVITY_GRID)
        vals = np.asarray(self.rho(x), dtype=float) + 0 * x
        if not np.all(np.isfinite(vals)):
            j = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise NumericDomainError(f"rho is not finite at x = {x[j]!r}")
        if not np.all(vals > 0):
            j = int(np.flatnonzero(vals <= 0)[0])
            raise InvalidArgumentError(f"rho must be strictly positive; rho({x[j]!r}) = {vals[j]!r}")

        if self.inv_rho_m_deriv is not None:
            self._check_m_deriv()
        else:
            object.__setattr__(self, "inv_rho_m_deriv", self._fd_m_deriv())
            object.__setattr__(self, "m_deriv_is_fd", True)

    def _check_m_deriv(self):
        m = self.m
        probes = np.linspace(-0.85, 0.85, 11) + 0.0371
        exact = np.asarray(self.inv_rho_m_deriv(probes), dtype=float) + 0 * probes
        size = max(np.max(np.abs(exact)), np.max(np.abs(self.inv_rho(probes))))
        tol = 1e-4 * np.abs(exact) + 1e-6 * size
        inv = lambda t: np.asarray(self.inv_rho(t), dtype=float)
        h = (np.finfo(float).eps * 2**m) ** (1.0 / (m + 4))
        # shrinking steps keep the stencil clear of nearby kinks in (1/rho)^(m)
        ok = np.zeros(probes.shape, dtype=bool)
        best = np.full(probes.shape, np.nan)
        for step in h * 2.0 ** -np.arange(5):
            fd = _central_fd(inv, probes, m, step)
            good = np.abs(fd - exact) <= tol
            best = np.where(ok, best, fd)
            ok |= good
        if not ok.all():
            j = int(np.flatnonzero(~ok)[0])
            raise InvalidArgumentError(
                f"supplied m-th derivative of 1/rho disagrees with finite differences at "
                f"x = {probes[j]:.4f}: {exact[j]!r} vs {best[j]!r}"
            )

    def _fd_m_deriv(self):
        h = fd_spacing(self.m)
        n = int(round(2 / h)) + 1
        x = np.linspace(-1.0, 1.0, n)
        g = np.asarray(self.inv_rho(x), dtype=float)
        for _ in range(self.m):
            g = np.gradient(g, h, edge_order=2)
        g.setflags(write=False)
        return lambda t: np.interp(t, x, g)

    def __call__(self, x):
        return self.rho(x)


def fd_spacing(m: int) -> float:
    """Step for m iterated differences: (eps / FD_NOISE)^(1/m), the point where
    rounding noise eps / h^m reaches FD_NOISE, rounded down to a power of two.
    Gives 2**-13 for m = 3, 2**-10 for m = 4, 2**-8 for m = 5."""
    target = (np.finfo(float).eps / FD_NOISE) ** (1.0 / m)
    return 2.0 ** math.floor(math.log2(target))


def const_weight(c: float = 1.0, m: int = 3) -> WeightSpec:
    c = float(c)
    return WeightSpec(
        rho=lambda x: c + 0 * np.asarray(x, dtype=float),
        m=m,
        label=_label("const", c=c, m=m, default_m=3),
        inv_rho=lambda x: 1.0 / c + 0 * np.asarray(x, dtype=float),
        log_rho=lambda x: math.log(c) + 0 * np.asarray(x, dtype=float),
        inv_rho_derivs=lambda k, x: (1.0 / c if k == 0 else 0.0) + 0 * np.asarray(x, dtype=float),
    )


def exp_weight(alpha: float = 1.0, m: int = 3) -> WeightSpec:
    a = float(alpha)
    return WeightSpec(
        rho=lambda x: np.exp(a * np.asarray(x)),
        m=m,
        label=_label("exp", alpha=a, m=m, default_m=3),
        inv_rho=lambda x: np.exp(-a * np.asarray(x)),
        log_rho=lambda x: a * np.asarray(x, dtype=float),
        inv_rho_derivs=lambda k, x: (-a) ** k * np.exp(-a * np.asarray(x)),
    )


def recip_poly_weight(coeffs, m: int = 3) -> WeightSpec:
    """rho = 1/p with p given by monomial coefficients c0, c1, ..."""
    p = np.polynomial.Polynomial(np.asarray(coeffs, dtype=float))
    derivs = [p.deriv(k) if k else p for k in range(m + 1)]
    return WeightSpec(
        rho=lambda x: 1.0 / p(np.asarray(x, dtype=float)),
        m=m,
        label=_label("recip-poly", c=[float(t) for t in p.coef], m=m, default_m=3),
        inv_rho=lambda x: p(np.asarray(x, dtype=float)),
        log_rho=lambda x: -np.log(p(np.asarray(x, dtype=float))),
        inv_rho_derivs=lambda k, x: (derivs[k] if k <= m else p.deriv(k))(np.asarray(x, dtype=float)),
    )


def holder_weight(c: float, beta: float, x0: float, m: int) -> WeightSpec:
    """rho = c + |x - x0|^(m + beta): exactly m times continuously differentiable."""
    c, beta, x0 = float(c), float(beta), float(x0)
    if not 0 < beta < 1:
        raise InvalidArgumentError(f"holder exponent beta must lie in (0, 1), got {beta}")
    s = m + beta

    def rho_derivs(k, x):
        d = np.asarray(x, dtype=float) - x0
        fall = math.prod(s - j for j in range(k))
        out = fall * np.abs(d) ** (s - k) * np.sign(d) ** k
        return out + c if k == 0 else out

    return WeightSpec(
        rho=lambda x: rho_derivs(0, x),
        m=m,
        label=_label("holder", c=c, beta=beta, x0=x0, m=m),
        inv_rho_derivs=lambda k, x: _leibniz_inverse_derivs(rho_derivs, k, x)[k],
    )


def _fmt(v):
    if isinstance(v, list):
        return ",".join(_fmt(t) for t in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _label(family, default_m=None, **params):
    if default_m is not None and params.get("m") == default_m:
        params.pop("m")
    return family + ":" + ",".join(f"{k}={_fmt(v)}" for k, v in params.items())


# ---------------------------------------------------------------------------
# textual form


_FAMILIES = {
    "const": ({"c"}, {"m"}),
    "exp": ({"alpha"}, {"m"}),
    "recip-poly": ({"c"}, {"m"}),
    "holder": ({"c", "beta", "x0", "m"}, set()),
}


def parse_weight(text: str) -> WeightSpec:
    """Parse the weight DSL, e.g. ``exp:alpha=1`` or ``recip-poly:c=1,0,0.5``."""
    text = text.strip()
    family, sep, rest = text.partition(":")
    family = family.strip()
    if not sep or family not in _FAMILIES:
        raise InvalidArgumentError(
            f"cannot parse weight {text!r}; expected one of {', '.join(_FAMILIES)} followed by ':'"
        )
    params: dict[str, list[str]] = {}
    key = None
    for tok in filter(None, (t.strip() for t in rest.split(","))):
        if "=" in tok:
            key, val = (s.strip() for s in tok.split("=", 1))
            if key in params:
                raise InvalidArgumentError(f"duplicate key {key!r} in weight {text!r}")
            params[key] = [val]
        elif key is not None:
            params[key].append(tok)
        else:
            raise InvalidArgumentError(f"stray value {tok!r} in weight {text!r}")

    required, optional = _FAMILIES[family]
    missing = required - params.keys()
    unknown = params.keys() - required - optional
    if missing or unknown:
        raise InvalidArgumentError(
            f"weight {text!r}: missing keys {sorted(missing)}, unknown keys {sorted(unknown)}"
        )
    for k, v in params.items():
        if len(v) > 1 and not (family == "recip-poly" and k == "c"):
            raise InvalidArgumentError(f"key {k!r} takes a single value in weight {text!r}")

    try:
        m = int(params["m"][0]) if "m" in params else 3
        if family == "const":
            return const_weight(float(params["c"][0]), m=m)
        if family == "exp":
            return exp_weight(float(params["alpha"][0]), m=m)
        if family == "recip-poly":
            return recip_poly_weight([float(t) for t in params["c"]], m=m)
        return holder_weight(
            float(params["c"][0]), float(params["beta"][0]), float(params["x0"][0]), m
        )
    except ValueError as exc:
        if isinstance(exc, InvalidArgumentError):
            raise
        raise InvalidArgumentError(f"bad number in weight {text!r}: {exc}") from None


# ---------------------------------------------------------------------------
# modulus of continuity and the rate scale


def modulus_of_continuity(f: Callable, h: float, G: int = OMEGA_GRID) -> float:
    """Grid estimate of max |f(x) - f(y)| over |x - y| <= h on [-1, 1].

    Uses a uniform G-point grid; the estimate never exceeds the true value and
    is nondecreasing in h.
    """
    if not 0 < h <= 2:
        raise InvalidArgumentError(f"h must lie in (0, 2], got {h!r}")
    if G < 1024:
        raise InvalidArgumentError(f"grid size G must be >= 1024, got {G!r}")
    x = np.linspace(-1.0, 1.0, G)
    fx = np.asarray(f(x), dtype=float) + 0 * x
    if not np.all(np.isfinite(fx)):
        j = int(np.flatnonzero(~np.isfinite(fx))[0])
        raise NumericDomainError(f"f is not finite at grid point x = {x[j]!r}")
    dx = 2.0 / (G - 1)
    K = int(math.floor(h / dx * (1 + 1e-12)))
    if K <= 0:
        return 0.0
    if K >= G - 1:
        return float(fx.max() - fx.min())
    # window of K+1 consecutive samples spans exactly K*dx <= h
    # edge windows are padded by replication, which adds no new pairs
    hi = maximum_filter1d(fx, K + 1, mode="nearest")
    lo = minimum_filter1d(fx, K + 1, mode="nearest")
    return float(np.max(hi - lo))


def epsilon_n(w: WeightSpec, n: int) -> float:
    """log(n)/n^m * omega((1/rho)^(m); 1/n), omega on the fixed 8192-point grid."""
    if int(n) != n or n < 2:
        raise InvalidArgumentError(f"epsilon_n needs an integer n >= 2, got {n!r}")
    n = int(n)
    om = modulus_of_continuity(w.inv_rho_m_deriv, 1.0 / n, OMEGA_GRID)
    return math.log(n) / float(n) ** w.m * om
