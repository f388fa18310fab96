"""Chebyshev series on [-1, 1]: first-kind nodes, coefficient transform, Clenshaw.

Everything here works on the open (Gauss) Chebyshev grid

    x_j = cos((2j + 1) pi / (2N)),  j = 0..N-1,

which is also the node set of Gauss-Chebyshev quadrature, so one grid serves
both interpolation and integration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.fft import dct

from .errors import InvalidArgumentError, NumericDomainError

__all__ = ["ChebSeries", "cheb_nodes", "cheb_coeffs", "clenshaw", "clenshaw_eval"]


@dataclass(frozen=True)
class ChebSeries:
    """Finite Chebyshev expansion ``sum_k coeffs[k] * T_k(x)``.

    The coefficient array is copied and locked read-only on construction.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float, copy=True).ravel()
        if c.size == 0:
            raise InvalidArgumentError("a Chebyshev series needs at least one coefficient")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def N(self) -> int:
        """Degree bound (index of the last stored coefficient)."""
        return self.coeffs.size - 1

    def __len__(self):
        return self.coeffs.size

    def __call__(self, x):
        """Evaluate anywhere (complex arguments allowed), no domain check."""
        return clenshaw(self.coeffs, x)

    def truncate(self, degree: int) -> "ChebSeries":
        return ChebSeries(self.coeffs[: degree + 1])


def cheb_nodes(N: int) -> np.ndarray:
    """First-kind Chebyshev nodes, strictly decreasing in (-1, 1)."""
    if int(N) != N or N < 1:
        raise InvalidArgumentError(f"cheb_nodes needs N >= 1, got {N!r}")
    N = int(N)
    # sin form is exactly antisymmetric: x_{N-1-j} == -x_j
    k = N - 1 - 2 * np.arange(N)
    return np.sin(np.pi * k / (2 * N))


def cheb_coeffs(f: Callable, N: int) -> ChebSeries:
    """Degree N-1 interpolant of ``f`` on the N-point first-kind grid.

    ``f`` is called once with the whole node array.
    """
    x = cheb_nodes(N)
    fx = np.asarray(f(x), dtype=float)
    if fx.shape != x.shape:
        fx = np.broadcast_to(fx, x.shape)
    bad = ~np.isfinite(fx)
    if bad.any():
        j = int(np.flatnonzero(bad)[0])
        raise NumericDomainError(f"f is not finite at node x[{j}] = {x[j]!r} (value {fx[j]!r})")
    c = dct(fx, type=2) / N
    c[0] *= 0.5
    return ChebSeries(c)


def clenshaw(coeffs, x):
    """Backward recurrence for sum c_k T_k(x); works elementwise on arrays.

    Real arguments use Reinsch's modification, which recurs on differences
    b_k -/+ b_{k+1} and so avoids the O(N) error growth of the plain
    recurrence near x = +/-1.  Complex arguments use the plain recurrence.
    """
    c = np.asarray(coeffs)
    x = np.asarray(x)
    if c.size == 1:
        return c[0] + 0 * x
    if not np.iscomplexobj(x) and not np.iscomplexobj(c):
        x = x.astype(float)
        sgn = np.where(x >= 0, 1.0, -1.0)
        u = 2 * (x - sgn)
        b = np.zeros_like(x)
        d = np.zeros_like(x)
        for ck in c[:0:-1]:
            d = u * b + sgn * d + ck
            b = d + sgn * b
        return c[0] + 0.5 * u * b + sgn * d
    b1 = np.zeros_like(x, dtype=np.result_type(x, c, float))
    b2 = np.zeros_like(b1)
    two_x = 2 * x
    for ck in c[:0:-1]:
        b1, b2 = ck + two_x * b1 - b2, b1
    return c[0] + x * b1 - b2


def clenshaw_eval(s: ChebSeries, x):
    """Evaluate ``s`` at real ``x`` with ``|x| <= 1``."""
    xa = np.asarray(x)
    if np.iscomplexobj(xa) or np.any(np.abs(xa) > 1):
        raise InvalidArgumentError(
            "clenshaw_eval is restricted to real x in [-1, 1]; use the Szego map for exterior points"
        )
    out = clenshaw(s.coeffs, xa.astype(float))
    return float(out) if np.ndim(out) == 0 else out
