"""Shared numerical kernel: bracketed roots, Gauss-Legendre quadrature, normal functions.

Root finding is backed by scipy's safeguarded Brent iteration and quadrature
nodes by numpy's Legendre module; the contracts (bracket validation, error
taxonomy, adaptive panel refinement) are owned here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import optimize, special

from .errors import MaxIterExceeded, NoSignChange, TolNotReached

__all__ = [
    "Bracket",
    "QuadratureRule",
    "find_root",
    "integrate",
    "integrate_adaptive",
    "erfc",
    "norm_cdf",
    "norm_pdf",
]


@dataclass(frozen=True)
class Bracket:
    """A sign-change interval with stopping tolerances for root finding."""

    lo: float
    hi: float
    tol_abs: float = 1e-12
    tol_rel: float = 1e-12
    max_iter: int = 200

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"bracket requires lo < hi, got [{self.lo}, {self.hi}]")
        if self.tol_abs <= 0 or self.tol_rel <= 0:
            raise ValueError("tolerances must be positive")


def find_root(f: Callable[[float], float], bracket: Bracket) -> float:
    """Locate the root of ``f`` inside ``bracket``.

    Uses a safeguarded bisection / inverse-quadratic hybrid, so the returned
    point always lies inside the initial bracket.

    Raises
    ------
    NoSignChange
        if f(lo) and f(hi) have the same (nonzero) sign.
    MaxIterExceeded
        if the iteration cap is hit before the interval shrinks below
        tol_rel * |x| + tol_abs.
    """
    flo = f(bracket.lo)
    fhi = f(bracket.hi)
    if flo == 0.0:
        return bracket.lo
    if fhi == 0.0:
        return bracket.hi
    if flo * fhi > 0.0:
        raise NoSignChange(
            f"f({bracket.lo:g}) = {flo:g} and f({bracket.hi:g}) = {fhi:g} have the same sign"
        )
    rtol = max(bracket.tol_rel, 4 * np.finfo(float).eps)
    try:
        root, result = optimize.brentq(
            f,
            bracket.lo,
            bracket.hi,
            xtol=bracket.tol_abs,
            rtol=rtol,
            maxiter=bracket.max_iter,
            full_output=True,
            disp=False,
        )
    except RuntimeError as exc:  # scipy's own iteration-cap signal
        raise MaxIterExceeded(str(exc)) from exc
    if not result.converged:
        raise MaxIterExceeded(f"no convergence in {bracket.max_iter} iterations")
    return float(root)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights on the reference interval [-1, 1]."""

    order: int

    @property
    def nodes(self) -> np.ndarray:
        return _leggauss(self.order)[0]

    @property
    def weights(self) -> np.ndarray:
        return _leggauss(self.order)[1]


@lru_cache(maxsize=32)
def _leggauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order < 1:
        raise ValueError("quadrature order must be >= 1")
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _panel(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, order: int) -> float:
    x, w = _leggauss(order)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * float(np.dot(w, np.asarray(f(mid + half * x), dtype=float)))


def integrate(
    f: Callable[[float], float] | Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    order: int = 64,
    adaptive: bool = False,
    tol: float = 1e-10,
    vectorized: bool = False,
) -> float:
    """Integrate ``f`` over [a, b].

    Fixed mode returns the single Gauss-Legendre panel sum of the given order.
    Adaptive mode bisects panels until the panel-vs-halves disagreement falls
    below ``tol`` (depth cap 30, else TolNotReached).

    ``vectorized`` integrands receive the whole node array at once; scalar
    integrands are wrapped.
    """
    if b < a:
        raise ValueError("integrate requires a <= b")
    if b == a:
        return 0.0
    fv = f if vectorized else _vectorize(f)
    if not adaptive:
        return _panel(fv, a, b, order)
    return integrate_adaptive(fv, a, b, tol=tol, order=order)


def _vectorize(f: Callable[[float], float]) -> Callable[[np.ndarray], np.ndarray]:
    def fv(x: np.ndarray) -> np.ndarray:
        return np.array([f(float(xi)) for xi in np.atleast_1d(x)], dtype=float)

    return fv


_MAX_DEPTH = 30


def integrate_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-10,
    order: int = 32,
) -> float:
    """Adaptive panel-bisection Gauss-Legendre quadrature of a vectorized integrand."""
    whole = _panel(f, a, b, order)
    return _refine(f, a, b, whole, tol, order, 0)


def _refine(f, a, b, whole, tol, order, depth) -> float:
    mid = 0.5 * (a + b)
    left = _panel(f, a, mid, order)
    right = _panel(f, mid, b, order)
    if abs(left + right - whole) <= tol:
        return left + right
    if depth >= _MAX_DEPTH:
        raise TolNotReached(
            f"panel [{a:g}, {b:g}] disagreement {abs(left + right - whole):.3e} > {tol:.3e}"
        )
    half_tol = 0.5 * tol
    return _refine(f, a, mid, left, half_tol, order, depth + 1) + _refine(
        f, mid, b, right, half_tol, order, depth + 1
    )


def erfc(x):
    """Complementary error function (vetted library implementation)."""
    if np.isscalar(x):
        return math.erfc(x)
    return special.erfc(np.asarray(x, dtype=float))


def norm_cdf(x):
    """Standard normal CDF via erfc(-x / sqrt(2)) / 2."""
    if np.isscalar(x):
        return 0.5 * math.erfc(-x / math.sqrt(2.0))
    return 0.5 * special.erfc(-np.asarray(x, dtype=float) / math.sqrt(2.0))


_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def norm_pdf(x):
    """Standard normal density."""
    if np.isscalar(x):
        return _INV_SQRT_2PI * math.exp(-0.5 * x * x)
    x = np.asarray(x, dtype=float)
    return _INV_SQRT_2PI * np.exp(-0.5 * x * x)
