"""Approximate dual value function and derivatives from the kernel representation.

Given a boundary curve ``z_b(s)`` the dual value is
``dual_value(y) - int_0^tau J(tau - s, ln y; z_b(s)) ds`` where
``J(u, z; a)`` is the kernel-weighted tail integral of the obstacle image.
Because the obstacle image is a finite exponential sum, the inner integral
collapses by Gaussian completion to normal-CDF terms; only the outer
time integral is done numerically, with a square-root substitution at each
endpoint (kernel singularity at ``s = tau``, curve cusp at ``s = 0``).
Derivatives in the dual price are differentiated analytically under the
integral sign; finite differences are kept only as test oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError
from .model import DerivedParams
from .numerics import integrate_adaptive, norm_cdf, norm_pdf
from .utility import DualUtilityFamily, family_a_values

__all__ = ["green", "tail_integral", "tail_sum", "DualValueEvaluator"]


def green(u: float, x: float, derived: DerivedParams) -> float:
    """Heat-type kernel (1/sqrt(4 pi u)) exp(-(x - kappa u)^2 / (4u) - rho u)."""
    if u <= 0:
        raise DomainError(f"kernel requires positive elapsed time, got {u}")
    shift = x - derived.kappa * u
    return math.exp(-shift * shift / (4.0 * u) - derived.rho * u) / math.sqrt(4.0 * math.pi * u)


def _tail_terms(u, z: float, a, q: float, derived: DerivedParams):
    """Common pieces of the tail integral: amplitude, CDF and density factors."""
    u = np.asarray(u, dtype=float)
    a = np.asarray(a, dtype=float)
    if np.any(u <= 0):
        raise DomainError("tail integral requires positive elapsed time")
    growth = q * q - derived.kappa * q - derived.rho
    amp = np.exp(q * z + growth * u)
    sq = np.sqrt(2.0 * u)
    d = (z - a - (derived.kappa - 2.0 * q) * u) / sq
    return amp, d, sq


def tail_integral(u, z: float, a, q: float, derived: DerivedParams):
    """Closed form of ``int_a^inf G(u, z - w) e^{q w} dw``.

    Equals ``exp(q z + (q^2 - kappa q - rho) u) * N(d)`` with
    ``d = (z - a - (kappa - 2q) u) / sqrt(2u)``; valid for every real q.
    """
    amp, d, _ = _tail_terms(u, z, a, q, derived)
    out = amp * norm_cdf(d)
    return float(out) if np.ndim(out) == 0 else out


def _tail_dz(u, z, a, q, derived):
    amp, d, sq = _tail_terms(u, z, a, q, derived)
    return amp * (q * norm_cdf(d) + norm_pdf(d) / sq)


def _tail_dzz(u, z, a, q, derived):
    amp, d, sq = _tail_terms(u, z, a, q, derived)
    pdf = norm_pdf(d)
    return amp * (q * q * norm_cdf(d) + 2.0 * q * pdf / sq - d * pdf / (sq * sq))


_TAIL = {0: tail_integral, 1: _tail_dz, 2: _tail_dzz}


def tail_sum(u, z: float, a, derived: DerivedParams, utility: DualUtilityFamily, order: int = 0):
    """``int_a^inf G(u, z - w) phi(w) dw`` (or its z-derivatives for order 1, 2)."""
    coeffs = family_a_values(utility.exponents, derived.kappa, derived.rho)
    term = _TAIL[order]
    total = 0.0
    for aj, qj in zip(coeffs, utility.exponents):
        total = total + aj * term(u, z, a, qj, derived)
    total = total - derived.nu * utility.K * term(u, z, a, 1.0, derived)
    return float(total) if np.ndim(total) == 0 else total


@dataclass(frozen=True)
class DualValueEvaluator:
    """Quadrature-backed dual value and derivatives for a given boundary curve."""

    curve: Callable[[float], float]
    derived: DerivedParams
    utility: DualUtilityFamily
    quad_tol: float = 1e-11
    base_order: int = 32
    _curve_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def for_boundary(cls, boundary, **kwargs) -> "DualValueEvaluator":
        """Build from any object exposing .curve, .derived and .utility."""
        return cls(boundary.curve, boundary.derived, boundary.utility, **kwargs)

    # -- outer time integral ----------------------------------------------

    def _curve_at(self, s: float) -> float:
        zb = self._curve_cache.get(s)
        if zb is None:
            zb = self.curve(s)
            if len(self._curve_cache) < 65536:
                self._curve_cache[s] = zb
        return zb

    def _integral(self, tau: float, z: float, order: int) -> float:
        if tau <= 0:
            return 0.0

        def on_nodes(u: np.ndarray, s_of: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
            s = s_of(u)
            a = np.array([self._curve_at(float(si)) for si in s])
            return tail_sum(u, z, a, self.derived, self.utility, order)

        half = 0.5 * tau
        sqrt_half = math.sqrt(half)
        # s in (0, tau/2]: s = sig^2 unwinds the square-root cusp of the curve
        lower = integrate_adaptive(
            lambda sig: on_nodes(tau - sig**2, lambda u: tau - u) * 2.0 * sig,
            0.0,
            sqrt_half,
            tol=self.quad_tol,
            order=self.base_order,
        )
        # s in [tau/2, tau): u = tau - s = xi^2 absorbs the kernel singularity
        upper = integrate_adaptive(
            lambda xi: on_nodes(xi**2, lambda u: tau - u) * 2.0 * xi,
            0.0,
            sqrt_half,
            tol=self.quad_tol,
            order=self.base_order,
        )
        return lower + upper

    def _tau(self, t: float) -> float:
        tau = self.derived.tau_max - 0.5 * self.derived.theta**2 * t
        if tau < -1e-12:
            raise DomainError(f"t = {t} is beyond the horizon")
        return max(tau, 0.0)

    # -- public surface ----------------------------------------------------

    def value(self, t: float, y: float) -> float:
        """Approximate dual value at calendar time t and dual price y."""
        if y <= 0:
            raise DomainError(f"dual price must be positive, got {y}")
        tau = self._tau(t)
        return self.utility.dual_value(y) - self._integral(tau, math.log(y), 0)

    def dy(self, t: float, y: float) -> float:
        """First derivative in the dual price."""
        if y <= 0:
            raise DomainError(f"dual price must be positive, got {y}")
        tau = self._tau(t)
        return self.utility.dual_deriv(y) - self._integral(tau, math.log(y), 1) / y

    def dyy(self, t: float, y: float) -> float:
        """Second derivative in the dual price."""
        if y <= 0:
            raise DomainError(f"dual price must be positive, got {y}")
        tau = self._tau(t)
        z = math.log(y)
        correction = self._integral(tau, z, 1) - self._integral(tau, z, 2)
        return self.utility.dual_second_deriv(y) + correction / (y * y)
