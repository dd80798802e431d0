"""Dual utility family, its derivatives, the log-coordinate obstacle, and primal utilities.

The dual family is a finite sum of negative powers minus a linear floor term:
``sum_j -(1/q_j) y**q_j - K*y`` with strictly increasing negative exponents.
A single exponent ``gamma/(gamma-1)`` recovers the power utility
``U(x) = x**gamma / gamma``; the pair (-3, -1) recovers the two-term
(non-HARA) utility whose primal form involves ``H(x)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = ["FamilyTag", "DualUtilityFamily"]


class FamilyTag(enum.Enum):
    POWER = "power"
    NON_HARA = "non_hara"
    CUSTOM = "custom"


@dataclass(frozen=True)
class DualUtilityFamily:
    """Dual utility ``sum_j -(1/q_j) y**q_j - K*y`` with q_1 < ... < q_J < 0."""

    exponents: tuple[float, ...]
    K: float
    tag: FamilyTag = FamilyTag.CUSTOM
    gamma: float | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        q = self.exponents
        if len(q) < 1:
            raise ValueError("at least one exponent required")
        if any(qj >= 0 for qj in q):
            raise ValueError(f"exponents must be negative, got {q}")
        if any(a >= b for a, b in zip(q, q[1:])):
            raise ValueError(f"exponents must be strictly increasing, got {q}")
        if self.K < 0:
            raise ValueError("floor K must be nonnegative")

    @classmethod
    def power(cls, gamma: float, K: float) -> "DualUtilityFamily":
        if not 0.0 < gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
        return cls((gamma / (gamma - 1.0),), K, FamilyTag.POWER, gamma)

    @classmethod
    def non_hara(cls, K: float) -> "DualUtilityFamily":
        return cls((-3.0, -1.0), K, FamilyTag.NON_HARA)

    @classmethod
    def custom(cls, exponents, K: float) -> "DualUtilityFamily":
        return cls(tuple(float(q) for q in exponents), K, FamilyTag.CUSTOM)

    # -- dual side -------------------------------------------------------

    def dual_value(self, y: float) -> float:
        """Value of the dual utility at y > 0."""
        self._check_positive(y)
        return sum(-(1.0 / q) * y**q for q in self.exponents) - self.K * y

    def dual_deriv(self, y: float) -> float:
        """First derivative, ``-sum_j y**(q_j - 1) - K``; always negative."""
        self._check_positive(y)
        return -sum(y ** (q - 1.0) for q in self.exponents) - self.K

    def dual_second_deriv(self, y: float) -> float:
        """Second derivative, ``sum_j (1 - q_j) y**(q_j - 2)``; always positive."""
        self._check_positive(y)
        return sum((1.0 - q) * y ** (q - 2.0) for q in self.exponents)

    def wealth_of_dual(self, y: float) -> float:
        """Wealth level paired with dual price y: ``-dual_deriv(y)``."""
        return -self.dual_deriv(y)

    @staticmethod
    def _check_positive(y: float) -> None:
        if not y > 0.0:
            raise DomainError(f"dual argument must be positive, got {y}")

    # -- log-coordinate obstacle -----------------------------------------

    def obstacle(self, z: float) -> float:
        """Obstacle g(z) = dual_value(e^z)."""
        return self.dual_value(math.exp(z))

    def obstacle_prime(self, z: float) -> float:
        """g'(z) = e^z * dual_deriv(e^z); nonpositive for K >= 0."""
        ez = math.exp(z)
        return ez * self.dual_deriv(ez)

    # -- primal side -------------------------------------------------------

    def primal_utility(self, x: float) -> float:
        """The primal utility whose concave conjugate (at K=0) this family is."""
        if x < 0.0:
            raise DomainError(f"primal utility undefined for negative wealth {x}")
        if self.tag is FamilyTag.POWER:
            if x == 0.0:
                return 0.0
            return x**self.gamma / self.gamma
        if self.tag is FamilyTag.NON_HARA:
            if x == 0.0:
                return 0.0
            h = _stable_h(x)
            return h**-3 / 3.0 + 1.0 / h + x * h
        return self._conjugate_numeric(x)

    def _conjugate_numeric(self, x: float) -> float:
        """inf_y [dual_value_at_zero_floor(y) + x*y] by golden-section on log y."""
        if x == 0.0:
            return 0.0

        def objective(ly: float) -> float:
            y = math.exp(ly)
            return sum(-(1.0 / q) * y**q for q in self.exponents) + x * y

        lo, hi = -40.0, 40.0
        invphi = (math.sqrt(5.0) - 1.0) / 2.0
        c = hi - invphi * (hi - lo)
        d = lo + invphi * (hi - lo)
        fc, fd = objective(c), objective(d)
        for _ in range(200):
            if hi - lo < 1e-13:
                break
            if fc < fd:
                hi, d, fd = d, c, fc
                c = hi - invphi * (hi - lo)
                fc = objective(c)
            else:
                lo, c, fc = c, d, fd
                d = lo + invphi * (hi - lo)
                fd = objective(d)
        return objective(0.5 * (lo + hi))


def _stable_h(x: float) -> float:
    """H(x) = sqrt(2 / (sqrt(1+4x) - 1)) via the rationalized form.

    ``sqrt(1+4x) - 1`` cancels catastrophically for small x; the identity
    ``sqrt(1+4x) - 1 = 4x / (sqrt(1+4x) + 1)`` is exact and stable.
    """
    root = math.sqrt(1.0 + 4.0 * x)
    return math.sqrt((root + 1.0) / (2.0 * x))


def family_a_values(exponents, kappa: float, rho: float) -> np.ndarray:
    """Per-exponent constants ``q - kappa - rho/q`` (increasing in q)."""
    q = np.asarray(exponents, dtype=float)
    return q - kappa - rho / q
