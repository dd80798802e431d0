"""Market parameters, log/time-changed constants, standing assumption, regime taxonomy."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import AssumptionViolated, DegenerateMarket, UnsupportedFamily
from .utility import DualUtilityFamily, FamilyTag, family_a_values

__all__ = [
    "ModelParams",
    "DerivedParams",
    "RegimeCase",
    "Regime",
    "derive_params",
    "validate_assumption",
    "beta_thresholds",
    "classify_regime",
]

_THETA_CUTOFF = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Market and preference parameters of the investment-stopping problem."""

    mu: float
    r: float
    sigma: float
    beta: float
    T: float
    K: float

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.r <= 0:
            raise ValueError("r must be positive")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.T <= 0:
            raise ValueError("T must be positive")
        if self.K < 0:
            raise ValueError("K must be nonnegative")
        if self.mu <= 0:
            raise ValueError("mu must be positive")


@dataclass(frozen=True)
class DerivedParams:
    """Dimensionless constants of the log-price / scaled-time formulation.

    theta    market price of risk (mu - r) / sigma
    nu       2 r / theta^2
    rho      2 beta / theta^2
    kappa    nu - rho + 1 (drift of the log-coordinate operator)
    lam      negative root of x^2 - kappa*x - rho = 0
    tau_max  theta^2 * T / 2, the horizon in scaled time
    """

    theta: float
    nu: float
    rho: float
    kappa: float
    lam: float
    tau_max: float

    def tau_of_t(self, t: float, T: float) -> float:
        return 0.5 * self.theta**2 * (T - t)


def derive_params(p: ModelParams) -> DerivedParams:
    """Compute the transformed constants; reject a degenerate market."""
    if abs(p.mu - p.r) < _THETA_CUTOFF:
        raise DegenerateMarket(
            f"|mu - r| = {abs(p.mu - p.r):.3e} < {_THETA_CUTOFF:g}; time change collapses"
        )
    theta = (p.mu - p.r) / p.sigma
    theta_sq = theta * theta
    nu = 2.0 * p.r / theta_sq
    rho = 2.0 * p.beta / theta_sq
    kappa = nu - rho + 1.0
    # negative root of x^2 - kappa x - rho, branch chosen so the subtraction
    # never cancels (large |kappa| of either sign)
    root = math.sqrt(kappa * kappa + 4.0 * rho)
    lam = 0.5 * (kappa - root) if kappa <= 0 else -2.0 * rho / (kappa + root)
    return DerivedParams(
        theta=theta,
        nu=nu,
        rho=rho,
        kappa=kappa,
        lam=lam,
        tau_max=0.5 * theta_sq * p.T,
    )


def validate_assumption(p: ModelParams, u: DualUtilityFamily) -> np.ndarray:
    """Check K > 0 and smallest per-exponent constant A_1 > 0.

    Returns the A_j array on success; raises AssumptionViolated (carrying the
    offending quantity) otherwise.  The closed-form boundary machinery is only
    valid under this assumption; the classifier and the oracles are not.
    """
    d = derive_params(p)
    a = family_a_values(u.exponents, d.kappa, d.rho)
    if not p.K > 0:
        raise AssumptionViolated("K", p.K)
    if not a[0] > 0:
        raise AssumptionViolated("A1", float(a[0]))
    return a


class RegimeCase(enum.Enum):
    ONE_BOUNDARY = "one_boundary"
    TWO_BOUNDARIES = "two_boundaries"
    NO_STOPPING = "no_stopping"
    STOP_IMMEDIATELY = "stop_immediately"


@dataclass(frozen=True)
class Regime:
    """Classification outcome for a (params, family) pair."""

    case: RegimeCase
    a_values: tuple[float, ...]
    discriminant: float | None = None
    # two-boundary short-horizon limits (z_lo, z_hi), or the single-boundary
    # short-horizon limit when K = 0
    limits: tuple[float, float] | float | None = None
    beta_thresholds: tuple[float, float, float, float] | None = None


def beta_thresholds(p: ModelParams) -> tuple[float, float, float, float]:
    """Discount-rate thresholds (beta1..beta4) for the two-term family.

    beta1/beta2 are the sign changes of A_1/A_2; beta3/beta4 bracket the
    discount range in which the discriminant A_2^2 + 4 A_1 nu K is nonpositive.
    Ordering: beta4 < beta2 < beta3 < beta1.
    """
    d = derive_params(p)
    th2 = d.theta**2
    b1 = 1.5 * th2 + 0.75 * p.r
    b2 = 0.5 * th2 + 0.5 * p.r
    root = math.sqrt(p.r * p.K * (4.0 / 3.0 * th2 + p.r / 3.0) + 4.0 / 9.0 * (p.r * p.K) ** 2)
    b3 = b2 + root - 2.0 / 3.0 * p.r * p.K
    b4 = b2 - root - 2.0 / 3.0 * p.r * p.K
    return b1, b2, b3, b4


def classify_regime(p: ModelParams, u: DualUtilityFamily) -> Regime:
    """Stopping-regime taxonomy for the power and two-term families.

    The case logic follows the sign pattern of (A_1, A_2) and, for K > 0, the
    discriminant A_2^2 + 4 A_1 nu K.  Other exponent lists are refused: their
    classification is not covered by the formulas implemented here.
    """
    d = derive_params(p)
    a = family_a_values(u.exponents, d.kappa, d.rho)

    if u.tag is FamilyTag.POWER:
        a1 = float(a[0])
        if p.K > 0:
            case = RegimeCase.ONE_BOUNDARY if a1 > 0 else RegimeCase.NO_STOPPING
        else:
            case = RegimeCase.STOP_IMMEDIATELY if a1 >= 0 else RegimeCase.NO_STOPPING
        return Regime(case=case, a_values=(a1,))

    if u.tag is not FamilyTag.NON_HARA:
        raise UnsupportedFamily(
            f"regime classification is defined only for the power and two-term "
            f"families, not {u.tag.value} with exponents {u.exponents}"
        )

    a1, a2 = float(a[0]), float(a[1])
    thresholds = beta_thresholds(p)

    if p.K > 0:
        disc = a2 * a2 + 4.0 * a1 * d.nu * p.K
        if a1 >= 0:
            case, limits = RegimeCase.ONE_BOUNDARY, None
        elif a2 > 0 and disc > 0:
            case = RegimeCase.TWO_BOUNDARIES
            z_lo = -0.5 * math.log((-a2 - math.sqrt(disc)) / (2.0 * a1))
            z_hi = -0.5 * math.log((-a2 + math.sqrt(disc)) / (2.0 * a1))
            limits = (z_lo, z_hi)
        else:
            case, limits = RegimeCase.NO_STOPPING, None
        return Regime(
            case=case,
            a_values=(a1, a2),
            discriminant=disc,
            limits=limits,
            beta_thresholds=thresholds,
        )

    # K = 0
    if a1 >= 0:
        case, limits = RegimeCase.STOP_IMMEDIATELY, None
    elif a2 > 0:
        case = RegimeCase.ONE_BOUNDARY
        limits = 0.5 * math.log(-a1 / a2)
    else:
        case, limits = RegimeCase.NO_STOPPING, None
    return Regime(case=case, a_values=(a1, a2), limits=limits, beta_thresholds=thresholds)
