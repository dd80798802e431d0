"""Closed-form free-boundary approximation for investment-stopping problems.

Library surface:

- ``model``: parameters, derived constants, assumption check, regime taxonomy
- ``utility``: the dual utility family and the primal utilities
- ``numerics``: bracketed roots, Gauss-Legendre quadrature, normal functions
- ``boundary``: the closed-form boundary curve and its primal mapping
- ``dualvalue``: kernel representation of the dual value and derivatives
- ``primal``: duality recovery of value, strategy and simulated wealth paths
- ``btm``: binomial-tree oracle on the dual process
- ``fd``: finite-difference obstacle-problem oracle
- ``cli``: command-line interface (``freebound ...``)
"""

from .boundary import GcaBoundary, sqrt_law_constant
from .dualvalue import DualValueEvaluator
from .model import (
    DerivedParams,
    ModelParams,
    Regime,
    RegimeCase,
    classify_regime,
    derive_params,
    validate_assumption,
)
from .primal import PathRecord, PrimalSolution, PrimalSolver
from .utility import DualUtilityFamily, FamilyTag

__all__ = [
    "DerivedParams",
    "DualUtilityFamily",
    "DualValueEvaluator",
    "FamilyTag",
    "GcaBoundary",
    "ModelParams",
    "PathRecord",
    "PrimalSolution",
    "PrimalSolver",
    "Regime",
    "RegimeCase",
    "classify_regime",
    "derive_params",
    "sqrt_law_constant",
    "validate_assumption",
]

__version__ = "0.1.0"
