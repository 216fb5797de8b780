"""Global optimality and duality for a double-well quartic shear energy.

The scalar problem (primal quartic, its dual function and the cubic dual
equation) lives in :mod:`scalar` and :mod:`dual`; :mod:`oracle` holds
brute-force checks that share no code with the solver.  :mod:`radial`
lifts everything to the annulus ``a < r < b`` and :mod:`counterexamples`
builds the sequences and perturbations that probe the limits of the
duality statements.
"""
from .dual import (
    Branch,
    CriticalPoint,
    DualityReport,
    Label,
    branch_root,
    critical_points,
    solve_dual_equation,
    verify_duality,
)
from .errors import (
    BracketFailure,
    BranchUnavailable,
    DualityError,
    ExponentMismatch,
    GammaOutOfRange,
    IntervalContainsPole,
    NodeAtPole,
    NotDoubleWell,
    PoleAtMinusMu,
    WrongRegime,
)
from .quadrature import Integral, RadialGrid, Rule
from .radial import Field, MaterialParams, RadialRegime
from .scalar import Regime, RegimeInfo, ScalarParams, regime_info

__version__ = "0.1.0"

__all__ = [
    "Branch", "BracketFailure", "BranchUnavailable", "CriticalPoint", "DualityError",
    "DualityReport", "ExponentMismatch", "Field", "GammaOutOfRange", "Integral",
    "IntervalContainsPole", "Label", "MaterialParams", "NodeAtPole", "NotDoubleWell",
    "PoleAtMinusMu", "RadialGrid", "RadialRegime", "Regime", "RegimeInfo", "Rule",
    "ScalarParams", "WrongRegime", "branch_root", "critical_points", "regime_info",
    "solve_dual_equation", "verify_duality",
]
