"""Roots of the dual algebraic equation and the matched critical points.

The cubic ``f(s) = tau**2`` is solved branch by branch.  ``f`` is
increasing on ``(-nu*alpha**2/2, rho)``, decreasing on ``(rho, -mu)`` and
increasing on ``(-mu, inf)``, so every branch holds at most one root and
plain bisection on the exact branch endpoints finds it.

Internally the roots are located in the shifted variable ``t = s + mu``,
where the equation reads ``t**2 * (2*t/nu + kappa) = tau**2`` with
``kappa = alpha**2 - 2*mu/nu``.  Keeping ``t`` (rather than ``s``) avoids
the cancellation in ``s + mu`` when the load is small and the upper and
middle roots crowd the pole; the primal point ``alpha + tau/t`` is computed
from ``t`` directly.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import BracketFailure, NotDoubleWell
from .scalar import (
    Regime,
    ScalarParams,
    eval_p,
    eval_p_deriv,
    eval_xi,
    h_of_shift,
    regime_info,
)

BISECT_RTOL = 1e-14
NEWTON_STEPS = 5
MAX_DOUBLINGS = 2000


class Branch(str, enum.Enum):
    UPPER = "Upper"    # s > -mu
    MIDDLE = "Middle"  # rho < s < -mu
    LOWER = "Lower"    # -nu*alpha**2/2 < s < rho


class Label(str, enum.Enum):
    GLOBAL_MIN = "GlobalMin"
    LOCAL_MIN = "LocalMin"
    LOCAL_MAX = "LocalMax"
    INFLECTION = "Inflection"


class DualRoot(NamedTuple):
    branch: Branch
    sigma: float
    shift: float  # sigma + mu, carried at full relative precision
    double: bool = False


@dataclass(frozen=True)
class CriticalPoint:
    sigma_bar: float
    u_bar: float
    p_value: float
    h_value: float
    second_deriv: float
    label: Label
    branch: Branch
    shift: float
    double_root: bool = False

    def as_dict(self) -> dict:
        return {
            "sigma_bar": self.sigma_bar,
            "u_bar": self.u_bar,
            "p_value": self.p_value,
            "h_value": self.h_value,
            "second_deriv": self.second_deriv,
            "label": self.label.value,
            "branch": self.branch.value,
            "double_root": self.double_root,
        }


def root_tolerance(params: ScalarParams) -> float:
    return 1e-12 * max(1.0, params.tau * params.tau, params.eta)


def _shifted_residual(t: float, nu: float, kappa: float, tau: float) -> float:
    # divided through by tau**2, which would underflow for tiny loads
    # and ordered so an overflowing q never meets a zero factor as inf * 0
    q = t / tau
    return q * (q * (2.0 * t / nu + kappa)) - 1.0


def _shifted_slope(t: float, nu: float, kappa: float, tau: float) -> float:
    return 2.0 * (t / tau) * (3.0 * t / nu + kappa) / tau


def _bisect_newton(lo: float, hi: float, nu: float, kappa: float, tau: float) -> float:
    """Root of the shifted cubic on a sign-changing bracket ``[lo, hi]``.

    The stopping width is relative to the bracket itself, so roots that
    scale with a tiny load keep full relative precision.
    """
    g_lo = _shifted_residual(lo, nu, kappa, tau)
    if g_lo == 0.0:
        return lo
    while hi - lo > BISECT_RTOL * max(abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        g_mid = _shifted_residual(mid, nu, kappa, tau)
        if g_mid == 0.0:
            return mid
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid

    t = 0.5 * (lo + hi)
    best, best_res = t, abs(_shifted_residual(t, nu, kappa, tau))
    for _ in range(NEWTON_STEPS):
        slope = _shifted_slope(t, nu, kappa, tau)
        if slope == 0.0 or not math.isfinite(slope) or best_res == 0.0:
            break
        t_new = t - _shifted_residual(t, nu, kappa, tau) / slope
        if not lo <= t_new <= hi:
            break
        res = abs(_shifted_residual(t_new, nu, kappa, tau))
        if res >= best_res:
            break
        t, best, best_res = t_new, t_new, res
    return best


def _upper_shift(params: ScalarParams) -> float:
    nu, kappa, tau = params.nu, params.kappa, abs(params.tau)
    hi = 1.0
    for _ in range(MAX_DOUBLINGS):
        if _shifted_residual(hi, nu, kappa, tau) > 0.0:
            break
        hi *= 2.0
        if not math.isfinite(hi):
            break
    else:
        hi = math.inf
    if not math.isfinite(hi):
        raise BracketFailure(f"upper bracket did not close for tau = {params.tau!r}")
    return _bisect_newton(0.0, hi, nu, kappa, tau)


def _root(branch: Branch, shift: float, params: ScalarParams, double: bool = False) -> DualRoot:
    return DualRoot(branch, shift - params.mu, shift, double)


def solve_dual_equation(params: ScalarParams) -> list[DualRoot]:
    """All real roots of ``f(s) = tau**2``, one per branch, upper first.

    SuperCritical loads give the upper root only; Critical loads add the
    merged middle/lower double root at ``rho`` (reported on the middle
    branch); SubCritical loads give three roots; a zero load gives the
    double root ``-mu`` (upper branch) and ``-nu*alpha**2/2``.

    Raises
    ------
    NotDoubleWell
        If ``2*mu >= nu*alpha**2``.
    BracketFailure
        If the upper bracket cannot be closed in floating point.
    """
    info = regime_info(params)
    nu, kappa, tau = params.nu, params.kappa, abs(params.tau)
    inflection = -nu * kappa / 3.0  # rho + mu
    floor = -nu * kappa / 2.0       # -nu*alpha**2/2 + mu

    if info.regime is Regime.ZERO_LOAD:
        return [
            DualRoot(Branch.UPPER, -params.mu, 0.0, True),
            _root(Branch.LOWER, floor, params),
        ]

    roots = [_root(Branch.UPPER, _upper_shift(params), params)]
    if info.regime is Regime.CRITICAL:
        roots.append(DualRoot(Branch.MIDDLE, info.rho, inflection, True))
    elif info.regime is Regime.SUBCRITICAL:
        roots.append(_root(Branch.MIDDLE, _bisect_newton(inflection, 0.0, nu, kappa, tau), params))
        roots.append(_root(Branch.LOWER, _bisect_newton(floor, inflection, nu, kappa, tau), params))
    return roots


def branch_root(params: ScalarParams, branch: Branch) -> DualRoot | None:
    """The root on one branch, or ``None`` when that branch has none."""
    for root in solve_dual_equation(params):
        if root.branch is branch:
            return root
    return None


_LABELS = {Branch.UPPER: Label.GLOBAL_MIN, Branch.MIDDLE: Label.LOCAL_MIN, Branch.LOWER: Label.LOCAL_MAX}


def _point(params: ScalarParams, root: DualRoot, u: float, label: Label) -> CriticalPoint:
    return CriticalPoint(
        sigma_bar=root.sigma,
        u_bar=u,
        p_value=float(eval_p(params, u)),
        h_value=h_of_shift(params, root.shift),
        second_deriv=float(eval_p_deriv(params, u, 2)),
        label=label,
        branch=root.branch,
        shift=root.shift,
        double_root=root.double,
    )


def critical_points(params: ScalarParams) -> list[CriticalPoint]:
    """Every critical point of the primal energy, labelled by extremality.

    The upper root yields the global minimiser, the middle root a strict
    local minimiser and the lower root a strict local maximiser.  For a
    zero load the dual double root at ``-mu`` carries the two global
    minimisers ``alpha +- sqrt(alpha**2 - 2*mu/nu)``; at the critical load
    the merged root at ``rho`` is a horizontal inflection.
    """
    points = []
    for root in solve_dual_equation(params):
        if root.double and root.branch is Branch.UPPER:
            half = math.sqrt(params.kappa)
            for u in (params.alpha + half, params.alpha - half):
                points.append(_point(params, root, u, Label.GLOBAL_MIN))
            continue
        if params.tau == 0.0:
            u = params.alpha
        else:
            u = params.alpha + params.tau / root.shift
        label = Label.INFLECTION if root.double else _LABELS[root.branch]
        points.append(_point(params, root, u, label))
    return points


@dataclass
class DualityReport:
    """Residuals of the identity chain at one critical point.

    ``residuals`` holds raw absolute values; ``scaled`` divides each by the
    magnitude of the terms it was formed from (floored at 1), and the
    pass flags compare the scaled values against ``tol``.
    """

    residuals: dict[str, float]
    scaled: dict[str, float]
    tol: float
    passed: dict[str, bool] = field(init=False)

    def __post_init__(self):
        self.passed = {k: v <= self.tol for k, v in self.scaled.items()}

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    def as_dict(self) -> dict:
        return {"residuals": self.residuals, "scaled": self.scaled,
                "tol": self.tol, "passed": self.passed, "ok": self.ok}


def verify_duality(params: ScalarParams, cp: CriticalPoint, tol: float = 1e-9) -> DualityReport:
    if not params.is_double_well:
        raise NotDoubleWell("verify_duality needs 2*mu < nu*alpha**2")
    a, mu, nu, tau = params.alpha, params.mu, params.nu, params.tau
    u, s = cp.u_bar, cp.sigma_bar
    p = float(eval_p(params, u))
    h = h_of_shift(params, cp.shift)
    xi = float(eval_xi(params, u, s))
    dp = float(eval_p_deriv(params, u, 1))
    d2p = float(eval_p_deriv(params, u, 2))
    t = cp.shift
    f_gap = (2.0 * s + nu * (a * a)) / nu * t * t - tau * tau
    curvature = 3.0 * (s - params.rho)

    energy_scale = max(1.0, abs(p), abs(h), abs(xi))
    slope_scale = max(1.0, abs(mu * u), abs(nu * (0.5 * u * u - a * u) * (u - a)), abs(tau + a * mu))
    raw = {
        "p_minus_h": abs(p - h),
        "p_minus_xi": abs(p - xi),
        "dp": abs(dp),
        "f_minus_tau2": abs(f_gap),
        "d2p_minus_3(s-rho)": abs(d2p - curvature),
    }
    scales = {
        "p_minus_h": energy_scale,
        "p_minus_xi": energy_scale,
        "dp": slope_scale,
        # matches the root tolerance of the solver: 1e-12 * max(1, tau**2, eta)
        "f_minus_tau2": max(1.0, tau * tau, params.eta),
        "d2p_minus_3(s-rho)": max(1.0, abs(d2p), abs(curvature)),
    }
    scaled = {k: raw[k] / scales[k] for k in raw}
    return DualityReport(raw, scaled, tol)
