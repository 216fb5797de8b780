"""Radial shear problem on an annulus ``a <= r <= b``.

The primal functional integrates the pointwise energy with load
``tau = -beta(r)`` along the radius::

    P_hat(v) = 2*pi * int_a^b r * p_{-beta(r)}(r*v(r)) dr
    P_d(z)   = -pi * int_a^b ((sigma + alpha*z)**2/(z + mu) + z**2/nu) r dr
             =  2*pi * int_a^b r * h_{-beta(r)}(z(r)) dr

with ``sigma(r) = b**2*tau_theta/r**2`` and ``beta = alpha*mu - sigma``.
Fields are stored nodewise on a :class:`~quartic_duality.quadrature.RadialGrid`.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .dual import Branch, branch_root
from .errors import BranchUnavailable, ExponentMismatch, NodeAtPole, NotDoubleWell, WrongRegime
from .quadrature import Integral, RadialGrid
from .scalar import ScalarParams, f_raw, h_raw, p_raw

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class MaterialParams:
    alpha: float
    mu: float
    nu: float
    tau_theta: float
    a: float
    b: float

    def __post_init__(self):
        for name in ("alpha", "mu", "nu", "tau_theta", "a", "b"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("alpha", "mu", "nu", "tau_theta"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
        if not (math.isfinite(self.a) and math.isfinite(self.b) and 0 < self.a < self.b):
            raise ValueError(f"need 0 < a < b < inf, got a={self.a!r}, b={self.b!r}")

    def scalar(self, tau: float = 0.0) -> ScalarParams:
        return ScalarParams(self.alpha, self.mu, self.nu, float(tau))

    @property
    def rho(self) -> float:
        return self.scalar().rho

    @property
    def eta(self) -> float:
        return self.scalar().eta

    def grid(self, n: int = 2049, rule="CompositeSimpson") -> RadialGrid:
        return RadialGrid.uniform(self.a, self.b, n, rule)


@dataclass
class Field:
    values: np.ndarray
    norm_exponent: float = 4.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite at every node")
        if not self.norm_exponent >= 1:
            raise ValueError("norm exponent must be >= 1")

    def __len__(self) -> int:
        return self.values.size


class RadialRegime(str, enum.Enum):
    CASE_A = "CaseA"  # beta**2 > eta on [a, b]
    CASE_B = "CaseB"  # 0 < beta**2 < eta on [a, b]
    MIXED = "Mixed"


def sigma_r(mp: MaterialParams, r):
    return mp.b**2 * mp.tau_theta / (r * r)


def beta_r(mp: MaterialParams, r):
    return mp.alpha * mp.mu - sigma_r(mp, r)


def beta_zero(mp: MaterialParams) -> float:
    """The unique radius where beta vanishes (may lie outside ``[a, b]``)."""
    return mp.b * math.sqrt(mp.tau_theta / (mp.alpha * mp.mu))


def regime_check(mp: MaterialParams) -> RadialRegime:
    """Classify ``beta**2`` against ``eta`` over the whole interval.

    ``beta`` increases with ``r``, so its square is extremal at the
    endpoints unless ``beta`` changes sign inside, in which case the
    minimum is zero and neither strict case can hold.
    """
    if not mp.scalar().is_double_well:
        raise NotDoubleWell("the radial cases need 2*mu < nu*alpha**2")
    ba, bb = beta_r(mp, mp.a), beta_r(mp, mp.b)
    if ba * bb <= 0:
        return RadialRegime.MIXED
    lo, hi = sorted((ba * ba, bb * bb))
    eta = mp.eta
    if lo > eta:
        return RadialRegime.CASE_A
    if hi < eta:
        return RadialRegime.CASE_B
    return RadialRegime.MIXED


def available_branches(regime: RadialRegime) -> tuple[Branch, ...]:
    if regime is RadialRegime.CASE_A:
        return (Branch.UPPER,)
    if regime is RadialRegime.CASE_B:
        return (Branch.UPPER, Branch.MIDDLE, Branch.LOWER)
    return ()


def solve_pointwise(mp: MaterialParams, grid: RadialGrid, branch: Branch | str) -> tuple[Field, Field]:
    """Dual field and the matching primal field on one branch.

    At each node the dual equation ``f(z) = beta(r)**2`` is solved with
    load ``tau = -beta(r)``; the primal field is
    ``v(r) = (alpha - beta(r)/(z(r) + mu)) / r``.

    Raises
    ------
    WrongRegime
        If the data are in the mixed regime.
    BranchUnavailable
        If the regime has no root on ``branch`` (middle/lower in CaseA).
    """
    branch = Branch(branch)
    regime = regime_check(mp)
    if regime is RadialRegime.MIXED:
        raise WrongRegime("no closed-form solution family in the mixed regime")
    if branch not in available_branches(regime):
        raise BranchUnavailable(f"{branch.value} branch has no root in {regime.value}")
    r = grid.nodes
    beta = beta_r(mp, r)
    zeta = np.empty_like(r)
    shift = np.empty_like(r)
    base = mp.scalar()
    for i, (ri, bi) in enumerate(zip(r, beta)):
        root = branch_root(base.with_tau(-bi), branch)
        if root is None:  # only reachable through rounding at a regime edge
            raise BranchUnavailable(f"{branch.value} root missing at r = {ri!r}")
        zeta[i], shift[i] = root.sigma, root.shift
    v = (mp.alpha - beta / shift) / r
    return Field(zeta), Field(v)


def p_hat_integrand(mp: MaterialParams, r, v):
    return TWO_PI * r * p_raw(mp.alpha, mp.mu, mp.nu, -beta_r(mp, r), r * v)


def p_hat(mp: MaterialParams, grid: RadialGrid, v: Field) -> Integral:
    """Primal functional of a nodal field ``v``."""
    if len(v) != len(grid):
        raise ValueError("field and grid sizes differ")
    return grid.integrate(p_hat_integrand(mp, grid.nodes, v.values))


def p_dual_integrand(mp: MaterialParams, r, z):
    t = z + mp.mu
    return -math.pi * r * ((sigma_r(mp, r) + mp.alpha * z) ** 2 / t + z * z / mp.nu)


def p_dual_h_integrand(mp: MaterialParams, r, z):
    return TWO_PI * r * h_raw(mp.alpha, mp.mu, mp.nu, -beta_r(mp, r), z)


@dataclass(frozen=True)
class DualIntegral(Integral):
    h_form: float = math.nan


def p_dual(mp: MaterialParams, grid: RadialGrid, zeta: Field, rtol: float = 1e-9) -> DualIntegral:
    """Dual functional of a nodal field ``zeta``.

    The integral is evaluated from the defining integrand and again from
    the ``h``-form; the two must agree to ``rtol`` relative to the
    integral of the absolute integrand, otherwise ``ArithmeticError``.
    """
    if len(zeta) != len(grid):
        raise ValueError("field and grid sizes differ")
    z, r = zeta.values, grid.nodes
    if np.any(z + mp.mu == 0.0):
        raise NodeAtPole("dual field equals -mu at a grid node")
    first = p_dual_integrand(mp, r, z)
    value, err = grid.integrate(first)
    h_value = float(np.dot(grid.weights, p_dual_h_integrand(mp, r, z)))
    scale = float(np.dot(np.abs(grid.weights), np.abs(first)))
    if abs(value - h_value) > rtol * max(1.0, scale):
        raise ArithmeticError(f"dual integrand forms disagree: {value!r} vs {h_value!r}")
    return DualIntegral(value, err, h_value)


def lp_norm(u: Field, grid: RadialGrid) -> float:
    p = u.norm_exponent
    return max(0.0, grid.integrate(np.abs(u.values) ** p).value) ** (1.0 / p)


def l4_distance(u: Field, v: Field, grid: RadialGrid) -> float:
    """``(int |u - v|**p)**(1/p)`` with ``p`` the fields' norm exponent."""
    if u.norm_exponent != v.norm_exponent:
        raise ExponentMismatch(f"{u.norm_exponent!r} != {v.norm_exponent!r}")
    return lp_norm(Field(u.values - v.values, u.norm_exponent), grid)


# -- integrability of beta**2 / (zeta + mu) -------------------------------------

@dataclass(frozen=True)
class ProbeResult:
    """Outcome of :func:`a1_membership_probe`.

    ``verdict`` is ``"Converges"`` (``limit`` holds the last estimate) or
    ``"Diverges"`` (``trend`` is the least-squares slope of the estimates
    against ``log(1/h_min)``, the log of the finest cell size).
    """

    verdict: str
    estimates: tuple[float, ...]
    finest_cells: tuple[float, ...]
    limit: float | None = None
    trend: float | None = None

    @property
    def converges(self) -> bool:
        return self.verdict == "Converges"

    @property
    def growing(self) -> bool:
        mags = np.abs(self.estimates)
        return bool(np.all(np.isfinite(mags)) and np.all(np.diff(mags) > 0))

    def as_dict(self) -> dict:
        return {"verdict": self.verdict, "limit": self.limit, "trend": self.trend,
                "estimates": list(self.estimates), "finest_cells": list(self.finest_cells)}


def _pole_ratio(beta2, t):
    """``beta**2 / t`` with 0/0 := 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        out = beta2 / t
    return np.where((beta2 == 0.0) & (t == 0.0), 0.0, out)


def a1_membership_probe(mp: MaterialParams, zeta_rule: Callable, levels: int = 6,
                        breakpoints: Iterable[float] = (), base_cells: int = 16,
                        points_per_cell: int = 16, grading_depth: int = 4,
                        rtol: float = 1e-6) -> ProbeResult:
    """Test whether ``int_a^b beta**2/(zeta + mu) dr`` is finite.

    Each level doubles the number of uniform cells and adds
    ``grading_depth`` geometrically shrinking cells (ratio 1/2) around the
    point where ``|zeta + mu|`` is smallest, around every breakpoint and at
    both ends; every cell is integrated with Gauss-Legendre.  Known jumps of
    ``zeta`` should be passed as ``breakpoints``.  Successive estimates
    within ``rtol`` (relative) mean convergence; otherwise the integral is
    reported divergent with its growth rate against the log of the finest
    cell size.

    ``zeta_rule`` must accept and return numpy arrays.
    """
    a, b = mp.a, mp.b
    breakpoints = sorted(float(x) for x in breakpoints if a < x < b)

    def zeta(r):
        return np.broadcast_to(np.asarray(zeta_rule(r), dtype=float), np.shape(r))

    scan = np.linspace(a, b, 8193)
    step = scan[1] - scan[0]
    r_star = float(scan[int(np.argmin(np.abs(zeta(scan) + mp.mu)))])
    anchors = [a, b, *breakpoints]
    nearest = min(anchors, key=lambda x: abs(x - r_star))
    if abs(nearest - r_star) <= step:
        r_star = nearest
    focus = sorted({r_star, *anchors})

    gx, gw = np.polynomial.legendre.leggauss(points_per_cell)
    estimates, finest = [], []
    for level in range(levels):
        n_cells = base_cells * 2**level
        width = (b - a) / n_cells
        depth = grading_depth * (level + 1)
        offsets = width * 0.5 ** np.arange(1, depth + 1)
        edges = [np.linspace(a, b, n_cells + 1), np.array(breakpoints)]
        for x in focus:
            edges.append(x - offsets)
            edges.append(x + offsets)
        edges = np.unique(np.concatenate(edges))
        edges = edges[(edges >= a) & (edges <= b)]
        mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * np.diff(edges)
        r = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
        w = (half[:, None] * gw[None, :]).ravel()
        integrand = _pole_ratio(beta_r(mp, r) ** 2, zeta(r) + mp.mu)
        estimates.append(float(np.dot(w, integrand)))
        finest.append(float(np.min(np.diff(edges))))

    est = np.array(estimates)
    if np.all(np.isfinite(est)) and len(est) >= 2:
        last, prev = est[-1], est[-2]
        if abs(last - prev) <= rtol * max(abs(last), np.finfo(float).tiny):
            return ProbeResult("Converges", tuple(estimates), tuple(finest), limit=float(last))
    if not np.all(np.isfinite(est)):
        trend = math.copysign(math.inf, float(est[~np.isfinite(est)][0]))
    elif len(est) >= 2:
        trend = float(np.polyfit(-np.log(finest), est, 1)[0])
    else:
        trend = math.nan
    return ProbeResult("Diverges", tuple(estimates), tuple(finest), trend=trend)


# -- CSV exchange ------------------------------------------------------------------

def write_field_csv(path, grid: RadialGrid, field: Field) -> None:
    """Write ``r,value`` rows at 17 significant digits (exact round trip)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["r", "value"])
        for r, v in zip(grid.nodes, field.values):
            writer.writerow([f"{r:.17g}", f"{v:.17g}"])


def read_field_csv(path, rule="CompositeSimpson", norm_exponent: float = 4.0) -> tuple[RadialGrid, Field]:
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != ["r", "value"]:
            raise ValueError(f"unexpected header {header!r}")
        rows = [(float(r), float(v)) for r, v in reader]
    nodes, values = zip(*rows) if rows else ((), ())
    return RadialGrid(nodes, rule), Field(values, norm_exponent)


def dual_residual(mp: MaterialParams, grid: RadialGrid, zeta: Field) -> np.ndarray:
    """Nodewise ``f(zeta) - beta**2``."""
    return f_raw(mp.alpha, mp.mu, mp.nu, zeta.values) - beta_r(mp, grid.nodes) ** 2


# -- random optimality sampling ----------------------------------------------------

def smooth_bump(grid: RadialGrid, rng: np.random.Generator, modes: int = 4) -> np.ndarray:
    """Random trigonometric combination of the first ``modes`` sine modes."""
    x = (grid.nodes - grid.a) / (grid.b - grid.a)
    k = np.arange(1, modes + 1)
    coef = rng.standard_normal(modes) / k
    phase = rng.uniform(0.0, 2.0 * math.pi, modes)
    return np.sin(math.pi * k[None, :] * x[:, None] + phase[None, :]) @ coef


def sample_primal_gaps(mp: MaterialParams, grid: RadialGrid, v_bar: Field, count: int,
                       rng: np.random.Generator, max_norm: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """``P_hat(v_bar + d) - P_hat(v_bar)`` for random smooth ``d`` with ``||d||_4 <= max_norm``.

    Returns the gaps and the matching quadrature error estimates.
    """
    base = grid.integrate(p_hat_integrand(mp, grid.nodes, v_bar.values))
    gaps, errs = np.empty(count), np.empty(count)
    for i in range(count):
        d = smooth_bump(grid, rng)
        d *= rng.uniform(0.0, max_norm) / max(lp_norm(Field(d), grid), 1e-300)
        trial = grid.integrate(p_hat_integrand(mp, grid.nodes, v_bar.values + d))
        gaps[i] = trial.value - base.value
        errs[i] = trial.error + base.error
    return gaps, errs


def sample_dual_gaps(mp: MaterialParams, grid: RadialGrid, zeta_bar: Field, count: int,
                     rng: np.random.Generator, margin: float = 0.01,
                     amplitude: float = 2.0) -> tuple[np.ndarray, np.ndarray]:
    """``P_d(zeta_bar) - P_d(zeta)`` for random admissible ``zeta > -mu``.

    ``zeta = max(zeta_bar + bump, -mu + margin)``, which keeps
    ``1/(zeta + mu)`` bounded and hence ``zeta`` inside the domain of the
    dual functional.
    """
    base = p_dual(mp, grid, zeta_bar)
    gaps, errs = np.empty(count), np.empty(count)
    for i in range(count):
        bump = smooth_bump(grid, rng)
        bump *= rng.uniform(0.0, amplitude) / max(float(np.max(np.abs(bump))), 1e-300)
        z = np.maximum(zeta_bar.values + bump, -mp.mu + margin)
        trial = p_dual(mp, grid, Field(z))
        gaps[i] = base.value - trial.value
        errs[i] = trial.error + base.error
    return gaps, errs
