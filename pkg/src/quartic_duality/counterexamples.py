"""Numerical witnesses that the stronger extremality claims fail.

* :func:`blowup_report` -- dual fields pressed against the pole from below
  drive the dual functional to ``+inf`` although they stay inside
  ``(-nu*alpha**2/2, -mu)``.
* :func:`mix_perturbation_report` -- swapping the middle solution for the
  global one on ``[a, a+eps]`` lowers the energy by an amount that stays
  positive while the swap shrinks in L4, so the middle solution is no
  local minimiser.
* :func:`spike_perturbation_report` -- a tall constant spike on
  ``[a, a+eps]`` raises the energy above the lower solution, so that one is
  no local maximiser.
* :func:`domgresit_witness` -- a dual field that never touches ``-mu``
  yet makes ``beta**2/(zeta + mu)`` non-integrable.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .dual import Branch, critical_points
from .errors import GammaOutOfRange, WrongRegime
from .quadrature import RadialGrid
from .radial import (
    Field,
    MaterialParams,
    ProbeResult,
    RadialRegime,
    a1_membership_probe,
    beta_r,
    p_dual,
    p_hat_integrand,
    regime_check,
    solve_pointwise,
)
from .scalar import eval_p

DEFAULT_N_LIST = (4, 16, 64, 256, 1024)


# -- blow-up of the dual functional ---------------------------------------------

def gamma_bound(mp: MaterialParams) -> float:
    return (0.5 * mp.nu * mp.alpha**2 - mp.mu) / (mp.b - mp.a)


def blowup_rule(mp: MaterialParams, gamma: float, n: int):
    if not 0.0 < gamma < gamma_bound(mp):
        raise GammaOutOfRange(f"gamma must lie in (0, {gamma_bound(mp)!r}), got {gamma!r}")
    if n < 1:
        raise ValueError("n must be >= 1")
    kink = mp.a + (mp.b - mp.a) / n
    floor = -mp.mu - gamma * (mp.b - mp.a) / n

    def zeta(r):
        r = np.asarray(r, dtype=float)
        return np.where(r >= kink, -mp.mu - gamma * (r - mp.a), floor)

    return zeta


def build_blowup_sequence(mp: MaterialParams, gamma: float, n: int, grid: RadialGrid) -> Field:
    """``-mu - gamma*(r - a)`` beyond ``a + (b-a)/n``, constant before it."""
    return Field(blowup_rule(mp, gamma, n)(grid.nodes))


def blowup_grid(mp: MaterialParams, n: int, ramp_nodes: int = 2049, flat_nodes: int = 33) -> RadialGrid:
    """Simpson grid with a node on the kink and log spacing along the ramp.

    The ramp integrand behaves like ``1/(r - a)``, which is smooth in
    ``log(r - a)``; spacing the nodes geometrically keeps the rule accurate
    for every ``n``.
    """
    if n == 1:
        return RadialGrid.uniform(mp.a, mp.b, ramp_nodes)
    kink = mp.a + (mp.b - mp.a) / n
    flat = np.linspace(mp.a, kink, flat_nodes)
    ramp = mp.a + (kink - mp.a) * float(n) ** np.linspace(0.0, 1.0, ramp_nodes)
    ramp[-1] = mp.b
    return RadialGrid(np.concatenate([flat, ramp[1:]]))


@dataclass
class BlowupReport:
    gamma: float
    n_list: list[int]
    values: list[float]
    errors: list[float]
    slope: float
    slope_lower_bound: float
    slope_near_pole: float
    in_band: bool

    @property
    def increasing(self) -> bool:
        return bool(np.all(np.diff(self.values) > 0))

    def as_dict(self) -> dict:
        out = asdict(self)
        out["increasing"] = self.increasing
        return out

    def ladder_rows(self):
        return [(n, v, e) for n, v, e in zip(self.n_list, self.values, self.errors)]


def blowup_report(mp: MaterialParams, gamma: float | None = None,
                  n_list=DEFAULT_N_LIST, ramp_nodes: int = 2049) -> BlowupReport:
    """Dual functional along the blow-up sequence.

    ``slope`` is the least-squares slope of the values against ``log n``.
    ``slope_near_pole = pi*a*beta(a)**2/gamma`` is the leading-order growth
    from the ``1/(r - a)`` singularity; ``slope_lower_bound`` is the cruder
    ``min beta**2 / (2*gamma)``.
    """
    if gamma is None:
        gamma = 0.5 * gamma_bound(mp)
    n_list = [int(n) for n in n_list]
    values, errors, in_band = [], [], True
    lower = -0.5 * mp.nu * mp.alpha**2
    for n in n_list:
        grid = blowup_grid(mp, n, ramp_nodes)
        zeta = build_blowup_sequence(mp, gamma, n, grid)
        in_band &= bool(np.all((zeta.values > lower) & (zeta.values < -mp.mu)))
        res = p_dual(mp, grid, zeta)
        values.append(res.value)
        errors.append(float(res.error))
    slope = float(np.polyfit(np.log(n_list), values, 1)[0]) if len(n_list) > 1 else math.nan
    beta_a, beta_b = beta_r(mp, mp.a), beta_r(mp, mp.b)
    beta2_min = 0.0 if beta_a * beta_b <= 0 else min(beta_a**2, beta_b**2)
    return BlowupReport(
        gamma=gamma,
        n_list=n_list,
        values=values,
        errors=errors,
        slope=slope,
        slope_lower_bound=beta2_min / (2.0 * gamma),
        slope_near_pole=math.pi * mp.a * beta_a**2 / gamma,
        in_band=in_band,
    )


# -- local perturbations of the primal solutions -----------------------------------

@dataclass
class PerturbationRow:
    eps: float
    gap: float          # P_hat(base) - P_hat(perturbed)
    gap_error: float
    norm: float         # ||perturbed - base||_4
    norm_bound: float   # eps**(1/4) * sup |difference|
    p_hat_base: float
    p_hat_perturbed: float

    @property
    def resolved(self) -> bool:
        return abs(self.gap) >= 10.0 * self.gap_error


@dataclass
class PerturbationReport:
    kind: str
    rows: list[PerturbationRow]
    sup_difference: float
    extras: dict = field(default_factory=dict)

    @property
    def expected_sign(self) -> int:
        return 1 if self.kind == "mix" else -1

    @property
    def signs_ok(self) -> bool:
        return all(row.gap * self.expected_sign > 0 for row in self.rows)

    @property
    def resolved(self) -> bool:
        return all(row.resolved for row in self.rows)

    @property
    def norms_bounded(self) -> bool:
        # 1e-9 relative slack covers quadrature of |.|**4
        return all(row.norm <= row.norm_bound * (1 + 1e-9) for row in self.rows)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "rows": [asdict(r) | {"resolved": r.resolved} for r in self.rows],
            "sup_difference": self.sup_difference,
            "signs_ok": self.signs_ok,
            "resolved": self.resolved,
            "norms_bounded": self.norms_bounded,
            **self.extras,
        }

    def ladder_rows(self):
        return [(row.eps, row.gap, row.norm) for row in self.rows]


def _require_case_b(mp: MaterialParams) -> None:
    regime = regime_check(mp)
    if regime is not RadialRegime.CASE_B:
        raise WrongRegime(f"needs CaseB (0 < beta**2 < eta on [a, b]), got {regime.value}")


def _check_eps(mp: MaterialParams, eps_list) -> list[float]:
    eps_list = [float(e) for e in eps_list]
    for eps in eps_list:
        if not 0.0 < eps <= mp.b - mp.a:
            raise ValueError(f"eps must lie in (0, b - a], got {eps!r}")
    return eps_list


def _split(mp: MaterialParams, eps: float, n_left: int, n_right: int):
    left = RadialGrid.uniform(mp.a, mp.a + eps, n_left)
    right = None
    if mp.a + eps < mp.b:
        right = RadialGrid.uniform(mp.a + eps, mp.b, n_right)
    return left, right


def _perturbation_row(mp, eps, left, right, base_left, pert_left, base_right) -> PerturbationRow:
    r = left.nodes
    base_int = p_hat_integrand(mp, r, base_left)
    pert_int = p_hat_integrand(mp, r, pert_left)
    gap = left.integrate(base_int - pert_int)
    tail = 0.0 if right is None else right.integrate(p_hat_integrand(mp, right.nodes, base_right)).value
    norm = max(0.0, left.integrate((pert_left - base_left) ** 4).value) ** 0.25
    return PerturbationRow(
        eps=eps,
        gap=gap.value,
        gap_error=float(gap.error),
        norm=norm,
        norm_bound=math.nan,
        p_hat_base=left.integrate(base_int).value + tail,
        p_hat_perturbed=left.integrate(pert_int).value + tail,
    )


def _right_field(mp, right, branch):
    return None if right is None else solve_pointwise(mp, right, branch)[1].values


def mix_perturbation_report(mp: MaterialParams, eps_list, n_left: int = 513,
                            n_right: int = 2049, n_sup: int = 2049) -> PerturbationReport:
    """Replace the middle solution by the global one on ``[a, a+eps]``.

    Each row's ``gap`` must be positive (the perturbed field has lower
    energy) while ``norm`` shrinks like ``eps**(1/4)``.
    """
    _require_case_b(mp)
    eps_list = _check_eps(mp, eps_list)
    full = mp.grid(n_sup)
    sup = float(np.max(np.abs(solve_pointwise(mp, full, Branch.UPPER)[1].values
                              - solve_pointwise(mp, full, Branch.MIDDLE)[1].values)))
    rows = []
    for eps in eps_list:
        left, right = _split(mp, eps, n_left, n_right)
        v1 = solve_pointwise(mp, left, Branch.UPPER)[1].values
        v2 = solve_pointwise(mp, left, Branch.MIDDLE)[1].values
        row = _perturbation_row(mp, eps, left, right, v2, v1, _right_field(mp, right, Branch.MIDDLE))
        row.norm_bound = eps**0.25 * sup
        rows.append(row)
    return PerturbationReport("mix", rows, sup)


def spike_height(mp: MaterialParams, v3: np.ndarray, grid: RadialGrid) -> dict:
    """Pick a constant ``y_bar`` whose energy beats the lower solution everywhere.

    ``M`` is the largest pointwise energy of the lower solution and
    ``p_m`` the energy with load ``m = max |beta|``, a lower bound for every
    pointwise energy on ``y >= 0``.  Beyond its largest critical point
    ``p_m`` increases, so bisection there yields ``y0`` with ``p_m > M`` on
    ``[y0, inf)``.  The candidate ``2*max(y0/a, max|v3|)`` is then checked
    against every node directly and doubled until the check passes.
    """
    r = grid.nodes
    beta = beta_r(mp, r)
    pointwise = p_hat_integrand(mp, r, v3) / (2.0 * math.pi * r)
    M = float(np.max(pointwise))
    m = float(np.max(np.abs(beta)))
    pm = mp.scalar(m)
    lo = max(0.0, max(cp.u_bar for cp in critical_points(pm)))
    if eval_p(pm, lo) > M:
        y0 = lo
    else:
        hi = max(1.0, 2.0 * lo)
        while eval_p(pm, hi) <= M:
            hi *= 2.0
        while hi - lo > 1e-12 * hi:
            mid = 0.5 * (lo + hi)
            if eval_p(pm, mid) > M:
                hi = mid
            else:
                lo = mid
        y0 = hi
    y_bar = 2.0 * max(y0 / mp.a, float(np.max(np.abs(v3))))
    doublings = 0
    while not np.all(p_hat_integrand(mp, r, np.full_like(r, y_bar)) / (2.0 * math.pi * r) > M):
        y_bar *= 2.0
        doublings += 1
    return {"M": M, "m": m, "y0": y0, "y_bar": y_bar, "doublings": doublings}


def spike_perturbation_report(mp: MaterialParams, eps_list, y_bar_scale: float = 1.0,
                              n_left: int = 513, n_right: int = 2049,
                              n_sup: int = 2049) -> PerturbationReport:
    """Replace the lower solution by a constant spike on ``[a, a+eps]``.

    Each row's ``gap`` must be negative (the spike has higher energy) while
    ``norm`` shrinks like ``eps**(1/4)``.  ``y_bar_scale`` multiplies the
    certified spike height.
    """
    _require_case_b(mp)
    eps_list = _check_eps(mp, eps_list)
    full = mp.grid(n_sup)
    v3_full = solve_pointwise(mp, full, Branch.LOWER)[1].values
    cert = spike_height(mp, v3_full, full)
    y_bar = cert["y_bar"] * y_bar_scale
    sup = float(np.max(np.abs(v3_full - y_bar)))
    rows = []
    for eps in eps_list:
        left, right = _split(mp, eps, n_left, n_right)
        v3 = solve_pointwise(mp, left, Branch.LOWER)[1].values
        row = _perturbation_row(mp, eps, left, right, v3, np.full_like(v3, y_bar),
                                _right_field(mp, right, Branch.LOWER))
        row.norm_bound = eps**0.25 * sup
        rows.append(row)
    return PerturbationReport("spike", rows, sup, {"certificate": cert | {"y_bar_used": y_bar}})


# -- fields with a non-integrable pole term ------------------------------------

def _witness_interval(mp: MaterialParams, pieces: int = 8) -> tuple[float, float, float]:
    edges = np.linspace(mp.a, mp.b, pieces + 1)
    best = None
    for c, d in zip(edges[1:-2], edges[2:-1]):
        bc, bd = beta_r(mp, c), beta_r(mp, d)
        if bc * bd <= 0:
            continue
        floor = min(bc * bc, bd * bd)
        if best is None or floor > best[2]:
            best = (float(c), float(d), float(floor))
    if best is None:
        raise ValueError("beta vanishes on every interior piece")
    return best


def witness_rule(mp: MaterialParams, c: float, d: float, lift: float = 0.0):
    """``-mu + (r - c) + lift`` on ``(c, d)``, ``1 - mu`` elsewhere."""
    def zeta(r):
        r = np.asarray(r, dtype=float)
        return np.where((r > c) & (r < d), -mp.mu + (r - c) + lift, 1.0 - mp.mu)

    return zeta


def band_rule(mp: MaterialParams):
    """``-mu + ((rho + mu)/eta) * (r - a) * beta**2``, inside ``(rho, -mu)`` in CaseB."""
    scale = (mp.rho + mp.mu) / mp.eta

    def zeta(r):
        r = np.asarray(r, dtype=float)
        return -mp.mu + scale * (r - mp.a) * beta_r(mp, r) ** 2

    return zeta


@dataclass
class WitnessReport:
    c: float
    d: float
    gamma0: float
    witness: ProbeResult
    control: ProbeResult

    def as_dict(self) -> dict:
        return {"c": self.c, "d": self.d, "gamma0": self.gamma0,
                "witness": self.witness.as_dict(), "control": self.control.as_dict()}


def domgresit_witness(mp: MaterialParams, levels: int = 6, lift: float = 0.1) -> WitnessReport:
    """Probe the non-integrable witness field and a lifted, bounded control."""
    c, d, gamma0 = _witness_interval(mp)
    witness = a1_membership_probe(mp, witness_rule(mp, c, d), levels, breakpoints=(c, d))
    control = a1_membership_probe(mp, witness_rule(mp, c, d, lift), levels, breakpoints=(c, d))
    return WitnessReport(c, d, gamma0, witness, control)
