"""Brute-force ground truth for the analytic modules.

Nothing here calls the dual solver or the closed-form derivatives: minima
are found by grid scans refined with golden-section search, derivatives
by central differences, roots of the dual cubic by the trigonometric /
Cardano formulas on its expanded coefficients.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import IntervalContainsPole
from .scalar import ScalarParams, eval_h, eval_p, eval_xi

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def default_box(params: ScalarParams) -> tuple[float, float]:
    half = 10.0 * max(1.0, params.alpha)
    return -half, half


def golden_section(fn: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10) -> float:
    """Minimiser of a unimodal ``fn`` on ``[lo, hi]``, to bracket width ``tol``."""
    c = hi - INVPHI * (hi - lo)
    d = lo + INVPHI * (hi - lo)
    fc, fd = fn(c), fn(d)
    while hi - lo > tol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - INVPHI * (hi - lo)
            fc = fn(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INVPHI * (hi - lo)
            fd = fn(d)
        if c >= d:  # bracket below float resolution
            break
    return 0.5 * (lo + hi)


def _discrete_minima(values: np.ndarray) -> np.ndarray:
    inner = values[1:-1]
    mask = (inner <= values[:-2]) & (inner <= values[2:])
    return np.flatnonzero(mask) + 1


def brute_min_p(params: ScalarParams, y_lo: float | None = None, y_hi: float | None = None,
                n: int = 10**6, max_candidates: int = 4) -> tuple[float, float]:
    """Grid minimum of the primal energy, refined by golden-section search.

    Interior discrete minima (best ``max_candidates`` of them) are refined
    on their two neighbouring cells and the lowest refined value wins.  A
    minimum sitting on the box boundary has no bracket and is returned
    unrefined.
    """
    if y_lo is None or y_hi is None:
        y_lo, y_hi = default_box(params)
    if not y_lo < y_hi:
        raise ValueError("need y_lo < y_hi")
    if n < 3:
        raise ValueError("need n >= 3")
    ys = np.linspace(y_lo, y_hi, n)
    ps = eval_p(params, ys)

    best = int(np.argmin(ps))
    y_star, p_star = float(ys[best]), float(ps[best])
    candidates = _discrete_minima(ps)
    if candidates.size:
        candidates = candidates[np.argsort(ps[candidates])[:max_candidates]]
    for i in candidates:
        y = float(golden_section(lambda t: eval_p(params, t), ys[i - 1], ys[i + 1]))
        p = float(eval_p(params, y))
        if p <= p_star:
            y_star, p_star = y, p
    return y_star, p_star


def grid_extrema_h(params: ScalarParams, lo: float, hi: float, n: int = 20001) -> list[tuple[float, float, str]]:
    """Local extrema of the dual function on ``[lo, hi]``.

    Detected from sign changes of the discrete differences, then refined by
    golden-section search.  Returns ``(sigma, h(sigma), kind)`` triples with
    ``kind`` in ``{"LocalMax", "LocalMin"}``, ordered by ``sigma``.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    if params.tau != 0.0 and lo <= -params.mu <= hi:
        raise IntervalContainsPole(f"[{lo!r}, {hi!r}] contains the pole -mu = {-params.mu!r}")
    sig = np.linspace(lo, hi, n)
    hs = eval_h(params, sig)
    d = np.sign(np.diff(hs))
    out = []
    for i in range(1, n - 1):
        if d[i - 1] > 0 and d[i] < 0:
            s = float(golden_section(lambda t: -eval_h(params, t), sig[i - 1], sig[i + 1]))
            out.append((s, float(eval_h(params, s)), "LocalMax"))
        elif d[i - 1] < 0 and d[i] > 0:
            s = float(golden_section(lambda t: eval_h(params, t), sig[i - 1], sig[i + 1]))
            out.append((s, float(eval_h(params, s)), "LocalMin"))
    return out


def fd_derivative(fn: Callable[[float], float], x: float, order: int = 1, h: float = 1e-5) -> float:
    """Central finite difference of first or second order."""
    if h <= 0:
        raise ValueError("step must be positive")
    if order == 1:
        return (fn(x + h) - fn(x - h)) / (2.0 * h)
    if order == 2:
        return (fn(x + h) - 2.0 * fn(x) + fn(x - h)) / (h * h)
    raise ValueError(f"order must be 1 or 2, got {order!r}")


def scan_xi_saddle(params: ScalarParams, cp, half_width: float = 5.0, n: int = 201) -> bool:
    """Check ``xi(u, s_bar) >= xi(u_bar, s_bar) >= xi(u_bar, s)`` on an n x n box.

    The box is ``[u_bar +- half_width] x [s_bar +- half_width]`` with the
    dual axis clipped at ``-mu``.  Comparisons allow a rounding slack of
    ``1e-12 * max(1, max |xi|)`` so exact ties at the centre row/column
    are not flagged.
    """
    if not cp.sigma_bar > -params.mu:
        raise ValueError("saddle scan needs a critical point with sigma_bar > -mu")
    u_bar, s_bar = cp.u_bar, cp.sigma_bar
    us = np.linspace(u_bar - half_width, u_bar + half_width, n)
    ss = np.linspace(max(s_bar - half_width, -params.mu), s_bar + half_width, n)
    U, S = np.meshgrid(us, ss, indexing="ij")

    centre = float(eval_xi(params, u_bar, s_bar))
    along_u = eval_xi(params, U, s_bar)   # varies with u only
    along_s = eval_xi(params, u_bar, S)   # varies with s only
    slack = 1e-12 * max(1.0, abs(centre), float(np.max(np.abs(along_u))), float(np.max(np.abs(along_s))))
    return bool(np.all(along_u >= centre - slack) and np.all(centre >= along_s - slack))


# -- independent roots of the dual cubic ---------------------------------------

def cubic_real_roots(a3: float, a2: float, a1: float, a0: float) -> list[float]:
    """Real roots of ``a3 x^3 + a2 x^2 + a1 x + a0``, descending.

    Depressed-cubic reduction followed by Viete's trigonometric form
    (three real roots) or Cardano's formula (one real root), then a few
    Newton steps on the original coefficients that are kept only while
    they shrink the residual (the closed forms lose digits to
    cancellation).  Repeated roots are returned once per multiplicity.
    """
    if a3 == 0:
        raise ValueError("leading coefficient must be non-zero")
    b, c, d = a2 / a3, a1 / a3, a0 / a3
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    scale = max(1.0, abs(q / 2.0) ** 2, abs(p / 3.0) ** 3)
    if p == 0.0 and q == 0.0:
        roots = [0.0, 0.0, 0.0]
    elif disc > 1e-14 * scale:
        sq = math.sqrt(disc)
        roots = [math.copysign(abs(-q / 2.0 + sq) ** (1 / 3), -q / 2.0 + sq)
                 + math.copysign(abs(-q / 2.0 - sq) ** (1 / 3), -q / 2.0 - sq)]
    else:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        roots = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)]
    return sorted((_polish(a3, a2, a1, a0, r - shift) for r in roots), reverse=True)


def _polish(a3, a2, a1, a0, x, steps=4):
    value = lambda t: ((a3 * t + a2) * t + a1) * t + a0  # noqa: E731
    best = abs(value(x))
    for _ in range(steps):
        slope = (3.0 * a3 * x + 2.0 * a2) * x + a1
        if slope == 0.0 or best == 0.0:
            break
        x_new = x - value(x) / slope
        res = abs(value(x_new))
        if res >= best:
            break
        x, best = x_new, res
    return x


def dual_cubic_roots(params: ScalarParams) -> list[float]:
    """Roots of the expanded dual cubic ``f(s) - tau**2``."""
    a, mu, nu, tau = params.alpha, params.mu, params.nu, params.tau
    return cubic_real_roots(
        2.0 / nu,
        a * a + 4.0 * mu / nu,
        2.0 * a * a * mu + 2.0 * mu * mu / nu,
        a * a * mu * mu - tau * tau,
    )


def p_expanded(params: ScalarParams, y):
    """Primal energy from its expanded monomial form (test oracle only)."""
    a, mu, nu, tau = params.alpha, params.mu, params.nu, params.tau
    return (nu / 8.0) * y**4 - 0.5 * nu * a * y**3 + (0.5 * nu * a * a + 0.5 * mu) * y**2 - (tau + a * mu) * y
