"""Closed-form scalar functions of the pointwise problem.

Notation used throughout the package::

    p(y)      = mu*y**2/2 + nu*(y**2/2 - alpha*y)**2/2 - (tau + alpha*mu)*y
    h(s)      = -(tau**2/(s + mu) + 2*alpha*tau + alpha**2*(s + mu) + s**2/nu)/2
    f(s)      = (2*s/nu + alpha**2) * (mu + s)**2
    xi(u, s)  = u**2*(s + mu)/2 - alpha*u*s - s**2/(2*nu) - (tau + alpha*mu)*u

``p`` is the primal double-well energy, ``h`` its dual, ``xi`` the total
complementary function that links them, and ``f(s) = tau**2`` is the dual
algebraic equation whose real roots give every critical point of ``p``.

All evaluators accept scalars or numpy arrays for the free variable; the
module-level ``*_raw`` helpers additionally broadcast over the load ``tau``,
which the radial layer relies on.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import NotDoubleWell, PoleAtMinusMu

#: relative half-width of the band in which tau**2 == eta is declared
CRITICAL_RTOL = 1e-12


@dataclass(frozen=True)
class ScalarParams:
    alpha: float
    mu: float
    nu: float
    tau: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "mu", "nu", "tau"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("alpha", "mu", "nu"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
        if not math.isfinite(self.tau):
            raise ValueError(f"tau must be finite, got {self.tau!r}")

    def with_tau(self, tau: float) -> "ScalarParams":
        return ScalarParams(self.alpha, self.mu, self.nu, float(tau))

    @property
    def rho(self) -> float:
        return -(self.mu + self.nu * self.alpha**2) / 3.0

    @property
    def eta(self) -> float:
        return (self.nu * self.alpha**2 - 2.0 * self.mu) ** 3 / (27.0 * self.nu)

    @property
    def kappa(self) -> float:
        """alpha**2 - 2*mu/nu; positive exactly for a double well.

        In the shifted variable ``t = s + mu`` the dual equation reads
        ``t**2 * (2*t/nu + kappa) = tau**2``.
        """
        return self.alpha**2 - 2.0 * self.mu / self.nu

    @property
    def is_double_well(self) -> bool:
        return 2.0 * self.mu < self.nu * self.alpha**2


class Regime(str, enum.Enum):
    SUPERCRITICAL = "SuperCritical"
    CRITICAL = "Critical"
    SUBCRITICAL = "SubCritical"
    ZERO_LOAD = "ZeroLoad"


@dataclass(frozen=True)
class RegimeInfo:
    rho: float
    eta: float
    regime: Regime


def classify_load(tau: float, eta: float) -> Regime:
    if tau == 0.0:
        return Regime.ZERO_LOAD
    gap = tau * tau - eta
    if abs(gap) <= CRITICAL_RTOL * max(1.0, eta):
        return Regime.CRITICAL
    return Regime.SUPERCRITICAL if gap > 0 else Regime.SUBCRITICAL


def regime_info(params: ScalarParams) -> RegimeInfo:
    """Inflection/regime thresholds and the regime of ``tau**2``.

    Raises
    ------
    NotDoubleWell
        If ``2*mu >= nu*alpha**2``; the regimes are undefined there.
    """
    if not params.is_double_well:
        raise NotDoubleWell(
            f"2*mu = {2 * params.mu!r} >= nu*alpha**2 = {params.nu * params.alpha**2!r}"
        )
    return RegimeInfo(params.rho, params.eta, classify_load(params.tau, params.eta))


# -- raw, broadcasting evaluators --------------------------------------------

def p_raw(alpha, mu, nu, tau, y):
    w = 0.5 * y * y - alpha * y
    return 0.5 * mu * y * y + 0.5 * nu * w * w - (tau + alpha * mu) * y


def dp_raw(alpha, mu, nu, tau, y):
    return mu * y + nu * (0.5 * y * y - alpha * y) * (y - alpha) - tau - alpha * mu


def d2p_raw(alpha, mu, nu, y):
    return mu + nu * (1.5 * y * y - 3.0 * alpha * y + alpha * alpha)


def h_raw(alpha, mu, nu, tau, sigma):
    """Dual function; ``tau`` may be an array, zero entries use the total form."""
    t = sigma + mu
    tau = np.asarray(tau, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        pole = np.where(tau == 0.0, 0.0, tau * tau / t)
    out = -0.5 * (pole + 2.0 * alpha * tau + alpha * alpha * t + sigma * sigma / nu)
    return out[()] if isinstance(out, np.ndarray) and out.ndim == 0 else out


def h_of_shift(params: "ScalarParams", t: float) -> float:
    """Dual function at ``s = t - mu`` given the shift ``t`` directly.

    Used at dual roots that sit closer to the pole than ``mu`` can
    resolve, where ``s + mu`` would round to zero.
    """
    tau, sigma = params.tau, t - params.mu
    pole = 0.0 if tau == 0.0 else tau * (tau / t)
    return -0.5 * (pole + 2.0 * params.alpha * tau + params.alpha**2 * t + sigma * sigma / params.nu)


def f_raw(alpha, mu, nu, sigma):
    # linear factor as (2s + nu*alpha**2)/nu so that it vanishes exactly at s = -nu*alpha**2/2
    t = mu + sigma
    return (2.0 * sigma + nu * (alpha * alpha)) / nu * t * t


def xi_raw(alpha, mu, nu, tau, u, sigma):
    return (0.5 * u * u * (sigma + mu) - alpha * u * sigma
            - 0.5 * sigma * sigma / nu - (tau + alpha * mu) * u)


# -- public evaluators --------------------------------------------------------

def eval_p(params: ScalarParams, y):
    """Primal quartic energy in its factored form."""
    return p_raw(params.alpha, params.mu, params.nu, params.tau, y)


def eval_p_deriv(params: ScalarParams, y, order: int = 1):
    if order == 1:
        return dp_raw(params.alpha, params.mu, params.nu, params.tau, y)
    if order == 2:
        return d2p_raw(params.alpha, params.mu, params.nu, y)
    raise ValueError(f"order must be 1 or 2, got {order!r}")


def eval_h(params: ScalarParams, sigma):
    """Dual function.

    For ``tau == 0`` the pole term is absent and ``h`` is defined on the
    whole line.  For ``tau != 0`` evaluation exactly at ``sigma == -mu``
    raises :class:`PoleAtMinusMu`; points merely close to the pole return
    the (large) finite value.
    """
    if params.tau != 0.0 and np.any(np.asarray(sigma) + params.mu == 0.0):
        raise PoleAtMinusMu(f"h is undefined at sigma = -mu = {-params.mu!r}")
    return h_raw(params.alpha, params.mu, params.nu, params.tau, sigma)


def eval_h_deriv(params: ScalarParams, sigma):
    """``h'(s) = -(f(s) - tau**2) / (2*(s + mu)**2)``."""
    t = sigma + params.mu
    if params.tau != 0.0 and np.any(np.asarray(t) == 0.0):
        raise PoleAtMinusMu(f"h' is undefined at sigma = -mu = {-params.mu!r}")
    tau2 = params.tau**2
    if tau2 == 0.0:
        return -0.5 * (params.alpha**2 + 2.0 * sigma / params.nu)
    return -0.5 * (eval_f(params, sigma) - tau2) / (t * t)


def eval_f(params: ScalarParams, sigma):
    return f_raw(params.alpha, params.mu, params.nu, sigma)


def eval_xi(params: ScalarParams, u, sigma):
    return xi_raw(params.alpha, params.mu, params.nu, params.tau, u, sigma)


def sigma_of_u(params: ScalarParams, u):
    """Dual variable attached to a primal point, ``nu*(u**2/2 - alpha*u)``."""
    return params.nu * (0.5 * u * u - params.alpha * u)


def u_of_sigma(params: ScalarParams, sigma):
    """Primal point attached to a dual value, ``alpha + tau/(sigma + mu)``.

    With ``tau == 0`` the quotient is taken as zero even at the pole
    (0/0 := 0), so the result is ``alpha``.
    """
    t = np.asarray(sigma, dtype=float) + params.mu
    if params.tau == 0.0:
        out = np.full_like(t, params.alpha)
        return out[()] if out.ndim == 0 else out
    if np.any(t == 0.0):
        raise PoleAtMinusMu(f"u_sigma is undefined at sigma = -mu = {-params.mu!r}")
    out = params.alpha + params.tau / t
    return out[()] if isinstance(out, np.ndarray) and out.ndim == 0 else out
