"""Separable shell model: a constant attraction inside |p^2 - mu| < T_D.

Within the shell the gap is a single number, so the temperature equation,
the zero-temperature gap and the reduced ratio delta(h) = Delta / T_c are all
scalar root problems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._kernels import _universal_term_np
from .errors import DomainError
from .numerics import find_root, g0, g1_over_z, integrate_finite
from .universal import c_univ


@dataclass(frozen=True)
class ModelParams:
    lambda_bcs: float
    debye: float
    mu: float

    def __post_init__(self):
        if not self.lambda_bcs > 0:
            raise DomainError("lambda_bcs must be positive")
        if not 0 < self.debye < self.mu:
            raise DomainError("need 0 < debye < mu")


@dataclass(frozen=True)
class ModelSolution:
    params: ModelParams
    tc: float
    h_values: tuple
    delta_values: tuple
    residuals: tuple


_SWITCH = 40.0


def _edges(lo, hi):
    out = []
    x = lo
    while x < hi:
        out.append(x)
        x *= 2.0
    return out


@lru_cache(maxsize=1)
def _g0_head():
    return integrate_finite(g0, 0.0, _SWITCH, 1e-15, points=_edges(0.5, _SWITCH)).value


def g0_primitive(X):
    """int_0^X tanh(x/2)/x dx; beyond x = 40 the tanh is 1 to double precision."""
    if X <= 0:
        return 0.0
    if X <= _SWITCH:
        return integrate_finite(g0, 0.0, X, 1e-15, points=_edges(0.5, X)).value
    return _g0_head() + math.log(X / _SWITCH)


def tc_model(params, tol=1e-13):
    """Critical temperature: int_0^{T_D} tanh(e / 2T) / e de = 1 / lambda."""
    target = 1.0 / params.lambda_bcs
    TD = params.debye

    def f(log_t):
        return g0_primitive(TD / math.exp(log_t)) - target

    lo = math.log(TD * 1e-12)
    hi = math.log(TD * 10.0)
    res = find_root(f, lo, hi, xtol=tol, ftol=0.0)
    return math.exp(res.root)


def gap_integral(params, delta, T):
    """int_0^{T_D} tanh(E / 2T) / E de with E = sqrt(e^2 + delta^2)."""
    TD = params.debye
    scale = math.sqrt(delta * delta + math.pi ** 2 * T * T)
    if scale == 0.0:
        return math.inf
    if T == 0:
        def f(e):
            return 1.0 / np.hypot(e, delta)
    else:
        def f(e):
            E = np.hypot(e, delta)
            return g0(E / T) / T
    return integrate_finite(f, 0.0, TD, 1e-13, points=_edges(0.25 * scale, TD)).value


def delta_model(params, T, tol=1e-13, tc=None):
    """Gap at temperature T in [0, T_c)."""
    if T < 0:
        raise DomainError("temperature must be >= 0")
    tc = tc_model(params) if tc is None else tc
    if T >= tc:
        raise DomainError(f"T = {T} is not below T_c = {tc}; the gap vanishes")
    target = 1.0 / params.lambda_bcs
    d0 = params.debye / math.sinh(target)

    def f(d):
        if d == 0.0:
            return g0_primitive(params.debye / T) - target
        return gap_integral(params, d, T) - target

    lo = 0.0 if T > 0 else 1e-3 * d0
    return find_root(f, lo, 1.01 * d0, xtol=tol * d0, ftol=0.0).root


def difference_integral(delta, h, upper, lower=0.0):
    """int_lower^upper [tanh(E / 2 tau) / E - tanh(x / 2) / x] dx, tau = 1 - h^2."""
    tau = 1.0 - h * h
    if delta == 0.0 and tau == 0.0:
        return math.inf
    if upper <= lower:
        return 0.0

    def f(x):
        return _universal_term_np(x, delta, tau)

    scale = math.sqrt(delta * delta + math.pi ** 2 * tau * tau)
    pts = _edges(max(0.25 * min(1.0, scale), lower if lower > 0 else 0.0), upper)
    return integrate_finite(f, lower, upper, 1e-13, points=pts).value


def _delta_at(h, X, tol):
    if h == 0.0:
        return 0.0, 0.0
    lo = 1e-6 if h == 1.0 else 0.0

    def f(d):
        return difference_integral(d, h, X)

    hi = 4.0 * c_univ()
    d = find_root(f, lo, hi, xtol=tol, ftol=0.0).root
    return d, f(d)


def delta_ratio_curve(params, h_grid, tol=1e-12, tc=None):
    """delta(h) from the subtracted gap equation on [0, T_D / T_c]."""
    tc = tc_model(params) if tc is None else tc
    X = params.debye / tc
    hs, ds, rs = [], [], []
    for h in h_grid:
        h = float(h)
        if not 0.0 <= h <= 1.0:
            raise DomainError(f"h must lie in [0, 1], got {h}")
        d, r = _delta_at(h, X, tol)
        hs.append(h)
        ds.append(d)
        rs.append(r)
    return ModelSolution(params, tc, tuple(hs), tuple(ds), tuple(rs))


def delta_ode_rhs(h, delta, params, tc=None):
    """d delta / dh from implicit differentiation of the subtracted equation."""
    if not delta > 0:
        raise DomainError("the right-hand side is singular at delta = 0")
    if not 0.0 < h < 1.0:
        raise DomainError("h must lie strictly inside (0, 1)")
    tc = tc_model(params) if tc is None else tc
    X = params.debye / tc
    tau = 1.0 - h * h

    def num(x):
        E = np.sqrt(x * x + delta * delta)
        q = np.exp(-(x * x / (E + delta)) / tau)
        return 4.0 * q / (1.0 + np.exp(-E / tau)) ** 2

    def den(x):
        return g1_over_z(np.sqrt(x * x + delta * delta) / tau)

    scale = math.sqrt(delta * delta + math.pi ** 2 * tau * tau)
    pts = _edges(0.25 * min(1.0, scale), X)
    n0 = integrate_finite(num, 0.0, X, 1e-6, points=pts).value
    d0 = integrate_finite(den, 0.0, X, 1e-6, points=pts).value
    n = integrate_finite(num, 0.0, X, 1e-12 * n0, points=pts).value
    d = integrate_finite(den, 0.0, X, 1e-12 * d0, points=pts).value
    return tau * h / delta * math.exp(-delta / tau) * n / d
