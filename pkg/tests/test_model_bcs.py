import math

import numpy as np
import pytest
from scipy import integrate

from bcsgap.errors import DomainError
from bcsgap.model_bcs import (
    ModelParams,
    delta_model,
    delta_ode_rhs,
    delta_ratio_curve,
    difference_integral,
    g0_primitive,
    gap_integral,
    tc_model,
)
from bcsgap.universal import c_univ, f_bcs

# Brent on T with scipy quadrature of tanh(e/2T)/e (tests/oracles.py)
SHELL_TC_03 = 0.04044952519089007


def params(lam):
    return ModelParams(lam, 1.0, 2.0)


def test_params_validation():
    with pytest.raises(DomainError):
        ModelParams(0.0, 1.0, 2.0)
    with pytest.raises(DomainError):
        ModelParams(0.3, 2.0, 1.0)


def test_g0_primitive_against_quad():
    for X in (0.1, 3.0, 39.0, 41.0, 500.0):
        ref, _ = integrate.quad(lambda x: math.tanh(x / 2) / x, 0, X, limit=400, epsabs=1e-14,
                                epsrel=1e-14)
        assert abs(g0_primitive(X) - ref) < 1e-12 * max(1.0, ref)


def test_tc_oracle_and_trend():
    assert abs(tc_model(params(0.3)) / SHELL_TC_03 - 1) < 1e-10
    assert tc_model(params(0.35)) > tc_model(params(0.3))
    pre = [tc_model(params(l)) * math.exp(1 / l) for l in (0.3, 0.25, 0.2)]
    assert (max(pre) - min(pre)) / min(pre) < 0.1


def test_delta_model():
    p = params(0.3)
    tc = tc_model(p)
    assert delta_model(p, 0.999 * tc, tc=tc) / tc < 0.2
    assert abs(delta_model(p, 0.0, tc=tc) / (1.0 / math.sinh(1 / 0.3)) - 1) < 1e-10
    vals = [delta_model(p, f * tc, tc=tc) for f in (0.0, 0.3, 0.6, 0.9)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    with pytest.raises(DomainError):
        delta_model(p, tc, tc=tc)
    # root satisfies the scalar equation
    T = 0.5 * tc
    assert abs(gap_integral(p, delta_model(p, T, tc=tc), T) - 1 / 0.3) < 1e-10


def test_ratio_curve_endpoints():
    p = params(0.25)
    sol = delta_ratio_curve(p, [0.0, 0.5, 1.0])
    assert sol.delta_values[0] == 0.0
    d1 = (1.0 / math.sinh(1 / 0.25)) / sol.tc
    assert abs(sol.delta_values[-1] / d1 - 1) < 1e-10
    assert abs(sol.delta_values[-1] / (delta_model(p, 0.0, tc=sol.tc) / sol.tc) - 1) < 1e-6
    assert all(abs(r) < 1e-10 for r in sol.residuals)


def test_ratio_curve_universality_at_02():
    sol = delta_ratio_curve(params(0.2), np.linspace(0, 1, 21))
    dev = max(abs(d / f_bcs(h) - 1) for h, d in zip(sol.h_values, sol.delta_values) if h > 0)
    assert dev <= 0.05
    assert all(b >= a for a, b in zip(sol.delta_values, sol.delta_values[1:]))


def test_universality_deviation_nonincreasing():
    hs = np.linspace(0.05, 1, 20)
    devs = []
    for lam in (0.30, 0.25, 0.20, 0.15):
        sol = delta_ratio_curve(params(lam), hs)
        devs.append(max(abs(d / f_bcs(h) - 1) for h, d in zip(hs, sol.delta_values)))
    assert all(b <= a for a, b in zip(devs, devs[1:]))


@pytest.mark.parametrize("lam", [0.3, 0.25, 0.2])
def test_linear_bound(lam):
    sol = delta_ratio_curve(params(lam), np.linspace(0, 1, 21))
    assert all(d <= 2 * c_univ() * h + 1e-15 for h, d in zip(sol.h_values, sol.delta_values))


@pytest.mark.parametrize("lam", [0.3, 0.25, 0.2])
def test_tail_outside_shell_is_small(lam):
    p = params(lam)
    tc = tc_model(p)
    X = p.debye / tc
    for h in (0.2, 0.6, 1.0):
        d = delta_ratio_curve(p, [h], tc=tc).delta_values[0]
        tail = difference_integral(d, h, 10 * X, X)
        assert abs(tail) <= 10 * h * h * math.exp(-2 / lam)


def test_ode_rhs():
    p = params(0.3)
    tc = tc_model(p)
    step = 1e-4
    d = delta_ratio_curve(p, [0.5 - step, 0.5, 0.5 + step], tc=tc).delta_values
    fd = (d[2] - d[0]) / (2 * step)
    assert abs(delta_ode_rhs(0.5, d[1], p, tc) / fd - 1) < 1e-3
    for h in (0.1, 0.4, 0.8):
        for frac in (0.3, 0.7, 1.0):
            assert delta_ode_rhs(h, frac * c_univ() * h, p, tc) > 0
    h = 1e-3
    assert abs(delta_ode_rhs(h, c_univ() * h, p, tc) / c_univ() - 1) < 0.15
    with pytest.raises(DomainError):
        delta_ode_rhs(0.5, 0.0, p, tc)
