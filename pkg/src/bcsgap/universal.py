"""The universal gap-ratio curve and its angular-momentum variants.

The curve is defined through

    I(delta, h) = int_R [ tanh(E / 2 tau) / E - tanh(s / 2) / s ] ds,
    E = sqrt(s^2 + delta^2), tau = 1 - h^2,

and ``f_bcs(h)`` is the root of ``I(., h)``. At h = 1 the tanh is replaced by 1.
The two terms are integrated as one pointwise difference; each alone diverges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainError, NoSolutionError
from .numerics import (
    EULER_GAMMA,
    ZETA3,
    clebsch_gordan,
    find_root,
    gauss_legendre_on,
    g1_over_z,
    integrate_finite,
    integrate_semi_infinite,
    sph_harm_sq,
)

F_AT_ONE = math.pi * math.exp(-EULER_GAMMA)


def c_univ():
    """Slope of the universal curve at h = 0, sqrt(8 pi^2 / (7 zeta(3)))."""
    return math.sqrt(8.0 * math.pi ** 2 / (7.0 * ZETA3))


def _check(delta, h):
    if not delta >= 0:
        raise DomainError(f"delta must be >= 0, got {delta}")
    if not 0.0 <= h <= 1.0:
        raise DomainError(f"h must lie in [0, 1], got {h}")


def _geometric_edges(lo, hi):
    edges = []
    x = lo
    while x < hi:
        edges.append(x)
        x *= 2.0
    return edges


def universal_integral(delta, h, tol=1e-10, *, method="adaptive"):
    """Evaluate I(delta, h); ``method="fixed"`` uses the fast fixed rule.

    Returns +inf for delta = 0 at h = 1, where the integral diverges.
    """
    delta = float(delta)
    h = float(h)
    _check(delta, h)
    tau = 1.0 - h * h
    if method == "fixed":
        return 2.0 * float(_kernels.universal_half(delta, tau)[0])
    if method != "adaptive":
        raise DomainError(f"unknown method {method!r}")
    scale = math.sqrt(delta * delta + math.pi ** 2 * tau * tau)
    if scale == 0.0:
        return math.inf

    def f(s):
        return _kernels._universal_term_np(s, delta, tau)

    a0 = 0.25 * min(1.0, scale)
    A = 40.0 * max(1.0, delta)
    body = integrate_finite(f, 0.0, A, 0.5 * tol, points=_geometric_edges(a0, A))
    tail = integrate_semi_infinite(f, A, 0.5 * tol)
    return 2.0 * (body.value + tail.value)


def _lower_bracket(h):
    # I(0, h) = 2 log(1 / (1 - h^2)) is finite for h < 1; at h = 1 use a small
    # positive delta where I = 2 log(f(1) / delta) is safely positive.
    return 1e-6 if h == 1.0 else 0.0


def f_bcs(h, tol=1e-12):
    """Root in delta of I(delta, h); exactly 0 at h = 0."""
    h = float(h)
    _check(0.0, h)
    if h == 0.0:
        return 0.0
    tau = 1.0 - h * h

    def g(d):
        return 2.0 * float(_kernels.universal_half(d, tau)[0])

    lo = _lower_bracket(h)
    hi = max(4.0 * c_univ() * h, 2.0)
    while g(hi) > 0.0:
        if hi >= 64.0:
            raise NoSolutionError(f"no sign change of I(., {h}) below 64")
        hi = min(2.0 * hi, 64.0)
    return find_root(g, lo, hi, xtol=1e-2 * tol, ftol=0.0).root


def _scaled_integral(f, scale, reach, rel=1e-11):
    """int_0^inf f to a relative accuracy, f smooth with features near ``scale``."""
    a0 = 0.25 * scale
    A = max(reach, 4.0 * a0)
    pts = _geometric_edges(a0, A)
    rough = (integrate_finite(f, 0.0, A, 1e-6, points=pts).value
             + integrate_semi_infinite(f, A, 1e-6).value)
    tol = max(rel * abs(rough), 1e-300)
    return (integrate_finite(f, 0.0, A, tol, points=pts).value
            + integrate_semi_infinite(f, A, tol).value)


def _derivative_parts(delta, h):
    tau = 1.0 - h * h
    scale = math.sqrt(delta * delta + math.pi ** 2 * tau * tau)
    reach = 40.0 * max(delta, tau)

    # sech^2(E / 2 tau) = exp(-delta / tau) * 4 exp(-(E - delta) / tau) / (1 + exp(-E / tau))^2
    def num(s):
        E = np.sqrt(s * s + delta * delta)
        q = np.exp(-(s * s / (E + delta)) / tau)
        return 4.0 * q / (1.0 + np.exp(-E / tau)) ** 2

    def den(s):
        E = np.sqrt(s * s + delta * delta)
        return g1_over_z(E / tau) / tau

    n = _scaled_integral(num, scale, reach)
    d = _scaled_integral(den, scale, reach)
    return n, d, math.exp(-delta / tau)


def f_bcs_derivative(h, fd_step=1e-5):
    """d f_bcs / dh on (0, 1) by implicit differentiation of I.

    The partial derivatives of I are themselves convergent integrals. When
    the denominator integral drops below 1e-12 a central difference is used.
    """
    h = float(h)
    if not 0.0 < h < 1.0:
        raise DomainError(f"h must lie strictly inside (0, 1), got {h}")
    delta = f_bcs(h)
    n, d, damp = _derivative_parts(delta, h)
    if d < 1e-12:
        step = min(fd_step, 0.5 * h, 0.5 * (1.0 - h))
        return (f_bcs(h + step) - f_bcs(h - step)) / (2.0 * step)
    return (h / delta) * damp * n / d


def f_bcs_derivative_at_zero():
    """One-sided limit of the slope at h = 0."""
    return c_univ()


def f_bcs_derivative_at_one():
    """One-sided limit of the slope at h = 1."""
    return 0.0


def invert_with_residual(h, R_U):
    """The phi >= 0 with I(phi, h) = R_U.

    Rescaling s in I gives I(phi; tau) = I(phi/c; tau/c) - 2 log c, so
    phi = exp(-R/2) f_bcs(sqrt(1 - tau exp(R/2))). A solution exists iff
    R_U <= 2 log(1 / (1 - h^2)), the value of I(0, h).
    """
    h = float(h)
    _check(0.0, h)
    tau = 1.0 - h * h
    arg = 1.0 - tau * math.exp(0.5 * R_U)
    if arg < 0.0:
        raise NoSolutionError(
            f"I(phi, {h}) = {R_U} has no solution: R_U exceeds I(0, h)")
    return math.exp(-0.5 * R_U) * f_bcs(math.sqrt(arg))


def solvability_threshold(h):
    """Largest residual R for which I(phi, h) = R is solvable, i.e. I(0, h)."""
    _check(0.0, h)
    if h == 1.0:
        return math.inf
    return -2.0 * math.log1p(-h * h)


# --------------------------------------------------------- channels (l, m)

def c_lm(l, m):
    """(int_{S^2} |Y_l^m|^4)^(-1/2) from the Clebsch-Gordan expansion."""
    if l < 0 or abs(m) > l:
        raise DomainError(f"need 0 <= |m| <= l, got l={l}, m={m}")
    total = 0.0
    for L in range(0, 2 * l + 1):
        a = clebsch_gordan(l, l, 0, 0, L, 0)
        b = clebsch_gordan(l, l, m, m, L, 2 * m)
        total += (2 * l + 1) ** 2 / (4.0 * math.pi * (2 * L + 1)) * a * a * b * b
    return total ** -0.5


_N_THETA = 128


def _theta_rule(l, m):
    # |Y_l^m|^2 vanishes quadratically at the zeros of P_l^m(cos theta), where the
    # s-integral has a log singularity; one fixed rule per panel between zeros
    zeros = np.polynomial.legendre.Legendre.basis(l).deriv(abs(m)).roots() if l > abs(m) else []
    inner = sorted(math.acos(float(np.clip(np.real(z), -1.0, 1.0))) for z in zeros)
    edges = [0.0, *inner, math.pi]
    parts = [gauss_legendre_on(_N_THETA, a, b) for a, b in zip(edges[:-1], edges[1:])]
    return np.concatenate([t for t, _ in parts]), np.concatenate([w for _, w in parts])


def _channel_residual_factory(l, m, h):
    theta, w = _theta_rule(l, m)
    y2 = sph_harm_sq(l, m, theta)
    keep = y2 > 0.0
    y2 = y2[keep]
    meas = 2.0 * math.pi * np.sin(theta[keep]) * w[keep] * y2
    y = np.sqrt(y2)
    tau = 1.0 - h * h

    def phi_fn(phi):
        return float(meas @ _kernels.universal_half(phi * y, tau))

    return phi_fn


def f_bcs_lm(l, m, h, tol=1e-12):
    """Channel curve: the phi with int_0^inf ds int_{S^2} dw [...] |Y_l^m|^2 = 0.

    The sphere integral reduces to theta because |Y_l^m|^2 does not depend on
    the azimuth; theta uses a fixed 128-point Gauss-Legendre rule.
    """
    if l < 0 or abs(m) > l:
        raise DomainError(f"need 0 <= |m| <= l, got l={l}, m={m}")
    h = float(h)
    _check(0.0, h)
    if h == 0.0:
        return 0.0
    g = _channel_residual_factory(l, m, h)
    lo = _lower_bracket(h)
    hi = 2.0
    while g(hi) > 0.0:
        if hi >= 4096.0:
            raise NoSolutionError("no sign change in the channel residual")
        hi *= 2.0
    return find_root(g, lo, hi, xtol=1e-2 * tol, ftol=0.0).root


def channel_residual(l, m, phi, h):
    """The left-hand side of the channel equation at trial value phi."""
    return _channel_residual_factory(l, m, float(h))(float(phi))


# ---------------------------------------------------------------- tables

@dataclass(frozen=True)
class UniversalCurveTable:
    h_values: tuple
    f_values: tuple
    channel: tuple | None = None
    tolerance: float = 1e-8
    residuals: tuple = field(default=())

    def __post_init__(self):
        if len(self.h_values) != len(self.f_values):
            raise DomainError("h_values and f_values differ in length")

    def rows(self):
        return [list(r) for r in zip(self.h_values, self.f_values)]

    @property
    def columns(self):
        return ["h", "f_bcs"] if self.channel is None else ["h", "f_bcs_lm"]


def tabulate(channel=None, h_grid=(), tol=1e-8):
    """Sample the curve (or a channel curve) on a sorted h grid.

    Each point's residual in its defining equation is checked against ``tol``.
    """
    hs = [float(h) for h in h_grid]
    if not hs:
        raise DomainError("h_grid is empty")
    if any(b < a for a, b in zip(hs, hs[1:])):
        raise DomainError("h_grid must be sorted")
    for h in hs:
        _check(0.0, h)
    fs, res = [], []
    for h in hs:
        if channel is None:
            f = f_bcs(h)
            r = 0.0 if h == 0.0 else universal_integral(f, h, method="fixed")
        else:
            l, m = channel
            f = f_bcs_lm(l, m, h)
            r = 0.0 if h == 0.0 else channel_residual(l, m, f, h)
        if not abs(r) <= tol:
            raise NoSolutionError(f"residual {r:.3e} at h={h} exceeds {tol:.1e}")
        fs.append(f)
        res.append(r)
    return UniversalCurveTable(tuple(hs), tuple(fs),
                               None if channel is None else tuple(channel), tol, tuple(res))
