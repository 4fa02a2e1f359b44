"""Independent reference computations behind the frozen constants in the tests.

Nothing here imports bcsgap. Running the module prints every value; the test
files carry the printed numbers as literals so the suite stays fast.

    python3 tests/oracles.py
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np
from scipy import integrate, optimize, special

mp.mp.dps = 30


def _bisect(f, lo, hi, width):
    flo = f(lo)
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def gap_difference_integral(delta, h):
    """int over the real line of tanh(E / 2 tau) / E - tanh(s / 2) / s, mpmath quadrature."""
    delta = mp.mpf(delta)
    tau = 1 - mp.mpf(h) ** 2

    def f(s):
        E = mp.sqrt(s * s + delta * delta)
        second = mp.tanh(s / 2) / s if s != 0 else mp.mpf(1) / 2
        first = mp.tanh(E / (2 * tau)) / E if E != 0 else 1 / (2 * tau)
        return first - second

    pts = [0, mp.mpf(1) / 4, 1, 4, 16, 64, mp.inf]
    return 2 * mp.quad(f, pts)


def universal_root(h, target=0.0, width=1e-11):
    return float(_bisect(lambda d: float(gap_difference_integral(d, h) - target), 1e-9, 4.0, width))


def channel_curve_at_one(l, m):
    """At h = 1 the channel equation integrates in s to a log, so
    ln phi = ln(pi e^-gamma) - int |Y|^2 ln|Y| dw."""

    def y2(theta):
        return abs(special.sph_harm_y(l, m, theta, 0.0)) ** 2

    def integrand(theta):
        v = y2(theta)
        return 2 * math.pi * math.sin(theta) * (v * 0.5 * math.log(v) if v > 0 else 0.0)

    val, _ = integrate.quad(integrand, 0.0, math.pi, epsabs=1e-14, epsrel=1e-14, limit=400)
    return math.pi * math.exp(-np.euler_gamma) * math.exp(-val)


def _half_line(a, tau):
    def f(s):
        E = math.hypot(s, a)
        first = math.tanh(E / (2 * tau)) / E if E > 0 else 1 / (2 * tau)
        second = math.tanh(s / 2) / s if s > 0 else 0.5
        return first - second

    pts = [x for x in (0.1 * a, a, 1.0, 4.0, 16.0) if x > 0]
    head, _ = integrate.quad(f, 0, 64.0, points=sorted(set(pts)), epsabs=1e-13, epsrel=1e-13,
                             limit=400)
    tail, _ = integrate.quad(f, 64.0, np.inf, epsabs=1e-15, limit=200)
    return head + tail


def channel_curve_nested(l, m, h, width=1e-9):
    """Bisection on phi of int dw |Y|^2 int_0^inf ds [...] with scipy quadrature in both."""
    tau = 1 - h * h
    x = np.polynomial.legendre.Legendre.basis(l).deriv(abs(m)).roots() if l > abs(m) else []
    cuts = sorted(math.acos(float(c)) for c in x)

    def residual(phi):
        def outer(theta):
            v = abs(special.sph_harm_y(l, m, theta, 0.0)) ** 2
            if v == 0:
                return 0.0
            return 2 * math.pi * math.sin(theta) * v * _half_line(phi * math.sqrt(v), tau)

        val, _ = integrate.quad(outer, 0, math.pi, points=cuts or None, epsabs=1e-12,
                                epsrel=1e-12, limit=400)
        return val

    return _bisect(residual, 0.5, 8.0, width)


def shell_tc(lam, debye):
    def g(T):
        val, _ = integrate.quad(lambda e: math.tanh(e / (2 * T)) / e if e > 0 else 1 / (2 * T),
                                0.0, debye, epsabs=1e-14, epsrel=1e-14, limit=500,
                                points=[T * k for k in (1, 10, 100) if T * k < debye])
        return val - 1.0 / lam

    return optimize.brentq(g, debye * 1e-9, debye * 10.0, xtol=1e-16, rtol=1e-14)


def _contact_integral(T, delta, p_max):
    # (1/pi) int_0^p_max tanh(E/2T)/E dq with E = sqrt((q^2-1)^2 + delta^2), mu = 1
    def f(q):
        E = math.hypot(q * q - 1.0, delta)
        if E == 0.0:
            return 1.0 / (2.0 * T)
        return math.tanh(E / (2.0 * T)) / E

    pts = sorted({1.0 - 10 ** -k for k in range(1, 7)} | {1.0 + 10 ** -k for k in range(1, 7)})
    val, _ = integrate.quad(f, 0.0, p_max, points=pts, epsabs=1e-14, epsrel=1e-14, limit=2000)
    return val / math.pi


def contact_tc(lam, p_max=4.0):
    return optimize.brentq(lambda T: _contact_integral(T, 0.0, p_max) - 1.0 / lam,
                           1e-4, 10.0, xtol=1e-16, rtol=1e-14)


def contact_gap(lam, T, p_max=4.0):
    return optimize.brentq(lambda d: _contact_integral(T, d, p_max) - 1.0 / lam,
                           1e-8, 10.0, xtol=1e-16, rtol=1e-14)


def _gauss_vhat(k, dim, amplitude=1.0, sigma=1.0):
    return -amplitude * sigma ** dim * np.exp(-0.5 * sigma * sigma * k * k)


def inverse_radial(vhat_fn, r, dim):
    """(2 pi)^(-d/2) int vhat(|k|) e^{ikx} dk in radial form."""
    if dim == 1:
        val, _ = integrate.quad(lambda k: vhat_fn(k) * math.cos(k * r), 0, np.inf, limit=400)
        return 2 * val / math.sqrt(2 * math.pi)
    if dim == 2:
        val, _ = integrate.quad(lambda k: vhat_fn(k) * special.j0(k * r) * k, 0, 40, limit=400)
        return val
    val, _ = integrate.quad(lambda k: vhat_fn(k) * k * math.sin(k * r), 0, 40, limit=400)
    return (2 * math.pi) ** -1.5 * 4 * math.pi / r * val


def inverse_yukawa(r, amplitude=1.0, a=1.0):
    c = -amplitude * (2 * math.pi) ** -1.5 * a * a
    # k sin(kr) / (1 + a^2 k^2): sine-weighted Fourier integral (QAWF)
    val, _ = integrate.quad(lambda k: c * k / (1 + a * a * k * k), 0, np.inf, weight="sin",
                            wvar=r, limlst=200)
    return (2 * math.pi) ** -1.5 * 4 * math.pi / r * val


def inverse_ball(r, amplitude=1.0, R=1.0):
    c0 = -amplitude * (2 * math.pi) ** -1.5 * 4 * math.pi * R ** 3 / 3

    def full(k):
        x = k * R
        if x < 1e-3:
            shape = 1 - x * x / 10
        else:
            shape = 3 * (math.sin(x) - x * math.cos(x)) / x ** 3
        return c0 * shape * k * math.sin(k * r)

    head, _ = integrate.quad(full, 0, 1.0, epsabs=1e-14, limit=200)
    # k sin(kr) [sin(kR) - kR cos(kR)] / (kR)^3, split into pure cosines / sines
    s = 3 * c0 / R ** 3
    terms = [
        (0.5 * s, "cos", abs(r - R), 2),
        (-0.5 * s, "cos", r + R, 2),
        (-0.5 * s * R, "sin", r + R, 1),
        (-0.5 * s * R * math.copysign(1.0, r - R), "sin", abs(r - R), 1),
    ]
    tail = 0.0
    for coef, kind, w, power in terms:
        if w == 0.0:
            continue
        val, _ = integrate.quad(lambda k, p=power: coef / k ** p, 1.0, np.inf, weight=kind,
                                wvar=w, limlst=200)
        tail += val
    return (2 * math.pi) ** -1.5 * 4 * math.pi / r * (head + tail)


def gaussian3d_w0_closed(p, q, amplitude=1.0, sigma=1.0):
    x = sigma * sigma * p * q
    return -amplitude * sigma ** 3 * 2 * math.pi * math.exp(-0.5 * sigma * sigma * (p * p + q * q)) \
        * 2 * math.sinh(x) / x


def gaussian3d_w0_trapezoid(p, q, n=10_000, amplitude=1.0, sigma=1.0):
    t = np.linspace(-1.0, 1.0, n + 1)
    vals = _gauss_vhat(np.sqrt(p * p + q * q - 2 * p * q * t), 3, amplitude, sigma)
    return 2 * math.pi * float(np.trapezoid(vals, t))


def channel_by_quadrature(vhat_fn, kf, l, dim):
    """(2 pi)^(-d/2) W_l(kf, kf) by scipy quadrature over the angle."""
    if dim == 2:
        val, _ = integrate.quad(lambda th: vhat_fn(kf * math.sqrt(2 - 2 * math.cos(th)))
                                * math.cos(l * th), 0, 2 * math.pi, limit=400, epsabs=1e-13)
        return val / (2 * math.pi)
    val, _ = integrate.quad(lambda t: vhat_fn(kf * math.sqrt(2 - 2 * t)) * special.eval_legendre(l, t),
                            -1, 1, limit=400, epsabs=1e-13)
    return 2 * math.pi * val * (2 * math.pi) ** -1.5


def ring2d_vhat(k, amplitude=1.0, k0=1.0, width=0.25):
    out = 0.0
    for a, c in ((amplitude, math.sqrt(2) * k0), (-amplitude, 2 * k0), (-amplitude, 0.0)):
        out += a * math.exp(-((k - c) / width) ** 2)
    return out


if __name__ == "__main__":
    print("f_bcs(0.5)          ", repr(universal_root(0.5)))
    print("f_bcs(0.3)          ", repr(universal_root(0.3)))
    print("residual root -0.1  ", repr(universal_root(0.5, -0.1)))
    print("I(0, 0.6)           ", repr(float(gap_difference_integral(0.0, 0.6))))
    print("channel (2,0) h=1   ", repr(channel_curve_at_one(2, 0)))
    print("channel (2,1) h=1   ", repr(channel_curve_at_one(2, 1)))
    print("channel (1,0) h=1   ", repr(channel_curve_at_one(1, 0)))
    print("channel (2,0) h=0.5 ", repr(channel_curve_nested(2, 0, 0.5)))
    print("shell tc(0.3, 1)    ", repr(shell_tc(0.3, 1.0)))
    tc = contact_tc(1.0)
    print("contact tc(1)       ", repr(tc))
    print("contact gap h=0.5   ", repr(contact_gap(1.0, tc * 0.75)))
    print("contact gap T=0.3   ", repr(contact_gap(1.0, 0.3 * tc)))
    for r in (0.3, 0.6, 0.9, 1.3, 2.0):
        print(f"yukawa V({r})        ", repr(inverse_yukawa(r)), repr(-math.exp(-r) / (4 * math.pi * r)))
        print(f"ball V({r})          ", repr(inverse_ball(r)))
    for l in range(7):
        print(f"ring2d e_{l}          ", repr(channel_by_quadrature(ring2d_vhat, 1.0, l, 2)))
