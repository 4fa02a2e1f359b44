"""Shared numerical kernels: quadrature, root finding and special functions.

Every integrand handed to :func:`integrate_finite` must be vectorized: it
receives a 1-d float array and returns an array of the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BracketError, DomainError, NonConvergenceError

ZETA3 = 1.2020569031595942854
EULER_GAMMA = 0.57721566490153286061

_EPS = np.finfo(float).eps

# Gauss-Kronrod 7/15 pair (QUADPACK qk15); nodes listed for x >= 0.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full 15-point layout on [-1, 1]; the Gauss nodes sit at odd positions.
_X15 = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_W15 = np.concatenate([_WGK[:-1], _WGK[::-1]])
_G_IDX = np.array([1, 3, 5, 7, 9, 11, 13])
_W7 = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class RootResult:
    root: float
    residual: float
    iterations: int
    bracket: tuple

    def __float__(self):
        return self.root


def integrate_finite(f, a, b, tol=1e-10, *, points=None, max_panels=20000):
    """Adaptive Gauss-Kronrod quadrature of ``f`` over ``[a, b]``.

    Panels are bisected until each local error estimate is below its share
    ``tol * width / (b - a)`` of the tolerance. All pending panels of one
    refinement level are evaluated in a single vectorized call.

    Raises NonConvergenceError (with the best QuadratureResult attached) once
    more than ``max_panels`` panels would be needed.
    """
    a = float(a)
    b = float(b)
    if not a < b:
        raise DomainError(f"integrate_finite needs a < b, got [{a}, {b}]")
    if tol <= 0:
        raise DomainError("tol must be positive")
    edges = [a]
    if points is not None:
        edges += sorted(float(p) for p in points if a < p < b)
    edges.append(b)
    lo = np.array(edges[:-1])
    hi = np.array(edges[1:])
    length = b - a
    total = 0.0
    err_total = 0.0
    evals = 0
    n_panels = lo.size
    while lo.size:
        center = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        x = center[:, None] + half[:, None] * _X15[None, :]
        fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
        evals += x.size
        if not np.all(np.isfinite(fx)):
            raise DomainError("integrand returned non-finite values")
        kron = half * (fx @ _W15)
        gauss = half * (fx[:, _G_IDX] @ _W7)
        err = np.abs(kron - gauss)
        floor = 50.0 * _EPS * half * (np.abs(fx) @ _W15)
        share = tol * (2.0 * half) / length
        tiny = half <= 8.0 * _EPS * np.maximum(np.abs(center), 1.0)
        done = (err <= share) | (err <= floor) | tiny
        total += float(kron[done].sum())
        err_total += float(err[done].sum())
        todo = ~done
        n_new = int(todo.sum())
        if n_panels + n_new > max_panels:
            best = QuadratureResult(total + float(kron[todo].sum()),
                                    err_total + float(err[todo].sum()), evals)
            raise NonConvergenceError(
                f"quadrature needed more than {max_panels} panels", best=best)
        n_panels += n_new
        mid = center[todo]
        lo = np.concatenate([lo[todo], mid])
        hi = np.concatenate([mid, hi[todo]])
    return QuadratureResult(total, err_total, evals)


def integrate_semi_infinite(f, a, tol=1e-10, *, max_panels=20000):
    """Integrate ``f`` over ``[a, inf)`` via ``x = a + t / (1 - t)``."""
    a = float(a)

    def g(t):
        one_minus = 1.0 - t
        inside = one_minus > 0.0
        om = np.where(inside, one_minus, 1.0)
        # tail limit at t = 1 is zero for integrands decaying faster than 1/x^2
        return np.where(inside, f(a + t / om) / (om * om), 0.0)

    return integrate_finite(g, 0.0, 1.0, tol, max_panels=max_panels)


def _scan_for_sign_change(f, lo, hi, flo, fhi, ftol, depth=6):
    """Look inside a non-bracketing interval for a zero or a sign change."""
    n = 2 ** depth
    xs = np.linspace(lo, hi, n + 1)
    fs = [flo] + [f(x) for x in xs[1:-1]] + [fhi]
    for x, fx in zip(xs, fs):
        if abs(fx) <= ftol:
            return x, fx, None
    for i in range(n):
        if fs[i] * fs[i + 1] < 0:
            return (xs[i], fs[i]), (xs[i + 1], fs[i + 1]), True
    return None


def find_root(f, lo, hi, tol=1e-12, *, xtol=None, ftol=None, maxiter=200):
    """Bracketed root of a scalar function (Brent: bisection + secant/IQI).

    Stops when ``|f(root)| <= ftol`` or the retained bracket is narrower than
    ``xtol``; both default to ``tol``. If the endpoints share a sign the
    interval is scanned on a 64-cell grid for a tangent zero or a hidden sign
    change before giving up with BracketError.
    """
    xtol = tol if xtol is None else xtol
    ftol = tol if ftol is None else ftol
    a = float(lo)
    b = float(hi)
    if a > b:
        a, b = b, a
    fa = float(f(a))
    fb = float(f(b))
    if fa == 0.0:
        return RootResult(a, 0.0, 0, (a, b))
    if fb == 0.0:
        return RootResult(b, 0.0, 0, (a, b))
    if fa * fb > 0:
        found = _scan_for_sign_change(f, a, b, fa, fb, ftol)
        if found is None:
            raise BracketError(
                f"f({a})={fa:.3e} and f({b})={fb:.3e} do not bracket a root")
        if found[2] is None:
            x, fx, _ = found
            return RootResult(float(x), float(fx), 0, (a, b))
        (a, fa), (b, fb), _ = found

    c, fc = a, fa
    d = e = b - a
    for it in range(1, maxiter + 1):
        if (fb > 0) == (fc > 0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * _EPS * abs(b) + 0.5 * xtol
        xm = 0.5 * (c - b)
        if abs(xm) <= tol1 or abs(fb) <= ftol:
            return RootResult(b, fb, it, (min(b, c), max(b, c)))
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * xm * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * xm * q - abs(tol1 * q), abs(e * q)):
                e = d
                d = p / q
            else:
                d = xm
                e = d
        else:
            d = xm
            e = d
        a, fa = b, fb
        b = b + d if abs(d) > tol1 else b + math.copysign(tol1, xm)
        fb = float(f(b))
    best = RootResult(b, fb, maxiter, (min(b, c), max(b, c)))
    raise NonConvergenceError("find_root hit its iteration cap", best=best)


def k_t_delta(x, delta, T):
    """``E / tanh(E / 2T)`` with ``E = sqrt(x^2 + delta^2)``; equals E at T=0."""
    if T < 0:
        raise DomainError(f"temperature must be >= 0, got {T}")
    x = np.asarray(x, dtype=float)
    E = np.hypot(x, delta)
    if T == 0:
        out = E
    else:
        z = E / (2.0 * T)
        small = z < 1e-6
        with np.errstate(divide="ignore", invalid="ignore"):
            direct = E / np.tanh(z)
        out = np.where(small, 2.0 * T + E * E / (6.0 * T), direct)
    return out if out.ndim else float(out)


def sech2(x):
    """``1 / cosh(x)^2`` without overflow."""
    q = np.exp(-2.0 * np.abs(np.asarray(x, dtype=float)))
    out = 4.0 * q / (1.0 + q) ** 2
    return out if out.ndim else float(out)


def g0(z):
    """``tanh(z/2) / z`` with ``g0(0) = 1/2``."""
    z = np.abs(np.asarray(z, dtype=float))
    small = z < 1e-4
    zs = np.where(small, 1.0, z)
    z2 = z * z
    out = np.where(small, 0.5 - z2 / 24.0 + z2 * z2 / 240.0, np.tanh(0.5 * zs) / zs)
    return out if out.ndim else float(out)


# Taylor coefficients of g1(z) = -g0'(z) in odd powers of z.
_G1_SERIES = (1.0 / 12.0, -1.0 / 60.0, 17.0 / 6720.0, -31.0 / 90720.0,
              691.0 / 15966720.0)


def g1_over_z(z):
    """``g1(z) / z``; even, positive, decreasing, with value 1/12 at 0."""
    z = np.abs(np.asarray(z, dtype=float))
    small = z < 0.1
    zs = np.where(small, 1.0, z)
    z2 = z * z
    series = np.zeros_like(z)
    for c in reversed(_G1_SERIES):
        series = series * z2 + c
    direct = (np.tanh(0.5 * zs) / zs - 0.5 * sech2(0.5 * zs)) / (zs * zs)
    out = np.where(small, series, direct)
    return out if out.ndim else float(out)


def g1(z):
    """``-g0'(z) = g0(z)/z - sech^2(z/2)/(2z)``; odd, g1(0) = 0."""
    za = np.asarray(z, dtype=float)
    out = za * g1_over_z(za)
    return out if np.ndim(out) else float(out)


@lru_cache(maxsize=64)
def gauss_legendre(n):
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre_on(n, a, b):
    x, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


def legendre_p(l, t):
    """Legendre polynomial P_l(t) by upward recurrence."""
    t = np.asarray(t, dtype=float)
    p_prev = np.ones_like(t)
    if l == 0:
        return p_prev
    p = t.copy()
    for n in range(1, l):
        p_prev, p = p, ((2 * n + 1) * t * p - n * p_prev) / (n + 1)
    return p


def _assoc_legendre(l, m, x):
    """P_l^m(x) for m >= 0, Condon-Shortley phase included."""
    somx2 = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    pmm = np.ones_like(x)
    fact = 1.0
    for _ in range(m):
        pmm = -pmm * fact * somx2
        fact += 2.0
    if l == m:
        return pmm
    pmmp1 = x * (2 * m + 1) * pmm
    if l == m + 1:
        return pmmp1
    for ll in range(m + 2, l + 1):
        pll = ((2 * ll - 1) * x * pmmp1 - (ll + m - 1) * pmm) / (ll - m)
        pmm, pmmp1 = pmmp1, pll
    return pmmp1


def sph_harm_sq(l, m, theta):
    """``|Y_l^m(theta, phi)|^2``, normalized to one over the unit sphere."""
    if l < 0 or abs(m) > l:
        raise DomainError(f"need 0 <= |m| <= l, got l={l}, m={m}")
    m = abs(m)
    x = np.cos(np.asarray(theta, dtype=float))
    norm = (2 * l + 1) / (4.0 * math.pi) * math.exp(
        math.lgamma(l - m + 1) - math.lgamma(l + m + 1))
    out = norm * _assoc_legendre(l, m, x) ** 2
    return out if out.ndim else float(out)


def clebsch_gordan(l1, l2, m1, m2, L, M):
    """``<l1, l2; m1, m2 | L; M>`` (Condon-Shortley) from the Racah sum."""
    if min(l1, l2, L) < 0:
        raise DomainError("angular momenta must be non-negative")
    if M != m1 + m2 or not abs(l1 - l2) <= L <= l1 + l2:
        return 0.0
    if abs(m1) > l1 or abs(m2) > l2 or abs(M) > L:
        return 0.0
    lf = math.lgamma
    log_pref = 0.5 * (
        math.log(2 * L + 1)
        + lf(L + l1 - l2 + 1) + lf(L - l1 + l2 + 1) + lf(l1 + l2 - L + 1)
        - lf(l1 + l2 + L + 2)
        + lf(L + M + 1) + lf(L - M + 1)
        + lf(l1 - m1 + 1) + lf(l1 + m1 + 1)
        + lf(l2 - m2 + 1) + lf(l2 + m2 + 1)
    )
    k_min = max(0, l2 - L - m1, l1 - L + m2)
    k_max = min(l1 + l2 - L, l1 - m1, l2 + m2)
    total = 0.0
    for k in range(k_min, k_max + 1):
        log_den = (lf(k + 1) + lf(l1 + l2 - L - k + 1) + lf(l1 - m1 - k + 1)
                   + lf(l2 + m2 - k + 1) + lf(L - l2 + m1 + k + 1)
                   + lf(L - l1 - m2 + k + 1))
        total += (-1.0) ** k * math.exp(log_pref - log_den)
    return total
