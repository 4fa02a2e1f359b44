"""Hot loops, each in a numba flavour and a pure-numpy flavour.

The public wrappers at the bottom pick the implementation according to
``_accel.USE_NUMBA``; both flavours are importable directly so that tests and
the benchmark can compare them.
"""

import math

import numpy as np

from . import _accel
from ._accel import njit

# Potential transform families; coefficients live in a flat float array.
KIND_CONST = 0      # c0
KIND_GAUSS = 1      # c0 * exp(-c1 k^2)
KIND_LORENTZ = 2    # c0 / (1 + c1 k^2)
KIND_BALL = 3       # c0 * 3 (sin x - x cos x) / x^3, x = c1 k
KIND_BUMPS = 4      # sum_i a_i exp(-((k - k_i) / w_i)^2), coeffs = [a, k, w] * n

_GL16_X, _GL16_W = np.polynomial.legendre.leggauss(16)


# ---------------------------------------------------------------- scalars

@njit
def _g0(z):
    z = abs(z)
    if z < 1e-4:
        z2 = z * z
        return 0.5 - z2 / 24.0 + z2 * z2 / 240.0
    return math.tanh(0.5 * z) / z


@njit
def _ball(x):
    if x < 1e-2:
        x2 = x * x
        return 1.0 - x2 / 10.0 + x2 * x2 / 280.0
    return 3.0 * (math.sin(x) - x * math.cos(x)) / (x * x * x)


@njit
def _vhat(kind, c, k):
    if kind == KIND_CONST:
        return c[0]
    if kind == KIND_GAUSS:
        return c[0] * math.exp(-c[1] * k * k)
    if kind == KIND_LORENTZ:
        return c[0] / (1.0 + c[1] * k * k)
    if kind == KIND_BALL:
        return c[0] * _ball(c[1] * k)
    total = 0.0
    for i in range(c.size // 3):
        u = (k - c[3 * i + 1]) / c[3 * i + 2]
        total += c[3 * i] * math.exp(-u * u)
    return total


@njit
def _universal_term(s, delta, tau):
    # tanh(E / 2 tau) / E - tanh(s / 2) / s, with tanh = 1 when tau = 0
    E = math.sqrt(s * s + delta * delta)
    if s < 1.0:
        if tau == 0.0:
            a = 1.0 / E
        else:
            a = _g0(E / tau) / tau
        return a - _g0(s)
    r = math.exp(-s)
    out = 2.0 * r / (s * (1.0 + r)) - delta * delta / (s * E * (s + E))
    if tau > 0.0:
        q = math.exp(-E / tau)
        out -= 2.0 * q / (E * (1.0 + q))
    return out


# ------------------------------------------------- universal integral, fixed

@njit
def _universal_half_nb(deltas, tau, gx, gw):
    out = np.empty(deltas.size)
    for n in range(deltas.size):
        d = deltas[n]
        scale = math.sqrt(d * d + math.pi * math.pi * tau * tau)
        if scale == 0.0:
            out[n] = math.inf
            continue
        a0 = 0.25 * min(1.0, scale)
        A = 40.0 * max(1.0, d)
        total = 0.0
        lo = 0.0
        hi = a0
        while lo < A:
            c = 0.5 * (lo + hi)
            h = 0.5 * (hi - lo)
            acc = 0.0
            for k in range(gx.size):
                acc += gw[k] * _universal_term(c + h * gx[k], d, tau)
            total += h * acc
            lo = hi
            hi = 2.0 * hi
        # tail [lo, inf) through s = lo / t
        acc = 0.0
        for k in range(gx.size):
            t = 0.5 * (1.0 + gx[k])
            s = lo / t
            acc += gw[k] * _universal_term(s, d, tau) * lo / (t * t)
        total += 0.5 * acc
        out[n] = total
    return out


def _universal_term_np(s, delta, tau):
    s = np.asarray(s, dtype=float)
    E = np.sqrt(s * s + delta * delta)
    low = s < 1.0
    out = np.empty_like(s)
    sl, El = s[low], E[low]
    if tau == 0.0:
        a = 1.0 / El
    else:
        z = El / tau
        a = np.where(z < 1e-4, 0.5 - z * z / 24.0,
                     np.tanh(0.5 * z) / np.where(z < 1e-4, 1.0, z)) / tau
    b = np.where(sl < 1e-4, 0.5 - sl * sl / 24.0,
                 np.tanh(0.5 * sl) / np.where(sl < 1e-4, 1.0, sl))
    out[low] = a - b
    sh, Eh = s[~low], E[~low]
    r = np.exp(-sh)
    tail = 2.0 * r / (sh * (1.0 + r)) - delta * delta / (sh * Eh * (sh + Eh))
    if tau > 0.0:
        q = np.exp(-Eh / tau)
        tail -= 2.0 * q / (Eh * (1.0 + q))
    out[~low] = tail
    return out


def _universal_half_np(deltas, tau, gx, gw):
    out = np.empty(deltas.size)
    for n, d in enumerate(deltas):
        scale = math.sqrt(d * d + math.pi * math.pi * tau * tau)
        if scale == 0.0:
            out[n] = math.inf
            continue
        a0 = 0.25 * min(1.0, scale)
        A = 40.0 * max(1.0, d)
        n_pan = 1
        while a0 * 2.0 ** (n_pan - 1) < A:
            n_pan += 1
        his = a0 * 2.0 ** np.arange(n_pan)
        los = np.concatenate([[0.0], his[:-1]])
        c = 0.5 * (los + his)
        h = 0.5 * (his - los)
        s = c[:, None] + h[:, None] * gx[None, :]
        body = float(np.sum(h * (_universal_term_np(s.ravel(), d, tau)
                                 .reshape(s.shape) @ gw)))
        lo = his[-1]
        t = 0.5 * (1.0 + gx)
        tail = 0.5 * float(np.sum(gw * _universal_term_np(lo / t, d, tau) * lo / (t * t)))
        out[n] = body + tail
    return out


# ------------------------------------------------------- channel kernels

@njit
def _assemble_nb(kind, c, dim, p, q, cosv, aw, symmetric):
    n = p.size
    m = q.size
    out = np.empty((n, m))
    for i in range(n):
        j0 = i if symmetric else 0
        for j in range(j0, m):
            if dim == 1:
                val = _vhat(kind, c, abs(p[i] - q[j])) + _vhat(kind, c, p[i] + q[j])
            else:
                pp = p[i] * p[i] + q[j] * q[j]
                pq2 = 2.0 * p[i] * q[j]
                val = 0.0
                for k in range(cosv.size):
                    r2 = pp - pq2 * cosv[k]
                    if r2 < 0.0:
                        r2 = 0.0
                    val += aw[k] * _vhat(kind, c, math.sqrt(r2))
            out[i, j] = val
            if symmetric:
                out[j, i] = val
    return out


@njit
def _vhat_array_nb(kind, c, k):
    out = np.empty(k.size)
    for i in range(k.size):
        out[i] = _vhat(kind, c, k[i])
    return out


def vhat_np(kind, c, k):
    k = np.asarray(k, dtype=float)
    if kind == KIND_CONST:
        return np.full_like(k, c[0])
    if kind == KIND_GAUSS:
        return c[0] * np.exp(-c[1] * k * k)
    if kind == KIND_LORENTZ:
        return c[0] / (1.0 + c[1] * k * k)
    if kind == KIND_BALL:
        x = c[1] * k
        small = x < 1e-2
        xs = np.where(small, 1.0, x)
        x2 = x * x
        return c[0] * np.where(small, 1.0 - x2 / 10.0 + x2 * x2 / 280.0,
                               3.0 * (np.sin(xs) - xs * np.cos(xs)) / xs ** 3)
    total = np.zeros_like(k)
    for i in range(len(c) // 3):
        u = (k - c[3 * i + 1]) / c[3 * i + 2]
        total += c[3 * i] * np.exp(-u * u)
    return total


def _assemble_np(kind, c, dim, p, q, cosv, aw, symmetric, chunk=2_000_000):
    if dim == 1:
        return (vhat_np(kind, c, np.abs(p[:, None] - q[None, :]))
                + vhat_np(kind, c, p[:, None] + q[None, :]))
    out = np.empty((p.size, q.size))
    rows = max(1, chunk // max(1, q.size * cosv.size))
    for i0 in range(0, p.size, rows):
        pi = p[i0:i0 + rows, None, None]
        r2 = pi * pi + q[None, :, None] ** 2 - 2.0 * pi * q[None, :, None] * cosv
        v = vhat_np(kind, c, np.sqrt(np.clip(r2, 0.0, None)))
        out[i0:i0 + rows] = v @ aw
    if symmetric:
        out = 0.5 * (out + out.T)
    return out


# ---------------------------------------------------------- dispatchers

def universal_half(deltas, tau, use_numba=None):
    """Half-line universal integral for each entry of ``deltas`` (fixed rule)."""
    use_numba = _accel.USE_NUMBA if use_numba is None else use_numba
    deltas = np.ascontiguousarray(np.atleast_1d(deltas), dtype=float)
    fn = _universal_half_nb if use_numba else _universal_half_np
    return fn(deltas, float(tau), _GL16_X, _GL16_W)


def vhat_array(kind, coeffs, k, use_numba=None):
    use_numba = _accel.USE_NUMBA if use_numba is None else use_numba
    k = np.asarray(k, dtype=float)
    if use_numba:
        flat = np.ascontiguousarray(k.ravel())
        return _vhat_array_nb(kind, coeffs, flat).reshape(k.shape)
    return vhat_np(kind, coeffs, k)


def assemble(kind, coeffs, dim, p, q, cosv, aw, symmetric=False, use_numba=None):
    """Channel-kernel matrix ``sum_k aw_k vhat(|p e - q w_k|)`` (or the d=1 pair sum)."""
    use_numba = _accel.USE_NUMBA if use_numba is None else use_numba
    p = np.ascontiguousarray(p, dtype=float)
    q = np.ascontiguousarray(q, dtype=float)
    cosv = np.ascontiguousarray(cosv, dtype=float)
    aw = np.ascontiguousarray(aw, dtype=float)
    symmetric = bool(symmetric) and p.size == q.size and np.array_equal(p, q)
    if use_numba:
        return _assemble_nb(kind, coeffs, dim, p, q, cosv, aw, symmetric)
    return _assemble_np(kind, coeffs, dim, p, q, cosv, aw, symmetric)
