"""Radial interaction potentials and their angular-momentum channel kernels.

Fourier transforms use the unitary convention
``vhat(k) = (2 pi)^(-d/2) int V(x) exp(-i k x) dx``. Every catalog entry is
stored with an attractive sign.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._kernels import KIND_BALL, KIND_BUMPS, KIND_CONST, KIND_GAUSS, KIND_LORENTZ
from .errors import DomainError
from .numerics import gauss_legendre_on, legendre_p

_SURFACE = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}


def sphere_area(d):
    """|S^(d-1)| for d = 1, 2, 3."""
    return _SURFACE[d]


@dataclass(frozen=True, eq=False)
class RadialPotential:
    name: str
    dim: int
    params: dict
    kind: int
    coeffs: np.ndarray = field(repr=False)
    negative_type: bool = True
    v_real: object = field(default=None, repr=False, compare=False)

    def vhat(self, r):
        return vhat(self, r)

    def __reduce__(self):
        # rebuilt from the catalog so the closures need not be pickled
        return (_rebuild, (self.name, dict(self.params)))


def _gaussian(dim, amplitude=1.0, sigma=1.0):
    c = np.array([-amplitude * sigma ** dim, 0.5 * sigma ** 2])

    def v(x):
        return -amplitude * np.exp(-np.asarray(x) ** 2 / (2.0 * sigma ** 2))

    return KIND_GAUSS, c, True, v


def _delta1d(amplitude=1.0):
    return KIND_CONST, np.array([-amplitude / math.sqrt(2.0 * math.pi)]), True, None


def _yukawa3d(amplitude=1.0, range_=1.0):
    a = range_
    c = np.array([-amplitude * (2.0 * math.pi) ** -1.5 * a * a, a * a])

    def v(x):
        x = np.asarray(x, dtype=float)
        return -amplitude * np.exp(-x / a) / (4.0 * math.pi * x)

    return KIND_LORENTZ, c, True, v


def _xbox3d(amplitude=1.0, radius=1.0):
    vol = 4.0 * math.pi * radius ** 3 / 3.0
    c = np.array([-amplitude * (2.0 * math.pi) ** -1.5 * vol, radius])

    def v(x):
        return np.where(np.asarray(x) < radius, -amplitude, 0.0)

    # the sinc-like transform changes sign, so this entry is not of negative type
    return KIND_BALL, c, False, v


def _ring2d(amplitude=1.0, k0=1.0, width=0.25, background=0.0, background_width=1.0):
    # repulsive bump at sqrt(2) k0 (a quarter turn on the Fermi circle), attractive
    # bumps at 0 and 2 k0 (forward and backward scattering): the l = 2 harmonic
    # couples to all three with the attractive sign
    c = [amplitude, math.sqrt(2.0) * k0, width,
         -amplitude, 2.0 * k0, width,
         -amplitude, 0.0, width]
    if background:
        c += [-background, 0.0, background_width]
    return KIND_BUMPS, np.array(c), False, None


_CATALOG = {
    "delta1d": (1, _delta1d, {"amplitude": 1.0}),
    "gaussian1d": (1, lambda **kw: _gaussian(1, **kw), {"amplitude": 1.0, "sigma": 1.0}),
    "gaussian2d": (2, lambda **kw: _gaussian(2, **kw), {"amplitude": 1.0, "sigma": 1.0}),
    "gaussian3d": (3, lambda **kw: _gaussian(3, **kw), {"amplitude": 1.0, "sigma": 1.0}),
    "yukawa3d": (3, lambda amplitude=1.0, range=1.0: _yukawa3d(amplitude, range),
                 {"amplitude": 1.0, "range": 1.0}),
    "xbox3d": (3, _xbox3d, {"amplitude": 1.0, "radius": 1.0}),
    "ring2d": (2, _ring2d, {"amplitude": 1.0, "k0": 1.0, "width": 0.25,
                            "background": 0.0, "background_width": 1.0}),
}


def catalog():
    """Names and default parameters of every shipped potential."""
    return {name: dict(defaults) for name, (_, _, defaults) in _CATALOG.items()}


def make_potential(name, **params):
    """Build a catalog potential; unknown parameter names are rejected."""
    try:
        dim, builder, defaults = _CATALOG[name]
    except KeyError:
        raise DomainError(f"unknown potential {name!r}; choose from {sorted(_CATALOG)}") from None
    unknown = set(params) - set(defaults)
    if unknown:
        raise DomainError(f"{name} does not take {sorted(unknown)}")
    full = {**defaults, **{k: float(v) for k, v in params.items()}}
    kind, coeffs, neg, v_real = builder(**full)
    coeffs = np.ascontiguousarray(coeffs, dtype=float)
    coeffs.setflags(write=False)
    return RadialPotential(name, dim, full, kind, coeffs, neg, v_real)


def _rebuild(name, params):
    return make_potential(name, **params)


def vhat(pot, r):
    """Radial Fourier transform of ``pot`` at |k| = r."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("vhat needs r >= 0")
    out = _kernels.vhat_array(pot.kind, np.array(pot.coeffs), r)
    return out if out.ndim else float(out)


# ------------------------------------------------------------- channels

def _check_channel(pot, l):
    if l < 0:
        raise DomainError("channel l must be >= 0")
    if pot.dim == 1 and l != 0:
        raise DomainError("d = 1 supports only the l = 0 channel")
    if pot.dim == 3 and l != 0:
        warnings.warn("d = 3 with l != 0: a fixed-l gap with radial |Delta| is not "
                      "consistent with the nonlinear equation", RuntimeWarning, stacklevel=3)


def angular_rule(dim, l, n):
    """Nodes (as cosines) and weights so that W = sum aw * vhat(sqrt(p^2 + q^2 - 2pq c))."""
    if dim == 1:
        return np.zeros(0), np.zeros(0)
    if dim == 2:
        theta, w = gauss_legendre_on(n, 0.0, math.pi)
        return np.cos(theta), 2.0 * w * np.cos(l * theta)
    t, w = gauss_legendre_on(n, -1.0, 1.0)
    return t, 2.0 * math.pi * w * legendre_p(l, t)


def _raw(pot, l, p, q, n, symmetric=False):
    cosv, aw = angular_rule(pot.dim, l, n)
    return _kernels.assemble(pot.kind, np.array(pot.coeffs), pot.dim, p, q, cosv, aw,
                             symmetric=symmetric)


def choose_angular_order(pot, l, points, n0=256, rtol=1e-9, n_cap=8192):
    """Smallest doubling of ``n0`` whose kernel agrees with the next doubling."""
    if pot.dim == 1:
        return 0
    pts = np.unique(np.asarray(points, dtype=float))
    if pts.size > 24:
        pts = pts[np.linspace(0, pts.size - 1, 24).round().astype(int)]
    n = n0
    while True:
        a = _raw(pot, l, pts, pts, n)
        b = _raw(pot, l, pts, pts, 2 * n)
        scale = max(np.abs(b).max(), 1e-300)
        if np.abs(a - b).max() <= rtol * scale or 2 * n >= n_cap:
            return 2 * n if 2 * n >= n_cap else n
        n *= 2


def kernel_matrix(pot, l, p, q=None, n_angle=None):
    """Channel kernel W_l(p_i, q_j) on the outer product of two node sets."""
    _check_channel(pot, l)
    p = np.atleast_1d(np.asarray(p, dtype=float))
    sym = q is None
    q = p if sym else np.atleast_1d(np.asarray(q, dtype=float))
    if n_angle is None:
        n_angle = choose_angular_order(pot, l, np.concatenate([p, q]))
    return _raw(pot, l, p, q, n_angle, symmetric=sym)


def angular_kernel(pot, l, p, q):
    """W_l(p, q): the channel-harmonic average of vhat(|p e - q w|) over the sphere.

    d=1 gives vhat(|p - q|) + vhat(p + q); d=2 integrates cos(l theta) over the
    circle; d=3 integrates 2 pi P_l(t) over t in [-1, 1].
    """
    if p < 0 or q < 0:
        raise DomainError("p and q must be >= 0")
    return float(kernel_matrix(pot, l, [p], [q])[0, 0])


def channel_eigenvalue(pot, mu, l):
    """Eigenvalue of the Fermi-sphere operator on the degree-l harmonics."""
    if not mu > 0:
        raise DomainError("mu must be positive")
    kf = math.sqrt(mu)
    return (2.0 * math.pi) ** (-pot.dim / 2.0) * angular_kernel(pot, l, kf, kf)


@dataclass(frozen=True)
class ChannelSpectrum:
    mu: float
    eigenvalues: dict
    ground_channel: int
    tie: bool = False
    unphysical_ground: bool = False

    @property
    def runner_up(self):
        rest = {l: e for l, e in self.eigenvalues.items() if l != self.ground_channel}
        return min(rest, key=lambda l: (rest[l], l)) if rest else None


def channel_spectrum(pot, mu, l_max):
    """Channel eigenvalues for l = 0..l_max (only l = 0 exists in d = 1)."""
    if l_max < 0:
        raise DomainError("l_max must be >= 0")
    top = 0 if pot.dim == 1 else l_max
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        eig = {l: channel_eigenvalue(pot, mu, l) for l in range(top + 1)}
    e_min = min(eig.values())
    ground = min(l for l, e in eig.items() if e == e_min)
    scale = max(abs(e) for e in eig.values()) or 1.0
    tie = sum(1 for e in eig.values() if abs(e - e_min) <= 1e-12 * scale) > 1
    odd = pot.dim == 2 and ground % 2 == 1
    return ChannelSpectrum(mu, eig, ground, tie, odd)
