"""Ginzburg-Landau coefficients built from the linearized ground state at T_c."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .config import SolverConfig
from .errors import DomainError
from .gap_solver import _Linearized, _coupling_matrix
from .numerics import g1_over_z, integrate_finite, k_t_delta, sech2
from .potentials import sphere_area


@dataclass(frozen=True, eq=False)
class GroundStateA0:
    grid: object
    a0_hat: np.ndarray
    delta0: np.ndarray
    lam: float
    tc: float
    dim: int
    eigenvalue: float
    identity_residual: float

    def delta0_at_fermi(self):
        return float(PchipInterpolator(self.grid.nodes, self.delta0)(self.grid.kf))


@dataclass(frozen=True)
class GlCoefficients:
    c4: float
    c2: float
    tc: float
    mu: float
    dim: int


def ground_state_a0(pot, lam, tc, grid, cfg=None):
    """Zero mode of K_{T_c} + lam V in the s-wave channel, L2-normalized.

    The Perron vector v of the symmetrized operator maps back through
    ``a = v / sqrt(w q^(d-1) K_{T_c})``. ``delta0 = -2 lam (2 pi)^(-d/2) W a``
    then equals ``2 K_{T_c} a`` up to the eigenvalue mismatch, which is
    reported as ``identity_residual``.
    """
    cfg = SolverConfig() if cfg is None else cfg
    d = pot.dim
    lin = _Linearized(pot, lam, 0, grid, cfg)
    top, v = lin.top(tc)
    if abs(top - 1.0) > 10.0 * max(cfg.tol, cfg.tc_rtol):
        raise DomainError(f"largest eigenvalue at the given tc is {top!r}, not 1; tc is stale")
    if v.sum() < 0:
        v = -v
    K = k_t_delta(grid.nodes ** 2 - grid.mu, 0.0, tc)
    meas = grid.measure(d)
    a = v / np.sqrt(meas * K)
    a = a / math.sqrt(sphere_area(d) * float(np.sum(meas * a * a)))
    if pot.negative_type and not np.all(a > 0):
        raise DomainError("ground state is not positive at every node; check grid and kernel")
    delta0 = 2.0 * (_coupling_matrix(pot, lam, 0, grid) @ a)
    ka = K * a
    resid = float(np.max(np.abs(ka - 0.5 * delta0)) / np.max(np.abs(ka)))
    a.setflags(write=False)
    delta0.setflags(write=False)
    return GroundStateA0(grid, a, delta0, lam, tc, d, top, resid)


def gl_coefficients(a0):
    """Quartic and quadratic brackets of the GL functional on the radial grid."""
    grid = a0.grid
    tc = a0.tc
    d = a0.dim
    xi = grid.nodes ** 2 - grid.mu
    K = k_t_delta(xi, 0.0, tc)
    ka = K * np.asarray(a0.a0_hat)
    meas = sphere_area(d) * grid.measure(d)
    f4 = g1_over_z(xi / tc)
    f2 = sech2(xi / (2.0 * tc))
    c4 = float(np.sum(meas * f4 * ka ** 4)) / tc ** 3
    c2 = float(np.sum(meas * f2 * ka ** 2)) / (2.0 * tc)
    return GlCoefficients(c4, c2, tc, grid.mu, d)


def psi_gl(coeffs, delta0_at_fermi=None):
    """|psi| minimizing c4 |psi|^4 - c2 |psi|^2, i.e. sqrt(c2 / (2 c4))."""
    if not (coeffs.c4 > 0 and coeffs.c2 > 0):
        raise DomainError("GL coefficients must be positive")
    if delta0_at_fermi is not None and delta0_at_fermi == 0:
        raise DomainError("delta0 vanishes at the Fermi radius")
    return math.sqrt(coeffs.c2 / (2.0 * coeffs.c4))


def gl_ratio(coeffs, delta0_at_fermi):
    """|psi_GL| Delta0(sqrt(mu)) / T_c, which tends to C_univ at weak coupling."""
    return psi_gl(coeffs, delta0_at_fermi) * delta0_at_fermi / coeffs.tc


def _branch_integrals(f, M, expo):
    """int_0^M (1 - t/M)^expo f + int_0^inf (1 + t/M)^expo f, f decaying in t."""
    pts = [2.0 ** k for k in range(-4, 60) if 2.0 ** k < 0.5 * M]

    def lower(t):
        return (1.0 - t / M) ** expo * f(t)

    def upper(t):
        return (1.0 + t / M) ** expo * f(t)

    # on [M/2, M] put t = M (1 - v^2) to absorb the endpoint power
    def lower_end(v):
        return 2.0 * M * v ** (2.0 * expo + 1.0) * f(M * (1.0 - v * v))

    tol = 1e-15
    lo = integrate_finite(lower, 0.0, 0.5 * M, tol, points=pts).value
    lo += integrate_finite(lower_end, 0.0, math.sqrt(0.5), tol).value
    reach = 64.0
    up = integrate_finite(upper, 0.0, reach, tol, points=[p for p in pts if p < reach]).value

    # t = reach / u^2 turns the t^(-3) tail into a smooth polynomial in u
    def upper_tail(u):
        uu = np.where(u > 0.0, u, 1.0)
        return np.where(u > 0.0, upper(reach / (uu * uu)) * 2.0 * reach / uu ** 3, 0.0)

    up += integrate_finite(upper_tail, 0.0, 1.0, tol).value
    return lo + up


def cuniv_ratio(tc_over_mu, d):
    """sqrt(int sech^2((p^2-mu)/2T_c) dp / int g1(x)/x dp), x = (p^2-mu)/T_c.

    Both integrals run over R^d and are split at the Fermi radius, with
    t = |p^2 - mu| / 2T_c on each side; the common prefactor cancels.
    """
    if d not in (1, 2, 3):
        raise DomainError("d must be 1, 2 or 3")
    if not 0 < tc_over_mu <= 0.1:
        raise DomainError("tc_over_mu must lie in (0, 0.1]")
    M = 0.5 / tc_over_mu
    expo = (d - 2) / 2.0
    num = _branch_integrals(sech2, M, expo)
    den = _branch_integrals(lambda t: g1_over_z(2.0 * t), M, expo)
    return math.sqrt(num / den)
