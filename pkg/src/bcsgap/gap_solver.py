"""Radial discretization of the full gap equation in one angular channel.

In channel l the gap equation reduces to

    Delta(p) = -lam (2 pi)^(-d/2) int_0^inf W_l(p, q) Delta(q) / K_T(q) q^(d-1) dq,

with ``K_T(q) = E / tanh(E / 2T)``, ``E = sqrt((q^2 - mu)^2 + Delta(q)^2)``.
The q-integral is replaced by a Gauss-Legendre composite rule whose panels
shrink geometrically toward the Fermi radius sqrt(mu), where 1/K_T peaks.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.linalg import eigh
from scipy.optimize import minimize_scalar

from .config import SolverConfig
from .errors import DomainError, NoSuperconductivityError, NonConvergenceError
from .numerics import find_root, g0, gauss_legendre, integrate_finite, integrate_semi_infinite, k_t_delta
from .potentials import channel_eigenvalue, kernel_matrix
from .universal import f_bcs


# ------------------------------------------------------------------ grid

@dataclass(frozen=True, eq=False)
class RadialGrid:
    nodes: np.ndarray
    weights: np.ndarray
    mu: float
    p_max: float
    refinement: str
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def kf(self):
        return math.sqrt(self.mu)

    @property
    def size(self):
        return self.nodes.size

    def measure(self, d):
        """Weights for int_0^p_max f(q) q^(d-1) dq."""
        return self.weights * self.nodes ** (d - 1)

    @property
    def n_inner(self):
        """Number of nodes with q <= sqrt(2 mu); that point is always a panel edge."""
        return int(np.searchsorted(self.nodes, math.sqrt(2.0 * self.mu)))


def _geometric(lo, hi, n):
    return lo * (hi / lo) ** (np.arange(n + 1) / n)


def make_grid(mu, p_max=None, n_core=256, n_tail=96, core_width=None, *,
              order=8, min_scale=None):
    """Composite Gauss-Legendre grid on [0, p_max] clustered at sqrt(mu).

    Inside ``|p - sqrt(mu)| <= core_width`` the panel edges sit at distances
    ``min_scale * r^j`` from the Fermi radius on both sides, with
    ``n_core / (2 order)`` panels per side. The outer regions get about
    ``n_tail / order`` panels, also graded toward the core, and sqrt(2 mu) is
    always an edge.
    """
    if not mu > 0:
        raise DomainError("mu must be positive")
    kf = math.sqrt(mu)
    p_max = 4.0 * kf if p_max is None else float(p_max)
    core_width = 0.25 * kf if core_width is None else float(core_width)
    if not p_max > math.sqrt(2.0 * mu):
        raise DomainError("p_max must exceed sqrt(2 mu)")
    if n_core < 8 or n_tail < 8:
        raise DomainError("n_core and n_tail must be >= 8")
    if not 0 < core_width < kf or kf + core_width >= p_max:
        raise DomainError("core_width must satisfy 0 < core_width < sqrt(mu) and "
                          "sqrt(mu) + core_width < p_max")
    if order < 2:
        raise DomainError("order must be >= 2")
    min_scale = 1e-6 * core_width if min_scale is None else float(min_scale)
    if not 0 < min_scale < core_width:
        raise DomainError("min_scale must lie in (0, core_width)")

    per_side = max(1, n_core // (2 * order))
    if per_side == 1:
        dist = np.array([0.0, core_width])
    else:
        dist = np.concatenate([[0.0], _geometric(min_scale, core_width, per_side - 1)])

    n_tail_panels = max(2, n_tail // order)
    lw = math.log(kf / core_width)
    rw = math.log((p_max - kf) / core_width)
    n_left = max(1, round(n_tail_panels * lw / (lw + rw)))
    n_right = max(1, n_tail_panels - n_left)
    left = kf - _geometric(core_width, kf, n_left)
    left[-1] = 0.0
    right = kf + _geometric(core_width, p_max - kf, n_right)
    right[-1] = p_max

    edges = np.unique(np.concatenate([left, kf - dist, kf + dist, right,
                                      [math.sqrt(2.0 * mu)]]))
    x, w = gauss_legendre(order)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (lo + hi))[:, None] + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    desc = (f"gauss-legendre order {order}; {per_side} panels per side within "
            f"{core_width:g} of sqrt(mu), innermost {min_scale:g}; "
            f"{n_left}+{n_right} outer panels")
    nodes = nodes.ravel()
    weights = weights.ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return RadialGrid(nodes, weights, float(mu), p_max, desc)


def _kernel_for(pot, l, grid):
    key = (pot.name, tuple(sorted(pot.params.items())), l)
    W = grid._cache.get(key)
    if W is None:
        W = kernel_matrix(pot, l, grid.nodes)
        W.setflags(write=False)
        grid._cache[key] = W
    return W


def _coupling_matrix(pot, lam, l, grid):
    """M_ij with G(Delta)_i = sum_j M_ij Delta_j / K_j."""
    d = pot.dim
    W = _kernel_for(pot, l, grid)
    return (-lam * (2.0 * math.pi) ** (-d / 2.0)) * W * grid.measure(d)[None, :]


# --------------------------------------------------------------- solutions

@dataclass(frozen=True, eq=False)
class GapSolution:
    grid: RadialGrid
    delta: np.ndarray
    potential: object
    lam: float
    temperature: float
    channel: int
    converged: bool
    iterations: int
    residual_norm: float
    tol: float = 0.0

    @property
    def mu(self):
        return self.grid.mu

    def interpolant(self):
        return PchipInterpolator(self.grid.nodes, self.delta, extrapolate=True)

    def at_fermi(self):
        """Delta(sqrt(mu)) by monotone cubic interpolation."""
        return float(self.interpolant()(self.grid.kf))

    @property
    def is_zero(self):
        return not np.any(self.delta)


def gap_map(M, xi, delta, T):
    return M @ (delta / k_t_delta(xi, delta, T))


def _sym_linear(M_sym_base, sqrt_w, xi, T):
    s = sqrt_w / np.sqrt(k_t_delta(xi, 0.0, T))
    return M_sym_base * s[:, None] * s[None, :]


def _top_eigenvalue(A, nonneg, cfg):
    if nonneg:
        v = np.ones(A.shape[0])
        v /= np.linalg.norm(v)
        lam_old = 0.0
        for _ in range(cfg.power_max_iter):
            u = A @ v
            lam_new = float(v @ u)
            nu = np.linalg.norm(u)
            if nu == 0.0:
                return 0.0, v
            v = u / nu
            if abs(lam_new - lam_old) <= cfg.eig_tol * max(abs(lam_new), 1.0):
                return float(v @ (A @ v)), v
            lam_old = lam_new
    vals, vecs = eigh(A, subset_by_index=[A.shape[0] - 1, A.shape[0] - 1])
    return float(vals[0]), vecs[:, 0]


class _Linearized:
    """Largest eigenvalue of the symmetrized linear operator as a function of T."""

    def __init__(self, pot, lam, l, grid, cfg):
        d = pot.dim
        W = _kernel_for(pot, l, grid)
        self.base = (-lam * (2.0 * math.pi) ** (-d / 2.0)) * W
        self.sqrt_w = np.sqrt(grid.measure(d))
        self.xi = grid.nodes ** 2 - grid.mu
        self.nonneg = bool(np.all(self.base >= 0.0))
        self.cfg = cfg

    def matrix(self, T):
        return _sym_linear(self.base, self.sqrt_w, self.xi, T)

    def top(self, T):
        return _top_eigenvalue(self.matrix(T), self.nonneg, self.cfg)


def _anderson_solve(M, xi, T, x0, cfg):
    """Damped fixed point with Anderson mixing; returns (x, residual, iterations, ok)."""
    alpha = cfg.damping
    m = cfg.anderson_depth
    x = x0.copy()
    X_hist, F_hist = [], []
    best = (math.inf, x.copy())
    for it in range(1, cfg.max_iter + 1):
        f = gap_map(M, xi, x, T) - x
        rn = float(np.max(np.abs(f)))
        if rn < best[0]:
            best = (rn, x.copy())
        if rn <= cfg.tol:
            return x, rn, it, True
        if not np.isfinite(rn):
            X_hist.clear()
            F_hist.clear()
            x = best[1].copy()
            continue
        X_hist.append(x.copy())
        F_hist.append(f.copy())
        if len(X_hist) > m + 1:
            X_hist.pop(0)
            F_hist.pop(0)
        step = alpha * f
        if m > 0 and len(X_hist) > 1:
            dX = np.diff(np.array(X_hist), axis=0).T
            dF = np.diff(np.array(F_hist), axis=0).T
            gamma, *_ = np.linalg.lstsq(dF, f, rcond=None)
            step = step - (dX + alpha * dF) @ gamma
        x = x + step
        # a large residual jump means the mixing extrapolated badly
        if rn > 10.0 * best[0]:
            X_hist.clear()
            F_hist.clear()
    x = best[1]
    f = gap_map(M, xi, x, T) - x
    return x, float(np.max(np.abs(f))), cfg.max_iter, False


def solve_gap(pot, lam, T, channel=0, grid=None, cfg=None, *, tc=None, init=None):
    """Solve the discretized gap equation at temperature T in one channel.

    Returns the zero solution when the linearized operator has no eigenvalue
    above one, i.e. when T is at or above the channel's critical temperature.
    Otherwise iterates ``Delta <- Delta + damping * (G(Delta) - Delta)`` with
    Anderson mixing until ``sup |Delta - G(Delta)| <= cfg.tol``.
    """
    if grid is None:
        raise DomainError("solve_gap needs a RadialGrid")
    cfg = SolverConfig() if cfg is None else cfg
    if not lam > 0:
        raise DomainError("lambda must be positive")
    if T < 0:
        raise DomainError("temperature must be >= 0")
    n = grid.size
    xi = grid.nodes ** 2 - grid.mu
    if T > 0:
        top, _ = _Linearized(pot, lam, channel, grid, cfg).top(T)
        if top <= 1.0:
            return GapSolution(grid, np.zeros(n), pot, lam, T, channel, True, 0, 0.0, cfg.tol)
    M = _coupling_matrix(pot, lam, channel, grid)
    if init is None:
        if tc is not None and T < tc:
            scale = tc * max(f_bcs(math.sqrt(1.0 - T / tc)), 1e-3)
        else:
            scale = 0.1 * grid.mu
        W = _kernel_for(pot, channel, grid)
        i_kf = int(np.argmin(np.abs(grid.nodes - grid.kf)))
        col = W[:, i_kf]
        x0 = scale * col / col[i_kf]
    else:
        x0 = np.asarray(init, dtype=float).copy()
        if x0.shape != (n,):
            raise DomainError("init must have one value per grid node")
    x, rn, its, ok = _anderson_solve(M, xi, T, x0, cfg)
    if ok and np.max(np.abs(x)) <= 1e-8 * np.max(np.abs(x0)):
        # collapsed onto the trivial fixed point; retry without mixing
        x, rn, its, ok = _anderson_solve(M, xi, T, x0, cfg.with_(anderson_depth=0))
    i_kf = int(np.argmin(np.abs(grid.nodes - grid.kf)))
    if x[i_kf] < 0:
        x = -x
    x.setflags(write=False)
    sol = GapSolution(grid, x, pot, lam, T, channel, ok, its, rn, cfg.tol)
    if not ok:
        raise NonConvergenceError(
            f"gap iteration stalled at residual {rn:.3e} after {its} steps", best=sol)
    return sol


def gap_residual(sol):
    """sup over nodes of |Delta - G(Delta)| recomputed from scratch."""
    M = _coupling_matrix(sol.potential, sol.lam, sol.channel, sol.grid)
    xi = sol.grid.nodes ** 2 - sol.grid.mu
    return float(np.max(np.abs(sol.delta - gap_map(M, xi, sol.delta, sol.temperature))))


# ------------------------------------------------------ critical temperature

@dataclass(frozen=True)
class TcResult:
    tc: float
    channel: int
    eigenvalue_at_tc: float
    tc_per_channel: dict

    @property
    def runner_up(self):
        rest = {l: t for l, t in self.tc_per_channel.items() if l != self.channel}
        if not rest:
            return None, 0.0
        l = max(rest, key=lambda k: (rest[k], -k))
        return l, rest[l]


def tc_guess(pot, lam, mu, l):
    """Weak-coupling estimate mu * exp(1 / (lam e_l mu^(d/2 - 1))), or None."""
    e = channel_eigenvalue(pot, mu, l)
    if not e < 0:
        return None
    return mu * math.exp(1.0 / (lam * e * mu ** (pot.dim / 2.0 - 1.0)))


def _channel_tc(lin, guess, mu, cfg):
    floor = cfg.t_floor * mu

    def f(log_t):
        return lin.top(math.exp(log_t))[0] - 1.0

    if guess is None or not guess > floor:
        guess = max(floor * 1e3, 1e-3 * mu)
    fac = cfg.tc_bracket_factor
    lo, hi = max(guess / fac, floor), guess * fac
    f_lo, f_hi = f(math.log(lo)), f(math.log(hi))
    while f_hi > 0 and hi < 1e3 * mu:
        lo, f_lo = hi, f_hi
        hi *= fac
        f_hi = f(math.log(hi))
    while f_lo < 0 and lo > floor:
        hi, f_hi = lo, f_lo
        lo = max(lo / fac, floor)
        f_lo = f(math.log(lo))
    if f_lo < 0:
        raise NoSuperconductivityError(
            f"largest linearized eigenvalue stays below 1 down to T = {floor:.3e}")
    if f_hi > 0:
        raise NoSuperconductivityError("linearized eigenvalue exceeds 1 at all sampled T")
    res = find_root(f, math.log(lo), math.log(hi), xtol=cfg.tc_rtol, ftol=0.0)
    tc = math.exp(res.root)
    return tc, lin.top(tc)[0]


def critical_temperature(pot, lam, channel=0, grid=None, cfg=None, *, l_max=None):
    """T at which the largest eigenvalue of the linearized operator crosses 1.

    With ``l_max`` every channel 0..l_max is solved and the overall critical
    temperature is the largest; channels without a transition above the
    temperature floor report 0.
    """
    if grid is None:
        raise DomainError("critical_temperature needs a RadialGrid")
    cfg = SolverConfig() if cfg is None else cfg
    if not lam > 0:
        raise DomainError("lambda must be positive")
    if l_max is None:
        channels = [channel]
    else:
        channels = [0] if pot.dim == 1 else list(range(l_max + 1))
    per, eig = {}, {}
    with warnings.catch_warnings():
        if len(channels) > 1:
            warnings.simplefilter("ignore", RuntimeWarning)
        for l in channels:
            lin = _Linearized(pot, lam, l, grid, cfg)
            try:
                per[l], eig[l] = _channel_tc(lin, tc_guess(pot, lam, grid.mu, l), grid.mu, cfg)
            except NoSuperconductivityError:
                if len(channels) == 1:
                    raise
                per[l], eig[l] = 0.0, float("nan")
    best = max(per, key=lambda l: (per[l], -l))
    if per[best] == 0.0:
        raise NoSuperconductivityError("no channel has a transition above the floor")
    return TcResult(per[best], best, eig[best], per)


# ------------------------------------------------------------- diagnostics

def energy_gap(sol):
    """inf_p sqrt((p^2 - mu)^2 + Delta(p)^2) with Delta interpolated monotonically."""
    grid = sol.grid
    mu = grid.mu
    if sol.is_zero:
        return 0.0
    interp = sol.interpolant()
    nodes = grid.nodes
    core = nodes[np.abs(nodes - grid.kf) <= 0.5 * grid.kf]
    fine = (core[:-1, None] + np.diff(core)[:, None] * (np.arange(10) / 10.0)[None, :]).ravel()
    pts = np.unique(np.concatenate([nodes, fine, [grid.kf]]))

    def disp(p):
        return np.sqrt((p * p - mu) ** 2 + interp(p) ** 2)

    vals = disp(pts)
    i = int(np.argmin(vals))
    best = float(vals[i])
    a = pts[max(i - 1, 0)]
    b = pts[min(i + 1, pts.size - 1)]
    if b > a:
        res = minimize_scalar(lambda p: float(disp(p)), bounds=(a, b), method="bounded",
                              options={"xatol": 1e-14 * max(1.0, grid.kf)})
        best = min(best, float(res.fun))
    return best


def m_integral(grid, T, delta, d, mu=None):
    """(1 / |S^(d-1)|) int_{|p| <= sqrt(2 mu)} dp / K_T^Delta(p) on the grid."""
    mu = grid.mu if mu is None else mu
    if abs(mu - grid.mu) > 1e-12 * grid.mu:
        raise DomainError("mu does not match the grid")
    if T < 0:
        raise DomainError("temperature must be >= 0")
    k = grid.n_inner
    q = grid.nodes[:k]
    dl = np.broadcast_to(np.asarray(delta, dtype=float), grid.nodes.shape)[:k]
    if T == 0 and not np.any(dl):
        raise DomainError("m(0, 0) diverges logarithmically")
    K = k_t_delta(q * q - mu, dl, T)
    return float(np.sum(grid.weights[:k] * q ** (d - 1) / K))


def nonuniversal_profile(sol):
    """Delta(p) / Delta(sqrt(mu)) at the grid nodes."""
    d0 = sol.at_fermi()
    if d0 == 0.0:
        raise DomainError("the gap vanishes at the Fermi radius")
    return np.asarray(sol.delta) / d0


def gamma_from_delta(sol):
    """Occupation 1/2 - (p^2 - mu) / (2 K_T^Delta(p)) at the grid nodes."""
    if not sol.temperature > 0:
        raise DomainError("gamma_from_delta needs T > 0")
    xi = sol.grid.nodes ** 2 - sol.grid.mu
    return 0.5 - xi / (2.0 * k_t_delta(xi, np.asarray(sol.delta), sol.temperature))


@dataclass(frozen=True)
class ProfileFunctionalCheck:
    difference: float
    bound: float
    g_sup: float
    g_slope_sup: float
    s1: float


def profile_functional_check(sol, tc):
    """Compare the gap integral with the real profile against the flat profile.

    In ``s = (p^2 - mu) / mu`` the profile is ``g(s) = Delta(p) / Delta(sqrt mu)``
    (extended by 1 for |s| > 1) and the measure weight is
    ``G(s) = (1 + s)^(d/2 - 1)`` on |s| <= 1, zero outside. ``difference`` is
    ``|J(g, G) - J(1, 1)|`` and ``bound`` the a priori estimate
    ``|G~|(4 tau + 4 tau_c + pi delta |g|) + 4 delta |g~| (1 + |g|)(1 + delta / 2 s1)``
    with ``g~ = (g - 1) / s`` and ``G~`` likewise.
    """
    grid = sol.grid
    mu = grid.mu
    d = sol.potential.dim
    d0 = sol.at_fermi()
    if d0 == 0.0:
        raise DomainError("the gap vanishes at the Fermi radius")
    if not sol.temperature > 0:
        raise DomainError("needs T > 0")
    tau, tau_c, delta = sol.temperature / mu, tc / mu, d0 / mu
    interp = sol.interpolant()

    def g(s):
        return interp(np.sqrt(mu * (1.0 + s))) / d0

    def bracket(s, x):
        return g0(np.hypot(s, x) / tau) / tau - g0(s / tau_c) / tau_c

    def inner(s):
        G = (1.0 + s) ** (d / 2.0 - 1.0) if d != 2 else 1.0
        return bracket(s, g(s) * delta) * G - bracket(s, delta)

    scale = min(tau, tau_c, delta)
    pts = [x for k in range(-60, 1) for x in (-(2.0 ** k), 2.0 ** k) if 2.0 ** k > 0.25 * scale]
    # 1 + s vanishes at s = -1; for d = 1 the weight has an integrable s^(-1/2) end
    lo = -1.0
    if d == 1:
        core = integrate_finite(inner, -0.5, 1.0, 1e-12, points=[x for x in pts if x > -0.5])
        end = integrate_finite(lambda v: 2.0 * v * inner(-1.0 + v * v), 0.0, math.sqrt(0.5),
                               1e-12)
        body = core.value + end.value
    else:
        body = integrate_finite(inner, lo, 1.0, 1e-12, points=[x for x in pts if x > lo]).value
    tail = integrate_semi_infinite(lambda s: bracket(s, delta), 1.0, 1e-14).value
    diff = abs(body - 2.0 * tail)

    k = grid.n_inner
    s_nodes = grid.nodes[:k] ** 2 / mu - 1.0
    g_nodes = np.asarray(sol.delta[:k]) / d0
    g_sup = max(1.0, float(np.max(np.abs(g_nodes))))
    off = np.abs(s_nodes) > 1e-12
    g_slope = float(np.max(np.abs((g_nodes[off] - 1.0) / s_nodes[off])))
    low = np.abs(s_nodes[g_nodes <= 0.5])
    s1 = float(low.min()) if low.size else math.inf
    # sup over s of |(G(s) - 1) / s|: 1 outside |s| <= 1, and on [-1, 1] attained at s = -1
    if d == 1:
        G_slope = math.inf
    else:
        ss = np.linspace(-1.0, 1.0, 4001)
        ss = ss[ss != 0.0]
        G_slope = max(1.0, float(np.max(np.abs(((1.0 + ss) ** (d / 2.0 - 1.0) - 1.0) / ss))))
    bound = (G_slope * (4.0 * tau + 4.0 * tau_c + math.pi * delta * g_sup)
             + 4.0 * delta * g_slope * (1.0 + g_sup) * (1.0 + delta / (2.0 * s1)))
    return ProfileFunctionalCheck(diff, bound, g_sup, g_slope, s1)


def zero_solution(pot, lam, T, channel, grid):
    n = grid.size
    return GapSolution(grid, np.zeros(n), pot, lam, T, channel, True, 0, 0.0)


# ------------------------------------------------------------ universality

@dataclass(frozen=True)
class UniversalityRow:
    lam: float
    tc: float
    h: float
    temperature: float
    xi: float
    delta_fermi: float
    f_bcs: float
    ratio: float
    residual_norm: float
    converged: bool
    outside_regime: bool


@dataclass(frozen=True)
class UniversalityReport:
    rows: tuple
    max_deviation: dict
    tc: dict

    columns = ("lambda", "tc", "h", "temperature", "xi", "delta_fermi", "f_bcs",
               "ratio", "residual_norm", "converged", "outside_regime")

    def table(self):
        return [[r.lam, r.tc, r.h, r.temperature, r.xi, r.delta_fermi, r.f_bcs, r.ratio,
                 r.residual_norm, int(r.converged), int(r.outside_regime)] for r in self.rows]


def universality_point(pot, lam, tc, h, channel, grid, cfg, init=None, t_floor=0.0):
    T = tc * (1.0 - h * h)
    sol = solve_gap(pot, lam, T, channel, grid, cfg, tc=tc, init=init)
    xi = energy_gap(sol)
    f = f_bcs(h)
    row = UniversalityRow(lam, tc, h, T, xi, sol.at_fermi(), f, xi / (tc * f),
                          sol.residual_norm, sol.converged, T <= t_floor)
    return row, sol


def universality_report(pot, lambda_list, h_grid, channel=0, grid=None, cfg=None, *,
                        tc_values=None, t_tilde=None):
    """Ratio Xi / (T_c f_bcs(h)) across couplings and reduced temperatures.

    ``t_tilde`` (map lambda -> temperature) marks rows at or below the
    runner-up channel's critical temperature as outside the proven regime;
    those rows are excluded from ``max_deviation``.
    """
    cfg = SolverConfig() if cfg is None else cfg
    hs = sorted(float(h) for h in h_grid)
    if not hs or hs[0] <= 0 or hs[-1] > 1:
        raise DomainError("h_grid must lie in (0, 1]")
    rows, dev, tcs = [], {}, {}
    for lam in lambda_list:
        if tc_values is not None and lam in tc_values:
            tc = tc_values[lam]
        else:
            tc = critical_temperature(pot, lam, channel, grid, cfg).tc
        tcs[lam] = tc
        floor = 0.0 if t_tilde is None else t_tilde.get(lam, 0.0)
        worst = 0.0
        for h in hs:
            row, _ = universality_point(pot, lam, tc, h, channel, grid, cfg, None, floor)
            rows.append(row)
            if not row.outside_regime:
                worst = max(worst, abs(row.ratio - 1.0))
        dev[lam] = worst
    return UniversalityReport(tuple(rows), dev, tcs)
