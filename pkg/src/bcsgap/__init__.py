"""Weak-coupling BCS gap equations: the universal gap curve, shell model and full radial solver."""

from .config import SolverConfig
from .errors import (
    BcsGapError,
    BracketError,
    DomainError,
    NonConvergenceError,
    NoSolutionError,
    NoSuperconductivityError,
)
from .gap_solver import (
    GapSolution,
    RadialGrid,
    TcResult,
    critical_temperature,
    energy_gap,
    gamma_from_delta,
    m_integral,
    make_grid,
    nonuniversal_profile,
    profile_functional_check,
    solve_gap,
    universality_report,
)
from .gl_theory import (
    GlCoefficients,
    GroundStateA0,
    cuniv_ratio,
    gl_coefficients,
    gl_ratio,
    ground_state_a0,
    psi_gl,
)
from .model_bcs import ModelParams, ModelSolution, delta_model, delta_ode_rhs, delta_ratio_curve, tc_model
from .potentials import (
    ChannelSpectrum,
    RadialPotential,
    angular_kernel,
    catalog,
    channel_eigenvalue,
    channel_spectrum,
    make_potential,
    vhat,
)
from .universal import (
    UniversalCurveTable,
    c_lm,
    c_univ,
    f_bcs,
    f_bcs_derivative,
    f_bcs_lm,
    invert_with_residual,
    tabulate,
    universal_integral,
)

__version__ = "0.1.0"
