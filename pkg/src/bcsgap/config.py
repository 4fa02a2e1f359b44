from dataclasses import dataclass, replace

from .errors import DomainError


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and caps shared by the gap and critical-temperature solvers.

    ``tol`` is the sup-norm bound on ``|delta - G(delta)|`` that marks a gap
    solution as converged. ``tc_rtol`` is the relative width at which the
    critical-temperature search stops.
    """

    tol: float = 1e-12
    quad_tol: float = 1e-10
    root_tol: float = 1e-13
    max_iter: int = 20000
    damping: float = 0.5
    anderson_depth: int = 4
    tc_rtol: float = 1e-11
    tc_bracket_factor: float = 50.0
    t_floor: float = 1e-14
    eig_tol: float = 1e-14
    power_max_iter: int = 5000
    p_max_factor: float = 4.0

    def __post_init__(self):
        for name in ("tol", "quad_tol", "root_tol", "tc_rtol", "eig_tol", "t_floor"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if not 0 < self.damping <= 1:
            raise DomainError("damping must lie in (0, 1]")
        if self.max_iter < 1 or self.power_max_iter < 1:
            raise DomainError("iteration caps must be >= 1")
        if self.anderson_depth < 0:
            raise DomainError("anderson_depth must be >= 0")
        if self.tc_bracket_factor <= 1:
            raise DomainError("tc_bracket_factor must exceed 1")

    def with_(self, **changes):
        return replace(self, **changes)
