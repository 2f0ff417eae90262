"""Eigenvalue spacing for one-dimensional Schrödinger operators on [0, X].

The Prüfer phase kernels run from a compiled extension when it is built and
from a pure-Python copy otherwise; ``BACKEND`` names the one in use.
"""
from ._backend import NAME as BACKEND
from .bounds import (
    BoundReport,
    Criterion,
    criterion_holds,
    h_of,
    sharpness_probe,
    verify_bound,
    verify_theorem,
)
from .eigensolver import (
    AmbiguousCountError,
    EigenvalueSet,
    EigenWarning,
    MissedCrossingError,
    OracleConfig,
    crossing_count,
    eigenvalues_in_window,
    fd_oracle_eigenvalues,
)
from .norms import (
    NormReport,
    amalgam_norm,
    growth_check_strong,
    growth_check_weak,
    growth_exponent,
    holder_embedding_check,
    norm_report,
    weak_amalgam_norm,
    weak_lp_norm,
)
from .potential import (
    FAMILIES,
    DomainError,
    Potential,
    PotentialError,
    PotentialSpec,
    QuadratureError,
    build_potential,
    constant_on,
    cumulative_abs,
    unit_cell_masses,
)
from .prufer import (
    IntegrationError,
    PruferTrajectory,
    Tolerance,
    f_at,
    f_batch,
    integrate_phase,
    phase_difference_bound,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
