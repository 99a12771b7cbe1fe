"""Point-interaction spectra of the Robin half-line, Coulomb and isotropic
oscillator systems, and the boundary-anomaly term of the generalized
hypervirial theorem, including the cutoff-regularized Coulomb study."""

from .models import (
    DIRICHLET,
    DirichletLimit,
    EigenState,
    IntegrityError,
    ModelKind,
    ModelSpec,
    NonConvergenceError,
    PhysicalScales,
    eval_eigenfunction,
    f_coulomb,
    f_harmonic,
    normalization_constant,
    robin_free_eigenstate,
    solve_coulomb_eigenvalues,
    solve_oscillator_eigenvalues,
)
from .quad import QuadResult, ToleranceNotMet, integrate_cutoff, integrate_semi_infinite
from .specfun import (
    ConvergenceError,
    DomainError,
    PoleError,
    SpecFunResult,
    digamma,
    gamma,
    tricomi_u,
    trigamma,
    whittaker_w,
    whittaker_w_dz,
)
from .virial import (
    CutoffStudy,
    Generator,
    Method,
    VirialReport,
    anomaly_boundary_term,
    anomaly_coulomb_regularized,
    anomaly_oscillator_closed,
    potential_expectation,
    verify,
    whittaker_antiderivative,
)

__version__ = "0.1.0"
