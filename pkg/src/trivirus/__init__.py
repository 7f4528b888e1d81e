"""Competitive multi-virus SIS dynamics on networks.

Library layout:

    model         parameter/state types, vector field, Jacobian
    spectral      Perron radii, Metzler abscissas, symmetric spectra
    equilibria    endemic points, boundary/line/plane equilibrium families
    stability     spectral and Lyapunov stability classifiers
    monotonicity  signed Jacobian graph and balance detection
    simulate      adaptive integration with invariant-domain monitoring
    scenarios     declarative JSON scenario schema and built-in presets
    cli           command-line front end (analyze/simulate/example/...)
"""

__version__ = "0.1.0"

from .equilibria import (
    EquilibriumDescriptor,
    LineConstruction,
    boundary_equilibria,
    classify_equilibrium,
    construct_line_system,
    find_coexistence,
    line_point,
    plane_projection,
    single_virus_endemic,
)
from .model import (
    MultiVirusSystem,
    SystemState,
    build_system,
    in_domain,
    jacobian,
    vector_field,
)
from .monotonicity import (
    ConsistencyVerdict,
    SignedGraph,
    is_consistent,
    signed_jacobian_graph,
)
from .simulate import (
    ConvergenceReport,
    IntegratorOptions,
    Trajectory,
    detect_convergence,
    integrate,
    random_initial_condition,
    write_trajectory_csv,
)
from .spectral import (
    PerronTriple,
    is_irreducible,
    is_positive_semidefinite,
    perron,
    spectral_abscissa_metzler,
    symmetric_eigenvalues,
)
from .stability import (
    BoundaryVerdict,
    DfeReport,
    LineVerdict,
    LyapunovCertificate,
    boundary_stability,
    check_identical_viruses,
    dfe_report,
    line_stability,
    lyapunov_certificate,
    lyapunov_trace,
)

__all__ = [
    "BoundaryVerdict",
    "ConsistencyVerdict",
    "ConvergenceReport",
    "DfeReport",
    "EquilibriumDescriptor",
    "IntegratorOptions",
    "LineConstruction",
    "LineVerdict",
    "LyapunovCertificate",
    "MultiVirusSystem",
    "PerronTriple",
    "SignedGraph",
    "SystemState",
    "Trajectory",
    "boundary_equilibria",
    "boundary_stability",
    "build_system",
    "check_identical_viruses",
    "classify_equilibrium",
    "construct_line_system",
    "detect_convergence",
    "dfe_report",
    "find_coexistence",
    "in_domain",
    "integrate",
    "is_consistent",
    "is_irreducible",
    "is_positive_semidefinite",
    "jacobian",
    "line_point",
    "line_stability",
    "lyapunov_certificate",
    "lyapunov_trace",
    "perron",
    "plane_projection",
    "random_initial_condition",
    "signed_jacobian_graph",
    "single_virus_endemic",
    "spectral_abscissa_metzler",
    "symmetric_eigenvalues",
    "vector_field",
    "write_trajectory_csv",
]
