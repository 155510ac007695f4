"""stringeig: Dirichlet spectra of -y'' = lambda rho(x) y on [0, 1].

A Pruefer-phase shooting solver for string densities, an independent
finite-difference oracle, the Legendre substitution for reduced
Sturm-Liouville problems -(p y')' = lambda rho y, and a verification
harness for the spectral inequalities of concave densities (eigenvalue
ratio and gap lower bounds, the eigenvalue perturbation formula, the
polynomial boundary identity, homotopy monotonicity of eigenvalue ratios,
and zero interlacing).
"""

from .density import (
    BlendDensity,
    ConstantDensity,
    Density,
    DensityError,
    HomotopyFamily,
    LinearDensity,
    PiecewiseLinearDensity,
    ProductDensity,
    QuadraticDensity,
    blend,
    density_max,
    from_json,
    hat_interpolant,
    is_concave,
    make_constant,
    make_linear,
    make_piecewise_linear,
    make_product,
    make_quadratic,
    reflected,
)
from .oracle import (
    FdProblem,
    OracleError,
    build_problem,
    fd_eigenvalues,
    fd_reference,
    fd_sl_eigenvalues,
    fd_sl_reference,
    richardson,
)
from .prufer import (
    ConsistencyError,
    Eigenpair,
    PruferState,
    SolverError,
    Spectrum,
    eigenfunction,
    eigenvalue,
    prufer_terminal_angle,
    prufer_trace,
    spectrum,
)
from .transforms import LegendreMap, MappedDensity, legendre_map, sl_eigenvalue
from .verify import (
    CrossingAnalysis,
    VerificationReport,
    check_gap_bound,
    check_identity,
    check_keller,
    check_ratio_bound,
    crossing_analysis,
    homotopy_monotonicity,
    huang_identity_residual,
    interlacing_check,
    keller_derivative,
    linear_family_monotonicity,
    random_concave_corpus,
    random_sl_pairs,
    ratio_derivative,
    reference_corpus,
    run_claims,
)

__version__ = "0.1.0"
