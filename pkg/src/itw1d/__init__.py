"""Interior transmission wavenumbers of a constant index of refraction on a 1D interval."""

from .analytic_solver import (
    CountMismatchError,
    HomotopyPath,
    NoBracketError,
    complex_pair_in,
    initial_slope,
    real_root_in,
    spectrum_analytic,
    trace_homotopy,
)
from .certify import (
    BoundaryZeroError,
    CertReport,
    EigenPair,
    NonIntegerWindingError,
    Rect,
    certify_spectrum,
    check_imag_bound,
    count_zeros_rect,
    eigenfunction_pair,
    eigenfunction_residual,
    zero_centroid_rect,
)
from .dispersion import (
    BetaFamily,
    Parity,
    eval_beta,
    eval_derivative,
    eval_factor,
    eval_physical,
    imag_bound,
)
from .limits import (
    BornRoot,
    CountingResult,
    UncertifiedInputError,
    born_asymptotic,
    born_leading_order,
    born_root,
    born_roots,
    counting,
    strong_even_limit,
    strong_odd_roots,
)
from .model import (
    Medium,
    RationalM,
    ScaledProblem,
    detect_rational,
    k_to_z,
    make_medium,
    normalize,
    problem_for,
    z_to_k,
)
from .rational_solver import (
    ClusteredRoot,
    FactorPolynomial,
    NonconvergenceError,
    build_polynomial,
    lift_roots,
    solve_polynomial,
    spectrum_rational,
)
from .roots import Root, Spectrum
from .strips import (
    AdjacentEmpty,
    AmbiguousStripError,
    ComplexPair,
    Quadruple,
    RealPair,
    Strip,
    StripClass,
    classify,
    floor_parity,
    strips_in_window,
)

__version__ = "0.1.0"
