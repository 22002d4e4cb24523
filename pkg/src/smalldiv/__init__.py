"""Small-divisor computations in one complex variable and on the torus.

Continued fractions, Brjuno and diophantine classification, formal
linearization of germs, Davie's functions, Yoccoz's function for the
quadratic family and the cohomological equation on T^n.
"""

from .brjuno import (
    BrjunoValue,
    DiophantineClass,
    b_sigma,
    brjuno_periodic_exact,
    brjuno_quotient_sum,
    brjuno_series,
    diophantine_test,
)
from .contfrac import (
    ContinuedFractionTable,
    branch_interval,
    check_invariants,
    dist_to_integers,
    expand_cf,
    is_best_approximation,
    table_covering,
)
from .davie import DavieTable, build_davie, check_davie, k_function, lemma53_check, small_divisor_step_check
from .errors import (
    DepthInsufficient,
    ExponentTooSmall,
    InvariantViolation,
    MalformedSpec,
    NonzeroMean,
    OrbitEscaped,
    PrecisionExhausted,
    PreconditionError,
    QPeriodic,
    RationalTerminated,
    ResonantDivisor,
    ResonantMode,
    SmallDivError,
    ToleranceUnreachable,
)
from .germs import (
    GermSeries,
    LinearizationSeries,
    cremer_germ,
    cremer_series,
    linearize,
    make_germ,
    quadratic_germ,
    radius_estimate,
    rotation_germ,
)
from .majorants import koenigs_bound_check, s_majorant, siegel_brjuno_check, sigma_majorant
from .multiplier import parse_multiplier
from .reals import parse_real
from .resonance import resonant_normal_form, root_of_unity_check
from .torus import (
    D_mu,
    FourierField,
    FrequencyVector,
    fundamental_solution_coeffs,
    growth_classify,
    norm_estimate,
    parse_frequency,
    solve_cohomological,
)
from .yoccoz import (
    birkhoff_radius,
    critical_orbit,
    grid_emit,
    quadratic_linearization,
    radial_limit_estimate,
    u_iterate,
    u_series,
    u_value,
)

__version__ = "0.1.0"
