"""Quantitative Korovkin-type approximation in Banach function spaces.

The package evaluates positive linear operators (Kantorovich polynomials
on ``[0, 1]``, Fejer means on ``[-pi, pi]``), norms in a family of Banach
function spaces, moduli of continuity, and both sides of the
Shisha-Mond and DeVore type error bounds.
"""

from .bounds import (
    BoundReport,
    Flavor,
    RateReport,
    devore_bound,
    fit_log_slope,
    mu_n,
    rate_sweep,
    second_moment_function,
    shisha_mond_bound,
    trig_bound,
)
from .errors import (
    DepthExceeded,
    InvalidFunction,
    InvalidOperator,
    InvalidSpace,
    KorovkinError,
    MissingDerivative,
    NonFiniteEvaluation,
    NonUnitalWithoutOne,
    NotPeriodic,
)
from .funcspace import (
    DEFAULT_QUADRATURE,
    PERIODIC_INTERVAL,
    UNIT_INTERVAL,
    FunctionHandle,
    QuadratureConfig,
    SampledFunction,
    constant,
    decreasing_rearrangement,
    integrate,
    integrate_cells,
    sample,
)
from .kernels import BACKEND
from .library import parse_function, parse_space
from .modulus import ModulusEstimate, modulus_of_continuity, modulus_profile
from .norms import (
    NormResult,
    SpaceKind,
    SpaceSpec,
    fundamental_constant,
    muckenhoupt_constant,
    norm,
    shift_deviation,
)
from .operators import (
    OperatorKind,
    OperatorSpec,
    apply,
    fejer_apply,
    image,
    kantorovich_apply,
    kantorovich_moment1,
    kantorovich_moment2,
    kantorovich_second_central,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
