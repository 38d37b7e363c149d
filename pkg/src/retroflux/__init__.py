"""Time-reversed influence growth model.

Closed forms and regime analysis for p'(t) = a*p(t) + b*p(-t), a mirror-system
RK4 integrator for the forced extension, least-squares parameter estimation
for observed influence series, and deterministic SVG figure rendering.
"""

from .analysis import (
    CorrelationResult,
    Dominance,
    SummaryRow,
    classify_regime,
    correlate,
    dominant_term,
    yearly_summary,
)
from .dataio import (
    ModelDocument,
    decode_model_document,
    encode_model_document,
    load_timeseries_csv,
    write_timeseries_csv,
)
from .errors import (
    AsymmetricDomainError,
    DegenerateSeriesError,
    EmptyBodyError,
    EmptyGridError,
    EmptySeriesError,
    InvalidStepError,
    MalformedHeaderError,
    MissingFieldError,
    NonMonotonicTimeError,
    NonNumericFieldError,
    NotExponentialError,
    OutOfRangeError,
    RetrofluxError,
    SingularNormalEquationsError,
    SolutionOverflowError,
    TooFewAlignedPointsError,
    TooFewPointsError,
    TypeMismatchError,
    UnknownFieldError,
    ZeroVarianceError,
)
from .fitting import (
    FitOptions,
    FitResult,
    finite_difference,
    fit,
    forecast,
    seed_parameters,
)
from .integrator import (
    ForcingSpec,
    GoodwillSpec,
    Trajectory,
    eval_forcing,
    goodwill_theta,
    integrate,
)
from .model import (
    REGIME_TOL,
    Coefficients,
    Discriminant,
    ModelParams,
    Regime,
    discriminant,
    eval_solution,
    eval_solution_derivative,
    fde_residual,
    solution_coefficients,
)
from .series import TimeSeries
from .svgplot import PlotSeries, PlotSpec, render_lineplot, render_sweep

__version__ = "0.1.0"
