from .GasBasics import (
    VERSION,
    BoundaryMode,
    Outcome,
    XValStatus,
    ExitCode,
    CriterionAdjustment,
    ODEAdjustment,
    FVAdjustment,
    defaultCriterion,
    defaultODE,
    tightODE,
    defaultFV,
    GdblowError,
    DomainError,
    ExpressionSyntaxError,
    UnknownIdentifierError,
    ArityError,
    EvaluationError,
    ScenarioError,
    SimulationBreakdown
)

from .GasState import GasParams, PrimitiveState, CharSpeeds, sound_speed, char_speeds, entropy
from .ProfileExpression import parse, serialize, eval_d
from .Profile import Profile, PointData, sample_profile, sample_point, preset_profile

from .ConditionSet import ConditionSet, ConditionFlags
from .Criterion import (
    Indicators,
    PointVerdict,
    GlobalVerdict,
    point_indicators,
    classify_point,
    classify_profile,
    classify_isentropic,
    classify_chaplygin,
    entropy_form_K,
    pressure_extrema
)

from .RiemannSlopes import PVector, RState, RayState, FirstIntegral, riemann_slopes, reduce_to_R, rhs_P, rhs_R, first_integral
from .RiemannODE import (
    Trajectory,
    integrate,
    integrate_P,
    integrate_ray,
    blowup_time_estimate,
    quadrature_blowup_time,
    chaplygin_solve,
    phase_portrait
)

from .EulerFV import GridState, init_grid, step, simulate
from .Scenario import Scenario, load_scenario, preset_scenario
from .ReportExporter import ReportExporter
from .CrossValidator import CrossValidator
