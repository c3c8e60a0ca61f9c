from invlab.schemas.scenario import CheckOut, RunSummaryOut, ScenarioConfig, load_scenario
from invlab.schemas.specs import (
    ExponentialPolynomialSpec,
    FunctionSpec,
    GroupSpec,
    PointMassSpec,
    RadialSpec,
    SyntheticSpec,
    load_function_spec,
    parse_function_spec,
    parse_group_spec,
)
