import hashlib
import json
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import Field, ValidationError, model_validator

from invlab.core.errors import ConfigError, InvalidInputError
from invlab.schemas.specs import StrictModel, load_function_spec, parse_group_spec

ScenarioName = Literal["check-invertibility", "witness-family", "rank-one", "fundamental-solution", "full-suite"]
SuiteName = Literal["projection-slice", "diagram", "radon", "dual"]


class ScenarioConfig(StrictModel):
    """
    One experiment run. Unknown keys are rejected and referenced spec files must exist and parse.
    """

    scenario: ScenarioName
    function: Optional[Path] = None
    mu: Optional[Path] = None
    group: str = "trivial"
    A: float = Field(1.0, gt=0)
    horizon: float = Field(1000.0, gt=0)
    jmax: int = Field(6, ge=1)
    epsilon: float = Field(1e-6, gt=0)
    grid: Optional[int] = Field(None, gt=0)
    suite: Optional[SuiteName] = None
    complex_search: bool = False
    output_dir: Optional[Path] = None
    seed: Optional[int] = None

    @model_validator(mode="after")
    def _check_references(self):
        for key in ("function", "mu"):
            path = getattr(self, key)
            if path is not None:
                try:
                    load_function_spec(path)
                except InvalidInputError as e:
                    raise ValueError(f"{key}: {e.detail}") from e
        try:
            parse_group_spec(self.group)
        except InvalidInputError as e:
            raise ValueError(f"group: {e.detail}") from e
        if self.scenario in ("check-invertibility", "witness-family") and self.function is None:
            raise ValueError(f"function: required for {self.scenario}")
        if self.scenario == "fundamental-solution" and self.mu is None:
            raise ValueError("mu: required for fundamental-solution")
        if self.scenario == "rank-one" and self.suite is None:
            raise ValueError("suite: required for rank-one")
        return self

    def canonical_json(self) -> str:
        # output_dir does not enter the hash
        return json.dumps(self.model_dump(mode="json", exclude={"output_dir"}), sort_keys=True, separators=(",", ":"))

    def config_hash(self, length: int = 12) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:length]


def load_scenario(path: Path) -> ScenarioConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Scenario file not found: {path}")
    try:
        return ScenarioConfig.model_validate_json(path.read_text())
    except ValidationError as e:
        err = e.errors()[0]
        where = ".".join(str(p) for p in err["loc"]) or "<root>"
        raise ConfigError(f"Invalid scenario config at {where}: {err['msg']}") from e


class CheckOut(StrictModel):
    """One PASS/FAIL line of a run summary."""

    name: str
    passed: bool
    detail: str = ""


class RunSummaryOut(StrictModel):
    tool: str = "invlab"
    version: str
    config_hash: str
    scenario: str
    seed: int
    status: str
    checks: List[CheckOut] = []
    extra: dict = {}
