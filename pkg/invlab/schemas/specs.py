import json
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, field_validator

from invlab.core.errors import InvalidInputError

Complex = Union[float, Tuple[float, float]]


def to_complex(value: Complex) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    return complex(value[0], value[1])


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# --- Functions and distributions ---

class AtomIn(StrictModel):
    coeff: Complex = 1.0
    deriv: List[int]
    point: List[float]

    @field_validator("deriv")
    @classmethod
    def _nonnegative(cls, value: List[int]) -> List[int]:
        if any(d < 0 for d in value):
            raise ValueError("derivative orders must be nonnegative")
        return value


class PointMassSpec(StrictModel):
    kind: Literal["point_mass"]
    dimension: int = Field(..., ge=1)
    atoms: List[AtomIn]
    radial: Literal[False] = False


class PolyTermIn(StrictModel):
    exponents: List[int]
    coeff: Tuple[float, float]


class ExpTermIn(StrictModel):
    coeff: Tuple[float, float]
    poly: List[PolyTermIn]
    anchor: List[float]


class ExponentialPolynomialSpec(StrictModel):
    kind: Literal["exponential_polynomial"]
    dimension: int = Field(..., ge=1)
    terms: List[ExpTermIn]


class SyntheticSpec(StrictModel):
    kind: Literal["synthetic"]
    name: Literal["constant", "laplacian", "super_decaying"]
    dimension: int = Field(1, ge=1)
    value: float = 1.0


class RadialAtomIn(StrictModel):
    coeff: Complex = 1.0
    power: int = Field(0, ge=0)


class RadialDensityIn(StrictModel):
    profile: Literal["cosh_power", "smooth_bump"]
    radius: float = Field(..., gt=0)
    power: int = Field(8, ge=1)
    scale: float = 1.0


class RadialSpec(StrictModel):
    kind: Literal["radial"]
    radial: Literal[True] = True
    atoms: List[RadialAtomIn] = []
    density: Optional[RadialDensityIn] = None


FunctionSpec = Annotated[
    Union[PointMassSpec, ExponentialPolynomialSpec, SyntheticSpec, RadialSpec],
    Field(discriminator="kind"),
]

_function_adapter = TypeAdapter(FunctionSpec)


# --- Groups ---

class GroupSpec(StrictModel):
    name: Optional[str] = None
    dimension: int = Field(2, ge=1)
    generators: Optional[List[List[List[float]]]] = None

    @field_validator("generators")
    @classmethod
    def _square(cls, value):
        if value is not None:
            for g in value:
                if any(len(row) != len(g) for row in g):
                    raise ValueError("generators must be square matrices")
        return value


def _first_error(e: ValidationError) -> str:
    err = e.errors()[0]
    where = ".".join(str(p) for p in err["loc"]) or "<root>"
    return f"{where}: {err['msg']}"


def parse_function_spec(text: str) -> FunctionSpec:
    try:
        return _function_adapter.validate_json(text)
    except ValidationError as e:
        raise InvalidInputError(f"Invalid function spec at {_first_error(e)}") from e


def load_function_spec(path: Path) -> FunctionSpec:
    path = Path(path)
    if not path.exists():
        raise InvalidInputError(f"Spec file not found: {path}")
    return parse_function_spec(path.read_text())


def parse_group_spec(text: str) -> GroupSpec:
    """Accepts a bare name ("B2"), a JSON object, or a JSON list of generator matrices."""
    stripped = text.strip()
    if not stripped.startswith(("{", "[")):
        return GroupSpec(name=stripped)
    try:
        doc = json.loads(stripped)
        if isinstance(doc, list):
            doc = {"generators": doc, "dimension": len(doc[0]) if doc else 1}
        return GroupSpec.model_validate(doc)
    except (ValueError, ValidationError) as e:
        detail = _first_error(e) if isinstance(e, ValidationError) else str(e)
        raise InvalidInputError(f"Invalid group spec: {detail}") from e
