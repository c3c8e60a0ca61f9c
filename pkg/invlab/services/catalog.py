# invlab/services/catalog.py
"""
Turns validated specs into domain objects.
"""

import numpy as np

from invlab.core.errors import InvalidInputError
from invlab.schemas.specs import (
    ExponentialPolynomialSpec,
    GroupSpec,
    PointMassSpec,
    RadialSpec,
    SyntheticSpec,
    to_complex,
)
from invlab.services.distributions import Atom, PointMassDistribution
from invlab.services.entire_fn import ExponentialPolynomial
from invlab.services.group_invariance import FiniteOrthogonalGroup, generate, named_group
from invlab.services.rank_one import RadialDistribution, cosh_power_profile, smooth_bump_profile
from invlab.services.slow_decrease import constant_symbol, laplacian_symbol, super_decaying_symbol

_SYNTHETIC = {
    "constant": lambda spec: constant_symbol(spec.dimension, spec.value),
    "laplacian": lambda spec: laplacian_symbol(spec.dimension),
    "super_decaying": lambda spec: super_decaying_symbol(spec.dimension),
}


def build_function(spec):
    if isinstance(spec, PointMassSpec):
        atoms = tuple(
            Atom(to_complex(a.coeff), tuple(a.deriv), tuple(float(p) for p in a.point)) for a in spec.atoms
        )
        return PointMassDistribution(spec.dimension, atoms)
    if isinstance(spec, ExponentialPolynomialSpec):
        return ExponentialPolynomial.from_document([t.model_dump() for t in spec.terms], spec.dimension)
    if isinstance(spec, SyntheticSpec):
        return _SYNTHETIC[spec.name](spec)
    if isinstance(spec, RadialSpec):
        density = None
        if spec.density is not None:
            d = spec.density
            profile = cosh_power_profile(d.radius, d.power) if d.profile == "cosh_power" else smooth_bump_profile(d.radius)
            density = RadialDistribution.bump(profile).scale(d.scale).density if d.scale != 1.0 else profile
        return RadialDistribution(tuple((to_complex(a.coeff), a.power) for a in spec.atoms), density)
    raise InvalidInputError(f"Unsupported spec {type(spec).__name__}")


def build_group(spec: GroupSpec, dimension: int) -> FiniteOrthogonalGroup:
    if spec.generators:
        group = generate([np.asarray(g, dtype=float) for g in spec.generators])
        if group.dimension != dimension:
            raise InvalidInputError(f"Group acts on R^{group.dimension}, function lives on R^{dimension}")
        return group
    return named_group(spec.name or "trivial", dimension)


def spec_dimension(obj) -> int:
    if isinstance(obj, RadialDistribution):
        return 1
    return int(getattr(obj, "dimension", 1))
