# invlab/services/group_invariance.py
"""
Finite subgroups of O(n), stored as explicit element lists.
"""

import logging
from dataclasses import dataclass
from functools import singledispatch
from typing import List, Sequence

import numpy as np
from scipy import ndimage
from scipy.spatial import KDTree

from invlab.core.config import DEFAULT_SEED, get_settings
from invlab.core.errors import (
    GenericPointError,
    GroupOrderExceededError,
    InvalidInputError,
    NonOrthogonalGeneratorError,
)
from invlab.services.distributions import Atom, GriddedDensity, PointMassDistribution
from invlab.services.entire_fn import poly_mul

logger = logging.getLogger(__name__)

ORTHO_TOL = 1e-12
DEDUP_TOL = 1e-9
MAX_GENERIC_DRAWS = 10_000


def _clean(matrix: np.ndarray) -> np.ndarray:
    return np.where(np.abs(matrix) < 1e-14, 0.0, matrix)


@dataclass(frozen=True, eq=False)
class FiniteOrthogonalGroup:
    elements: np.ndarray  # (order, n, n); identity first
    name: str = "custom"

    @property
    def dimension(self) -> int:
        return self.elements.shape[1]

    @property
    def order(self) -> int:
        return self.elements.shape[0]

    def __len__(self) -> int:
        return self.order

    def __iter__(self):
        return iter(self.elements)

    def act(self, points: np.ndarray) -> np.ndarray:
        """sigma . x for every element; shape (order, m, n) for an (m, n) input."""
        points = np.atleast_2d(points)
        return np.einsum("gij,mj->gmi", self.elements, points)


def _orthogonality_defect(M: np.ndarray) -> float:
    return float(np.linalg.norm(M.T @ M - np.eye(M.shape[0])))


def _index_of(elements: List[np.ndarray], candidate: np.ndarray) -> int:
    for i, M in enumerate(elements):
        if np.max(np.abs(M - candidate)) <= DEDUP_TOL:
            return i
    return -1


def generate(generators: Sequence[np.ndarray], cap: int | None = None, name: str = "custom") -> FiniteOrthogonalGroup:
    """
    Closure of the generators under multiplication (breadth-first).
    """
    cap = cap or get_settings().group_order_cap
    gens = [np.asarray(g, dtype=float) for g in generators]
    if not gens:
        raise InvalidInputError("At least one generator is required")
    n = gens[0].shape[0]
    for g in gens:
        if g.shape != (n, n):
            raise InvalidInputError(f"Generator of shape {g.shape} in a group of dimension {n}")
        if _orthogonality_defect(g) > ORTHO_TOL:
            raise NonOrthogonalGeneratorError(f"Generator is not orthogonal:\n{g}")

    elements = [np.eye(n)]
    frontier = [np.eye(n)]
    while frontier:
        new = []
        for M in frontier:
            for g in gens:
                P = _clean(g @ M)
                if _index_of(elements, P) < 0:
                    elements.append(P)
                    new.append(P)
                    if len(elements) > cap:
                        raise GroupOrderExceededError(f"Group order exceeds cap {cap}")
        frontier = new
    worst = max(_orthogonality_defect(M) for M in elements)
    if worst > ORTHO_TOL:
        raise NonOrthogonalGeneratorError(f"Closure drifted from orthogonality by {worst:.3e}")
    logger.debug("Generated group %s of order %d", name, len(elements))
    return FiniteOrthogonalGroup(np.stack(elements), name=name)


def rotation(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return _clean(np.array([[c, -s], [s, c]]))


def trivial_group(dimension: int) -> FiniteOrthogonalGroup:
    return FiniteOrthogonalGroup(np.eye(dimension)[None], name="trivial")


def sign_group(dimension: int) -> FiniteOrthogonalGroup:
    gens = []
    for axis in range(dimension):
        g = np.eye(dimension)
        g[axis, axis] = -1.0
        gens.append(g)
    return generate(gens, name="signs")


def dihedral_group(m: int) -> FiniteOrthogonalGroup:
    """Symmetries of the regular m-gon in R^2; order 2m."""
    if m < 1:
        raise InvalidInputError(f"Dihedral index must be positive, got {m}")
    return generate([rotation(2 * np.pi / m), np.diag([1.0, -1.0])], name=f"dihedral:{m}")


_WEYL = {"A2": 3, "B2": 4, "G2": 6}


def named_group(name: str, dimension: int) -> FiniteOrthogonalGroup:
    key = name.strip()
    if key == "trivial":
        return trivial_group(dimension)
    if key == "signs":
        return sign_group(dimension)
    if key in _WEYL or key.startswith("dihedral:"):
        if dimension != 2:
            raise InvalidInputError(f"Group {key} acts on R^2, not R^{dimension}")
        m = _WEYL[key] if key in _WEYL else int(key.split(":", 1)[1])
        group = dihedral_group(m)
        return FiniteOrthogonalGroup(group.elements, name=key)
    raise InvalidInputError(f"Unknown group name {name!r}")


def _merge_points(points: np.ndarray, tol: float = DEDUP_TOL) -> np.ndarray:
    """Representative index for each point; points within tol share the first occurrence."""
    tree = KDTree(points)
    rep = np.arange(len(points))
    for i in range(len(points)):
        if rep[i] != i:
            continue
        for j in tree.query_ball_point(points[i], r=tol):
            if j > i and rep[j] == j:
                rep[j] = i
    return rep


def orbit(W: FiniteOrthogonalGroup, x: Sequence[float]) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    images = W.act(x[None])[:, 0, :]
    rep = _merge_points(images)
    unique = images[np.unique(rep)]
    return unique[np.lexsort(unique.T[::-1])]


def stabilizer(W: FiniteOrthogonalGroup, x: Sequence[float], tol: float = DEDUP_TOL) -> FiniteOrthogonalGroup:
    x = np.asarray(x, dtype=float)
    images = W.act(x[None])[:, 0, :]
    keep = np.linalg.norm(images - x, axis=1) <= tol
    return FiniteOrthogonalGroup(W.elements[keep], name=f"stab({W.name})")


def generic_point(W: FiniteOrthogonalGroup, scale: float = 1.0, seed: int = DEFAULT_SEED) -> np.ndarray:
    """
    A point of norm `scale` moved by every non-identity element by at least 1e-6 * scale.
    """
    if scale <= 0:
        raise InvalidInputError("scale must be positive")
    rng = np.random.default_rng(seed)
    others = W.elements[1:]
    for draw in range(MAX_GENERIC_DRAWS):
        v = rng.standard_normal(W.dimension)
        norm = np.linalg.norm(v)
        if norm == 0:
            continue
        x = scale * v / norm
        if len(others) == 0:
            return x
        gaps = np.linalg.norm(np.einsum("gij,j->gi", others, x) - x, axis=1)
        if gaps.min() >= 1e-6 * scale:
            logger.debug("Generic point for %s found after %d draws", W.name, draw + 1)
            return x
    raise GenericPointError(f"No generic point for {W.name} after {MAX_GENERIC_DRAWS} draws")


# --- Symmetrization ---

def _push_atom(atom: Atom, sigma: np.ndarray) -> List[Atom]:
    """
    (sigma . S)(phi) = S(phi o sigma): the point moves to sigma p and d_m becomes
    sum_l sigma_lm d_l by the chain rule.
    """
    n = sigma.shape[0]
    poly = {(0,) * n: 1.0 + 0j}
    for m, power in enumerate(atom.deriv):
        linear = {tuple(1 if k == l else 0 for k in range(n)): complex(sigma[l, m])
                  for l in range(n) if sigma[l, m] != 0}
        for _ in range(power):
            poly = poly_mul(poly, linear)
    point = tuple(float(v) for v in _clean(sigma @ np.asarray(atom.point)))
    return [Atom(atom.coeff * c, exps, point) for exps, c in poly.items()]


def _snap(atoms: List[Atom], dimension: int) -> List[Atom]:
    if not atoms:
        return atoms
    points = np.array([a.point for a in atoms], dtype=float).reshape(-1, dimension)
    rep = _merge_points(points)
    snapped = [Atom(a.coeff, a.deriv, atoms[r].point) for a, r in zip(atoms, rep)]
    peak = max(abs(a.coeff) for a in snapped)
    return [a for a in snapped if abs(a.coeff) > 1e-14 * peak]


@singledispatch
def symmetrize(obj, W: FiniteOrthogonalGroup):
    """
    Average of the pullbacks over W. Plain callables are treated as functions of zeta:
    zeta -> (1/|W|) sum F(sigma zeta).
    """
    if not callable(obj):
        raise InvalidInputError(f"Cannot symmetrize {type(obj).__name__}")

    def averaged(zeta):
        zeta = np.atleast_2d(np.asarray(zeta, dtype=complex))
        total = sum(obj(zeta @ sigma.T) for sigma in W.elements)
        return total / W.order

    averaged.dimension = W.dimension
    return averaged


@symmetrize.register
def _(obj: PointMassDistribution, W: FiniteOrthogonalGroup) -> PointMassDistribution:
    if obj.dimension != W.dimension:
        raise InvalidInputError("Group and distribution dimensions differ")
    pushed = [
        Atom(a.coeff / W.order, a.deriv, a.point)
        for sigma in W.elements
        for atom in obj.atoms
        for a in _push_atom(atom, sigma)
    ]
    merged = PointMassDistribution(obj.dimension, tuple(_snap(pushed, obj.dimension)))
    return PointMassDistribution(obj.dimension, tuple(_snap(list(merged.atoms), obj.dimension)))


def _interpolate(samples: np.ndarray, coords: np.ndarray) -> np.ndarray:
    real = ndimage.map_coordinates(samples.real, coords, order=3, mode="constant", cval=0.0)
    imag = ndimage.map_coordinates(samples.imag, coords, order=3, mode="constant", cval=0.0)
    return real + 1j * imag


@symmetrize.register
def _(obj: GriddedDensity, W: FiniteOrthogonalGroup) -> GriddedDensity:
    if obj.dimension != W.dimension:
        raise InvalidInputError("Group and density dimensions differ")
    points = obj.mesh().reshape(-1, obj.dimension)
    lower, h = np.asarray(obj.lower), obj.spacing
    total = np.zeros(points.shape[0], dtype=complex)
    for sigma in W.elements:
        coords = ((points @ sigma.T - lower) / h - 0.5).T
        total += _interpolate(obj.samples, coords)
    return obj.like((total / W.order).reshape(obj.shape))


def is_invariant(obj, W: FiniteOrthogonalGroup, tol: float = 1e-10, points: np.ndarray | None = None) -> bool:
    """
    Compares obj with its symmetrization. Distributions are compared through their transforms
    on a fixed sample set.
    """
    if isinstance(obj, PointMassDistribution):
        if points is None:
            points = np.random.default_rng(DEFAULT_SEED).uniform(-3, 3, size=(64, obj.dimension))
        a = obj.fourier_transform()(points)
        b = symmetrize(obj, W).fourier_transform()(points)
        return bool(np.max(np.abs(a - b)) <= tol * max(1.0, float(np.abs(a).max())))
    if isinstance(obj, GriddedDensity):
        diff = np.abs(symmetrize(obj, W).samples - obj.samples).max()
        return bool(diff <= tol * max(1.0, float(np.abs(obj.samples).max())))
    if points is None:
        raise InvalidInputError("Invariance of a callable needs sample points")
    a = obj(points)
    b = symmetrize(obj, W)(points)
    return bool(np.max(np.abs(a - b)) <= tol * max(1.0, float(np.abs(a).max())))
