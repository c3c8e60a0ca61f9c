# invlab/services/distributions.py
"""
Compactly supported distributions on R^n in two representations:

- PointMassDistribution: finite sums of coeff * (derivative of a point mass)
- GriddedDensity: smooth densities sampled on a cell-centred box grid

An atom (c, alpha, p) acts on a test function by phi -> c * (d^alpha phi)(p), so its
Fourier transform is c * (-i zeta)^alpha * exp(-i <p, zeta>).
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Sequence, Tuple

import numpy as np
from numpy.polynomial import hermite
from scipy import ndimage, integrate, special
from scipy.spatial import ConvexHull, QhullError

from invlab.core.errors import GridTooSmallError, InvalidInputError
from invlab.services.entire_fn import ExponentialPolynomial, ExpTerm, monomial
from invlab.utils import gridio

logger = logging.getLogger(__name__)

HULL_TOL = 1e-9


# --- Atomic distributions ---

@dataclass(frozen=True)
class Atom:
    coeff: complex
    deriv: Tuple[int, ...]
    point: Tuple[float, ...]

    @property
    def order(self) -> int:
        return sum(self.deriv)


def _canonical(atoms: Iterable[Atom]) -> Tuple[Atom, ...]:
    merged = {}
    for atom in atoms:
        key = (atom.point, atom.deriv)
        merged[key] = merged.get(key, 0j) + complex(atom.coeff)
    return tuple(
        Atom(coeff, deriv, point)
        for (point, deriv), coeff in sorted(merged.items())
        if coeff != 0
    )


@dataclass(frozen=True)
class PointMassDistribution:
    dimension: int
    atoms: Tuple[Atom, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.dimension < 1:
            raise InvalidInputError("Dimension must be positive")
        for atom in self.atoms:
            if len(atom.point) != self.dimension or len(atom.deriv) != self.dimension:
                raise InvalidInputError(f"Atom {atom} does not match dimension {self.dimension}")
            if any(d < 0 for d in atom.deriv):
                raise InvalidInputError(f"Negative derivative index in {atom.deriv}")
        object.__setattr__(self, "atoms", _canonical(self.atoms))

    # constructors

    @classmethod
    def delta(cls, point: Sequence[float], coeff: complex = 1.0, deriv: Sequence[int] | None = None):
        point = tuple(float(p) for p in point)
        deriv = tuple(int(d) for d in deriv) if deriv is not None else (0,) * len(point)
        return cls(len(point), (Atom(complex(coeff), deriv, point),))

    @classmethod
    def laplacian_delta(cls, dimension: int, power: int = 1) -> "PointMassDistribution":
        """Delta^power applied to delta_0."""
        lap = cls(dimension, tuple(
            Atom(1.0, tuple(2 if m == axis else 0 for m in range(dimension)), (0.0,) * dimension)
            for axis in range(dimension)
        ))
        out = cls.delta((0.0,) * dimension)
        for _ in range(power):
            out = convolve(out, lap)
        return out

    # arithmetic

    def __add__(self, other: "PointMassDistribution") -> "PointMassDistribution":
        _check_dims(self, other)
        return PointMassDistribution(self.dimension, self.atoms + other.atoms)

    def __sub__(self, other: "PointMassDistribution") -> "PointMassDistribution":
        return self + other.scale(-1.0)

    def scale(self, factor: complex) -> "PointMassDistribution":
        return PointMassDistribution(
            self.dimension, tuple(Atom(a.coeff * factor, a.deriv, a.point) for a in self.atoms)
        )

    def __rmul__(self, factor: complex) -> "PointMassDistribution":
        return self.scale(factor)

    def derivative(self, alpha: Sequence[int]) -> "PointMassDistribution":
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.dimension:
            raise InvalidInputError("Derivative multi-index does not match dimension")
        return PointMassDistribution(self.dimension, tuple(
            Atom(a.coeff, tuple(x + y for x, y in zip(a.deriv, alpha)), a.point) for a in self.atoms
        ))

    def translate(self, offset: Sequence[float]) -> "PointMassDistribution":
        return convolve(self, PointMassDistribution.delta(offset))

    @property
    def points(self) -> np.ndarray:
        return np.array([a.point for a in self.atoms], dtype=float).reshape(-1, self.dimension)

    @property
    def is_real(self) -> bool:
        return all(complex(a.coeff).imag == 0 for a in self.atoms)

    def fourier_transform(self) -> ExponentialPolynomial:
        terms = tuple(
            ExpTerm(a.coeff * (-1j) ** a.order, monomial(a.deriv), a.point) for a in self.atoms
        )
        return ExponentialPolynomial(self.dimension, terms)

    def pair(self, test: "GaussianTest") -> complex:
        """<S, phi> for a test function exposing derivative(alpha, x)."""
        return complex(sum(a.coeff * test.derivative(a.deriv, np.asarray(a.point)) for a in self.atoms))


def _check_dims(S: PointMassDistribution, T: PointMassDistribution) -> None:
    if S.dimension != T.dimension:
        raise InvalidInputError(f"Dimension mismatch: {S.dimension} vs {T.dimension}")


def convolve(S: PointMassDistribution, T: PointMassDistribution) -> PointMassDistribution:
    _check_dims(S, T)
    atoms = [
        Atom(
            s.coeff * t.coeff,
            tuple(a + b for a, b in zip(s.deriv, t.deriv)),
            tuple(a + b for a, b in zip(s.point, t.point)),
        )
        for s, t in itertools.product(S.atoms, T.atoms)
    ]
    return PointMassDistribution(S.dimension, tuple(atoms))


def reflect(S: PointMassDistribution) -> PointMassDistribution:
    return PointMassDistribution(S.dimension, tuple(
        Atom(a.coeff * (-1) ** a.order, a.deriv, tuple(-p for p in a.point)) for a in S.atoms
    ))


# --- Supports ---

def _canonical_rows(points: np.ndarray) -> np.ndarray:
    if len(points) == 0:
        return points
    order = np.lexsort(points.T[::-1])
    return points[order]


def hull_vertices(points: np.ndarray) -> np.ndarray:
    """
    Vertices of the convex hull, lexicographically ordered. Lower-dimensional point sets are
    hulled inside their affine span.
    """
    points = np.unique(np.atleast_2d(np.asarray(points, dtype=float)), axis=0)
    if len(points) <= 1:
        return points
    n = points.shape[1]
    if n == 1:
        return np.array([[points.min()], [points.max()]])

    centre = points.mean(axis=0)
    _, sing, vt = np.linalg.svd(points - centre, full_matrices=False)
    rank = int(np.sum(sing > HULL_TOL * max(1.0, sing[0])))
    if rank == 0:
        return points[:1]
    coords = (points - centre) @ vt[:rank].T
    if rank == 1:
        idx = [int(np.argmin(coords[:, 0])), int(np.argmax(coords[:, 0]))]
    else:
        try:
            idx = ConvexHull(coords).vertices
        except QhullError as e:
            raise InvalidInputError(f"Convex hull failed: {e}") from e
    return _canonical_rows(points[np.asarray(idx)])


def support_hull(S: PointMassDistribution) -> np.ndarray:
    if not S.atoms:
        raise InvalidInputError("Support of the zero distribution is empty")
    return hull_vertices(S.points)


def minkowski_sum_hull(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    P, Q = np.atleast_2d(P), np.atleast_2d(Q)
    sums = (P[:, None, :] + Q[None, :, :]).reshape(-1, P.shape[1])
    return hull_vertices(sums)


def same_vertex_set(P: np.ndarray, Q: np.ndarray, tol: float = HULL_TOL) -> bool:
    P, Q = _canonical_rows(np.atleast_2d(P)), _canonical_rows(np.atleast_2d(Q))
    return P.shape == Q.shape and bool(np.all(np.abs(P - Q) <= tol))


# --- Gridded densities ---

def _is_power_of_two(k: int) -> bool:
    return k > 0 and (k & (k - 1)) == 0


@dataclass(frozen=True, eq=False)
class GriddedDensity:
    """
    Samples at cell centres x_k = lower + (k + 1/2) * h on the box [lower, upper].
    """

    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        if samples.ndim != len(self.lower) or samples.ndim != len(self.upper):
            raise InvalidInputError("Box bounds do not match sample dimension")
        if any(u <= l for l, u in zip(self.lower, self.upper)):
            raise InvalidInputError("Box upper bounds must exceed lower bounds")
        if not all(_is_power_of_two(k) for k in samples.shape):
            raise InvalidInputError(f"Grid sizes must be powers of two, got {samples.shape}")

    @property
    def dimension(self) -> int:
        return self.samples.ndim

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.samples.shape

    @property
    def spacing(self) -> np.ndarray:
        return (np.asarray(self.upper) - np.asarray(self.lower)) / np.asarray(self.shape)

    def axes(self) -> List[np.ndarray]:
        return [l + (np.arange(k) + 0.5) * h for l, k, h in zip(self.lower, self.shape, self.spacing)]

    def mesh(self) -> np.ndarray:
        """Grid points as an array of shape (*shape, n)."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], lower, upper, sizes,
                      require_compact: bool = True) -> "GriddedDensity":
        sizes = tuple(int(s) for s in np.broadcast_to(sizes, (len(lower),)))
        blank = cls(lower, upper, np.zeros(sizes, dtype=complex))
        pts = blank.mesh()
        values = np.asarray(fn(pts.reshape(-1, len(sizes))), dtype=complex).reshape(sizes)
        density = cls(lower, upper, values)
        if require_compact and density.boundary_leak() > 1e-8 * max(1.0, float(np.abs(values).max())):
            raise GridTooSmallError(
                "Density does not vanish on the box boundary", density.lower, density.upper
            )
        return density

    def boundary_leak(self) -> float:
        leak = 0.0
        for axis in range(self.dimension):
            for idx in (0, -1):
                leak = max(leak, float(np.abs(np.take(self.samples, idx, axis=axis)).max()))
        return leak

    def integral(self) -> complex:
        return complex(self.samples.sum() * np.prod(self.spacing))

    def like(self, samples: np.ndarray) -> "GriddedDensity":
        return GriddedDensity(self.lower, self.upper, samples)

    def frequency_axes(self) -> List[np.ndarray]:
        return [2 * np.pi * np.fft.fftfreq(k, d=h) for k, h in zip(self.shape, self.spacing)]

    def fourier_transform(self) -> Tuple[List[np.ndarray], np.ndarray]:
        """
        u*(xi) = integral u(x) exp(-i <x, xi>) dx on the FFT frequency grid (numpy fft order).
        """
        xi_axes = self.frequency_axes()
        values = np.fft.fftn(self.samples) * np.prod(self.spacing)
        for axis, (xi, l, h) in enumerate(zip(xi_axes, self.lower, self.spacing)):
            phase = np.exp(-1j * (l + 0.5 * h) * xi)
            shape = [1] * self.dimension
            shape[axis] = -1
            values = values * phase.reshape(shape)
        return xi_axes, values

    def to_bytes(self) -> bytes:
        return gridio.encode_grid(self.lower, self.upper, self.samples)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "GriddedDensity":
        lower, upper, samples = gridio.decode_grid(blob)
        return cls(lower, upper, samples)


_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def _correlate(a: np.ndarray, weights: np.ndarray, axis: int) -> np.ndarray:
    real = ndimage.correlate1d(a.real, weights, axis=axis, mode="constant", cval=0.0)
    imag = ndimage.correlate1d(a.imag, weights, axis=axis, mode="constant", cval=0.0)
    return real + 1j * imag


def finite_difference(samples: np.ndarray, alpha: Sequence[int], spacing: Sequence[float]) -> np.ndarray:
    """d^alpha by fourth-order centred stencils; zero outside the grid."""
    out = np.asarray(samples, dtype=complex)
    for axis, (order, h) in enumerate(zip(alpha, spacing)):
        for _ in range(order // 2):
            out = _correlate(out, _D2 / h ** 2, axis)
        if order % 2:
            out = _correlate(out, _D1 / h, axis)
    return out


def _shift(samples: np.ndarray, cells: np.ndarray) -> np.ndarray:
    rounded = np.round(cells)
    if np.allclose(cells, rounded, atol=1e-12):
        return np.roll(samples, tuple(int(c) for c in rounded), axis=tuple(range(samples.ndim)))
    shifted = ndimage.fourier_shift(np.fft.fftn(samples), cells)
    return np.fft.ifftn(shifted)


def _support_indices(samples: np.ndarray, rel_tol: float = 1e-12):
    mag = np.abs(samples)
    peak = mag.max() if mag.size else 0.0
    if peak == 0.0:
        return None
    nz = np.nonzero(mag > rel_tol * peak)
    return np.array([i.min() for i in nz]), np.array([i.max() for i in nz])


def convolve_density(f: GriddedDensity, T: PointMassDistribution) -> GriddedDensity:
    """
    (f * T)(x) = sum c * (-1)^|alpha| * (d^alpha f)(x - p), matching multiplication of the
    transform by c * (-i xi)^alpha * exp(-i <p, xi>).
    """
    if T.dimension != f.dimension:
        raise InvalidInputError(f"Dimension mismatch: {f.dimension} vs {T.dimension}")
    support = _support_indices(f.samples)
    result = np.zeros(f.shape, dtype=complex)
    if support is None:
        return f.like(result)
    lo, hi = support
    h = f.spacing
    shape = np.asarray(f.shape)
    for atom in T.atoms:
        margin = 2 * atom.order
        cells = np.asarray(atom.point) / h
        new_lo = lo - margin + np.floor(cells)
        new_hi = hi + margin + np.ceil(cells)
        if np.any(new_lo < 0) or np.any(new_hi > shape - 1):
            lower = np.asarray(f.lower)
            needed_lower = np.minimum(lower, lower + new_lo * h)
            needed_upper = np.maximum(np.asarray(f.upper), lower + (new_hi + 1) * h)
            logger.error("Shifted support leaves the grid for atom at %s", atom.point)
            raise GridTooSmallError(
                f"Grid too small for atom at {atom.point}; need box {needed_lower.tolist()} to {needed_upper.tolist()}",
                needed_lower, needed_upper,
            )
        derived = finite_difference(f.samples, atom.deriv, h) if atom.order else f.samples
        result += atom.coeff * (-1) ** atom.order * _shift(derived, cells)
    return f.like(result)


# --- Sobolev norms ---

@dataclass(frozen=True)
class SobolevNorm:
    index: float
    value: float


def _xi_squared(u: GriddedDensity) -> np.ndarray:
    grids = np.meshgrid(*u.frequency_axes(), indexing="ij")
    return sum(g ** 2 for g in grids)


def sobolev_norm(u: GriddedDensity, s: float) -> SobolevNorm:
    """||u||_(s)^2 = (2 pi)^-n integral (1 + |xi|^2)^s |u*(xi)|^2 dxi by FFT quadrature."""
    _, values = u.fourier_transform()
    d_xi = np.prod(2 * np.pi / (np.asarray(u.shape) * u.spacing))
    weight = (1.0 + _xi_squared(u)) ** s
    total = float(np.sum(weight * np.abs(values) ** 2) * d_xi) / (2 * np.pi) ** u.dimension
    return SobolevNorm(index=float(s), value=math.sqrt(max(total, 0.0)))


def sup_laplacian_power(u: GriddedDensity, k: int) -> float:
    """sup |Delta^k u| computed spectrally."""
    if k == 0:
        return float(np.abs(u.samples).max())
    symbol = (-_xi_squared(u)) ** k
    return float(np.abs(np.fft.ifftn(symbol * np.fft.fftn(u.samples))).max())


def sobolev_lemma_constant(n: int) -> float:
    """(2 pi)^(-n/2) * (integral over R^n of (1 + |xi|^2)^(-n))^(1/2)."""
    sphere = 2 * np.pi ** (n / 2) / special.gamma(n / 2)
    radial, _ = integrate.quad(lambda r: r ** (n - 1) * (1 + r * r) ** (-n), 0, np.inf)
    return float((2 * np.pi) ** (-n / 2) * math.sqrt(sphere * radial))


@dataclass(frozen=True)
class LemmaCheck:
    k: int
    sup_value: float
    bound: float

    @property
    def margin(self) -> float:
        return self.bound - self.sup_value

    @property
    def passed(self) -> bool:
        return self.sup_value <= self.bound * (1 + 1e-12)


def check_sobolev_lemma(u: GriddedDensity, N: int) -> List[LemmaCheck]:
    """sup |Delta^k u| <= C ||u||_(2N+n) for every k <= N."""
    n = u.dimension
    bound = sobolev_lemma_constant(n) * sobolev_norm(u, 2 * N + n).value
    return [LemmaCheck(k, sup_laplacian_power(u, k), bound) for k in range(N + 1)]


# --- Test functions with closed-form derivatives and transforms ---

@dataclass(frozen=True)
class GaussianTest:
    """phi(x) = prod exp(-(x_m - c_m)^2 / (2 w^2))."""

    center: Tuple[float, ...]
    width: float = 1.0

    @property
    def dimension(self) -> int:
        return len(self.center)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.derivative((0,) * self.dimension, x)

    def derivative(self, alpha: Sequence[int], x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        scale = self.width * math.sqrt(2.0)
        out = np.ones(x.shape[:-1]) if x.ndim > 1 else 1.0
        for m, order in enumerate(alpha):
            u = (x[..., m] - self.center[m]) / scale
            herm = hermite.hermval(u, [0] * order + [1])
            out = out * (-1.0 / scale) ** order * herm * np.exp(-u * u)
        return out

    def fourier_transform(self, xi: np.ndarray) -> np.ndarray:
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        c = np.asarray(self.center)
        amp = (self.width * math.sqrt(2 * np.pi)) ** self.dimension
        return amp * np.exp(-0.5 * self.width ** 2 * np.sum(xi ** 2, axis=1) - 1j * xi @ c)


# --- Bounded families ---

@dataclass(frozen=True)
class BoundednessProfile:
    """Common Paley-Wiener data of a family: |F(xi)| <= constant * (1 + |xi|)^degree on samples."""

    type_radius: float
    degree: int
    constant: float


def boundedness_profile(family: Sequence[ExponentialPolynomial] | Sequence[Callable], xi: np.ndarray,
                        degree: int | None = None, type_radius: float | None = None) -> BoundednessProfile:
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    if not family:
        raise InvalidInputError("Boundedness profile of an empty family")
    if degree is None:
        degree = max(getattr(F, "degree", 0) for F in family)
    if type_radius is None:
        type_radius = max(getattr(F, "type_radius", 0.0) for F in family)
    envelope = (1.0 + np.linalg.norm(xi, axis=1)) ** degree
    constant = max(float(np.max(np.abs(F(xi)) / envelope)) for F in family)
    return BoundednessProfile(type_radius=float(type_radius), degree=int(degree), constant=constant)
