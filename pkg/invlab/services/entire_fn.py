# invlab/services/entire_fn.py
"""
Entire functions of exponential type given in closed form:

    F(ζ) = Σ_t  c_t · P_t(ζ) · exp(−i⟨a_t, ζ⟩)

These are exactly the Fourier transforms of finite sums of derivatives of point masses.
"""

import itertools
import json
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from invlab.core.errors import InvalidInputError

logger = logging.getLogger(__name__)

Exponents = Tuple[int, ...]
Polynomial = Dict[Exponents, complex]


# --- Polynomial helpers (dict of exponent tuple -> coefficient) ---

def poly_degree(poly: Polynomial) -> int:
    return max((sum(e) for e, c in poly.items() if c != 0), default=0)


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    out: Polynomial = {}
    for (e1, c1), (e2, c2) in itertools.product(p.items(), q.items()):
        key = tuple(a + b for a, b in zip(e1, e2))
        out[key] = out.get(key, 0j) + c1 * c2
    return {k: v for k, v in out.items() if v != 0}


def poly_eval(poly: Polynomial, zeta: np.ndarray) -> np.ndarray:
    """
    Evaluate on an (m, n) array of points; returns shape (m,).
    """
    zeta = np.atleast_2d(np.asarray(zeta, dtype=complex))
    out = np.zeros(zeta.shape[0], dtype=complex)
    for exps in sorted(poly):
        term = np.full(zeta.shape[0], poly[exps], dtype=complex)
        for axis, power in enumerate(exps):
            if power:
                term = term * zeta[:, axis] ** power
        out += term
    return out


def monomial(exponents: Sequence[int], coeff: complex = 1.0) -> Polynomial:
    return {tuple(int(e) for e in exponents): complex(coeff)}


# --- Exponential polynomials ---

@dataclass(frozen=True)
class ExpTerm:
    coeff: complex
    poly: Polynomial
    anchor: Tuple[float, ...]

    @property
    def degree(self) -> int:
        return poly_degree(self.poly)

    def sort_key(self):
        return (self.anchor, self.degree, tuple(sorted(self.poly)))


@dataclass(frozen=True)
class ExponentialPolynomial:
    dimension: int
    terms: Tuple[ExpTerm, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for term in self.terms:
            if len(term.anchor) != self.dimension:
                raise InvalidInputError(
                    f"Anchor {term.anchor} does not match dimension {self.dimension}"
                )
        # canonical order: lexicographic on anchor, then degree
        object.__setattr__(self, "terms", tuple(sorted(self.terms, key=ExpTerm.sort_key)))

    @classmethod
    def constant(cls, dimension: int, value: complex = 1.0) -> "ExponentialPolynomial":
        return cls(dimension, (ExpTerm(complex(value), monomial((0,) * dimension), (0.0,) * dimension),))

    def __call__(self, zeta) -> np.ndarray:
        zeta = np.atleast_2d(np.asarray(zeta, dtype=complex))
        if zeta.shape[1] != self.dimension:
            raise InvalidInputError(f"Expected points of dimension {self.dimension}, got {zeta.shape[1]}")
        out = np.zeros(zeta.shape[0], dtype=complex)
        for term in self.terms:
            phase = np.exp(-1j * (zeta @ np.asarray(term.anchor, dtype=float)))
            out += term.coeff * poly_eval(term.poly, zeta) * phase
        return out

    def eval(self, zeta: Sequence[complex]) -> complex:
        return complex(self(np.asarray(zeta, dtype=complex)[None, :])[0])

    def __mul__(self, other: "ExponentialPolynomial") -> "ExponentialPolynomial":
        if not isinstance(other, ExponentialPolynomial):
            return NotImplemented
        if other.dimension != self.dimension:
            raise InvalidInputError("Cannot multiply exponential polynomials of different dimension")
        terms = [
            ExpTerm(
                s.coeff * t.coeff,
                poly_mul(s.poly, t.poly),
                tuple(a + b for a, b in zip(s.anchor, t.anchor)),
            )
            for s, t in itertools.product(self.terms, other.terms)
        ]
        return ExponentialPolynomial(self.dimension, tuple(terms))

    def reflect(self) -> "ExponentialPolynomial":
        """ζ ↦ F(−ζ)."""
        terms = []
        for t in self.terms:
            poly = {e: c * (-1) ** sum(e) for e, c in t.poly.items()}
            terms.append(ExpTerm(t.coeff, poly, tuple(-a for a in t.anchor)))
        return ExponentialPolynomial(self.dimension, tuple(terms))

    @property
    def type_radius(self) -> float:
        live = [t for t in self.terms if t.coeff != 0 and t.poly]
        return max((float(np.linalg.norm(t.anchor)) for t in live), default=0.0)

    @property
    def degree(self) -> int:
        return max((t.degree for t in self.terms if t.coeff != 0), default=0)

    # --- JSON document ---

    def to_document(self) -> List[dict]:
        return [
            {
                "coeff": [t.coeff.real, t.coeff.imag],
                "poly": [
                    {"exponents": list(e), "coeff": [c.real, c.imag]}
                    for e, c in sorted(t.poly.items())
                ],
                "anchor": list(t.anchor),
            }
            for t in self.terms
        ]

    def to_json(self) -> str:
        return json.dumps(self.to_document())

    @classmethod
    def from_document(cls, doc: Iterable[dict], dimension: int | None = None) -> "ExponentialPolynomial":
        terms = []
        for item in doc:
            poly = {
                tuple(int(x) for x in p["exponents"]): complex(p["coeff"][0], p["coeff"][1])
                for p in item["poly"]
            }
            terms.append(ExpTerm(complex(item["coeff"][0], item["coeff"][1]), poly,
                                 tuple(float(a) for a in item["anchor"])))
        if dimension is None:
            if not terms:
                raise InvalidInputError("Empty exponential polynomial needs an explicit dimension")
            dimension = len(terms[0].anchor)
        return cls(dimension, tuple(terms))

    @classmethod
    def from_json(cls, text: str) -> "ExponentialPolynomial":
        return cls.from_document(json.loads(text))


# --- Paley-Wiener metadata ---

@dataclass(frozen=True)
class SampleSpec:
    """
    Real grid [-real_extent, real_extent]^n with real_points per axis, plus imaginary rays
    ζ = ξ + i·t·e_m (t in [0, imag_extent]) from a coarse subset of the real grid.
    """
    real_extent: float = 10.0
    real_points: int = 21
    imag_extent: float = 5.0
    imag_points: int = 11

    def points(self, dimension: int) -> np.ndarray:
        axis = np.linspace(-self.real_extent, self.real_extent, self.real_points) if self.real_points else np.empty(0)
        real = np.array(list(itertools.product(axis, repeat=dimension)), dtype=complex).reshape(-1, dimension)
        if self.imag_points == 0 or real.size == 0:
            return real
        ts = np.linspace(0.0, self.imag_extent, self.imag_points)[1:]
        bases = real[:: max(1, len(real) // 16)]
        rays = []
        for m in range(dimension):
            unit = np.zeros(dimension)
            unit[m] = 1.0
            for sign in (1.0, -1.0):
                rays.append((bases[:, None, :] + 1j * sign * ts[None, :, None] * unit).reshape(-1, dimension))
        return np.vstack([real] + rays)


@dataclass(frozen=True)
class PaleyWienerFit:
    type_radius: float
    poly_degree: int
    constant: float

    def log_bound(self, zeta: np.ndarray) -> np.ndarray:
        return log_abs_bound(zeta, self.constant, self.poly_degree, self.type_radius)

    def holds(self, f, zeta: np.ndarray, rtol: float = 1e-9) -> bool:
        zeta = np.atleast_2d(zeta)
        with np.errstate(divide="ignore"):
            log_f = np.log(np.abs(f(zeta)))
        return bool(np.all(log_f <= self.log_bound(zeta) + np.log1p(rtol)))


def log_abs_bound(zeta: np.ndarray, constant: float, degree: int, radius: float) -> np.ndarray:
    """log of C·(1+‖ζ‖)^N·exp(R‖Im ζ‖), overflow-free."""
    zeta = np.atleast_2d(np.asarray(zeta, dtype=complex))
    norm = np.sqrt(np.sum(np.abs(zeta) ** 2, axis=1))
    imag = np.linalg.norm(zeta.imag, axis=1)
    return np.log(constant) + degree * np.log1p(norm) + radius * imag


def fit_paley_wiener(f: ExponentialPolynomial, sample_spec: SampleSpec) -> PaleyWienerFit:
    """
    R and N are read off the closed form; C is the least constant on the samples plus 10%.
    """
    zeta = sample_spec.points(f.dimension)
    if zeta.size == 0:
        raise InvalidInputError("Paley-Wiener fit needs a nonempty sample set")
    if not np.any(np.linalg.norm(zeta.imag, axis=1) > 0):
        raise InvalidInputError("Paley-Wiener fit needs at least one sample off the real subspace")
    radius, degree = f.type_radius, f.degree
    values = np.abs(f(zeta))
    log_envelope = log_abs_bound(zeta, 1.0, degree, radius)
    with np.errstate(divide="ignore"):
        ratio = np.exp(np.log(values) - log_envelope)
    least = float(np.max(ratio))
    if least == 0.0:
        logger.warning("⚠️ Function vanishes on every sample; using C=1")
        least = 1.0 / 1.1
    fit = PaleyWienerFit(type_radius=radius, poly_degree=degree, constant=1.1 * least)
    logger.debug("Paley-Wiener fit R=%.6g N=%d C=%.6g on %d samples", radius, degree, fit.constant, len(zeta))
    return fit
