# invlab/services/rank_one.py
"""
The hyperbolic plane as a rank-one model of G/K.

Poincare disk, curvature -1, rho = 1/2, boundary circle with normalized measure d(theta)/2pi.
Busemann function A(x, b) = log((1 - |x|^2) / |x - b|^2). Points are complex numbers; boundary
points are angles.

Radial data live in RadialDistribution (powers of the Laplacian at o plus a radial density);
data on the flat line live in LineDistribution (atoms plus a density on [-R, R]).
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import chebyshev
from scipy.special import binom, roots_legendre
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from invlab.core.config import get_settings
from invlab.core.errors import AccuracyError, DomainError, InvalidInputError
from invlab.services.distributions import Atom, GaussianTest, PointMassDistribution

logger = logging.getLogger(__name__)

RHO = 0.5
BOUNDARY_NODES = 64
CONVERGED = 1e-12
ACCEPTABLE = 1e-8
LAMBDA_CUTOFF = 60.0
STRIP = 2.0
_CHUNK = 2048


# --- Geometry ---

def as_disk_points(x) -> np.ndarray:
    """Complex disk points; a real pair (or array of pairs) is read as (re, im)."""
    x = np.asarray(x)
    if not np.iscomplexobj(x) and x.ndim >= 1 and x.shape[-1] == 2:
        x = x[..., 0] + 1j * x[..., 1]
    x = np.asarray(x, dtype=complex)
    if np.any(np.abs(x) >= 1.0):
        raise DomainError("Point outside the open unit disk")
    return x


def busemann(x, theta) -> np.ndarray:
    x = as_disk_points(x)
    b = np.exp(1j * np.asarray(theta, dtype=float))
    return np.log((1.0 - np.abs(x) ** 2) / np.abs(x - b) ** 2)


def distance_from_origin(x) -> np.ndarray:
    return 2.0 * np.arctanh(np.abs(as_disk_points(x)))


def geodesic_distance(x, y) -> np.ndarray:
    x, y = as_disk_points(x), as_disk_points(y)
    return 2.0 * np.arctanh(np.abs((x - y) / (1.0 - np.conj(x) * y)))


def point_at_radius(r, angle: float = 0.0) -> np.ndarray:
    return np.tanh(np.asarray(r, dtype=float) / 2.0) * np.exp(1j * angle)


def moebius(x, z) -> np.ndarray:
    """Isometry sending 0 to x, applied to z."""
    return (z + x) / (1.0 + np.conj(x) * z)


# --- Quadrature ---

class _NotConverged(Exception):
    def __init__(self, change: float):
        super().__init__(f"change {change:.3e}")
        self.change = change


def boundary_average(integrand: Callable[[np.ndarray], np.ndarray], nodes: int = BOUNDARY_NODES,
                     max_doublings: Optional[int] = None) -> np.ndarray:
    """
    (1/2pi) * integral over the circle, periodic trapezoid. The node count doubles until two
    successive results agree to 1e-12 (relative to max(1, |value|)).
    """
    max_doublings = max_doublings or get_settings().quad_max_doublings
    state = {"nodes": nodes, "prev": None}
    value = None
    try:
        for attempt in Retrying(stop=stop_after_attempt(max_doublings),
                                retry=retry_if_exception_type(_NotConverged), reraise=True):
            with attempt:
                theta = 2 * np.pi * np.arange(state["nodes"]) / state["nodes"]
                value = np.mean(integrand(theta), axis=-1)
                prev, state["prev"] = state["prev"], value
                state["nodes"] *= 2
                if prev is None:
                    raise _NotConverged(np.inf)
                change = float(np.max(np.abs(value - prev) / np.maximum(1.0, np.abs(value))))
                if change > CONVERGED:
                    raise _NotConverged(change)
    except _NotConverged as e:
        if e.change <= ACCEPTABLE:
            logger.warning("⚠️ Boundary quadrature stopped at %d nodes (change %.2e)", state["nodes"] // 2, e.change)
            return state["prev"]
        logger.error("Boundary quadrature did not converge: %s", e)
        raise AccuracyError(f"Boundary quadrature did not converge ({e})", achieved=e.change, requested=ACCEPTABLE) from e
    return value


@lru_cache(maxsize=32)
def gauss_legendre(count: int) -> Tuple[np.ndarray, np.ndarray]:
    return roots_legendre(count)


def _gl_nodes(a: float, b: float, count: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = gauss_legendre(count)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


# --- Spherical functions ---

def spherical_function(lam, r) -> np.ndarray:
    """
    phi_lambda(r) = integral over B of exp((i lambda + rho) A(x, b)) db at |x| = tanh(r/2).
    Broadcasts lam against r.
    """
    lam_b, r_b = np.broadcast_arrays(np.asarray(lam, dtype=complex), np.asarray(r, dtype=float))
    if np.any(r_b < 0):
        raise DomainError("Radius must be nonnegative")
    flat_lam, flat_x = lam_b.ravel(), np.tanh(r_b.ravel() / 2.0)
    out = np.empty(flat_lam.shape, dtype=complex)
    for start in range(0, flat_lam.size, _CHUNK):
        sl = slice(start, start + _CHUNK)
        nu = (1j * flat_lam[sl] + RHO)[:, None]
        x = flat_x[sl][:, None]
        out[sl] = boundary_average(lambda theta: np.exp(nu * busemann(x, theta[None, :])))
    return out.reshape(lam_b.shape)


def hc_symbol(lam, power: int = 1) -> np.ndarray:
    """Eigenvalue of Delta^power on phi_lambda: (-(lambda^2 + rho^2))^power."""
    lam = np.asarray(lam, dtype=complex)
    return (-(lam ** 2 + RHO ** 2)) ** power


# --- Radial data on the disk ---

@dataclass(frozen=True)
class RadialProfile:
    """Radial function r -> fn(r), zero for r >= support."""

    fn: Callable[[np.ndarray], np.ndarray]
    support: float
    name: str = "profile"

    def __call__(self, r) -> np.ndarray:
        r = np.abs(np.asarray(r, dtype=float))
        return np.where(r < self.support, self.fn(np.minimum(r, self.support)), 0.0)

    def on_disk(self, x) -> np.ndarray:
        return self(distance_from_origin(x))


def cosh_power_profile(R: float, m: int = 8) -> RadialProfile:
    """g(r) = ((cosh R - cosh r) / (cosh R - 1))_+^m, polynomial in cosh r."""
    c = math.cosh(R)
    return RadialProfile(
        lambda r: (np.clip(c - np.cosh(r), 0.0, None) / (c - 1.0)) ** m, R, f"cosh_power(R={R:g},m={m})"
    )


def smooth_bump_profile(R: float) -> RadialProfile:
    def fn(r):
        u = np.clip(r / R, 0.0, 1.0 - 1e-15)
        return np.exp(1.0 - 1.0 / (1.0 - u * u))

    return RadialProfile(fn, R, f"smooth_bump(R={R:g})")


def radial_interpolant(fn: Callable[[np.ndarray], np.ndarray], support: float, degree: int = 96,
                       name: str = "interpolant") -> RadialProfile:
    """Chebyshev interpolant in the variable cosh r, so the result is smooth through o."""
    top = math.cosh(support)
    poly = chebyshev.Chebyshev.interpolate(lambda c: fn(np.arccosh(np.maximum(c, 1.0))), degree, domain=[1.0, top])
    return RadialProfile(lambda r: poly(np.cosh(r)), support, name)


@dataclass(frozen=True)
class RadialDistribution:
    """sum c * Delta^p delta_o  +  density(r) dx."""

    atoms: Tuple[Tuple[complex, int], ...] = ()
    density: Optional[RadialProfile] = None
    quad_nodes: int = 128

    @classmethod
    def delta_o(cls) -> "RadialDistribution":
        return cls(atoms=((1.0, 0),))

    @classmethod
    def laplacian(cls, power: int = 1) -> "RadialDistribution":
        return cls(atoms=((1.0, power),))

    @classmethod
    def bump(cls, profile: RadialProfile) -> "RadialDistribution":
        return cls(density=profile)

    def __add__(self, other: "RadialDistribution") -> "RadialDistribution":
        if self.density is not None and other.density is not None:
            a, b = self.density, other.density
            density = RadialProfile(lambda r: a(r) + b(r), max(a.support, b.support), f"{a.name}+{b.name}")
        else:
            density = self.density or other.density
        return RadialDistribution(self.atoms + other.atoms, density, max(self.quad_nodes, other.quad_nodes))

    def scale(self, factor: complex) -> "RadialDistribution":
        density = None
        if self.density is not None:
            d = self.density
            density = RadialProfile(lambda r: factor * d(r), d.support, f"{factor}*{d.name}")
        return RadialDistribution(tuple((c * factor, p) for c, p in self.atoms), density, self.quad_nodes)

    @property
    def support_radius(self) -> float:
        return self.density.support if self.density is not None else 0.0

    def radial_nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        """Gauss-Legendre nodes on [0, R] with the area weight 2 pi sinh r folded in."""
        r, w = _gl_nodes(0.0, self.support_radius, self.quad_nodes)
        return r, 2 * np.pi * w * np.sinh(r) * self.density(r)

    def spherical_transform(self, lam) -> np.ndarray:
        return spherical_ft(self, lam)


def spherical_ft(mu: RadialDistribution, lam) -> np.ndarray:
    """mu~(lambda) = integral of phi_{-lambda} d mu."""
    lam = np.asarray(lam, dtype=complex)
    out = np.zeros(lam.shape, dtype=complex)
    for c, p in mu.atoms:
        out += c * hc_symbol(lam, p)
    if mu.density is not None:
        if np.any(np.abs(lam.imag) > STRIP):
            raise DomainError(f"|Im lambda| exceeds the strip {STRIP}")
        r, weights = mu.radial_nodes()
        phi = spherical_function(-lam.ravel()[:, None], r[None, :])
        out += (phi @ weights).reshape(lam.shape)
    return out


def spherical_inverse(transform: Callable[[np.ndarray], np.ndarray], r, cutoff: float = LAMBDA_CUTOFF,
                      nodes: int = 512) -> np.ndarray:
    """f(r) = (1/2pi) integral_0^inf lambda tanh(pi lambda) phi_lambda(r) f~(lambda) d lambda."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    lam, w = _gl_nodes(0.0, cutoff, nodes)
    weights = w * lam * np.tanh(np.pi * lam) * np.asarray(transform(lam), dtype=complex) / (2 * np.pi)
    phi = spherical_function(lam[None, :], r[:, None])
    return phi @ weights


def pair_radial(mu: RadialDistribution, fn: Callable[[np.ndarray], np.ndarray]) -> complex:
    """<mu, f> for a function f on the disk (complex points)."""
    total = 0j
    for c, p in mu.atoms:
        g = fn
        for _ in range(p):
            g = _laplacian_of(g)
        total += c * complex(np.asarray(g(np.array([0j])))[0])
    if mu.density is not None:
        r, weights = mu.radial_nodes()
        total += boundary_average(lambda theta: fn(point_at_radius(r[:, None], 0.0) * np.exp(1j * theta)[None, :])) @ weights
    return complex(total)


# --- Differential operators ---

_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_OFFSETS = np.array([-2, -1, 0, 1, 2])


def hyperbolic_laplacian(fn: Callable[[np.ndarray], np.ndarray], points, h: float = 5e-3) -> np.ndarray:
    """Fourth-order finite differences in disk coordinates, scaled by (1 - |x|^2)^2 / 4."""
    x = as_disk_points(points)
    flat = x.ravel()
    steps = _OFFSETS * h
    along_x = fn(flat[:, None] + steps[None, :]) @ _D2
    along_y = fn(flat[:, None] + 1j * steps[None, :]) @ _D2
    euclid = (along_x + along_y) / h ** 2
    return ((1.0 - np.abs(flat) ** 2) ** 2 / 4.0 * euclid).reshape(x.shape)


def _laplacian_of(fn: Callable) -> Callable:
    return lambda pts: hyperbolic_laplacian(fn, pts)


def radial_laplacian(profile: Callable[[np.ndarray], np.ndarray], r, h: float = 5e-3) -> np.ndarray:
    """h'' + coth(r) h' for a radial function of r; 2 h''(0) at the origin."""
    r = np.asarray(r, dtype=float)
    flat = r.ravel()
    samples = profile(np.abs(flat[:, None] + _OFFSETS[None, :] * h))
    second = samples @ _D2 / h ** 2
    first = samples @ _D1 / h
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(flat < 1e-8, 2.0 * second, second + first / np.tanh(flat))
    return out.reshape(r.shape)


# --- Line distributions ---

def _leibniz_weight(atom: Atom, a: float) -> List[Atom]:
    """e^(a t) * c * delta^(m)_(t0) as a sum of atoms."""
    m, t0 = atom.deriv[0], atom.point[0]
    return [
        Atom(atom.coeff * binom(m, l) * a ** l * math.exp(a * t0), (m - l,), (t0,))
        for l in range(m + 1)
    ]


@dataclass(frozen=True)
class LineDistribution:
    """Atoms on R (one-dimensional PointMassDistribution) plus a density on `support`."""

    atoms: PointMassDistribution = field(default_factory=lambda: PointMassDistribution(1))
    density: Optional[Callable[[np.ndarray], np.ndarray]] = None
    support: Tuple[float, float] = (0.0, 0.0)
    quad_nodes: int = 256

    def nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        t, w = _gl_nodes(self.support[0], self.support[1], self.quad_nodes)
        return t, w * np.asarray(self.density(t))

    def sample(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.density is None:
            return np.zeros(t.shape)
        inside = (t > self.support[0]) & (t < self.support[1])
        return np.where(inside, self.density(np.clip(t, *self.support)), 0.0)

    def weighted(self, a: float) -> "LineDistribution":
        atoms = PointMassDistribution(1, tuple(x for atom in self.atoms.atoms for x in _leibniz_weight(atom, a)))
        density = None
        if self.density is not None:
            d = self.density
            density = lambda t: np.exp(a * np.asarray(t)) * d(t)
        return LineDistribution(atoms, density, self.support, self.quad_nodes)

    def fourier_transform(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=complex)
        out = self.atoms.fourier_transform()(lam.reshape(-1, 1)).reshape(lam.shape) if self.atoms.atoms else np.zeros(lam.shape, complex)
        if self.density is not None:
            t, w = self.nodes()
            out = out + (np.exp(-1j * lam.ravel()[:, None] * t[None, :]) @ w).reshape(lam.shape)
        return out

    def pair(self, F) -> complex:
        total = sum(a.coeff * line_derivative(F, a.deriv[0], np.array([a.point[0]]))[0] for a in self.atoms.atoms)
        if self.density is not None:
            t, w = self.nodes()
            total += np.asarray(F(t)) @ w
        return complex(total)

    def convolve_function(self, F, t) -> np.ndarray:
        """(F * self)(t) = sum c (-1)^m F^(m)(t - t0) + integral F(t - s) p(s) ds."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for a in self.atoms.atoms:
            m = a.deriv[0]
            out += a.coeff * (-1) ** m * line_derivative(F, m, t - a.point[0])
        if self.density is not None:
            s, w = self.nodes()
            out += (np.asarray(F(t[..., None] - s)) * w).sum(axis=-1)
        return out

    def convolve(self, other: "LineDistribution") -> "LineDistribution":
        atoms = PointMassDistribution(1, tuple(
            Atom(a.coeff * b.coeff, (a.deriv[0] + b.deriv[0],), (a.point[0] + b.point[0],))
            for a in self.atoms.atoms for b in other.atoms.atoms
        ))
        if self.density is None and other.density is None:
            return LineDistribution(atoms)
        reach = [a.point[0] for a in self.atoms.atoms + other.atoms.atoms] or [0.0]
        lo = self.support[0] + other.support[0] + min(0.0, min(reach))
        hi = self.support[1] + other.support[1] + max(0.0, max(reach))

        def density(t):
            t = np.asarray(t, dtype=float)
            total = np.zeros(t.shape, dtype=complex)
            if other.density is not None:
                total += self.atoms_only().convolve_function(other.sample, t)
            if self.density is not None:
                total += other.atoms_only().convolve_function(self.sample, t)
            if self.density is not None and other.density is not None:
                total += self.density_only().convolve_function(other.sample, t)
            return total

        return LineDistribution(atoms, density, (lo, hi), max(self.quad_nodes, other.quad_nodes))

    def atoms_only(self) -> "LineDistribution":
        return LineDistribution(self.atoms, None, self.support, self.quad_nodes)

    def density_only(self) -> "LineDistribution":
        return LineDistribution(PointMassDistribution(1), self.density, self.support, self.quad_nodes)

    def evenness_defect(self, t) -> float:
        t = np.asarray(t, dtype=float)
        dens = float(np.max(np.abs(self.sample(t) - self.sample(-t)))) if self.density is not None else 0.0
        ft = self.atoms.fourier_transform()
        s = np.linspace(0.1, 5.0, 17).reshape(-1, 1)
        atoms = float(np.max(np.abs(ft(s) - ft(-s)))) if self.atoms.atoms else 0.0
        return max(dens, atoms)


def line_derivative(F, m: int, t, h: float = 1e-3) -> np.ndarray:
    """F^(m)(t): analytic when F exposes derivative(m, t), else fourth-order differences."""
    t = np.asarray(t, dtype=float)
    if m == 0:
        return np.asarray(F(t))
    if hasattr(F, "derivative"):
        return np.asarray(F.derivative(m, t))
    inner = (lambda s: line_derivative(F, m - 2, s, h)) if m >= 2 else F
    stencil = _D2 / h ** 2 if m >= 2 else _D1 / h
    samples = np.stack([np.asarray(inner(t + k * h)) for k in _OFFSETS], axis=-1)
    return samples @ stencil


@dataclass(frozen=True)
class LineGaussian:
    """Even test function exp(-t^2 / (2 w^2)) with exact derivatives."""

    width: float = 1.0

    def __call__(self, t) -> np.ndarray:
        return self.derivative(0, t)

    def derivative(self, m: int, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return GaussianTest((0.0,), self.width).derivative((m,), t[..., None])


@dataclass(frozen=True)
class HorocycleWave:
    """phi(b, t) = (1 + tilt cos b) * exp(-t^2 / (2 w^2)) on B x R."""

    width: float = 1.0
    tilt: float = 0.0

    def __call__(self, theta, t) -> np.ndarray:
        return self.derivative(0, theta, t)

    def derivative(self, m: int, theta, t) -> np.ndarray:
        return (1.0 + self.tilt * np.cos(theta)) * LineGaussian(self.width).derivative(m, t)


# --- Radon and Abel transforms ---

def abel_atoms(mu: RadialDistribution) -> PointMassDistribution:
    """Delta^p delta_o -> (d^2/dt^2 - rho^2)^p delta_0."""
    second = PointMassDistribution(1, (Atom(1.0, (2,), (0.0,)), Atom(-RHO ** 2, (0,), (0.0,))))
    total = PointMassDistribution(1)
    for c, p in mu.atoms:
        term = PointMassDistribution.delta((0.0,), coeff=c)
        for _ in range(p):
            term = PointMassDistribution(1, tuple(
                Atom(a.coeff * b.coeff, (a.deriv[0] + b.deriv[0],), (0.0,)) for a in term.atoms for b in second.atoms
            ))
        total = total + term
    return total


def _horocycle_density(profile: RadialProfile, theta_b: float, nodes: int = 64) -> Callable[[np.ndarray], np.ndarray]:
    """
    p(t) = e^(-t) * integral of g(d(o, w)) ds over the horocycle A = t, with w = b (z - i)/(z + i)
    and z = s + i e^t in the upper half-plane.
    """
    R = profile.support
    b = np.exp(1j * theta_b)
    x, wts = gauss_legendre(nodes)

    def density(t):
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        half = np.exp(flat / 2) * np.sqrt(np.clip(2 * (math.cosh(R) - np.cosh(flat)), 0.0, None))
        s = half[:, None] * x[None, :]
        z = s + 1j * np.exp(flat)[:, None]
        w = b * (z - 1j) / (z + 1j)
        integrand = profile(2 * np.arctanh(np.minimum(np.abs(w), 1 - 1e-16)))
        values = np.exp(-flat) * half * (integrand @ wts)
        return np.where(np.abs(flat) < R, values, 0.0).reshape(t.shape)

    return density


def radon_transform(mu: RadialDistribution, b: float = 0.0) -> LineDistribution:
    """Pushforward of mu under x -> A(x, b)."""
    atoms = LineDistribution(abel_atoms(mu)).weighted(-RHO).atoms
    if mu.density is None:
        return LineDistribution(atoms)
    R = mu.support_radius
    return LineDistribution(atoms, _horocycle_density(mu.density, b), (-R, R))


def abel_transform(mu: RadialDistribution) -> LineDistribution:
    """e^(rho t) * R_b0 mu."""
    return radon_transform(mu, 0.0).weighted(RHO)


def projection_slice_residual(mu: RadialDistribution, lam) -> np.ndarray:
    """|mu~(lambda) - (A mu)^(lambda)| / (1 + |mu~(lambda)|)."""
    lam = np.asarray(lam, dtype=float)
    direct = spherical_ft(mu, lam)
    via_abel = abel_transform(mu).fourier_transform(lam)
    return np.abs(direct - via_abel) / (1.0 + np.abs(direct))


# --- T map, convolution and the dual transform ---

def T_map(F, points) -> np.ndarray:
    """TF(x) = integral over B of e^(rho A(x,b)) F(A(x,b)) db."""
    x = as_disk_points(points)
    flat = x.ravel()[:, None]

    def integrand(theta):
        A = busemann(flat, theta[None, :])
        return np.exp(RHO * A) * np.asarray(F(A))

    return boundary_average(integrand).reshape(x.shape)


def T_profile(F, support: float, degree: int = 96) -> RadialProfile:
    """TF as a radial function on [0, support], by Chebyshev interpolation in cosh r."""
    return radial_interpolant(lambda r: T_map(F, point_at_radius(r)).real, support, degree, name="TF")


def geometric_convolve(fn: Callable[[np.ndarray], np.ndarray], mu: RadialDistribution, points,
                       s_nodes: int = 64, theta_nodes: int = 128) -> np.ndarray:
    """
    (f * mu)(x) = sum c Delta^p f(x) + integral f(y) g(d(x, y)) dy, the integral taken in geodesic
    polar coordinates around x.
    """
    x = as_disk_points(points)
    flat = x.ravel()
    out = np.zeros(flat.shape, dtype=complex)
    for c, p in mu.atoms:
        g = fn
        for _ in range(p):
            g = _laplacian_of(g)
        out += c * np.asarray(g(flat))
    if mu.density is not None:
        s, w = _gl_nodes(0.0, mu.support_radius, s_nodes)
        weights = w * np.sinh(s) * mu.density(s)
        theta = 2 * np.pi * np.arange(theta_nodes) / theta_nodes
        z = np.tanh(s / 2)[:, None] * np.exp(1j * theta)[None, :]
        for i, xi in enumerate(flat):
            values = np.asarray(fn(moebius(xi, z)))
            out[i] += 2 * np.pi * (values.mean(axis=1) @ weights)
    return out.reshape(x.shape)


def radial_convolve(f: RadialProfile, mu: RadialDistribution, r, cutoff: float = LAMBDA_CUTOFF) -> np.ndarray:
    """Fourier route: (f * mu)~ = f~ mu~, inverted with the Plancherel weight lambda tanh(pi lambda)/2pi."""
    f_dist = RadialDistribution.bump(f)
    return spherical_inverse(lambda lam: spherical_ft(f_dist, lam) * spherical_ft(mu, lam), r, cutoff)


def radial_convolve_profile(f: RadialProfile, mu: RadialDistribution, degree: int = 96) -> RadialProfile:
    support = f.support + mu.support_radius
    return radial_interpolant(lambda r: radial_convolve(f, mu, r).real, support, degree, name=f"{f.name}*mu")


def dual_transform(phi, points) -> np.ndarray:
    """R* phi(x) = integral over B of phi(b, A(x, b)) e^(2 rho A(x, b)) db."""
    x = as_disk_points(points)
    flat = x.ravel()[:, None]

    def integrand(theta):
        A = busemann(flat, theta[None, :])
        return np.asarray(phi(np.broadcast_to(theta[None, :], A.shape), A)) * np.exp(2 * RHO * A)

    return boundary_average(integrand).reshape(x.shape)


def _convolve_in_t(phi, line: LineDistribution) -> Callable:
    """(b, t) -> (phi(b, .) * line)(t)."""

    def out(theta, t):
        theta, t = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(t, dtype=float))
        total = np.zeros(t.shape, dtype=complex)
        for a in line.atoms.atoms:
            m = a.deriv[0]
            total += a.coeff * (-1) ** m * phi.derivative(m, theta, t - a.point[0])
        if line.density is not None:
            s, w = line.nodes()
            total += (phi(theta[..., None], t[..., None] - s) * w).sum(axis=-1)
        return total

    return out


# --- Diagram and identity checks ---

@dataclass(frozen=True)
class Residual:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.value <= self.tolerance


def default_disk_samples() -> np.ndarray:
    radii = np.array([0.0, 0.3, 0.7, 1.2, 2.0])
    angles = np.array([0.0, 1.1, 2.5])
    return np.unique(point_at_radius(radii[:, None], angles[None, :]).ravel())


def check_diagram(F, mu: RadialDistribution, points=None, tolerance: float = 1e-6) -> Residual:
    """sup |T(F * A mu) - (TF) * mu| over disk samples."""
    points = default_disk_samples() if points is None else as_disk_points(points)
    abel = abel_transform(mu)
    left = T_map(lambda t: abel.convolve_function(F, t), points)
    reach = float(np.max(distance_from_origin(points))) + mu.support_radius + 0.5
    TF = T_profile(F, reach)
    right = geometric_convolve(TF.on_disk, mu, points)
    return Residual("diagram", float(np.max(np.abs(left - right))), tolerance)


def check_dual_diagram(phi, mu: RadialDistribution, points=None, tolerance: float = 1e-6) -> Residual:
    """sup |R*(phi * R_b0 mu) - (R* phi) * mu| over disk samples."""
    points = default_disk_samples() if points is None else as_disk_points(points)
    left = dual_transform(_convolve_in_t(phi, radon_transform(mu, 0.0)), points)
    right = geometric_convolve(lambda y: dual_transform(phi, y), mu, points)
    return Residual("dual-diagram", float(np.max(np.abs(left - right))), tolerance)


def check_duality(mu: RadialDistribution, F, tolerance: float = 1e-7) -> Residual:
    """<mu, TF> against <A mu, F>."""
    lhs = pair_radial(mu, lambda x: T_map(F, x))
    rhs = abel_transform(mu).pair(F)
    return Residual("T-duality", abs(lhs - rhs), tolerance)


def check_convolution_routes(f: RadialProfile, mu: RadialDistribution, points=None,
                             tolerance: float = 1e-6) -> Residual:
    """sup |f * mu by spherical transforms - f * mu by direct integration| over disk samples."""
    points = default_disk_samples() if points is None else as_disk_points(points)
    fourier = radial_convolve(f, mu, distance_from_origin(points))
    geometric = geometric_convolve(f.on_disk, mu, points)
    return Residual("convolution-routes", float(np.max(np.abs(fourier - geometric))), tolerance)


def radon_b_independence(mu: RadialDistribution, t, angles: Sequence[float] | None = None,
                         tolerance: float = 1e-8) -> Residual:
    angles = np.linspace(0.0, 2 * np.pi, 8, endpoint=False) if angles is None else np.asarray(angles)
    samples = np.stack([radon_transform(mu, b).sample(t) for b in angles])
    spread = float(np.max(np.abs(samples[:, None, :] - samples[None, :, :]))) if len(angles) > 1 else 0.0
    return Residual("radon-b-independence", spread, tolerance)


def radon_intertwining(f: RadialProfile, mu: RadialDistribution, t=None,
                       tolerance: float = 1e-6) -> List[Residual]:
    """
    R(f * mu) = R f * R_b0 mu on the line, and the e^(rho t)-weighted form A(f * mu) = A f * A mu.
    """
    support = f.support + mu.support_radius
    t = np.linspace(-support, support, 161) if t is None else np.asarray(t, dtype=float)
    conv = RadialDistribution.bump(radial_convolve_profile(f, mu))
    f_dist = RadialDistribution.bump(f)

    radon_left = radon_transform(conv).sample(t)
    radon_right = radon_transform(mu).convolve_function(radon_transform(f_dist).sample, t)
    abel_left = abel_transform(conv).sample(t)
    abel_right = abel_transform(mu).convolve_function(abel_transform(f_dist).sample, t)
    return [
        Residual("radon-intertwining", float(np.max(np.abs(radon_left - radon_right))), tolerance),
        Residual("abel-intertwining", float(np.max(np.abs(abel_left - abel_right))), tolerance),
    ]


def standard_distributions(R: float = 1.0) -> dict:
    return {
        "delta_o": RadialDistribution.delta_o(),
        "laplacian": RadialDistribution.laplacian(),
        "pair": RadialDistribution.delta_o() + RadialDistribution.laplacian().scale(0.5),
        "bump": RadialDistribution.bump(cosh_power_profile(R)),
    }


def standard_even_bumps() -> dict:
    return {f"gauss_w{w:g}": LineGaussian(w) for w in (0.5, 0.8, 1.2)}
