# invlab/services/fourier_division.py
"""
Fundamental solutions by regularized division on the Fourier side, checked weakly against test
functions.

On R^n the quotient S^ = 1 / mu^ is sampled on a cell-centred frequency box and paired through
<T, phi> = (2 pi)^(-n) * integral T^(xi) phi^(-xi) d xi. On the disk the quotient lives on a
lambda grid and pairs through (1/2pi) * integral T~(lambda) phi~(lambda) lambda tanh(pi lambda).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import integrate

from invlab.core.config import get_settings
from invlab.core.errors import DegenerateDenominatorError, InvalidInputError, PreconditionRefusedError
from invlab.services.distributions import GaussianTest, PointMassDistribution
from invlab.services.rank_one import (
    LAMBDA_CUTOFF,
    RadialDistribution,
    RadialProfile,
    Residual,
    _gl_nodes,
    cosh_power_profile,
    radial_laplacian,
    spherical_ft,
)
from invlab.services.slow_decrease import SearchParams, as_evaluator, check_slow_decrease, minimal_A_search

logger = logging.getLogger(__name__)

ZERO_FLOOR = 1e-14
DEGENERATE_FRACTION = 0.5
DEFAULT_EPSILON = 1e-6
GATE_A_GRID = (0.5, 1.0, 2.0, 4.0, 8.0, 16.0)


# --- Grids ---

@dataclass(frozen=True)
class FrequencyGrid:
    """Cell-centred box [-extent, extent]^n with `points` samples per axis."""

    dimension: int = 1
    extent: float = 64.0
    points: int = 4096

    @classmethod
    def default(cls, dimension: int) -> "FrequencyGrid":
        return cls(dimension, 64.0, 4096 if dimension == 1 else 512)

    @property
    def spacing(self) -> float:
        return 2 * self.extent / self.points

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.dimension

    def axis(self) -> np.ndarray:
        return -self.extent + (np.arange(self.points) + 0.5) * self.spacing

    def mesh(self) -> np.ndarray:
        axes = np.meshgrid(*([self.axis()] * self.dimension), indexing="ij")
        return np.stack(axes, axis=-1).reshape(-1, self.dimension)


@dataclass(frozen=True)
class SpectralGrid:
    """Gauss-Legendre nodes on [0, cutoff] carrying the Plancherel weight lambda tanh(pi lambda) / 2pi."""

    cutoff: float = LAMBDA_CUTOFF
    nodes: int = 512

    def points(self) -> np.ndarray:
        return _gl_nodes(0.0, self.cutoff, self.nodes)[0]

    def weights(self) -> np.ndarray:
        lam, w = _gl_nodes(0.0, self.cutoff, self.nodes)
        return w * lam * np.tanh(np.pi * lam) / (2 * np.pi)


# --- Division ---

@dataclass
class DivisionResult:
    points: np.ndarray
    quotient: np.ndarray
    epsilon: float
    residuals: List[Residual] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.residuals)

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAILED"

    def rows(self) -> List[dict]:
        return [
            {"test": r.name, "residual": r.value, "tolerance": r.tolerance, "pass": r.passed}
            for r in self.residuals
        ]


def _values(obj, points: np.ndarray) -> np.ndarray:
    if np.isscalar(obj):
        return np.full(points.shape[0], complex(obj))
    return np.asarray(as_evaluator(obj, points.shape[1])(points.astype(complex)), dtype=complex)


def divide(numerator, denominator, points: np.ndarray, epsilon: float = DEFAULT_EPSILON) -> DivisionResult:
    """
    quotient = num * conj(den) / (|den|^2 + epsilon^2). Points are (m, n) real frequencies;
    numerator and denominator are evaluators or scalars.
    """
    if epsilon < 0:
        raise InvalidInputError("epsilon must be nonnegative")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    num = _values(numerator, points)
    den = _values(denominator, points)
    peak = float(np.max(np.abs(den))) if den.size else 0.0
    zero = np.abs(den) <= ZERO_FLOOR * peak if peak > 0 else np.ones(den.shape, dtype=bool)
    if zero.mean() > DEGENERATE_FRACTION:
        logger.error("Denominator vanishes on %.0f%% of the grid", 100 * zero.mean())
        raise DegenerateDenominatorError(f"Denominator is numerically zero on {zero.mean():.0%} of the grid")

    power = np.abs(den) ** 2 + epsilon ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        quotient = np.where(power > 0, num * np.conj(den) / power, 0.0)
    if epsilon == 0 and zero.any():
        logger.warning("⚠️ Unregularized division hit %d zero samples; set to 0", int(zero.sum()))
    return DivisionResult(points, quotient, float(epsilon))


def epsilon_consistency(denominator, points: np.ndarray, epsilon: float, numerator=1.0) -> float:
    """Max relative change of the quotient between epsilon and epsilon / 10."""
    a = divide(numerator, denominator, points, epsilon).quotient
    b = divide(numerator, denominator, points, epsilon / 10).quotient
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


# --- Test functions ---

@dataclass(frozen=True)
class BandLimitedTest:
    """phi with phi^(xi) = prod exp(1 - 1/(1 - (xi_m / band)^2)) on |xi_m| < band."""

    band: float
    dimension: int = 1

    def fourier_transform(self, xi) -> np.ndarray:
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        u = np.clip(np.abs(xi) / self.band, 0.0, 1.0)
        with np.errstate(divide="ignore", over="ignore"):
            factors = np.where(u < 1.0, np.exp(1.0 - 1.0 / (1.0 - u * u)), 0.0)
        return np.prod(factors, axis=1).astype(complex)

    def value_at_origin(self) -> float:
        """phi(0) = (2 pi)^(-n) * integral phi^ by adaptive quadrature, one axis at a time."""
        one_axis, _ = integrate.quad(
            lambda x: math.exp(1.0 - 1.0 / (1.0 - (x / self.band) ** 2)), -self.band, self.band,
            epsabs=1e-14, epsrel=1e-13,
        )
        return (one_axis / (2 * np.pi)) ** self.dimension


def gaussian_suite(dimension: int = 1) -> Dict[str, GaussianTest]:
    suite = {}
    for c in (0.0, 0.4, -0.9):
        for w in (0.7, 1.0):
            suite[f"gauss_c{c:g}_w{w:g}"] = GaussianTest((c,) * dimension, w)
    return suite


def band_limited_suite(dimension: int = 1) -> Dict[str, BandLimitedTest]:
    return {f"band_{b:.3g}": BandLimitedTest(b, dimension) for b in (0.5 * np.pi, 0.9 * np.pi)}


def radial_bump_suite() -> Dict[str, RadialProfile]:
    return {p.name: p for p in (cosh_power_profile(0.8), cosh_power_profile(1.2), cosh_power_profile(1.5, m=10))}


def _value_at_origin(test) -> float:
    if hasattr(test, "value_at_origin"):
        return test.value_at_origin()
    return float(test(np.zeros((1, test.dimension)))[0])


# --- Pairings ---

def spectral_pairing(transform: np.ndarray, grid: FrequencyGrid, test) -> complex:
    """<T, phi> from T^ sampled on the grid."""
    xi = grid.mesh()
    return complex(np.sum(transform * test.fourier_transform(-xi)) * grid.cell_volume / (2 * np.pi) ** grid.dimension)


def disk_pairing(transform: np.ndarray, spectral: SpectralGrid, profile: RadialProfile) -> complex:
    """<T, phi> for radial T given by T~ on the spectral grid and a radial test profile phi."""
    phi_t = spherical_ft(RadialDistribution.bump(profile), spectral.points())
    return complex(np.sum(transform * phi_t * spectral.weights()))


def laplacian_power_profile(profile: RadialProfile, mu: RadialDistribution) -> RadialProfile:
    """sum c * Delta^p phi for the atoms of mu, by radial finite differences."""

    def applied(r):
        total = np.zeros(np.shape(r), dtype=complex)
        for c, p in mu.atoms:
            g = profile
            for _ in range(p):
                g = (lambda inner: lambda s: radial_laplacian(inner, s))(g)
            total = total + c * np.asarray(g(r))
        return total

    return RadialProfile(applied, profile.support, f"mu.{profile.name}")


# --- Gate and fundamental solutions ---

def invertibility_gate(mu, horizon: Optional[float] = None, A_grid: Sequence[float] = GATE_A_GRID,
                       search: SearchParams | None = None) -> float:
    """Smallest tested A with a satisfied slow-decrease verdict; refuses otherwise."""
    horizon = horizon or get_settings().gate_horizon
    F = as_evaluator(mu)
    verdict = check_slow_decrease(F, max(A_grid), horizon, search)
    if not verdict.satisfied:
        logger.error("❌ Slow-decrease gate refused: %s at A=%g", verdict.verdict, max(A_grid))
        raise PreconditionRefusedError(
            f"Transform is not slowly decreasing on the tested grid (verdict {verdict.verdict})",
            verdict=verdict.verdict,
        )
    A = minimal_A_search(F, horizon, A_grid, search)
    logger.info("✅ Slow-decrease gate passed at A=%g", A)
    return A


def fundamental_solution(mu, epsilon: float = DEFAULT_EPSILON, grid: FrequencyGrid | SpectralGrid | None = None,
                         tests: Optional[Dict[str, object]] = None, tolerance: float = 1e-5,
                         gate: bool = True, search: SearchParams | None = None) -> DivisionResult:
    """
    S^ = divide(1, mu^) followed by weak checks |<S * mu, phi> - phi(0)| for every test phi.
    """
    if gate:
        invertibility_gate(mu, search=search)
    if isinstance(mu, RadialDistribution):
        return _disk_solution(mu, epsilon, grid or SpectralGrid(), tests, tolerance)
    if not isinstance(mu, PointMassDistribution):
        raise InvalidInputError(f"Unsupported distribution type {type(mu).__name__}")

    grid = grid or FrequencyGrid.default(mu.dimension)
    if grid.dimension != mu.dimension:
        raise InvalidInputError("Grid and distribution dimensions differ")
    tests = tests or gaussian_suite(mu.dimension)
    xi = grid.mesh()
    mu_hat = mu.fourier_transform()
    result = divide(1.0, mu_hat, xi, epsilon)
    product = result.quotient * _values(mu_hat, xi)
    for name, test in tests.items():
        value = spectral_pairing(product, grid, test)
        result.residuals.append(Residual(name, abs(value - _value_at_origin(test)), tolerance))
    _log_result("fundamental solution", result)
    return result


def _disk_solution(mu: RadialDistribution, epsilon: float, spectral: SpectralGrid,
                   tests: Optional[Dict[str, RadialProfile]], tolerance: float) -> DivisionResult:
    tests = tests or radial_bump_suite()
    lam = spectral.points()
    mu_t = spherical_ft(mu, lam)
    result = divide(1.0, lambda z: spherical_ft(mu, z[:, 0]), lam[:, None], epsilon)
    for name, profile in tests.items():
        target = float(profile(0.0))
        value = disk_pairing(result.quotient * mu_t, spectral, profile)
        result.residuals.append(Residual(f"{name}:spectral", abs(value - target), tolerance))
        if mu.density is None:
            direct = disk_pairing(result.quotient, spectral, laplacian_power_profile(profile, mu))
            result.residuals.append(Residual(f"{name}:direct", abs(direct - target), tolerance))
    _log_result("disk fundamental solution", result)
    return result


def _log_result(label: str, result: DivisionResult) -> None:
    worst = max((r.value for r in result.residuals), default=0.0)
    if result.passed:
        logger.info("✅ %s: %d residuals, worst %.2e", label, len(result.residuals), worst)
    else:
        logger.warning("❌ %s: worst residual %.2e", label, worst)


def epsilon_sweep(mu: PointMassDistribution, epsilons: Sequence[float], tests: Dict[str, object],
                  grid: FrequencyGrid | None = None) -> List[float]:
    """Worst weak residual for each epsilon, in the order given."""
    worst = []
    for eps in epsilons:
        result = fundamental_solution(mu, eps, grid, tests, tolerance=math.inf, gate=False)
        worst.append(max(r.value for r in result.residuals))
    return worst


def sampled_solution_pairings(result: DivisionResult, grid: FrequencyGrid,
                              tests: Dict[str, object]) -> Dict[str, complex]:
    """<S, phi> for each test, read from the stored quotient."""
    return {name: spectral_pairing(result.quotient, grid, test) for name, test in tests.items()}


def quotient_asymmetry(result: DivisionResult, W) -> float:
    """max |S^(sigma xi) - S^(xi)| over grid points whose images stay on the grid."""
    pts = result.points
    index = {tuple(np.round(p, 12)): k for k, p in enumerate(pts)}
    worst = 0.0
    for sigma in W.elements:
        for k, p in enumerate(pts):
            j = index.get(tuple(np.round(sigma @ p, 12)))
            if j is not None:
                worst = max(worst, abs(result.quotient[j] - result.quotient[k]))
    return worst

