# invlab/services/slow_decrease.py
"""
Numerical evidence for the slow-decrease condition

    for every real xi the ball |zeta - xi| < A log(2 + |xi|) holds a point with
    |F(zeta)| > (A + |xi|)^(-A)

and construction of violation sequences when it fails. Verdicts are relative to the search
horizon and budget; they are evidence, not proof.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from invlab.core.config import DEFAULT_SEED, get_settings
from invlab.core.errors import EvaluatorError, InvalidInputError
from invlab.services.distributions import PointMassDistribution
from invlab.services.entire_fn import ExponentialPolynomial

logger = logging.getLogger(__name__)

Evaluator = Callable[[np.ndarray], np.ndarray]

THRESHOLD_SLACK = 1e-12
SHELLS_PER_LOG_UNIT = 8
SHRINK = 1.0 - 1e-9

SATISFIED = "satisfied"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"


# --- Evaluators ---

@dataclass(frozen=True)
class Symbol:
    """A vectorized function of zeta in C^n with a declared dimension."""

    fn: Callable[[np.ndarray], np.ndarray]
    dimension: int = 1
    name: str = "custom"

    def __call__(self, zeta) -> np.ndarray:
        zeta = np.atleast_2d(np.asarray(zeta, dtype=complex))
        return np.asarray(self.fn(zeta), dtype=complex).reshape(-1)


def as_evaluator(obj, dimension: int = 1) -> Evaluator:
    """
    Vectorized evaluator (m, n) complex -> (m,) complex for transforms, distributions and
    anything exposing `spherical_transform` (radial data on the disk, n = 1 in lambda).
    """
    if isinstance(obj, (Symbol, ExponentialPolynomial)):
        return obj
    if isinstance(obj, PointMassDistribution):
        return obj.fourier_transform()
    if hasattr(obj, "spherical_transform"):
        return Symbol(lambda zeta: obj.spherical_transform(zeta[:, 0]), 1, "spherical")
    if callable(obj):
        return Symbol(obj, int(getattr(obj, "dimension", dimension)))
    raise InvalidInputError(f"Cannot evaluate {type(obj).__name__} as an entire function")


def _dot(zeta: np.ndarray) -> np.ndarray:
    return np.sum(zeta * zeta, axis=1)


def constant_symbol(dimension: int = 1, value: complex = 1.0) -> Symbol:
    return Symbol(lambda zeta: np.full(zeta.shape[0], complex(value)), dimension, "constant")


def laplacian_symbol(dimension: int = 1) -> Symbol:
    """-(zeta . zeta + 1/4): the Laplacian symbol on the hyperbolic plane in the lambda variable."""
    return Symbol(lambda zeta: -(_dot(zeta) + 0.25), dimension, "laplacian_symbol")


def super_decaying_symbol(dimension: int = 1) -> Symbol:
    """exp(-sqrt(1 + zeta . zeta)), principal branch; decays faster than any power on R^n."""
    return Symbol(lambda zeta: np.exp(-np.sqrt(1.0 + _dot(zeta))), dimension, "super_decaying")


# --- Search parameters and results ---

@dataclass(frozen=True)
class SearchParams:
    samples: int = 48
    refine_evals: int = 200
    complex_search: bool = False
    max_total_evals: int = 2_000_000
    seed: int = DEFAULT_SEED
    threads: Optional[int] = None


@dataclass(frozen=True)
class BallResult:
    xi: tuple
    radius: float
    threshold: float
    best_point: tuple
    best_abs: float
    passed: bool
    evals: int

    @property
    def xi_norm(self) -> float:
        return float(np.linalg.norm(self.xi))


@dataclass
class SlowDecreaseVerdict:
    verdict: str
    A: float
    horizon: float
    witnesses: List[BallResult] = field(default_factory=list)
    failures: List[BallResult] = field(default_factory=list)

    @property
    def satisfied(self) -> bool:
        return self.verdict == SATISFIED

    def label(self) -> str:
        return f"satisfied-at({self.A:g})" if self.satisfied else self.verdict

    def rows(self) -> List[dict]:
        return [
            {
                "xi_norm": w.xi_norm,
                "ball_radius": w.radius,
                "best_abs_F": w.best_abs,
                "threshold": w.threshold,
                "pass": w.passed,
            }
            for w in self.witnesses
        ]


@dataclass(frozen=True)
class ViolationSequence:
    points: List[tuple]
    certified_radius: List[float]
    certified_bound: List[float]
    sampled_max: List[float]
    failed_at: Optional[int] = None

    def __len__(self) -> int:
        return len(self.points)

    @property
    def norms(self) -> List[float]:
        return [float(np.linalg.norm(p)) for p in self.points]

    @property
    def complete(self) -> bool:
        return self.failed_at is None


# --- Ball probing ---

def _evaluate(F: Evaluator, zeta: np.ndarray) -> np.ndarray:
    values = np.asarray(F(zeta), dtype=complex).reshape(-1)
    bad = ~np.isfinite(values)
    if np.any(bad):
        point = np.atleast_2d(zeta)[int(np.argmax(bad))]
        logger.error("Evaluator returned %s at %s", values[bad][0], point)
        raise EvaluatorError(f"Non-finite evaluator output at {point.tolist()}", point=point.tolist())
    return np.abs(values)


def _to_zeta(z: np.ndarray, n: int, complex_search: bool) -> np.ndarray:
    z = np.atleast_2d(z)
    if complex_search:
        return z[:, :n] + 1j * z[:, n:]
    return z.astype(complex)


def _ball_samples(dim: int, count: int, seed: int) -> np.ndarray:
    """Scrambled Halton points in the unit ball of R^dim."""
    sampler = qmc.Halton(d=dim, scramble=True, seed=seed)
    cube = 2.0 * sampler.random(4 * count + 8) - 1.0
    inside = cube[np.linalg.norm(cube, axis=1) <= 1.0]
    return inside[:count]


def _anchor_points(centre: np.ndarray, radius: float, n: int) -> np.ndarray:
    """Centre, the point nearest the origin, and the axis extremes of the ball."""
    r = radius * SHRINK
    pts = [centre.copy()]
    xi = centre[:n]
    norm = np.linalg.norm(xi)
    if norm > 0:
        toward = centre.copy()
        toward[:n] = xi - min(r, norm) * xi / norm
        pts.append(toward)
    for axis in range(len(centre)):
        for sign in (1.0, -1.0):
            p = centre.copy()
            p[axis] += sign * r
            pts.append(p)
    return np.array(pts)


def search_ball(F: Evaluator, xi: Sequence[float], radius: float, target: float,
               params: SearchParams, density: int = 1) -> BallResult:
    """
    Largest |F| found in the open ball around xi; stops as soon as |F| > target.
    """
    xi = np.asarray(xi, dtype=float)
    n = xi.size
    dim = 2 * n if params.complex_search else n
    centre = np.concatenate([xi, np.zeros(n)]) if params.complex_search else xi.copy()
    floor = target * (1.0 - THRESHOLD_SLACK)
    evals = 0

    def result(point, value):
        return BallResult(tuple(xi.tolist()), float(radius), float(target),
                          tuple(np.asarray(point).tolist()), float(value), bool(value > floor), evals)

    # anchors, then Halton samples
    candidates = _anchor_points(centre, radius, n)
    if radius > 0:
        candidates = np.vstack([candidates, centre + radius * SHRINK * _ball_samples(dim, params.samples * density, params.seed)])
    best_point, best = centre, -1.0
    for chunk in np.array_split(candidates, max(1, len(candidates) // 16)):
        values = _evaluate(F, _to_zeta(chunk, n, params.complex_search))
        evals += len(chunk)
        k = int(np.argmax(values))
        if values[k] > best:
            best, best_point = float(values[k]), chunk[k]
        if best > floor:
            return result(_to_zeta(best_point, n, params.complex_search)[0], best)

    if radius > 0 and params.refine_evals > 0:
        def objective(z):
            nonlocal evals
            if np.linalg.norm(z - centre) >= radius:
                return 1e300
            evals += 1
            value = _evaluate(F, _to_zeta(z, n, params.complex_search))[0]
            return -math.log(value) if value > 0 else 1e300

        res = minimize(objective, best_point, method="Nelder-Mead",
                       options={"maxfev": params.refine_evals * density, "xatol": 1e-10, "fatol": 1e-12})
        if res.fun < 1e300:
            value = math.exp(-res.fun)
            if value > best:
                best, best_point = value, res.x
    return result(_to_zeta(best_point, n, params.complex_search)[0], best)


# --- Grids of frequencies ---

def radial_norms(horizon: float) -> np.ndarray:
    """0 followed by a geometric grid up to the horizon, 8 shells per unit of log radius."""
    start = min(1.0, horizon)
    count = max(2, int(math.ceil(SHELLS_PER_LOG_UNIT * math.log(horizon / start))) + 1)
    return np.concatenate([[0.0], np.geomspace(start, horizon, count)])


def sphere_directions(n: int) -> np.ndarray:
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        angles = 2 * np.pi * np.arange(8) / 8
        return np.stack([np.cos(angles), np.sin(angles)], axis=1)
    # Fibonacci lattice on S^2, padded with zeros beyond three coordinates
    count = 8 * n
    k = np.arange(count) + 0.5
    z = 1 - 2 * k / count
    phi = np.pi * (1 + 5 ** 0.5) * k
    r = np.sqrt(1 - z * z)
    pts = np.zeros((count, n))
    pts[:, 0], pts[:, 1], pts[:, 2] = r * np.cos(phi), r * np.sin(phi), z
    return pts


def frequency_grid(n: int, horizon: float) -> np.ndarray:
    dirs = sphere_directions(n)
    points = [np.zeros(n)]
    for r in radial_norms(horizon)[1:]:
        points.extend(r * d for d in dirs)
    return np.array(points)


def _map_balls(fn, points: np.ndarray, threads: Optional[int]) -> List[BallResult]:
    workers = threads or get_settings().threads
    if workers <= 1:
        return [fn(p) for p in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, points))


# --- Operations ---

def check_slow_decrease(F, A: float, horizon: float, search: SearchParams | None = None) -> SlowDecreaseVerdict:
    if A <= 0 or horizon <= 0:
        raise InvalidInputError("A and horizon must be positive")
    search = search or SearchParams()
    F = as_evaluator(F)
    n = _infer_dimension(F)
    points = frequency_grid(n, horizon)

    def examine(xi):
        r = float(np.linalg.norm(xi))
        outcome = search_ball(F, xi, A * math.log(2 + r), (A + r) ** (-A), search)
        if not outcome.passed:
            # resample at twice the density before accepting a failure
            outcome = search_ball(F, xi, outcome.radius, outcome.threshold, search, density=2)
        return outcome

    results = _map_balls(examine, points, search.threads)

    witnesses, failures, spent = [], [], 0
    verdict = SATISFIED
    for outcome in results:
        spent += outcome.evals
        if spent > search.max_total_evals:
            verdict = INCONCLUSIVE
            logger.warning("⚠️ Evaluation budget exhausted at |xi|=%.4g", outcome.xi_norm)
            break
        witnesses.append(outcome)
        if not outcome.passed:
            failures.append(outcome)
    if failures:
        verdict = VIOLATED
    logger.info("Slow decrease A=%g horizon=%g: %s (%d balls, %d failures)",
                A, horizon, verdict, len(witnesses), len(failures))
    return SlowDecreaseVerdict(verdict, float(A), float(horizon), witnesses, failures)


def minimal_A_search(F, horizon: float, A_grid: Sequence[float],
                     search: SearchParams | None = None) -> Optional[float]:
    """
    Bisection over an ascending A grid; larger A weakens the condition.
    """
    grid = list(A_grid)
    if not grid:
        return None
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidInputError("A_grid must be strictly ascending")
    F = as_evaluator(F)
    cache = {}

    def ok(i):
        if i not in cache:
            cache[i] = check_slow_decrease(F, grid[i], horizon, search).satisfied
        return cache[i]

    if not ok(len(grid) - 1):
        return None
    lo, hi = -1, len(grid) - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    logger.info("Minimal A on grid: %g", grid[hi])
    return grid[hi]


def default_radius_schedule(limit: float = 1e4) -> np.ndarray:
    return radial_norms(limit)[1:]


def certify_violation(F, xi: Sequence[float], j: int, search: SearchParams | None = None,
                      density: int = 1) -> BallResult:
    """
    Sampled max of |F| on the real ball of radius 2j log(2+|xi|) against (2j+|xi|)^(-2j).
    `passed` is True when |F| exceeded the bound, so a certificate holds iff not passed.
    """
    search = replace(search or SearchParams(), complex_search=False)
    xi = np.asarray(xi, dtype=float)
    r = float(np.linalg.norm(xi))
    return search_ball(as_evaluator(F), xi, 2 * j * math.log(2 + r), (2 * j + r) ** (-2 * j), search, density)


def find_violation_sequence(F, j_max: int, radius_schedule: Sequence[float] | None = None,
                            search: SearchParams | None = None) -> ViolationSequence:
    if j_max < 1:
        raise InvalidInputError("j_max must be at least 1")
    search = search or SearchParams()
    F = as_evaluator(F)
    n = _infer_dimension(F)
    schedule = np.asarray(default_radius_schedule() if radius_schedule is None else radius_schedule, dtype=float)
    dirs = sphere_directions(n)

    points, radii, bounds, maxima = [], [], [], []
    last_norm = -np.inf
    for j in range(1, j_max + 1):
        found = None
        for r in schedule[schedule > last_norm]:
            for d in dirs:
                outcome = certify_violation(F, r * d, j, search)
                if not outcome.passed:
                    outcome = certify_violation(F, r * d, j, search, density=2)
                if not outcome.passed:
                    found = outcome
                    break
            if found:
                break
        if found is None:
            logger.info("No violation found at j=%d; evidence of slow decrease", j)
            return ViolationSequence(points, radii, bounds, maxima, failed_at=j)
        logger.debug("j=%d: xi_j norm %.4g, sampled max %.3e <= %.3e", j, found.xi_norm, found.best_abs, found.threshold)
        points.append(found.xi)
        radii.append(found.radius)
        bounds.append(found.threshold)
        maxima.append(found.best_abs)
        last_norm = found.xi_norm
    return ViolationSequence(points, radii, bounds, maxima)


def _infer_dimension(F: Evaluator) -> int:
    return int(getattr(F, "dimension", 1))
