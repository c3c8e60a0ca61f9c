# invlab/services/witness_family.py
"""
Sinc-power witness family

    h_j(z)      = (sin(pi z / j) / (pi z / j))^(2j)
    H_j(zeta)   = prod_m h_j(zeta_m)
    F_j^s(zeta) = e^k H_k(sqrt(n) s^-1 (zeta - s xi_j)),   k = floor(2j log(2 + |xi_j|))
    F_j(zeta)   = (1/|W|) sum_s F_j^s(zeta)

built on a violation sequence xi_j, plus machine checks of the bounds the family satisfies.
H_k is invariant under signed coordinate permutations, where s^-1 drops out; for other groups
it keeps F_j invariant.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence

import numpy as np

from invlab.core.config import DEFAULT_SEED
from invlab.core.errors import InvalidInputError
from invlab.services.distributions import boundedness_profile
from invlab.services.group_invariance import FiniteOrthogonalGroup, generic_point, trivial_group
from invlab.services.slow_decrease import (
    SearchParams,
    ViolationSequence,
    as_evaluator,
    certify_violation,
    find_violation_sequence,
)

logger = logging.getLogger(__name__)

TAYLOR_RADIUS = 1e-4
SLACK = 1e-12


# --- Scalar building blocks ---

def _sinc_ratio(w: np.ndarray) -> np.ndarray:
    small = np.abs(w) < TAYLOR_RADIUS
    safe = np.where(small, 1.0, w)
    w2 = w * w
    return np.where(small, 1 - w2 / 6 + w2 * w2 / 120, np.sin(safe) / safe)


def log_abs_h(j: int, z) -> np.ndarray:
    """2j log |sin(w)/w| with w = pi z / j; -inf at zeros."""
    z = np.asarray(z, dtype=complex)
    s = _sinc_ratio(np.pi * z / j)
    with np.errstate(divide="ignore"):
        return 2 * j * np.log(np.abs(s))


def eval_h(j: int, z) -> np.ndarray:
    if j < 1:
        raise InvalidInputError(f"j must be at least 1, got {j}")
    z = np.asarray(z)
    if not np.iscomplexobj(z) or np.all(np.imag(z) == 0):
        s = _sinc_ratio(np.pi * np.real(z).astype(float) / j)
        return s ** (2 * j)
    s = _sinc_ratio(np.pi * z.astype(complex) / j)
    mod = np.abs(s)
    with np.errstate(divide="ignore"):
        out = np.exp(2 * j * np.log(mod)) * np.exp(1j * 2 * j * np.angle(s))
    return np.where(mod == 0, 0.0, out)


def eval_H(j: int, zeta) -> np.ndarray:
    zeta = np.atleast_2d(zeta)
    return np.prod(eval_h(j, zeta), axis=-1)


def log_abs_H(j: int, zeta) -> np.ndarray:
    return np.sum(log_abs_h(j, np.atleast_2d(zeta)), axis=-1)


def k_index(j: int, xi_norm: float) -> int:
    return max(1, int(math.floor(2 * j * math.log(2 + xi_norm))))


# --- The family ---

@dataclass(frozen=True, eq=False)
class WitnessFamily:
    W: FiniteOrthogonalGroup
    xi_seq: ViolationSequence

    @property
    def dimension(self) -> int:
        return self.W.dimension

    @property
    def j_max(self) -> int:
        return len(self.xi_seq)

    def xi(self, j: int) -> np.ndarray:
        if not 1 <= j <= self.j_max:
            raise InvalidInputError(f"j={j} outside 1..{self.j_max}")
        return np.asarray(self.xi_seq.points[j - 1], dtype=float)

    def k(self, j: int) -> int:
        return k_index(j, float(np.linalg.norm(self.xi(j))))

    def eval_F_sigma(self, j: int, sigma: np.ndarray, zeta) -> np.ndarray:
        zeta = np.atleast_2d(np.asarray(zeta, dtype=complex))
        k = self.k(j)
        # rows of zeta @ sigma are sigma^-1 zeta
        local = zeta @ np.asarray(sigma) - self.xi(j)
        return math.exp(k) * eval_H(k, math.sqrt(self.dimension) * local)

    def eval_F(self, j: int, zeta) -> np.ndarray:
        zeta = np.atleast_2d(np.asarray(zeta, dtype=complex))
        total = sum(self.eval_F_sigma(j, sigma, zeta) for sigma in self.W.elements)
        return total / self.W.order

    def center_value(self, j: int) -> float:
        return float(np.real(self.eval_F(j, self.xi(j)[None])[0]))

    def center_bound(self, j: int) -> float:
        """e^-1 (2 + |xi_j|)^(2j) / |W|; all summands are nonnegative on R^n."""
        r = float(np.linalg.norm(self.xi(j)))
        return math.exp(-1) * (2 + r) ** (2 * j) / self.W.order

    def rows(self) -> List[dict]:
        out = []
        for j in range(1, self.j_max + 1):
            value, bound = self.center_value(j), self.center_bound(j)
            out.append({
                "j": j,
                "xi_j": " ".join(f"{v:.12g}" for v in self.xi(j)),
                "k_j": self.k(j),
                "F_at_xi": value,
                "bound": bound,
                "pass": value >= bound * (1 - SLACK),
            })
        return out

    @classmethod
    def from_symbol(cls, F, W: FiniteOrthogonalGroup, j_max: int,
                    radius_schedule: Optional[Sequence[float]] = None,
                    search: Optional[SearchParams] = None) -> "WitnessFamily":
        seq = find_violation_sequence(F, j_max, radius_schedule, search)
        if not seq.complete:
            logger.error("Symbol has no violation sequence (stopped at j=%s)", seq.failed_at)
            raise InvalidInputError(
                f"No violation sequence up to j={j_max}: failed at j={seq.failed_at}"
            )
        return cls(W, seq)


def anchor_family(W: FiniteOrthogonalGroup, j_max: int, spacing: float = 3.0) -> WitnessFamily:
    """
    Family on generic anchors xi_j of norm spacing * j. The bounds on h, H and F_j^s hold for any
    anchor, so property sweeps do not need a genuine violation sequence.
    """
    points = [tuple(generic_point(W, spacing * j, seed=DEFAULT_SEED + j)) for j in range(1, j_max + 1)]
    norms = [float(np.linalg.norm(p)) for p in points]
    seq = ViolationSequence(
        points=points,
        certified_radius=[2 * j * math.log(2 + r) for j, r in zip(range(1, j_max + 1), norms)],
        certified_bound=[(2 * j + r) ** (-2 * j) for j, r in zip(range(1, j_max + 1), norms)],
        sampled_max=[float("nan")] * j_max,
    )
    return WitnessFamily(W, seq)


# --- Property verification ---

@dataclass(frozen=True)
class PropertyCheck:
    name: str
    j: int
    samples: int
    worst_margin: float

    @property
    def passed(self) -> bool:
        return self.worst_margin >= -SLACK


@dataclass
class PropertyReport:
    checks: List[PropertyCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[PropertyCheck]:
        return [c for c in self.checks if not c.passed]

    def add(self, name: str, j: int, margins: np.ndarray) -> None:
        margins = np.asarray(margins, dtype=float)
        self.checks.append(PropertyCheck(name, j, int(margins.size), float(np.min(margins))))

    def rows(self) -> List[dict]:
        return [
            {"property": c.name, "j": c.j, "samples": c.samples, "worst_margin": c.worst_margin, "pass": c.passed}
            for c in self.checks
        ]


def _relative(bound, value) -> np.ndarray:
    """Margin of value <= bound, scaled so that a relative slack of 1e-12 is tolerated."""
    bound, value = np.asarray(bound, dtype=float), np.asarray(value, dtype=float)
    return (bound - value) / np.maximum(1.0, np.abs(bound))


def _log_margin(log_bound, log_value) -> np.ndarray:
    log_bound, log_value = np.broadcast_arrays(np.asarray(log_bound, float), np.asarray(log_value, float))
    margin = log_bound - log_value
    return np.where(np.isneginf(log_value), np.inf, margin) / np.maximum(1.0, np.abs(log_bound))


def _complex_disk(rng, count: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.uniform(0, 1, count))
    theta = rng.uniform(0, 2 * np.pi, count)
    return r * np.exp(1j * theta)


def _check_h(report: PropertyReport, j: int, rng) -> None:
    z = _complex_disk(rng, 4000, 20.0)
    report.add("|h_j(z)| <= exp(2 pi |z|)", j, _log_margin(2 * np.pi * np.abs(z), log_abs_h(j, z)))
    report.add("h_j(0) = 1", j, [-abs(complex(eval_h(j, np.array([0.0]))[0]) - 1.0)])
    x = np.concatenate([np.linspace(-4 * j - 10, 4 * j + 10, 4001), rng.uniform(-50, 50, 2000)])
    hx = eval_h(j, x)
    report.add("0 <= h_j(x) <= 1", j, np.minimum(hx, _relative(1.0, hx)))
    tail = np.concatenate([np.linspace(j, j + 40, 2001), -np.linspace(j, j + 40, 2001)])
    report.add("h_j(x) <= pi^(-2j) for |x| >= j", j, _relative(np.pi ** (-2 * j), eval_h(j, tail)))


def _check_H(report: PropertyReport, j: int, n: int, rng) -> None:
    zeta = rng.uniform(-10, 10, (2000, n)) + 1j * rng.uniform(-10, 10, (2000, n))
    norm = np.linalg.norm(zeta, axis=1)
    report.add("|H_j| <= exp(2 pi sqrt(n) |zeta|)", j,
               _log_margin(2 * np.pi * math.sqrt(n) * norm, log_abs_H(j, zeta)))
    report.add("H_j(0) = 1", j, [-abs(complex(eval_H(j, np.zeros((1, n)))[0]) - 1.0)])
    xi = rng.uniform(-3 * j - 3, 3 * j + 3, (10_000, n))
    Hx = np.real(eval_H(j, xi))
    report.add("0 <= H_j(xi) <= 1", j, np.minimum(Hx, _relative(1.0, Hx)))
    far = rng.uniform(-3 * j - 3, 3 * j + 3, (4000, n))
    axis = rng.integers(0, n, 4000)
    far[np.arange(4000), axis] = np.sign(rng.uniform(-1, 1, 4000)) * rng.uniform(j, 3 * j + 10, 4000)
    report.add("H_j(xi) <= pi^(-2j) when some |xi_m| >= j", j,
               _relative(np.pi ** (-2 * j), np.real(eval_H(j, far))))


def _check_F(report: PropertyReport, family: WitnessFamily, j: int, rng) -> None:
    n = family.dimension
    xi_j = family.xi(j)
    r = float(np.linalg.norm(xi_j))
    k = family.k(j)
    log_cj = 2 * j * math.log(2 + r) + 2 * np.pi * n * r
    for idx, sigma in enumerate(family.W.elements):
        centre = sigma @ xi_j
        zeta = centre + rng.uniform(-6, 6, (1000, n)) + 1j * rng.uniform(-3, 3, (1000, n))
        log_val = k + log_abs_H(k, math.sqrt(n) * ((zeta - centre) @ sigma))
        report.add("|F_j^s| <= C_j exp(2 pi n |zeta|)", j,
                   _log_margin(log_cj + 2 * np.pi * n * np.linalg.norm(zeta, axis=1), log_val))
        at_centre = float(np.real(family.eval_F_sigma(j, sigma, centre[None])[0]))
        report.add("F_j^s(s xi_j) >= e^-1 (2+|xi_j|)^(2j)", j,
                   [(at_centre - math.exp(-1) * (2 + r) ** (2 * j)) / max(1.0, at_centre)])
        real = centre + rng.uniform(-3 * k, 3 * k, (2000, n))
        vals = np.real(family.eval_F_sigma(j, sigma, real))
        report.add("0 <= F_j^s(xi) <= (2+|xi_j|)^(2j)", j,
                   np.minimum(vals / (2 + r) ** (2 * j), _relative((2 + r) ** (2 * j), vals)))
        radius = 2 * j * math.log(2 + r)
        dirs = rng.standard_normal((2000, n))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        tail = centre + dirs * (radius + rng.uniform(0, 30, (2000, 1)))
        report.add("F_j^s(xi) <= 1 off the ball", j,
                   _relative(1.0, np.real(family.eval_F_sigma(j, sigma, tail))))
    report.add("F_j(xi_j) >= e^-1 (2+|xi_j|)^(2j) / |W|", j,
               [(family.center_value(j) - family.center_bound(j)) / max(1.0, family.center_bound(j))])
    zeta = rng.uniform(-3 * k, 3 * k, (500, n)) + 1j * rng.uniform(-1, 1, (500, n))
    base = family.eval_F(j, zeta)
    scale = max(1.0, float(np.abs(base).max()))
    worst = max(float(np.abs(family.eval_F(j, zeta @ sigma.T) - base).max()) for sigma in family.W.elements)
    report.add("F_j is W-invariant", j, [1e-12 - worst / scale])


def verify_family_properties(j_range: Iterable[int], dimension: int = 1,
                             W: Optional[FiniteOrthogonalGroup] = None,
                             family: Optional[WitnessFamily] = None,
                             seed: int = DEFAULT_SEED) -> PropertyReport:
    W = family.W if family is not None else (W or trivial_group(dimension))
    n = W.dimension
    j_range = list(j_range)
    if family is None:
        family = anchor_family(W, max(j_range))
    report = PropertyReport()
    for j in j_range:
        rng = np.random.default_rng(seed + j)
        _check_h(report, j, rng)
        _check_H(report, j, n, rng)
        _check_F(report, family, j, rng)
    bad = report.failures
    if bad:
        logger.warning("⚠️ %d family properties failed, first: %s (j=%d)", len(bad), bad[0].name, bad[0].j)
    else:
        logger.info("✅ All %d family property checks passed", len(report.checks))
    return report


# --- Boundedness dichotomy ---

@dataclass
class DichotomyReport:
    uniform_margin: float
    near_margin: float
    far_margin: float
    envelope_constant: float
    envelope_degree: int
    center_values: List[float]
    center_bounds: List[float]
    envelope_ratios: List[float]

    @property
    def bounded_image(self) -> bool:
        return min(self.uniform_margin, self.near_margin, self.far_margin) >= -SLACK

    @property
    def unbounded_preimage(self) -> bool:
        grows = all(v >= b * (1 - SLACK) for v, b in zip(self.center_values, self.center_bounds))
        increasing = all(b > a for a, b in zip(self.envelope_ratios, self.envelope_ratios[1:]))
        return grows and increasing and self.envelope_ratios[-1] > 1.0

    @property
    def passed(self) -> bool:
        return self.bounded_image and self.unbounded_preimage


def boundedness_dichotomy(mu_hat, family: WitnessFamily, xi_grid: np.ndarray,
                          search: Optional[SearchParams] = None) -> DichotomyReport:
    """
    (i) |mu F_j| <= |mu| + 1 on the grid for every j, split into near-ball points (<= 1) and far
    points (<= |mu|); (ii) F_j(xi_j) outgrows the uniform envelope of the products.
    """
    F = as_evaluator(mu_hat, family.dimension)
    for j in range(1, family.j_max + 1):
        cert = certify_violation(F, family.xi(j), j, search)
        if cert.passed:
            logger.error("Violation certificate for j=%d fails on re-check", j)
            raise InvalidInputError(f"Family does not match the symbol: certificate at j={j} fails")

    xi_grid = np.atleast_2d(np.asarray(xi_grid, dtype=float))
    mu = np.abs(F(xi_grid))
    uniform, near, far = [], [], []
    for j in range(1, family.j_max + 1):
        prod = np.abs(family.eval_F(j, xi_grid)) * mu
        uniform.append(_relative(mu + 1.0, prod))
        xi_j = family.xi(j)
        radius = 2 * j * math.log(2 + float(np.linalg.norm(xi_j)))
        dist = np.min(np.stack([np.linalg.norm(xi_grid - s @ xi_j, axis=1) for s in family.W.elements]), axis=0)
        inside = dist < radius
        if np.any(inside):
            near.append(_relative(1.0, prod[inside]))
        if np.any(~inside):
            far.append(_relative(mu[~inside], prod[~inside]))

    products = [
        (lambda x, j=j: np.abs(family.eval_F(j, x)) * np.abs(F(x)))
        for j in range(1, family.j_max + 1)
    ]
    profile = boundedness_profile(products, xi_grid, degree=0, type_radius=0.0)
    values = [family.center_value(j) for j in range(1, family.j_max + 1)]
    bounds = [family.center_bound(j) for j in range(1, family.j_max + 1)]
    norms = [float(np.linalg.norm(family.xi(j))) for j in range(1, family.j_max + 1)]
    ratios = [v / (profile.constant * (1 + r) ** profile.degree) for v, r in zip(values, norms)]

    report = DichotomyReport(
        uniform_margin=float(min(np.min(u) for u in uniform)),
        near_margin=float(min((np.min(m) for m in near), default=np.inf)),
        far_margin=float(min((np.min(m) for m in far), default=np.inf)),
        envelope_constant=profile.constant,
        envelope_degree=profile.degree,
        center_values=values,
        center_bounds=bounds,
        envelope_ratios=ratios,
    )
    logger.info("Dichotomy: bounded image %s, unbounded preimage %s", report.bounded_image, report.unbounded_preimage)
    return report
