# invlab/services/scenarios.py
"""
Named experiment scenarios. Each runner writes its CSV/JSON artifacts and returns the checks it
performed; the CLI turns the outcome into an exit code.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy.stats import norm

from invlab.core.errors import InvalidInputError, PreconditionRefusedError
from invlab.schemas.scenario import CheckOut, ScenarioConfig
from invlab.schemas.specs import load_function_spec, parse_group_spec
from invlab.services import fourier_division as fd
from invlab.services import rank_one as ro
from invlab.services.catalog import build_function, build_group, spec_dimension
from invlab.services.distributions import (
    Atom,
    GaussianTest,
    GriddedDensity,
    PointMassDistribution,
    check_sobolev_lemma,
    convolve,
    minkowski_sum_hull,
    same_vertex_set,
    support_hull,
)
from invlab.services.group_invariance import named_group, trivial_group
from invlab.services.slow_decrease import (
    INCONCLUSIVE,
    SATISFIED,
    SearchParams,
    check_slow_decrease,
    constant_symbol,
    find_violation_sequence,
    laplacian_symbol,
    minimal_A_search,
    super_decaying_symbol,
)
from invlab.services.witness_family import WitnessFamily, boundedness_dichotomy, verify_family_properties
from invlab.utils.gridio import write_grid
from invlab.utils.reports import write_csv, write_summary

logger = logging.getLogger(__name__)


@dataclass
class RunContext:
    output_dir: Path
    seed: int
    config_hash: str
    threads: Optional[int] = None

    def search(self, **overrides) -> SearchParams:
        return SearchParams(seed=self.seed, threads=self.threads, **overrides)

    def path(self, name: str) -> Path:
        return self.output_dir / name

    def csv(self, name: str, rows, columns=None) -> Path:
        return write_csv(self.path(name), rows, self.config_hash, columns)


@dataclass
class ScenarioOutcome:
    checks: List[CheckOut] = field(default_factory=list)
    exit_code: Optional[int] = None
    extra: dict = field(default_factory=dict)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(CheckOut(name=name, passed=bool(passed), detail=detail))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def code(self) -> int:
        if self.exit_code is not None:
            return self.exit_code
        return 0 if self.passed else 1


# --- Single scenarios ---

def run_check_invertibility(cfg: ScenarioConfig, ctx: RunContext) -> ScenarioOutcome:
    F = build_function(load_function_spec(cfg.function))
    verdict = check_slow_decrease(F, cfg.A, cfg.horizon, ctx.search(complex_search=cfg.complex_search))
    ctx.csv("check_invertibility.csv", verdict.rows(), ["xi_norm", "ball_radius", "best_abs_F", "threshold", "pass"])
    out = ScenarioOutcome(extra={"verdict": verdict.label(), "A": cfg.A, "horizon": cfg.horizon,
                                 "failures": len(verdict.failures)})
    out.add("slow-decrease", verdict.satisfied, verdict.label())
    out.exit_code = {SATISFIED: 0, INCONCLUSIVE: 2}.get(verdict.verdict, 1)
    return out


def run_witness_family(cfg: ScenarioConfig, ctx: RunContext) -> ScenarioOutcome:
    F = build_function(load_function_spec(cfg.function))
    n = spec_dimension(F)
    W = build_group(parse_group_spec(cfg.group), n)
    family = WitnessFamily.from_symbol(F, W, cfg.jmax, search=ctx.search())
    rows = family.rows()
    ctx.csv("witness_family.csv", rows, ["j", "xi_j", "k_j", "F_at_xi", "bound", "pass"])
    report = verify_family_properties(range(1, cfg.jmax + 1), family=family, seed=ctx.seed)
    ctx.csv("witness_properties.csv", report.rows())
    out = ScenarioOutcome(extra={"group": W.name, "order": W.order, "jmax": cfg.jmax})
    out.add("family-bounds", all(r["pass"] for r in rows), f"j=1..{cfg.jmax}")
    out.add("family-properties", report.passed, f"{len(report.checks)} checks")
    return out


def _disk_quotient_artifact(mu: ro.RadialDistribution, epsilon: float, grid: fd.SpectralGrid, path: Path) -> None:
    """Same division resampled at cell centres of [0, cutoff]; the residuals were taken on the GL nodes."""
    h = grid.cutoff / grid.nodes
    lam = (np.arange(grid.nodes) + 0.5) * h
    sampled = fd.divide(1.0, lambda z: ro.spherical_ft(mu, z[:, 0]), lam[:, None], epsilon)
    write_grid(path, (0.0,), (grid.cutoff,), sampled.quotient.astype(np.complex64))


def run_fundamental_solution(cfg: ScenarioConfig, ctx: RunContext) -> ScenarioOutcome:
    mu = build_function(load_function_spec(cfg.mu))
    out = ScenarioOutcome()
    try:
        if isinstance(mu, ro.RadialDistribution):
            grid = fd.SpectralGrid(nodes=cfg.grid or 512)
            result = fd.fundamental_solution(mu, cfg.epsilon, grid, search=ctx.search())
            _disk_quotient_artifact(mu, cfg.epsilon, grid, ctx.path("quotient.grid"))
        else:
            grid = fd.FrequencyGrid(mu.dimension, 64.0, cfg.grid) if cfg.grid else fd.FrequencyGrid.default(mu.dimension)
            result = fd.fundamental_solution(mu, cfg.epsilon, grid, search=ctx.search())
            shape = (grid.points,) * grid.dimension
            write_grid(ctx.path("quotient.grid"), (-grid.extent,) * grid.dimension, (grid.extent,) * grid.dimension,
                       result.quotient.reshape(shape).astype(np.complex64))
    except PreconditionRefusedError as e:
        out.add("slow-decrease-gate", False, e.detail)
        out.extra["refused"] = e.verdict
        return out
    ctx.csv("fundamental_solution.csv", result.rows(), ["test", "residual", "tolerance", "pass"])
    out.extra.update({"epsilon": cfg.epsilon, "status": result.status})
    out.add("weak-residuals", result.passed, f"{len(result.residuals)} tests")
    return out


# --- Rank-one suites ---

def _residual_rows(case: str, residuals: List[ro.Residual]) -> List[dict]:
    return [{"case": case, "check": r.name, "residual": r.value, "tolerance": r.tolerance, "pass": r.passed}
            for r in residuals]


def suite_projection_slice(ctx: RunContext) -> List[dict]:
    lam = np.linspace(-20.0, 20.0, 200)
    t = np.linspace(-3.0, 3.0, 121)
    rows = []
    for name, mu in ro.standard_distributions().items():
        rel = float(np.max(ro.projection_slice_residual(mu, lam)))
        even = ro.abel_transform(mu).evenness_defect(t)
        rows += _residual_rows(name, [ro.Residual("projection-slice", rel, 1e-7),
                                      ro.Residual("abel-evenness", even, 1e-9)])
    return rows


def suite_diagram(ctx: RunContext) -> List[dict]:
    rows = []
    for name, mu in ro.standard_distributions().items():
        for fname, F in ro.standard_even_bumps().items():
            rows += _residual_rows(f"{name}|{fname}", [ro.check_diagram(F, mu)])
    return rows


def suite_radon(ctx: RunContext) -> List[dict]:
    rows = []
    bump = ro.RadialDistribution.bump(ro.cosh_power_profile(1.0))
    t = np.linspace(-1.5, 1.5, 61)
    rows += _residual_rows("bump", [ro.radon_b_independence(bump, t)])
    outside = np.abs(ro.radon_transform(bump).sample(np.array([-1.2, -1.0, 1.0, 1.2])))
    rows += _residual_rows("bump", [ro.Residual("support", float(outside.max()), 0.0)])
    f = ro.cosh_power_profile(0.8)
    standard = ro.standard_distributions()
    for name in ("delta_o", "laplacian", "pair"):
        rows += _residual_rows(name, ro.radon_intertwining(f, standard[name]))
    rows += _residual_rows("pair", [ro.check_convolution_routes(ro.cosh_power_profile(2.0, m=12), standard["pair"])])
    rows += _residual_rows("bump", [ro.check_duality(bump, ro.LineGaussian(0.8))])
    return rows


def suite_dual(ctx: RunContext) -> List[dict]:
    rows = []
    waves = {"wave_w0.8": ro.HorocycleWave(0.8, 0.0), "wave_w1_tilt": ro.HorocycleWave(1.0, 0.3)}
    for name, mu in ro.standard_distributions().items():
        for wname, phi in waves.items():
            rows += _residual_rows(f"{name}|{wname}", [ro.check_dual_diagram(phi, mu)])
    return rows


RANK_ONE_SUITES: Dict[str, Callable[[RunContext], List[dict]]] = {
    "projection-slice": suite_projection_slice,
    "diagram": suite_diagram,
    "radon": suite_radon,
    "dual": suite_dual,
}


def run_rank_one(cfg: ScenarioConfig, ctx: RunContext) -> ScenarioOutcome:
    rows = RANK_ONE_SUITES[cfg.suite](ctx)
    ctx.csv(f"rank_one_{cfg.suite}.csv", rows, ["case", "check", "residual", "tolerance", "pass"])
    out = ScenarioOutcome(extra={"suite": cfg.suite})
    for row in rows:
        out.add(f"{cfg.suite}:{row['case']}:{row['check']}", row["pass"], f"{row['residual']:.3e}")
    return out


# --- Full suite ---

def _random_atomic(rng: np.random.Generator, dimension: int) -> PointMassDistribution:
    count = int(rng.integers(1, 6))
    atoms = tuple(
        Atom(float(rng.standard_normal()), (0,) * dimension, tuple(np.round(rng.uniform(-2, 2, dimension), 3)))
        for _ in range(count)
    )
    return PointMassDistribution(dimension, atoms)


def check_supports(rng: np.random.Generator, pairs: int = 100) -> List[dict]:
    rows = []
    for i in range(pairs):
        S, T = _random_atomic(rng, 2), _random_atomic(rng, 2)
        expected = minkowski_sum_hull(support_hull(S), support_hull(T))
        rows.append({"pair": i, "vertices": len(expected),
                     "pass": same_vertex_set(support_hull(convolve(S, T)), expected)})
    return rows


def _random_bump(rng: np.random.Generator, dimension: int) -> GriddedDensity:
    centre = rng.uniform(-1.0, 1.0, dimension)
    radius = rng.uniform(0.8, 1.6)
    amp = rng.uniform(0.5, 2.0)

    def fn(x):
        u = np.sum((x - centre) ** 2, axis=1) / radius ** 2
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(u < 1.0, amp * np.exp(-1.0 / np.maximum(1.0 - u, 1e-300)), 0.0)

    size = 256 if dimension == 1 else 64
    return GriddedDensity.from_function(fn, (-4.0,) * dimension, (4.0,) * dimension, size)


def check_sobolev(rng: np.random.Generator, bumps: int = 10) -> List[dict]:
    rows = []
    for n in (1, 2):
        for b in range(bumps):
            u = _random_bump(rng, n)
            for N in range(1, 4):
                for lemma in check_sobolev_lemma(u, N):
                    rows.append({"n": n, "bump": b, "N": N, "k": lemma.k, "sup": lemma.sup_value,
                                 "bound": lemma.bound, "pass": lemma.passed})
    return rows


def _slow_decrease_rows(ctx: RunContext, horizon: float) -> List[dict]:
    search = ctx.search()
    grid = [0.5, 1.0, 2.0, 4.0]
    const_A = minimal_A_search(constant_symbol(1), horizon, grid, search)
    lap_A = minimal_A_search(laplacian_symbol(1), horizon, grid, search)
    seq = find_violation_sequence(super_decaying_symbol(1), 6, search=search)
    return [
        {"symbol": "constant", "result": f"satisfied-at({const_A})", "pass": const_A == 1.0},
        {"symbol": "laplacian", "result": f"satisfied-at({lap_A})", "pass": lap_A is not None},
        {"symbol": "super_decaying", "result": f"violation-sequence j<={len(seq)}", "pass": seq.complete},
    ]


def _fundamental_rows(ctx: RunContext) -> List[dict]:
    search = ctx.search()
    rows = []
    delta = fd.fundamental_solution(PointMassDistribution.delta((0.0,)), tolerance=1e-10, search=search)
    rows += [dict(r, case="delta_0") for r in delta.rows()]

    deriv = PointMassDistribution.delta((0.0,), deriv=(1,))
    grid = fd.FrequencyGrid.default(1)
    result = fd.fundamental_solution(deriv, 1e-6, grid, tolerance=1e-4, search=search)
    rows += [dict(r, case="derivative") for r in result.rows()]
    tests = {f"heaviside_c{c:g}": GaussianTest((c,), 1.0) for c in (-0.7, 0.3, 1.1)}
    for name, value in fd.sampled_solution_pairings(result, grid, tests).items():
        c = tests[name].center[0]
        oracle = math.sqrt(2 * np.pi) * (0.5 - norm.cdf(c))
        err = abs(value - oracle)
        rows.append({"case": "derivative", "test": name, "residual": err, "tolerance": 1e-4, "pass": err <= 1e-4})

    two_point = 0.5 * (PointMassDistribution.delta((0.0,)) + PointMassDistribution.delta((1.0,)))
    epsilons = [1e-2, 1e-3, 1e-4]
    worst = fd.epsilon_sweep(two_point, epsilons, fd.band_limited_suite(1), fd.FrequencyGrid(1, 4.0, 1024))
    for k, (eps, value) in enumerate(zip(epsilons, worst)):
        shrinking = k == 0 or value < worst[k - 1]
        rows.append({"case": "two_point_mean", "test": f"band_sweep_eps{eps:g}", "residual": value,
                     "tolerance": math.inf, "pass": shrinking})

    lap = fd.fundamental_solution(ro.RadialDistribution.laplacian(), 1e-8, search=search)
    rows += [dict(r, case="disk_laplacian") for r in lap.rows()]
    try:
        fd.invertibility_gate(super_decaying_symbol(1), search=search)
        refused = False
    except PreconditionRefusedError:
        refused = True
    rows.append({"case": "super_decaying", "test": "gate", "residual": 0.0, "tolerance": 0.0, "pass": refused})
    return rows


def run_full_suite(cfg: ScenarioConfig, ctx: RunContext) -> ScenarioOutcome:
    out = ScenarioOutcome()
    rng = np.random.default_rng(ctx.seed)

    props = verify_family_properties(range(1, 9), dimension=1, seed=ctx.seed)
    rows = [dict(r, group="trivial", n=1) for r in props.rows()]
    for name in ("signs", "A2", "B2", "G2"):
        report = verify_family_properties(range(1, 5), W=named_group(name, 2), seed=ctx.seed)
        rows += [dict(r, group=name, n=2) for r in report.rows()]
    ctx.csv("full_witness_properties.csv", rows)
    out.add("witness-properties", all(r["pass"] for r in rows), f"{len(rows)} checks")

    symbol = super_decaying_symbol(1)
    family = WitnessFamily.from_symbol(symbol, trivial_group(1), 6, search=ctx.search())
    dichotomy = boundedness_dichotomy(symbol, family, np.linspace(-3000.0, 3000.0, 6001)[:, None], ctx.search())
    ctx.csv("full_dichotomy.csv", family.rows())
    out.add("boundedness-dichotomy", dichotomy.passed, f"F_3(xi_3)={family.center_value(3):.3e}")

    for suite in ("projection-slice", "diagram", "radon"):
        rows = RANK_ONE_SUITES[suite](ctx)
        ctx.csv(f"full_rank_one_{suite}.csv", rows)
        out.add(f"rank-one:{suite}", all(r["pass"] for r in rows), f"{len(rows)} cases")

    rows = _slow_decrease_rows(ctx, min(cfg.horizon, 1000.0))
    ctx.csv("full_slow_decrease.csv", rows)
    out.add("slow-decrease", all(r["pass"] for r in rows))

    rows = _fundamental_rows(ctx)
    ctx.csv("full_fundamental_solutions.csv", rows, ["case", "test", "residual", "tolerance", "pass"])
    out.add("fundamental-solutions", all(r["pass"] for r in rows), f"{len(rows)} tests")

    rows = check_supports(rng)
    ctx.csv("full_supports.csv", rows)
    out.add("theorem-of-supports", all(r["pass"] for r in rows), f"{len(rows)} pairs")

    rows = check_sobolev(rng)
    ctx.csv("full_sobolev.csv", rows)
    out.add("sobolev-lemma", all(r["pass"] for r in rows), f"{len(rows)} checks")
    return out


SCENARIOS: Dict[str, Callable[[ScenarioConfig, RunContext], ScenarioOutcome]] = {
    "check-invertibility": run_check_invertibility,
    "witness-family": run_witness_family,
    "rank-one": run_rank_one,
    "fundamental-solution": run_fundamental_solution,
    "full-suite": run_full_suite,
}


def run(cfg: ScenarioConfig, ctx: RunContext) -> ScenarioOutcome:
    runner = SCENARIOS.get(cfg.scenario)
    if runner is None:
        raise InvalidInputError(f"Unknown scenario {cfg.scenario!r}")
    logger.info("Running scenario %s (seed=%d, config=%s)", cfg.scenario, ctx.seed, ctx.config_hash)
    outcome = runner(cfg, ctx)
    write_summary(ctx.path(f"{cfg.scenario}_summary.json"), cfg.scenario, ctx.seed, ctx.config_hash,
                  outcome.checks, outcome.extra)
    return outcome
