import numpy as np
import pytest

from invlab.core.errors import EvaluatorError, InvalidInputError
from invlab.services.distributions import PointMassDistribution
from invlab.services.slow_decrease import (
    SATISFIED,
    VIOLATED,
    SearchParams,
    Symbol,
    certify_violation,
    check_slow_decrease,
    constant_symbol,
    find_violation_sequence,
    frequency_grid,
    laplacian_symbol,
    minimal_A_search,
    radial_norms,
)

A_GRID = (0.5, 1.0, 2.0, 4.0)


def test_constant_is_slowly_decreasing_with_A_one(search):
    verdict = check_slow_decrease(constant_symbol(), 1.0, 100.0, search)
    assert verdict.verdict == SATISFIED
    assert verdict.label() == "satisfied-at(1)"
    assert minimal_A_search(constant_symbol(), 100.0, A_GRID, search) == 1.0


def test_constant_fails_below_one(search):
    verdict = check_slow_decrease(constant_symbol(), 0.5, 10.0, search)
    assert verdict.verdict == VIOLATED
    assert verdict.failures[0].xi_norm == 0.0


def test_laplacian_symbol_needs_A_two(search):
    assert minimal_A_search(laplacian_symbol(), 100.0, A_GRID, search) == 2.0


def test_delta_transform_is_accepted(search):
    F = PointMassDistribution.delta((0.0,)).fourier_transform()
    assert check_slow_decrease(F, 1.0, 50.0, search).satisfied


def test_complex_search_agrees_on_constant():
    params = SearchParams(threads=1, complex_search=True)
    assert check_slow_decrease(constant_symbol(2), 1.0, 20.0, params).satisfied


def test_super_decaying_is_violated(super_decaying, search):
    verdict = check_slow_decrease(super_decaying, 2.0, 100.0, search)
    assert verdict.verdict == VIOLATED
    assert minimal_A_search(super_decaying, 100.0, A_GRID, search) is None


def test_verdict_rows(search):
    rows = check_slow_decrease(constant_symbol(), 1.0, 10.0, search).rows()
    assert set(rows[0]) == {"xi_norm", "ball_radius", "best_abs_F", "threshold", "pass"}
    assert all(row["pass"] for row in rows)


def test_violation_sequence_is_increasing_and_certified(super_decaying, search):
    seq = find_violation_sequence(super_decaying, 6, search=search)
    assert seq.complete and len(seq) == 6
    assert all(b > a for a, b in zip(seq.norms, seq.norms[1:]))
    for j, (m, bound) in enumerate(zip(seq.sampled_max, seq.certified_bound), start=1):
        assert m <= bound
        assert bound == pytest.approx((2 * j + seq.norms[j - 1]) ** (-2 * j))


def test_no_violation_sequence_for_constant(search):
    seq = find_violation_sequence(constant_symbol(), 3, radius_schedule=[1, 10, 100], search=search)
    assert not seq.complete
    assert seq.failed_at == 1


def test_certificate_on_constant_fails(search):
    assert certify_violation(constant_symbol(), [50.0], 2, search).passed


def test_input_validation(search):
    with pytest.raises(InvalidInputError):
        check_slow_decrease(constant_symbol(), 0.0, 10.0, search)
    with pytest.raises(InvalidInputError):
        minimal_A_search(constant_symbol(), 10.0, [2.0, 1.0], search)
    with pytest.raises(InvalidInputError):
        find_violation_sequence(constant_symbol(), 0, search=search)
    assert minimal_A_search(constant_symbol(), 10.0, [], search) is None


def test_non_finite_evaluator_output(search):
    broken = Symbol(lambda zeta: np.full(zeta.shape[0], np.nan))
    with pytest.raises(EvaluatorError) as info:
        check_slow_decrease(broken, 1.0, 10.0, search)
    assert info.value.point is not None


def test_frequency_grid_shape():
    norms = radial_norms(1000.0)
    assert norms[0] == 0.0 and norms[-1] == pytest.approx(1000.0)
    assert all(b > a for a, b in zip(norms, norms[1:]))
    grid = frequency_grid(2, 1000.0)
    assert grid.shape == (1 + 8 * (len(norms) - 1), 2)
    assert frequency_grid(3, 10.0).shape[1] == 3
