from __future__ import annotations

import pytest

from pmaplab.combinat import subsets_upto
from pmaplab.errors import InvalidInput, SingularShift
from pmaplab.field import default_field
from pmaplab.matrix import ExactMatrix, det, inverse
from pmaplab.services.generators import gen_random_dense
from pmaplab.services.oracle import (
    PMOracle,
    box_from_matrix,
    check_2x2_irreducible,
    interpolate_coefficients,
    pm_query,
    restrict_box,
    shifted_inverse_box,
)


@pytest.fixture
def shifted_pair(f101):
    a = ExactMatrix.build(f101, [[2, 1, 1], [1, 3, 1], [1, 1, 4]])
    return a, (1, 1, 1)


def test_minor_queries_match_explicit_minors(stream):
    field = default_field(5)
    a = gen_random_dense(5, field, stream)
    box = box_from_matrix(a)
    for subset in subsets_upto(a.index, a.n):
        assert pm_query(box, subset) == a.minor(subset)


def test_minor_query_cost_is_n_minus_t_plus_one(stream):
    field = default_field(6)
    a = gen_random_dense(6, field, stream)
    box = box_from_matrix(a)
    for subset in [(1,), (2, 5), (1, 3, 4, 6), tuple(a.index)]:
        before = box.queries
        pm_query(box, subset)
        assert box.queries - before == a.n - len(subset) + 1


def test_minor_query_rejects_empty_and_foreign_sets(f101):
    box = box_from_matrix(ExactMatrix.identity(f101, 3))
    with pytest.raises(InvalidInput):
        pm_query(box, ())
    with pytest.raises(InvalidInput):
        pm_query(box, (4,))


def test_shifted_inverse_box_matches_explicit_inverse(shifted_pair, stream):
    a, shift = shifted_pair
    inverted = inverse(a.plus_diagonal(shift))
    box = shifted_inverse_box(box_from_matrix(a), shift)
    points = [(0, 0, 0), (0, 5, 7), (2, 0, 9)] + [tuple(a.field.random(stream) for _ in range(3)) for _ in range(20)]
    for point in points:
        assert box.evaluate(point) == det(inverted.plus_diagonal(point))


def test_zero_inputs_cost_degree_plus_one(shifted_pair):
    a, shift = shifted_pair
    box = shifted_inverse_box(box_from_matrix(a), shift)
    before = box.queries
    box.evaluate((0, 4, 0))
    assert box.queries - before == box.degree + 1
    before = box.queries
    box.evaluate((3, 4, 5))
    assert box.queries - before == 1


def test_singular_shift_is_reported(f101):
    a = ExactMatrix.build(f101, [[1, 1], [1, 1]])
    with pytest.raises(SingularShift):
        shifted_inverse_box(box_from_matrix(a), (0, 0))


def test_restricted_box_is_principal_submatrix_box(stream):
    a = gen_random_dense(5, default_field(5), stream)
    sub = restrict_box(box_from_matrix(a), (2, 4, 5))
    expected = box_from_matrix(a.principal((2, 4, 5)))
    for point in [(0, 0, 0), (1, 2, 3), (7, 0, 11)]:
        assert sub.evaluate(point) == expected.evaluate(point)


def test_pair_and_triple_products(f101):
    a = ExactMatrix.build(f101, [[1, 2, 3], [4, 5, 6], [7, 8, 10]])
    pm = PMOracle.from_matrix(a)
    assert pm.pair(1, 2) == 8
    assert pm.triple(1, 2, 3) == (2 * 6 * 7 + 3 * 8 * 4) % 101
    assert check_2x2_irreducible(pm, 1, 3)
    reducible = PMOracle.from_matrix(ExactMatrix.build(f101, [[1, 2], [0, 3]]))
    assert not check_2x2_irreducible(reducible, 1, 2)


def test_cached_oracle_counts_misses_only(f101):
    pm = PMOracle.from_matrix(ExactMatrix.build(f101, [[1, 2], [3, 4]])).cached()
    pm(1, 2)
    pm(2, 1)
    pm(1)
    assert pm.queries == 2
    assert pm.max_order == 2
    view = pm.restricted((2,))
    assert view.index == (2,)
    with pytest.raises(InvalidInput):
        pm.restricted((3,))


def test_interpolation_recovers_coefficients(f101):
    # 3 + 2t + t^2 at t = 1, 2, 3
    values = [6, 11, 18]
    assert interpolate_coefficients(f101, values) == [3, 2, 1]
