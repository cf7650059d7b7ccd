from __future__ import annotations

from fractions import Fraction

import pytest

from pmaplab.combinat import subsets_upto
from pmaplab.errors import InvalidInput, NotACut, PartitionMismatch, ZeroOffDiagonal
from pmaplab.field import FieldSpec
from pmaplab.matrix import (
    ExactMatrix,
    adjugate,
    assemble_blocks,
    canonical_diag_similar,
    cut_transpose,
    det,
    inverse,
    is_cut,
    is_irreducible,
    rank,
    scc_partition,
)
from pmaplab.services.generators import gen_random_dense

# Blocks {1,2} and {3,4} coupled by p q^T (p=(1,2), q=(3,1)) and u v^T (u=(1,1), v=(2,1)).
PLANTED_ROWS = [
    [1, 2, 3, 1],
    [3, 4, 6, 2],
    [2, 1, 5, 6],
    [2, 1, 7, 8],
]


def _all_minors_equal(a: ExactMatrix, b: ExactMatrix) -> bool:
    return all(a.minor(s) == b.minor(s) for s in subsets_upto(a.index, a.n))


def test_det_small_cases(rationals, f101):
    assert det(ExactMatrix.identity(rationals, 3)) == 1
    assert det(ExactMatrix.build(rationals, [[1, 2], [3, 1]])) == -5
    assert det(ExactMatrix.build(f101, [[1, 2], [3, 1]])) == 96
    assert det(ExactMatrix.build(rationals, [[2, 1, 0], [1, 3, 1], [0, 1, 4]])) == 18


def test_rank_and_inverse(rationals):
    singular = ExactMatrix.build(rationals, [[1, 1], [2, 2]])
    assert rank(singular) == 1
    assert inverse(singular) is None
    m = ExactMatrix.build(rationals, [[2, 1], [1, 1]])
    assert inverse(m).rows == ((Fraction(1), Fraction(-1)), (Fraction(-1), Fraction(2)))


def test_adjugate_identity_holds_for_singular_and_regular(rationals, f101, stream):
    two_by_two = ExactMatrix.build(rationals, [[1, 2], [3, 4]])
    assert adjugate(two_by_two).rows == ((4, -2), (-3, 1))
    singular = ExactMatrix.build(rationals, [[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    for m in (singular, gen_random_dense(5, f101, stream)):
        product = m.matmul(adjugate(m))
        assert product == ExactMatrix.identity(m.field, m.n).scale(det(m))
    assert adjugate(ExactMatrix.identity(f101, 4)) == ExactMatrix.identity(f101, 4)


def test_transpose_keeps_principal_minors(f101, stream):
    m = gen_random_dense(5, f101, stream)
    assert _all_minors_equal(m, m.transpose())


def test_is_cut_checks_both_off_blocks(rationals):
    ones = ExactMatrix.build(rationals, [[0 if r == c else 1 for c in range(4)] for r in range(4)])
    assert is_cut(ones, (1, 2))
    assert not is_cut(ones, (1,))
    planted = ExactMatrix.build(rationals, PLANTED_ROWS)
    assert is_cut(planted, (1, 2))
    assert not is_cut(planted, (1, 3))
    assert not is_cut(ExactMatrix.build(rationals, [[1, 1, 1]] * 3), (1, 2))


def test_cut_transpose_matches_worked_example(rationals):
    a = ExactMatrix.build(rationals, [[1, 1, 1, 1], [1, 1, 2, 2], [1, 1, 1, 1], [3, 3, 1, 1]])
    b = cut_transpose(a, (1, 2))
    assert b.block((1, 2), (3, 4)) == [[1, 3], [2, 6]]
    assert b.block((3, 4), (1, 2)) == [[1, 1], [1, 1]]
    assert b.block((3, 4), (3, 4)) == a.transpose().block((3, 4), (3, 4))
    assert is_cut(b, (1, 2))
    assert _all_minors_equal(a, b)


def test_cut_transpose_preserves_minors_of_planted_matrix(rationals):
    planted = ExactMatrix.build(rationals, PLANTED_ROWS)
    assert _all_minors_equal(planted, cut_transpose(planted, (1, 2)))
    with pytest.raises(NotACut):
        cut_transpose(planted, (1, 3))


def test_canonical_diag_similar(rationals, f101, stream):
    m = ExactMatrix.build(rationals, [[0, 2], [3, 0]])
    assert canonical_diag_similar(m, 1).rows == ((0, 1), (6, 0))
    dense = gen_random_dense(5, f101, stream)
    canonical = canonical_diag_similar(dense, 2)
    assert all(canonical[2, j] == 1 for j in dense.index if j != 2)
    assert canonical_diag_similar(canonical, 2) == canonical
    assert _all_minors_equal(dense, canonical)
    with pytest.raises(ZeroOffDiagonal):
        canonical_diag_similar(ExactMatrix.identity(rationals, 3), 1)


def test_scc_partition_orders_blocks(rationals):
    upper = ExactMatrix.build(rationals, [[1, 1, 1], [0, 1, 1], [0, 0, 1]])
    assert scc_partition(upper) == [(1,), (2,), (3,)]
    assert scc_partition(upper.transpose()) == [(3,), (2,), (1,)]
    two_cycle = ExactMatrix.build(rationals, [[0, 1, 0], [1, 0, 0], [0, 0, 5]])
    assert sorted(scc_partition(two_cycle)) == [(1, 2), (3,)]
    assert is_irreducible(ExactMatrix.build(rationals, PLANTED_ROWS))


def test_assemble_blocks_places_labels(rationals):
    outer = ExactMatrix.build(rationals, [[1, 2], [3, 4]], index=(1, 3))
    inner = ExactMatrix.build(rationals, [[9]], index=(2,))
    assembled = assemble_blocks([((1, 3), outer), ((2,), inner)])
    assert assembled.index == (1, 2, 3)
    assert assembled[1, 3] == 2 and assembled[3, 1] == 3 and assembled[2, 2] == 9
    assert assembled[1, 2] == 0
    with pytest.raises(PartitionMismatch):
        assemble_blocks([((1, 3), outer), ((3,), inner)])


def test_matrix_json_keeps_labels(f101):
    m = ExactMatrix.build(f101, [[1, 2], [3, 4]], index=(5, 7))
    payload = m.to_dict()
    assert payload["index"] == [5, 7]
    assert payload["rows"] == [["1", "2"], ["3", "4"]]
    assert ExactMatrix.from_dict(payload) == m
    with pytest.raises(InvalidInput):
        ExactMatrix.from_dict({"field": {"kind": "rational"}, "n": 3, "rows": [["1"]]})


def test_principal_submatrix_keeps_labels(f101):
    m = ExactMatrix.build(f101, [[1, 2, 3], [4, 5, 6], [7, 8, 10]])
    sub = m.principal((3, 1))
    assert sub.index == (1, 3)
    assert sub.rows == ((1, 3), (7, 10))
    assert m.complement((2,)) == (1, 3)
    assert FieldSpec.prime(101) == sub.field
