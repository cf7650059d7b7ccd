from __future__ import annotations

import pytest

from pmaplab.errors import FieldTooSmall, InvalidInput, TooLarge
from pmaplab.field import FieldSpec, default_field
from pmaplab.matrix import ExactMatrix, adjugate, inverse
from pmaplab.services import pme
from pmaplab.services.generators import (
    block_permutation,
    diagonal_similar,
    gen_block_triangular,
    gen_random_dense,
    order_gap_counterexample,
    perturb_entry,
)
from pmaplab.services.pme import MinorGoal, ShiftTarget
from pmaplab.services.reconstructor import verify_property_R
from pmaplab.utils import seeded_stream


def _changed_entry(a: ExactMatrix, b: ExactMatrix):
    return next((i, j) for i in a.index for j in a.index if a[i, j] != b[i, j])


def test_equivalent_partners_are_equal(settings, stream):
    a = gen_random_dense(5, default_field(5), stream)
    assert pme.test_pme(a, a.transpose(), settings=settings).equal
    assert pme.test_pme(a, diagonal_similar(a, stream), settings=settings).equal


def test_perturbed_entry_is_caught_with_a_witness(settings, stream):
    a = gen_random_dense(5, default_field(5), stream)
    b = perturb_entry(a, stream)
    verdict = pme.test_pme(a, b, settings=settings)
    assert not verdict.equal
    assert verdict.witness == tuple(sorted(_changed_entry(a, b)))
    assert verdict.to_dict()["method"] == "deterministic"


@pytest.mark.parametrize("n", [6, 8, 10])
def test_counterexample_agrees_below_full_order(settings, n):
    a, b = order_gap_counterexample(n, default_field(n))
    assert pme.pme_order4(a, b).equal
    brute = pme.pme_bruteforce(a, b)
    assert not brute.equal
    assert brute.witness is not None and len(brute.witness) == n
    assert not pme.test_pme(a, b, settings=settings).equal


def test_block_structure_is_compared_first(settings, stream):
    field = default_field(5)
    a = gen_block_triangular([2, 3], field, stream)
    assert pme.test_pme(a, block_permutation(a), settings=settings).equal
    dense = gen_random_dense(5, field, stream)
    verdict = pme.test_pme(dense, a, settings=settings)
    assert not verdict.equal
    assert verdict.witness is not None
    assert dense.minor(verdict.witness) != a.minor(verdict.witness)


def test_witness_minor_on_a_dense_matrix(stream):
    a = gen_random_dense(5, default_field(5), stream)
    diagonal = pme.nonzero_witness_minor(a, (1, 2), (3, 4))
    assert diagonal is not None
    assert MinorGoal(a, (1, 2), (3, 4)).holds(diagonal)
    overlapping = pme.nonzero_witness_minor(a, (1, 2), (2, 3))
    assert overlapping is not None
    assert MinorGoal(a, (1, 2), (2, 3)).holds(overlapping)


def test_witness_minor_vanishing_everywhere(rationals):
    ones = ExactMatrix.build(rationals, [[0 if i == j else 1 for j in range(4)] for i in range(4)])
    # rows 1 and 2 agree on columns 3 and 4, so that minor is zero for every diagonal
    assert pme.nonzero_witness_minor(ones, (1, 2), (3, 4)) is None
    with pytest.raises(InvalidInput):
        pme.nonzero_witness_minor(ones, (1, 2), (3,))


def test_lagrange_combination_meets_every_goal(stream):
    a = gen_random_dense(4, default_field(4), stream)
    invertible = MinorGoal(a)
    entry = MinorGoal(a, (1,), (2,))
    single = pme.nonzero_witness_minor(a, (), ())
    assert pme.lagrange_combine_diagonals([ShiftTarget(single, (invertible,))], a.n) == single
    targets = [
        ShiftTarget(single, (invertible,)),
        ShiftTarget(pme.nonzero_witness_minor(a, (1,), (2,)), (entry,)),
    ]
    combined = pme.lagrange_combine_diagonals(targets, a.n)
    assert invertible.holds(combined) and entry.holds(combined)
    with pytest.raises(InvalidInput):
        pme.lagrange_combine_diagonals([], a.n)


def test_dense_adjugate_shift(settings, stream):
    a = gen_random_dense(5, default_field(5), stream)
    b = diagonal_similar(a, stream)
    d1 = pme.dense_adjugate_shift(a, b, threads=settings.threads)
    for m in (a, b):
        shifted = m.plus_diagonal(d1)
        assert inverse(shifted) is not None
        adj = adjugate(shifted)
        assert all(adj[i, j] != 0 for i in m.index for j in m.index if i != j)


def test_second_shift_gives_the_extension_property(settings, stream):
    a = gen_random_dense(5, default_field(5), stream)
    b = a.transpose()
    d1 = pme.dense_adjugate_shift(a, b, threads=settings.threads)
    a1, b1 = adjugate(a.plus_diagonal(d1)), adjugate(b.plus_diagonal(d1))
    d2 = pme.propR_adjugate_shift(a1, b1, threads=settings.threads)
    assert verify_property_R(adjugate(a1.plus_diagonal(d2)))
    assert verify_property_R(adjugate(b1.plus_diagonal(d2)))


def test_small_field_embedding(f101):
    a = ExactMatrix.build(f101, [[1 if i == j else (1 if j == i + 1 else 0) for j in range(5)] for i in range(5)])
    lifted, _ = pme.embed_for_shifts(a, a.transpose())
    assert lifted.field == default_field(5)
    assert lifted.rows == a.rows
    wide = ExactMatrix.build(f101, [[50] * 5 for _ in range(5)])
    with pytest.raises(FieldTooSmall):
        pme.embed_for_shifts(wide, wide)


def test_bruteforce_limit_and_field_mismatch(f101, stream):
    with pytest.raises(TooLarge):
        pme.pme_bruteforce(ExactMatrix.identity(f101, 15), ExactMatrix.identity(f101, 15))
    with pytest.raises(InvalidInput):
        pme.pme_bruteforce(ExactMatrix.identity(f101, 3), ExactMatrix.identity(FieldSpec.prime(103), 3))


def test_randomized_verdicts(stream):
    a = gen_random_dense(5, default_field(5), stream)
    same = pme.pme_randomized(a, a.transpose(), seeded_stream(8, "verify"), samples=16)
    assert same.equal and same.samples == 16
    different = pme.pme_randomized(a, perturb_entry(a, stream), seeded_stream(8, "verify"), samples=16)
    assert not different.equal
