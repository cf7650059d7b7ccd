from __future__ import annotations

import pytest

from pmaplab.errors import ZeroOffDiagonal
from pmaplab.field import default_field
from pmaplab.matrix import ExactMatrix, canonical_diag_similar
from pmaplab.services.generators import gen_random_dense
from pmaplab.services.oracle import PMOracle
from pmaplab.services.smallrecon import family4, pme_full, pme_upto4, recon2, recon3, submatrix_family


def test_recon2_normalizes_upper_entry(f101):
    pm = PMOracle.from_matrix(ExactMatrix.build(f101, [[3, 4], [5, 6]]))
    result = recon2(pm, 2, 1)
    assert result.rows == ((3, 1), (20, 6))
    with pytest.raises(ZeroOffDiagonal):
        recon2(PMOracle.from_matrix(ExactMatrix.build(f101, [[3, 0], [5, 6]])), 1, 2)


def test_recon3_candidates_share_all_minors(stream):
    field = default_field(3)
    for _ in range(10):
        a = gen_random_dense(3, field, stream)
        candidates = recon3(PMOracle.from_matrix(a), 1, 2, 3)
        assert 1 <= len(candidates) <= 2
        assert all(pme_full(a, candidate) for candidate in candidates)


def test_family4_is_sound_and_contains_canonical_form(stream):
    field = default_field(4)
    for _ in range(15):
        a = gen_random_dense(4, field, stream)
        family = family4(PMOracle.from_matrix(a), (1, 2, 3, 4))
        assert 1 <= len(family) <= 8
        assert all(pme_full(a, member) for member in family)
        assert canonical_diag_similar(a, 1) in family.members


def test_submatrix_family_covers_every_quadruple(stream):
    a = gen_random_dense(5, default_field(5), stream)
    family = submatrix_family(PMOracle.from_matrix(a), a.index)
    assert sorted(family) == [(1, 2, 3, 4), (1, 2, 3, 5), (1, 2, 4, 5), (1, 3, 4, 5), (2, 3, 4, 5)]
    for subset, members in family.items():
        assert all(member.index == subset for member in members)


def test_order_four_comparison(stream):
    a = gen_random_dense(6, default_field(6), stream)
    assert pme_upto4(a, a.transpose())
    changed = a.with_entries({(1, 2): a.field.add(a[1, 2], 1)})
    assert not pme_upto4(a, changed)
    assert pme_upto4(a, changed, labels=(3, 4, 5, 6))
