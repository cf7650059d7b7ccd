from __future__ import annotations

from pmaplab.field import default_field
from pmaplab.matrix import ExactMatrix, is_cut
from pmaplab.services.cutfinder import (
    find_cut_explicit,
    has_cut_bruteforce,
    minimal_plausible_set,
    satisfies_P,
)
from pmaplab.services.generators import gen_planted_cut, gen_random_dense
from pmaplab.services.oracle import PMOracle
from pmaplab.services.smallrecon import submatrix_family


def test_explicit_search_finds_planted_cut(stream):
    for sizes in ([2, 2], [2, 3], [3, 2, 2]):
        n = sum(sizes)
        a = gen_planted_cut(sizes, default_field(n), stream)
        cut = find_cut_explicit(a)
        assert cut is not None
        assert is_cut(a, cut)
        assert has_cut_bruteforce(a) is not None


def test_small_or_cut_free_matrices_have_no_cut(stream, rationals):
    assert find_cut_explicit(ExactMatrix.build(rationals, [[1, 2, 3], [4, 5, 6], [7, 8, 9]])) is None
    a = gen_random_dense(5, default_field(5), stream)
    if has_cut_bruteforce(a) is None:
        assert find_cut_explicit(a) is None


def test_black_box_plausible_set_on_planted_cut(stream):
    a = gen_planted_cut([3, 3], default_field(6), stream)
    pm = PMOracle.from_matrix(a)
    family = submatrix_family(pm, pm.index)
    assert satisfies_P(family, (1, 2), (4, 5))
    found = minimal_plausible_set(pm.index, family)
    assert found is not None
    assert 2 <= len(found.subset) <= 4
    payload = found.to_dict()
    assert payload["subset"] == list(found.subset)
