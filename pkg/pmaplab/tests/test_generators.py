from __future__ import annotations

import pytest

from pmaplab.errors import InvalidInput
from pmaplab.field import default_field
from pmaplab.matrix import is_cut, scc_partition
from pmaplab.services.generators import (
    PME_TRANSFORMS,
    gen_block_triangular,
    gen_planted_cut,
    gen_random_dense,
    gen_rod_instance,
    order_gap_counterexample,
    pme_pair,
)
from pmaplab.services.pme import pme_bruteforce
from pmaplab.utils import seeded_stream


def test_dense_matrices_have_no_zero_off_diagonal(stream):
    a = gen_random_dense(6, default_field(6), stream)
    assert all(a[i, j] != 0 for i in a.index for j in a.index if i != j)
    with pytest.raises(InvalidInput):
        gen_random_dense(0, default_field(1), stream)


def test_generation_is_reproducible():
    field = default_field(4)
    first = gen_random_dense(4, field, seeded_stream(3, "generation"))
    second = gen_random_dense(4, field, seeded_stream(3, "generation"))
    assert first == second


@pytest.mark.parametrize("sizes", [[2, 2], [3, 3], [2, 3, 2]])
def test_planted_prefixes_are_cuts(stream, sizes):
    a = gen_planted_cut(sizes, default_field(sum(sizes)), stream)
    prefix = 0
    for size in sizes[:-1]:
        prefix += size
        assert is_cut(a, tuple(range(1, prefix + 1)))


def test_planted_cut_sizes_are_checked(stream):
    with pytest.raises(InvalidInput):
        gen_planted_cut([1, 3], default_field(4), stream)
    with pytest.raises(InvalidInput):
        gen_planted_cut([4], default_field(4), stream)


def test_block_triangular_partition(stream):
    a = gen_block_triangular([2, 3], default_field(5), stream)
    assert scc_partition(a) == [(1, 2), (3, 4, 5)]
    assert all(a[i, j] == 0 for i in (3, 4, 5) for j in (1, 2))


def test_counterexample_entries(counterexample_pair):
    a, b = counterexample_pair
    twos = {(2, 1), (3, 4), (4, 5), (5, 4), (5, 6), (6, 5), (1, 6), (6, 1)}
    for i in a.index:
        for j in a.index:
            assert a[i, j] == (2 if (i, j) in twos else 1)
    assert (b[1, 2], b[2, 1]) == (2, 1)
    with pytest.raises(InvalidInput):
        order_gap_counterexample(4, default_field(4))


@pytest.mark.parametrize("transform", [t for t in PME_TRANSFORMS if t != "perturb"])
def test_partners_are_equivalent(stream, transform):
    a = gen_planted_cut([2, 3], default_field(5), stream)
    assert pme_bruteforce(a, pme_pair(a, transform, stream)).equal


def test_perturbed_partner_differs(stream):
    a = gen_random_dense(5, default_field(5), stream)
    assert not pme_bruteforce(a, pme_pair(a, "perturb", stream)).equal
    with pytest.raises(InvalidInput):
        pme_pair(a, "shuffle", stream)


def test_rod_instance_shape(f101, stream):
    rod = gen_rod_instance(4, 2, f101, stream)
    assert len(rod.b0) == 2 and len(rod.rank1) == 4
    assert all(len(u) == 2 and len(v) == 2 for u, v in rod.rank1)
