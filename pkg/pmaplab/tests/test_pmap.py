from __future__ import annotations

import dataclasses
import os

import pytest

from pmaplab.field import default_field
from pmaplab.matrix import ExactMatrix, inverse, scc_partition
from pmaplab.services.generators import gen_block_triangular, gen_planted_cut, gen_random_dense
from pmaplab.services.oracle import PMOracle, box_from_matrix
from pmaplab.services.pmap import (
    find_irreducible_blocks,
    recombine,
    run_blackbox_pmap,
    shift_success_rate,
    solve_blackbox_pmap,
    unshift,
)
from pmaplab.services.pme import pme_bruteforce
from pmaplab.utils import seeded_stream


def test_dense_round_trip(settings, stream):
    for n in (4, 5, 6):
        a = gen_random_dense(n, default_field(n), stream)
        run = run_blackbox_pmap(box_from_matrix(a), seeded_stream(n), settings=settings)
        assert pme_bruteforce(a, run.result).equal
        stats = run.stats_dict()
        assert stats["seed"] == n
        assert stats["box_queries"] > 0
        assert set(stats["timings"]) == {"blocks", "reconstruct", "verify"}


def test_reducible_input_is_split_into_blocks(settings, stream):
    a = gen_block_triangular([2, 3], default_field(5), stream)
    result = solve_blackbox_pmap(box_from_matrix(a), seeded_stream(11), settings=settings)
    assert pme_bruteforce(a, result).equal


def test_planted_cut_round_trip(settings, stream):
    a = gen_planted_cut([3, 4], default_field(7), stream)
    run = run_blackbox_pmap(box_from_matrix(a), seeded_stream(5), settings=settings)
    assert pme_bruteforce(a, run.result).equal
    # the shifted inverse keeps the planted cut, so the recursion must glue across it
    recursion = run.stats_dict()["recursion"]
    assert recursion["combine_calls"] >= 1
    assert recursion["max_order"] <= 4
    assert run.result == unshift(run.assembled, dict(zip(a.index, run.shift)))


def test_same_seed_same_answer(settings, stream):
    a = gen_random_dense(5, default_field(5), stream)
    first = solve_blackbox_pmap(box_from_matrix(a), seeded_stream(3), settings=settings)
    second = solve_blackbox_pmap(box_from_matrix(a), seeded_stream(3), settings=settings)
    assert first == second


def test_blocks_follow_support_of_the_inverse(stream):
    a = gen_block_triangular([2, 2, 1], default_field(5), stream)
    inverted = next(
        inv for inv in (inverse(a.plus_diagonal([value] * 5)) for value in range(1, 10)) if inv is not None
    )
    blocks = find_irreducible_blocks(PMOracle.from_matrix(inverted))
    assert sorted(blocks) == sorted(scc_partition(inverted))


def test_recombine_undoes_the_shift(f101):
    a = ExactMatrix.build(f101, [[2, 1], [3, 4]])
    shift = {1: 5, 2: 6}
    inverted = inverse(a.plus_diagonal([5, 6]))
    assert recombine([(1, 2)], [inverted], shift) == a


def test_random_shifts_mostly_succeed(stream):
    a = gen_random_dense(8, default_field(8), stream)
    assert shift_success_rate(a, 200, seeded_stream(99, "shift")) >= 0.95


@pytest.mark.slow
@pytest.mark.skipif(not os.getenv("PMAPLAB_SLOW_TESTS"), reason="set PMAPLAB_SLOW_TESTS=1 for the full shift sweep")
def test_random_shift_sweep(stream):
    a = gen_random_dense(8, default_field(8), stream)
    assert shift_success_rate(a, 1000, seeded_stream(100, "shift")) >= 0.95


def test_block_counters_do_not_depend_on_thread_count(settings, stream):
    a = gen_block_triangular([4, 3], default_field(7), stream)
    serial = run_blackbox_pmap(box_from_matrix(a), seeded_stream(21), settings=settings)
    threaded = run_blackbox_pmap(
        box_from_matrix(a), seeded_stream(21), settings=dataclasses.replace(settings, threads=3)
    )
    assert threaded.result == serial.result
    assert threaded.stats_dict()["recursion"] == serial.stats_dict()["recursion"]
    assert len(serial.blocks) == 2
