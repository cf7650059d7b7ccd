from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field as dataclass_field
from typing import Any, Dict, List, Mapping, Sequence, Tuple

from ..config import Settings, load_settings
from ..errors import (
    NoCandidateAccepted,
    NoRemovableIndex,
    NoRoot,
    RetriesExhausted,
    SingularAlways,
    SingularAssembly,
    SingularShift,
    TransitivityViolation,
    ZeroCouplingEntry,
    ZeroOffDiagonal,
)
from ..extensions import parallel_map
from ..field import Value
from ..matrix import ExactMatrix, IndexSet, assemble_blocks, det, inverse, scc_partition
from ..utils import SeededStream, structured_log
from .oracle import PMOracle, PolyBox, check_2x2_irreducible, shifted_inverse_box
from .reconstructor import ReconStats, reconstruct_prop_R, verify_property_R
from .smallrecon import pme_upto4

# Failures that point at an unlucky shift rather than a broken input.
_RETRYABLE = (
    TransitivityViolation,
    NoCandidateAccepted,
    NoRemovableIndex,
    NoRoot,
    ZeroOffDiagonal,
    ZeroCouplingEntry,
    SingularAssembly,
)


class VerificationMismatch(NoCandidateAccepted):
    """Reconstructed matrix disagrees with the box."""


@dataclass
class PmapRun:
    seed: int
    shift: Tuple[Value, ...]
    blocks: List[IndexSet]
    reconstructions: List[ExactMatrix]
    assembled: ExactMatrix
    result: ExactMatrix
    retries: int
    stats: Dict[str, Any] = dataclass_field(default_factory=dict)

    def stats_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "retries": self.retries,
            "blocks": [list(block) for block in self.blocks],
            **self.stats,
        }


def find_irreducible_blocks(pm: PMOracle) -> List[IndexSet]:
    """Group indices whose 2x2 principal submatrix is irreducible.

    Greedy: each unassigned index opens a block and pulls in every unassigned
    partner. A second pass re-checks every pair inside a block.
    """
    assigned: set[int] = set()
    blocks: List[IndexSet] = []
    for i in pm.index:
        if i in assigned:
            continue
        assigned.add(i)
        block = [i]
        for j in pm.index:
            if j not in assigned and check_2x2_irreducible(pm, i, j):
                assigned.add(j)
                block.append(j)
        blocks.append(tuple(sorted(block)))
    for block in blocks:
        for pos, i in enumerate(block):
            for j in block[pos + 1:]:
                if not check_2x2_irreducible(pm, i, j):
                    raise TransitivityViolation("irreducibility is not transitive inside a block", pair=(i, j))
    return blocks


def unshift(assembled: ExactMatrix, shift: Mapping[int, Value]) -> ExactMatrix:
    """C^-1 - D; ``shift`` maps labels to diagonal entries."""
    inverted = inverse(assembled)
    if inverted is None:
        raise SingularAssembly("assembled block matrix is singular")
    field = assembled.field
    return inverted.plus_diagonal([field.neg(shift[label]) for label in inverted.index])


def recombine(
    blocks: Sequence[IndexSet], reconstructions: Sequence[ExactMatrix], shift: Mapping[int, Value]
) -> ExactMatrix:
    """C^-1 - D with C the block-diagonal assembly of ``reconstructions``."""
    return unshift(assemble_blocks(list(zip(blocks, reconstructions))), shift)


def _verify(box: PolyBox, candidate: ExactMatrix, stream: SeededStream, points: int) -> bool:
    reference = PMOracle.from_box(box)
    if not pme_upto4(reference, candidate):
        return False
    field = box.field
    for _ in range(points):
        point = [field.random(stream) for _ in box.index]
        by_label = dict(zip(box.index, point))
        if box.evaluate(point) != det(candidate.plus_diagonal([by_label[label] for label in candidate.index])):
            return False
    return True


def run_blackbox_pmap(
    box: PolyBox,
    stream: SeededStream,
    *,
    settings: Settings | None = None,
) -> PmapRun:
    """Learn a matrix with the same principal minors as the one behind ``box``."""
    settings = settings or load_settings(dotenv=False)
    field = box.field
    shift_stream = stream.stream("shift")
    verify_stream = stream.stream("verify")
    singular = 0
    timings: Dict[str, float] = {"blocks": 0.0, "reconstruct": 0.0, "verify": 0.0}

    for attempt in range(settings.pmap_retries):
        shift = tuple(field.random(shift_stream) for _ in box.index)
        structured_log("pmap.shift_sampled", level=logging.DEBUG, attempt=attempt)
        try:
            inverse_box = shifted_inverse_box(box, shift)
        except SingularShift:
            singular += 1
            structured_log("pmap.retry", level=logging.INFO, attempt=attempt, reason="SingularShift")
            continue

        oracle = PMOracle.from_box(inverse_box)
        try:
            started = time.perf_counter()
            blocks = find_irreducible_blocks(oracle)
            timings["blocks"] += time.perf_counter() - started
            structured_log("pmap.blocks_found", level=logging.DEBUG, blocks=[list(b) for b in blocks])

            started = time.perf_counter()
            # One ReconStats per block, so workers never share counters.
            block_stats = [ReconStats() for _ in blocks]
            reconstructions = parallel_map(
                lambda job: reconstruct_prop_R(oracle, job[0], stats=job[1]),
                list(zip(blocks, block_stats)),
                threads=settings.threads,
            )
            timings["reconstruct"] += time.perf_counter() - started

            assembled = assemble_blocks(list(zip(blocks, reconstructions)))
            result = unshift(assembled, dict(zip(box.index, shift)))

            started = time.perf_counter()
            verified = _verify(box, result, verify_stream, settings.verify_points)
            timings["verify"] += time.perf_counter() - started
            if not verified:
                raise VerificationMismatch("reconstruction disagrees with the box")
        except _RETRYABLE as exc:
            structured_log("pmap.retry", level=logging.INFO, attempt=attempt, reason=type(exc).__name__)
            continue

        run = PmapRun(
            seed=stream.seed,
            shift=shift,
            blocks=blocks,
            reconstructions=list(reconstructions),
            assembled=assembled,
            result=result,
            retries=attempt,
            stats={
                "box_queries": box.queries,
                "oracle_queries": oracle.queries,
                "max_oracle_order": oracle.max_order,
                "recursion": ReconStats.merged(block_stats).to_dict(),
                "timings": {key: round(value, 6) for key, value in timings.items()},
            },
        )
        structured_log("pmap.completed", level=logging.INFO, retries=attempt, blocks=len(blocks), box_queries=box.queries)
        return run

    if singular == settings.pmap_retries:
        raise SingularAlways("every sampled shift made A + D singular", attempts=singular)
    raise RetriesExhausted("no shift produced a verified reconstruction", attempts=settings.pmap_retries)


def solve_blackbox_pmap(box: PolyBox, stream: SeededStream, *, settings: Settings | None = None) -> ExactMatrix:
    return run_blackbox_pmap(box, stream, settings=settings).result


def shift_success_rate(matrix: ExactMatrix, trials: int, stream: SeededStream) -> float:
    """Fraction of random shifts D for which (A + D)^-1 exists and each block has property R."""
    field = matrix.field
    successes = 0
    for _ in range(trials):
        shifted = matrix.plus_diagonal([field.random(stream) for _ in matrix.index])
        inverted = inverse(shifted)
        if inverted is None:
            continue
        if all(verify_property_R(inverted.principal(block)) for block in scc_partition(inverted)):
            successes += 1
    return successes / trials if trials else 0.0


__all__ = [
    "PmapRun",
    "find_irreducible_blocks",
    "recombine",
    "unshift",
    "run_blackbox_pmap",
    "solve_blackbox_pmap",
    "shift_success_rate",
]
