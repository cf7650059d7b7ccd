from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

from ..errors import NoCandidateAccepted, NoRemovableIndex, TooLarge, ZeroCouplingEntry
from ..field import FieldSpec, Value
from ..matrix import ExactMatrix, IndexSet, det_rows, index_set, rank_rows
from ..utils import structured_log
from .cutfinder import PairPredicate, family_predicate, find_plausible_set, minimal_plausible_set
from .oracle import PMOracle
from .smallrecon import SubmatrixFamily, pme_upto4, recon2, recon3, submatrix_family

_PROPERTY_CHECK_LIMIT = 16

Entries = Dict[Tuple[int, int], Value]


@dataclass
class ReconStats:
    combine_calls: int = 0
    no_cut_calls: int = 0
    max_depth: int = 0
    max_order: int = 0

    @classmethod
    def merged(cls, parts: Iterable["ReconStats"]) -> "ReconStats":
        """Counters summed, depth and order maximized."""
        total = cls()
        for part in parts:
            total.combine_calls += part.combine_calls
            total.no_cut_calls += part.no_cut_calls
            total.max_depth = max(total.max_depth, part.max_depth)
            total.max_order = max(total.max_order, part.max_order)
        return total

    def to_dict(self) -> Dict[str, int]:
        return {
            "combine_calls": self.combine_calls,
            "no_cut_calls": self.no_cut_calls,
            "max_depth": self.max_depth,
            "max_order": self.max_order,
        }


@dataclass(frozen=True)
class NoCutSequence:
    anchors: Tuple[int, int]
    order: Tuple[int, ...]

    def prefix(self, j: int) -> IndexSet:
        """I_j = {r, s, i_3, ..., i_j}."""
        tail = self.order[len(self.order) - (j - 2):] if j > 2 else ()
        return index_set((*self.anchors, *tail))


def no_cut_sequence(
    labels: Iterable[int],
    fam: SubmatrixFamily,
    r: int,
    s: int,
    *,
    predicate: PairPredicate | None = None,
) -> NoCutSequence:
    """Peel indices off I so that every remaining prefix keeps the no-cut property.

    ``order`` is (i_|I|, ..., i_3): the first entry is removed first.
    """
    scope = index_set(labels)
    holds = predicate or family_predicate(fam)
    order: List[int] = []
    while len(scope) > 4:
        removable = next(
            (
                e
                for e in scope
                if e not in (r, s)
                and find_plausible_set(tuple(x for x in scope if x != e), fam, predicate=holds) is None
            ),
            None,
        )
        if removable is None:
            raise NoRemovableIndex("no index leaves a cut-free submatrix", labels=scope)
        order.append(removable)
        scope = tuple(x for x in scope if x != removable)
    order.extend(x for x in scope if x not in (r, s))
    return NoCutSequence((r, s), tuple(order))


def _transposed_conjugate(field: FieldSpec, entries: Entries, labels: IndexSet, anchor: int) -> Entries:
    """D B[L]^T D^-1 with D[anchor] = 1 and D[x] = B[x, anchor]."""
    f = field
    scale = {x: (f.one() if x == anchor else entries[(x, anchor)]) for x in labels}
    return {
        (a, b): f.div(f.mul(scale[a], entries[(b, a)]), scale[b]) for a in labels for b in labels
    }


def reconstruct_no_cut(
    labels: Iterable[int],
    fam: SubmatrixFamily,
    pm: PMOracle,
    *,
    predicate: PairPredicate | None = None,
) -> ExactMatrix:
    """Grow B one index at a time; every grown block matches A on all minors of order <= 4."""
    scope = index_set(labels)
    if len(scope) < 4:
        raise ValueError("no-cut reconstruction needs at least four labels")
    field = pm.field
    holds = predicate or family_predicate(fam)
    first, second = scope[0], scope[1]
    outer = no_cut_sequence(scope, fam, first, second, predicate=holds)
    sequence = tuple(reversed(outer.order))  # (i_3, ..., i_n)

    entries: Entries = {
        (first, first): pm(first),
        (second, second): pm(second),
        (first, second): field.one(),
        (second, first): pm.pair(first, second),
    }
    placed = [first, second]
    for j, current in enumerate(sequence, start=3):
        entries[(current, current)] = pm(current)
        entries[(first, current)] = field.one()
        entries[(current, first)] = pm.pair(first, current)
        if j == 3:
            inner: Tuple[int, ...] = (second,)
        else:
            inner_sequence = no_cut_sequence((*placed, current), fam, first, current, predicate=holds)
            inner = tuple(reversed(inner_sequence.order))  # (k_3, ..., k_j)

        for ell in range(3, j + 1):
            newest = inner[ell - 3]
            previous = index_set((first, current, *inner[: ell - 3]))
            block = index_set((*previous, newest))
            roots = field.solve_quadratic(
                pm.pair(first, newest),
                pm.triple(first, current, newest),
                field.mul(pm.pair(first, current), pm.pair(current, newest)),
            )
            product = pm.pair(current, newest)

            plain = {key: value for key, value in entries.items() if key[0] in block and key[1] in block}
            flipped = dict(plain)
            flipped.update(_transposed_conjugate(field, entries, previous, first))

            accepted: Optional[Entries] = None
            for candidate in (plain, flipped):
                for gamma in roots:
                    trial = dict(candidate)
                    trial[(current, newest)] = gamma
                    trial[(newest, current)] = field.div(product, gamma)
                    if pme_upto4(pm.restricted(block), ExactMatrix.from_entries(field, block, trial)):
                        accepted = trial
                        break
                if accepted is not None:
                    break
            if accepted is None:
                raise NoCandidateAccepted(
                    "no candidate matches the oracle on minors of order <= 4",
                    block=block,
                    index=current,
                )
            entries.update(accepted)
        placed.append(current)

    structured_log("reconstructor.no_cut", level=logging.DEBUG, size=len(scope))
    return ExactMatrix.from_entries(field, scope, entries)


def combine_across_cut(m: ExactMatrix, n: ExactMatrix, side: Iterable[int], s: int, t: int) -> ExactMatrix:
    """Glue M (on S+t) and N (on S-bar+s) into one matrix with cut S."""
    f = m.field
    left = index_set(side)
    right = tuple(label for label in n.index if label != s)
    coupling_st, coupling_ts = n[s, t], n[t, s]
    if coupling_st == 0 or coupling_ts == 0:
        raise ZeroCouplingEntry("coupling entry of N vanishes", s=s, t=t)
    entries: Entries = {}
    for a in left:
        for b in left:
            entries[(a, b)] = m[a, b]
        for b in right:
            entries[(a, b)] = f.div(f.mul(m[a, t], n[s, b]), coupling_st)
            entries[(b, a)] = f.div(f.mul(n[b, s], m[t, a]), coupling_ts)
    for a in right:
        for b in right:
            entries[(a, b)] = n[a, b]
    return ExactMatrix.from_entries(f, index_set((*left, *right)), entries)


def _reconstruct(
    pm: PMOracle,
    scope: IndexSet,
    fam: SubmatrixFamily,
    holds: PairPredicate,
    *,
    single_recursion: bool,
    stats: ReconStats,
    depth: int,
) -> ExactMatrix:
    stats.max_depth = max(stats.max_depth, depth)
    if len(scope) == 1:
        (only,) = scope
        return ExactMatrix.from_entries(pm.field, scope, {(only, only): pm(only)})
    if len(scope) == 2:
        return recon2(pm, *scope)
    if len(scope) == 3:
        return recon3(pm, *scope)[0]

    plausible = minimal_plausible_set(scope, fam, predicate=holds)
    if plausible is None:
        stats.no_cut_calls += 1
        return reconstruct_no_cut(scope, fam, pm, predicate=holds)

    side = plausible.subset
    other = tuple(label for label in scope if label not in side)
    s, t = side[0], other[0]
    structured_log("reconstructor.cut_found", level=logging.DEBUG, cut=list(side), depth=depth)
    if len(side) > 2 and single_recursion:
        stats.no_cut_calls += 1
        m = reconstruct_no_cut((*side, t), fam, pm, predicate=holds)
    else:
        m = _reconstruct(
            pm, index_set((*side, t)), fam, holds, single_recursion=single_recursion, stats=stats, depth=depth + 1
        )
    n = _reconstruct(
        pm, index_set((*other, s)), fam, holds, single_recursion=single_recursion, stats=stats, depth=depth + 1
    )
    stats.combine_calls += 1
    return combine_across_cut(m, n, side, s, t)


def reconstruct_prop_R(
    pm: PMOracle,
    labels: Iterable[int] | None = None,
    *,
    single_recursion: bool = True,
    stats: ReconStats | None = None,
    fam: SubmatrixFamily | None = None,
) -> ExactMatrix:
    """Matrix with the same principal minors as a dense property-R matrix, from its oracle."""
    scope = index_set(labels) if labels is not None else pm.index
    stats = stats if stats is not None else ReconStats()
    if fam is None:
        fam = submatrix_family(pm, scope) if len(scope) >= 4 else {}
    result = _reconstruct(
        pm,
        scope,
        fam,
        family_predicate(fam),
        single_recursion=single_recursion,
        stats=stats,
        depth=0,
    )
    stats.max_order = max(stats.max_order, pm.max_order)
    return result


def verify_property_R(matrix: ExactMatrix) -> bool:
    """Dense, and every rank-one 2x2 off block extends to a rank-one cut block."""
    if matrix.n > _PROPERTY_CHECK_LIMIT:
        raise TooLarge("property check is limited to n <= 16", n=matrix.n)
    if not matrix.is_dense():
        return False
    f = matrix.field
    for rows in itertools.combinations(matrix.index, 2):
        for cols in itertools.combinations(matrix.index, 2):
            if set(rows) & set(cols):
                continue
            if det_rows(f, matrix.block(rows, cols)) != 0:
                continue
            rest = [x for x in matrix.index if x not in rows and x not in cols]
            extended = False
            for mask in itertools.product((True, False), repeat=len(rest)):
                side = (*rows, *(x for x, inside in zip(rest, mask) if inside))
                other = (*cols, *(x for x, inside in zip(rest, mask) if not inside))
                if rank_rows(f, matrix.block(side, other)) <= 1:
                    extended = True
                    break
            if not extended:
                return False
    return True


__all__ = [
    "ReconStats",
    "NoCutSequence",
    "no_cut_sequence",
    "reconstruct_no_cut",
    "combine_across_cut",
    "reconstruct_prop_R",
    "verify_property_R",
]
