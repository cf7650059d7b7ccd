from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Tuple

from ..combinat import Clause, minimal_true_assignment, two_sat_solve
from ..errors import TooLarge
from ..matrix import ExactMatrix, IndexSet, index_set, is_cut
from .smallrecon import SubmatrixFamily

Pair = Tuple[int, int]
# (side, other side): does some relevant 4x4 matrix split {a,b} from {c,d}?
PairPredicate = Callable[[Pair, Pair], bool]

_BRUTEFORCE_LIMIT = 16


@dataclass(frozen=True)
class PlausibleSet:
    subset: IndexSet
    anchor: Tuple[Pair, Pair]
    assignment: Tuple[Tuple[int, bool], ...]
    clauses: Tuple[Clause, ...] = ()

    def to_dict(self) -> Dict[str, object]:
        return {
            "subset": list(self.subset),
            "anchor": [list(self.anchor[0]), list(self.anchor[1])],
            "assignment": {str(var): value for var, value in self.assignment},
        }


def _pair(a: int, b: int) -> Pair:
    return (a, b) if a < b else (b, a)


def satisfies_P(fam: SubmatrixFamily, side: Iterable[int], other: Iterable[int]) -> bool:
    """Some member of the family at the four labels has ``side`` as a cut."""
    left = index_set(side)
    quad = index_set((*left, *other))
    return any(is_cut(member, left) for member in fam[quad])


def family_predicate(fam: SubmatrixFamily) -> PairPredicate:
    """Memoized property check over a submatrix family."""
    memo: Dict[Tuple[Pair, Pair], bool] = {}

    def check(side: Pair, other: Pair) -> bool:
        key = (side, other)
        if key not in memo:
            memo[key] = satisfies_P(fam, side, other)
        return memo[key]

    return check


def _explicit_predicate(matrix: ExactMatrix) -> PairPredicate:
    memo: Dict[Tuple[Pair, Pair], bool] = {}

    def check(side: Pair, other: Pair) -> bool:
        key = (side, other)
        if key not in memo:
            memo[key] = is_cut(matrix.principal((*side, *other)), side)
        return memo[key]

    return check


def _quadruples(labels: IndexSet) -> Iterator[Tuple[Pair, Pair]]:
    for side in itertools.combinations(labels, 2):
        for other in itertools.combinations(labels, 2):
            if side < other and not set(side) & set(other):
                yield side, other


def _build_formula(labels: IndexSet, side: Pair, other: Pair, holds: PairPredicate) -> Tuple[List[int], List[Clause]]:
    i, j = side
    k, l = other
    free = [e for e in labels if e not in (i, j, k, l)]
    clauses: List[Clause] = []
    for e in free:
        if not holds(side, _pair(k, e)) or not holds(side, _pair(l, e)):
            clauses.append(((e, True),))
    for e in free:
        if not holds(_pair(i, e), other) or not holds(_pair(j, e), other):
            clauses.append(((e, False),))
    for p, q in itertools.permutations(free, 2):
        if any(not holds(_pair(a, p), _pair(c, q)) for a in side for c in other):
            clauses.append(((q, True), (p, False)))
    return free, clauses


def _plausible_search(labels: Iterable[int], holds: PairPredicate) -> Iterator[PlausibleSet]:
    scope = index_set(labels)
    if len(scope) < 4:
        return
    for side, other in _quadruples(scope):
        if not holds(side, other):
            continue
        free, clauses = _build_formula(scope, side, other, holds)
        assignment = two_sat_solve(free, clauses)
        if assignment is None:
            continue
        chosen = index_set((*side, *(e for e in free if assignment[e])))
        yield PlausibleSet(chosen, (side, other), tuple(sorted(assignment.items())), tuple(clauses))


def find_plausible_set(
    labels: Iterable[int], fam: SubmatrixFamily, *, predicate: PairPredicate | None = None
) -> Optional[PlausibleSet]:
    return next(_plausible_search(labels, predicate or family_predicate(fam)), None)


def minimize_plausible_set(found: PlausibleSet) -> PlausibleSet:
    side, _ = found.anchor
    free = [var for var, _ in found.assignment]
    minimal = minimal_true_assignment(free, list(found.clauses), dict(found.assignment))
    chosen = index_set((*side, *(e for e in free if minimal[e])))
    return PlausibleSet(chosen, found.anchor, tuple(sorted(minimal.items())), found.clauses)


def minimal_plausible_set(
    labels: Iterable[int], fam: SubmatrixFamily, *, predicate: PairPredicate | None = None
) -> Optional[PlausibleSet]:
    found = find_plausible_set(labels, fam, predicate=predicate)
    return minimize_plausible_set(found) if found is not None else None


def find_cut_explicit(matrix: ExactMatrix) -> Optional[IndexSet]:
    """A genuine cut of ``matrix`` found through 4x4 cut checks, or ``None``."""
    for found in _plausible_search(matrix.index, _explicit_predicate(matrix)):
        if is_cut(matrix, found.subset):
            return found.subset
    return None


def has_cut_bruteforce(matrix: ExactMatrix) -> Optional[IndexSet]:
    if matrix.n > _BRUTEFORCE_LIMIT:
        raise TooLarge("exhaustive cut search is limited to n <= 16", n=matrix.n)
    for size in range(2, matrix.n - 1):
        for subset in itertools.combinations(matrix.index, size):
            if is_cut(matrix, subset):
                return subset
    return None


__all__ = [
    "PlausibleSet",
    "PairPredicate",
    "family_predicate",
    "satisfies_P",
    "find_plausible_set",
    "minimal_plausible_set",
    "minimize_plausible_set",
    "find_cut_explicit",
    "has_cut_bruteforce",
]
