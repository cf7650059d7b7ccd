from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

from ..combinat import subsets_upto
from ..errors import NoRoot, PmaplabError, ZeroOffDiagonal
from ..field import Value
from ..matrix import ExactMatrix, IndexSet, index_set
from .oracle import PMOracle, as_oracle

# Three quadratics with at most two roots each.
_FAMILY_CAP = 8


@dataclass(frozen=True)
class Family4:
    """All canonical 4x4 matrices sharing every principal minor with A[T]."""

    subset: IndexSet
    members: Tuple[ExactMatrix, ...]

    def to_dict(self) -> Dict[str, object]:
        return {"subset": list(self.subset), "members": [member.to_dict() for member in self.members]}

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


SubmatrixFamily = Dict[IndexSet, Family4]


def _nonzero_pair(pm: PMOracle, i: int, j: int) -> Value:
    value = pm.pair(i, j)
    if value == 0:
        raise ZeroOffDiagonal("off-diagonal product vanishes", pair=(i, j))
    return value


def recon2(pm: PMOracle, i: int, j: int) -> ExactMatrix:
    i, j = sorted((i, j))
    product = _nonzero_pair(pm, i, j)
    field = pm.field
    return ExactMatrix.from_entries(
        field,
        (i, j),
        {(i, i): pm(i), (j, j): pm(j), (i, j): field.one(), (j, i): product},
    )


def _canonical_candidate(
    pm: PMOracle,
    labels: IndexSet,
    pairs: Dict[Tuple[int, int], Value],
    upper: Dict[Tuple[int, int], Value],
) -> ExactMatrix:
    """Anchor row of ones; entries above the diagonal among the rest from ``upper``."""
    field = pm.field
    anchor = labels[0]
    entries: Dict[Tuple[int, int], Value] = {(x, x): pm(x) for x in labels}
    for x in labels[1:]:
        entries[(anchor, x)] = field.one()
        entries[(x, anchor)] = pairs[(anchor, x)]
    for (a, b), z in upper.items():
        entries[(a, b)] = z
        entries[(b, a)] = field.div(pairs[(a, b)], z)
    return ExactMatrix.from_entries(field, labels, entries)


def _pair_products(pm: PMOracle, labels: IndexSet) -> Dict[Tuple[int, int], Value]:
    return {(a, b): _nonzero_pair(pm, a, b) for a, b in itertools.combinations(labels, 2)}


def _entry_roots(
    pm: PMOracle, anchor: int, a: int, b: int, pairs: Dict[Tuple[int, int], Value]
) -> Tuple[Value, ...]:
    """Candidates for B[a,b] once row ``anchor`` is all ones."""
    field = pm.field
    return field.solve_quadratic(
        pairs[(anchor, b)],
        pm.triple(anchor, a, b),
        field.mul(pairs[(anchor, a)], pairs[(a, b)]),
    )


def recon3(pm: PMOracle, i: int, j: int, k: int) -> List[ExactMatrix]:
    labels = index_set((i, j, k))
    anchor, a, b = labels
    pairs = _pair_products(pm, labels)
    roots = _entry_roots(pm, anchor, a, b, pairs)
    if not roots:
        raise NoRoot("no root: oracle does not come from a dense 3x3 matrix", subset=labels)
    return [_canonical_candidate(pm, labels, pairs, {(a, b): z}) for z in roots]


def family4(pm: PMOracle, subset: Iterable[int]) -> Family4:
    labels = index_set(subset)
    if len(labels) != 4:
        raise ValueError("family4 needs four labels")
    anchor, rest = labels[0], labels[1:]
    pairs = _pair_products(pm, labels)
    slots = list(itertools.combinations(rest, 2))
    root_sets = [_entry_roots(pm, anchor, a, b, pairs) for a, b in slots]
    members: List[ExactMatrix] = []
    local = pm.restricted(labels)
    for combination in itertools.product(*root_sets):
        candidate = _canonical_candidate(pm, labels, pairs, dict(zip(slots, combination)))
        if candidate not in members and pme_full(local, candidate):
            members.append(candidate)
    assert len(members) <= _FAMILY_CAP
    return Family4(labels, tuple(members))


def submatrix_family(pm: PMOracle, labels: Iterable[int]) -> SubmatrixFamily:
    family: SubmatrixFamily = {}
    for subset in itertools.combinations(index_set(labels), 4):
        try:
            family[subset] = family4(pm, subset)
        except PmaplabError as exc:
            exc.context.setdefault("subset", list(subset))
            raise
    return family


def _minors_agree(pm_a: PMOracle, pm_b: PMOracle, subsets: Iterable[Sequence[int]]) -> bool:
    return all(pm_a.query(subset) == pm_b.query(subset) for subset in subsets)


def pme_upto4(a: PMOracle | ExactMatrix, b: PMOracle | ExactMatrix, labels: Iterable[int] | None = None) -> bool:
    """Principal minors of order at most four agree on ``labels`` (default: the shared index)."""
    pm_a, pm_b = as_oracle(a), as_oracle(b)
    scope = index_set(labels) if labels is not None else pm_a.index
    return _minors_agree(pm_a, pm_b, subsets_upto(scope, 4))


def pme_full(a: PMOracle | ExactMatrix, b: PMOracle | ExactMatrix) -> bool:
    pm_a, pm_b = as_oracle(a), as_oracle(b)
    return _minors_agree(pm_a, pm_b, subsets_upto(pm_a.index, len(pm_a.index)))


__all__ = [
    "Family4",
    "SubmatrixFamily",
    "recon2",
    "recon3",
    "family4",
    "submatrix_family",
    "pme_upto4",
    "pme_full",
]
