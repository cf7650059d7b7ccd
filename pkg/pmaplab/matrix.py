from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple

from .combinat import tarjan_scc
from .errors import InvalidInput, NotACut, PartitionMismatch, ZeroOffDiagonal
from .field import FieldSpec, Value

Row = Tuple[Value, ...]
IndexSet = Tuple[int, ...]


def index_set(labels: Iterable[int]) -> IndexSet:
    """Sorted, duplicate-free tuple of labels."""
    return tuple(sorted(set(int(label) for label in labels)))


@dataclass(frozen=True)
class ExactMatrix:
    """Dense square matrix whose rows and columns carry explicit labels.

    ``index`` lists the labels in row order; submatrices keep the labels of the
    matrix they were cut from, so every later algorithm talks in labels.
    """

    field: FieldSpec
    index: IndexSet
    rows: Tuple[Row, ...]

    def __post_init__(self) -> None:
        size = len(self.index)
        if len(set(self.index)) != size:
            raise InvalidInput("matrix labels must be distinct", index=self.index)
        if len(self.rows) != size or any(len(row) != size for row in self.rows):
            raise InvalidInput("matrix must be square and match its index", n=size)

    # -- construction ---------------------------------------------------------

    @classmethod
    def build(
        cls,
        field: FieldSpec,
        rows: Sequence[Sequence[Any]],
        index: Sequence[int] | None = None,
    ) -> "ExactMatrix":
        labels = tuple(index) if index is not None else tuple(range(1, len(rows) + 1))
        converted = tuple(tuple(field.element(value) for value in row) for row in rows)
        return cls(field, labels, converted)

    @classmethod
    def identity(cls, field: FieldSpec, index: Sequence[int] | int) -> "ExactMatrix":
        labels = _labels(index)
        one, zero = field.one(), field.zero()
        rows = tuple(tuple(one if r == c else zero for c in range(len(labels))) for r in range(len(labels)))
        return cls(field, labels, rows)

    @classmethod
    def zeros(cls, field: FieldSpec, index: Sequence[int] | int) -> "ExactMatrix":
        labels = _labels(index)
        zero = field.zero()
        return cls(field, labels, tuple(tuple(zero for _ in labels) for _ in labels))

    @classmethod
    def diagonal(cls, field: FieldSpec, values: Sequence[Value], index: Sequence[int] | None = None) -> "ExactMatrix":
        labels = tuple(index) if index is not None else tuple(range(1, len(values) + 1))
        zero = field.zero()
        rows = tuple(
            tuple(field.element(values[r]) if r == c else zero for c in range(len(labels)))
            for r in range(len(labels))
        )
        return cls(field, labels, rows)

    @classmethod
    def from_entries(
        cls, field: FieldSpec, index: Sequence[int], entries: Mapping[Tuple[int, int], Value]
    ) -> "ExactMatrix":
        labels = tuple(index)
        zero = field.zero()
        rows = tuple(tuple(entries.get((i, j), zero) for j in labels) for i in labels)
        return cls(field, labels, rows)

    # -- access ---------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.index)

    @cached_property
    def _positions(self) -> Dict[int, int]:
        return {label: pos for pos, label in enumerate(self.index)}

    def pos(self, label: int) -> int:
        try:
            return self._positions[label]
        except KeyError as exc:
            raise InvalidInput(f"label {label} not in matrix index", index=self.index) from exc

    def __getitem__(self, key: Tuple[int, int]) -> Value:
        i, j = key
        return self.rows[self.pos(i)][self.pos(j)]

    def entries(self) -> Dict[Tuple[int, int], Value]:
        return {(i, j): self.rows[r][c] for r, i in enumerate(self.index) for c, j in enumerate(self.index)}

    def block(self, row_labels: Sequence[int], col_labels: Sequence[int]) -> List[List[Value]]:
        """Rectangular submatrix A[S, T] as raw rows."""
        cols = [self.pos(j) for j in col_labels]
        return [[self.rows[self.pos(i)][c] for c in cols] for i in row_labels]

    def principal(self, labels: Iterable[int]) -> "ExactMatrix":
        chosen = index_set(labels)
        return ExactMatrix(self.field, chosen, tuple(tuple(row) for row in self.block(chosen, chosen)))

    def complement(self, labels: Iterable[int]) -> IndexSet:
        chosen = set(labels)
        return tuple(label for label in self.index if label not in chosen)

    def relabel(self, index: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix(self.field, tuple(index), self.rows)

    def is_dense(self) -> bool:
        return all(
            self.rows[r][c] != 0 for r in range(self.n) for c in range(self.n) if r != c
        )

    # -- algebra --------------------------------------------------------------

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.field, self.index, tuple(zip(*self.rows)) if self.n else ())

    def _check_compatible(self, other: "ExactMatrix") -> None:
        if other.field != self.field or other.index != self.index:
            raise InvalidInput("matrices must share field and index")

    def add(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_compatible(other)
        f = self.field
        rows = tuple(tuple(f.add(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows))
        return ExactMatrix(f, self.index, rows)

    def sub(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_compatible(other)
        f = self.field
        rows = tuple(tuple(f.sub(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows))
        return ExactMatrix(f, self.index, rows)

    def matmul(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_compatible(other)
        return ExactMatrix(self.field, self.index, tuple(tuple(row) for row in matmul_rows(self.field, self.rows, other.rows)))

    def scale(self, factor: Value) -> "ExactMatrix":
        f = self.field
        return ExactMatrix(f, self.index, tuple(tuple(f.mul(factor, a) for a in row) for row in self.rows))

    def plus_diagonal(self, values: Sequence[Value]) -> "ExactMatrix":
        f = self.field
        rows = tuple(
            tuple(f.add(a, values[r]) if r == c else a for c, a in enumerate(row))
            for r, row in enumerate(self.rows)
        )
        return ExactMatrix(f, self.index, rows)

    def diagonal_values(self) -> Tuple[Value, ...]:
        return tuple(self.rows[r][r] for r in range(self.n))

    def with_entries(self, updates: Mapping[Tuple[int, int], Value]) -> "ExactMatrix":
        rows = [list(row) for row in self.rows]
        for (i, j), value in updates.items():
            rows[self.pos(i)][self.pos(j)] = self.field.element(value)
        return ExactMatrix(self.field, self.index, tuple(tuple(row) for row in rows))

    def minor(self, labels: Iterable[int]) -> Value:
        chosen = index_set(labels)
        return det_rows(self.field, self.block(chosen, chosen))

    # -- serialization --------------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"field": self.field.to_dict(), "n": self.n}
        if self.index != tuple(range(1, self.n + 1)):
            payload["index"] = list(self.index)
        payload["rows"] = [[self.field.format(value) for value in row] for row in self.rows]
        return payload

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "ExactMatrix":
        try:
            field = FieldSpec.from_dict(payload["field"])
            rows = payload["rows"]
            n = int(payload.get("n", len(rows)))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput("matrix JSON needs field, n and rows") from exc
        if len(rows) != n:
            raise InvalidInput("row count does not match n", n=n, rows=len(rows))
        index = payload.get("index")
        labels = [int(label) for label in index] if index else None
        if labels is not None and len(labels) != n:
            raise InvalidInput("index length does not match n", n=n)
        return cls.build(field, [[str(value) for value in row] for row in rows], labels)


def _labels(index: Sequence[int] | int) -> IndexSet:
    if isinstance(index, int):
        return tuple(range(1, index + 1))
    return tuple(index)


# -- raw row kernels ----------------------------------------------------------


def matmul_rows(field: FieldSpec, left: Sequence[Sequence[Value]], right: Sequence[Sequence[Value]]) -> List[List[Value]]:
    columns = list(zip(*right))
    return [[field.total(field.mul(a, b) for a, b in zip(row, col)) for col in columns] for row in left]


def _det_mod(rows: Sequence[Sequence[int]], p: int) -> int:
    m = [list(row) for row in rows]
    size = len(m)
    det = 1
    for col in range(size):
        pivot = next((r for r in range(col, size) if m[r][col]), None)
        if pivot is None:
            return 0
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        pivot_row = m[col]
        pivot_value = pivot_row[col]
        det = det * pivot_value % p
        inverse_pivot = pow(pivot_value, -1, p)
        for r in range(col + 1, size):
            row = m[r]
            factor = row[col] * inverse_pivot % p
            if factor:
                for c in range(col + 1, size):
                    row[c] = (row[c] - factor * pivot_row[c]) % p
    return det % p


def _bareiss_det(m: List[List[int]]) -> int:
    size = len(m)
    if size == 0:
        return 1
    sign = 1
    previous = 1
    for k in range(size - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, size) if m[r][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pivot = m[k][k]
        pivot_row = m[k]
        for i in range(k + 1, size):
            row = m[i]
            lead = row[k]
            for j in range(k + 1, size):
                row[j] = (row[j] * pivot - lead * pivot_row[j]) // previous
        previous = pivot
    return sign * m[size - 1][size - 1]


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> Tuple[List[List[int]], int]:
    """Clear denominators row by row; returns the integer rows and the product of multipliers."""
    scale = 1
    scaled: List[List[int]] = []
    for row in rows:
        multiplier = lcm(*(Fraction(value).denominator for value in row)) if row else 1
        scale *= multiplier
        scaled.append([int(Fraction(value) * multiplier) for value in row])
    return scaled, scale


def det_rows(field: FieldSpec, rows: Sequence[Sequence[Value]]) -> Value:
    if field.is_prime:
        return _det_mod(rows, field.modulus)  # type: ignore[arg-type]
    integer_rows, scale = _integer_rows(rows)
    return Fraction(_bareiss_det(integer_rows), scale)


def det(matrix: ExactMatrix) -> Value:
    return det_rows(matrix.field, matrix.rows)


def _rank_mod(rows: Sequence[Sequence[int]], p: int) -> int:
    m = [list(row) for row in rows]
    height = len(m)
    width = len(m[0]) if height else 0
    rank = 0
    for col in range(width):
        pivot = next((r for r in range(rank, height) if m[r][col]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pivot_row = m[rank]
        inverse_pivot = pow(pivot_row[col], -1, p)
        for r in range(rank + 1, height):
            row = m[r]
            factor = row[col] * inverse_pivot % p
            if factor:
                for c in range(col, width):
                    row[c] = (row[c] - factor * pivot_row[c]) % p
        rank += 1
        if rank == height:
            break
    return rank


def _rank_fraction_free(m: List[List[int]]) -> int:
    height = len(m)
    width = len(m[0]) if height else 0
    rank = 0
    previous = 1
    for col in range(width):
        pivot = next((r for r in range(rank, height) if m[r][col]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pivot_row = m[rank]
        pivot_value = pivot_row[col]
        for r in range(rank + 1, height):
            row = m[r]
            lead = row[col]
            for c in range(col + 1, width):
                row[c] = (row[c] * pivot_value - lead * pivot_row[c]) // previous
            row[col] = 0
        previous = pivot_value
        rank += 1
        if rank == height:
            break
    return rank


def rank_rows(field: FieldSpec, rows: Sequence[Sequence[Value]]) -> int:
    if not rows or not rows[0]:
        return 0
    if field.is_prime:
        return _rank_mod(rows, field.modulus)  # type: ignore[arg-type]
    integer_rows, _ = _integer_rows(rows)
    return _rank_fraction_free(integer_rows)


def rank(matrix: ExactMatrix, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> int:
    """Rank of A[S, T]; the whole matrix when S and T are omitted."""
    row_labels = matrix.index if rows is None else tuple(rows)
    col_labels = matrix.index if cols is None else tuple(cols)
    return rank_rows(matrix.field, matrix.block(row_labels, col_labels))


def inverse_rows(field: FieldSpec, rows: Sequence[Sequence[Value]]) -> List[List[Value]] | None:
    size = len(rows)
    one, zero = field.one(), field.zero()
    m = [list(row) + [one if r == c else zero for c in range(size)] for r, row in enumerate(rows)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if m[r][col] != 0), None)
        if pivot is None:
            return None
        m[col], m[pivot] = m[pivot], m[col]
        inverse_pivot = field.inv(m[col][col])
        m[col] = [field.mul(inverse_pivot, value) for value in m[col]]
        pivot_row = m[col]
        for r in range(size):
            if r == col or m[r][col] == 0:
                continue
            factor = m[r][col]
            m[r] = [field.sub(a, field.mul(factor, b)) for a, b in zip(m[r], pivot_row)]
    return [row[size:] for row in m]


def inverse(matrix: ExactMatrix) -> ExactMatrix | None:
    result = inverse_rows(matrix.field, matrix.rows)
    if result is None:
        return None
    return ExactMatrix(matrix.field, matrix.index, tuple(tuple(row) for row in result))


def adjugate(matrix: ExactMatrix) -> ExactMatrix:
    """Transpose cofactor matrix; A . adj(A) = det(A) . I for every A."""
    field = matrix.field
    determinant = det(matrix)
    if determinant != 0:
        return inverse(matrix).scale(determinant)  # type: ignore[union-attr]
    size = matrix.n
    rows: List[List[Value]] = []
    for i in range(size):
        row: List[Value] = []
        for j in range(size):
            cofactor_rows = [
                [matrix.rows[r][c] for c in range(size) if c != i] for r in range(size) if r != j
            ]
            value = det_rows(field, cofactor_rows)
            row.append(value if (i + j) % 2 == 0 else field.neg(value))
        rows.append(row)
    return ExactMatrix(field, matrix.index, tuple(tuple(row) for row in rows))


# -- structural predicates -----------------------------------------------------


def is_cut(matrix: ExactMatrix, cut: Iterable[int]) -> bool:
    """Both off-diagonal blocks of X have rank at most one (n >= 4)."""
    side = index_set(cut)
    if matrix.n < 4 or not 2 <= len(side) <= matrix.n - 2:
        return False
    if not set(side) <= set(matrix.index):
        return False
    other = matrix.complement(side)
    return rank(matrix, side, other) <= 1 and rank(matrix, other, side) <= 1


@dataclass(frozen=True)
class CutTransposeWitness:
    cut: IndexSet
    p: Tuple[Value, ...]
    q: Tuple[Value, ...]
    u: Tuple[Value, ...]
    v: Tuple[Value, ...]


def cut_transpose_witness(matrix: ExactMatrix, cut: Iterable[int]) -> CutTransposeWitness:
    side = index_set(cut)
    if not is_cut(matrix, side) or len(scc_partition(matrix)) != 1:
        raise NotACut("cut-transpose needs an irreducible matrix and a cut", cut=side)
    field = matrix.field
    other = matrix.complement(side)
    upper = matrix.block(side, other)
    lower = matrix.block(other, side)

    # q^T: first nonzero row of A[X, X-bar]; p[i] = row_i / q^T.
    lead_row = next(r for r, row in enumerate(upper) if any(value != 0 for value in row))
    q = tuple(upper[lead_row])
    pivot_col = next(c for c, value in enumerate(q) if value != 0)
    p = tuple(field.div(row[pivot_col], q[pivot_col]) for row in upper)

    # u: first nonzero column of A[X-bar, X]; v[j] = column_j / u.
    columns = list(zip(*lower))
    lead_col = next(c for c, col in enumerate(columns) if any(value != 0 for value in col))
    u = tuple(columns[lead_col])
    pivot_row = next(r for r, value in enumerate(u) if value != 0)
    v = tuple(field.div(col[pivot_row], u[pivot_row]) for col in columns)
    return CutTransposeWitness(side, p, q, u, v)


def cut_transpose(matrix: ExactMatrix, cut: Iterable[int]) -> ExactMatrix:
    """Blocks [A[X], p u^T; q v^T, A[X-bar]^T]; preserves every principal minor."""
    witness = cut_transpose_witness(matrix, cut)
    field = matrix.field
    side = witness.cut
    other = matrix.complement(side)
    entries: Dict[Tuple[int, int], Value] = {}
    for a in side:
        for b in side:
            entries[(a, b)] = matrix[a, b]
    for r, a in enumerate(side):
        for c, b in enumerate(other):
            entries[(a, b)] = field.mul(witness.p[r], witness.u[c])
    for r, a in enumerate(other):
        for c, b in enumerate(side):
            entries[(a, b)] = field.mul(witness.q[r], witness.v[c])
    for a in other:
        for b in other:
            entries[(a, b)] = matrix[b, a]
    return ExactMatrix.from_entries(field, matrix.index, entries)


def canonical_diag_similar(matrix: ExactMatrix, anchor: int) -> ExactMatrix:
    """The unique diagonal conjugate whose row ``anchor`` is 1 off the diagonal."""
    if not matrix.is_dense():
        raise ZeroOffDiagonal("canonical form needs nonzero off-diagonal entries", anchor=anchor)
    field = matrix.field
    scale = {label: (field.one() if label == anchor else matrix[anchor, label]) for label in matrix.index}
    rows = tuple(
        tuple(
            field.div(field.mul(scale[i], matrix.rows[r][c]), scale[j])
            for c, j in enumerate(matrix.index)
        )
        for r, i in enumerate(matrix.index)
    )
    return ExactMatrix(field, matrix.index, rows)


def support_neighbours(matrix: ExactMatrix) -> Dict[int, List[int]]:
    return {
        i: [j for c, j in enumerate(matrix.index) if c != r and matrix.rows[r][c] != 0]
        for r, i in enumerate(matrix.index)
    }


def scc_partition(matrix: ExactMatrix) -> List[IndexSet]:
    """Strongly connected components in an order making A block upper triangular.

    Among valid orders the block with the smallest label comes first.
    """
    adjacency = support_neighbours(matrix)
    components = [index_set(component) for component in tarjan_scc(matrix.index, adjacency.__getitem__)]
    owner = {label: k for k, component in enumerate(components) for label in component}
    successors: List[set[int]] = [set() for _ in components]
    indegree = [0] * len(components)
    for i, targets in adjacency.items():
        for j in targets:
            a, b = owner[i], owner[j]
            if a != b and b not in successors[a]:
                successors[a].add(b)
                indegree[b] += 1
    ready = [(components[k][0], k) for k in range(len(components)) if indegree[k] == 0]
    heapq.heapify(ready)
    ordered: List[IndexSet] = []
    while ready:
        _, k = heapq.heappop(ready)
        ordered.append(components[k])
        for b in successors[k]:
            indegree[b] -= 1
            if indegree[b] == 0:
                heapq.heappush(ready, (components[b][0], b))
    return ordered


def is_irreducible(matrix: ExactMatrix) -> bool:
    return len(scc_partition(matrix)) == 1


def assemble_blocks(blocks: Sequence[Tuple[Sequence[int], ExactMatrix]]) -> ExactMatrix:
    """Block-diagonal matrix with each block placed at its original labels."""
    if not blocks:
        raise PartitionMismatch("no blocks to assemble")
    field = blocks[0][1].field
    entries: Dict[Tuple[int, int], Value] = {}
    seen: set[int] = set()
    for labels, block in blocks:
        labels = tuple(labels)
        if block.field != field:
            raise PartitionMismatch("blocks live over different fields")
        if len(labels) != block.n:
            raise PartitionMismatch("block size does not match its index set", labels=labels, n=block.n)
        if seen.intersection(labels) or len(set(labels)) != len(labels):
            raise PartitionMismatch("index sets overlap", labels=labels)
        seen.update(labels)
        for r, i in enumerate(labels):
            for c, j in enumerate(labels):
                entries[(i, j)] = block.rows[r][c]
    return ExactMatrix.from_entries(field, index_set(seen), entries)


__all__ = [
    "ExactMatrix",
    "IndexSet",
    "CutTransposeWitness",
    "index_set",
    "det",
    "det_rows",
    "rank",
    "rank_rows",
    "inverse",
    "inverse_rows",
    "adjugate",
    "matmul_rows",
    "is_cut",
    "cut_transpose",
    "cut_transpose_witness",
    "canonical_diag_similar",
    "scc_partition",
    "support_neighbours",
    "is_irreducible",
    "assemble_blocks",
]
