from __future__ import annotations

import threading
from dataclasses import dataclass, field as dataclass_field
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Iterable, List, Sequence, Tuple

from ..errors import InvalidInput, SingularShift
from ..field import FieldSpec, Value
from ..matrix import ExactMatrix, IndexSet, det, det_rows, index_set

Point = Sequence[Value]
Evaluator = Callable[[Tuple[Value, ...]], Value]


# -- interpolation --------------------------------------------------------------


@lru_cache(maxsize=256)
def _constant_weights(field: FieldSpec, count: int) -> Tuple[Value, ...]:
    """L_k(0) for the Lagrange basis on nodes 1..count."""
    nodes = field.nodes(count)
    weights = []
    for k, tk in enumerate(nodes):
        numerator, denominator = field.one(), field.one()
        for m, tm in enumerate(nodes):
            if m != k:
                numerator = field.mul(numerator, field.neg(tm))
                denominator = field.mul(denominator, field.sub(tk, tm))
        weights.append(field.div(numerator, denominator))
    return tuple(weights)


@lru_cache(maxsize=256)
def _leading_weights(field: FieldSpec, count: int) -> Tuple[Value, ...]:
    """1 / prod(t_k - t_m): the top coefficient is their dot product with the values."""
    nodes = field.nodes(count)
    weights = []
    for k, tk in enumerate(nodes):
        denominator = field.product(field.sub(tk, tm) for m, tm in enumerate(nodes) if m != k)
        weights.append(field.inv(denominator))
    return tuple(weights)


def constant_coefficient(field: FieldSpec, values: Sequence[Value]) -> Value:
    """g(0) for the polynomial of degree < len(values) through (k, values[k-1])."""
    weights = _constant_weights(field, len(values))
    return field.total(field.mul(w, v) for w, v in zip(weights, values))


def leading_coefficient(field: FieldSpec, values: Sequence[Value]) -> Value:
    """Coefficient of t^(m-1) for the interpolant through m values at nodes 1..m."""
    weights = _leading_weights(field, len(values))
    return field.total(field.mul(w, v) for w, v in zip(weights, values))


def interpolate_coefficients(field: FieldSpec, values: Sequence[Value]) -> List[Value]:
    """All coefficients (ascending) of the interpolant at nodes 1..len(values)."""
    count = len(values)
    nodes = field.nodes(count)
    # master polynomial prod (t - t_k), ascending coefficients
    master: List[Value] = [field.one()]
    for tk in nodes:
        shifted = [field.zero()] + master
        for d in range(len(master)):
            shifted[d] = field.sub(shifted[d], field.mul(tk, master[d]))
        master = shifted
    result = [field.zero()] * count
    for k, tk in enumerate(nodes):
        if values[k] == 0:
            continue
        # synthetic division of master by (t - t_k)
        quotient: List[Value] = [field.zero()] * count
        carry = field.zero()
        for d in range(count, 0, -1):
            carry = field.add(master[d], field.mul(carry, tk)) if d < count else master[d]
            quotient[d - 1] = carry
        denominator = field.product(field.sub(tk, tm) for m, tm in enumerate(nodes) if m != k)
        scale = field.div(values[k], denominator)
        for d in range(count):
            result[d] = field.add(result[d], field.mul(scale, quotient[d]))
    return result


# -- black boxes -----------------------------------------------------------------


@dataclass
class PolyBox:
    """Black-box access to a polynomial over ``field``.

    Coordinates listed in ``inverted`` cannot be fed zero directly; ``evaluate``
    recovers those values by interpolation over a fresh scalar. ``queries``
    counts calls of the underlying function.
    """

    field: FieldSpec
    index: IndexSet
    degree: int
    fn: Evaluator
    inverted: FrozenSet[int] = frozenset()
    label: str = "box"
    queries: int = 0
    _lock: threading.Lock = dataclass_field(default_factory=threading.Lock, repr=False, compare=False)

    @property
    def arity(self) -> int:
        return len(self.index)

    def _raw(self, point: Tuple[Value, ...]) -> Value:
        with self._lock:
            self.queries += 1
        return self.fn(point)

    def evaluate(self, point: Point) -> Value:
        if len(point) != self.arity:
            raise InvalidInput("point arity mismatch", expected=self.arity, received=len(point))
        values = tuple(self.field.element(value) for value in point)
        zeroed = [pos for pos in self.inverted if values[pos] == 0]
        if not zeroed:
            return self._raw(values)
        samples = []
        for t in self.field.nodes(self.degree + 1):
            shifted = list(values)
            for pos in zeroed:
                shifted[pos] = t
            samples.append(self._raw(tuple(shifted)))
        return constant_coefficient(self.field, samples)

    def evaluate_labels(self, assignment: Dict[int, Value]) -> Value:
        return self.evaluate([assignment[label] for label in self.index])


def eval_with_inversions(box: PolyBox, point: Point) -> Value:
    return box.evaluate(point)


def box_from_matrix(matrix: ExactMatrix, *, label: str = "det") -> PolyBox:
    """Box for det(A + diag(point))."""
    field = matrix.field

    def evaluate(point: Tuple[Value, ...]) -> Value:
        return det(matrix.plus_diagonal(point))

    return PolyBox(field, matrix.index, matrix.n, evaluate, label=label)


def pm_query(box: PolyBox, subset: Iterable[int], at: Dict[int, Value] | None = None) -> Value:
    """det(A[T] + Y[T]) at ``at`` (zero by default) from n - |T| + 1 box evaluations."""
    chosen = set(subset)
    if not chosen:
        raise InvalidInput("principal minor query needs a nonempty set")
    if not chosen <= set(box.index):
        raise InvalidInput("query set outside the box index", subset=sorted(chosen))
    field = box.field
    outside = box.arity - len(chosen)
    base = [
        (field.element(at.get(label, 0)) if at else field.zero()) if label in chosen else None
        for label in box.index
    ]
    samples = []
    for z in field.nodes(outside + 1):
        samples.append(box.evaluate([z if value is None else value for value in base]))
    return leading_coefficient(field, samples)


def restrict_box(box: PolyBox, subset: Iterable[int]) -> PolyBox:
    chosen = index_set(subset)

    def evaluate(point: Tuple[Value, ...]) -> Value:
        return pm_query(box, chosen, dict(zip(chosen, point)))

    return PolyBox(box.field, chosen, len(chosen), evaluate, label=f"{box.label}|{len(chosen)}")


def shifted_inverse_box(box: PolyBox, shift: Sequence[Value]) -> PolyBox:
    """Box for det((A + D)^-1 + Y) given a box for det(A + Y) and diag(D)."""
    field = box.field
    d = tuple(field.element(value) for value in shift)
    scale = box.evaluate(d)
    if scale == 0:
        raise SingularShift("det(A + D) vanishes at the sampled shift")
    scale_inverse = field.inv(scale)

    def evaluate(point: Tuple[Value, ...]) -> Value:
        translated = [field.add(di, field.inv(yi)) for di, yi in zip(d, point)]
        return field.mul(field.mul(scale_inverse, field.product(point)), box.evaluate(translated))

    return PolyBox(
        field,
        box.index,
        box.arity,
        evaluate,
        inverted=frozenset(range(box.arity)),
        label=f"inv({box.label})",
    )


# -- principal minor oracle -------------------------------------------------------


class PMOracle:
    """Principal-minor oracle S -> det(A[S]) with query accounting.

    ``cached()`` returns a variant that memoizes answers and counts misses only.
    """

    def __init__(
        self,
        field: FieldSpec,
        index: Sequence[int],
        query_fn: Callable[[IndexSet], Value],
        *,
        cache: bool = False,
        source: str = "matrix",
    ) -> None:
        self.field = field
        self.index: IndexSet = index_set(index)
        self._query_fn = query_fn
        self._cache: Dict[IndexSet, Value] | None = {} if cache else None
        self._lock = threading.Lock()
        self.source = source
        self.queries = 0
        self.max_order = 0

    @classmethod
    def from_matrix(cls, matrix: ExactMatrix) -> "PMOracle":
        field = matrix.field

        def query(subset: IndexSet) -> Value:
            return det_rows(field, matrix.block(subset, subset))

        return cls(field, matrix.index, query, source="matrix")

    @classmethod
    def from_box(cls, box: PolyBox, *, cache: bool = True) -> "PMOracle":
        return cls(box.field, box.index, lambda subset: pm_query(box, subset), cache=cache, source=box.label)

    def cached(self) -> "PMOracle":
        return PMOracle(self.field, self.index, self._query_fn, cache=True, source=self.source)

    def restricted(self, labels: Iterable[int]) -> "PMOracle":
        """Same oracle viewed on a subset of the index; shares the query function."""
        chosen = index_set(labels)
        if not set(chosen) <= set(self.index):
            raise InvalidInput("restriction outside the oracle index", labels=chosen)
        view = PMOracle(self.field, chosen, self.query, source=self.source)
        return view

    def query(self, subset: Iterable[int]) -> Value:
        key = index_set(subset)
        if not key:
            raise InvalidInput("principal minor query needs a nonempty set")
        if self._cache is not None:
            with self._lock:
                if key in self._cache:
                    return self._cache[key]
        value = self._query_fn(key)
        with self._lock:
            if self._cache is not None:
                if key in self._cache:
                    return self._cache[key]
                self._cache[key] = value
            self.queries += 1
            self.max_order = max(self.max_order, len(key))
        return value

    def __call__(self, *labels: int) -> Value:
        return self.query(labels)

    def pair(self, i: int, j: int) -> Value:
        return pm_pair_product(self, i, j)

    def triple(self, i: int, j: int, k: int) -> Value:
        return pm_triple_sum(self, i, j, k)


def pm_pair_product(pm: PMOracle, i: int, j: int) -> Value:
    """A[i,j] A[j,i] from three queries."""
    f = pm.field
    return f.sub(f.mul(pm(i), pm(j)), pm(i, j))


def pm_triple_sum(pm: PMOracle, i: int, j: int, k: int) -> Value:
    """A[i,j]A[j,k]A[k,i] + A[i,k]A[k,j]A[j,i] from seven queries."""
    f = pm.field
    a_i, a_j, a_k = pm(i), pm(j), pm(k)
    total = f.add(pm(i, j, k), f.mul(f.element(2), f.product((a_i, a_j, a_k))))
    total = f.sub(total, f.mul(a_i, pm(j, k)))
    total = f.sub(total, f.mul(a_j, pm(i, k)))
    return f.sub(total, f.mul(a_k, pm(i, j)))


def check_2x2_irreducible(pm: PMOracle, i: int, j: int) -> bool:
    """gamma != alpha * beta for det(B[{i,j}] + Y) = y_i y_j + alpha y_i + beta y_j + gamma."""
    f = pm.field
    alpha, beta, gamma = pm(j), pm(i), pm(i, j)
    return gamma != f.mul(alpha, beta)


def as_oracle(source: "PMOracle | ExactMatrix") -> PMOracle:
    if isinstance(source, PMOracle):
        return source
    return PMOracle.from_matrix(source)


__all__ = [
    "PolyBox",
    "PMOracle",
    "box_from_matrix",
    "eval_with_inversions",
    "pm_query",
    "restrict_box",
    "shifted_inverse_box",
    "pm_pair_product",
    "pm_triple_sum",
    "check_2x2_irreducible",
    "as_oracle",
    "constant_coefficient",
    "leading_coefficient",
    "interpolate_coefficients",
]
