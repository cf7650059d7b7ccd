from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Sequence, Tuple

from ..config import Settings, load_settings
from ..errors import FieldTooSmall, InvalidInput, IsolationFailed, NotPmapShaped, RetriesExhausted
from ..extensions import parallel_map
from ..field import FieldSpec, Value
from ..matrix import ExactMatrix, det_rows, inverse_rows, matmul_rows
from ..utils import SeededStream, structured_log
from .oracle import PolyBox, interpolate_coefficients
from .pmap import run_blackbox_pmap

Vector = Tuple[Value, ...]


@dataclass(frozen=True)
class RodInstance:
    """det(B0 + sum_i y_i u_i v_i^T) with B0 of size r x r."""

    field: FieldSpec
    n: int
    r: int
    b0: Tuple[Vector, ...]
    rank1: Tuple[Tuple[Vector, Vector], ...]

    def __post_init__(self) -> None:
        if len(self.b0) != self.r or any(len(row) != self.r for row in self.b0):
            raise InvalidInput("B0 must be r x r", r=self.r)
        if len(self.rank1) != self.n or any(len(u) != self.r or len(v) != self.r for u, v in self.rank1):
            raise InvalidInput("need n rank-one factors of length r", n=self.n, r=self.r)

    def matrix_at(self, point: Sequence[Value]) -> List[List[Value]]:
        f = self.field
        rows = [list(row) for row in self.b0]
        for y, (u, v) in zip(point, self.rank1):
            y = f.element(y)
            if y == 0:
                continue
            for a in range(self.r):
                if u[a] == 0:
                    continue
                scale = f.mul(y, u[a])
                for b in range(self.r):
                    rows[a][b] = f.add(rows[a][b], f.mul(scale, v[b]))
        return rows

    def evaluate(self, point: Sequence[Value]) -> Value:
        if len(point) != self.n:
            raise InvalidInput("point arity mismatch", expected=self.n, received=len(point))
        return det_rows(self.field, self.matrix_at(point))

    def box(self, *, label: str = "rod") -> PolyBox:
        return PolyBox(self.field, tuple(range(1, self.n + 1)), min(self.n, self.r), self.evaluate, label=label)

    def to_dict(self) -> Dict[str, Any]:
        fmt = self.field.format
        return {
            "field": self.field.to_dict(),
            "n": self.n,
            "r": self.r,
            "B0": [[fmt(value) for value in row] for row in self.b0],
            "rank1": [{"u": [fmt(x) for x in u], "v": [fmt(x) for x in v]} for u, v in self.rank1],
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "RodInstance":
        try:
            field = FieldSpec.from_dict(payload["field"])
            n, r = int(payload["n"]), int(payload["r"])
            b0 = tuple(tuple(field.element(str(value)) for value in row) for row in payload["B0"])
            rank1 = tuple(
                (
                    tuple(field.element(str(x)) for x in item["u"]),
                    tuple(field.element(str(x)) for x in item["v"]),
                )
                for item in payload["rank1"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput("ROD JSON needs field, n, r, B0 and rank1") from exc
        return cls(field, n, r, b0, rank1)


@dataclass(frozen=True)
class IsolationContext:
    weights: Tuple[int, ...]
    # True where y_i is in the isolated monomial, False where t_i is.
    selection: Tuple[bool, ...]
    gamma: Value
    min_weight: int
    attempts: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "weights": list(self.weights),
            "selection": ["y" if chosen else "t" for chosen in self.selection],
            "gamma": str(self.gamma),
            "min_weight": self.min_weight,
            "attempts": self.attempts,
        }


def homogenize_box(box: PolyBox) -> PolyBox:
    """Box for t_1...t_n f(y_1/t_1, ..., y_n/t_n) over (y_1..y_n, t_1..t_n)."""
    field = box.field
    n = box.arity
    if not field.has_more_than(n + 1):
        raise FieldTooSmall("homogenization needs more than n + 1 field elements", n=n, modulus=field.modulus)

    def evaluate(point: Tuple[Value, ...]) -> Value:
        ys, ts = point[:n], point[n:]
        inner = [field.div(y, t) for y, t in zip(ys, ts)]
        return field.mul(field.product(ts), box.evaluate(inner))

    return PolyBox(
        field,
        tuple(range(1, 2 * n + 1)),
        n,
        evaluate,
        inverted=frozenset(range(n, 2 * n)),
        label=f"hom({box.label})",
    )


def _weighted_coefficients(box2n: PolyBox, weights: Sequence[int], zeroed: int | None, bound: int) -> List[Value]:
    """Coefficients of lambda -> f'(lambda^w) with coordinate ``zeroed`` forced to 0."""
    field = box2n.field
    samples = []
    for lam in field.nodes(bound + 1):
        point = [field.power(lam, w) for w in weights]
        if zeroed is not None:
            point[zeroed] = field.zero()
        samples.append(box2n.evaluate(point))
    return interpolate_coefficients(field, samples)


def isolate_monomial(box2n: PolyBox, stream: SeededStream, *, retries: int | None = None) -> IsolationContext:
    """Find one monomial of the homogenized polynomial and its coefficient."""
    field = box2n.field
    n = box2n.arity // 2
    retries = retries if retries is not None else load_settings(dotenv=False).isolation_retries
    weight_stream = stream.stream("isolation")

    for attempt in range(1, retries + 1):
        weights = tuple(weight_stream.between(1, 4 * n) for _ in range(2 * n))
        bound = sum(max(weights[i], weights[n + i]) for i in range(n))
        if not field.has_more_than(bound + 1):
            raise FieldTooSmall("weighted substitution needs a larger field", bound=bound, modulus=field.modulus)
        structured_log("rod.isolation_attempt", level=logging.DEBUG, attempt=attempt, bound=bound)

        base = _weighted_coefficients(box2n, weights, None, bound)
        min_weight = next((w for w, c in enumerate(base) if c != 0), None)
        if min_weight is None:
            raise IsolationFailed("homogenized polynomial vanishes identically")
        target = base[min_weight]

        survivors = parallel_map(lambda i: _weighted_coefficients(box2n, weights, i, bound)[min_weight], range(n))
        selection: List[bool] = []
        for value in survivors:
            if value == 0:
                selection.append(True)
            elif value == target:
                selection.append(False)
            else:
                break
        if len(selection) == n:
            pattern = [field.one() if chosen else field.zero() for chosen in selection]
            pattern += [field.zero() if chosen else field.one() for chosen in selection]
            gamma = box2n.evaluate(pattern)
            if gamma == target:
                return IsolationContext(weights, tuple(selection), gamma, min_weight, attempt)
        structured_log("rod.isolation_retry", level=logging.INFO, attempt=attempt)

    raise IsolationFailed("no isolating weight assignment found", attempts=retries)


def reduce_rod_to_pmap(box: PolyBox, stream: SeededStream, *, retries: int | None = None) -> Tuple[PolyBox, IsolationContext]:
    """Box for det(A + Z) built from the isolated monomial of the homogenized ``box``."""
    box2n = homogenize_box(box)
    ctx = isolate_monomial(box2n, stream, retries=retries)
    field = box.field
    n = box.arity
    scale = field.inv(ctx.gamma)

    def evaluate(point: Tuple[Value, ...]) -> Value:
        ys = [z if chosen else field.one() for z, chosen in zip(point, ctx.selection)]
        ts = [field.one() if chosen else z for z, chosen in zip(point, ctx.selection)]
        return field.mul(scale, box2n.evaluate(ys + ts))

    return PolyBox(field, tuple(range(1, n + 1)), n, evaluate, label=f"h({box.label})"), ctx


def lift_pmap_solution(ctx: IsolationContext, learned: ExactMatrix) -> RodInstance:
    """Rank-one decomposition of f from det(A' + Z) = h and the isolated selection."""
    field = learned.field
    n = learned.n
    one, zero = field.one(), field.zero()

    def unit(i: int) -> List[Value]:
        return [one if k == i else zero for k in range(n)]

    b0: List[List[Value]] = []
    rank1: List[Tuple[List[Value], List[Value]]] = []
    for i, chosen in enumerate(ctx.selection):
        row = list(learned.rows[i])
        if chosen:
            b0.append(row)
            rank1.append((unit(i), unit(i)))
        else:
            b0.append(unit(i))
            rank1.append((unit(i), row))
    b0[0] = [field.mul(ctx.gamma, value) for value in b0[0]]
    rank1[0] = ([field.mul(ctx.gamma, value) for value in rank1[0][0]], rank1[0][1])
    return RodInstance(
        field,
        n,
        n,
        tuple(tuple(row) for row in b0),
        tuple((tuple(u), tuple(v)) for u, v in rank1),
    )


def pmap_to_rod_extract(rod: RodInstance) -> ExactMatrix:
    """A' = U^-1 B0 (V^T)^-1, so det(A' + Y) = det(B0 + U Y V^T)."""
    field = rod.field
    if rod.r != rod.n:
        raise NotPmapShaped("factors must form square U and V", n=rod.n, r=rod.r)
    u_cols = [u for u, _ in rod.rank1]
    v_cols = [v for _, v in rod.rank1]
    u_matrix = [list(row) for row in zip(*u_cols)]
    v_transpose = [list(v) for v in v_cols]
    if field.mul(det_rows(field, u_matrix), det_rows(field, v_transpose)) != field.one():
        raise NotPmapShaped("coefficient of y_1...y_n must be 1")
    u_inverse = inverse_rows(field, u_matrix)
    v_transpose_inverse = inverse_rows(field, v_transpose)
    if u_inverse is None or v_transpose_inverse is None:
        raise NotPmapShaped("U and V must be invertible")
    rows = matmul_rows(field, matmul_rows(field, u_inverse, rod.b0), v_transpose_inverse)
    return ExactMatrix.build(field, rows)


def _agrees(rod: RodInstance, box: PolyBox, stream: SeededStream, points: int) -> bool:
    field = box.field
    for _ in range(points):
        point = [field.random(stream) for _ in range(box.arity)]
        if rod.evaluate(point) != box.evaluate(point):
            return False
    return True


def learn_rod(box: PolyBox, stream: SeededStream, *, settings: Settings | None = None) -> RodInstance:
    settings = settings or load_settings(dotenv=False)
    verify_stream = stream.stream("verify")
    for attempt in range(settings.pmap_retries):
        attempt_stream = stream.stream(attempt)
        try:
            h_box, ctx = reduce_rod_to_pmap(box, attempt_stream, retries=settings.isolation_retries)
            run = run_blackbox_pmap(h_box, attempt_stream, settings=settings)
        except (IsolationFailed, RetriesExhausted) as exc:
            structured_log("rod.isolation_retry", level=logging.INFO, attempt=attempt, reason=type(exc).__name__)
            continue
        learned = lift_pmap_solution(ctx, run.result)
        if _agrees(learned, box, verify_stream, settings.verify_points):
            structured_log("rod.learned", level=logging.INFO, attempts=attempt + 1, box_queries=box.queries)
            return learned
        structured_log("rod.isolation_retry", level=logging.INFO, attempt=attempt, reason="mismatch")
    raise RetriesExhausted("could not learn a decomposition that matches the box", attempts=settings.pmap_retries)


def rod_from_matrix(matrix: ExactMatrix) -> RodInstance:
    """det(A + Y) written as a decomposition with unit factors."""
    field = matrix.field
    n = matrix.n
    units = tuple(tuple(field.one() if k == i else field.zero() for k in range(n)) for i in range(n))
    return RodInstance(field, n, n, matrix.rows, tuple((e, e) for e in units))


__all__ = [
    "RodInstance",
    "IsolationContext",
    "homogenize_box",
    "isolate_monomial",
    "reduce_rod_to_pmap",
    "lift_pmap_solution",
    "pmap_to_rod_extract",
    "learn_rod",
    "rod_from_matrix",
]
