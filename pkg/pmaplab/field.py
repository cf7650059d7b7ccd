from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Any, Dict, Iterable, Tuple, Union

from sympy import isprime, nextprime
from sympy.ntheory import sqrt_mod

from .errors import DegenerateEquation, FieldTooSmall, InvalidField

Value = Union[int, Fraction]

PRIME = "prime"
RATIONAL = "rational"

# Integer range used when sampling rationals.
RATIONAL_SAMPLE_BOUND = 10**6


@dataclass(frozen=True)
class FieldSpec:
    """Exact field: F_p for an odd prime p, or the rationals.

    Prime-field values are canonical residues in ``[0, p)``; rational values are
    reduced ``Fraction`` objects. Every method returns canonical values.
    """

    kind: str
    modulus: int | None = None

    def __post_init__(self) -> None:
        if self.kind == PRIME:
            if not isinstance(self.modulus, int) or isinstance(self.modulus, bool):
                raise InvalidField("prime field requires an integer modulus", modulus=self.modulus)
            if self.modulus <= 2:
                raise InvalidField("characteristic 2 and moduli below 3 are not supported", modulus=self.modulus)
            if not isprime(self.modulus):
                raise InvalidField("modulus is not prime", modulus=self.modulus)
        elif self.kind == RATIONAL:
            if self.modulus is not None:
                raise InvalidField("rational field takes no modulus", modulus=self.modulus)
        else:
            raise InvalidField(f"unknown field kind: {self.kind}")

    @classmethod
    def prime(cls, modulus: int) -> "FieldSpec":
        return cls(PRIME, int(modulus))

    @classmethod
    def rational(cls) -> "FieldSpec":
        return cls(RATIONAL)

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "FieldSpec":
        if not isinstance(payload, dict):
            raise InvalidField("field must be a JSON object")
        kind = str(payload.get("kind", "")).strip().lower()
        if kind == PRIME:
            raw = payload.get("modulus")
            try:
                modulus = int(str(raw))
            except ValueError as exc:
                raise InvalidField("modulus must be a decimal string", modulus=raw) from exc
            return cls.prime(modulus)
        if kind == RATIONAL:
            return cls.rational()
        raise InvalidField(f"unknown field kind: {kind!r}")

    def to_dict(self) -> Dict[str, str]:
        if self.is_prime:
            return {"kind": PRIME, "modulus": str(self.modulus)}
        return {"kind": RATIONAL}

    @property
    def is_prime(self) -> bool:
        return self.kind == PRIME

    @property
    def size(self) -> int | None:
        """Number of elements, ``None`` for the rationals."""
        return self.modulus if self.is_prime else None

    def has_more_than(self, count: int) -> bool:
        return not self.is_prime or self.modulus > count  # type: ignore[operator]

    # -- element construction -------------------------------------------------

    def element(self, value: Any) -> Value:
        if isinstance(value, str):
            return self.parse(value)
        if self.is_prime:
            if isinstance(value, Fraction):
                return self.div(self.element(value.numerator), self.element(value.denominator))
            return int(value) % self.modulus  # type: ignore[operator]
        return Fraction(value)

    def zero(self) -> Value:
        return 0 if self.is_prime else Fraction(0)

    def one(self) -> Value:
        return 1 if self.is_prime else Fraction(1)

    def canonical(self, k: int) -> Value:
        """The k-th element in canonical order: 0, 1, 2, ..."""
        if self.is_prime:
            if k >= self.modulus:  # type: ignore[operator]
                raise FieldTooSmall("canonical scan ran past the field", requested=k, modulus=self.modulus)
            return k
        return Fraction(k)

    def nodes(self, count: int) -> Tuple[Value, ...]:
        """First ``count`` nonzero canonical elements, used as interpolation nodes."""
        if not self.has_more_than(count):
            raise FieldTooSmall("field too small for interpolation", nodes=count, modulus=self.modulus)
        return tuple(self.element(k) for k in range(1, count + 1))

    # -- arithmetic -----------------------------------------------------------

    def add(self, a: Value, b: Value) -> Value:
        if self.is_prime:
            return (a + b) % self.modulus  # type: ignore[operator]
        return a + b

    def sub(self, a: Value, b: Value) -> Value:
        if self.is_prime:
            return (a - b) % self.modulus  # type: ignore[operator]
        return a - b

    def mul(self, a: Value, b: Value) -> Value:
        if self.is_prime:
            return (a * b) % self.modulus  # type: ignore[operator]
        return a * b

    def neg(self, a: Value) -> Value:
        if self.is_prime:
            return (-a) % self.modulus  # type: ignore[operator]
        return -a

    def inv(self, a: Value) -> Value:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.is_prime:
            return pow(int(a), -1, self.modulus)  # type: ignore[arg-type]
        return 1 / Fraction(a)

    def div(self, a: Value, b: Value) -> Value:
        return self.mul(a, self.inv(b))

    def power(self, a: Value, exponent: int) -> Value:
        if self.is_prime:
            return pow(int(a), exponent, self.modulus)  # type: ignore[arg-type]
        return Fraction(a) ** exponent

    def total(self, values: Iterable[Value]) -> Value:
        acc = self.zero()
        for value in values:
            acc = self.add(acc, value)
        return acc

    def product(self, values: Iterable[Value]) -> Value:
        acc = self.one()
        for value in values:
            acc = self.mul(acc, value)
        return acc

    def sort_key(self, value: Value) -> Value:
        return value

    def lift(self, value: Value) -> Value:
        """Symmetric integer representative of a residue; rationals unchanged."""
        if self.is_prime:
            half = self.modulus // 2  # type: ignore[operator]
            return value - self.modulus if value > half else value  # type: ignore[operator]
        return value

    # -- text form ------------------------------------------------------------

    def parse(self, text: str) -> Value:
        raw = str(text).strip()
        try:
            if self.is_prime:
                if "/" in raw:
                    num, den = raw.split("/", 1)
                    return self.div(int(num) % self.modulus, int(den) % self.modulus)  # type: ignore[operator]
                return int(raw) % self.modulus  # type: ignore[operator]
            return Fraction(raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidField(f"cannot parse field element {raw!r}") from exc

    def format(self, value: Value) -> str:
        return str(value)

    # -- randomness -----------------------------------------------------------

    def random(self, stream) -> Value:
        if self.is_prime:
            return stream.below(self.modulus)
        bound = RATIONAL_SAMPLE_BOUND
        return Fraction(stream.below(2 * bound + 1) - bound)

    def random_nonzero(self, stream) -> Value:
        while True:
            value = self.random(stream)
            if value != 0:
                return value

    # -- roots ----------------------------------------------------------------

    def sqrt(self, a: Value) -> Value | None:
        """Square root or ``None``; prime fields return the smaller residue."""
        if a == 0:
            return self.zero()
        if self.is_prime:
            roots = sqrt_mod(int(a), self.modulus, all_roots=True)
            if not roots:
                return None
            return min(int(r) for r in roots)
        frac = Fraction(a)
        if frac < 0:
            return None
        num_root = isqrt(frac.numerator)
        den_root = isqrt(frac.denominator)
        if num_root * num_root != frac.numerator or den_root * den_root != frac.denominator:
            return None
        return Fraction(num_root, den_root)

    def is_square(self, a: Value) -> bool:
        return self.sqrt(a) is not None

    def solve_quadratic(self, a: Value, b: Value, c: Value) -> Tuple[Value, ...]:
        """Roots of ``a z^2 - b z + c`` in canonical order."""
        if a == 0:
            if b == 0:
                if c == 0:
                    raise DegenerateEquation("every element is a root of the zero polynomial")
                return ()
            return (self.div(c, b),)
        discriminant = self.sub(self.mul(b, b), self.mul(self.element(4), self.mul(a, c)))
        root = self.sqrt(discriminant)
        if root is None:
            return ()
        denominator = self.mul(self.element(2), a)
        roots = {self.div(self.add(b, root), denominator), self.div(self.sub(b, root), denominator)}
        return tuple(sorted(roots, key=self.sort_key))


def choose_prime(n: int) -> int:
    """Smallest prime above max(n^6, 10 n^5, 2n + 2)."""
    if n < 1:
        raise ValueError("n must be positive")
    bound = max(n**6, 10 * n**5, 2 * n + 2)
    return int(nextprime(bound))


def default_field(n: int) -> FieldSpec:
    return FieldSpec.prime(choose_prime(n))


def sqrt(field: FieldSpec, a: Value) -> Value | None:
    return field.sqrt(a)


def solve_quadratic(field: FieldSpec, a: Value, b: Value, c: Value) -> Tuple[Value, ...]:
    return field.solve_quadratic(a, b, c)


__all__ = [
    "Value",
    "FieldSpec",
    "PRIME",
    "RATIONAL",
    "choose_prime",
    "default_field",
    "sqrt",
    "solve_quadratic",
]
