"""Exact scalar arithmetic over Q and GF(p).

Linear algebra works on *raw* values for speed: ``int`` residues in
``[0, p)`` for prime fields and :class:`fractions.Fraction` for Q.  A
:class:`Field` knows how to combine raw values; :class:`FieldElement` is the
checked, operator-overloading wrapper handed to users.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Union

from sympy import isprime

from .errors import DivisionByZero, InputError, MixedFields

RATIONAL = "rational"
PRIME = "prime"

MAX_MODULUS = 2**61 - 1
DEFAULT_RATIONAL_BOUND = 10**6

Raw = Union[int, Fraction]


@dataclass(frozen=True)
class Field:
    """Field descriptor: ``Field.rational()`` or ``Field.gf(p)``."""

    kind: str
    modulus: int | None = None

    def __post_init__(self):
        if self.kind == RATIONAL:
            if self.modulus is not None:
                raise InputError("rational field takes no modulus")
        elif self.kind == PRIME:
            p = self.modulus
            if not isinstance(p, int) or p < 2 or p > MAX_MODULUS or not isprime(p):
                raise InputError(f"modulus must be a prime in [2, 2^61-1], got {p!r}")
        else:
            raise InputError(f"unknown field kind {self.kind!r}")

    @classmethod
    def rational(cls) -> Field:
        return cls(RATIONAL)

    @classmethod
    def gf(cls, p: int) -> Field:
        return cls(PRIME, p)

    @property
    def is_prime(self) -> bool:
        return self.kind == PRIME

    @property
    def order(self) -> int | None:
        return self.modulus

    def __repr__(self) -> str:
        return "Q" if self.kind == RATIONAL else f"GF({self.modulus})"

    # raw arithmetic -------------------------------------------------------

    def coerce(self, x: Any) -> Raw:
        """Canonical raw value from an int, Fraction or decimal string."""
        if isinstance(x, FieldElement):
            if x.field != self:
                raise MixedFields(f"{x.field!r} element used in {self!r}")
            return x.value
        if isinstance(x, str):
            return self.parse(x)
        if self.kind == PRIME:
            if isinstance(x, Fraction):
                if x.denominator % self.modulus == 0:
                    raise DivisionByZero(f"{x} has no image in {self!r}")
                return x.numerator * pow(x.denominator, -1, self.modulus) % self.modulus
            return int(x) % self.modulus
        return Fraction(x)

    def parse(self, s: str) -> Raw:
        s = s.strip()
        try:
            if "/" in s:
                num, den = s.split("/")
                return self.coerce(Fraction(int(num), int(den)))
            return self.coerce(int(s))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad scalar {s!r}") from exc

    def format(self, x: Raw) -> str:
        return str(x)

    @property
    def zero(self) -> Raw:
        return 0 if self.kind == PRIME else Fraction(0)

    @property
    def one(self) -> Raw:
        return 1 if self.kind == PRIME else Fraction(1)

    def add(self, a: Raw, b: Raw) -> Raw:
        if self.kind == PRIME:
            return (a + b) % self.modulus
        return a + b

    def sub(self, a: Raw, b: Raw) -> Raw:
        if self.kind == PRIME:
            return (a - b) % self.modulus
        return a - b

    def mul(self, a: Raw, b: Raw) -> Raw:
        if self.kind == PRIME:
            return a * b % self.modulus
        return a * b

    def neg(self, a: Raw) -> Raw:
        if self.kind == PRIME:
            return -a % self.modulus
        return -a

    def inv(self, a: Raw) -> Raw:
        if not a:
            raise DivisionByZero(f"inverse of zero in {self!r}")
        if self.kind == PRIME:
            return pow(a, -1, self.modulus)
        return 1 / a

    def div(self, a: Raw, b: Raw) -> Raw:
        return self.mul(a, self.inv(b))

    def element(self, x: Any) -> FieldElement:
        return FieldElement(self, self.coerce(x))

    # serialization --------------------------------------------------------

    def to_json(self) -> Any:
        return RATIONAL if self.kind == RATIONAL else {"gf": self.modulus}

    @classmethod
    def from_json(cls, obj: Any) -> Field:
        if obj == RATIONAL:
            return cls.rational()
        if isinstance(obj, dict) and set(obj) == {"gf"} and isinstance(obj["gf"], int):
            return cls.gf(obj["gf"])
        raise InputError(f"bad field descriptor {obj!r}")


@dataclass(frozen=True)
class FieldElement:
    field: Field
    value: Raw

    def _other(self, other: Any) -> Raw:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise MixedFields(f"{self.field!r} vs {other.field!r}")
            return other.value
        if isinstance(other, (int, Fraction)):
            return self.field.coerce(other)
        return NotImplemented

    def _wrap(self, v: Raw) -> FieldElement:
        return FieldElement(self.field, v)

    def __add__(self, other):
        o = self._other(other)
        return o if o is NotImplemented else self._wrap(self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return o if o is NotImplemented else self._wrap(self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._other(other)
        return o if o is NotImplemented else self._wrap(self.field.sub(o, self.value))

    def __mul__(self, other):
        o = self._other(other)
        return o if o is NotImplemented else self._wrap(self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return o if o is NotImplemented else self._wrap(self.field.div(self.value, o))

    def __rtruediv__(self, other):
        o = self._other(other)
        return o if o is NotImplemented else self._wrap(self.field.div(o, self.value))

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def inv(self) -> FieldElement:
        return self._wrap(self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise MixedFields(f"{self.field!r} vs {other.field!r}")
            return self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == self.field.coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __bool__(self):
        return bool(self.value)

    def __str__(self):
        return self.field.format(self.value)

    def __repr__(self):
        return f"{self.field!r}({self})"


class SeededRng(random.Random):
    """``random.Random`` that remembers its seed and can spawn children.

    Child ``i`` of a generator seeded with ``s`` is seeded with the string
    ``f"{s}/{i}"``; string seeds are hashed with SHA-512 by ``random``, so
    the split is stable across platforms and Python versions.
    """

    def __init__(self, seed: int | str = 0):
        self.root_seed = seed
        super().__init__(str(seed))

    def spawn(self, i: int) -> SeededRng:
        return SeededRng(f"{self.root_seed}/{i}")


def sample_uniform(field: Field, rng: random.Random, bound: int = DEFAULT_RATIONAL_BOUND) -> FieldElement:
    """Uniform residue over GF(p); over Q a fraction ``a/b`` with
    ``a`` in ``[-bound, bound]`` and ``b`` in ``[-bound, bound] \\ {0}``."""
    return FieldElement(field, sample_raw(field, rng, bound))


def sample_raw(field: Field, rng: random.Random, bound: int = DEFAULT_RATIONAL_BOUND) -> Raw:
    if field.kind == PRIME:
        return rng.randrange(field.modulus)
    num = rng.randint(-bound, bound)
    den = 0
    while den == 0:
        den = rng.randint(-bound, bound)
    return Fraction(num, den)
