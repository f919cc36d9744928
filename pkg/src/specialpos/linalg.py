"""Exact matrices, RREF and the subspace calculus of P^n.

A projective subspace is stored by the reduced row echelon form of a
spanning set of homogeneous coordinate vectors, so two subspaces are equal
exactly when their bases are.  The empty subspace has dimension -1 and no
basis rows.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import AmbientMismatch, CenterContainsX, InputError, MixedAmbient, MixedFields
from .fields import Field, Raw, sample_raw

Row = tuple  # tuple of raw field values


def _rref_rows(field: Field, rows: Iterable[Sequence[Raw]], ncols: int) -> tuple[list[list[Raw]], list[int]]:
    """Row-reduce; return the nonzero RREF rows and their pivot columns."""
    rows = [list(r) for r in rows]
    pivots: list[int] = []
    nrows = len(rows)
    r = 0
    prime = field.is_prime
    p = field.modulus
    for c in range(ncols):
        if r == nrows:
            break
        for i in range(r, nrows):
            if rows[i][c]:
                break
        else:
            continue
        rows[r], rows[i] = rows[i], rows[r]
        pr = rows[r]
        lead = pr[c]
        if prime:
            if lead != 1:
                inv = pow(lead, -1, p)
                pr = [x * inv % p for x in pr]
                rows[r] = pr
            for i2 in range(nrows):
                if i2 != r:
                    f = rows[i2][c]
                    if f:
                        rows[i2] = [(a - f * b) % p for a, b in zip(rows[i2], pr)]
        else:
            if lead != 1:
                pr = [x / lead for x in pr]
                rows[r] = pr
            for i2 in range(nrows):
                if i2 != r:
                    f = rows[i2][c]
                    if f:
                        rows[i2] = [a - f * b for a, b in zip(rows[i2], pr)]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rank_of(field: Field, rows: Sequence[Sequence[Raw]], ncols: int) -> int:
    return len(_rref_rows(field, rows, ncols)[1])


def nullspace(field: Field, rows: Sequence[Sequence[Raw]], ncols: int) -> list[Row]:
    """Basis of the right kernel ``{y : M y = 0}``, one vector per free column."""
    red, pivots = _rref_rows(field, rows, ncols)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [field.zero] * ncols
        v[f] = field.one
        for row, c in zip(red, pivots):
            v[c] = field.neg(row[f])
        basis.append(tuple(v))
    return basis


def det(field: Field, rows: Sequence[Sequence[Raw]]) -> Raw:
    """Determinant of a square matrix by elimination."""
    a = [list(r) for r in rows]
    size = len(a)
    result = field.one
    for c in range(size):
        for i in range(c, size):
            if a[i][c]:
                break
        else:
            return field.zero
        if i != c:
            a[c], a[i] = a[i], a[c]
            result = field.neg(result)
        lead = a[c][c]
        result = field.mul(result, lead)
        inv = field.inv(lead)
        for i2 in range(c + 1, size):
            f = a[i2][c]
            if f:
                f = field.mul(f, inv)
                a[i2] = [field.sub(x, field.mul(f, y)) for x, y in zip(a[i2], a[c])]
    return result


@dataclass(frozen=True)
class Matrix:
    field: Field
    ncols: int
    entries: tuple[Row, ...]

    def __post_init__(self):
        if any(len(r) != self.ncols for r in self.entries):
            raise InputError("ragged matrix")

    @classmethod
    def of(cls, field: Field, rows: Sequence[Sequence], ncols: int | None = None) -> Matrix:
        if ncols is None:
            if not rows:
                raise InputError("ncols required for an empty matrix")
            ncols = len(rows[0])
        return cls(field, ncols, tuple(tuple(field.coerce(x) for x in r) for r in rows))

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols


def rref(m: Matrix) -> tuple[Matrix, int]:
    """Reduced row echelon form (zero rows kept at the bottom) and rank."""
    red, pivots = _rref_rows(m.field, m.entries, m.ncols)
    zero_rows = [(m.field.zero,) * m.ncols] * (m.nrows - len(red))
    return Matrix(m.field, m.ncols, tuple(tuple(r) for r in red) + tuple(zero_rows)), len(pivots)


@dataclass(frozen=True)
class ProjSubspace:
    """Subspace of P^n spanned by the rows of ``basis`` (canonical RREF).

    Build instances with :meth:`from_rows`; the raw constructor trusts that
    ``basis`` is already in reduced row echelon form without zero rows.
    """

    field: Field
    n: int
    basis: tuple[Row, ...]

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"ambient dimension must be >= 1, got {self.n}")
        if any(len(r) != self.n + 1 for r in self.basis):
            raise InputError("basis rows must have n+1 coordinates")
        if len(self.basis) > self.n + 1:
            raise InputError("too many basis rows")

    @classmethod
    def from_rows(cls, field: Field, n: int, rows: Iterable[Sequence]) -> ProjSubspace:
        coerced = [tuple(field.coerce(x) for x in r) for r in rows]
        if any(len(r) != n + 1 for r in coerced):
            raise InputError("basis rows must have n+1 coordinates")
        red, _ = _rref_rows(field, coerced, n + 1)
        return cls(field, n, tuple(tuple(r) for r in red))

    @classmethod
    def empty(cls, field: Field, n: int) -> ProjSubspace:
        return cls(field, n, ())

    @classmethod
    def whole(cls, field: Field, n: int) -> ProjSubspace:
        return cls.coordinate(field, n, range(n + 1))

    @classmethod
    def coordinate(cls, field: Field, n: int, indices: Iterable[int]) -> ProjSubspace:
        """Span of the standard unit vectors ``e_i`` for ``i`` in ``indices``."""
        rows = []
        for i in sorted(set(indices)):
            v = [field.zero] * (n + 1)
            v[i] = field.one
            rows.append(tuple(v))
        return cls(field, n, tuple(rows))

    @property
    def dim(self) -> int:
        return len(self.basis) - 1

    @property
    def is_empty(self) -> bool:
        return not self.basis

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(i for i, x in enumerate(r) if x) for r in self.basis)

    def matrix(self) -> Matrix:
        return Matrix(self.field, self.n + 1, self.basis)

    def contains_vector(self, v: Sequence[Raw]) -> bool:
        return rank_of(self.field, self.basis + (tuple(v),), self.n + 1) == len(self.basis)

    def contains(self, other: ProjSubspace) -> bool:
        _check_pair(self, other)
        if other.is_empty:
            return True
        return rank_of(self.field, self.basis + other.basis, self.n + 1) == len(self.basis)

    def points(self) -> Iterator[Row]:
        """All projective points of the subspace over a prime field, as
        vectors ``sum c_i b_i`` with ``c`` normalized (first nonzero = 1)."""
        if not self.field.is_prime:
            raise InputError("point enumeration needs a finite field")
        p = self.field.modulus
        m = len(self.basis)
        for lead in range(m):
            for tail in itertools.product(range(p), repeat=m - lead - 1):
                coeffs = (0,) * lead + (1,) + tail
                yield tuple(
                    sum(c * b[col] for c, b in zip(coeffs, self.basis)) % p for col in range(self.n + 1)
                )

    def to_json(self) -> dict:
        return {"n": self.n, "basis": [[self.field.format(x) for x in r] for r in self.basis]}

    @classmethod
    def from_json(cls, field: Field, obj: dict) -> ProjSubspace:
        try:
            n = obj["n"]
            rows = obj["basis"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad subspace JSON: {obj!r}") from exc
        if not isinstance(n, int) or not isinstance(rows, list):
            raise InputError(f"bad subspace JSON: {obj!r}")
        return cls.from_rows(field, n, [[field.parse(str(x)) for x in r] for r in rows])

    def __repr__(self) -> str:
        rows = ", ".join("[" + " ".join(self.field.format(x) for x in r) + "]" for r in self.basis)
        return f"ProjSubspace(P^{self.n}/{self.field!r}, dim={self.dim}, {rows})"


def _check_pair(a: ProjSubspace, b: ProjSubspace) -> None:
    if a.field != b.field:
        raise MixedFields(f"{a.field!r} vs {b.field!r}")
    if a.n != b.n:
        raise MixedAmbient(f"P^{a.n} vs P^{b.n}")


def span(parts: Sequence[ProjSubspace], *, field: Field | None = None, n: int | None = None) -> ProjSubspace:
    """Smallest subspace containing every part.

    An empty ``parts`` needs ``field`` and ``n`` and gives the empty subspace.
    """
    if not parts:
        if field is None or n is None:
            raise InputError("span of nothing needs field and n")
        return ProjSubspace.empty(field, n)
    first = parts[0]
    for other in parts[1:]:
        _check_pair(first, other)
    rows = [r for s in parts for r in s.basis]
    red, _ = _rref_rows(first.field, rows, first.n + 1)
    return ProjSubspace(first.field, first.n, tuple(tuple(r) for r in red))


def annihilator(s: ProjSubspace) -> list[Row]:
    """Linear equations cutting out ``s`` (a basis of its dual space)."""
    return nullspace(s.field, s.basis, s.n + 1)


def intersect(a: ProjSubspace, b: ProjSubspace) -> ProjSubspace:
    """Meet of two subspaces, as the kernel of their stacked equations."""
    _check_pair(a, b)
    equations = annihilator(a) + annihilator(b)
    return ProjSubspace.from_rows(a.field, a.n, nullspace(a.field, equations, a.n + 1))


def meets(a: ProjSubspace, b: ProjSubspace) -> bool:
    """True iff the subspaces share a point (rank of stacked bases drops)."""
    _check_pair(a, b)
    if a.is_empty or b.is_empty:
        return False
    total = len(a.basis) + len(b.basis)
    if total > a.n + 1:
        return True
    return rank_of(a.field, a.basis + b.basis, a.n + 1) < total


def _project_vector(center: ProjSubspace, pivots: Sequence[int], free: Sequence[int], v: Sequence[Raw]) -> Row:
    f = center.field
    v = list(v)
    for row, c in zip(center.basis, pivots):
        a = v[c]
        if a:
            v = [f.sub(x, f.mul(a, y)) for x, y in zip(v, row)]
    return tuple(v[c] for c in free)


def projection_target(center: ProjSubspace) -> int:
    """Ambient dimension of the image of the projection from ``center``."""
    return center.n - center.dim - 1


def project_from(center: ProjSubspace, x: ProjSubspace) -> ProjSubspace:
    """Image of ``x`` under the linear projection from ``center``.

    Coordinates on the target: extend the RREF basis of ``center`` by the
    unit vectors at its non-pivot columns (increasing order), write a vector
    in that basis and keep the unit-vector coefficients.
    """
    _check_pair(center, x)
    if center.is_empty:
        raise InputError("projection center must be nonempty")
    if center.contains(x):
        raise CenterContainsX("projection of a subspace contained in the center")
    target = projection_target(center)
    if target < 1:
        raise InputError(f"projection from a {center.dim}-space of P^{center.n} has no target of dimension >= 1")
    pivots = center.pivots
    pivset = set(pivots)
    free = [c for c in range(center.n + 1) if c not in pivset]
    rows = [_project_vector(center, pivots, free, v) for v in x.basis]
    return ProjSubspace.from_rows(center.field, target, rows)


def preimage_closure(center: ProjSubspace, r: ProjSubspace) -> ProjSubspace:
    """Closure of the preimage of ``r`` under projection from ``center``:
    the span of ``center`` and the lifts of ``r``'s basis vectors."""
    if center.is_empty:
        raise InputError("projection center must be nonempty")
    if r.field != center.field:
        raise MixedFields(f"{center.field!r} vs {r.field!r}")
    if r.n != projection_target(center):
        raise AmbientMismatch(f"target of projection is P^{projection_target(center)}, got P^{r.n}")
    f = center.field
    pivset = set(center.pivots)
    free = [c for c in range(center.n + 1) if c not in pivset]
    lifts = []
    for v in r.basis:
        w = [f.zero] * (center.n + 1)
        for c, x in zip(free, v):
            w[c] = x
        lifts.append(tuple(w))
    red, _ = _rref_rows(f, list(center.basis) + lifts, center.n + 1)
    return ProjSubspace(f, center.n, tuple(tuple(row) for row in red))


def random_vector(field: Field, length: int, rng: random.Random, bound: int = 10**6) -> Row:
    while True:
        v = tuple(sample_raw(field, rng, bound) for _ in range(length))
        if any(v):
            return v


def random_subspace(field: Field, n: int, dim: int, rng: random.Random, bound: int = 10**6) -> ProjSubspace:
    """Random subspace of the given dimension (rejection on rank)."""
    if not -1 <= dim <= n:
        raise InputError(f"dimension {dim} out of range for P^{n}")
    while True:
        rows = [random_vector(field, n + 1, rng, bound) for _ in range(dim + 1)]
        s = ProjSubspace.from_rows(field, n, rows)
        if s.dim == dim:
            return s


def random_point_of(s: ProjSubspace, rng: random.Random, bound: int = 10**6) -> Row:
    """Random point of a nonempty subspace (random combination of its basis)."""
    f = s.field
    while True:
        coeffs = [sample_raw(f, rng, bound) for _ in s.basis]
        if any(coeffs):
            break
    v = [f.zero] * (s.n + 1)
    for c, row in zip(coeffs, s.basis):
        if c:
            v = [f.add(x, f.mul(c, y)) for x, y in zip(v, row)]
    return tuple(v)


def point(field: Field, n: int, coords: Sequence) -> ProjSubspace:
    return ProjSubspace.from_rows(field, n, [coords])
