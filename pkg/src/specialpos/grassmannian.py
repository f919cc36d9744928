"""Plücker coordinates, the incidence divisor sigma_1, subspace enumeration
over finite fields and the Cayley-Bacharach test on G(k-1, n)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from math import comb
from typing import Iterator, Sequence

from .errors import DimensionMismatch, InputError, MixedFields, WrongDimension
from .fields import Field, Raw
from .linalg import ProjSubspace, det, meets, nullspace, rank_of
from .tables import DEFAULT_BUDGET, check_budget, free_positions, pivot_patterns, subspace_count

DEFAULT_MONOMIAL_BUDGET = 10**5


@dataclass(frozen=True)
class PluckerPoint:
    """Point of G(k-1, n) in P^{C(n+1,k)-1}; coordinates indexed by the
    sorted k-subsets of {0..n} in lexicographic order, first nonzero = 1."""

    field: Field
    k: int
    n: int
    coords: tuple[Raw, ...]

    def __post_init__(self):
        if len(self.coords) != comb(self.n + 1, self.k):
            raise InputError(f"expected {comb(self.n + 1, self.k)} Plücker coordinates, got {len(self.coords)}")
        if not any(self.coords):
            raise InputError("all Plücker coordinates vanish")

    @classmethod
    def normalized(cls, field: Field, k: int, n: int, coords: Sequence) -> PluckerPoint:
        vals = [field.coerce(x) for x in coords]
        lead = next((x for x in vals if x), None)
        if lead is None:
            raise InputError("all Plücker coordinates vanish")
        inv = field.inv(lead)
        return cls(field, k, n, tuple(field.mul(x, inv) for x in vals))

    def index(self) -> dict[tuple[int, ...], int]:
        return _subset_index(self.n, self.k)

    def to_json(self) -> dict:
        return {"k": self.k, "n": self.n, "coords": [self.field.format(x) for x in self.coords]}

    @classmethod
    def from_json(cls, field: Field, obj: dict) -> PluckerPoint:
        try:
            return cls.normalized(field, obj["k"], obj["n"], [field.parse(str(x)) for x in obj["coords"]])
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad Plücker JSON: {obj!r}") from exc


def _subset_index(n: int, k: int) -> dict[tuple[int, ...], int]:
    return {s: i for i, s in enumerate(itertools.combinations(range(n + 1), k))}


def plucker(s: ProjSubspace, k: int) -> PluckerPoint:
    """Normalized Plücker vector of a (k-1)-plane."""
    if s.dim != k - 1:
        raise WrongDimension(f"expected a {k - 1}-plane, got dim {s.dim}")
    f = s.field
    coords = []
    for cols in itertools.combinations(range(s.n + 1), k):
        coords.append(det(f, [[row[c] for c in cols] for row in s.basis]))
    return PluckerPoint.normalized(f, k, s.n, coords)


def _signed_coord(p: PluckerPoint, idx: dict, base: tuple[int, ...], extra: int) -> Raw:
    """p_{base + (extra,)} with the sign of sorting; zero on repeats."""
    if extra in base:
        return p.field.zero
    above = sum(1 for b in base if b > extra)
    val = p.coords[idx[tuple(sorted(base + (extra,)))]]
    return p.field.neg(val) if above % 2 else val


def check_plucker_relations(p: PluckerPoint) -> bool:
    """True iff every quadratic Grassmann-Plücker relation vanishes.

    Relations: for a (k-1)-subset I and a (k+1)-subset J = (j_0 < ... < j_k),
    ``sum_l (-1)^l p_{I+j_l} p_{J-j_l} = 0``.  For k = 2 these are exactly
    the three-term relations.
    """
    f, k, n = p.field, p.k, p.n
    idx = p.index()
    for small in itertools.combinations(range(n + 1), k - 1):
        for big in itertools.combinations(range(n + 1), k + 1):
            total = f.zero
            for l, j in enumerate(big):
                a = _signed_coord(p, idx, small, j)
                if not a:
                    continue
                b = p.coords[idx[big[:l] + big[l + 1 :]]]
                term = f.mul(a, b)
                total = f.sub(total, term) if l % 2 else f.add(total, term)
            if total:
                return False
    return True


def schubert_sigma1_contains(l: ProjSubspace, lam: ProjSubspace) -> bool:
    """Is ``[lam]`` on the divisor sigma_1(l) of planes meeting ``l``?

    ``dim l + dim lam`` must be ``n - 1``.  Decided by the vanishing of the
    determinant of the stacked bases; debug builds cross-check with meets().
    """
    if l.field != lam.field:
        raise MixedFields(f"{l.field!r} vs {lam.field!r}")
    if l.n != lam.n or l.dim + lam.dim != l.n - 1 or lam.dim < 0:
        raise DimensionMismatch(f"need dim l + dim lam = n - 1, got {l.dim} + {lam.dim} in P^{l.n}")
    vanishes = not det(l.field, l.basis + lam.basis)
    assert vanishes == meets(l, lam)
    return vanishes


def enumerate_subspaces(field: Field, n: int, m: int, budget: int | None = DEFAULT_BUDGET) -> Iterator[ProjSubspace]:
    """Every m-dimensional subspace of P^n(F_q) once, as RREF bases.

    Order: pivot columns lexicographically, then the free entries (row-major)
    lexicographically.  The budget is checked before the first item.
    """
    if not field.is_prime:
        raise InputError("subspace enumeration needs a prime field")
    if not 0 <= m <= n:
        raise InputError(f"need 0 <= m <= n, got m={m}, n={n}")
    q = field.modulus
    check_budget(f"subspaces of dim {m} in P^{n}(F_{q})", subspace_count(q, n, m), budget)
    return _enumerate(field, n, m)


def _enumerate(field: Field, n: int, m: int) -> Iterator[ProjSubspace]:
    q = field.modulus
    for pivots in pivot_patterns(n, m):
        slots = free_positions(pivots, n)
        for values in itertools.product(range(q), repeat=len(slots)):
            rows = [[0] * (n + 1) for _ in pivots]
            for i, c in enumerate(pivots):
                rows[i][c] = 1
            for (i, c), v in zip(slots, values):
                rows[i][c] = v
            yield ProjSubspace(field, n, tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class GrassmannPointSet:
    field: Field
    k: int
    n: int
    points: tuple[PluckerPoint, ...]

    def __post_init__(self):
        for pt in self.points:
            if (pt.field, pt.k, pt.n) != (self.field, self.k, self.n):
                raise InputError("points of a set must share field, k and n")

    @classmethod
    def of_planes(cls, planes: Sequence[ProjSubspace], k: int) -> GrassmannPointSet:
        if not planes:
            raise InputError("empty point set")
        pts = tuple(plucker(s, k) for s in planes)
        return cls(planes[0].field, k, planes[0].n, pts)

    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "k": self.k,
            "n": self.n,
            "points": [p.to_json() for p in self.points],
        }

    @classmethod
    def from_json(cls, obj: dict) -> GrassmannPointSet:
        try:
            f = Field.from_json(obj["field"])
            return cls(f, obj["k"], obj["n"], tuple(PluckerPoint.from_json(f, p) for p in obj["points"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad point set JSON: {exc}") from exc


@dataclass(frozen=True)
class CbReport:
    r: int
    holds: bool
    failing_index: int | None = None
    # (exponent vector over the Plücker coordinates, coefficient)
    separating_form: tuple[tuple[tuple[int, ...], Raw], ...] | None = None
    field: Field | None = dc_field(default=None, compare=False)

    def to_json(self) -> dict:
        out = {"r": self.r, "holds": self.holds, "failing_index": self.failing_index, "separating_form": None}
        if self.separating_form is not None:
            out["separating_form"] = [
                {"exponents": list(e), "coeff": self.field.format(c)} for e, c in self.separating_form
            ]
        return out


def monomials(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent vectors of all degree-``degree`` monomials, in the order of
    ``combinations_with_replacement`` over variable indices."""
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    return out


def evaluate_monomial(field: Field, exps: Sequence[int], coords: Sequence[Raw]) -> Raw:
    val = field.one
    for e, x in zip(exps, coords):
        for _ in range(e):
            val = field.mul(val, x)
    return val


def evaluate_form(field: Field, form: Sequence[tuple[Sequence[int], Raw]], coords: Sequence[Raw]) -> Raw:
    total = field.zero
    for exps, c in form:
        total = field.add(total, field.mul(c, evaluate_monomial(field, exps, coords)))
    return total


def cayley_bacharach_test(gamma: GrassmannPointSet, r: int, budget: int | None = DEFAULT_MONOMIAL_BUDGET) -> CbReport:
    """Cayley-Bacharach condition for ``gamma`` with respect to degree-r
    forms in the Plücker coordinates.

    Point j is separated iff its evaluation row is outside the row span of
    the others; the first such j is reported with a form vanishing on every
    other point but not on j.
    """
    if r < 1:
        raise InputError("r must be >= 1")
    f = gamma.field
    nvars = comb(gamma.n + 1, gamma.k)
    check_budget(f"degree-{r} monomials in {nvars} variables", comb(nvars + r - 1, r), budget)
    monos = monomials(nvars, r)
    rows = [tuple(evaluate_monomial(f, e, p.coords) for e in monos) for p in gamma.points]
    full = rank_of(f, rows, len(monos))
    for j in range(len(rows)):
        others = rows[:j] + rows[j + 1 :]
        if rank_of(f, others, len(monos)) == full:
            continue
        for vec in nullspace(f, others, len(monos)):
            value = f.zero
            for a, b in zip(rows[j], vec):
                value = f.add(value, f.mul(a, b))
            if value:
                form = tuple((e, c) for e, c in zip(monos, vec) if c)
                return CbReport(r, False, j, form, f)
        raise AssertionError("rank drop without a separating kernel vector")
    return CbReport(r, True, None, None, f)
