"""Structural properties of SP configurations, checked one instance at a time.

Each check takes an SP configuration over a prime field, exercises every
applicable choice (index subsets, projection centers, points) and returns a
:class:`LemmaCheck` counting the instances where the hypotheses were met
and listing any instance where the conclusion failed.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field

from .errors import InputError
from .linalg import ProjSubspace, intersect, meets, project_from, random_point_of, random_vector, rank_of, span
from .special_position import Configuration, SubsetOracle, Tester, sp_bruteforce

MAX_SUBSET_D = 10


@dataclass
class LemmaCheck:
    name: str
    instances: int = 0
    failures: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def merge(self, other: LemmaCheck) -> LemmaCheck:
        self.instances += other.instances
        self.failures += other.failures
        return self

    def to_json(self) -> dict:
        return {"name": self.name, "instances": self.instances, "failures": [str(f) for f in self.failures]}


def _masks(d: int):
    return range(1, 1 << d)


def _members(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def _require_sp(c: Configuration, oracle: SubsetOracle) -> None:
    if not oracle.is_sp((1 << c.d) - 1):
        raise InputError("lemma checks need an SP configuration")
    if c.d > MAX_SUBSET_D:
        raise InputError(f"subset checks limited to d <= {MAX_SUBSET_D}")


def check_containment(c: Configuration, oracle: SubsetOracle | None = None) -> LemmaCheck:
    """Each plane lies in the span of the others."""
    oracle = oracle or SubsetOracle(c, Tester.BRUTE_FORCE)
    _require_sp(c, oracle)
    out = LemmaCheck("containment")
    for j in range(c.d):
        others = span([p for i, p in enumerate(c.planes) if i != j])
        out.instances += 1
        if not others.contains(c.planes[j]):
            out.failures.append(("plane", j))
    return out


def check_intersection_bound(c: Configuration, oracle: SubsetOracle | None = None) -> LemmaCheck:
    """Split into a head (>= 2 planes) and a non-SP tail: the two spans meet
    in dimension >= k-1."""
    oracle = oracle or SubsetOracle(c, Tester.BRUTE_FORCE)
    _require_sp(c, oracle)
    out = LemmaCheck("intersection_bound")
    full = (1 << c.d) - 1
    for tail in _masks(c.d):
        head = full ^ tail
        if bin(head).count("1") < 2 or oracle.is_sp(tail):
            continue
        meet = intersect(span([c.planes[i] for i in _members(head)]), span([c.planes[i] for i in _members(tail)]))
        out.instances += 1
        if meet.dim < c.k - 1:
            out.failures.append(("head", _members(head), "meet_dim", meet.dim))
    return out


def random_disjoint_subspace(s: ProjSubspace, dim: int, rng: random.Random) -> ProjSubspace:
    """Random subspace of dimension ``dim`` missing ``s``."""
    f, n = s.field, s.n
    if s.dim + dim + 1 > n:
        raise InputError("no disjoint subspace of that dimension")
    rows: list = []
    while len(rows) < dim + 1:
        v = random_vector(f, n + 1, rng, bound=50)
        if rank_of(f, list(s.basis) + rows + [v], n + 1) == len(s.basis) + len(rows) + 1:
            rows.append(v)
    return ProjSubspace.from_rows(f, n, rows)


def project_configuration(center: ProjSubspace, c: Configuration, indices) -> Configuration:
    planes = tuple(project_from(center, c.planes[i]) for i in indices)
    return Configuration(c.field, center.n - center.dim - 1, c.k, planes)


def check_projection_equivalence(c: Configuration, rng: random.Random, centers: int = 2) -> LemmaCheck:
    """For centers P missing the total span, the planes are SP iff their
    projections from P are SP (in the smaller space).  Applies to any
    configuration, SP or not."""
    out = LemmaCheck("projection_equivalence")
    total = c.span()
    before = sp_bruteforce(c).holds
    for alpha in range(0, c.n - total.dim):
        if c.n - alpha - 1 < c.k:
            break
        for _ in range(centers):
            center = random_disjoint_subspace(total, alpha, rng)
            image = project_configuration(center, c, range(c.d))
            after = sp_bruteforce(image).holds
            out.instances += 1
            if before != after:
                out.failures.append(("alpha", alpha, "center", center, before, after))
    return out


def check_one_sided_projection(c: Configuration, rng: random.Random, centers: int = 2,
                               oracle: SubsetOracle | None = None) -> LemmaCheck:
    """A center meeting exactly the planes of a tail and missing the (>= 2)
    head planes projects the head to an SP sequence."""
    oracle = oracle or SubsetOracle(c, Tester.BRUTE_FORCE)
    _require_sp(c, oracle)
    out = LemmaCheck("one_sided_projection")
    f, n = c.field, c.n
    full = (1 << c.d) - 1
    for tail in _masks(c.d):
        head = _members(full ^ tail)
        if len(head) < 2:
            continue
        tail_idx = _members(tail)
        for _ in range(centers):
            pts = [random_point_of(c.planes[i], rng, bound=50) for i in tail_idx]
            center = ProjSubspace.from_rows(f, n, pts)
            if any(meets(center, c.planes[i]) for i in head):
                continue
            if n - center.dim - 1 < c.k:
                continue
            image = project_configuration(center, c, head)
            out.instances += 1
            if not sp_bruteforce(image).holds:
                out.failures.append(("head", head, "center", center))
    return out


def check_dichotomy(c: Configuration, max_points: int | None = None,
                    oracle: SubsetOracle | None = None) -> LemmaCheck:
    """Distinguished plane t, head H of size 2..min(d-2, n-k+1) among the
    others.  For a point p of plane t off span(H) whose projection makes H
    SP(n-k-1), H itself must be SP(n-k); if plane t lies in span(H) the
    disjunction already holds."""
    oracle = oracle or SubsetOracle(c, Tester.BRUTE_FORCE)
    _require_sp(c, oracle)
    out = LemmaCheck("dichotomy")
    if c.n - 1 < c.k:
        return out
    top = min(c.d - 2, c.n - c.k + 1)
    for t in range(c.d):
        others = [i for i in range(c.d) if i != t]
        for r in range(2, top + 1):
            for head in itertools.combinations(others, r):
                host = span([c.planes[i] for i in head])
                lam = c.planes[t]
                if host.contains(lam):
                    out.instances += 1
                    continue
                head_sp = oracle.is_sp(sum(1 << i for i in head))
                for count, p in enumerate(lam.points()):
                    if max_points is not None and count >= max_points:
                        break
                    if host.contains_vector(p):
                        continue
                    center = ProjSubspace.from_rows(c.field, c.n, [p])
                    image = project_configuration(center, c, head)
                    if not sp_bruteforce(image).holds:
                        continue
                    out.instances += 1
                    if not head_sp:
                        out.failures.append(("t", t, "head", head, "point", p))
                    break
    return out


def run_lemma_suite(c: Configuration, rng: random.Random, centers: int = 2,
                    max_points: int | None = None) -> dict[str, LemmaCheck]:
    """All structural checks on one SP configuration."""
    oracle = SubsetOracle(c, Tester.BRUTE_FORCE)
    return {
        "containment": check_containment(c, oracle),
        "intersection_bound": check_intersection_bound(c, oracle),
        "projection_equivalence": check_projection_equivalence(c, rng, centers),
        "one_sided_projection": check_one_sided_projection(c, rng, centers, oracle),
        "dichotomy": check_dichotomy(c, max_points, oracle),
    }
