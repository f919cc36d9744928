"""Configuration generators, exhaustive surveys over small finite
geometries, sharpness search for the span bound, and the auxiliary
plane-configuration and quadric checks."""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field, replace
from math import comb
from typing import Sequence

import numpy as np

from .errors import InputError, InsufficientPoints, RationalFieldUnsupported, SpanTooBig, WrongDimension
from .fields import Field, Raw, SeededRng
from .linalg import ProjSubspace, nullspace, random_subspace, rank_of, span
from .special_position import (
    Configuration,
    MissTable,
    PartitionReport,
    SpCertificate,
    SubsetOracle,
    Tester,
    _check_report,
    check_sp,
    decompose,
    sp_bruteforce,
    theorem_bound,
    verify_partition_inequality,
)
from .tables import DEFAULT_BUDGET, check_budget, dual_table, pairing, plucker_table, subspace_count, subspace_table

DUPLICATES = "duplicates"
PENCIL = "pencil"
CONCURRENT_COPLANAR_LINES = "concurrent_coplanar_lines"
UNION = "union"
RANDOM_PERTURBED = "random_perturbed"
KINDS = (DUPLICATES, PENCIL, CONCURRENT_COPLANAR_LINES, UNION, RANDOM_PERTURBED)


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for a configuration.

    ``union`` concatenates ``parts``; ``random_perturbed`` replaces
    ``replace`` planes of ``base`` (or of nothing: a fully random
    configuration when ``base`` is None) by random planes.
    """

    kind: str
    n: int = 3
    k: int = 2
    d: int = 2
    seed: int = 0
    parts: tuple[GeneratorSpec, ...] = ()
    base: GeneratorSpec | None = None
    replace: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown generator kind {self.kind!r}")
        if self.kind == UNION:
            if len(self.parts) < 1 or len({(p.n, p.k) for p in self.parts}) != 1:
                raise InputError("union parts must share n and k")
        elif self.kind == RANDOM_PERTURBED and self.base is not None:
            pass
        else:
            if self.kind == CONCURRENT_COPLANAR_LINES and self.k != 2:
                raise InputError("concurrent coplanar lines have k = 2")
            if not 1 <= self.k <= self.n or self.d < 2:
                raise InputError(f"bad parameters n={self.n}, k={self.k}, d={self.d}")

    @property
    def ambient(self) -> tuple[int, int]:
        if self.kind == UNION:
            return self.parts[0].ambient
        if self.kind == RANDOM_PERTURBED and self.base is not None:
            return self.base.ambient
        return self.n, self.k

    def to_json(self) -> dict:
        out = {"kind": self.kind, "n": self.n, "k": self.k, "d": self.d, "seed": self.seed}
        if self.parts:
            out["parts"] = [p.to_json() for p in self.parts]
        if self.base is not None:
            out["base"] = self.base.to_json()
            out["replace"] = self.replace
        return out

    @classmethod
    def from_json(cls, obj: dict) -> GeneratorSpec:
        try:
            return cls(
                obj["kind"],
                obj.get("n", 3),
                obj.get("k", 2),
                obj.get("d", 2),
                obj.get("seed", 0),
                tuple(cls.from_json(p) for p in obj.get("parts", ())),
                cls.from_json(obj["base"]) if obj.get("base") else None,
                obj.get("replace", 1),
            )
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad generator JSON: {exc}") from exc


def duplicates(n: int, k: int, d: int, seed: int = 0) -> GeneratorSpec:
    return GeneratorSpec(DUPLICATES, n, k, d, seed)


def pencil(n: int, k: int, d: int, seed: int = 0) -> GeneratorSpec:
    return GeneratorSpec(PENCIL, n, k, d, seed)


def concurrent_lines(n: int, d: int, seed: int = 0) -> GeneratorSpec:
    return GeneratorSpec(CONCURRENT_COPLANAR_LINES, n, 2, d, seed)


def union(*parts: GeneratorSpec) -> GeneratorSpec:
    n, k = parts[0].ambient
    return GeneratorSpec(UNION, n, k, sum(_length(p) for p in parts), parts=tuple(parts))


def perturbed(base: GeneratorSpec | None, seed: int, replace_count: int = 1, n: int = 3, k: int = 2, d: int = 2) -> GeneratorSpec:
    if base is not None:
        n, k = base.ambient
        d = _length(base)
    return GeneratorSpec(RANDOM_PERTURBED, n, k, d, seed, base=base, replace=replace_count)


def _length(spec: GeneratorSpec) -> int:
    if spec.kind == UNION:
        return sum(_length(p) for p in spec.parts)
    if spec.kind == RANDOM_PERTURBED and spec.base is not None:
        return _length(spec.base)
    return spec.d


# labels attached to generated configurations
SP_BY_CONSTRUCTION = "sp_by_construction"
SP_OBLIGATION = "sp_obligation"
SP_VERIFIED = "sp_verified"
NOT_SP = "not_sp"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class Generated:
    config: Configuration
    label: str
    spec: GeneratorSpec

    @property
    def is_sp(self) -> bool | None:
        if self.label in (SP_BY_CONSTRUCTION, SP_VERIFIED):
            return True
        if self.label == NOT_SP:
            return False
        return None


def pencil_parameters(field: Field, count: int) -> list[tuple[int, int]]:
    """First ``count`` points of P^1 in the order (1:0), (0:1), (1:1), (1:2), ..."""
    size = field.modulus + 1 if field.is_prime else None
    if size is not None and count > size:
        raise InsufficientPoints(f"a pencil over {field!r} has only {size} members, need {count}")
    pts = [(1, 0), (0, 1)]
    t = 1
    while len(pts) < count:
        pts.append((1, t))
        t += 1
    return pts[:count]


def _pencil_planes(field: Field, n: int, k: int, d: int, rng: random.Random) -> list[ProjSubspace]:
    big = random_subspace(field, n, k, rng, bound=50)
    rows = big.basis
    axis, u, v = rows[: k - 1], rows[k - 1], rows[k]
    planes = []
    for s, t in pencil_parameters(field, d):
        w = tuple(field.add(field.mul(field.coerce(s), a), field.mul(field.coerce(t), b)) for a, b in zip(u, v))
        planes.append(ProjSubspace.from_rows(field, n, list(axis) + [w]))
    return planes


def _planes(spec: GeneratorSpec, field: Field) -> tuple[list[ProjSubspace], str]:
    kind = spec.kind
    if kind == DUPLICATES:
        rng = SeededRng(spec.seed)
        plane = random_subspace(field, spec.n, spec.k - 1, rng, bound=50)
        return [plane] * spec.d, SP_BY_CONSTRUCTION
    if kind in (PENCIL, CONCURRENT_COPLANAR_LINES):
        rng = SeededRng(spec.seed)
        planes = _pencil_planes(field, spec.n, spec.k, spec.d, rng)
        return planes, SP_OBLIGATION if spec.d >= 3 else UNKNOWN
    if kind == UNION:
        planes, labels = [], []
        for part in spec.parts:
            ps, lab = _planes(part, field)
            planes += ps
            labels.append(lab)
        if all(lab == SP_BY_CONSTRUCTION for lab in labels):
            return planes, SP_BY_CONSTRUCTION
        if all(lab in (SP_BY_CONSTRUCTION, SP_OBLIGATION) for lab in labels):
            return planes, SP_OBLIGATION
        return planes, UNKNOWN
    # random_perturbed
    rng = SeededRng(spec.seed)
    if spec.base is None:
        planes = [random_subspace(field, spec.n, spec.k - 1, rng, bound=50) for _ in range(spec.d)]
        return planes, UNKNOWN
    planes, _ = _planes(spec.base, field)
    n, k = spec.base.ambient
    for i in rng.sample(range(len(planes)), min(spec.replace, len(planes))):
        planes[i] = random_subspace(field, n, k - 1, rng, bound=50)
    return planes, UNKNOWN


def generate(spec: GeneratorSpec, field: Field) -> Generated:
    """Build the configuration described by ``spec``.

    Duplicates and unions of duplicates are SP by construction; pencils
    (d >= 3) carry an obligation that :func:`discharge` settles by brute
    force.
    """
    planes, label = _planes(spec, field)
    n, k = spec.ambient
    return Generated(Configuration(field, n, k, tuple(planes)), label, spec)


def discharge(g: Generated, budget: int | None = DEFAULT_BUDGET) -> Generated:
    """Replace an obligation (or unknown label) with a brute-force verdict."""
    if g.label in (SP_BY_CONSTRUCTION, SP_VERIFIED, NOT_SP):
        return g
    if not g.config.field.is_prime:
        raise RationalFieldUnsupported("cannot discharge an SP obligation over Q")
    cert = sp_bruteforce(g.config, budget)
    return replace(g, label=SP_VERIFIED if cert.holds else NOT_SP)


# exhaustive surveys ------------------------------------------------------


@dataclass
class SurveyRecord:
    indices: tuple[int, ...]
    span_dim: int
    m: int
    blocks: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {"indices": list(self.indices), "span_dim": self.span_dim, "m": self.m, "blocks": [list(b) for b in self.blocks]}


@dataclass
class SurveyResult:
    q: int
    n: int
    k: int
    d: int
    total_configs: int = 0
    sp_configs: int = 0
    indecomposable_configs: int = 0
    decomposable_configs: int = 0
    max_span_dim_observed: int = -1
    bound_violations: list = dc_field(default_factory=list)
    corollary_violations: list = dc_field(default_factory=list)
    span_histogram: dict = dc_field(default_factory=dict)
    records: list = dc_field(default_factory=list)

    @property
    def bound(self) -> int:
        return theorem_bound(self.d, self.k)

    def to_json(self, with_records: bool = False) -> dict:
        out = {
            "parameters": {"q": self.q, "n": self.n, "k": self.k, "d": self.d},
            "total_configs": self.total_configs,
            "sp_configs": self.sp_configs,
            "indecomposable_configs": self.indecomposable_configs,
            "decomposable_configs": self.decomposable_configs,
            "max_span_dim_observed": self.max_span_dim_observed,
            "bound": self.bound,
            "bound_violations": [list(v) for v in self.bound_violations],
            "corollary_violations": [list(v) for v in self.corollary_violations],
            "span_histogram": {str(k): v for k, v in sorted(self.span_histogram.items())},
        }
        if with_records:
            out["records"] = [r.to_json() for r in self.records]
        return out

    def planes(self, record: SurveyRecord) -> Configuration:
        field = Field.gf(self.q)
        table = subspace_table(self.q, self.n, self.k - 1, None)
        planes = tuple(_plane_from_table(field, self.n, table[i]) for i in record.indices)
        return Configuration(field, self.n, self.k, planes)


def _plane_from_table(field: Field, n: int, basis) -> ProjSubspace:
    return ProjSubspace(field, n, tuple(tuple(int(x) for x in r) for r in basis))


def multiset_count(size: int, d: int) -> int:
    return comb(size + d - 1, d)


class _PrecomputedMiss(MissTable):
    """MissTable whose miss matrix comes from a survey's global table."""

    def __init__(self, c: Configuration, miss: np.ndarray):
        self.config = c
        self.q = c.field.modulus
        self.miss = miss
        weights = np.left_shift(np.int64(1), np.arange(c.d, dtype=np.int64))
        self.bits = miss.astype(np.int64) @ weights
        self.unique_bits = np.unique(self.bits)


def _survey_chunk(q: int, n: int, k: int, d: int, firsts: Sequence[int], batch: int = 20000) -> SurveyResult:
    field = Field.gf(q)
    table = subspace_table(q, n, k - 1, None)
    miss_all = pairing(dual_table(q, n, n - k, None), plucker_table(q, n, k - 1, None), q) != 0
    size = table.shape[0]
    res = SurveyResult(q, n, k, d)
    bound = theorem_bound(d, k)
    for a in firsts:
        tails = itertools.combinations_with_replacement(range(a, size), d - 1)
        while True:
            chunk = list(itertools.islice(tails, batch))
            if not chunk:
                break
            idx = np.empty((len(chunk), d), dtype=np.int64)
            idx[:, 0] = a
            if d > 1:
                idx[:, 1:] = np.array(chunk, dtype=np.int64).reshape(len(chunk), d - 1)
            counts = miss_all[:, idx].sum(axis=2)  # (N_L, B)
            sp = ~(counts == 1).any(axis=0)
            res.total_configs += len(chunk)
            for row in np.flatnonzero(sp):
                indices = tuple(int(x) for x in idx[row])
                planes = tuple(_plane_from_table(field, n, table[i]) for i in indices)
                config = Configuration(field, n, k, planes)
                oracle = SubsetOracle(config, table=_PrecomputedMiss(config, miss_all[:, list(indices)]))
                report = decompose(config, oracle=oracle, max_d=max(d, 12))
                dim = config.span().dim
                res.sp_configs += 1
                res.span_histogram[dim] = res.span_histogram.get(dim, 0) + 1
                if report.decomposable:
                    res.decomposable_configs += 1
                    if dim > theorem_bound(d, k, report.m):
                        res.corollary_violations.append(indices)
                else:
                    res.indecomposable_configs += 1
                    res.max_span_dim_observed = max(res.max_span_dim_observed, dim)
                    if dim > bound:
                        res.bound_violations.append(indices)
                res.records.append(SurveyRecord(indices, dim, report.m, report.blocks))
    return res


def _merge(parts: Sequence[SurveyResult], q: int, n: int, k: int, d: int) -> SurveyResult:
    out = SurveyResult(q, n, k, d)
    for p in parts:
        out.total_configs += p.total_configs
        out.sp_configs += p.sp_configs
        out.indecomposable_configs += p.indecomposable_configs
        out.decomposable_configs += p.decomposable_configs
        out.max_span_dim_observed = max(out.max_span_dim_observed, p.max_span_dim_observed)
        out.bound_violations += p.bound_violations
        out.corollary_violations += p.corollary_violations
        for key, v in p.span_histogram.items():
            out.span_histogram[key] = out.span_histogram.get(key, 0) + v
        out.records += p.records
    return out


def survey_exhaustive(q: int, n: int, k: int, d: int, budget: int | None = DEFAULT_BUDGET, workers: int = 1) -> SurveyResult:
    """Classify every multiset of d (k-1)-planes of P^n(F_q).

    SP is decided from one global incidence table between all (n-k)-planes
    and all (k-1)-planes.  Work is split by the smallest plane index of the
    multiset; results are merged in that order, so the output does not
    depend on ``workers``.
    """
    field = Field.gf(q)
    if not 1 <= k <= n or d < 1:
        raise InputError(f"bad survey parameters n={n}, k={k}, d={d}")
    size = subspace_count(field.modulus, n, k - 1)
    check_budget("(k-1)-planes", size, budget)
    check_budget("(n-k)-planes", subspace_count(q, n, n - k), budget)
    check_budget(f"multisets of {d} planes", multiset_count(size, d), budget)
    firsts = list(range(size))
    if workers <= 1:
        parts = [_survey_chunk(q, n, k, d, firsts)]
    else:
        groups = [firsts[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_survey_chunk, *zip(*[(q, n, k, d, g) for g in groups])))
        # restore the sequential order of records
        merged = _merge(parts, q, n, k, d)
        merged.records.sort(key=lambda r: r.indices)
        merged.bound_violations.sort()
        merged.corollary_violations.sort()
        return merged
    return _merge(parts, q, n, k, d)


# sharpness search --------------------------------------------------------


@dataclass
class SearchResult:
    config: Configuration | None
    span_dim: int
    bound: int
    certificate: SpCertificate | None
    report: PartitionReport | None
    iterations: int
    violations: list = dc_field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "configuration": None if self.config is None else self.config.to_json(),
            "span_dim": self.span_dim,
            "bound": self.bound,
            "certificate": None if self.certificate is None else self.certificate.to_json(),
            "partition": None if self.report is None else self.report.to_json(),
            "iterations": self.iterations,
            "violations": [v.to_json() for v in self.violations],
        }


def _evaluate(c: Configuration, budget: int | None) -> tuple[int, SpCertificate, PartitionReport | None]:
    cert = check_sp(c, Tester.AUTO, budget=budget)
    if not cert.holds:
        return -1, cert, None
    report = decompose(c, Tester.AUTO, budget=budget)
    if report.decomposable:
        return -1, cert, report
    return c.span().dim, cert, report


def _random_split(d: int, rng: random.Random) -> list[int]:
    """Random composition of d into parts of size >= 2."""
    parts = []
    left = d
    while left >= 4 and rng.random() < 0.5:
        size = rng.randint(2, left - 2)
        parts.append(size)
        left -= size
    parts.append(left)
    return parts


def _propose(n: int, k: int, d: int, field: Field, rng: random.Random, current: Configuration | None) -> Configuration:
    move = rng.choice(["pencil", "duplicates", "union", "perturb", "swap"])
    seed = rng.getrandbits(32)
    max_pencil = field.modulus + 1 if field.is_prime else d
    if move == "pencil" and 3 <= d <= max_pencil:
        return generate(pencil(n, k, d, seed), field).config
    if move == "union" and d >= 4:
        specs = []
        for i, size in enumerate(_random_split(d, rng)):
            if size >= 3 and size <= max_pencil and rng.random() < 0.5:
                specs.append(pencil(n, k, size, seed + i))
            else:
                specs.append(duplicates(n, k, size, seed + i))
        return generate(union(*specs), field).config
    if move in ("perturb", "swap") and current is not None:
        planes = list(current.planes)
        i = rng.randrange(d)
        if move == "perturb":
            planes[i] = random_subspace(field, n, k - 1, rng, bound=50)
        else:
            # replace a plane by one through a random point of another plane
            # inside their common span
            j = rng.randrange(d)
            host = span([planes[i], planes[j]])
            sub = random_subspace(field, host.dim, k - 1, rng, bound=50) if host.dim >= k - 1 else None
            if sub is not None:
                rows = []
                for r in sub.basis:
                    v = [field.zero] * (n + 1)
                    for coef, b in zip(r, host.basis):
                        v = [field.add(x, field.mul(coef, y)) for x, y in zip(v, b)]
                    rows.append(v)
                cand = ProjSubspace.from_rows(field, n, rows)
                if cand.dim == k - 1:
                    planes[i] = cand
        return Configuration(field, n, k, tuple(planes))
    return generate(duplicates(n, k, d, seed), field).config


def sharpness_search(
    n: int,
    k: int,
    d: int,
    field: Field,
    seed: int = 0,
    iterations: int = 200,
    budget: int | None = DEFAULT_BUDGET,
    stop_at_bound: bool = True,
) -> SearchResult:
    """Randomized hill climb for an indecomposable SP configuration with
    the largest span.  Deterministic per seed.  Candidates whose span beats
    d+k-3 are kept as violations, never as results."""
    rng = SeededRng(seed)
    bound = theorem_bound(d, k)
    target = min(bound, n)
    best = SearchResult(None, -1, bound, None, None, 0)
    current = None
    for it in range(1, iterations + 1):
        cand = _propose(n, k, d, field, rng, current)
        score, cert, report = _evaluate(cand, budget)
        if score > bound:
            best.violations.append(cand)
            continue
        if score > best.span_dim:
            best = SearchResult(cand, score, bound, cert, report, it, best.violations)
            current = cand
            if stop_at_bound and score >= target:
                break
        elif current is None or rng.random() < 0.2:
            current = cand if score >= 0 else current
        best.iterations = it
    return best


# plane configurations and quadrics ---------------------------------------


@dataclass(frozen=True)
class PlaneCover:
    blocks: tuple[ProjSubspace, ...]
    total_dim: int
    bound: int

    @property
    def satisfied(self) -> bool:
        return self.total_dim <= self.bound

    def to_json(self) -> dict:
        return {
            "blocks": [b.to_json() for b in self.blocks],
            "total_dim": self.total_dim,
            "bound": self.bound,
            "satisfied": self.satisfied,
        }


def plane_configuration_cover(c: Configuration, report: PartitionReport) -> PlaneCover:
    """Spans of the partition blocks; their dimensions sum to at most
    d + m(k-3)."""
    _check_report(c, report)
    spans = tuple(span([c.planes[i] for i in b]) for b in report.blocks)
    return PlaneCover(spans, sum(s.dim for s in spans), c.d + report.m * (c.k - 3))


QUADRIC_MONOMIALS = [(i, j) for i in range(4) for j in range(i, 4)]


@dataclass(frozen=True)
class QuadricResult:
    exists: bool
    rank: int
    conditions: int
    frame: ProjSubspace  # the span whose basis gives the P^3 coordinates
    quadric: tuple[Raw, ...] | None = None

    def to_json(self) -> dict:
        f = self.frame.field
        out = {
            "exists": self.exists,
            "rank": self.rank,
            "conditions": self.conditions,
            "frame": self.frame.to_json(),
            "quadric": None,
        }
        if self.quadric is not None:
            out["quadric"] = [
                {"monomial": f"x{i}*x{j}", "coeff": f.format(c)} for (i, j), c in zip(QUADRIC_MONOMIALS, self.quadric)
            ]
        return out


def _frame_coordinates(frame: ProjSubspace, v) -> list:
    """Coordinates of a vector of ``frame`` in its RREF basis, padded to 4."""
    coords = [v[c] for c in frame.pivots]
    return coords + [frame.field.zero] * (4 - len(coords))


def quadric_through_lines(c: Configuration) -> QuadricResult:
    """Is there a nonzero quadratic form vanishing on every line?

    Lines are read in coordinates on their span (at most a P^3).  Each line
    imposes vanishing at three of its points, which forces the restricted
    binary quadratic to be zero.
    """
    if c.k != 2:
        raise WrongDimension("quadric test is for lines (k = 2)")
    frame = c.span()
    if frame.dim > 3:
        raise SpanTooBig(f"lines span a {frame.dim}-space, expected at most 3")
    f = c.field
    rows = []
    for line in c.planes:
        u, v = line.basis
        for pt in (u, v, tuple(f.add(a, b) for a, b in zip(u, v))):
            x = _frame_coordinates(frame, pt)
            rows.append(tuple(f.mul(x[i], x[j]) for i, j in QUADRIC_MONOMIALS))
    r = rank_of(f, rows, len(QUADRIC_MONOMIALS))
    kernel = nullspace(f, rows, len(QUADRIC_MONOMIALS))
    return QuadricResult(bool(kernel), r, len(rows), frame, kernel[0] if kernel else None)


def evaluate_quadric(field: Field, quadric: Sequence[Raw], x: Sequence[Raw]) -> Raw:
    total = field.zero
    for (i, j), c in zip(QUADRIC_MONOMIALS, quadric):
        total = field.add(total, field.mul(c, field.mul(x[i], x[j])))
    return total


# search for instances of the partition inequality ------------------------


def find_partition_inequality_instance(
    field: Field, n: int = 3, seed: int = 0, attempts: int = 200, budget: int | None = DEFAULT_BUDGET
):
    """Random unions of a pencil block with repeated members, looking for a
    partition meeting every hypothesis of the partition inequality.

    Returns ``(configuration, partition, epsilons, result)`` or None.
    """
    rng = SeededRng(seed)
    for _ in range(attempts):
        k = 2
        head = rng.randint(3, min(4, field.modulus + 1))
        base = generate(pencil(n, k, head, rng.getrandbits(32)), field).config
        extra = [base.planes[rng.randrange(head)] for _ in range(rng.randint(1, 2))]
        if rng.random() < 0.5:
            extra.append(random_subspace(field, n, k - 1, rng, bound=50))
        c = Configuration(field, n, k, base.planes + tuple(extra))
        oracle = SubsetOracle(c, Tester.BRUTE_FORCE, budget=budget)
        if not oracle.is_sp((1 << c.d) - 1):
            continue
        partition = [tuple(range(head)), tuple(range(head, c.d))]
        slack = len(partition[0]) + k - 3 - span([c.planes[i] for i in partition[0]]).dim
        for eps in range(max(slack, 0), -1, -1):
            result = verify_partition_inequality(c, partition, [eps], oracle=oracle)
            if result.hypotheses_met:
                return c, partition, [eps], result
    return None
