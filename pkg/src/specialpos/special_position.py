"""Deciding special position SP(n-k) for sequences of (k-1)-planes.

Two independent deciders:

* :func:`sp_bruteforce` scans every (n-k)-plane L of P^n(F_q) and records
  which planes of the configuration L misses.  SP fails exactly when some L
  misses a single plane.
* :func:`sp_tuple_witness` looks for points ``p_i`` on all planes but one
  whose span has dimension at most n-k and avoids the remaining plane, then
  grows that span to an (n-k)-plane still avoiding it.

Indices of planes are 0-based throughout.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BellBudgetExceeded,
    BudgetExceeded,
    ExtensionFailed,
    InputError,
    MismatchedReport,
    NotSpInput,
    RationalFieldUnsupported,
    ValidityRegimeViolated,
)
from .fields import Field, SeededRng
from .grassmannian import plucker
from .linalg import ProjSubspace, meets, random_point_of, rank_of, span
from .tables import DEFAULT_BUDGET, check_budget, dual_table, pairing, subspace_count, subspace_table

DEFAULT_TRIALS = 64
DEFAULT_MAX_D = 12


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"


class Method(str, enum.Enum):
    BRUTE_FORCE = "bruteforce"
    TUPLE_WITNESS = "tuple_witness"


class Tester(str, enum.Enum):
    AUTO = "auto"
    BRUTE_FORCE = "bruteforce"
    TUPLE_EXHAUSTIVE = "tuple_exhaustive"
    TUPLE_RANDOMIZED = "tuple_randomized"


@dataclass(frozen=True)
class Configuration:
    """Ordered sequence of d >= 1 planes of dimension k-1 in P^n."""

    field: Field
    n: int
    k: int
    planes: tuple[ProjSubspace, ...]

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise InputError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if not self.planes:
            raise InputError("a configuration needs at least one plane")
        for i, s in enumerate(self.planes):
            if s.field != self.field or s.n != self.n:
                raise InputError(f"plane {i} is not in P^{self.n} over {self.field!r}")
            if s.dim != self.k - 1:
                raise InputError(f"plane {i} has dim {s.dim}, expected {self.k - 1}")

    @classmethod
    def of(cls, planes: Sequence[ProjSubspace], k: int | None = None) -> Configuration:
        if not planes:
            raise InputError("a configuration needs at least one plane")
        first = planes[0]
        return cls(first.field, first.n, first.dim + 1 if k is None else k, tuple(planes))

    @property
    def d(self) -> int:
        return len(self.planes)

    def sub(self, indices: Sequence[int]) -> Configuration:
        return Configuration(self.field, self.n, self.k, tuple(self.planes[i] for i in indices))

    def span(self) -> ProjSubspace:
        return span(list(self.planes))

    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "n": self.n,
            "k": self.k,
            "planes": [s.to_json() for s in self.planes],
        }

    @classmethod
    def from_json(cls, obj: dict, field: Field | None = None) -> Configuration:
        try:
            f = field if field is not None else Field.from_json(obj["field"])
            n, k = obj["n"], obj["k"]
            planes = tuple(ProjSubspace.from_json(f, p) for p in obj["planes"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad configuration JSON: {exc}") from exc
        if any(p.n != n for p in planes):
            raise InputError("plane ambient dimension disagrees with configuration n")
        return cls(f, n, k, planes)


@dataclass(frozen=True)
class SpCertificate:
    verdict: Verdict
    method: Method
    j: int | None = None
    l_plane: ProjSubspace | None = None
    trials: int | None = None
    probabilistic: bool = False

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    def to_json(self) -> dict:
        out: dict = {"verdict": self.verdict.value, "method": self.method.value}
        if self.verdict is Verdict.FAILS:
            out["witness"] = {"j": self.j, "l_plane": self.l_plane.to_json()}
        if self.trials is not None:
            out["trials"] = self.trials
        if self.probabilistic:
            out["probabilistic"] = True
        return out

    @classmethod
    def from_json(cls, obj: dict, field: Field) -> SpCertificate:
        try:
            verdict = Verdict(obj["verdict"])
            method = Method(obj["method"])
            j = l_plane = None
            if verdict is Verdict.FAILS:
                j = obj["witness"]["j"]
                l_plane = ProjSubspace.from_json(field, obj["witness"]["l_plane"])
            return cls(verdict, method, j, l_plane, obj.get("trials"), bool(obj.get("probabilistic", False)))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad certificate JSON: {exc}") from exc


def reverify_witness(c: Configuration, j: int, l_plane: ProjSubspace) -> bool:
    """Check a failure witness with meets() alone."""
    if not 0 <= j < c.d or l_plane.field != c.field or l_plane.n != c.n:
        return False
    if l_plane.dim != c.n - c.k:
        return False
    for i, lam in enumerate(c.planes):
        if meets(l_plane, lam) != (i != j):
            return False
    return True


def reverify_facts(c: Configuration, j: int) -> list[dict]:
    """The primitive facts a third party checks for a failure at ``j``."""
    return [{"fact": "meets", "plane": i, "expected": i != j} for i in range(c.d)]


# brute force -------------------------------------------------------------


def _require_prime(c: Configuration) -> int:
    if not c.field.is_prime:
        raise RationalFieldUnsupported("exhaustive search needs a prime field")
    return c.field.modulus


def plane_plucker_array(c: Configuration) -> np.ndarray:
    return np.array([plucker(s, c.k).coords for s in c.planes], dtype=np.int64)


class MissTable:
    """Which planes each (n-k)-plane of P^n(F_q) misses.

    ``miss[i, t]`` is true when the i-th (n-k)-plane in enumeration order
    does not meet plane t.
    """

    def __init__(self, c: Configuration, budget: int | None = DEFAULT_BUDGET):
        q = _require_prime(c)
        self.config = c
        self.q = q
        self.dual = dual_table(q, c.n, c.n - c.k, budget)
        self.miss = pairing(self.dual, plane_plucker_array(c), q) != 0
        if c.d <= 62:
            weights = np.left_shift(np.int64(1), np.arange(c.d, dtype=np.int64))
            self.bits = self.miss.astype(np.int64) @ weights
            self.unique_bits = np.unique(self.bits)
        else:
            self.bits = self.unique_bits = None

    def l_plane(self, row: int) -> ProjSubspace:
        c = self.config
        basis = subspace_table(self.q, c.n, c.n - c.k, None)[row]
        return ProjSubspace(c.field, c.n, tuple(tuple(int(x) for x in r) for r in basis))

    def first_single_miss(self, mask: int | None = None) -> tuple[int, int] | None:
        """First (row, j) where L misses exactly one plane of the subset."""
        if mask is None:
            counts = self.miss.sum(axis=1)
            rows = np.flatnonzero(counts == 1)
            if rows.size == 0:
                return None
            row = int(rows[0])
            return row, int(np.flatnonzero(self.miss[row])[0])
        x = self.bits & mask
        rows = np.flatnonzero((x != 0) & ((x & (x - 1)) == 0))
        if rows.size == 0:
            return None
        row = int(rows[0])
        return row, int(self.bits[row] & mask).bit_length() - 1

    def subset_is_sp(self, mask: int) -> bool:
        x = self.unique_bits & mask
        return not bool(((x != 0) & ((x & (x - 1)) == 0)).any())

    def certificate(self, mask: int | None = None) -> SpCertificate:
        hit = self.first_single_miss(mask)
        if hit is None:
            return SpCertificate(Verdict.HOLDS, Method.BRUTE_FORCE)
        row, j = hit
        return SpCertificate(Verdict.FAILS, Method.BRUTE_FORCE, j, self.l_plane(row))


def sp_bruteforce(c: Configuration, budget: int | None = DEFAULT_BUDGET) -> SpCertificate:
    """Exact SP(n-k) verdict by scanning all (n-k)-planes over F_q.

    A failure reports the first (n-k)-plane, in enumeration order, meeting
    every plane but one, together with the index of that plane.
    """
    cert = MissTable(c, budget).certificate()
    if not cert.holds:
        assert reverify_witness(c, cert.j, cert.l_plane)
    return cert


# tuple witness -----------------------------------------------------------


def _avoids(f: Field, n: int, rows: Sequence, lam: ProjSubspace) -> bool:
    """Is span(rows) disjoint from ``lam``?"""
    r = rank_of(f, rows, n + 1)
    return rank_of(f, list(rows) + list(lam.basis), n + 1) == r + len(lam.basis)


def extend_avoiding(c: Configuration, j: int, points: Sequence) -> ProjSubspace:
    """Grow span(points) to an (n-k)-plane that still misses plane j.

    Greedy: append the first unit vector outside span(current, plane j)
    until the dimension reaches n-k.
    """
    f, n = c.field, c.n
    lam = c.planes[j]
    current = ProjSubspace.from_rows(f, n, points)
    target = n - c.k
    while current.dim < target:
        outer = span([current, lam])
        for i in range(n + 1):
            e = [f.zero] * (n + 1)
            e[i] = f.one
            if not outer.contains_vector(e):
                current = ProjSubspace.from_rows(f, n, list(current.basis) + [e])
                break
        else:
            raise ExtensionFailed(f"no extension of span avoiding plane {j}")
    return current


def in_tuple_regime(c: Configuration) -> bool:
    return c.d - 1 <= c.n - c.k + 1


def tuple_search_size(c: Configuration) -> int:
    q = _require_prime(c)
    pts = subspace_count(q, c.k - 1, 0)
    return c.d * pts ** (c.d - 1)


def sp_tuple_witness(
    c: Configuration,
    mode: Tester | str = Tester.TUPLE_EXHAUSTIVE,
    *,
    seed: int = 0,
    trials: int = DEFAULT_TRIALS,
    budget: int | None = DEFAULT_BUDGET,
) -> SpCertificate:
    """SP verdict from point tuples.

    SP fails at j iff there are points p_i on the planes i != j spanning a
    space of dimension <= n-k disjoint from plane j.  ``tuple_exhaustive``
    tries every tuple over F_q; ``tuple_randomized`` samples ``trials``
    tuples per j and is only valid when d-1 <= n-k+1 (the span condition
    is then automatic and a generic tuple decides).  A randomized "holds"
    is probabilistic.
    """
    mode = Tester(mode)
    f, n, k = c.field, c.n, c.k
    if mode is Tester.TUPLE_EXHAUSTIVE:
        _require_prime(c)
        check_budget("point tuples", tuple_search_size(c), budget)
        point_lists = [list(s.points()) for s in c.planes]
        for j in range(c.d):
            lam = c.planes[j]
            lists = point_lists[:j] + point_lists[j + 1 :]
            for tup in itertools.product(*lists):
                if rank_of(f, tup, n + 1) > n - k + 1:
                    continue
                if _avoids(f, n, tup, lam):
                    return _witness(c, j, tup)
        return SpCertificate(Verdict.HOLDS, Method.TUPLE_WITNESS)
    if mode is Tester.TUPLE_RANDOMIZED:
        if not in_tuple_regime(c):
            raise ValidityRegimeViolated(f"randomized tuple test needs d-1 <= n-k+1, got d={c.d}, n={n}, k={k}")
        rng = SeededRng(seed)
        for j in range(c.d):
            sub = rng.spawn(j)
            lam = c.planes[j]
            others = c.planes[:j] + c.planes[j + 1 :]
            for _ in range(trials):
                tup = [random_point_of(s, sub) for s in others]
                if _avoids(f, n, tup, lam):
                    return _witness(c, j, tup, trials=trials)
        return SpCertificate(Verdict.HOLDS, Method.TUPLE_WITNESS, trials=trials, probabilistic=True)
    raise InputError(f"not a tuple-witness mode: {mode.value}")


def _witness(c: Configuration, j: int, points, trials: int | None = None) -> SpCertificate:
    l_plane = extend_avoiding(c, j, points)
    if not reverify_witness(c, j, l_plane):
        raise AssertionError("tuple witness failed re-verification")
    return SpCertificate(Verdict.FAILS, Method.TUPLE_WITNESS, j, l_plane, trials)


def check_sp(
    c: Configuration,
    tester: Tester | str = Tester.AUTO,
    *,
    exact: bool = True,
    seed: int = 0,
    trials: int = DEFAULT_TRIALS,
    budget: int | None = DEFAULT_BUDGET,
) -> SpCertificate:
    """Decide SP with the chosen tester.

    ``auto`` looks for a cheap randomized witness first (when in regime)
    and falls through to an exact finite-field scan when the randomized
    answer is "holds" and ``exact`` is set.
    """
    tester = Tester(tester)
    if tester is Tester.BRUTE_FORCE:
        return sp_bruteforce(c, budget)
    if tester is not Tester.AUTO:
        return sp_tuple_witness(c, tester, seed=seed, trials=trials, budget=budget)
    if in_tuple_regime(c):
        cert = sp_tuple_witness(c, Tester.TUPLE_RANDOMIZED, seed=seed, trials=trials)
        if not cert.holds or not exact:
            return cert
        if not c.field.is_prime:
            return cert
    elif not c.field.is_prime:
        raise ValidityRegimeViolated("over Q only the randomized tuple test is available, and d-1 > n-k+1")
    if subspace_count(c.field.modulus, c.n, c.n - c.k) <= (budget or float("inf")):
        return sp_bruteforce(c, budget)
    return sp_tuple_witness(c, Tester.TUPLE_EXHAUSTIVE, budget=budget)


def reinterpret(c: Configuration, field: Field) -> Configuration:
    """Same integer coordinates read in another field (small-field checks)."""
    planes = []
    for s in c.planes:
        plane = ProjSubspace.from_rows(field, c.n, [[int(x) for x in r] for r in s.basis])
        if plane.dim != c.k - 1:
            raise InputError("plane degenerates in the new field")
        planes.append(plane)
    return Configuration(field, c.n, c.k, tuple(planes))


# decomposition -----------------------------------------------------------


def bell(d: int) -> int:
    row = [1]
    for _ in range(d):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def _members(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def _mask(indices) -> int:
    return sum(1 << i for i in indices)


class SubsetOracle:
    """Memoized SP verdicts on sub-sequences, keyed by index bitmask."""

    def __init__(self, c: Configuration, tester: Tester | str = Tester.BRUTE_FORCE, table: MissTable | None = None, **kw):
        self.config = c
        self.tester = Tester(tester)
        self.kw = kw
        self.table = table
        if table is None and self.tester in (Tester.BRUTE_FORCE, Tester.AUTO) and c.field.is_prime and c.d <= 62:
            try:
                self.table = MissTable(c, kw.get("budget", DEFAULT_BUDGET))
            except BudgetExceeded:
                if self.tester is Tester.BRUTE_FORCE:
                    raise
        self._cache: dict[int, bool] = {}
        self._certs: dict[int, SpCertificate] = {}

    def certificate(self, mask: int) -> SpCertificate:
        if mask not in self._certs:
            if self.table is not None:
                self._certs[mask] = self.table.certificate(mask)
                cert = self._certs[mask]
                if not cert.holds:
                    # witness indices are global; keep them relative to the subset
                    members = _members(mask)
                    self._certs[mask] = SpCertificate(cert.verdict, cert.method, members.index(cert.j), cert.l_plane)
            else:
                sub = self.config.sub(_members(mask))
                self._certs[mask] = check_sp(sub, self.tester, **self.kw)
            self._cache[mask] = self._certs[mask].holds
        return self._certs[mask]

    def is_sp(self, mask: int) -> bool:
        if mask not in self._cache:
            if self.table is not None:
                self._cache[mask] = mask & (mask - 1) != 0 and self.table.subset_is_sp(mask)
            else:
                self.certificate(mask)
        return self._cache[mask]

    def splits(self, mask: int):
        """Ways to cut ``mask`` into two SP parts (the part holding the
        lowest index first)."""
        low = mask & -mask
        rest = mask ^ low
        sub = rest
        while sub:
            part = sub | low
            other = mask ^ part
            if other and self.is_sp(part) and self.is_sp(other):
                yield part, other
            sub = (sub - 1) & rest

    def is_indecomposable_sp(self, mask: int) -> bool:
        return self.is_sp(mask) and next(self.splits(mask), None) is None


@dataclass(frozen=True)
class PartitionReport:
    """Minimal partition of an SP sequence into indecomposable SP blocks.

    ``m`` is the block count; an indecomposable sequence is its own single
    block with ``m = 1``.
    """

    d: int
    decomposable: bool
    blocks: tuple[tuple[int, ...], ...]
    certificates: tuple[SpCertificate, ...]

    @property
    def m(self) -> int:
        return len(self.blocks)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "decomposable": self.decomposable,
            "m": self.m,
            "minimal_partition": [list(b) for b in self.blocks],
            "per_block_certificates": [c.to_json() for c in self.certificates],
        }

    @classmethod
    def from_json(cls, obj: dict, field: Field) -> PartitionReport:
        try:
            return cls(
                obj["d"],
                bool(obj["decomposable"]),
                tuple(tuple(b) for b in obj["minimal_partition"]),
                tuple(SpCertificate.from_json(c, field) for c in obj["per_block_certificates"]),
            )
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad partition report JSON: {exc}") from exc


def _search_partition(oracle: SubsetOracle, full: int, m: int) -> list[int] | None:
    """Lexicographically first partition of ``full`` into exactly m
    indecomposable SP blocks, blocks ordered by lowest index."""

    def candidates(remaining: int):
        low = remaining & -remaining
        rest = remaining ^ low
        subs = []
        sub = rest
        while sub:
            subs.append(sub | low)
            sub = (sub - 1) & rest
        subs.sort(key=_members)
        return subs

    def dfs(remaining: int, slots: int) -> list[int] | None:
        if slots == 1:
            return [remaining] if oracle.is_indecomposable_sp(remaining) else None
        for block in candidates(remaining):
            rest = remaining ^ block
            if bin(rest).count("1") < 2 * (slots - 1):
                continue
            if not oracle.is_indecomposable_sp(block):
                continue
            tail = dfs(rest, slots - 1)
            if tail is not None:
                return [block] + tail
        return None

    return dfs(full, m)


def decompose(
    c: Configuration,
    tester: Tester | str = Tester.BRUTE_FORCE,
    *,
    max_d: int = DEFAULT_MAX_D,
    oracle: SubsetOracle | None = None,
    **kw,
) -> PartitionReport:
    """Partition an SP sequence into the fewest indecomposable SP blocks.

    Raises :class:`NotSpInput` when the whole sequence is not SP.  Blocks
    of size one are never SP, so every block has at least two members.
    """
    if c.d > max_d:
        raise BellBudgetExceeded(f"set partitions of {c.d} planes", bell(c.d), bell(max_d))
    oracle = oracle or SubsetOracle(c, tester, **kw)
    full = (1 << c.d) - 1
    whole = oracle.certificate(full)
    if not whole.holds:
        raise NotSpInput("configuration is not SP(n-k)")
    if next(oracle.splits(full), None) is None:
        return PartitionReport(c.d, False, (tuple(range(c.d)),), (whole,))
    for m in range(2, c.d // 2 + 1):
        blocks = _search_partition(oracle, full, m)
        if blocks is not None:
            return PartitionReport(
                c.d,
                True,
                tuple(_members(b) for b in blocks),
                tuple(oracle.certificate(b) for b in blocks),
            )
    raise AssertionError("decomposable sequence without a partition into indecomposable blocks")


# span bounds -------------------------------------------------------------


def _check_report(c: Configuration, report: PartitionReport) -> None:
    flat = sorted(i for b in report.blocks for i in b)
    if report.d != c.d or flat != list(range(c.d)):
        raise MismatchedReport("partition report does not match the configuration")


def theorem_bound(d: int, k: int, m: int = 1) -> int:
    """d + k - 3 for indecomposable sequences, plus (m-1)(k-2) for m blocks."""
    return d + k - 3 + (m - 1) * (k - 2)


@dataclass(frozen=True)
class SpanBound:
    span_dim: int
    bound: int
    satisfied: bool

    def to_json(self) -> dict:
        return {"span_dim": self.span_dim, "bound": self.bound, "satisfied": self.satisfied}


def span_bound_report(c: Configuration, report: PartitionReport) -> SpanBound:
    _check_report(c, report)
    dim = c.span().dim
    bound = theorem_bound(c.d, c.k, report.m)
    return SpanBound(dim, bound, dim <= bound)


@dataclass(frozen=True)
class PartitionInequality:
    lhs: int
    rhs: int | None
    satisfied: bool
    hypotheses_met: bool
    failed_hypotheses: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "satisfied": self.satisfied,
            "hypotheses_met": self.hypotheses_met,
            "failed_hypotheses": list(self.failed_hypotheses),
        }


def verify_partition_inequality(
    c: Configuration,
    partition: Sequence[Sequence[int]],
    epsilons: Sequence[int],
    tester: Tester | str = Tester.BRUTE_FORCE,
    oracle: SubsetOracle | None = None,
    **kw,
) -> PartitionInequality:
    """Span inequality for a partition D_1, ..., D_m (m >= 2).

    Hypotheses, for every block but the last: the block is SP, its
    complement is not SP, and ``dim S_j <= d_j + k - 3 - eps_j``; the whole
    sequence must be SP.  When they hold, checks
    ``dim span <= dim S_m + sum_j (d_j - eps_j) - m``.  Unmet hypotheses
    make the result vacuously satisfied.
    """
    m = len(partition)
    if m < 2 or len(epsilons) != m - 1 or any(e < 0 for e in epsilons):
        raise InputError("need m >= 2 blocks and m-1 nonnegative epsilons")
    flat = sorted(i for b in partition for i in b)
    if flat != list(range(c.d)):
        raise InputError("blocks must partition the plane indices")
    oracle = oracle or SubsetOracle(c, tester, **kw)
    full = (1 << c.d) - 1
    failed = []
    if not oracle.is_sp(full):
        failed.append("sequence not SP")
    spans = [span([c.planes[i] for i in b]) for b in partition]
    for j, (block, eps) in enumerate(zip(partition[:-1], epsilons)):
        mask = _mask(block)
        if not oracle.is_sp(mask):
            failed.append(f"(i) block {j} not SP")
        if oracle.is_sp(full ^ mask):
            failed.append(f"(ii) complement of block {j} is SP")
        if spans[j].dim > len(block) + c.k - 3 - eps:
            failed.append(f"(iii) block {j} span too large")
    lhs = c.span().dim
    rhs = spans[-1].dim + sum(len(b) - e for b, e in zip(partition[:-1], epsilons)) - m
    if failed:
        return PartitionInequality(lhs, rhs, True, False, tuple(failed))
    return PartitionInequality(lhs, rhs, lhs <= rhs, True)

