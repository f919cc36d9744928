from __future__ import annotations

import itertools

import pytest

from oracles import sp_by_points
from specialpos.errors import (
    BellBudgetExceeded,
    BudgetExceeded,
    InputError,
    MismatchedReport,
    NotSpInput,
    RationalFieldUnsupported,
    ValidityRegimeViolated,
)
from specialpos.fields import Field, SeededRng
from specialpos.grassmannian import enumerate_subspaces
from specialpos.linalg import ProjSubspace, intersect, meets, random_subspace
from specialpos.special_position import (
    Configuration,
    Method,
    PartitionReport,
    SpCertificate,
    Tester as SpTester,
    Verdict,
    check_sp,
    decompose,
    extend_avoiding,
    reinterpret,
    reverify_witness,
    sp_bruteforce,
    sp_tuple_witness,
    span_bound_report,
    theorem_bound,
    verify_partition_inequality,
)

GF2, GF3, GF5, Q = Field.gf(2), Field.gf(3), Field.gf(5), Field.rational()


def sub(f, n, *rows):
    return ProjSubspace.from_rows(f, n, rows)


def cfg(f, n, *planes):
    return Configuration.of([sub(f, n, *rows) for rows in planes])


E = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
CONCURRENT = [[E[0], E[1]], [E[0], E[2]], [E[0], [0, 1, 1, 0]]]
TRIANGLE = [[E[0], E[1]], [E[1], E[2]], [E[0], E[2]]]


def test_configuration_validation():
    with pytest.raises(InputError):
        Configuration(GF5, 3, 2, ())
    with pytest.raises(InputError):
        Configuration(GF5, 3, 2, (sub(GF5, 3, E[0]),))
    with pytest.raises(InputError):
        Configuration(GF5, 3, 5, (sub(GF5, 3, *E),))
    c = cfg(GF5, 3, *CONCURRENT)
    assert Configuration.from_json(c.to_json()) == c
    assert c.d == 3 and c.k == 2


def test_bruteforce_examples():
    same = cfg(GF2, 3, [E[0], E[1]], [E[0], E[1]])
    assert sp_bruteforce(same).holds
    distinct = cfg(GF2, 3, [E[0], E[1]], [E[2], E[3]])
    cert = sp_bruteforce(distinct)
    assert cert.verdict is Verdict.FAILS and cert.method is Method.BRUTE_FORCE
    assert reverify_witness(distinct, cert.j, cert.l_plane)
    assert sp_bruteforce(cfg(GF3, 3, *CONCURRENT)).holds
    tri = cfg(GF3, 3, *TRIANGLE)
    cert = sp_bruteforce(tri)
    assert not cert.holds and reverify_witness(tri, cert.j, cert.l_plane)
    # the witness line passes through the meet of the two other lines
    others = [p for i, p in enumerate(tri.planes) if i != cert.j]
    corner = intersect(*others)
    assert corner.dim == 0 and cert.l_plane.contains(corner)


def test_bruteforce_witness_is_first_in_enumeration_order():
    tri = cfg(GF3, 3, *TRIANGLE)
    cert = sp_bruteforce(tri)
    for l in enumerate_subspaces(GF3, 3, 1):
        missed = [i for i, p in enumerate(tri.planes) if not meets(l, p)]
        if len(missed) == 1:
            assert (l, missed[0]) == (cert.l_plane, cert.j)
            break


def test_single_plane_never_sp():
    assert not sp_bruteforce(cfg(GF3, 3, [E[0], E[1]])).holds
    assert not sp_tuple_witness(cfg(GF3, 3, [E[0], E[1]])).holds


def test_bruteforce_matches_point_set_oracle():
    lines = list(enumerate_subspaces(GF2, 3, 1))
    rng = SeededRng(4)
    for _ in range(150):
        d = rng.randrange(2, 5)
        pool = rng.sample(lines, rng.randrange(1, 4))
        c = Configuration.of([rng.choice(pool) for _ in range(d)])
        assert sp_bruteforce(c).holds == sp_by_points(c, lines)
    points = list(enumerate_subspaces(GF2, 2, 0))
    hyper = list(enumerate_subspaces(GF2, 2, 1))
    for triple in itertools.combinations_with_replacement(points, 3):
        c = Configuration.of(list(triple))
        assert sp_bruteforce(c).holds == sp_by_points(c, hyper)


def test_bruteforce_errors():
    with pytest.raises(RationalFieldUnsupported):
        sp_bruteforce(cfg(Q, 3, *CONCURRENT))
    with pytest.raises(BudgetExceeded):
        sp_bruteforce(cfg(GF5, 3, *CONCURRENT), budget=10)


# tuple witness -------------------------------------------------------------------


def test_tuple_witness_examples():
    distinct = cfg(GF5, 3, [E[0], E[1]], [E[2], E[3]])
    cert = sp_tuple_witness(distinct)
    assert not cert.holds and cert.method is Method.TUPLE_WITNESS
    assert reverify_witness(distinct, cert.j, cert.l_plane)
    same = cfg(GF5, 3, [E[0], E[1]], [E[0], E[1]])
    assert sp_tuple_witness(same).holds
    rnd = sp_tuple_witness(same, SpTester.TUPLE_RANDOMIZED, seed=1, trials=10)
    assert rnd.holds and rnd.probabilistic and rnd.trials == 10


def test_randomized_mode_refuses_outside_regime():
    # d - 1 = 3 > n - k + 1 = 2
    c = cfg(GF5, 3, *(CONCURRENT + [[E[0], [0, 1, 2, 0]]]))
    with pytest.raises(ValidityRegimeViolated):
        sp_tuple_witness(c, SpTester.TUPLE_RANDOMIZED)
    with pytest.raises(ValidityRegimeViolated):
        check_sp(cfg(Q, 3, *(CONCURRENT + [[E[0], [0, 1, 2, 0]]])))


def test_rational_configurations_in_regime():
    distinct = cfg(Q, 3, [E[0], E[1]], [E[2], E[3]])
    cert = check_sp(distinct)
    assert not cert.holds and reverify_witness(distinct, cert.j, cert.l_plane)
    cert = check_sp(cfg(Q, 3, *CONCURRENT))
    assert cert.holds and cert.probabilistic


def test_extension_avoids_plane():
    rng = SeededRng(8)
    for _ in range(100):
        n = rng.randrange(3, 6)
        k = rng.randrange(1, n)
        lam = random_subspace(GF2, n, k - 1, rng)
        c = Configuration.of([lam, lam])
        v = None
        while v is None or lam.contains_vector(v):
            v = random_subspace(GF2, n, 0, rng).basis[0]
        l = extend_avoiding(c, 0, [v])
        assert l.dim == n - k and not meets(l, lam)


def test_tuple_exhaustive_agrees_with_bruteforce():
    rng = SeededRng(12)
    disagreements = 0
    for i in range(200):
        planes = [random_subspace(GF5, 4, 1, rng, bound=5) for _ in range(3)]
        if i % 3 == 0:
            # force concurrency in a common plane so that both verdicts occur
            host = random_subspace(GF5, 4, 2, rng)
            apex = host.basis[0]
            planes = [ProjSubspace.from_rows(GF5, 4, [apex, row]) for row in host.basis[1:]]
            planes.append(ProjSubspace.from_rows(GF5, 4, [apex, [(a + b) % 5 for a, b in zip(*host.basis[1:])]]))
        c = Configuration.of(planes)
        a = sp_bruteforce(c)
        b = sp_tuple_witness(c, SpTester.TUPLE_EXHAUSTIVE)
        disagreements += a.holds != b.holds
        for cert in (a, b):
            if not cert.holds:
                assert reverify_witness(c, cert.j, cert.l_plane)
    assert disagreements == 0


def test_check_sp_pipeline():
    c = cfg(GF3, 3, *TRIANGLE)
    cert = check_sp(c)
    assert not cert.holds and cert.method is Method.TUPLE_WITNESS
    cert = check_sp(cfg(GF3, 3, *CONCURRENT))
    assert cert.holds and cert.method is Method.BRUTE_FORCE
    assert check_sp(cfg(GF3, 3, *CONCURRENT), exact=False).probabilistic


def test_certificate_json_round_trip():
    c = cfg(GF3, 3, *TRIANGLE)
    cert = sp_bruteforce(c)
    assert SpCertificate.from_json(cert.to_json(), GF3) == cert
    assert cert.to_json()["witness"]["j"] == cert.j


def test_union_of_sp_configurations_is_sp():
    rng = SeededRng(21)
    for _ in range(40):
        n = rng.randrange(3, 5)
        k = rng.randrange(1, n)
        a = random_subspace(GF3, n, k - 1, rng)
        b = random_subspace(GF3, n, k - 1, rng)
        first = Configuration.of([a] * rng.randrange(2, 4), k)
        second = Configuration.of([b] * 2, k)
        assert sp_bruteforce(first).holds and sp_bruteforce(second).holds
        assert sp_bruteforce(Configuration.of(first.planes + second.planes, k)).holds
    conc = cfg(GF3, 3, *CONCURRENT)
    dup = cfg(GF3, 3, [E[2], E[3]], [E[2], E[3]])
    assert sp_bruteforce(Configuration.of(conc.planes + dup.planes)).holds


def test_two_planes_sp_iff_equal():
    for a, b in itertools.product(list(enumerate_subspaces(GF2, 3, 1))[:12], repeat=2):
        assert sp_bruteforce(Configuration.of([a, b])).holds == (a == b)


def test_reinterpret():
    c = cfg(Field.gf(101), 3, *CONCURRENT)
    small = reinterpret(c, GF3)
    assert small.field == GF3 and sp_bruteforce(small).holds


# decomposition -------------------------------------------------------------------


def test_decompose_examples():
    pairs = cfg(GF3, 3, [E[0], E[1]], [E[0], E[1]], [E[2], E[3]], [E[2], E[3]])
    rep = decompose(pairs)
    assert rep.decomposable and rep.m == 2 and rep.blocks == ((0, 1), (2, 3))
    assert all(c.holds for c in rep.certificates)
    conc = decompose(cfg(GF3, 3, *CONCURRENT))
    assert not conc.decomposable and conc.m == 1 and conc.blocks == ((0, 1, 2),)
    two = decompose(cfg(GF3, 3, [E[0], E[1]], [E[0], E[1]]))
    assert not two.decomposable and two.m == 1


def test_decompose_interleaved_pairs():
    c = cfg(GF3, 3, [E[0], E[1]], [E[2], E[3]], [E[0], E[1]], [E[2], E[3]])
    assert decompose(c).blocks == ((0, 2), (1, 3))


def test_decompose_uses_indecomposable_blocks():
    # three distinct generic lines, each twice: the minimal count of
    # indecomposable blocks is 3
    lines = [[E[0], E[1]], [E[2], E[3]], [[1, 0, 1, 0], [0, 1, 0, 1]]]
    c = cfg(GF3, 3, *(lines + lines))
    rep = decompose(c)
    assert rep.m == 3 and rep.blocks == ((0, 3), (1, 4), (2, 5))
    assert span_bound_report(c, rep).satisfied


def test_decompose_errors():
    with pytest.raises(NotSpInput):
        decompose(cfg(GF3, 3, *TRIANGLE))
    seven = Configuration.of([sub(GF2, 3, E[0], E[1])] * 7)
    with pytest.raises(BellBudgetExceeded):
        decompose(seven, max_d=6)
    # copies of one plane: indecomposable blocks have 2 or 3 members
    rep = decompose(seven)
    assert rep.m == 3 and sorted(len(b) for b in rep.blocks) == [2, 2, 3]


def test_decompose_with_tuple_tester_matches():
    pairs = cfg(GF5, 3, [E[0], E[1]], [E[0], E[1]], [E[2], E[3]], [E[2], E[3]])
    assert decompose(pairs, SpTester.TUPLE_EXHAUSTIVE).blocks == decompose(pairs).blocks


def test_partition_report_json():
    rep = decompose(cfg(GF3, 3, [E[0], E[1]], [E[0], E[1]], [E[2], E[3]], [E[2], E[3]]))
    assert PartitionReport.from_json(rep.to_json(), GF3) == rep
    assert rep.to_json()["minimal_partition"] == [[0, 1], [2, 3]]


# span bounds -----------------------------------------------------------------------


def test_span_bound_examples():
    conc = cfg(GF3, 3, *CONCURRENT)
    b = span_bound_report(conc, decompose(conc))
    assert (b.span_dim, b.bound, b.satisfied) == (2, 2, True)
    plane = [[1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0]]
    dup = cfg(GF3, 4, plane, plane)
    b = span_bound_report(dup, decompose(dup))
    assert (b.span_dim, b.bound, b.satisfied) == (2, 2, True)
    pairs = cfg(GF3, 3, [E[0], E[1]], [E[0], E[1]], [E[2], E[3]], [E[2], E[3]])
    b = span_bound_report(pairs, decompose(pairs))
    assert (b.span_dim, b.bound, b.satisfied) == (3, 3, True)
    with pytest.raises(MismatchedReport):
        span_bound_report(conc, decompose(pairs))
    assert theorem_bound(4, 3, 2) == 4 + 3 - 3 + 1


def test_partition_inequality_examples():
    pairs = cfg(GF3, 3, [E[0], E[1]], [E[0], E[1]], [E[2], E[3]], [E[2], E[3]])
    res = verify_partition_inequality(pairs, [(0, 1), (2, 3)], [0])
    assert not res.hypotheses_met and res.satisfied
    assert any("(ii)" in h for h in res.failed_hypotheses)
    tri = cfg(GF3, 3, *TRIANGLE)
    res = verify_partition_inequality(tri, [(0, 1), (2,)], [0])
    assert not res.hypotheses_met and any("(i)" in h for h in res.failed_hypotheses)
    with pytest.raises(InputError):
        verify_partition_inequality(pairs, [(0, 1, 2, 3)], [])


def test_partition_inequality_on_concurrent_head():
    # head: three concurrent coplanar lines (SP, span 2 = 3 + 2 - 3);
    # tail: a copy of the first line, whose complement is a lone line
    conf = cfg(GF3, 3, *(CONCURRENT + [CONCURRENT[0]]))
    res = verify_partition_inequality(conf, [(0, 1, 2), (3,)], [0])
    assert res.hypotheses_met and (res.lhs, res.rhs, res.satisfied) == (2, 2, True)
    # tail: the first line plus a doubled disjoint line (not SP on its own)
    conf = cfg(GF3, 3, *(CONCURRENT + [CONCURRENT[0], [E[2], E[3]], [E[2], E[3]]]))
    res = verify_partition_inequality(conf, [(0, 1, 2), (3, 4, 5)], [0])
    assert res.hypotheses_met and (res.lhs, res.rhs, res.satisfied) == (3, 4, True)
    # asking for slack the head does not have breaks (iii)
    res = verify_partition_inequality(conf, [(0, 1, 2), (3, 4, 5)], [1])
    assert not res.hypotheses_met and any("(iii)" in h for h in res.failed_hypotheses)
