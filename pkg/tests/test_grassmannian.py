from __future__ import annotations

import itertools

import numpy as np
import pytest

from oracles import meets_by_points, point_set
from specialpos.errors import BudgetExceeded, DimensionMismatch, InputError, WrongDimension
from specialpos.fields import Field, SeededRng
from specialpos.grassmannian import (
    GrassmannPointSet,
    PluckerPoint,
    cayley_bacharach_test,
    check_plucker_relations,
    enumerate_subspaces,
    evaluate_form,
    plucker,
    schubert_sigma1_contains,
)
from specialpos.linalg import ProjSubspace, meets, random_subspace
from specialpos.tables import (
    batched_det_mod,
    dual_table,
    gaussian_binomial,
    meet_matrix,
    plucker_table,
    subspace_count,
    subspace_table,
)

GF2, GF3, GF5, GF7 = (Field.gf(p) for p in (2, 3, 5, 7))


def sub(f, n, *rows):
    return ProjSubspace.from_rows(f, n, rows)


# Plücker ------------------------------------------------------------------------


def test_plucker_examples():
    assert plucker(sub(GF7, 3, [1, 0, 0, 0], [0, 1, 0, 0]), 2).coords == (1, 0, 0, 0, 0, 0)
    # span(e0 + e3, e1): p01 = 1, p13 = -1
    p = plucker(sub(Field.rational(), 3, [1, 0, 0, 1], [0, 1, 0, 0]), 2)
    assert p.coords == (1, 0, 0, 0, -1, 0)
    pt = plucker(sub(GF7, 3, [0, 2, 4, 6]), 1)
    assert pt.coords == (0, 1, 2, 3)
    with pytest.raises(WrongDimension):
        plucker(sub(GF7, 3, [1, 0, 0, 0]), 2)


def test_plucker_relations():
    rng = SeededRng(1)
    for _ in range(200):
        n = rng.randrange(3, 6)
        k = rng.randrange(1, n + 1)
        f = rng.choice([GF5, GF7, Field.rational()])
        assert check_plucker_relations(plucker(random_subspace(f, n, k - 1, rng, bound=9), k))
    assert not check_plucker_relations(PluckerPoint(Field.rational(), 2, 3, (1, 0, 0, 0, 0, 1)))
    for i in range(6):
        e = [0] * 6
        e[i] = 1
        assert check_plucker_relations(PluckerPoint(GF5, 2, 3, tuple(e)))


def test_plucker_point_validation_and_json():
    with pytest.raises(InputError):
        PluckerPoint(GF5, 2, 3, (0,) * 6)
    with pytest.raises(InputError):
        PluckerPoint(GF5, 2, 3, (1, 0))
    p = PluckerPoint.normalized(GF5, 2, 3, [0, 2, 0, 0, 0, 4])
    assert p.coords == (0, 1, 0, 0, 0, 2)
    assert PluckerPoint.from_json(GF5, p.to_json()) == p


@pytest.mark.parametrize("n", [2, 3, 4])
def test_plucker_injective_over_gf2(n):
    for k in range(1, n + 1):
        seen = {}
        for s in enumerate_subspaces(GF2, n, k - 1):
            key = plucker(s, k).coords
            assert key not in seen
            seen[key] = s
        assert len(seen) == subspace_count(2, n, k - 1)


def test_plucker_table_matches_scalar_path():
    table = subspace_table(3, 3, 1)
    pl = plucker_table(3, 3, 1)
    for row, basis in zip(pl[::7], table[::7]):
        s = ProjSubspace(GF3, 3, tuple(tuple(int(x) for x in r) for r in basis))
        scalar = plucker(s, 2).coords
        lead = next(int(x) for x in row if x)
        inv = pow(lead, -1, 3)
        assert tuple(int(x) * inv % 3 for x in row) == scalar


# Schubert incidence ----------------------------------------------------------------


def test_sigma1_examples():
    lam = sub(GF7, 3, [1, 0, 0, 0], [0, 1, 0, 0])
    l_through = sub(GF7, 3, [1, 1, 0, 0], [0, 0, 1, 0])
    assert schubert_sigma1_contains(l_through, lam)
    comp = sub(GF7, 3, [0, 0, 1, 0], [0, 0, 0, 1])
    assert not schubert_sigma1_contains(comp, lam)
    with pytest.raises(DimensionMismatch):
        schubert_sigma1_contains(sub(GF7, 3, [1, 0, 0, 0]), lam)


def test_sigma1_agrees_with_meets():
    rng = SeededRng(3)
    for _ in range(1000):
        l = random_subspace(GF7, 4, 2, rng)
        lam = random_subspace(GF7, 4, 1, rng)
        assert schubert_sigma1_contains(l, lam) == meets(l, lam) == schubert_sigma1_contains(lam, l)


def test_dual_pairing_matches_point_set_incidence():
    q, n = 2, 3
    lines = subspace_table(q, n, 1)
    inc = meet_matrix(dual_table(q, n, 1), plucker_table(q, n, 1), q)
    subs = [ProjSubspace(GF2, n, tuple(tuple(int(x) for x in r) for r in b)) for b in lines]
    for i, j in itertools.product(range(len(subs)), repeat=2):
        assert inc[i, j] == meets_by_points(subs[i], subs[j])


def test_dual_pairing_p4():
    q, n = 3, 4
    pts = subspace_table(q, n, 0)
    inc = meet_matrix(dual_table(q, n, 3), plucker_table(q, n, 0), q)
    hyper = [ProjSubspace(GF3, n, tuple(tuple(int(x) for x in r) for r in b)) for b in subspace_table(q, n, 3)]
    for i in range(0, len(hyper), 5):
        for j in range(0, len(pts), 3):
            assert inc[i, j] == hyper[i].contains_vector(tuple(int(x) for x in pts[j][0]))


def test_batched_det_matches_sympy():
    from sympy import Matrix

    rng = np.random.default_rng(0)
    a = rng.integers(0, 11, size=(200, 4, 4))
    got = batched_det_mod(a, 11)
    for m, d in zip(a, got):
        assert int(Matrix(m.tolist()).det()) % 11 == d


# enumeration -----------------------------------------------------------------------


def test_enumeration_examples():
    assert sum(1 for _ in enumerate_subspaces(GF2, 3, 1)) == 35
    assert sum(1 for _ in enumerate_subspaces(GF3, 2, 0)) == 13
    whole = list(enumerate_subspaces(GF5, 3, 3))
    assert len(whole) == 1 and whole[0] == ProjSubspace.whole(GF5, 3)
    with pytest.raises(InputError):
        enumerate_subspaces(Field.rational(), 3, 1)


def test_enumeration_budget_checked_before_iteration():
    with pytest.raises(BudgetExceeded) as info:
        enumerate_subspaces(GF7, 5, 2, budget=1000)
    assert info.value.count == subspace_count(7, 5, 2)


def test_enumeration_counts_and_no_duplicates():
    for q in (2, 3, 5):
        for n in range(1, 6):
            for m in range(0, n + 1):
                count = subspace_count(q, n, m)
                if count > 10**5:
                    continue
                table = subspace_table(q, n, m, budget=None)
                assert table.shape[0] == count
                assert len({t.tobytes() for t in table}) == count


def test_gaussian_binomial_against_point_count():
    for q in (2, 3, 5, 7):
        for n in range(1, 5):
            assert gaussian_binomial(n + 1, 1, q) == (q ** (n + 1) - 1) // (q - 1)
    assert gaussian_binomial(4, 2, 2) == 35
    assert gaussian_binomial(5, 2, 5) == 20306


def test_enumeration_order_is_pivots_then_free_entries():
    subs = list(enumerate_subspaces(GF2, 2, 0))
    assert [s.basis[0] for s in subs[:4]] == [(1, 0, 0), (1, 0, 1), (1, 1, 0), (1, 1, 1)]
    table = subspace_table(2, 2, 0)
    assert [tuple(r[0]) for r in table[:4]] == [s.basis[0] for s in subs[:4]]


def test_lines_have_q_plus_one_points():
    for s in enumerate_subspaces(GF3, 3, 1):
        assert len(point_set(s)) == 4 == len(list(s.points()))


# Cayley-Bacharach -----------------------------------------------------------------------


def _points(f, n, k, planes):
    return GrassmannPointSet.of_planes([sub(f, n, *rows) for rows in planes], k)


def test_cb_examples():
    same = _points(GF5, 3, 2, [[[1, 0, 0, 0], [0, 1, 0, 0]]] * 2)
    assert cayley_bacharach_test(same, 1).holds
    two = _points(GF5, 3, 2, [[[1, 0, 0, 0], [0, 1, 0, 0]], [[0, 0, 1, 0], [0, 0, 0, 1]]])
    rep = cayley_bacharach_test(two, 1)
    assert not rep.holds and rep.failing_index == 0
    coords = [p.coords for p in two.points]
    assert evaluate_form(GF5, rep.separating_form, coords[0]) != 0
    assert evaluate_form(GF5, rep.separating_form, coords[1]) == 0
    assert rep.to_json()["separating_form"][0]["exponents"]


def test_cb_budget():
    gamma = _points(GF5, 4, 2, [[[1, 0, 0, 0, 0], [0, 1, 0, 0, 0]]])
    with pytest.raises(BudgetExceeded):
        cayley_bacharach_test(gamma, 4, budget=100)


def test_cb_r_implies_cb_s():
    rng = SeededRng(9)
    checked = 0
    for trial in range(60):
        d = rng.randrange(2, 6)
        base = [random_subspace(GF5, 3, 1, rng) for _ in range(rng.randrange(1, 3))]
        planes = [rng.choice(base) for _ in range(d)]
        gamma = GrassmannPointSet.of_planes(planes, 2)
        for r in (3, 2):
            if cayley_bacharach_test(gamma, r).holds:
                for s in range(1, r):
                    assert cayley_bacharach_test(gamma, s).holds
                checked += 1
    assert checked > 0


def test_cb_for_points_is_hyperplane_condition():
    # k = 1: four points of a line in P^2 satisfy CB(1), three general points do not
    f = GF7
    on_line = GrassmannPointSet.of_planes([sub(f, 2, [1, t, 0]) for t in range(3)] + [sub(f, 2, [0, 1, 0])], 1)
    assert cayley_bacharach_test(on_line, 1).holds
    general = GrassmannPointSet.of_planes([sub(f, 2, [1, 0, 0]), sub(f, 2, [0, 1, 0]), sub(f, 2, [0, 0, 1])], 1)
    assert not cayley_bacharach_test(general, 1).holds
