from __future__ import annotations

import pytest

from specialpos.errors import InputError
from specialpos.fields import Field, SeededRng
from specialpos.lab import concurrent_lines, duplicates, generate, pencil, survey_exhaustive, union
from specialpos.lemmas import (
    check_containment,
    check_dichotomy,
    check_intersection_bound,
    check_one_sided_projection,
    check_projection_equivalence,
    random_disjoint_subspace,
    run_lemma_suite,
)
from specialpos.linalg import ProjSubspace, meets
from specialpos.special_position import Configuration

GF3, GF5 = Field.gf(3), Field.gf(5)


def test_checks_refuse_non_sp_input():
    e = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    c = Configuration.of([ProjSubspace.from_rows(GF3, 3, [e[0], e[1]]), ProjSubspace.from_rows(GF3, 3, [e[2], e[3]])])
    with pytest.raises(InputError):
        check_containment(c)


def test_projection_equivalence_also_on_non_sp():
    e = [[1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0]]
    c = Configuration.of([ProjSubspace.from_rows(GF3, 4, [e[0]]), ProjSubspace.from_rows(GF3, 4, [e[1]])])
    out = check_projection_equivalence(c, SeededRng(0), centers=3)
    assert out.instances > 0 and out.ok


def test_random_disjoint_subspace():
    rng = SeededRng(2)
    s = ProjSubspace.from_rows(GF5, 4, [[1, 0, 0, 0, 0], [0, 1, 0, 0, 0]])
    for _ in range(20):
        t = random_disjoint_subspace(s, 1, rng)
        assert t.dim == 1 and not meets(s, t)
    with pytest.raises(InputError):
        random_disjoint_subspace(s, 3, rng)


@pytest.mark.parametrize(
    "spec",
    [
        concurrent_lines(3, 3, 1),
        concurrent_lines(4, 4, 2),
        pencil(4, 3, 3, 3),
        union(concurrent_lines(3, 3, 4), duplicates(3, 2, 2, 5)),
        union(duplicates(4, 2, 2, 6), duplicates(4, 2, 3, 7)),
    ],
    ids=lambda s: s.kind,
)
def test_lemma_suite_on_generated(spec):
    c = generate(spec, GF3).config
    results = run_lemma_suite(c, SeededRng(1), centers=2, max_points=6)
    for name, res in results.items():
        assert res.ok, (name, res.failures)
    assert results["containment"].instances == c.d


def test_lemma_suite_on_survey_records():
    res = survey_exhaustive(2, 3, 2, 4)
    counts = {}
    for rec in res.records[::25]:
        c = res.planes(rec)
        for name, out in run_lemma_suite(c, SeededRng(rec.indices[0]), max_points=4).items():
            assert out.ok, (name, rec, out.failures)
            counts[name] = counts.get(name, 0) + out.instances
    assert all(v > 0 for v in counts.values())


def test_intersection_bound_instance():
    c = generate(union(concurrent_lines(3, 3, 4), duplicates(3, 2, 2, 5)), GF3).config
    out = check_intersection_bound(c)
    assert out.instances > 0 and out.ok


def test_dichotomy_and_one_sided_have_instances():
    c = generate(concurrent_lines(4, 4, 2), GF3).config
    assert check_dichotomy(c).instances > 0
    assert check_one_sided_projection(c, SeededRng(3)).instances > 0
