"""Monoidal complex assembly, grading, seminormalization, presentations.

Presentation expectations below were frozen from hand derivations: the
variable order is the lex sort of the union of maximal-cone generators, and
each expected generator was checked by evaluating both sides in the monoid.
"""

import itertools

import pytest
from conftest import (
    FIX_A_GENS,
    FIX_B_GENS,
    FIX_C_GENS,
    fix_a,
    fix_b,
    fix_c,
    octant_boundary,
    stanley_r1,
)

from toricface.moncomplex import (
    ComplexError,
    build_complex,
    graded_dim,
    presentation,
    restrict,
    seminormalize_complex,
)
from toricface.monoid import monoid_member
from toricface.polyhedral import cone_build, fan_build, skeleton_fan


def box(dim, radius):
    rng = range(-radius, radius + 1)
    return itertools.product(*[rng] * dim)


# ---------------------------------------------------------------------------
# assembly and validation

def test_fixture_flags():
    a, b, c = fix_a(), fix_b(), fix_c()
    assert (a.seminormal, a.normal_monoids) == (True, True)
    assert (b.seminormal, b.normal_monoids) == (False, False)
    assert (c.seminormal, c.normal_monoids) == (True, False)


def test_stanley_complexes_are_normal():
    for mcc in (stanley_r1(), octant_boundary()):
        assert mcc.normal_monoids and mcc.seminormal
        for key, m in mcc.monoids.items():
            cone = mcc.fan.by_key(key)
            assert m.cone.key == cone.key


def test_derived_face_monoids():
    a = fix_a()
    assert a.monoid_at(((1, 0, 0),)).generators == ((2, 0, 0),)
    assert a.monoid_at(((0, 1, 0),)).generators == ((0, 2, 0),)
    c = fix_c()
    assert c.monoid_at(((0, 1),)).generators == ((0, 2),)
    b = fix_b()
    assert b.monoid_at(((1, 1),)).generators == ((3, 3),)
    assert b.monoid_at(()).generators == ()


def test_face_restriction_pointwise():
    # M_D = M_C  intersect  D, checked on a box for every face pair
    for build in (fix_a, fix_b, fix_c):
        mcc = build()
        radius = 4 if mcc.ambient_dim == 2 else 3
        pts = list(box(mcc.ambient_dim, radius))
        for c in mcc.fan.cones:
            Mc = mcc.monoids[c.key]
            for d in mcc.fan.faces_of(c):
                if d.key == c.key:
                    continue
                Md = mcc.monoids[d.key]
                for x in pts:
                    if not d.contains(x):
                        continue
                    inc = monoid_member(Mc, x) is not None
                    ind = monoid_member(Md, x) is not None
                    assert inc == ind, (c.key, d.key, x)


def test_build_requires_generators():
    fan = fan_build([cone_build([(1, 0), (0, 1)])])
    with pytest.raises(ComplexError):
        build_complex(fan)


def test_build_rejects_wrong_keys():
    fan = fan_build([cone_build([(1, 0), (0, 1)])])
    with pytest.raises(ComplexError, match="keyed by the maximal cones"):
        build_complex(fan, {((1, 0),): [(1, 0)]})


def test_build_rejects_non_spanning_generators():
    fan = fan_build([cone_build([(1, 0, 0), (0, 1, 0), (0, 0, 1)])])
    key = fan.maximal[0]
    with pytest.raises(ComplexError, match="span"):
        build_complex(fan, {key: [(1, 0, 0), (0, 1, 0)]})


def test_build_rejects_inconsistent_shared_face():
    c1 = cone_build([(1, 0), (0, 1)])
    c2 = cone_build([(0, 1), (-1, 0)])
    fan = fan_build([c1, c2])
    with pytest.raises(ComplexError):
        build_complex(fan, {
            c1.key: [(1, 0), (0, 1)],
            c2.key: [(0, 2), (-1, 0)],
        })


# ---------------------------------------------------------------------------
# restriction

def test_restrict_full_fan_is_identity():
    mcc = fix_b()
    same = restrict(mcc, mcc.fan)
    assert set(same.monoids) == set(mcc.monoids)
    for k in mcc.monoids:
        assert same.monoids[k] is mcc.monoids[k]
    assert (same.seminormal, same.normal_monoids) == \
        (mcc.seminormal, mcc.normal_monoids)


def test_restrict_skeleton():
    mcc = fix_b()
    sub = restrict(mcc, skeleton_fan(mcc.fan, 1))
    assert sorted(sub.monoids) == [
        (), ((0, 1),), ((1, 0),), ((1, 1),),
    ]
    # dropping the bad top cone leaves only normal ray monoids
    assert sub.seminormal and sub.normal_monoids
    pres = presentation(sub, 4)
    assert pres.variables == ((0, 1), (3, 0), (3, 3))
    assert pres.monomial_gens == ((0, 1, 1), (1, 0, 1), (1, 1, 0))
    assert pres.binomial_gens == ()


def test_restrict_rejects_foreign_cone():
    mcc = fix_c()
    other = fan_build([cone_build([(1, 2), (2, 1)])])
    with pytest.raises(ComplexError):
        restrict(mcc, other)


# ---------------------------------------------------------------------------
# graded dimension

def test_graded_dim_origin_carried_everywhere():
    for build in (fix_a, fix_b, fix_c, stanley_r1, octant_boundary):
        mcc = build()
        sp = graded_dim(mcc, (0,) * mcc.ambient_dim)
        assert sp.value == 1
        assert len(sp.carrier) == len(mcc.fan.cones)


def test_graded_dim_examples():
    b = fix_b()
    assert graded_dim(b, (3, 2)).value == 0
    assert graded_dim(b, (3, 1)).value == 1
    assert graded_dim(b, (3, 3)).carrier == tuple(
        c.key for c in b.fan.cones if c.contains((3, 3)))
    c = fix_c()
    interior = graded_dim(c, (1, 1))
    assert interior.value == 1
    assert interior.carrier == (cone_build([(1, 0), (0, 2), (1, 1)]).key,)
    assert graded_dim(c, (0, 1)).value == 0
    shared = graded_dim(c, (0, 2))
    assert shared.value == 1
    assert len(shared.carrier) == 3
    r1 = stanley_r1()
    assert graded_dim(r1, (-3,)).carrier == (((-1,),),)
    assert graded_dim(r1, (2,)).carrier == (((1,),),)


def test_graded_dim_agrees_with_maximal_cover():
    # the support is the union of the maximal monoids
    for build in (fix_a, fix_c):
        mcc = build()
        radius = 3 if mcc.ambient_dim == 3 else 4
        for x in box(mcc.ambient_dim, radius):
            sp = graded_dim(mcc, x)
            covered = any(
                monoid_member(mcc.monoids[k], x) is not None
                for k in mcc.fan.maximal)
            assert (sp.value == 1) == covered


# ---------------------------------------------------------------------------
# seminormalization

def test_seminormalize_complex_fix_b():
    mcc = fix_b()
    out = seminormalize_complex(mcc)
    big = cone_build([(3, 0), (3, 1), (3, 3)]).key
    assert out.monoids[big].generators == ((3, 0), (3, 1), (3, 2), (3, 3))
    assert out.seminormal
    assert out.normal_monoids
    for k in mcc.monoids:
        if k != big:
            assert out.monoids[k].generators == mcc.monoids[k].generators


def test_seminormalize_complex_fixes_nothing_when_seminormal():
    for build in (fix_a, fix_c, stanley_r1):
        mcc = build()
        out = seminormalize_complex(mcc)
        for k in mcc.monoids:
            assert out.monoids[k].generators == mcc.monoids[k].generators


def test_seminormalize_complex_idempotent():
    once = seminormalize_complex(fix_b())
    twice = seminormalize_complex(once)
    for k in once.monoids:
        assert twice.monoids[k].generators == once.monoids[k].generators


# ---------------------------------------------------------------------------
# presentations

def test_presentation_fix_a():
    pres = presentation(fix_a(), 6)
    assert pres.variables == ((0, 0, 2), (0, 2, 0), (1, 1, 0), (2, 0, 0))
    assert pres.monomial_gens == ((1, 0, 1, 0),)
    assert len(pres.binomial_gens) == 1
    u, v, home = pres.binomial_gens[0]
    assert (u, v) == ((0, 1, 0, 1), (0, 0, 2, 0))
    assert home == cone_build([(2, 0, 0), (0, 2, 0), (1, 1, 0)]).key


def test_presentation_fix_b():
    pres = presentation(fix_b(), 6)
    assert pres.variables == ((0, 1), (3, 0), (3, 1), (3, 3))
    assert pres.monomial_gens == ((1, 0, 1, 0), (1, 1, 0, 0))
    assert len(pres.binomial_gens) == 1
    u, v, home = pres.binomial_gens[0]
    assert (u, v) == ((0, 2, 0, 1), (0, 0, 3, 0))
    assert home == cone_build([(3, 0), (3, 1), (3, 3)]).key


def test_presentation_fix_c():
    pres = presentation(fix_c(), 6)
    assert pres.variables == ((-2, 2), (0, 2), (1, 0), (1, 1))
    assert pres.monomial_gens == ((1, 0, 0, 1), (1, 0, 1, 0))
    assert len(pres.binomial_gens) == 1
    u, v, home = pres.binomial_gens[0]
    assert (u, v) == ((0, 1, 2, 0), (0, 0, 0, 2))
    assert home == cone_build([(1, 0), (0, 2), (1, 1)]).key


def test_presentation_stanley_fixtures():
    p1 = presentation(stanley_r1(), 4)
    assert p1.variables == ((-1,), (1,))
    assert p1.monomial_gens == ((1, 1),)
    assert p1.binomial_gens == ()
    p2 = presentation(octant_boundary(), 4)
    assert p2.variables == ((0, 0, 1), (0, 1, 0), (1, 0, 0))
    assert p2.monomial_gens == ((1, 1, 1),)
    assert p2.binomial_gens == ()


def test_presentation_polynomial_ring_is_free():
    fan = fan_build([cone_build([(1, 0), (0, 1)])])
    mcc = build_complex(fan, stanley=True)
    pres = presentation(mcc, 5)
    assert pres.variables == ((0, 1), (1, 0))
    assert pres.monomial_gens == ()
    assert pres.binomial_gens == ()


def test_presentation_generators_vanish_in_ring():
    # monomial generators evaluate to zero, binomial sides to equal elements
    for build in (fix_a, fix_b, fix_c):
        mcc = build()
        pres = presentation(mcc, 6)
        var = pres.variables
        maximal = {k: mcc.fan.by_key(k) for k in mcc.fan.maximal}

        def support(e):
            return [var[i] for i, t in enumerate(e) if t > 0]

        def total(e):
            acc = (0,) * mcc.ambient_dim
            for i, t in enumerate(e):
                for _ in range(t):
                    acc = tuple(x + y for x, y in zip(acc, var[i]))
            return acc

        for m in pres.monomial_gens:
            assert all(t <= 1 for t in m)
            for cone in maximal.values():
                assert not all(cone.contains(g) for g in support(m))
        for u, v, home in pres.binomial_gens:
            assert total(u) == total(v)
            assert u > v
            cone = maximal[home]
            for g in support(u) + support(v):
                assert cone.contains(g)


def test_presentation_rejects_bad_bound():
    with pytest.raises(ValueError):
        presentation(fix_a(), 0)


def test_presentation_degree_bound_recorded():
    pres = presentation(fix_c(), 5)
    assert pres.degree_bound == 5
    # the generators themselves are stable under a larger bound
    bigger = presentation(fix_c(), 7)
    assert bigger.monomial_gens == pres.monomial_gens
    assert [(u, v) for u, v, _ in bigger.binomial_gens] == \
        [(u, v) for u, v, _ in pres.binomial_gens]


def test_fixture_generator_dicts_are_consistent():
    # guard against silent edits to the shared fixture data
    assert sorted(FIX_A_GENS.values()) == [
        (0, 0, 2), (0, 2, 0), (1, 1, 0), (2, 0, 0)]
    assert sorted(FIX_B_GENS.values()) == [(0, 1), (3, 0), (3, 1), (3, 3)]
    assert sorted(FIX_C_GENS.values()) == [(-2, 2), (0, 2), (1, 0), (1, 1)]
