"""Localized pieces, the cone-indexed cochain complex, and the power map.

Expected dimensions were derived by hand from the generator data in
conftest.py (membership in each localized piece reduces to a lattice
point count) and frozen here; the box scans then cross-check the direct
cochain computation against the recursive formula on every fixture.
"""

import itertools

import pytest

from conftest import ALL_FIXTURES, fix_b, fix_c, stanley_r1
from toricface.cech import (BoundExhausted, cech_degree, cech_slice,
                            frobenius_check, localization_piece)
from toricface.cohomology import (complex_avoiding, local_cohomology_degree,
                                  zero_table)
from toricface.lattice import vadd
from toricface.monoid import monoid_member

RAY_T = ((0, 1),)
RAY_X = ((1, 0),)
RAY_D = ((1, 1),)
CONE_BP = ((0, 1), (1, 1))
CONE_B = ((1, 0), (1, 1))


def box(dim, radius):
    return itertools.product(range(-radius, radius + 1), repeat=dim)


def check_witness(mcc, cone_key, a, witness):
    z, y = witness
    assert tuple(x - w for x, w in zip(z, y)) == tuple(a)
    assert monoid_member(mcc.monoids[cone_key], y) is not None
    targets = mcc.fan.up_set(mcc.fan.by_key(cone_key))
    assert any(monoid_member(mcc.monoids[d.key], z) is not None
               for d in targets)


def check_zero_piece(mcc, cone_key, a, depth=3):
    # a zero piece means no y in the source monoid lands a + y in any
    # overcone monoid; falsify over all small generator combinations
    gens = mcc.monoids[cone_key].generators
    targets = mcc.fan.up_set(mcc.fan.by_key(cone_key))
    combos = [c for c in itertools.product(range(depth + 1), repeat=len(gens))
              if sum(c) <= depth]
    for c in combos:
        y = tuple(sum(ci * g[j] for ci, g in zip(c, gens))
                  for j in range(mcc.ambient_dim))
        z = vadd(a, y)
        assert all(monoid_member(mcc.monoids[d.key], z) is None
                   for d in targets)


def test_piece_values_two_cone_glued():
    mcc = fix_b()
    a = (0, -1)
    expected = {
        (): 0,
        RAY_T: 1,
        RAY_X: 0,
        RAY_D: 0,
        CONE_BP: 1,
        CONE_B: 1,
    }
    for cone in mcc.fan.cones:
        r = localization_piece(mcc, cone, a)
        assert r.value == expected[cone.key], cone.key
        if r.value:
            check_witness(mcc, cone.key, a, r.witness)
        else:
            assert r.witness is None
            check_zero_piece(mcc, cone.key, a)


def test_piece_accepts_raw_key():
    mcc = fix_b()
    r = localization_piece(mcc, RAY_T, (0, -1))
    assert r.value == 1
    assert r.witness == ((0, 0), (0, 1))


def test_piece_witnesses_over_box():
    mcc = fix_c()
    for a in box(2, 2):
        for cone in mcc.fan.cones:
            r = localization_piece(mcc, cone, a)
            assert r.value in (0, 1)
            if r.value:
                check_witness(mcc, cone.key, a, r.witness)


def test_state_cap_exhaustion_is_loud():
    # membership of (3, 1) from the x-ray needs a search; a one-state cap
    # must fail loudly rather than report an empty piece
    mcc = fix_b()
    with pytest.raises(BoundExhausted) as exc:
        localization_piece(mcc, RAY_X, (3, 1), state_cap=1)
    assert exc.value.cone_key == CONE_B
    assert exc.value.degree == (3, 1)
    assert exc.value.cap == 1
    r = localization_piece(mcc, RAY_X, (3, 1))
    assert r.value == 1
    check_witness(mcc, RAY_X, (3, 1), r.witness)


def test_slice_structure_two_cone_glued():
    mcc = fix_b()
    sl = cech_slice(mcc, (0, -1))
    assert sl.degree == (0, -1)
    levels = [t for t, _ in sl.levels]
    assert levels == sorted(levels)
    assert sl.keys_at(1) == (RAY_T,)
    assert sl.keys_at(2) == (CONE_BP, CONE_B)
    assert sl.keys_at(0) == ()
    assert sl.sizes() == {1: 1, 2: 2}
    mats = sl.matrices()
    assert list(mats) == [1]
    assert [len(r) for r in mats[1]] == [1, 1]
    assert sorted(abs(r[0]) for r in mats[1]) == [0, 1]


def test_slice_matrix_shapes_match_levels():
    mcc = fix_c()
    for a in [(0, -1), (0, -2), (-1, -1), (1, 1), (0, 0)]:
        sl = cech_slice(mcc, a)
        sizes = sl.sizes()
        for t, rows in sl.mats:
            assert len(rows) == sizes.get(t + 1, 0)
            for r in rows:
                assert len(r) == sizes.get(t, 0)


def test_cochain_degree_two_cone_glued():
    mcc = fix_b()
    t = cech_degree(mcc, (0, -1), "all")
    assert t.entries == ((2, 1),)
    assert t.corrections == ()
    assert cech_degree(mcc, (0, -1), 0).entries == ((2, 1),)
    assert cech_degree(mcc, (0, -1), 2).entries == ((2, 1),)


def test_restricted_complex_carries_the_top_class():
    # removing the star of (0, 1) from the glued complex leaves the face
    # poset of the non-seminormal cone; its top cohomology in degree
    # (0, -1) is one-dimensional by both computations
    mcc = fix_b()
    sub = complex_avoiding(mcc, (0, 1))
    assert sub is not None
    assert {c.key for c in sub.fan.cones} == {(), RAY_X, RAY_D, CONE_B}
    oracle = cech_degree(sub, (0, -1), "all")
    formula = local_cohomology_degree(sub, (0, -1), "all")
    assert oracle.entries == ((2, 1),)
    assert formula.entries == oracle.entries
    assert formula.corrections == oracle.corrections == ()


def test_formula_matches_cochain_over_boxes():
    radii = {1: 3, 2: 2, 3: 1}
    for name, build in sorted(ALL_FIXTURES.items()):
        mcc = build()
        d = mcc.ambient_dim
        for ch in (0, 2, 3):
            for a in box(d, radii[d]):
                left = local_cohomology_degree(mcc, a, ch)
                right = cech_degree(mcc, a, ch)
                assert left.entries == right.entries, (name, a, ch)
                assert left.corrections == right.corrections == ()


def test_degree_with_negative_outside_support_is_zero():
    # the support of the seminormal wedge complex is the first quadrant
    # plus the wedge between (0, 1) and (-1, 1); cohomology in degree a
    # vanishes whenever -a lies outside it
    mcc = fix_c()
    for a in [(7, 0), (0, 7), (5, 5), (-1, 7), (1, -7)]:
        t = cech_degree(mcc, a, "all")
        assert t.total == 0
        assert t == zero_table("all")
    # contrast: -(-7, -1) = (7, 1) sits inside the big cone, and the top
    # cohomology there is one-dimensional
    assert cech_degree(mcc, (-7, -1), "all").entries == ((2, 1),)


def test_power_map_bijective_at_checked_degrees():
    mcc = fix_c()
    for b in [(0, -1), (0, -2), (-1, -1), (-2, -2)]:
        fc = frobenius_check(mcc, b, 2)
        assert fc.degree == b
        assert fc.prime == 2
        steps = {s.i: s for s in fc.steps}
        assert set(steps) == {2}
        s = steps[2]
        assert (s.dim_source, s.dim_target, s.rank) == (1, 1, 1)
        assert s.injective and s.bijective


def test_power_map_injective_at_unexcluded_prime():
    mcc = fix_c()
    for a in box(2, 2):
        fc = frobenius_check(mcc, a, 3)
        assert all(s.injective for s in fc.steps), (a, fc.steps)


def test_power_map_injective_on_line_pair():
    mcc = stanley_r1()
    for a in box(1, 2):
        fc = frobenius_check(mcc, a, 2)
        assert all(s.injective for s in fc.steps), (a, fc.steps)


def test_power_map_rejects_composite_exponent():
    mcc = fix_c()
    for p in (0, 1, 4, 6):
        with pytest.raises(ValueError):
            frobenius_check(mcc, (0, -1), p)
