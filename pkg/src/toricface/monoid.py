"""Affine monoid engine.

Membership with certificates, normalization through Hilbert bases of
triangulated cones, seminormalization by the face-lattice union formula,
and the normality/seminormality decision procedures.  All monoids here are
positive: the cone they span must be pointed.

Every search is bounded through an integral grading functional that is
strictly positive on the cone minus the origin, so dynamic programming over
its value terminates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .lattice import (
    LatticeBasis,
    dot,
    intersect,
    is_zero,
    kernel_basis,
    lattice_from_rows,
    rank_int,
    row_saturation,
    snf,
    solve_in_lattice,
    unimodular_inverse,
    vadd,
    vec,
    vsub,
)
from .polyhedral import Cone, cone_build, face_lattice, zero_cone


class BoundTooSmallError(ValueError):
    def __init__(self, element, bound):
        self.element = element
        self.bound = bound
        super().__init__(
            f"bound too small: element {element} is not generated within degree {bound}"
        )


def grading_functional(cone: Cone):
    """Sum of the facet normals; strictly positive on the cone minus 0."""
    d = cone.ambient_dim
    out = [0] * d
    for f in cone.facets:
        for j in range(d):
            out[j] += f[j]
    ell = tuple(out)
    for r in cone.rays:
        assert dot(ell, r) > 0
    return ell


@dataclass(frozen=True)
class AffineMonoid:
    """A finitely generated positive submonoid of Z^d."""

    ambient_dim: int
    generators: tuple     # deduplicated, lex-sorted, nonzero
    cone: Cone            # R+ M
    group: LatticeBasis   # Z M
    grading: tuple        # integral functional, >= 1 on every generator

    def __post_init__(self):
        object.__setattr__(self, "_member_memo", {})

    def degree(self, v) -> int:
        return dot(self.grading, v)

    def contains(self, v) -> bool:
        return monoid_member(self, v) is not None


def monoid_build(generators, ambient_dim: Optional[int] = None) -> AffineMonoid:
    gens_in = [vec(g) for g in generators]
    if ambient_dim is None:
        if not gens_in:
            raise ValueError("ambient dimension required for an empty generator list")
        ambient_dim = len(gens_in[0])
    if any(len(g) != ambient_dim for g in gens_in):
        raise ValueError("generators of mixed dimension")
    gens = tuple(sorted({g for g in gens_in if not is_zero(g)}))
    cone = cone_build(gens, ambient_dim)  # raises if not pointed
    group = lattice_from_rows(ambient_dim, [list(g) for g in gens])
    ell = grading_functional(cone)
    for g in gens:
        assert dot(ell, g) >= 1
        assert group.contains(g)
    return AffineMonoid(ambient_dim, gens, cone, group, ell)


def monoid_member(M: AffineMonoid, v) -> Optional[tuple]:
    """Coefficients expressing v over M's generators, or None.

    Dynamic programming descending in the grading; complete because every
    generator has degree >= 1, so coefficients are bounded by the degree
    of v.
    """
    v = vec(v)
    if len(v) != M.ambient_dim:
        raise ValueError("vector dimension mismatch")
    if is_zero(v):
        return (0,) * len(M.generators)
    if solve_in_lattice(M.group, v) is None:
        return None
    memo = M._member_memo

    def search(x):
        # returns a generator to subtract, or False
        if is_zero(x):
            return ()
        got = memo.get(x)
        if got is not None:
            return got
        res = False
        for g in M.generators:
            y = vsub(x, g)
            if M.cone.contains(y) and search(y) is not False:
                res = g
                break
        memo[x] = res
        return res

    if not M.cone.contains(v) or search(v) is False:
        return None
    counts = {g: 0 for g in M.generators}
    x = v
    while not is_zero(x):
        g = search(x)
        counts[g] += 1
        x = vsub(x, g)
    coeffs = tuple(counts[g] for g in M.generators)
    acc = (0,) * M.ambient_dim
    for c, g in zip(coeffs, M.generators):
        for _ in range(c):
            acc = vadd(acc, g)
    assert acc == v
    return coeffs


def generated_points(gens, grading, bound, ambient_dim):
    """All sums of the generators with grading value <= bound, including 0."""
    zero = (0,) * ambient_dim
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for x in frontier:
            base = dot(grading, x)
            for g in gens:
                if base + dot(grading, g) > bound:
                    continue
                y = vadd(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


# ---------------------------------------------------------------------------
# Hilbert bases

def triangulate_cone(cone: Cone):
    """Placing triangulation over the primitive rays in lexicographic order.

    Returns maximal simplicial subcones as tuples of rays.
    """
    rays = list(cone.rays)
    if not rays:
        return []
    placed = [rays[0]]
    simplices = [(rays[0],)]
    for v in rays[1:]:
        old_rank = rank_int([list(r) for r in placed])
        if rank_int([list(r) for r in placed] + [list(v)]) > old_rank:
            simplices = [s + (v,) for s in simplices]
        else:
            span = LatticeBasis(cone.ambient_dim,
                                tuple(vec(r) for r in _saturate_rows(placed, cone.ambient_dim)))
            k = span.rank
            coords = {r: tuple(solve_in_lattice(span, r)) for r in placed + [v]}
            facet_count = {}
            facet_owner = {}
            for s in simplices:
                for f in itertools.combinations(s, len(s) - 1):
                    key = frozenset(f)
                    facet_count[key] = facet_count.get(key, 0) + 1
                    facet_owner[key] = (f, s)
            new = []
            for key, cnt in facet_count.items():
                if cnt != 1:
                    continue
                f, s = facet_owner[key]
                n = kernel_basis([list(coords[r]) for r in f], k)
                assert len(n) == 1
                n = n[0]
                opp = next(r for r in s if r not in key)
                sgn = dot(n, coords[opp])
                assert sgn != 0
                if sgn < 0:
                    n = tuple(-x for x in n)
                if dot(n, coords[v]) < 0:
                    new.append(f + (v,))
            simplices = simplices + new
        placed.append(v)
    for s in simplices:
        assert rank_int([list(r) for r in s]) == len(s) == cone.dim
    return simplices


def _saturate_rows(rows, d):
    return row_saturation([list(r) for r in rows], d)


def minimal_ray_point(ray, lattice: LatticeBasis):
    """The smallest positive multiple of the ray lying in the lattice."""
    d = len(ray)
    line = lattice_from_rows(d, [list(ray)])
    both = intersect(lattice, line)
    assert both.rank == 1, "lattice misses the ray"
    b = both.basis[0]
    # b = t * ray for some nonzero integer t
    j = next(i for i in range(d) if ray[i] != 0)
    if b[j] * ray[j] < 0:
        b = tuple(-x for x in b)
    return b


def parallelepiped_points(simplex_points, lattice: LatticeBasis, ambient_dim):
    """Lattice points of {sum q_i s_i : 0 <= q_i < 1}, including the origin."""
    from fractions import Fraction

    spts = [vec(s) for s in simplex_points]
    k = len(spts)
    span_lin = LatticeBasis(ambient_dim,
                            tuple(vec(r) for r in _saturate_rows(spts, ambient_dim)))
    lat = intersect(lattice, span_lin)
    assert lat.rank == k
    A = []
    sub = lattice_from_rows(ambient_dim, [list(s) for s in spts])
    for row in sub.basis:
        c = solve_in_lattice(lat, row)
        assert c is not None
        A.append(list(c))
    res = snf(A)
    vinv = unimodular_inverse(res.V)
    index = 1
    for dv in res.divisors:
        index *= dv

    def coords_in_spts(z):
        rows = [[Fraction(spts[i][j]) for i in range(k)] + [Fraction(z[j])]
                for j in range(ambient_dim)]
        piv = []
        r = 0
        for c in range(k):
            p = next((i for i in range(r, ambient_dim) if rows[i][c] != 0), None)
            if p is None:
                continue
            rows[r], rows[p] = rows[p], rows[r]
            inv = 1 / rows[r][c]
            rows[r] = [x * inv for x in rows[r]]
            for i in range(ambient_dim):
                if i != r and rows[i][c] != 0:
                    fq = rows[i][c]
                    rows[i] = [x - fq * y for x, y in zip(rows[i], rows[r])]
            piv.append(c)
            r += 1
        for i in range(r, ambient_dim):
            assert rows[i][k] == 0
        q = [Fraction(0)] * k
        for row_i, c in enumerate(piv):
            q[c] = rows[row_i][k]
        return q

    out = set()
    for cvec in itertools.product(*[range(dv) for dv in res.divisors]):
        x = [sum(cvec[i] * vinv[i][j] for i in range(k)) for j in range(k)]
        z0 = tuple(sum(x[i] * lat.basis[i][j] for i in range(k))
                   for j in range(ambient_dim))
        q = coords_in_spts(z0)
        z = z0
        for i in range(k):
            fl = q[i].numerator // q[i].denominator
            if fl:
                z = vsub(z, tuple(fl * c for c in spts[i]))
        qz = coords_in_spts(z)
        assert all(0 <= qi < 1 for qi in qz)
        out.add(vec(z))
    assert len(out) == index
    return out


def _simplex_lattice_points(spts, ppts, ell, bound):
    """All points p + sum n_i s_i with grading value <= bound."""
    degs = [dot(ell, s) for s in spts]
    assert all(dg >= 1 for dg in degs)
    out = set()

    def rec(i, acc, rem):
        if i == len(spts):
            out.add(acc)
            return
        t = 0
        cur = acc
        while t * degs[i] <= rem:
            rec(i + 1, cur, rem - t * degs[i])
            t += 1
            cur = vadd(cur, spts[i])

    for p in ppts:
        room = bound - dot(ell, p)
        if room >= 0:
            rec(0, vec(p), room)
    return out


def _hilbert_data(cone: Cone, lattice: LatticeBasis):
    """(sorted Hilbert basis of cone ∩ lattice, max candidate degree)."""
    if cone.dim == 0:
        return (), 0
    d = cone.ambient_dim
    ell = grading_functional(cone)
    mins = {r: minimal_ray_point(r, lattice) for r in cone.rays}
    simplices = triangulate_cone(cone)
    per_simplex = []
    cands = set(mins.values())
    for s in simplices:
        spts = [mins[r] for r in s]
        ppts = parallelepiped_points(spts, lattice, d)
        per_simplex.append((spts, ppts))
        cands |= ppts
    cands.discard((0,) * d)
    maxdeg = max(dot(ell, c) for c in cands)

    elems = []
    for z in sorted(cands):
        reducible = False
        for c in cands:
            y = vsub(z, c)
            if not is_zero(y) and c != z and cone.contains(y):
                reducible = True
                break
        if not reducible:
            elems.append(z)

    # generation check: the basis reaches every cone-lattice point up to
    # twice the candidate degree, by two independent enumerations
    bound = 2 * maxdeg
    pts = set()
    for spts, ppts in per_simplex:
        pts |= _simplex_lattice_points(spts, ppts, ell, bound)
    reach = generated_points(elems, ell, bound, d)
    assert reach == pts, "Hilbert basis does not generate the intersection"
    return tuple(sorted(elems)), maxdeg


def hilbert_basis(cone: Cone, lattice: LatticeBasis):
    return _hilbert_data(cone, lattice)[0]


@dataclass(frozen=True)
class HilbertBasis:
    elements: tuple


def normalization(M: AffineMonoid) -> HilbertBasis:
    """Hilbert basis of the normalization: the group points of the cone."""
    return HilbertBasis(hilbert_basis(M.cone, M.group))


# ---------------------------------------------------------------------------
# seminormalization

@dataclass(frozen=True)
class SeminormalizationResult:
    generators: tuple
    verified_bound: int
    witness: Optional[tuple]   # an element outside M, when there is one


def monoid_face_gens(M: AffineMonoid, face: Cone):
    """Generators of M lying on a face; these generate the face restriction."""
    return tuple(g for g in M.generators if face.contains(g))


def _face_data(M: AffineMonoid):
    """(ray-set, group lattice of the face restriction) per face."""
    out = []
    for f in face_lattice(M.cone).faces:
        gens_f = monoid_face_gens(M, f)
        lat = lattice_from_rows(M.ambient_dim, [list(g) for g in gens_f])
        out.append((frozenset(f.rays), lat))
    return out


def _in_plus(M: AffineMonoid, faces, x) -> bool:
    """Is x in the face-lattice union defining the seminormalization?

    x must already lie in the cone; its carrier face is cut out by the
    facet normals vanishing at x.
    """
    vanish = [f for f in M.cone.facets if dot(f, x) == 0]
    carrier = frozenset(r for r in M.cone.rays
                        if all(dot(f, r) == 0 for f in vanish))
    for rays, lat in faces:
        if rays == carrier:
            return solve_in_lattice(lat, x) is not None
    raise AssertionError("carrier face not found")


def seminormalize(M: AffineMonoid, bound: Optional[int] = None) -> SeminormalizationResult:
    """Generators of the seminormalization, certified up to twice the bound."""
    hb, maxdeg = _hilbert_data(M.cone, M.group)
    if not M.generators:
        return SeminormalizationResult((), 0, None)
    gen_deg = max(M.degree(g) for g in M.generators)
    if bound is None:
        bound = max(2 * maxdeg, gen_deg)
    ell = M.grading
    faces = _face_data(M)

    big = generated_points(hb, ell, 2 * bound, M.ambient_dim)
    plus2 = sorted(x for x in big if not is_zero(x) and _in_plus(M, faces, x))
    plus1 = [x for x in plus2 if dot(ell, x) <= bound]

    pset = set(plus1)
    gens_out = []
    for z in sorted(plus1, key=lambda v: (dot(ell, v), v)):
        reducible = any(vsub(z, a) in pset and not is_zero(vsub(z, a)) and a != z
                        for a in pset)
        if not reducible:
            gens_out.append(z)
    gens_out = tuple(sorted(gens_out))

    # certification by re-decomposition up to twice the bound
    reach = generated_points(gens_out, ell, 2 * bound, M.ambient_dim)
    for x in plus2:
        if x not in reach:
            raise BoundTooSmallError(x, bound)

    witness = next((g for g in gens_out if monoid_member(M, g) is None), None)
    return SeminormalizationResult(gens_out, 2 * bound, witness)


def seminormalized_monoid(M: AffineMonoid, bound: Optional[int] = None) -> AffineMonoid:
    res = seminormalize(M, bound)
    if not res.generators:
        return M
    return monoid_build(res.generators, M.ambient_dim)


@dataclass(frozen=True)
class NormalityCheck:
    seminormal: bool
    normal: bool
    witness: Optional[tuple]


def check_seminormal_normal(M: AffineMonoid) -> NormalityCheck:
    """Decide normality and seminormality, with a witness element when false.

    The seminormality decision is cross-checked against the definition:
    within the search box there is no x with 2x and 3x in M but x outside.
    """
    hb, maxdeg = _hilbert_data(M.cone, M.group)
    nwit = next((h for h in hb if monoid_member(M, h) is None), None)
    sn = seminormalize(M)
    swit = next((g for g in sn.generators if monoid_member(M, g) is None), None)
    seminormal = swit is None
    normal = nwit is None
    assert not (normal and not seminormal)

    scan_bound = max(2 * maxdeg, 1)
    for x in generated_points(hb, M.grading, scan_bound, M.ambient_dim):
        if is_zero(x):
            continue
        two = tuple(2 * c for c in x)
        three = tuple(3 * c for c in x)
        if monoid_member(M, two) is not None and monoid_member(M, three) is not None:
            if monoid_member(M, x) is None:
                assert not seminormal, "definition scan contradicts the decision"

    witness = swit if not seminormal else (nwit if not normal else None)
    return NormalityCheck(seminormal, normal, witness)
