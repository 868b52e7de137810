"""Rational pointed cones, fans, and the cellular chain complex of a fan.

Cones are built from integer generators by Fourier-Motzkin elimination and
carry both descriptions (extreme rays and inward facet normals); the
generator/facet duality is re-verified by a second elimination round.  Fans
check face-closure and the common-face condition pairwise.  The chain
complex assigns incidence signs through per-cone orientation bases and
verifies that consecutive boundaries compose to zero.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .lattice import (
    LatticeBasis,
    dot,
    is_zero,
    kernel_basis,
    lattice_from_rows,
    primitive,
    rank_int,
    reduce_mod_lattice,
    row_saturation,
    snf,
    solve_in_lattice,
    vec,
)


class ConeNotPointedError(ValueError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"cone is not pointed: contains the line through {witness[0]}")


# ---------------------------------------------------------------------------
# Fourier-Motzkin elimination

def _canon_rows(rows):
    out = []
    seen = set()
    for r in rows:
        p = primitive(r)
        if is_zero(p) or p in seen:
            continue
        seen.add(p)
        out.append(p)
    return out


def fm_eliminate(ineqs, eqs, elim_indices):
    """Eliminate the given variable indices from a·u >= 0 / e·u = 0 systems."""
    ineqs = _canon_rows(ineqs)
    eqs = _canon_rows(eqs)
    for j in elim_indices:
        pivot = None
        for e in eqs:
            if e[j] != 0 and (pivot is None or abs(e[j]) < abs(pivot[j])):
                pivot = e
        if pivot is not None:
            pj = pivot[j]
            s = 1 if pj > 0 else -1

            def clear(row):
                # row*|pj| - pivot*(row_j*sign(pj)) kills coordinate j and
                # keeps inequality direction (|pj| > 0)
                return tuple(a * abs(pj) - b * (row[j] * s) for a, b in zip(row, pivot))

            ineqs = _canon_rows(clear(r) for r in ineqs)
            eqs = _canon_rows(clear(e) for e in eqs if e is not pivot)
            continue
        pos = [r for r in ineqs if r[j] > 0]
        neg = [r for r in ineqs if r[j] < 0]
        zero = [r for r in ineqs if r[j] == 0]
        combos = []
        for p in pos:
            for n in neg:
                combos.append(tuple(a * (-n[j]) + b * p[j] for a, b in zip(p, n)))
        ineqs = _canon_rows(zero + combos)
        eqs = _canon_rows(e for e in eqs if e[j] == 0)
    return ineqs, eqs


def dual_description(generators, ambient_dim):
    """H-description (inequalities, equalities) of the cone the rows generate.

    Runs Fourier-Motzkin on {x = sum_i lam_i g_i, lam >= 0}, eliminating the
    lam block.
    """
    n = len(generators)
    d = ambient_dim
    ineqs = []
    for i in range(n):
        row = [0] * (n + d)
        row[i] = 1
        ineqs.append(tuple(row))
    eqs = []
    for j in range(d):
        row = [-g[j] for g in generators] + [0] * d
        row[n + j] = 1
        eqs.append(tuple(row))
    ineqs, eqs = fm_eliminate(ineqs, eqs, range(n))
    out_i = _canon_rows(r[n:] for r in ineqs)
    out_e = _canon_rows(e[n:] for e in eqs)
    return out_i, out_e


def generators_from_h(ineqs, eqs, ambient_dim):
    """Generators of {x : ineqs·x >= 0, eqs·x = 0} by double polarity."""
    dual_gens = [vec(r) for r in ineqs]
    for e in eqs:
        dual_gens.append(vec(e))
        dual_gens.append(tuple(-x for x in e))
    dual_gens = _canon_rows(dual_gens)
    if not dual_gens:
        # no constraints: the whole space
        basis = [tuple(1 if i == j else 0 for j in range(ambient_dim)) for i in range(ambient_dim)]
        return basis + [tuple(-x for x in b) for b in basis]
    out_i, out_e = dual_description(dual_gens, ambient_dim)
    gens = list(out_i)
    for e in out_e:
        gens.append(e)
        gens.append(tuple(-x for x in e))
    return _canon_rows(gens)


# ---------------------------------------------------------------------------
# cones

@dataclass(frozen=True)
class Cone:
    """A rational pointed polyhedral cone with both descriptions."""

    ambient_dim: int
    generators: tuple      # primitive, deduplicated, lex-sorted input directions
    rays: tuple            # primitive extreme rays, lex-sorted
    facets: tuple          # inward facet normals, canonical, lex-sorted
    dim: int
    lin_basis: LatticeBasis  # saturated lattice Z^d ∩ lin(C)

    @property
    def key(self):
        return self.rays

    def __eq__(self, other):
        return (isinstance(other, Cone)
                and self.ambient_dim == other.ambient_dim
                and self.rays == other.rays)

    def __hash__(self):
        return hash((self.ambient_dim, self.rays))

    def contains(self, v) -> bool:
        v = vec(v)
        if solve_in_lattice(self.lin_basis, v) is None:
            return False
        return all(dot(f, v) >= 0 for f in self.facets)

    def interior_point(self):
        """Sum of the extreme rays; lies in the relative interior."""
        if not self.rays:
            return (0,) * self.ambient_dim
        out = [0] * self.ambient_dim
        for r in self.rays:
            for j in range(self.ambient_dim):
                out[j] += r[j]
        return tuple(out)


def _restrict(f, lin_rows):
    return tuple(dot(f, b) for b in lin_rows)


def _lift_functional(lin_basis: LatticeBasis, w):
    """Integer f with f·b_i = w_i over the saturated basis rows b_i."""
    B = [list(b) for b in lin_basis.basis]
    res = snf(B)
    # B = U^{-1} D V^{-1}; with saturated rows, divisors are all 1
    assert all(d == 1 for d in res.divisors)
    k = len(B)
    d = lin_basis.ambient_dim
    uw = [sum(res.U[i][j] * w[j] for j in range(k)) for i in range(k)]
    y = uw + [0] * (d - k)
    f = tuple(sum(res.V[i][j] * y[j] for j in range(d)) for i in range(d))
    assert _restrict(f, lin_basis.basis) == tuple(w)
    return f


def zero_cone(ambient_dim: int) -> Cone:
    return Cone(ambient_dim, (), (), (), 0, LatticeBasis(ambient_dim, ()))


def cone_build(generators, ambient_dim: Optional[int] = None) -> Cone:
    """Build a pointed cone from integer generators.

    Raises ConeNotPointedError (with a witness line) for non-pointed input;
    the generator/facet duality is re-verified by eliminating in the other
    direction before returning.
    """
    gens_in = [vec(g) for g in generators]
    if ambient_dim is None:
        if not gens_in:
            raise ValueError("ambient dimension required for an empty generator list")
        ambient_dim = len(gens_in[0])
    if any(len(g) != ambient_dim for g in gens_in):
        raise ValueError("generators of mixed dimension")
    gens = sorted({primitive(g) for g in gens_in if not is_zero(g)})
    if not gens:
        return zero_cone(ambient_dim)

    d = ambient_dim
    lin_rows = row_saturation([list(g) for g in gens], d)
    lin = LatticeBasis(d, tuple(lin_rows))
    dim = lin.rank

    perp = lattice_from_rows(d, kernel_basis([list(g) for g in gens], d))

    ineqs, _ = dual_description(gens, d)
    # canonical facet normals: restrict to the span, reduce, lift, reduce mod perp
    facets = []
    seen = set()
    for f in ineqs:
        w = primitive(_restrict(f, lin.basis))
        if is_zero(w):
            continue
        zero_set = [g for g in gens if dot(f, g) == 0]
        r = rank_int([list(g) for g in zero_set]) if zero_set else 0
        if r != dim - 1:
            continue
        fc = reduce_mod_lattice(perp, _lift_functional(lin, w))
        if fc in seen:
            continue
        seen.add(fc)
        facets.append(fc)
    facets.sort()

    for f in facets:
        assert all(dot(f, g) >= 0 for g in gens)

    # pointedness: the facet functionals must have full rank on the span
    W = [list(_restrict(f, lin.basis)) for f in facets]
    if dim > 0 and (not W or rank_int(W) < dim):
        null = kernel_basis(W, dim) if W else [tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim)]
        y = null[0]
        x = tuple(sum(y[i] * lin.basis[i][j] for i in range(dim)) for j in range(d))
        raise ConeNotPointedError((x, tuple(-c for c in x)))

    rays = []
    for g in gens:
        zf = [list(_restrict(f, lin.basis)) for f in facets if dot(f, g) == 0]
        r = rank_int(zf) if zf else 0
        if r == dim - 1:
            rays.append(g)
    rays = sorted(set(rays))

    # duality round trip: extreme rays recovered from the facet description
    if dim > 0:
        back_i, back_e = dual_description(W, dim)
        assert not back_e
        recovered = set()
        for f in back_i:
            zs = [w for w in W if dot(f, w) == 0]
            if (rank_int([list(z) for z in zs]) if zs else 0) != dim - 1:
                continue
            recovered.add(primitive(f))
        ray_coords = set()
        for r in rays:
            c = solve_in_lattice(lin, r)
            assert c is not None
            ray_coords.add(primitive(c))
        assert recovered == ray_coords, "facet/ray duality verification failed"

    return Cone(d, tuple(gens), tuple(rays), tuple(facets), dim, lin)


def relint_contains(cone: Cone, v) -> bool:
    """Is the integer vector v in the relative interior of the cone?"""
    v = vec(v)
    if cone.dim == 0:
        return is_zero(v)
    if solve_in_lattice(cone.lin_basis, v) is None:
        return False
    return all(dot(f, v) > 0 for f in cone.facets)


def facets_through(cone: Cone, face: "Cone"):
    """Facet normals of `cone` that vanish on `face`."""
    return [f for f in cone.facets if all(dot(f, r) == 0 for r in face.rays)]


# ---------------------------------------------------------------------------
# face lattices

@dataclass(frozen=True)
class FaceLattice:
    cone: Cone
    faces: tuple  # all faces as Cones, sorted by (dim, rays)

    def dims(self):
        return tuple(f.dim for f in self.faces)

    def leq(self, a: Cone, b: Cone) -> bool:
        return set(a.rays) <= set(b.rays)


def face_lattice(cone: Cone) -> FaceLattice:
    """All faces of a pointed cone, as intersections of facet zero-sets."""
    ray_idx = range(len(cone.rays))
    all_set = frozenset(ray_idx)
    zero_sets = [
        frozenset(i for i in ray_idx if dot(f, cone.rays[i]) == 0)
        for f in cone.facets
    ]
    found = {all_set}
    frontier = [all_set]
    while frontier:
        nxt = []
        for s in frontier:
            for z in zero_sets:
                t = s & z
                if t not in found:
                    found.add(t)
                    nxt.append(t)
        frontier = nxt
    faces = []
    for s in found:
        sub = [cone.rays[i] for i in sorted(s)]
        faces.append(cone_build(sub, cone.ambient_dim) if sub else zero_cone(cone.ambient_dim))
    faces.sort(key=lambda c: (c.dim, c.rays))
    for f in faces:
        assert set(f.rays) <= set(cone.rays)
    return FaceLattice(cone, tuple(faces))


# ---------------------------------------------------------------------------
# fans

@dataclass(frozen=True)
class Fan:
    """A finite collection of pointed cones closed under faces."""

    ambient_dim: int
    cones: tuple          # all cones, sorted by (dim, rays)
    maximal: tuple        # keys (ray tuples) of the inclusion-maximal cones

    def __post_init__(self):
        object.__setattr__(self, "_by_key", {c.key: c for c in self.cones})

    @property
    def dim(self) -> int:
        return max((c.dim for c in self.cones), default=0)

    def by_key(self, key) -> Cone:
        return self._by_key[key]

    def contains_cone(self, cone: Cone) -> bool:
        return cone.key in self._by_key

    def cones_of_dim(self, k: int):
        return [c for c in self.cones if c.dim == k]

    def faces_of(self, cone: Cone):
        rs = set(cone.rays)
        return [c for c in self.cones if set(c.rays) <= rs]

    def up_set(self, cone: Cone):
        rs = set(cone.rays)
        return [c for c in self.cones if rs <= set(c.rays) and _is_face(cone, c)]

    def facets_of(self, cone: Cone):
        return [c for c in self.faces_of(cone) if c.dim == cone.dim - 1]

    def maximal_cones(self):
        return [self._by_key[k] for k in self.maximal]

    def support_contains(self, v) -> bool:
        return any(c.contains(v) for c in self.maximal_cones())

    def carrier(self, v) -> Optional[Cone]:
        """The unique cone with v in its relative interior, if any."""
        for c in self.cones:
            if relint_contains(c, v):
                return c
        return None


def _is_face(small: Cone, big: Cone) -> bool:
    if not set(small.rays) <= set(big.rays):
        return False
    if small.dim == 0:
        return True
    # a face is cut out by facet normals of the big cone
    zf = [f for f in big.facets if all(dot(f, r) == 0 for r in small.rays)]
    cut = [r for r in big.rays if all(dot(f, r) == 0 for f in zf)]
    return set(cut) == set(small.rays)


def _intersection_cone(c1: Cone, c2: Cone) -> Cone:
    d = c1.ambient_dim
    ineqs = list(c1.facets) + list(c2.facets)
    perp1 = kernel_basis([list(g) for g in c1.rays], d) if c1.rays else None
    perp2 = kernel_basis([list(g) for g in c2.rays], d) if c2.rays else None
    eqs = []
    for perp in (perp1, perp2):
        if perp is None:
            return zero_cone(d)
        eqs.extend(perp)
    gens = generators_from_h(ineqs, eqs, d)
    for g in gens:
        assert c1.contains(g) and c2.contains(g)
    return cone_build(gens, d) if gens else zero_cone(d)


def fan_build(maximal_cones: Sequence[Cone]) -> Fan:
    """Assemble a fan from maximal cones, verifying the common-face condition."""
    if not maximal_cones:
        raise ValueError("empty cone list")
    d = maximal_cones[0].ambient_dim
    if any(c.ambient_dim != d for c in maximal_cones):
        raise ValueError("cones of mixed ambient dimension")

    uniq = {}
    for c in maximal_cones:
        uniq.setdefault(c.key, c)
    tops = [c for c in uniq.values()
            if not any(o.key != c.key and set(c.rays) <= set(o.rays)
                       for o in uniq.values())]

    for a, b in itertools.combinations(tops, 2):
        k = _intersection_cone(a, b)
        if not (_is_face(k, a) and _is_face(k, b)):
            raise ValueError(
                f"cones with rays {a.rays} and {b.rays} do not meet in a common face"
            )

    cones = {}
    for c in tops:
        for f in face_lattice(c).faces:
            cones.setdefault(f.key, f)
    ordered = tuple(sorted(cones.values(), key=lambda c: (c.dim, c.rays)))
    max_keys = tuple(sorted(c.key for c in tops))
    return Fan(d, ordered, max_keys)


def trivial_fan(ambient_dim: int) -> Fan:
    z = zero_cone(ambient_dim)
    return Fan(ambient_dim, (z,), (z.key,))


def skeleton_fan(fan: Fan, i: int) -> Fan:
    """Subfan of all cones of dimension at most i."""
    if i < 0:
        raise ValueError("skeleton index must be >= 0")
    kept = [c for c in fan.cones if c.dim <= i]
    keys = {c.key for c in kept}
    max_keys = []
    for c in kept:
        if not any(o.key != c.key and set(c.rays) < set(o.rays) for o in kept):
            max_keys.append(c.key)
    return Fan(fan.ambient_dim, tuple(kept), tuple(sorted(set(max_keys))))


# ---------------------------------------------------------------------------
# the cellular chain complex of a fan

def _solve_coords(basis_rows, v):
    """Rational coordinates of v in the span of the basis rows."""
    k = len(basis_rows)
    d = len(v)
    # solve x * B = v by Gaussian elimination on B^T | v
    A = [[Fraction(basis_rows[i][j]) for i in range(k)] + [Fraction(v[j])] for j in range(d)]
    piv_cols = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, d) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(d):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        piv_cols.append(c)
        r += 1
    for i in range(r, d):
        if A[i][k] != 0:
            raise ValueError("vector outside the span")
    x = [Fraction(0)] * k
    for row, c in enumerate(piv_cols):
        x[c] = A[row][k]
    return x


def _det_fraction(M):
    n = len(M)
    A = [row[:] for row in M]
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        inv = 1 / A[c][c]
        for i in range(c + 1, n):
            if A[i][c] != 0:
                f = A[i][c] * inv
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return det


def orientation_basis(cone: Cone):
    """First dim(C) linearly independent rays in canonical order."""
    rows = []
    for r in cone.rays:
        if rank_int([list(x) for x in rows] + [list(r)]) > len(rows):
            rows.append(r)
        if len(rows) == cone.dim:
            break
    assert len(rows) == cone.dim
    return rows


def incidence_sign(big: Cone, small: Cone) -> int:
    """Incidence number between a cone and one of its facets."""
    if big.dim == small.dim + 1 and small.dim == 0:
        return 1  # augmentation: every ray meets the empty cell once
    w = next(r for r in big.rays if r not in set(small.rays))
    rows = [w] + orientation_basis(small)
    basis = orientation_basis(big)
    M = [_solve_coords(basis, r) for r in rows]
    det = _det_fraction(M)
    assert det != 0
    return 1 if det > 0 else -1


@dataclass(frozen=True)
class CellComplex:
    """Augmented cellular chain complex of a fan.

    Cells in degree i are the (i+1)-dimensional cones; the zero cone is the
    empty cell in degree -1.  boundary[i] maps degree-i chains to degree
    (i-1)-chains (rows indexed by the lower cells).
    """

    fan: Fan
    cells: dict     # degree -> list of cone keys
    boundary: dict  # degree -> integer matrix (rows: cells[deg-1], cols: cells[deg])
    incidence: dict  # (big key, small key) -> ±1

    def degree_range(self):
        return range(0, self.fan.dim)


def cell_complex(fan: Fan) -> CellComplex:
    cells = {-1: [()]}
    top = fan.dim
    for deg in range(0, top):
        cells[deg] = [c.key for c in fan.cones_of_dim(deg + 1)]

    incidence = {}
    boundary = {}
    for deg in range(0, top):
        rows = cells[deg - 1]
        cols = cells[deg]
        row_index = {k: i for i, k in enumerate(rows)}
        M = [[0] * len(cols) for _ in rows]
        for j, ck in enumerate(cols):
            big = fan.by_key(ck)
            for small in fan.facets_of(big):
                sgn = incidence_sign(big, small)
                incidence[(big.key, small.key)] = sgn
                M[row_index[small.key]][j] = sgn
        boundary[deg] = M

    # boundary-squared and the diamond identity
    for deg in range(1, top):
        A = boundary[deg - 1]
        B = boundary[deg]
        for i in range(len(A)):
            for j in range(len(B[0]) if B else 0):
                s = sum(A[i][k] * B[k][j] for k in range(len(B)))
                assert s == 0, "boundary composition is nonzero"
    for big in fan.cones:
        if big.dim < 2:
            continue
        for small in fan.faces_of(big):
            if small.dim != big.dim - 2:
                continue
            mids = [m for m in fan.cones
                    if m.dim == big.dim - 1
                    and set(small.rays) <= set(m.rays) <= set(big.rays)
                    and _is_face(small, m) and _is_face(m, big)]
            assert len(mids) == 2, "face interval is not a diamond"

    return CellComplex(fan, cells, boundary, incidence)
