"""Graded local cohomology of an embedded toric face ring.

The degree-a piece of local cohomology is read off combinatorially: the
star of -a (the cones whose normalized monoid contains -a) carries a
quotient of the augmented cellular cochain complex of the fan, and for
seminormal complexes its reduced cohomology, shifted by one, is the answer.
Non-seminormal complexes are handled by splitting off the star summand and
recursing into the subcomplex away from the star, falling back to the
brute-force Cech oracle when the splitting is uninformative.

All boundary maps are integral, so a single Smith normal form per map
answers every characteristic at once: dimensions over Q plus the finite
list of primes where torsion shifts them.  On top of the per-degree
machinery sit: the finite star-class decomposition of Z^d (making global
reports possible), depth and Cohen-Macaulayness by rank selection over
skeleta, the per-face count for a single monoid, and the simplicial
order-complex comparison for Stanley complexes.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Optional

from .lattice import (
    LatticeBasis,
    intersect,
    quotient_invariants,
    snf,
    solve_in_lattice,
    unimodular_inverse,
    vadd,
    vec,
    vneg,
    vscale,
)
from .moncomplex import ComplexError, MonoidalComplex, build_complex, restrict
from .monoid import AffineMonoid, check_seminormal_normal, monoid_face_gens
from .polyhedral import (
    Cone,
    Fan,
    face_lattice,
    fan_build,
    incidence_sign,
    relint_contains,
    skeleton_fan,
    trivial_fan,
)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def check_characteristic(characteristic):
    if characteristic == "all" or characteristic == 0:
        return characteristic
    if isinstance(characteristic, int) and is_prime(characteristic):
        return characteristic
    raise ValueError(f"characteristic must be 0, a prime, or 'all', "
                     f"got {characteristic!r}")


def prime_factors(n: int):
    n = abs(n)
    out = set()
    f = 2
    while f * f <= n:
        while n % f == 0:
            out.add(f)
            n //= f
        f += 1
    if n > 1:
        out.add(n)
    return out


# ---------------------------------------------------------------------------
# cohomology tables

@dataclass(frozen=True)
class CohomologyTable:
    """Dimensions of a graded cohomology group, indexed by cohomological degree.

    For characteristic "all" the entries hold the dimensions over Q and
    `corrections` holds the full entry list for each prime where torsion
    changes some dimension; for a fixed characteristic the entries are the
    dimensions over that field and `corrections` is empty.
    """

    characteristic: object   # 0, a prime, or "all"
    entries: tuple           # ((i, dim), ...), positive dims only, ascending i
    corrections: tuple = ()  # ((p, ((i, dim), ...)), ...)
    label: str = ""          # "oracle-computed" marks delegated answers

    def dims(self) -> dict:
        return dict(self.entries)

    def dims_mod(self, p: int) -> dict:
        if self.characteristic == "all":
            for q, ent in self.corrections:
                if q == p:
                    return dict(ent)
            return dict(self.entries)
        if self.characteristic == p:
            return dict(self.entries)
        raise ValueError(f"table over characteristic {self.characteristic} "
                         f"cannot answer for p={p}")

    def dim(self, i: int) -> int:
        return self.dims().get(i, 0)

    @property
    def bad_primes(self) -> tuple:
        return tuple(p for p, _ in self.corrections)

    @property
    def total(self) -> int:
        return sum(d for _, d in self.entries)

    def same_dims(self, other: "CohomologyTable") -> bool:
        return (self.entries == other.entries
                and self.corrections == other.corrections)


def zero_table(characteristic, label: str = "") -> CohomologyTable:
    return CohomologyTable(check_characteristic(characteristic), (), (), label)


def table_from_cochain(sizes: dict, mats: dict, characteristic,
                       label: str = "") -> CohomologyTable:
    """Cohomology dimensions of an integer cochain complex.

    sizes[j] is the rank of the degree-j term; mats[j] is the matrix of
    d^j: K^j -> K^{j+1} with rows indexed by the degree-(j+1) basis.
    """
    characteristic = check_characteristic(characteristic)
    divisors = {}
    for j, M in mats.items():
        if M and M[0]:
            divisors[j] = snf(M).divisors
        else:
            divisors[j] = ()

    def rank_in(j, p):
        dv = divisors.get(j, ())
        if p == 0:
            return len(dv)
        return sum(1 for x in dv if x % p != 0)

    def entries_in(p):
        out = []
        for j in sorted(sizes):
            n = sizes[j]
            if n == 0:
                continue
            h = n - rank_in(j, p) - rank_in(j - 1, p)
            assert h >= 0
            if h:
                out.append((j, h))
        return tuple(out)

    bad = set()
    for dv in divisors.values():
        for x in dv:
            bad |= prime_factors(x)

    if characteristic == "all":
        main = entries_in(0)
        corr = []
        for p in sorted(bad):
            ent = entries_in(p)
            if ent != main:
                corr.append((p, ent))
        return CohomologyTable("all", main, tuple(corr), label)
    if characteristic == 0:
        return CohomologyTable(0, entries_in(0), (), label)
    return CohomologyTable(characteristic, entries_in(characteristic), (), label)


def table_shift(table: CohomologyTable, k: int) -> CohomologyTable:
    ent = tuple((i + k, d) for i, d in table.entries)
    corr = tuple((p, tuple((i + k, d) for i, d in e))
                 for p, e in table.corrections)
    return CohomologyTable(table.characteristic, ent, corr, table.label)


def table_add(t1: CohomologyTable, t2: CohomologyTable) -> CohomologyTable:
    assert t1.characteristic == t2.characteristic

    def merge(e1, e2):
        acc = dict(e1)
        for i, d in e2:
            acc[i] = acc.get(i, 0) + d
        return tuple(sorted(acc.items()))

    main = merge(t1.entries, t2.entries)
    corr = []
    if t1.characteristic == "all":
        for p in sorted(set(t1.bad_primes) | set(t2.bad_primes)):
            ent = merge(tuple(t1.dims_mod(p).items()),
                        tuple(t2.dims_mod(p).items()))
            if ent != main:
                corr.append((p, ent))
    label = t1.label or t2.label
    return CohomologyTable(t1.characteristic, main, tuple(corr), label)


# ---------------------------------------------------------------------------
# stars and their cochain complexes

@dataclass(frozen=True)
class Star:
    """The cones whose normalized monoid contains a fixed degree."""

    degree: tuple
    cones: tuple   # Cone objects, sorted by (dim, rays)

    @property
    def keys(self) -> tuple:
        return tuple(c.key for c in self.cones)


def star(mcc: MonoidalComplex, a) -> Star:
    a = vec(a)
    members = [c for c in mcc.fan.cones
               if c.contains(a) and mcc.monoids[c.key].group.contains(a)]
    keys = {c.key for c in members}
    carrier = mcc.fan.carrier(a)
    if carrier is None:
        assert not members
    else:
        for d_ in members:
            assert set(carrier.rays) <= set(d_.rays)
            for e in mcc.fan.up_set(d_):
                assert e.key in keys
    return Star(a, tuple(sorted(members, key=lambda c: (c.dim, c.rays))))


_sign_memo: dict = {}


def _sign(big: Cone, small: Cone) -> int:
    key = (big.key, small.key)
    s = _sign_memo.get(key)
    if s is None:
        s = incidence_sign(big, small)
        _sign_memo[key] = s
    return s


def _star_cochain(fan: Fan, cones) -> tuple:
    """(sizes, matrices) of the quotient cochain complex on an up-closed set."""
    keys = {c.key for c in cones}
    by_deg: dict = {}
    for c in sorted(cones, key=lambda c: (c.dim, c.rays)):
        by_deg.setdefault(c.dim - 1, []).append(c.key)
    sizes = {j: len(v) for j, v in by_deg.items()}
    mats = {}
    for j in sorted(by_deg):
        if j + 1 not in by_deg:
            continue
        rows = by_deg[j + 1]
        cols = by_deg[j]
        col_index = {k: i for i, k in enumerate(cols)}
        M = [[0] * len(cols) for _ in rows]
        for r, big_key in enumerate(rows):
            big = fan.by_key(big_key)
            for small in fan.facets_of(big):
                ci = col_index.get(small.key)
                if ci is not None:
                    M[r][ci] = _sign(big, small)
        mats[j] = M
    return sizes, mats


def star_cohomology(mcc: MonoidalComplex, a, characteristic) -> CohomologyTable:
    """Reduced cohomology of the star complex of a, all cell degrees."""
    st = star(mcc, a)
    sizes, mats = _star_cochain(mcc.fan, st.cones)
    return table_from_cochain(sizes, mats, characteristic)


# ---------------------------------------------------------------------------
# the per-degree formula

def _complement_fan(fan: Fan, star_keys) -> Optional[Fan]:
    rest = [c for c in fan.cones if c.key not in star_keys]
    if not rest:
        return None
    keep = {c.key for c in rest}
    max_keys = [c.key for c in rest
                if not any(o.key != c.key and set(c.rays) < set(o.rays)
                           for o in rest)]
    for c in rest:
        for f in fan.faces_of(c):
            assert f.key in keep
    return Fan(fan.ambient_dim, tuple(rest), tuple(sorted(max_keys)))


def complex_avoiding(mcc: MonoidalComplex, b) -> Optional[MonoidalComplex]:
    """The subcomplex on the cones whose normalized monoid misses b.

    None means every cone sees b, leaving the empty subcomplex (the zero
    ring).  Removing an up-closed set keeps the rest a fan.
    """
    st = star(mcc, b)
    subfan = _complement_fan(mcc.fan, set(st.keys))
    if subfan is None:
        return None
    return restrict(mcc, subfan)


@dataclass(frozen=True)
class DegreeStep:
    """One splitting level of the per-degree formula.

    The cohomology of the current complex is the summand carried by the
    star of -a plus the cohomology of the subcomplex on the remaining
    cone keys; an empty remainder ends the recursion.
    """

    star_keys: tuple
    summand: CohomologyTable
    remaining: tuple


@dataclass(frozen=True)
class DegreeComputation:
    degree: tuple
    characteristic: object
    table: CohomologyTable
    steps: tuple                           # DegreeStep per splitting level
    oracle_tail: Optional[CohomologyTable]  # set when the tail was delegated


def local_cohomology_trace(mcc: MonoidalComplex, a,
                           characteristic) -> DegreeComputation:
    """Dimensions of H^i_m(R)_a, keeping every step of the splitting.

    A seminormal complex is one star step.  Otherwise the star summand at
    -a splits off and the subcomplex away from the star continues; when a
    non-seminormal complex has empty star the formula is uninformative
    and the Cech oracle finishes, labeled as such.
    """
    characteristic = check_characteristic(characteristic)
    a = vec(a)
    current = mcc
    steps = []
    parts = []
    oracle_tail = None
    while True:
        st = star(current, vneg(a))
        if current.seminormal:
            sizes, mats = _star_cochain(current.fan, st.cones)
            summand = table_shift(
                table_from_cochain(sizes, mats, characteristic), 1)
            steps.append(DegreeStep(st.keys, summand, ()))
            parts.append(summand)
            break
        if not st.cones:
            from .cech import cech_degree
            t = cech_degree(current, a, characteristic)
            oracle_tail = CohomologyTable(
                t.characteristic, t.entries, t.corrections,
                "oracle-computed")
            parts.append(oracle_tail)
            break
        sizes, mats = _star_cochain(current.fan, st.cones)
        summand = table_shift(
            table_from_cochain(sizes, mats, characteristic), 1)
        subfan = _complement_fan(current.fan, set(st.keys))
        remaining = tuple(c.key for c in subfan.cones) if subfan else ()
        steps.append(DegreeStep(st.keys, summand, remaining))
        parts.append(summand)
        if subfan is None:
            break
        current = restrict(current, subfan)
    table = parts[0]
    for t in parts[1:]:
        table = table_add(table, t)
    return DegreeComputation(a, characteristic, table, tuple(steps),
                             oracle_tail)


def local_cohomology_degree(mcc: MonoidalComplex, a,
                            characteristic) -> CohomologyTable:
    """Dimensions of H^i_m(R)_a for the ring of the complex."""
    return local_cohomology_trace(mcc, a, characteristic).table


# ---------------------------------------------------------------------------
# star classes: a finite decomposition of all degrees

@dataclass(frozen=True)
class StarClass:
    """All degrees in one coset of K_C inside the relative interior of C.

    Every degree of the class has the same star, so one table per class
    covers all of Z^d once every carrier cone is enumerated.  The class
    with carrier None stands for the degrees outside the fan's support.
    """

    carrier: Optional[Cone]
    coset_rep: Optional[tuple]
    star: Optional[Star]
    class_lattice: Optional[LatticeBasis]
    class_count_within_carrier: int


def _coset_reps(sub: LatticeBasis, sup: LatticeBasis) -> list:
    """One ambient representative per coset of sub in sup (finite index)."""
    d = sup.ambient_dim
    r = len(sup.basis)
    if r == 0:
        return [tuple([0] * d)]
    A = []
    for b in sub.basis:
        c = solve_in_lattice(sup, b)
        assert c is not None
        A.append(c)
    assert len(A) == r
    res = snf(A)
    vinv = unimodular_inverse(res.V)
    reps = []
    for cvec in itertools.product(*[range(dv) for dv in res.divisors]):
        x = [sum(cvec[i] * vinv[i][j] for i in range(r)) for j in range(r)]
        amb = tuple(sum(x[i] * sup.basis[i][j] for i in range(r))
                    for j in range(d))
        reps.append(amb)
    return reps


def _push_into_relint(cone: Cone, v, step):
    out = vec(v)
    guard = 0
    while not relint_contains(cone, out):
        out = vadd(out, step)
        guard += 1
        assert guard <= 10000, "relative-interior push did not terminate"
    return out


def star_classes(mcc: MonoidalComplex) -> tuple:
    """StarClass decomposition of Z^d, one entry per coset per carrier.

    For each cone C the lattice K_C is the intersection of the monoid
    groups of all cones above C, cut to lin C; degrees of Z^d inside
    relint C have equal stars exactly when they agree mod K_C.  Each
    class's star is spot-checked on three perturbed representatives.
    """
    fan = mcc.fan
    rng = random.Random(7)
    out = []
    for c in fan.cones:
        lin = c.lin_basis
        K = lin
        for d_ in fan.up_set(c):
            K = intersect(K, mcc.monoids[d_.key].group)
        inv = quotient_invariants(K, lin)
        assert inv.free_rank == 0
        index = inv.index
        w = tuple([0] * fan.ambient_dim)
        for r in c.rays:
            w = vadd(w, r)
        m = math.lcm(*inv.divisors) if inv.divisors else 1
        step = vscale(m, w)
        for rep in sorted(_coset_reps(K, lin)):
            b = _push_into_relint(c, rep, step)
            st = star(mcc, b)
            for _ in range(3):
                v = b
                for kvec in K.basis:
                    v = vadd(v, vscale(rng.randint(-2, 2), kvec))
                v = _push_into_relint(c, v, step)
                assert star(mcc, v).keys == st.keys
            out.append(StarClass(c, b, st, K, index))
        assert sum(1 for sc in out if sc.carrier is c) == index
    out.append(StarClass(None, None, None, None, 1))
    return tuple(out)


# ---------------------------------------------------------------------------
# global reports

@dataclass(frozen=True)
class ClassReport:
    star_class: StarClass
    table: CohomologyTable   # H^i_m(R)_a for every a with -a in the class
    note: str = ""


@dataclass(frozen=True)
class CohomologyReport:
    characteristic: object
    fan_dim: int
    entries: tuple   # ClassReport, classes in canonical order


def cohomology_report(mcc: MonoidalComplex, characteristic) -> CohomologyReport:
    """One table per star class, covering every degree of Z^d at once."""
    characteristic = check_characteristic(characteristic)
    if not mcc.seminormal:
        raise ComplexError(
            "cohomology_report requires a seminormal complex; use "
            "local_cohomology_degree for per-degree answers")
    entries = []
    for sc in star_classes(mcc):
        if sc.carrier is None:
            entries.append(ClassReport(
                sc, zero_table(characteristic),
                "vanishes: -a outside the support of the complex"))
            continue
        sizes, mats = _star_cochain(mcc.fan, sc.star.cones)
        table = table_shift(
            table_from_cochain(sizes, mats, characteristic), 1)
        entries.append(ClassReport(sc, table))
    return CohomologyReport(characteristic, mcc.fan.dim, tuple(entries))


def _report_vanishes_below(report: CohomologyReport, top: int) -> bool:
    for e in report.entries:
        if any(i < top and d for i, d in e.table.entries):
            return False
        for _, ent in e.table.corrections:
            if any(i < top and d for i, d in ent):
                return False
    return True


def is_cohen_macaulay(mcc: MonoidalComplex, characteristic) -> bool:
    """CM over the field(s): H^i_m vanishes below the fan dimension."""
    report = cohomology_report(mcc, characteristic)
    return _report_vanishes_below(report, mcc.fan.dim)


@dataclass(frozen=True)
class DepthResult:
    depth: int
    is_CM: bool
    m_k: int
    skeleton_CM_flags: tuple   # CM flag of the t-skeleton complex, t = 0..dim


def depth(mcc: MonoidalComplex, characteristic) -> DepthResult:
    """Depth by rank selection: the largest t with all skeleta up to t CM."""
    characteristic = check_characteristic(characteristic)
    if not mcc.seminormal:
        raise ComplexError("depth requires a seminormal complex")
    top = mcc.fan.dim
    flags = []
    for t in range(top + 1):
        sk = restrict(mcc, skeleton_fan(mcc.fan, t))
        flags.append(is_cohen_macaulay(sk, characteristic))
    m_k = 0
    while m_k + 1 <= top and all(flags[:m_k + 2]):
        m_k += 1
    assert flags[0]
    return DepthResult(m_k, m_k == top, m_k, tuple(flags))


# ---------------------------------------------------------------------------
# per-face counts for a single monoid

@dataclass(frozen=True)
class FaceDepthResult:
    c_k: int   # largest t with k[M cap F] CM for every face of dim <= t
    m_k: int   # rank-selection depth of the face-poset complex of M


def _one_cone_complex(M: AffineMonoid, face: Cone) -> MonoidalComplex:
    if face.dim == 0:
        fan = trivial_fan(M.ambient_dim)
        return build_complex(fan, {(): []})
    fan = fan_build([face])
    return build_complex(fan, {face.key: list(monoid_face_gens(M, face))})


def c_k_monoid(M: AffineMonoid, characteristic) -> FaceDepthResult:
    """Largest face dimension below which all face rings are CM."""
    characteristic = check_characteristic(characteristic)
    if not check_seminormal_normal(M).seminormal:
        raise ValueError("c_k is defined here for seminormal monoids only")
    faces = face_lattice(M.cone).faces
    cm_by_dim: dict = {}
    for f in faces:
        res = depth(_one_cone_complex(M, f), characteristic)
        cm_by_dim.setdefault(f.dim, []).append(res.is_CM)
    top = M.cone.dim
    all_cm = [all(cm_by_dim.get(t, [True])) for t in range(top + 1)]
    assert all_cm[0]
    c_k = 0
    while c_k + 1 <= top and all_cm[c_k + 1]:
        c_k += 1
    m_k = depth(_one_cone_complex(M, M.cone), characteristic).m_k
    assert m_k >= c_k
    return FaceDepthResult(c_k, m_k)


# ---------------------------------------------------------------------------
# the simplicial comparison for Stanley complexes

@dataclass(frozen=True)
class BbrEntry:
    cone_key: tuple
    cellular: CohomologyTable     # H^i via the star cochain complex
    simplicial: CohomologyTable   # H^i via the order complex, same indexing


@dataclass(frozen=True)
class BbrReport:
    characteristic: object
    entries: tuple


def _is_stanley(mcc: MonoidalComplex) -> bool:
    for c in mcc.fan.cones:
        m = mcc.monoids[c.key]
        if not mcc.cone_flags[c.key].normal:
            return False
        lin = c.lin_basis
        if not (all(lin.contains(b) for b in m.group.basis)
                and all(m.group.contains(b) for b in lin.basis)):
            return False
    return True


def _order_complex_cochain(fan: Fan, verts) -> tuple:
    """Reduced simplicial cochain data of the chain complex of a poset."""
    verts = sorted(verts, key=lambda c: (c.dim, c.rays))
    below = {(a.key, b.key): set(a.rays) < set(b.rays)
             for a in verts for b in verts}
    chains = {-1: [()]}

    def grow(prefix, start):
        q = len(prefix) - 1
        chains.setdefault(q, []).append(tuple(v.key for v in prefix))
        for i in range(start, len(verts)):
            if not prefix or below[(prefix[-1].key, verts[i].key)]:
                grow(prefix + [verts[i]], i + 1)

    for i in range(len(verts)):
        grow([verts[i]], i + 1)

    sizes = {q: len(v) for q, v in chains.items()}
    mats = {}
    for q in sorted(chains):
        if q + 1 not in chains:
            continue
        rows = chains[q + 1]
        cols = {ch: i for i, ch in enumerate(chains[q])}
        M = [[0] * len(cols) for _ in rows]
        for r, ch in enumerate(rows):
            for i in range(len(ch)):
                sub = ch[:i] + ch[i + 1:]
                M[r][cols[sub]] += (-1) ** i
        mats[q] = M
    return sizes, mats


def bbr_formula(mcc: MonoidalComplex, characteristic) -> BbrReport:
    """Order-complex specialization for Stanley complexes, per cone.

    For each cone the star cochain table and the reduced cohomology of the
    order complex of the open star agree after an index shift by the cone
    dimension; both are reported and the agreement is asserted, as is
    consistency with the star-class report.
    """
    characteristic = check_characteristic(characteristic)
    if not _is_stanley(mcc):
        raise ValueError("bbr_formula requires a Stanley complex "
                         "(every monoid the full lattice part of its cone)")
    report = cohomology_report(mcc, characteristic)
    by_carrier = {e.star_class.carrier.key: e for e in report.entries
                  if e.star_class.carrier is not None}
    entries = []
    for c in mcc.fan.cones:
        ups = mcc.fan.up_set(c)
        sizes, mats = _star_cochain(mcc.fan, ups)
        cellular = table_shift(
            table_from_cochain(sizes, mats, characteristic), 1)
        verts = [d_ for d_ in ups if d_.key != c.key]
        ssizes, smats = _order_complex_cochain(mcc.fan, verts)
        simplicial = table_shift(
            table_from_cochain(ssizes, smats, characteristic), c.dim + 1)
        assert cellular.same_dims(simplicial), (c.key, cellular, simplicial)
        cls = by_carrier[c.key]
        assert cls.star_class.class_count_within_carrier == 1
        assert cls.table.same_dims(cellular)
        entries.append(BbrEntry(c.key, cellular, simplicial))
    return BbrReport(characteristic, tuple(entries))
