"""Monoidal complexes on fans.

A monoidal complex attaches an affine monoid to every cone of a fan so that
the monoid of a face is exactly the restriction of the monoid of any cone
containing it.  Validation checks this generator-wise in both directions.
The module also computes the graded support, cone-wise seminormalization,
and a bounded presentation of the associated ring as a quotient of a
polynomial ring: squarefree monomials whose variable support fits in no
single maximal cone, plus per-maximal-cone binomials, interreduced and
verified by congruence closure against the graded dimension.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .lattice import LatticeBasis, vadd
from .monoid import (
    AffineMonoid,
    check_seminormal_normal,
    hilbert_basis,
    monoid_build,
    monoid_face_gens,
    monoid_member,
    seminormalized_monoid,
)
from .polyhedral import Cone, Fan


class ComplexError(ValueError):
    pass


@dataclass(eq=False)
class MonoidalComplex:
    fan: Fan
    monoids: dict          # cone key -> AffineMonoid
    seminormal: bool       # every cone monoid is seminormal
    normal_monoids: bool   # every cone monoid is normal
    cone_flags: dict       # cone key -> NormalityCheck

    @property
    def ambient_dim(self) -> int:
        return self.fan.ambient_dim

    def monoid_at(self, cone) -> AffineMonoid:
        key = cone.key if isinstance(cone, Cone) else tuple(cone)
        return self.monoids[key]


def _restriction_monoid(M: AffineMonoid, face: Cone) -> AffineMonoid:
    gens = monoid_face_gens(M, face)
    return monoid_build(gens, M.ambient_dim)


def _validate(fan: Fan, monoids: dict) -> None:
    for c in fan.cones:
        M = monoids.get(c.key)
        if M is None:
            raise ComplexError(f"no monoid attached to cone {c.key}")
        if M.cone.key != c.key:
            raise ComplexError(
                f"monoid generators for cone {c.key} span {M.cone.key} instead"
            )
    for c in fan.cones:
        Mc = monoids[c.key]
        for d_ in fan.faces_of(c):
            if d_.key == c.key:
                continue
            Md = monoids[d_.key]
            restr = _restriction_monoid(Mc, d_)
            for g in restr.generators:
                if monoid_member(Md, g) is None:
                    raise ComplexError(
                        f"face {d_.key} of {c.key}: restricted generator {g} "
                        f"is missing from the face monoid"
                    )
            for g in Md.generators:
                if monoid_member(restr, g) is None:
                    raise ComplexError(
                        f"face {d_.key} of {c.key}: face generator {g} is not "
                        f"generated by the restriction"
                    )


def _with_flags(fan: Fan, monoids: dict) -> MonoidalComplex:
    flags = {k: check_seminormal_normal(m) for k, m in monoids.items()}
    sn = all(f.seminormal for f in flags.values())
    nm = all(f.normal for f in flags.values())
    return MonoidalComplex(fan, monoids, sn, nm, flags)


def build_complex(fan: Fan, maximal_monoid_gens: Optional[dict] = None,
                  stanley: bool = False) -> MonoidalComplex:
    """Assemble and fully validate a monoidal complex.

    Without stanley, one generator list per maximal cone is required (keyed
    by the cone's ray tuple); face monoids are derived by restriction and
    cross-checked between all parents.  With stanley, every monoid is the
    full lattice part of its cone.
    """
    d = fan.ambient_dim
    monoids = {}
    if stanley:
        for c in fan.cones:
            lat = LatticeBasis(d, tuple(c.lin_basis.basis))
            monoids[c.key] = monoid_build(hilbert_basis(c, lat), d)
    else:
        if maximal_monoid_gens is None:
            raise ComplexError("generator lists required when stanley is off")
        given = {tuple(k): v for k, v in maximal_monoid_gens.items()}
        if set(given) != set(fan.maximal):
            raise ComplexError(
                f"generator lists must be keyed by the maximal cones "
                f"{sorted(fan.maximal)}, got {sorted(given)}"
            )
        for key, gens in given.items():
            M = monoid_build(gens, d)
            if M.cone.key != key:
                raise ComplexError(
                    f"generators {tuple(gens)} span cone {M.cone.key}, "
                    f"expected {key}"
                )
            monoids[key] = M
        for c in fan.cones:
            if c.key in monoids:
                continue
            parents = [k for k in fan.maximal
                       if set(c.rays) <= set(k)]
            assert parents
            first = _restriction_monoid(monoids[min(parents)], c)
            monoids[c.key] = first
    _validate(fan, monoids)
    return _with_flags(fan, monoids)


def restrict(mcc: MonoidalComplex, subfan: Fan) -> MonoidalComplex:
    """The induced complex on a subfan; monoids are shared, not copied."""
    for c in subfan.cones:
        if c.key not in mcc.monoids:
            raise ComplexError(f"cone {c.key} is not part of the complex")
    monoids = {c.key: mcc.monoids[c.key] for c in subfan.cones}
    flags = {k: mcc.cone_flags[k] for k in monoids}
    sn = all(f.seminormal for f in flags.values())
    nm = all(f.normal for f in flags.values())
    return MonoidalComplex(subfan, monoids, sn, nm, flags)


@dataclass(frozen=True)
class SupportPoint:
    point: tuple
    carrier: tuple   # keys of the cones whose monoid contains the point

    @property
    def value(self) -> int:
        return 1 if self.carrier else 0


def graded_dim(mcc: MonoidalComplex, a) -> SupportPoint:
    a = tuple(int(x) for x in a)
    carrier = tuple(c.key for c in mcc.fan.cones
                    if monoid_member(mcc.monoids[c.key], a) is not None)
    return SupportPoint(a, carrier)


def seminormalize_complex(mcc: MonoidalComplex) -> MonoidalComplex:
    """Cone-wise seminormalization, re-validated as a complex."""
    monoids = {k: seminormalized_monoid(m) for k, m in mcc.monoids.items()}
    _validate(mcc.fan, monoids)
    out = _with_flags(mcc.fan, monoids)
    assert out.seminormal
    return out


# ---------------------------------------------------------------------------
# presentation ideals

@dataclass(frozen=True)
class PresentationIdeal:
    variables: tuple      # chosen generators of the support, lex-sorted
    monomial_gens: tuple  # squarefree exponent tuples
    binomial_gens: tuple  # (u, v, maximal cone key), u the higher term
    degree_bound: int


def _exponent_tuples(n, bound):
    if n == 0:
        return [()]
    out = []
    for rest in _exponent_tuples(n - 1, bound):
        s = sum(rest)
        for t in range(bound - s + 1):
            out.append(rest + (t,))
    return out


_ZERO = "zero"


def _find(parent, x):
    root = x
    while parent.get(root, root) != root:
        root = parent[root]
    while parent.get(x, x) != x:
        parent[x], x = root, parent[x]
    return root


def _union(parent, a, b) -> bool:
    ra, rb = _find(parent, a), _find(parent, b)
    if ra == rb:
        return False
    if rb == _ZERO or (ra != _ZERO and ra > rb):
        parent[ra] = rb
    else:
        parent[rb] = ra
    return True


def _divides(g, m):
    return all(gi <= mi for gi, mi in zip(g, m))


def _closure(monomials, mono_set, mono_gens, bino_gens):
    """Congruence closure of the generator relations on the truncated set."""
    parent = {}
    changed = True
    while changed:
        changed = False
        for m in monomials:
            for g in mono_gens:
                if _divides(g, m):
                    changed |= _union(parent, m, _ZERO)
            for u, v in bino_gens:
                if _divides(u, m):
                    t = tuple(mi - ui + vi for mi, ui, vi in zip(m, u, v))
                    if t in mono_set:
                        changed |= _union(parent, m, t)
                if _divides(v, m):
                    t = tuple(mi - vi + ui for mi, ui, vi in zip(m, u, v))
                    if t in mono_set:
                        changed |= _union(parent, m, t)
    return parent


def presentation(mcc: MonoidalComplex, degree_bound: int) -> PresentationIdeal:
    """Bounded presentation of the ring, verified by congruence closure.

    Monomial part: minimal squarefree monomials whose variable support lies
    in no single maximal cone.  Binomial part: equal-evaluation pairs within
    a maximal cone, chosen degree-by-degree.  Both parts are interreduced
    (a generator implied by the others is dropped), then the closure of the
    survivors is checked to produce exactly one class per achieved
    multidegree, matching the graded dimension.
    """
    if degree_bound < 1:
        raise ValueError("degree bound must be at least 1")
    variables = tuple(sorted({g for k in mcc.fan.maximal
                              for g in mcc.monoids[k].generators}))
    n = len(variables)
    assert n <= 16, "presentation limited to small generator counts"
    supports = {k: frozenset(i for i in range(n)
                             if mcc.fan.by_key(k).contains(variables[i]))
                for k in mcc.fan.maximal}

    def support_in_one_cone(idx_set):
        return any(idx_set <= v for v in supports.values())

    for i in range(n):
        assert support_in_one_cone(frozenset([i]))

    nonfaces = []
    for size in range(2, n + 1):
        for comb in itertools.combinations(range(n), size):
            s = frozenset(comb)
            if support_in_one_cone(s):
                continue
            if any(set(kept) <= s for kept in nonfaces):
                continue
            nonfaces.append(comb)
    mono_gens = [tuple(1 if i in s else 0 for i in range(n)) for s in nonfaces]

    monomials = sorted(_exponent_tuples(n, degree_bound),
                       key=lambda e: (sum(e), e))
    mono_set = set(monomials)

    def evaluate(e):
        acc = (0,) * mcc.ambient_dim
        for i, t in enumerate(e):
            for _ in range(t):
                acc = vadd(acc, variables[i])
        return acc

    def truly_zero(e):
        supp = frozenset(i for i, t in enumerate(e) if t > 0)
        return not support_in_one_cone(supp)

    groups = {}
    for m in monomials:
        if sum(m) == 0 or truly_zero(m):
            continue
        groups.setdefault(evaluate(m), []).append(m)

    chosen = []
    parent = _closure(monomials, mono_set, mono_gens, chosen)
    for ev in sorted(groups, key=lambda ev: (sum(groups[ev][0]), groups[ev][0])):
        members = groups[ev]
        rep = members[0]
        for m in members[1:]:
            if _find(parent, m) != _find(parent, rep):
                chosen.append((m, rep))
                parent = _closure(monomials, mono_set, mono_gens, chosen)

    # interreduce: drop any generator whose relation the others still derive
    kept_m = list(mono_gens)
    kept_b = list(chosen)
    removable = ([("m", g) for g in mono_gens] + [("b", g) for g in chosen])

    def _removal_key(kg):
        kind, g = kg
        if kind == "m":
            return (sum(g), 0, g, ())
        return (sum(g[0]), 1, g[0], g[1])

    removable.sort(key=_removal_key, reverse=True)
    for kind, g in removable:
        trial_m = [x for x in kept_m if not (kind == "m" and x == g)]
        trial_b = [x for x in kept_b if not (kind == "b" and x == g)]
        par = _closure(monomials, mono_set, trial_m, trial_b)
        if kind == "m":
            implied = _find(par, g) == _ZERO
        else:
            implied = _find(par, g[0]) == _find(par, g[1])
        if implied:
            kept_m, kept_b = trial_m, trial_b

    # verification against the graded dimension
    parent = _closure(monomials, mono_set, kept_m, kept_b)
    class_of = {}
    for m in monomials:
        if sum(m) == 0:
            continue
        root = _find(parent, m)
        if truly_zero(m):
            if root != _ZERO:
                raise ComplexError(
                    f"presentation verification failed: zero monomial {m} "
                    f"not derived to zero"
                )
        else:
            if root == _ZERO:
                raise ComplexError(
                    f"presentation verification failed: nonzero monomial {m} "
                    f"derived to zero"
                )
            class_of.setdefault(evaluate(m), set()).add(root)
    for ev, roots in sorted(class_of.items()):
        want = graded_dim(mcc, ev).value
        if len(roots) != want:
            raise ComplexError(
                f"presentation verification failed at multidegree {ev}: "
                f"{len(roots)} classes, graded dimension {want}"
            )

    bino_out = []
    for u, v in kept_b:
        supp = frozenset(i for i in range(n) if u[i] > 0 or v[i] > 0)
        home = next(k for k in sorted(supports) if supp <= supports[k])
        bino_out.append((u, v, home))
    bino_out.sort(key=lambda t: (sum(t[0]), t[0], t[1]))
    return PresentationIdeal(variables,
                             tuple(sorted(kept_m, key=lambda e: (sum(e), e))),
                             tuple(bino_out),
                             degree_bound)
