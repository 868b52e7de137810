"""Graded pieces of local cohomology by brute force.

The Cech complex on the face poset has one summand per cone: the degree-a
piece of the ring localized at that cone's monoid, a k-line or zero.  Its
cohomology gives H^i_m(R)_a directly, with no hypotheses on the complex,
which makes it the reference oracle for the star formula.

Deciding whether a localized piece is nonzero means deciding whether
a = z - y for a numerator z in some monoid above the cone and a
denominator y in the cone's own monoid.  A finite certificate exists:
summing the facet normals through the cone inside a candidate target
gives a functional that kills denominators, so candidate numerators
decompose into a part of bounded weight and a part absorbed by the
denominator group.  Reachability of a's coset at exactly that weight is
the whole test, so both answers are certified; the only escape hatch is
a cap on the state count, reported by exception, never as a silent 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .cohomology import CohomologyTable, check_characteristic, is_prime, \
    table_from_cochain
from .lattice import (
    dot,
    hnf,
    is_zero,
    solve_in_lattice,
    vadd,
    vec,
    vscale,
    vsub,
)
from .moncomplex import MonoidalComplex
from .monoid import monoid_member
from .polyhedral import Cone, facets_through, incidence_sign

DEFAULT_STATE_CAP = 200_000
WITNESS_HARD_CAP = 10_000


class BoundExhausted(Exception):
    """The membership search hit its state cap before certifying an answer."""

    def __init__(self, cone_key, degree, cap):
        self.cone_key = cone_key
        self.degree = degree
        self.cap = cap
        super().__init__(
            f"piece test at cone {cone_key}, degree {degree}: "
            f"state cap {cap} exhausted; raise the bound")


@dataclass(frozen=True)
class PieceResult:
    """Dimension (0 or 1) of one localized piece, with a witness when 1."""

    value: int
    witness: Optional[tuple]   # (z, y) with z - y = the requested degree
    steps: int                 # multiples of the denominator sum consumed


def _coset_canon(L):
    """Reduction closure sending v to the canonical member of v + L."""
    if not L.basis:
        return lambda v: tuple(v)
    res = hnf([list(b) for b in L.basis])
    piv = []
    for r in res.H:
        if is_zero(r):
            continue
        c = next(j for j, x in enumerate(r) if x != 0)
        piv.append((c, tuple(r)))

    def canon(v):
        w = list(v)
        for c, r in piv:
            q = w[c] // r[c]
            if q:
                for j in range(len(w)):
                    w[j] -= q * r[j]
        return tuple(w)

    return canon


def _decide(mcc: MonoidalComplex, source: Cone, targets, a,
            state_cap: int) -> bool:
    """Is a = z - y solvable with y in the source monoid, z in a target's?

    Write C for the source cone, M0 for its monoid, and fix a target D
    with monoid MD.  phi sums the facet normals of D through C, so
    phi >= 0 on MD and phi = 0 exactly on the generators lying in C,
    because a face of a pointed cone is the intersection of the facets
    containing it and MD meets C in M0.  The search accepts iff some sum
    s of phi-positive generators of MD has phi(s) = phi(a) and s = a
    modulo Z M0.

    Accept implies solvable: a - s = k+ - k- with k+, k- in M0 by
    splitting the integer combination, so z = s + k+ lies in MD,
    y = k- lies in M0, and z - y = a.  Solvable implies accept: given
    z = a + y, split a generator decomposition of z into its phi-positive
    part s and phi-zero part z0; z0 lies in M0 by the face argument, so
    phi(s) = phi(z) = phi(a) and s = z - z0 = a + y - z0 = a modulo
    Z M0.  States are (coset mod Z M0, weight), which is sound to
    deduplicate because extending two equal states by the same
    generators keeps them equal.
    """
    a = vec(a)
    M0 = mcc.monoids[source.key]
    if not M0.generators:
        return any(monoid_member(mcc.monoids[d.key], a) is not None
                   for d in targets)
    canon = _coset_canon(M0.group)
    target_rep = canon(a)
    zero = tuple([0] * len(a))
    for d_cone in targets:
        MD = mcc.monoids[d_cone.key]
        if solve_in_lattice(MD.group, a) is None:
            continue
        through = facets_through(d_cone, source)
        if any(dot(f, a) < 0 for f in through):
            continue
        if not through:
            # the source is the target itself; the group test was the test
            return True
        phi = tuple(sum(f[j] for f in through) for j in range(len(a)))
        weight = dot(phi, a)
        pos = [(g, dot(phi, g)) for g in MD.generators if dot(phi, g) > 0]
        assert all(dot(phi, g) >= 0 for g in MD.generators)
        start = canon(zero)
        if weight == 0:
            if target_rep == start:
                return True
            continue
        seen = {(start, 0)}
        frontier = [(start, 0)]
        found = False
        while frontier and not found:
            nxt = []
            for rep, w in frontier:
                for g, wg in pos:
                    w2 = w + wg
                    if w2 > weight:
                        continue
                    key = (canon(vadd(rep, g)), w2)
                    if key in seen:
                        continue
                    seen.add(key)
                    if len(seen) > state_cap:
                        raise BoundExhausted(d_cone.key, a, state_cap)
                    if w2 == weight and key[0] == target_rep:
                        found = True
                        break
                    nxt.append(key)
                if found:
                    break
            frontier = nxt
        if found:
            return True
    return False


def _witness(mcc: MonoidalComplex, source: Cone, targets, a):
    """Explicit (z, y, steps) once the piece is known to be nonzero.

    Adding the sum of the source generators to the numerator is monotone,
    so scanning steps upward finds the least witness.
    """
    a = vec(a)
    M0 = mcc.monoids[source.key]
    sigma = tuple([0] * len(a))
    for g in M0.generators:
        sigma = vadd(sigma, g)
    t = 0
    while True:
        z = vadd(a, vscale(t, sigma))
        for d_cone in targets:
            if monoid_member(mcc.monoids[d_cone.key], z) is not None:
                return z, vscale(t, sigma), t
        t += 1
        assert t <= WITNESS_HARD_CAP, \
            "witness scan exceeded its cap despite a positive certificate"


def localization_piece(mcc: MonoidalComplex, cone, a,
                       state_cap: Optional[int] = None) -> PieceResult:
    """The degree-a piece of the ring localized at a cone of the complex."""
    cap = DEFAULT_STATE_CAP if state_cap is None else state_cap
    if not isinstance(cone, Cone):
        cone = mcc.fan.by_key(tuple(cone))
    a = vec(a)
    targets = mcc.fan.up_set(cone)
    if not _decide(mcc, cone, targets, a, cap):
        return PieceResult(0, None, 0)
    z, y, t = _witness(mcc, cone, targets, a)
    assert vsub(z, y) == a
    assert monoid_member(mcc.monoids[cone.key], y) is not None
    assert any(monoid_member(mcc.monoids[d.key], z) is not None
               for d in targets)
    return PieceResult(1, (z, y), t)


# ---------------------------------------------------------------------------
# the complex in one degree

@dataclass(frozen=True)
class CechSlice:
    """All nonzero localized pieces in one degree, with the maps between them.

    levels[(t, pieces)] lists the nonzero pieces among cones of dimension t
    as (cone_key, witness) pairs; mats pairs t with the matrix of the map
    from level t to level t+1, rows indexed by the t+1 pieces.
    """

    degree: tuple
    levels: tuple
    mats: tuple

    def sizes(self) -> dict:
        return {t: len(p) for t, p in self.levels}

    def matrices(self) -> dict:
        return {t: [list(r) for r in rows] for t, rows in self.mats}

    def keys_at(self, t: int) -> tuple:
        for lt, pieces in self.levels:
            if lt == t:
                return tuple(k for k, _ in pieces)
        return ()


def _matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B)))
             for j in range(len(B[0]))] for i in range(len(A))]


def cech_slice(mcc: MonoidalComplex, a,
               state_cap: Optional[int] = None) -> CechSlice:
    a = vec(a)
    fan = mcc.fan
    by_dim: dict = {}
    for c in fan.cones:
        pr = localization_piece(mcc, c, a, state_cap)
        if pr.value:
            by_dim.setdefault(c.dim, []).append((c, pr.witness))
    mats = {}
    for t in sorted(by_dim):
        if t + 1 not in by_dim:
            continue
        rows = by_dim[t + 1]
        cols = by_dim[t]
        M = [[0] * len(cols) for _ in rows]
        for ri, (big, _) in enumerate(rows):
            targets = fan.up_set(big)
            cap = DEFAULT_STATE_CAP if state_cap is None else state_cap
            for ci, (small, _) in enumerate(cols):
                if not set(small.rays) <= set(big.rays):
                    continue
                if _decide(mcc, small, targets, a, cap):
                    M[ri][ci] = incidence_sign(big, small)
        mats[t] = M
    for t in sorted(mats):
        if t + 1 in mats:
            square = _matmul(mats[t + 1], mats[t])
            assert all(x == 0 for row in square for x in row), \
                f"maps at degree {a} do not compose to zero at level {t}"
    levels = tuple(sorted((t, tuple((c.key, w) for c, w in v))
                          for t, v in by_dim.items()))
    return CechSlice(a, levels,
                     tuple(sorted((t, tuple(tuple(r) for r in M))
                                  for t, M in mats.items())))


def cech_degree(mcc: MonoidalComplex, a, characteristic,
                state_cap: Optional[int] = None) -> CohomologyTable:
    """H^i_m(R)_a from the localized pieces; no seminormality needed."""
    check_characteristic(characteristic)
    sl = cech_slice(mcc, a, state_cap)
    return table_from_cochain(sl.sizes(), sl.matrices(), characteristic)


# ---------------------------------------------------------------------------
# linear algebra over a prime field

def _modp(M, p):
    return [[x % p for x in row] for row in M]


def _rref(M, p):
    """Row-reduced form over F_p; returns (rows, pivot column list)."""
    R = [row[:] for row in M]
    pivots = []
    r = 0
    ncols = len(R[0]) if R else 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(R)) if R[i][c] % p), None)
        if pr is None:
            continue
        R[r], R[pr] = R[pr], R[r]
        inv = pow(R[r][c], p - 2, p)
        R[r] = [(x * inv) % p for x in R[r]]
        for i in range(len(R)):
            if i != r and R[i][c] % p:
                f = R[i][c] % p
                R[i] = [(x - f * y) % p for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == len(R):
            break
    return R, pivots


def _rank_p(M, p) -> int:
    if not M or not M[0]:
        return 0
    return len(_rref(M, p)[1])


def _nullspace_p(M, p, ncols) -> list:
    """Basis of the kernel over F_p, as column vectors of length ncols."""
    if not M or not M[0]:
        return [[1 if i == j else 0 for i in range(ncols)]
                for j in range(ncols)]
    R, pivots = _rref(M, p)
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for r, pc in enumerate(pivots):
            v[pc] = (-R[r][fc]) % p
        out.append(v)
    return out


def _stack_columns(cols, nrows):
    return [[col[i] for col in cols] for i in range(nrows)]


# ---------------------------------------------------------------------------
# the Frobenius action

@dataclass(frozen=True)
class FrobeniusStep:
    """The induced p-th power map on H^i, from degree a to degree p*a."""

    i: int
    dim_source: int
    dim_target: int
    rank: int
    injective: bool
    bijective: bool


@dataclass(frozen=True)
class FrobeniusCheck:
    degree: tuple
    prime: int
    steps: tuple   # FrobeniusStep for every i where either side is nonzero


def _columns_mod(M, p):
    if not M or not M[0]:
        return []
    return [[row[j] % p for row in M] for j in range(len(M[0]))]


def frobenius_check(mcc: MonoidalComplex, a, p: int,
                    state_cap: Optional[int] = None) -> FrobeniusCheck:
    """Track the Frobenius action on local cohomology in one degree.

    The p-th power map sends the degree-a piece at each cone into the
    degree-pa piece, with matrix 1 on matching cones; it commutes with the
    localization maps, which is asserted, and the induced maps on
    cohomology over F_p are measured level by level.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not a prime")
    a = vec(a)
    pa = vscale(p, a)
    sa = cech_slice(mcc, a, state_cap)
    spa = cech_slice(mcc, pa, state_cap)
    top = mcc.fan.dim

    keys_a = {t: sa.keys_at(t) for t in range(top + 1)}
    keys_pa = {t: spa.keys_at(t) for t in range(top + 1)}
    for t in range(top + 1):
        missing = set(keys_a[t]) - set(keys_pa[t])
        assert not missing, \
            f"pieces {missing} vanish at degree {tuple(pa)} but not {tuple(a)}"

    F = {t: [[1 if ka == kp else 0 for ka in keys_a[t]]
             for kp in keys_pa[t]] for t in range(top + 1)}

    def level_map(slice_, keys, t):
        """Matrix of the map out of level t, keys[t+1] rows x keys[t] cols."""
        if t < 0 or t >= top:
            return [[0] * len(keys.get(t, ())) for _ in keys.get(t + 1, ())]
        for lt, rows in slice_.mats:
            if lt == t:
                return [list(r) for r in rows]
        return [[0] * len(keys[t]) for _ in keys[t + 1]]

    for t in range(top):
        na_t, na_up = len(keys_a[t]), len(keys_a[t + 1])
        npa_up = len(keys_pa[t + 1])
        if na_t == 0 or npa_up == 0:
            continue
        lhs = _matmul(level_map(spa, keys_pa, t), F[t])
        if na_up:
            rhs = _matmul(F[t + 1], level_map(sa, keys_a, t))
        else:
            rhs = [[0] * na_t for _ in range(npa_up)]
        assert all((x - y) % p == 0
                   for lr, rr in zip(lhs, rhs) for x, y in zip(lr, rr)), \
            f"power map fails to commute with the maps at level {t}"

    steps = []
    for i in range(top + 1):
        na, npa = len(keys_a[i]), len(keys_pa[i])
        Za = _nullspace_p(_modp(level_map(sa, keys_a, i), p), p, na)
        Zpa = _nullspace_p(_modp(level_map(spa, keys_pa, i), p), p, npa)
        Ba = _columns_mod(level_map(sa, keys_a, i - 1), p)
        Bpa = _columns_mod(level_map(spa, keys_pa, i - 1), p)

        h_a = len(Za) - _rank_p(_stack_columns(Ba, na), p)
        h_pa = len(Zpa) - _rank_p(_stack_columns(Bpa, npa), p)
        if h_a == 0 and h_pa == 0:
            continue
        fz = [[sum(F[i][r][k] * z[k] for k in range(na)) % p
               for r in range(npa)] for z in Za]
        rank_b = _rank_p(_stack_columns(Bpa, npa), p)
        rank_all = _rank_p(_stack_columns(Bpa + fz, npa), p)
        induced = rank_all - rank_b
        steps.append(FrobeniusStep(
            i, h_a, h_pa, induced,
            injective=induced == h_a,
            bijective=induced == h_a == h_pa))
    return FrobeniusCheck(tuple(a), p, tuple(steps))
