"""Exact integer linear algebra: Smith/Hermite normal forms and lattice queries.

Everything works over arbitrary-precision Python ints; no floating point is
used anywhere.  Matrices are sequences of rows, vectors are tuples of ints.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

Vector = tuple  # tuple[int, ...]
Matrix = list   # list of row lists


# ---------------------------------------------------------------------------
# vector helpers

def vec(v) -> Vector:
    return tuple(int(x) for x in v)


def vadd(a, b) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a, b) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def vneg(a) -> Vector:
    return tuple(-x for x in a)


def vscale(c: int, a) -> Vector:
    return tuple(c * x for x in a)


def dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


def is_zero(a) -> bool:
    return all(x == 0 for x in a)


def content(a) -> int:
    g = 0
    for x in a:
        g = gcd(g, x)
    return g


def primitive(a) -> Vector:
    """a divided by the gcd of its entries (0 stays 0)."""
    g = content(a)
    if g == 0:
        return tuple(a)
    return tuple(x // g for x in a)


# ---------------------------------------------------------------------------
# matrix helpers

def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(A, B) -> Matrix:
    if A and B and len(A[0]) != len(B):
        raise ValueError("shape mismatch")
    n = len(B[0]) if B else 0
    out = []
    for row in A:
        out.append([sum(row[k] * B[k][j] for k in range(len(B))) for j in range(n)])
    return out


def mat_vec(A, x) -> Vector:
    return tuple(dot(row, x) for row in A)


def transpose(A) -> Matrix:
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def copy_matrix(A) -> Matrix:
    return [list(r) for r in A]


def det_int(A) -> int:
    """Determinant of a square integer matrix (fraction-free Bareiss)."""
    n = len(A)
    if n == 0:
        return 1
    M = copy_matrix(A)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            M[i][k] = 0
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def _exgcd(a: int, b: int):
    """(g, x, y) with x*a + y*b = g = gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


# ---------------------------------------------------------------------------
# Smith normal form

@dataclass(frozen=True)
class SNFResult:
    D: tuple
    U: tuple
    V: tuple
    divisors: tuple  # nonzero diagonal entries d_1 | d_2 | ... | d_r

    @property
    def rank(self) -> int:
        return len(self.divisors)


def snf(A: Sequence[Sequence[int]]) -> SNFResult:
    """Smith normal form with transforms: U*A*V = D, U and V unimodular.

    Elementary row/column reduction; pivots chosen by minimal absolute
    value.  The product identity is re-verified before returning.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    if any(len(r) != n for r in A):
        raise ValueError("ragged matrix")
    D = copy_matrix(A)
    U = identity(m)
    V = identity(n)

    def row_op(i, j, q):  # row_i -= q * row_j
        D[i] = [a - q * b for a, b in zip(D[i], D[j])]
        U[i] = [a - q * b for a, b in zip(U[i], U[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for r in D:
            r[i] -= q * r[j]
        for r in V:
            r[i] -= q * r[j]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    t = 0
    while t < min(m, n):
        # locate minimal nonzero |entry| in the trailing submatrix
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] != 0 and (piv is None or abs(D[i][j]) < abs(D[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        dirty = False
        for i in range(t + 1, m):
            if D[i][t] != 0:
                q = D[i][t] // D[t][t]
                row_op(i, t, q)
                if D[i][t] != 0:
                    dirty = True
        for j in range(t + 1, n):
            if D[t][j] != 0:
                q = D[t][j] // D[t][t]
                col_op(j, t, q)
                if D[t][j] != 0:
                    dirty = True
        if dirty:
            continue  # remainders left; pick a smaller pivot again
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
        t += 1

    # enforce the divisibility chain d_i | d_{i+1}
    r = t
    changed = True
    while changed:
        changed = False
        for i in range(r - 1):
            a, b = D[i][i], D[i + 1][i + 1]
            if b % a != 0:
                changed = True
                g, x, y = _exgcd(a, b)
                lcm = a // g * b
                # P*diag(a,b)*Q = diag(g, lcm) with the 2x2 unimodular pair
                # P = [[x, y], [-b/g, a/g]], Q = [[1, -y*b/g], [1, x*a/g]]
                ui, uj = U[i], U[i + 1]
                U[i] = [x * p + y * q for p, q in zip(ui, uj)]
                U[i + 1] = [(-b // g) * p + (a // g) * q for p, q in zip(ui, uj)]
                for rr in V:
                    ci, cj = rr[i], rr[i + 1]
                    rr[i] = ci + cj
                    rr[i + 1] = (-(y * b) // g) * ci + ((x * a) // g) * cj
                D[i][i], D[i + 1][i + 1] = g, lcm

    divisors = tuple(D[i][i] for i in range(r))
    res = SNFResult(
        D=tuple(tuple(row) for row in D),
        U=tuple(tuple(row) for row in U),
        V=tuple(tuple(row) for row in V),
        divisors=divisors,
    )
    assert mat_mul(mat_mul(U, copy_matrix(A)), V) == [list(r) for r in res.D]
    return res


def rank_int(A) -> int:
    if not A or not A[0]:
        return 0
    return snf(A).rank


# ---------------------------------------------------------------------------
# Hermite normal form (row style)

@dataclass(frozen=True)
class HNFResult:
    H: tuple
    U: tuple
    pivots: tuple  # (row, col) of each pivot, top to bottom


def hnf(A: Sequence[Sequence[int]]) -> HNFResult:
    """Row Hermite normal form: U*A = H with U unimodular.

    Pivots are positive, entries above a pivot are reduced into [0, pivot),
    zero rows sink to the bottom.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    H = copy_matrix(A)
    U = identity(m)
    pivots = []
    row = 0
    for col in range(n):
        # euclidean elimination below `row` in this column
        while True:
            nz = [i for i in range(row, m) if H[i][col] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(H[i][col]))
            if i0 != row:
                H[row], H[i0] = H[i0], H[row]
                U[row], U[i0] = U[i0], U[row]
            done = True
            for i in range(row + 1, m):
                if H[i][col] != 0:
                    q = H[i][col] // H[row][col]
                    H[i] = [a - q * b for a, b in zip(H[i], H[row])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[row])]
                    if H[i][col] != 0:
                        done = False
            if done:
                break
        if row < m and H[row][col] != 0:
            if H[row][col] < 0:
                H[row] = [-a for a in H[row]]
                U[row] = [-a for a in U[row]]
            for i in range(row):
                q = H[i][col] // H[row][col]
                if q:
                    H[i] = [a - q * b for a, b in zip(H[i], H[row])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[row])]
            pivots.append((row, col))
            row += 1
            if row == m:
                break
    res = HNFResult(
        H=tuple(tuple(r) for r in H),
        U=tuple(tuple(r) for r in U),
        pivots=tuple(pivots),
    )
    assert mat_mul(U, copy_matrix(A)) == [list(r) for r in res.H]
    return res


def kernel_basis(A: Sequence[Sequence[int]], ncols: Optional[int] = None) -> list:
    """Basis of the saturated right kernel {x in Z^n : A x = 0}."""
    if not A:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [tuple(1 if i == j else 0 for j in range(ncols)) for i in range(ncols)]
    n = len(A[0])
    res = snf(A)
    r = res.rank
    return [tuple(res.V[i][j] for i in range(n)) for j in range(r, n)]


def left_kernel_basis(A: Sequence[Sequence[int]]) -> list:
    """Basis of {u : u A = 0} (rows of U past the rank)."""
    if not A:
        return []
    res = snf(A)
    return [tuple(row) for row in res.U[res.rank:]]


def row_saturation(A: Sequence[Sequence[int]], ncols: Optional[int] = None) -> list:
    """Basis of Z^n intersected with the rational row span of A."""
    if not A:
        return []
    n = len(A[0]) if ncols is None else ncols
    N = kernel_basis(A, n)
    if not N:
        return [tuple(r) for r in identity(n)]
    return kernel_basis(N, n)


def unimodular_inverse(M: Sequence[Sequence[int]]) -> Matrix:
    """Exact inverse of a unimodular integer matrix."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(1 if i == j else 0) for j in range(n)]
         for i, row in enumerate(M)]
    for col in range(n):
        piv = next(i for i in range(col, n) if A[i][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col]
        A[col] = [x * inv for x in A[col]]
        for i in range(n):
            if i != col and A[i][col] != 0:
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[col])]
    out = []
    for i in range(n):
        row = A[i][n:]
        if any(x.denominator != 1 for x in row):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in row])
    return out


# ---------------------------------------------------------------------------
# lattices

@dataclass(frozen=True)
class LatticeBasis:
    """A sublattice of Z^d given by linearly independent basis rows."""

    ambient_dim: int
    basis: tuple  # tuple of int tuples

    def __post_init__(self):
        for b in self.basis:
            if len(b) != self.ambient_dim:
                raise ValueError("basis vector of wrong dimension")
        if self.basis and rank_int([list(b) for b in self.basis]) != len(self.basis):
            raise ValueError("basis rows are dependent")

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, v) -> bool:
        return solve_in_lattice(self, v) is not None


def lattice_from_rows(ambient_dim: int, rows) -> LatticeBasis:
    """Lattice generated by possibly dependent rows, with an HNF basis."""
    rows = [list(vec(r)) for r in rows if not is_zero(r)]
    if not rows:
        return LatticeBasis(ambient_dim, ())
    res = hnf(rows)
    basis = tuple(row for row in res.H if not is_zero(row))
    return LatticeBasis(ambient_dim, basis)


def full_lattice(ambient_dim: int) -> LatticeBasis:
    return LatticeBasis(ambient_dim, tuple(tuple(r) for r in identity(ambient_dim)))


def solve_in_lattice(L: LatticeBasis, v) -> Optional[list]:
    """Integer coefficients expressing v over L's basis, or None."""
    v = vec(v)
    if len(v) != L.ambient_dim:
        raise ValueError("vector of wrong dimension")
    if not L.basis:
        return [] if is_zero(v) else None
    B = [list(b) for b in L.basis]        # k x d
    res = snf(transpose(B))               # d x k
    r = res.rank
    uv = mat_vec(res.U, v)
    k = len(B)
    y = [0] * k
    for i in range(len(uv)):
        if i < r:
            if uv[i] % res.divisors[i] != 0:
                return None
            y[i] = uv[i] // res.divisors[i]
        elif uv[i] != 0:
            return None
    c = mat_vec(res.V, y)
    assert tuple(sum(c[i] * B[i][j] for i in range(k)) for j in range(L.ambient_dim)) == v
    return list(c)


def lattice_equal(L1: LatticeBasis, L2: LatticeBasis) -> bool:
    """Mutual membership of basis vectors."""
    if L1.ambient_dim != L2.ambient_dim:
        return False
    return (all(L2.contains(b) for b in L1.basis)
            and all(L1.contains(b) for b in L2.basis))


def intersect(L1: LatticeBasis, L2: LatticeBasis) -> LatticeBasis:
    """Basis of the intersection of two sublattices of Z^d."""
    if L1.ambient_dim != L2.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    d = L1.ambient_dim
    if not L1.basis or not L2.basis:
        return LatticeBasis(d, ())
    stacked = [list(b) for b in L1.basis] + [list(b) for b in L2.basis]
    k1 = len(L1.basis)
    gens = []
    for u in left_kernel_basis(stacked):
        x = tuple(sum(u[i] * L1.basis[i][j] for i in range(k1)) for j in range(d))
        if not is_zero(x):
            gens.append(x)
    out = lattice_from_rows(d, gens)
    for b in out.basis:
        assert L1.contains(b) and L2.contains(b)
    return out


@dataclass(frozen=True)
class QuotientInvariants:
    divisors: tuple   # elementary divisors of the torsion part, including 1s
    free_rank: int

    @property
    def index(self) -> Optional[int]:
        if self.free_rank:
            return None
        out = 1
        for d in self.divisors:
            out *= d
        return out


def quotient_invariants(sub: LatticeBasis, sup: LatticeBasis) -> QuotientInvariants:
    """Elementary divisors of sup/sub for a sublattice sub of sup."""
    if sub.ambient_dim != sup.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    coords = []
    for b in sub.basis:
        c = solve_in_lattice(sup, b)
        if c is None:
            raise ValueError(f"{b} is not in the ambient lattice of the quotient")
        coords.append(c)
    if not sub.basis:
        return QuotientInvariants((), sup.rank)
    res = snf(coords)
    if res.rank != len(sub.basis):
        raise AssertionError("independent rows lost rank")
    return QuotientInvariants(res.divisors, sup.rank - sub.rank)


def reduce_mod_lattice(L: LatticeBasis, v) -> Vector:
    """Canonical representative of v + L (reduction against the HNF basis)."""
    v = list(vec(v))
    if not L.basis:
        return tuple(v)
    res = hnf([list(b) for b in L.basis])
    rows = [list(r) for r in res.H if not is_zero(r)]
    # basis rows are independent, so HNF keeps them all; reduce top-down
    piv = []
    for r in rows:
        c = next(j for j, x in enumerate(r) if x != 0)
        piv.append((c, r))
    for c, r in piv:
        q = v[c] // r[c]
        if q:
            for j in range(len(v)):
                v[j] -= q * r[j]
    return tuple(v)
