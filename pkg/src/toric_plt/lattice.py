"""Exact integer linear algebra on lattices of rank at most four.

Everything here works on plain Python ints (arbitrary precision) and
:class:`fractions.Fraction`; no floating point is used anywhere.
Matrices are tuples of row tuples.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

Vector = tuple[int, ...]
Matrix = tuple[tuple[int, ...], ...]


class LatticeError(ValueError):
    """Raised when an operation is asked for outside its domain."""


@dataclass(frozen=True)
class LatticeVector:
    coords: Vector

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))
        if len(self.coords) not in (2, 3, 4):
            raise LatticeError(f"lattice vectors have length 2, 3 or 4, got {len(self.coords)}")

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    @property
    def content(self) -> int:
        return content(self.coords)

    @property
    def is_primitive(self) -> bool:
        return self.content == 1


@dataclass(frozen=True)
class LatticeMatrix:
    rows: Matrix

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        if rows and len({len(r) for r in rows}) != 1:
            raise LatticeError("rows of unequal length")
        object.__setattr__(self, "rows", rows)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0]) if self.rows else 0

    @property
    def determinant(self) -> int:
        return det(self.rows)

    @property
    def is_unimodular(self) -> bool:
        n, m = self.shape
        return n == m and abs(self.determinant) == 1

    def __matmul__(self, other):
        if isinstance(other, LatticeMatrix):
            return LatticeMatrix(matmul(self.rows, other.rows))
        return matvec(self.rows, tuple(other))

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


# --- scalar helpers -------------------------------------------------------

def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``g = gcd(a, b) > 0`` and ``s*a + t*b == g``.

    The pair is canonical: ``t`` is reduced to the representative of least
    absolute value modulo ``a/g`` (ties go to the positive one).  This keeps
    ``|s| <= |b/g|`` and makes results reproducible, e.g.
    ``ext_gcd(3, 7) == (1, -2, 1)`` and ``ext_gcd(1, 1) == (1, 1, 0)``.
    """
    a, b = int(a), int(b)
    if a == 0 and b == 0:
        raise LatticeError("ext_gcd(0, 0) is undefined")
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_s, s = s, old_s - quot * s
        old_t, t = t, old_t - quot * t
    g, s, t = old_r, old_s, old_t
    if g < 0:
        g, s, t = -g, -s, -t
    if a == 0:
        return g, 0, t
    step = abs(a) // g
    # shifting (s, t) -> (s + k*b/g, t - k*a/g) preserves the identity
    t_red = t % step
    if 2 * t_red > step:
        t_red -= step
    k = (t - t_red) // (a // g)
    s = s + k * (b // g)
    t = t_red
    assert s * a + t * b == g
    return g, s, t


def content(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


def primitive(v: Sequence[int]) -> Vector:
    g = content(v)
    if g == 0:
        raise LatticeError("zero vector has no primitive multiple")
    return tuple(int(x) // g for x in v)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def cross_product(u: Sequence[int], v: Sequence[int]) -> Vector:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


# --- matrices -------------------------------------------------------------

def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(m: Sequence[Sequence]) -> tuple:
    return tuple(zip(*m))


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def matvec(a: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(dot(row, v) for row in a)


def det(m: Sequence[Sequence]):
    """Exact determinant by cofactor expansion (sizes here are at most 4)."""
    n = len(m)
    if n == 0:
        return 1
    if any(len(r) != n for r in m):
        raise LatticeError("determinant of a non-square matrix")
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = 0
    for j in range(n):
        if m[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * m[0][j] * det(minor)
    return total


def inverse(m: Sequence[Sequence[int]]) -> tuple[tuple[Fraction, ...], ...]:
    """Rational inverse via the adjugate."""
    n = len(m)
    d = det(m)
    if d == 0:
        raise LatticeError("singular matrix")
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(m) if k != i]
            adj[j][i] = (-1) ** (i + j) * det(minor)
    return tuple(tuple(Fraction(x, d) for x in row) for row in adj)


def integer_inverse(m: Sequence[Sequence[int]]) -> Matrix:
    inv = inverse(m)
    if any(x.denominator != 1 for row in inv for x in row):
        raise LatticeError("matrix is not unimodular")
    return tuple(tuple(int(x) for x in row) for row in inv)


def minors(m: Sequence[Sequence[int]], k: int) -> list[int]:
    rows, cols = len(m), len(m[0])
    return [
        det([[m[i][j] for j in cs] for i in rs])
        for rs in combinations(range(rows), k)
        for cs in combinations(range(cols), k)
    ]


def solve(m: Sequence[Sequence[int]], rhs: Sequence) -> tuple[Fraction, ...]:
    """Solve the square system ``m x = rhs`` exactly."""
    return matvec(inverse(m), rhs)


def smith_normal_form(m: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(d, u, v)`` with ``u @ m @ v == d``.

    ``u`` and ``v`` are unimodular, ``d`` is diagonal with nonnegative
    entries and each diagonal entry divides the next.
    """
    a = [list(map(int, r)) for r in m]
    nr, nc = len(a), len(a[0]) if a else 0
    u = [list(r) for r in identity(nr)]
    v = [list(r) for r in identity(nc)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def row_combo(i, j, p, q, r, s):
        # (row_i, row_j) <- (p*row_i + q*row_j, r*row_i + s*row_j), ps - qr = ±1
        for mat in (a, u):
            ri, rj = mat[i], mat[j]
            mat[i] = [p * x + q * y for x, y in zip(ri, rj)]
            mat[j] = [r * x + s * y for x, y in zip(ri, rj)]

    def col_combo(i, j, p, q, r, s):
        for mat in (a, v):
            for row in mat:
                x, y = row[i], row[j]
                row[i], row[j] = p * x + q * y, r * x + s * y

    for t in range(min(nr, nc)):
        nonzero = [(i, j) for i in range(t, nr) for j in range(t, nc) if a[i][j]]
        if not nonzero:
            break
        i0, j0 = min(nonzero, key=lambda ij: abs(a[ij[0]][ij[1]]))
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            changed = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    g, s_, t_ = ext_gcd(a[t][t], a[i][t])
                    p, q = a[t][t] // g, a[i][t] // g
                    row_combo(t, i, s_, t_, -q, p)
                    changed = True
            for j in range(t + 1, nc):
                if a[t][j]:
                    g, s_, t_ = ext_gcd(a[t][t], a[t][j])
                    p, q = a[t][t] // g, a[t][j] // g
                    col_combo(t, j, s_, t_, -q, p)
                    changed = True
            if not changed:
                # enforce divisibility of the remaining block
                bad = [
                    (i, j)
                    for i in range(t + 1, nr)
                    for j in range(t + 1, nc)
                    if a[i][j] % a[t][t]
                ]
                if not bad:
                    break
                i, _ = bad[0]
                row_combo(t, i, 1, 1, 0, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    d = tuple(tuple(r) for r in a)
    return d, tuple(tuple(r) for r in u), tuple(tuple(r) for r in v)


def invariant_factors(m: Sequence[Sequence[int]]) -> tuple[int, ...]:
    d, _, _ = smith_normal_form(m)
    return tuple(d[i][i] for i in range(min(len(d), len(d[0]))))


def unimodular_completion(v: Sequence[int]) -> Matrix:
    """Unimodular ``U`` with ``U v = (1, 0, ..., 0)`` for primitive ``v``."""
    if content(v) != 1:
        raise LatticeError(f"{tuple(v)} is not primitive")
    d, u, w = smith_normal_form([[x] for x in v])
    # u v w = d with w = (±1) and d = (1, 0, ...)
    sign = w[0][0]
    return tuple(tuple(sign * x for x in row) for row in u)


def basis_of_span(vectors: Sequence[Sequence[int]]) -> Matrix:
    """A basis (as rows) of the saturated lattice ``span(vectors) ∩ Z^n``."""
    m = tuple(tuple(v) for v in vectors)
    d, u, w = smith_normal_form(m)
    rank = sum(1 for i in range(min(len(d), len(d[0]))) if d[i][i])
    # m = u^-1 d w^-1: the row space of m is saturated by the leading rows of w^-1
    w_inv = integer_inverse(w)
    return w_inv[:rank]


def is_lattice_isomorphism(m: Sequence[Sequence[int]]) -> bool:
    return len(m) == len(m[0]) and abs(det(m)) == 1


# --- the change of basis used for cyclic quotients --------------------------

def change_of_basis_ex2(q: int, r: int) -> LatticeMatrix:
    """Unimodular map sending ``(1,0,0) -> (1,0,0)`` and ``(1,q,r) -> (0,1,0)``.

    With ``θ1*q + θ2*r = 1`` the rows are ``(1, -θ1, -θ2)``,
    ``(0, θ1, θ2)`` and ``(0, r, -q)``; the determinant is always ``-1``.
    """
    if r < 1:
        raise LatticeError("r must be positive")
    if gcd(q, r) != 1:
        raise LatticeError(f"gcd(q, r) = gcd({q}, {r}) != 1")
    _, th1, th2 = ext_gcd(q, r)
    return LatticeMatrix(((1, -th1, -th2), (0, th1, th2), (0, r, -q)))

