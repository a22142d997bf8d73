"""Cones, fans and cyclic quotient singularities.

A :class:`ConeGerm` is the cone of an affine toric germ; it is either a
simplicial 3-cone or the square cone of the ordinary double point.  Lattice
points are integer tuples in the standard lattice ``Z^n``.
"""
from __future__ import annotations

import enum
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, Optional, Sequence

from .lattice import (
    LatticeError,
    Vector,
    basis_of_span,
    content,
    cross_product,
    det,
    dot,
    integer_inverse,
    matvec,
    primitive,
    smith_normal_form,
    solve,
    transpose,
    unimodular_completion,
)


class ConeKind(enum.Enum):
    SIMPLICIAL3 = "simplicial3"
    ODP_SQUARE = "odp_square"


# generators v1, v2, v3, v4 of the reference node cone, v1 + v2 == v3 + v4
ODP_REFERENCE = ((1, 0, 0), (0, 1, 1), (0, 1, 0), (1, 0, 1))


# v1 + v2 == v3 + v4 makes (v1, v2) and (v3, v4) the diagonals
_SQUARE_CYCLE = (0, 2, 1, 3)


@dataclass(frozen=True)
class ConeGerm:
    """A strongly convex rational cone with primitive generators."""

    generators: tuple[Vector, ...]
    kind: ConeKind = ConeKind.SIMPLICIAL3

    def __post_init__(self):
        gens = tuple(tuple(int(x) for x in g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        for g in gens:
            if content(g) != 1:
                raise LatticeError(f"generator {g} is not primitive")
        if self.kind is ConeKind.SIMPLICIAL3:
            if len(gens) != 3 or any(len(g) != 3 for g in gens):
                raise LatticeError("a simplicial 3-cone needs three vectors in Z^3")
            if det(gens) == 0:
                raise LatticeError(f"degenerate cone {gens}")
        else:
            if len(gens) != 4 or any(len(g) != 3 for g in gens):
                raise LatticeError("the node cone needs four vectors in Z^3")
            v1, v2, v3, v4 = gens
            if tuple(a + b for a, b in zip(v1, v2)) != tuple(a + b for a, b in zip(v3, v4)):
                raise LatticeError("node cone generators must satisfy v1 + v2 == v3 + v4")
            for triple in combinations(gens, 3):
                if det(triple) == 0:
                    raise LatticeError("every three node cone generators must be independent")

    @classmethod
    def simplicial(cls, *gens) -> "ConeGerm":
        return cls(tuple(gens), ConeKind.SIMPLICIAL3)

    @classmethod
    def odp(cls, gens: Sequence[Vector] = ODP_REFERENCE) -> "ConeGerm":
        return cls(tuple(gens), ConeKind.ODP_SQUARE)

    @property
    def is_simplicial(self) -> bool:
        return self.kind is ConeKind.SIMPLICIAL3

    @property
    def index(self) -> int:
        """Multiplicity ``|det|`` of a simplicial cone."""
        if not self.is_simplicial:
            raise LatticeError("index is defined for simplicial cones only")
        return abs(det(self.generators))

    def facets(self) -> list[tuple[Vector, ...]]:
        g = self.generators
        if self.is_simplicial:
            return [tuple(x for k, x in enumerate(g) if k != i) for i in range(3)]
        order = [g[i] for i in _SQUARE_CYCLE]
        return [(order[i], order[(i + 1) % 4]) for i in range(4)]

    def faces(self) -> list[frozenset]:
        """All faces as frozensets of generators (including the apex and the cone)."""
        g = self.generators
        out = [frozenset()] + [frozenset([x]) for x in g]
        out += [frozenset(f) for f in self.facets()]
        out.append(frozenset(g))
        return out

    def inequalities(self) -> list[Vector]:
        """Inward facet normals ``u`` with ``<u, x> >= 0`` on the cone."""
        return list(_inequalities(self))

    def contains(self, v: Sequence[int]) -> bool:
        return all(dot(u, v) >= 0 for u in self.inequalities())

    def in_interior(self, v: Sequence[int]) -> bool:
        return all(dot(u, v) > 0 for u in self.inequalities())

    def gorenstein_functional(self) -> tuple[Fraction, ...]:
        """The rational ``m`` with ``<m, v> = 1`` on every generator."""
        return _gorenstein(self.generators)


@lru_cache(maxsize=4096)
def _gorenstein(g: tuple[Vector, ...]) -> tuple[Fraction, ...]:
    m = solve(g[:3], (1, 1, 1))
    if any(dot(m, v) != 1 for v in g):
        raise LatticeError("cone is not Q-Gorenstein")
    return m


@lru_cache(maxsize=4096)
def _inequalities(cone: "ConeGerm") -> tuple[Vector, ...]:
    out = []
    for f in cone.facets():
        n = primitive(cross_product(f[0], f[1]))
        other = next(x for x in cone.generators if x not in f)
        if dot(n, other) < 0:
            n = tuple(-x for x in n)
        out.append(n)
    return tuple(out)


@dataclass(frozen=True)
class CyclicQuotientType:
    """The quotient ``C^n / mu_r`` with weights ``w`` (``1/r(w1, ..., wn)``).

    Weights are stored reduced mod ``r`` in the order they were given;
    :meth:`normal_form` returns the canonical representative.
    """

    order: int
    weights: tuple[int, ...]

    def __post_init__(self):
        if self.order < 1:
            raise LatticeError(f"quotient order must be positive, got {self.order}")
        if len(self.weights) not in (2, 3):
            raise LatticeError("quotient types have 2 or 3 weights")
        object.__setattr__(self, "weights", tuple(int(w) % self.order for w in self.weights))

    @property
    def dim(self) -> int:
        return len(self.weights)

    @property
    def is_smooth(self) -> bool:
        return self.order == 1

    def units(self):
        return (u for u in range(1, self.order + 1) if gcd(u, self.order) == 1)

    def normal_form(self) -> "CyclicQuotientType":
        """Lexicographically least sorted weights over all unit multipliers."""
        r = self.order
        best = min(tuple(sorted(u * w % r for w in self.weights)) for u in self.units())
        return CyclicQuotientType(r, best)

    def ordered_normal_form(self) -> "CyclicQuotientType":
        """Canonical form up to unit multipliers only; coordinate order is kept."""
        r = self.order
        best = min(tuple(u * w % r for w in self.weights) for u in self.units())
        return CyclicQuotientType(r, best)

    def equivalent(self, other: "CyclicQuotientType") -> bool:
        return self.normal_form() == other.normal_form()

    def ordered_equivalent(self, other: "CyclicQuotientType") -> bool:
        return self.ordered_normal_form() == other.ordered_normal_form()

    def is_isolated(self) -> bool:
        """Whether the action is free outside the origin (no fixed coordinate subspaces)."""
        r = self.order
        return all(gcd(w, r) == 1 for w in self.weights) if r > 1 else True

    def __str__(self):
        return f"1/{self.order}({', '.join(map(str, self.weights))})"


def lattice_quotient_type(generators: Sequence[Sequence[int]]) -> CyclicQuotientType:
    """Quotient type of the simplicial cone spanned by ``generators`` in ``Z^n``.

    The group ``Z^n / span(generators)`` must be cyclic.  The returned
    weights ``w`` satisfy: ``(1/r) * sum(w_i * v_i)`` generates ``Z^n`` over
    the sublattice, weight ``i`` belonging to generator ``i``.
    """
    gens = [tuple(int(x) for x in g) for g in generators]
    n = len(gens)
    if any(len(g) != n for g in gens):
        raise LatticeError("need n generators in Z^n")
    r = abs(det(gens))
    if r == 0:
        raise LatticeError(f"degenerate cone {gens}")
    if r == 1:
        return CyclicQuotientType(1, (0,) * n)
    # columns are the generators: V = gens^T ; u V w = diag(1, .., 1, r)
    cols = transpose(gens)
    d, u, _ = smith_normal_form(cols)
    factors = [d[i][i] for i in range(n)]
    if factors[:-1] != [1] * (n - 1):
        raise LatticeError(f"non-cyclic quotient with invariant factors {factors}")
    u_inv = integer_inverse(u)
    x = tuple(row[n - 1] for row in u_inv)  # u x = e_n generates the quotient
    coords = solve(cols, x)
    weights = tuple(int(c * r) % r for c in coords)
    return CyclicQuotientType(r, weights)


def cone_quotient_type(cone: ConeGerm) -> CyclicQuotientType:
    if not cone.is_simplicial:
        raise LatticeError("quotient types are defined for simplicial cones")
    return lattice_quotient_type(cone.generators)


def project_along(ray: Sequence[int], vectors: Iterable[Sequence[int]]) -> list[Vector]:
    """Images of ``vectors`` in ``Z^n / Z*ray`` identified with ``Z^(n-1)``."""
    u = unimodular_completion(ray)
    return [tuple(matvec(u, v)[1:]) for v in vectors]


def orbit_surface_type(ray: Sequence[int], a: Sequence[int], b: Sequence[int]) -> CyclicQuotientType:
    """Singularity of the divisor ``V(ray)`` at the point ``V(<ray, a, b>)``.

    The result is ordered: the first weight belongs to the curve
    ``V(<ray, a>)``'s transversal coordinate, i.e. to the ray image of ``a``.
    """
    pa, pb = project_along(ray, (a, b))
    return lattice_quotient_type((primitive(pa), primitive(pb)))


def transversal_type(a: Sequence[int], b: Sequence[int]) -> CyclicQuotientType:
    """Transversal singularity of a 3-fold along the curve ``V(<a, b>)``."""
    basis = basis_of_span((a, b))
    return lattice_quotient_type((coordinates_in(basis, a), coordinates_in(basis, b)))


def coordinates_in(basis: Sequence[Sequence[int]], v: Sequence[int]) -> Vector:
    """Integer coordinates of ``v`` in a basis of a saturated rank-2 sublattice."""
    b0, b1 = basis
    i, j = next(
        (i, j) for i, j in combinations(range(len(v)), 2) if b0[i] * b1[j] != b0[j] * b1[i]
    )
    c = solve(((b0[i], b1[i]), (b0[j], b1[j])), (v[i], v[j]))
    if any(x.denominator != 1 for x in c) or any(
        c[0] * p + c[1] * q != x for p, q, x in zip(b0, b1, v)
    ):
        raise LatticeError(f"{tuple(v)} does not lie in the given sublattice")
    return tuple(int(x) for x in c)


# --- fans ------------------------------------------------------------------

def _extreme_rays(normals: Sequence[Vector]) -> list[Vector]:
    """Extreme rays of the cone ``{x : <u, x> >= 0 for all u}`` in ``R^3``."""
    rays = set()
    for u, w in combinations(normals, 2):
        c = cross_product(u, w)
        if not any(c):
            continue
        for cand in (c, tuple(-x for x in c)):
            if all(dot(n, cand) >= 0 for n in normals):
                rays.add(primitive(cand))
    return sorted(rays)


def _intersection_is_common_face(s: ConeGerm, t: ConeGerm) -> bool:
    rays = _extreme_rays(s.inequalities() + t.inequalities())
    if not rays:
        return True
    common = set(s.generators) & set(t.generators)
    if not all(r in common for r in rays):
        return False
    face = frozenset(rays)
    return face in s.faces() and face in t.faces()


@dataclass(frozen=True)
class Fan:
    maximal_cones: tuple[ConeGerm, ...]
    check: bool = field(default=True, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "maximal_cones", tuple(self.maximal_cones))
        if self.check:
            for s, t in combinations(self.maximal_cones, 2):
                if not _intersection_is_common_face(s, t):
                    raise LatticeError(
                        f"cones {s.generators} and {t.generators} do not meet in a common face"
                    )

    @property
    def rays(self) -> list[Vector]:
        return sorted({g for c in self.maximal_cones for g in c.generators})

    def cone_with(self, *rays) -> ConeGerm:
        """The maximal cone containing all the given rays as generators."""
        want = set(tuple(r) for r in rays)
        for c in self.maximal_cones:
            if want <= set(c.generators):
                return c
        raise LookupError(f"no maximal cone contains {sorted(want)}")


def star_subdivide(fan: Fan | ConeGerm, ray: Sequence[int]) -> Fan:
    """Insert ``ray`` into every maximal cone containing it."""
    if isinstance(fan, ConeGerm):
        fan = Fan((fan,))
    ray = tuple(int(x) for x in ray)
    if content(ray) != 1:
        raise LatticeError(f"ray {ray} is not primitive")
    hit = [c for c in fan.maximal_cones if c.contains(ray)]
    if not hit:
        raise LatticeError(f"ray {ray} lies outside the support of the fan")
    new = []
    for c in fan.maximal_cones:
        if c not in hit:
            new.append(c)
            continue
        if ray in c.generators:
            new.append(c)
            continue
        for f in c.facets():
            gens = (ray,) + tuple(f)
            if det(gens) != 0:
                new.append(ConeGerm.simplicial(*gens))
    return Fan(tuple(new))


def section_area(cone: ConeGerm, m: Sequence[Fraction]) -> Fraction:
    """Area (up to a global constant) of the slice ``cone ∩ {<m, x> = 1}``."""
    g = cone.generators
    scale = Fraction(1)
    for v in g:
        scale *= dot(m, v)
    return Fraction(abs(det(g))) / scale


# --- discrepancies and terminality ------------------------------------------

def discrepancy(germ: ConeGerm, ray: Sequence[int]) -> Fraction:
    """Discrepancy ``<m, ray> - 1`` of the toric divisor of ``ray`` over ``germ``."""
    if not germ.contains(ray):
        raise LatticeError(f"ray {tuple(ray)} is outside the cone")
    return dot(germ.gorenstein_functional(), ray) - 1


def reid_tai_witness(q: CyclicQuotientType) -> Optional[int]:
    """First ``j`` in ``1..r-1`` with ``sum frac(j*w_i/r) <= 1``, or ``None``."""
    r = q.order
    for j in range(1, r):
        if sum(j * w % r for w in q.weights) <= r:
            return j
    return None


def reid_tai_is_terminal(q: CyclicQuotientType) -> bool:
    if q.dim != 3:
        raise LatticeError("terminality is tested for three-dimensional quotients")
    return reid_tai_witness(q) is None


def odp_weight_ray(beta: Sequence[int]) -> Vector:
    """Ray of the weighted blow-up with weights ``beta`` on the reference node cone.

    The node ``x1 x2 + x3 x4 = 0`` is the cone over ``ODP_REFERENCE`` with
    coordinate characters ``u1 = (0,0,1)``, ``u2 = (1,1,-1)``,
    ``u3 = (1,0,0)``, ``u4 = (0,1,0)``; the ray ``w`` satisfies
    ``<u_i, w> = beta_i``.
    """
    b1, b2, b3, b4 = (int(x) for x in beta)
    if b1 + b2 != b3 + b4:
        raise LatticeError(f"weights {tuple(beta)} violate beta1 + beta2 == beta3 + beta4")
    return (b3, b4, b1)


ODP_CHARACTERS = ((0, 0, 1), (1, 1, -1), (1, 0, 0), (0, 1, 0))


__all__ = [
    "ConeKind", "ConeGerm", "CyclicQuotientType", "Fan", "ODP_REFERENCE", "ODP_CHARACTERS",
    "cone_quotient_type", "lattice_quotient_type", "star_subdivide", "discrepancy",
    "reid_tai_is_terminal", "reid_tai_witness", "project_along", "orbit_surface_type",
    "transversal_type", "odp_weight_ray", "section_area",
]
