"""Recognition of three-dimensional terminal toric germs.

A terminal toric 3-fold germ is smooth, a cyclic quotient
``1/r(1, -1, q)`` with ``gcd(q, r) = 1``, or the ordinary double point.
Equivalence is taken up to unimodular automorphisms of the lattice.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import permutations
from math import gcd
from typing import Optional, Sequence

from .fans import (
    ODP_REFERENCE,
    ConeGerm,
    CyclicQuotientType,
    cone_quotient_type,
    reid_tai_is_terminal,
    reid_tai_witness,
)
from .lattice import LatticeError, LatticeMatrix, Matrix, det, identity, inverse, matmul, transpose


class Variant(enum.Enum):
    SMOOTH = "Smooth"
    CYCLIC_QUOTIENT = "CyclicQuotient"
    ORDINARY_DOUBLE_POINT = "OrdinaryDoublePoint"


class NotTerminal(LatticeError):
    def __init__(self, message: str, witness: Optional[int] = None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class TerminalToricType:
    variant: Variant
    witness: LatticeMatrix
    r: Optional[int] = None
    q: Optional[int] = None

    def __post_init__(self):
        if self.variant is Variant.CYCLIC_QUOTIENT:
            if self.r is None or self.r < 2 or gcd(self.q, self.r) != 1:
                raise LatticeError(f"bad cyclic quotient data r={self.r}, q={self.q}")
        if not self.witness.is_unimodular:
            raise LatticeError("witness must be unimodular")

    def reference_cone(self) -> ConeGerm:
        return reference_cone(self.variant, self.r, self.q)

    def __str__(self):
        if self.variant is Variant.CYCLIC_QUOTIENT:
            return f"CyclicQuotient({self.r},{self.q})"
        return self.variant.value


def reference_cone(variant: Variant, r: Optional[int] = None, q: Optional[int] = None) -> ConeGerm:
    if variant is Variant.SMOOTH:
        return ConeGerm.simplicial((1, 0, 0), (0, 1, 0), (0, 0, 1))
    if variant is Variant.CYCLIC_QUOTIENT:
        return ConeGerm.simplicial((1, 0, 0), (0, 1, 0), (1, q, r))
    return ConeGerm.odp()


def _map_onto(source: Sequence[Sequence[int]], target: Sequence[Sequence[int]]) -> Optional[Matrix]:
    """Integral unimodular ``A`` with ``A s_i = t_i`` for the first three pairs, if any."""
    s = transpose(source[:3])
    t = transpose(target[:3])
    a = matmul(t, inverse(s))
    if any(x.denominator != 1 for row in a for x in row):
        return None
    a = tuple(tuple(int(x) for x in row) for row in a)
    if abs(det(a)) != 1:
        return None
    for sv, tv in zip(source[3:], target[3:]):
        if tuple(sum(x * y for x, y in zip(row, sv)) for row in a) != tuple(tv):
            return None
    return a


def classify_germ(cone: ConeGerm) -> TerminalToricType:
    """Identify ``cone`` with its reference germ and return the unimodular witness.

    Raises :class:`NotTerminal` for simplicial cones failing Reid–Tai; the
    exception carries the failing index ``j``.
    """
    gens = cone.generators
    if not cone.is_simplicial:
        for perm in permutations(range(4)):
            src = [gens[i] for i in perm]
            a = _map_onto(src, ODP_REFERENCE)
            if a is not None:
                return TerminalToricType(Variant.ORDINARY_DOUBLE_POINT, LatticeMatrix(a))
        raise NotTerminal("square cone is not unimodularly equivalent to the node")
    r = cone.index
    if r == 1:
        return TerminalToricType(Variant.SMOOTH, LatticeMatrix(_map_onto(gens, identity(3))))
    qt = cone_quotient_type(cone)
    j = reid_tai_witness(qt)
    if j is not None:
        raise NotTerminal(f"{qt} is not terminal (Reid-Tai fails at j={j})", witness=j)
    # generator order first, so a cone already in reference shape keeps its q
    for perm in permutations(range(3)):
        for q in (q for q in range(1, r) if gcd(q, r) == 1):
            ref = reference_cone(Variant.CYCLIC_QUOTIENT, r, q).generators
            a = _map_onto([gens[i] for i in perm], ref)
            if a is not None:
                return TerminalToricType(Variant.CYCLIC_QUOTIENT, LatticeMatrix(a), r, q)
    raise NotTerminal(f"{qt} passes Reid-Tai but has no (1,-1,q) normal form")  # pragma: no cover


def enumerate_terminal_orders(weights: Sequence[int], r_max: int) -> list[tuple[int, CyclicQuotientType]]:
    """All ``r <= r_max`` for which ``1/r(weights)`` is terminal."""
    if any(w < 1 for w in weights):
        raise LatticeError("weights must be positive")
    out = []
    for r in range(1, r_max + 1):
        qt = CyclicQuotientType(r, tuple(weights))
        if reid_tai_is_terminal(qt):
            out.append((r, qt.normal_form()))
    return out


def is_terminal_normal_form(qt: CyclicQuotientType) -> bool:
    """Whether ``qt`` is equivalent to some ``1/r(1, -1, q)`` with ``gcd(q, r) = 1``."""
    r = qt.order
    if r == 1:
        return True
    target = qt.normal_form()
    return any(
        CyclicQuotientType(r, (1, -1, q)).normal_form() == target
        for q in range(1, r)
        if gcd(q, r) == 1
    )
