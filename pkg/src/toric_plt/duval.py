"""Recognition of Du Val singularities cut out by lifted curves.

A curve ``Gamma`` on ``P(a1, a2, a3)`` given by generic coefficients on a
monomial support lifts to a quasihomogeneous ``phi`` on ``C^3`` through
``x_i -> x_i^{d_i}``.  Whether ``phi`` is Du Val is read off from the support
and the weights only.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from math import gcd
from typing import Optional, Sequence

from .lattice import LatticeError, cross_product, dot

Exponent = tuple[int, int, int]
UNITS: tuple[Exponent, ...] = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


class SupportParseError(LatticeError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class NotQuasihomogeneous(LatticeError):
    def __init__(self, first: tuple[Exponent, int], second: tuple[Exponent, int]):
        (m1, d1), (m2, d2) = first, second
        super().__init__(f"monomial {m1} has degree {d1} but {m2} has degree {d2}")
        self.degrees = (d1, d2)


@dataclass(frozen=True)
class MonomialSupport:
    exponents: tuple[Exponent, ...]

    def __post_init__(self):
        exps = tuple(tuple(int(x) for x in e) for e in self.exponents)
        if not exps:
            raise LatticeError("a support needs at least one monomial")
        if any(len(e) != 3 or min(e) < 0 for e in exps):
            raise LatticeError(f"exponents must be nonnegative triples, got {exps}")
        if len(set(exps)) != len(exps):
            raise LatticeError("repeated monomial in support")
        object.__setattr__(self, "exponents", exps)

    def __iter__(self):
        return iter(self.exponents)

    def __len__(self):
        return len(self.exponents)

    def as_set(self) -> frozenset:
        return frozenset(self.exponents)

    def degrees(self, beta: Sequence[int]) -> list[int]:
        return [dot(e, beta) for e in self.exponents]

    def __str__(self):
        return " + ".join(monomial_text(e) for e in self.exponents)


def monomial_text(e: Exponent) -> str:
    parts = [f"x{i + 1}" + (f"^{p}" if p > 1 else "") for i, p in enumerate(e) if p]
    return " ".join(parts) or "1"


_TOKEN = re.compile(r"x([123])(?:\^(\d+))?")


def parse_support(text: str) -> MonomialSupport:
    """Parse one monomial per line, ``x1^a x2^b x3^c`` with implicit exponent 1.

    ``#`` starts a comment; a lone ``1`` is the constant monomial.
    """
    exps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        e = [0, 0, 0]
        pos = 0
        if line.strip() == "1":
            exps.append((0, 0, 0))
            continue
        while pos < len(line):
            if line[pos].isspace() or line[pos] == "*":
                pos += 1
                continue
            m = _TOKEN.match(line, pos)
            if m is None:
                raise SupportParseError(f"unexpected {line[pos]!r}", lineno, pos + 1)
            e[int(m.group(1)) - 1] += int(m.group(2) or 1)
            pos = m.end()
        exps.append(tuple(e))
    if not exps:
        raise SupportParseError("no monomials", max(1, len(text.splitlines())), 1)
    try:
        return MonomialSupport(tuple(exps))
    except LatticeError as exc:
        raise SupportParseError(str(exc), 1, 1) from None


def lift_curve(support: MonomialSupport, d: Sequence[int]) -> MonomialSupport:
    if len(d) != 3 or min(d) < 1:
        raise LatticeError(f"multiplicities must be three positive integers, got {tuple(d)}")
    return MonomialSupport(tuple(tuple(di * li for di, li in zip(d, e)) for e in support))


@dataclass(frozen=True)
class DuValType:
    series: str
    n: int

    def __post_init__(self):
        if self.series == "A" and self.n < 1:
            raise LatticeError("A_n needs n >= 1")
        if self.series == "D" and self.n < 4:
            raise LatticeError("D_n needs n >= 4")
        if self.series == "E" and self.n not in (6, 7, 8):
            raise LatticeError("E_n needs n in 6, 7, 8")
        if self.series not in "ADE" or len(self.series) != 1:
            raise LatticeError(f"unknown series {self.series!r}")

    def __str__(self):
        return f"{self.series}{self.n}"


# --- weight families ------------------------------------------------------

@dataclass(frozen=True)
class WeightFamilyMatch:
    family: str
    params: tuple[int, ...]
    permutation: tuple[int, int, int]
    duval: Optional[DuValType]


def weight_family_matches(beta: Sequence[int]) -> list[WeightFamilyMatch]:
    """Every way the (permuted) weights fit one of the six families, E before D before A."""
    beta = tuple(int(b) for b in beta)
    if len(beta) != 3 or min(beta) < 1 or gcd(*beta) != 1:
        raise LatticeError(f"need three positive weights with gcd 1, got {beta}")
    found: list[WeightFamilyMatch] = []
    perms = sorted(set(permutations(range(3))))
    for name, triple in (("E8", (6, 10, 15)), ("E7", (4, 6, 9)), ("E6", (3, 4, 6))):
        for p in perms:
            if tuple(beta[i] for i in p) == triple:
                found.append(WeightFamilyMatch(name, (), p, DuValType("E", int(name[1]))))
                break
    for p in perms:
        b1, b2, b3 = (beta[i] for i in p)
        if b1 != 2:
            continue
        if b2 % 2 == 0 and b3 == b2 + 1:
            k = b2 // 2
            found.append(WeightFamilyMatch("D_even", (k,), p, DuValType("D", 2 * k + 2)))
        if b3 % 2 == 0 and b2 == b3 - 1 and b3 >= 4:
            k = b3 // 2
            found.append(WeightFamilyMatch("D_odd", (k,), p, DuValType("D", 2 * k + 1)))
    for p in perms:
        b1, b2, b3 = (beta[i] for i in p)
        d1 = gcd(b2, b3)
        a2, a3 = b2 // d1, b3 // d1
        if (a2 + a3) % b1 == 0:
            k = (a2 + a3) // b1
            n = k * d1 - 1
            found.append(WeightFamilyMatch("A", (k, a2, a3, d1), p, DuValType("A", n) if n >= 1 else None))
    return found


def recognize_weight_family(beta: Sequence[int]) -> Optional[tuple[DuValType, tuple[int, ...]]]:
    """Preferred family match as ``(type, parameters)``; ``None`` if none fits.

    E beats D beats A; among A matches the largest index wins, then the
    smallest parameter tuple, so the answer ignores the order of ``beta``.
    """
    rank = {"E": 0, "D": 1, "A": 2}
    best = min(
        (m for m in weight_family_matches(beta) if m.duval is not None),
        key=lambda m: (rank[m.duval.series], -m.duval.n, m.params),
        default=None,
    )
    return None if best is None else (best.duval, best.params)


# --- Newton polyhedron ----------------------------------------------------

def _candidate_normals(points: Sequence[Exponent]) -> set[tuple[int, int, int]]:
    out = set()
    diffs = [tuple(q - p for p, q in zip(a, b)) for a, b in combinations(points, 2)]
    for u, v in combinations(list(diffs) + list(UNITS), 2):
        n = cross_product(u, v)
        if any(n) and (min(n) >= 0 or max(n) <= 0):
            out.add(tuple(abs(x) for x in n))
    return out


def newton_interior_contains_one(support: MonomialSupport) -> bool:
    """Whether ``(1,1,1)`` lies in the interior of ``conv(support) + R^3_{>=0}``.

    Every facet normal of the polyhedron is a nonnegative cross product of two
    edge directions (differences of support points or coordinate rays); any
    such normal gives a valid inequality, so strictness over all of them is
    exactly interior membership.
    """
    pts = list(support)
    for a in _candidate_normals(pts):
        if sum(a) <= min(dot(a, p) for p in pts):
            return False
    return True


# --- Du Val test ----------------------------------------------------------

def weighted_degree(support: MonomialSupport, beta: Sequence[int]) -> int:
    first = None
    for e in support:
        d = dot(e, beta)
        if first is None:
            first = (e, d)
        elif d != first[1]:
            raise NotQuasihomogeneous(first, (e, d))
    return first[1]


def is_isolated(support: MonomialSupport) -> bool:
    """Isolatedness of the generic member of a quasihomogeneous support.

    For every nonempty ``I`` there must be ``|I|`` indices ``k`` having a
    monomial ``x_I^m * x_k``.
    """
    exps = list(support)
    for size in (1, 2, 3):
        for idx in combinations(range(3), size):
            hits = set()
            for e in exps:
                for k in range(3):
                    if e[k] >= 1 and all(
                        (e[j] - (j == k)) == 0 for j in range(3) if j not in idx
                    ):
                        hits.add(k)
            if len(hits) < size:
                return False
    return True


def _is_fold_pattern(support: MonomialSupport) -> bool:
    """Support of the shape ``{x_a^2, x_b^2 x_c}``."""
    if len(support) != 2:
        return False
    for a, b, c in permutations(range(3)):
        sq = tuple(2 * (i == a) for i in range(3))
        other = tuple(2 * (i == b) + (i == c) for i in range(3))
        if support.as_set() == {sq, other}:
            return True
    return False


def _type_from_weights(w: Sequence[Fraction]) -> Optional[DuValType]:
    ws = sorted(w, reverse=True)
    half, third = Fraction(1, 2), Fraction(1, 3)
    for n, tail in ((6, Fraction(1, 4)), (7, Fraction(2, 9)), (8, Fraction(1, 5))):
        if ws == [half, third, tail]:
            return DuValType("E", n)
    for i, j in combinations(range(3), 2):
        if w[i] + w[j] == 1:
            rest = w[3 - i - j]
            inv = 1 / rest
            if inv.denominator == 1 and inv >= 2:
                return DuValType("A", int(inv) - 1)
    if ws[0] == half:
        inv = 1 / ws[2]
        if inv.denominator == 1:
            n = int(inv) + 1
            if n >= 4 and ws[1] == Fraction(n - 2, 2 * (n - 1)):
                return DuValType("D", n)
    return None


def diagnose_duval(support: MonomialSupport, beta: Sequence[int]) -> tuple[Optional[DuValType], str]:
    """Du Val type of the generic member, with the reason when there is none."""
    beta = tuple(int(b) for b in beta)
    delta = weighted_degree(support, beta)
    if any(e in UNITS for e in support):
        return None, "smooth: linear monomial"
    if any(all(e[i] == 0 for e in support) for i in range(3)):
        return None, "independent of a variable"
    if _is_fold_pattern(support):
        return None, "non-isolated pattern x_a^2 + x_b^2 x_c"
    if not is_isolated(support):
        return None, "not an isolated singularity"
    if not newton_interior_contains_one(support):
        return None, "(1,1,1) not interior to the Newton polyhedron"
    t = _type_from_weights([Fraction(b, delta) for b in beta])
    if t is None:
        return None, "weights match no ADE normal form"
    return t, "du val"


def is_duval(support: MonomialSupport, beta: Sequence[int]) -> Optional[DuValType]:
    return diagnose_duval(support, beta)[0]


# --- canonical curves -----------------------------------------------------

def canonical_gamma(family: str, params: Sequence[int] = ()) -> tuple[MonomialSupport, tuple[int, int, int]]:
    """Support of the curve ``Gamma`` on ``S`` for a family, with the multiplicities ``d``."""
    if family == "A":
        k, _, _, d1 = params
        return MonomialSupport(((0, 1, 1), (k, 0, 0))), (d1, 1, 1)
    if family == "D_even":
        (k,) = params
        return MonomialSupport(((0, 0, 1), (1, 2, 0), (2 * k + 1, 0, 0))), (1, 1, 2)
    if family == "D_odd":
        (k,) = params
        return MonomialSupport(((1, 1, 0), (0, 0, 2), (2 * k, 0, 0))), (1, 2, 1)
    if family == "E6":
        return MonomialSupport(((2, 0, 0), (0, 1, 0), (0, 0, 2))), (2, 3, 1)
    if family == "E7":
        return MonomialSupport(((1, 1, 0), (0, 3, 0), (0, 0, 1))), (3, 1, 2)
    if family == "E8":
        return MonomialSupport(((1, 0, 0), (0, 1, 0), (0, 0, 1))), (5, 3, 2)
    raise LatticeError(f"no canonical curve for family {family!r}")


def expected_duval(family: str, params: Sequence[int] = ()) -> Optional[DuValType]:
    if family == "A":
        k, _, _, d1 = params
        return DuValType("A", k * d1 - 1) if k * d1 >= 2 else None
    if family == "D_even":
        return DuValType("D", 2 * params[0] + 2)
    if family == "D_odd":
        return DuValType("D", 2 * params[0] + 1)
    return DuValType("E", int(family[1]))


