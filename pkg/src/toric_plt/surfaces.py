"""Exceptional surfaces of weighted blow-ups and their intersection numbers.

Two kinds of surface occur: the weighted projective plane ``P(a1, a2, a3)``
over a smooth point, and the quadric ``x1 x2 + x3 x4 = 0`` in
``P(b1, b2, b3, b4)`` over the node.  All numbers are exact rationals.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd, prod
from typing import Optional, Sequence

from .fans import ConeGerm, discrepancy, odp_weight_ray
from .lattice import LatticeError

SMOOTH_GERM = ConeGerm.simplicial((1, 0, 0), (0, 1, 0), (0, 0, 1))
# curves {x_i = x_j = 0} actually lying on the quadric x1 x2 + x3 x4 = 0
ODP_CURVES = ((1, 3), (1, 4), (2, 3), (2, 4))


def standard_coefficient(k: int) -> Fraction:
    if k < 1:
        raise LatticeError(f"standard coefficients need k >= 1, got {k}")
    return Fraction(k - 1, k)


def is_standard(c: Fraction) -> bool:
    """Whether ``c == (k-1)/k`` for a positive integer ``k``."""
    c = Fraction(c)
    if not 0 <= c < 1:
        return False
    return (1 - c).numerator == 1


@dataclass(frozen=True)
class BoundaryDivisor:
    """A boundary ``sum c_i C_i`` with standard coefficients, keyed by curve name."""

    terms: tuple[tuple[str, Fraction], ...]
    toric: bool = False

    def __post_init__(self):
        terms = tuple((str(n), Fraction(c)) for n, c in self.terms)
        for name, c in terms:
            if not is_standard(c):
                raise LatticeError(f"coefficient {c} of {name} is not of the form (k-1)/k")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_orders(cls, named_orders: Sequence[tuple[str, int]]) -> "BoundaryDivisor":
        return cls(tuple((n, standard_coefficient(k)) for n, k in named_orders))

    def coefficient(self, name: str) -> Fraction:
        return dict(self.terms).get(name, Fraction(0))

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for _, c in self.terms)

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.terms)


@dataclass(frozen=True)
class DivisorClass:
    """``O(m)`` on a weighted plane, or ``c1 C1 + c2 C2`` on the node quadric."""

    degree: Optional[int] = None
    pair: Optional[tuple[int, int]] = None

    @property
    def is_effective(self) -> bool:
        if self.degree is not None:
            return self.degree >= 0
        return all(c >= 0 for c in self.pair)


def O(m: int) -> DivisorClass:  # noqa: N802 - matches the usual notation
    return DivisorClass(degree=int(m))


@dataclass(frozen=True)
class WeightedSurface:
    """Exceptional surface ``S`` together with ``Diff_S(0)``.

    For ``kind == "wps"``: ``weights`` are ``(a1, a2, a3)`` and
    ``multiplicities`` are ``(d1, d2, d3)``, the boundary being
    ``sum (d_i - 1)/d_i {x_i = 0}``.  For ``kind == "odp"``: ``weights`` are
    ``(b1, .., b4)`` and ``multiplicities`` maps the pair ``(i, j)`` to
    ``d_ij = gcd(b_k, b_l)`` for the complementary indices.
    """

    kind: str
    blowup_weights: tuple[int, ...]
    weights: tuple[int, ...]
    multiplicities: tuple
    boundary: BoundaryDivisor

    @property
    def pairwise_coprime(self) -> bool:
        return all(gcd(a, b) == 1 for a, b in combinations(self.weights, 2))


def surface_from_smooth_weights(beta: Sequence[int]) -> WeightedSurface:
    return _smooth_surface(tuple(int(b) for b in beta))


@lru_cache(maxsize=8192)
def _smooth_surface(beta: tuple[int, ...]) -> WeightedSurface:
    if len(beta) != 3 or min(beta) < 1:
        raise LatticeError(f"need three positive weights, got {beta}")
    if gcd(*beta) != 1:
        raise LatticeError(f"gcd{beta} != 1")
    d = tuple(gcd(beta[(i + 1) % 3], beta[(i + 2) % 3]) for i in range(3))
    a = tuple(beta[i] // (d[(i + 1) % 3] * d[(i + 2) % 3]) for i in range(3))
    boundary = BoundaryDivisor.from_orders([(f"x{i + 1}", d[i]) for i in range(3)])
    s = WeightedSurface("wps", beta, a, d, boundary)
    if not s.pairwise_coprime:  # pragma: no cover - follows from gcd(beta) == 1
        raise LatticeError(f"weights {a} are not pairwise coprime")
    return s


def odp_surface_from_weights(beta: Sequence[int]) -> WeightedSurface:
    return _odp_surface(tuple(int(b) for b in beta))


@lru_cache(maxsize=8192)
def _odp_surface(beta: tuple[int, ...]) -> WeightedSurface:
    if len(beta) != 4 or min(beta) < 1:
        raise LatticeError(f"need four positive weights, got {beta}")
    if beta[0] + beta[1] != beta[2] + beta[3]:
        raise LatticeError(f"beta1 + beta2 != beta3 + beta4 for {beta}")
    for triple in combinations(range(4), 3):
        if gcd(*(beta[i] for i in triple)) != 1:
            names = ", ".join(f"beta{i + 1}" for i in triple)
            raise LatticeError(f"gcd({names}) != 1 for {beta}")
    mult = {}
    for i, j in combinations(range(1, 5), 2):
        k, l = (x for x in range(1, 5) if x not in (i, j))
        mult[(i, j)] = gcd(beta[k - 1], beta[l - 1])
    boundary = BoundaryDivisor.from_orders([(f"x{i}x{j}", mult[(i, j)]) for i, j in ODP_CURVES])
    return WeightedSurface("odp", beta, beta, tuple(sorted(mult.items())), boundary)


def odp_multiplicity(surface: WeightedSurface, i: int, j: int) -> int:
    return dict(surface.multiplicities)[(min(i, j), max(i, j))]


# --- intersection numbers on weighted planes ------------------------------

def pairing(surface: WeightedSurface, a: DivisorClass, b: DivisorClass) -> Fraction:
    """``O(m) . O(n) = m n / (a1 a2 a3)``."""
    if surface.kind != "wps":
        raise LatticeError("pairing is implemented for weighted planes")
    return Fraction(a.degree * b.degree, prod(surface.weights))


def log_canonical_degree(surface: WeightedSurface) -> Fraction:
    """Degree ``m`` with ``K_S + Diff_S(0) ~ O(m)`` (as a Q-class)."""
    if surface.kind == "wps":
        a, d = surface.weights, surface.multiplicities
        return -sum(a) + sum(Fraction(di - 1, di) * ai for ai, di in zip(a, d))
    # adjunction on the quadric: (K_Z + S)|_S = O(deg - sum beta)
    b = surface.blowup_weights
    return Fraction(-(b[0] + b[1]))


def log_degree(surface: WeightedSurface, extra: Optional[DivisorClass] = None) -> Fraction:
    """Degree of ``K_S + Diff_S(0) + extra``; negative means anti-ample."""
    if surface.kind != "wps":
        raise LatticeError("log_degree is implemented for weighted planes")
    return log_canonical_degree(surface) + (extra.degree if extra is not None else 0)


def odp_hyperplane_square(surface: WeightedSurface) -> Fraction:
    """``O(1)|_S . O(1)|_S`` on the quadric: ``deg S / prod(beta)``."""
    b = surface.blowup_weights
    return Fraction(b[0] + b[1], prod(b))


def section_square_general(
    log_canonical_dot_gamma: Fraction, a_plus_one: Fraction, gamma_square: Fraction,
    alpha1: int, alpha2: int,
) -> Fraction:
    """``alpha2 (K_S + Diff_S) . Gamma / (a(S, 0) + 1) - alpha1 Gamma^2``."""
    return alpha2 * Fraction(log_canonical_dot_gamma) / a_plus_one - alpha1 * Fraction(gamma_square)


def _check_alpha(alpha1: int, alpha2: int):
    if alpha1 < 1 or alpha2 < 1 or gcd(alpha1, alpha2) != 1:
        raise LatticeError(f"(alpha1, alpha2) = ({alpha1}, {alpha2}) must be coprime positive integers")


def minimal_section_sq(
    beta: Sequence[int], gamma_degree: int, alpha1: int, alpha2: int,
    germ: ConeGerm = SMOOTH_GERM, ray: Optional[Sequence[int]] = None,
) -> Fraction:
    """Self-intersection of the minimal section on the conic bundle, general formula.

    ``beta`` are the blow-up weights of the exceptional plane ``S`` and
    ``Gamma ~ O(gamma_degree)``.  ``a(S, 0) + 1`` is taken from the toric
    discrepancy of ``ray`` (``beta`` itself over a smooth germ).
    """
    _check_alpha(alpha1, alpha2)
    s = surface_from_smooth_weights(beta)
    gamma = O(gamma_degree)
    kd = pairing(s, O(1), gamma) * log_canonical_degree(s)
    a1 = discrepancy(germ, beta if ray is None else ray) + 1
    return section_square_general(kd, a1, pairing(s, gamma, gamma), alpha1, alpha2)


def odp_section_square_general(beta: Sequence[int], alpha1: int, alpha2: int) -> Fraction:
    """Same general formula on the node quadric with ``Gamma ~ O(beta2)|_S``."""
    _check_alpha(alpha1, alpha2)
    s = odp_surface_from_weights(beta)
    h2 = odp_hyperplane_square(s)
    b2 = s.blowup_weights[1]
    kd = log_canonical_degree(s) * b2 * h2
    a1 = discrepancy(ConeGerm.odp(), odp_weight_ray(beta)) + 1
    return section_square_general(kd, a1, b2 * b2 * h2, alpha1, alpha2)


def odp_minimal_section_sq(beta: Sequence[int], alpha1: int, alpha2: int) -> Fraction:
    """Closed form ``-(alpha2 + alpha1 b2) / b1 * (1/b3 + 1/b4)``."""
    _check_alpha(alpha1, alpha2)
    b1, b2, b3, b4 = odp_surface_from_weights(beta).blowup_weights
    tail = Fraction(1, b3) + Fraction(1, b4)
    return -alpha2 * Fraction(1, b1) * tail - alpha1 * Fraction(b2, b1) * tail


def odp_gamma_class() -> DivisorClass:
    """``Gamma ~ C1 + C2 = {x2 = 0}|_S`` with ``C1 = {x2=x3=0}``, ``C2 = {x2=x4=0}``."""
    return DivisorClass(pair=(1, 1))
