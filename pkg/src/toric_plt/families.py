"""Non-toric plt blow-up families and their conic bundle structure.

Each family is described by a weighted blow-up ``S`` of the germ, a curve
``Gamma`` on ``S`` and the section weights ``(alpha1, alpha2)`` of the
second blow-up ``e4 = alpha2 * e_Gamma + alpha1 * e_S``.  The exceptional
surface ``E~`` is a conic bundle over ``Gamma``; every special fiber lives in
a local toric chart ``<e_fiber, e_Gamma, e_S>`` of type
``1/m(w_fiber, w_Gamma, -1)``.

:func:`build_family` produces the claimed structure from closed formulas;
:func:`verify_fiber_charts` recomputes it from cones.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd
from typing import Iterator, Optional, Sequence

from .classify import TerminalToricType, Variant
from .fans import (
    ODP_REFERENCE,
    ConeGerm,
    CyclicQuotientType,
    lattice_quotient_type,
    odp_weight_ray,
    orbit_surface_type,
    star_subdivide,
    transversal_type,
)
from .lattice import (
    LatticeError,
    LatticeMatrix,
    basis_of_span,
    change_of_basis_ex2,
    content,
    cross_product,
    identity,
    unimodular_completion,
)
from .surfaces import (
    BoundaryDivisor,
    O,
    log_degree,
    minimal_section_sq,
    odp_minimal_section_sq,
    odp_multiplicity,
    odp_surface_from_weights,
    standard_coefficient,
    surface_from_smooth_weights,
)

FAMILIES = ("A", "D_even", "D_odd", "E6", "E7", "E8", "ODP")
PARAMETERS = {
    "A": ("k", "a2", "a3", "d1"),
    "D_even": ("k",),
    "D_odd": ("k",),
    "E6": (),
    "E7": (),
    "E8": (),
    "ODP": ("a1", "k", "d13", "d14", "a3", "a4"),
}
E1, E2, E3 = identity(3)


class FamilyError(LatticeError):
    """A family specification violates one of its constraints."""


class ChartMismatch(LatticeError):
    """Claimed and recomputed chart data disagree; ``diff`` lists the entries."""

    def __init__(self, diff: list[dict]):
        self.diff = diff
        lines = "; ".join(f"{d['fiber']} {d['check']}: claimed {d['claimed']}, computed {d['computed']}" for d in diff)
        super().__init__(f"chart mismatch: {lines}")


def smooth_ambient() -> TerminalToricType:
    return TerminalToricType(Variant.SMOOTH, LatticeMatrix(identity(3)))


def cyclic_ambient(r: int, q: int) -> TerminalToricType:
    return TerminalToricType(Variant.CYCLIC_QUOTIENT, LatticeMatrix(identity(3)), r, q)


def _mod_inverse(a: int, m: int) -> int:
    return pow(a, -1, m)


@dataclass(frozen=True)
class FamilySpec:
    family: str
    params: tuple[int, ...] = ()
    alpha: tuple[int, int] = (1, 1)
    ambient: TerminalToricType = field(default_factory=smooth_ambient)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise FamilyError(f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}")
        params = tuple(int(p) for p in self.params)
        names = PARAMETERS[self.family]
        if len(params) != len(names):
            raise FamilyError(f"{self.family} takes parameters {names}, got {params}")
        object.__setattr__(self, "params", params)
        a1, a2 = (int(x) for x in self.alpha)
        object.__setattr__(self, "alpha", (a1, a2))
        if a1 < 1 or a2 < 1:
            raise FamilyError(f"alpha must be positive, got {self.alpha}")
        if gcd(a1, a2) != 1:
            raise FamilyError(f"gcd(alpha1, alpha2) = {gcd(a1, a2)} != 1")
        if any(p < 1 for p in params):
            raise FamilyError(f"parameters must be positive, got {dict(zip(names, params))}")
        getattr(self, f"_validate_{self.family}")()
        if self.quotient_ambient:
            self._validate_quotient()

    # --- parameters -------------------------------------------------------
    def param(self, name: str) -> int:
        return self.params[PARAMETERS[self.family].index(name)]

    @property
    def quotient_ambient(self) -> bool:
        return self.ambient.variant is Variant.CYCLIC_QUOTIENT

    @property
    def n(self) -> int:
        """Index of the Du Val singularity cut out by the lifted curve."""
        if self.family == "A":
            return self.param("k") * self.param("d1") - 1
        if self.family == "D_even":
            return 2 * self.param("k") + 2
        if self.family == "D_odd":
            return 2 * self.param("k") + 1
        if self.family in ("E6", "E7", "E8"):
            return int(self.family[1])
        raise FamilyError("the node family has no Du Val index")

    @property
    def l(self) -> int:  # noqa: E743 - the standard name of this weight
        return (self.param("a2") + self.param("a3")) // self.param("k")

    @property
    def weights(self) -> tuple[int, ...]:
        """Blow-up weights in the smooth (or covering) coordinates."""
        f = self.family
        if f == "A":
            k, a2, a3, d1 = self.params
            return (self.l, a2 * d1, a3 * d1)
        if f == "D_even":
            k = self.params[0]
            return (2, 2 * k, 2 * k + 1)
        if f == "D_odd":
            k = self.params[0]
            return (2, 2 * k - 1, 2 * k)
        if f == "E6":
            return (3, 4, 6)
        if f == "E7":
            return (4, 6, 9)
        if f == "E8":
            return (6, 10, 15)
        a1, k, d13, d14, a3, a4 = self.params
        return (a1, a1 * k * d13 * d14, a3 * d14, a4 * d13)

    @property
    def gamma_degree(self) -> int:
        """``m`` with ``Gamma ~ O(m)`` on the weighted plane ``S``."""
        f = self.family
        if f == "A":
            return self.param("a2") + self.param("a3")
        if f == "D_even":
            return 2 * self.param("k") + 1
        if f == "D_odd":
            return 2 * self.param("k")
        return {"E6": 2, "E7": 3, "E8": 1}[f]

    @property
    def descended_ray(self) -> tuple[int, int, int]:
        """Weight ray in the quotient lattice, ``(beta1 e1 + beta2 e2 + beta3 (1,q,r)) / r``."""
        r, q = self.ambient.r, self.ambient.q
        b1, b2, b3 = self.weights
        return ((b1 + b3) // r, (b2 + q * b3) // r, b3)

    # --- validation -------------------------------------------------------
    def _validate_A(self):
        k, a2, a3, d1 = self.params
        if (a2 + a3) % k:
            raise FamilyError(f"k | (a2 + a3) fails: {k} does not divide {a2 + a3}")
        if gcd(a2, a3) != 1:
            raise FamilyError(f"gcd(a2, a3) = {gcd(a2, a3)} != 1")
        if gcd(self.l, d1) != 1:
            raise FamilyError(f"gcd(l, d1) = gcd({self.l}, {d1}) != 1")

    def _validate_D_even(self):
        pass  # k >= 1 is checked with the other positivity conditions

    def _validate_D_odd(self):
        if self.params[0] < 2:
            raise FamilyError("D_odd needs k >= 2")

    def _validate_E6(self):
        pass

    _validate_E7 = _validate_E8 = _validate_E6

    def _validate_ODP(self):
        a1, k, d13, d14, a3, a4 = self.params
        beta = self.weights
        if k * d13 * d14 < 2:
            raise FamilyError("k * d13 * d14 >= 2 is needed, otherwise Gamma is a toric curve")
        try:
            s = odp_surface_from_weights(beta)
        except LatticeError as exc:
            raise FamilyError(str(exc)) from None
        for i, j in ((2, 3), (2, 4)):
            actual = odp_multiplicity(s, i, j)
            if actual != 1:
                raise FamilyError(f"d{i}{j} = {actual} != 1 for weights {beta}")

    def _validate_quotient(self):
        if self.family != "A":
            raise FamilyError("cyclic quotient ambients are supported for the A family only")
        r, q = self.ambient.r, self.ambient.q
        b1, b2, b3 = self.weights
        if (b1 + b3) % r or (b2 + q * b3) % r:
            raise FamilyError(f"weights {self.weights} do not descend to 1/{r}(1,-1,{q})")
        b = self.descended_ray
        if content(b) != 1:
            raise FamilyError(f"descended ray {b} is not primitive")
        for g in (E2, (1, q, r)):
            if transversal_type(g, b).order != 1:
                raise FamilyError(f"curve V({g}, {b}) is singular, fiber structure differs")


# --- claimed structure ----------------------------------------------------

@dataclass(frozen=True)
class FiberChart:
    """Local toric model of one special fiber.

    ``fiber``, ``gamma`` and ``surface`` are the rays whose divisors are the
    fiber direction, the curve ``Gamma`` and ``S``; ``claimed`` is the germ
    ``1/m(w_fiber, w_gamma, -1)`` the closed formulas predict.
    """

    fiber_id: str
    fiber: tuple[int, ...]
    gamma: tuple[int, ...]
    surface: tuple[int, ...]
    order: int
    w_fiber: int
    w_gamma: int
    conjugation: Optional[LatticeMatrix] = None


@dataclass(frozen=True)
class FiberData:
    fiber_id: str
    k: int
    b: int
    at_section: CyclicQuotientType
    other: CyclicQuotientType

    @property
    def coefficient(self) -> Fraction:
        return standard_coefficient(self.k)


@dataclass(frozen=True)
class ConicBundleDescription:
    spec: FamilySpec
    fibers: tuple[FiberData, ...]
    section_square: Optional[Fraction]
    transversal: CyclicQuotientType
    e0_coefficient: Fraction
    boundary: BoundaryDivisor
    toric: bool


def _fiber_from_germ(fiber_id: str, m: int, w_f: int, w_g: int, alpha: tuple[int, int]) -> FiberData:
    a1, a2 = alpha
    num = a1 * w_g + a2
    k = gcd(m, num)
    b = num // k
    order = m // k
    return FiberData(
        fiber_id,
        k,
        b,
        CyclicQuotientType(order, (w_f, -b)),
        CyclicQuotientType(order, (w_f, b)),
    )


def _transversal_chart(fiber_id: str, fiber_ray, weight_ray, order: int) -> FiberChart:
    """Product model along the curve ``V(fiber_ray, weight_ray)`` with ``Gamma`` transversal."""
    plane = basis_of_span((fiber_ray, weight_ray))
    normal = cross_product(*plane)
    gamma = unimodular_completion(normal)[0]  # normal . gamma = 1
    return FiberChart(fiber_id, tuple(fiber_ray), tuple(gamma), tuple(weight_ray), order, 1, 0)


def fiber_charts(spec: FamilySpec) -> list[FiberChart]:
    """The local chart of every special fiber together with the predicted germ."""
    f, beta = spec.family, spec.weights
    if spec.quotient_ambient:
        r, q = spec.ambient.r, spec.ambient.q
        b = spec.descended_ray
        m = change_of_basis_ex2(q, r)
        mb = m @ b
        return [
            FiberChart("f1", E1, (1, q, r), b, abs(mb[2]), mb[0], mb[1], conjugation=m),
            FiberChart("f2", E1, E2, b, abs(b[2]), b[0], b[1]),
        ]
    if f == "A":
        l, b2, b3 = beta
        return [FiberChart("f1", E1, E3, beta, b2, l, b3), FiberChart("f2", E1, E2, beta, b3, l, b2)]
    if f in ("D_even", "D_odd"):
        m = spec.n - 2
        along = E3 if f == "D_even" else E2
        return [
            FiberChart("f1", E3, E1, beta, m, 1, 2),
            _transversal_chart("f2", along, beta, 2),
            _transversal_chart("f3", along, beta, 2),
        ]
    if f == "E6":
        return [
            _transversal_chart("f1", E1, beta, 2),
            _transversal_chart("f2", E2, beta, 3),
            _transversal_chart("f3", E2, beta, 3),
        ]
    if f == "E7":
        return [
            FiberChart("f1", E3, E2, beta, 4, 1, 2),
            _transversal_chart("f2", E3, beta, 2),
            _transversal_chart("f3", E1, beta, 3),
        ]
    if f == "E8":
        return [
            _transversal_chart("f1", E1, beta, 5),
            _transversal_chart("f2", E3, beta, 2),
            _transversal_chart("f3", E2, beta, 3),
        ]
    v1, v2, v3, v4 = ODP_REFERENCE
    w = odp_weight_ray(beta)
    b1, b2, b3, b4 = beta
    return [FiberChart("f1", v2, v3, w, b3, b1, b2), FiberChart("f2", v4, v1, w, b4, b1, b2)]


def section_square(spec: FamilySpec) -> Optional[Fraction]:
    """Self-intersection of the minimal section via the general formula."""
    a1, a2 = spec.alpha
    if spec.family == "ODP":
        return odp_minimal_section_sq(spec.weights, a1, a2)
    if spec.quotient_ambient:
        return None
    return minimal_section_sq(spec.weights, spec.gamma_degree, a1, a2)


def section_square_closed_form(spec: FamilySpec) -> Fraction:
    """Specialized closed forms for the A, D and E families (smooth ambient)."""
    a1, a2 = spec.alpha
    f = spec.family
    if f == "A":
        k, p2, p3, d1 = spec.params
        return -(a2 * Fraction(1, d1) * Fraction(k, p2 * p3) + a1 * Fraction(k * (p2 + p3), p2 * p3))
    if f in ("D_even", "D_odd"):
        n = spec.n
        return -(a2 * Fraction(1, n - 2) + a1 * Fraction(2 * n - 2, n - 2))
    if f == "E6":
        return -(a2 * Fraction(1, 6) + a1 * 2)
    if f == "E7":
        return -(a2 * Fraction(1, 12) + a1 * Fraction(3, 2))
    if f == "E8":
        return -(a2 * Fraction(1, 30) + a1)
    raise FamilyError("no closed form for this family here")


def family_log_degree(spec: FamilySpec) -> Fraction:
    """Degree of ``K_S + Diff_S(0) + Gamma`` on the weighted plane of a smooth-ambient family."""
    return log_degree(surface_from_smooth_weights(spec.weights), O(spec.gamma_degree))


def diff_E(spec: FamilySpec) -> BoundaryDivisor:  # noqa: N802
    fibers = [_fiber_from_germ(c.fiber_id, c.order, c.w_fiber, c.w_gamma, spec.alpha) for c in fiber_charts(spec)]
    return _boundary(spec, fibers)


def _boundary(spec: FamilySpec, fibers: Sequence[FiberData]) -> BoundaryDivisor:
    terms = [(fd.fiber_id, fd.coefficient) for fd in fibers]
    terms.append(("E0", standard_coefficient(spec.alpha[0])))
    return BoundaryDivisor(tuple(terms), toric=spec.family in ("A", "ODP"))


def build_family(spec: FamilySpec) -> ConicBundleDescription:
    a1, a2 = spec.alpha
    fibers = tuple(
        _fiber_from_germ(c.fiber_id, c.order, c.w_fiber, c.w_gamma, spec.alpha) for c in fiber_charts(spec)
    )
    return ConicBundleDescription(
        spec=spec,
        fibers=fibers,
        section_square=section_square(spec),
        transversal=CyclicQuotientType(a1, (-a2, 1)),
        e0_coefficient=standard_coefficient(a1),
        boundary=_boundary(spec, fibers),
        toric=spec.family in ("A", "ODP"),
    )


# --- verification ---------------------------------------------------------

def _chart_types(chart: FiberChart, alpha: tuple[int, int]):
    a1, a2 = alpha
    e4 = tuple(a2 * g + a1 * s for g, s in zip(chart.gamma, chart.surface))
    if content(e4) != 1:
        raise LatticeError(f"subdivision ray {e4} is not primitive")
    germ = ConeGerm.simplicial(chart.fiber, chart.gamma, chart.surface)
    fan = star_subdivide(germ, e4)
    # the two cones of E~ along this fiber must both appear in the subdivision
    try:
        fan.cone_with(e4, chart.fiber, chart.surface)
        fan.cone_with(e4, chart.fiber, chart.gamma)
    except LookupError:
        raise LatticeError(f"subdivision of {germ.generators} at {e4} lacks the fiber cones") from None
    return (
        lattice_quotient_type((chart.fiber, chart.gamma, chart.surface)),
        orbit_surface_type(e4, chart.fiber, chart.surface),
        orbit_surface_type(e4, chart.fiber, chart.gamma),
        transversal_type(chart.gamma, e4),
        e4,
    )


def verify_fiber_charts(spec: FamilySpec, description: Optional[ConicBundleDescription] = None) -> bool:
    """Recompute every fiber's singularities from cones and compare with the claims.

    Returns ``True`` on an exact match, raises :class:`ChartMismatch` otherwise.
    """
    desc = description or build_family(spec)
    claimed = {fd.fiber_id: fd for fd in desc.fibers}
    diff: list[dict] = []

    def expect(fiber_id, check, want, got, ok):
        if not ok:
            diff.append({"fiber": fiber_id, "check": check, "claimed": str(want), "computed": str(got)})

    for chart in fiber_charts(spec):
        fd = claimed[chart.fiber_id]
        germ_claim = CyclicQuotientType(chart.order, (chart.w_fiber, chart.w_gamma, -1))
        germ, at_sec, other, trans, e4 = _chart_types(chart, spec.alpha)
        expect(chart.fiber_id, "germ", germ_claim, germ,
               germ.order == germ_claim.order and germ.ordered_equivalent(germ_claim))
        expect(chart.fiber_id, "section point", fd.at_section, at_sec,
               at_sec.order == fd.at_section.order and at_sec.ordered_equivalent(fd.at_section))
        expect(chart.fiber_id, "other point", fd.other, other,
               other.order == fd.other.order and other.ordered_equivalent(fd.other))
        expect(chart.fiber_id, "transversal along E0", desc.transversal, trans,
               trans.order == desc.transversal.order and trans.ordered_equivalent(desc.transversal))
        if chart.conjugation is not None:
            m = chart.conjugation
            moved = LatticeChart(m, chart)
            expect(chart.fiber_id, "det M", -1, m.determinant, m.determinant == -1)
            expect(chart.fiber_id, "M e1", E1, moved.fiber, moved.fiber == E1)
            expect(chart.fiber_id, "M e3", E2, moved.gamma, moved.gamma == E2)
            a1, a2 = spec.alpha
            me4 = m @ e4
            want = tuple(a2 * g + a1 * s for g, s in zip(E2, moved.surface))
            expect(chart.fiber_id, "M e4", want, me4, me4 == want)
            conj = _chart_types(moved.as_chart(), spec.alpha)
            for name, x, y in zip(("germ", "section point", "other point", "transversal"),
                                  (germ, at_sec, other, trans), conj):
                expect(chart.fiber_id, f"{name} after M", x, y, x.order == y.order and x.ordered_equivalent(y))
    if diff:
        raise ChartMismatch(diff)
    return True


@dataclass(frozen=True)
class LatticeChart:
    """A fiber chart pushed through a lattice automorphism."""

    matrix: LatticeMatrix
    chart: FiberChart

    @property
    def fiber(self):
        return self.matrix @ self.chart.fiber

    @property
    def gamma(self):
        return self.matrix @ self.chart.gamma

    @property
    def surface(self):
        return self.matrix @ self.chart.surface

    def as_chart(self) -> FiberChart:
        c = self.chart
        return FiberChart(c.fiber_id, self.fiber, self.gamma, self.surface, c.order, c.w_fiber, c.w_gamma)


def klt_check(desc: ConicBundleDescription) -> bool:
    """Checkable part of the klt claim for ``(E, Diff_E(0))``."""
    for fd in desc.fibers:
        for t in (fd.at_section, fd.other):
            if not isinstance(t, CyclicQuotientType) or t.dim != 2 or t.order < 1:
                raise LatticeError(f"invalid fiber singularity {t!r}")
    if desc.transversal.dim != 2:
        raise LatticeError("transversal type must be two-dimensional")
    return all(0 <= c < 1 for _, c in desc.boundary.terms)


# --- parameter sweeps -----------------------------------------------------

def _coprime_alphas(alpha_max: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(1, alpha_max + 1) for b in range(1, alpha_max + 1) if gcd(a, b) == 1]


def _try(family, params, alpha, ambient=None) -> Optional[FamilySpec]:
    try:
        if ambient is None:
            return FamilySpec(family, params, alpha)
        return FamilySpec(family, params, alpha, ambient)
    except FamilyError:
        return None


def iter_family_params(family: str, param_max: int) -> Iterator[tuple[int, ...]]:
    """Admissible parameter tuples with every entry at most ``param_max``."""
    if family == "ODP":
        # a4 is determined by beta1 + beta2 = beta3 + beta4
        for a1, k, d13, d14, a3 in product(range(1, param_max + 1), repeat=5):
            rest = a1 + a1 * k * d13 * d14 - a3 * d14
            if rest > 0 and rest % d13 == 0 and rest // d13 <= param_max:
                params = (a1, k, d13, d14, a3, rest // d13)
                if _try(family, params, (1, 1)) is not None:
                    yield params
        return
    names = PARAMETERS[family]
    for params in product(range(1, param_max + 1), repeat=len(names)):
        if _try(family, params, (1, 1)) is not None:
            yield params


def iter_family_specs(param_max: int, alpha_max: int, families: Sequence[str] = FAMILIES) -> Iterator[FamilySpec]:
    alphas = _coprime_alphas(alpha_max)
    for family in families:
        for params in iter_family_params(family, param_max):
            for alpha in alphas:
                yield FamilySpec(family, params, alpha)


def quotient_ambients(spec_params: tuple[int, ...], r_max: int) -> Iterator[TerminalToricType]:
    """Cyclic quotient ambients ``1/r(1,-1,q)`` to which an A-family blow-up descends."""
    base = FamilySpec("A", spec_params)
    l, b2, b3 = base.weights
    for r in range(2, r_max + 1):
        if (l + b3) % r or gcd(l, r) != 1:
            continue
        q = b2 * _mod_inverse(l, r) % r
        if gcd(q, r) != 1:
            continue
        amb = cyclic_ambient(r, q)
        if _try("A", spec_params, (1, 1), amb) is not None:
            yield amb


def iter_quotient_specs(param_max: int, alpha_max: int, r_max: int = 20) -> Iterator[FamilySpec]:
    alphas = _coprime_alphas(alpha_max)
    for params in iter_family_params("A", param_max):
        for amb in quotient_ambients(params, r_max):
            for alpha in alphas:
                yield FamilySpec("A", params, alpha, amb)
