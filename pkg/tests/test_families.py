import dataclasses
from fractions import Fraction
from itertools import islice
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toric_plt.families import (
    FAMILIES,
    ChartMismatch,
    FamilyError,
    FamilySpec,
    build_family,
    cyclic_ambient,
    diff_E,
    family_log_degree,
    iter_family_specs,
    iter_quotient_specs,
    klt_check,
    section_square,
    section_square_closed_form,
    verify_fiber_charts,
)
from toric_plt.fans import CyclicQuotientType
from toric_plt.lattice import LatticeError, change_of_basis_ex2
from toric_plt.surfaces import is_standard, minimal_section_sq, odp_minimal_section_sq

F = Fraction


def diagram_orders(spec):
    """Oracle: the fiber gcds written in each conic-bundle diagram."""
    a1, a2 = spec.alpha
    f = spec.family
    if f == "A":
        k, p2, p3, d1 = spec.params
        return [gcd(p2 * d1, a1 * p3 * d1 + a2), gcd(p3 * d1, a1 * p2 * d1 + a2)]
    if f == "D_even":
        n = 2 * spec.params[0] + 2
        return [gcd(n - 2, 2 * a1 + a2), gcd(2, a2), gcd(2, a2)]
    if f == "D_odd":
        n = 2 * spec.params[0] + 1
        return [gcd(n - 2, 2 * a1 + a2), gcd(2, a2), gcd(2, a2)]
    if f == "E6":
        return [gcd(2, a2), gcd(3, a2), gcd(3, a2)]
    if f == "E7":
        return [gcd(4, 2 * a1 + a2), gcd(2, a2), gcd(3, a2)]
    if f == "E8":
        return [gcd(5, a2), gcd(2, a2), gcd(3, a2)]
    a1_, k, d13, d14, a3, a4 = spec.params
    b2, b3, b4 = a1_ * k * d13 * d14, a3 * d14, a4 * d13
    return [gcd(b3, a1 * b2 + a2), gcd(b4, a1 * b2 + a2)]


def paired(a: CyclicQuotientType, b: CyclicQuotientType) -> bool:
    m = a.order
    return m == b.order and (m == 1 or (a.weights[0] == b.weights[0] and (a.weights[1] + b.weights[1]) % m == 0))


def test_a_example():
    d = build_family(FamilySpec("A", (1, 1, 2, 1)))
    assert [(f.fiber_id, f.k) for f in d.fibers] == [("f1", 1), ("f2", 2)]
    assert d.fibers[1].b == 1
    assert all(f.at_section.order == 1 and f.other.order == 1 for f in d.fibers)
    assert dict(d.boundary.terms) == {"f1": 0, "f2": F(1, 2), "E0": 0}
    assert d.section_square == -2 and d.toric


def test_e8_example():
    d = build_family(FamilySpec("E8", ()))
    pairs = [(f.at_section, f.other) for f in d.fibers]
    for (a, b), m in zip(pairs, (5, 2, 3)):
        assert a.equivalent(CyclicQuotientType(m, (1, -1))) and b.equivalent(CyclicQuotientType(m, (1, 1)))
    assert diff_E(FamilySpec("E8", ())).is_zero
    assert d.section_square == F(-31, 30)
    assert verify_fiber_charts(FamilySpec("E8", ()))


def test_odp_smallest_example():
    spec = FamilySpec("ODP", (1, 2, 1, 1, 1, 2))
    assert spec.weights == (1, 2, 1, 2)
    d = build_family(spec)
    assert [f.k for f in d.fibers] == [1, 1]
    assert d.boundary.is_zero and d.toric
    assert d.section_square == odp_minimal_section_sq(spec.weights, 1, 1) == F(-9, 2)


def test_odp_node_weights_rejected():
    with pytest.raises(FamilyError):
        FamilySpec("ODP", (1, 1, 1, 1, 1, 1))


def test_e6_diff():
    b = diff_E(FamilySpec("E6", (), (1, 2)))
    assert b.as_dict() == {"f1": F(1, 2), "f2": 0, "f3": 0, "E0": 0}


def test_d4_diff():
    assert diff_E(FamilySpec("D_even", (1,))).is_zero


def test_e0_coefficient():
    d = build_family(FamilySpec("D_even", (1,), (2, 1)))
    assert d.e0_coefficient == F(1, 2)
    assert d.transversal.equivalent(CyclicQuotientType(2, (-1, 1)))


def test_alpha_one_gives_smooth_transversal():
    for spec in islice(iter_family_specs(4, 5), 300):
        if spec.alpha[0] == 1:
            assert build_family(spec).transversal.order == 1


@pytest.mark.parametrize("family, params, alpha", [
    ("A", (2, 1, 2, 1), (1, 1)),
    ("A", (1, 2, 4, 1), (1, 1)),
    ("D_odd", (1,), (1, 1)),
    ("D_even", (0,), (1, 1)),
    ("E8", (), (2, 4)),
    ("E8", (), (0, 1)),
])
def test_invalid_specs(family, params, alpha):
    with pytest.raises(FamilyError):
        FamilySpec(family, params, alpha)


def test_quotient_ambient_rejects_non_descending_weights():
    with pytest.raises(FamilyError):
        FamilySpec("A", (1, 1, 2, 1), (1, 1), cyclic_ambient(3, 1))


def test_tampered_description_reports_diff():
    spec = FamilySpec("E8", ())
    d = build_family(spec)
    bad = dataclasses.replace(d.fibers[0], at_section=CyclicQuotientType(5, (1, 2)))
    tampered = dataclasses.replace(d, fibers=(bad,) + d.fibers[1:])
    with pytest.raises(ChartMismatch) as info:
        verify_fiber_charts(spec, tampered)
    entry = info.value.diff[0]
    assert entry["fiber"] == "f1" and "claimed" in entry and "computed" in entry


def _with_fibers(d, fibers):
    obj = object.__new__(type(d))
    for f in dataclasses.fields(d):
        object.__setattr__(obj, f.name, getattr(d, f.name))
    object.__setattr__(obj, "fibers", fibers)
    return obj


def test_klt_synthetic_coefficient_one():
    d = build_family(FamilySpec("E8", ()))
    boundary = object.__new__(type(d.boundary))
    for f in dataclasses.fields(d.boundary):
        object.__setattr__(boundary, f.name, getattr(d.boundary, f.name))
    object.__setattr__(boundary, "terms", (("f1", F(1)),))
    assert klt_check(d)
    assert not klt_check(dataclasses.replace(d, boundary=boundary))


def test_klt_synthetic_order_zero():
    d = build_family(FamilySpec("E8", ()))
    broken = object.__new__(CyclicQuotientType)
    object.__setattr__(broken, "order", 0)
    object.__setattr__(broken, "weights", (1, 1))
    fibers = (_replace_fiber(d.fibers[0], other=broken),) + d.fibers[1:]
    with pytest.raises(LatticeError):
        klt_check(_with_fibers(d, fibers))


def _replace_fiber(fd, **changes):
    obj = object.__new__(type(fd))
    for f in dataclasses.fields(fd):
        object.__setattr__(obj, f.name, changes.get(f.name, getattr(fd, f.name)))
    return obj


SWEEP = list(iter_family_specs(5, 4))


def test_sweep_covers_every_family():
    assert {s.family for s in SWEEP} == set(FAMILIES)


@pytest.mark.parametrize("spec", SWEEP[::7], ids=lambda s: f"{s.family}{s.params}{s.alpha}")
def test_sweep_structure(spec):
    d = build_family(spec)
    assert verify_fiber_charts(spec, d)
    assert len(d.fibers) == (2 if spec.family in ("A", "ODP") else 3)
    assert [f.k for f in d.fibers] == diagram_orders(spec)
    for f in d.fibers:
        assert paired(f.at_section, f.other)
        assert f.coefficient == F(f.k - 1, f.k)
    assert all(is_standard(c) for _, c in d.boundary.terms)
    assert d.e0_coefficient == F(spec.alpha[0] - 1, spec.alpha[0])
    assert klt_check(d)
    assert d.toric == (spec.family in ("A", "ODP"))
    if spec.family == "ODP":
        assert d.section_square == odp_minimal_section_sq(spec.weights, *spec.alpha)
    else:
        assert d.section_square == section_square_closed_form(spec)
        assert d.section_square == minimal_section_sq(spec.weights, spec.gamma_degree, *spec.alpha)
        assert family_log_degree(spec) < 0
    assert d.section_square < 0


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SWEEP))
def test_diff_coefficients_monotone_in_k(spec):
    terms = build_family(spec).fibers
    for a in terms:
        for b in terms:
            if a.k <= b.k:
                assert a.coefficient <= b.coefficient
        assert (a.coefficient == 0) == (a.k == 1)


QUOTIENT = list(islice(iter_quotient_specs(5, 3, 20), 400))[::5]


@pytest.mark.parametrize("spec", QUOTIENT, ids=lambda s: f"A{s.params}{s.alpha}r{s.ambient.r}q{s.ambient.q}")
def test_quotient_ambient_charts(spec):
    assert change_of_basis_ex2(spec.ambient.q, spec.ambient.r).determinant == -1
    d = build_family(spec)
    assert verify_fiber_charts(spec, d)
    assert d.section_square is None
    assert klt_check(d)
    for f in d.fibers:
        assert paired(f.at_section, f.other)


def test_section_square_cross_module():
    spec = FamilySpec("A", (3, 1, 2, 1), (2, 3))
    assert section_square(spec) == minimal_section_sq(spec.weights, 3, 2, 3)
