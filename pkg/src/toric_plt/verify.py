"""Verification suites behind ``toric-plt verify``.

Each check returns a plain dict ``{name, passed, instances, counterexample}``.
Sweeps that would be too large are sampled with a seeded generator so that
runs are reproducible.
"""
from __future__ import annotations

import os
import random
from dataclasses import dataclass
from math import gcd
from typing import Callable, Iterable, Optional

from .classify import classify_germ, enumerate_terminal_orders, is_terminal_normal_form, reference_cone, Variant
from .duval import (
    canonical_gamma,
    expected_duval,
    is_duval,
    lift_curve,
    recognize_weight_family,
    weight_family_matches,
)
from .families import (
    FAMILIES,
    ChartMismatch,
    FamilySpec,
    build_family,
    diff_E,
    family_log_degree,
    iter_family_params,
    iter_quotient_specs,
    klt_check,
    section_square,
    section_square_closed_form,
    verify_fiber_charts,
)
from .fans import CyclicQuotientType, reid_tai_is_terminal
from .lattice import LatticeError
from .surfaces import is_standard, odp_minimal_section_sq, odp_section_square_general, standard_coefficient

SCOPES = ("formulas", "charts", "duval", "terminality")
SMOOTH_FAMILIES = ("A", "D_even", "D_odd", "E6", "E7", "E8")


@dataclass(frozen=True)
class Bounds:
    param_max: Optional[int] = None
    alpha_max: Optional[int] = None
    r_max: int = 20
    per_family: int = 120
    quotient_samples: int = 150
    seed: int = 0

    def minimum(self, n: int) -> int:
        """Instance floors apply to the default sweep only; explicit bounds may be tiny."""
        return n if self.param_max is None else 1

    def params(self, default: int) -> int:
        return self.param_max if self.param_max is not None else default

    @property
    def alphas(self) -> int:
        if self.alpha_max is not None:
            return self.alpha_max
        return min(7, self.param_max) if self.param_max is not None else 7


def seed_from_env() -> int:
    return int(os.environ.get("TORIC_PLT_SEED", "0"))


def coprime_alphas(alpha_max: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(1, alpha_max + 1) for b in range(1, alpha_max + 1) if gcd(a, b) == 1]


def _run(name: str, items: Iterable, test: Callable[[object], Optional[str]], min_instances: int = 1) -> dict:
    """Apply ``test`` to every item; it returns ``None`` on success or a failure note."""
    count = 0
    first = None
    for item in items:
        count += 1
        try:
            note = test(item)
        except LatticeError as exc:
            note = f"error: {exc}"
        if note is not None and first is None:
            first = f"{_describe(item)}: {note}"
    passed = first is None and count >= min_instances
    if first is None and count < min_instances:
        first = f"only {count} instances, {min_instances} required"
    return {"name": name, "passed": passed, "instances": count, "counterexample": first}


def _describe(item) -> str:
    if isinstance(item, FamilySpec):
        amb = "" if not item.quotient_ambient else f" over {item.ambient}"
        return f"{item.family}{item.params} alpha={item.alpha}{amb}"
    return repr(item)


def _sample(pool: list, size: int, rng: random.Random) -> list:
    if len(pool) <= size:
        return pool
    return [pool[i] for i in sorted(rng.sample(range(len(pool)), size))]


# --- formulas -------------------------------------------------------------

def smooth_specs(param_max: int, alpha_max: int) -> list[FamilySpec]:
    alphas = coprime_alphas(alpha_max)
    return [
        FamilySpec(f, p, a)
        for f in SMOOTH_FAMILIES
        for p in iter_family_params(f, param_max)
        for a in alphas
    ]


def odp_specs(param_max: int, alpha_max: int) -> list[FamilySpec]:
    alphas = coprime_alphas(alpha_max)
    return [FamilySpec("ODP", p, a) for p in iter_family_params("ODP", param_max) for a in alphas]


def diagram_diff_orders(spec: FamilySpec) -> list[int]:
    """The ``k_i`` of each fiber as written in the per-type diagrams."""
    a1, a2 = spec.alpha
    f = spec.family
    if f == "A":
        k, p2, p3, d1 = spec.params
        return [gcd(p2 * d1, a1 * p3 * d1 + a2), gcd(p3 * d1, a1 * p2 * d1 + a2)]
    if f in ("D_even", "D_odd"):
        k2 = gcd(2, a2)
        return [gcd(spec.n - 2, 2 * a1 + a2), k2, k2]
    if f == "E6":
        return [gcd(2, a2), gcd(3, a2), gcd(3, a2)]
    if f == "E7":
        return [gcd(4, 2 * a1 + a2), gcd(2, a2), gcd(3, a2)]
    if f == "E8":
        return [gcd(5, a2), gcd(2, a2), gcd(3, a2)]
    b1, b2, b3, b4 = spec.weights
    return [gcd(b3, a1 * b2 + a2), gcd(b4, a1 * b2 + a2)]


def check_formulas(bounds: Bounds) -> list[dict]:
    specs = smooth_specs(bounds.params(12), bounds.alphas)

    def general_vs_closed(s: FamilySpec):
        got, want = section_square(s), section_square_closed_form(s)
        return None if got == want else f"general {got} != closed form {want}"

    def negative(s: FamilySpec):
        v = section_square(s)
        return None if v < 0 else f"section square {v} >= 0"

    def anti_ample(s: FamilySpec):
        v = family_log_degree(s)
        return None if v < 0 else f"log degree {v} >= 0"

    nodes = odp_specs(bounds.params(8), bounds.alphas)

    def node_formula(s: FamilySpec):
        a1, a2 = s.alpha
        b1, b2, b3, b4 = s.weights
        closed = odp_minimal_section_sq(s.weights, a1, a2)
        general = odp_section_square_general(s.weights, a1, a2)
        swapped = odp_minimal_section_sq((b1, b2, b4, b3), a1, a2)
        if not closed == general == swapped:
            return f"closed {closed}, general {general}, swapped {swapped}"
        return None if closed < 0 else f"section square {closed} >= 0"

    def diff_matches(s: FamilySpec):
        want = [standard_coefficient(k) for k in diagram_diff_orders(s)] + [standard_coefficient(s.alpha[0])]
        got = [c for _, c in diff_E(s).terms]
        return None if got == want else f"Diff_E {got} != diagram {want}"

    diff_specs = specs + nodes
    return [
        _run("section square: general formula equals closed forms (A, D, E)", specs, general_vs_closed, bounds.minimum(500)),
        _run("section square is negative (A, D, E)", specs, negative),
        _run("K_S + Diff_S(0) + Gamma has negative degree", specs, anti_ample),
        _run("node section square: closed form, general formula, symmetry", nodes, node_formula, bounds.minimum(200)),
        _run("Diff_E(0) coefficients match the displayed gcds", diff_specs, diff_matches),
        _run("Diff_E(0): 20 instances per diagram formula",
             [f for f in ("A", "D", "E6", "E7", "E8", "ODP")], lambda f: _per_family_count(diff_specs, f, bounds.minimum(20))),
    ]


def _per_family_count(specs: list[FamilySpec], family: str, floor: int) -> Optional[str]:
    n = sum(1 for s in specs if s.family == family or (family == "D" and s.family.startswith("D")))
    return None if n >= floor else f"{n} instances"


# --- charts and structure ---------------------------------------------------

def chart_specs(bounds: Bounds) -> tuple[list[FamilySpec], list[FamilySpec]]:
    rng = random.Random(bounds.seed)
    pm, am = bounds.params(10), bounds.alphas
    smooth = []
    for f in FAMILIES:
        pool = [FamilySpec(f, p, a) for p in iter_family_params(f, pm) for a in coprime_alphas(am)]
        smooth.extend(_sample(pool, bounds.per_family, rng))
    quotient = _sample(list(iter_quotient_specs(pm, am, bounds.r_max)), bounds.quotient_samples, rng)
    return smooth, quotient


def check_charts(bounds: Bounds) -> list[dict]:
    smooth, quotient = chart_specs(bounds)
    everything = smooth + quotient

    def charts(s: FamilySpec):
        try:
            verify_fiber_charts(s)
        except ChartMismatch as exc:
            return str(exc)
        return None

    def structure(s: FamilySpec):
        d = build_family(s)
        want = 2 if s.family in ("A", "ODP") else 3
        if len(d.fibers) != want:
            return f"{len(d.fibers)} fibers, expected {want}"
        for fd in d.fibers:
            a, b = fd.at_section, fd.other
            if a.order != b.order or a.weights[0] != b.weights[0] or (a.weights[1] + b.weights[1]) % a.order:
                return f"{fd.fiber_id}: {a} and {b} are not a sign pair"
        if not all(is_standard(c) for _, c in d.boundary.terms):
            return "non-standard boundary coefficient"
        if not klt_check(d):
            return "klt check fails"
        if not s.quotient_ambient and d.section_square != section_square(s):
            return "section square differs from the surface computation"
        return None

    return [
        _run("fiber charts agree with the diagrams", everything, charts, bounds.minimum(500)),
        _run("fiber charts over cyclic quotient ambients (det M = -1)", quotient, charts, bounds.minimum(50)),
        _run("fiber counts, sign pairing, standard coefficients, klt", everything, structure),
    ]


# --- Du Val -----------------------------------------------------------------

def check_duval(bounds: Bounds) -> list[dict]:
    pm = bounds.params(10)
    cases = [(f, p) for f in SMOOTH_FAMILIES for p in iter_family_params(f, pm)]

    def round_trip(case):
        f, p = case
        s = FamilySpec(f, p)
        if not any(m.family == f and m.params == p for m in weight_family_matches(s.weights)):
            return f"weights {s.weights} not recognized as {f}{p}"
        support, d = canonical_gamma(f, p)
        lifted = lift_curve(support, d)
        got, want = is_duval(lifted, s.weights), expected_duval(f, p)
        return None if got == want else f"lift {lifted} gives {got}, expected {want}"

    fixed = [
        ((6, 10, 15), "E8"), ((4, 6, 9), "E7"), ((3, 4, 6), "E6"),
        *[((2, 2 * k, 2 * k + 1), f"D{2 * k + 2}") for k in range(1, min(pm, 10) + 1)],
        *[((2, 2 * k - 1, 2 * k), f"D{2 * k + 1}") for k in range(2, min(pm, 10) + 1)],
    ]

    def recognized(case):
        beta, name = case
        got = recognize_weight_family(beta)
        return None if got is not None and str(got[0]) == name else f"got {got}"

    def e8_lift(_):
        support, d = canonical_gamma("E8")
        got = lift_curve(support, d).as_set()
        want = {(5, 0, 0), (0, 3, 0), (0, 0, 2)}
        return None if got == want else f"{got}"

    return [
        _run("weight families recognized", fixed, recognized),
        _run("canonical curves lift to the matching Du Val type", cases, round_trip),
        _run("E8 curve lifts to x1^5 + x2^3 + x3^2", [None], e8_lift),
    ]


# --- terminality ----------------------------------------------------------

def check_terminality(bounds: Bounds) -> list[dict]:
    rmax = bounds.r_max

    def forward(r):
        for w1 in range(r):
            for w2 in range(w1, r):
                for w3 in range(w2, r):
                    qt = CyclicQuotientType(r, (w1, w2, w3))
                    if reid_tai_is_terminal(qt) != is_terminal_normal_form(qt):
                        return f"1/{r}({w1},{w2},{w3})"
        return None

    def converse(r):
        for q in range(1, r):
            if gcd(q, r) == 1:
                if not reid_tai_is_terminal(CyclicQuotientType(r, (1, -1, q))):
                    return f"1/{r}(1,-1,{q}) fails Reid-Tai"
                t = classify_germ(reference_cone(Variant.CYCLIC_QUOTIENT, r, q))
                if (t.r, t.q) != (r, q):
                    return f"reference cone classified as {t}"
        return None

    def e8_orders(_):
        got = [r for r, _ in enumerate_terminal_orders((6, 10, 15), rmax)]
        want = [r for r in range(1, rmax + 1) if reid_tai_is_terminal(CyclicQuotientType(r, (6, 10, 15)))]
        return None if got == want else f"{got} != {want}"

    return [
        _run(f"Reid-Tai terminal iff 1/r(1,-1,q) form, r <= {rmax}", range(1, rmax + 1), forward),
        _run(f"every 1/r(1,-1,q) is terminal and classified, r <= {rmax}", range(2, rmax + 1), converse),
        _run("terminal orders of (6,10,15) enumerate consistently", [None], e8_orders),
    ]


SUITES = {
    "formulas": check_formulas,
    "charts": check_charts,
    "duval": check_duval,
    "terminality": check_terminality,
}


def run_scope(scope: str, bounds: Bounds) -> list[dict]:
    if scope == "all":
        return [c for name in SCOPES for c in SUITES[name](bounds)]
    if scope not in SUITES:
        raise LatticeError(f"unknown scope {scope!r}")
    return SUITES[scope](bounds)
