"""Deterministic report documents and their JSON form."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from . import __version__
from .classify import TerminalToricType
from .families import ConicBundleDescription
from .fans import CyclicQuotientType


def render_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    p, q = text.split("/")
    return Fraction(int(p), int(q))


def to_plain(value: Any) -> Any:
    """Convert domain values to JSON-ready data; rationals become ``"p/q"`` strings."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return render_rational(value)
    if isinstance(value, CyclicQuotientType):
        return str(value)
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def classification_data(t: TerminalToricType) -> dict:
    return {
        "type": str(t),
        "variant": t.variant.value,
        "r": t.r,
        "q": t.q,
        "witness": t.witness.tolist(),
    }


def description_data(desc: ConicBundleDescription, charts_verified: bool) -> dict:
    from .families import PARAMETERS

    spec = desc.spec
    return to_plain({
        "family": spec.family,
        "params": dict(zip(PARAMETERS[spec.family], spec.params)),
        "alpha": list(spec.alpha),
        "ambient": str(spec.ambient),
        "weights": list(spec.weights),
        "fibers": [
            {
                "id": fd.fiber_id,
                "k": fd.k,
                "b": fd.b,
                "coefficient": fd.coefficient,
                "at_section": fd.at_section,
                "other": fd.other,
            }
            for fd in desc.fibers
        ],
        "section_square": desc.section_square,
        "transversal": desc.transversal,
        "e0_coefficient": desc.e0_coefficient,
        "diff_E": dict(desc.boundary.terms),
        "toric": desc.toric,
        "charts_verified": charts_verified,
    })


@dataclass
class ReportDocument:
    input: Any
    result: Any = None
    checks: list = field(default_factory=list)
    version: str = __version__

    def as_dict(self) -> dict:
        return {
            "input": to_plain(self.input),
            "result": to_plain(self.result),
            "checks": to_plain(self.checks),
            "version": self.version,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        data = json.loads(text)
        return cls(data["input"], data["result"], data["checks"], data["version"])

    @property
    def passed(self) -> bool:
        return all(c.get("passed", True) for c in to_plain(self.checks))

    def to_text(self) -> str:
        lines = [f"toric-plt {self.version}", f"input: {json.dumps(to_plain(self.input), sort_keys=True)}"]
        if self.result is not None:
            lines.append("result: " + json.dumps(to_plain(self.result), sort_keys=True, indent=2))
        for c in to_plain(self.checks):
            status = "PASS" if c.get("passed") else "FAIL"
            line = f"[{status}] {c['name']}: {c.get('instances', 0)} instances"
            if c.get("counterexample"):
                line += f"; first counterexample: {c['counterexample']}"
            lines.append(line)
        return "\n".join(lines) + "\n"
