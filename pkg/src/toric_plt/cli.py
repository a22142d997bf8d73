"""``toric-plt`` command line: classify germs, build families, run verification suites.

Exit codes: 0 success, 2 parse error, 3 domain or verification failure.
"""
from __future__ import annotations

import argparse
import re
import sys
from typing import Optional, Sequence

from .classify import NotTerminal, Variant, classify_germ, reference_cone
from .families import PARAMETERS, ChartMismatch, FamilyError, FamilySpec, build_family, cyclic_ambient, verify_fiber_charts
from .fans import ConeGerm
from .lattice import LatticeError
from .report import ReportDocument, classification_data, description_data
from .verify import SCOPES, Bounds, run_scope, seed_from_env

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN = 0, 2, 3


class InputParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DomainFailure(Exception):
    """A well-formed input that fails a mathematical constraint; carries a report."""

    def __init__(self, message: str, report: Optional[ReportDocument] = None):
        super().__init__(message)
        self.report = report


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if body.strip():
            yield lineno, body


# --- germs ----------------------------------------------------------------

_VECTOR = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\)")
_KEY_VALUE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)=(\S+)")


def parse_germ(text: str) -> ConeGerm:
    """``smooth``, ``odp``, ``cyclic r=R q=Q`` or ``cone (a,b,c) (d,e,f) ...``."""
    lines = list(_content_lines(text))
    if not lines:
        raise InputParseError("empty germ description", 1, 1)
    if len(lines) > 1:
        lineno, body = lines[1]
        raise InputParseError("one germ per file", lineno, len(body) - len(body.lstrip()) + 1)
    lineno, body = lines[0]
    stripped = body.strip()
    start = body.index(stripped) + 1
    word, _, rest = stripped.partition(" ")
    word = word.lower()
    if word == "smooth" and not rest.strip():
        return reference_cone(Variant.SMOOTH)
    if word == "odp" and not rest.strip():
        return ConeGerm.odp()
    if word == "cyclic":
        values = _key_values(rest, lineno, start + len(word) + 1, {"r", "q"})
        if set(values) != {"r", "q"}:
            raise InputParseError("cyclic needs r= and q=", lineno, start)
        r, q = values["r"], values["q"]
        if r < 1:
            raise InputParseError("r must be positive", lineno, start)
        try:
            return ConeGerm.simplicial((1, 0, 0), (0, 1, 0), (1, q % r if r > 1 else 0, r))
        except LatticeError as exc:
            raise DomainFailure(str(exc)) from None
    if word == "cone":
        offset = start + len(word)
        vectors, pos = [], 0
        while pos < len(rest):
            if rest[pos].isspace():
                pos += 1
                continue
            m = _VECTOR.match(rest, pos)
            if m is None:
                raise InputParseError(f"expected a vector like (1,0,0), got {rest[pos:pos + 8]!r}", lineno, offset + pos + 1)
            vectors.append(tuple(int(x) for x in m.groups()))
            pos = m.end()
        if len(vectors) not in (3, 4):
            raise InputParseError(f"a cone needs 3 or 4 generators, got {len(vectors)}", lineno, start)
        try:
            return ConeGerm.simplicial(*vectors) if len(vectors) == 3 else ConeGerm.odp(tuple(vectors))
        except LatticeError as exc:
            raise DomainFailure(str(exc)) from None
    raise InputParseError(f"unknown germ kind {word!r}", lineno, start)


def _key_values(text: str, lineno: int, offset: int, allowed: set[str]) -> dict:
    out, pos = {}, 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _KEY_VALUE.match(text, pos)
        if m is None or m.group(1) not in allowed:
            raise InputParseError(f"unexpected {text[pos:].split()[0]!r}", lineno, offset + pos)
        try:
            out[m.group(1)] = int(m.group(2))
        except ValueError:
            raise InputParseError(f"{m.group(1)} needs an integer", lineno, offset + m.start(2)) from None
        pos = m.end()
    return out


# --- families -------------------------------------------------------------

_FAMILY_NAMES = {
    "a": "A", "d": "D", "d_even": "D_even", "d_odd": "D_odd",
    "e6": "E6", "e7": "E7", "e8": "E8", "odp": "ODP",
}


def parse_family(text: str) -> FamilySpec:
    """``NAME key=value ... alpha=a1,a2 [r=R q=Q]`` spread over any number of lines."""
    tokens = []
    for lineno, body in _content_lines(text):
        for m in re.finditer(r"\S+", body):
            tokens.append((m.group(), lineno, m.start() + 1))
    if not tokens:
        raise InputParseError("empty family description", 1, 1)
    name, lineno, col = tokens[0]
    family = _FAMILY_NAMES.get(name.lower())
    if family is None:
        raise InputParseError(f"unknown family {name!r}", lineno, col)
    values: dict[str, object] = {}
    for tok, lineno, col in tokens[1:]:
        key, eq, raw = tok.partition("=")
        if not eq or not raw:
            raise InputParseError(f"expected key=value, got {tok!r}", lineno, col)
        try:
            if key == "alpha":
                parts = raw.split(",")
                if len(parts) != 2:
                    raise ValueError
                values[key] = (int(parts[0]), int(parts[1]))
            else:
                values[key] = int(raw)
        except ValueError:
            raise InputParseError(f"bad value for {key}: {raw!r}", lineno, col + len(key) + 1) from None
        values.setdefault("_pos_" + key, (lineno, col))
    alpha = values.pop("alpha", (1, 1))
    r, q = values.pop("r", None), values.pop("q", None)
    positions = {k[5:]: values.pop(k) for k in list(values) if k.startswith("_pos_")}
    if family == "D":
        if "n" in values:
            n = values.pop("n")
            family, values["k"] = ("D_even", (n - 2) // 2) if n % 2 == 0 else ("D_odd", (n - 1) // 2)
        else:
            family = "D_even"
    names = PARAMETERS[family]
    unknown = [k for k in values if k not in names]
    if unknown:
        ln, cl = positions[unknown[0]]
        raise InputParseError(f"{family} has no parameter {unknown[0]!r}", ln, cl)
    missing = [k for k in names if k not in values]
    if missing:
        raise InputParseError(f"{family} needs {', '.join(missing)}", tokens[0][1], tokens[0][2])
    try:
        if (r is None) != (q is None):
            raise FamilyError("a quotient ambient needs both r= and q=")
        if r is not None:
            return FamilySpec(family, tuple(values[k] for k in names), alpha, cyclic_ambient(r, q))
        return FamilySpec(family, tuple(values[k] for k in names), alpha)
    except LatticeError as exc:
        raise DomainFailure(str(exc)) from None


# --- commands -------------------------------------------------------------

def cmd_classify(text: str) -> ReportDocument:
    germ = parse_germ(text)
    report = ReportDocument(input={"germ": text.strip(), "generators": [list(g) for g in germ.generators]})
    try:
        t = classify_germ(germ)
    except NotTerminal as exc:
        report.result = {"terminal": False, "reid_tai_witness": exc.witness, "reason": str(exc)}
        raise DomainFailure(str(exc), report) from None
    report.result = {"terminal": True, **classification_data(t)}
    return report


def cmd_family(text: str) -> ReportDocument:
    spec = parse_family(text)
    desc = build_family(spec)
    check = {"name": "fiber charts", "passed": True, "instances": len(desc.fibers), "counterexample": None}
    try:
        verify_fiber_charts(spec, desc)
    except ChartMismatch as exc:
        check.update(passed=False, counterexample=exc.diff)
    report = ReportDocument(input={"family": text.strip()}, result=description_data(desc, check["passed"]), checks=[check])
    if not check["passed"]:
        raise DomainFailure("fiber charts disagree with the claimed structure", report)
    return report


def cmd_verify(scope: str, bounds: Bounds) -> ReportDocument:
    checks = run_scope(scope, bounds)
    return ReportDocument(
        input={
            "scope": scope,
            "param_max": bounds.param_max,
            "alpha_max": bounds.alpha_max,
            "r_max": bounds.r_max,
            "seed": bounds.seed,
        },
        result={"passed": all(c["passed"] for c in checks)},
        checks=checks,
    )


# --- entry point ----------------------------------------------------------

def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(report: ReportDocument, json_path: Optional[str]) -> None:
    if json_path == "-":
        sys.stdout.write(report.to_json())
        return
    sys.stdout.write(report.to_text())
    if json_path:
        with open(json_path, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toric-plt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (("classify", "classify a terminal toric germ"), ("family", "build a plt blow-up family")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("file", help="input file, or - for stdin")
        p.add_argument("--json", metavar="OUT", help="also write the JSON report (- for stdout only)")
    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--scope", choices=SCOPES + ("all",), default="all")
    v.add_argument("--r-max", type=_positive, default=20)
    v.add_argument("--param-max", type=_positive, default=None)
    v.add_argument("--alpha-max", type=_positive, default=None)
    v.add_argument("--json", metavar="OUT")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        if args.command == "verify":
            bounds = Bounds(args.param_max, args.alpha_max, args.r_max, seed=seed_from_env())
            report = cmd_verify(args.scope, bounds)
            _emit(report, args.json)
            return EXIT_OK if report.passed else EXIT_DOMAIN
        text = _read(args.file)
        report = (cmd_classify if args.command == "classify" else cmd_family)(text)
        _emit(report, args.json)
        return EXIT_OK
    except (InputParseError, OSError) as exc:
        print(f"toric-plt: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainFailure as exc:
        if exc.report is not None:
            _emit(exc.report, getattr(args, "json", None))
        print(f"toric-plt: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except LatticeError as exc:
        print(f"toric-plt: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
