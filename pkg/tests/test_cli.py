import json
import os
import subprocess
import sys
import time
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from toric_plt.cli import EXIT_DOMAIN, EXIT_OK, EXIT_PARSE, InputParseError, main, parse_family, parse_germ
from toric_plt.report import ReportDocument, parse_rational, render_rational


def run(tmp_path, capsys, command, text, *extra):
    path = tmp_path / "input.txt"
    path.write_text(text)
    code = main([command, str(path), *extra])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_cyclic(tmp_path, capsys):
    code, out, _ = run(tmp_path, capsys, "classify", "cyclic r=7 q=3\n", "--json", "-")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["result"]["type"] == "CyclicQuotient(7,3)"
    assert data["result"]["terminal"] is True


def test_classify_cone_matches_cyclic(tmp_path, capsys):
    code, out, _ = run(tmp_path, capsys, "classify", "# comment\ncone (1,0,0) (0,1,0) (1,3,7)\n", "--json", "-")
    assert code == EXIT_OK and json.loads(out)["result"]["q"] == 3


def test_classify_node_and_smooth(tmp_path, capsys):
    assert run(tmp_path, capsys, "classify", "odp\n")[0] == EXIT_OK
    assert run(tmp_path, capsys, "classify", "smooth\n")[0] == EXIT_OK


def test_classify_non_terminal(tmp_path, capsys):
    code, out, err = run(tmp_path, capsys, "classify", "cone (1,0,0) (0,1,0) (2,2,3)\n", "--json", "-")
    assert code == EXIT_DOMAIN
    assert json.loads(out)["result"]["reid_tai_witness"] == 1
    assert "Reid-Tai" in err


@pytest.mark.parametrize("text, line, column", [
    ("cone (1,0,0) (0,1) (0,0,1)\n", 1, 14),
    ("\n\nblob\n", 3, 1),
    ("cyclic r=7 q=x\n", 1, 14),
])
def test_parse_errors(tmp_path, capsys, text, line, column):
    code, _, err = run(tmp_path, capsys, "classify", text)
    assert code == EXIT_PARSE
    assert f"line {line}, column {column}" in err


def test_parse_error_positions_direct():
    with pytest.raises(InputParseError) as info:
        parse_germ("cone (1,0,0) (0,1) (0,0,1)")
    assert (info.value.line, info.value.column) == (1, 14)


def test_missing_file(capsys):
    assert main(["classify", "/nonexistent/file"]) == EXIT_PARSE


def test_family_d(tmp_path, capsys):
    code, out, _ = run(tmp_path, capsys, "family", "D k=1\nalpha=2,1\n", "--json", "-")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["result"]["e0_coefficient"] == "1/2"
    assert data["result"]["diff_E"]["E0"] == "1/2"
    assert data["checks"][0]["passed"]


def test_family_d_by_n():
    assert parse_family("D n=5").family == "D_odd"
    assert parse_family("D n=6").params == (2,)


def test_family_e8_text(tmp_path, capsys):
    code, out, _ = run(tmp_path, capsys, "family", "E8\n")
    assert code == EXIT_OK
    assert "[PASS] fiber charts" in out
    assert '"section_square": "-31/30"' in out


def test_family_domain_error(tmp_path, capsys):
    code, _, err = run(tmp_path, capsys, "family", "A k=2 a2=1 a3=2 d1=1\n")
    assert code == EXIT_DOMAIN and "k" in err


@pytest.mark.parametrize("text", ["A k=1 a2=1 a3=2\n", "E8 foo=1\n", "Q8\n", "E8 alpha=1\n"])
def test_family_parse_errors(tmp_path, capsys, text):
    assert run(tmp_path, capsys, "family", text)[0] == EXIT_PARSE


def test_family_quotient_ambient(tmp_path, capsys):
    code, out, _ = run(tmp_path, capsys, "family", "A k=1 a2=1 a3=1 d1=1 r=3 q=2\n", "--json", "-")
    assert code == EXIT_OK
    assert json.loads(out)["result"]["section_square"] is None


def test_json_file_and_determinism(tmp_path, capsys):
    path = tmp_path / "in.txt"
    path.write_text("ODP a1=1 k=2 d13=1 d14=1 a3=1 a4=2\nalpha=1,2\n")
    outs = []
    for name in ("a.json", "b.json"):
        assert main(["family", str(path), "--json", str(tmp_path / name)]) == EXIT_OK
        outs.append((tmp_path / name).read_bytes())
    capsys.readouterr()
    assert outs[0] == outs[1]
    doc = ReportDocument.from_json(outs[0].decode())
    assert doc.to_json().encode() == outs[0]


@given(st.fractions())
def test_rational_rendering_round_trip(x):
    text = render_rational(x)
    p, q = text.split("/")
    assert int(q) > 0 and Fraction(int(p), int(q)) == x
    assert parse_rational(text) == x


def test_integer_rendering():
    assert render_rational(Fraction(-2)) == "-2/1"
    assert render_rational(0) == "0/1"


def test_verify_small_bounds(capsys):
    start = time.perf_counter()
    code = main(["verify", "--scope", "all", "--param-max", "3", "--alpha-max", "2", "--r-max", "5", "--json", "-"])
    elapsed = time.perf_counter() - start
    data = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK and data["result"]["passed"]
    assert elapsed < 5
    assert all(c["passed"] for c in data["checks"])


def test_verify_seed_from_environment(tmp_path):
    env = dict(os.environ, TORIC_PLT_SEED="17")
    cmd = [sys.executable, "-m", "toric_plt.cli", "verify", "--scope", "charts", "--param-max", "3",
           "--alpha-max", "2", "--r-max", "5", "--json", "-"]
    first = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True).stdout
    second = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True).stdout
    assert first == second
    assert json.loads(first)["input"]["seed"] == 17


def test_bad_arguments():
    assert main(["verify", "--scope", "nope"]) == EXIT_PARSE
    assert main(["verify", "--r-max", "0"]) == EXIT_PARSE
