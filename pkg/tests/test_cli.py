import json
import os
import re
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from nablaops import multicats as mc
from nablaops.cli import (
    DefinitionError,
    data_file,
    dump_multicat,
    main,
    morphism_from_json,
    morphism_to_json,
    parse_definitions,
    render_dot,
)
from nablaops.finite_cats import FinCategory
from nablaops.interval_cat import enumerate_morphisms
from nablaops.segal_demo import FinMonoid

LINE = re.compile(r"CHECK\s+\S+\s+(PASS|FAIL)(\s+.*)?")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def check_lines(out):
    lines = out.splitlines()
    assert lines and all(LINE.fullmatch(l) for l in lines), out
    return lines


class TestDefinitions:
    def test_sample(self, S):
        A = parse_definitions(data_file("sample.json"), S)
        M = A.multicat
        assert M.name == "sample"
        assert M.hom(("a", "b"), "a") == ["f"]
        assert A("f", (2, 1)) == "g"
        assert mc.validate_multicat(M).passed and mc.validate_gsym(M, A).passed

    @pytest.mark.parametrize("name", ["terminal.json", "parity.json"])
    def test_one_object(self, S, name):
        A = parse_definitions(data_file(name), S)
        assert len(A.multicat.objects) == 1 and mc.validate_gsym(A.multicat, A).passed

    def test_monoids(self):
        z2, lz = parse_definitions(data_file("z2.json")), parse_definitions(data_file("left_zero.json"))
        assert isinstance(z2, FinMonoid) and z2.is_commutative() is None
        assert lz.is_commutative() is not None

    def test_bad_reference(self, S):
        with pytest.raises(DefinitionError) as exc:
            parse_definitions(data_file("bad_reference.json"), S)
        assert exc.value.field == "morphisms[3].inputs[1]"
        assert "unknown object 'c'" in str(exc.value)

    def test_syntax_error_has_line(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text('{\n "objects": ["a"],\n "morphisms": [\n}\n')
        with pytest.raises(DefinitionError) as exc:
            parse_definitions(p)
        assert exc.value.line == 4

    def test_unit_violation_rejected(self, tmp_path, S):
        data = json.loads(data_file("sample.json").read_text())
        data["compositions"].append({"outer": "h", "inners": ["id_a"], "result": "h"})
        data["compositions"].append({"outer": "id_a", "inners": ["h"], "result": "id_a"})
        p = tmp_path / "unit.json"
        p.write_text(json.dumps(data))
        with pytest.raises(DefinitionError):
            parse_definitions(p, S)

    def test_dump_round_trip(self, tmp_path, S):
        A = parse_definitions(data_file("sample.json"), S)
        p = tmp_path / "again.json"
        p.write_text(json.dumps(dump_multicat(A)))
        B = parse_definitions(p, S)
        M, N = A.multicat, B.multicat
        assert M.morphisms == N.morphisms
        for f in M.morphisms:
            for gs in mc._typed_inputs(M, f, M.arity_bound):
                assert M.gamma(f, gs) == N.gamma(f, gs)
            for x in S.elements(M.arity(f)):
                assert A(f, x) == B(f, x)


@given(st.integers(0, 4), st.integers(0, 4), st.data())
def test_morphism_json_round_trip(m, n, data):
    f = data.draw(st.sampled_from(enumerate_morphisms(m, n)))
    vals = morphism_to_json(f)
    assert json.loads(json.dumps(vals)) == vals
    assert morphism_from_json(vals, n) == f


def test_morphism_json_rejects():
    with pytest.raises(ValueError):
        morphism_from_json([2, 1], 2)
    with pytest.raises(ValueError):
        morphism_from_json([3], 2)
    assert morphism_to_json(morphism_from_json(["-inf", 1, "+inf"], 1)) == ["-inf", 1, "+inf"]


class TestVerify:
    def test_segal_left_zero(self, capsys):
        code, out, _ = run(capsys, "verify", "segal", "--monoid", str(data_file("left_zero.json")))
        assert code == 1
        assert "CHECK commutativity FAIL NOT COMMUTATIVE n=2 sigma=(2,1) witness=(a,b)" in check_lines(out)

    def test_segal_z2(self, capsys):
        code, out, _ = run(capsys, "verify", "segal", "--monoid", str(data_file("z2.json")))
        assert code == 0
        assert "CHECK commutativity PASS COMMUTATIVE" in check_lines(out)

    @pytest.mark.parametrize("suite, n", [("rst", 2), ("counts", 2), ("closure", 2), ("quotal", 2)])
    def test_small_suites(self, capsys, suite, n):
        code, out, _ = run(capsys, "verify", suite, "--n-max", str(n))
        assert code == 0
        assert all(l.split()[2] == "PASS" for l in check_lines(out))

    def test_counts_values(self, capsys):
        _, out, _ = run(capsys, "verify", "counts")
        lines = check_lines(out)
        assert "CHECK count:E(2,1) PASS 10" in lines
        assert "CHECK count:Et(2,1) PASS 5" in lines
        assert "CHECK count:Et(1,1) PASS 2" in lines

    def test_trivial_operad(self, capsys):
        code, out, _ = run(capsys, "verify", "crossed", "--operad", "trivial", "--n-max", "3")
        assert code == 0 and check_lines(out)

    def test_roundtrip_with_file(self, capsys):
        code, out, _ = run(capsys, "verify", "roundtrip", "--n-max", "2", "--multicat", str(data_file("sample.json")))
        assert code == 0 and check_lines(out)

    @pytest.mark.parametrize("argv", [
        ["verify", "nonsense"],
        ["verify", "rst", "--n-max", "-1"],
        ["verify", "rst", "--operad", "cyclic"],
        ["verify", "roundtrip", "--multicat", "/nonexistent.json"],
        ["verify", "roundtrip", "--multicat", "BAD"],
        ["verify", "segal", "--monoid", "SAMPLE"],
        ["build", "wreath", "--multicat", "SAMPLE", "--n-max", "2"],
    ])
    def test_usage_errors(self, capsys, argv):
        argv = [str(data_file("bad_reference.json")) if a == "BAD" else
                str(data_file("sample.json")) if a == "SAMPLE" else a for a in argv]
        code, _, err = run(capsys, *argv)
        assert code == 2 and err

    def test_bad_reference_message(self, capsys):
        code, _, err = run(capsys, "verify", "roundtrip", "--multicat", str(data_file("bad_reference.json")))
        assert code == 2 and "morphisms[3].inputs[1]: unknown object 'c'" in err

    def test_jobs_validated(self, capsys, monkeypatch):
        monkeypatch.setenv("NABLA_OPS_JOBS", "zero")
        code, _, err = run(capsys, "verify", "rst", "--n-max", "1")
        assert code == 2 and "NABLA_OPS_JOBS" in err


class TestBuild:
    def test_terminal_tilde_e(self, capsys, tmp_path):
        out = tmp_path / "t.dot"
        code, stdout, _ = run(capsys, "build", "wreath", "--multicat", str(data_file("terminal.json")),
                              "--variant", "tildeE", "--n-max", "1", "--dot", str(out))
        assert code == 0 and "objects=2 morphisms=5" in stdout
        text = out.read_text()
        assert text.startswith("digraph") and text.endswith("}\n")
        assert text.count("[label=") == 2 + 3
        assert text.count(" -> ") == 3

    def test_empty_category(self):
        empty = FinCategory([], {}, {}, lambda g, f: None, "empty")
        assert render_dot(empty, "empty") == 'digraph "empty" {\n}\n'

    def test_quoting(self):
        C = FinCategory(['a"b'], {('a"b', 'a"b'): ["i"]}, {'a"b': "i"}, lambda g, f: "i")
        assert 'label="a\\"b"' in render_dot(C)

    def test_deterministic_across_hash_seeds(self, tmp_path):
        outs = []
        for seed in ("1", "7"):
            p = tmp_path / f"{seed}.dot"
            env = dict(os.environ, PYTHONHASHSEED=seed)
            subprocess.run([sys.executable, "-m", "nablaops", "build", "wreath", "--multicat",
                            str(data_file("sample.json")), "--variant", "tildeG", "--n-max", "2",
                            "--dot", str(p)], check=True, env=env, capture_output=True)
            outs.append(p.read_bytes())
        assert outs[0] == outs[1]
