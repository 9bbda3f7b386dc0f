import subprocess
import sys

import numpy as np
import pytest

from simplexcert.cli import demo_lines, main
from simplexcert.equivalence import certify_simplex_equivalence
from simplexcert.formats import (
    SpecParseError,
    build_model,
    certificates_equal,
    parse_certificate,
    parse_spec,
    render_certificate,
)

INTRO = """\
alphabet: ["0", "1", "2"]
kind: mixture-generators
generators:
  - [1, 0, 0]
  - [0, 0.5, 0.5]
"""

CURVE = """\
alphabet: 3
kind: exponential
C: [0, 0, 0]
F:
  - [0, 1, 2]
"""

SIMPLEX = """\
alphabet: [a, b, c]
kind: mixture-generators
generators:
  - [1, 0, 0]
  - [0, 1, 0]
  - [0, 0, 1]
"""

SEGMENT = """\
alphabet: 3
kind: mixture
C: [0.35, 0.3, 0.35]
F:
  - [0.15, 0, -0.15]
box: [[-1, 1]]
"""


@pytest.fixture
def spec(tmp_path):
    def write(text, name="model.yaml"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestCheckAlpha:
    def test_intro_passes(self, spec, capsys):
        code, out, _ = run(capsys, "check-alpha", spec(INTRO), "--alpha", "-1,0,1,2")
        assert code == 0
        assert out.count("PASS") == 4

    def test_curve_fails_mixture(self, spec, capsys):
        code, out, _ = run(capsys, "check-alpha", spec(CURVE), "--alpha", "-1")
        assert code == 1
        assert "FAIL" in out and "dimension=3" in out

    def test_exponential_passes_alpha_one(self, spec, capsys):
        assert run(capsys, "check-alpha", spec(CURVE), "--alpha", "1")[0] == 0

    def test_bad_alpha_list(self, spec, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["check-alpha", spec(INTRO), "--alpha", "one"])
        assert exc.value.code == 2


class TestCertify:
    def test_intro(self, spec, capsys, tmp_path):
        out_path = tmp_path / "cert.yaml"
        code, _, _ = run(capsys, "certify", spec(INTRO), "--out", str(out_path))
        assert code == 0
        cert = parse_certificate(out_path.read_text())
        np.testing.assert_array_equal(cert.embedding.kernel, [[1, 0], [0, 0.5], [0, 0.5]])
        np.testing.assert_array_equal(cert.left_inverse.kernel, [[1, 0, 0], [0, 1, 1]])

    def test_full_simplex_identity(self, spec, capsys):
        code, out, _ = run(capsys, "certify", spec(SIMPLEX))
        assert code == 0
        cert = parse_certificate(out)
        np.testing.assert_array_equal(cert.embedding.kernel, np.eye(3))
        assert cert.alphabet.labels == ("a", "b", "c")

    def test_curve_stage(self, spec, capsys):
        code, out, err = run(capsys, "certify", spec(CURVE))
        assert code == 1
        assert "stage: not-m-family" in out and "not-m-family" in err

    def test_segment_stage(self, spec, capsys):
        code, out, _ = run(capsys, "certify", spec(SEGMENT))
        assert code == 1
        assert "stage: not-subalgebra" in out and "witness" in out

    def test_seed_flag_and_default(self, spec, capsys):
        assert parse_certificate(run(capsys, "certify", spec(INTRO))[1]).seed == 0
        assert parse_certificate(run(capsys, "certify", spec(INTRO), "--seed", "5")[1]).seed == 5
        assert parse_certificate(run(capsys, "certify", spec(INTRO + "seed: 9\n"))[1]).seed == 9


class TestBattery:
    def test_intro(self, spec, capsys):
        code, out, _ = run(capsys, "battery", spec(INTRO), "--alpha", "-1,0,0.5,1,2")
        assert code == 0
        assert out.count(": True") == 4

    def test_curve(self, spec, capsys, tmp_path):
        report = tmp_path / "report.yaml"
        code, out, _ = run(capsys, "battery", spec(CURVE), "--out", str(report))
        assert code == 0
        assert out.count(": False") == 4
        assert "not-m-family" in report.read_text()

    def test_consistency_fault_exit(self, spec, capsys):
        text = INTRO + "tolerances: {autoparallel: 1.0e-300}\n"
        code, _, err = run(capsys, "battery", spec(text))
        assert code == 4 and "CONSISTENCY FAULT" in err


class TestErrors:
    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "certify", str(tmp_path / "nope.yaml"))[0] == 2

    def test_parse_error_has_line(self, spec, capsys):
        bad = INTRO.replace("[0, 0.5, 0.5]", "[0, 0.5]")
        code, _, err = run(capsys, "certify", spec(bad))
        assert code == 2
        assert "line 5" in err and "generators" in err

    def test_unknown_kind(self):
        with pytest.raises(SpecParseError) as exc:
            parse_spec("alphabet: 2\nkind: banana\n")
        assert exc.value.line == 2 and exc.value.field == "kind"

    def test_malformed_yaml(self):
        with pytest.raises(SpecParseError):
            parse_spec("alphabet: [1, 2\n")

    def test_domain_error(self, spec, capsys):
        # generators that are not distributions
        code, _, err = run(capsys, "certify", spec(INTRO.replace("[1, 0, 0]", "[0.9, 0, 0]")))
        assert code == 3 and "domain error" in err

    def test_no_command(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2


class TestTolerancePrecedence:
    def test_env_then_spec_then_flag(self, spec, capsys, monkeypatch):
        # a huge tolerance lets the curve pass the mixture check
        monkeypatch.setenv("SIMPLEXCERT_TOL", "10")
        path = spec(CURVE)
        assert run(capsys, "check-alpha", path, "--alpha", "-1")[0] == 1  # rank decides, not tol
        monkeypatch.setenv("SIMPLEXCERT_TOL", "not-a-number")
        assert run(capsys, "check-alpha", path, "--alpha", "1")[0] == 2
        assert run(capsys, "check-alpha", path, "--alpha", "1", "--tol", "1e-8")[0] == 0

    def test_spec_tolerance_beats_env(self, spec, capsys, monkeypatch):
        monkeypatch.setenv("SIMPLEXCERT_TOL", "1e-30")
        # with tol 1e-30 the round trip fails on rounding; the spec restores a sane value
        assert run(capsys, "certify", spec(INTRO + "tolerances: {tol: 1.0e-8}\n"))[0] == 0


class TestCertificateFormat:
    def test_round_trip(self):
        built = build_model(parse_spec(INTRO))
        cert = certify_simplex_equivalence(built.model)
        again = parse_certificate(render_certificate(cert, "0.1.0"))
        assert certificates_equal(cert, again)
        assert render_certificate(again, "0.1.0") == render_certificate(cert, "0.1.0")

    def test_wrong_format_tag(self):
        with pytest.raises(SpecParseError):
            parse_certificate("format: something-else\n")


class TestDemo:
    def test_output_stable_and_parseable(self, capsys):
        code, first, _ = run(capsys, "demo")
        assert code == 0
        assert run(capsys, "demo")[1] == first
        cert = parse_certificate(first)
        assert cert.partition.blocks == ((0,), (1, 2))

    def test_narrative(self):
        say, _ = demo_lines()
        text = "\n".join(say)
        assert "mixture family" in text and "exponential family" in text and "W V = I" in text

    def test_entry_point(self):
        res = subprocess.run([sys.executable, "-m", "simplexcert", "demo"], capture_output=True, text=True)
        assert res.returncode == 0
        assert "V = [[1, 0], [0, 1/2], [0, 1/2]]" in res.stdout
