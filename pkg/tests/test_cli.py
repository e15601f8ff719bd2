import json

import pytest

from swancycle.cli import main


CASE1 = """
[field]
p = 5
eisenstein = "cyclotomic"

[character]
factors = [[["0", "1"], 1], [["1", "-1"], 1]]
unit = "1"
"""

TRIVIAL = """
[field]
p = 5

[character]
factors = [[["0", "1"], 5]]
unit = "1"
"""

EXPLICIT_EISENSTEIN = """
[field]
p = 3
eisenstein = ["3", "0", "1"]

[character]
factors = [[["0", "1"], 1]]
unit = "3"
"""

BAD_EISENSTEIN = """
[field]
p = 5
eisenstein = ["25", "1"]

[character]
factors = [[["0", "1"], 1]]
"""

NO_ZETA = """
[field]
p = 5
eisenstein = ["-5", "1"]

[character]
factors = [[["0", "1"], 1]]
"""


def write(tmp_path, text, name="job.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestCommands:
    def test_analyze_text(self, tmp_path, capsys):
        rc = main(["analyze", "--input", write(tmp_path, CASE1)])
        out = capsys.readouterr().out
        assert rc == 0
        assert "sw: 5" in out and "type: II" in out
        assert "ord: 1" in out

    def test_conductor_json(self, tmp_path, capsys):
        rc = main(["conductor", "--input", write(tmp_path, CASE1), "--format", "json"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["swan_h1"] == "1"
        assert doc["fcc_pairing"] == "-5"
        assert doc["cclog_pairing"] == "1"
        assert doc["clean"] is False

    def test_resolve_lists_blowups(self, tmp_path, capsys):
        rc = main(["resolve", "--input", write(tmp_path, CASE1), "--format", "json"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert len(doc["blowups"]) == 2
        assert doc["s_x"] == {"D:t=3": 1}

    def test_trivial_character_short_circuit(self, tmp_path, capsys):
        rc = main(["conductor", "--input", write(tmp_path, TRIVIAL), "--format", "json"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["trivial"] is True and doc["swan_h1"] == "0"

    def test_explicit_eisenstein_field(self, tmp_path, capsys):
        rc = main(["analyze", "--input", write(tmp_path, EXPLICIT_EISENSTEIN),
                   "--format", "json"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["field"]["e"] == 2 and doc["field"]["e_prime"] == 3

    def test_verify_exit_zero_on_pass(self, tmp_path, capsys):
        rc = main(["verify", "--input", write(tmp_path, CASE1)])
        assert rc == 0
        assert "passed: yes" in capsys.readouterr().out


class TestValidation:
    def test_bad_eisenstein_exit_1(self, tmp_path, capsys):
        rc = main(["analyze", "--input", write(tmp_path, BAD_EISENSTEIN)])
        assert rc == 1
        assert "error" in capsys.readouterr().err

    def test_no_zeta_exit_1(self, tmp_path, capsys):
        rc = main(["analyze", "--input", write(tmp_path, NO_ZETA)])
        assert rc == 1

    def test_missing_file_exit_1(self, tmp_path, capsys):
        rc = main(["analyze", "--input", str(tmp_path / "missing.toml")])
        assert rc == 1

    def test_nonlinear_factor_rejected(self, tmp_path, capsys):
        bad = """
[field]
p = 5

[character]
factors = [[["1", "0", "1"], 1]]
"""
        rc = main(["analyze", "--input", write(tmp_path, bad)])
        assert rc == 1


ZETA_JOB = """
[field]
p = 3
eisenstein = "cyclotomic"

[character]
# f = y * (y - zeta_3): the zeta symbol resolves through the field handle
factors = [[["0", "1"], 1], [["-zeta", "1"], 1]]
unit = "1"
"""


class TestZetaCoefficients:
    def test_parser_forms(self):
        from swancycle.cli import _coefficient
        from fractions import Fraction
        cases = {
            "1/2": (Fraction(1, 2), 0),
            "zeta": (0, 1),
            "-zeta": (0, -1),
            "2*zeta": (0, 2),
            "1+zeta": (1, 1),
            "1/2-3/4*zeta": (Fraction(1, 2), Fraction(-3, 4)),
        }
        for text, (rat, z) in cases.items():
            c = _coefficient(text)
            assert (c.rat, c.zmult) == (rat, z), text

    def test_zeta_section_job(self, tmp_path, capsys):
        rc = main(["conductor", "--input", write(tmp_path, ZETA_JOB),
                   "--format", "json"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        # zeta_3 = 1 + pi in the cyclotomic presentation: the section lands
        # on the closed fiber at t = 1
        assert "zeta" in doc["components"]["S2"]["section"]
        assert any("t=1" in k for k in doc["t_x"])
        assert doc["profiles"]["D"]["type"] in ("I", "II")
        assert doc["fcc_pairing"] == str(-3 * int(doc["cclog_pairing"]))


class TestDeterminism:
    def test_identical_reports(self, tmp_path, capsys):
        path = write(tmp_path, CASE1)
        main(["conductor", "--input", path, "--format", "json"])
        out1 = capsys.readouterr().out
        main(["conductor", "--input", path, "--format", "json"])
        out2 = capsys.readouterr().out
        assert out1 == out2

    def test_precision_override_same_invariants(self, tmp_path, capsys):
        path = write(tmp_path, CASE1)
        docs = []
        for n in ("100", "200"):
            rc = main(["conductor", "--input", path, "--format", "json",
                       "--precision", n])
            assert rc == 0
            docs.append(json.loads(capsys.readouterr().out))
        for key in ("swan_h1", "fcc_pairing", "cclog_pairing", "s_x", "t_x"):
            assert docs[0][key] == docs[1][key]
