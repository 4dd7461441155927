import json
from fractions import Fraction as F

import pytest

from nctorus import cli
from nctorus import documents as docs
from nctorus import exact_linalg as xl
from nctorus import torus_group as tg


def flip_doc(theta12="1/3"):
    return {
        "version": "nctorus/1",
        "n": 2,
        "g": {
            "A": [[0, 0], [0, 0]],
            "B": [[1, 0], [0, 1]],
            "C": [[1, 0], [0, 1]],
            "D": [[0, 0], [0, 0]],
        },
        "theta": [["0", theta12], [f"-{theta12}", "0"]],
    }


def run(tmp_path, argv, doc=None):
    if doc is not None:
        inp = tmp_path / "in.json"
        inp.write_text(docs.dumps(doc))
        argv = argv + ["--input", str(inp)]
    out = tmp_path / "out.json"
    code = cli.main(argv + ["--output", str(out)])
    return code, json.loads(out.read_text())


class TestRationalRoundTrip:
    def test_scalars(self):
        for s in ["0", "5", "-7", "1/3", "-22/7"]:
            assert docs.rat_str(docs.parse_rat(s)) == s

    def test_matrix(self):
        M = xl.mat([[F(1, 3), -2], [F(5, 7), 0]])
        assert xl.mat_eq(docs.parse_rat_matrix(docs.rat_matrix_doc(M)), xl.to_fraction(M))

    def test_bad_rational(self):
        with pytest.raises(docs.ParseError):
            docs.parse_rat("1/0")
        with pytest.raises(docs.ParseError):
            docs.parse_rat("x")

    def test_theta_round_trip(self):
        theta = tg.random_theta(3, 4)
        assert docs.theta_from_doc(docs.theta_doc(theta)) == theta

    def test_no_floats_in_exact_output(self):
        doc = flip_doc()
        job = docs.load_job(doc)
        g = tg.check_membership(*job["g_blocks"])
        from nctorus.embedding import pipeline

        out = docs.pipeline_doc(pipeline(g, job["theta"]))
        for key in ("theta_prime", "T", "S", "Z", "phi_star", "curvature"):
            flat = [x for row in out[key] for x in row]
            assert all(isinstance(x, str) for x in flat), key


class TestCommands:
    def test_check_ok(self, tmp_path):
        code, out = run(tmp_path, ["check"], flip_doc())
        assert code == 0 and out["valid"] is True

    def test_check_invalid_element(self, tmp_path):
        doc = flip_doc()
        doc["g"]["A"] = [[2, 0], [0, 2]]
        code, out = run(tmp_path, ["check"], doc)
        assert code == 1 and out["error"]["kind"] == "certificate"

    def test_act_identity(self, tmp_path):
        doc = flip_doc()
        doc["g"] = {
            "A": [[1, 0], [0, 1]],
            "B": [[0, 0], [0, 0]],
            "C": [[0, 0], [0, 0]],
            "D": [[1, 0], [0, 1]],
        }
        code, out = run(tmp_path, ["act"], doc)
        assert code == 0 and out["theta"] == doc["theta"]

    def test_act_flip(self, tmp_path):
        code, out = run(tmp_path, ["act"], flip_doc())
        assert code == 0
        assert out["theta"] == [["0", "-3"], ["3", "0"]]

    def test_act_undefined_exit_3(self, tmp_path):
        code, out = run(tmp_path, ["act"], flip_doc(theta12="0"))
        assert code == 3 and out["error"]["kind"] == "undefined"

    def test_parse_error_exit_2(self, tmp_path):
        inp = tmp_path / "bad.json"
        inp.write_text("{nope")
        out = tmp_path / "out.json"
        code = cli.main(["check", "--input", str(inp), "--output", str(out)])
        assert code == 2
        assert json.loads(out.read_text())["error"]["kind"] == "parse"

    def test_missing_field_exit_2(self, tmp_path):
        doc = {"version": "nctorus/1", "n": 2, "theta": [["0", "1"], ["-1", "0"]]}
        code, out = run(tmp_path, ["act"], doc)
        assert code == 2

    def test_normalize(self, tmp_path):
        code, out = run(tmp_path, ["normalize"], flip_doc())
        assert code == 0
        assert out["p"] == 1 and out["R0"] == [[1, 0], [0, 1]]

    def test_pipeline_flip(self, tmp_path):
        code, out = run(tmp_path, ["pipeline"], flip_doc())
        assert code == 0
        assert out["all_passed"] is True
        assert out["theta_prime"] == [["0", "-3"], ["3", "0"]]
        assert out["T"] == [["1/3", "0"], ["0", "1"]]
        assert out["S"] == [["0", "-1"], ["3", "0"]]
        assert out["phi_star"] == [["0", "3"], ["-3", "0"]]
        assert out["g_prime"]["B"] == [[-1, 0], [0, -1]]
        assert out["shear"] == [[0, 0], [0, 0]]
        assert out["basis_change"] == [[-1, 0], [0, -1]]
        assert [c["passed"] for c in out["certificates"]] == [True] * len(out["certificates"])
        kinds = [s["kind"] for s in out["chain"]["steps"]]
        assert kinds == ["iso_rho", "heisenberg", "iso_rho", "iso_mu"]

    def test_decompose_without_theta(self, tmp_path):
        doc = flip_doc()
        del doc["theta"]
        code, out = run(tmp_path, ["decompose"], doc)
        assert code == 0
        assert out["basis_change"] == [[-1, 0], [0, -1]]
        assert out["g_prime"]["C"] == [[-1, 0], [0, -1]]

    def test_simulate_from_job(self, tmp_path):
        code, out = run(
            tmp_path, ["simulate", "--seed", "5", "--trials", "10", "--samples", "4"], flip_doc()
        )
        assert code == 0 and out["passed"] is True
        assert out["residuals"]["module_relation"] < 1e-9

    def test_simulate_from_descriptor_doc(self, tmp_path):
        code, out = run(tmp_path, ["pipeline"], flip_doc())
        assert code == 0
        code2, out2 = run(
            tmp_path,
            ["simulate", "--seed", "5", "--trials", "5", "--samples", "4"],
            {"version": "nctorus/1", "module_descriptor": out["module_descriptor"]},
        )
        assert code2 == 0 and out2["passed"] is True

    def test_campaign(self, tmp_path):
        code, out = run(tmp_path, ["campaign", "--n", "2", "--seed", "7", "--trials", "4"])
        assert code == 0
        assert out["all_passed"] is True and out["defined"] >= 3

    def test_simulate_tolerance_gate(self, tmp_path):
        code, out = run(
            tmp_path,
            ["simulate", "--seed", "5", "--trials", "3", "--samples", "4", "--tolerance", "1e-30"],
            flip_doc(),
        )
        assert code == 1 and out["passed"] is False

    def test_campaign_records_certificate_failures(self, tmp_path, monkeypatch):
        from nctorus.embedding import EmbeddingError

        def boom(g, theta):
            raise EmbeddingError("T_pullback", "forced failure")

        monkeypatch.setattr(cli, "pipeline", boom)
        code, out = run(tmp_path, ["campaign", "--n", "2", "--seed", "1", "--trials", "2"])
        assert code == 1 and out["all_passed"] is False
        failed = [r for r in out["results"] if r.get("defined")]
        assert failed and all(r["failed_certificate"] == "T_pullback" for r in failed)

    def test_campaign_deterministic(self, tmp_path):
        out1 = tmp_path / "c1.json"
        out2 = tmp_path / "c2.json"
        assert cli.main(["campaign", "--n", "3", "--seed", "9", "--trials", "3", "--output", str(out1)]) == 0
        assert cli.main(["campaign", "--n", "3", "--seed", "9", "--trials", "3", "--output", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_pipeline_deterministic_bytes(self, tmp_path):
        doc = flip_doc()
        inp = tmp_path / "in.json"
        inp.write_text(docs.dumps(doc))
        outs = []
        for name in ("a", "b"):
            out = tmp_path / f"{name}.json"
            assert cli.main(["pipeline", "--input", str(inp), "--output", str(out)]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
