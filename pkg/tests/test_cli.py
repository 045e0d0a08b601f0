import json
from fractions import Fraction

import pytest

from fpaeq.cli import (
    EXIT_OK,
    EXIT_PARSE,
    EXIT_SEARCH_NONE,
    EXIT_VALIDATION,
    EXIT_VERIFY_FAIL,
    main,
)
from fpaeq.model import Profile, PureStrategy
from fpaeq.serialize import (
    instance_to_doc,
    dumps,
    load_instance,
    load_profile,
    save_instance,
    save_profile,
)

F = Fraction


@pytest.fixture
def files(tmp_path, prop34, prop34_nonmonotone):
    inst = tmp_path / "prop34.json"
    save_instance(prop34, str(inst))
    prof = tmp_path / "nonmono.json"
    save_profile(prop34_nonmonotone, str(prof))
    return tmp_path, str(inst), str(prof)


def run(capsys, *args):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


class TestBasicVerbs:
    def test_validate_ok(self, capsys, files):
        _, inst, _ = files
        code, out, _ = run(capsys, "validate", "--instance", inst)
        assert code == EXIT_OK
        assert json.loads(out)["ok"] is True

    def test_validate_reports_violations(self, capsys, tmp_path, prop34):
        doc = instance_to_doc(prop34)
        doc["support"][0]["mass"] = "1/2"
        bad = tmp_path / "bad.json"
        bad.write_text(dumps(doc))
        code, out, _ = run(capsys, "validate", "--instance", bad)
        assert code == EXIT_VALIDATION
        assert not json.loads(out)["ok"]

    def test_marginal(self, capsys, files):
        _, inst, _ = files
        code, out, _ = run(capsys, "marginal", "--instance", inst, "--bidder", 0)
        assert code == EXIT_OK
        assert json.loads(out)["pmf"] == [
            {"value": "0", "mass": "1/3"},
            {"value": "1/2", "mass": "1/3"},
            {"value": "1", "mass": "1/3"},
        ]

    def test_utility_and_best_response(self, capsys, files):
        _, inst, prof = files
        code, out, _ = run(
            capsys,
            "utility",
            "--instance", inst, "--bidder", 0,
            "--value", "1", "--bid", "1/10", "--profile", prof,
        )
        assert code == EXIT_OK and out.strip() == "9/10"
        code, out, _ = run(
            capsys,
            "best-response",
            "--instance", inst, "--bidder", 0, "--value", "1",
            "--profile", prof,
        )
        assert code == EXIT_OK
        assert json.loads(out)["argmax"] == ["1/10"]

    def test_decimal_rejected(self, capsys, files):
        _, inst, prof = files
        with pytest.raises(SystemExit):
            main([
                "utility", "--instance", inst, "--bidder", "0",
                "--value", "0.5", "--bid", "0", "--profile", prof,
            ])


class TestVerify:
    def test_exact_equilibrium_passes(self, capsys, files):
        _, inst, prof = files
        code, out, _ = run(
            capsys, "verify", "--instance", inst, "--profile", prof, "--eps", "0"
        )
        assert code == EXIT_OK
        assert json.loads(out)["max_gain"] == "0"

    def test_violations_exit_code(self, capsys, files, tmp_path, prop34):
        zeros = Profile(
            [
                PureStrategy(i, {F(0): F(0), F(1, 2): F(0), F(1): F(0)})
                for i in range(2)
            ]
        )
        path = tmp_path / "zeros.json"
        save_profile(zeros, str(path))
        _, inst, _ = files
        code, out, _ = run(
            capsys, "verify", "--instance", inst, "--profile", path, "--eps", "1/100"
        )
        assert code == EXIT_VERIFY_FAIL
        assert json.loads(out)["violations"]


class TestSearchVerbs:
    def test_solve_pure_monotone_none(self, capsys, files):
        _, inst, _ = files
        code, out, _ = run(
            capsys,
            "solve-pure", "--instance", inst, "--eps", "1/100", "--monotone",
        )
        assert code == EXIT_SEARCH_NONE
        assert json.loads(out)["status"] == "none"

    def test_solve_pure_finds_and_writes(self, capsys, files):
        tmp, inst, _ = files
        out_path = tmp / "found.json"
        code, out, _ = run(
            capsys,
            "solve-pure", "--instance", inst, "--eps", "0", "--out", out_path,
        )
        assert code == EXIT_OK
        profile = load_profile(str(out_path))
        assert len(profile.strategies) == 2

    def test_shrink(self, capsys, files, tmp_path):
        _, inst, _ = files
        out_inst = tmp_path / "shrunk.json"
        code, out, _ = run(
            capsys, "shrink", "--instance", inst, "--target", 5, "--out", out_inst
        )
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["bids"] == ["0", "1/5", "1/2", "7/10", "1"]
        assert doc["guarantee"] == "1/4"
        assert [str(b) for b in load_instance(str(out_inst)).bids] == [
            "0", "1/5", "1/2", "7/10", "1",
        ]


class TestReductionVerbs:
    def test_from_sat_encode_extract_verify(self, capsys, tmp_path):
        cnf = tmp_path / "f.cnf"
        cnf.write_text("p cnf 2 1\n1 -2 0\n")
        prefix = tmp_path / "red"
        code, out, _ = run(capsys, "from-sat", cnf, "--out-prefix", prefix)
        assert code == EXIT_OK
        head = json.loads(out)
        assert head["bidders"] == 13  # 8 input + not + proj + or2 + 2 out

        prof_path = tmp_path / "encoded.json"
        code, _, _ = run(
            capsys,
            "encode", "--map", f"{prefix}.map.json",
            "--assignment", "1,0", "--out", prof_path,
        )
        assert code == EXIT_OK

        params = json.loads((tmp_path / "red.params.json").read_text())
        eps = params["eps_threshold"]
        code, out, _ = run(
            capsys,
            "verify", "--instance", f"{prefix}.instance.json",
            "--profile", prof_path, "--eps", eps,
        )
        assert code == EXIT_OK

        code, out, _ = run(
            capsys, "extract", "--map", f"{prefix}.map.json", "--profile", prof_path
        )
        assert code == EXIT_OK
        assert json.loads(out) == {"status": "ok", "assignment": [1, 0]}

    def test_from_sat_rejects_wide_clause(self, capsys, tmp_path):
        cnf = tmp_path / "f.cnf"
        cnf.write_text("1 2 3 4 0\n")
        code, _, err = run(capsys, "from-sat", cnf)
        assert code == EXIT_PARSE
        assert json.loads(err)["error"] == "parse"


class TestContinuousVerbs:
    def test_lift_project_pipeline(self, capsys, tmp_path, apv_fixture):
        inst = tmp_path / "apv.json"
        save_instance(apv_fixture, str(inst))
        lifted_path = tmp_path / "lifted.json"
        code, out, _ = run(
            capsys,
            "lift", "--instance", inst, "--delta", "1/8", "--out", lifted_path,
        )
        assert code == EXIT_OK
        assert json.loads(out)["delta"] == "1/8"

        code, out, _ = run(
            capsys, "check-affiliation", "--instance", lifted_path
        )
        assert code == EXIT_OK

        code, out, _ = run(
            capsys,
            "jump-search", "--instance", lifted_path, "--eps", "0",
            "--out", tmp_path / "jump.json",
        )
        assert code == EXIT_OK

        code, out, _ = run(
            capsys,
            "project", "--instance", inst,
            "--profile", tmp_path / "jump.json", "--delta", "1/8",
            "--out", tmp_path / "projected.json",
        )
        assert code == EXIT_OK
        code, out, _ = run(
            capsys,
            "verify", "--instance", inst,
            "--profile", tmp_path / "projected.json", "--eps", "1/8",
        )
        assert code == EXIT_OK

    def test_densify_outputs(self, capsys, tmp_path):
        doc = {
            "kind": "cfpa-iid",
            "bids": [f"{k}/20" if k else "0" for k in range(21)],
            "n": 2,
            "breakpoints": ["0", "1"],
            "densities": ["1"],
        }
        inst = tmp_path / "uniform.json"
        inst.write_text(dumps(doc))
        code, out, _ = run(
            capsys,
            "densify", "--instance", inst,
            "--out-strategy", tmp_path / "strat.json",
            "--out-certificate", tmp_path / "cert.json",
            "--samples", tmp_path / "samples.csv",
            "--grid", 10,
        )
        assert code == EXIT_OK
        cert = json.loads((tmp_path / "cert.json").read_text())
        assert cert["mode"] == "iid" and cert["gamma"] == "2"
        lines = (tmp_path / "samples.csv").read_text().splitlines()
        assert lines[0] == "v,beta,beta_tilde"
        assert len(lines) == 12

        code, out, _ = run(
            capsys,
            "emit-plot", "--instance", inst,
            "--strategy", tmp_path / "strat.json", "--grid", 8,
        )
        assert code == EXIT_OK
        rows = out.strip().splitlines()
        assert rows[0] == "v,bid"
        bids = [F(r.split(",")[1]) for r in rows[1:]]
        assert all(b2 >= b1 for b1, b2 in zip(bids, bids[1:]))

    def test_unsupported_sapv_mode(self, capsys, tmp_path):
        doc = {
            "kind": "cfpa-box",
            "bids": ["0", "1/4"],
            "n": 2,
            "boxes": [
                {"lo": ["0", "0"], "hi": ["1/2", "1/2"], "weight": "4"}
            ],
        }
        inst = tmp_path / "gappy.json"
        inst.write_text(dumps(doc))
        code, _, err = run(capsys, "densify", "--instance", inst)
        assert code == EXIT_VALIDATION
        assert json.loads(err)["error"] == "unsupported"


class TestDeterminism:
    def test_identical_inputs_identical_outputs(self, capsys, files):
        _, inst, prof = files
        first = run(capsys, "verify", "--instance", inst, "--profile", prof)
        second = run(capsys, "verify", "--instance", inst, "--profile", prof)
        assert first == second

    def test_thread_count_does_not_change_output(
        self, capsys, files, monkeypatch
    ):
        _, inst, prof = files
        single = run(capsys, "verify", "--instance", inst, "--profile", prof)
        monkeypatch.setenv("FPAEQ_THREADS", "4")
        threaded = run(capsys, "verify", "--instance", inst, "--profile", prof)
        assert single == threaded

    def test_io_error_record(self, capsys):
        code, _, err = run(capsys, "validate", "--instance", "/nonexistent.json")
        assert code == 14
        assert json.loads(err)["error"] == "io"
