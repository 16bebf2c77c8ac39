import csv
import io
import json
import subprocess
import sys

import pytest

from lctlab import __version__
from lctlab.cli import main

from conftest import IDEALS

FAST_FLAGS = ["--samples", "4000", "--seed", "7"]


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    assert code == 0, text
    body = json.loads(text)
    assert body["verb"] == argv[0]
    return body["result"]


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestExactVerbs:
    def test_check_a2b3(self):
        r = run_json("check", IDEALS / "a2b3.ideal")
        assert (r["lct"], r["e"], r["lhs"], r["rhs"]) == ("5/6", "6", "25/6", "4")
        assert r["holds"] is True and r["equality"] is False
        assert r["colength"] == 6 and r["colength_bound"] is True

    def test_check_m2(self):
        r = run_json("check", IDEALS / "m2.ideal")
        assert r["equality"] is True
        assert r["closure_power"] == {"is_power": True, "s": 2}

    def test_lct(self):
        r = run_json("lct", IDEALS / "m_a2b3.ideal")
        assert r["lct"] == "5/8"
        assert {tuple(f["normal"]) for f in r["polytope"]["facets"]} == {(1, 1), (3, 2)}

    def test_mult(self):
        r = run_json("mult", IDEALS / "a2b3.ideal", "--kmax", 3)
        assert r["e"] == "6" and r["complement_volume"] == "3"
        assert [row["colength"] for row in r["colength_series"]] == [6, 18, 36]

    def test_closure(self):
        r = run_json("closure", IDEALS / "a2b2.ideal")
        assert r["closure"] == [[0, 2], [1, 1], [2, 0]]
        assert r["integrally_closed"] is False
        assert r["closure_power"] == {"is_power": True, "s": 2}

    def test_weighted(self):
        r = run_json("weighted", IDEALS / "a2b3.ideal", "--gamma", "1/2,0")
        assert r["weighted_threshold"] == "7/12"
        assert (r["lhs"], r["rhs"], r["holds"]) == ("49/24", "2", True)

    def test_product(self):
        r = run_json("product", IDEALS / "m.ideal", IDEALS / "a2b3.ideal")
        assert r["product"] == [[0, 4], [1, 3], [2, 1], [3, 0]]
        assert r["check"]["lct"] == "5/8" and r["check"]["e"] == "11"

    def test_colengths_csv(self):
        code, text = run("colengths", IDEALS / "a2b3.ideal", "--kmax", 10, "--format", "csv")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(text)))
        assert rows[0] == {"k": "1", "colength": "6", "scaled": "12"}
        assert rows[-1] == {"k": "10", "colength": "330", "scaled": "33/5"}

    def test_reduce_exact(self):
        r = run_json("reduce", IDEALS / "deg2.poly", "--skip-mc")
        assert r["basis"] == ["x2^3", "x1^2 + x2^2", "x1*x2"]
        assert r["initial_ideal"] == [[0, 3], [1, 1], [2, 0]]
        assert r["colength"] == 4 and r["lct_initial"] == "1"

    def test_reduce_lex(self):
        r = run_json("reduce", IDEALS / "strict.poly", "--order", "lex", "--skip-mc")
        assert r["initial_ideal"] == [[0, 3], [1, 0]]
        assert r["colength"] == 3

    def test_sweep(self):
        r = run_json("sweep", "--count", 40, "--seed", 3)
        assert r["count"] == 40 and r["violations"] == 0
        assert all(row["holds"] for row in r["rows"])

    def test_sweep_csv(self):
        code, text = run("sweep", "--count", 10, "--seed", 1, "--format", "csv")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(text)))
        assert len(rows) == 10 and all(r["holds"] == "True" for r in rows)

    def test_sweep_threads_identical(self, monkeypatch):
        monkeypatch.setenv("TOOL_THREADS", "1")
        a = run("sweep", "--count", 30, "--seed", 9)
        monkeypatch.setenv("TOOL_THREADS", "2")
        b = run("sweep", "--count", 30, "--seed", 9)
        assert a == b

    def test_exponent_vector_file(self):
        r = run_json("check", IDEALS / "mixed3.ideal")
        assert r["holds"] is True and r["n"] == 3


class TestRoundTripAndStability:
    def test_byte_stable(self):
        for verb in ("check", "lct", "mult", "closure"):
            assert run(verb, IDEALS / "a2b3.ideal") == run(verb, IDEALS / "a2b3.ideal")

    def test_rationals_are_strings(self):
        r = run_json("check", IDEALS / "m_a2b3.ideal")
        for key in ("lct", "e", "lhs", "rhs"):
            assert isinstance(r[key], str)

    def test_shipped_files_round_trip(self, tmp_path):
        from lctlab.ideal import format_ideal, read_ideal

        for path in sorted(IDEALS.glob("*.ideal")):
            J = read_ideal(path)
            copy = write(tmp_path, path.name, format_ideal(J))
            assert run("check", path) == run("check", copy)


class TestNumericVerbs:
    def test_estimate(self):
        r = run_json("estimate", IDEALS / "m.ideal", *FAST_FLAGS)
        lo, hi = r["interval"]
        assert lo <= 2 <= hi and r["contains_exact"] is True and r["exact"] == "2"
        prov = r["provenance"]
        assert prov["version"] == __version__
        assert prov["config"]["seed"] == 7 and prov["bisection_steps"] == 7

    def test_estimate_stable(self):
        argv = ("estimate", IDEALS / "a2b3.ideal", *FAST_FLAGS, "--steps", "3")
        assert run(*argv) == run(*argv)

    def test_estimate_weighted_and_scaled(self):
        r = run_json("estimate", IDEALS / "a2b3.ideal", "--gamma", "1/2,0", "--scale", "2", *FAST_FLAGS, "--steps", "4")
        assert r["exact"] == "7/24" and r["gamma"] == ["1/2", "0"]

    def test_estimate_poly(self):
        r = run_json("estimate", IDEALS / "deg2.poly", *FAST_FLAGS, "--steps", "4")
        assert r["model"]["variant"] == "poly" and "exact" not in r

    def test_reduce_with_mc(self):
        r = run_json("reduce", IDEALS / "deg2.poly", *FAST_FLAGS)
        assert r["passes"] is True and r["lct_initial"] == "1"
        assert "provenance" in r

    def test_experiment_sharpness_csv(self):
        code, text = run("experiment", "sharpness", "--eps-list", "1/5,1/10", *FAST_FLAGS, "--format", "csv")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(text)))
        assert [r["mass"] for r in rows] == ["81/25", "361/100"]

    def test_experiment_kiselman(self):
        r = run_json("experiment", "kiselman", "--eps-list", "1/10,1/100", *FAST_FLAGS)
        assert [row["mass"] for row in r["rows"]] == ["0", "0"]

    def test_experiment_holder(self):
        r = run_json("experiment", "holder", IDEALS / "m.ideal", IDEALS / "a2b3.ideal", *FAST_FLAGS, "--steps", "4")
        assert r["lct_product"] == "5/8" and r["holder_bound"] == "10/17" and r["bound_holds"]


class TestExitCodes:
    def test_missing_file(self, tmp_path):
        assert run("check", tmp_path / "nope.ideal")[0] == 1

    def test_parse_error(self, tmp_path):
        assert run("check", write(tmp_path, "bad.ideal", "vars 2\nx3^2\n"))[0] == 1

    def test_bad_poly(self, tmp_path):
        assert run("reduce", write(tmp_path, "bad.poly", "vars 2\nx1 +\n"), "--skip-mc")[0] == 1

    def test_not_m_primary(self, tmp_path):
        assert run("check", write(tmp_path, "x.ideal", "vars 2\nx1*x2\nx1^3\n"))[0] == 2

    def test_bad_gamma(self):
        assert run("weighted", IDEALS / "a2b3.ideal", "--gamma", "1,0")[0] == 2

    def test_bad_config(self):
        assert run("estimate", IDEALS / "m.ideal", "--ratio", "2")[0] == 2

    def test_bracket_failure(self):
        assert run("estimate", IDEALS / "m.ideal", "--scale", "1/100", *FAST_FLAGS)[0] == 2

    def test_bad_kmax(self):
        assert run("colengths", IDEALS / "a2b3.ideal", "--kmax", "0")[0] == 2

    def test_resource_cap(self, tmp_path):
        text = "vars 5\n" + "\n".join(" ".join("1" if i == j else "0" for j in range(5)) for i in range(5))
        assert run("lct", write(tmp_path, "big.ideal", text))[0] == 3

    def test_holder_needs_two_paths(self):
        assert run("experiment", "holder", IDEALS / "m.ideal", *FAST_FLAGS)[0] == 1

    def test_csv_not_available(self):
        assert run("check", IDEALS / "a2b3.ideal", "--format", "csv")[0] == 1

    @pytest.mark.parametrize(
        "argv",
        [["frobnicate"], ["check"], ["weighted", "x.ideal", "--gamma", "a,b"], ["sweep", "--dims", "x"]],
    )
    def test_usage_errors(self, argv):
        with pytest.raises(SystemExit) as exc:
            main(argv, out=io.StringIO())
        assert exc.value.code == 1

    def test_internal_error_is_exit_4(self, monkeypatch):
        import lctlab.cli as cli

        def boom(args):
            raise ZeroDivisionError("boom")

        monkeypatch.setattr(cli, "cmd_check", boom)
        assert run("check", IDEALS / "a2b3.ideal")[0] == 4


class TestEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "lctlab", "lct", str(IDEALS / "a2b3.ideal")],
            capture_output=True,
            text=True,
            check=False,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["result"]["lct"] == "5/6"

    def test_version(self):
        proc = subprocess.run([sys.executable, "-m", "lctlab", "--version"], capture_output=True, text=True)
        assert proc.stdout.strip() == __version__
