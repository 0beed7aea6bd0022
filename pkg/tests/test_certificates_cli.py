import json
import math

import pytest

from cml.certificates import Certificate, Check, strip_timing
from cml.cli import run_subcommand
from cml.poly_core import TolerancePolicy
from cml.suite import PROPERTIES, SuiteConfig, run_suite


def write(tmp_path, name, payload):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return str(p)


def run(capsys, *argv):
    code = run_subcommand(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def z4m1(tmp_path):
    return write(tmp_path, "z4m1.json", {"degree": 4, "coeffs": [[0, 0], [0, 0], [0, 0], [-1, 0]]})


class TestCertificate:
    def test_round_trip(self):
        c = Certificate("demo", {"a": 1}, {"b": [1.5, -2.0]}, tolerances=TolerancePolicy(root_tol=1e-11), seed=7)
        c.check("one", True, "fine", 0.25)
        c.check("two", False, "broken")
        back = Certificate.loads(c.dumps())
        assert back.dumps() == c.dumps()
        assert not back.passed and [x.name for x in back.failed_checks()] == ["two"]

    def test_passed_flag_must_agree(self):
        c = Certificate("demo")
        c.check("one", True)
        d = c.to_json()
        d["passed"] = False
        with pytest.raises(ValueError):
            Certificate.from_json(d)

    def test_non_finite_measurement_is_not_emitted(self):
        c = Certificate("demo", checks=[Check("x", True, "", math.inf)])
        d = json.loads(c.dumps())
        assert d["checks"][0]["measured"] is None and "inf" in d["checks"][0]["detail"]

    def test_strip_timing(self):
        c = Certificate("demo", timing={"seconds": 1.0})
        assert "timing" not in json.loads(strip_timing(c.dumps()))


class TestCli:
    def test_resolve_quartic(self, capsys, z4m1):
        code, out, err = run(capsys, "resolve-quartic", "--poly", z4m1)
        assert code == 0 and "PASS" in err
        cert = json.loads(out)
        coeffs = [complex(*c) for c in cert["outputs"]["coeffs"]]
        assert max(abs(a - b) for a, b in zip(coeffs, [0, 4, 0])) <= 1e-10

    def test_sizes(self, capsys):
        code, out, _ = run(capsys, "sizes", "--bound", "110")
        cert = json.loads(out)
        assert code == 0
        assert cert["outputs"]["sizes"] == [9, 27, 36, 72, 81, 99, 108]
        assert all("witness" in w for w in cert["outputs"]["witnesses"])

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "j.json"
        code, out, _ = run(capsys, "jordan", "--m", "6", "--out", str(target))
        assert code == 0 and json.loads(target.read_text()) == json.loads(out)
        assert json.loads(out)["outputs"]["J2"] == 24

    @pytest.mark.parametrize(
        "argv",
        [
            ["nonsense"],
            ["roots"],
            ["roots", "--poly", "/no/such/file"],
            ["jordan", "--m", "0"],
            ["sizes", "--bound", "3"],
            ["verify", "--trials", "0"],
            ["roots", "--tol-root", "1e-3", "--tol-distinct", "1e-6", "--poly", "x"],
        ],
    )
    def test_bad_input_exits_2(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2

    def test_not_square_free_is_bad_input(self, capsys, tmp_path):
        p = write(tmp_path, "sq.json", {"degree": 4, "coeffs": [[0, 0], [-2, 0], [0, 0], [1, 0]]})
        assert run(capsys, "resolve-quartic", "--poly", p)[0] == 2

    def test_failed_certificate_exits_1(self, capsys, tmp_path):
        # a tight distinctness threshold makes the separation check fail
        path = {
            "degree": 2,
            "waypoints": [{"degree": 2, "coeffs": [[0, 0], [-1e-4, 0]]}, {"degree": 2, "coeffs": [[0, 0], [-1e-4, 0]]}],
        }
        p = write(tmp_path, "path.json", path)
        code, out, err = run(capsys, "monodromy", "--path", p, "--tol-distinct", "1e-2", "--tol-root", "1e-12")
        assert code == 1 and "FAIL" in err and json.loads(out)["passed"] is False

    def test_psi_and_phi(self, capsys, tmp_path):
        lam = write(tmp_path, "lam.json", {"ordered": False, "points": [[-1, 0], [0, 0], [1, 0]]})
        code, out, _ = run(capsys, "psi-torsion", "--config", lam, "--k", "3", "--tau", "0.5+0.25j")
        assert code == 0 and len(json.loads(out)["outputs"]["config"]["points"]) == 8
        code, out, _ = run(capsys, "phi", "--config", lam)
        assert code == 0 and json.loads(out)["outputs"]["config"]["points"][-1] == [3.0, 0.0]

    def test_curve_commands_default_to_fermat(self, capsys):
        code, out, _ = run(capsys, "stratum", "--m", "3", "--flex-index", "4")
        assert code == 0 and json.loads(out)["outputs"]["size"] == 72
        code, out, _ = run(capsys, "flexes")
        assert code == 0 and len(json.loads(out)["outputs"]["flexes"]) == 9

    def test_seed_from_environment(self, capsys, monkeypatch):
        monkeypatch.setenv("CML_SEED", "1234")
        _, out, _ = run(capsys, "jordan", "--m", "4")
        assert json.loads(out)["seed"] == 1234
        _, out, _ = run(capsys, "jordan", "--m", "4", "--seed", "5")
        assert json.loads(out)["seed"] == 5

    def test_determinism(self, capsys, z4m1):
        a = run(capsys, "resolvent-d", "--poly", z4m1, "--d", "2")[1]
        b = run(capsys, "resolvent-d", "--poly", z4m1, "--d", "2")[1]
        assert strip_timing(a) == strip_timing(b)


class TestSuite:
    def test_trials_zero_rejected(self):
        with pytest.raises(ValueError):
            SuiteConfig(seed=1, trials=0)

    def test_deterministic(self):
        a = run_suite(SuiteConfig(seed=42, trials=10))
        b = run_suite(SuiteConfig(seed=42, trials=10))
        assert a.passed
        assert strip_timing(a.dumps()) == strip_timing(b.dumps())

    def test_schema_stable_across_seeds(self):
        c = run_suite(SuiteConfig(seed=1, trials=2))
        d = run_suite(SuiteConfig(seed=2, trials=2))
        assert c.passed and d.passed
        names = lambda cert: [(p["construction"], [x["name"] for x in p["checks"]]) for p in cert.outputs["properties"]]
        assert names(c) == names(d)
        assert [x.name for x in c.checks] == [p[0] for p in PROPERTIES]

    def test_parallel_matches_serial(self):
        a = run_suite(SuiteConfig(seed=9, trials=2, parallelism=1)).to_json(include_timing=False)
        b = run_suite(SuiteConfig(seed=9, trials=2, parallelism=3)).to_json(include_timing=False)
        for d in (a, b):
            d["inputs"].pop("parallelism")
            for p in d["outputs"]["properties"]:
                p["inputs"].pop("parallelism")
        assert a == b
