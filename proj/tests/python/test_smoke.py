import json
import os
import subprocess
from fractions import Fraction
from pathlib import Path

import pytest

import diffusion_factor as df

ROOT = Path(__file__).resolve().parents[2]
SCHEMA = Path(os.environ.get("DIFFUSION_FACTOR_SCHEMA", ROOT / "schemas" / "run_record.json"))


def test_example_33():
    out = df.factor(33, 5)
    assert out["divisor"] == 11
    assert out["path"] == "step3"
    assert out["trace"]["witness"]["q"] == 15
    assert out["trace"]["x"] == 23


def test_example_1363():
    out = df.factor(1363, 991)
    assert (out["divisor"], out["trace"]["r_b"], out["trace"]["r_a"]) == (47, 161, 322)
    assert out["ledger"]["matrix_applications"] == 347
    early = df.factor(1363, 991, mode="early")
    assert early["ledger"]["diffusion_steps"] == 36


def test_order_and_walk():
    res = df.find_order(944, 1363, shortcut=False)
    assert res["order"] == 161
    assert res["ledger"]["measurements"] == 1
    labels, probs = df.walk(944, 1363, df.required_steps(1363))
    assert len(labels) == 161 and labels[0] == 1
    assert abs(sum(probs) - 1) < 1e-12
    assert abs(probs[0] - 1 / 161) < 1 / 1363**2
    assert df.order_bruteforce(944, 1363) == 161


def test_big_exponent():
    # Fermat with an exponent far beyond 64 bits
    p = 1_000_000_007
    assert df.mod_pow(3, (p - 1) << 200, p) == 1
    assert df.mod_pow(2, 2**64, 1363) == pow(2, 2**64, 1363)
    with pytest.raises(ValueError):
        df.mod_pow(2, -1, 33)


def test_spectrum():
    lam, star = df.spectrum(161, 11)
    assert len(lam) == 161 and lam[0] == pytest.approx(1.0)
    assert star < 1 - 1 / 24
    assert df.spectral_probability(5, 6, 1, 0) == pytest.approx(0.5)


def test_success_rate_exact():
    s = df.success_rate(33)
    assert s["bound"] == Fraction(1, 4)
    assert s["rate_over_units"] >= s["bound"]
    assert sum(s["histogram"].values()) == 33
    assert df.p_success(3) == Fraction(1, 2)


def test_errors():
    with pytest.raises(df.DiffusionError, match="prime power: 7\\^2"):
        df.factor(49, 2)
    with pytest.raises(df.DiffusionError, match="NotAUnit"):
        df.find_order(3, 33)
    assert df.screen(49) == "prime power: 7^2"
    assert df.factorize(1363) == [(29, 1), (47, 1)]


def test_in_process_cli_matches_schema():
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads(SCHEMA.read_text())
    for args in (
        ["factor", "33", "--a", "5"],
        ["factor", "33", "--a", "32"],
        ["factor", "1363", "--seed", "9"],
        ["order", "1363", "944", "--mode", "early"],
        ["order", "33", "1"],
        ["spectrum", "3", "6", "--verify-bound"],
        ["success-rate", "35"],
    ):
        code, out, _ = df.main(args + ["--json"])
        assert code in (0, 2)
        record = json.loads(out)
        jsonschema.validate(record, schema)
        assert df.main(args + ["--json"])[1] == out


@pytest.mark.skipif("DIFFUSION_FACTOR_CLI" not in os.environ, reason="CLI binary path not set")
def test_binary_exit_codes(tmp_path):
    exe = os.environ["DIFFUSION_FACTOR_CLI"]
    ok = subprocess.run([exe, "factor", "1363", "--a", "991", "--json"], capture_output=True, text=True)
    assert ok.returncode == 0
    assert json.loads(ok.stdout)["outcome"]["divisor"] == 47
    bad = subprocess.run([exe, "factor", "49"], capture_output=True, text=True)
    assert bad.returncode == 1
    assert "prime power: 7^2" in bad.stderr
    csv = tmp_path / "p25.csv"
    run = subprocess.run([exe, "order", "1363", "944", "--mode", "early", "--emit-probs", str(csv)])
    assert run.returncode == 0
    rows = csv.read_text().splitlines()
    assert rows[0] == "vertex,residue,probability,reciprocal"
    assert all(160 < float(r.split(",")[3]) < 162 for r in rows[1:])
