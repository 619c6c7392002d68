import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from primefrac.cli import RunConfig, main
from primefrac.errors import DomainError
from primefrac.ntcore.params import PAPER_RHO


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_default(tmp_path, capsys):
    code, out, _ = run(["verify", "--out", str(tmp_path)], capsys)
    assert code == 0
    cert = json.loads((tmp_path / "certificate.json").read_text())
    assert cert["passed"] and cert["schema"] == "1"
    names = [c["name"] for c in cert["checks"]]
    assert names[:3] == ["s-identity", "s-window", "one-over-kappa-plus-one-over-rho"]
    assert "cup-fourier" in names
    assert cert["S0"]["value"] >= 0.000032113949


def test_verify_kappa_mutation(tmp_path, capsys):
    code, _, err = run(["verify", "--kappa", "1.51", "--out", str(tmp_path)], capsys)
    assert code == 1
    cert = json.loads((tmp_path / "certificate.json").read_text())
    checks = {c["name"]: c for c in cert["checks"]}
    inv = 1 / Fraction("1.51") + 1 / PAPER_RHO
    assert checks["one-over-kappa-plus-one-over-rho"]["value"] == f"{inv.numerator}/{inv.denominator}"
    assert checks["one-over-kappa-plus-one-over-rho"]["passed"]
    assert checks["s-identity"]["passed"]
    assert cert["first_failure"] == "S0-bound" and "S0-bound" in err


def test_verify_rejects_paper_theta(tmp_path, capsys):
    code, out, err = run(["verify", "--theta", "0.5", "--out", str(tmp_path)], capsys)
    assert code == 1 and "config rejected" in err
    assert not (tmp_path / "certificate.json").exists()


def test_search_theta_zero(tmp_path, capsys):
    code, out, _ = run(["search", "--mode", "demo", "--theta", "0", "--lo", "100", "--hi", "200",
                        "--out", str(tmp_path)], capsys)
    assert code == 0
    expect = [p for p in range(101, 201) if oracles.is_prime(p) and oracles.big_omega(p + 2) <= 4]
    rows = (tmp_path / "search.csv").read_text().splitlines()[1:]
    assert [int(r.split(",")[0]) for r in rows] == expect
    assert out.startswith("window (100, 200] primes 21 accepted")


def test_search_empty_window(capsys):
    code, out, _ = run(["search", "--mode", "demo", "--theta", "0.25", "--lo", "100", "--hi", "100"], capsys)
    assert code == 0 and "primes 0 accepted 0" in out


def test_search_deterministic(tmp_path, capsys):
    args = ["search", "--mode", "demo", "--theta", "0.25", "--lo", "1000", "--hi", "5000"]
    assert run(args + ["--out", str(tmp_path / "a")], capsys)[0] == 0
    assert run(args + ["--out", str(tmp_path / "b")], capsys)[0] == 0
    for name in ("search.csv", "search.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_search_precision_failure(capsys):
    code, _, err = run(["search", "--mode", "demo", "--theta", "0.25", "--lo", "100000",
                        "--hi", "100100", "--precision", "64"], capsys)
    assert code == 2 and "dropped" in err


def test_report_demo(tmp_path, capsys):
    code, _, _ = run(["report", "--mode", "demo", "--x", "10000", "--out", str(tmp_path)], capsys)
    assert code == 0
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["report"]["identity_rel_error"] < 1e-9
    assert doc["monitors"]["all_finite"]
    assert (tmp_path / "monitors.csv").read_text().startswith("monitor,instance,params")


def test_report_without_monitors(tmp_path, capsys):
    code, _, _ = run(["report", "--mode", "demo", "--x", "3000", "--no-monitors", "--out", str(tmp_path)],
                     capsys)
    assert code == 0
    doc = json.loads((tmp_path / "report.json").read_text())
    assert "monitors" not in doc and not (tmp_path / "monitors.csv").exists()
    assert doc["report"]["Psi"] >= doc["report"]["Psi1"]


def test_report_cap(capsys):
    code, _, err = run(["report", "--mode", "demo", "--x", str(10 ** 8)], capsys)
    assert code == 3 and "10000000" in err


def test_expsum_monitors_and_convergents(tmp_path, capsys):
    code, out, _ = run(["expsum-monitors", "--mode", "demo", "--out", str(tmp_path)], capsys)
    assert code == 0 and "min-sum" in out
    assert (tmp_path / "expsum_monitors.csv").exists()
    code, out, _ = run(["convergents", "--alpha", "sqrt2", "--count", "5"], capsys)
    assert code == 0
    assert [c["Q"] for c in json.loads(out)["convergents"]] == [1, 2, 5, 12, 29]


def test_convergents_precision_exhausted(capsys):
    code, _, err = run(["convergents", "--alpha", "sqrt2", "--count", "200", "--precision", "64"], capsys)
    assert code == 2 and "precision" in err


def test_decimal_alpha_warns(capsys):
    with pytest.warns(Warning, match="rational"):
        assert main(["convergents", "--alpha", "0.4142", "--count", "2"]) == 0


def test_config_file_and_override(tmp_path, capsys):
    cfg = RunConfig(mode="demo", theta=0.25, lo=1000, hi=3000)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_json()))
    code, out, _ = run(["search", "--config", str(path)], capsys)
    assert code == 0 and out.startswith("window (1000, 3000]")
    code, out, _ = run(["search", "--config", str(path), "--hi", "2000"], capsys)
    assert out.startswith("window (1000, 2000]")
    path.write_text(json.dumps({**cfg.to_json(), "bogus": 1}))
    assert run(["search", "--config", str(path)], capsys)[0] == 1


def test_config_validation():
    with pytest.raises(DomainError):
        RunConfig(mode="paper", theta=0.5)
    with pytest.raises(DomainError):
        RunConfig(schema="2")
    with pytest.raises(DomainError):
        RunConfig(alpha="sqrt3")
    assert RunConfig(mode="demo", theta=0.5).theta_value == 0.5


@settings(max_examples=60, deadline=None)
@given(mode=st.sampled_from(["paper", "demo"]), alpha=st.sampled_from(["sqrt2", "golden", "pi", "3/7", "0.25"]),
       theta=st.one_of(st.none(), st.floats(1e-4, 0.006)), X=st.integers(100, 10 ** 7),
       seed=st.integers(0, 2 ** 31), monitors=st.booleans(), precision=st.integers(64, 2048),
       filt=st.sampled_from(["plain", "sieved"]))
def test_config_roundtrip(mode, alpha, theta, X, seed, monitors, precision, filt):
    cfg = RunConfig(mode=mode, alpha=alpha, theta=theta, X=X, seed=seed, monitors=monitors,
                    precision=precision, filter=filt)
    again = RunConfig.from_json(json.loads(json.dumps(cfg.to_json())))
    assert again == cfg
