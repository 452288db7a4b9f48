import json

import pytest

from hochlab import cli
from hochlab import generators as G
from hochlab import suites
from hochlab.hochschild import cochain_from_json, cochain_to_json, gerstenhaber_bracket
from hochlab.suites import REGISTRY, Check, ConfigError, RunConfig


def run(argv, capsys=None):
    code = cli.main(argv)
    out = capsys.readouterr().out if capsys else None
    return code, out


def test_flags_override_config_file(tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"seed": 7, "hbar_order": 4, "obstruction_D": 4, "obstruction_Dpairs": 6}))
    args = cli.make_parser().parse_args(["star", "--config", str(cfg_file), "--seed", "9"])
    cfg = cli.build_config(args, "star")
    assert cfg.seed == 9 and cfg.hbar_order == 4 and cfg.obstruction_D == 4 and cfg.suite == "star"


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"bogus": 1})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"theta": [["0", "1"], ["1", "0"]]})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"obstruction_D": 4, "obstruction_Dpairs": 7})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"dim": 3, "theta": [["0", "1"], ["-1", "0"]]})
    assert RunConfig.from_dict({"theta": [["0", "1/2"], ["-1/2", "0"]]}).theta == [["0", "1/2"], ["-1/2", "0"]]


def test_config_errors_exit_2(tmp_path, capsys):
    assert cli.main(["star", "--theta", '[["0","1"],["1","0"]]']) == 2
    assert cli.main(["star", "--config", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["obstruction", "--D", "4", "--Dpairs", "7"]) == 2
    assert cli.main(["no-such-suite"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert cli.main(["star", "--config", str(bad)]) == 2
    assert cli.main(["verify-witness", str(tmp_path / "missing.json")]) == 2


def test_identities_deterministic(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        assert cli.main(["identities", "--seed", "3", "--scale", "0.1", "--format", "json", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    report = json.loads(outs[0])
    assert report["schema"] == suites.REPORT_SCHEMA
    assert report["conventions_fingerprint"] == cli.conventions_fingerprint()
    assert report["config"]["seed"] == 3
    assert all(c["elapsed"] is None for s in report["suites"] for c in s["checks"])


def test_same_seed_same_result():
    a = suites.run_check(REGISTRY["identities/cup_associativity"], RunConfig(seed=1, scale=0.1))
    b = suites.run_check(REGISTRY["identities/cup_associativity"], RunConfig(seed=1, scale=0.1))
    assert a == b


def test_text_output(capsys):
    code, out = run(["identities", "--scale", "0.05"], capsys)
    assert code == 0
    assert "[PASS] identities" in out and out.rstrip().endswith("overall: PASS")


@pytest.fixture
def injected_failure(monkeypatch):
    """Register a deliberately false identity: the Gerstenhaber bracket is symmetric."""

    def sample(rng, cfg):
        return {"p": cochain_to_json(G.cochain(rng, 2, 1, 1, 2)), "q": cochain_to_json(G.cochain(rng, 2, 2, 1, 2))}

    def evaluate(p):
        P, Q = cochain_from_json(p["p"]), cochain_from_json(p["q"])
        d = gerstenhaber_bracket(P, Q) - gerstenhaber_bracket(Q, P)
        return None if d.is_zero() else "[P,Q] != [Q,P]"

    check = Check("identities", "injected_symmetric_bracket", evaluate, sample=sample, instances=5)
    monkeypatch.setitem(REGISTRY, "identities/injected_symmetric_bracket", check)
    return check


def test_failing_check_exit_1_and_witness_reverifies(tmp_path, capsys, injected_failure):
    path = tmp_path / "fail.json"
    assert cli.main(["identities", "--scale", "0.05", "--format", "json", "--out", str(path)]) == 1
    report = json.loads(path.read_text())
    assert report["status"] == "FAIL"
    failed = [c for s in report["suites"] for c in s["checks"] if c["status"] == "FAIL"]
    assert [c["check"] for c in failed] == ["injected_symmetric_bracket"]
    assert failed[0]["witness"]["defect"] == "[P,Q] != [Q,P]"
    capsys.readouterr()
    assert cli.main(["verify-witness", str(path)]) == 0
    assert "1/1 witnesses re-verified" in capsys.readouterr().out
    # a witness edited so that it no longer fails is rejected
    w = failed[0]["witness"]["payload"]
    w["q"] = w["p"]
    path.write_text(json.dumps(report))
    assert cli.main(["verify-witness", str(path)]) == 1


def test_tampered_certificate_rejected(tmp_path, capsys):
    path = tmp_path / "obs.json"
    assert cli.main(["obstruction", "--scale", "0.05", "--format", "json", "--out", str(path)]) == 0
    assert cli.main(["verify-witness", str(path)]) == 0
    report = json.loads(path.read_text())
    chk = next(c for s in report["suites"] for c in s["checks"] if c["check"] == "non_formality_certificate")
    assert chk["witness"]["status"] == "infeasible"
    chk["witness"]["witness"]["combination"][0] = "7/3"
    path.write_text(json.dumps(report))
    assert cli.main(["verify-witness", str(path)]) == 1


def test_explain_contradiction(capsys):
    code, out = run(["explain-contradiction"], capsys)
    assert code == 0
    assert "CONTRADICTION" in out and "1/2" in out and "-3/10" in out
    code, out = run(["explain-contradiction", "--D", "3", "--Dpairs", "4"], capsys)
    assert code == 0 and "no contradiction at these bounds" in out
    code, out = run(["explain-contradiction", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 0 and data["contradiction"] is True and data["steps"][-1]["step"] == "contradiction"
    assert cli.main(["explain-contradiction", "--dim", "3"]) == 2
