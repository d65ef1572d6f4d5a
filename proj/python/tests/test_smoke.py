import json
import os
import subprocess

import pytest

import datamarket as dm


def test_thm1_worst_case():
    inst = dm.generate("thm1", n=3, epsilon=0.1)
    report = dm.analyze(inst)
    assert report["worst_wrae"] == pytest.approx(2.7, abs=1e-9)
    assert len(report["pure_equilibria"]) == 1


def test_joint_no_pne_toggles_with_alpha():
    for alpha, expect_some in [(0.25, False), (0.5, True)]:
        inst = dm.generate("joint-no-pne", k=2, alpha=alpha, a=1, b=2)
        assert bool(dm.analyze(inst)["pure_equilibria"]) == expect_some


def test_dumps_round_trip(tmp_path):
    inst = dm.generate("random-independent", n=3, k=2, alpha=0.5, seed=4)
    text = dm.dumps(inst)
    path = tmp_path / "inst.json"
    path.write_text(text)
    assert dm.dumps(dm.load(str(path))) == text


def test_parse_error_names_field():
    inst = dm.generate("thm1", n=3, epsilon=0.1)
    inst["alpha"] = 2.0
    with pytest.raises(dm.ParseError, match="alpha"):
        dm.dumps(inst)


def test_budget_error():
    inst = dm.generate("random-symmetric", n=4, k=2, seed=1)
    with pytest.raises(dm.BudgetError):
        dm.analyze(inst, budget=255)


def test_validate_all_pass():
    checks = dm.validate(dm.generate("symmetric-omega-n", n=5, epsilon=0.01))
    assert checks["passed"]
    assert all(c["passed"] for c in checks["checks"])


def test_simulate_deterministic_and_sublinear_direction():
    inst = dm.generate("random-closeness", n=3, k=3, alpha=0.5, seed=2)
    a = dm.simulate(inst, horizon=2000, seed=7, curves=True)
    b = dm.simulate(inst, horizon=2000, seed=7)
    assert a["effective_regret"] == b["effective_regret"]
    assert a["rounds"] == 2000
    assert len(a["effective_curves"]) == 3
    assert all(r >= 0 for r in a["effective_curves"][0][-1:])


def test_scripted_learner_has_zero_effective_regret():
    inst = dm.generate("random-closeness", n=3, k=3, alpha=0.5, seed=3)
    out = dm.simulate(inst, horizon=500, seed=1, learners="dominant-scripted")
    assert out["effective_regret"] == pytest.approx([0.0, 0.0, 0.0], abs=1e-9)


def test_dynamics_converges_on_symmetric():
    inst = dm.generate("random-symmetric", n=3, k=2, seed=5)
    trace = dm.best_response_dynamics(inst, start=[0, 0, 0])
    assert trace["converged"]
    assert not trace["cycle_detected"]


def test_alpha_corollary_value():
    assert dm.alpha_corollary(10**6, 4) == pytest.approx(0.9405, abs=1e-3)


def test_in_process_cli_matches_executable():
    code, out, _ = dm.run_cli(["generate", "--kind", "thm1", "-n", "3", "--epsilon", "0.1"])
    assert code == 0
    exe = os.environ.get("DATAMARKET_CLI")
    if exe:
        proc = subprocess.run([exe, "generate", "--kind", "thm1", "-n", "3",
                               "--epsilon", "0.1"], capture_output=True, text=True)
        assert proc.returncode == 0
        assert proc.stdout == out
    assert json.loads(out)["model"] == "independent"
