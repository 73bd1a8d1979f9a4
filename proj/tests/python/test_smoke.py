import math
import os

import pytest

import nltracer

CONFIGS = os.path.join(os.path.dirname(__file__), "..", "..", "configs")


def small_config(**problem):
    cfg = {
        "problem": {"t_final": 1.0, **problem},
        "numerics": {"n_x": 100, "dt": 0.01},
    }
    return cfg


def test_kernel_values():
    k = nltracer.Kernel.saturating_exponential(1.0, 0.5, 2.0)
    assert k(0.0) == pytest.approx(0.5)  # a - b
    assert k.eval(0.0, 2) == pytest.approx(-2.0)
    assert k.family == "saturating_exponential"


def test_l1_norms_exponential():
    n = nltracer.l1_norms(nltracer.Kernel.exponential_decay(1.0, 1.0))
    assert n["k_l1"] == pytest.approx(1.0, rel=1e-6)
    assert n["kp_l1"] == pytest.approx(1.0, rel=1e-6)


def test_l1_norms_saturating_diverges():
    assert nltracer.l1_norms(nltracer.Kernel.saturating_exponential(1.0, 0.5, 2.0))["k_l1"] is None


def test_lemma_closed_form():
    k = nltracer.Kernel.exponential_decay(1.0, 1.0)
    c = nltracer.lemma_constants(k, beta0=0.5, gamma=1.0)
    assert c.big_k == pytest.approx(5.0, rel=1e-6)
    r = nltracer.staffans_check(k, c, lambda t: math.exp(-t), 0.0, 40.0, 4000)
    assert r["lhs"] == pytest.approx(0.25, rel=1e-2)
    assert r["rhs"] == pytest.approx(0.625, rel=1e-2)
    assert r["holds"]


def test_condition_report_c5_witness():
    k = nltracer.Kernel.saturating_exponential(1.0, 0.5, 2.0)
    rep = nltracer.condition_report(k, 1.0)
    c5 = next(e for e in rep if e["id"] == "C5")
    assert c5["verdict"] == "fails"
    assert nltracer.max_delta_c5_prime(k) == pytest.approx(1.0)


def test_invalid_kernel_raises():
    with pytest.raises(nltracer.Error) as info:
        nltracer.Kernel.exponential_decay(-1.0, 1.0)
    assert info.value.args[0] == "InvalidArgument"


def test_simulate_direct_decays():
    out = nltracer.simulate(small_config())
    e = out["trace"]["c_norm_sq"]
    assert len(out["x"]) == 100
    assert e[-1] < e[0]
    assert nltracer.check_monotone(out["trace"]["t"], e)["holds"]


def test_simulate_memory_has_eta():
    cfg = small_config()
    cfg["numerics"].update({"s_max": 4.0, "n_s": 400})
    out = nltracer.simulate(cfg, "memory")
    assert out["trace"]["eta_norm_sq_mu"] is not None


def test_fit_decay_exact():
    t = [0.1 * i for i in range(50)]
    e = [2.0 * math.exp(-0.7 * x) for x in t]
    f = nltracer.fit_decay(t, e)
    assert f["b"] == pytest.approx(0.7)
    assert f["r_squared"] == pytest.approx(1.0)


def test_check_command_on_shipped_config():
    code, report = nltracer.check(os.path.join(CONFIGS, "theorem1.json"))
    assert code == 0
    assert report["schema"] == "nltracer.report"
    assert report["alpha0"]["alpha0"] == pytest.approx(0.4, abs=1e-6)


def test_run_command_writes_artifacts(tmp_path):
    code, report = nltracer.run(small_config(), out=tmp_path / "run")
    assert code == 0
    assert (tmp_path / "run" / "trace.csv").exists()
    assert report["runs"]["direct"]["monotone"]["holds"]


def test_malformed_config():
    with pytest.raises(nltracer.Error) as info:
        nltracer.load_config('{"problem": {"t_final": 1.0,}}')
    assert info.value.args[0] == "ParseError"
