import math
import os
import subprocess

import pytest

import fbx


def test_capacity_and_dispersion():
    assert fbx.capacity(1.0) == 0.5
    assert fbx.capacity(3.0) == 1.0
    mu, sigma, t = fbx.llr_moments(1.0)
    assert mu == 0.0
    assert sigma**2 == pytest.approx(fbx.dispersion(1.0), rel=1e-12)
    assert t == pytest.approx(1.7343, rel=1e-4)


def test_bound_reports():
    k = fbx.bound(1000, 0.1, 1.0, kind="kappa")
    assert k["kind"] == "theorem1_kappa_form"
    f = fbx.bound(1000, 0.1, 1.0)
    assert f["log_m_bound_bits"] <= k["log_m_bound_bits"]
    assert fbx.bound(1000, 0.1, 1.0, kind="normal")["constants"] is None


def test_domain_error_is_value_error():
    with pytest.raises(ValueError):
        fbx.bound(4, 0.001, 1.0, kind="finite")
    with pytest.raises(fbx.DomainError):
        fbx.capacity(-1.0)


def test_waterfill_and_parallel():
    w = fbx.waterfill([1.0, 3.0], 4.0)
    assert w["water_level"] == pytest.approx(4.0)
    assert w["powers"] == pytest.approx([3.0, 1.0])
    r = fbx.parallel_bound([1.0, 3.0], 4.0, 10000, 0.1)
    assert r["kappa_form_holds"]


def test_beta():
    beta, _, _ = fbx.beta_finite([0.5, 0.5], [0.9, 0.1], 0.5)
    assert beta == pytest.approx(0.1)
    log2_beta, _ = fbx.beta_awgn(1000, 1.0, 0.9)
    assert -log2_beta <= fbx.bound(1000, 0.1, 1.0)["log_m_bound_bits"]


def test_simulate_is_worker_invariant():
    a = fbx.simulate("adaptive", 16, 1.0, 3000, seed=4, messages=4, workers=1)
    b = fbx.simulate("adaptive", 16, 1.0, 3000, seed=4, messages=4, workers=3)
    assert a["csv"] == b["csv"]
    assert len(a["lambda_sum"]) == 3000
    assert max(a["power_residual"]) < 1e-9
    assert a["summary"]["encoder"] == "adaptive_toy"


def test_simulate_matches_cli():
    cli = os.environ.get("FBX_CLI")
    if not cli:
        pytest.skip("FBX_CLI not set")
    out = subprocess.run([cli, "simulate", "--encoder", "spherical", "--messages", "3", "--n", "8",
                          "--trials", "500", "--seed", "21"], check=True, capture_output=True, text=True)
    py = fbx.simulate("spherical", 8, 1.0, 500, seed=21, messages=3)
    assert out.stdout == py["csv"]


def test_metaconverse():
    r = fbx.metaconverse("antipodal", 4, 1.0, 100000, seed=2)
    assert r["pass"]
    assert r["log2_M"] == 1.0
    assert math.isfinite(r["log2_beta"])
