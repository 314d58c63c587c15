import json
import math
import os
import subprocess

import numpy as np
import pytest

import cascade_scope as cs


def test_parse_scales():
    s = cs.parse_scales("1e-2:1e1:40log")
    assert len(s) == 40
    assert s[0] == 1e-2 and s[-1] == 10.0
    with pytest.raises(cs.ValidationError):
        cs.parse_scales("1:2:3")


def test_cover_1d():
    rep = cs.cover(10.0, 1.0, 1, K1=3)
    assert rep["cover"]["n"] == 10
    assert rep["validity"]["valid"]
    with pytest.raises(ValueError):
        cs.cover(10.0, 0.0, 1)


def test_demo_sweep_ordering():
    rep = cs.demo_sweep([0.01, 10.0], budget=2)
    for p in rep["sweep"]["points"]:
        assert p["min"] <= p["uniform"] + 1e-12
        assert p["uniform"] <= p["max"] + 1e-12
    spread = rep["detector"]["spread"]
    assert spread[0] > 10 * spread[1]


def single_mode(n, k, amp, steps):
    x = -math.pi + (np.arange(n) + 0.5) * 2 * math.pi / n
    om = np.zeros((steps, n, n, n, 3))
    om[..., 2] = amp * np.sin(k * x)[None, :, None, None]
    return om


def test_diagnostics_scale_invariance_and_zero():
    om = single_mode(24, 4.0, 1.3, 3)
    a = cs.diagnostics(om, 1.0)
    b = cs.diagnostics(7.5 * om, 1.0)
    assert a["sigma0"] == pytest.approx(b["sigma0"], rel=1e-12)
    assert 0.5 / 4 <= a["sigma0"] <= 2.0 / 4
    z = cs.diagnostics(np.zeros_like(om), 1.0)
    assert z["sigma0"] is None and z["degenerate"]


def test_coherence_planar_field():
    n = 16
    om = np.zeros((n, n, n, 3))
    om[..., 2] = 1.0 + 0.5 * np.random.default_rng(0).random((n, n, n))
    rho, undefined = cs.coherence(om, r=1.0)
    assert rho.shape == (n, n, n)
    assert not undefined.any()
    assert np.all(rho == 0.0)
    with pytest.raises(ValueError):
        cs.coherence(np.zeros((4, 4, 3)))


def test_run_cli_in_process():
    code, out, err = cs.run_cli(["cover", "--dim", "2", "--R0", "1", "--R", "0.5"])
    assert code == 0, err
    assert json.loads(out)["validity"]["valid"]
    code, _, err = cs.run_cli(["cover", "--bogus"])
    assert code == 2


@pytest.mark.skipif("CSCOPE_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_binary(tmp_path):
    exe = os.environ["CSCOPE_CLI"]
    r = subprocess.run([exe, "diagnose", "--generator", "single_mode", "--param", "A=0", "--n", "12", "--steps", "3"],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert json.loads(r.stdout)["assumptions"]["A2"]["defined"] is False
    bad = tmp_path / "bad.csf"
    bad.write_bytes(b"garbage")
    r = subprocess.run([exe, "sweep", "--in", str(bad)], capture_output=True, text=True)
    assert r.returncode == 3
