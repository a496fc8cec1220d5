import json
import math
from pathlib import Path

import numpy as np
import pytest

import sparse_harmonics as sh

FIXTURES = Path(__file__).resolve().parents[2] / "fixtures"


def centers(L, left=0.0, length=1.0):
    n = 1 << L
    return left + (np.arange(n) + 0.5) * length / n


def test_hilbert_indicator_closed_form():
    L, left, length = 12, -1.0, 4.0
    x = centers(L, left, length)
    h = length / (1 << L)
    chi = ((x > 0) & (x < 1)).astype(float)
    H = sh.hilbert_transform(chi, left, length)
    exact = np.log(np.abs(x / (x - 1))) / math.pi
    keep = (np.abs(x) > 8 * h) & (np.abs(x - 1) > 8 * h) & (np.abs(exact) > 1e-3)
    assert np.max(np.abs(H[keep] - exact[keep]) / np.abs(exact[keep])) < 0.02


def test_unit_weight_constants():
    one = np.ones(256)
    assert sh.ap_constant(one, 2.0) == 1.0
    assert sh.a1_constant(one) == 1.0
    assert sh.ainfty_constants(one) == (1.0, 0.5)


def test_ap_dominates_dyadic_sup():
    L, p = 6, 2.0
    w = sh.make_weight("power:0.5:-0.3333333333333333", L)
    best = 0.0
    for k in range(L + 1):
        for blk in w.reshape(1 << k, -1):
            best = max(best, blk.mean() * (blk ** (-1 / (p - 1))).mean() ** (p - 1))
    assert sh.ap_constant(w, p) >= best * (1 - 1e-12)


def test_k0_p0_example():
    p0, p0p, K0 = sh.k0_p0(2.0, 1.0, 1.0, 1)
    assert p0 == 17.0
    assert p0p == pytest.approx(17 / 16)


def test_lorentz_indicator():
    f = np.zeros(64)
    f[:16] = 1.0
    assert sh.lorentz_one(f, 2.0) == pytest.approx(2 * 0.25 ** 0.5)
    assert sh.lorentz_weak(f, 2.0) == pytest.approx(0.5)


def test_fit_recovers_model():
    t = np.geomspace(0.1, 20, 40)
    phi = 0.3 * np.exp(-2.0 * t ** 0.5)
    fit = sh.fit_exponent(t.tolist(), phi.tolist())
    assert not fit["degenerate"]
    assert fit["p"] == pytest.approx(0.5, rel=1e-2)
    assert fit["alpha"] == pytest.approx(2.0, rel=1e-2)


def test_constant_symbol_commutator_vanishes():
    f = sh.make_function("bumps:1", 8)
    out = sh.commutator("hilbert", [np.full(256, 3.0)], [f])
    assert np.all(out == 0.0)


def test_errors_map_to_python():
    with pytest.raises(sh.ParameterError):
        sh.stein_square_function(np.ones(64), 0.3)
    with pytest.raises(sh.InputError):
        sh.hilbert_transform(np.ones(100))
    with pytest.raises(sh.ConfigError):
        sh.run_config("[experiment]\nkind = cf\nbogus = 1\n")


def test_run_config_matches_golden():
    fx = FIXTURES / "cf_hilbert_power_weight"
    golden = json.loads((fx / "golden" / "report.json").read_text())
    code, reports, _ = sh.run_config(fx / "config.ini")
    assert code == golden["exit_code"]
    assert len(reports) == len(golden["reports"])
    for r, g in zip(reports, golden["reports"]):
        assert r["verdict"] == g["verdict"]
        assert r["ratio"] == pytest.approx(g["ratio"], rel=1e-9)
