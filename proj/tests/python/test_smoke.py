import json
import math

import numpy as np
import pytest

import escat


def test_wavenumbers():
    kp, ks = escat.wavenumbers(math.pi, 3.88, 2.56)
    assert kp == pytest.approx(math.pi / 3.0, rel=1e-15)
    assert ks == pytest.approx(math.pi / 1.6, rel=1e-15)


def test_bessel_wronskian():
    x = 1.7
    for n in range(6):
        w = escat.bessel_j(n + 1, x) * escat.bessel_y(n, x) \
            - escat.bessel_j(n, x) * escat.bessel_y(n + 1, x)
        assert w == pytest.approx(2.0 / (math.pi * x), rel=1e-12)


def test_hankel_is_j_plus_iy():
    h = escat.hankel1(3, 2.4)
    assert h.real == pytest.approx(escat.bessel_j(3, 2.4), rel=1e-15)
    assert h.imag == pytest.approx(escat.bessel_y(3, 2.4), rel=1e-15)


def test_disk_matrix_matches_numeric():
    s_exact = escat.disk_matrix(1.0, math.pi, 3.88, 2.56, 6)
    s_num, cond = escat.particle_matrix(1.0, 0.0, 3, 0.0, math.pi, 3.88, 2.56, 6, 96)
    assert cond < 1e9
    assert np.max(np.abs(s_exact - s_num)) < 1e-8


CONFIG = {
    "omega": math.pi,
    "lambda": 3.88,
    "mu": 2.56,
    "n_term": 8,
    "n_pts": 64,
    "incident": {"kind": "plane", "direction": 0.3},
    "particles": [
        {"center": [0.0, 0.0], "rotation": 0.0, "shape": {"a": 0.5, "b": 0.1, "c": 3}},
        {"center": [2.0, 0.4], "rotation": 1.1, "shape": {"a": 0.5, "b": 0.1, "c": 5}},
    ],
}


def test_solve_and_field():
    out = escat.solve(json.dumps(CONFIG), 1)
    assert out["iterations"] >= 1
    assert out["residual"] <= 1e-9
    pts = np.array([[5.0, 1.0], [-3.0, 2.0]])
    u = escat.total_field(json.dumps(CONFIG), out["coefficients"], pts)
    assert u.shape == (2, 2)
    assert np.all(np.isfinite(u))
    assert np.max(np.abs(u)) > 1e-3


def test_generate_deterministic():
    cfg = dict(CONFIG)
    del cfg["particles"]
    cfg["generate"] = {
        "count": 6,
        "box": [0.0, 0.0, 8.0, 8.0],
        "shapes": [{"a": 0.4, "b": 0.1, "c": 3}],
        "random_rotations": True,
    }
    a = escat.generate_config(json.dumps(cfg), 7)
    b = escat.generate_config(json.dumps(cfg), 7)
    assert a == b
    scene = json.loads(a)
    assert len(scene["particles"]) == 6


def test_unknown_key_rejected():
    bad = dict(CONFIG)
    bad["unknown_key"] = 1
    with pytest.raises(escat.ValidationError):
        escat.solve(json.dumps(bad))
