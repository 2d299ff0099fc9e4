import math

import numpy as np
import pytest

import gaussmlc as gm


def test_geometry_primitives():
    u = gm.normalize(np.array([3.0, 4.0]))
    assert u == pytest.approx([0.6, 0.8])

    e1 = np.array([1.0, 0.0])
    e2 = np.array([0.0, 1.0])
    assert gm.angle_between(e1, e2) == pytest.approx(math.pi / 2)

    r = gm.sphere_retract(e1, 1.0, e2)
    assert np.linalg.norm(r) == pytest.approx(1.0)

    with pytest.raises(gm.GaussMlcError):
        gm.normalize(np.zeros(2))


def test_bias_bounds_bracket_tail():
    for t in (0.0, 0.5, 1.0, 2.0):
        lo, hi = gm.halfspace_bias_bounds(t)
        q = gm.gaussian_tail(t)
        assert lo <= q <= hi


def test_sampling_is_seeded():
    a = gm.sample_gaussian(8, seed=42)
    b = gm.sample_gaussian(8, seed=42)
    assert np.array_equal(a, b)

    w = gm.normalize(np.ones(5))
    z = gm.sample_hyperplane_gaussian(w, seed=7)
    assert abs(float(np.dot(z, w))) <= 1e-9


def test_dataset_and_predictions():
    truth = gm.random_mlc(k=3, d=6, seed=1)
    x, y = gm.draw_dataset(truth, noise="none", seed=3, n=500)
    assert x.shape == (500, 6)
    for row, label in zip(x, y):
        assert gm.mlc_predict(truth, row) == label

    assert gm.hard_instance_predict(3, np.array([-1.0, 0.5, 1.0, 0.0])) == 2


def test_train_aggregate_smoke():
    truth = gm.random_mlc(k=2, d=8, seed=5)
    out = gm.train_aggregate(
        truth,
        learner="init",
        source_seed=11,
        epsilon=0.2,
        seed=9,
        t_override=500,
        sel_override=3000,
    )
    pairs = out["pairs"]
    assert pairs.shape == (1, 8)
    x, y = gm.draw_dataset(truth, seed=777, n=4000)
    wrong = sum(gm.pseudo_predict(2, pairs, row) != label for row, label in zip(x, y))
    assert wrong / len(y) <= 0.05


def test_geometry_estimators():
    rows = np.array([[1.0, 0.0], [-0.5, math.sqrt(3) / 2], [-0.5, -math.sqrt(3) / 2]])
    theta, phi = gm.critical_angle(rows, 1, 2)
    assert theta == pytest.approx(math.pi / 3, abs=1e-9)
    assert phi == pytest.approx(1.0)

    t_hat, ci = gm.boundary_mass(rows, 1, 2, n_mc=20000, seed=3)
    assert abs(t_hat - 0.5) <= ci


def test_lemma_checks():
    w = gm.normalize(np.ones(6))
    lhs, rhs, ok = gm.correlation_bound_check(w, n_mc=50000, seed=2)
    assert ok
    assert lhs == pytest.approx(1.0 / math.sqrt(2 * math.pi), abs=0.01)
