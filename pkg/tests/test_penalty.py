import math

import numpy as np
import pytest

from coxmic import (MicPenalty, beta_from_gamma, mic_objective,
                    mic_objective_grad, partial_loglik, tanh_weight)
from coxmic.errors import ValidationError
from coxmic.penalty import mic_value_and_grad, reparam_jacobian

from conftest import fd_gradient, naive_loglik, random_dataset


def test_weight_at_zero():
    for a in (0.5, 1.0, 111.0, 1e6):
        assert tanh_weight(0.0, a) == 0.0


def test_weight_saturates():
    assert 1.0 - tanh_weight(1.0, 111.0) < 1e-15


def test_weight_matches_elementary_function():
    assert abs(tanh_weight(1.0, 1.0) - math.tanh(1.0)) < 1e-12
    assert abs(tanh_weight(1.0, 1.0) - 0.761594) < 1e-6


def test_weight_even_and_monotone():
    rng = np.random.default_rng(2)
    g = rng.normal(size=50)
    assert np.allclose(tanh_weight(g, 3.0), tanh_weight(-g, 3.0))
    grid = np.linspace(0.0, 2.0, 101)
    vals = tanh_weight(grid, 3.0)
    assert (np.diff(vals) > 0).all()


def test_beta_from_gamma_basics():
    assert np.all(beta_from_gamma(np.zeros(4), 111.0) == 0.0)
    # saturated coordinate: beta equals gamma to 4 decimals
    assert abs(beta_from_gamma(0.3309, 111.0) - 0.3309) < 5e-5
    rng = np.random.default_rng(3)
    g = rng.normal(size=20)
    assert np.allclose(beta_from_gamma(-g, 7.0), -beta_from_gamma(g, 7.0))


def test_beta_zero_iff_gamma_zero():
    g = np.array([0.0, 1e-9, -1e-7, 0.5])
    b = beta_from_gamma(g, 111.0)
    assert np.array_equal(b == 0.0, g == 0.0)


def test_penalty_defaults():
    pen = MicPenalty.bic(111)
    assert pen.a == 111.0
    assert abs(pen.lambda0 - math.log(111)) < 1e-15
    assert MicPenalty.aic(111).lambda0 == 2.0
    assert MicPenalty.custom(3.5, 111, a=50.0) == MicPenalty(a=50.0, lambda0=3.5)
    with pytest.raises(ValidationError):
        MicPenalty(a=0.0, lambda0=1.0)
    with pytest.raises(ValidationError):
        MicPenalty(a=1.0, lambda0=-1.0)


def test_objective_at_zero_is_minus_twice_loglik():
    rng = np.random.default_rng(5)
    ds = random_dataset(rng, 20, 3)
    pen = MicPenalty.bic(ds.n_events)
    assert mic_objective(ds, np.zeros(3), pen) == -2.0 * partial_loglik(ds, np.zeros(3))


def test_objective_matches_brute_force_composition():
    rng = np.random.default_rng(7)
    ds = random_dataset(rng, 20, 3, with_ties=True)
    pen = MicPenalty.bic(ds.n_events)
    g = rng.normal(size=3) * 0.6
    direct = (-2.0 * naive_loglik(ds, beta_from_gamma(g, pen.a))
              + pen.lambda0 * float(np.sum(np.tanh(pen.a * g * g))))
    assert abs(mic_objective(ds, g, pen) - direct) <= 1e-10 * abs(direct)


def test_objective_bounds():
    rng = np.random.default_rng(9)
    ds = random_dataset(rng, 25, 4)
    pen = MicPenalty.bic(ds.n_events)
    for _ in range(25):
        g = rng.normal(size=4)
        fit_term = -2.0 * partial_loglik(ds, beta_from_gamma(g, pen.a))
        q = mic_objective(ds, g, pen)
        assert q >= fit_term - 1e-12
        assert q <= fit_term + pen.lambda0 * ds.p + 1e-12


def test_gradient_zero_at_origin():
    rng = np.random.default_rng(13)
    ds = random_dataset(rng, 20, 3)
    pen = MicPenalty.bic(ds.n_events)
    assert np.array_equal(mic_objective_grad(ds, np.zeros(3), pen), np.zeros(3))


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(17)
    checked = 0
    while checked < 100:
        ds = random_dataset(rng, int(rng.integers(10, 40)), int(rng.integers(1, 5)))
        pen = MicPenalty(a=float(rng.uniform(1.0, 30.0)),
                         lambda0=float(rng.uniform(0.5, 6.0)))
        g = rng.uniform(-0.8, 0.8, size=ds.p)
        an = mic_objective_grad(ds, g, pen)
        fd = fd_gradient(lambda v: mic_objective(ds, v, pen), g, h=1e-6)
        assert np.max(np.abs(an - fd) / (1.0 + np.abs(fd))) < 1e-5
        checked += 1


def test_saturated_coordinate_limits():
    jac = reparam_jacobian(np.array([1.0]), 111.0)
    assert abs(jac[0] - 1.0) < 1e-12
    pen = MicPenalty(a=111.0, lambda0=math.log(111))
    from coxmic.penalty import _penalty_grad
    assert abs(_penalty_grad(np.array([1.0]), 111.0, pen.lambda0)[0]) < 1e-12


def test_extreme_gamma_stays_finite():
    g = np.array([1e200, -1e200, 0.0])
    assert np.isfinite(reparam_jacobian(g, 111.0)).all()
    from coxmic.penalty import _penalty_grad
    assert np.isfinite(_penalty_grad(g, 111.0, 4.7)).all()


def test_penalty_sum_monotone_under_coordinate_growth():
    rng = np.random.default_rng(19)
    for _ in range(25):
        g = rng.normal(size=5)
        bigger = g * rng.uniform(1.0, 3.0, size=5)
        a = float(rng.uniform(0.5, 50.0))
        assert (np.sum(tanh_weight(bigger, a))
                >= np.sum(tanh_weight(g, a)) - 1e-12)


def test_value_and_grad_consistent():
    rng = np.random.default_rng(21)
    ds = random_dataset(rng, 20, 3)
    pen = MicPenalty.bic(ds.n_events)
    g = rng.normal(size=3) * 0.4
    v, grad = mic_value_and_grad(ds, g, pen)
    assert v == mic_objective(ds, g, pen)
    assert np.array_equal(grad, mic_objective_grad(ds, g, pen))
