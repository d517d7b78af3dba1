import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from docbin.errors import DomainError, NumericError, ShapeError
from docbin.losses import (LossWeights, bce, critic_loss, generator_loss, grad_check,
                           gradient_penalty, interpolate_samples, selftest, soft_dice)

probs = st.lists(st.floats(0.01, 0.99), min_size=1, max_size=30)


def test_bce_known_values():
    assert math.isclose(bce([0.5, 0.5], [1, 0])[0], math.log(2))
    assert math.isclose(bce([0.9], [1])[0], -math.log(0.9))


def test_bce_clamps():
    loss, grad = bce([0.0, 1.0], [1, 0], eps=1e-7)
    assert math.isfinite(loss) and np.all(np.isfinite(grad))
    assert math.isclose(loss, -math.log(1e-7), rel_tol=1e-6)


def test_soft_dice_known_values():
    assert soft_dice(np.ones(5), np.ones(5))[0] == 0.0
    # no overlap: 1 - eps / (sum p^2 + sum g^2 + eps)
    assert math.isclose(soft_dice([1, 0], [0, 1])[0], 1 - 1 / 3)


@settings(max_examples=50, deadline=None)
@given(probs, st.data())
def test_bce_gradient(p, data):
    g = data.draw(st.lists(st.sampled_from([0.0, 1.0]), min_size=len(p), max_size=len(p)))
    assert grad_check(lambda x: bce(x, g), p) < 1e-5


@settings(max_examples=50, deadline=None)
@given(probs, st.data())
def test_soft_dice_gradient(p, data):
    g = data.draw(st.lists(st.sampled_from([0.0, 1.0]), min_size=len(p), max_size=len(p)))
    assert grad_check(lambda x: soft_dice(x, g), p) < 1e-5


@settings(max_examples=50, deadline=None)
@given(probs, st.data())
def test_loss_ranges(p, data):
    g = data.draw(st.lists(st.sampled_from([0.0, 1.0]), min_size=len(p), max_size=len(p)))
    assert bce(p, g)[0] >= 0
    assert 0 <= soft_dice(p, g)[0] < 1


def test_grad_check_detects_wrong_gradient():
    f = lambda x: (float(np.sum(x ** 2)), 3 * x)
    assert grad_check(f, [1.0, 2.0]) > 0.3
    with pytest.raises(NumericError):
        grad_check(lambda x: (float("nan"), x), [1.0])
    with pytest.raises(DomainError):
        grad_check(f, [1.0], step=0)


def test_critic_cancelling_case():
    assert critic_loss([0.3, -1.2, 5.0], [0.3, -1.2, 5.0], [1.0, 1.0]) == 0.0


@pytest.mark.parametrize("n", [0.0, 0.5, 2.0, 3.0])
def test_critic_pure_penalty(n):
    w = LossWeights()
    assert critic_loss([0.0], [0.0], [n, n, n], w) == w.alpha * (n - 1) ** 2
    assert gradient_penalty([n]) == (n - 1) ** 2


def test_generator_loss_sign():
    p, g = [0.7, 0.2], [1.0, 0.0]
    pixel = bce(p, g)[0] + soft_dice(p, g)[0]
    assert math.isclose(generator_loss([2.0], p, g), -2.0 + pixel)
    assert math.isclose(generator_loss([2.0], p, g, LossWeights(adv_sign=1)), 2.0 + pixel)
    w = LossWeights(lambda1=2.0, lambda2=0.5)
    assert math.isclose(generator_loss([0.0], p, g, w),
                        2 * bce(p, g)[0] + 0.5 * soft_dice(p, g)[0])


def test_interpolate_samples():
    y, gx = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    assert interpolate_samples(y, gx, [1.0, 0.25]).tolist() == [1.0, 0.75]
    with pytest.raises(ShapeError):
        interpolate_samples(y, gx, [1.0])


def test_validation():
    with pytest.raises(DomainError):
        LossWeights(adv_sign=0)
    with pytest.raises(DomainError):
        LossWeights(alpha=-1)
    with pytest.raises(ShapeError):
        bce([0.5], [1, 0])
    with pytest.raises(DomainError):
        soft_dice([], [])
    with pytest.raises(DomainError):
        gradient_penalty([-1.0])


def test_selftest_passes():
    res = selftest(batches=20)
    assert res["passed"] and res["bce"] < 1e-5 and res["soft_dice"] < 1e-5


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.0, 5.0), min_size=1, max_size=40), st.randoms())
def test_penalty_permutation_invariant(norms, r):
    shuffled = list(norms)
    r.shuffle(shuffled)
    assert gradient_penalty(shuffled) == gradient_penalty(norms)


def test_bce_minimum_at_target():
    g = np.array([1.0, 0.0, 1.0])
    floor = bce(np.clip(g, 1e-7, 1 - 1e-7), g)[0]
    rng = np.random.default_rng(0)
    for _ in range(50):
        assert bce(rng.uniform(0, 1, 3), g)[0] > floor
    assert soft_dice([0.5, 0.5], [1.0, 0.0])[0] > 0


def test_critic_zero_scores_unit_norms():
    assert critic_loss(np.zeros(4), np.zeros(4), np.ones(4)) == 0.0
