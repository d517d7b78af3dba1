"""Objective kernels for adversarial binarization training.

The critic network is treated as a black box: these functions consume its
scores and the gradient norms measured at interpolated samples rather
than differentiating a network. Pixel losses return their analytic
gradient with respect to the predictions alongside the value.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, NumericError, ShapeError


@dataclass(frozen=True)
class LossWeights:
    """Coefficients of the generator and critic objectives.

    `adv_sign` multiplies the mean critic score of generated images in the
    generator loss: -1 is the usual adversarial direction, +1 keeps the
    term with a plus sign.
    """

    lambda1: float = 1.0
    lambda2: float = 1.0
    alpha: float = 10.0
    adv_sign: int = -1
    epsilon_bce: float = 1e-7
    epsilon_dice: float = 1.0

    def __post_init__(self):
        if self.alpha < 0:
            raise DomainError("alpha must be non-negative")
        if self.epsilon_bce <= 0 or self.epsilon_dice <= 0:
            raise DomainError("epsilons must be positive")
        if self.adv_sign not in (1, -1):
            raise DomainError("adv_sign must be +1 or -1")


def _batch(p, g):
    p = np.asarray(p, dtype=np.float64).ravel()
    g = np.asarray(g, dtype=np.float64).ravel()
    if p.size == 0:
        raise DomainError("empty batch")
    if p.shape != g.shape:
        raise ShapeError(f"prediction/target length mismatch: {p.size} vs {g.size}")
    return p, g


def bce(p, g, eps=1e-7):
    """Mean binary cross-entropy and its gradient.

    `p` is clamped to ``[eps, 1 - eps]`` first; the gradient is evaluated at
    the clamped point.
    """
    p, g = _batch(p, g)
    p = np.clip(p, eps, 1.0 - eps)
    n = p.size
    loss = -np.sum(g * np.log(p) + (1.0 - g) * np.log1p(-p)) / n
    grad = (-g / p + (1.0 - g) / (1.0 - p)) / n
    return float(loss), grad


def soft_dice(p, g, eps=1.0):
    """Soft Dice loss ``1 - (2 sum(p g) + eps) / (sum(p^2) + sum(g^2) + eps)`` and its gradient."""
    p, g = _batch(p, g)
    inter = 2.0 * np.sum(p * g) + eps
    denom = np.sum(p * p) + np.sum(g * g) + eps
    loss = 1.0 - inter / denom
    grad = -(2.0 * g * denom - inter * 2.0 * p) / (denom * denom)
    return float(loss), grad


def interpolate_samples(y, gx, eps_draws):
    """Points on the segments between real and generated samples: ``e*y + (1-e)*gx``."""
    y = np.asarray(y, dtype=np.float64)
    gx = np.asarray(gx, dtype=np.float64)
    e = np.asarray(eps_draws, dtype=np.float64)
    if y.shape != gx.shape or e.shape != y.shape:
        raise ShapeError("y, gx and eps_draws must have equal shapes")
    return e * y + (1.0 - e) * gx


def _mean(x, what):
    """Correctly rounded mean: identical inputs give back their value exactly."""
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size == 0:
        raise DomainError(f"{what} is empty")
    if not np.all(np.isfinite(x)):
        raise NumericError(f"{what} contains non-finite values")
    return float(sum(map(Fraction, x.tolist())) / x.size)


def generator_loss(d_fake, p, g, w=LossWeights()):
    """``adv_sign * mean(d_fake) + lambda1 * BCE + lambda2 * SoftDice``."""
    adv = w.adv_sign * _mean(d_fake, "d_fake")
    return (adv + w.lambda1 * bce(p, g, w.epsilon_bce)[0]
            + w.lambda2 * soft_dice(p, g, w.epsilon_dice)[0])


def gradient_penalty(grad_norms):
    """Mean squared deviation of critic gradient norms from 1."""
    norms = np.asarray(grad_norms, dtype=np.float64).ravel()
    if np.any(norms < 0):
        raise DomainError("gradient norms must be non-negative")
    return _mean((norms - 1.0) ** 2, "grad_norms")


def critic_loss(d_real, d_fake, grad_norms, w=LossWeights()):
    """``-mean(d_real) + mean(d_fake) + alpha * mean((|grad| - 1)^2)``."""
    return (-_mean(d_real, "d_real") + _mean(d_fake, "d_fake")
            + w.alpha * gradient_penalty(grad_norms))


def grad_check(f, point, step=1e-5, floor=1e-8):
    """Largest relative error between analytic and central-difference gradients.

    Parameters
    ----------
    f : callable
        Maps a 1-D float array to ``(value, gradient)``.
    point : array_like
        Where to check.
    step : float
        Central-difference step.
    floor : float
        Lower bound on the relative-error denominator.
    """
    if step <= 0:
        raise DomainError("step must be positive")
    x = np.asarray(point, dtype=np.float64).ravel().copy()
    value, analytic = f(x)
    analytic = np.asarray(analytic, dtype=np.float64).ravel()
    if not np.isfinite(value) or not np.all(np.isfinite(analytic)):
        raise NumericError("function value or gradient is not finite")
    numeric = np.empty_like(x)
    for i in range(x.size):
        orig = x[i]
        x[i] = orig + step
        hi = f(x)[0]
        x[i] = orig - step
        lo = f(x)[0]
        x[i] = orig
        if not (np.isfinite(hi) and np.isfinite(lo)):
            raise NumericError(f"non-finite function value near coordinate {i}")
        numeric[i] = (hi - lo) / (2.0 * step)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / denom))


def selftest(batches=100, seed=42, tol=1e-5):
    """Gradient-check BCE and Soft Dice on random batches.

    Returns a dict mapping each loss name to its worst relative error.
    """
    rng = np.random.default_rng(seed)
    worst = {"bce": 0.0, "soft_dice": 0.0}
    for _ in range(batches):
        n = int(rng.integers(1, 65))
        p = rng.uniform(0.01, 0.99, n)
        g = rng.integers(0, 2, n).astype(np.float64)
        worst["bce"] = max(worst["bce"], grad_check(lambda x: bce(x, g), p))
        worst["soft_dice"] = max(worst["soft_dice"], grad_check(lambda x: soft_dice(x, g), p))
    worst["passed"] = all(v < tol for k, v in worst.items())
    return worst
