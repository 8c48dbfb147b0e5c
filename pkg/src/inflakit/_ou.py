"""Closed-form building blocks for mean-reverting Gaussian short rates.

All functions take the reversion speed ``a`` explicitly and fall back to
series expansions near a = 0 so the zero-reversion (random-walk drift)
limit is exact rather than 0/0.
"""

import math

from .stepfun import StepFunction

# below this value of |a|*horizon the direct formulas lose precision to
# cancellation and the series branches take over
_SMALL = 1e-6


def decay(a, dt):
    return math.exp(-a * dt)


def step_variance(a, sigma, dt):
    """Variance of the exact transition over an interval of length dt."""
    if a == 0.0:
        return sigma * sigma * dt
    return sigma * sigma * (-math.expm1(-2.0 * a * dt)) / (2.0 * a)


def b_factor(a, dt):
    """B(t, t+dt) = (1 - exp(-a dt)) / a, the affine bond loading."""
    if a == 0.0:
        return dt
    return -math.expm1(-a * dt) / a


def theta_decay_integral(theta: StepFunction, a, t0, t1):
    """Integral of exp(a (u - t1)) * theta(u) over [t0, t1]."""
    total = 0.0
    for x, y, v in theta.segments(t0, t1):
        if a == 0.0:
            total += v * (y - x)
        else:
            total += v * math.exp(a * (x - t1)) * math.expm1(a * (y - x)) / a
    return total


def _g(a, tau):
    # G(tau) = (a tau + expm1(-a tau)) / a^2 = integral of B over a tail of
    # length tau; series keeps precision when a*tau is tiny
    x = a * tau
    if abs(x) < 1e-4:
        return tau * tau * (0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0)
    return (x + math.expm1(-x)) / (a * a)


def int_b(a, x, y, maturity):
    """Integral of B(u, maturity) du over [x, y] with x <= y <= maturity."""
    if a == 0.0:
        return 0.5 * ((maturity - x) ** 2 - (maturity - y) ** 2)
    return _g(a, maturity - x) - _g(a, maturity - y)


def int_b_squared(a, t, maturity):
    """Integral of B(u, maturity)^2 du over [t, maturity]."""
    dt = maturity - t
    x = a * dt
    if abs(x) < 1e-4:
        return dt**3 / 3.0 - a * dt**4 / 4.0 + 7.0 * a * a * dt**5 / 60.0
    b = b_factor(a, dt)
    return (dt - 2.0 * b + (-math.expm1(-2.0 * a * dt)) / (2.0 * a)) / (a * a)


def integrated_rate_moments(a, sigma, theta: StepFunction, r0, t, maturity):
    """Mean and variance of the integral of r(s) over [t, maturity].

    r follows dr = (theta(t) - a r) dt + sigma dW starting from r(t) = r0.
    """
    mean = r0 * b_factor(a, maturity - t)
    for x, y, v in theta.segments(t, maturity):
        mean += v * int_b(a, x, y, maturity)
    var = sigma * sigma * int_b_squared(a, t, maturity)
    return mean, var
