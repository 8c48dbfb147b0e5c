"""Binomial option valuation and a forward-induction short-rate tree.

The short-rate tree has additive +-sigma sqrt(dt) moves around per-level
central rates; Arrow-Debreu state prices are rolled forward level by
level and each central rate is solved in closed form so the tree reprices
every input-curve pillar exactly (no least squares).

The drift implied by the calibration reconciles the textbook one-step
identity: for a flat curve the first drift increment equals
log(cosh(sigma sqrt(dt) dt)) / dt ~ sigma^2 dt / 2, the convexity
correction, rather than carrying the level terms some statements of the
recursion absorb into it.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .curves import DiscountCurve
from .errors import ArbitrageViolationError, InputError
from .stepfun import StepFunction


@dataclass(frozen=True)
class BinomialSpec:
    """Recombining stock tree: u = exp(sigma sqrt(T/N)) and d = 1/u."""

    sigma: float
    horizon: float
    n_steps: int
    rate: float
    s0: float

    def __post_init__(self):
        if self.sigma <= 0.0 or self.horizon <= 0.0 or self.s0 <= 0.0:
            raise InputError("sigma, horizon and s0 must be positive")
        if self.n_steps < 1:
            raise InputError("need at least one step")

    @property
    def dt(self):
        return self.horizon / self.n_steps

    @property
    def up(self):
        return math.exp(self.sigma * math.sqrt(self.dt))

    @property
    def down(self):
        return math.exp(-self.sigma * math.sqrt(self.dt))


def binomial_option_value(spec: BinomialSpec, payoff):
    """Backward-induced value of a terminal payoff under the risk-neutral
    step probability q = (e^{r dt} - d) / (u - d)."""
    u, d = spec.up, spec.down
    grow = math.exp(spec.rate * spec.dt)
    q = (grow - d) / (u - d)
    if not 0.0 <= q <= 1.0:
        raise ArbitrageViolationError(
            f"risk-neutral probability {q:.6f} outside [0, 1]"
        )
    ups = np.arange(spec.n_steps + 1)
    terminal_prices = spec.s0 * u**ups * d ** (spec.n_steps - ups)
    terminal = np.asarray(payoff(terminal_prices), dtype=float)
    if terminal.shape != terminal_prices.shape:
        raise InputError("payoff must map terminal prices to one value per node")
    return float(kernels.binomial_backward(terminal, q, 1.0 / grow))


def binomial_call_value(spec: BinomialSpec, strike):
    return binomial_option_value(spec, lambda s: np.maximum(s - strike, 0.0))


def binomial_put_value(spec: BinomialSpec, strike):
    return binomial_option_value(spec, lambda s: np.maximum(strike - s, 0.0))


@dataclass(frozen=True)
class HoLeeTreeSpec:
    """Short-rate tree calibration target: reprice the curve at every step.

    ``r0`` defaults to the rate implied by the first pillar so the first
    discount factor is matched exactly.
    """

    sigma: float
    dt: float
    target_curve: DiscountCurve
    horizon_steps: int
    r0: float = None

    def __post_init__(self):
        if self.sigma < 0.0:
            raise InputError("sigma must be non-negative")
        if self.dt <= 0.0:
            raise InputError("dt must be positive")
        if self.horizon_steps < 1:
            raise InputError("need at least one step")
        if self.horizon_steps * self.dt > self.target_curve.last_node + 1e-9:
            raise InputError("target curve does not cover the tree horizon")


@dataclass(frozen=True)
class HoLeeTree:
    """Calibrated tree: per-level central rates, drift increments and
    Arrow-Debreu state prices Q[k, j] (unit payoff at node (k, j))."""

    spec: HoLeeTreeSpec
    level_rates: np.ndarray
    theta: np.ndarray
    arrow_debreu: np.ndarray

    def node_rate(self, level, node):
        return float(
            self.level_rates[level]
            + self.spec.sigma * math.sqrt(self.spec.dt) * (2 * node - level)
        )

    def discount_factor(self, steps):
        """Tree price of the zero-coupon bond maturing after ``steps`` steps."""
        if not 1 <= steps <= self.spec.horizon_steps:
            raise InputError(f"steps must be in [1, {self.spec.horizon_steps}]")
        level = steps - 1
        total = 0.0
        for j in range(level + 1):
            total += self.arrow_debreu[level, j] * math.exp(
                -self.node_rate(level, j) * self.spec.dt
            )
        return total

    def theta_function(self):
        times = self.spec.dt * np.arange(1, len(self.theta) + 1)
        return StepFunction(times, self.theta)

    def dump_rows(self):
        """(step, node, rate, arrow_debreu) rows for the debug CSV."""
        for k in range(self.spec.horizon_steps):
            for j in range(k + 1):
                yield k, j, self.node_rate(k, j), float(self.arrow_debreu[k, j])


def ho_lee_calibrate(spec: HoLeeTreeSpec) -> HoLeeTree:
    """Forward-induction calibration to the curve's pillar discount factors."""
    targets = np.array(
        [
            spec.target_curve.discount_factor(0.0, (k + 1) * spec.dt)
            for k in range(spec.horizon_steps)
        ]
    )
    if np.any(targets <= 0.0):
        raise InputError("target discount factors must be positive")
    r0 = spec.r0
    if r0 is None:
        r0 = -math.log(targets[0]) / spec.dt
    level_rates, arrow_debreu = kernels.ho_lee_forward_induction(
        targets, spec.sigma, spec.dt, float(r0)
    )
    theta = np.diff(level_rates) / spec.dt
    return HoLeeTree(spec, level_rates, theta, arrow_debreu)


def trinomial_probability_bound(up, mid, down, rate):
    """Upper bound on the risk-neutral probability weight in a three-branch
    step; inside [0, 1] exactly when d <= 1 + R <= u."""
    if not down < mid < up:
        raise InputError(
            f"branch factors out of order: need down < mid < up, "
            f"got {down}, {mid}, {up}"
        )
    grow = 1.0 + rate
    return min((grow - down) / (mid - down), (up - grow) / (up - mid))
