"""One-factor short-rate family and the Merton structural credit model.

The family is parameterized the Hull-White way: a mean reversion, a
volatility and a deterministic drift term structure, with a transform tag
(identity / sqrt / log) selecting the family member.  Zero reversion
gives the random-walk-with-drift special case; transitions then use the
closed-form limits rather than dividing by a.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import _ou, kernels
from .errors import (
    CalibrationError,
    DomainError,
    InputError,
    SpecificationError,
)
from ._normal import norm_cdf
from .mc import PathGrid, PathSet, SdeSpec, path_normals
from .stepfun import StepFunction

IDENTITY = "identity"
SQRT = "sqrt"
LOG = "log"
_TRANSFORMS = (IDENTITY, SQRT, LOG)


@dataclass(frozen=True)
class VasicekParams:
    """dr = a (b - r) dt + sigma dW with a > 0."""

    a: float
    b: float
    sigma: float

    def __post_init__(self):
        if self.a <= 0.0:
            raise InputError("reversion speed must be positive")
        if self.sigma <= 0.0:
            raise InputError("volatility must be positive")


def vasicek_transition_moments(p: VasicekParams, r0, t):
    """Mean and variance of r(t) given r(0); t -> inf gives (b, sigma^2/2a)."""
    if t <= 0.0:
        raise InputError("horizon must be positive")
    decay = math.exp(-p.a * t)
    mean = decay * r0 + p.b * (1.0 - decay)
    variance = _ou.step_variance(p.a, p.sigma, t)
    return mean, variance


@dataclass(frozen=True)
class HullWhiteParams:
    """d f(r) = [theta(t) - a f(r)] dt + sigma dW, f tagged by ``transform``."""

    a: float
    sigma: float
    theta: StepFunction
    transform: str = IDENTITY

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise InputError("volatility must be positive")
        if self.transform not in _TRANSFORMS:
            raise InputError(f"unknown transform {self.transform!r}")

    @classmethod
    def constant_theta(cls, a, sigma, theta_value, horizon, transform=IDENTITY):
        return cls(a, sigma, StepFunction.constant(theta_value, horizon), transform)


def hull_white_transition_moments(p: HullWhiteParams, r0, t0, t1):
    """Exact Gaussian transition moments of the identity-transform state."""
    if t1 <= t0:
        raise InputError(f"times out of order: {t0} >= {t1}")
    dt = t1 - t0
    mean = _ou.decay(p.a, dt) * r0 + _ou.theta_decay_integral(p.theta, p.a, t0, t1)
    variance = _ou.step_variance(p.a, p.sigma, dt)
    return mean, variance


def hull_white_exact_step(p: HullWhiteParams, r0, t0, t1, normal_draw):
    """Sample the exact Gaussian transition from t0 to t1.

    The drift integral is closed-form over the piecewise-constant theta;
    a = 0 reduces to the Ho-Lee case with variance sigma^2 (t1 - t0).
    """
    if p.transform != IDENTITY:
        raise SpecificationError("exact stepping applies to the identity transform")
    mean, variance = hull_white_transition_moments(p, r0, t0, t1)
    return mean + math.sqrt(variance) * normal_draw


def transform_state(p: HullWhiteParams, r):
    """Map a rate into the transformed coordinate the SDE evolves in."""
    if p.transform == IDENTITY:
        return float(r)
    if r <= 0.0:
        raise DomainError(
            f"rate {r} outside the domain of the {p.transform} transform"
        )
    return math.sqrt(r) if p.transform == SQRT else math.log(r)


def untransform_state(p: HullWhiteParams, y):
    if p.transform == IDENTITY:
        return float(y)
    return y * y if p.transform == SQRT else math.exp(y)


def shortrate_sde_spec(p: HullWhiteParams) -> SdeSpec:
    """Drift/diffusion of the transformed coordinate for the generic engine."""
    theta = p.theta
    a = p.a
    sigma = p.sigma
    return SdeSpec(
        drift=lambda t, y: theta(t) - a * y,
        diffusion=lambda t, y: sigma * np.ones_like(y) if np.ndim(y) else sigma,
        diffusion_x=lambda t, y: np.zeros_like(y) if np.ndim(y) else 0.0,
    )


def simulate_hull_white(p: HullWhiteParams, r0, grid: PathGrid, seed, n_paths):
    """Exact-transition paths of the identity-transform model."""
    if p.transform != IDENTITY:
        raise SpecificationError("exact simulation applies to the identity transform")
    dt = grid.dt
    times = grid.times()
    theta_means = np.array(
        [
            _ou.theta_decay_integral(p.theta, p.a, times[s], times[s + 1])
            for s in range(grid.n_steps)
        ]
    )
    noise = math.sqrt(_ou.step_variance(p.a, p.sigma, dt))
    z = path_normals(seed, n_paths, grid.n_steps)
    values = kernels.ou_exact_paths(float(r0), _ou.decay(p.a, dt), theta_means, noise, z)
    return PathSet(times, values, seed, "exact")


@dataclass(frozen=True)
class CirParams:
    """dX = (theta1 - theta2 X) dt + theta3 sqrt(X) dW, all parameters > 0."""

    theta1: float
    theta2: float
    theta3: float

    def __post_init__(self):
        if min(self.theta1, self.theta2, self.theta3) <= 0.0:
            raise InputError("CIR parameters must all be positive")

    @property
    def feller_satisfied(self):
        return 2.0 * self.theta1 > self.theta3**2

    @property
    def long_run_mean(self):
        return self.theta1 / self.theta2


def cir_step(p: CirParams, x0, dt, normal_draw):
    """Truncated Euler step; the reported state is clamped at zero so the
    next step's coefficients see a non-negative argument and no NaN can
    propagate."""
    if x0 < 0.0:
        raise InputError("state must be non-negative")
    if dt <= 0.0:
        raise InputError("dt must be positive")
    x1 = (
        x0
        + (p.theta1 - p.theta2 * x0) * dt
        + p.theta3 * math.sqrt(x0) * math.sqrt(dt) * normal_draw
    )
    return max(x1, 0.0)


def simulate_cir(p: CirParams, x0, grid: PathGrid, seed, n_paths):
    z = path_normals(seed, n_paths, grid.n_steps)
    values = kernels.cir_paths(
        float(x0), p.theta1, p.theta2, p.theta3, grid.dt, z
    )
    return PathSet(grid.times(), values, seed, "euler")


@dataclass(frozen=True)
class MertonStructuralInputs:
    """Firm-value inputs: assets V, liability threshold L, horizon dT."""

    asset_value: float
    liability: float
    rate: float
    sigma_assets: float
    horizon: float
    drift_assets: float = 0.0

    def __post_init__(self):
        if min(self.asset_value, self.liability, self.sigma_assets, self.horizon) <= 0.0:
            raise InputError("V, L, sigma_V and dT must all be positive")


def merton_equity_value(m: MertonStructuralInputs):
    """Equity as a call on assets: E = V N(d1) - L e^{-r dT} N(d2)."""
    sig_rt = m.sigma_assets * math.sqrt(m.horizon)
    d1 = (
        math.log(m.asset_value / m.liability)
        + (m.rate + 0.5 * m.sigma_assets**2) * m.horizon
    ) / sig_rt
    d2 = d1 - sig_rt
    equity = m.asset_value * norm_cdf(d1) - m.liability * math.exp(
        -m.rate * m.horizon
    ) * norm_cdf(d2)
    return equity, d1, d2


def merton_equity_vol(m: MertonStructuralInputs):
    """sigma_E = (V / E) N(d1) sigma_V, the second calibration equation."""
    equity, d1, _ = merton_equity_value(m)
    return m.asset_value / equity * norm_cdf(d1) * m.sigma_assets


@dataclass(frozen=True)
class MertonCalibration:
    asset_value: float
    sigma_assets: float
    residual: float


def merton_calibrate(equity_obs, sigma_equity, liability, rate, horizon,
                     sigma_bracket=(1e-10, 20.0)):
    """Solve (V, sigma_V) from observed equity value and equity volatility.

    Nested 1-d root brackets: for a trial sigma_V the asset value is
    bracketed between the equity value and equity plus discounted debt
    (equity is increasing in V), then the implied equity vol closes the
    outer bracket on sigma_V.
    """
    if equity_obs <= 0.0 or sigma_equity <= 0.0:
        raise InputError("observed equity value and vol must be positive")
    debt_pv = liability * math.exp(-rate * horizon)

    def asset_for(sigma_v):
        def gap(v):
            m = MertonStructuralInputs(v, liability, rate, sigma_v, horizon)
            return merton_equity_value(m)[0] - equity_obs

        # E(V) <= V holds exactly in float arithmetic, so gap(E_obs) <= 0;
        # the discounted-debt offset bounds the root from above
        lo = equity_obs
        hi = equity_obs + debt_pv
        while gap(hi) < 0.0:
            hi *= 2.0
            if hi > 1e12 * equity_obs:
                raise CalibrationError("no asset value reproduces the equity value")
        return brentq(gap, lo, hi, xtol=1e-14, rtol=8.9e-16, maxiter=200)

    def vol_gap(sigma_v):
        v = asset_for(sigma_v)
        m = MertonStructuralInputs(v, liability, rate, sigma_v, horizon)
        return merton_equity_vol(m) - sigma_equity

    lo, hi = sigma_bracket
    g_lo, g_hi = vol_gap(lo), vol_gap(hi)
    if g_lo * g_hi > 0.0:
        raise CalibrationError(
            "no asset volatility reproduces the equity volatility "
            f"(gap at bracket ends: {g_lo:.3e}, {g_hi:.3e})",
            residual=min(abs(g_lo), abs(g_hi)),
        )
    sigma_v = brentq(vol_gap, lo, hi, xtol=1e-14, rtol=8.9e-16, maxiter=200)
    v = asset_for(sigma_v)
    m = MertonStructuralInputs(v, liability, rate, sigma_v, horizon)
    residual = math.hypot(
        merton_equity_value(m)[0] - equity_obs, merton_equity_vol(m) - sigma_equity
    )
    return MertonCalibration(v, sigma_v, residual)


def merton_default_metrics(m: MertonStructuralInputs):
    """Distance to default and default probability under the asset drift."""
    sig_rt = m.sigma_assets * math.sqrt(m.horizon)
    dd = (
        math.log(m.asset_value)
        + (m.drift_assets - 0.5 * m.sigma_assets**2) * m.horizon
        - math.log(m.liability)
    ) / sig_rt
    return dd, 1.0 - norm_cdf(dd)
