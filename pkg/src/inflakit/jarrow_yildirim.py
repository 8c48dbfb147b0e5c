"""Three-factor inflation model: nominal rate, real rate, index as FX rate.

Both rates are mean-reverting Gaussians with deterministic drift term
structures; the index compounds lognormally with the rate gap as its
risk-neutral drift.  The real rate carries the quanto adjustment
-rho_ri sigma_r sigma_i under the nominal risk-neutral measure.

Stepping is exact for the rate marginals (drift integrals in closed form
over the piecewise-constant term structures); the one approximation in
the "exact" scheme is the trapezoid of the simulated rate gap inside the
index exponent.
"""

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Union

import numpy as np

from . import _ou, kernels
from .curves import KIND_NOMINAL, KIND_REAL, DiscountCurve
from .errors import DomainError, InputError, StateError
from .mc import PathGrid, path_normals
from .stepfun import StepFunction


@dataclass(frozen=True)
class JyParams:
    """Reversions, volatilities, shock correlations and drift structures."""

    a_n: float
    a_r: float
    sigma_n: float
    sigma_r: float
    sigma_i: float
    rho_nr: float
    rho_ni: float
    rho_ri: float
    theta_n: Optional[StepFunction] = None
    theta_r: Optional[StepFunction] = None

    def __post_init__(self):
        if min(self.sigma_n, self.sigma_r, self.sigma_i) <= 0.0:
            raise InputError("volatilities must be positive")
        for name in ("rho_nr", "rho_ni", "rho_ri"):
            if abs(getattr(self, name)) > 1.0:
                raise InputError(f"{name} outside [-1, 1]")
        # fails on a non-PSD correlation matrix
        cholesky_psd(self.correlation())

    def correlation(self):
        return np.array(
            [
                [1.0, self.rho_nr, self.rho_ni],
                [self.rho_nr, 1.0, self.rho_ri],
                [self.rho_ni, self.rho_ri, 1.0],
            ]
        )


@dataclass(frozen=True)
class JyState:
    t: float
    r_n: float
    r_r: float
    index: float

    def __post_init__(self):
        if self.index <= 0.0:
            raise InputError("index level must be positive")


def _eval_at(fn_or_value, t):
    return fn_or_value(t) if callable(fn_or_value) else float(fn_or_value)


@dataclass(frozen=True)
class MarketPriceOfRisk:
    """Per-factor risk premia; zero by default (pure risk-neutral pricing)."""

    lambda_n: Union[float, Callable] = 0.0
    lambda_r: Union[float, Callable] = 0.0
    lambda_i: Union[float, Callable] = 0.0


def cholesky_psd(matrix, tol=1e-10):
    """Lower-triangular factor L with L L^T = matrix.

    Falls back to a pivoted factorization for positive-semi-definite
    inputs (e.g. a correlation of +-1), raising DomainError when the
    matrix has a negative direction.
    """
    m = np.asarray(matrix, dtype=float)
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        pass
    n = m.shape[0]
    work = m.copy()
    perm = np.arange(n)
    factor = np.zeros_like(work)
    for k in range(n):
        pivots = np.diag(work)[k:]
        j = k + int(np.argmax(pivots))
        if work[j, j] < -tol * max(1.0, np.abs(np.diag(m)).max()):
            raise DomainError("correlation matrix is not positive semi-definite")
        if work[j, j] <= tol:
            break
        work[[k, j]] = work[[j, k]]
        work[:, [k, j]] = work[:, [j, k]]
        factor[[k, j]] = factor[[j, k]]
        perm[[k, j]] = perm[[j, k]]
        factor[k, k] = math.sqrt(work[k, k])
        for i in range(k + 1, n):
            factor[i, k] = work[i, k] / factor[k, k]
        for i in range(k + 1, n):
            for j2 in range(k + 1, i + 1):
                work[i, j2] -= factor[i, k] * factor[j2, k]
                work[j2, i] = work[i, j2]
    undo = np.argsort(perm)
    out = factor[undo]
    if np.max(np.abs(out @ out.T - m)) > 1e-8:
        raise DomainError("correlation matrix is not positive semi-definite")
    return out


def correlated_increments(corr, dt, draws):
    """Brownian increments with covariance corr * dt from independent draws."""
    if dt <= 0.0:
        raise InputError("dt must be positive")
    factor = cholesky_psd(corr)
    return np.asarray(draws) @ factor.T * math.sqrt(dt)


def drift_restrictions(p: JyParams, lambdas: MarketPriceOfRisk, t, maturity,
                       vol_n=None, vol_r=None):
    """No-arbitrage forward-rate drifts and the index drift function.

    ``vol_n``/``vol_r`` are the forward-rate volatility profiles in the
    second time argument (piecewise-constant or scalars); they default to
    the flat model volatilities.  Returns (alpha_n, alpha_r, mu_index)
    where mu_index maps the current rate pair to the index drift.
    """
    if maturity < t:
        raise InputError(f"maturity {maturity} before evaluation time {t}")
    vol_n = p.sigma_n if vol_n is None else vol_n
    vol_r = p.sigma_r if vol_r is None else vol_r

    def vol_value(v, s):
        return v(s) if isinstance(v, StepFunction) else float(v)

    def vol_integral(v):
        if isinstance(v, StepFunction):
            return v.integral(t, maturity)
        return float(v) * (maturity - t)

    lam_n = _eval_at(lambdas.lambda_n, t)
    lam_r = _eval_at(lambdas.lambda_r, t)
    lam_i = _eval_at(lambdas.lambda_i, t)
    alpha_n = vol_value(vol_n, maturity) * (vol_integral(vol_n) - lam_n)
    alpha_r = vol_value(vol_r, maturity) * (
        vol_integral(vol_r) - p.sigma_i * p.rho_ri - lam_r
    )
    index_spread = p.sigma_i * lam_i

    def mu_index(r_n, r_r):
        return r_n - r_r - index_spread

    return alpha_n, alpha_r, mu_index


def _require_theta(p: JyParams, kind):
    theta = p.theta_n if kind == KIND_NOMINAL else p.theta_r
    if theta is None:
        raise StateError(f"{kind} drift term structure not fitted; run theta_fit")
    return theta


def _factor_fields(p: JyParams, kind):
    if kind == KIND_NOMINAL:
        return p.a_n, p.sigma_n
    if kind == KIND_REAL:
        return p.a_r, p.sigma_r
    raise InputError(f"no short-rate factor for curve kind {kind!r}")


def theta_fit(p: JyParams, curve: DiscountCurve) -> JyParams:
    """Fit the drift term structure so model bonds reprice the curve.

    Solves the lower-triangular system that equates the model's
    log-discount factors to the curve at every node; the result is a
    piecewise-constant theta on the curve's grid.  The curve's kind picks
    the factor, so call once per curve.
    """
    a, sigma = _factor_fields(p, curve.kind)
    nodes = curve.node_times
    r0 = curve.forward_at(0.0)
    theta = np.zeros(len(nodes))
    prev_nodes = np.concatenate(([0.0], nodes[:-1]))
    for k, t_k in enumerate(nodes):
        target = -math.log(curve.discount_factor(0.0, t_k))
        target += 0.5 * sigma * sigma * _ou.int_b_squared(a, 0.0, t_k)
        acc = r0 * _ou.b_factor(a, t_k)
        for j in range(k):
            acc += theta[j] * _ou.int_b(a, prev_nodes[j], nodes[j], t_k)
        weight = _ou.int_b(a, prev_nodes[k], t_k, t_k)
        theta[k] = (target - acc) / weight
    fitted = StepFunction(nodes, theta)
    if curve.kind == KIND_NOMINAL:
        return replace(p, theta_n=fitted)
    return replace(p, theta_r=fitted)


def zcb_reconstitution_factors(p: JyParams, kind, t, maturity):
    """(A, B) with P(t, T | r) = A exp(-B r) for the given factor."""
    if maturity < t:
        raise InputError(f"maturity {maturity} before state time {t}")
    a, sigma = _factor_fields(p, kind)
    theta = _require_theta(p, kind)
    if maturity > theta.end_time + 1e-12:
        raise DomainError(
            f"maturity {maturity} beyond fitted horizon {theta.end_time}"
        )
    mean, var = _ou.integrated_rate_moments(a, sigma, theta, 0.0, t, maturity)
    return math.exp(-mean + 0.5 * var), _ou.b_factor(a, maturity - t)


def zcb_reconstitution(p: JyParams, curve: DiscountCurve, state: JyState, maturity):
    """Zero-coupon bond price at the simulated state, affine in the rate.

    Requires the drift term structure fitted to ``curve``; at t = 0 the
    result reproduces the curve's discount factors.
    """
    factor_a, factor_b = zcb_reconstitution_factors(p, curve.kind, state.t, maturity)
    rate = state.r_n if curve.kind == KIND_NOMINAL else state.r_r
    return factor_a * math.exp(-factor_b * rate)


def initial_state(pair) -> JyState:
    """Model state at the valuation epoch implied by a curve pair."""
    return JyState(
        t=0.0,
        r_n=pair.nominal.forward_at(0.0),
        r_r=pair.real.forward_at(0.0),
        index=pair.spot_index,
    )


def _step_inputs(p: JyParams, dt):
    gain_n = p.sigma_n * math.sqrt(_ou.step_variance(p.a_n, 1.0, dt))
    gain_r = p.sigma_r * math.sqrt(_ou.step_variance(p.a_r, 1.0, dt))
    return gain_n, gain_r


def exact_step(p: JyParams, state: JyState, dt, z) -> JyState:
    """One exact-transition step given correlated increments N(0, corr dt)."""
    if dt <= 0.0:
        raise InputError("dt must be positive")
    theta_n = _require_theta(p, KIND_NOMINAL)
    theta_r = _require_theta(p, KIND_REAL)
    t0, t1 = state.t, state.t + dt
    zn, zr, zi = (float(v) for v in z)
    sq = math.sqrt(dt)
    gain_n, gain_r = _step_inputs(p, dt)
    mean_n = _ou.decay(p.a_n, dt) * state.r_n + _ou.theta_decay_integral(
        theta_n, p.a_n, t0, t1
    )
    mean_r = (
        _ou.decay(p.a_r, dt) * state.r_r
        + _ou.theta_decay_integral(theta_r, p.a_r, t0, t1)
        - p.rho_ri * p.sigma_r * p.sigma_i * _ou.b_factor(p.a_r, dt)
    )
    r_n1 = mean_n + gain_n * zn / sq
    r_r1 = mean_r + gain_r * zr / sq
    gap_integral = 0.5 * dt * ((state.r_n + r_n1) - (state.r_r + r_r1))
    index = state.index * math.exp(
        gap_integral - 0.5 * p.sigma_i**2 * dt + p.sigma_i * zi
    )
    return JyState(t1, r_n1, r_r1, index)


def euler_step(p: JyParams, state: JyState, dt, z) -> JyState:
    """First-order step; the index update is multiplicative (log-Euler) so
    the level can never be driven negative."""
    if dt <= 0.0:
        raise InputError("dt must be positive")
    theta_n = _require_theta(p, KIND_NOMINAL)
    theta_r = _require_theta(p, KIND_REAL)
    zn, zr, zi = (float(v) for v in z)
    r_n1 = state.r_n + (theta_n(state.t) - p.a_n * state.r_n) * dt + p.sigma_n * zn
    r_r1 = (
        state.r_r
        + (theta_r(state.t) - p.a_r * state.r_r - p.rho_ri * p.sigma_r * p.sigma_i) * dt
        + p.sigma_r * zr
    )
    index = state.index * math.exp(
        (state.r_n - state.r_r) * dt - 0.5 * p.sigma_i**2 * dt + p.sigma_i * zi
    )
    return JyState(state.t + dt, r_n1, r_r1, index)


@dataclass(frozen=True)
class JyPathSet:
    times: np.ndarray
    r_n: np.ndarray
    r_r: np.ndarray
    index: np.ndarray
    seed: int
    scheme: str

    @property
    def n_paths(self):
        return self.index.shape[0]


def simulate(p: JyParams, state0: JyState, grid: PathGrid, seed, n_paths,
             scheme="exact") -> JyPathSet:
    """Simulate the full system on the grid with per-path substreams."""
    if scheme not in ("exact", "euler"):
        raise InputError(f"unknown scheme {scheme!r}")
    theta_n = _require_theta(p, KIND_NOMINAL)
    theta_r = _require_theta(p, KIND_REAL)
    if grid.t0 != state0.t:
        raise InputError("grid must start at the state's time")
    dt = grid.dt
    times = grid.times()
    draws = path_normals(seed, n_paths, grid.n_steps, n_factors=3)
    zc = draws @ cholesky_psd(p.correlation()).T

    if scheme == "exact":
        adj = p.rho_ri * p.sigma_r * p.sigma_i * _ou.b_factor(p.a_r, dt)
        th_n = np.array(
            [
                _ou.theta_decay_integral(theta_n, p.a_n, times[s], times[s + 1])
                for s in range(grid.n_steps)
            ]
        )
        th_r = np.array(
            [
                _ou.theta_decay_integral(theta_r, p.a_r, times[s], times[s + 1]) - adj
                for s in range(grid.n_steps)
            ]
        )
        gain_n, gain_r = _step_inputs(p, dt)
        r_n, r_r, index = kernels.jy_exact_paths(
            state0.r_n,
            state0.r_r,
            state0.index,
            dt,
            _ou.decay(p.a_n, dt),
            _ou.decay(p.a_r, dt),
            th_n,
            th_r,
            gain_n,
            gain_r,
            p.sigma_i,
            zc,
        )
    else:
        th_n_vals = np.array([theta_n(times[s]) for s in range(grid.n_steps)])
        th_r_vals = np.array([theta_r(times[s]) for s in range(grid.n_steps)])
        r_n, r_r, index = kernels.jy_euler_paths(
            state0.r_n,
            state0.r_r,
            state0.index,
            dt,
            p.a_n,
            p.a_r,
            p.sigma_n,
            p.sigma_r,
            p.sigma_i,
            p.rho_ri * p.sigma_r * p.sigma_i,
            th_n_vals,
            th_r_vals,
            zc,
        )
    return JyPathSet(times, r_n, r_r, index, seed, scheme)


def integrate_paths(times, values):
    """Trapezoid integral of each path over the grid."""
    widths = np.diff(np.asarray(times, dtype=float))
    return ((values[:, :-1] + values[:, 1:]) * 0.5 * widths).sum(axis=1)


def pathwise_discount(times, rate_paths):
    """exp(-integral r) per path, the Monte Carlo discount factor."""
    return np.exp(-integrate_paths(times, rate_paths))


def breakeven_variant_drifts(sigma_tips, sigma_nominal_bond, sigma_index,
                             rho_break_index, rho_nominal_index,
                             rho_nominal_break, t=0.0, maturity=None):
    """Drift terms of the break-even reformulation of the bond dynamics.

    Inputs are the TIPS bond volatility, the nominal bond volatility and
    the index volatility (scalars or callables of (t, T)), plus the three
    shock correlations.  Returns (mu_tips, mu_nominal); both vanish with
    the volatilities.
    """

    def value(v):
        if callable(v):
            return float(v(t, maturity)) if maturity is not None else float(v(t))
        return float(v)

    s_tips = value(sigma_tips)
    s_pn = value(sigma_nominal_bond)
    s_i = sigma_index(t) if callable(sigma_index) else float(sigma_index)
    mu_tips = (
        s_tips * s_tips
        - rho_break_index * s_i * s_tips
        + (rho_nominal_index * s_i - rho_nominal_break * s_tips) * s_pn
    )
    mu_nominal = (
        s_pn * s_pn
        - rho_break_index * s_i * s_pn
        + (rho_nominal_index * s_i - rho_nominal_break * s_pn) * s_tips
    )
    return mu_tips, mu_nominal
