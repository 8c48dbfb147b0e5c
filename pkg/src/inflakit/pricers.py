"""Closed-form valuation of inflation-linked instruments.

Swap legs come straight from curve ratios; the two option pricers are
Black-style formulas whose total variances integrate piecewise-constant
factor volatilities exactly segment by segment (the factor correlation
matrix couples the three shock components).  Monte Carlo cross-checks
against the simulated three-factor model live alongside the closed forms.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import jarrow_yildirim as jy
from ._normal import norm_cdf
from ._ou import b_factor
from .curves import CurvePair
from .errors import DomainError, InputError, OrderingError
from .market import CpiSeries, inflation_reference
from .mc import McResult, PathGrid, mc_discounted_expectation


@dataclass(frozen=True)
class IndexOptionSpec:
    """Call/put on the index level: strike in index units, +1 call / -1 put."""

    strike: float
    expiry: float
    call_put: int = 1

    def __post_init__(self):
        if self.strike <= 0.0:
            raise InputError("strike must be positive")
        if self.call_put not in (1, -1):
            raise InputError("call_put must be +1 or -1")


@dataclass(frozen=True)
class InflationOptionSpec:
    """Option on the inflation rate realized between T1 and T2."""

    strike: float
    t1: float
    t2: float
    call_put: int = 1

    def __post_init__(self):
        if self.t1 >= self.t2:
            raise InputError(f"period reversed: T1={self.t1} >= T2={self.t2}")
        if 1.0 + self.strike <= 0.0:
            raise InputError("strike below -100%")
        if self.call_put not in (1, -1):
            raise InputError("call_put must be +1 or -1")


@dataclass(frozen=True)
class TipsSpec:
    """Unit-principal inflation-protected bond: real coupon per period plus
    principal at the final payment, indexed off ``base_index``."""

    coupon: float
    payment_times: np.ndarray
    base_index: float

    def __post_init__(self):
        times = np.asarray(self.payment_times, dtype=float)
        if len(times) == 0:
            raise InputError("needs at least one payment time")
        if times[0] <= 0.0 or np.any(np.diff(times) <= 0.0):
            raise InputError("payment times must be strictly increasing and positive")
        if self.base_index <= 0.0:
            raise InputError("base index must be positive")
        object.__setattr__(self, "payment_times", times)


@dataclass(frozen=True)
class FactorVols:
    """Piecewise-constant factor volatility profiles with their correlation.

    ``vol_nominal(u, T)`` and ``vol_real(u, T)`` are the zero-coupon bond
    volatility components of the two rate factors, ``vol_index(u)`` the
    index volatility; all are treated as constant on each grid segment.
    ``corr`` couples the (nominal, real, index) shocks.
    """

    grid: np.ndarray
    corr: np.ndarray
    vol_nominal: callable
    vol_real: callable
    vol_index: callable

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        corr = np.asarray(self.corr, dtype=float)
        if len(grid) < 2 or np.any(np.diff(grid) <= 0.0):
            raise InputError("grid must be increasing with at least two points")
        if corr.shape != (3, 3) or np.max(np.abs(corr - corr.T)) > 1e-12:
            raise InputError("correlation must be a symmetric 3x3 matrix")
        if np.max(np.abs(np.diag(corr) - 1.0)) > 1e-12:
            raise InputError("correlation diagonal must be 1")
        if np.min(np.linalg.eigvalsh(corr)) < -1e-10:
            raise DomainError("correlation matrix is not positive semi-definite")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "corr", corr)

    @classmethod
    def from_jy(cls, p: jy.JyParams, horizon, n_segments=256):
        """Volatility mapping of the three-factor model on a uniform grid."""
        grid = np.linspace(0.0, horizon, n_segments + 1)
        return cls(
            grid=grid,
            corr=p.correlation(),
            vol_nominal=lambda u, T: -p.sigma_n * b_factor(p.a_n, T - u),
            vol_real=lambda u, T: -p.sigma_r * b_factor(p.a_r, T - u),
            vol_index=lambda u: p.sigma_i,
        )

    def _loading(self, u, maturity):
        # components of the forward-index volatility on the three shocks
        return np.array(
            [
                self.vol_nominal(u, maturity),
                -self.vol_real(u, maturity),
                -self.vol_index(u),
            ]
        )

    def _integral(self, f1, f2, t0, t1, extra_breaks=()):
        # exact for integrands constant on each segment (midpoint sampling)
        if t1 < t0:
            raise OrderingError(f"integration range reversed: [{t0}, {t1}]")
        edges = [t0]
        for u in sorted(set(self.grid) | set(extra_breaks)):
            if t0 < u < t1:
                edges.append(float(u))
        edges.append(t1)
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            if b <= a:
                continue
            u = 0.5 * (a + b)
            total += float(f1(u) @ self.corr @ f2(u)) * (b - a)
        return total

    def total_variance(self, t, maturity):
        """V(t, T)^2 of the forward index value."""
        f = lambda u: self._loading(u, maturity)  # noqa: E731
        v2 = self._integral(f, f, t, maturity)
        if v2 < -1e-14:
            raise DomainError(f"negative total variance {v2}")
        return max(v2, 0.0)

    def period_variance(self, t, t1, t2):
        """Total variance of the period index ratio I(T2)/I(T1).

        The first-period leg switches off after T1 (indicator inside the
        integrand), so T1 is an integration breakpoint.
        """

        def g(u):
            v = self._loading(u, t2)
            if u < t1:
                v = v - self._loading(u, t1)
            return v

        v2 = self._integral(g, g, t, t2, extra_breaks=(t1,))
        if v2 < -1e-14:
            raise DomainError(f"negative period variance {v2}")
        return max(v2, 0.0)

    def period_drift_adjustment(self, t, t1, t2):
        """The exponent correcting the period forward for measure effects."""
        f1 = lambda u: self._loading(u, t1)  # noqa: E731

        def f2(u):
            return np.array(
                [
                    self.vol_nominal(u, t1),
                    -self.vol_real(u, t2),
                    -self.vol_index(u),
                ]
            )

        return self.total_variance(t, t1) - self._integral(f1, f2, t, t1)


class SwapLegs(NamedTuple):
    pv_fixed: float
    pv_float: float
    fair_strike: float


def zciis_price(pair: CurvePair, maturity, strike, notional=1.0, t=0.0):
    """Zero-coupon inflation swap: single exchange at maturity.

    The float leg pays realized index growth, worth P_r - P_n per unit
    notional; the fixed leg pays the compounded strike.  The fair strike
    makes the two equal: (P_r / P_n)^(1/(T-t)) - 1.
    """
    if maturity <= t:
        raise OrderingError(f"maturity {maturity} not after valuation {t}")
    span = maturity - t
    p_n = pair.nominal.discount_factor(t, maturity)
    p_r = pair.real.discount_factor(t, maturity)
    pv_float = notional * (p_r - p_n)
    pv_fixed = notional * ((1.0 + strike) ** span - 1.0) * p_n
    fair = (p_r / p_n) ** (1.0 / span) - 1.0
    return SwapLegs(pv_fixed, pv_float, fair)


def yyiis_price(pair: CurvePair, schedule, strike, notional=1.0, t=0.0):
    """Year-on-year swap under the deterministic-forward approximation.

    Each period's floating payment is valued at the forward inflation
    rate with zero convexity adjustment; ``yyiis_mc_price`` quantifies
    the gap against the simulated model.
    """
    times = [float(x) for x in schedule]
    if not times or any(b <= a for a, b in zip(times, times[1:])):
        raise OrderingError("schedule must be strictly increasing")
    if times[0] <= t:
        raise OrderingError("first schedule date must be after valuation")
    prev = t
    pv_float = 0.0
    annuity = 0.0
    for t_k in times:
        df = pair.nominal.discount_factor(t, t_k)
        pv_float += df * pair.forward_inflation_rate(prev, t_k)
        annuity += df
        prev = t_k
    pv_float *= notional
    pv_fixed = notional * strike * annuity
    fair = pv_float / (notional * annuity)
    return SwapLegs(pv_fixed, pv_float, fair)


def yyiis_mc_price(p: jy.JyParams, pair: CurvePair, schedule, strike,
                   notional=1.0, n_paths=20_000, seed=0, steps_per_period=16):
    """Monte Carlo value of the floating leg under the three-factor model."""
    times = [float(x) for x in schedule]
    grid = PathGrid(0.0, times[-1], steps_per_period * len(times))
    paths = jy.simulate(p, jy.initial_state(pair), grid, seed, n_paths)
    widths = np.diff(paths.times)
    increments = (paths.r_n[:, :-1] + paths.r_n[:, 1:]) * 0.5 * widths
    cum_discount = np.exp(-np.cumsum(increments, axis=1))
    sample = np.zeros(n_paths)
    prev_idx = 0
    for t_k in times:
        idx = int(round(t_k / grid.dt))
        if abs(idx * grid.dt - t_k) > 1e-9:
            raise InputError(f"schedule point {t_k} not on the simulation grid")
        ratio = paths.index[:, idx] / paths.index[:, prev_idx]
        sample += cum_discount[:, idx - 1] * (ratio - 1.0)
        prev_idx = idx
    sample *= notional
    return mc_discounted_expectation(sample, lambda v: v, seed=seed)


def tips_dirty_price(spec: TipsSpec, pair: CurvePair, series: CpiSeries,
                     valuation_date):
    """Real and nominal dirty prices per unit of real principal.

    The real price discounts coupons plus final principal on the real
    curve; the nominal price scales it by the indexation ratio of the
    interpolated reference index to the issue base.
    """
    dfs = [pair.real.discount_factor(0.0, t) for t in spec.payment_times]
    real_price = spec.coupon * sum(dfs) + dfs[-1]
    ref = inflation_reference(series, valuation_date)
    nominal_price = ref / spec.base_index * real_price
    return real_price, nominal_price


def _black_value(asset_leg, cash_leg, total_vol, call_put):
    if total_vol < 0.0:
        raise DomainError(f"negative volatility {total_vol}")
    if total_vol < 1e-12:
        return max(call_put * (asset_leg - cash_leg), 0.0)
    h1 = (math.log(asset_leg / cash_leg) + 0.5 * total_vol**2) / total_vol
    h2 = h1 - total_vol
    return call_put * (
        asset_leg * norm_cdf(call_put * h1) - cash_leg * norm_cdf(call_put * h2)
    )


def index_option_price_with_variance(spec: IndexOptionSpec, pair: CurvePair,
                                     total_variance, t=0.0):
    """Index option value given the total variance directly."""
    if total_variance < 0.0:
        raise DomainError(f"negative total variance {total_variance}")
    p_n = pair.nominal.discount_factor(t, spec.expiry)
    p_r = pair.real.discount_factor(t, spec.expiry)
    return _black_value(
        pair.spot_index * p_r,
        spec.strike * p_n,
        math.sqrt(total_variance),
        spec.call_put,
    )


def index_option_price(spec: IndexOptionSpec, pair: CurvePair, vols: FactorVols,
                       t=0.0):
    """Black-style value of a call/put on the index level at expiry."""
    return index_option_price_with_variance(
        spec, pair, vols.total_variance(t, spec.expiry), t
    )


def inflation_option_price(spec: InflationOptionSpec, pair: CurvePair,
                           vols: FactorVols, t=0.0):
    """Value of an option on the inflation rate realized over (T1, T2).

    The payoff at T2 is max(cp * (I(T2)/I(T1) - 1 - K), 0); the forward
    of the period ratio carries a drift adjustment from valuing a T1
    quantity at T2.
    """
    p_n2 = pair.nominal.discount_factor(t, spec.t2)
    forward_ratio = (
        pair.real.discount_factor(t, spec.t2)
        * pair.nominal.discount_factor(t, spec.t1)
        / (p_n2 * pair.real.discount_factor(t, spec.t1))
    )
    omega = vols.period_drift_adjustment(t, spec.t1, spec.t2)
    k1 = forward_ratio * math.exp(omega)
    k2 = 1.0 + spec.strike
    variance = vols.period_variance(t, spec.t1, spec.t2)
    return p_n2 * _black_value(k1, k2, math.sqrt(variance), spec.call_put)


def breakeven_rate(nominal_yield, il_yield):
    """Break-even inflation: nominal yield minus matched real yield."""
    return nominal_yield - il_yield


def index_option_mc_price(p: jy.JyParams, pair: CurvePair, spec: IndexOptionSpec,
                          n_paths=100_000, seed=0, n_steps=64) -> McResult:
    """Monte Carlo value of the index option under the simulated model."""
    grid = PathGrid(0.0, spec.expiry, n_steps)
    paths = jy.simulate(p, jy.initial_state(pair), grid, seed, n_paths)
    discount = jy.pathwise_discount(paths.times, paths.r_n)
    payoff = np.maximum(spec.call_put * (paths.index[:, -1] - spec.strike), 0.0)
    return mc_discounted_expectation(discount * payoff, lambda v: v, seed=seed)
