"""Discount curves as piecewise-constant instantaneous forwards.

A curve is a grid of node times and one forward per interval, so
log P(0, T) is continuous and piecewise linear.  Bootstrapping fits the
forwards to coupon-bond quotes by damped least squares.  A nominal/real
pair with a spot index level yields forward index values and break-even
forwards.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import CalibrationError, InputError, OrderingError
from .stepfun import StepFunction

KIND_NOMINAL = "nominal"
KIND_REAL = "real"
KIND_BREAKEVEN = "breakeven"


class ExtrapolationWarning(UserWarning):
    """Raised when a discount factor is requested beyond the last node."""


@dataclass(frozen=True)
class DiscountCurve:
    """Piecewise-constant instantaneous-forward discount curve from epoch 0."""

    node_times: np.ndarray
    forwards: np.ndarray
    kind: str = KIND_NOMINAL

    def __post_init__(self):
        times = np.asarray(self.node_times, dtype=float)
        fwd = np.asarray(self.forwards, dtype=float)
        if times.ndim != 1 or fwd.ndim != 1 or len(times) != len(fwd):
            raise InputError("node_times and forwards must be equal-length 1-d arrays")
        if len(times) == 0:
            raise InputError("curve needs at least one node")
        if times[0] <= 0.0 or np.any(np.diff(times) <= 0.0):
            raise InputError("node times must be strictly increasing and positive")
        widths = np.diff(np.concatenate(([0.0], times)))
        cum = np.concatenate(([0.0], np.cumsum(fwd * widths)))
        object.__setattr__(self, "node_times", times)
        object.__setattr__(self, "forwards", fwd)
        object.__setattr__(self, "_cum", cum)

    @property
    def last_node(self):
        return float(self.node_times[-1])

    def forward_at(self, t):
        """Instantaneous forward at t (right-continuous; flat beyond last node)."""
        if t < 0.0:
            raise OrderingError(f"negative time {t}")
        k = int(np.searchsorted(self.node_times, t, side="right"))
        if k == len(self.node_times):
            k -= 1
        return float(self.forwards[k])

    def _log_df(self, t):
        # cumulative forward integral; flat extrapolation past the last node
        if t > self.last_node:
            warnings.warn(
                f"extrapolating {self.kind} curve flat beyond {self.last_node}",
                ExtrapolationWarning,
                stacklevel=3,
            )
            return -(self._cum[-1] + self.forwards[-1] * (t - self.last_node))
        k = int(np.searchsorted(self.node_times, t, side="right"))
        t_prev = 0.0 if k == 0 else self.node_times[k - 1]
        if k == len(self.node_times):
            k -= 1
            t_prev = 0.0 if k == 0 else self.node_times[k - 1]
        return -(self._cum[k] + self.forwards[k] * (t - t_prev))

    def discount_factor(self, t, maturity):
        """P(t, T) = exp(-integral of the forward curve over [t, T])."""
        if t < 0.0:
            raise OrderingError(f"negative start time {t}")
        if t > maturity:
            raise OrderingError(f"times out of order: t={t} > T={maturity}")
        return math.exp(self._log_df(maturity) - self._log_df(t))

    def zero_rate(self, maturity):
        """Continuously compounded zero yield to ``maturity``."""
        if maturity <= 0.0:
            raise OrderingError("maturity must be positive")
        return -self._log_df(maturity) / maturity

    def simple_forward_rate(self, t, t1, t2):
        """Simply compounded forward rate P(t,T1)/P(t,T2) - 1."""
        if t1 >= t2:
            raise OrderingError(f"period reversed: T1={t1} >= T2={t2}")
        if t > t1:
            raise OrderingError(f"t={t} after period start {t1}")
        return self.discount_factor(t, t1) / self.discount_factor(t, t2) - 1.0

    def as_step_function(self):
        return StepFunction(self.node_times, self.forwards)


@dataclass(frozen=True)
class CouponBondQuote:
    """Price quote for a coupon bond: fixed coupon amount per payment date."""

    coupon: float
    maturity: float
    payment_times: np.ndarray
    price: float
    face: float = 1.0
    kind: str = KIND_NOMINAL

    def __post_init__(self):
        times = np.asarray(self.payment_times, dtype=float)
        if len(times) == 0:
            raise InputError("quote needs at least one payment time")
        if times[0] <= 0.0 or np.any(np.diff(times) <= 0.0):
            raise InputError("payment times must be strictly increasing and positive")
        if abs(times[-1] - self.maturity) > 1e-12:
            raise InputError("last payment time must equal the maturity")
        if self.price <= 0.0 or self.face <= 0.0:
            raise InputError("price and face must be positive")
        object.__setattr__(self, "payment_times", times)

    @classmethod
    def zero_coupon(cls, maturity, price, face=1.0, kind=KIND_NOMINAL):
        return cls(0.0, maturity, np.array([maturity]), price, face, kind)


def bond_model_price(quote: CouponBondQuote, curve: DiscountCurve):
    """Present value of the quote's cash flows on ``curve``."""
    dfs = np.array([curve.discount_factor(0.0, t) for t in quote.payment_times])
    return float(quote.coupon * dfs.sum() + quote.face * dfs[-1])


def _rough_yield(quote):
    total = quote.coupon * len(quote.payment_times) + quote.face
    return max(math.log(total / quote.price) / quote.maturity, -0.5)


@dataclass(frozen=True)
class BootstrapResult:
    curve: DiscountCurve
    residual_norm: float
    n_evaluations: int


def bootstrap_piecewise_forwards(quotes, node_times=None, max_iterations=200,
                                 tolerance=1e-10):
    """Fit a piecewise-constant forward curve to bond quotes by least squares.

    Node times default to the quoted maturities.  The system must not be
    under-determined (at least as many quotes as nodes).  Returns the
    fitted curve together with the residual norm.
    """
    quotes = list(quotes)
    if not quotes:
        raise InputError("no quotes supplied")
    kinds = {q.kind for q in quotes}
    if len(kinds) > 1:
        raise InputError(f"quotes mix curve kinds: {sorted(kinds)}")
    kind = quotes[0].kind

    if node_times is None:
        node_times = sorted({q.maturity for q in quotes})
    node_times = np.asarray(node_times, dtype=float)
    if len(quotes) < len(node_times):
        raise InputError(
            f"{len(node_times)} nodes but only {len(quotes)} quotes: "
            "under-determined grids are rejected"
        )
    longest = max(q.maturity for q in quotes)
    if node_times[-1] < longest - 1e-12:
        raise InputError("node grid does not cover the longest quoted maturity")

    def residuals(forwards):
        curve = DiscountCurve(node_times, forwards, kind)
        return np.array([bond_model_price(q, curve) - q.price for q in quotes])

    guess = np.full(len(node_times), np.mean([_rough_yield(q) for q in quotes]))
    result = least_squares(
        residuals,
        guess,
        method="lm",
        xtol=1e-15,
        ftol=1e-15,
        gtol=1e-15,
        max_nfev=max_iterations * (len(node_times) + 1),
    )
    norm = float(np.linalg.norm(result.fun))
    exactly_determined = len(quotes) == len(node_times)
    if result.status == 0 or (exactly_determined and norm > tolerance):
        raise CalibrationError(
            f"bootstrap did not converge: residual norm {norm:.3e}", residual=norm
        )
    curve = DiscountCurve(node_times, result.x, kind)
    return BootstrapResult(curve, norm, int(result.nfev))


@dataclass(frozen=True)
class CurvePair:
    """Nominal and real curves sharing the valuation epoch, plus spot index."""

    nominal: DiscountCurve
    real: DiscountCurve
    spot_index: float

    def __post_init__(self):
        if self.nominal.kind == KIND_REAL or self.real.kind == KIND_NOMINAL:
            raise InputError("curve kinds swapped in pair")
        if self.spot_index <= 0.0:
            raise InputError("spot index must be positive")

    def forward_index_value(self, maturity):
        """Arbitrage-enforced index forward I(0) P_r(0,T) / P_n(0,T)."""
        pr = self.real.discount_factor(0.0, maturity)
        pn = self.nominal.discount_factor(0.0, maturity)
        return self.spot_index * pr / pn

    def forward_inflation_rate(self, t1, t2):
        """Simply compounded forward inflation between T1 and T2."""
        if t1 >= t2:
            raise OrderingError(f"period reversed: T1={t1} >= T2={t2}")
        return self.forward_index_value(t2) / self.forward_index_value(t1) - 1.0

    def breakeven_forward_curve(self):
        """Pointwise difference of instantaneous forwards on the union grid.

        Integrating the result over [0, T] reproduces log of the forward
        index growth to machine precision.
        """
        grid = np.union1d(self.nominal.node_times, self.real.node_times)
        values = np.empty(len(grid))
        prev = 0.0
        for k, t in enumerate(grid):
            mid = 0.5 * (prev + t)
            values[k] = self.nominal.forward_at(mid) - self.real.forward_at(mid)
            prev = t
        return DiscountCurve(grid, values, KIND_BREAKEVEN)
