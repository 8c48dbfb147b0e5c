"""Calendar arithmetic, CPI series storage and the elementary rate identities.

Dates are plain ``datetime.date`` values (valid civil dates with exact
ISO-8601 round-tripping).  All year fractions use ACT/365-fixed; the
convention is fixed here once and documented at the API boundary.
"""

import calendar
import datetime
import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import DomainError, InputError, InsufficientDataError, OrderingError

DAYS_PER_YEAR = 365.0

SIMPLE = "simple-annualized"
COMPOUNDED = "compounded-annual"
CONTINUOUS = "continuous"
_CONVENTIONS = (SIMPLE, COMPOUNDED, CONTINUOUS)


def parse_iso_date(text):
    """Strictly parse YYYY-MM-DD."""
    try:
        return datetime.date.fromisoformat(str(text))
    except ValueError as exc:
        raise InputError(f"not an ISO-8601 date: {text!r}") from exc


def year_fraction(d1: datetime.date, d2: datetime.date) -> float:
    """ACT/365F year fraction between two dates; additive over adjacent spans."""
    if d1 > d2:
        raise OrderingError(f"dates out of order: {d1} > {d2}")
    return (d2 - d1).days / DAYS_PER_YEAR


def _month_index(d):
    return d.year * 12 + (d.month - 1)


@dataclass(frozen=True)
class CpiSeries:
    """Monthly price-index observations plus the base reference level.

    ``observations`` is a sequence of (first-of-month date, index value)
    pairs with strictly increasing months and positive values.
    """

    observations: tuple
    base_index: float

    def __post_init__(self):
        obs = tuple((d, float(v)) for d, v in self.observations)
        if not obs:
            raise InputError("CPI series needs at least one observation")
        if self.base_index <= 0.0:
            raise InputError("base index must be positive")
        last = None
        for d, v in obs:
            if not isinstance(d, datetime.date):
                raise InputError(f"CPI stamp must be a date, got {d!r}")
            if v <= 0.0:
                raise InputError(f"CPI value must be positive, got {v} at {d}")
            idx = _month_index(d)
            if last is not None and idx <= last:
                raise InputError(f"CPI months must be strictly increasing at {d}")
            last = idx
        object.__setattr__(self, "observations", obs)
        object.__setattr__(
            self, "_by_month", {_month_index(d): v for d, v in obs}
        )

    @property
    def first_month(self):
        return self.observations[0][0]

    @property
    def last_month(self):
        return self.observations[-1][0]

    def value_for_month(self, year, month):
        key = year * 12 + (month - 1)
        try:
            return self._by_month[key]
        except KeyError:
            raise InsufficientDataError(
                f"no CPI observation for {year:04d}-{month:02d}"
            ) from None


def inflation_reference(series: CpiSeries, d: datetime.date, lag_months: int = 3):
    """Within-month interpolated index value with the standard publication lag.

    With the default three-month lag the value for date d in month m is
    CPI(m-3) + (day-1)/days_in_month(m) * [CPI(m-2) - CPI(m-3)], so the
    first day of the month returns CPI(m-3) exactly.
    """
    if lag_months < 1:
        raise InputError("lag must be at least one month")
    idx = _month_index(d) - lag_months
    y0, m0 = divmod(idx, 12)
    y1, m1 = divmod(idx + 1, 12)
    c0 = series.value_for_month(y0, m0 + 1)
    c1 = series.value_for_month(y1, m1 + 1)
    days_in_month = calendar.monthrange(d.year, d.month)[1]
    return c0 + (d.day - 1) / days_in_month * (c1 - c0)


def realized_inflation_rate(index_start, index_end, tau):
    """Total and annualized index growth over a period of tau years."""
    if index_start <= 0.0:
        raise DomainError("starting index must be positive")
    if tau <= 0.0:
        raise DomainError("period length must be positive")
    total = index_end / index_start - 1.0
    return total, total / tau


def cpi_inflation(cpi_start, cpi_end):
    """Percentage change between two index levels."""
    if cpi_start <= 0.0:
        raise DomainError("starting index must be positive")
    return (cpi_end - cpi_start) / cpi_start


@dataclass(frozen=True)
class RateQuote:
    """A decimal rate tagged with its compounding convention."""

    value: float
    convention: str = COMPOUNDED

    def __post_init__(self):
        if self.convention not in _CONVENTIONS:
            raise InputError(
                f"unknown convention {self.convention!r}; "
                f"expected one of {_CONVENTIONS}"
            )

    def growth_factor(self, tenor=1.0):
        if self.convention == SIMPLE:
            return 1.0 + self.value * tenor
        if self.convention == COMPOUNDED:
            return (1.0 + self.value) ** tenor
        return math.exp(self.value * tenor)

    def to(self, convention, tenor=1.0):
        """Convert by matching growth factors over ``tenor`` years."""
        if convention not in _CONVENTIONS:
            raise InputError(f"unknown convention {convention!r}")
        g = self.growth_factor(tenor)
        if g <= 0.0:
            raise DomainError(f"growth factor {g} not invertible")
        if convention == SIMPLE:
            value = (g - 1.0) / tenor
        elif convention == COMPOUNDED:
            value = g ** (1.0 / tenor) - 1.0
        else:
            value = math.log(g) / tenor
        return RateQuote(value, convention)


def _as_compounded(rate):
    if isinstance(rate, RateQuote):
        return rate.to(COMPOUNDED).value
    return float(rate)


def fisher_real_rate(nominal, inflation, additive=False):
    """Real rate implied by a nominal rate and an inflation rate.

    Exact form solves (1 + real)(1 + inflation) = (1 + nominal); the
    additive form is the familiar nominal - inflation shortcut, accurate
    to O(nominal * inflation).  Inputs may be floats (already
    compounded-annual) or RateQuote values, which are converted first.
    """
    n = _as_compounded(nominal)
    i = _as_compounded(inflation)
    if additive:
        return n - i
    if i == -1.0:
        raise DomainError("inflation of -100% leaves the real rate undefined")
    return (1.0 + n) / (1.0 + i) - 1.0


class ImputedYield(NamedTuple):
    simple: float
    compounded: float


def imputed_zero_yield(price, face, tenor_years):
    """Imputed annual yield of a discount bill under both conventions."""
    if price <= 0.0:
        raise DomainError("price must be positive")
    if not price <= face:
        raise InputError(f"price {price} above face {face}")
    if tenor_years <= 0.0:
        raise DomainError("tenor must be positive")
    gross = face / price
    return ImputedYield(
        simple=(gross - 1.0) / tenor_years,
        compounded=gross ** (1.0 / tenor_years) - 1.0,
    )
