"""File formats: market data CSVs, parameter files, trade files, reports.

Parsing is strict: a malformed row is an error carrying the file and
line number, never a silent skip.
"""

import csv
import datetime
import json
import math
from dataclasses import dataclass

import numpy as np

from .curves import (
    KIND_NOMINAL,
    KIND_REAL,
    CouponBondQuote,
    DiscountCurve,
)
from .errors import InputError, InsufficientDataError, ParseError
from .jarrow_yildirim import JyParams
from .market import CpiSeries, inflation_reference, parse_iso_date
from .rational import RpksParams, decay_curve
from .stepfun import StepFunction

CPI_HEADER = ["date", "value"]
QUOTE_HEADER = ["kind", "maturity_years", "coupon", "frequency", "price", "face"]
CURVE_HEADER = ["node_time", "forward"]
TRADE_TYPES = ("zciis", "yyiis", "tips", "index_option", "inflation_option")


def _read_rows(path, expected_header):
    try:
        handle = open(path, newline="")
    except OSError as exc:
        raise ParseError(f"{path}: cannot open: {exc}") from exc
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}:1: empty file") from None
        if [h.strip() for h in header] != expected_header:
            raise ParseError(
                f"{path}:1: expected header {','.join(expected_header)!r}, "
                f"got {','.join(header)!r}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected_header):
                raise ParseError(
                    f"{path}:{lineno}: expected {len(expected_header)} fields, "
                    f"got {len(row)}"
                )
            rows.append((lineno, [field.strip() for field in row]))
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return rows


def _parse_float(path, lineno, name, text, positive=False):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"{path}:{lineno}: {name} is not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ParseError(f"{path}:{lineno}: {name} is not finite: {text!r}")
    if positive and value <= 0.0:
        raise ParseError(f"{path}:{lineno}: {name} must be positive, got {value}")
    return value


def load_cpi_csv(path, base_index=None):
    """CPI series from ``date,value`` rows (first-of-month ISO dates)."""
    observations = []
    for lineno, (date_text, value_text) in _read_rows(path, CPI_HEADER):
        try:
            stamp = parse_iso_date(date_text)
        except InputError:
            raise ParseError(
                f"{path}:{lineno}: date is not ISO-8601: {date_text!r}"
            ) from None
        if stamp.day != 1:
            raise ParseError(
                f"{path}:{lineno}: CPI dates must be the first of the month, "
                f"got {date_text}"
            )
        value = _parse_float(path, lineno, "value", value_text, positive=True)
        if observations and stamp <= observations[-1][0]:
            raise ParseError(
                f"{path}:{lineno}: CPI months out of order at {date_text}"
            )
        observations.append((stamp, value))
    if base_index is None:
        base_index = observations[0][1]
    return CpiSeries(tuple(observations), base_index)


def _quote_from_row(path, lineno, row):
    kind, maturity_text, coupon_text, freq_text, price_text, face_text = row
    if kind not in (KIND_NOMINAL, KIND_REAL):
        raise ParseError(f"{path}:{lineno}: kind must be nominal or real, got {kind!r}")
    maturity = _parse_float(path, lineno, "maturity_years", maturity_text, positive=True)
    coupon_rate = _parse_float(path, lineno, "coupon", coupon_text)
    price = _parse_float(path, lineno, "price", price_text, positive=True)
    face = _parse_float(path, lineno, "face", face_text, positive=True)
    try:
        frequency = int(freq_text)
    except ValueError:
        raise ParseError(
            f"{path}:{lineno}: frequency must be an integer, got {freq_text!r}"
        ) from None
    if frequency < 0:
        raise ParseError(f"{path}:{lineno}: frequency must be >= 0")
    if frequency == 0:
        return CouponBondQuote.zero_coupon(maturity, price, face, kind)
    n_payments = maturity * frequency
    if abs(n_payments - round(n_payments)) > 1e-9:
        raise ParseError(
            f"{path}:{lineno}: maturity {maturity} is not a whole number of "
            f"periods at frequency {frequency}"
        )
    n_payments = int(round(n_payments))
    times = maturity - np.arange(n_payments - 1, -1, -1) / frequency
    return CouponBondQuote(
        coupon=coupon_rate * face / frequency,
        maturity=maturity,
        payment_times=times,
        price=price,
        face=face,
        kind=kind,
    )


def load_quotes_csv(path):
    """Bond quotes from ``kind,maturity_years,coupon,frequency,price,face``.

    The per-period coupon amount is coupon rate * face / frequency;
    frequency 0 marks a zero-coupon quote.
    """
    quotes = []
    for lineno, row in _read_rows(path, QUOTE_HEADER):
        quotes.append(_quote_from_row(path, lineno, row))
    return quotes


def split_quotes(quotes):
    nominal = [q for q in quotes if q.kind == KIND_NOMINAL]
    real = [q for q in quotes if q.kind == KIND_REAL]
    return nominal, real


def load_curve_csv(path, kind=KIND_NOMINAL):
    """Discount curve from ``node_time,forward`` rows."""
    times, forwards = [], []
    for lineno, (time_text, fwd_text) in _read_rows(path, CURVE_HEADER):
        times.append(_parse_float(path, lineno, "node_time", time_text, positive=True))
        forwards.append(_parse_float(path, lineno, "forward", fwd_text))
    return DiscountCurve(np.array(times), np.array(forwards), kind)


def write_curve_csv(path, curve: DiscountCurve):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CURVE_HEADER)
        for t, f in zip(curve.node_times, curve.forwards):
            writer.writerow([repr(float(t)), repr(float(f))])


def _require(mapping, key, path, kind=None):
    if key not in mapping:
        raise ParseError(f"{path}: missing required key {key!r}")
    value = mapping[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(f"{path}: key {key!r} has wrong type {type(value).__name__}")
    return value


def _load_json(path):
    try:
        with open(path) as handle:
            return json.load(handle)
    except OSError as exc:
        raise ParseError(f"{path}: cannot open: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc


def load_jy_params(path):
    """Model parameter file: flat JSON object mirroring the field names,
    with optional ``theta_times``/``theta_values`` arrays per factor."""
    raw = _load_json(path)
    kwargs = {}
    for name in ("a_n", "a_r", "sigma_n", "sigma_r", "sigma_i",
                 "rho_nr", "rho_ni", "rho_ri"):
        kwargs[name] = float(_require(raw, name, path, (int, float)))
    for factor in ("n", "r"):
        times_key, values_key = f"theta_{factor}_times", f"theta_{factor}_values"
        if times_key in raw:
            times = raw[times_key]
            values = _require(raw, values_key, path, list)
            kwargs[f"theta_{factor}"] = StepFunction(
                np.asarray(times, dtype=float), np.asarray(values, dtype=float)
            )
    try:
        return JyParams(**kwargs)
    except InputError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def load_rpks_params(path):
    """Kernel-system file: decay rates or tabulated grids for the shapes."""
    raw = _load_json(path)
    sigma_r = float(_require(raw, "sigma_r", path, (int, float)))
    sigma_s = float(_require(raw, "sigma_s", path, (int, float)))
    rho_rs = float(_require(raw, "rho_rs", path, (int, float)))

    def shape(prefix):
        if f"{prefix}_rate" in raw:
            return decay_curve(float(raw[f"{prefix}_rate"]))
        times = _require(raw, f"{prefix}_times", path, list)
        values = _require(raw, f"{prefix}_values", path, list)
        return (np.asarray(times, dtype=float), np.asarray(values, dtype=float))

    b_r = raw.get("b_r")
    if isinstance(b_r, list):
        b_r = (
            np.asarray(_require(raw, "b_r_times", path, list), dtype=float),
            np.asarray(b_r, dtype=float),
        )
    elif b_r is None:
        raise ParseError(f"{path}: missing required key 'b_r'")
    try:
        return RpksParams(shape("r"), b_r, shape("s"), sigma_r, sigma_s, rho_rs)
    except InputError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def load_trades(path):
    """Trade file: JSON list of records tagged by ``type``."""
    raw = _load_json(path)
    if not isinstance(raw, list):
        raise ParseError(f"{path}: trade file must be a JSON list")
    trades = []
    for k, record in enumerate(raw):
        where = f"{path}[{k}]"
        if not isinstance(record, dict):
            raise ParseError(f"{where}: trade must be an object")
        trade_type = _require(record, "type", where, str)
        if trade_type not in TRADE_TYPES:
            raise ParseError(
                f"{where}: unknown trade type {trade_type!r}; "
                f"expected one of {TRADE_TYPES}"
            )
        _require(record, "trade_id", where, str)
        trades.append(record)
    return trades


@dataclass(frozen=True)
class MarketDataBundle:
    """Parsed market inputs sharing one valuation date."""

    cpi: CpiSeries
    nominal_quotes: list
    real_quotes: list
    valuation_date: datetime.date

    def __post_init__(self):
        last = self.cpi.last_month
        if (self.valuation_date.year, self.valuation_date.month) < (
            last.year,
            last.month,
        ):
            raise InputError(
                f"valuation date {self.valuation_date} precedes the last CPI "
                f"month {last}"
            )
        # the three-month indexation lag must be resolvable at valuation
        try:
            inflation_reference(self.cpi, self.valuation_date)
        except InsufficientDataError as exc:
            raise InputError(f"CPI series too short for indexation lag: {exc}") from exc


def load_market_csv(cpi_path, quotes_path, valuation_date, base_index=None):
    """Load and cross-validate the market data bundle."""
    cpi = load_cpi_csv(cpi_path, base_index)
    nominal, real = split_quotes(load_quotes_csv(quotes_path))
    if isinstance(valuation_date, str):
        valuation_date = parse_iso_date(valuation_date)
    return MarketDataBundle(cpi, nominal, real, valuation_date)
