import datetime

import numpy as np
import pytest

from inflakit.errors import (
    DomainError,
    InputError,
    InsufficientDataError,
    OrderingError,
)
from inflakit.market import (
    COMPOUNDED,
    CONTINUOUS,
    SIMPLE,
    CpiSeries,
    RateQuote,
    cpi_inflation,
    fisher_real_rate,
    imputed_zero_yield,
    inflation_reference,
    parse_iso_date,
    realized_inflation_rate,
    year_fraction,
)


def d(text):
    return datetime.date.fromisoformat(text)


class TestYearFraction:
    def test_identical_dates(self):
        assert year_fraction(d("2006-07-01"), d("2006-07-01")) == 0.0

    def test_whole_non_leap_year(self):
        assert year_fraction(d("2006-01-01"), d("2007-01-01")) == 1.0

    def test_direct_day_count(self):
        # 24 days between Jul 1 and Jul 25
        assert year_fraction(d("2006-07-01"), d("2006-07-25")) == pytest.approx(
            24 / 365, abs=1e-15
        )

    def test_leap_year_day_count(self):
        assert year_fraction(d("2008-01-01"), d("2009-01-01")) == pytest.approx(
            366 / 365, abs=1e-15
        )

    def test_reversed_dates_raise(self):
        with pytest.raises(OrderingError):
            year_fraction(d("2007-01-01"), d("2006-01-01"))

    def test_additivity_over_random_triples(self):
        # the identity is exact at the integer day-count level; the float
        # quotients can differ by an ulp when summed
        rng = np.random.default_rng(7)
        base = d("2000-01-01")
        for _ in range(200):
            o1, o2 = sorted(rng.integers(0, 15000, size=2))
            a = base + datetime.timedelta(days=int(o1))
            b = base + datetime.timedelta(days=int(o2))
            c = b + datetime.timedelta(days=int(rng.integers(0, 3000)))
            assert (b - a).days + (c - b).days == (c - a).days
            assert year_fraction(a, b) + year_fraction(b, c) == pytest.approx(
                year_fraction(a, c), abs=1e-12
            )


def make_series(months, values, base=100.0):
    return CpiSeries(tuple(zip(map(d, months), values)), base)


class TestInflationReference:
    def test_worked_example(self):
        # July 25 interpolates between the April and May prints
        series = make_series(["2006-04-01", "2006-05-01"], [100.0, 101.0])
        ref = inflation_reference(series, d("2006-07-25"))
        assert ref == pytest.approx(100.0 + 24 / 31 * 1.0, abs=1e-12)

    def test_first_day_returns_lagged_print(self):
        series = make_series(["2006-04-01", "2006-05-01"], [100.0, 101.0])
        assert inflation_reference(series, d("2006-07-01")) == 100.0

    def test_flat_segment(self):
        series = make_series(["2006-04-01", "2006-05-01"], [104.2, 104.2])
        for day in (1, 11, 21, 31):
            ref = inflation_reference(series, datetime.date(2006, 7, day))
            assert ref == 104.2

    def test_missing_months_raise(self):
        series = make_series(["2006-04-01", "2006-05-01"], [100.0, 101.0])
        with pytest.raises(InsufficientDataError):
            inflation_reference(series, d("2006-09-15"))

    def test_monotone_in_day_when_prints_rise(self):
        series = make_series(["2006-04-01", "2006-05-01"], [100.0, 102.5])
        refs = [
            inflation_reference(series, datetime.date(2006, 7, day))
            for day in range(1, 32)
        ]
        assert all(b > a for a, b in zip(refs, refs[1:]))
        assert refs[0] == 100.0
        assert refs[-1] <= 102.5

    def test_lag_override(self):
        series = make_series(["2006-05-01", "2006-06-01"], [100.0, 101.0])
        ref = inflation_reference(series, d("2006-07-25"), lag_months=2)
        assert ref == pytest.approx(100.0 + 24 / 31, abs=1e-12)

    def test_series_rejects_unordered_months(self):
        with pytest.raises(InputError):
            make_series(["2006-05-01", "2006-04-01"], [100.0, 101.0])

    def test_series_rejects_nonpositive_values(self):
        with pytest.raises(InputError):
            make_series(["2006-04-01"], [-1.0])


class TestRealizedInflation:
    def test_unchanged_index(self):
        assert realized_inflation_rate(100.0, 100.0, 1.0) == (0.0, 0.0)

    def test_two_year_growth(self):
        total, annual = realized_inflation_rate(100.0, 106.0, 2.0)
        assert total == pytest.approx(0.06, abs=1e-15)
        assert annual == pytest.approx(0.03, abs=1e-15)

    def test_deflation(self):
        total, annual = realized_inflation_rate(100.0, 98.0, 1.0)
        assert total == pytest.approx(-0.02, abs=1e-15)
        assert annual == pytest.approx(-0.02, abs=1e-15)

    def test_bad_tau(self):
        with pytest.raises(DomainError):
            realized_inflation_rate(100.0, 101.0, 0.0)

    def test_small_move_identity(self):
        for x in np.linspace(-0.5, 0.5, 41):
            total, _ = realized_inflation_rate(100.0, 100.0 * (1 + x), 1.0)
            assert total == pytest.approx(x, abs=1e-14)


class TestCpiInflation:
    def test_flat(self):
        assert cpi_inflation(100.0, 100.0) == 0.0

    def test_direct(self):
        assert cpi_inflation(200.0, 210.0) == pytest.approx(0.05, abs=1e-15)
        assert cpi_inflation(100.0, 102.5) == pytest.approx(0.025, abs=1e-15)

    def test_matches_realized_total(self):
        total, _ = realized_inflation_rate(87.0, 93.5, 1.0)
        assert cpi_inflation(87.0, 93.5) == pytest.approx(total, abs=1e-15)

    def test_nonpositive_start(self):
        with pytest.raises(DomainError):
            cpi_inflation(0.0, 100.0)


class TestFisher:
    def test_zero_inflation(self):
        assert fisher_real_rate(0.05, 0.0) == pytest.approx(0.05, abs=1e-15)

    def test_exact_adjustment(self):
        assert fisher_real_rate(0.05, 0.02) == pytest.approx(
            1.05 / 1.02 - 1.0, abs=1e-15
        )

    def test_additive_mode(self):
        assert fisher_real_rate(0.05, 0.02, additive=True) == pytest.approx(
            0.03, abs=1e-15
        )

    def test_singularity(self):
        with pytest.raises(DomainError):
            fisher_real_rate(0.05, -1.0)

    def test_round_trip_property(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            n = rng.uniform(-0.2, 0.2)
            i = rng.uniform(-0.5, 0.5)
            r = fisher_real_rate(n, i)
            assert (1 + r) * (1 + i) - 1 == pytest.approx(n, abs=1e-14)

    def test_additive_remainder_identity(self):
        # exact minus additive equals -i (n - i) / (1 + i) identically,
        # which is the rigorous form of the O(n i) agreement
        rng = np.random.default_rng(12)
        for _ in range(500):
            n = rng.uniform(-0.1, 0.1)
            i = rng.uniform(-0.1, 0.1)
            exact = fisher_real_rate(n, i)
            additive = fisher_real_rate(n, i, additive=True)
            assert exact - additive == pytest.approx(
                -i * (n - i) / (1 + i), abs=5e-16
            )

    def test_additive_error_bound_in_normal_regime(self):
        # with inflation between zero and the nominal rate the additive
        # shortcut is within |n i| of the exact adjustment
        rng = np.random.default_rng(12)
        for _ in range(500):
            n = rng.uniform(0.0, 0.1)
            i = rng.uniform(0.0, n)
            exact = fisher_real_rate(n, i)
            additive = fisher_real_rate(n, i, additive=True)
            assert abs(exact - additive) <= abs(n * i) + 1e-15

    def test_rate_quote_inputs_converted(self):
        nominal = RateQuote(0.05, CONTINUOUS)
        inflation = RateQuote(0.02, COMPOUNDED)
        expected = (1 + (np.exp(0.05) - 1)) / 1.02 - 1
        assert fisher_real_rate(nominal, inflation) == pytest.approx(
            expected, abs=1e-15
        )


class TestRateQuote:
    def test_conversion_round_trips(self):
        rng = np.random.default_rng(13)
        for _ in range(200):
            value = rng.uniform(-0.5, 0.5)
            for conv in (SIMPLE, COMPOUNDED, CONTINUOUS):
                q = RateQuote(value, conv)
                for target in (SIMPLE, COMPOUNDED, CONTINUOUS):
                    back = q.to(target).to(conv)
                    assert back.value == pytest.approx(value, abs=1e-12)

    def test_unknown_convention(self):
        with pytest.raises(InputError):
            RateQuote(0.05, "monthly")


class TestImputedYield:
    def test_par_bill(self):
        y = imputed_zero_yield(100.0, 100.0, 1.0)
        assert y.simple == 0.0
        assert y.compounded == 0.0

    def test_one_year_discount(self):
        y = imputed_zero_yield(90.0, 100.0, 1.0)
        assert y.simple == pytest.approx(1 / 9, abs=1e-12)

    def test_26_week_bill_band(self):
        # 26-week discount bill sold at 98.78: the quoted 2.479% annual
        # yield is matched to within 5bp by the simple-annualized number
        tenor = 26 * 7 / 365
        y = imputed_zero_yield(98.78, 100.0, tenor)
        assert abs(y.simple - 0.02479) <= 0.0005
        assert abs(y.compounded - 0.02479) <= 0.0005

    def test_bad_price(self):
        with pytest.raises(DomainError):
            imputed_zero_yield(0.0, 100.0, 1.0)
        with pytest.raises(InputError):
            imputed_zero_yield(101.0, 100.0, 1.0)


def test_parse_iso_date_round_trip():
    assert parse_iso_date("2006-04-01") == datetime.date(2006, 4, 1)
    assert parse_iso_date("2006-04-01").isoformat() == "2006-04-01"
    with pytest.raises(InputError):
        parse_iso_date("04/01/2006")
