"""Pricing library for inflation-linked instruments.

Submodules:
  market            dates, CPI series, elementary rate identities
  curves            discount curves, bootstrapping, curve pairs
  shortrate         one-factor short-rate family, Merton structural model
  jarrow_yildirim   three-factor nominal/real/index model
  rational          rational pricing-kernel system
  pricers           closed-form instrument pricers + MC cross-checks
  mc                generic SDE Monte Carlo engine
  lattice           binomial valuation, forward-induction rate tree
  io                CSV/JSON market-data and parameter formats
  cli               config-driven pipelines (`inflakit` entry point)

Set INFLAKIT_NUMBA=0 to force the pure-numpy kernel backend.
"""

from .curves import (
    BootstrapResult,
    CouponBondQuote,
    CurvePair,
    DiscountCurve,
    bootstrap_piecewise_forwards,
)
from .errors import (
    ArbitrageViolationError,
    CalibrationError,
    CapacityError,
    DomainError,
    InflakitError,
    InputError,
    InsufficientDataError,
    OrderingError,
    ParseError,
    StateError,
)
from .jarrow_yildirim import JyParams, JyState, MarketPriceOfRisk
from .market import (
    CpiSeries,
    RateQuote,
    cpi_inflation,
    fisher_real_rate,
    imputed_zero_yield,
    inflation_reference,
    realized_inflation_rate,
    year_fraction,
)
from .mc import McResult, PathGrid, SdeSpec, mc_discounted_expectation, simulate_paths
from .pricers import (
    FactorVols,
    IndexOptionSpec,
    InflationOptionSpec,
    TipsSpec,
    index_option_price,
    inflation_option_price,
    tips_dirty_price,
    yyiis_price,
    zciis_price,
)
from .rational import MartingaleState, RpksParams
from .shortrate import (
    CirParams,
    HullWhiteParams,
    MertonStructuralInputs,
    VasicekParams,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
