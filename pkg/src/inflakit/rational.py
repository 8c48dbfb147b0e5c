"""Rational pricing-kernel system for nominal and real economies.

Two unit-initialised positive exponential martingales drive the real and
nominal kernels through deterministic shape functions; conditional
expectations of the kernels give every bond price in closed form, and the
index level is the kernel ratio.  The weight functions used in the price
formulas are defined so numerators and denominators are exactly those
conditional expectations, which makes the closed forms consistent with
kernel-ratio Monte Carlo by construction.
"""

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import kernels
from .errors import InputError, OrderingError
from .jarrow_yildirim import cholesky_psd
from .mc import PathGrid, path_normals


def _as_function(value, name, log_interp=False):
    if callable(value):
        return value
    times, levels = value
    times = np.asarray(times, dtype=float)
    levels = np.asarray(levels, dtype=float)
    if len(times) != len(levels) or len(times) < 2:
        raise InputError(f"{name} grid needs matching times/values, length >= 2")
    if np.any(np.diff(times) <= 0.0):
        raise InputError(f"{name} grid times must be strictly increasing")
    if log_interp:
        if np.any(levels <= 0.0):
            raise InputError(f"{name} grid values must be positive")
        logs = np.log(levels)
        return lambda t: float(np.exp(np.interp(t, times, logs)))
    return lambda t: float(np.interp(t, times, levels))


def decay_curve(rate):
    """Unit-initialised exponential decay t -> exp(-rate t)."""
    return lambda t: math.exp(-rate * t)


@dataclass(frozen=True)
class RpksParams:
    """Shape functions (R, b_R, S) and the two martingale volatilities.

    ``r_curve`` and ``s_curve`` map time to positive levels with value 1
    at t=0; ``b_r`` maps time into (0, 1).  Scalars are accepted for
    ``b_r`` (constant) and pairs (times, values) for tabulated curves.
    """

    r_curve: Union[Callable, tuple]
    b_r: Union[float, Callable, tuple]
    s_curve: Union[Callable, tuple]
    sigma_r: float
    sigma_s: float
    rho_rs: float

    def __post_init__(self):
        if self.sigma_r < 0.0 or self.sigma_s < 0.0:
            raise InputError("martingale volatilities must be non-negative")
        if abs(self.rho_rs) > 1.0:
            raise InputError("rho_rs outside [-1, 1]")
        r_fn = _as_function(self.r_curve, "R", log_interp=True)
        s_fn = _as_function(self.s_curve, "S", log_interp=True)
        if isinstance(self.b_r, (int, float)):
            br_value = float(self.b_r)
            br_fn = lambda t: br_value  # noqa: E731
        else:
            br_fn = _as_function(self.b_r, "b_R")
        object.__setattr__(self, "_r", r_fn)
        object.__setattr__(self, "_s", s_fn)
        object.__setattr__(self, "_br", br_fn)
        for name, fn in (("R", r_fn), ("S", s_fn)):
            if abs(fn(0.0) - 1.0) > 1e-12:
                raise InputError(f"{name}(0) must equal 1")

    @classmethod
    def from_decay_rates(cls, r_rate, s_rate, b_r, sigma_r, sigma_s, rho_rs):
        return cls(decay_curve(r_rate), b_r, decay_curve(s_rate),
                   sigma_r, sigma_s, rho_rs)

    def validate_on(self, horizon, n_points=257):
        """Check positivity and the b_R band on an evaluation grid."""
        for t in np.linspace(0.0, horizon, n_points):
            if self._r(t) <= 0.0 or self._s(t) <= 0.0:
                raise InputError(f"shape function not positive at t={t}")
            b = self._br(t)
            if not 0.0 < b < 1.0:
                raise InputError(f"b_R(t)={b} outside (0, 1) at t={t}")

    def shape_r(self, t):
        return self._r(t)

    def shape_s(self, t):
        return self._s(t)

    def weight_b(self, t):
        return self._br(t)


@dataclass(frozen=True)
class MartingaleState:
    """Levels of the two driving martingales at time t (both start at 1)."""

    t: float
    a_r: float
    a_s: float

    def __post_init__(self):
        if self.a_r <= 0.0 or self.a_s <= 0.0:
            raise InputError("martingale levels must be positive")


def martingale_step(sigma, level, dt, z):
    """Exponential-martingale update: strictly positive, mean-preserving."""
    if level <= 0.0:
        raise InputError("level must be positive")
    if dt <= 0.0:
        raise InputError("dt must be positive")
    return level * math.exp(sigma * math.sqrt(dt) * z - 0.5 * sigma * sigma * dt)


def kernel_values(p: RpksParams, m: MartingaleState):
    """(real kernel, nominal-over-real scale, nominal kernel) at the state."""
    h_r = p.shape_r(m.t) * (1.0 + p.weight_b(m.t) * (m.a_r - 1.0))
    scale = p.shape_s(m.t) * m.a_s
    return h_r, scale, scale * h_r


def _check_horizon(m, maturity):
    if maturity < m.t:
        raise OrderingError(f"maturity {maturity} before state time {m.t}")


def real_bond(p: RpksParams, m: MartingaleState, maturity):
    """P_real(t, T) = E_t[h_real(T)] / h_real(t); the martingale property
    collapses the expectation to the current level."""
    _check_horizon(m, maturity)
    num = p.shape_r(maturity) * (1.0 + p.weight_b(maturity) * (m.a_r - 1.0))
    den = p.shape_r(m.t) * (1.0 + p.weight_b(m.t) * (m.a_r - 1.0))
    return num / den


def product_expectation(p: RpksParams, m: MartingaleState, maturity):
    """E_t[A_R(T) A_S(T)] for the correlated exponential martingales."""
    return m.a_r * m.a_s * math.exp(
        p.rho_rs * p.sigma_r * p.sigma_s * (maturity - m.t)
    )


def nominal_bond(p: RpksParams, m: MartingaleState, maturity):
    """P_nom(t, T) = E_t[h_nom(T)] / h_nom(t) in closed form."""
    _check_horizon(m, maturity)
    r_t, b_t, s_t = p.shape_r(m.t), p.weight_b(m.t), p.shape_s(m.t)
    r_m, b_m, s_m = p.shape_r(maturity), p.weight_b(maturity), p.shape_s(maturity)
    num = s_m * r_m * (
        (1.0 - b_m) * m.a_s + b_m * product_expectation(p, m, maturity)
    )
    den = s_t * r_t * ((1.0 - b_t) * m.a_s + b_t * m.a_r * m.a_s)
    return num / den


def il_bond(p: RpksParams, m: MartingaleState, maturity):
    """Index-linked zero-coupon bond E_t[h_real(T)] / h_nom(t)."""
    _check_horizon(m, maturity)
    r_m, b_m = p.shape_r(maturity), p.weight_b(maturity)
    num = r_m * (1.0 - b_m) + r_m * b_m * m.a_r
    _, _, h_n = kernel_values(p, m)
    return num / h_n


def index_level(p: RpksParams, m: MartingaleState):
    """The index as the kernel ratio h_real / h_nom = 1 / (S(t) A_S)."""
    return 1.0 / (p.shape_s(m.t) * m.a_s)


@dataclass(frozen=True)
class MartingalePaths:
    times: np.ndarray
    a_r: np.ndarray
    a_s: np.ndarray
    seed: int


def simulate_martingales(p: RpksParams, grid: PathGrid, seed, n_paths,
                         state0: MartingaleState = None):
    """Joint paths of the two exponential martingales with correlated shocks."""
    if state0 is None:
        state0 = MartingaleState(grid.t0, 1.0, 1.0)
    if grid.t0 != state0.t:
        raise InputError("grid must start at the state's time")
    corr = np.array([[1.0, p.rho_rs], [p.rho_rs, 1.0]])
    draws = path_normals(seed, n_paths, grid.n_steps, n_factors=2)
    zc = draws @ cholesky_psd(corr).T
    a_r = kernels.exp_martingale_paths(
        state0.a_r, p.sigma_r, grid.dt, np.ascontiguousarray(zc[:, :, 0])
    )
    a_s = kernels.exp_martingale_paths(
        state0.a_s, p.sigma_s, grid.dt, np.ascontiguousarray(zc[:, :, 1])
    )
    return MartingalePaths(grid.times(), a_r, a_s, seed)


def fit_shape_functions(nominal_curve, real_curve, b_r, sigma_r, sigma_s, rho_rs,
                        grid_times=None):
    """Tabulated (R, S) reproducing both input curves at the grid times.

    R(T) equals the real discount factor directly; S(T) then makes the
    nominal closed form match the nominal discount factor.
    """
    if grid_times is None:
        grid_times = np.union1d(nominal_curve.node_times, real_curve.node_times)
    grid_times = np.asarray(grid_times, dtype=float)
    if grid_times[0] > 0.0:
        grid_times = np.concatenate(([0.0], grid_times))
    br_fn = (lambda t: float(b_r)) if isinstance(b_r, (int, float)) else b_r
    r_vals = np.array([real_curve.discount_factor(0.0, t) for t in grid_times])
    s_vals = np.empty_like(r_vals)
    for k, t in enumerate(grid_times):
        pn = nominal_curve.discount_factor(0.0, t)
        b = br_fn(t)
        bump = (1.0 - b) + b * math.exp(rho_rs * sigma_r * sigma_s * t)
        s_vals[k] = pn / (r_vals[k] * bump)
    return RpksParams(
        (grid_times, r_vals), b_r, (grid_times, s_vals), sigma_r, sigma_s, rho_rs
    )
