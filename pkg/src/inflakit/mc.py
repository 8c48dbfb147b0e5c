"""Generic SDE simulation with deterministic seeding.

Draws come from a counter-based Philox generator in a canonical
(path, step) layout, so path p consumes the substream determined by
(seed, p) alone and results are bit-identical no matter how work is
partitioned.  Estimates reduce with numpy's pairwise summation, which is
likewise order-fixed.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import (
    CapacityError,
    InputError,
    InsufficientPathsError,
    SpecificationError,
)

# refuse to allocate draw tensors beyond this size; callers chunk instead
MAX_DRAW_BYTES = 2 * 1024**3

SCHEMES = ("euler", "milstein", "exact")


@dataclass(frozen=True)
class PathGrid:
    """Uniform time grid on [t0, T]."""

    t0: float
    horizon: float
    n_steps: int

    def __post_init__(self):
        if self.horizon <= self.t0:
            raise InputError(f"empty grid: t0={self.t0}, T={self.horizon}")
        if self.n_steps < 1:
            raise InputError("grid needs at least one step")

    @property
    def dt(self):
        return (self.horizon - self.t0) / self.n_steps

    def times(self):
        return np.linspace(self.t0, self.horizon, self.n_steps + 1)


@dataclass(frozen=True)
class SdeSpec:
    """Drift/diffusion pair; the optional diffusion state-derivative enables
    Milstein and the optional exact_step enables the "exact" scheme."""

    drift: Callable
    diffusion: Callable
    diffusion_x: Optional[Callable] = None
    exact_step: Optional[Callable] = None


def gbm_spec(mu, sigma):
    """Geometric Brownian motion with its closed-form transition attached."""
    return SdeSpec(
        drift=lambda t, x: mu * x,
        diffusion=lambda t, x: sigma * x,
        diffusion_x=lambda t, x: sigma * np.ones_like(x) if np.ndim(x) else sigma,
        exact_step=lambda t, x, dt, dw: gbm_exact_step(mu, sigma, x, dt, dw),
    )


def euler_step(spec, t, x, dt, dw):
    """One explicit step: x + drift dt + diffusion dW."""
    if dt <= 0.0:
        raise InputError("dt must be positive")
    return x + spec.drift(t, x) * dt + spec.diffusion(t, x) * dw


def milstein_step(spec, t, x, dt, dw):
    """Euler plus the 0.5 sigma sigma_x ((dW)^2 - dt) correction."""
    if dt <= 0.0:
        raise InputError("dt must be positive")
    if spec.diffusion_x is None:
        raise SpecificationError("milstein_step needs spec.diffusion_x")
    sig = spec.diffusion(t, x)
    return (
        x
        + spec.drift(t, x) * dt
        + sig * dw
        + 0.5 * sig * spec.diffusion_x(t, x) * (dw * dw - dt)
    )


def gbm_exact_step(mu, sigma, x, dt, dw):
    """Exact lognormal update of geometric Brownian motion."""
    return x * np.exp((mu - 0.5 * sigma * sigma) * dt + sigma * dw)


def path_normals(seed, n_paths, n_steps, n_factors=None, antithetic=False):
    """Standard normal draws in the canonical (path, step[, factor]) layout."""
    if n_paths < 1:
        raise InputError("need at least one path")
    shape = (n_paths, n_steps) if n_factors is None else (n_paths, n_steps, n_factors)
    n_bytes = 8 * int(np.prod(shape))
    if n_bytes > MAX_DRAW_BYTES:
        raise CapacityError(
            f"draw tensor of {n_bytes / 1e9:.1f} GB exceeds the "
            f"{MAX_DRAW_BYTES / 1e9:.1f} GB limit"
        )
    rng = np.random.Generator(np.random.Philox(seed))
    if not antithetic:
        return rng.standard_normal(shape)
    if n_paths % 2:
        raise InputError("antithetic sampling needs an even path count")
    half = rng.standard_normal((n_paths // 2,) + shape[1:])
    return np.concatenate([half, -half], axis=0)


@dataclass(frozen=True)
class PathSet:
    """Simulated paths on a grid, tagged with the seed that produced them."""

    times: np.ndarray
    values: np.ndarray
    seed: int
    scheme: str

    @property
    def n_paths(self):
        return self.values.shape[0]

    @property
    def terminal(self):
        return self.values[:, -1]


def _advance(spec_or_step, scheme, t, x, dt, dw):
    if callable(spec_or_step) and not isinstance(spec_or_step, SdeSpec):
        return spec_or_step(t, x, dt, dw)
    spec = spec_or_step
    if scheme == "euler":
        return euler_step(spec, t, x, dt, dw)
    if scheme == "milstein":
        return milstein_step(spec, t, x, dt, dw)
    if spec.exact_step is None:
        raise SpecificationError("scheme 'exact' needs spec.exact_step")
    return spec.exact_step(t, x, dt, dw)


def simulate_paths(spec_or_step, grid: PathGrid, x0, scheme="euler", seed=0,
                   n_paths=1, antithetic=False, draws=None):
    """Simulate paths of a scalar SDE.

    ``spec_or_step`` is an SdeSpec or a custom step function
    (t, x, dt, dw) -> x'.  ``draws`` overrides the seeded standard
    normals (a test hook, e.g. an all-zero noise stub).  Identical
    (seed, grid, scheme, n_paths) inputs give bit-identical output.
    """
    if scheme not in SCHEMES:
        raise InputError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if draws is None:
        z = path_normals(seed, n_paths, grid.n_steps, antithetic=antithetic)
    else:
        z = np.asarray(draws, dtype=float)
        if z.shape != (n_paths, grid.n_steps):
            raise InputError(
                f"draws shape {z.shape} != {(n_paths, grid.n_steps)}"
            )
    dt = grid.dt
    sqdt = math.sqrt(dt)
    times = grid.times()
    values = np.empty((n_paths, grid.n_steps + 1))
    values[:, 0] = x0
    for s in range(grid.n_steps):
        values[:, s + 1] = _advance(
            spec_or_step, scheme, times[s], values[:, s], dt, sqdt * z[:, s]
        )
    return PathSet(times, values, seed, scheme)


@dataclass(frozen=True)
class McResult:
    estimate: float
    std_error: float
    n_paths: int
    seed: int


def mc_discounted_expectation(paths, payoff, discount=None, seed=None):
    """Mean and standard error of discounted per-path payoffs.

    ``payoff`` maps the path array (terminal vector or full paths) to one
    value per path; ``discount`` does the same for discount factors and
    defaults to 1.
    """
    if isinstance(paths, PathSet):
        values = paths.values
        if seed is None:
            seed = paths.seed
    else:
        values = np.asarray(paths)
    n = values.shape[0]
    if n < 2:
        raise InsufficientPathsError("standard error needs at least two paths")
    samples = np.asarray(payoff(values), dtype=float)
    if discount is not None:
        samples = samples * np.asarray(discount(values), dtype=float)
    if samples.shape != (n,):
        raise InputError("payoff/discount must produce one value per path")
    estimate = float(np.mean(samples))
    std_error = float(np.std(samples, ddof=1) / math.sqrt(n))
    return McResult(estimate, std_error, n, -1 if seed is None else int(seed))


def _coupled_increments(z_fine, factor):
    if factor == 1:
        return z_fine.copy()
    n_paths, n_fine = z_fine.shape
    return z_fine.reshape(n_paths, n_fine // factor, factor).sum(axis=2)


@dataclass(frozen=True)
class ConvergenceResult:
    dts: np.ndarray
    errors: np.ndarray
    slope: float


def strong_convergence_order(spec: SdeSpec, scheme, steps_ladder, x0=1.0,
                             t0=0.0, horizon=1.0, n_paths=10_000, seed=0):
    """Measured strong order of a scheme against the exact solution.

    The ladder lists step counts; every entry must divide the largest so
    the coarse Brownian increments are sums of the fine ones.  Returns
    the least-squares slope of log mean absolute terminal error against
    log dt.
    """
    steps = sorted(int(n) for n in steps_ladder)
    if len(steps) < 4:
        raise InputError("ladder needs at least four dt levels")
    if len(set(steps)) != len(steps):
        raise InputError("ladder levels must be distinct")
    n_max = steps[-1]
    for n in steps:
        if n_max % n:
            raise InputError(f"ladder not nested: {n} does not divide {n_max}")
    if spec.exact_step is None:
        raise SpecificationError("convergence study needs spec.exact_step")

    span = horizon - t0
    z_fine = path_normals(seed, n_paths, n_max) * math.sqrt(span / n_max)

    # exact reference on the finest grid (exact stepping composes exactly)
    x_ref = np.full(n_paths, float(x0))
    dt_fine = span / n_max
    for s in range(n_max):
        x_ref = spec.exact_step(t0 + s * dt_fine, x_ref, dt_fine, z_fine[:, s])

    dts = np.empty(len(steps))
    errors = np.empty(len(steps))
    for k, n in enumerate(steps):
        dt = span / n
        dw = _coupled_increments(z_fine, n_max // n)
        x = np.full(n_paths, float(x0))
        for s in range(n):
            x = _advance(spec, scheme, t0 + s * dt, x, dt, dw[:, s])
        dts[k] = dt
        errors[k] = np.mean(np.abs(x - x_ref))
    slope = float(np.polyfit(np.log(dts), np.log(errors), 1)[0])
    return ConvergenceResult(dts, errors, slope)
