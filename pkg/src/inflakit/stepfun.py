"""Piecewise-constant functions on a bounded time domain.

Used for instantaneous forwards, drift term structures and volatility
profiles.  Interval k runs from ``times[k-1]`` (or 0) up to ``times[k]``
and carries ``values[k]``; the domain is ``[0, times[-1]]``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InputError


@dataclass(frozen=True)
class StepFunction:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or values.ndim != 1:
            raise InputError("times and values must be one-dimensional")
        if len(times) != len(values):
            raise InputError("times and values must have equal length")
        if len(times) == 0:
            raise InputError("step function needs at least one interval")
        if times[0] <= 0.0 or np.any(np.diff(times) <= 0.0):
            raise InputError("times must be strictly increasing and start above 0")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, value, end_time):
        return cls(np.array([float(end_time)]), np.array([float(value)]))

    @property
    def end_time(self):
        return float(self.times[-1])

    def _check_domain(self, t):
        if t < 0.0 or t > self.end_time + 1e-12:
            raise DomainError(
                f"t={t} outside step-function domain [0, {self.end_time}]"
            )

    def __call__(self, t):
        self._check_domain(t)
        k = int(np.searchsorted(self.times, t, side="right"))
        if k == len(self.times):  # right endpoint belongs to the last interval
            k -= 1
        return float(self.values[k])

    def segments(self, t0, t1):
        """Yield (a, b, value) covering [t0, t1] split at interior breakpoints."""
        if t1 < t0:
            raise DomainError(f"segment range reversed: [{t0}, {t1}]")
        self._check_domain(t0)
        self._check_domain(t1)
        edges = [t0]
        for t in self.times[:-1]:
            if t0 < t < t1:
                edges.append(float(t))
        edges.append(t1)
        for a, b in zip(edges[:-1], edges[1:]):
            if b > a:
                yield a, b, self(0.5 * (a + b))

    def integral(self, t0, t1):
        return sum(v * (b - a) for a, b, v in self.segments(t0, t1))

    def shifted(self, delta):
        """New step function with every value shifted by ``delta``."""
        return StepFunction(self.times, self.values + float(delta))
