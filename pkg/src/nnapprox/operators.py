"""NN operators F_n, the simplified F~_n and the derivatives d^s/dx^s F~_n.

All operators work from the samples f(k/n), k = na..nb, only.  Terms with
``|nx - k|`` beyond the kernel's effective support radius at 1e-16 are
skipped and the remaining ones are accumulated with compensation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._numerics import compensated_sum
from .density import DensityKernel, effective_support_radius
from .errors import DegenerateNormalizer, NonFiniteSample, OrderOutOfRange, OutOfDomain
from .moments import check_interval

SKIP_EPS = 1e-16


@dataclass(frozen=True, eq=False)
class GridSample:
    """Samples f(k/n); ``values[k - na]`` holds f(k/n)."""

    interval: tuple[int, int]
    n: int
    values: np.ndarray

    def __post_init__(self):
        a, b = check_interval(self.interval, self.n)
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.n * (b - a) + 1,):
            raise ValueError(
                f"expected {self.n * (b - a) + 1} samples, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise NonFiniteSample("samples must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "interval", (a, b))
        object.__setattr__(self, "values", vals)

    @property
    def a(self) -> int:
        return self.interval[0]

    @property
    def b(self) -> int:
        return self.interval[1]

    @property
    def k_min(self) -> int:
        return self.n * self.a

    @property
    def k_max(self) -> int:
        return self.n * self.b


@dataclass(frozen=True)
class OperatorConfig:
    kernel: DensityKernel
    delta: float
    s: int = 0

    def inner_interval(self, interval) -> tuple[float, float]:
        return inner_interval(interval, self.delta)


def inner_interval(interval, delta: float) -> tuple[float, float]:
    """I_delta = [a + delta, b - delta]; must be non-trivial."""
    a, b = interval
    if not delta > 0 or not a + delta < b - delta:
        raise ValueError(f"delta={delta} leaves no interior of {interval}")
    return a + delta, b - delta


def in_guarantee_region(x, interval, delta: float):
    lo, hi = inner_interval(interval, delta)
    x = np.asarray(x, dtype=float)
    return (x >= lo) & (x <= hi)


def sample_function(f: Callable[[float], float], n: int, a: int, b: int) -> GridSample:
    a, b = check_interval((a, b), n)
    vals = np.array([f(k / n) for k in range(n * a, n * b + 1)], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteSample("f produced non-finite samples")
    return GridSample((a, b), n, vals)


def _weighted_sums(sample: GridSample, kernel: DensityKernel, s: int, x,
                   with_weights: bool = False):
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if np.any(x < sample.a) or np.any(x > sample.b):
        raise OutOfDomain(f"x must lie in [{sample.a}, {sample.b}]")
    R = effective_support_radius(kernel, s, SKIP_EPS)
    u = sample.n * x
    width = int(math.floor(2 * R)) + 2
    k = np.ceil(u - R)[:, None] + np.arange(width)[None, :]
    keep = (k >= sample.k_min) & (k <= sample.k_max) & (np.abs(u[:, None] - k) <= R)
    idx = np.clip(k - sample.k_min, 0, len(sample.values) - 1).astype(int)
    w = np.where(keep, kernel._eval(s, u[:, None] - k), 0.0)
    num = compensated_sum(w * sample.values[idx])
    den = compensated_sum(w) if with_weights else None
    return num, den, scalar


def nn_operator(sample: GridSample, kernel: DensityKernel, x):
    """F_n(f, x): samples weighted by phi(nx - k), divided by the weight sum."""
    num, den, scalar = _weighted_sums(sample, kernel, 0, x, with_weights=True)
    if np.any(den <= np.finfo(float).tiny):
        raise DegenerateNormalizer("sum of phi(nx - k) vanished")
    out = num / den
    return float(out[0]) if scalar else out


def nn_operator_simplified(sample: GridSample, kernel: DensityKernel, x):
    """F~_n(f, x) = sum_k f(k/n) phi(nx - k), no normaliser."""
    num, _, scalar = _weighted_sums(sample, kernel, 0, x)
    return float(num[0]) if scalar else num


def nn_operator_derivative(sample: GridSample, kernel: DensityKernel, s: int, x):
    """d^s/dx^s F~_n(f, x) = n^s sum_k f(k/n) phi^(s)(nx - k)."""
    if not 1 <= s <= kernel.max_order:
        raise OrderOutOfRange(f"derivative order {s} outside 1..{kernel.max_order}")
    num, _, scalar = _weighted_sums(sample, kernel, s, x)
    out = float(sample.n) ** s * num
    return float(out[0]) if scalar else out


def operator_value(sample: GridSample, kernel: DensityKernel, s: int, x):
    """d^s F~_n for any s >= 0 (s = 0 gives F~_n itself)."""
    if s == 0:
        return nn_operator_simplified(sample, kernel, x)
    return nn_operator_derivative(sample, kernel, s, x)


__all__ = [
    "GridSample", "OperatorConfig", "in_guarantee_region", "inner_interval", "nn_operator",
    "nn_operator_derivative", "nn_operator_simplified", "operator_value", "sample_function",
]
