"""Convergence studies, moduli of continuity and the quantitative bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .density import DensityKernel
from .errors import HypothesisViolation, OrderOutOfRange, OutOfDomain
from .moments import (
    MomentReport,
    StrangFixReport,
    absolute_moment,
    bound_constant,
    fourier_moment,
    m0_defect,
    verify_strang_fix,
)
from .operators import (
    GridSample,
    in_guarantee_region,
    inner_interval,
    nn_operator_simplified,
    operator_value,
    sample_function,
)
from .testfunctions import TestFunction

DEFAULT_INTERVAL = (0, 3)
DEFAULT_DELTA = 0.25
DEFAULT_GRID = 241


# -- measurement -------------------------------------------------------------

def modulus_of_continuity(g, h: float, interval=DEFAULT_INTERVAL,
                          grid_resolution: int = 2001) -> float:
    """Lower estimate of sup{|g(x) - g(t)| : x, t in [a, b], |x - t| <= h}.

    Combines all grid pairs within distance h, pairs at exact offset h, and
    a refinement pass around the best exact-offset pair.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    a, b = map(float, interval)
    x = np.linspace(a, b, grid_resolution)
    y = np.asarray(g(x), dtype=float)
    if h >= b - a:
        return float(np.max(y) - np.min(y))
    step = x[1] - x[0]
    best = 0.0
    for lag in range(1, min(int(h / step * (1 + 1e-12)), len(x) - 1) + 1):
        best = max(best, float(np.max(np.abs(y[lag:] - y[:-lag]))))
    xs = x[x <= b - h]
    diff = np.abs(np.asarray(g(xs + h), dtype=float) - np.asarray(g(xs), dtype=float))
    i = int(np.argmax(diff))
    best = max(best, float(diff[i]))
    fine = np.clip(np.linspace(xs[i] - step, xs[i] + step, 65), a, b - h)
    fdiff = np.abs(np.asarray(g(fine + h), dtype=float) - np.asarray(g(fine), dtype=float))
    return max(best, float(np.max(fdiff)))


def evaluation_grid(interval, delta: float, grid_resolution: int = DEFAULT_GRID,
                    seed: int | None = None) -> np.ndarray:
    """Uniform grid of I_delta; a nonzero seed jitters interior points by < step/4."""
    lo, hi = inner_interval(interval, delta)
    x = np.linspace(lo, hi, grid_resolution)
    if seed:
        rng = np.random.default_rng(seed)
        step = (hi - lo) / (grid_resolution - 1)
        x[1:-1] += rng.uniform(-0.25 * step, 0.25 * step, size=grid_resolution - 2)
    return x


def sup_error(approx, target, delta: float, interval=DEFAULT_INTERVAL,
              grid_resolution: int = DEFAULT_GRID, seed: int | None = None) -> float:
    x = evaluation_grid(interval, delta, grid_resolution, seed)
    return float(np.max(np.abs(np.asarray(approx(x)) - np.asarray(target(x)))))


@dataclass(frozen=True)
class OrderFit:
    order: float
    residual: float


def fit_order(ns, errors, drop_first: bool = True) -> OrderFit:
    """Least-squares slope of log(error) against log(n); order = -slope."""
    ns = np.asarray(ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if drop_first and len(ns) > 2:
        ns, errors = ns[1:], errors[1:]
    if np.any(errors <= 0) or len(ns) < 2:
        return OrderFit(math.nan, math.nan)
    X, Y = np.log(ns), np.log(errors)
    slope, icept = np.polyfit(X, Y, 1)
    res = Y - (slope * X + icept)
    return OrderFit(float(-slope), float(np.sqrt(np.mean(res ** 2))))


# -- bounds ------------------------------------------------------------------

def _upper(rep: MomentReport) -> float:
    return rep.value + rep.tail_bound


def _absolute(kernel: DensityKernel, s: int, nu: float) -> float:
    return kernel._memo(("M", s, float(nu)), lambda: _upper(absolute_moment(kernel, s, nu)))


def _check_scale(kernel: DensityKernel, s: int, n: int, delta: float):
    K = kernel.power_constants(s).K
    if n * delta < K:
        raise HypothesisViolation(
            f"n = {n} too small: need n*delta >= K_{s} = {K:g} for the tail estimates")


@dataclass(frozen=True)
class BoundParts:
    tail: float
    modulus: float

    @property
    def total(self) -> float:
        return self.tail + self.modulus


def _bound_parts(kernel, tf, order, s, exponent, n, delta, interval, scale_power):
    C = kernel.power_constants(s).C
    tail = 0.0
    for i in range(order + 1):
        R = bound_constant(exponent, s, i, delta, C)
        tail += (tf.sup_norm(i, interval) / math.factorial(i) * R
                 * n ** (scale_power - i - (exponent - i + 1) / 2.0))
    w = modulus_of_continuity(tf.derivative(order), 1.0 / n, interval)
    M = _absolute(kernel, s, order) + _absolute(kernel, s, order + 1)
    return BoundParts(2.0 * tail, w / math.factorial(order) * M)


def simultaneous_bound_parts(kernel: DensityKernel, tf: TestFunction, s: int, n: int,
                             delta: float, interval=DEFAULT_INTERVAL,
                             m: int | None = None) -> BoundParts:
    m = kernel.max_order if m is None else m
    if not 0 <= s <= min(m, kernel.max_order):
        raise OrderOutOfRange(f"s = {s} outside 0..{m}")
    if not kernel.beta > 2 * m:
        raise HypothesisViolation(f"beta = {kernel.beta} must exceed 2m = {2 * m}")
    inner_interval(interval, delta)
    _check_scale(kernel, s, n, delta)
    return _bound_parts(kernel, tf, s, s, kernel.decay_exponent(s), n, delta, interval, s)


def theoretical_bound_simultaneous(kernel: DensityKernel, tf: TestFunction, s: int, n: int,
                                   delta: float, interval=DEFAULT_INTERVAL,
                                   m: int | None = None) -> float:
    """Upper bound on sup over I_delta of |d^s F~_n f - f^(s)|.

    Tail part: ``2 sum_i |f^(i)|/i! Rbar_{beta,s,i} n^(s-i-(beta-i+1)/2)``;
    modulus part: ``w(f^(s), 1/n)/s! [M_s + M_(s+1)]`` of phi^(s).  For
    s = 0 the same formula with alpha in place of beta bounds F~_n itself.
    """
    return simultaneous_bound_parts(kernel, tf, s, n, delta, interval, m).total


@dataclass(frozen=True)
class VoronovskajaHypotheses:
    m: int
    A0m: float
    lower_moments: tuple[float, ...]
    strang_fix: StrangFixReport = field(repr=False)


def voronovskaja_hypotheses(kernel: DensityKernel, m: int,
                            tol: float = 1e-6) -> VoronovskajaHypotheses:
    """Check alpha > 2m, Strang-Fix up to m, A_{0,j} = 0 (j < m), A_{0,m} != 0."""
    if not kernel.alpha > 2 * m:
        raise HypothesisViolation(f"alpha = {kernel.alpha} must exceed 2m = {2 * m}")
    if m > kernel.max_order:
        raise HypothesisViolation(f"m = {m} exceeds the kernel's order {kernel.max_order}")

    def compute():
        sf = verify_strang_fix(kernel, k_max=3, nu_max=m, tol=tol)
        if not sf.passed:
            return sf, None, None
        lower = tuple(fourier_moment(kernel, j, strang_fix=sf).value for j in range(1, m))
        top = fourier_moment(kernel, m, strang_fix=sf).value
        return sf, lower, top

    sf, lower, top = kernel._memo(("voronovskaja", m, tol), compute)
    if lower is None:
        raise HypothesisViolation("Strang-Fix verification failed")
    for j, A in enumerate(lower, start=1):
        if abs(A) > tol:
            raise HypothesisViolation(f"A_(0,{j}) = {A:.6g} is not zero")
    if abs(top) <= tol:
        raise HypothesisViolation(f"A_(0,{m}) vanishes")
    return VoronovskajaHypotheses(m, top, lower, sf)


def voronovskaja_bound_parts(kernel, tf, m, n, delta, interval=DEFAULT_INTERVAL) -> BoundParts:
    voronovskaja_hypotheses(kernel, m)
    inner_interval(interval, delta)
    _check_scale(kernel, 0, n, delta)
    return _bound_parts(kernel, tf, m, 0, kernel.alpha, n, delta, interval, m)


def theoretical_bound_voronovskaja(kernel: DensityKernel, tf: TestFunction, m: int, n: int,
                                   delta: float, interval=DEFAULT_INTERVAL) -> float:
    """Bound on |n^m (F~_n f - f) - f^(m) A_{0,m}/m!| over I_delta."""
    return voronovskaja_bound_parts(kernel, tf, m, n, delta, interval).total


# -- studies -----------------------------------------------------------------

@dataclass(frozen=True)
class ErrorRow:
    s: int
    n: int
    sup_error: float
    bound: float

    def __post_init__(self):
        object.__setattr__(self, "sup_error", float(self.sup_error))
        object.__setattr__(self, "bound", float(self.bound))


@dataclass(frozen=True)
class VoronovskajaRow:
    n: int
    x: float
    scaled_residual: float
    predicted_limit: float
    abs_deviation: float
    bound: float

    def __post_init__(self):
        for name in ("scaled_residual", "predicted_limit", "abs_deviation", "bound"):
            object.__setattr__(self, name, float(getattr(self, name)))


@dataclass
class ConvergenceReport:
    activation: str
    function: str
    delta: float
    beta: float
    alpha: float
    m: int
    rows: list = field(default_factory=list)
    orders: dict = field(default_factory=dict)

    def errors(self, s: int) -> list[float]:
        return [r.sup_error for r in self.rows if getattr(r, "s", None) == s]

    def bounds(self, s: int) -> list[float]:
        return [r.bound for r in self.rows if getattr(r, "s", None) == s]

    @property
    def bound_dominates(self) -> bool:
        if self.rows and isinstance(self.rows[0], VoronovskajaRow):
            return all(r.abs_deviation <= r.bound for r in self.rows)
        return all(r.sup_error <= r.bound for r in self.rows)


def _check_n_list(n_list):
    n_list = [int(n) for n in n_list]
    if len(n_list) < 2 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly increasing with at least two entries")
    return n_list


def convergence_study(kernel: DensityKernel, tf: TestFunction, s_list, n_list,
                      delta: float = DEFAULT_DELTA, grid_resolution: int = DEFAULT_GRID,
                      interval=DEFAULT_INTERVAL, m: int | None = None,
                      seed: int | None = None) -> ConvergenceReport:
    """Sup errors of d^s F~_n f against f^(s) on I_delta, with bounds and orders."""
    n_list = _check_n_list(n_list)
    m = kernel.max_order if m is None else m
    a, b = interval
    rep = ConvergenceReport(kernel.name, tf.id, delta, kernel.beta, kernel.alpha, m)
    for s in s_list:
        for n in n_list:
            sample = sample_function(tf, n, a, b)
            err = sup_error(lambda x: operator_value(sample, kernel, s, x), tf.derivative(s),
                            delta, interval, grid_resolution, seed)
            bound = theoretical_bound_simultaneous(kernel, tf, s, n, delta, interval, m)
            rep.rows.append(ErrorRow(s, n, err, bound))
        rep.orders[s] = fit_order(n_list, rep.errors(s))
    return rep


def scaled_residual(sample: GridSample, kernel: DensityKernel, tf: TestFunction, m: int,
                    x: float) -> float:
    """n^m (F~_n f - f)(x), summed in centred form to avoid cancellation.

    ``F~_n f - f(x) = F~_n(f - f(x)) + f(x) (m_0 - 1)``.
    """
    fx = float(tf(x))
    centred = GridSample(sample.interval, sample.n, sample.values - fx)
    defect = m0_defect(kernel, sample.n, x, sample.a, sample.b)
    return float(sample.n) ** m * (nn_operator_simplified(centred, kernel, x) + fx * defect)


def voronovskaja_study(kernel: DensityKernel, tf: TestFunction, m: int, n_list, x_list,
                       delta: float = DEFAULT_DELTA,
                       interval=DEFAULT_INTERVAL) -> ConvergenceReport:
    """Scaled residuals n^m (F~_n f - f)(x) against f^(m)(x) A_{0,m} / m!."""
    n_list = _check_n_list(n_list)
    hyp = voronovskaja_hypotheses(kernel, m)
    xs = np.asarray(x_list, dtype=float)
    if not np.all(in_guarantee_region(xs, interval, delta)):
        raise OutOfDomain("Voronovskaja points must lie in I_delta")
    a, b = interval
    rep = ConvergenceReport(kernel.name, tf.id, delta, kernel.beta, kernel.alpha, m)
    for n in n_list:
        sample = sample_function(tf, n, a, b)
        bound = theoretical_bound_voronovskaja(kernel, tf, m, n, delta, interval)
        for x in xs:
            res = scaled_residual(sample, kernel, tf, m, float(x))
            limit = float(tf.derivative(m)(x)) * hyp.A0m / math.factorial(m)
            rep.rows.append(VoronovskajaRow(n, float(x), res, limit, abs(res - limit), bound))
    return rep


__all__ = [
    "BoundParts", "ConvergenceReport", "ErrorRow", "OrderFit", "VoronovskajaHypotheses",
    "VoronovskajaRow", "convergence_study", "evaluation_grid", "fit_order",
    "modulus_of_continuity", "scaled_residual", "simultaneous_bound_parts", "sup_error",
    "theoretical_bound_simultaneous", "theoretical_bound_voronovskaja",
    "voronovskaja_bound_parts", "voronovskaja_hypotheses", "voronovskaja_study",
]
