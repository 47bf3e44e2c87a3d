"""Density (kernel) functions phi_sigma and their certified tails.

``phi(x) = c/2 [sigma(c x + 1) - sigma(c x - 1)]`` where ``c`` is a dilation
(``c = 1`` is the kernel of the operators; other values only serve as
negative controls in the Strang-Fix checks).

Two tail models are supported:

* ``"exponential"``: ``|phi^(s)(x)| <= B_s exp(-L |x|)`` for ``|x| >= 1/c``,
  derived from the activation's exponential certificate.
* ``"power"``: ``|phi^(s)(x)| <= C_s |x|^(-p_s)`` for ``|x| >= K_s`` with
  constants fitted on a scan; ``p_0 = alpha + 1`` and ``p_s = beta + 1``.

Every truncation radius and tail sum in the package comes from one of these
bounds.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceRisk, OrderOutOfRange
from .sigmoids import DEFAULT_SCAN, Sigmoidal, fit_power_decay


@dataclass(frozen=True)
class PowerTail:
    K: float
    C: float
    exponent: float


@dataclass(frozen=True, eq=False)
class DensityKernel:
    source: Sigmoidal
    scale: float = 1.0
    tail: str = "auto"
    scan_range: tuple[float, float] = DEFAULT_SCAN
    _cache: dict = field(default_factory=dict, init=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    def __post_init__(self):
        if self.tail not in ("auto", "exponential", "power"):
            raise ValueError(f"unknown tail model {self.tail!r}")
        if self.tail == "exponential" and self.source.exp_tail is None:
            raise ValueError(f"{self.source.id} has no exponential tail certificate")
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    @property
    def max_order(self) -> int:
        return self.source.max_order

    @property
    def alpha(self) -> float:
        return self.source.alpha

    @property
    def beta(self) -> float:
        return self.source.beta

    @property
    def tail_model(self) -> str:
        if self.tail == "auto":
            return "exponential" if self.source.exp_tail is not None else "power"
        return self.tail

    @property
    def name(self) -> str:
        if self.scale == 1.0:
            return self.source.id
        return f"{self.source.id}@x{self.scale:g}"

    def decay_exponent(self, s: int) -> float:
        """Polynomial decay exponent of |phi^(s)|: alpha for s = 0, beta otherwise."""
        return self.alpha if s == 0 else self.beta

    def _memo(self, key, compute):
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        value = compute()
        with self._lock:
            return self._cache.setdefault(key, value)

    # -- evaluation -----------------------------------------------------------

    def __call__(self, x, s: int = 0):
        return phi(self, s, x)

    def _eval(self, s: int, x: np.ndarray) -> np.ndarray:
        c = self.scale
        y = -c * np.abs(x)
        ev = self.source.evaluator
        val = 0.5 * c ** (s + 1) * (ev(s, y + 1.0) - ev(s, y - 1.0))
        if s % 2:
            return np.where(x > 0, -val, val)
        return val

    # -- exponential tail -----------------------------------------------------

    def exp_constants(self, s: int) -> tuple[float, float, float]:
        """(B_s, L, x0): ``|phi^(s)(x)| <= B_s exp(-L|x|)`` for ``|x| >= x0``."""
        et = self.source.exp_tail
        c, lam = self.scale, et.rate
        if s == 0:
            B = c * 0.5 * et.bounds[0] * math.exp(lam)
        else:
            B = c ** (s + 1) * et.bounds[s] * math.cosh(lam)
        return B, lam * c, 1.0 / c

    # -- power tail -----------------------------------------------------------

    def power_constants(self, s: int) -> PowerTail:
        """Fitted (K_s, C_s) for ``phi^(s)`` itself, cached per order."""
        self._check_order(s)

        def compute():
            p = self.decay_exponent(s) + 1.0
            mag = lambda t: np.abs(self._eval(s, t))  # noqa: E731  (phi^(s) has parity)
            K, C = fit_power_decay(mag, p, self.scan_range)
            return PowerTail(K, C, p)

        return self._memo(("power", s), compute)

    def _check_order(self, s: int):
        if not 0 <= s <= self.max_order:
            raise OrderOutOfRange(f"derivative order {s} outside 0..{self.max_order}")

    # -- truncation -----------------------------------------------------------

    def pointwise_radius(self, s: int, eps: float) -> float:
        if self.tail_model == "exponential":
            B, L, x0 = self.exp_constants(s)
            return max(x0, math.log(B / eps) / L)
        pt = self.power_constants(s)
        return max(pt.K, (pt.C / eps) ** (1.0 / pt.exponent))

    def sum_tail_bound(self, s: int, nu: float, R: float) -> float:
        """Bound on ``sum_{|u-k| > R} |phi^(s)(u-k)| |u-k|^nu``, uniform in u."""
        if self.tail_model == "exponential":
            B, L, x0 = self.exp_constants(s)
            if R < x0 or nu / R >= L:
                return math.inf
            return 2.0 * B * R ** nu * math.exp(-L * R) / (1.0 - math.exp(nu / R - L))
        pt = self.power_constants(s)
        q = pt.exponent - nu
        if R < pt.K or q <= 1.0:
            return math.inf
        return 2.0 * pt.C * (R ** -q + R ** (1.0 - q) / (q - 1.0))

    def integral_tail_bound(self, s: int, nu: float, R: float) -> float:
        """Bound on ``int_{|t| > R} |phi^(s)(t)| |t|^nu dt``."""
        if self.tail_model == "exponential":
            B, L, x0 = self.exp_constants(s)
            if R < x0 or nu / R >= L:
                return math.inf
            return 2.0 * B * R ** nu * math.exp(-L * R) / (L - nu / R)
        pt = self.power_constants(s)
        q = pt.exponent - nu
        if R < pt.K or q <= 1.0:
            return math.inf
        return 2.0 * pt.C * R ** (1.0 - q) / (q - 1.0)

    def _solve_radius(self, bound, eps: float, r0: float) -> float:
        lo = r0
        if bound(lo) <= eps:
            return lo
        hi = max(2.0 * lo, lo + 1.0)
        while bound(hi) > eps:
            lo, hi = hi, 2.0 * hi
            if hi > 1e12:
                raise DivergenceRisk("no finite truncation radius reaches the tolerance")
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if bound(mid) <= eps:
                hi = mid
            else:
                lo = mid
            if hi - lo <= 1e-6 * hi:
                break
        return hi

    def moment_radius(self, s: int, nu: float, eps: float) -> float:
        """Smallest radius whose discrete tail bound is at most ``eps``."""
        if not eps > 0:
            raise ValueError("eps must be positive")
        key = ("sum", s, float(nu), float(eps))
        return self._memo(key, lambda: self._solve_radius(
            lambda R: self.sum_tail_bound(s, nu, R), eps, self._min_radius(s)))

    def integral_radius(self, s: int, nu: float, eps: float) -> float:
        key = ("int", s, float(nu), float(eps))
        return self._memo(key, lambda: self._solve_radius(
            lambda R: self.integral_tail_bound(s, nu, R), eps, self._min_radius(s)))

    def _min_radius(self, s: int) -> float:
        if self.tail_model == "exponential":
            return self.exp_constants(s)[2]
        return self.power_constants(s).K


def phi(kernel: DensityKernel, s: int, x):
    """phi^(s)(x) = c^(s+1)/2 [sigma^(s)(cx+1) - sigma^(s)(cx-1)]."""
    kernel._check_order(s)
    arr = np.asarray(x, dtype=float)
    out = kernel._eval(s, arr)
    return float(out) if out.ndim == 0 else out


def effective_support_radius(kernel: DensityKernel, s: int, eps: float) -> float:
    """R with ``|phi^(s)(x)| <= eps`` for ``|x| >= R``; memoised per (s, eps)."""
    kernel._check_order(s)
    if not eps > 0:
        raise ValueError("eps must be positive")
    return kernel._memo(("pointwise", s, float(eps)), lambda: kernel.pointwise_radius(s, eps))


def make_kernel(activation: str = "logistic", max_order: int = 2, beta=None, alpha=None,
                scale: float = 1.0, tail: str = "auto", decay: dict | None = None) -> DensityKernel:
    from .sigmoids import get_sigmoid

    sig = get_sigmoid(activation, max_order, beta=beta, alpha=alpha, decay=decay)
    return DensityKernel(sig, scale=scale, tail=tail)


__all__ = ["DensityKernel", "PowerTail", "effective_support_radius", "make_kernel", "phi"]
