"""Truncated, algebraic and absolute moments of phi^(s); Strang-Fix checks.

Moments are computed two independent ways: by direct summation over the
integer shifts (with a certified truncation tail) and, for the algebraic
moments, from derivatives of the numerically integrated Fourier transform
at the origin, which equals the shift sum once the transform and its
derivatives vanish at the nonzero multiples of 2*pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._numerics import EPS, compensated_sum, integrate, zeta_with_bound
from .density import DensityKernel
from .errors import (
    DivergenceRisk,
    InvalidInterval,
    OrderOutOfRange,
    ResidualImaginary,
    StrangFixUnverified,
    ZetaDivergence,
)

DIRECT = "direct-sum"
FOURIER = "poisson-fourier"

# per-term relative evaluation error allowance used in the rounding budget
_TERM_ULPS = 32


@dataclass(frozen=True)
class MomentQuery:
    s: int
    nu: float
    n: int | None = None
    x: float = 0.0
    interval: tuple[int, int] | None = None

    def __post_init__(self):
        if self.s < 0:
            raise OrderOutOfRange("derivative order must be >= 0")
        if self.nu < 0:
            raise ValueError("moment order must be >= 0")
        if self.interval is not None:
            check_interval(self.interval, self.n or 1)

    @property
    def key(self) -> tuple:
        return (self.s, self.nu, math.inf if self.n is None else self.n, self.x)


@dataclass(frozen=True)
class MomentReport:
    value: float
    tail_bound: float
    method: str
    radius: float = 0.0

    def __post_init__(self):
        for name in ("value", "tail_bound", "radius"):
            object.__setattr__(self, name, float(getattr(self, name)))


def check_interval(interval, n: int) -> tuple[int, int]:
    a, b = interval
    if float(a) != int(a) or float(b) != int(b):
        raise InvalidInterval(f"interval endpoints must be integers, got {interval}")
    a, b = int(a), int(b)
    if not a < b:
        raise InvalidInterval(f"need a < b, got {interval}")
    if n < 1 or math.ceil(n * a) > math.floor(n * b):
        raise InvalidInterval(f"empty index range for n={n} on {interval}")
    return a, b


def _require_integer(nu) -> int:
    if float(nu) != int(nu) or nu < 0:
        raise ValueError(f"algebraic moments need a non-negative integer order, got {nu}")
    return int(nu)


def _check_divergence(kernel: DensityKernel, s: int, nu: float):
    limit = kernel.decay_exponent(s)
    if nu >= limit:
        name = "alpha" if s == 0 else "beta"
        raise DivergenceRisk(f"moment order {nu} >= {name} = {limit}; series may diverge")


def _rounding_budget(abs_sum: float) -> float:
    return _TERM_ULPS * EPS * abs_sum


# -- truncated moments ------------------------------------------------------

def truncated_moment(kernel: DensityKernel, q: MomentQuery) -> MomentReport:
    """m^n_nu(phi^(s), n x) as an exact finite sum over k = na..nb."""
    if q.n is None or q.interval is None:
        raise InvalidInterval("truncated moments need n and an interval")
    kernel._check_order(q.s)
    a, b = check_interval(q.interval, q.n)
    nu = _require_integer(q.nu)
    u = q.n * q.x
    k = np.arange(q.n * a, q.n * b + 1, dtype=float)
    terms = kernel._eval(q.s, u - k) * (k - u) ** nu
    return MomentReport(math.fsum(terms), 0.0, DIRECT)


def telescoped_m0(kernel: DensityKernel, s: int, n: int, x: float, a: int, b: int) -> float:
    """Closed form of m^n_0(phi^(s), nx) after telescoping the shift sum.

    The boundary group at b enters with a minus sign.
    """
    kernel._check_order(s)
    a, b = check_interval((a, b), n)
    c = kernel.scale
    ev = kernel.source.evaluator
    # phi^(s)(z) = c^(s+1)/2 [sigma^(s)(cz+1) - sigma^(s)(cz-1)]; for c = 1
    # consecutive shifts cancel pairwise.
    if c != 1.0:
        raise ValueError("telescoping needs the undilated kernel")
    pts = np.array([n * (x - a) + 1.0, n * (x - a), n * (x - b), n * (x - b) - 1.0])
    v = ev(s, pts)
    return 0.5 * (v[0] + v[1]) - 0.5 * (v[2] + v[3])


def m0_defect(kernel: DensityKernel, n: int, x: float, a: int, b: int) -> float:
    """m^n_0(phi, nx) - 1 without cancellation.

    Telescoped form combined with ``1 - sigma(z) = sigma(-z)``.
    """
    a, b = check_interval((a, b), n)
    if kernel.scale != 1.0:
        raise ValueError("telescoping needs the undilated kernel")
    A, B = n * (x - a), n * (x - b)
    v = kernel.source.evaluator(0, np.array([-A - 1.0, -A, B, B - 1.0]))
    return -0.5 * math.fsum(v)


# -- algebraic moments ------------------------------------------------------

def _shift_terms(kernel: DensityKernel, s: int, nu: float, x: np.ndarray, R: float,
                 absolute: bool = False) -> np.ndarray:
    """(len(x), window) matrix of phi^(s)(x-k)(k-x)^nu over |x-k| <= R."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k0 = np.ceil(x - R)
    width = int(math.floor(2 * R)) + 2
    k = k0[:, None] + np.arange(width)[None, :]
    d = k - x[:, None]
    inside = np.abs(d) <= R
    vals = kernel._eval(s, -d)
    if absolute:
        terms = np.abs(vals) * np.abs(d) ** nu
    else:
        terms = vals * d ** nu
    return np.where(inside, terms, 0.0)


def algebraic_moment(kernel: DensityKernel, s: int, nu: int, x: float,
                     eps: float = 1e-14, radius: float | None = None) -> MomentReport:
    """A_nu(phi^(s), x) = sum_k phi^(s)(x-k)(k-x)^nu with certified tail.

    ``tail_bound`` is the truncation bound plus a rounding allowance for the
    retained terms.  ``radius`` overrides the radius derived from ``eps``.
    """
    kernel._check_order(s)
    nu = _require_integer(nu)
    _check_divergence(kernel, s, nu)
    R = kernel.moment_radius(s, nu, eps) if radius is None else float(radius)
    terms = _shift_terms(kernel, s, nu, np.array([x]), R)[0]
    value = math.fsum(terms)
    tail = kernel.sum_tail_bound(s, nu, R)
    return MomentReport(value, tail + _rounding_budget(math.fsum(np.abs(terms))), DIRECT, R)


def algebraic_moment_curve(kernel: DensityKernel, s: int, nu: int, xs,
                           eps: float = 1e-14) -> np.ndarray:
    """Vectorised A_nu(phi^(s), x) over many x (compensated sums)."""
    kernel._check_order(s)
    nu = _require_integer(nu)
    _check_divergence(kernel, s, nu)
    R = kernel.moment_radius(s, nu, eps)
    return compensated_sum(_shift_terms(kernel, s, nu, np.asarray(xs, dtype=float), R))


# -- absolute moments -------------------------------------------------------

def absolute_moment(kernel: DensityKernel, s: int, nu: float, grid_resolution: int = 1024,
                    eps: float = 1e-14, radius: float | None = None) -> MomentReport:
    """M_nu(phi^(s)) = sup_u sum_k |phi^(s)(u-k)| |u-k|^nu.

    The summand is 1-periodic in u, so the sup is taken over a uniform grid
    of [0, 1) followed by a finer pass around the grid maximiser.
    """
    kernel._check_order(s)
    if nu < 0:
        raise ValueError("moment order must be >= 0")
    _check_divergence(kernel, s, nu)
    R = kernel.moment_radius(s, nu, eps) if radius is None else float(radius)

    def sums(u):
        t = _shift_terms(kernel, s, nu, u, R, absolute=True)
        return compensated_sum(t), np.sum(t, axis=1)

    h = 1.0 / grid_resolution
    u = np.arange(grid_resolution) * h
    vals, _ = sums(u)
    i = int(np.argmax(vals))
    fine = u[i] + np.linspace(-h, h, 65)
    fvals, fabs = sums(fine)
    j = int(np.argmax(fvals))
    value = max(float(vals[i]), float(fvals[j]))
    tail = kernel.sum_tail_bound(s, nu, R)
    return MomentReport(value, tail + _rounding_budget(float(fabs[j])), DIRECT, R)


# -- Fourier side ------------------------------------------------------------

def fourier_transform(kernel: DensityKernel, v: float, tol: float = 1e-10, nu: int = 0,
                      s: int = 0) -> complex:
    """nu-th derivative of the Fourier transform of phi^(s) at v.

    ``int (-i t)^nu phi^(s)(t) exp(-i v t) dt`` by adaptive G7-K15 on
    ``[-R, R]``, with R chosen so the discarded tail integral is at most
    tol/4 and each of the real and imaginary parts integrated to tol/4.
    """
    kernel._check_order(s)
    nu = _require_integer(nu)
    if not tol > 0:
        raise ValueError("tol must be positive")
    R = kernel.integral_radius(s, nu, tol / 4.0)
    phase = (-1j) ** nu

    def integrand(part):
        def f(t):
            z = phase * t ** nu * kernel._eval(s, t) * np.exp(-1j * v * t)
            return z.real if part == "re" else z.imag
        return f

    pieces = max(8, int(math.ceil(2 * R * (1.0 + abs(v)) / 4.0)))
    re, _ = integrate(integrand("re"), -R, R, tol / 4.0, pieces=pieces)
    im, _ = integrate(integrand("im"), -R, R, tol / 4.0, pieces=pieces)
    return complex(re, im)


@dataclass(frozen=True)
class FourierCheck:
    k: int
    nu: int
    magnitude: float
    passed: bool


@dataclass(frozen=True)
class ConstancyCheck:
    nu: int
    spread: float
    passed: bool


@dataclass(frozen=True)
class StrangFixReport:
    kernel: str
    k_max: int
    nu_max: int
    tol: float
    constancy_tol: float
    fourier: tuple[FourierCheck, ...]
    constancy: tuple[ConstancyCheck, ...]

    @property
    def fourier_passed(self) -> bool:
        return all(c.passed for c in self.fourier)

    @property
    def constancy_passed(self) -> bool:
        return all(c.passed for c in self.constancy)

    @property
    def passed(self) -> bool:
        return self.fourier_passed and self.constancy_passed

    def aliasing(self, nu: int) -> float:
        """Sum of |phi_hat^(nu)(2 pi k)| over the checked k != 0."""
        return math.fsum(c.magnitude for c in self.fourier if c.nu == nu)


def _fourier_checks(kernel, k_max, nu_max, tol, quad_tol):
    out = []
    for nu in range(nu_max + 1):
        for k in [j for kk in range(1, k_max + 1) for j in (-kk, kk)]:
            mag = abs(fourier_transform(kernel, 2 * math.pi * k, quad_tol, nu=nu))
            out.append(FourierCheck(k, nu, mag, mag + quad_tol <= tol))
    return tuple(out)


def verify_strang_fix(kernel: DensityKernel, k_max: int = 3, nu_max: int = 2,
                      tol: float = 1e-6, constancy_tol: float | None = None,
                      x_points: int = 64) -> StrangFixReport:
    """Two independent checks of the Strang-Fix property.

    (i) ``|phi_hat^(nu)(2 pi k)| <= tol`` for ``1 <= |k| <= k_max``;
    (ii) ``max - min`` of ``A_nu(phi, x)`` over a grid of [0, 1) is at most
    ``constancy_tol`` (defaults to ``tol``).  Magnitudes count as passing
    only with the quadrature error included.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    if not 0 <= nu_max <= kernel.max_order:
        raise OrderOutOfRange(f"nu_max {nu_max} outside 0..{kernel.max_order}")
    ctol = tol if constancy_tol is None else constancy_tol
    fourier = _fourier_checks(kernel, k_max, nu_max, tol, min(tol, ctol) / 100.0)
    xs = np.arange(x_points) / x_points
    constancy = []
    for nu in range(nu_max + 1):
        vals = algebraic_moment_curve(kernel, 0, nu, xs, eps=ctol / 100.0)
        spread = float(np.max(vals) - np.min(vals))
        constancy.append(ConstancyCheck(nu, spread, spread <= ctol))
    return StrangFixReport(kernel.name, k_max, nu_max, tol, ctol, fourier, tuple(constancy))


def fourier_moment(kernel: DensityKernel, nu: int, tol: float = 1e-10,
                   strang_fix: StrangFixReport | None = None,
                   strang_fix_tol: float = 1e-6, k_max: int = 3) -> MomentReport:
    """``i^(-nu) phi_hat^(nu)(0)``, the shift-invariant part of A_nu(phi).

    Requires the Fourier side of the Strang-Fix check for all orders up to
    nu; it is run here (``k_max``, ``strang_fix_tol``) unless a report is
    supplied.  ``tail_bound`` is the quadrature budget plus the measured
    aliasing ``sum_{k != 0} |phi_hat^(nu)(2 pi k)|``.
    """
    nu = _require_integer(nu)
    _check_divergence(kernel, 0, nu)
    if strang_fix is None:
        checks = _fourier_checks(kernel, k_max, nu, strang_fix_tol, strang_fix_tol / 100.0)
        aliasing = math.fsum(c.magnitude for c in checks if c.nu == nu)
        ok = all(c.passed for c in checks)
    else:
        if strang_fix.nu_max < nu:
            raise StrangFixUnverified(f"report covers orders <= {strang_fix.nu_max}, need {nu}")
        checks = [c for c in strang_fix.fourier if c.nu <= nu]
        aliasing = strang_fix.aliasing(nu)
        ok = all(c.passed for c in checks)
    if not ok:
        worst = max(checks, key=lambda c: c.magnitude)
        raise StrangFixUnverified(
            f"|phi_hat^({worst.nu})(2 pi {worst.k})| = {worst.magnitude:.3e} exceeds tolerance")
    z = fourier_transform(kernel, 0.0, tol, nu=nu) * (1j) ** (-nu)
    if abs(z.imag) > tol:
        raise ResidualImaginary(f"imaginary residue {z.imag:.3e} exceeds {tol:.3e}")
    return MomentReport(z.real, tol + aliasing, FOURIER)


# -- constants for the tail estimates -----------------------------------------

def bound_constant(beta: float, s: int, j: int, delta: float, C_s: float) -> float:
    """C_s (2 delta)^(-p) zeta(p) with p = (beta - j + 1)/2."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    p = (beta - j + 1.0) / 2.0
    if not p > 1.0:
        raise ZetaDivergence(f"(beta - j + 1)/2 = {p} <= 1; zeta diverges")
    z, _ = zeta_with_bound(p)
    return C_s * (2.0 * delta) ** (-p) * z


__all__ = [
    "ConstancyCheck", "DIRECT", "FOURIER", "FourierCheck", "MomentQuery", "MomentReport",
    "StrangFixReport", "absolute_moment", "algebraic_moment", "algebraic_moment_curve",
    "bound_constant", "check_interval", "fourier_moment", "fourier_transform",
    "m0_defect", "telescoped_m0", "truncated_moment", "verify_strang_fix",
]
