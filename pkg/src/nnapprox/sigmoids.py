"""Catalog of sigmoidal activations with exact derivatives and decay metadata.

Catalog entries are driven by an auxiliary variable ``w(x)`` that obeys an
autonomous polynomial ODE ``w' = g(w)`` while ``sigma = h(w)`` is a
polynomial in ``w``.  Every derivative ``sigma^(s)`` is then a polynomial
``P_s(w)`` obtained from ``P_{s+1} = P_s' * g`` with no numerical
differentiation:

* logistic:  ``w = sigma``,  ``g(w) = w - w^2``,  ``h(w) = w``
* tanh:      ``w = tanh x``, ``g(w) = 1 - w^2``,  ``h(w) = (1 + w) / 2``

Polynomials are evaluated on the left half-line only, in the shifted
variable ``d = w - w(-inf)`` which is computed without cancellation there;
the right half-line follows from the symmetry of ``sigma - 1/2``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial

from .errors import FitFailure, NonFiniteInput, OrderOutOfRange

Evaluator = Callable[[int, np.ndarray], np.ndarray]

SAFETY_FACTOR = 1.1
DEFAULT_SCAN = (1.0, 100.0)
SCAN_STEP = 0.01


@dataclass(frozen=True)
class ExpTail:
    """Exponential tail certificate.

    ``|sigma^(s)(x)| <= bounds[s] * exp(-rate*|x|)`` for ``s >= 1`` and all
    real x; ``sigma(x) <= bounds[0] * exp(rate*x)`` for ``x <= 0``.
    """

    rate: float
    bounds: tuple[float, ...]


@dataclass(frozen=True)
class Sigmoidal:
    id: str
    max_order: int
    alpha: float
    beta: float
    # (K_s, C_s) for s = 1..max_order, valid with exponent beta + 1
    decay_constants: tuple[tuple[float, float], ...]
    # (K_0, C_0) for the left tail sigma(x) <= C_0 |x|^(-alpha-1), x <= -K_0
    alpha_constants: tuple[float, float]
    evaluator: Evaluator = field(repr=False, compare=False)
    exp_tail: ExpTail | None = field(default=None, repr=False, compare=False)

    def __call__(self, x, s: int = 0):
        return eval_sigmoid(self, s, x)

    def K(self, s: int) -> float:
        return self.decay_constants[s - 1][0]

    def C(self, s: int) -> float:
        return self.decay_constants[s - 1][1]

    def with_constants(self, decay_constants=None, alpha_constants=None) -> "Sigmoidal":
        """Copy with replaced decay constants (used to build falsified entries)."""
        changes = {}
        if decay_constants is not None:
            changes["decay_constants"] = tuple(tuple(map(float, kc)) for kc in decay_constants)
        if alpha_constants is not None:
            changes["alpha_constants"] = tuple(map(float, alpha_constants))
        return dataclasses.replace(self, **changes)

    def decay_config(self) -> dict:
        """JSON-ready decay block: ``{"beta", "alpha", "K", "C", "K0", "C0"}``."""
        return {
            "beta": self.beta,
            "alpha": self.alpha,
            "K": [kc[0] for kc in self.decay_constants],
            "C": [kc[1] for kc in self.decay_constants],
            "K0": self.alpha_constants[0],
            "C0": self.alpha_constants[1],
        }


class PolynomialFamily:
    """Exact derivative evaluator for a ``w' = g(w)``, ``sigma = h(w)`` family."""

    def __init__(self, g: Polynomial, h: Polynomial, w_left: float,
                 d_left: Callable[[np.ndarray], np.ndarray], w_range: float):
        self.g = g
        self.h = h
        self.w_left = w_left
        self.d_left = d_left
        self.w_range = w_range
        self._polys = [h]
        self._shifted = [self._shift(h)]

    def _shift(self, p: Polynomial) -> Polynomial:
        # express p(w) as a polynomial in d = w - w_left
        return p(Polynomial([self.w_left, 1.0]))

    def poly(self, s: int) -> Polynomial:
        while len(self._polys) <= s:
            nxt = self._polys[-1].deriv() * self.g
            self._polys.append(nxt)
            self._shifted.append(self._shift(nxt))
        return self._polys[s]

    def shifted(self, s: int) -> Polynomial:
        self.poly(s)
        return self._shifted[s]

    def __call__(self, s: int, x: np.ndarray) -> np.ndarray:
        y = -np.abs(x)
        val = self.shifted(s)(self.d_left(y))
        if s == 0:
            return np.where(x > 0, 1.0 - val, val)
        # sigma - 1/2 odd  =>  sigma^(s) has parity (-1)^(s-1)
        if s % 2 == 0:
            return np.where(x > 0, -val, val)
        return val

    def quotient_bound(self, s: int) -> float:
        """max |P_s / g| over the range of w, for s >= 1."""
        q, r = divmod(self.poly(s), self.g)
        assert np.allclose(r.coef, 0.0, atol=1e-9 * max(1.0, np.abs(q.coef).max()))
        qs = self._shift(q)
        crit = qs.deriv().roots() if qs.degree() > 0 else np.array([])
        crit = crit[np.isreal(crit)].real
        pts = np.concatenate([[0.0, self.w_range], crit[(crit > 0) & (crit < self.w_range)]])
        return float(np.max(np.abs(qs(pts)))) * (1 + 1e-9)


def _logistic_d(y: np.ndarray) -> np.ndarray:
    e = np.exp(y)
    return e / (1.0 + e)


def _tanh_d(y: np.ndarray) -> np.ndarray:
    e = np.exp(2.0 * y)
    return 2.0 * e / (1.0 + e)


def _logistic_family() -> tuple[PolynomialFamily, float, float, float]:
    fam = PolynomialFamily(
        g=Polynomial([0.0, 1.0, -1.0]), h=Polynomial([0.0, 1.0]),
        w_left=0.0, d_left=_logistic_d, w_range=1.0,
    )
    # u(1-u) <= exp(-|x|),  sigma(x) <= exp(x)
    return fam, 1.0, 1.0, 1.0


def _tanh_family() -> tuple[PolynomialFamily, float, float, float]:
    fam = PolynomialFamily(
        g=Polynomial([1.0, 0.0, -1.0]), h=Polynomial([0.5, 0.5]),
        w_left=-1.0, d_left=_tanh_d, w_range=2.0,
    )
    # sech^2 x <= 4 exp(-2|x|),  (1 + tanh x)/2 <= exp(2x)
    return fam, 2.0, 4.0, 1.0


_FAMILIES: dict[str, Callable[[], tuple[PolynomialFamily, float, float, float]]] = {
    "logistic": _logistic_family,
    "tanh": _tanh_family,
}


def register_family(name: str, factory) -> None:
    """Extension point for further closed-form activations.

    ``factory()`` must return ``(family, rate, c_g, c_0)`` with
    ``g(w(x)) <= c_g exp(-rate |x|)`` and ``sigma(x) <= c_0 exp(rate x)``
    for ``x <= 0``.
    """
    _FAMILIES[name] = factory


def catalog() -> list[str]:
    return sorted(_FAMILIES)


def eval_sigmoid(sig: Sigmoidal, s: int, x):
    """sigma^(s)(x) for scalar or array ``x``."""
    if not 0 <= s <= sig.max_order:
        raise OrderOutOfRange(f"derivative order {s} outside 0..{sig.max_order}")
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput("sigmoid evaluation requires finite x")
    out = sig.evaluator(s, arr)
    return float(out) if out.ndim == 0 else out


def _scan_grid(scan_range: tuple[float, float]) -> np.ndarray:
    lo, hi = map(float, scan_range)
    if not 0 < lo < hi:
        raise ValueError(f"scan range must satisfy 0 < K_min < X_max, got {scan_range}")
    num = int(round((hi - lo) / SCAN_STEP)) + 1
    return np.linspace(lo, hi, num)


def fit_power_decay(magnitude: Callable[[np.ndarray], np.ndarray], exponent: float,
                    scan_range: tuple[float, float] = DEFAULT_SCAN) -> tuple[float, float]:
    """Fit ``|F(x)| <= C |x|^(-exponent)`` for ``|x| >= K`` on a scan grid.

    ``magnitude(t)`` returns ``max(|F(t)|, |F(-t)|)`` for ``t > 0``.  K is the
    lower end of the scan; C is the scanned sup of ``|F| t^exponent`` times
    the safety factor.  A sup reached in the last tenth of the scan means
    the product is still growing and the fit is rejected.
    """
    t = _scan_grid(scan_range)
    prod = magnitude(t) * t ** exponent
    if not np.all(np.isfinite(prod)):
        raise FitFailure("non-finite decay product")
    i = int(np.argmax(prod))
    if i >= int(0.9 * (len(t) - 1)) and prod[i] > 0:
        raise FitFailure(
            f"|F(x)| x^{exponent:g} still growing at x = {t[i]:g}; decay too slow"
        )
    C = max(SAFETY_FACTOR * float(prod[i]), np.finfo(float).tiny)
    return float(t[0]), C


def fit_decay_constants(sig: Sigmoidal, beta: float,
                        scan_range: tuple[float, float] = DEFAULT_SCAN,
                        orders=None) -> dict[int, tuple[float, float]]:
    """(K_s, C_s) per derivative order with ``|sigma^(s)(x)| <= C_s|x|^(-beta-1)``.

    Order 0 fits the left tail ``sigma(x)`` for ``x -> -inf`` with exponent
    ``beta + 1``; pass the run's alpha as ``beta`` for that case.
    """
    if orders is None:
        orders = range(1, sig.max_order + 1)
    out = {}
    for s in orders:
        if s == 0:
            mag = lambda t: np.abs(sig.evaluator(0, -t))  # noqa: E731
        else:
            mag = lambda t, s=s: np.maximum(  # noqa: E731
                np.abs(sig.evaluator(s, t)), np.abs(sig.evaluator(s, -t)))
        out[s] = fit_power_decay(mag, beta + 1.0, scan_range)
    return out


def build_sigmoidal(id: str, evaluator: Evaluator, max_order: int,
                    beta: float | None = None, alpha: float | None = None,
                    exp_tail: ExpTail | None = None,
                    scan_range: tuple[float, float] = DEFAULT_SCAN) -> Sigmoidal:
    """Assemble a Sigmoidal, fitting its decay constants on ``scan_range``."""
    if max_order < 2:
        raise OrderOutOfRange("max_order must be at least 2")
    beta = float(2 * max_order + 2 if beta is None else beta)
    alpha = float(beta if alpha is None else alpha)
    proto = Sigmoidal(id, max_order, alpha, beta, (), (0.0, 0.0), evaluator, exp_tail)
    fitted = fit_decay_constants(proto, beta, scan_range)
    left = fit_decay_constants(proto, alpha, scan_range, orders=[0])[0]
    return dataclasses.replace(
        proto,
        decay_constants=tuple(fitted[s] for s in range(1, max_order + 1)),
        alpha_constants=left,
    )


def get_sigmoid(id: str = "logistic", max_order: int = 2, beta: float | None = None,
                alpha: float | None = None,
                scan_range: tuple[float, float] = DEFAULT_SCAN,
                decay: dict | None = None) -> Sigmoidal:
    """Catalog lookup by string id.

    ``beta`` defaults to ``2*max_order + 2``; ``alpha`` defaults to ``beta``.
    ``decay`` may carry previously fitted constants (keys K, C, K0, C0) and
    replaces the fit.
    """
    try:
        factory = _FAMILIES[id]
    except KeyError:
        raise KeyError(f"unknown activation {id!r}; catalog: {catalog()}") from None
    fam, rate, c_g, c_0 = factory()
    bounds = (c_0,) + tuple(c_g * fam.quotient_bound(s) for s in range(1, max_order + 1))
    sig = build_sigmoidal(id, fam, max_order, beta, alpha, ExpTail(rate, bounds), scan_range)
    if decay is not None:
        if len(decay["K"]) != max_order or len(decay["C"]) != max_order:
            raise ValueError("decay constants must list one (K, C) per order 1..m")
        sig = sig.with_constants(
            decay_constants=list(zip(decay["K"], decay["C"])),
            alpha_constants=(decay.get("K0", sig.alpha_constants[0]),
                             decay.get("C0", sig.alpha_constants[1])),
        )
    return sig


@dataclass(frozen=True)
class AxiomCheck:
    name: str
    passed: bool
    worst_violation: float


@dataclass(frozen=True)
class AxiomReport:
    sigmoid: str
    checks: tuple[AxiomCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> AxiomCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def default_axiom_grid(sig: Sigmoidal, num: int = 4001) -> np.ndarray:
    k_max = max([kc[0] for kc in sig.decay_constants] + [sig.alpha_constants[0]])
    x_max = max(60.0, 2.0 * k_max)
    return np.linspace(-x_max, x_max, num)


def verify_axioms(sig: Sigmoidal, grid=None, tol: float = 1e-12) -> AxiomReport:
    """Sampled check of the sigmoidal conditions; failures are report entries."""
    x = default_axiom_grid(sig) if grid is None else np.asarray(grid, dtype=float)
    checks = []

    def add(name, violation):
        v = float(violation)
        checks.append(AxiomCheck(name, v <= tol, v))

    s0 = sig.evaluator(0, x)
    s1 = sig.evaluator(1, x)
    xm = float(np.max(np.abs(x)))
    add("monotone", max(0.0, -float(np.min(s1))))
    add("limits", max(float(sig.evaluator(0, np.array(-xm))),
                      1.0 - float(sig.evaluator(0, np.array(xm)))))
    add("odd_symmetry", np.max(np.abs(s0 + sig.evaluator(0, -x) - 1.0)))
    xp = x[x >= 0]
    add("concavity", max(0.0, float(np.max(sig.evaluator(2, xp))) if xp.size else 0.0))

    K0, C0 = sig.alpha_constants
    left = x[x <= -K0] if K0 > 0 else x[x < 0]
    if left.size:
        bound = C0 * np.abs(left) ** (-sig.alpha - 1.0)
        add("left_tail", max(0.0, float(np.max(sig.evaluator(0, left) - bound))))
    else:
        add("left_tail", 0.0)

    worst = 0.0
    for s in range(1, sig.max_order + 1):
        K, C = sig.decay_constants[s - 1]
        xs = x[np.abs(x) >= K]
        if xs.size:
            excess = np.abs(sig.evaluator(s, xs)) - C * np.abs(xs) ** (-sig.beta - 1.0)
            worst = max(worst, float(np.max(excess)))
    add("derivative_decay", max(0.0, worst))
    return AxiomReport(sig.id, tuple(checks))


__all__ = [
    "AxiomCheck", "AxiomReport", "ExpTail", "PolynomialFamily", "Sigmoidal",
    "build_sigmoidal", "catalog", "eval_sigmoid", "fit_decay_constants",
    "fit_power_decay", "get_sigmoid", "register_family", "verify_axioms",
]
