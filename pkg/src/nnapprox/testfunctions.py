"""Closed-form test functions with derivatives of every order."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class TestFunction:
    """f with closed-form derivatives.

    ``deriv(i, x)`` returns f^(i)(x); ``crude_bound(i, a, b)`` is any upper
    bound for |f^(i)| on [a, b] and only serves to certify grid sup-norms.
    """

    __test__ = False  # not a pytest class

    id: str
    deriv: Callable[[int, np.ndarray], np.ndarray]
    crude_bound: Callable[[int, float, float], float]

    def __call__(self, x):
        return self.derivative(0)(x)

    def derivative(self, i: int) -> Callable:
        def g(x):
            arr = np.asarray(x, dtype=float)
            out = self.deriv(i, arr)
            out = np.broadcast_to(out, arr.shape).astype(float)
            return float(out) if out.ndim == 0 else out
        return g

    def sup_norm(self, i: int, interval, resolution: int = 4001) -> float:
        """Grid sup of |f^(i)| on [a, b] plus the Lipschitz slack h/2 * sup|f^(i+1)|."""
        a, b = interval
        x = np.linspace(a, b, resolution)
        h = (b - a) / (resolution - 1)
        grid = float(np.max(np.abs(self.derivative(i)(x))))
        return grid + 0.5 * h * self.crude_bound(i + 1, a, b)


def _const(c: float) -> TestFunction:
    return TestFunction(
        "const",
        lambda i, x: np.full_like(x, c if i == 0 else 0.0),
        lambda i, a, b: abs(c) if i == 0 else 0.0,
    )


def _identity() -> TestFunction:
    def d(i, x):
        if i == 0:
            return x.copy()
        return np.full_like(x, 1.0 if i == 1 else 0.0)

    return TestFunction("identity", d,
                        lambda i, a, b: max(abs(a), abs(b)) if i == 0 else float(i == 1))


def _square() -> TestFunction:
    def d(i, x):
        if i == 0:
            return x * x
        if i == 1:
            return 2.0 * x
        return np.full_like(x, 2.0 if i == 2 else 0.0)

    def bound(i, a, b):
        m = max(abs(a), abs(b))
        return [m * m, 2.0 * m, 2.0][i] if i <= 2 else 0.0

    return TestFunction("square", d, bound)


def _sin() -> TestFunction:
    return TestFunction("sin", lambda i, x: np.sin(x + i * math.pi / 2), lambda i, a, b: 1.0)


def _damped() -> TestFunction:
    # f = exp(-x) sin 2x = Im exp((-1 + 2i) x)
    z = complex(-1.0, 2.0)

    def d(i, x):
        return np.imag(z ** i * np.exp(z * x))

    return TestFunction("damped_sin", d, lambda i, a, b: abs(z) ** i * math.exp(-a))


CORPUS: dict[str, Callable[[], TestFunction]] = {
    "const": lambda: _const(1.0),
    "identity": _identity,
    "square": _square,
    "sin": _sin,
    "damped_sin": _damped,
}


def get_function(id: str) -> TestFunction:
    try:
        return CORPUS[id]()
    except KeyError:
        raise KeyError(f"unknown test function {id!r}; known: {sorted(CORPUS)}") from None


def constant(c: float) -> TestFunction:
    return _const(c)
