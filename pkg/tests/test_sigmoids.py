import math

import mpmath as mp
import numpy as np
import pytest

from nnapprox.errors import FitFailure, NonFiniteInput, OrderOutOfRange
from nnapprox.sigmoids import (
    catalog,
    eval_sigmoid,
    fit_decay_constants,
    fit_power_decay,
    get_sigmoid,
    verify_axioms,
)


@pytest.fixture(scope="module")
def logistic():
    return get_sigmoid("logistic", 3)


def test_catalog_has_logistic_and_tanh():
    assert {"logistic", "tanh"} <= set(catalog())


def test_point_values(logistic):
    assert eval_sigmoid(logistic, 0, 0.0) == 0.5
    assert eval_sigmoid(logistic, 1, 0.0) == 0.25
    v = eval_sigmoid(logistic, 0, -50.0)
    assert 0 < v <= 1e-20
    assert v == pytest.approx(1.0 / (1.0 + math.exp(50.0)), rel=1e-14)


@pytest.mark.parametrize("name,expr", [
    ("logistic", lambda x: 1 / (1 + mp.exp(-x))),
    ("tanh", lambda x: (1 + mp.tanh(x)) / 2),
])
@pytest.mark.parametrize("s", [0, 1, 2, 3])
def test_derivatives_match_mpmath(name, expr, s):
    sig = get_sigmoid(name, 3)
    for x in [-30.0, -7.5, -1.0, -0.1, 0.0, 0.3, 2.0, 11.0, 40.0]:
        ref = float(mp.diff(expr, mp.mpf(x), s)) if s else float(expr(mp.mpf(x)))
        got = eval_sigmoid(sig, s, x)
        assert got == pytest.approx(ref, rel=1e-12, abs=1e-30)


def test_eval_vectorised(logistic):
    x = np.linspace(-5, 5, 11)
    np.testing.assert_allclose(eval_sigmoid(logistic, 0, x), 1 / (1 + np.exp(-x)), rtol=1e-15)


def test_eval_rejects_bad_input(logistic):
    with pytest.raises(OrderOutOfRange):
        eval_sigmoid(logistic, 4, 0.0)
    with pytest.raises(OrderOutOfRange):
        eval_sigmoid(logistic, -1, 0.0)
    with pytest.raises(NonFiniteInput):
        eval_sigmoid(logistic, 0, float("nan"))


@pytest.mark.parametrize("name", ["logistic", "tanh"])
def test_axioms_pass(name):
    rep = verify_axioms(get_sigmoid(name, 2), tol=1e-12)
    assert rep.passed, rep


def test_zeroed_decay_constant_breaks_decay_axiom(logistic):
    broken = logistic.with_constants(
        decay_constants=[(logistic.K(s), 0.0) for s in range(1, 4)])
    rep = verify_axioms(broken)
    assert not rep["derivative_decay"].passed
    assert rep["monotone"].passed


def test_fit_decay_constants_bound_holds():
    sig = get_sigmoid("logistic", 2, beta=6)
    consts = fit_decay_constants(sig, 6.0, (1, 100))
    for s in (1, 2):
        K, C = consts[s]
        assert math.isfinite(C) and C > 0
        x = np.linspace(K, 200, 20001)
        mag = np.maximum(np.abs(sig(x, s)), np.abs(sig(-x, s)))
        assert np.all(mag <= C * x ** -7.0)


@pytest.mark.parametrize("alpha", [2.0, 6.0, 15.0])
def test_left_tail_constants_for_any_alpha(alpha):
    sig = get_sigmoid("logistic", 2, beta=6, alpha=alpha)
    K0, C0 = sig.alpha_constants
    x = np.linspace(K0, 150, 5001)
    assert np.all(sig(-x) <= C0 * x ** (-alpha - 1))


def test_slow_decay_rejected():
    # algebraic sigmoid 1/2 (1 + x / sqrt(1 + x^2)); its derivative decays like |x|^-3
    with pytest.raises(FitFailure):
        fit_power_decay(lambda t: 0.5 * (1 + t * t) ** -1.5, 7.0)


def test_default_beta_and_alpha():
    sig = get_sigmoid("logistic", 3)
    assert sig.beta == 8 and sig.alpha == 8
    cfg = sig.decay_config()
    assert set(cfg) == {"beta", "alpha", "K", "C", "K0", "C0"}
    again = get_sigmoid("logistic", 3, decay=cfg)
    assert again.decay_constants == sig.decay_constants
