"""Acceptance gates, one test per criterion, each printing a PASS/FAIL line.

Run alone with ``python3 tests/test_acceptance.py`` or ``pytest -s tests/test_acceptance.py``.
"""

import math

import numpy as np
import pytest

from nnapprox import make_kernel
from nnapprox.analysis import convergence_study, voronovskaja_study
from nnapprox.cli import main as cli_main
from nnapprox.moments import (
    MomentQuery,
    absolute_moment,
    algebraic_moment,
    fourier_moment,
    telescoped_m0,
    truncated_moment,
    verify_strang_fix,
)
from nnapprox.operators import (
    nn_operator_derivative,
    nn_operator_simplified,
    sample_function,
)
from nnapprox.testfunctions import get_function

A2_REF = 3.6232


@pytest.fixture(scope="module")
def kernel():
    return make_kernel("logistic", 2)


@pytest.fixture(scope="module")
def kernel3():
    return make_kernel("logistic", 3)


@pytest.fixture(scope="module")
def sin_study(kernel):
    return convergence_study(kernel, get_function("sin"), [0, 1, 2], [20, 40, 80, 160],
                             delta=0.25, interval=(0, 3))


def gate(capsys, number: int, ok: bool, detail: str):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
    assert ok, detail


def test_criterion_01_second_moment(kernel, capsys):
    xs = np.arange(20) / 20
    direct = [algebraic_moment(kernel, 0, 2, float(x)).value for x in xs]
    fourier = fourier_moment(kernel, 2).value
    worst_ref = max(abs(v - A2_REF) for v in direct)
    worst_fourier = max(abs(v - fourier) for v in direct)
    ok = worst_ref <= 1e-3 and worst_fourier <= 1e-4
    gate(capsys, 1, ok, f"max|A_2 - 3.6232| = {worst_ref:.3e} (<= 1e-3), "
                        f"max|direct - fourier| = {worst_fourier:.3e} (<= 1e-4)")


def test_criterion_02_strang_fix(kernel, capsys):
    rep = verify_strang_fix(kernel, k_max=3, nu_max=2, tol=1e-6, constancy_tol=1e-8)
    worst = max(c.magnitude for c in rep.fourier)
    spreads = ", ".join(f"nu={c.nu}: {c.spread:.2e}" for c in rep.constancy)
    gate(capsys, 2, rep.passed,
         f"max |phi_hat^(nu)(2 pi k)| = {worst:.2e} (<= 1e-6, {'ok' if rep.fourier_passed else 'FAIL'}); "
         f"constancy spreads {spreads} (<= 1e-8)")


def test_criterion_03_derivative_moment_identities(kernel3, capsys):
    xs = np.arange(16) / 16
    lines, ok = [], True
    for s in (1, 2, 3):
        low = max(abs(algebraic_moment(kernel3, s, j, float(x)).value)
                  for j in range(s) for x in xs)
        top = max(abs(algebraic_moment(kernel3, s, s, float(x)).value - math.factorial(s))
                  for x in xs)
        ok = ok and low <= 1e-6 and top <= 1e-6
        lines.append(f"s={s}: max|A_j|={low:.2e}, max|A_s - s!|={top:.2e}")
    gate(capsys, 3, ok, "; ".join(lines) + " (all <= 1e-6)")


def test_criterion_04_partition_of_unity(kernel, capsys):
    xs = np.random.default_rng(20240604).uniform(-100, 100, 100)
    worst = max(abs(algebraic_moment(kernel, 0, 0, float(x)).value - 1) for x in xs)
    gate(capsys, 4, worst <= 1e-10, f"max|A_0 - 1| over 100 random x = {worst:.2e} (<= 1e-10)")


def test_criterion_05_telescoping(kernel, capsys):
    worst = 0.0
    for s in (0, 1, 2):
        for n in (10, 100):
            for x in (1.1, 1.5, 2.9):
                direct = truncated_moment(kernel, MomentQuery(s, 0, n, x, (0, 3))).value
                worst = max(worst, abs(telescoped_m0(kernel, s, n, x, 0, 3) - direct))
    gate(capsys, 5, worst <= 1e-12, f"max |telescoped - direct| = {worst:.2e} (<= 1e-12)")


def test_criterion_06_simultaneous_convergence(sin_study, capsys):
    dec = {s: all(b < a for a, b in zip(sin_study.errors(s), sin_study.errors(s)[1:]))
           for s in (0, 1, 2)}
    orders = {s: sin_study.orders[s].order for s in (0, 1, 2)}
    ok = all(dec.values()) and abs(orders[0] - 2.0) <= 0.2 and orders[1] >= 0.9 and orders[2] >= 0.9
    gate(capsys, 6, ok, "strictly decreasing " + str(dec) + ", orders "
         + ", ".join(f"s={s}: {o:.3f}" for s, o in orders.items()))


def test_criterion_07_bound_dominance(sin_study, capsys):
    worst = max(r.sup_error / r.bound for r in sin_study.rows)
    gate(capsys, 7, sin_study.bound_dominates,
         f"max sup_error / bound over all (s, n) = {worst:.3e} (<= 1)")


def test_criterion_08_voronovskaja(kernel, capsys):
    rep = voronovskaja_study(kernel, get_function("square"), 2, [400, 800], [1.5])
    r400, r800 = rep.rows
    d400 = abs(r400.scaled_residual - A2_REF)
    d800 = abs(r800.scaled_residual - A2_REF)
    ok = d400 <= 0.05 * A2_REF and d800 < d400
    gate(capsys, 8, ok, f"n=400: {r400.scaled_residual!r} (dev {d400:.6e}), "
                        f"n=800: {r800.scaled_residual!r} (dev {d800:.6e})")


def test_criterion_09_gradient_check(kernel, capsys):
    sample = sample_function(get_function("sin"), 100, 0, 3)
    h = 1e-4
    worst = 0.0
    for x in np.linspace(0.25, 2.75, 50):
        fd = (nn_operator_simplified(sample, kernel, x + h)
              - nn_operator_simplified(sample, kernel, x - h)) / (2 * h)
        an = nn_operator_derivative(sample, kernel, 1, x)
        worst = max(worst, abs(fd - an) / abs(an))
    gate(capsys, 9, worst <= 1e-6, f"max relative FD mismatch over 50 points = {worst:.2e} (<= 1e-6)")


def test_criterion_10_tail_certification(kernel, capsys):
    worst, bad = 0.0, []
    for s in (0, 1, 2):
        for nu in (0, 1, 2):
            for x in (0.0, 0.3, 0.71):
                rep = algebraic_moment(kernel, s, nu, x)
                wide = algebraic_moment(kernel, s, nu, x, radius=2 * rep.radius)
                ratio = abs(wide.value - rep.value) / rep.tail_bound
                worst = max(worst, ratio)
                if not ratio < 1:
                    bad.append(("A", s, nu, x))
            rep = absolute_moment(kernel, s, nu)
            wide = absolute_moment(kernel, s, nu, radius=2 * rep.radius)
            ratio = abs(wide.value - rep.value) / rep.tail_bound
            worst = max(worst, ratio)
            if not ratio < 1:
                bad.append(("M", s, nu))
    gate(capsys, 10, not bad, f"max |change| / tail_bound = {worst:.3e} (< 1); failures {bad}")


def test_criterion_11_determinism(tmp_path, capsys):
    outs = []
    for sub in ("first", "second"):
        code = cli_main(["converge", "--out", str(tmp_path / sub), "--quiet"])
        assert code == 0
        outs.append((tmp_path / sub / "converge.csv").read_bytes())
    gate(capsys, 11, outs[0] == outs[1], f"converge.csv byte-identical across runs ({len(outs[0])} bytes)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
