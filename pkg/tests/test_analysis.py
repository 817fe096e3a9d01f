import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goldenep import (
    PHI,
    DiminishingStep,
    GeneratorConfig,
    ProblemConstants,
    StepSizeError,
    certificate_bound_M,
    contraction_gaps,
    counterexample_run,
    fit_rate,
    generate,
    gra_solve,
    lyapunov_terms,
    rate_certificate,
    step_from_fraction,
)
from goldenep.analysis import is_strictly_decreasing, r1_of, r2_of

SCALAR_K = ProblemConstants(c1=0.5, c2=0.5, gamma=1.0)


def test_r_at_alpha_zero():
    assert r1_of(0.0) == 0.0
    assert r2_of(0.0) == 1.0


def test_r_at_alpha_one():
    assert float(r1_of(1.0)) == pytest.approx(1 / math.sqrt(PHI), abs=1e-15)
    assert float(r2_of(1.0)) == pytest.approx(0.7861513777574233, abs=1e-15)


@settings(max_examples=300, deadline=None)
@given(
    p=st.floats(1e-6, 1 - 1e-6),
    c1=st.floats(1e-3, 1e3),
    ratio=st.floats(1e-6, 1.0),
)
def test_certificate_identities(p, c1, ratio):
    # gamma <= ||P - Q|| = 2 c1 for affine instances
    k = ProblemConstants(c1=c1, c2=c1, gamma=2 * c1 * ratio)
    cert = rate_certificate(p * PHI / (4 * c1), k)
    assert abs(1 - cert.alpha - cert.r2 + cert.r1) <= 1e-12
    assert abs(cert.alpha / PHI - cert.r1 * cert.r2) <= 1e-12
    assert 0 < cert.r2 < 1
    assert 0 < cert.epsilon < 1
    assert cert.theta == max(cert.epsilon, cert.r2)
    assert 0 < cert.theta < 1


def test_r2_strictly_decreasing():
    t = np.linspace(0.0, 10.0, 2001)
    assert is_strictly_decreasing(r2_of(t))


def test_certificate_epsilon_is_tightest():
    lam = 0.5
    cert = rate_certificate(lam, SCALAR_K)
    assert cert.epsilon == pytest.approx(4 * lam * 0.5 / PHI + 1e-9, abs=1e-16)
    assert lam < cert.epsilon * PHI / (4 * 0.5)


def test_certificate_rejects_bad_step():
    with pytest.raises(StepSizeError):
        rate_certificate(PHI / 2, SCALAR_K)
    with pytest.raises(StepSizeError):
        rate_certificate(-0.1, SCALAR_K)


def test_bound_M_scalar(scalar):
    tr = gra_solve(scalar, 0.5, stop_residual=0.0, max_iter=5)
    cert = certificate_bound_M(rate_certificate(0.5, SCALAR_K), tr, [0.0])
    assert cert.M == pytest.approx(1 + cert.r1, abs=1e-14)


def test_bound_M_zero_at_solution():
    from conftest import scalar_instance

    tr = gra_solve(scalar_instance(0.0), 0.5, stop_residual=0.0, max_iter=3)
    assert tr.n_iter >= 1
    cert = certificate_bound_M(rate_certificate(0.5, SCALAR_K), tr, [0.0])
    assert cert.M == 0.0


def test_bound_M_independent_recomputation():
    inst = generate(GeneratorConfig(10, seed=3))
    lam = step_from_fraction(0.9, inst.constants)
    tr = gra_solve(inst, lam, stop_residual=1e-20)
    xs = tr.solution
    cert = certificate_bound_M(rate_certificate(lam, inst.constants), tr, xs)
    xbar0, xbar1 = inst.xbar_start, tr.anchors[1]
    a0 = PHI / (PHI - 1) * np.sum((xbar0 - xs) ** 2)
    a1 = PHI / (PHI - 1) * np.sum((xbar1 - xs) ** 2)
    b1 = PHI / 2 * np.sum((inst.x_start - inst.xbar_start) ** 2)
    assert cert.M == pytest.approx((PHI - 1) / PHI * (a1 + cert.r1 * a0 + b1), rel=1e-12)


def test_bound_M_needs_two_iterations(scalar):
    tr = gra_solve(scalar, 0.5, stop_residual=0.0, max_iter=0)
    with pytest.raises(ValueError):
        certificate_bound_M(rate_certificate(0.5, SCALAR_K), tr, [0.0])


def test_scalar_envelope(scalar):
    tr = gra_solve(scalar, 0.5, stop_residual=0.0, max_iter=150)
    cert = certificate_bound_M(rate_certificate(0.5, SCALAR_K), tr, [0.0])
    n = np.arange(1, tr.anchors.shape[0])
    assert np.all(tr.anchors[1:, 0] ** 2 <= cert.envelope(n))


def test_contraction_needs_generated_previous_iterate(scalar):
    # x_1 is a free start: the step n = 1 is not covered, n >= 2 is
    tr = gra_solve(scalar, 0.5, stop_residual=0.0, max_iter=100)
    cert = rate_certificate(0.5, SCALAR_K)
    n, gaps = contraction_gaps(cert, tr, [0.0], start=1)
    assert gaps[0] < 0
    assert np.all(gaps[1:] >= -1e-14)


def test_lyapunov_terms_shapes(scalar):
    tr = gra_solve(scalar, 0.5, stop_residual=0.0, max_iter=4)
    a, b = lyapunov_terms(tr, [0.0])
    assert a.shape == b.shape == (5,)
    assert math.isnan(b[0])
    assert b[2] == pytest.approx(PHI / 2 * 0.25)


def test_fit_rate_geometric():
    r = 0.5 ** np.arange(60)
    assert fit_rate(r) == pytest.approx(0.5, abs=1e-10)


def test_fit_rate_constant():
    assert fit_rate(np.full(40, 3.0)) == pytest.approx(1.0, abs=1e-12)


def test_fit_rate_rejects_nonpositive():
    r = np.ones(30)
    r[25] = 0.0
    with pytest.raises(ValueError):
        fit_rate(r, burn_in=5)
    with pytest.raises(ValueError):
        fit_rate(np.ones(12), burn_in=5)


def test_fit_rate_on_scalar_gra_below_theta(scalar):
    tr = gra_solve(scalar, 0.5, stop_residual=0.0, max_iter=150)
    cert = rate_certificate(0.5, SCALAR_K)
    err = tr.iterates[:, 0] ** 2
    assert fit_rate(err[err > 1e-20]) <= cert.theta


def test_counterexample_first_terms():
    x = counterexample_run(1.0, 1.0, DiminishingStep(1.0), 2)
    np.testing.assert_allclose(x, [1.0, 1.0, 0.5 + 0.5 / PHI], atol=1e-15)


def test_counterexample_sequence_steps():
    lam = np.array([np.nan, 0.5, 1 / 3, 0.25])
    np.testing.assert_array_equal(
        counterexample_run(1.0, 2.0, lam, 4), counterexample_run(1.0, 2.0, DiminishingStep(), 4)
    )


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-3, 10), st.floats(1e-3, 10), st.floats(0.01, 1.99))
def test_counterexample_stays_positive(x0, y1, base):
    x = counterexample_run(x0, y1, DiminishingStep(base), 500)
    assert np.all(x > 0)


def test_counterexample_ratio_tends_to_one():
    x = counterexample_run(1.0, 1.0, DiminishingStep(1.0), 100_000)
    ratio = x[10_000:100_000] / x[9_999:99_999]
    assert np.max(1 - ratio) <= 1e-3


def test_counterexample_rejects_large_steps():
    with pytest.raises(StepSizeError):
        counterexample_run(1.0, 1.0, DiminishingStep(2.0), 5)
    with pytest.raises(ValueError):
        counterexample_run(1.0, 1.0, DiminishingStep(1.0), 1)
