import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from goldenep import (
    AffineBifunction,
    BoxSet,
    GeneratorConfig,
    NotStronglyPseudomonotoneError,
    ProblemInstance,
    derive_constants,
    evaluate,
    generate,
    subgradient_at_diagonal,
)
from goldenep._validation import DimensionError, InvariantError

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_eval_scalar():
    f = AffineBifunction([[1.0]], [[0.0]], [0.0])
    assert evaluate(f, [2.0], [3.0]) == 2.0


def test_eval_two_dim():
    f = AffineBifunction(np.eye(2), np.eye(2), [1.0, 0.0])
    # <(2, 1), (1, 1)>
    assert evaluate(f, [0.0, 0.0], [1.0, 1.0]) == 3.0


def test_eval_dimension_mismatch():
    f = AffineBifunction(np.eye(2), np.eye(2), [1.0, 0.0])
    with pytest.raises(DimensionError):
        evaluate(f, [0.0, 0.0, 0.0], [1.0, 1.0])


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, 5, elements=finite))
def test_eval_on_diagonal_is_zero(x):
    f = generate(GeneratorConfig(5, seed=1)).bifunction
    assert evaluate(f, x, x) == 0.0


def test_subgradient_scalar():
    f = AffineBifunction([[1.0]], [[0.0]], [0.0])
    np.testing.assert_array_equal(subgradient_at_diagonal(f, [3.0]), [3.0])


def test_subgradient_constant_case(rng):
    q = rng.normal(size=4)
    f = AffineBifunction(np.zeros((4, 4)), np.zeros((4, 4)), q)
    for _ in range(3):
        np.testing.assert_array_equal(subgradient_at_diagonal(f, rng.normal(size=4)), q)


def test_subgradient_matches_finite_differences(rng):
    f = generate(GeneratorConfig(5, seed=11)).bifunction
    h = 1e-5
    for _ in range(10):
        y = rng.uniform(-2, 5, 5)
        fd = np.empty(5)
        for i in range(5):
            e = np.zeros(5)
            e[i] = h
            fd[i] = (evaluate(f, y, y + e) - evaluate(f, y, y - e)) / (2 * h)
        np.testing.assert_allclose(subgradient_at_diagonal(f, y), fd, atol=1e-6, rtol=0)


def test_constants_scalar():
    k = derive_constants(AffineBifunction([[1.0]], [[0.0]], [0.0]))
    assert k.c1 == k.c2 == 0.5
    assert k.gamma == 1.0


def test_constants_diagonal():
    k = derive_constants(AffineBifunction(np.diag([2.0, 1.0]), np.zeros((2, 2)), [0.0, 0.0]))
    assert k.c1 == pytest.approx(1.0, abs=1e-15)
    assert k.c2 == k.c1
    assert k.gamma == pytest.approx(1.0, abs=1e-15)


def test_constants_reject_p_equal_q():
    f = AffineBifunction(np.eye(3), np.eye(3), np.zeros(3))
    with pytest.raises(NotStronglyPseudomonotoneError, match="not strongly pseudomonotone"):
        derive_constants(f)


def test_asymmetric_q_rejected():
    Q = np.array([[1.0, 1e-9], [0.0, 1.0]])
    with pytest.raises(InvariantError, match="Q is not symmetric"):
        AffineBifunction(Q + np.eye(2), Q, [0.0, 0.0])


def test_asymmetric_p_minus_q_rejected():
    P = np.array([[2.0, 1.0], [0.0, 2.0]])
    with pytest.raises(InvariantError, match="P - Q"):
        AffineBifunction(P, np.eye(2), [0.0, 0.0])


def test_indefinite_q_rejected():
    Q = np.diag([1.0, -0.5])
    with pytest.raises(InvariantError, match="semidefinite"):
        AffineBifunction(Q + np.eye(2), Q, [0.0, 0.0])


def test_box_invariants():
    with pytest.raises(InvariantError, match="lower\\[1\\]"):
        BoxSet([0.0, 3.0], [1.0, 2.0])
    with pytest.raises(DimensionError):
        BoxSet([0.0, 0.0], [1.0])


def test_instance_start_must_be_feasible():
    f = AffineBifunction([[1.0]], [[0.0]], [0.0])
    with pytest.raises(InvariantError, match="x_start"):
        ProblemInstance(f, BoxSet.uniform(-2, 5, 1), [6.0], [6.0])
    # the anchor may lie outside the box
    ProblemInstance(f, BoxSet.uniform(-2, 5, 1), [1.0], [6.0])


def test_instance_arrays_are_read_only():
    inst = generate(GeneratorConfig(3, seed=0))
    with pytest.raises(ValueError):
        inst.bifunction.P[0, 0] = 1.0
    with pytest.raises(ValueError):
        inst.x_start[0] = 1.0


@pytest.mark.parametrize("seed", range(3))
def test_strong_monotonicity_identity(seed):
    inst = generate(GeneratorConfig(8, seed=seed))
    f, gamma = inst.bifunction, inst.constants.gamma
    rng = np.random.default_rng(seed)
    for _ in range(200):
        x, y = rng.uniform(-2, 5, (2, 8))
        d = y - x
        s = evaluate(f, x, y) + evaluate(f, y, x)
        expected = d @ (f.Q - f.P) @ d
        assert s == pytest.approx(expected, rel=1e-9, abs=1e-12)
        assert s <= -gamma * (d @ d) * (1 - 1e-9) + 1e-12


@pytest.mark.parametrize("seed", range(3))
def test_lipschitz_type_condition(seed):
    inst = generate(GeneratorConfig(8, seed=seed))
    f, k = inst.bifunction, inst.constants
    rng = np.random.default_rng(100 + seed)
    for _ in range(1000):
        x, y, z = rng.uniform(-2, 5, (3, 8))
        lhs = evaluate(f, x, y) + evaluate(f, y, z)
        rhs = evaluate(f, x, z) - k.c1 * np.sum((x - y) ** 2) - k.c2 * np.sum((y - z) ** 2)
        assert lhs >= rhs - 1e-9 * max(1.0, abs(rhs))
