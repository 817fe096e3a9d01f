import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from goldenep import (
    GeneratorConfig,
    GoldenRatioSolver,
    MGRA1Solver,
    MGRA2Solver,
    generate,
    gra_solve,
    step_from_fraction,
)


@pytest.fixture(scope="module")
def inst():
    return generate(GeneratorConfig(8, seed=17))


def test_params_round_trip():
    est = GoldenRatioSolver(step_fraction=0.5, stop_residual=1e-6)
    params = est.get_params()
    assert params["step_fraction"] == 0.5
    assert params["stop_residual"] == 1e-6
    est.set_params(step_fraction=0.3)
    assert clone(est).get_params()["step_fraction"] == 0.3
    assert "base" in MGRA2Solver().get_params()


def test_gra_estimator_matches_function(inst):
    est = GoldenRatioSolver(step_fraction=0.7, stop_residual=1e-12).fit(inst)
    lam = step_from_fraction(0.7, inst.constants)
    tr = gra_solve(inst, lam, stop_residual=1e-12)
    np.testing.assert_array_equal(est.solution_, tr.solution)
    assert est.n_iter_ == tr.n_iter
    assert est.step_size_ == lam
    assert 0 < est.certificate_.theta < 1
    assert est.termination_ == "residual_met"
    assert est.residual(inst) <= 1e-12
    assert est.score(inst) <= 0


def test_explicit_step_size(inst):
    est = GoldenRatioSolver(step_size=0.1, stop_residual=1e-8).fit(inst)
    assert est.step_size_ == 0.1


def test_unfitted_raises(inst):
    with pytest.raises(NotFittedError):
        GoldenRatioSolver().residual(inst)


def test_fit_requires_instance():
    with pytest.raises(TypeError, match="ProblemInstance"):
        GoldenRatioSolver().fit(np.zeros((3, 3)))


@pytest.mark.parametrize("cls", [MGRA1Solver, MGRA2Solver])
def test_mgra_estimators(cls, inst):
    est = cls(max_iter=300, stop_residual=0.0, record_iterates=False).fit(inst)
    assert est.n_iter_ == 300
    assert est.termination_ == "max_iterations"
    assert inst.box.contains(est.solution_)
    assert est.trace_.residuals[-1] < est.trace_.residuals[0]
