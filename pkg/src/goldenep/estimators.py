"""Estimator-style front ends for the golden ratio solvers.

Each solver is configured through constructor parameters (so ``get_params``,
``set_params`` and ``sklearn.base.clone`` work) and is fitted on a
:class:`~goldenep.core.ProblemInstance`::

    solver = GoldenRatioSolver(step_fraction=0.9, stop_residual=1e-8)
    solver.fit(instance)
    solver.solution_, solver.n_iter_, solver.certificate_
"""

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .analysis import rate_certificate
from .core import ProblemInstance
from .prox import ProxSettings
from .solvers import (
    DiminishingStep,
    gra_solve,
    mgra1_solve,
    mgra2_solve,
    residual,
    step_from_fraction,
)


def check_instance(instance):
    if not isinstance(instance, ProblemInstance):
        raise TypeError(
            f"expected a ProblemInstance, got {type(instance).__name__}; "
            "use goldenep.load_instance or goldenep.generate"
        )
    return instance


class _GoldenRatioBase(BaseEstimator):
    _algorithm = None

    def _prox_settings(self):
        return ProxSettings(self.prox_tol, self.max_inner_iter)

    def _residual_step(self, instance):
        if self.residual_step is not None:
            return float(self.residual_step)
        return step_from_fraction(self.residual_fraction, instance.constants)

    def _store(self, instance, trace):
        self.trace_ = trace
        self.solution_ = trace.solution
        self.n_iter_ = trace.n_iter
        self.termination_ = trace.reason
        self.constants_ = instance.constants
        return self

    def residual(self, instance, x=None):
        """Residual ``D`` of ``x`` (default: the fitted solution) on ``instance``."""
        check_is_fitted(self, "solution_")
        instance = check_instance(instance)
        x = self.solution_ if x is None else x
        return residual(instance, x, self._residual_step(instance), self._prox_settings())

    def score(self, instance):
        """Negative residual of the fitted solution; higher is better."""
        return -self.residual(instance)


class GoldenRatioSolver(_GoldenRatioBase):
    """Fixed-step golden ratio algorithm.

    Parameters
    ----------
    step_fraction : float, default=0.9
        Step ``lam = step_fraction * phi / (4 c1)``; ignored if ``step_size`` is set.
    step_size : float, optional
        Explicit step, must lie in ``(0, phi / (4 max{c1, c2}))``.
    stop_residual : float, default=1e-10
    max_iter : int, default=1_000_000
    prox_tol : float, default=1e-12
        Projected-gradient tolerance of the inner prox solver.
    max_inner_iter : int, default=10_000
    residual_every : int, default=1
    record_iterates : bool, default=True

    Attributes
    ----------
    solution_ : ndarray
    n_iter_ : int
    termination_ : str
    trace_ : SolverTrace
    constants_ : ProblemConstants
    step_size_ : float
    certificate_ : RateCertificate
        Rate certificate for ``step_size_`` (without ``M``).
    """

    def __init__(
        self,
        step_fraction=0.9,
        step_size=None,
        stop_residual=1e-10,
        max_iter=1_000_000,
        prox_tol=1e-12,
        max_inner_iter=10_000,
        residual_every=1,
        record_iterates=True,
    ):
        self.step_fraction = step_fraction
        self.step_size = step_size
        self.stop_residual = stop_residual
        self.max_iter = max_iter
        self.prox_tol = prox_tol
        self.max_inner_iter = max_inner_iter
        self.residual_every = residual_every
        self.record_iterates = record_iterates

    def _residual_step(self, instance):
        return self._step(instance)

    def _step(self, instance):
        if self.step_size is not None:
            return float(self.step_size)
        return step_from_fraction(self.step_fraction, instance.constants)

    def fit(self, instance, y=None):
        instance = check_instance(instance)
        lam = self._step(instance)
        self.certificate_ = rate_certificate(lam, instance.constants)
        self.step_size_ = lam
        trace = gra_solve(
            instance,
            lam,
            stop_residual=self.stop_residual,
            max_iter=self.max_iter,
            prox_settings=self._prox_settings(),
            residual_every=self.residual_every,
            record_iterates=self.record_iterates,
        )
        return self._store(instance, trace)


class MGRA1Solver(_GoldenRatioBase):
    """Golden ratio algorithm with diminishing prox steps ``base / (n + 1)``.

    The residual ``D`` used for stopping is taken with the fixed step
    ``residual_step`` (default ``residual_fraction * phi / (4 c1)``) so that
    traces compare with :class:`GoldenRatioSolver`.
    """

    _solve = staticmethod(mgra1_solve)

    def __init__(
        self,
        base=1.0,
        residual_fraction=0.9,
        residual_step=None,
        stop_residual=1e-10,
        max_iter=1_000_000,
        prox_tol=1e-12,
        max_inner_iter=10_000,
        residual_every=1,
        record_iterates=True,
    ):
        self.base = base
        self.residual_fraction = residual_fraction
        self.residual_step = residual_step
        self.stop_residual = stop_residual
        self.max_iter = max_iter
        self.prox_tol = prox_tol
        self.max_inner_iter = max_inner_iter
        self.residual_every = residual_every
        self.record_iterates = record_iterates

    def fit(self, instance, y=None):
        instance = check_instance(instance)
        trace = self._solve(
            instance,
            DiminishingStep(self.base),
            stop_residual=self.stop_residual,
            max_iter=self.max_iter,
            prox_settings=self._prox_settings(),
            residual_lam=self._residual_step(instance),
            residual_every=self.residual_every,
            record_iterates=self.record_iterates,
        )
        return self._store(instance, trace)


class MGRA2Solver(MGRA1Solver):
    """Golden ratio algorithm with normalized projected subgradient steps.

    ``base`` defines ``beta_n = base / (n + 1)``.
    """

    _solve = staticmethod(mgra2_solve)
