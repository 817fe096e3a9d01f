"""Golden ratio algorithms for EP(f, C).

All three methods share one two-line recursion: a golden-ratio anchor update

    anchor_k = ((phi - 1) * iterate_k + anchor_{k-1}) / phi

followed by a feasible update ``iterate_{k+1} = T_k(iterate_k, anchor_k)``.

* ``gra_solve``: ``T_k`` is ``prox_{lam f(iterate_k, .)}`` with a fixed step.
* ``mgra1_solve``: same prox with diminishing steps ``lam_k``.
* ``mgra2_solve``: projected subgradient step with normalized ``beta_k``.

Trace layout
------------
Row ``k`` of a :class:`SolverTrace` holds ``anchors[k]`` and ``iterates[k]``.
For GRA these are ``xbar_k`` and ``x_{k+1}``: row 0 is the user's starting
pair ``(xbar_0, x_1)``. For MGRA1/MGRA2 they are ``x_k`` and ``y_{k+1}``.
``residuals[k]`` is ``D = ||it - prox_{lam_D f(it, .)}(it)||^2`` at the
feasible iterate ``it = iterates[k]``.
"""

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._validation import (
    DimensionError,
    check_positive_int,
    check_positive_scalar,
    check_vector,
)
from .core import subgradient_at_diagonal
from .prox import DEFAULT_PROX, project_box, prox_step

PHI = (1.0 + math.sqrt(5.0)) / 2.0

RESIDUAL_MET = "residual_met"
FIXED_POINT = "fixed_point"
MAX_ITERATIONS = "max_iterations"

# relative tolerance standing in for the exact test x_{n+1} = x_n = xbar_n
FIXED_POINT_TOL = 1e-14


class StepSizeError(ValueError):
    """A step size or step rule is not admissible for the chosen algorithm."""


def max_step(constants):
    """Supremum ``phi / (4 max{c1, c2})`` of admissible fixed GRA steps."""
    return PHI / (4.0 * constants.c_max)


def step_from_fraction(p, constants):
    """GRA step ``p * phi / (4 c1)`` used in the Nash-Cournot benchmarks."""
    if not 0.0 < p < 1.0:
        raise StepSizeError(f"step fraction p must lie in (0, 1), got {p}")
    return p * PHI / (4.0 * constants.c1)


def check_gra_step(lam, constants):
    upper = max_step(constants)
    if not (np.isfinite(lam) and 0.0 < lam < upper):
        raise StepSizeError(f"GRA step {lam!r} outside the admissible interval (0, {upper!r})")
    return float(lam)


@dataclass(frozen=True)
class FixedStep:
    lam: float

    def __post_init__(self):
        check_positive_scalar(self.lam, "lam")

    def __call__(self, n):
        return self.lam


@dataclass(frozen=True)
class DiminishingStep:
    """``lam_n = base / (n + 1)``: vanishing and non-summable."""

    base: float = 1.0

    def __post_init__(self):
        check_positive_scalar(self.base, "base")

    def __call__(self, n):
        return self.base / (n + 1)


@dataclass(frozen=True)
class CustomStep:
    """User-supplied step sequence; its summability is the caller's concern."""

    fn: Callable[[int], float]

    def __call__(self, n):
        return float(self.fn(n))


@dataclass(frozen=True, eq=False)
class SolverTrace:
    """Per-iteration record of one solver run (see module docstring for indexing)."""

    algorithm: str
    n: np.ndarray
    residuals: np.ndarray
    elapsed: np.ndarray
    steps: np.ndarray
    reason: str
    n_iter: int
    solution: np.ndarray
    iterates: Optional[np.ndarray] = None
    anchors: Optional[np.ndarray] = None

    def __len__(self):
        return self.n.shape[0]

    def iterations_to(self, tol):
        """First recorded row with ``D <= tol``, or ``None``."""
        hit = np.flatnonzero(self.residuals <= tol)
        return int(self.n[hit[0]]) if hit.size else None


def residual(instance, x, lam, settings=DEFAULT_PROX):
    """``D = ||x - prox_{lam f(x, .)}(x)||^2``; zero exactly at solutions."""
    box = instance.box
    x = check_vector(x, dim=instance.dimension, name="x")
    if not box.contains(x):
        raise DimensionError("residual is defined for points of the box only")
    d = x - prox_step(instance.bifunction, x, x, lam, box, settings)
    return float(np.dot(d, d))


def _golden_loop(
    instance,
    algorithm,
    update,
    anchor0,
    iterate0,
    residual_lam,
    stop_residual,
    max_iter,
    prox_settings,
    residual_every,
    record_iterates,
):
    check_positive_int(max_iter, "max_iter", minimum=0)
    check_positive_int(residual_every, "residual_every")
    stop_residual = check_positive_scalar(stop_residual, "stop_residual", allow_zero=True)
    residual_lam = check_positive_scalar(residual_lam, "residual_lam")

    anchor = np.array(anchor0, dtype=np.float64)
    it = np.array(iterate0, dtype=np.float64)
    phi1 = PHI - 1.0

    ns, ds, ts, steps = [0], [residual(instance, it, residual_lam, prox_settings)], [0.0], [math.nan]
    its = [it] if record_iterates else None
    ans = [anchor] if record_iterates else None

    elapsed = 0.0
    reason = MAX_ITERATIONS
    k = 0
    for k in range(1, max_iter + 1):
        t0 = time.perf_counter()
        anchor_new = (phi1 * it + anchor) / PHI
        it_new, lam_k = update(k, it, anchor_new)
        elapsed += time.perf_counter() - t0

        scale = FIXED_POINT_TOL * (1.0 + np.linalg.norm(it))
        fixed = (
            np.linalg.norm(it_new - it) <= scale
            and np.linalg.norm(it - anchor_new) <= scale
        )
        anchor, it = anchor_new, it_new
        if record_iterates:
            its.append(it)
            ans.append(anchor)

        evaluate = fixed or k % residual_every == 0 or k == max_iter
        d = residual(instance, it, residual_lam, prox_settings) if evaluate else math.nan
        if evaluate:
            ns.append(k)
            ds.append(d)
            ts.append(elapsed)
            steps.append(lam_k)

        if fixed:
            reason = FIXED_POINT
            break
        if evaluate and d <= stop_residual:
            reason = RESIDUAL_MET
            break

    return SolverTrace(
        algorithm=algorithm,
        n=np.asarray(ns, dtype=np.int64),
        residuals=np.asarray(ds),
        elapsed=np.asarray(ts),
        steps=np.asarray(steps),
        reason=reason,
        n_iter=k,
        solution=it,
        iterates=np.vstack(its) if record_iterates else None,
        anchors=np.vstack(ans) if record_iterates else None,
    )


def gra_solve(
    instance,
    lam,
    stop_residual=1e-10,
    max_iter=1_000_000,
    prox_settings=DEFAULT_PROX,
    residual_lam=None,
    residual_every=1,
    record_iterates=True,
):
    """Golden Ratio Algorithm with a fixed step.

    Iterates ``xbar_n = ((phi - 1) x_n + xbar_{n-1}) / phi`` and
    ``x_{n+1} = prox_{lam f(x_n, .)}(xbar_n)`` starting from
    ``(instance.xbar_start, instance.x_start)``.

    Parameters
    ----------
    instance : ProblemInstance
    lam : float
        Fixed step, required to satisfy ``0 < lam < phi / (4 max{c1, c2})``.
    stop_residual : float
        Stop once ``D <= stop_residual``.
    max_iter : int
    prox_settings : ProxSettings
    residual_lam : float, optional
        Step inside the residual ``D``; defaults to ``lam``.
    residual_every : int
        Evaluate ``D`` only every ``residual_every`` iterations. Stopping on
        the residual is checked at those iterations only.
    record_iterates : bool
        Keep every iterate and anchor on the trace.

    Returns
    -------
    SolverTrace
        Terminates with ``fixed_point`` when ``x_{n+1} = x_n = xbar_n`` up to
        ``1e-14 (1 + ||x_n||)``, ``residual_met``, or ``max_iterations``.
    """
    lam = check_gra_step(lam, instance.constants)
    f, box = instance.bifunction, instance.box

    def update(k, x, xbar):
        return prox_step(f, x, xbar, lam, box, prox_settings), lam

    return _golden_loop(
        instance,
        "gra",
        update,
        instance.xbar_start,
        instance.x_start,
        lam if residual_lam is None else residual_lam,
        stop_residual,
        max_iter,
        prox_settings,
        residual_every,
        record_iterates,
    )


def _default_residual_lam(instance):
    return step_from_fraction(0.9, instance.constants)


def mgra1_solve(
    instance,
    steps=DiminishingStep(1.0),
    stop_residual=1e-10,
    max_iter=1_000_000,
    prox_settings=DEFAULT_PROX,
    residual_lam=None,
    residual_every=1,
    record_iterates=True,
):
    """Modified golden ratio algorithm with diminishing prox steps.

    ``x_n = ((phi - 1) y_n + x_{n-1}) / phi`` and
    ``y_{n+1} = argmin{lam_n f(y_n, y) + 0.5 ||x_n - y||^2 : y in C}``, with
    ``x_0 = instance.xbar_start`` and ``y_1 = instance.x_start``.

    ``residual_lam`` defaults to the benchmark GRA step ``0.9 phi / (4 c1)``
    so residual curves are comparable across algorithms.
    """
    if isinstance(steps, FixedStep) or not callable(steps):
        raise StepSizeError("MGRA1 requires a diminishing step rule, not a fixed step")
    f, box = instance.bifunction, instance.box

    def update(k, y, x):
        lam_k = steps(k)
        if not lam_k > 0:
            raise StepSizeError(f"step lam_{k} = {lam_k!r} is not positive")
        return prox_step(f, y, x, lam_k, box, prox_settings), lam_k

    if residual_lam is None:
        residual_lam = _default_residual_lam(instance)
    return _golden_loop(
        instance,
        "mgra1",
        update,
        instance.xbar_start,
        instance.x_start,
        residual_lam,
        stop_residual,
        max_iter,
        prox_settings,
        residual_every,
        record_iterates,
    )


def mgra2_solve(
    instance,
    betas=DiminishingStep(1.0),
    stop_residual=1e-10,
    max_iter=1_000_000,
    prox_settings=DEFAULT_PROX,
    residual_lam=None,
    residual_every=1,
    record_iterates=True,
):
    """Second modified golden ratio algorithm (projected subgradient variant).

    ``g_n = (P + Q) y_n + q``, ``lam_n = beta_n / max{1, ||g_n||}`` and
    ``y_{n+1} = P_C(x_n - lam_n g_n)``. The default ``beta_n = 1 / (n + 1)``
    is square-summable but not summable.
    """
    if not callable(betas):
        raise StepSizeError("betas must be a step rule")
    f, box = instance.bifunction, instance.box

    def update(k, y, x):
        beta = betas(k)
        if not beta > 0:
            raise StepSizeError(f"beta_{k} = {beta!r} is not positive")
        g = subgradient_at_diagonal(f, y)
        lam_k = beta / max(1.0, float(np.linalg.norm(g)))
        return project_box(x - lam_k * g, box), lam_k

    if residual_lam is None:
        residual_lam = _default_residual_lam(instance)
    return _golden_loop(
        instance,
        "mgra2",
        update,
        instance.xbar_start,
        instance.x_start,
        residual_lam,
        stop_residual,
        max_iter,
        prox_settings,
        residual_every,
        record_iterates,
    )
