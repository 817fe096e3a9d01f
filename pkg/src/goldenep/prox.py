"""Box projection and the proximal subproblem of the affine bifunction.

``prox_step`` solves

    argmin { lam * f(x, y) + 0.5 * ||y - z||^2 : y in C }

for fixed ``x``. The objective ``F`` is 1-strongly convex with gradient

    grad F(y) = lam * (2 Q y + (P - Q) x + q) + (y - z)

and Lipschitz constant ``L = 2 lam ||Q|| + 1``, so projected gradient with the
step ``2 / (L + 1)`` contracts by ``(L - 1) / (L + 1)`` per iteration.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import DimensionError, check_positive_int, check_positive_scalar


class ProxConvergenceError(RuntimeError):
    """The inner projected-gradient loop ran out of iterations.

    The iterate with the smallest projected-gradient residual is kept on
    ``best`` together with that residual.
    """

    def __init__(self, message, best, residual):
        super().__init__(message)
        self.best = best
        self.residual = residual


@dataclass(frozen=True)
class ProxSettings:
    grad_tolerance: float = 1e-12
    max_inner_iterations: int = 10_000

    def __post_init__(self):
        check_positive_scalar(self.grad_tolerance, "grad_tolerance")
        check_positive_int(self.max_inner_iterations, "max_inner_iterations")


DEFAULT_PROX = ProxSettings()


def project_box(z, box):
    """Euclidean projection of ``z`` onto ``box`` (componentwise clamp)."""
    z = np.asarray(z, dtype=np.float64)
    if z.ndim == 0:
        z = z.reshape(1)
    if z.shape != box.lower.shape:
        raise DimensionError(f"z has shape {z.shape}, box has dimension {box.dim}")
    return np.clip(z, box.lower, box.upper)


def prox_step(f, x, z, lam, box, settings=DEFAULT_PROX):
    """Evaluate ``prox_{lam f(x, .)}(z)`` over ``box``.

    Parameters
    ----------
    f : AffineBifunction
    x : ndarray
        First argument of the bifunction, held fixed.
    z : ndarray
        Prox anchor; also the warm start (after projection).
    lam : float
        Nonnegative weight on ``f(x, .)``. ``lam == 0`` reduces to projection.
    box : BoxSet
    settings : ProxSettings, optional

    Returns
    -------
    ndarray
        The minimizer, always inside ``box``.

    Raises
    ------
    ProxConvergenceError
        If the projected-gradient residual does not reach
        ``settings.grad_tolerance`` within ``settings.max_inner_iterations``.
    """
    m = f.dim
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if x.shape != (m,) or z.shape != (m,) or box.dim != m:
        raise DimensionError(
            f"inconsistent dimensions: x {x.shape}, z {z.shape}, box {box.dim}, f {m}"
        )
    lam = check_positive_scalar(lam, "lam", allow_zero=True)
    lower, upper = box.lower, box.upper
    y = np.clip(z, lower, upper)
    if lam == 0.0:
        return y

    # grad F(y) = two_lam_Q @ y + y + shift
    two_lam_Q = (2.0 * lam) * f.Q
    shift = lam * (f.P_minus_Q @ x + f.q) - z
    step = 2.0 / (2.0 * lam * f.norm_Q + 2.0)
    tol = settings.grad_tolerance

    best, best_res = y, np.inf
    for _ in range(settings.max_inner_iterations):
        grad = two_lam_Q @ y + y + shift
        res = np.linalg.norm(y - np.clip(y - grad, lower, upper))
        if res <= tol:
            return y
        if res < best_res:
            best, best_res = y, res
        y = np.clip(y - step * grad, lower, upper)

    raise ProxConvergenceError(
        f"prox subproblem not solved to {tol:.1e} in "
        f"{settings.max_inner_iterations} iterations (best residual {best_res:.3e})",
        best=best,
        residual=best_res,
    )
