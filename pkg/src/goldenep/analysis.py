"""R-linear rate certificate for fixed-step GRA and related diagnostics.

For a step ``lam`` with ``0 < lam < phi / (4 max{c1, c2})`` set ``alpha = 2 lam gamma``
and let ``r1, r2 > 0`` solve ``1 - alpha - r2 + r1 = 0`` and ``alpha / phi = r1 r2``.
With ``a_n = phi / (phi - 1) ||xbar_n - x*||^2`` and ``b_n = phi / 2 ||x_n - x_{n-1}||^2``
the GRA iterates satisfy

    a_{n+1} + r1 a_n + b_{n+1} <= theta (a_n + r1 a_{n-1} + b_n),
    theta = max{eps, r2} < 1,

where ``eps in (0, 1)`` is any number with ``lam < eps phi / (4 c1)``.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .solvers import PHI, StepSizeError, check_gra_step

# added to the smallest admissible eps so that lam < eps phi / (4 c1) is strict
EPS_GUARD = 1e-9

A_WEIGHT = PHI / (PHI - 1.0)
B_WEIGHT = PHI / 2.0


@dataclass(frozen=True)
class RateCertificate:
    alpha: float
    epsilon: float
    r1: float
    r2: float
    theta: float
    M: Optional[float] = None

    def envelope(self, n):
        """Bound ``M theta^(n-1)`` on ``||xbar_n - x*||^2``."""
        if self.M is None:
            raise ValueError("certificate has no M; use certificate_bound_M first")
        return self.M * self.theta ** (np.asarray(n, dtype=np.float64) - 1.0)


def r2_of(alpha):
    """``r2(alpha) = (1 - alpha + sqrt((alpha - 1)^2 + 4 alpha / phi)) / 2``."""
    alpha = np.asarray(alpha, dtype=np.float64)
    return (1.0 - alpha + np.sqrt((alpha - 1.0) ** 2 + 4.0 * alpha / PHI)) / 2.0


def r1_of(alpha):
    alpha = np.asarray(alpha, dtype=np.float64)
    return (alpha - 1.0 + np.sqrt((alpha - 1.0) ** 2 + 4.0 * alpha / PHI)) / 2.0


def rate_certificate(lam, constants):
    """Build the certificate ``(alpha, eps, r1, r2, theta)`` for a GRA step.

    ``eps`` is the smallest admissible value ``4 lam c1 / phi`` plus a ``1e-9``
    guard, clamped below 1, so ``theta`` is the tightest value the argument
    supports.
    """
    lam = check_gra_step(lam, constants)
    alpha = 2.0 * lam * constants.gamma
    r1 = float(r1_of(alpha))
    r2 = float(r2_of(alpha))
    eps = min(1.0 - EPS_GUARD, 4.0 * lam * constants.c1 / PHI + EPS_GUARD)
    if not 0.0 < eps < 1.0:
        raise StepSizeError(f"no admissible eps in (0, 1) for lam={lam!r}")
    return RateCertificate(alpha=alpha, epsilon=eps, r1=r1, r2=r2, theta=max(eps, r2))


def lyapunov_terms(trace, x_star):
    """Sequences ``a_n`` (n >= 0) and ``b_n`` (n >= 1) of a GRA trace.

    ``b`` is returned with ``b[0] = nan``. ``b_1`` uses the convention
    ``x_0 = xbar_0`` since GRA never produces an ``x_0``.
    """
    if trace.iterates is None or trace.anchors is None:
        raise ValueError("trace was recorded without iterates")
    x_star = np.asarray(x_star, dtype=np.float64)
    xbar = trace.anchors
    # x[n] for n = 0..N+1 with x_0 := xbar_0 and x_{k+1} = iterates[k]
    x = np.vstack([xbar[:1], trace.iterates])
    a = A_WEIGHT * np.sum((xbar - x_star) ** 2, axis=1)
    b = np.full(x.shape[0] - 1, np.nan)
    b[1:] = B_WEIGHT * np.sum((x[1:-1] - x[:-2]) ** 2, axis=1)
    return a, b


def certificate_bound_M(cert, trace, x_star):
    """Return ``cert`` with ``M = (phi - 1) / phi * (a_1 + r1 a_0 + b_1)`` filled in."""
    if trace.iterates is None or trace.iterates.shape[0] < 2:
        raise ValueError("need a recorded trace with at least 2 iterations")
    a, b = lyapunov_terms(trace, x_star)
    M = (a[1] + cert.r1 * a[0] + b[1]) / A_WEIGHT
    return replace(cert, M=float(M))


def contraction_gaps(cert, trace, x_star, start=2):
    """``theta (a_n + r1 a_{n-1} + b_n) - (a_{n+1} + r1 a_n + b_{n+1})`` for n >= start.

    The inequality is derived from three consecutive algorithm-generated
    iterates, so it is only guaranteed from ``n = 2`` on; ``x_1`` is a free
    starting point.
    """
    a, b = lyapunov_terms(trace, x_star)
    n = np.arange(start, a.shape[0] - 1)
    lhs = a[n + 1] + cert.r1 * a[n] + b[n + 1]
    rhs = cert.theta * (a[n] + cert.r1 * a[n - 1] + b[n])
    return n, rhs - lhs


def fit_rate(residuals, burn_in=None):
    """Per-iteration factor ``rho`` from a least-squares fit of ``log r_n`` on ``n``.

    Parameters
    ----------
    residuals : array_like
        Positive values ``r_0, r_1, ...`` (at least ``burn_in + 10`` of them).
    burn_in : int, optional
        Leading entries to skip. Defaults to the first 20%.
    """
    r = np.asarray(residuals, dtype=np.float64)
    if burn_in is None:
        burn_in = int(0.2 * r.shape[0])
    if r.ndim != 1 or r.shape[0] < burn_in + 10:
        raise ValueError(f"need at least burn_in + 10 = {burn_in + 10} residuals")
    window = r[burn_in:]
    if not np.all(window > 0) or not np.all(np.isfinite(window)):
        raise ValueError("residuals in the fitted window must be positive and finite")
    n = np.arange(burn_in, r.shape[0], dtype=np.float64)
    slope = np.polyfit(n, np.log(window), 1)[0]
    return float(np.exp(slope))


def counterexample_run(x0, y1, steps, N):
    """Scalar MGRA1 sequence for ``f(x, y) = x (y - x)`` on the real line.

    Returns ``x_0, ..., x_N`` where ``x_1 = ((phi - 1) y_1 + x_0) / phi`` and
    ``x_{n+1} = (1 - lam_n) x_n + lam_n / phi * x_{n-1}``.

    ``steps`` is either a callable ``n -> lam_n`` or a sequence indexed by
    ``n`` (entry 0 unused). Every ``lam_n`` must lie in (0, 1).
    """
    if N < 2:
        raise ValueError(f"N must be at least 2, got {N}")
    n = np.arange(1, N)
    if callable(steps):
        lam = np.array([float(steps(int(k))) for k in n])
    else:
        lam = np.asarray(steps, dtype=np.float64)[1:N]
        if lam.shape[0] != N - 1:
            raise ValueError(f"need steps lam_1..lam_{N - 1}")
    bad = np.flatnonzero(~((lam > 0) & (lam < 1)))
    if bad.size:
        k = int(bad[0]) + 1
        raise StepSizeError(f"lam_{k} = {lam[k - 1]!r} is not in (0, 1)")

    x = np.empty(N + 1)
    x[0] = x0
    x[1] = ((PHI - 1.0) * y1 + x0) / PHI
    for k in range(1, N):
        lk = lam[k - 1]
        x[k + 1] = (1.0 - lk) * x[k] + lk / PHI * x[k - 1]
    return x


def is_strictly_decreasing(values):
    values = np.asarray(values)
    return bool(np.all(np.diff(values) < 0))


__all__ = [
    "RateCertificate",
    "certificate_bound_M",
    "contraction_gaps",
    "counterexample_run",
    "fit_rate",
    "lyapunov_terms",
    "r1_of",
    "r2_of",
    "rate_certificate",
    "is_strictly_decreasing",
]
