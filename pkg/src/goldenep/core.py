"""Equilibrium problems EP(f, C) with an affine bifunction over a box.

The bifunction is

    f(x, y) = <P x + Q y + q, y - x>

which is the affine reduction of the Nash-Cournot oligopoly model. With
``Q`` symmetric positive semidefinite and ``P - Q`` symmetric positive
definite it is strongly pseudomonotone with modulus ``gamma = lambda_min(P - Q)``
and satisfies the Lipschitz-type condition with ``c1 = c2 = ||P - Q|| / 2``.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from ._validation import (
    DimensionError,
    InvariantError,
    check_square,
    check_vector,
    frozen,
)

SYMMETRY_TOL = 1e-12
# relative slack on the smallest eigenvalue of Q before it counts as indefinite
PSD_TOL = 1e-10
# gamma at or below this (relative to ||P - Q||) is treated as zero
PD_TOL = 1e-12


class NotStronglyPseudomonotoneError(ValueError):
    """P - Q is not positive definite, so no modulus gamma > 0 exists."""


def _same_bits(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and a.dtype == b.dtype and a.tobytes() == b.tobytes()


def _asymmetry(a):
    return float(np.max(np.abs(a - a.T))) if a.size else 0.0


@dataclass(frozen=True, eq=False)
class BoxSet:
    """The box ``C = [lower_1, upper_1] x ... x [lower_m, upper_m]``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = check_vector(self.lower, name="lower")
        upper = check_vector(self.upper, dim=lower.shape[0], name="upper")
        if lower.shape[0] < 1:
            raise InvariantError("box dimension must be at least 1")
        bad = np.flatnonzero(lower > upper)
        if bad.size:
            i = int(bad[0])
            raise InvariantError(
                f"box lower[{i}]={lower[i]!r} exceeds upper[{i}]={upper[i]!r}"
            )
        object.__setattr__(self, "lower", frozen(lower))
        object.__setattr__(self, "upper", frozen(upper))

    @classmethod
    def uniform(cls, low, high, dim):
        return cls(np.full(dim, float(low)), np.full(dim, float(high)))

    @property
    def dim(self):
        return self.lower.shape[0]

    def contains(self, x, atol=0.0):
        x = np.asarray(x, dtype=np.float64)
        return bool(np.all(x >= self.lower - atol) and np.all(x <= self.upper + atol))

    def __eq__(self, other):
        if not isinstance(other, BoxSet):
            return NotImplemented
        return _same_bits(self.lower, other.lower) and _same_bits(self.upper, other.upper)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class AffineBifunction:
    """Affine bifunction ``f(x, y) = <P x + Q y + q, y - x>``.

    Construction checks shapes, that ``Q`` and ``P - Q`` are symmetric to
    within ``SYMMETRY_TOL`` (max absolute asymmetry) and that ``Q`` is
    positive semidefinite. Positive definiteness of ``P - Q`` is checked by
    :func:`derive_constants`, so degenerate bifunctions (e.g. ``P = Q``) can
    still be built and evaluated.
    """

    P: np.ndarray
    Q: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        q = check_vector(self.q, name="q")
        m = q.shape[0]
        P = check_square(self.P, dim=m, name="P")
        Q = check_square(self.Q, dim=m, name="Q")
        asym = _asymmetry(Q)
        if asym > SYMMETRY_TOL:
            raise InvariantError(f"Q is not symmetric (max asymmetry {asym:.3e})")
        asym = _asymmetry(P - Q)
        if asym > SYMMETRY_TOL:
            raise InvariantError(f"P - Q is not symmetric (max asymmetry {asym:.3e})")
        eig_q = np.linalg.eigvalsh(Q)
        scale = max(1.0, float(np.max(np.abs(eig_q))))
        if eig_q[0] < -PSD_TOL * scale:
            raise InvariantError(
                f"Q is not positive semidefinite (smallest eigenvalue {eig_q[0]:.3e})"
            )
        object.__setattr__(self, "P", frozen(P))
        object.__setattr__(self, "Q", frozen(Q))
        object.__setattr__(self, "q", frozen(q))
        # spectral norm of Q, reused by every prox solve
        object.__setattr__(self, "_norm_Q", float(np.max(np.abs(eig_q))))

    @property
    def dim(self):
        return self.q.shape[0]

    @property
    def norm_Q(self):
        return self._norm_Q

    @cached_property
    def P_minus_Q(self):
        return frozen(self.P - self.Q)

    @cached_property
    def P_plus_Q(self):
        return frozen(self.P + self.Q)

    def __call__(self, x, y):
        return evaluate(self, x, y)

    def __eq__(self, other):
        if not isinstance(other, AffineBifunction):
            return NotImplemented
        return all(
            _same_bits(getattr(self, k), getattr(other, k)) for k in ("P", "Q", "q")
        )

    __hash__ = None


@dataclass(frozen=True)
class ProblemConstants:
    """Lipschitz-type constants ``c1, c2`` and strong pseudomonotonicity modulus."""

    c1: float
    c2: float
    gamma: float

    @property
    def c_max(self):
        return max(self.c1, self.c2)


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """A bifunction on a box plus the starting pair ``(x_start, xbar_start)``.

    ``x_start`` is the first feasible iterate and must lie in the box;
    ``xbar_start`` is the initial golden-ratio anchor and may be anywhere.
    """

    bifunction: AffineBifunction
    box: BoxSet
    x_start: np.ndarray
    xbar_start: np.ndarray
    seed: Optional[int] = None

    def __post_init__(self):
        m = self.bifunction.dim
        if self.box.dim != m:
            raise DimensionError(f"box has dimension {self.box.dim}, bifunction {m}")
        x = check_vector(self.x_start, dim=m, name="x_start")
        xbar = check_vector(self.xbar_start, dim=m, name="xbar_start")
        if not self.box.contains(x):
            raise InvariantError("x_start does not lie in the box")
        if self.seed is not None:
            seed = int(self.seed)
            if not 0 <= seed < 2**64:
                raise InvariantError(f"seed must be a 64-bit unsigned integer, got {seed}")
            object.__setattr__(self, "seed", seed)
        object.__setattr__(self, "x_start", frozen(x))
        object.__setattr__(self, "xbar_start", frozen(xbar))

    @property
    def dimension(self):
        return self.bifunction.dim

    @cached_property
    def constants(self):
        return derive_constants(self.bifunction)

    def __eq__(self, other):
        if not isinstance(other, ProblemInstance):
            return NotImplemented
        return (
            self.bifunction == other.bifunction
            and self.box == other.box
            and _same_bits(self.x_start, other.x_start)
            and _same_bits(self.xbar_start, other.xbar_start)
            and self.seed == other.seed
        )

    __hash__ = None


def evaluate(f, x, y):
    """Return ``f(x, y) = <P x + Q y + q, y - x>``."""
    m = f.dim
    x = check_vector(x, dim=m, name="x")
    y = check_vector(y, dim=m, name="y")
    return float(np.dot(f.P @ x + f.Q @ y + f.q, y - x))


def subgradient_at_diagonal(f, y):
    """Gradient of ``z -> f(y, z)`` at ``z = y``, i.e. ``(P + Q) y + q``."""
    y = check_vector(y, dim=f.dim, name="y")
    return f.P_plus_Q @ y + f.q


def derive_constants(f):
    """Compute ``c1 = c2 = ||P - Q|| / 2`` and ``gamma = lambda_min(P - Q)``.

    Raises
    ------
    NotStronglyPseudomonotoneError
        If ``P - Q`` has no positive smallest eigenvalue.
    """
    eig = np.linalg.eigvalsh(f.P_minus_Q)
    spectral_norm = float(np.max(np.abs(eig)))
    gamma = float(eig[0])
    if gamma <= PD_TOL * max(1.0, spectral_norm):
        raise NotStronglyPseudomonotoneError(
            f"not strongly pseudomonotone: smallest eigenvalue of P - Q is {gamma:.3e}"
        )
    c = spectral_norm / 2.0
    return ProblemConstants(c1=c, c2=c, gamma=gamma)
