"""Seeded random Nash-Cournot instances and their JSON file format.

An instance is built from two independent Haar-random orthogonal matrices
``U`` and ``V``:

    Q = U diag(l2) U^T,   l2_k ~ U(eig_pos_range)   (positive semidefinite)
    T = V diag(l1) V^T,   l1_k ~ U(eig_neg_range)   (negative definite)
    P = Q - T

so ``P - Q = -T`` is symmetric positive definite. All draws come from one
``numpy.random.Generator(PCG64(seed))`` in a fixed order.
"""

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Tuple

import numpy as np

from ._validation import InvariantError, check_positive_int
from .core import AffineBifunction, BoxSet, ProblemInstance

FORMAT_VERSION = 1
RNG_ID = "numpy.PCG64/v1"


class InstanceFormatError(ValueError):
    """An instance file is malformed; the message names the offending field."""


def _check_interval(interval, name, closed=False):
    lo, hi = (float(v) for v in interval)
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi or (not closed and lo == hi):
        raise InvariantError(f"{name} must be a nonempty finite interval, got {interval}")
    return lo, hi


@dataclass(frozen=True)
class GeneratorConfig:
    dimension: int
    seed: int = 0
    eig_neg_range: Tuple[float, float] = (-2.0, 0.0)
    eig_pos_range: Tuple[float, float] = (0.0, 2.0)
    q_range: Tuple[float, float] = (-2.0, 2.0)
    box_range: Tuple[float, float] = (-2.0, 5.0)
    start_range: Tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        check_positive_int(self.dimension, "dimension")
        if not 0 <= int(self.seed) < 2**64:
            raise InvariantError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        neg = _check_interval(self.eig_neg_range, "eig_neg_range")
        pos = _check_interval(self.eig_pos_range, "eig_pos_range")
        if neg[1] > 0:
            raise InvariantError("eig_neg_range must lie in (-inf, 0)")
        if pos[0] < 0:
            raise InvariantError("eig_pos_range must lie in (0, inf)")
        _check_interval(self.q_range, "q_range")
        box = _check_interval(self.box_range, "box_range", closed=True)
        start = _check_interval(self.start_range, "start_range", closed=True)
        if start[0] < box[0] or start[1] > box[1]:
            raise InvariantError("start_range must lie inside the box")

    @property
    def box(self):
        return BoxSet.uniform(*self.box_range, self.dimension)


def _uniform_open(rng, interval, size):
    """Uniform draws on the open interval; endpoint hits are redrawn."""
    lo, hi = interval
    out = rng.uniform(lo, hi, size)
    bad = out <= lo
    while np.any(bad):
        out[bad] = rng.uniform(lo, hi, int(bad.sum()))
        bad = out <= lo
    return out


def random_orthogonal(rng, m):
    """Haar-distributed orthogonal matrix: QR of a Gaussian matrix, signs fixed by diag(R)."""
    Z = rng.standard_normal((m, m))
    U, R = np.linalg.qr(Z)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return U * signs


def _spectral_matrix(U, eigenvalues):
    A = (U * eigenvalues) @ U.T
    return (A + A.T) / 2.0


def generate(config, return_factors=False):
    """Draw a Nash-Cournot :class:`ProblemInstance` from ``config``.

    With ``return_factors=True`` also return a dict holding ``U``, ``V`` and
    the drawn eigenvalues ``eig_pos`` (of ``Q``) and ``eig_neg`` (of ``T``).
    """
    m = config.dimension
    rng = np.random.Generator(np.random.PCG64(int(config.seed)))
    eig_pos = _uniform_open(rng, config.eig_pos_range, m)
    eig_neg = _uniform_open(rng, config.eig_neg_range, m)
    U = random_orthogonal(rng, m)
    V = random_orthogonal(rng, m)
    q = _uniform_open(rng, config.q_range, m)
    start = rng.uniform(*config.start_range, m)

    Q = _spectral_matrix(U, eig_pos)
    T = _spectral_matrix(V, eig_neg)
    P = Q - T
    instance = ProblemInstance(
        bifunction=AffineBifunction(P, Q, q),
        box=config.box,
        x_start=start,
        xbar_start=start.copy(),
        seed=int(config.seed),
    )
    if return_factors:
        return instance, {"U": U, "V": V, "eig_pos": eig_pos, "eig_neg": eig_neg}
    return instance


def instance_to_dict(instance):
    f = instance.bifunction
    return {
        "format_version": FORMAT_VERSION,
        "dimension": instance.dimension,
        "seed": instance.seed,
        "rng_id": RNG_ID,
        "P": f.P.tolist(),
        "Q": f.Q.tolist(),
        "q": f.q.tolist(),
        "box_lower": instance.box.lower.tolist(),
        "box_upper": instance.box.upper.tolist(),
        "x_start": instance.x_start.tolist(),
        "xbar_start": instance.xbar_start.tolist(),
    }


def _field_array(data, key, shape):
    if key not in data:
        raise InstanceFormatError(f"missing field '{key}'")
    try:
        arr = np.array(data[key], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"field '{key}' is not numeric: {exc}") from None
    if arr.shape != shape:
        raise InstanceFormatError(f"field '{key}' has shape {arr.shape}, expected {shape}")
    if not np.all(np.isfinite(arr)):
        raise InstanceFormatError(f"field '{key}' contains non-finite values")
    return arr


def instance_from_dict(data):
    if not isinstance(data, dict):
        raise InstanceFormatError("instance document must be a JSON object")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise InstanceFormatError(f"field 'format_version' is {version!r}, expected {FORMAT_VERSION}")
    m = data.get("dimension")
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise InstanceFormatError(f"field 'dimension' must be a positive integer, got {m!r}")
    seed = data.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise InstanceFormatError(f"field 'seed' must be an integer or null, got {seed!r}")
    rng_id = data.get("rng_id")
    if rng_id is not None and not isinstance(rng_id, str):
        raise InstanceFormatError(f"field 'rng_id' must be a string, got {rng_id!r}")

    vec, mat = (m,), (m, m)
    P = _field_array(data, "P", mat)
    Q = _field_array(data, "Q", mat)
    q = _field_array(data, "q", vec)
    lower = _field_array(data, "box_lower", vec)
    upper = _field_array(data, "box_upper", vec)
    x_start = _field_array(data, "x_start", vec)
    xbar_start = _field_array(data, "xbar_start", vec)
    return ProblemInstance(
        bifunction=AffineBifunction(P, Q, q),
        box=BoxSet(lower, upper),
        x_start=x_start,
        xbar_start=xbar_start,
        seed=seed,
    )


def save_instance(instance, path):
    # json writes floats with repr(), which round-trips float64 exactly
    Path(path).write_text(json.dumps(instance_to_dict(instance), allow_nan=False))


def load_instance(path):
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{path}: not valid JSON ({exc})") from None
    return instance_from_dict(data)


def config_to_dict(config):
    return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(config).items()}


__all__ = [
    "FORMAT_VERSION",
    "GeneratorConfig",
    "InstanceFormatError",
    "RNG_ID",
    "config_to_dict",
    "generate",
    "instance_from_dict",
    "instance_to_dict",
    "load_instance",
    "random_orthogonal",
    "save_instance",
]
