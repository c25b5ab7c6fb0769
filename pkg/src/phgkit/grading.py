"""Graded dilations, extended dilations, and homogeneous quasi-norms.

A weight tuple (rho_1, ..., rho_d) of positive integers generates the
one-parameter dilation family

    dilate(s, v) = (s**rho_1 * v_1, ..., s**rho_d * v_d),   s > 0,

and the extended family on R^{d+1} that appends a weight-1 slot.  Two
homogeneous quasi-norms are provided: the sum-of-roots variant

    |v| = sum_k |v_k| ** (1 / rho_k)

and a smooth even-power variant

    |v| = (sum_k v_k ** (2a / rho_k)) ** (1 / (2a)),  a = lcm(rho_k),

which is smooth away from 0 and is the default (grid derivative checks
need smoothness).  Both satisfy |dilate(s, v)| = s * |v| exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "Weights",
    "ExtendedWeights",
    "QuasiNorm",
    "NormComparisonReport",
    "dilate",
    "dilate_ext",
    "quasi_norm",
    "measure_norm_constants",
]


class InvalidParameterError(ValueError):
    """Raised for out-of-contract arguments (non-positive scale, empty sample set, ...)."""


@dataclass(frozen=True)
class Weights:
    """Exponent tuple of a graded dilation family."""

    rho: tuple[int, ...]

    def __post_init__(self):
        if len(self.rho) < 1:
            raise InvalidParameterError("weights need dimension >= 1")
        if any((not isinstance(r, int)) or r < 1 for r in self.rho):
            raise InvalidParameterError(f"weights must be positive integers, got {self.rho}")
        object.__setattr__(self, "rho", tuple(int(r) for r in self.rho))

    @property
    def d(self) -> int:
        return len(self.rho)

    @property
    def lcm(self) -> int:
        return math.lcm(*self.rho)

    def extended(self) -> "ExtendedWeights":
        return ExtendedWeights(self)

    def to_config(self, variant: str = "smooth") -> dict:
        return {"rho": list(self.rho), "variant": variant}

    @staticmethod
    def from_config(cfg: dict | str) -> tuple["Weights", str]:
        if isinstance(cfg, str):
            cfg = json.loads(cfg)
        w = Weights(tuple(int(r) for r in cfg["rho"]))
        return w, cfg.get("variant", "smooth")


@dataclass(frozen=True)
class ExtendedWeights:
    """Base weights plus a trailing slot of weight 1 (the scale variable)."""

    base: Weights

    @property
    def rho(self) -> tuple[int, ...]:
        return self.base.rho + (1,)

    @property
    def d(self) -> int:
        return self.base.d + 1

    @property
    def lcm(self) -> int:
        return math.lcm(self.base.lcm, 1)


def _as_weights(w: Weights | ExtendedWeights) -> tuple[int, ...]:
    return w.rho


def dilate(w: Weights, s: float, v: np.ndarray) -> np.ndarray:
    """Apply the graded dilation: component k is scaled by s**rho_k.

    ``v`` may be a single d-vector or an (N, d) array of vectors.
    """
    if not (s > 0):
        raise InvalidParameterError(f"dilation scale must be positive, got {s}")
    v = np.asarray(v, dtype=float)
    factors = np.array([s ** r for r in w.rho])
    return v * factors


def dilate_ext(w: ExtendedWeights, s: float, v: np.ndarray, t: float | np.ndarray) -> np.ndarray:
    """Extended dilation: base slots dilated, last slot multiplied by s."""
    if not (s > 0):
        raise InvalidParameterError(f"dilation scale must be positive, got {s}")
    v = np.atleast_2d(np.asarray(v, dtype=float))
    t = np.broadcast_to(np.asarray(t, dtype=float), v.shape[:1])
    out = np.concatenate([dilate(w.base, s, v), (s * t)[:, None]], axis=1)
    return out[0] if out.shape[0] == 1 and np.asarray(t).ndim == 0 else out


@dataclass(frozen=True)
class QuasiNorm:
    """A homogeneous quasi-norm attached to a weight tuple.

    variant "smooth": (sum v_k**(2a/rho_k)) ** (1/(2a)) with a = lcm(rho).
    variant "sum":    sum |v_k| ** (1/rho_k).
    """

    weights: Weights | ExtendedWeights
    variant: str = "smooth"

    def __post_init__(self):
        if self.variant not in ("smooth", "sum"):
            raise InvalidParameterError(f"unknown quasi-norm variant {self.variant!r}")

    def __call__(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        rho = _as_weights(self.weights)
        single = v.ndim == 1
        vv = np.atleast_2d(v)
        if vv.shape[1] != len(rho):
            raise InvalidParameterError(
                f"vector dimension {vv.shape[1]} does not match weights of dimension {len(rho)}")
        if self.variant == "sum":
            out = sum(np.abs(vv[:, k]) ** (1.0 / r) for k, r in enumerate(rho))
        else:
            a = math.lcm(*rho)
            # square first so the even powers are exactly symmetric in v
            out = sum((vv[:, k] * vv[:, k]) ** (a // r)
                      for k, r in enumerate(rho)) ** (1.0 / (2 * a))
        return out[0] if single else out

    def even_power_polynomial_exponents(self) -> tuple[int, ...]:
        """Exponents 2a/rho_k of the polynomial inside the smooth variant."""
        a = math.lcm(*_as_weights(self.weights))
        return tuple(2 * a // r for r in _as_weights(self.weights))


def quasi_norm(q: QuasiNorm, v: np.ndarray) -> np.ndarray:
    return q(v)


@dataclass(frozen=True)
class NormComparisonReport:
    """Sampled two-sided comparison against the Euclidean norm.

    The constants are measured on the sample, not proven bounds: they are the
    extremal ratios |v| / ||v||**exponent, so the sandwich

        C1 * ||v||**a  <=  |v|  <=  C2 * ||v||**b

    holds on every sampled point by construction.  ``triangle_constant`` is
    the largest observed ratio |v + w| / (|v| + |w|) over sampled pairs.
    """

    C1: float
    C2: float
    a: float
    b: float
    triangle_constant: float
    sample_description: str
    regime: str

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)


def _sandwich_exponents(rho: Sequence[int], euclid: np.ndarray) -> tuple[float, float, str]:
    """Regime-dependent exponents: the comparison with the Euclidean norm has
    different sharp powers on the unit ball and outside it, so pick the pair
    matching where the sample lives (median radius)."""
    rmin, rmax = 1.0 / max(rho), 1.0 / min(rho)
    if float(np.median(euclid)) >= 1.0:
        return rmin, rmax, "large-radius"
    return rmax, rmin, "small-radius"


def measure_norm_constants(
    q: QuasiNorm,
    samples: np.ndarray,
    pair_limit: int = 200,
    seed: int = 0,
) -> NormComparisonReport:
    """Measure the tightest sandwich constants valid on ``samples``.

    ``samples`` is an (N, d) array; the zero vector is rejected since the
    ratio fit needs nonzero points.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.size == 0:
        raise InvalidParameterError("sample set must be nonempty")
    euclid = np.linalg.norm(samples, axis=1)
    if np.any(euclid == 0):
        raise InvalidParameterError("sample set must exclude the zero vector")

    rho = _as_weights(q.weights)
    a, b, regime = _sandwich_exponents(rho, euclid)
    values = q(samples)
    C1 = float(np.min(values / euclid ** a))
    C2 = float(np.max(values / euclid ** b))

    n = samples.shape[0]
    if n * (n - 1) // 2 <= pair_limit:
        pairs_i, pairs_j = np.triu_indices(n, k=1)
    else:
        rng = np.random.default_rng(seed)
        pairs_i = rng.integers(0, n, size=pair_limit)
        pairs_j = rng.integers(0, n, size=pair_limit)
        keep = pairs_i != pairs_j
        pairs_i, pairs_j = pairs_i[keep], pairs_j[keep]
    if len(pairs_i):
        ratio = q(samples[pairs_i] + samples[pairs_j]) / (values[pairs_i] + values[pairs_j])
        triangle = float(np.max(ratio))
    else:
        triangle = 1.0

    return NormComparisonReport(
        C1=C1, C2=C2, a=a, b=b,
        triangle_constant=triangle,
        sample_description=f"{n} points, euclid radius in [{euclid.min():.3g}, {euclid.max():.3g}]",
        regime=regime,
    )
