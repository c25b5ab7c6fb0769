"""Evaluation grids: base points times dyadic radial shells of directions.

Directions live on the unit quasi-sphere of the grid's weight tuple (axis
directions first, then seeded random ones), and shell i is the exact
dilate of the direction set by r_0 * 2**i, so every shell point has
quasi-norm equal to its shell radius up to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from phgkit.grading import (ExtendedWeights, InvalidParameterError, QuasiNorm,
                            Weights, dilate)

from . import expr as ex

__all__ = ["EvaluationGrid"]


@dataclass(frozen=True)
class EvaluationGrid:
    """Sample layout for decay and seminorm measurements.

    ``weights`` may be extended, in which case the final direction slot is
    the t variable and signatures with a t slot are expected downstream.
    """

    weights: Weights | ExtendedWeights
    base_points: tuple[tuple[float, ...], ...] = ((),)
    r0: float = 1.0
    L: int = 10
    ndir: int | None = None
    seed: int = 7
    variant: str = "smooth"

    def __post_init__(self):
        if self.r0 <= 0:
            raise InvalidParameterError("innermost shell radius must be positive")
        if self.L < 0:
            raise InvalidParameterError("need a nonnegative shell count")

    @property
    def dvar(self) -> int:
        return len(self.weights.rho)

    @property
    def n_base(self) -> int:
        return len(self.base_points)

    @cached_property
    def shell_radii(self) -> np.ndarray:
        return self.r0 * 2.0 ** np.arange(self.L + 1)

    @cached_property
    def qnorm(self) -> QuasiNorm:
        return QuasiNorm(self.weights, self.variant)

    @cached_property
    def directions(self) -> np.ndarray:
        d = self.dvar
        ndir = self.ndir if self.ndir is not None else max(2 * d * d, 2 * d)
        dirs = []
        for k in range(d):
            for sgn in (1.0, -1.0):
                v = np.zeros(d)
                v[k] = sgn
                dirs.append(v)
        rng = np.random.default_rng(self.seed)
        while len(dirs) < ndir:
            v = rng.standard_normal(d)
            nv = np.linalg.norm(v)
            if nv < 1e-8:
                continue
            dirs.append(v / nv)
        dirs = np.array(dirs[:max(ndir, 2 * d)])
        qn = self.qnorm(dirs)
        out = np.array([dilate(self._plain_weights(), 1.0 / q, v)
                        for q, v in zip(qn, dirs)])
        check = self.qnorm(out)
        if np.max(np.abs(check - 1.0)) > 1e-10:
            raise InvalidParameterError("direction normalization failed")
        return out

    def _plain_weights(self) -> Weights:
        w = self.weights
        return Weights(w.rho) if isinstance(w, ExtendedWeights) else w

    def shell_points(self, i: int) -> np.ndarray:
        return np.array([dilate(self._plain_weights(), self.shell_radii[i], v)
                         for v in self.directions])

    def points(self, sig: ex.Signature) -> tuple[np.ndarray, np.ndarray]:
        """All sample points laid out for ``sig``.

        Returns (pts, shell_index).  The x block is tiled from the base
        points; the direction block fills the xi slots and, for extended
        weights, the t slot.
        """
        extended = isinstance(self.weights, ExtendedWeights)
        want = sig.d + (1 if extended else 0)
        if self.dvar != want:
            raise InvalidParameterError(
                f"grid dimension {self.dvar} does not fit signature d={sig.d}"
                f"{' with t' if extended else ''}")
        if extended and not sig.has_t:
            raise InvalidParameterError("extended grid needs a t slot in the signature")
        base = np.array([list(b) for b in self.base_points], dtype=float)
        if base.size == 0:
            base = base.reshape(len(self.base_points), 0)
        if base.shape[1] != sig.n:
            raise InvalidParameterError(
                f"base points of arity {base.shape[1]} do not fit signature n={sig.n}")
        blocks, shells = [], []
        for i in range(self.L + 1):
            sp = self.shell_points(i)
            for bp in base:
                blk = np.concatenate(
                    [np.tile(bp, (sp.shape[0], 1)), sp], axis=1)
                blocks.append(blk)
                shells.append(np.full(sp.shape[0], i, dtype=int))
        return np.concatenate(blocks, axis=0), np.concatenate(shells)

    def describe(self) -> dict:
        return {
            "rho": list(self.weights.rho),
            "extended": isinstance(self.weights, ExtendedWeights),
            "variant": self.variant,
            "r0": self.r0,
            "L": self.L,
            "ndir": int(self.directions.shape[0]),
            "n_base": self.n_base,
            "seed": self.seed,
        }
