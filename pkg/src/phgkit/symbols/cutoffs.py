"""Concrete smooth cutoffs built from the glue primitive.

All cutoffs are Step-based ramps, take values in [0, 1], and meet their
plateau and support sets exactly (the ramp is identically 0 below its lo
threshold and identically 1 above hi, not just numerically small).

Two t-profiles are carried: the wide profile (plateau |t| <= 1, support
|t| <= 2) used by the restriction/extraction direction, and the narrow
profile (plateau |t| <= 1/2, support |t| <= 1) used by the series
construction.  They are selected per algorithm.
"""

from __future__ import annotations

from dataclasses import dataclass

from phgkit.grading import Weights

from . import expr as ex
from .quasinorms import quasi_norm_expr

__all__ = ["CutoffFamily", "radial_step", "t_cutoffs"]


def radial_step(w: Weights, lo: float, hi: float) -> ex.Expr:
    """phi-style ramp in the smooth quasi-norm: 0 for |xi| <= lo, 1 for |xi| >= hi."""
    return ex.step(quasi_norm_expr(w), lo, hi)


def t_cutoffs(plateau: float, support: float) -> tuple[ex.Expr, ex.Expr]:
    """Partition of unity (chi0, chi1) on the t axis.

    chi0 = 1 for |t| <= plateau and 0 for |t| >= support; chi1 = 1 - chi0.
    """
    abst = ex.abs_pow(ex.var("t"), 1.0)
    chi1 = ex.step(abst, plateau, support)
    chi0 = ex.add(ex.ONE, ex.neg(chi1))
    return chi0, chi1


@dataclass(frozen=True)
class CutoffFamily:
    """The cutoff bundle one construction needs, pinned to a weight tuple."""

    weights: Weights
    t_plateau: float
    t_support: float

    @property
    def chi0(self) -> ex.Expr:
        return t_cutoffs(self.t_plateau, self.t_support)[0]

    @property
    def chi1(self) -> ex.Expr:
        return t_cutoffs(self.t_plateau, self.t_support)[1]

    @property
    def chi1_step(self) -> ex.Step:
        abst = ex.abs_pow(ex.var("t"), 1.0)
        return ex.step(abst, self.t_plateau, self.t_support)

    def phi(self, lo: float = 0.5, hi: float = 1.0) -> ex.Expr:
        """Frequency cutoff vanishing near 0: 0 for |xi| <= lo, 1 for |xi| >= hi."""
        return radial_step(self.weights, lo, hi)

    def chi_K(self, radius: float) -> ex.Expr:
        """Smooth function that is 0 on the quasi-ball of ``radius``, 1 near infinity.

        Not compactly supported: the plateau at infinity and compact support
        are incompatible, so the evident intent (0 on K, 1 near infinity) is
        implemented.
        """
        return radial_step(self.weights, radius, 2.0 * radius)

    def phi_tilde(self) -> ex.Expr:
        """Compactly supported t-cutoff equal to 1 on [-1, 1]."""
        return ex.one_minus_step(ex.abs_pow(ex.var("t"), 1.0), 1.0, 2.0)

    @staticmethod
    def restriction_profile(w: Weights) -> "CutoffFamily":
        return CutoffFamily(w, t_plateau=1.0, t_support=2.0)

    @staticmethod
    def construction_profile(w: Weights) -> "CutoffFamily":
        return CutoffFamily(w, t_plateau=0.5, t_support=1.0)
