"""Graded symbol classes, homogeneous-modulo-Schwartz extensions, and a
model Heisenberg calculus, with grid-based numerical certification."""

from phgkit.grading import (
    Weights, ExtendedWeights, QuasiNorm, NormComparisonReport,
    dilate, dilate_ext, quasi_norm, measure_norm_constants,
)

__version__ = "0.1.0"
