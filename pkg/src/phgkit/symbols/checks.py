"""Numerical verifiers: decay checks, symbol estimates, homogeneity checks,
and the scaling-limit decomposition into homogeneous part plus residual.

Decay is certified by least-squares slope fitting of log2(sup) against
log2(shell radius) on the outer half of the shells that carry a nonzero
sup.  Shells where the sup is exactly zero are censored; a zero tail of
two or more shells counts as compact support on the grid and passes every
order outright (the step cutoffs vanish exactly, so this case is common
and meaningful).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from phgkit.grading import ExtendedWeights, InvalidParameterError, Weights
from phgkit.reports import DecayReport, HomogeneityReport, HsReport, SeminormReport

from . import expr as ex
from .backend import BACKEND
from .cutoffs import CutoffFamily
from .engine import MultiIndex, Symbol, enumerate_multi_indices
from .grids import EvaluationGrid

__all__ = [
    "schwartz_check", "symbol_estimate", "homogeneous_check", "hs_check",
    "decompose_hs", "HomogeneousPart", "ResidualPart", "Certificate",
    "NonHomogeneousError", "DEFAULT_S_SAMPLES",
]

DEFAULT_S_SAMPLES = (1.25, 1.5, 2.0)
_HOMOG_S = (2.0 ** 0.5, 2.0 ** -0.5, 2.0, 3.0)
_ZERO_FLOOR = 0.0


class NonHomogeneousError(RuntimeError):
    """The scaling limit failed to stabilize."""


@dataclass(frozen=True)
class Certificate:
    """Outcome of a class checker, consumed as a precondition downstream."""

    kind: str          # "schwartz" | "symbol" | "hs" | "homogeneous"
    order: float
    passed: bool
    detail: object = None

    def require(self, kinds: tuple[str, ...]) -> None:
        if not self.passed or self.kind not in kinds:
            raise InvalidParameterError(
                f"operation needs a passing certificate of kind {kinds}, "
                f"got kind={self.kind!r} passed={self.passed}")


def _label(mi: MultiIndex) -> str:
    a = ",".join(map(str, mi.x))
    b = ",".join(map(str, mi.xi)) + (f";t{mi.t}" if mi.t else "")
    return f"{a}|{b}"


def _fit_slope(radii: np.ndarray, sups: np.ndarray) -> tuple[float, str]:
    """Slope of log2 sup vs log2 r on the outer half of nonzero shells."""
    nz = np.flatnonzero(sups > _ZERO_FLOOR)
    if nz.size == 0:
        return float("-inf"), "identically zero on grid"
    trailing_zero = len(sups) - 1 - nz.max()
    if trailing_zero >= 2:
        return float("-inf"), "compact support on grid (zero tail)"
    if nz.size == 1:
        return 0.0, "single nonzero shell; no fit"
    lo = nz[nz.size // 2:] if nz.size >= 6 else nz[max(0, nz.size - 4):]
    x = np.log2(radii[lo])
    y = np.log2(sups[lo])
    slope = float(np.polyfit(x, y, 1)[0])
    note = "fit on outer shells" if nz.size >= 4 else "fit on few shells"
    return slope, note


def _shell_sups(vals: np.ndarray, shell_idx: np.ndarray, nshell: int) -> np.ndarray:
    out = np.zeros(nshell)
    np.maximum.at(out, shell_idx, np.abs(vals))
    return out


def _tail_slope(radii: np.ndarray, sups: np.ndarray, npts: int = 3) -> float:
    """Slope over the last nonzero shells: the stabilized behavior, robust
    against cutoff bumps ramping up mid-grid."""
    nz = np.flatnonzero(sups > _ZERO_FLOOR)
    if nz.size == 0:
        return float("-inf")
    if nz.size == 1:
        return 0.0
    tail = nz[-min(npts, nz.size):]
    return float(np.polyfit(np.log2(radii[tail]), np.log2(sups[tail]), 1)[0])


def schwartz_check(sym: Symbol, grid: EvaluationGrid, k_max: int = 4,
                   deriv_max: int = 2, slope_tolerance: float = 0.3,
                   reference: Optional[Symbol] = None,
                   rel_floor: float = 1e-12) -> DecayReport:
    """Evidence that ``sym`` is Schwartz class in its grid variables.

    When ``sym`` is a difference of large cancelling quantities (a dilation
    defect), pass the minuend as ``reference``: shell sups smaller than
    ``rel_floor`` times the reference magnitude are roundoff residue of an
    exact cancellation and are censored to zero before the slope fit.
    """
    if grid.L + 1 < 4:
        raise InvalidParameterError("need at least 4 shells to fit a decay slope")
    extended = isinstance(grid.weights, ExtendedWeights)
    if sym.sig.has_t and not extended:
        raise InvalidParameterError("symbol has a t slot but the grid is not extended")
    pts, shell_idx = grid.points(sym.sig)
    nshell = grid.L + 1
    radii = grid.shell_radii

    sups, slopes, notes = {}, {}, {}
    for mi in enumerate_multi_indices(sym.sig.n, sym.sig.d, sym.sig.has_t, deriv_max):
        dsym = sym.diff(mi)
        vals = dsym(pts)
        ss = _shell_sups(vals, shell_idx, nshell)
        censored = ""
        if reference is not None:
            ref = _shell_sups(reference.diff(mi)(pts), shell_idx, nshell)
            mask = ss <= rel_floor * ref
            if mask.any():
                ss = np.where(mask, 0.0, ss)
                censored = f"; {int(mask.sum())} shells at roundoff floor"
        slope, note = _fit_slope(radii, ss)
        lbl = _label(mi)
        sups[lbl], slopes[lbl], notes[lbl] = ss.tolist(), slope, note + censored

    verdicts = {k: all(s <= -k + slope_tolerance for s in slopes.values())
                for k in range(1, k_max + 1)}
    return DecayReport(
        shell_radii=radii.tolist(), sups=sups, slopes=slopes, notes=notes,
        k_max=k_max, slope_tolerance=slope_tolerance, verdicts=verdicts,
        meta={"grid": grid.describe(), "backend": BACKEND, "deriv_max": deriv_max},
    )


def symbol_estimate(sym: Symbol, m: float, w: Weights, grid: EvaluationGrid,
                    deriv_max: int = 2, drift_tolerance: float = 0.25) -> SeminormReport:
    """Measured constants for |D_x^a D_xi^b sym| <= C (1+|xi|)^(m-|b|)."""
    if sym.sig.has_t:
        raise InvalidParameterError("symbol estimates act on restricted (no-t) symbols")
    pts, shell_idx = grid.points(sym.sig)
    nshell = grid.L + 1
    radii = grid.shell_radii
    qn = grid.qnorm(pts[:, sym.sig.n:])

    constants, drift, shell_consts, verdicts = {}, {}, {}, {}
    for mi in enumerate_multi_indices(sym.sig.n, sym.sig.d, False, deriv_max):
        wexp = m - mi.weighted_xi_order(w)
        ratio = np.abs(sym.diff(mi)(pts)) / (1.0 + qn) ** wexp
        ss = np.zeros(nshell)
        np.maximum.at(ss, shell_idx, ratio)
        slope = _tail_slope(radii, ss)
        lbl = _label(mi)
        constants[lbl] = float(ss.max())
        shell_consts[lbl] = ss.tolist()
        drift[lbl] = slope
        verdicts[lbl] = bool(np.isfinite(constants[lbl])) and slope <= drift_tolerance

    return SeminormReport(
        order=m, constants=constants, drift_slopes=drift,
        shell_radii=radii.tolist(), shell_constants=shell_consts,
        drift_tolerance=drift_tolerance, verdicts=verdicts,
        meta={"grid": grid.describe(), "backend": BACKEND, "deriv_max": deriv_max},
    )


def homogeneous_check(sym: Symbol, m: float, w: Weights | ExtendedWeights,
                      grid: EvaluationGrid,
                      s_samples: Sequence[float] = _HOMOG_S) -> HomogeneityReport:
    """Max relative violation of f(delta_s .) = s^m f over sampled scales."""
    pts, shell_idx = grid.points(sym.sig)
    nshell = grid.L + 1
    base_sup = _shell_sups(sym(pts), shell_idx, nshell)
    violations = {}
    for s in s_samples:
        dvals = sym.defect(w, s, m)(pts)
        dsup = _shell_sups(dvals, shell_idx, nshell)
        scale = np.maximum((s ** m) * base_sup, 1e-300)
        violations[f"{s:.6g}"] = float(np.max(dsup / scale))
    return HomogeneityReport(order=m, violations=violations,
                             meta={"grid": grid.describe(), "backend": BACKEND})


def hs_check(sym: Symbol, m: float, w: Weights | ExtendedWeights,
             grid: EvaluationGrid, s_samples: Sequence[float] = DEFAULT_S_SAMPLES,
             k_max: int = 4, deriv_max: int = 2,
             slope_tolerance: float = 0.3) -> HsReport:
    """Homogeneous-modulo-Schwartz evidence: the dilation defect passes the
    Schwartz check for every sampled scale in [1, 2]."""
    if not s_samples or not all(1.0 <= s <= 2.0 for s in s_samples):
        raise InvalidParameterError("scale samples must lie in [1, 2] and be nonempty")
    per_s = {}
    for s in s_samples:
        defect = sym.defect(w, s, m)
        per_s[f"{s:.6g}"] = schwartz_check(defect, grid, k_max=k_max,
                                           deriv_max=deriv_max,
                                           slope_tolerance=slope_tolerance,
                                           reference=sym.dilate_xi(w, s))
    return HsReport(order=m, per_s=per_s,
                    meta={"grid": grid.describe(), "backend": BACKEND,
                          "s_samples": list(s_samples)})


# ---------------------------------------------------------------------------
# scaling-limit decomposition

class HomogeneousPart:
    """The homogeneous representative extracted as a large-scale limit.

    Calling it evaluates s^(-m) u(delta_s xi) at the largest stabilized
    scale; by construction the value is dilation-homogeneous of order m up
    to the stabilization tolerance.
    """

    def __init__(self, sym: Symbol, m: float, w: Weights, scale: float):
        self.sym = sym
        self.m = m
        self.w = w
        self.scale = scale
        self._dilated = sym.dilate_xi(w, scale)

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        return self._dilated(pts) * self.scale ** (-self.m)


class ResidualPart:
    """u - chi_K * u' as an evaluator; Schwartz-class when u is
    homogeneous modulo Schwartz."""

    def __init__(self, sym: Symbol, hom: HomogeneousPart, chi_K: Symbol):
        self.sym = sym
        self.hom = hom
        self.chi_K = chi_K

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        return self.sym(pts) - self.chi_K(pts) * self.hom(pts)


def _radial_step_max_hi(e: ex.Expr) -> float:
    """Largest hi threshold among Step nodes gated on xi variables."""
    worst = 0.0
    seen = set()

    def walk(node):
        nonlocal worst
        if node._uid in seen:
            return
        seen.add(node._uid)
        if isinstance(node, ex.Step):
            kinds = {v.kind for v in ex.variables(node.arg)}
            if "xi" in kinds:
                worst = max(worst, node.hi)
        for c in ex._children(node):
            walk(c)

    walk(e)
    return worst


def decompose_hs(sym: Symbol, m: float, w: Weights, K_radius: float,
                 grid: EvaluationGrid, s_levels: Optional[Sequence[float]] = None,
                 limit_tolerance: float = 1e-6) -> tuple[HomogeneousPart, ResidualPart]:
    """Split u = u' + u'' outside the quasi-ball of ``K_radius``.

    u' is the scaling limit s^(-m) u(delta_s .) evaluated at three doubling
    scales with a stabilization check between the last two; the scales are
    pushed past any radial cutoff transition present in the tree, so terms
    of the form phi(delta_eps .) f recover f on every shell.
    """
    if sym.sig.has_t:
        raise InvalidParameterError("decompose acts on xi-only symbols")
    if s_levels is None:
        base = 8
        hi = _radial_step_max_hi(sym.expr)
        if hi > 0:
            base = max(base, int(math.ceil(math.log2(2.0 * hi / grid.r0))) + 1)
        s_levels = [2.0 ** base, 2.0 ** (base + 1), 2.0 ** (base + 2)]
    if len(s_levels) < 2:
        raise InvalidParameterError("need at least two scales for the limit check")

    pts, _ = grid.points(sym.sig)
    vals = [sym.dilate_xi(w, s)(pts) * s ** (-m) for s in s_levels]
    v_prev, v_last = vals[-2], vals[-1]
    denom = np.maximum(np.abs(v_last), np.maximum(np.abs(v_prev), 1e-300))
    rel = np.abs(v_last - v_prev) / denom
    scale_floor = 1e-14 * max(1.0, float(np.max(np.abs(v_last))))
    bad = (rel > limit_tolerance) & (np.abs(v_last - v_prev) > scale_floor)
    if np.any(bad):
        worst = float(np.max(rel[bad]))
        raise NonHomogeneousError(
            f"scaling limit did not stabilize (relative change {worst:.3g} "
            f"> {limit_tolerance:g} at {int(bad.sum())} grid points)")

    hom = HomogeneousPart(sym, m, w, s_levels[-1])
    fam = CutoffFamily.restriction_profile(w)
    chi_K = Symbol(fam.chi_K(K_radius), sym.sig)
    return hom, ResidualPart(sym, hom, chi_K)
