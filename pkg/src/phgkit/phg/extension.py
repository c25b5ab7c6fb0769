"""Construction direction: build an extension from an expansion.

Each term is first cut off at a term-dependent radius 1/eps_j (so the
series is locally finite), then extended by the narrow-profile t-cutoffs,
and the extension is the weighted sum of t**j times those pieces.  The
epsilon sequence is computed from constants measured on the grid and
capped by 2**(-2j) and 1/4, which is what makes the summed defect decay at
every tested order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from phgkit.grading import InvalidParameterError, Weights
from phgkit.reports import DecayReport
from phgkit.symbols import expr as ex
from phgkit.symbols.checks import schwartz_check
from phgkit.symbols.cutoffs import CutoffFamily
from phgkit.symbols.engine import MultiIndex, Symbol, enumerate_multi_indices
from phgkit.symbols.grids import EvaluationGrid
from phgkit.symbols.quasinorms import quasi_norm_expr

from .expansion import Expansion, ExpansionTerm

__all__ = [
    "EpsilonSchedule", "ExtensionResult", "TermNotSymbolError",
    "ExpansionMismatchError", "epsilon_schedule", "build_extension",
    "correct_restriction",
]

PHI_LO = 0.5
PHI_HI = 1.0


class TermNotSymbolError(RuntimeError):
    """An expansion term failed its grid symbol bound while measuring the
    cutoff constants."""


class ExpansionMismatchError(RuntimeError):
    """The correction term is not Schwartz: the target symbol and the built
    extension do not share an asymptotic expansion."""


@dataclass(frozen=True)
class EpsilonSchedule:
    """Decreasing cutoff scales with the measured constants behind them."""

    epsilons: tuple[float, ...]
    records: tuple[dict, ...]
    provenance: dict

    def __len__(self) -> int:
        return len(self.epsilons)

    def check_invariants(self) -> None:
        eps = self.epsilons
        if any(e <= 0 for e in eps):
            raise InvalidParameterError("epsilons must be positive")
        if any(e > 0.25 + 1e-15 for e in eps):
            raise InvalidParameterError("epsilon cap 1/4 violated")
        if any(eps[j] > eps[j - 1] + 1e-15 for j in range(1, len(eps))):
            raise InvalidParameterError("epsilons must be non-increasing")
        for j, rec in enumerate(self.records):
            cmax = max(rec["constants"].values()) if rec["constants"] else 0.0
            if cmax > 0 and eps[j] > 2.0 ** (-2 * j) / cmax + 1e-15:
                raise InvalidParameterError(
                    f"epsilon_{j} exceeds 2^(-2j)/max constant")

    def payload(self) -> dict:
        return {"epsilons": list(self.epsilons),
                "records": list(self.records),
                "provenance": self.provenance}


def _phi_of_scale(w: Weights, eps_s: float) -> ex.Expr:
    """phi(delta_{eps_s} xi) as a radial step: thresholds scale inversely."""
    return ex.step(quasi_norm_expr(w), PHI_LO / eps_s, PHI_HI / eps_s)


def epsilon_schedule(expansion: Expansion, w: Weights, grid: EvaluationGrid,
                     s_samples: Sequence[float] = (1.0, 1.5, 2.0),
                     drift_tolerance: float = 0.35) -> EpsilonSchedule:
    """Measure the cutoff constants of each term and cap the scales.

    For term j, the constants are the grid sups of the x- and xi-derivative
    combinations with weighted-order budget <= j, of the cropped and
    dilated term, against the weight (1 + |xi|)^(m-j-|b|).  The scale is
    then 2**(-2j) over the largest recorded constant, further capped by
    1/4 and monotonicity.
    """
    m = expansion.m
    eps_out, records = [], []
    prev = 0.25
    for j, term in enumerate(expansion.terms):
        # constants are measured at the cap scale (the transition shell then
        # sits inside the grid for every term); the final scales only shrink
        # from there, which preserves the measured bounds
        pre = 0.25
        sym = term.symbol
        pts, shell_idx = grid.points(sym.sig)
        qn = grid.qnorm(pts[:, sym.sig.n:])
        nshell = grid.L + 1
        constants: dict[str, float] = {}
        for mi in enumerate_multi_indices(sym.sig.n, sym.sig.d, False, j):
            if mi.weighted_xi_order(w) + sum(mi.x) > j:
                continue
            wexp = m - j - mi.weighted_xi_order(w)
            cbest = 0.0
            for s in s_samples:
                phi = _phi_of_scale(w, pre * s)
                g = Symbol(ex.mul(phi, sym.dilate_xi(w, s).expr), sym.sig)
                ratio = np.abs(g.diff(mi)(pts)) / (1.0 + qn) ** wexp
                ss = np.zeros(nshell)
                np.maximum.at(ss, shell_idx, ratio)
                from phgkit.symbols.checks import _tail_slope
                slope = _tail_slope(grid.shell_radii, ss)
                if slope > drift_tolerance:
                    raise TermNotSymbolError(
                        f"term {j}: constant for {mi} drifts with slope "
                        f"{slope:.3g} > {drift_tolerance}; not a symbol bound")
                cbest = max(cbest, float(ss.max()))
            constants[_mi_label(mi)] = cbest
        cmax = max(constants.values()) if constants else 0.0
        cap = 2.0 ** (-2 * j)
        eps = min(0.25, prev, cap if cmax == 0.0 else cap / cmax)
        eps_out.append(eps)
        records.append({"constants": constants, "preliminary": pre,
                        "cap": cap, "final": eps})
        prev = eps
    sched = EpsilonSchedule(
        epsilons=tuple(eps_out), records=tuple(records),
        provenance={"grid": grid.describe(), "s_samples": list(s_samples),
                    "order": m,
                    "compact_exhaustion": "single compact: the grid base points",
                    "budget": "|beta|_weighted + |gamma| <= j"},
    )
    sched.check_invariants()
    return sched


def _mi_label(mi: MultiIndex) -> str:
    return f"{','.join(map(str, mi.x))}|{','.join(map(str, mi.xi))}"


@dataclass
class ExtensionResult:
    """A built extension: the evaluable symbol plus truncation bookkeeping."""

    b: Symbol
    m: float
    schedule: EpsilonSchedule
    cutoffs: CutoffFamily
    terms: list[ExpansionTerm]
    correction: Optional[Symbol] = None

    def j_max(self, xi_norm: float, t: float) -> int:
        """Number of terms that can be nonzero at quasi-norm |xi| and scale t.

        Term j contributes through the plateau branch iff |t| < t_support
        and eps_j |xi| > phi_lo, and through the dilated branch iff
        |t| > t_plateau and eps_j |xi| > phi_lo |t|."""
        count = 0
        for eps in self.schedule.epsilons[:len(self.terms)]:
            plateau_live = abs(t) < self.cutoffs.t_support and eps * xi_norm > PHI_LO
            dilated_live = abs(t) > self.cutoffs.t_plateau and eps * xi_norm > PHI_LO * abs(t)
            if plateau_live or dilated_live:
                count += 1
        return count

    @property
    def symbol(self) -> Symbol:
        """The corrected extension when a correction is attached, else b."""
        return self.correction if self.correction is not None else self.b


def build_extension(expansion: Expansion, m: float, schedule: EpsilonSchedule,
                    w: Weights, cutoffs: Optional[CutoffFamily] = None) -> ExtensionResult:
    """Sum t**j chi0(t) a_j' + chi1(t) |t|^(m-j) a_j'(delta_{1/|t|} xi) with
    a_j' the cutoff terms; locally finite by construction."""
    if len(schedule) < len(expansion.terms):
        raise InvalidParameterError(
            f"schedule of length {len(schedule)} cannot cover "
            f"{len(expansion.terms)} terms")
    if cutoffs is None:
        cutoffs = CutoffFamily.construction_profile(w)
    if not expansion.terms:
        sig = ex.Signature(0, w.d, True)
        return ExtensionResult(b=Symbol(ex.ZERO, sig), m=m, schedule=schedule,
                               cutoffs=cutoffs, terms=[])

    sig0 = expansion.terms[0].symbol.sig
    ext_sig = ex.Signature(sig0.n, sig0.d, True)
    t = ext_sig.t
    abst = ex.abs_pow(t, 1.0)
    chi1 = ex.step(abst, cutoffs.t_plateau, cutoffs.t_support)
    chi0 = ex.add(ex.ONE, ex.neg(chi1))

    pieces = []
    for j, term in enumerate(expansion.terms):
        eps = schedule.epsilons[j]
        phi_j = _phi_of_scale(w, eps)
        aj_prime = Symbol(ex.mul(phi_j, term.symbol.expr), sig0).with_t_slot()
        dilated = aj_prime.dilate_xi_inv_t(w).expr
        bj = ex.add(
            ex.mul(chi0, aj_prime.expr),
            ex.guarded(abst, cutoffs.t_plateau, chi1,
                       ex.mul(ex.abs_pow(t, float(m - j)), dilated)))
        pieces.append(ex.mul(ex.pow_i(t, j), bj))
    b = Symbol(ex.add(*pieces), ext_sig)
    return ExtensionResult(b=b, m=m, schedule=schedule, cutoffs=cutoffs,
                           terms=list(expansion.terms))


def correct_restriction(result: ExtensionResult, a: Symbol,
                        grid: EvaluationGrid, k_max: int = 4,
                        deriv_max: int = 2, slope_tolerance: float = 0.3,
                        ) -> tuple[Symbol, Symbol, DecayReport]:
    """Add the Schwartz correction making the restriction at t = 1 exact.

    l = a - b|_{t=1} must pass the Schwartz check (the two sides share an
    expansion); the corrected extension is b + l * phi_tilde(t) with
    phi_tilde compactly supported and equal to 1 on [-1, 1].
    """
    b1 = result.b.restrict_t(1.0)
    l = Symbol(ex.sub(a.expr, b1.expr), a.sig)
    rep = schwartz_check(l, grid, k_max=k_max, deriv_max=deriv_max,
                         slope_tolerance=slope_tolerance)
    if not rep.passed:
        raise ExpansionMismatchError(
            f"correction term fails the Schwartz check (worst slope "
            f"{rep.worst_slope:.3g}); the inputs do not share an expansion")
    phit = CutoffFamily.restriction_profile(result.cutoffs.weights).phi_tilde()
    u = Symbol(ex.add(result.b.expr, ex.mul(l.with_t_slot().expr, phit)),
               result.b.sig)
    result.correction = u
    return u, l, rep
