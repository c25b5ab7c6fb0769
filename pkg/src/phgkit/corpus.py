"""The built-in corpus: named symbols and expansions with declared classes.

Every entry's declared class is verified on load by the matching checker;
the expansion entries cover orders 0, 1, 2 including one anisotropic
weight tuple, with the trailing orders going negative.
"""

from __future__ import annotations

from dataclasses import dataclass

from phgkit.grading import InvalidParameterError, Weights
from phgkit.symbols import expr as ex
from phgkit.symbols.checks import (Certificate, homogeneous_check, hs_check,
                                   schwartz_check, symbol_estimate)
from phgkit.symbols.dsl import parse
from phgkit.symbols.engine import Symbol
from phgkit.symbols.grids import EvaluationGrid
from phgkit.config import RunConfig

__all__ = ["CorpusEntry", "ExpansionSpec", "SYMBOL_ENTRIES", "EXPANSION_ENTRIES",
           "load_entry", "load_expansion", "verify_entry", "standard_grid"]


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    dsl: str
    declared_class: str        # schwartz | symbol | hs | homogeneous
    order: float
    rho: tuple[int, ...]
    n_x: int = 0
    has_t: bool = False
    note: str = ""


@dataclass(frozen=True)
class ExpansionSpec:
    name: str
    m: float
    rho: tuple[int, ...]
    terms: tuple[tuple[str, float], ...]   # (dsl, order)
    n_x: int = 0
    note: str = ""


SYMBOL_ENTRIES = {
    e.name: e for e in [
        CorpusEntry("gaussian", "(gauss)", "schwartz", 0.0, (1, 1),
                    note="even-power Gaussian bump"),
        CorpusEntry("constant", "1", "schwartz", 0.0, (1, 1),
                    note="fails every decay order; negative control"),
        CorpusEntry("quadratic", "(pow xi1 2)", "homogeneous", 2.0, (1, 1)),
        CorpusEntry("aniso-linear", "xi2", "homogeneous", 2.0, (1, 2),
                    note="weight-2 slot: linear but order 2"),
        CorpusEntry("phg-tail", "(* (phi 0.5 1) (qnp -6))", "schwartz", 0.0, (1, 1),
                    note="order -6 tail; passes decay evidence up to k_max=4"),
        CorpusEntry("lemma42", "(* (phi 0.5 1) (qn))", "hs", 1.0, (1, 1),
                    note="cutoff times quasi-norm"),
        CorpusEntry("quadratic-symbol", "(pow xi1 2)", "symbol", 2.0, (1, 1)),
        CorpusEntry("sigma_j", "xi2", "symbol", 1.0, (2, 1, 1),
                    note="model-field symbol in the sigma coordinates: the "
                         "plain eta_j slot has weight 1"),
        CorpusEntry("worked-extension", "(+ (pow t 2) (qnp 2))", "hs", 2.0, (1, 1),
                    has_t=True, note="the hand-computed extraction case"),
        CorpusEntry("x-modulated-gaussian", "(* (+ 1 (pow x1 2)) (gauss))",
                    "schwartz", 0.0, (1, 1), n_x=1),
    ]
}


EXPANSION_ENTRIES = {
    e.name: e for e in [
        ExpansionSpec("expansion-order0", 0.0, (1, 1),
                      tuple(("(qnp -%d)" % j if j else "1", -float(j))
                            for j in range(4)),
                      note="pure quasi-norm powers, order 0 head"),
        ExpansionSpec("expansion-order1", 1.0, (1, 1),
                      tuple(("(* xi1 (qnp -%d))" % j if j else "xi1", 1.0 - j)
                            for j in range(6)),
                      note="six terms with an angular factor"),
        ExpansionSpec("expansion-aniso", 2.0, (2, 1),
                      (("(+ xi1 (pow xi2 2))", 2.0), ("xi2", 1.0), ("1", 0.0),
                       ("(qnp -1)", -1.0)),
                      note="anisotropic weights (2,1); mixed monomials"),
    ]
}


def standard_grid(rho: tuple[int, ...], cfg: RunConfig,
                  extended: bool = False, n_x: int = 0) -> EvaluationGrid:
    w = Weights(rho)
    base = cfg.base_points if n_x else ((),)
    if n_x and (not cfg.base_points or len(cfg.base_points[0]) != n_x):
        base = tuple((v,) * n_x for v in (-1.0, -0.5, 0.0, 0.5, 1.0))
    return EvaluationGrid(weights=w.extended() if extended else w,
                          base_points=base, r0=cfg.r0, L=cfg.shells,
                          ndir=cfg.ndir, seed=cfg.seed, variant=cfg.variant)


def entry_from_file(path: str) -> CorpusEntry:
    """A corpus entry from a JSON file: {name, dsl, class, order, rho, ...}."""
    import json
    import os
    try:
        with open(path) as fh:
            raw = json.load(fh)
        return CorpusEntry(
            name=raw.get("name", os.path.splitext(os.path.basename(path))[0]),
            dsl=raw["dsl"], declared_class=raw["class"],
            order=float(raw.get("order", 0.0)),
            rho=tuple(int(r) for r in raw["rho"]),
            n_x=int(raw.get("n_x", 0)), has_t=bool(raw.get("has_t", False)),
            note=raw.get("note", ""))
    except (OSError, KeyError, ValueError, TypeError) as err:
        raise InvalidParameterError(f"cannot load entry file {path}: {err}") from None


def expansion_from_file(path: str) -> ExpansionSpec:
    """An expansion from a JSON file: {m, rho, terms: [{dsl, order}, ...]}."""
    import json
    import os
    try:
        with open(path) as fh:
            raw = json.load(fh)
        return ExpansionSpec(
            name=raw.get("name", os.path.splitext(os.path.basename(path))[0]),
            m=float(raw["m"]), rho=tuple(int(r) for r in raw["rho"]),
            terms=tuple((t["dsl"], float(t["order"])) for t in raw["terms"]),
            n_x=int(raw.get("n_x", 0)), note=raw.get("note", ""))
    except (OSError, KeyError, ValueError, TypeError) as err:
        raise InvalidParameterError(f"cannot load expansion file {path}: {err}") from None


def load_entry(entry: CorpusEntry | str) -> Symbol:
    if isinstance(entry, str):
        if entry not in SYMBOL_ENTRIES:
            raise InvalidParameterError(f"unknown corpus entry {entry!r}")
        entry = SYMBOL_ENTRIES[entry]
    d = len(entry.rho)
    sig = ex.Signature(entry.n_x, d, entry.has_t)
    return Symbol(parse(entry.dsl, Weights(entry.rho), sig), sig)


def load_expansion(spec: ExpansionSpec | str):
    from phgkit.phg.expansion import Expansion, ExpansionTerm
    if isinstance(spec, str):
        if spec not in EXPANSION_ENTRIES:
            raise InvalidParameterError(f"unknown expansion entry {spec!r}")
        spec = EXPANSION_ENTRIES[spec]
    w = Weights(spec.rho)
    sig = ex.Signature(spec.n_x, w.d, False)
    terms = []
    for dsl, order in spec.terms:
        sym = Symbol(parse(dsl, w, sig), sig)
        terms.append(ExpansionTerm(
            symbol=sym, order=order,
            certificate=Certificate("homogeneous", order, True,
                                    detail="declared corpus term")))
    return Expansion(m=spec.m, terms=terms)


def verify_entry(entry: CorpusEntry, cfg: RunConfig) -> tuple[bool, object]:
    """Run the checker matching the declared class; returns (passed, report)."""
    sym = load_entry(entry)
    w = Weights(entry.rho)
    tol = cfg.tolerances
    grid = standard_grid(entry.rho, cfg, extended=entry.has_t, n_x=entry.n_x)
    if entry.declared_class == "schwartz":
        rep = schwartz_check(sym, grid, k_max=tol.k_max, deriv_max=tol.deriv_max,
                             slope_tolerance=tol.slope_tolerance)
        return rep.passed, rep
    if entry.declared_class == "symbol":
        rep = symbol_estimate(sym, entry.order, w, grid, deriv_max=tol.deriv_max,
                              drift_tolerance=tol.drift_tolerance)
        return rep.passed, rep
    if entry.declared_class == "hs":
        weights = w.extended() if entry.has_t else w
        rep = hs_check(sym, entry.order, weights, grid, k_max=tol.k_max,
                       deriv_max=tol.deriv_max, slope_tolerance=tol.slope_tolerance)
        return rep.passed, rep
    if entry.declared_class == "homogeneous":
        rep = homogeneous_check(sym, entry.order, w, grid)
        return rep.max_violation <= tol.homogeneity_tolerance, rep
    raise InvalidParameterError(f"unknown declared class {entry.declared_class!r}")
