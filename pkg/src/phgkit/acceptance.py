"""The acceptance suite: ten named criteria, each returning a verdict dict.

Each criterion function takes a RunConfig and returns
{"name", "passed", "elapsed_s", "details"}; the CLI ``accept`` subcommand
and the pytest acceptance module both run these, so there is exactly one
implementation of every tolerance.
"""

from __future__ import annotations

import time

import numpy as np

from phgkit.config import RunConfig
from phgkit.corpus import (EXPANSION_ENTRIES, load_entry, load_expansion,
                           standard_grid)
from phgkit.grading import Weights
from phgkit.heisenberg import (HeisenbergModel, KernelGrid, prop123_check,
                               quantize, theorem108_check)
from phgkit.phg.expansion import extract_expansion, homogenize_polynomial
from phgkit.phg.roundtrip import roundtrip_expansion, roundtrip_extension
from phgkit.symbols import expr as ex
from phgkit.symbols.checks import (Certificate, homogeneous_check, hs_check,
                                   symbol_estimate)
from phgkit.symbols.engine import Symbol

__all__ = ["CRITERIA", "run_criterion", "run_all"]


def _result(name, passed, t0, **details):
    return {"name": name, "passed": bool(passed),
            "elapsed_s": round(time.time() - t0, 3), "details": details}


# -- 1: polynomial homogenization is exact ----------------------------------

def polynomial_homogenization(cfg: RunConfig) -> dict:
    t0 = time.time()
    rng = np.random.default_rng(cfg.seed)
    worst_restrict = 0.0
    worst_homog = 0.0
    for trial in range(20):
        d = int(rng.integers(1, 4))
        rho = tuple(int(r) for r in rng.integers(1, 3, size=d))
        w = Weights(rho)
        m = int(rng.integers(max(rho), 7))
        sig = ex.Signature(0, d, False)
        terms = [ex.const(round(float(rng.normal()), 3))]
        for _ in range(int(rng.integers(1, 5))):
            exps = [int(e) for e in rng.integers(0, 3, size=d)]
            while sum(r * e for r, e in zip(rho, exps)) > m:
                exps = [max(0, e - 1) for e in exps]
            mono = ex.mul(ex.const(round(float(rng.normal()), 3)),
                          *[ex.pow_i(sig.xi(k), e) for k, e in enumerate(exps) if e])
            terms.append(mono)
        a = Symbol(ex.add(*terms), sig)
        u = homogenize_polynomial(a, m, w)
        grid = standard_grid(rho, cfg)
        pts, _ = grid.points(sig)
        av = a(pts)
        ones = np.concatenate([pts, np.ones((pts.shape[0], 1))], axis=1)
        rel = np.max(np.abs(u(ones) - av) / np.maximum(np.abs(av), 1e-300))
        worst_restrict = max(worst_restrict, float(rel))
        gext = standard_grid(rho, cfg, extended=True)
        rep = homogeneous_check(u, float(m), w.extended(), gext)
        worst_homog = max(worst_homog, rep.max_violation)
    passed = worst_restrict <= 1e-12 and worst_homog <= 1e-12
    return _result("polynomial-homogenization", passed, t0,
                   worst_restriction_rel=worst_restrict,
                   worst_homogeneity_violation=worst_homog)


# -- 2: the hand-computed extraction ------------------------------------------

def worked_extraction(cfg: RunConfig) -> dict:
    t0 = time.time()
    w = Weights((1, 1))
    u = load_entry("worked-extension")
    gext = standard_grid((1, 1), cfg, extended=True)
    cert = Certificate("hs", 2.0, True, detail="worked case")
    expn = extract_expansion(u, 2.0, 2, w, cert, grid=gext,
                             t_switch=cfg.tolerances.t_switch)
    grid = standard_grid((1, 1), cfg)
    sig = ex.Signature(0, 2, False)
    pts, _ = grid.points(sig)
    qn2 = Symbol(ex.add(ex.pow_i(sig.xi(0), 2), ex.pow_i(sig.xi(1), 2)), sig)
    scale = np.maximum(np.abs(qn2(pts)), 1.0)
    errs = {
        "a0_vs_qn2": float(np.max(np.abs(expn.terms[0].symbol(pts) - qn2(pts)) / scale)),
        "a1_vs_0": float(np.max(np.abs(expn.terms[1].symbol(pts)))),
        "a2_vs_1": float(np.max(np.abs(expn.terms[2].symbol(pts) - 1.0))),
    }
    ptse, _ = gext.points(u.sig)
    errs["remainder_vs_0"] = float(np.max(np.abs(expn.remainder(ptse))))
    passed = all(v <= 1e-10 for v in errs.values())
    return _result("worked-extraction", passed, t0, **errs)


# -- 3: built extensions are homogeneous modulo Schwartz -----------------------

def extension_build(cfg: RunConfig) -> dict:
    t0 = time.time()
    details = {}
    passed = True
    for name in EXPANSION_ENTRIES:
        spec = EXPANSION_ENTRIES[name]
        expn = load_expansion(name)
        w = Weights(spec.rho)
        grid = standard_grid(spec.rho, cfg)
        gext = standard_grid(spec.rho, cfg, extended=True)
        from phgkit.phg.extension import build_extension, epsilon_schedule
        sched = epsilon_schedule(expn, w, grid)
        built = build_extension(expn, expn.m, sched, w)
        rep = hs_check(built.b, expn.m, w.extended(), gext,
                       s_samples=(1.25, 1.5, 2.0),
                       k_max=4, deriv_max=2, slope_tolerance=0.3)
        details[name] = {"passed": rep.passed,
                         "worst_slope": max(r.worst_slope for r in rep.per_s.values()),
                         "epsilons": list(sched.epsilons)}
        passed = passed and rep.passed
    return _result("extension-build", passed, t0, **details)


# -- 4: the equivalence round trip --------------------------------------------

def roundtrip(cfg: RunConfig) -> dict:
    t0 = time.time()
    details = {}
    passed = True
    w11 = Weights((1, 1))
    grid = standard_grid((1, 1), cfg)
    gext = standard_grid((1, 1), cfg, extended=True)

    from phgkit.phg.expansion import make_b
    extensions = {"worked-extension": load_entry("worked-extension")}
    a42 = load_entry("lemma42")
    cert42 = Certificate("hs", 1.0, True, detail="lemma42 shape")
    extensions["extended-lemma42"] = make_b(a42, 1.0, w11, certificate=cert42)

    for name, u in extensions.items():
        m = 2.0 if name == "worked-extension" else 1.0
        rep = roundtrip_extension(u, m, w11, grid, gext, N=3,
                                  k_max=4, deriv_max=2,
                                  t_switch=cfg.tolerances.t_switch)
        details[name] = {"passed": rep["passed"],
                         "gap_worst_slope": rep["restriction_gap_schwartz"]["worst_slope"]}
        passed = passed and rep["passed"]

    for name in EXPANSION_ENTRIES:
        spec = EXPANSION_ENTRIES[name]
        expn = load_expansion(name)
        w = Weights(spec.rho)
        g = standard_grid(spec.rho, cfg)
        ge = standard_grid(spec.rho, cfg, extended=True)
        rep = roundtrip_expansion(expn, w, g, ge, recovery_tolerance=1e-6,
                                  t_switch=cfg.tolerances.t_switch)
        details[name] = {"passed": rep["passed"],
                         "worst_recovery": rep["worst_recovery"]}
        passed = passed and rep["passed"]
    return _result("roundtrip", passed, t0, **details)


# -- 5: restriction classes ----------------------------------------------------

def restriction_classes(cfg: RunConfig) -> dict:
    t0 = time.time()
    w11 = Weights((1, 1))
    grid = standard_grid((1, 1), cfg)
    from phgkit.phg.expansion import make_b
    corpus = {"worked-extension": (load_entry("worked-extension"), 2.0)}
    a42 = load_entry("lemma42")
    corpus["extended-lemma42"] = (
        make_b(a42, 1.0, w11, certificate=Certificate("hs", 1.0, True)), 1.0)
    details = {}
    passed = True
    for name, (u, m) in corpus.items():
        sym_rep = symbol_estimate(u.restrict_t(1.0), m, w11, grid,
                                  deriv_max=cfg.tolerances.deriv_max,
                                  drift_tolerance=cfg.tolerances.drift_tolerance)
        hs_rep = hs_check(u.restrict_t(0.0), m, w11, grid,
                          k_max=cfg.tolerances.k_max,
                          deriv_max=cfg.tolerances.deriv_max,
                          slope_tolerance=cfg.tolerances.slope_tolerance)
        details[name] = {"symbol_at_t1": sym_rep.passed, "hs_at_t0": hs_rep.passed}
        passed = passed and sym_rep.passed and hs_rep.passed
    return _result("restriction-classes", passed, t0, **details)


# -- 6: model group algebra ------------------------------------------------------

def group_algebra(cfg: RunConfig) -> dict:
    t0 = time.time()
    M = HeisenbergModel(d=2, B=((0.0, -1.0), (1.0, 0.0)))
    rng = np.random.default_rng(cfg.seed)
    xs = rng.normal(size=(1000, 3))
    ys = rng.normal(size=(1000, 3))
    zs = rng.normal(size=(1000, 3))
    assoc = np.max(np.abs(M.group_mul(M.group_mul(xs, ys), zs)
                          - M.group_mul(xs, M.group_mul(ys, zs))))
    s = 1.7
    from phgkit.heisenberg import heis_dilate
    auto = np.max(np.abs(heis_dilate(s, M.group_mul(xs, ys))
                         - M.group_mul(heis_dilate(s, xs), heis_dilate(s, ys))))

    sig = ex.Signature(3, 0, False)
    f = Symbol(ex.mul(sig.x(0),
                      ex.exp_(ex.neg(ex.add(*[ex.pow_i(sig.x(i), 2) for i in range(3)])))),
               sig)
    left_inv = 0.0
    for _ in range(25):
        y = rng.normal(size=3)
        x = rng.normal(size=3)
        fy = Symbol(ex.substitute(f.expr, M.left_translation_map(y, sig)), sig)
        for j in range(3):
            lhs = M.field_apply(j, fy, x)[0]
            rhs = M.field_apply(j, f, M.group_mul(y, x))[0]
            left_inv = max(left_inv, abs(lhs - rhs))

    # block form: [X_j, X_{n+j}] = X_0 and all other sigma-frame brackets vanish
    comm_err = 0.0
    pts = rng.normal(size=(50, 3))
    for j in range(1, 3):
        for k in range(1, 3):
            br = Symbol(ex.sub(M.field_expr(j, M.field_expr(k, f)).expr,
                               M.field_expr(k, M.field_expr(j, f)).expr), sig)
            want = M.field_expr(0, f) if (j, k) == (1, 2) else None
            if (j, k) == (2, 1):
                want = Symbol(ex.neg(M.field_expr(0, f).expr), sig)
            target = want(pts) if want is not None else np.zeros(len(pts))
            comm_err = max(comm_err, float(np.max(np.abs(br(pts) - target))))

    passed = assoc <= 1e-12 and auto <= 1e-12 and left_inv <= 1e-6 and comm_err <= 1e-8
    return _result("group-algebra", passed, t0,
                   associativity=float(assoc), automorphism=float(auto),
                   left_invariance=float(left_inv), commutators=float(comm_err))


# -- 7: chart-transpose identity ---------------------------------------------------

def chart_transpose(cfg: RunConfig) -> dict:
    t0 = time.time()
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for d in (2, 4):
        n = d // 2
        B = np.zeros((d, d))
        B[:n, n:] = -np.eye(n)
        B[n:, :n] = np.eye(n)
        M = HeisenbergModel(d=d, B=tuple(tuple(r) for r in B))
        for _ in range(100):
            y = rng.normal(size=d + 1)
            eta = rng.normal(size=d + 1)
            worst = max(worst, M.prop_transpose_residual(y, eta))
    return _result("chart-transpose", worst <= 1e-12, t0, prop116_residual=worst)


# -- 8: kernel diagram --------------------------------------------------------------

def kernel_diagram(cfg: RunConfig) -> dict:
    t0 = time.time()
    grid = KernelGrid(R=8.0, N=64, dim=3)
    sigf = ex.Signature(3, 3, False)
    f = Symbol(ex.exp_(ex.neg(ex.add(*[ex.pow_i(sigf.xi(k), 2) for k in range(3)]))),
               sigf)
    y_slices = np.array([[0.0, 0.0, 0.0], [0.5, -0.5, 1.0], [1.0, 0.3, -0.7],
                         [-1.0, 1.0, 0.2], [0.2, 0.8, -1.0]])
    MH = HeisenbergModel(d=2, B=((0.0, -1.0), (1.0, 0.0)))
    M0 = HeisenbergModel(d=2, B=((0.0, 0.0), (0.0, 0.0)))
    repH = theorem108_check(MH, f, grid, y_slices)
    rep0 = theorem108_check(M0, f, grid, y_slices)
    passed = repH["thm108_linf"] <= 1e-6 and rep0["thm108_linf"] <= 1e-8
    return _result("kernel-diagram", passed, t0,
                   thm108_linf_heisenberg=repH["thm108_linf"],
                   thm108_linf_abelian=rep0["thm108_linf"])


# -- 9: zoom intertwining --------------------------------------------------------------

def zoom_intertwine(cfg: RunConfig) -> dict:
    t0 = time.time()
    zgrid = KernelGrid(R=(16.0, 8.0, 8.0), N=(128, 64, 64), dim=3)
    sigu = ex.Signature(0, 3, True)
    a = 2.5
    u = Symbol(ex.mul(
        ex.exp_(ex.mul(ex.const(-1.0 / a ** 2),
                       ex.add(*[ex.pow_i(sigu.xi(k), 2) for k in range(3)]))),
        ex.exp_(ex.neg(ex.pow_i(sigu.t, 2)))), sigu)
    MH = HeisenbergModel(d=2, B=((0.0, -1.0), (1.0, 0.0)))
    M0 = HeisenbergModel(d=2, B=((0.0, 0.0), (0.0, 0.0)))
    worst = 0.0
    per = {}
    for name, M in (("heisenberg", MH), ("abelian", M0)):
        for s in (1.5, 2.0):
            rep = prop123_check(M, u, zgrid, s=s, t_samples=np.array([0.5, 1.0]))
            per[f"{name}_s{s:g}"] = rep["prop123_linf"]
            worst = max(worst, rep["prop123_linf"])
    return _result("zoom-intertwine", worst <= 1e-6, t0,
                   prop123_linf=worst, **per)


# -- 10: quantization sanity -------------------------------------------------------------

def quantization(cfg: RunConfig) -> dict:
    t0 = time.time()
    grid = KernelGrid(R=8.0, N=64, dim=3)
    M = HeisenbergModel(d=2, B=((0.0, -1.0), (1.0, 0.0)))
    sig = ex.Signature(0, 3, False)
    phi = Symbol(ex.exp_(ex.neg(ex.add(*[ex.pow_i(sig.xi(k), 2) for k in range(3)]))),
                 sig)
    out1 = quantize(M, Symbol(ex.ONE, sig), phi, grid,
                    tail_tolerance=cfg.tolerances.tail_tolerance)
    phiv = phi(grid.points()).reshape(grid.shape)
    id_err = float(np.max(np.abs(out1 - phiv)))
    out0 = quantize(M, Symbol(sig.xi(0), sig), phi, grid,
                    tail_tolerance=cfg.tolerances.tail_tolerance)
    dphi = Symbol(ex.differentiate(phi.expr, sig.xi(0)), sig)(grid.points())
    deriv_err = float(np.max(np.abs(out0 - (-1j) * dphi.reshape(grid.shape))))
    passed = id_err <= 1e-10 and deriv_err <= 1e-6
    return _result("quantization", passed, t0,
                   identity_error=id_err, derivative_error=deriv_err)


CRITERIA = {
    "polynomial-homogenization": polynomial_homogenization,
    "worked-extraction": worked_extraction,
    "extension-build": extension_build,
    "roundtrip": roundtrip,
    "restriction-classes": restriction_classes,
    "group-algebra": group_algebra,
    "chart-transpose": chart_transpose,
    "kernel-diagram": kernel_diagram,
    "zoom-intertwine": zoom_intertwine,
    "quantization": quantization,
}


def run_criterion(name: str, cfg: RunConfig) -> dict:
    if name not in CRITERIA:
        raise KeyError(f"unknown criterion {name!r}; choose from {sorted(CRITERIA)}")
    return CRITERIA[name](cfg)


def run_all(cfg: RunConfig, only: str | None = None):
    names = [only] if only else list(CRITERIA)
    return [run_criterion(n, cfg) for n in names]
