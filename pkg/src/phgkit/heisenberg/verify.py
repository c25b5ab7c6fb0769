"""Named verification runs over a model: group algebra, chart consistency,
the transpose identity, the kernel diagram, and the zoom intertwining.
Each returns a report dict whose residual fields are named after the
property they certify."""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp

from phgkit.symbols import expr as ex
from phgkit.symbols.engine import Symbol

from .kernels import KernelGrid, prop123_check, theorem108_check
from .model import HeisenbergModel, heis_dilate

__all__ = ["algebra_check", "chart_check", "transpose_check",
            "kernel_diagram_check", "zoom_check"]


def _test_function(dim: int) -> Symbol:
    sig = ex.Signature(dim, 0, False)
    bump = ex.exp_(ex.neg(ex.add(*[ex.pow_i(sig.x(i), 2) for i in range(dim)])))
    return Symbol(ex.mul(sig.x(0), bump), sig)


def algebra_check(model: HeisenbergModel, seed: int = 7, n: int = 1000) -> dict:
    rng = np.random.default_rng(seed)
    dim = model.dim
    xs, ys, zs = (rng.normal(size=(n, dim)) for _ in range(3))
    assoc = float(np.max(np.abs(
        model.group_mul(model.group_mul(xs, ys), zs)
        - model.group_mul(xs, model.group_mul(ys, zs)))))
    ident = float(np.max(np.abs(model.group_mul(xs, np.zeros(dim)) - xs)))
    inv = float(np.max(np.abs(model.group_mul(xs, model.group_inverse(xs)))))
    s = 1.7
    autom = float(np.max(np.abs(
        heis_dilate(s, model.group_mul(xs, ys))
        - model.group_mul(heis_dilate(s, xs), heis_dilate(s, ys)))))

    f = _test_function(dim)
    sig = f.sig
    left_inv = 0.0
    for _ in range(25):
        y = rng.normal(size=dim)
        x = rng.normal(size=dim)
        fy = Symbol(ex.substitute(f.expr, model.left_translation_map(y, sig)), sig)
        for j in range(dim):
            lhs = model.field_apply(j, fy, x)[0]
            rhs = model.field_apply(j, f, model.group_mul(y, x))[0]
            left_inv = max(left_inv, abs(lhs - rhs))

    comm = 0.0
    pts = rng.normal(size=(50, dim))
    B = model.Bmat
    for j in range(1, dim):
        for k in range(1, dim):
            br = Symbol(ex.sub(model.field_expr(j, model.field_expr(k, f)).expr,
                               model.field_expr(k, model.field_expr(j, f)).expr),
                        sig)
            # [X_j, X_k] = b_kj X_0 for the model fields
            target = B[k - 1, j - 1] * model.field_apply(0, f, pts)
            comm = max(comm, float(np.max(np.abs(br(pts) - target))))

    return {"certifies": "group-algebra", "seed": seed,
            "associativity_residual": assoc, "identity_residual": ident,
            "inverse_residual": inv, "automorphism_residual": autom,
            "left_invariance_residual": float(left_inv),
            "commutator_residual": float(comm)}


def chart_check(model: HeisenbergModel, seed: int = 7, n: int = 50) -> dict:
    rng = np.random.default_rng(seed)
    dim = model.dim
    flow_err = 0.0
    zoom_err = 0.0
    action_err = 0.0
    det_err = 0.0
    for _ in range(n):
        y = rng.normal(size=dim)
        v = rng.normal(size=dim)
        t = float(rng.uniform(0.2, 1.5)) * (1 if rng.random() < 0.5 else -1)
        # closed form vs a high-accuracy integration of the dilated field
        w = np.array([-v[0] * t * t] + list(-v[1:] * t))
        sol = solve_ivp(model.flow_velocity(w), (0.0, 1.0), y, rtol=1e-12,
                        atol=1e-12, dense_output=False)
        flow_err = max(flow_err, float(np.max(np.abs(
            sol.y[:, -1] - model.exp_chart(y, v, t)))))
        # the chart-conjugated zoom has the closed dilation form
        s = float(rng.uniform(0.5, 2.0))
        _, v_chart, t_chart = model.zoom_alpha_via_chart(y, v, t, s)
        zoom_err = max(zoom_err, float(np.max(np.abs(v_chart - heis_dilate(s, v)))),
                       abs(t_chart - t / s))
        # action law on chart coordinates
        s2 = float(rng.uniform(0.5, 2.0))
        _, v1, t1 = HeisenbergModel.zoom_alpha_tilde(s, y, v, t)
        _, v12, t12 = HeisenbergModel.zoom_alpha_tilde(s2, y, v1, t1)
        _, v_direct, t_direct = HeisenbergModel.zoom_alpha_tilde(s * s2, y, v, t)
        action_err = max(action_err, float(np.max(np.abs(v12 - v_direct))),
                         abs(t12 - t_direct))
        M = model.phi_matrix(y)
        det_err = max(det_err, abs(abs(np.linalg.det(M)) - 1.0))
    return {"certifies": "chart", "seed": seed,
            "flow_consistency_residual": flow_err,
            "zoom_chart_residual": zoom_err,
            "zoom_action_law_residual": action_err,
            "chart_determinant_residual": det_err}


def transpose_check(model: HeisenbergModel, seed: int = 7, n: int = 100) -> dict:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        y = rng.normal(size=model.dim)
        eta = rng.normal(size=model.dim)
        worst = max(worst, model.prop_transpose_residual(y, eta))
    return {"certifies": "prop116", "seed": seed, "n_samples": n,
            "prop116_residual": worst}


def kernel_diagram_check(model: HeisenbergModel, R: float = 8.0, N: int = 64,
                         method: str = "spectral") -> dict:
    grid = KernelGrid(R=R, N=N, dim=model.dim)
    sigf = ex.Signature(model.dim, model.dim, False)
    f = Symbol(ex.exp_(ex.neg(ex.add(*[ex.pow_i(sigf.xi(k), 2)
                                       for k in range(model.dim)]))), sigf)
    y = np.zeros((5, model.dim))
    y[1:] = np.array([[0.5, -0.5, 1.0], [1.0, 0.3, -0.7], [-1.0, 1.0, 0.2],
                      [0.2, 0.8, -1.0]])[:, :model.dim]
    return theorem108_check(model, f, grid, y, method=method)


def zoom_check(model: HeisenbergModel, s_values=(1.5, 2.0)) -> dict:
    dim = model.dim
    zgrid = KernelGrid(R=(16.0,) + (8.0,) * (dim - 1), N=(128,) + (64,) * (dim - 1),
                       dim=dim)
    sigu = ex.Signature(0, dim, True)
    a = 2.5
    u = Symbol(ex.mul(
        ex.exp_(ex.mul(ex.const(-1.0 / a ** 2),
                       ex.add(*[ex.pow_i(sigu.xi(k), 2) for k in range(dim)]))),
        ex.exp_(ex.neg(ex.pow_i(sigu.t, 2)))), sigu)
    worst = 0.0
    per = {}
    for s in s_values:
        rep = prop123_check(model, u, zgrid, s=s, t_samples=np.array([0.5, 1.0]))
        per[f"s{s:g}"] = rep["prop123_linf"]
        worst = max(worst, rep["prop123_linf"])
    return {"certifies": "prop123", "prop123_linf": worst, "per_scale": per}
