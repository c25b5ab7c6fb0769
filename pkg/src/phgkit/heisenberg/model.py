"""The model group structure on R^(d+1): group law, model fields, graded
dilations, exponential charts, and the affine symbol changes.

Coordinates are (x_0, x_1, ..., x_d); the antisymmetric matrix B twists the
0-slot.  The group law is

    (x . y)_0 = x_0 + y_0 + (1/2) <Bx, y>,     (x . y)_j = x_j + y_j,

with <Bx, y> = sum_j y_j (Bx)_j over the slots 1..d.  This index
orientation is the unique one making the model fields

    X_j = d/dx_j + (1/2) (Bx)_j d/dx_0

left-invariant (enforced by the left-invariance property test); the
flipped pairing makes them right-invariant instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from phgkit.grading import InvalidParameterError, Weights
from phgkit.symbols import expr as ex
from phgkit.symbols.engine import Symbol

__all__ = ["HeisenbergModel", "heis_dilate", "standard_block_matrix"]


def standard_block_matrix(n: int, m: int = 0) -> np.ndarray:
    """The block form [[0, -I], [I, 0]] padded with m zero rows/columns."""
    d = 2 * n + m
    B = np.zeros((d, d))
    B[:n, n:2 * n] = -np.eye(n)
    B[n:2 * n, :n] = np.eye(n)
    return B


def heis_dilate(s: float, v: np.ndarray) -> np.ndarray:
    """Weight-2 scaling on slot 0, weight-1 on slots 1..d."""
    if not s > 0:
        raise InvalidParameterError("dilation scale must be positive")
    v = np.asarray(v, dtype=float)
    out = v * s
    out[..., 0] = v[..., 0] * s * s
    return out


@dataclass(frozen=True)
class HeisenbergModel:
    """Dimension d and the antisymmetric matrix B = (b_jk), 1 <= j,k <= d."""

    d: int
    B: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        B = np.asarray(self.B, dtype=float)
        if B.shape != (self.d, self.d):
            raise InvalidParameterError(f"B must be {self.d}x{self.d}")
        if np.any(B + B.T != 0.0):
            raise InvalidParameterError("B must be antisymmetric (exactly)")
        object.__setattr__(self, "B", tuple(tuple(row) for row in B))

    @cached_property
    def Bmat(self) -> np.ndarray:
        return np.asarray(self.B, dtype=float)

    @property
    def dim(self) -> int:
        return self.d + 1

    @cached_property
    def weights(self) -> Weights:
        return Weights((2,) + (1,) * self.d)

    # -- group structure ----------------------------------------------------

    def group_mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = x + y
        bx = x[..., 1:] @ self.Bmat.T          # (Bx)_j
        out[..., 0] += 0.5 * np.sum(bx * y[..., 1:], axis=-1)
        return out

    def group_inverse(self, x: np.ndarray) -> np.ndarray:
        return -np.asarray(x, dtype=float)

    # -- model fields -------------------------------------------------------

    def field_apply(self, j: int, f: Symbol, x: np.ndarray) -> np.ndarray:
        """(X_j f)(x) through the symbolic derivative path."""
        if not 0 <= j <= self.d:
            raise InvalidParameterError(f"field index {j} out of range")
        x = np.atleast_2d(np.asarray(x, dtype=float))
        d0 = f.diff_var(f.sig.x(0))(x)
        if j == 0:
            return d0
        dj = f.diff_var(f.sig.x(j))(x)
        bx = x[:, 1:] @ self.Bmat.T
        return dj + 0.5 * bx[:, j - 1] * d0

    def field_expr(self, j: int, f: Symbol) -> Symbol:
        """X_j f as a symbol (for iterated brackets)."""
        sig = f.sig
        d0 = ex.differentiate(f.expr, sig.x(0))
        if j == 0:
            return Symbol(d0, sig)
        dj = ex.differentiate(f.expr, sig.x(j))
        bx = ex.add(*[ex.mul(ex.const(self.Bmat[j - 1, k]), sig.x(k + 1))
                      for k in range(self.d)]) if self.d else ex.ZERO
        return Symbol(ex.add(dj, ex.mul(ex.const(0.5), bx, d0)), sig)

    def left_translation_map(self, y: np.ndarray, sig: ex.Signature) -> dict:
        """Substitution x -> y . x (affine in x) for pulling back symbols."""
        y = np.asarray(y, dtype=float)
        by = y[1:] @ self.Bmat.T
        mapping = {}
        x0 = sig.x(0)
        bilinear = ex.add(*[ex.mul(ex.const(0.5 * by[k]), sig.x(k + 1))
                            for k in range(self.d)]) if self.d else ex.ZERO
        mapping[x0] = ex.add(ex.const(y[0]), x0, bilinear)
        for j in range(1, self.d + 1):
            mapping[sig.x(j)] = ex.add(ex.const(y[j]), sig.x(j))
        return mapping

    # -- exponential chart ---------------------------------------------------

    def exp_chart(self, y: np.ndarray, v: np.ndarray, t: float) -> np.ndarray:
        """Second leg y' of the chart point (y, y', t); for t = 0 the fiber
        datum is v itself (the osculating coordinates)."""
        y = np.asarray(y, dtype=float)
        v = np.asarray(v, dtype=float)
        if t == 0.0:
            return v.copy()
        by = y[1:] @ self.Bmat.T
        y0 = -0.5 * t * float(np.dot(v[1:], by)) - v[0] * t * t + y[0]
        rest = -v[1:] * t + y[1:]
        return np.concatenate([[y0], rest])

    def exp_chart_inverse(self, y: np.ndarray, yp: np.ndarray, t: float) -> np.ndarray:
        """Recover the fiber coordinate v from a chart point (y, y', t), t != 0."""
        if t == 0.0:
            raise InvalidParameterError("the t = 0 fiber is not chart-invertible")
        y = np.asarray(y, dtype=float)
        yp = np.asarray(yp, dtype=float)
        v_rest = (y[1:] - yp[1:]) / t
        by = y[1:] @ self.Bmat.T
        v0 = (y[0] - yp[0] - 0.5 * t * float(np.dot(v_rest, by))) / (t * t)
        return np.concatenate([[v0], v_rest])

    def zoom_alpha_via_chart(self, y: np.ndarray, v: np.ndarray, t: float,
                             s: float) -> tuple[np.ndarray, np.ndarray, float]:
        """Conjugate the pair-groupoid zoom through the chart: map to
        (y, y', t), scale t by 1/s, and invert the chart.  The closed form
        says the result is (y, delta_s v, t/s); this computes it the long
        way so the two can be compared."""
        yp = self.exp_chart(y, v, t)
        t_new = t / s
        return y, self.exp_chart_inverse(y, yp, t_new), t_new

    def flow_velocity(self, v: np.ndarray):
        """Right-hand side of xdot = sum_j v_j X_j(x), for the flow oracle."""
        B = self.Bmat

        def rhs(_s, x):
            bx = B @ x[1:]
            out = np.empty_like(x)
            out[0] = v[0] + 0.5 * float(np.dot(v[1:], bx))
            out[1:] = v[1:]
            return out

        return rhs

    def phi_matrix(self, y: np.ndarray) -> np.ndarray:
        """The linear chart factor at t = 1: y' = phi_y(v) + y."""
        y = np.asarray(y, dtype=float)
        by = y[1:] @ self.Bmat.T
        M = -np.eye(self.dim)
        M[0, 1:] = -0.5 * by
        return M

    def phi_y(self, y: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.phi_matrix(y) @ np.asarray(v, dtype=float)

    # -- symbol changes -------------------------------------------------------

    def sigma(self, x: np.ndarray, eta: np.ndarray) -> np.ndarray:
        """sigma_0 = eta_0, sigma_j = eta_j + (1/2)(Bx)_j eta_0."""
        x = np.asarray(x, dtype=float)
        eta = np.asarray(eta, dtype=float)
        out = eta.copy()
        bx = x[..., 1:] @ self.Bmat.T
        out[..., 1:] += 0.5 * bx * eta[..., :1]
        return out

    def sigma_tilde(self, x: np.ndarray, eta: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        eta = np.asarray(eta, dtype=float)
        out = eta.copy()
        bx = x[..., 1:] @ self.Bmat.T
        out[..., 1:] -= 0.5 * bx * eta[..., :1]
        return out

    def sigma_exprs(self, sig: ex.Signature) -> list[ex.Expr]:
        """sigma_j(x, eta) as expressions with eta in the xi slots."""
        eta0 = sig.xi(0)
        out = [eta0]
        for j in range(1, self.d + 1):
            bx = ex.add(*[ex.mul(ex.const(self.Bmat[j - 1, k]), sig.x(k + 1))
                          for k in range(self.d)]) if self.d else ex.ZERO
            out.append(ex.add(sig.xi(j), ex.mul(ex.const(0.5), bx, eta0)))
        return out

    def sigma_pullback(self, f: Symbol) -> Symbol:
        """q(x, xi) = f(x, sigma(x, xi)): substitute the symbol change."""
        sig = f.sig
        exprs = self.sigma_exprs(sig)
        mapping = {sig.xi(j): exprs[j] for j in range(self.dim)}
        return Symbol(ex.substitute(f.expr, mapping), sig)

    def prop_transpose_residual(self, y: np.ndarray, eta: np.ndarray) -> float:
        """|| transpose(phi_y^{-1}) eta - sigma_tilde(y, -eta) ||."""
        M = self.phi_matrix(y)
        lhs = np.linalg.solve(M.T, np.asarray(eta, dtype=float))
        rhs = self.sigma_tilde(y, -np.asarray(eta, dtype=float))
        return float(np.linalg.norm(lhs - rhs))

    # -- zoom actions ----------------------------------------------------------

    @staticmethod
    def zoom_alpha_tilde(s: float, x, v, t):
        """Chart form of the zoom: (x, delta_s v, t/s)."""
        if not s > 0:
            raise InvalidParameterError("zoom scale must be positive")
        return x, heis_dilate(s, np.asarray(v, dtype=float)), t / s

    @staticmethod
    def zoom_beta(s: float, x, v, t):
        """(x, delta_s v, s t): the extended dilation on the (v, t) block."""
        if not s > 0:
            raise InvalidParameterError("zoom scale must be positive")
        return x, heis_dilate(s, np.asarray(v, dtype=float)), s * t

    # -- serialization -----------------------------------------------------------

    def to_config(self) -> dict:
        return {"d": self.d, "B": [list(r) for r in self.B]}

    @staticmethod
    def from_config(cfg: dict | str) -> "HeisenbergModel":
        if isinstance(cfg, str):
            cfg = json.loads(cfg)
        return HeisenbergModel(d=int(cfg["d"]), B=tuple(tuple(r) for r in cfg["B"]))
