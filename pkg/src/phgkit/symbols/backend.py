"""Evaluation backend selection.

The compiled tape interpreter (``phgkit._evalcore``) is preferred when it
imported successfully; otherwise the numpy tree walker is used.  Set
``PHGKIT_BACKEND=python`` or ``compiled`` to force a choice.  Reports record
which backend produced them.
"""

from __future__ import annotations

import os

import numpy as np

from . import expr as ex
from . import pyeval
from . import tape as tapemod

try:
    from phgkit import _evalcore
except ImportError:  # pragma: no cover - depends on build environment
    _evalcore = None

_FORCED = os.environ.get("PHGKIT_BACKEND", "").strip().lower()
if _FORCED == "python":
    _evalcore = None
elif _FORCED == "compiled" and _evalcore is None:  # pragma: no cover
    raise ImportError("PHGKIT_BACKEND=compiled but phgkit._evalcore is not built")

BACKEND = "compiled" if _evalcore is not None else "python"

_TAPE_CACHE: dict[tuple[int, ex.Signature], tapemod.Tape] = {}


def evaluate(e: ex.Expr, pts: np.ndarray, sig: ex.Signature) -> np.ndarray:
    """Evaluate ``e`` at an (N, nslots) point array under ``sig``."""
    if _evalcore is None:
        return pyeval.eval_tree(e, pts, sig)
    return evaluate_compiled(e, pts, sig)


def evaluate_python(e: ex.Expr, pts: np.ndarray, sig: ex.Signature) -> np.ndarray:
    return pyeval.eval_tree(e, pts, sig)


def evaluate_compiled(e: ex.Expr, pts: np.ndarray, sig: ex.Signature) -> np.ndarray:
    if _evalcore is None:
        raise RuntimeError("compiled evaluator unavailable")
    pts = np.ascontiguousarray(np.atleast_2d(np.asarray(pts, dtype=float)))
    if pts.shape[1] != sig.nslots:
        raise ex.DomainError(
            f"point arity {pts.shape[1]} does not match signature with {sig.nslots} slots")
    key = (e._uid, sig)
    tp = _TAPE_CACHE.get(key)
    if tp is None:
        tp = tapemod.compile_tape(e, sig)
        _TAPE_CACHE[key] = tp
    try:
        return _evalcore.run_tape(tp.ops, tp.a, tp.b, tp.out, tp.p1, tp.p2,
                                  tp.nreg, tp.result, pts)
    except ValueError as err:
        raise ex.DomainError(str(err)) from None
