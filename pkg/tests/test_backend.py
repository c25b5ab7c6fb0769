import numpy as np
import pytest

from phgkit.corpus import load_entry, load_expansion, standard_grid
from phgkit.config import RunConfig
from phgkit.grading import Weights
from phgkit.symbols import backend
from phgkit.symbols import expr as ex
from phgkit.symbols.engine import MultiIndex

compiled = pytest.mark.skipif(backend.BACKEND != "compiled",
                              reason="compiled evaluator not built")


def _workload_trees():
    trees = []
    for name in ("gaussian", "lemma42", "worked-extension", "phg-tail"):
        s = load_entry(name)
        trees.append((s.expr, s.sig))
        d = s.diff(MultiIndex(xi=(1, 0))) if s.sig.d == 2 else s
        trees.append((d.expr, d.sig))
    # a built extension defect: exercises Guarded nesting and TSwitch-free paths
    cfg = RunConfig()
    w = Weights((1, 1))
    expn = load_expansion("expansion-order0")
    from phgkit.phg.extension import build_extension, epsilon_schedule
    sched = epsilon_schedule(expn, w, standard_grid((1, 1), cfg))
    built = build_extension(expn, 0.0, sched, w)
    defect = built.b.defect(w.extended(), 1.5, 0.0)
    trees.append((defect.expr, defect.sig))
    return trees


@compiled
def test_backends_agree_on_corpus():
    rng = np.random.default_rng(5)
    for tree, sig in _workload_trees():
        pts = rng.normal(size=(500, sig.nslots)) * 5.0
        a = backend.evaluate_python(tree, pts, sig)
        b = backend.evaluate_compiled(tree, pts, sig)
        scale = np.maximum(np.abs(a), 1.0)
        assert np.max(np.abs(a - b) / scale) < 1e-13


@compiled
def test_backends_agree_on_switch():
    sig = ex.Signature(0, 1, True)
    t = sig.t
    sw = ex.t_switch(t, 1e-3, ex.mul(sig.xi(0), ex.pow_i(t, -1)), ex.const(7.0))
    pts = np.array([[2.0, 0.5], [2.0, 1e-5], [3.0, -0.7], [1.0, 0.0]])
    a = backend.evaluate_python(sw, pts, sig)
    b = backend.evaluate_compiled(sw, pts, sig)
    assert np.array_equal(a, b)
    assert a[1] == 7.0 and a[3] == 7.0


@compiled
def test_compiled_domain_error():
    sig = ex.Signature(0, 1, False)
    bad = ex.pow_i(sig.xi(0), -1)
    with pytest.raises(ex.DomainError):
        backend.evaluate_compiled(bad, np.array([[0.0]]), sig)


def test_python_guard_skips_masked_points():
    sig = ex.Signature(0, 1, True)
    t = sig.t
    abst = ex.abs_pow(t, 1.0)
    g = ex.guarded(abst, 0.5, ex.step(abst, 0.5, 1.0), ex.pow_i(t, -2))
    vals = backend.evaluate_python(g, np.array([[1.0, 0.0], [1.0, 2.0]]), sig)
    assert vals[0] == 0.0
    assert vals[1] == pytest.approx(0.25)


def test_backend_name_recorded():
    assert backend.BACKEND in ("compiled", "python")


def test_env_forces_python_backend():
    import subprocess
    import sys
    out = subprocess.run(
        [sys.executable, "-c",
         "from phgkit.symbols.backend import BACKEND; print(BACKEND)"],
        env={"PHGKIT_BACKEND": "python", "PATH": "/usr/bin:/bin"},
        capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
