import pytest

from phgkit.config import RunConfig
from phgkit.corpus import (EXPANSION_ENTRIES, SYMBOL_ENTRIES, load_entry,
                           load_expansion, standard_grid, verify_entry)
from phgkit.grading import Weights
from phgkit.symbols.checks import homogeneous_check


CFG = RunConfig()


@pytest.mark.parametrize("name", sorted(SYMBOL_ENTRIES))
def test_declared_classes_verify(name):
    entry = SYMBOL_ENTRIES[name]
    passed, _rep = verify_entry(entry, CFG)
    expected = "negative control" not in entry.note
    assert passed == expected


@pytest.mark.parametrize("name", sorted(EXPANSION_ENTRIES))
def test_expansion_terms_are_homogeneous(name):
    spec = EXPANSION_ENTRIES[name]
    expn = load_expansion(spec)
    assert expn.m == spec.m
    w = Weights(spec.rho)
    grid = standard_grid(spec.rho, CFG, n_x=spec.n_x)
    for j, term in enumerate(expn.terms):
        assert term.order == spec.m - j
        rep = homogeneous_check(term.symbol, term.order, w, grid)
        assert rep.max_violation <= 1e-10, (name, j)


def test_expansion_shapes():
    # coverage demanded of the corpus: orders 0, 1, 2; up to six terms;
    # one anisotropic weight tuple
    orders = {spec.m for spec in EXPANSION_ENTRIES.values()}
    assert {0.0, 1.0, 2.0} <= orders
    assert max(len(spec.terms) for spec in EXPANSION_ENTRIES.values()) == 6
    assert any(set(spec.rho) != {1} for spec in EXPANSION_ENTRIES.values())


def test_unknown_names_rejected():
    from phgkit.grading import InvalidParameterError
    with pytest.raises(InvalidParameterError):
        load_entry("nope")
    with pytest.raises(InvalidParameterError):
        load_expansion("nope")
