import math

import numpy as np
import pytest

from phgkit.grading import Weights
from phgkit.symbols.backend import evaluate
from phgkit.symbols.dsl import ParseError, parse, to_dsl


@pytest.fixture(scope="module")
def w():
    return Weights((1, 1))


def test_parse_polynomial(w, sig2):
    e = parse("(+ 1 (pow xi1 2) (* 2 xi2))", w, sig2)
    assert evaluate(e, np.array([[3.0, 4.0]]), sig2)[0] == 18.0


def test_parse_gaussian_value(w, sig2):
    e = parse("(gauss)", w, sig2)
    assert evaluate(e, np.array([[1.0, 1.0]]), sig2)[0] == pytest.approx(math.exp(-2.0))


def test_parse_t_requires_slot(w, sig2):
    with pytest.raises(ParseError):
        parse("(pow t 2)", w, sig2)


def test_parse_variable_out_of_range(w, sig2):
    with pytest.raises(ParseError) as err:
        parse("xi3", w, sig2)
    assert "line 1" in str(err.value)


def test_parse_error_reports_location(w, sig2):
    with pytest.raises(ParseError) as err:
        parse("(+ xi1\n   (frob xi2))", w, sig2)
    assert "line 2" in str(err.value)


def test_parse_unbalanced(w, sig2):
    with pytest.raises(ParseError):
        parse("(+ xi1 xi2", w, sig2)
    with pytest.raises(ParseError):
        parse("(+ xi1) xi2", w, sig2)


def test_round_trip_corpus(w):
    from phgkit.corpus import SYMBOL_ENTRIES, load_entry
    for entry in SYMBOL_ENTRIES.values():
        sym = load_entry(entry)
        text = to_dsl(sym.expr)
        back = parse(text, Weights(entry.rho), sym.sig)
        assert back is sym.expr, entry.name


def test_round_trip_extraction_output(w, sig2t):
    """Extraction output (guards, switches) survives the text format."""
    from phgkit.corpus import load_entry
    from phgkit.phg.expansion import extract_expansion
    from phgkit.symbols.checks import Certificate
    u = load_entry("worked-extension")
    expn = extract_expansion(u, 2.0, 2, w, Certificate("hs", 2.0, True))
    for term in expn.terms:
        text = to_dsl(term.symbol.expr)
        assert parse(text, w, term.symbol.sig) is term.symbol.expr
    # and a guarded construction
    from phgkit.phg.expansion import make_b
    b = make_b(load_entry("lemma42"), 1.0, w,
               certificate=Certificate("hs", 1.0, True))
    assert parse(to_dsl(b.expr), w, b.sig) is b.expr


def test_qnp_matches_quasi_norm_power(w, sig2):
    from phgkit.symbols.quasinorms import quasi_norm_power
    assert parse("(qnp -3)", w, sig2) is quasi_norm_power(w, -3.0)
