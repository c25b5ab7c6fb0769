"""A small prefix-notation text language for symbols.

Expressions are s-expressions over the primitive set, parsed against a
weight tuple (for the quasi-norm forms) and a variable signature (for
arity checking).  Atoms: numbers, ``x1..xn``, ``xi1..xid``, ``t``.

    (+ e ...)            sum                 (* e ...)            product
    (- a b)              difference          (neg e)              negation
    (pow e k)            integer power       (rpow e p)           real power
    (abspow e p)         |e|**p              (exp e)              exponential
    (glue e [k])         e^{-1/r} r^{-k}     (step e lo hi)       rising ramp
    (stepdown e lo hi)   falling ramp        (qn)                 quasi-norm
    (qnp p)              |xi|**p             (gauss [c])          exp(-c P(xi))
    (phi lo hi)          radial rising       (chik R)             0 on ball R, 1 at infinity
    (chi0 plat supp)     falling t-cutoff    (chi1 plat supp)     rising t-cutoff
    (guarded gate thr factor body)           (tswitch thr hi lo)

The printer emits the same language, so any tree (including extraction
output with guards and switches) round-trips through text.
"""

from __future__ import annotations

import re

from phgkit.grading import Weights

from . import expr as ex
from .quasinorms import even_power_polynomial, quasi_norm_power

__all__ = ["ParseError", "parse", "to_dsl"]


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")
_VAR = re.compile(r"^(x|xi)([0-9]+)$")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ParseError(f"unreadable input {text[pos:pos+10]!r}", pos, text)
            break
        if m.group(1):
            out.append(("(", m.start(1)))
        elif m.group(2):
            out.append((")", m.start(2)))
        else:
            out.append((m.group(3), m.start(3)))
        pos = m.end()
    return out


def parse(text: str, w: Weights, sig: ex.Signature) -> ex.Expr:
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty input", 0, text)
    expr, rest = _parse_one(tokens, 0, text, w, sig)
    if rest != len(tokens):
        raise ParseError("trailing input after expression", tokens[rest][1], text)
    return expr


def _parse_one(tokens, i, text, w, sig):
    tok, pos = tokens[i]
    if tok == ")":
        raise ParseError("unexpected ')'", pos, text)
    if tok != "(":
        return _atom(tok, pos, text, sig), i + 1
    i += 1
    if i >= len(tokens):
        raise ParseError("unclosed '('", pos, text)
    head, hpos = tokens[i]
    i += 1
    args = []
    while True:
        if i >= len(tokens):
            raise ParseError("unclosed '('", pos, text)
        if tokens[i][0] == ")":
            i += 1
            break
        arg, i = _parse_one(tokens, i, text, w, sig)
        args.append(arg)
    return _apply(head, hpos, args, text, w, sig), i


def _atom(tok, pos, text, sig):
    m = _VAR.match(tok)
    if m:
        kind, idx = m.group(1), int(m.group(2)) - 1
        limit = sig.n if kind == "x" else sig.d
        if not 0 <= idx < limit:
            raise ParseError(f"variable {tok} outside the declared signature", pos, text)
        return ex.var(kind, idx)
    if tok == "t":
        if not sig.has_t:
            raise ParseError("t used but the signature has no t slot", pos, text)
        return ex.var("t")
    try:
        return ex.const(float(tok))
    except ValueError:
        raise ParseError(f"unknown atom {tok!r}", pos, text) from None


def _need(args, n, head, pos, text, at_least=False):
    ok = len(args) >= n if at_least else len(args) == n
    if not ok:
        raise ParseError(f"{head} expects {'at least ' if at_least else ''}{n} arguments, "
                         f"got {len(args)}", pos, text)


def _num(e, head, pos, text):
    if not isinstance(e, ex.Const):
        raise ParseError(f"{head} expects a numeric literal", pos, text)
    return e.value


def _apply(head, pos, args, text, w, sig):
    t_abs = lambda: ex.abs_pow(ex.var("t"), 1.0)
    if head == "+":
        _need(args, 1, head, pos, text, at_least=True)
        return ex.add(*args)
    if head == "*":
        _need(args, 1, head, pos, text, at_least=True)
        return ex.mul(*args)
    if head == "-":
        _need(args, 2, head, pos, text)
        return ex.sub(args[0], args[1])
    if head == "neg":
        _need(args, 1, head, pos, text)
        return ex.neg(args[0])
    if head == "pow":
        _need(args, 2, head, pos, text)
        return ex.pow_i(args[0], int(_num(args[1], head, pos, text)))
    if head == "rpow":
        _need(args, 2, head, pos, text)
        return ex.real_pow(args[0], _num(args[1], head, pos, text))
    if head == "abspow":
        _need(args, 2, head, pos, text)
        return ex.abs_pow(args[0], _num(args[1], head, pos, text))
    if head == "exp":
        _need(args, 1, head, pos, text)
        return ex.exp_(args[0])
    if head == "glue":
        if len(args) not in (1, 2):
            raise ParseError("glue expects 1 or 2 arguments", pos, text)
        k = int(_num(args[1], head, pos, text)) if len(args) == 2 else 0
        return ex.glue(args[0], k)
    if head == "step":
        _need(args, 3, head, pos, text)
        return ex.step(args[0], _num(args[1], head, pos, text),
                       _num(args[2], head, pos, text))
    if head == "stepdown":
        _need(args, 3, head, pos, text)
        return ex.one_minus_step(args[0], _num(args[1], head, pos, text),
                                 _num(args[2], head, pos, text))
    if head == "qn":
        _need(args, 0, head, pos, text)
        return quasi_norm_power(w, 1.0)
    if head == "qnp":
        _need(args, 1, head, pos, text)
        return quasi_norm_power(w, _num(args[0], head, pos, text))
    if head == "gauss":
        if len(args) not in (0, 1):
            raise ParseError("gauss expects 0 or 1 arguments", pos, text)
        c = _num(args[0], head, pos, text) if args else 1.0
        return ex.exp_(ex.mul(ex.const(-c), even_power_polynomial(w)))
    if head == "phi":
        _need(args, 2, head, pos, text)
        return ex.step(quasi_norm_power(w, 1.0), _num(args[0], head, pos, text),
                       _num(args[1], head, pos, text))
    if head == "chik":
        _need(args, 1, head, pos, text)
        R = _num(args[0], head, pos, text)
        return ex.step(quasi_norm_power(w, 1.0), R, 2.0 * R)
    if head == "chi0":
        _need(args, 2, head, pos, text)
        return ex.one_minus_step(t_abs(), _num(args[0], head, pos, text),
                                 _num(args[1], head, pos, text))
    if head == "chi1":
        _need(args, 2, head, pos, text)
        return ex.step(t_abs(), _num(args[0], head, pos, text),
                       _num(args[1], head, pos, text))
    if head == "guarded":
        _need(args, 4, head, pos, text)
        return ex.guarded(args[0], _num(args[1], head, pos, text), args[2], args[3])
    if head == "tswitch":
        _need(args, 3, head, pos, text)
        return ex.t_switch(ex.var("t"), _num(args[0], head, pos, text),
                           args[1], args[2])
    raise ParseError(f"unknown operator {head!r}", pos, text)


def to_dsl(e: ex.Expr) -> str:
    """Print a tree in the parseable prefix language (primitive forms only)."""
    if isinstance(e, ex.Const):
        return repr(e.value)
    if isinstance(e, ex.Var):
        return "t" if e.kind == "t" else f"{e.kind}{e.idx + 1}"
    if isinstance(e, ex.Add):
        return "(+ " + " ".join(to_dsl(t) for t in e.terms) + ")"
    if isinstance(e, ex.Mul):
        return "(* " + " ".join(to_dsl(f) for f in e.factors) + ")"
    if isinstance(e, ex.IntPow):
        return f"(pow {to_dsl(e.base)} {e.k})"
    if isinstance(e, ex.AbsPow):
        return f"(abspow {to_dsl(e.base)} {e.p!r})"
    if isinstance(e, ex.RealPow):
        return f"(rpow {to_dsl(e.base)} {e.p!r})"
    if isinstance(e, ex.Exp):
        return f"(exp {to_dsl(e.arg)})"
    if isinstance(e, ex.Glue):
        return f"(glue {to_dsl(e.arg)} {e.k})"
    if isinstance(e, ex.Step):
        return f"(step {to_dsl(e.arg)} {e.lo!r} {e.hi!r})"
    if isinstance(e, ex.Guarded):
        return (f"(guarded {to_dsl(e.gate)} {e.thr!r} "
                f"{to_dsl(e.factor)} {to_dsl(e.body)})")
    if isinstance(e, ex.TSwitch):
        return f"(tswitch {e.thr!r} {to_dsl(e.hi)} {to_dsl(e.lo)})"
    raise ValueError(f"cannot print node type {type(e).__name__}")
