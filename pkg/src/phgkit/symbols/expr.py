"""Closed expression trees for smooth functions of (x, xi) or (x, xi, t).

The primitive set is fixed and closed under differentiation:

    Const, Var, Add, Mul, IntPow, AbsPow, RealPow (positive base),
    Exp, Glue_k(r) = r**(-k) * exp(-1/r) for r > 0 else 0,
    Step(u; lo, hi)  a smooth ramp, exactly 0 for u <= lo and 1 for u >= hi,
    Guarded(gate, thr, factor, body)  = factor * body where gate > thr, else 0,
    TSwitch(gate, thr, hi, lo)       = hi where |gate| >= thr, else lo.

Guarded encodes the "flat factor kills a singular partner" pattern: the
constructor trusts the caller that ``factor`` vanishes to infinite order on
{gate <= thr}, so the product extends smoothly by zero there and ``body``
is never evaluated on the masked region.

Constructors canonicalize aggressively but locally: flattening, constant
folding, like-term collection, power combining, bounded distribution of
products over sums, and hoisting of plain factors into Guarded bodies.
This is what makes the extension/extraction pipeline divide exactly by t
in the cases where the mathematics says the quotient is a polynomial-like
tree; it is not a general simplifier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

__all__ = [
    "Expr", "Const", "Var", "Add", "Mul", "IntPow", "AbsPow", "RealPow",
    "Exp", "Glue", "Step", "Guarded", "TSwitch",
    "const", "var", "add", "sub", "neg", "mul", "pow_i", "abs_pow",
    "real_pow", "exp_", "glue", "step", "one_minus_step", "guarded",
    "t_switch", "ZERO", "ONE",
    "differentiate", "substitute", "variables", "sign_of",
    "Signature", "DomainError", "UnsupportedDerivativeError",
]


class DomainError(ValueError):
    """Evaluation left the smoothness/definedness domain of a node."""


class UnsupportedDerivativeError(ValueError):
    """Raised when a derivative rule is missing for a node."""


# ---------------------------------------------------------------------------
# nodes

_INTERN: dict = {}
_NEXT_UID = [0]


def _intern(key, build):
    node = _INTERN.get(key)
    if node is None:
        node = build()
        object.__setattr__(node, "_uid", _NEXT_UID[0])
        _NEXT_UID[0] += 1
        _INTERN[key] = node
    return node


@dataclass(frozen=True, eq=False)
class Expr:
    _uid: int = 0

    def __add__(self, other):
        return add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, mul(const(-1.0), _coerce(other)))

    def __rsub__(self, other):
        return add(_coerce(other), mul(const(-1.0), self))

    def __mul__(self, other):
        return mul(self, _coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return mul(const(-1.0), self)

    def __pow__(self, k):
        if isinstance(k, int):
            return pow_i(self, k)
        return real_pow(self, float(k))


def _coerce(v):
    return v if isinstance(v, Expr) else const(float(v))


@dataclass(frozen=True, eq=False)
class Const(Expr):
    value: float = 0.0


@dataclass(frozen=True, eq=False)
class Var(Expr):
    kind: str = "xi"   # "x", "xi" or "t"
    idx: int = 0


@dataclass(frozen=True, eq=False)
class Add(Expr):
    terms: tuple = ()


@dataclass(frozen=True, eq=False)
class Mul(Expr):
    factors: tuple = ()


@dataclass(frozen=True, eq=False)
class IntPow(Expr):
    base: Expr = None
    k: int = 2


@dataclass(frozen=True, eq=False)
class AbsPow(Expr):
    base: Expr = None
    p: float = 1.0


@dataclass(frozen=True, eq=False)
class RealPow(Expr):
    base: Expr = None
    p: float = 0.5


@dataclass(frozen=True, eq=False)
class Exp(Expr):
    arg: Expr = None


@dataclass(frozen=True, eq=False)
class Glue(Expr):
    arg: Expr = None
    k: int = 0


@dataclass(frozen=True, eq=False)
class Step(Expr):
    arg: Expr = None
    lo: float = 0.0
    hi: float = 1.0


@dataclass(frozen=True, eq=False)
class Guarded(Expr):
    gate: Expr = None
    thr: float = 0.0
    factor: Expr = None
    body: Expr = None


@dataclass(frozen=True, eq=False)
class TSwitch(Expr):
    gate: Expr = None
    thr: float = 1e-3
    hi: Expr = None
    lo: Expr = None


# ---------------------------------------------------------------------------
# smart constructors

def const(v: float) -> Const:
    v = float(v)
    if v == 0.0:
        v = 0.0   # normalize -0.0
    return _intern(("c", v), lambda: Const(value=v))


ZERO = const(0.0)
ONE = const(1.0)


def var(kind: str, idx: int = 0) -> Var:
    if kind not in ("x", "xi", "t"):
        raise ValueError(f"unknown variable kind {kind!r}")
    return _intern(("v", kind, idx), lambda: Var(kind=kind, idx=idx))


def _coeff_split(term: Expr) -> tuple[float, Expr]:
    """Split a canonical non-Const term into (coefficient, rest)."""
    if isinstance(term, Mul) and isinstance(term.factors[0], Const):
        rest = term.factors[1:]
        rest_expr = rest[0] if len(rest) == 1 else _intern(
            ("m",) + tuple(f._uid for f in rest), lambda: Mul(factors=rest))
        return term.factors[0].value, rest_expr
    return 1.0, term


def _with_coeff(c: float, rest: Expr) -> Expr:
    if c == 1.0:
        return rest
    if c == 0.0:
        return ZERO
    if isinstance(rest, Mul):
        factors = (const(c),) + rest.factors
    else:
        factors = (const(c), rest)
    return _intern(("m",) + tuple(f._uid for f in factors), lambda: Mul(factors=factors))


def add(*terms: Expr) -> Expr:
    csum = 0.0
    table: dict[int, list] = {}
    order: list[int] = []
    stack = list(terms)
    stack.reverse()
    while stack:
        term = stack.pop()
        if isinstance(term, Const):
            csum += term.value
        elif isinstance(term, Add):
            stack.extend(reversed(term.terms))
        else:
            coeff, rest = _coeff_split(term)
            ent = table.get(rest._uid)
            if ent is None:
                table[rest._uid] = [coeff, rest]
                order.append(rest._uid)
            else:
                ent[0] += coeff
    out = []
    for uid in sorted(order):
        coeff, rest = table[uid]
        if coeff != 0.0:
            out.append(_with_coeff(coeff, rest))
    if csum != 0.0:
        out.insert(0, const(csum))
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    key = ("a",) + tuple(t._uid for t in out)
    out = tuple(out)
    return _intern(key, lambda: Add(terms=out))


def sub(a: Expr, b: Expr) -> Expr:
    return add(a, mul(const(-1.0), b))


def neg(a: Expr) -> Expr:
    return mul(const(-1.0), a)


_DISTRIBUTE_LIMIT = 64


def mul(*factors: Expr) -> Expr:
    coeff = 1.0
    powers: dict[int, dict] = {}
    order: list[int] = []
    exp_args: list[Expr] = []
    others: list[Expr] = []

    stack = list(factors)
    stack.reverse()
    while stack:
        f = stack.pop()
        if isinstance(f, Const):
            coeff *= f.value
            if coeff == 0.0:
                return ZERO
            continue
        if isinstance(f, Mul):
            stack.extend(reversed(f.factors))
            continue
        if isinstance(f, Exp):
            exp_args.append(f.arg)
            continue
        if isinstance(f, IntPow):
            base, e, kind = f.base, float(f.k), "int"
        elif isinstance(f, AbsPow):
            base, e, kind = f.base, f.p, "abs"
        elif isinstance(f, RealPow):
            base, e, kind = f.base, f.p, "real"
        elif isinstance(f, (Add, Guarded, Step, TSwitch, Glue)):
            others.append(f)
            continue
        else:
            base, e, kind = f, 1.0, "int"
        ent = powers.get(base._uid)
        if ent is None:
            powers[base._uid] = {"base": base, "int": 0.0, "abs": 0.0, "real": 0.0}
            order.append(base._uid)
            ent = powers[base._uid]
        ent[kind] += e

    plain: list[Expr] = []
    for uid in order:
        ent = powers[uid]
        base = ent["base"]
        ei, ea, er = ent["int"], ent["abs"], ent["real"]
        # merge even integer exponents into the abs slot when an abs part exists
        if ea != 0.0 and ei != 0.0 and ei == int(ei) and int(ei) % 2 == 0:
            ea += ei
            ei = 0.0
        for e, build in ((ei, lambda b, p: pow_i(b, int(p))),
                         (ea, abs_pow), (er, real_pow)):
            if e != 0.0:
                node = build(base, e)
                if isinstance(node, Const):
                    coeff *= node.value
                    if coeff == 0.0:
                        return ZERO
                elif isinstance(node, Mul):
                    c2, rest = _coeff_split(node)
                    coeff *= c2
                    plain.append(rest)
                else:
                    plain.append(node)

    if exp_args:
        node = exp_(add(*exp_args))
        if isinstance(node, Const):
            coeff *= node.value
        else:
            plain.append(node)

    plain.extend(others)

    # bounded distribution over sums
    adds = [f for f in plain if isinstance(f, Add)]
    if adds:
        total = 1
        for a in adds:
            total *= len(a.terms)
        if total <= _DISTRIBUTE_LIMIT:
            rest = [f for f in plain if not isinstance(f, Add)]
            terms = [()]
            for a in adds:
                terms = [t + (u,) for t in terms for u in a.terms]
            return add(*[mul(const(coeff), *rest, *combo) for combo in terms])

    # hoist plain factors under the first guard-like factor
    guards = [(f.arg._uid, f.lo, f._uid, f) for f in plain
              if isinstance(f, Step) and f.lo > 0.0]
    guards += [(f.gate._uid, f.thr, f._uid, f) for f in plain if isinstance(f, Guarded)]
    if guards and len(plain) > 1:
        guards.sort()
        g = guards[0][3]
        rest = [f for f in plain if f is not g]
        if isinstance(g, Step):
            inner = guarded(g.arg, g.lo, g, mul(*rest))
        else:
            inner = guarded(g.gate, g.thr, g.factor, mul(g.body, *rest))
        return _with_coeff(coeff, inner) if not isinstance(inner, Const) \
            else const(coeff * inner.value)

    plain.sort(key=lambda f: f._uid)
    if not plain:
        return const(coeff)
    if coeff != 1.0:
        plain.insert(0, const(coeff))
    if len(plain) == 1:
        return plain[0]
    key = ("m",) + tuple(f._uid for f in plain)
    plain = tuple(plain)
    return _intern(key, lambda: Mul(factors=plain))


def pow_i(base: Expr, k: int) -> Expr:
    if not isinstance(k, int):
        if float(k) != int(k):
            raise ValueError("integer power expected")
        k = int(k)
    if k == 0:
        return ONE
    if k == 1:
        return base
    if isinstance(base, Const):
        if base.value == 0.0 and k < 0:
            raise DomainError("0 raised to a negative power")
        return const(base.value ** k)
    if isinstance(base, Mul):
        return mul(*[pow_i(f, k) for f in base.factors])
    if isinstance(base, IntPow):
        return pow_i(base.base, base.k * k)
    if isinstance(base, AbsPow):
        return abs_pow(base.base, base.p * k) if k % 2 == 0 else \
            mul(pow_i(base.base, k), abs_pow(base.base, (base.p - 1.0) * k))
    if isinstance(base, RealPow):
        return real_pow(base.base, base.p * k)
    if isinstance(base, Exp):
        return exp_(mul(const(k), base.arg))
    if isinstance(base, Guarded) and k > 0:
        return guarded(base.gate, base.thr, pow_i(base.factor, k), pow_i(base.body, k))
    return _intern(("ip", base._uid, k), lambda: IntPow(base=base, k=k))


def abs_pow(base: Expr, p: float) -> Expr:
    p = float(p)
    if p == 0.0:
        return ONE
    if isinstance(base, Const):
        if base.value == 0.0 and p < 0:
            raise DomainError("|0| raised to a negative power")
        return const(abs(base.value) ** p)
    if p == int(p) and int(p) % 2 == 0:
        return pow_i(base, int(p))
    if isinstance(base, Mul):
        return mul(*[abs_pow(f, p) for f in base.factors])
    if isinstance(base, AbsPow):
        return abs_pow(base.base, base.p * p)
    if isinstance(base, IntPow):
        return abs_pow(base.base, base.k * p)
    if isinstance(base, RealPow):
        return real_pow(base.base, base.p * p)
    if sign_of(base) in ("pos", "nonneg"):
        return real_pow(base, p)
    return _intern(("ap", base._uid, p), lambda: AbsPow(base=base, p=p))


def real_pow(base: Expr, p: float) -> Expr:
    p = float(p)
    if sign_of(base) == "unknown":
        raise ValueError("real_pow requires a base certified nonnegative")
    if p == 0.0:
        return ONE
    if p == 1.0:
        return base
    if p == int(p):
        return pow_i(base, int(p))
    if isinstance(base, Const):
        if base.value == 0.0 and p < 0:
            raise DomainError("0 raised to a negative power")
        return const(base.value ** p)
    if isinstance(base, RealPow):
        return real_pow(base.base, base.p * p)
    if isinstance(base, IntPow) and base.k % 2 == 0:
        return abs_pow(base.base, base.k * p)
    if isinstance(base, AbsPow):
        return abs_pow(base.base, base.p * p)
    if isinstance(base, Exp):
        return exp_(mul(const(p), base.arg))
    if isinstance(base, Mul) and all(sign_of(f) in ("pos", "nonneg") for f in base.factors):
        return mul(*[real_pow(f, p) for f in base.factors])
    return _intern(("rp", base._uid, p), lambda: RealPow(base=base, p=p))


def exp_(arg: Expr) -> Expr:
    if isinstance(arg, Const):
        return const(math.exp(arg.value))
    return _intern(("e", arg._uid), lambda: Exp(arg=arg))


def _glue_value(r: float, k: int) -> float:
    if r <= 0.0:
        return 0.0
    e = math.exp(-1.0 / r)
    return 0.0 if e == 0.0 else e * r ** (-k)


def glue(arg: Expr, k: int = 0) -> Expr:
    if isinstance(arg, Const):
        return const(_glue_value(arg.value, k))
    return _intern(("g", arg._uid, k), lambda: Glue(arg=arg, k=k))


def _step_value(u: float, lo: float, hi: float) -> float:
    if u <= lo:
        return 0.0
    if u >= hi:
        return 1.0
    gp = math.exp(-1.0 / (u - lo))
    gq = math.exp(-1.0 / (hi - u))
    return gp / (gp + gq)


def step(arg: Expr, lo: float, hi: float) -> Expr:
    """Smooth rising ramp in ``arg``: exactly 0 for arg <= lo, 1 for arg >= hi.

    ``arg`` must be smooth on {arg > lo} (the ramp is locally constant
    elsewhere, so the composite is smooth even if ``arg`` is not).
    """
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        raise ValueError(f"step needs lo < hi, got {lo}, {hi}")
    if isinstance(arg, Const):
        return const(_step_value(arg.value, lo, hi))
    return _intern(("s", arg._uid, lo, hi), lambda: Step(arg=arg, lo=lo, hi=hi))


def one_minus_step(arg: Expr, lo: float, hi: float) -> Expr:
    """Falling ramp, normalized as 1 - Step so cancellations stay structural."""
    return add(ONE, mul(const(-1.0), step(arg, lo, hi)))


def guarded(gate: Expr, thr: float, factor: Expr, body: Expr) -> Expr:
    """factor * body where gate > thr, exactly 0 elsewhere.

    Construction contract: ``factor`` vanishes identically (with all
    derivatives) on {gate <= thr}, and ``body`` is smooth on {gate > thr}.
    Constant coefficients move outside and Add bodies distribute, so this
    canonicalizes the same way a plain Step product does.
    """
    thr = float(thr)
    if factor is ZERO or body is ZERO:
        return ZERO
    if isinstance(factor, Const):
        raise ValueError("guard factor cannot be a nonzero constant")
    if isinstance(gate, Const):
        return ZERO if gate.value <= thr else mul(factor, body)
    if isinstance(body, Const):
        return mul(body, factor)
    if isinstance(body, Add):
        return add(*[guarded(gate, thr, factor, term) for term in body.terms])
    cf, factor = _coeff_split(factor)
    cb, body = _coeff_split(body)
    if cf * cb != 1.0:
        return mul(const(cf * cb), guarded(gate, thr, factor, body))
    if body is ONE:
        return factor
    key = ("gd", gate._uid, thr, factor._uid, body._uid)
    return _intern(key, lambda: Guarded(gate=gate, thr=thr, factor=factor, body=body))


def t_switch(gate: Expr, thr: float, hi: Expr, lo: Expr) -> Expr:
    thr = float(thr)
    if isinstance(gate, Const):
        return hi if abs(gate.value) >= thr else lo
    if hi is lo:
        return hi
    key = ("ts", gate._uid, thr, hi._uid, lo._uid)
    return _intern(key, lambda: TSwitch(gate=gate, thr=thr, hi=hi, lo=lo))


# ---------------------------------------------------------------------------
# sign certificates

_SIGN_CACHE: dict[int, str] = {}


def sign_of(e: Expr) -> str:
    """Conservative sign certificate: "pos", "nonneg" or "unknown"."""
    cached = _SIGN_CACHE.get(e._uid)
    if cached is not None:
        return cached
    s = _sign_of(e)
    _SIGN_CACHE[e._uid] = s
    return s


def _sign_of(e: Expr) -> str:
    if isinstance(e, Const):
        return "pos" if e.value > 0 else ("nonneg" if e.value == 0 else "unknown")
    if isinstance(e, Exp):
        return "pos"
    if isinstance(e, (Glue, Step)):
        return "nonneg"
    if isinstance(e, AbsPow):
        return "pos" if sign_of(e.base) == "pos" else "nonneg"
    if isinstance(e, RealPow):
        return "pos" if sign_of(e.base) == "pos" else "nonneg"
    if isinstance(e, IntPow):
        b = sign_of(e.base)
        if b == "pos":
            return "pos"
        if e.k % 2 == 0:
            return "nonneg" if b != "pos" else "pos"
        return b if b in ("pos", "nonneg") and e.k > 0 else "unknown"
    if isinstance(e, Add):
        signs = [sign_of(t) for t in e.terms]
        if all(s in ("pos", "nonneg") for s in signs):
            return "pos" if any(s == "pos" for s in signs) else "nonneg"
        return "unknown"
    if isinstance(e, Mul):
        signs = [sign_of(f) for f in e.factors]
        if all(s == "pos" for s in signs):
            return "pos"
        if all(s in ("pos", "nonneg") for s in signs):
            return "nonneg"
        return "unknown"
    if isinstance(e, Guarded):
        if sign_of(e.factor) in ("pos", "nonneg") and sign_of(e.body) in ("pos", "nonneg"):
            return "nonneg"
        return "unknown"
    if isinstance(e, TSwitch):
        if sign_of(e.hi) in ("pos", "nonneg") and sign_of(e.lo) in ("pos", "nonneg"):
            return "nonneg"
        return "unknown"
    return "unknown"


# ---------------------------------------------------------------------------
# calculus

def differentiate(e: Expr, v: Var, _memo: Optional[dict] = None) -> Expr:
    """Exact derivative of ``e`` with respect to the variable node ``v``."""
    if _memo is None:
        _memo = {}
    key = (e._uid, v._uid)
    out = _memo.get(key)
    if out is not None:
        return out
    d = lambda u: differentiate(u, v, _memo)

    if isinstance(e, Const):
        out = ZERO
    elif isinstance(e, Var):
        out = ONE if e is v else ZERO
    elif isinstance(e, Add):
        out = add(*[d(t) for t in e.terms])
    elif isinstance(e, Mul):
        parts = []
        for i, f in enumerate(e.factors):
            df = d(f)
            if df is not ZERO:
                rest = e.factors[:i] + e.factors[i + 1:]
                parts.append(mul(df, *rest))
        out = add(*parts) if parts else ZERO
    elif isinstance(e, IntPow):
        out = mul(const(e.k), pow_i(e.base, e.k - 1), d(e.base))
    elif isinstance(e, AbsPow):
        # d|u|^p = p * u * |u|^(p-2) * du, valid on u != 0
        out = mul(const(e.p), e.base, abs_pow(e.base, e.p - 2.0), d(e.base))
    elif isinstance(e, RealPow):
        out = mul(const(e.p), real_pow(e.base, e.p - 1.0), d(e.base))
    elif isinstance(e, Exp):
        out = mul(e, d(e.arg))
    elif isinstance(e, Glue):
        du = d(e.arg)
        if du is ZERO:
            out = ZERO
        else:
            inner = add(glue(e.arg, e.k + 2), mul(const(-e.k), glue(e.arg, e.k + 1))) \
                if e.k else glue(e.arg, 2)
            out = mul(inner, du)
    elif isinstance(e, Step):
        du = d(e.arg)
        if du is ZERO:
            out = ZERO
        else:
            out = guarded(e.arg, e.lo, _step_bump(e.arg, e.lo, e.hi), du)
    elif isinstance(e, Guarded):
        out = add(guarded(e.gate, e.thr, d(e.factor), e.body),
                  guarded(e.gate, e.thr, e.factor, d(e.body)))
    elif isinstance(e, TSwitch):
        out = t_switch(e.gate, e.thr, d(e.hi), d(e.lo))
    else:
        raise UnsupportedDerivativeError(f"no derivative rule for {type(e).__name__}")
    _memo[key] = out
    return out


def _step_bump(u: Expr, lo: float, hi: float) -> Expr:
    """d/du of the ramp profile; vanishes to infinite order outside (lo, hi)."""
    p = add(u, const(-lo))
    q = add(const(hi), mul(const(-1.0), u))
    num = add(mul(glue(p, 2), glue(q, 0)), mul(glue(p, 0), glue(q, 2)))
    den = pow_i(add(glue(p, 0), glue(q, 0)), -2)
    return mul(num, den)


def substitute(e: Expr, mapping: dict, _memo: Optional[dict] = None) -> Expr:
    """Rebuild ``e`` with Var nodes replaced per ``mapping`` (Var -> Expr)."""
    if _memo is None:
        _memo = {}
    out = _memo.get(e._uid)
    if out is not None:
        return out
    s = lambda u: substitute(u, mapping, _memo)

    if isinstance(e, Const):
        out = e
    elif isinstance(e, Var):
        out = mapping.get(e, e)
    elif isinstance(e, Add):
        out = add(*[s(t) for t in e.terms])
    elif isinstance(e, Mul):
        out = mul(*[s(f) for f in e.factors])
    elif isinstance(e, IntPow):
        out = pow_i(s(e.base), e.k)
    elif isinstance(e, AbsPow):
        out = abs_pow(s(e.base), e.p)
    elif isinstance(e, RealPow):
        out = real_pow(s(e.base), e.p)
    elif isinstance(e, Exp):
        out = exp_(s(e.arg))
    elif isinstance(e, Glue):
        out = glue(s(e.arg), e.k)
    elif isinstance(e, Step):
        out = step(s(e.arg), e.lo, e.hi)
    elif isinstance(e, Guarded):
        gate = s(e.gate)
        if isinstance(gate, Const):
            # decide before touching the children: the body need not be
            # substitutable on the masked side (that is the point of the guard)
            out = ZERO if gate.value <= e.thr else mul(s(e.factor), s(e.body))
        else:
            out = guarded(gate, e.thr, s(e.factor), s(e.body))
    elif isinstance(e, TSwitch):
        gate = s(e.gate)
        if isinstance(gate, Const):
            out = s(e.hi) if abs(gate.value) >= e.thr else s(e.lo)
        else:
            out = t_switch(gate, e.thr, s(e.hi), s(e.lo))
    else:
        raise ValueError(f"cannot substitute into {type(e).__name__}")
    _memo[e._uid] = out
    return out


def variables(e: Expr) -> frozenset:
    """All Var nodes occurring in ``e``."""
    seen: set[int] = set()
    out: set[Var] = set()

    def walk(node):
        if node._uid in seen:
            return
        seen.add(node._uid)
        if isinstance(node, Var):
            out.add(node)
        for child in _children(node):
            walk(child)

    walk(e)
    return frozenset(out)


def _children(e: Expr) -> tuple:
    if isinstance(e, Add):
        return e.terms
    if isinstance(e, Mul):
        return e.factors
    if isinstance(e, (IntPow, AbsPow, RealPow)):
        return (e.base,)
    if isinstance(e, Exp):
        return (e.arg,)
    if isinstance(e, (Glue, Step)):
        return (e.arg,)
    if isinstance(e, Guarded):
        return (e.gate, e.factor, e.body)
    if isinstance(e, TSwitch):
        return (e.gate, e.hi, e.lo)
    return ()


def node_count(e: Expr) -> int:
    seen: set[int] = set()

    def walk(node):
        if node._uid in seen:
            return
        seen.add(node._uid)
        for c in _children(node):
            walk(c)

    walk(e)
    return len(seen)


# ---------------------------------------------------------------------------
# variable signatures

@dataclass(frozen=True)
class Signature:
    """Declared variable layout of a symbol: x-arity, xi-arity, optional t."""

    n: int
    d: int
    has_t: bool = False

    @property
    def nslots(self) -> int:
        return self.n + self.d + (1 if self.has_t else 0)

    def x(self, i: int) -> Var:
        if not 0 <= i < self.n:
            raise ValueError(f"x index {i} out of range for n={self.n}")
        return var("x", i)

    def xi(self, k: int) -> Var:
        if not 0 <= k < self.d:
            raise ValueError(f"xi index {k} out of range for d={self.d}")
        return var("xi", k)

    @property
    def t(self) -> Var:
        if not self.has_t:
            raise ValueError("signature has no t slot")
        return var("t", 0)

    def slot(self, v: Var) -> int:
        if v.kind == "x":
            if v.idx >= self.n:
                raise DomainError(f"x_{v.idx} not in signature (n={self.n})")
            return v.idx
        if v.kind == "xi":
            if v.idx >= self.d:
                raise DomainError(f"xi_{v.idx} not in signature (d={self.d})")
            return self.n + v.idx
        if not self.has_t:
            raise DomainError("t not in signature")
        return self.n + self.d

    def xi_vars(self) -> tuple[Var, ...]:
        return tuple(var("xi", k) for k in range(self.d))

    def without_t(self) -> "Signature":
        return Signature(self.n, self.d, False)
