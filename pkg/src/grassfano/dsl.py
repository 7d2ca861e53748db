"""Bundle expression language.

    ambient  := factor ('x' factor)*          factor := P(n) | Gr(k,n)
    spec     := ambient '::' expr
    expr     := term ('+' term)*
    term     := post (('*' | '#') post)*
    post     := primary ('^' INT)?           multiplicity
    primary  := U[i] | Q[i] | O(t1,...) | 0 | dual(expr) | wedge^k(expr)
              | sym^k(expr) | S[l1,l2,...](expr) | '(' expr ')'

`*` and `#` are both tensor products; `#` marks an exterior product of
bundles living on different factors.  Printing is the inverse of parsing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .bundles import Ambient, Bundle, GrFactor


class DSLError(ValueError):
    pass


# -- syntax tree ---------------------------------------------------------------

@dataclass(frozen=True)
class Taut:
    """U[i] (kind 'U') or Q[i] (kind 'Q'); i is 1-based."""
    kind: str
    index: int


@dataclass(frozen=True)
class Line:
    degrees: tuple


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Dual:
    child: object


@dataclass(frozen=True)
class Wedge:
    k: int
    child: object


@dataclass(frozen=True)
class Sym:
    k: int
    child: object


@dataclass(frozen=True)
class SchurApply:
    lam: tuple
    child: object


@dataclass(frozen=True)
class Tensor:
    children: tuple


@dataclass(frozen=True)
class BoxTensor:
    children: tuple


@dataclass(frozen=True)
class DirectSum:
    children: tuple  # of (expr, multiplicity)


@dataclass(frozen=True)
class ZeroLocusSpec:
    ambient: Ambient
    cutting: object

    def __str__(self):
        return f"{self.ambient} :: {to_string(self.cutting)}"


# -- evaluation ----------------------------------------------------------------

def evaluate(e, X: Ambient) -> Bundle:
    """Normalize an expression into a Bundle."""
    if isinstance(e, Taut):
        i = e.index - 1
        if not 0 <= i < len(X):
            raise DSLError(f"{e.kind}[{e.index}] refers to a missing factor")
        if e.kind == "Q":
            return Bundle.quotient(X, i)
        return Bundle.taut_dual(X, i).dual()
    if isinstance(e, Line):
        if len(e.degrees) != len(X):
            raise DSLError(f"O{e.degrees} needs {len(X)} degrees")
        return Bundle.line(X, e.degrees)
    if isinstance(e, Zero):
        return Bundle.zero(X)
    if isinstance(e, Dual):
        return evaluate(e.child, X).dual()
    if isinstance(e, Wedge):
        return evaluate(e.child, X).wedge(e.k)
    if isinstance(e, Sym):
        return evaluate(e.child, X).sym(e.k)
    if isinstance(e, SchurApply):
        return evaluate(e.child, X).schur(e.lam)
    if isinstance(e, (Tensor, BoxTensor)):
        acc = Bundle.trivial(X)
        for c in e.children:
            acc = acc.tensor(evaluate(c, X))
        return acc
    if isinstance(e, DirectSum):
        acc = Bundle.zero(X)
        for c, m in e.children:
            acc = acc + evaluate(c, X).scale(m)
        return acc
    raise DSLError(f"unknown node {e!r}")


def normalize(e, X: Ambient):
    """List of irreducible summands of e."""
    return evaluate(e, X).summands()


def rank(e, X: Ambient) -> int:
    return evaluate(e, X).rank


def dual(e):
    return Dual(e)


# -- printing ------------------------------------------------------------------

def _atomic(e):
    return isinstance(e, (Taut, Line, Zero, Dual, Wedge, Sym, SchurApply))


def _wrap(e):
    s = to_string(e)
    return s if _atomic(e) else f"({s})"


def to_string(e) -> str:
    if isinstance(e, Taut):
        return f"{e.kind}[{e.index}]"
    if isinstance(e, Line):
        return "O(" + ",".join(str(t) for t in e.degrees) + ")"
    if isinstance(e, Zero):
        return "0"
    if isinstance(e, Dual):
        return f"dual({to_string(e.child)})"
    if isinstance(e, Wedge):
        return f"wedge^{e.k}({to_string(e.child)})"
    if isinstance(e, Sym):
        return f"sym^{e.k}({to_string(e.child)})"
    if isinstance(e, SchurApply):
        return "S[" + ",".join(str(x) for x in e.lam) + f"]({to_string(e.child)})"
    if isinstance(e, Tensor):
        return " * ".join(_wrap(c) for c in e.children)
    if isinstance(e, BoxTensor):
        return " # ".join(_wrap(c) for c in e.children)
    if isinstance(e, DirectSum):
        if not e.children:
            return "0"
        single = len(e.children) == 1
        parts = []
        for c, m in e.children:
            s = _wrap(c)
            if m != 1 or single:
                s += f"^{m}"
            parts.append(s)
        return " + ".join(parts)
    raise DSLError(f"unknown node {e!r}")


def ambient_string(X: Ambient) -> str:
    return str(X)


# -- parsing -------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z]+)|(::|[()\[\],+*#^\-]))")


def _tokenize(s):
    pos = 0
    out = []
    s = s.replace("×", " x ").replace("⊗", "*").replace("⊞", "#").replace("⊠", "#")
    while pos < len(s):
        if s[pos:].strip() == "":
            break
        m = _TOKEN.match(s, pos)
        if not m:
            raise DSLError(f"unexpected character {s[pos:].strip()[:1]!r} at {pos}")
        num, word, sym = m.groups()
        if num is not None:
            out.append(("int", int(num)))
        elif word is not None:
            out.append(("word", word))
        else:
            out.append(("sym", sym))
        pos = m.end()
    return out


class _Pending:
    """A post-fix multiplicity not yet attached to a sum."""

    __slots__ = ("node", "mult")

    def __init__(self, node, mult):
        self.node, self.mult = node, mult


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, off=0):
        j = self.i + off
        return self.toks[j] if j < len(self.toks) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None:
            raise DSLError(f"unexpected end of input in {self.text!r}")
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            raise DSLError(f"expected {want!r}, got {tok[1]!r} in {self.text!r}")
        self.i += 1
        return tok[1]

    def at(self, kind, value=None):
        tok = self.peek()
        return tok[0] == kind and (value is None or tok[1] == value)

    def integer(self):
        sign = 1
        if self.at("sym", "-"):
            self.take()
            sign = -1
        return sign * self.take("int")

    def int_list(self, close):
        vals = [self.integer()]
        while self.at("sym", ","):
            self.take()
            vals.append(self.integer())
        self.take("sym", close)
        return tuple(vals)

    # grammar
    def expr(self):
        terms = [self.term()]
        while self.at("sym", "+"):
            self.take()
            terms.append(self.term())
        if len(terms) == 1:
            t = terms[0]
            if isinstance(t, _Pending):
                return DirectSum(((t.node, t.mult),))
            return t
        kids = []
        for t in terms:
            kids.append((t.node, t.mult) if isinstance(t, _Pending) else (t, 1))
        return DirectSum(tuple(kids))

    def term(self):
        items = [self.post()]
        ops = []
        while self.at("sym", "*") or self.at("sym", "#"):
            ops.append(self.take())
            items.append(self.post())
        if not ops:
            return items[0]
        items = [DirectSum(((x.node, x.mult),)) if isinstance(x, _Pending) else x for x in items]
        node = items[0]
        group = [node]
        cur = ops[0]
        for op, it in zip(ops, items[1:]):
            if op != cur:
                node = (Tensor if cur == "*" else BoxTensor)(tuple(group))
                group = [node]
                cur = op
            group.append(it)
        return (Tensor if cur == "*" else BoxTensor)(tuple(group))

    def post(self):
        node = self.primary()
        if self.at("sym", "^"):
            self.take()
            return _Pending(node, self.take("int"))
        return node

    def primary(self):
        kind, val = self.peek()
        if kind == "sym" and val == "(":
            self.take()
            node = self.expr()
            self.take("sym", ")")
            return node
        if kind == "int":
            if val != 0:
                raise DSLError(f"bare integer {val} is not a bundle")
            self.take()
            return Zero()
        if kind != "word":
            raise DSLError(f"unexpected {val!r} in {self.text!r}")
        self.take()
        if val in ("U", "Q"):
            idx = 1
            if self.at("sym", "["):
                self.take()
                idx = self.take("int")
                self.take("sym", "]")
            return Taut(val, idx)
        if val == "O":
            self.take("sym", "(")
            return Line(self.int_list(")"))
        if val == "dual":
            self.take("sym", "(")
            node = self.expr()
            self.take("sym", ")")
            return Dual(node)
        if val in ("wedge", "sym"):
            self.take("sym", "^")
            k = self.take("int")
            self.take("sym", "(")
            node = self.expr()
            self.take("sym", ")")
            return (Wedge if val == "wedge" else Sym)(k, node)
        if val == "S":
            self.take("sym", "[")
            lam = self.int_list("]")
            for x, y in zip(lam, lam[1:]):
                if x < y:
                    raise DSLError(f"S{list(lam)}: partition must be weakly decreasing")
            self.take("sym", "(")
            node = self.expr()
            self.take("sym", ")")
            return SchurApply(lam, node)
        raise DSLError(f"unknown symbol {val!r}")

    def done(self):
        if self.peek()[0] is not None:
            raise DSLError(f"trailing input {self.peek()[1]!r} in {self.text!r}")


def parse(text: str):
    p = _Parser(text)
    node = p.expr()
    p.done()
    return node


_FACTOR = re.compile(r"^\s*(?:P\s*\(\s*(\d+)\s*\)|P(\d+)|Gr\s*\(\s*(\d+)\s*,\s*(\d+)\s*\))\s*$")


def parse_ambient(text: str) -> Ambient:
    text = text.replace("×", " x ")
    facs = []
    for chunk in re.split(r"\s+x\s+|\s*\*\s*", text.strip()):
        m = _FACTOR.match(chunk)
        if not m:
            raise DSLError(f"bad ambient factor {chunk!r}")
        p1, p2, k, n = m.groups()
        if p1 or p2:
            facs.append(GrFactor(1, int(p1 or p2) + 1))
        else:
            try:
                facs.append(GrFactor(int(k), int(n)))
            except ValueError as exc:
                raise DSLError(str(exc)) from exc
    return Ambient(tuple(facs))


def parse_spec(text: str) -> ZeroLocusSpec:
    if "::" not in text:
        return ZeroLocusSpec(parse_ambient(text), Zero())
    amb, expr = text.split("::", 1)
    X = parse_ambient(amb)
    e = parse(expr)
    _check_indices(e, X)
    return ZeroLocusSpec(X, e)


def _check_indices(e, X):
    if isinstance(e, Taut):
        if not 1 <= e.index <= len(X):
            raise DSLError(f"{e.kind}[{e.index}] refers to a missing factor of {X}")
    elif isinstance(e, Line):
        if len(e.degrees) != len(X):
            raise DSLError(f"O{e.degrees} needs {len(X)} degrees on {X}")
    elif isinstance(e, (Dual, Wedge, Sym, SchurApply)):
        _check_indices(e.child, X)
    elif isinstance(e, (Tensor, BoxTensor)):
        for c in e.children:
            _check_indices(c, X)
    elif isinstance(e, DirectSum):
        for c, _ in e.children:
            _check_indices(c, X)


# -- printing normalized bundles ------------------------------------------------

def _pair_expr(i, f, a, b):
    """Expression for Sigma_a U_i^dual (x) Sigma_b Q_i with a, b proper, no twist."""
    parts = []
    if any(a):
        lam = tuple(x for x in a if x)
        base = Dual(Taut("U", i))
        parts.append(_schur_node(lam, base, f.k))
    if any(b):
        lam = tuple(x for x in b if x)
        parts.append(_schur_node(lam, Taut("Q", i), f.q))
    return parts


def _schur_node(lam, base, r):
    if lam == (1,):
        return base
    if all(x == 1 for x in lam):
        return Wedge(len(lam), base)
    if len(lam) == 1:
        return Sym(lam[0], base)
    return SchurApply(lam, base)


def key_expr(X: Ambient, key):
    """An expression whose normalization is the irreducible `key`."""
    degs = []
    parts = []
    for i, (f, (a, b)) in enumerate(zip(X.factors, key), start=1):
        t = b[-1]
        degs.append(t)
        b0 = tuple(x - t for x in b)
        parts.extend(_pair_expr(i, f, a, b0))
    if any(degs):
        parts.append(Line(tuple(degs)))
    if not parts:
        return Line(tuple(degs))
    if len(parts) == 1:
        return parts[0]
    return Tensor(tuple(parts))


def bundle_expr(B: Bundle):
    """An expression for a normalized bundle (summands in sorted order)."""
    if B.is_zero():
        return Zero()
    items = [(key_expr(B.ambient, k), m) for k, m in sorted(B.terms.items(), reverse=True)]
    if len(items) == 1 and items[0][1] == 1:
        return items[0][0]
    return DirectSum(tuple(items))


def bundle_string(B: Bundle) -> str:
    return to_string(bundle_expr(B))
