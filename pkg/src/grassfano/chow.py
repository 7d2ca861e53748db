"""Chow rings of products of Grassmannians in the Schubert basis.

Classes are sparse dicts {tuple of partitions: Fraction}.  Products use
factorwise Littlewood-Richardson with the k x (n-k) box truncation.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import factorial

from . import symfunc as sf
from .bundles import Ambient, Bundle, canonical_pair, key_rank


class ChowClass:
    __slots__ = ("X", "c")

    def __init__(self, X: Ambient, coeffs=None):
        self.X = X
        self.c = {k: Fraction(v) for k, v in (coeffs or {}).items() if v}

    def __repr__(self):
        items = ", ".join(f"{_label(k)}: {v}" for k, v in sorted(self.c.items(), key=lambda kv: (_deg(kv[0]), kv[0])))
        return f"ChowClass({{{items}}})"

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ChowClass.scalar(self.X, other)
        return isinstance(other, ChowClass) and self.X == other.X and self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    @classmethod
    def scalar(cls, X, v):
        return cls(X, {_empty(X): v})

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ChowClass.scalar(self.X, other)
        _check(self, other)
        out = dict(self.c)
        for k, v in other.c.items():
            out[k] = out.get(k, 0) + v
        return ChowClass(self.X, out)

    __radd__ = __add__

    def __neg__(self):
        return ChowClass(self.X, {k: -v for k, v in self.c.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ChowClass(self.X, {k: v * other for k, v in self.c.items()})
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, x):
        return ChowClass(self.X, {k: v / x for k, v in self.c.items()})

    def part(self, d: int):
        return ChowClass(self.X, {k: v for k, v in self.c.items() if _deg(k) == d})

    def truncate(self, d: int):
        return ChowClass(self.X, {k: v for k, v in self.c.items() if _deg(k) <= d})

    def constant(self):
        return self.c.get(_empty(self.X), Fraction(0))

    def degrees(self):
        return sorted({_deg(k) for k in self.c})

    def is_integral(self):
        return all(v.denominator == 1 for v in self.c.values())

    def to_json(self):
        return {_label(k): str(v) for k, v in sorted(self.c.items(), key=lambda kv: (_deg(kv[0]), kv[0]))}


def _label(key):
    return "x".join("s" + ("".join(str(x) for x in p) if p and max(p) < 10 else ",".join(map(str, p))) if p else "1"
                    for p in key)


def _deg(key):
    return sum(sum(p) for p in key)


def _empty(X):
    return tuple(() for _ in X.factors)


def _check(a, b):
    if a.X != b.X:
        raise ValueError("ambient mismatch")


@lru_cache(maxsize=None)
def _key_mul(k1, k2, boxes):
    per = []
    for p1, p2, (k, q) in zip(k1, k2, boxes):
        if not p1:
            per.append({p2: 1})
        elif not p2:
            per.append({p1: 1})
        else:
            r = sf.lr(p1, p2, max_rows=k, max_cols=q)
            if not r:
                return ()
            per.append(r)
    out = [((), 1)]
    for d in per:
        out = [(key + (p,), c * m) for key, c in out for p, m in d.items()]
    return tuple(out)


def _boxes(X):
    return tuple((f.k, f.q) for f in X.factors)


def mul(a: ChowClass, b: ChowClass, trunc: int | None = None) -> ChowClass:
    _check(a, b)
    boxes = _boxes(a.X)
    top = a.X.dim if trunc is None else trunc
    out = defaultdict(Fraction)
    bd = [(k, v, _deg(k)) for k, v in b.c.items()]
    for k1, v1 in a.c.items():
        d1 = _deg(k1)
        for k2, v2, d2 in bd:
            if d1 + d2 > top:
                continue
            for k, c in _key_mul(k1, k2, boxes):
                out[k] += c * v1 * v2
    return ChowClass(a.X, out)


def _complement(p, k, q):
    p = tuple(p) + (0,) * (k - len(p))
    return sf.strip(tuple(q - p[k - 1 - i] for i in range(k)))


def top_key(X):
    return tuple(sf.strip((f.q,) * f.k) for f in X.factors)


def integrate(X: Ambient, a: ChowClass) -> Fraction:
    if a.X != X:
        raise ValueError("ambient mismatch")
    return a.c.get(top_key(X), Fraction(0))


def pair(a: ChowClass, b: ChowClass) -> Fraction:
    """Integral of a*b, using the Poincare duality of the Schubert basis."""
    _check(a, b)
    X = a.X
    tot = Fraction(0)
    for k, v in a.c.items():
        comp = tuple(_complement(p, f.k, f.q) for p, f in zip(k, X.factors))
        w = b.c.get(comp)
        if w:
            tot += v * w
    return tot


# -- basic classes -------------------------------------------------------------

def schubert(X: Ambient, i: int, lam) -> ChowClass:
    key = list(_empty(X))
    key[i] = sf.strip(tuple(lam))
    return ChowClass(X, {tuple(key): 1})


def sigma1(X, i):
    return schubert(X, i, (1,))


def hyperplane(X, degrees) -> ChowClass:
    """sum_i d_i sigma_1 on factor i."""
    out = ChowClass(X)
    for i, d in enumerate(degrees):
        if d:
            out = out + sigma1(X, i) * d
    return out


def power(a: ChowClass, n: int, trunc=None) -> ChowClass:
    out = ChowClass.scalar(a.X, 1)
    for _ in range(n):
        out = mul(out, a, trunc)
    return out


def exp_class(a: ChowClass, trunc=None) -> ChowClass:
    """exp of a class with no constant term."""
    X = a.X
    top = X.dim if trunc is None else trunc
    out = ChowClass.scalar(X, 1)
    term = ChowClass.scalar(X, 1)
    for n in range(1, top + 1):
        term = mul(term, a, top) * Fraction(1, n)
        if not term.c:
            break
        out = out + term
    return out


# -- Newton identities ---------------------------------------------------------

def _power_sums_from_elementary(e, top):
    """e[0..]: homogeneous elementary classes (e[0] = 1). Returns p[1..top]."""
    X = e[0].X
    zero = ChowClass(X)
    get = lambda i: e[i] if i < len(e) else zero
    p = [None]
    for m in range(1, top + 1):
        acc = get(m) * ((-1) ** (m - 1) * m)
        for j in range(1, m):
            ej = get(j)
            if ej.c:
                acc = acc + mul(ej, p[m - j]) * (-1) ** (j - 1)
        p.append(acc)
    return p


def _elementary_from_power_sums(p, top, rank=None):
    X = p[1].X if len(p) > 1 else None
    e = [ChowClass.scalar(X, 1)]
    for m in range(1, top + 1):
        acc = ChowClass(X)
        for j in range(1, m + 1):
            if j < len(p) and p[j].c and e[m - j].c:
                acc = acc + mul(p[j], e[m - j]) * (-1) ** (j - 1)
        e.append(acc * Fraction(1, m))
    return e


@lru_cache(maxsize=None)
def _taut_ch(X: Ambient, i: int, kind: str):
    """Homogeneous pieces ch_0..ch_dim of U_i^dual ('U') or Q_i ('Q')."""
    f = X.factors[i]
    top = X.dim
    r = f.k if kind == "U" else f.q
    e = [ChowClass.scalar(X, 1)]
    for s in range(1, min(r, f.dim) + 1):
        lam = (1,) * s if kind == "U" else (s,)
        e.append(schubert(X, i, lam))
    p = _power_sums_from_elementary(e, min(top, f.dim))
    out = [ChowClass.scalar(X, r)]
    for j in range(1, min(top, f.dim) + 1):
        out.append(p[j] * Fraction(1, factorial(j)))
    return tuple(out)


def _as_total(parts):
    X = parts[0].X
    out = ChowClass(X)
    for p in parts:
        out = out + p
    return out


def _adams(parts, j):
    """ch of the j-th Adams operation applied to a class given by pieces."""
    X = parts[0].X
    out = ChowClass(X)
    for i, p in enumerate(parts):
        out = out + p * (j ** i)
    return out


def _sym_powers(ch_total, m, trunc):
    """[ch Sym^0, ..., ch Sym^m] from ch V (as pieces)."""
    X = ch_total[0].X
    h = [ChowClass.scalar(X, 1)]
    psi = [None] + [_adams(ch_total, j) for j in range(1, m + 1)]
    for n in range(1, m + 1):
        acc = ChowClass(X)
        for j in range(1, n + 1):
            acc = acc + mul(psi[j], h[n - j], trunc)
        h.append(acc * Fraction(1, n))
    return h


def _wedge_powers(ch_total, m, trunc):
    X = ch_total[0].X
    e = [ChowClass.scalar(X, 1)]
    psi = [None] + [_adams(ch_total, j) for j in range(1, m + 1)]
    for n in range(1, m + 1):
        acc = ChowClass(X)
        for j in range(1, n + 1):
            acc = acc + mul(psi[j], e[n - j], trunc) * (-1) ** (j - 1)
        e.append(acc * Fraction(1, n))
    return e


def _det(mat, trunc):
    n = len(mat)
    X = mat[0][0].X
    out = ChowClass(X)
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = ChowClass.scalar(X, sign)
        for i in range(n):
            term = mul(term, mat[i][perm[i]], trunc)
            if not term.c:
                break
        out = out + term
    return out


def _schur_ch(pieces, lam, trunc):
    """ch of Sigma_lam V from ch V via Jacobi-Trudi (or its dual form)."""
    lam = sf.strip(lam)
    X = pieces[0].X
    if not lam:
        return ChowClass.scalar(X, 1)
    conj = sf.conjugate(lam)
    zero = ChowClass(X)
    if len(conj) < len(lam):
        use, base = conj, _wedge_powers(pieces, conj[0] + len(conj), trunc)
    else:
        use, base = lam, _sym_powers(pieces, lam[0] + len(lam), trunc)
    n = len(use)
    get = lambda m: base[m] if 0 <= m < len(base) else zero
    mat = [[get(use[i] - i + j) for j in range(n)] for i in range(n)]
    return _det(mat, trunc)


@lru_cache(maxsize=None)
def _pair_ch(X: Ambient, i: int, pair, trunc):
    a, b = pair
    t = b[-1]
    b0 = tuple(x - t for x in b)
    chU = _taut_ch(X, i, "U")
    chQ = _taut_ch(X, i, "Q")
    out = mul(_schur_ch(chU, a, trunc), _schur_ch(chQ, b0, trunc), trunc)
    if t:
        out = mul(out, exp_class(sigma1(X, i) * t, trunc), trunc)
    return out


@lru_cache(maxsize=None)
def key_ch(X: Ambient, key, trunc):
    out = ChowClass.scalar(X, 1)
    for i, p in enumerate(key):
        if all(x == 0 for x in p[0]) and all(x == 0 for x in p[1]):
            continue
        out = mul(out, _pair_ch(X, i, p, trunc), trunc)
    return out


def ch_bundle(B: Bundle, trunc=None) -> ChowClass:
    X = B.ambient
    top = X.dim if trunc is None else trunc
    out = defaultdict(Fraction)
    for key, m in B.terms.items():
        for k, v in key_ch(X, key, top).c.items():
            out[k] += m * v
    return ChowClass(X, out)


def pieces(a: ChowClass, top):
    return [a.part(j) for j in range(top + 1)]


def chern_from_ch(chc: ChowClass, top=None) -> ChowClass:
    """Total Chern class from a Chern character (integrality asserted)."""
    X = chc.X
    top = X.dim if top is None else top
    p = [None] + [chc.part(j) * factorial(j) for j in range(1, top + 1)]
    e = _elementary_from_power_sums(p, top)
    out = _as_total(e)
    if not out.is_integral():
        raise ArithmeticError("non-integral Chern class")
    return out


def ch_from_chern(c: ChowClass, top=None) -> ChowClass:
    """Chern character (without the rank term) from a total Chern class."""
    X = c.X
    top = X.dim if top is None else top
    e = [c.part(j) for j in range(top + 1)]
    p = _power_sums_from_elementary(e, top)
    out = ChowClass(X)
    for j in range(1, top + 1):
        out = out + p[j] * Fraction(1, factorial(j))
    return out


@lru_cache(maxsize=None)
def _todd_log_series(n):
    """Coefficients b_k of log(x / (1 - e^-x)) = sum_k b_k x^k, k = 1..n."""
    # g = (1 - e^-x)/x = sum (-1)^i x^i / (i+1)!
    g = [Fraction((-1) ** i, factorial(i + 1)) for i in range(n + 1)]
    # log g = sum_{m>=1} (-1)^{m+1} (g-1)^m / m ; log(x/(1-e^-x)) = -log g
    u = [Fraction(0)] + g[1:]
    res = [Fraction(0)] * (n + 1)
    pw = [Fraction(1)] + [Fraction(0)] * n
    for m in range(1, n + 1):
        nxt = [Fraction(0)] * (n + 1)
        for i, x in enumerate(pw):
            if x:
                for j in range(1, n + 1 - i):
                    nxt[i + j] += x * u[j]
        pw = nxt
        for i in range(n + 1):
            res[i] += Fraction((-1) ** (m + 1), m) * pw[i]
    return tuple(-x for x in res)


def todd_from_ch(chc: ChowClass, top=None) -> ChowClass:
    X = chc.X
    top = X.dim if top is None else top
    b = _todd_log_series(top)
    s = ChowClass(X)
    for k in range(1, top + 1):
        s = s + chc.part(k) * (b[k] * factorial(k))
    return exp_class(s, top)


# -- tangent bundle, HRR, Gauss-Bonnet -------------------------------------------

def tangent_bundle(X: Ambient) -> Bundle:
    out = Bundle.zero(X)
    for i in range(len(X)):
        out = out + Bundle.taut_dual(X, i).tensor(Bundle.quotient(X, i))
    return out


@lru_cache(maxsize=None)
def ch_tangent(X: Ambient) -> ChowClass:
    out = ChowClass(X)
    for i in range(len(X)):
        u = _as_total(list(_taut_ch(X, i, "U")))
        q = _as_total(list(_taut_ch(X, i, "Q")))
        out = out + mul(u, q)
    return out


@lru_cache(maxsize=None)
def todd(X: Ambient) -> ChowClass:
    return todd_from_ch(ch_tangent(X))


@lru_cache(maxsize=None)
def tangent_chern(X: Ambient) -> ChowClass:
    return chern_from_ch(ch_tangent(X))


def chern_character(X: Ambient, e, d=None) -> ChowClass:
    from .dsl import evaluate
    B = e if isinstance(e, Bundle) else evaluate(e, X)
    return ch_bundle(B, d)


def chern_class(X: Ambient, e) -> ChowClass:
    from .dsl import evaluate
    B = e if isinstance(e, Bundle) else evaluate(e, X)
    return chern_from_ch(ch_bundle(B))


def chi_hrr(X: Ambient, e) -> int:
    from .dsl import evaluate
    B = e if isinstance(e, Bundle) else evaluate(e, X)
    val = pair(ch_bundle(B), todd(X))
    if val.denominator != 1:
        raise ArithmeticError(f"non-integral Euler characteristic {val}")
    return int(val)


def euler_number(X: Ambient) -> int:
    return int(integrate(X, tangent_chern(X).part(X.dim)))
