"""Homogeneous bundles on products of Grassmannians.

A normalized bundle is a multiset of irreducible summands.  On a factor
Gr(k, n) an irreducible is a pair (a, b): `a` is a GL(k) weight applied to
U^dual and `b` a GL(n-k) weight applied to Q.  Since det U^dual = det Q = O(1)
the pair is stored with min(a) = 0.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

from . import symfunc as sf


# -- ambient spaces ----------------------------------------------------------

@dataclass(frozen=True)
class GrFactor:
    k: int
    n: int

    def __post_init__(self):
        if not 1 <= self.k < self.n:
            raise ValueError(f"invalid Grassmannian Gr({self.k},{self.n})")

    @property
    def dim(self) -> int:
        return self.k * (self.n - self.k)

    @property
    def q(self) -> int:
        return self.n - self.k

    def __str__(self):
        if self.k == 1:
            return f"P({self.n - 1})"
        return f"Gr({self.k},{self.n})"


@dataclass(frozen=True)
class Ambient:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def dim(self) -> int:
        return sum(f.dim for f in self.factors)

    @property
    def picard_rank(self) -> int:
        return len(self.factors)

    def __len__(self):
        return len(self.factors)

    def __str__(self):
        return " x ".join(str(f) for f in self.factors)

    def trivial_key(self):
        return tuple(_trivial_pair(f.k, f.n) for f in self.factors)


def projective(m: int) -> GrFactor:
    return GrFactor(1, m + 1)


def canonical(X: Ambient) -> tuple:
    """Degrees of K_X: O(-n_1, ..., -n_m)."""
    return tuple(-f.n for f in X.factors)


# -- per-factor weight pairs -------------------------------------------------

def _trivial_pair(k, n):
    return ((0,) * k, (0,) * (n - k))


def canonical_pair(a, b):
    c = a[-1]
    if c == 0:
        return (tuple(a), tuple(b))
    return (tuple(x - c for x in a), tuple(x + c for x in b))


def _dual_pair(p):
    a, b = p
    return canonical_pair(tuple(-x for x in reversed(a)), tuple(-x for x in reversed(b)))


def pair_rank(p) -> int:
    a, b = p
    return sf.schur_dim(a, len(a)) * sf.schur_dim(b, len(b))


def _is_scalar(p) -> bool:
    a, b = p
    return a[0] == a[-1] and (not b or b[0] == b[-1])


@lru_cache(maxsize=None)
def _gl_tensor(u, v):
    r = len(u)
    su, sv = u[-1], v[-1]
    out = {}
    for nu, c in sf.lr(tuple(x - su for x in u), tuple(x - sv for x in v), max_rows=r).items():
        nu = tuple(nu) + (0,) * (r - len(nu))
        out[tuple(x + su + sv for x in nu)] = c
    return out


@lru_cache(maxsize=None)
def pair_tensor(p1, p2) -> dict:
    """Decompose the tensor product of two irreducibles on one factor."""
    (a1, b1), (a2, b2) = p1, p2
    out = Counter()
    bs = _gl_tensor(b1, b2) if b1 else {(): 1}
    for a, ca in _gl_tensor(a1, a2).items():
        for b, cb in bs.items():
            out[canonical_pair(a, b)] += ca * cb
    return dict(out)


@lru_cache(maxsize=None)
def pair_bbw(p):
    """(degree, dimension) of the only nonzero cohomology, or None."""
    a, b = p
    n = len(a) + len(b)
    w = a + tuple(-x for x in reversed(b))
    v = [w[i] + n - 1 - i for i in range(n)]
    if len(set(v)) < n:
        return None
    inv = sum(1 for i in range(n) for j in range(i + 1, n) if v[i] < v[j])
    srt = sorted(v, reverse=True)
    lam = tuple(srt[i] - (n - 1 - i) for i in range(n))
    return inv, sf.schur_dim(lam, n)


# -- normalized bundles -------------------------------------------------------

@dataclass(frozen=True)
class IrreducibleSummand:
    weights: tuple  # per factor (a, b)
    multiplicity: int = 1

    @property
    def rank(self) -> int:
        r = 1
        for p in self.weights:
            r *= pair_rank(p)
        return r


class Bundle:
    """A completely reducible homogeneous bundle: {key: multiplicity}."""

    __slots__ = ("ambient", "terms")

    def __init__(self, ambient: Ambient, terms=None):
        self.ambient = ambient
        t = {}
        if terms:
            for k, m in terms.items():
                if m:
                    t[k] = t.get(k, 0) + m
        self.terms = {k: m for k, m in t.items() if m}
        for m in self.terms.values():
            if m < 0:
                raise ValueError("negative multiplicity")

    # constructors
    @classmethod
    def zero(cls, X):
        return cls(X)

    @classmethod
    def trivial(cls, X, mult=1):
        return cls(X, {X.trivial_key(): mult})

    @classmethod
    def line(cls, X, degrees):
        degrees = tuple(degrees)
        if len(degrees) != len(X):
            raise ValueError(f"O{degrees} needs {len(X)} degrees")
        key = tuple(((0,) * f.k, (t,) * f.q) for f, t in zip(X.factors, degrees))
        return cls(X, {key: 1})

    @classmethod
    def taut_dual(cls, X, i):
        """U_i^dual (0-based factor index)."""
        key = list(X.trivial_key())
        f = X.factors[i]
        key[i] = ((1,) + (0,) * (f.k - 1), (0,) * f.q)
        return cls(X, {tuple(key): 1})

    @classmethod
    def quotient(cls, X, i):
        key = list(X.trivial_key())
        f = X.factors[i]
        key[i] = ((0,) * f.k, (1,) + (0,) * (f.q - 1))
        return cls(X, {tuple(key): 1})

    @classmethod
    def from_pairs(cls, X, pairs, mult=1):
        key = tuple(canonical_pair(tuple(a), tuple(b)) for a, b in pairs)
        return cls(X, {key: mult})

    # basic structure
    def __eq__(self, other):
        return isinstance(other, Bundle) and self.ambient == other.ambient and self.terms == other.terms

    def __hash__(self):
        return hash((self.ambient, frozenset(self.terms.items())))

    def __repr__(self):
        return f"Bundle({self.ambient}, {self.terms})"

    def is_zero(self):
        return not self.terms

    @property
    def rank(self) -> int:
        return sum(m * key_rank(k) for k, m in self.terms.items())

    def summands(self):
        return [IrreducibleSummand(k, m) for k, m in sorted(self.terms.items())]

    def __add__(self, other):
        _same(self, other)
        t = Counter(self.terms)
        t.update(other.terms)
        return Bundle(self.ambient, t)

    def scale(self, m: int):
        return Bundle(self.ambient, {k: v * m for k, v in self.terms.items()})

    def dual(self):
        return Bundle(self.ambient, _accumulate((key_dual(k), m) for k, m in self.terms.items()))

    def __mul__(self, other):
        return self.tensor(other)

    def tensor(self, other):
        _same(self, other)
        out = Counter()
        for k1, m1 in self.terms.items():
            for k2, m2 in other.terms.items():
                for k, c in key_tensor(k1, k2).items():
                    out[k] += c * m1 * m2
        return Bundle(self.ambient, out)

    def twist(self, degrees):
        return self.tensor(Bundle.line(self.ambient, degrees))

    def wedge(self, k: int):
        return _power(self, k, key_wedge)

    def sym(self, k: int):
        return _power(self, k, key_sym)

    def schur(self, lam):
        lam = sf.strip(sf.as_partition(lam))
        if not lam:
            return Bundle.trivial(self.ambient)
        if not self.terms:
            return Bundle.zero(self.ambient)
        ch = bundle_char(self)
        return _from_char(self.ambient, sf.char_schur(ch, lam))

    def det_degrees(self):
        """First Chern class degrees (c_1 as multiples of each factor's sigma_1)."""
        out = [0] * len(self.ambient)
        for key, m in self.terms.items():
            r = key_rank(key)
            for i, (a, b) in enumerate(key):
                ra = sf.schur_dim(a, len(a))
                rb = sf.schur_dim(b, len(b)) if b else 1
                rest = r // (ra * rb)
                # c1 of Sigma_a U^dual (x) Sigma_b Q = (|a| rb / k + |b| ra / q) * sigma_1
                ka, kb = len(a), len(b)
                c1 = sum(a) * ra * rb // ka + (sum(b) * ra * rb // kb if kb else 0)
                out[i] += m * rest * c1
        return tuple(out)

    def cohomology(self):
        return cohomology_of(self)


def _same(x, y):
    if x.ambient != y.ambient:
        raise ValueError("ambient mismatch")


def _accumulate(items):
    out = Counter()
    for k, m in items:
        out[k] += m
    return out


@lru_cache(maxsize=None)
def key_rank(key) -> int:
    r = 1
    for p in key:
        r *= pair_rank(p)
    return r


@lru_cache(maxsize=None)
def key_dual(key):
    return tuple(_dual_pair(p) for p in key)


@lru_cache(maxsize=None)
def key_tensor(k1, k2) -> dict:
    per = [pair_tensor(p1, p2) for p1, p2 in zip(k1, k2)]
    out = Counter()
    for combo in product(*[list(d.items()) for d in per]):
        c = 1
        for _, x in combo:
            c *= x
        out[tuple(p for p, _ in combo)] += c
    return dict(out)


def _blocks(X):
    out = []
    for f in X.factors:
        out.extend([f.k, f.q])
    return tuple(out)


def key_char(key, factors=None) -> dict:
    """Joint character over the selected factors (all by default)."""
    parts = []
    idx = range(len(key)) if factors is None else factors
    for i in idx:
        a, b = key[i]
        parts.append(a)
        if b:
            parts.append(b)
    return sf.product_char(tuple(parts))


def bundle_char(B: Bundle) -> dict:
    out = Counter()
    for key, m in B.terms.items():
        for w, c in key_char(key).items():
            out[w] += m * c
    return dict(out)


def _parts_to_key(X, parts):
    key = []
    pos = 0
    for f in X.factors:
        a = parts[pos]
        pos += 1
        b = parts[pos]
        pos += 1
        key.append(canonical_pair(tuple(a), tuple(b)))
    return tuple(key)


def _from_char(X, ch):
    dec = sf.decompose(ch, _blocks(X))
    return Bundle(X, _accumulate((_parts_to_key(X, parts), m) for parts, m in dec.items()))


def _split_scalar(key):
    """Split off the rank-one factors: returns (line degrees, key with those
    factors trivialized)."""
    degs = []
    rest = []
    for a, b in key:
        if _is_scalar((a, b)):
            # a is zero after canonicalization, b constant
            degs.append(b[0] if b else a[0])
            rest.append(((0,) * len(a), (0,) * len(b)))
        else:
            degs.append(0)
            rest.append((a, b))
    return tuple(degs), tuple(rest)


def _scale_line(key, degs, j):
    out = []
    for (a, b), t in zip(key, degs):
        out.append(canonical_pair(a, tuple(x + j * t for x in b)) if b else canonical_pair(tuple(x + j * t for x in a), b))
    return tuple(out)


def _single_factor_power(key, i, k, kind):
    """wedge^k or Sym^k of an irreducible supported on factor i, by characters."""
    a, b = key[i]
    parts = (a, b) if b else (a,)
    ch = sf.product_char(parts)
    pw = sf.char_wedge(ch, k) if kind == "wedge" else sf.char_sym(ch, k)
    blocks = (len(a), len(b)) if b else (len(a),)
    dec = sf.decompose(pw, blocks)
    out = Counter()
    for ps, m in dec.items():
        pa = ps[0]
        pb = ps[1] if b else ()
        new = list(key)
        new[i] = canonical_pair(pa, pb)
        out[tuple(new)] += m
    return out


def _schur_on(key, idx, lam):
    """S_lam of the irreducible restricted to factors idx (others trivial)."""
    parts_blocks = []
    for i in idx:
        a, b = key[i]
        parts_blocks.append(len(a))
        if b:
            parts_blocks.append(len(b))
    ch = key_char(key, idx)
    dec = sf.decompose(sf.char_schur(ch, lam), tuple(parts_blocks))
    out = Counter()
    for ps, m in dec.items():
        new = [((0,) * len(a), (0,) * len(b)) for a, b in key]
        pos = 0
        for i in idx:
            a, b = key[i]
            pa = ps[pos]
            pos += 1
            pb = ()
            if b:
                pb = ps[pos]
                pos += 1
            new[i] = canonical_pair(pa, pb)
        out[tuple(new)] += m
    return out


@lru_cache(maxsize=None)
def _key_power(key, k, kind):
    if k == 0:
        return {tuple(((0,) * len(a), (0,) * len(b)) for a, b in key): 1}
    degs, core = _split_scalar(key)
    live = [i for i, p in enumerate(core) if not _is_scalar(p)]
    if kind == "wedge" and k > key_rank(key):
        return {}
    if not live:
        res = {core: 1} if (kind == "sym" or k <= 1) else {}
    elif len(live) == 1:
        res = _single_factor_power(core, live[0], k, kind)
    else:
        # Cauchy: split off the first live factor
        first, rest = live[:1], live[1:]
        pairs = sf.cauchy_wedge(k) if kind == "wedge" else sf.cauchy_sym(k)
        res = Counter()
        for lam, mu in pairs:
            A = _schur_on(core, first, lam)
            B = _schur_on(core, rest, mu)
            for ka, ma in A.items():
                for kb, mb in B.items():
                    merged = tuple(ka[i] if i in first else kb[i] for i in range(len(core)))
                    res[merged] += ma * mb
    out = Counter()
    for kk, m in res.items():
        out[_scale_line(kk, degs, k)] += m
    return dict(out)


def key_wedge(key, k):
    return _key_power(key, k, "wedge")


def key_sym(key, k):
    return _key_power(key, k, "sym")


def _power(B: Bundle, k: int, fn):
    X = B.ambient
    if k < 0:
        raise ValueError("negative degree")
    one = {X.trivial_key(): 1}
    acc = [dict(one)] + [{} for _ in range(k)]
    for key, m in sorted(B.terms.items()):
        pw = [fn(key, j) for j in range(k + 1)]
        for _ in range(m):
            nxt = [Counter() for _ in range(k + 1)]
            for i in range(k + 1):
                if not acc[i]:
                    continue
                for j in range(k + 1 - i):
                    if not pw[j]:
                        continue
                    for k1, m1 in acc[i].items():
                        for k2, m2 in pw[j].items():
                            for kk, c in key_tensor(k1, k2).items():
                                nxt[i + j][kk] += c * m1 * m2
            acc = [dict(x) for x in nxt]
    return Bundle(X, acc[k])


def power_series(B: Bundle, kmax: int, kind: str):
    """[wedge^0 B, ..., wedge^kmax B] (or Sym) in one pass."""
    X = B.ambient
    fn = key_wedge if kind == "wedge" else key_sym
    acc = [{X.trivial_key(): 1}] + [{} for _ in range(kmax)]
    for key, m in sorted(B.terms.items()):
        pw = [fn(key, j) for j in range(kmax + 1)]
        for _ in range(m):
            nxt = [Counter() for _ in range(kmax + 1)]
            for i in range(kmax + 1):
                if not acc[i]:
                    continue
                for j in range(kmax + 1 - i):
                    if not pw[j]:
                        continue
                    for k1, m1 in acc[i].items():
                        for k2, m2 in pw[j].items():
                            for kk, c in key_tensor(k1, k2).items():
                                nxt[i + j][kk] += c * m1 * m2
            acc = [dict(x) for x in nxt]
    return [Bundle(X, a) for a in acc]


# -- cohomology ----------------------------------------------------------------

class CohomologyTable:
    """h^q for q = 0..dim, stored sparsely."""

    __slots__ = ("h",)

    def __init__(self, h=None):
        self.h = {q: v for q, v in (h or {}).items() if v}

    def __getitem__(self, q):
        return self.h.get(q, 0)

    def __eq__(self, other):
        return isinstance(other, CohomologyTable) and self.h == other.h

    def __repr__(self):
        return f"CohomologyTable({dict(sorted(self.h.items()))})"

    def euler(self) -> int:
        return sum((-1) ** q * v for q, v in self.h.items())

    def degrees(self):
        return sorted(self.h)

    def as_list(self, top):
        return [self[q] for q in range(top + 1)]


def _poly_mul(p1, p2):
    out = Counter()
    for d1, v1 in p1.items():
        for d2, v2 in p2.items():
            out[d1 + d2] += v1 * v2
    return out


@lru_cache(maxsize=None)
def key_bbw(key):
    deg, dim = 0, 1
    for p in key:
        r = pair_bbw(p)
        if r is None:
            return None
        deg += r[0]
        dim *= r[1]
    return deg, dim


def bbw(X: Ambient, s: IrreducibleSummand) -> CohomologyTable:
    """Cohomology of one irreducible summand (Kunneth over factors)."""
    r = key_bbw(s.weights)
    if r is None:
        return CohomologyTable()
    return CohomologyTable({r[0]: r[1] * s.multiplicity})


def cohomology_of(B: Bundle) -> CohomologyTable:
    out = Counter()
    for key, m in B.terms.items():
        r = key_bbw(key)
        if r is not None:
            out[r[0]] += r[1] * m
    return CohomologyTable(out)


@lru_cache(maxsize=None)
def _pair_tensor_poly(p1, p2):
    out = Counter()
    for p, c in pair_tensor(p1, p2).items():
        r = pair_bbw(p)
        if r is not None:
            out[r[0]] += r[1] * c
    return tuple(sorted(out.items()))


def tensor_cohomology(A: Bundle, B: Bundle) -> CohomologyTable:
    """H^*(A (x) B) without expanding the full tensor product."""
    _same(A, B)
    total = Counter()
    for k1, m1 in A.terms.items():
        for k2, m2 in B.terms.items():
            poly = {0: m1 * m2}
            for p1, p2 in zip(k1, k2):
                fp = _pair_tensor_poly(p1, p2)
                if not fp:
                    poly = None
                    break
                poly = _poly_mul(poly, dict(fp))
            if poly:
                total.update(poly)
    return CohomologyTable(total)


def is_globally_generated(B: Bundle):
    """(flag, note). An irreducible summand is globally generated exactly when
    its weight is dominant for the whole group, i.e. min(b) >= 0 once min(a) = 0."""
    for key in B.terms:
        for i, (a, b) in enumerate(key):
            if b and b[-1] < 0:
                return False, f"summand {key} has a non-dominant weight on factor {i + 1}"
    return True, "every summand has a dominant weight"
