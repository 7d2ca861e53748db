"""Partition combinatorics over exact integers.

Littlewood-Richardson coefficients, GL(r) dimensions and characters,
Cauchy pairings and exterior/symmetric powers of a single irreducible.
"""

from __future__ import annotations

from collections import Counter
from functools import lru_cache
from math import comb

Partition = tuple


def as_partition(seq) -> tuple:
    """Return `seq` as a tuple, checking that it is weakly decreasing."""
    lam = tuple(int(x) for x in seq)
    for i in range(len(lam) - 1):
        if lam[i] < lam[i + 1]:
            raise ValueError(f"{lam} is not weakly decreasing")
    return lam


def strip(lam) -> tuple:
    """Drop trailing zeros."""
    lam = list(lam)
    while lam and lam[-1] == 0:
        lam.pop()
    return tuple(lam)


def conjugate(lam) -> tuple:
    lam = strip(lam)
    if not lam:
        return ()
    return tuple(sum(1 for x in lam if x > j) for j in range(lam[0]))


def partitions(n: int, max_len: int | None = None, max_part: int | None = None):
    """All partitions of n, largest first."""
    if max_part is None:
        max_part = n

    def rec(rest, bound, length):
        if rest == 0:
            yield ()
            return
        if max_len is not None and length >= max_len:
            return
        for first in range(min(rest, bound), 0, -1):
            for tail in rec(rest - first, first, length + 1):
                yield (first,) + tail

    return list(rec(n, max_part, 0))


def partitions_in_box(rows: int, cols: int, size: int | None = None):
    """Partitions fitting in a rows x cols rectangle (optionally of fixed size)."""
    out = []

    def rec(prefix, bound):
        if len(prefix) == rows:
            out.append(strip(prefix))
            return
        for x in range(bound, -1, -1):
            rec(prefix + (x,), x)

    rec((), cols)
    if size is not None:
        out = [p for p in out if sum(p) == size]
    return out


# -- Littlewood-Richardson ---------------------------------------------------

def _horizontal_strips(shape, count, label, fill, max_rows, max_cols):
    """Add `count` boxes labelled `label` as a horizontal strip, keeping the
    reverse reading word a lattice word.

    `fill[r]` maps row r to a Counter of labels already placed in that row.
    """
    rows = len(shape)
    padded = list(shape) + [0]
    limit = rows + 1
    if max_rows is not None:
        limit = min(limit, max_rows)

    # lattice: (# label in rows <= r) <= (# label-1 in rows < r)
    def rec(r, left, new_shape, new_fill, seen_label, seen_prev):
        if left == 0:
            yield tuple(x for x in new_shape if x > 0), new_fill
            return
        if r >= limit:
            return
        cur = padded[r] if r < len(padded) else 0
        above = padded[r - 1] if r > 0 else (max_cols if max_cols is not None else cur + left)
        if max_cols is not None:
            above = min(above, max_cols)
        room = max(0, above - cur)
        prev_here = new_fill[r].get(label - 1, 0) if r < len(new_fill) else 0
        for add in range(min(room, left), -1, -1):
            if label > 1 and seen_label + add > seen_prev:
                continue
            ns = list(new_shape)
            nf = [Counter(c) for c in new_fill]
            while len(ns) <= r:
                ns.append(0)
                nf.append(Counter())
            ns[r] = cur + add
            if add:
                nf[r][label] += add
            yield from rec(r + 1, left - add, ns, nf, seen_label + add, seen_prev + prev_here)

    yield from rec(0, count, list(shape), [Counter(c) for c in fill], 0, 0)


@lru_cache(maxsize=None)
def _lr(lam, mu, max_rows, max_cols):
    if not mu:
        return {lam: 1}
    if max_rows is not None and len(lam) > max_rows:
        return {}
    if max_cols is not None and lam and lam[0] > max_cols:
        return {}
    states = [(lam, [Counter() for _ in lam])]
    for i, m in enumerate(mu, start=1):
        nxt = []
        for shape, fill in states:
            nxt.extend(_horizontal_strips(shape, m, i, fill, max_rows, max_cols))
        states = nxt
    out = Counter(shape for shape, _ in states)
    return dict(out)


def lr(lam, mu, max_rows: int | None = None, max_cols: int | None = None) -> dict:
    """Littlewood-Richardson product s_lam * s_mu as {nu: c}.

    Optional bounds discard shapes with more rows / longer rows, which is the
    truncation valid for GL(max_rows) or for a Grassmannian box.
    """
    lam, mu = strip(as_partition(lam)), strip(as_partition(mu))
    if any(x < 0 for x in lam + mu):
        raise ValueError("lr needs partitions with nonnegative parts")
    if sum(mu) > sum(lam):
        lam, mu = mu, lam
    return _lr(lam, mu, max_rows, max_cols)


# -- GL(r) dimensions and characters --------------------------------------

def _pad(lam, r):
    lam = as_partition(lam)
    if len(lam) > r:
        if any(lam[r:]):
            raise ValueError(f"rank too small: {lam} at rank {r}")
        lam = lam[:r]
    if len(lam) < r:
        if lam and lam[-1] < 0:
            raise ValueError(f"{lam} has negative parts and length < {r}")
        lam = lam + (0,) * (r - len(lam))
    return lam


@lru_cache(maxsize=None)
def _schur_dim(lam):
    r = len(lam)
    num = den = 1
    for i in range(r):
        for j in range(i + 1, r):
            num *= lam[i] - lam[j] + j - i
            den *= j - i
    return num // den


def schur_dim(lam, r: int) -> int:
    """Weyl dimension of the irreducible GL(r) module of highest weight lam."""
    return _schur_dim(_pad(lam, r))


def _interlacing(lam, n):
    """Partitions mu with at most n parts and lam_1 >= mu_1 >= lam_2 >= ... ."""
    lam = list(lam) + [0] * (n + 1 - len(lam))
    ranges = [range(lam[i + 1], lam[i] + 1) for i in range(n)]

    def rec(i, acc):
        if i == n:
            yield strip(tuple(acc))
            return
        for v in ranges[i]:
            acc.append(v)
            yield from rec(i + 1, acc)
            acc.pop()

    yield from rec(0, [])


def eval_schur(shape, letters) -> Counter:
    """s_shape evaluated on `letters` (weight vectors, repeats allowed).

    Branching: s_lam(x_1..x_n) = sum over mu interlacing lam of
    s_mu(x_1..x_{n-1}) x_n^{|lam| - |mu|}.
    """
    letters = tuple(letters)
    dim = len(letters[0]) if letters else 0
    zero = (0,) * dim
    memo = {}

    def rec(lam, n):
        if len(lam) > n:
            return {}
        if not lam:
            return {zero: 1}
        hit = memo.get((lam, n))
        if hit is not None:
            return hit
        out = Counter()
        x = letters[n - 1]
        size = sum(lam)
        for mu in _interlacing(lam, n - 1):
            sub = rec(mu, n - 1)
            if not sub:
                continue
            c = size - sum(mu)
            shift = tuple(c * t for t in x)
            for w, m in sub.items():
                out[_add(w, shift)] += m
        memo[(lam, n)] = out
        return out

    return Counter(rec(strip(tuple(shape)), len(letters)))


@lru_cache(maxsize=None)
def _gt_weights(lam, n):
    """Weights of s_lam in n variables; the last coordinate peels off one row
    of a Gelfand-Tsetlin pattern."""
    if len(lam) > n:
        return {}
    if n == 0:
        return {(): 1}
    size = sum(lam)
    out = Counter()
    for mu in _interlacing(lam, n - 1):
        c = size - sum(mu)
        for w, m in _gt_weights(mu, n - 1).items():
            out[w + (c,)] += m
    return dict(out)


@lru_cache(maxsize=None)
def _schur_weights(lam):
    r = len(lam)
    shift = min(lam) if lam else 0
    base = tuple(x - shift for x in lam)
    raw = _gt_weights(strip(base), r)
    return {tuple(x + shift for x in w): m for w, m in raw.items()}


def schur_weights(lam, r: int) -> dict:
    """Weight multiset (character) of the GL(r) irreducible with highest weight lam.

    Negative weights are allowed; the determinant twist is factored out.
    """
    return dict(_schur_weights(_pad(lam, r)))


# -- Cauchy ---------------------------------------------------------------

def cauchy_wedge(k: int):
    """Pairs (lam, lam') for lam |- k, indexing wedge^k(A (x) B)."""
    return [(lam, conjugate(lam)) for lam in partitions(k)]


def cauchy_sym(k: int):
    """Pairs (lam, lam) for lam |- k, indexing Sym^k(A (x) B)."""
    return [(lam, lam) for lam in partitions(k)]


# -- characters of tensor constructions -------------------------------------

def _add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def char_wedge(char: dict, k: int) -> dict:
    """k-th exterior power of a nonempty character {weight: multiplicity}."""
    zero = tuple(0 for _ in next(iter(char)))
    layers = [Counter() for _ in range(k + 1)]
    layers[0][zero] = 1
    for w, m in sorted(char.items()):
        for _ in range(m):
            for j in range(k, 0, -1):
                dst = layers[j]
                for v, c in layers[j - 1].items():
                    dst[_add(v, w)] += c
    return dict(layers[k])


def char_sym(char: dict, k: int) -> dict:
    """k-th symmetric power of a nonempty character."""
    zero = tuple(0 for _ in next(iter(char)))
    layers = [Counter() for _ in range(k + 1)]
    layers[0][zero] = 1
    for w, m in sorted(char.items()):
        for _ in range(m):
            for j in range(1, k + 1):
                dst = layers[j]
                for v, c in list(layers[j - 1].items()):
                    dst[_add(v, w)] += c
    return dict(layers[k])


def char_schur(char: dict, lam) -> dict:
    """Schur functor S_lam applied to a character."""
    lam = strip(as_partition(lam))
    letters = []
    for w, m in sorted(char.items(), reverse=True):
        letters.extend([w] * m)
    return dict(eval_schur(lam, letters))


def decompose(char: dict, blocks) -> dict:
    """Split a character of GL(blocks[0]) x GL(blocks[1]) x ... into irreducibles.

    Weights are concatenated block vectors. Returns {tuple of block highest
    weights: multiplicity}. Repeatedly removes the lexicographically largest
    weight, which is always a highest weight of some constituent.
    """
    rest = Counter({w: m for w, m in char.items() if m})
    out = Counter()
    while rest:
        top = max(rest)
        m = rest[top]
        parts = []
        pos = 0
        for r in blocks:
            parts.append(top[pos:pos + r])
            pos += r
        key = tuple(parts)
        for p in parts:
            as_partition(p)
        out[key] += m
        for w, c in product_char(key).items():
            rest[w] -= m * c
            if rest[w] == 0:
                del rest[w]
            elif rest[w] < 0:
                raise ArithmeticError("character is not effective")
    return dict(out)


def product_char(parts) -> dict:
    """Character of the outer tensor product of per-block irreducibles."""
    acc = {(): 1}
    for p in parts:
        ws = _schur_weights(tuple(p)) if p else {(): 1}
        nxt = Counter()
        for u, a in acc.items():
            for v, b in ws.items():
                nxt[u + v] += a * b
        acc = nxt
    return dict(acc)


def plethysm_wedge(lam, r: int, k: int) -> dict:
    """wedge^k of the GL(r) irreducible lam, as {mu: multiplicity}."""
    ch = schur_weights(lam, r)
    if k == 0:
        return {(0,) * r: 1}
    if k > sum(ch.values()):
        return {}
    out = decompose(char_wedge(ch, k), (r,))
    return {key[0]: m for key, m in out.items()}


def plethysm_sym(lam, r: int, k: int) -> dict:
    """Sym^k of the GL(r) irreducible lam."""
    ch = schur_weights(lam, r)
    if k == 0:
        return {(0,) * r: 1}
    out = decompose(char_sym(ch, k), (r,))
    return {key[0]: m for key, m in out.items()}


def multiset_binomial(n: int, k: int) -> int:
    return comb(n + k - 1, k)
