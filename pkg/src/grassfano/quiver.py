"""Quiver flag data: validation, the Grassmann-bundle tower and its flattening
to a zero locus in a product of Grassmannians.

Vertex 0 is the source. Vertex j carries a rank r_j bundle W_j; the step for
j is the Grassmann bundle of rank r_j subspaces in F_j = sum_i W_i^{A[i][j]}
with W_0 = O. Bundle tokens: "0" (trivial), "s[2]w" (Sigma_(2) W^dual, a white
box) and "s[1,1]b" (Sigma_(1,1) W, a black box).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from itertools import permutations

from .bundles import Ambient, Bundle, GrFactor, _is_scalar
from .dsl import ZeroLocusSpec, bundle_expr, bundle_string, parse_spec


class QuiverError(ValueError):
    pass


_TOKEN = re.compile(r"^s\[(\d+(?:\s*,\s*\d+)*)\]([wb])$")


def parse_token(tok: str):
    """'0' -> None, 's[2,1]w' -> ((2, 1), 'w')."""
    tok = tok.strip()
    if tok in ("0", ""):
        return None
    m = _TOKEN.match(tok)
    if not m:
        raise QuiverError(f"bad bundle token {tok!r}")
    lam = tuple(int(x) for x in m.group(1).split(","))
    if any(x < y for x, y in zip(lam, lam[1:])) or lam[-1] <= 0:
        raise QuiverError(f"bad partition in token {tok!r}")
    return lam, m.group(2)


def token_string(tok) -> str:
    if tok is None:
        return "0"
    lam, c = tok
    return f"s[{','.join(map(str, lam))}]{c}"


@dataclass(frozen=True)
class QuiverDatum:
    adjacency: tuple
    dims: tuple
    bundle: tuple = ()  # ((token, ...), mult)
    theta: tuple | None = None

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            A = tuple(tuple(int(x) for x in row) for row in obj["adjacency"])
            r = tuple(int(x) for x in obj["dims"])
        except (KeyError, TypeError, ValueError) as exc:
            raise QuiverError(f"quiver datum needs integer 'adjacency' and 'dims' ({exc})") from exc
        items = []
        for item in obj.get("bundle", []):
            if isinstance(item, dict):
                toks, mult = item.get("tokens", []), int(item.get("mult", 1))
            else:
                toks, mult = item, 1
            items.append((tuple(parse_token(t) for t in toks), mult))
        theta = tuple(obj["theta"]) if obj.get("theta") is not None else None
        return cls(A, r, tuple(items), theta)

    def to_json(self) -> dict:
        out = {"adjacency": [list(r) for r in self.adjacency], "dims": list(self.dims),
               "bundle": [{"tokens": [token_string(t) for t in toks], "mult": m} for toks, m in self.bundle]}
        if self.theta is not None:
            out["theta"] = list(self.theta)
        return out

    @property
    def size(self) -> int:
        return len(self.dims)

    def preds(self, j):
        return [(i, self.adjacency[i][j]) for i in range(self.size) if self.adjacency[i][j]]


def validate(d: QuiverDatum):
    n = len(d.dims)
    if n < 1 or len(d.adjacency) != n or any(len(row) != n for row in d.adjacency):
        raise QuiverError("adjacency must be a square matrix matching dims")
    if any(x < 0 for row in d.adjacency for x in row):
        raise QuiverError("adjacency entries must be nonnegative")
    if d.dims[0] != 1:
        raise QuiverError("r0 = 1 violated")
    if any(r < 1 for r in d.dims):
        raise QuiverError("dims must be positive")
    sources = [j for j in range(n) if not any(d.adjacency[i][j] for i in range(n))]
    if sources != [0]:
        raise QuiverError(f"unique source violated (sources: {sources})")
    topo_order(d)
    for toks, m in d.bundle:
        if len(toks) != n - 1:
            raise QuiverError(f"bundle arity {len(toks)} != {n - 1} non-source vertices")
        if m < 1:
            raise QuiverError("bundle multiplicity must be positive")


def topo_order(d: QuiverDatum) -> list:
    """Smallest-index-first topological order."""
    n = d.size
    done, order = set(), []
    while len(order) < n:
        ready = [j for j in range(n) if j not in done and all(i in done for i, _ in d.preds(j) if i != j)]
        ready = [j for j in ready if not d.adjacency[j][j]]
        if not ready:
            raise QuiverError("acyclic violated")
        order.append(ready[0])
        done.add(ready[0])
    return order


def quiver_dim(d: QuiverDatum) -> int:
    A, r = d.adjacency, d.dims
    n = d.size
    arrows = sum(A[i][j] * r[i] * r[j] for i in range(n) for j in range(n))
    return arrows - sum(x * x for x in r[1:])


# -- tower -------------------------------------------------------------------------

@dataclass(frozen=True)
class TowerStep:
    vertex: int
    rank: int
    fiber: tuple  # ((i, multiplicity), ...)
    fiber_rank: int

    @property
    def dim(self) -> int:
        return self.rank * (self.fiber_rank - self.rank)


@dataclass(frozen=True)
class TowerSpec:
    steps: tuple

    @property
    def dim(self) -> int:
        return sum(s.dim for s in self.steps)


def build_tower(d: QuiverDatum) -> TowerSpec:
    validate(d)
    steps = []
    for j in topo_order(d)[1:]:
        fib = tuple(d.preds(j))
        frank = sum(m * d.dims[i] for i, m in fib)
        if frank < d.dims[j]:
            raise QuiverError(f"empty moduli: vertex {j} needs rank {d.dims[j]} inside rank {frank}")
        steps.append(TowerStep(j, d.dims[j], fib, frank))
    return TowerSpec(tuple(steps))


# -- flattening --------------------------------------------------------------------

@dataclass
class Realization:
    """W_j = (line of degrees `twist`) (x) U of `factor` (or O when factor is None)."""
    factor: int | None
    twist: tuple


@dataclass
class TranslationResult:
    ambient: Ambient
    structural: Bundle
    translated: Bundle
    realization: dict
    tower: TowerSpec
    spec: ZeroLocusSpec = field(default=None)

    @property
    def cutting(self) -> Bundle:
        return self.structural + self.translated

    def dsl(self) -> str:
        return str(self.spec)


def _pad(v, n):
    return tuple(v) + (0,) * (n - len(v))


def flatten(d: QuiverDatum) -> TranslationResult:
    tower = build_tower(d)
    factors = []
    real = {0: Realization(None, ())}
    structural = []  # (i, j): Q_i boxtimes U_j^dual, or raw (key builders)
    for step in tower.steps:
        j = step.vertex
        parts = [(real[i], i, m) for i, m in step.fiber]
        twists = {_pad(r.twist, len(factors)) for r, _, _ in parts}
        if len(twists) != 1:
            raise QuiverError(f"vertex {j}: fiber mixes different line twists; unsupported")
        base_twist = twists.pop()
        # pure line fiber L^N: Gr(r, L^N) = B x Gr(r, N) with W_j = L (x) U
        if all(d.dims[i] == 1 for _, i, _ in parts) and len({r.factor for r, _, _ in parts}) == 1:
            r0 = parts[0][0]
            N = sum(m for _, _, m in parts)
            factors.append(GrFactor(step.rank, N))
            # W_j = L (x) U_new with L = W_i
            tw = list(_pad(r0.twist, len(factors)))
            if r0.factor is not None:
                tw[r0.factor] -= 1
            real[j] = Realization(len(factors) - 1, tuple(tw))
            continue
        # Euler embedding: W_i in O^{N_i} with cokernel Q_i
        N = 0
        for r, i, m in parts:
            N += m * (factors[r.factor].n if r.factor is not None else 1)
        factors.append(GrFactor(step.rank, N))
        new = len(factors) - 1
        for r, i, m in parts:
            if r.factor is not None:
                structural.append((r.factor, new, m))
        real[j] = Realization(new, _pad(base_twist, len(factors)))
    X = Ambient(tuple(factors))
    for v in real.values():
        v.twist = _pad(v.twist, len(X))
    G = Bundle.zero(X)
    for fi, fj, m in structural:
        G = G + Bundle.quotient(X, fi).tensor(Bundle.taut_dual(X, fj)).scale(m)
    res = TranslationResult(X, G, Bundle.zero(X), real, tower)
    res.translated = translate_bundle(d, res)
    res.spec = _reduced_spec(X, res.cutting)
    return res


def _realize(X, r: Realization, dual: bool) -> Bundle:
    """W (or W^dual) on the flattened ambient."""
    if r.factor is None:
        B = Bundle.trivial(X)
    else:
        B = Bundle.taut_dual(X, r.factor)
        if not dual:
            B = B.dual()
    tw = tuple(-t for t in r.twist) if dual else tuple(r.twist)
    return B.twist(tw) if any(tw) else B


def translate_bundle(d: QuiverDatum, res: TranslationResult) -> Bundle:
    X = res.ambient
    out = Bundle.zero(X)
    for toks, m in d.bundle:
        if len(toks) != d.size - 1:
            raise QuiverError("token arity mismatch")
        acc = Bundle.trivial(X)
        for j, tok in enumerate(toks, start=1):
            if tok is None:
                continue
            lam, colour = tok
            W = _realize(X, res.realization[j], dual=(colour == "w"))
            acc = acc.tensor(W.schur(lam))
        out = out + acc.scale(m)
    return out


def _reduced_spec(X: Ambient, B: Bundle) -> ZeroLocusSpec:
    """Let a projective factor absorb hyperplane cuts O(e_i) when it carries
    only line bundles: Z(O(1)) in P^n is P^(n-1)."""
    while True:
        hit = None
        for key, m in sorted(B.terms.items()):
            degs = [b[-1] if b else 0 for _, b in key]
            if not all(_is_scalar(p) for p in key):
                continue
            nz = [i for i, t in enumerate(degs) if t]
            if len(nz) == 1 and degs[nz[0]] == 1 and X.factors[nz[0]].k == 1:
                i = nz[0]
                if all(_is_scalar(k2[i]) for k2 in B.terms):
                    hit = (key, i)
                    break
        if hit is None:
            break
        key, i = hit
        terms = dict(B.terms)
        terms[key] -= 1
        f = X.factors[i]
        keep = f.n - 1 > 1
        factors = list(X.factors)
        if keep:
            factors[i] = GrFactor(1, f.n - 1)
        else:
            del factors[i]
        nX = Ambient(tuple(factors))
        nterms = {}
        for k2, m2 in terms.items():
            if not m2:
                continue
            lst = list(k2)
            a, b = lst[i]
            if keep:
                lst[i] = (a, b[:-1])
            else:
                del lst[i]
            nk = tuple(lst)
            nterms[nk] = nterms.get(nk, 0) + m2
        X, B = nX, Bundle(nX, nterms)
    return parse_spec(f"{X} :: {bundle_string(B)}")


def to_zero_locus(d: QuiverDatum) -> ZeroLocusSpec:
    return flatten(d).spec


# -- comparison up to factor order ----------------------------------------------------

def canonical_form(spec) -> str:
    """Presentation string, minimized over permutations of the ambient factors."""
    from .dsl import evaluate
    if isinstance(spec, str):
        spec = parse_spec(spec)
    X = spec.ambient
    B = evaluate(spec.cutting, X)
    best = None
    for perm in permutations(range(len(X))):
        PX = Ambient(tuple(X.factors[p] for p in perm))
        PB = Bundle(PX, {tuple(k[p] for p in perm): m for k, m in B.terms.items()})
        s = f"{PX} :: {bundle_string(PB)}"
        if best is None or s < best:
            best = s
    return best


def same_presentation(a, b) -> bool:
    return canonical_form(a) == canonical_form(b)
