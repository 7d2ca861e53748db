"""Rewrite rules between presentations: the Grassmann-bundle exchange through
an exact sequence, twist normalization, and recognizers for the Cayley trick
and the flag / blow-up identifications of Q boxtimes U^dual loci.

Identification records are annotations; blow-ups are never built as spaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bundles import Ambient, Bundle, GrFactor, _is_scalar, canonical_pair, key_tensor
from .dsl import ZeroLocusSpec, bundle_expr, bundle_string, evaluate, parse_spec


class RewriteError(ValueError):
    pass


# -- presentations -----------------------------------------------------------------

@dataclass(frozen=True)
class TowerStep:
    """Gr_B(h, fiber), cut by `relative` summands.

    `relative` holds (base_key, (a, b), mult): Sigma_a U_R^dual (x) Sigma_b Q_R
    tensored with the base bundle, written with min(b) = 0 so that det U_R^dual
    is ((1,..,1), (0,..,0)).
    """
    base: ZeroLocusSpec
    rank: int
    fiber: Bundle
    relative: tuple = ()

    @property
    def fiber_rank(self) -> int:
        return self.fiber.rank

    @property
    def dim(self) -> int:
        rel = 0
        for bk, (a, b), m in self.relative:
            rel += m * _rank_of(self.base.ambient, bk) * _pair_rank_raw(a, b)
        return presentation_dim(self.base) + self.rank * (self.fiber_rank - self.rank) - rel

    def normalized(self):
        X = self.base.ambient
        base = f"{X} :: {bundle_string(evaluate(self.base.cutting, X))}"
        acc = {}
        for bk, pair, m in self.relative:
            acc[(bk, pair)] = acc.get((bk, pair), 0) + m
        rel = tuple(sorted((bk, pair, m) for (bk, pair), m in acc.items()))
        return base, self.rank, tuple(sorted(self.fiber.terms.items())), rel

    def __str__(self):
        rel = ""
        if self.relative:
            parts = []
            for bk, (a, b), m in sorted(self.relative):
                parts.append(f"[{bundle_string(Bundle(self.base.ambient, {bk: 1}))}] x R{list(a)}|{list(b)}" + (f"^{m}" if m > 1 else ""))
            rel = " ; relative " + " + ".join(parts)
        return f"Gr_B({self.rank}, {bundle_string(self.fiber)}) over B = {self.base}{rel}"


def _rank_of(X, key):
    return Bundle(X, {key: 1}).rank


def _pair_rank_raw(a, b):
    from .symfunc import schur_dim
    return schur_dim(a, len(a)) * (schur_dim(b, len(b)) if b else 1)


def presentation_dim(p) -> int:
    if isinstance(p, TowerStep):
        return p.dim
    X = p.ambient
    return X.dim - evaluate(p.cutting, X).rank


def _spec(X: Ambient, B: Bundle) -> ZeroLocusSpec:
    return ZeroLocusSpec(X, bundle_expr(B))


def _bundle(spec: ZeroLocusSpec) -> Bundle:
    return evaluate(spec.cutting, spec.ambient)


def _taut_key(X, i):
    """Key of U_i (the tautological subbundle of factor i)."""
    return next(iter(Bundle.taut_dual(X, i).dual().terms))


def _udual_pair(f):
    return canonical_pair((1,) + (0,) * (f.k - 1), (0,) * f.q)


def _quot_key(X, i):
    return next(iter(Bundle.quotient(X, i).terms))


def _b_normal(pair):
    a, b = pair
    if not b:
        return (a, b)
    c = b[-1]
    return (tuple(x + c for x in a), tuple(x - c for x in b))


def _fiber_parts(T: TowerStep):
    """{i: m} with -1 for trivial summands, or None if the fiber is not
    a sum of trivials and tautological subbundles."""
    X = T.base.ambient
    triv = X.trivial_key()
    taut = {_taut_key(X, i): i for i in range(len(X))}
    out = {}
    for key, m in T.fiber.terms.items():
        if key == triv:
            out[-1] = out.get(-1, 0) + m
        elif key in taut:
            out[taut[key]] = out.get(taut[key], 0) + m
        else:
            return None
    return out


# -- the exchange through exact sequences ------------------------------------------

def seq_forward(T: TowerStep) -> ZeroLocusSpec:
    """Gr_B(h, F) with 0 -> F -> O^N -> D -> 0 from Euler sequences becomes
    Z(U_R^dual boxtimes D) inside B x Gr(h, N)."""
    parts = _fiber_parts(T)
    if parts is None:
        raise RewriteError("no matching sequence: fiber is not a sum of trivial and tautological bundles")
    X = T.base.ambient
    N = parts.get(-1, 0) + sum(m * X.factors[i].n for i, m in parts.items() if i >= 0)
    if N <= T.rank:
        raise RewriteError("fiber rank does not exceed the Grassmann rank")
    nf = GrFactor(T.rank, N)
    NX = Ambient(X.factors + (nf,))
    new_triv = ((0,) * nf.k, (0,) * nf.q)
    terms = {}
    for key, m in _bundle(T.base).terms.items():
        terms[key + (new_triv,)] = terms.get(key + (new_triv,), 0) + m
    udual = _udual_pair(nf)
    for i, m in parts.items():
        if i < 0:
            continue
        k = list(NX.trivial_key())
        k[i] = _quot_key(X, i)[i]
        k[-1] = udual
        terms[tuple(k)] = terms.get(tuple(k), 0) + m
    only_trivial = all(i < 0 for i in parts)
    for bk, (a, b), m in T.relative:
        if any(b) and not only_trivial:
            raise RewriteError("relative cut involves Q_R, which is not the restriction of Q of the new factor")
        key = bk + (canonical_pair(tuple(a), tuple(b)),)
        terms[key] = terms.get(key, 0) + m
    return _spec(NX, Bundle(NX, terms))


def seq_backward(spec, factor=None) -> TowerStep:
    """Inverse of seq_forward: the factor Gr(h, N) carrying Q_i boxtimes U^dual
    summands becomes a Grassmann bundle over the remaining factors."""
    if isinstance(spec, str):
        spec = parse_spec(spec)
    X = spec.ambient
    B = _bundle(spec)
    cands = [factor] if factor is not None else list(range(len(X) - 1, -1, -1))
    err = "no U^dual boxtimes D summand matching an Euler sequence"
    for j in cands:
        try:
            return _backward_at(X, B, j)
        except RewriteError as exc:
            err = str(exc)
    raise RewriteError(err)


def _backward_at(X, B, j):
    if len(X) < 2:
        raise RewriteError("need at least two factors")
    fj = X.factors[j]
    triv = X.trivial_key()
    udual = _udual_pair(fj)
    rest = [i for i in range(len(X)) if i != j]
    BX = Ambient(tuple(X.factors[i] for i in rest))
    d_parts, base_terms, relative = {}, {}, []
    used = 0
    for key, m in sorted(B.terms.items()):
        live = [i for i in range(len(X)) if key[i] != triv[i]]
        if j not in live:
            bk = tuple(key[i] for i in rest)
            base_terms[bk] = base_terms.get(bk, 0) + m
            continue
        if key[j] == udual and len(live) == 2:
            i = live[0] if live[1] == j else live[1]
            if key[i] == _quot_key(X, i)[i]:
                # take as many copies as the sequence has room for
                take = min(m, (fj.n - used) // X.factors[i].n)
                if take:
                    d_parts[i] = d_parts.get(i, 0) + take
                    used += take * X.factors[i].n
                if take == m:
                    continue
                m -= take
        relative.append((tuple(key[i] for i in rest), _b_normal(key[j]), m))
    m0 = fj.n - used
    if d_parts and any(any(b) for _, (a, b), _ in relative):
        raise RewriteError("summand involves Q of the relative factor")
    fiber = Bundle.trivial(BX, m0) if m0 else Bundle.zero(BX)
    for i, m in d_parts.items():
        bi = rest.index(i)
        fiber = fiber + Bundle(BX, {_taut_key(BX, bi): m})
    base = _spec(BX, Bundle(BX, base_terms))
    return TowerStep(base, fj.k, fiber, tuple(sorted(relative)))


def apply_seq(p, direction="forward", factor=None):
    if direction == "forward":
        if not isinstance(p, TowerStep):
            raise RewriteError("forward exchange needs a Grassmann-bundle presentation")
        return seq_forward(p)
    if direction == "backward":
        if isinstance(p, TowerStep):
            raise RewriteError("backward exchange needs a zero-locus presentation")
        return seq_backward(p, factor)
    raise RewriteError(f"unknown direction {direction!r}")


# -- twist normalization -------------------------------------------------------------

def _line_degrees(X, key):
    if not all(_is_scalar(p) for p in key):
        return None
    return tuple(b[-1] if b else 0 for _, b in key)


def _line_key(X, degs):
    return next(iter(Bundle.line(X, degs).terms))


def twist_normalize(T: TowerStep) -> TowerStep:
    """Gr_B(h, g (x) F') = Gr_B(h, F') with U_R = g (x) U_R'; a relative summand
    with pair (a, b) gains g^(|b| - |a|)."""
    X = T.base.ambient
    triv = X.trivial_key()
    atoms = {triv} | {_taut_key(X, i) for i in range(len(X))}
    cands = set()
    for key in T.fiber.terms:
        for t in atoms:
            prod = key_tensor(key, next(iter(Bundle(X, {t: 1}).dual().terms)))
            if len(prod) == 1:
                d = _line_degrees(X, next(iter(prod)))
                if d is not None:
                    cands.add(d)
    best = None
    for cand in sorted(cands):
        shifted = T.fiber.twist(tuple(-x for x in cand))
        if not all(k in atoms for k in shifted.terms):
            continue
        score = (shifted.terms.get(triv, 0), not any(cand))
        if best is None or score > best[0]:
            best = (score, cand)
    if best is None:
        raise RewriteError("no common twist: fiber is not g (x) (trivial + tautological)")
    g = best[1]
    if not any(g):
        return T
    fiber = T.fiber.twist(tuple(-x for x in g))
    rel = []
    for bk, (a, b), m in T.relative:
        e = sum(b) - sum(a)
        nk = key_tensor(bk, _line_key(X, tuple(e * x for x in g)))
        rel.append((next(iter(nk)), (a, b), m))
    return TowerStep(T.base, T.rank, fiber, tuple(sorted(rel)))


def relative_det(X: Ambient, base_degrees, h: int, q: int, power=1):
    """(base_key, pair, 1) for O(base_degrees) boxtimes O_R(power), O_R(1) = det U_R^dual."""
    return (_line_key(X, base_degrees), ((power,) * h, (0,) * q), 1)


# -- recognizers -----------------------------------------------------------------

@dataclass
class RewriteStep:
    rule: str
    bindings: dict
    identification: str
    partial: bool = False
    residual: str = ""
    result: object = field(default=None)

    def to_json(self) -> dict:
        out = {"rule": self.rule, "bindings": self.bindings, "identification": self.identification,
               "partial": self.partial, "residual": self.residual}
        if self.result is not None:
            out["result"] = str(self.result)
        return out


def _fname(f: GrFactor) -> str:
    return str(f)


def recognize(p) -> list:
    if isinstance(p, TowerStep):
        return _recognize_tower(p)
    if isinstance(p, str):
        p = parse_spec(p)
    X = p.ambient
    B = _bundle(p)
    triv = X.trivial_key()
    out = []
    for key, m in sorted(B.terms.items()):
        live = [i for i in range(len(X)) if key[i] != triv[i]]
        others = Bundle(X, {k: c for k, c in B.terms.items() if k != key})
        if m > 1:
            others = others + Bundle(X, {key: m - 1})
        residual = bundle_string(others) if not others.is_zero() else ""
        out.extend(_match_cayley(X, key, m, live, others, residual))
        for step in _match_qu(X, key, m, live, residual):
            if step.rule == "flagCor(3)" and residual:
                try:
                    step.result = seq_backward(p, step.bindings["U_factor"] - 1)
                except RewriteError:
                    pass
            out.append(step)
    return out


def _match_cayley(X, key, m, live, others, residual):
    """Z(Q_{P^n} boxtimes L) in P^n x Y is the blow-up of Y along Z(L^(n+1))."""
    out = []
    if m != 1:
        return out
    triv = X.trivial_key()
    for i in live:
        f = X.factors[i]
        if f.k != 1 or key[i] != _quot_key(X, i)[i]:
            continue
        rest = [j for j in live if j != i]
        if not rest or not all(_is_scalar(key[j]) for j in rest):
            continue
        if any(k2[i] != triv[i] for k2 in others.terms):
            continue
        degs = tuple(key[j][1][-1] for j in range(len(X)) if j != i)
        if any(x < 0 for x in degs) or not any(degs):
            continue
        YX = Ambient(tuple(g for j, g in enumerate(X.factors) if j != i))
        L = Bundle.line(YX, degs)
        rest_b = Bundle(YX, {tuple(k2[j] for j in range(len(X)) if j != i): c for k2, c in others.terms.items()})
        center = _spec(YX, rest_b + L.scale(f.n))
        base = _spec(YX, rest_b)
        out.append(RewriteStep(
            "blowPPtX", {"projective_factor": i + 1, "n": f.n - 1, "L": list(degs)},
            f"blow-up of {base} along {center}", False, residual, center))
    return out


def _match_qu(X, key, m, live, residual):
    """Rules for a summand Q_{Gr(k1,n1)} boxtimes U^dual_{Gr(k2,n2)}."""
    out = []
    if m != 1 or len(live) != 2:
        return out
    for i, j in (live, live[::-1]):
        fi, fj = X.factors[i], X.factors[j]
        if key[i] != _quot_key(X, i)[i]:
            continue
        if key[j] != _udual_pair(fj):
            continue
        k1, n1, k2, n2 = fi.k, fi.n, fj.k, fj.n
        b = {"Q_factor": i + 1, "U_factor": j + 1, "k1": k1, "n1": n1, "k2": k2, "n2": n2}
        if n2 == n1 and k2 < k1:
            out.append(RewriteStep("blowFlagGr(1)", b, f"Fl({k2},{k1},{n1})", False, residual))
        if k1 == k2 and n1 == n2 - 1:
            c = str(GrFactor(k1 - 1, n1)) if k1 > 1 else "a point"
            out.append(RewriteStep("blowFlagGr(2)", b,
                                   f"blow-up of {_fname(fj)} along {c} = Z(Q) in {_fname(fj)}", False, residual,
                                   parse_spec(f"{_fname(fj)} :: Q[1]")))
        if k1 == k2 and n2 == n1 + 2:
            out.append(RewriteStep("blowFlagGr(3)", b,
                                   f"outside a point: blow-up of {_fname(fj)} along Z(Q_P({n1 - 1}) # U^dual) in P({n1 - 1}) x {_fname(fj)}",
                                   True, residual,
                                   parse_spec(f"P({n1 - 1}) x {_fname(fj)} :: Q[1] # dual(U[2])")))
        if k2 < k1 < n1 and n2 == n1 - 1:
            out.append(RewriteStep("flagCor(1)", b, f"Z(U_1^dual) in Fl({k2},{k1},{n1})", True, residual))
        if k2 < k1 < n1 and n1 == n2 - 1:
            out.append(RewriteStep("flagCor(2)", b, f"Z(Q_2) in Fl({k2},{k1 + 1},{n2})", True, residual))
        if k1 <= k2 <= k1 + n2 - n1:
            c = n2 - n1
            BX = Ambient((fi,))
            fiber = Bundle(BX, {_taut_key(BX, 0): 1}) + (Bundle.trivial(BX, c) if c else Bundle.zero(BX))
            T = TowerStep(parse_spec(f"{_fname(fi)} :: 0"), k2, fiber)
            out.append(RewriteStep("flagCor(3)", b,
                                   f"Grassmann bundle Gr_B({k2}, U + O^{c}) over B = {_fname(fi)}", False, residual, T))
    return out


def _recognize_tower(T: TowerStep) -> list:
    X = T.base.ambient
    out = []
    parts = _fiber_parts(T)
    if parts is not None:
        try:
            out.append(RewriteStep("seq", {"direction": "forward"}, "Grassmann bundle exchanged through Euler sequences",
                                   False, "", seq_forward(T)))
        except RewriteError:
            pass
    if len(X) != 1:
        return out
    f = X.factors[0]
    terms = T.fiber.terms
    u = _taut_key(X, 0)
    if terms == {u: 1} and T.rank < f.k:
        out.append(RewriteStep("flag2.5", {"k1": T.rank, "k2": f.k, "n": f.n}, f"Fl({T.rank},{f.k},{f.n})"))
    if terms == {u: 1, X.trivial_key(): 1} and T.rank <= f.k:
        out.append(RewriteStep("flag2.5", {"k1": T.rank, "k2": f.k + 1, "n": f.n + 1},
                               f"Z(Q_2) in Fl({T.rank},{f.k + 1},{f.n + 1})"))
    q = _quot_key(X, 0)
    om1 = _line_key(X, (-1,))
    if terms == {q: 1, om1: 1}:
        out.append(RewriteStep("flag2.5", {"k1": f.k, "k2": f.k + T.rank, "n": f.n + 1},
                               f"Z(U_1^dual) in Fl({f.k},{f.k + T.rank},{f.n + 1})"))
    return out
