"""Invariants of the zero locus M = Z(F) of a generic section of F on X."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import factorial

from . import chow
from .bundles import Ambient, Bundle, CohomologyTable, is_globally_generated, power_series, tensor_cohomology
from .chow import ChowClass, ch_bundle, exp_class, mul, pair
from .dsl import ZeroLocusSpec, evaluate, parse_spec, to_string
from .spectral import Inconsistent, SpectralSequence, System


class ExcessError(ValueError):
    pass


class NotGloballyGenerated(ValueError):
    pass


def _bundle(X, e):
    return e if isinstance(e, Bundle) else evaluate(e, X)


def cotangent(X: Ambient) -> Bundle:
    return chow.tangent_bundle(X).dual()


class ZeroLocus:
    """Cached computations for one presentation."""

    def __init__(self, X: Ambient, F, label=None, assume_generic=False):
        self.X = X
        self.F = _bundle(X, F)
        self.label = label
        if self.F.rank > X.dim:
            raise ExcessError(f"rank {self.F.rank} exceeds dim {X.dim}: empty or excess locus")
        ok, note = is_globally_generated(self.F)
        self.waived = not ok
        if not ok and not assume_generic:
            raise NotGloballyGenerated(note + " (pass assume_generic to waive)")

    @classmethod
    def from_spec(cls, spec, assume_generic=False):
        if isinstance(spec, str):
            spec = parse_spec(spec)
        return cls(spec.ambient, spec.cutting, label=str(spec), assume_generic=assume_generic)

    # -- numerical data
    @property
    def dim(self) -> int:
        return self.X.dim - self.F.rank

    @cached_property
    def c1F(self):
        return self.F.det_degrees()

    @property
    def minus_K(self) -> tuple:
        return tuple(f.n - d for f, d in zip(self.X.factors, self.c1F))

    @property
    def is_fano(self) -> bool:
        return all(d > 0 for d in self.minus_K)

    @cached_property
    def chF(self) -> ChowClass:
        return ch_bundle(self.F)

    @cached_property
    def cF(self) -> ChowClass:
        return chow.chern_from_ch(self.chF)

    @cached_property
    def ctop(self) -> ChowClass:
        return self.cF.part(self.F.rank)

    @cached_property
    def koszul_class(self) -> ChowClass:
        """sum_r (-1)^r ch(wedge^r F^dual) td(X) = c_top(F) td(X) / td(F)."""
        X = self.X
        b = chow._todd_log_series(X.dim)
        s = ChowClass(X)
        diff = chow.ch_tangent(X) - self.chF
        for k in range(1, X.dim + 1):
            s = s + diff.part(k) * (b[k] * factorial(k))
        return mul(self.ctop, exp_class(s))

    def koszul_chi(self, e) -> int:
        """chi(M, e|M)."""
        B = _bundle(self.X, e)
        val = pair(ch_bundle(B), self.koszul_class)
        return _integral(val)

    def koszul_chi_terms(self, e) -> int:
        """Same number, summing chi_hrr over the Koszul terms one by one."""
        B = _bundle(self.X, e)
        tot = 0
        for r, W in enumerate(power_series(self.F.dual(), self.F.rank, "wedge")):
            tot += (-1) ** r * chow.chi_hrr(self.X, W.tensor(B))
        return tot

    def koszul_chi_bbw(self, e) -> int:
        """Same number, from Borel-Bott-Weil on every Koszul term."""
        B = _bundle(self.X, e)
        tot = 0
        for r, W in enumerate(self.wedges):
            tot += (-1) ** r * tensor_cohomology(W, B).euler()
        return tot

    @cached_property
    def wedges(self):
        return power_series(self.F.dual(), self.F.rank, "wedge")

    def restricted_cohomology_e1(self, e):
        """{(-r, q - r): h^q(X, wedge^r F^dual (x) e)} for the Koszul pass."""
        B = _bundle(self.X, e)
        out = {}
        for r, W in enumerate(self.wedges):
            for q, v in tensor_cohomology(W, B).h.items():
                out[(-r, q - r)] = v
        return out

    def h0_minus_K(self):
        """(value, note). For Fano loci Kodaira vanishing makes chi = h^0."""
        val = self.koszul_chi(Bundle.line(self.X, self.minus_K))
        if self.is_fano:
            return val, "h0 = chi by Kodaira vanishing"
        return val, "not Fano: value is chi(-K), not h0"

    def volume(self) -> int:
        H = chow.hyperplane(self.X, self.minus_K)
        return _integral(pair(chow.power(H, self.dim), self.ctop))

    def chi_tangent(self) -> int:
        diff = chow.ch_tangent(self.X) - self.chF
        return _integral(pair(diff, self.koszul_class))

    @cached_property
    def tangent_chern(self) -> ChowClass:
        """c(T_X - F), restricted to M this is c(T_M)."""
        return chow.chern_from_ch(chow.ch_tangent(self.X) - self.chF)

    def euler_top(self) -> int:
        return _integral(pair(self.tangent_chern.part(self.dim), self.ctop))

    def chi_omega(self, p) -> int:
        """chi(Omega^p_M) via ch(Omega^p_M) = sum_j (-1)^j ch(Sym^j F^dual) ch(Omega_X^{p-j})."""
        om = power_series(cotangent(self.X), p, "wedge")
        sy = power_series(self.F.dual(), p, "sym")
        tot = 0
        for j in range(p + 1):
            tot += (-1) ** j * self.koszul_chi(sy[j].tensor(om[p - j]))
        return tot

    def hodge(self, pmax=None, probe=True, tangent=True):
        return hodge_numbers(self, pmax=pmax, probe=probe, tangent=tangent)

    def report(self, hodge=True):
        return invariant_report(self, hodge=hodge)


def _integral(val: Fraction) -> int:
    if val.denominator != 1:
        raise ArithmeticError(f"non-integral value {val}")
    return int(val)


# -- Hodge numbers ----------------------------------------------------------------

@dataclass
class HodgeResult:
    dim: int
    lo: dict  # (p, q) -> int
    hi: dict
    assumptions: list = field(default_factory=list)

    def value(self, p, q):
        lo, hi = self.lo[(p, q)], self.hi[(p, q)]
        return lo if lo == hi else None

    def interval(self, p, q):
        return self.lo[(p, q)], self.hi[(p, q)]

    def determinate(self, keys=None) -> bool:
        keys = keys or list(self.lo)
        return all(self.lo[k] == self.hi[k] for k in keys)

    def get(self, p, q):
        v = self.value(p, q)
        return v if v is not None else list(self.interval(p, q))


ASSUMPTIONS = [
    "generic section: M is smooth of the expected dimension",
    "conormal complex Sym^j F^dual (x) Omega_X^(p-j)|M resolves Omega^p_M",
    "tangent complex wedge^(k-j) T_X (x) Sym^j F|M resolves wedge^k T_M",
]


def product_split(Z: ZeroLocus) -> list:
    """Groups of factor indices such that every summand of F lives on a single group."""
    X = Z.X
    triv = X.trivial_key()
    parent = list(range(len(X)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for key in Z.F.terms:
        live = [i for i, pr in enumerate(key) if pr != triv[i]]
        for i in live[1:]:
            parent[find(i)] = find(live[0])
    groups = {}
    for i in range(len(X)):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def split_locus(Z: ZeroLocus, groups) -> list:
    triv = Z.X.trivial_key()
    out = []
    for g in groups:
        Xg = Ambient(tuple(Z.X.factors[i] for i in g))
        terms = {}
        for key, m in Z.F.terms.items():
            live = [i for i, pr in enumerate(key) if pr != triv[i]]
            if (live and live[0] in g) or (not live and g is groups[0]):
                terms[tuple(key[i] for i in g)] = m
        out.append(ZeroLocus(Xg, Bundle(Xg, terms), assume_generic=Z.waived))
    return out


def _kunneth(parts) -> HodgeResult:
    d = 0
    lo, hi = {(0, 0): 1}, {(0, 0): 1}
    notes = []
    for H in parts:
        nlo, nhi = {}, {}
        for (a, b), x in lo.items():
            for (c, e), y in H.lo.items():
                nlo[(a + c, b + e)] = nlo.get((a + c, b + e), 0) + x * y
                nhi[(a + c, b + e)] = nhi.get((a + c, b + e), 0) + hi[(a, b)] * H.hi[(c, e)]
        lo, hi, d = nlo, nhi, d + H.dim
        notes.extend(x for x in H.assumptions if x not in notes)
    notes.append("Kunneth: M is a product of zero loci in separate factors")
    return HodgeResult(d, lo, hi, notes)


def hodge_numbers(Z: ZeroLocus, pmax=None, probe=True, tangent=True, split=True) -> HodgeResult:
    d = Z.dim
    if d < 0:
        raise ExcessError("negative dimension")
    X = Z.X
    if split and pmax is None:
        groups = product_split(Z)
        if len(groups) > 1:
            return _kunneth([hodge_numbers(z, probe=probe, tangent=tangent, split=False)
                             for z in split_locus(Z, groups)])
    if pmax is None:
        pmax = d // 2
    S = System()
    hv = {}
    for p in range(d + 1):
        for q in range(d + 1):
            hv[(p, q)] = S.var(f"h[{p},{q}]", 0)
    for p in range(d + 1):
        for q in range(d + 1):
            for other in ((q, p), (d - p, d - q)):
                if other != (p, q):
                    S.eq({hv[(p, q)]: 1, hv[other]: -1})
    assumptions = list(ASSUMPTIONS)
    if Z.waived:
        assumptions.append("F is not globally generated: genericity waived by the caller")
    if Z.is_fano:
        S._tighten(hv[(0, 0)], 1, 1)
        for q in range(1, d + 1):
            S._tighten(hv[(0, q)], 0, 0)
        assumptions.append("Fano: h^{0,0} = 1 and h^{0,q} = 0 for q > 0 (Kodaira)")
    e = Z.euler_top()
    S.eq({hv[(p, q)]: (-1) ** (p + q) for p in range(d + 1) for q in range(d + 1)}, e)

    sseqs = []

    def restricted(E, name):
        """Koszul pass: abutments H^t(M, E|M) as variables."""
        e1 = {}
        for r, W in enumerate(Z.wedges):
            for q, v in tensor_cohomology(W, E).h.items():
                e1[(-r, q - r)] = S.const(v, f"E1[{name},r={r},q={q}]")
        ss = SpectralSequence(S, f"K[{name}]", e1, 0, d)
        sseqs.append(ss)
        return ss.abut

    # conormal route: Omega^p_M ~ [Sym^p F^dual (x) O -> ... -> Omega_X^p] in degrees -p..0
    om = power_series(cotangent(X), pmax, "wedge")
    sy = power_series(Z.F.dual(), pmax, "sym")
    for p in range(pmax + 1):
        pass2 = {}
        for j in range(p + 1):
            E = sy[j].tensor(om[p - j]) if j else om[p]
            for t, h in restricted(E, f"p={p},j={j}").items():
                pass2[(-j, t - j)] = h
        ss2 = SpectralSequence(S, f"C[p={p}]", pass2, 0, d)
        sseqs.append(ss2)
        for q, h in ss2.abut.items():
            S.eq({h: 1, hv[(p, q)]: -1})
        S.eq({hv[(p, q)]: (-1) ** q for q in range(d + 1)}, Z.chi_omega(p))

    # tangent route: Omega^(d-k)_M = wedge^k T_M (x) K_M, and wedge^k T_M ~
    # [wedge^k T_X -> wedge^(k-1) T_X (x) F -> ... -> Sym^k F] in degrees 0..k
    if tangent:
        K = Bundle.line(X, [-x for x in Z.minus_K])
        tw = power_series(chow.tangent_bundle(X), pmax, "wedge")
        sf = power_series(Z.F, pmax, "sym")
        for k in range(pmax + 1):
            pass2 = {}
            for j in range(k + 1):
                E = tw[k - j].tensor(sf[j]).tensor(K)
                for t, h in restricted(E, f"k={k},j={j}").items():
                    pass2[(j, t + j)] = h
            ss2 = SpectralSequence(S, f"T[k={k}]", pass2, 0, d)
            sseqs.append(ss2)
            for q, h in ss2.abut.items():
                S.eq({h: 1, hv[(d - k, q)]: -1})

    try:
        while True:
            grew = False
            for ss in sseqs:
                if ss.add_structure():
                    grew = True
            S.propagate()
            if not grew:
                break
        if probe:
            targets = [hv[(p, q)] for p in range(d + 1) for q in range(d + 1) if p <= q and p + q <= d]
            S.probe(targets)
    except Inconsistent as exc:
        raise ArithmeticError(f"Hodge constraints are inconsistent ({exc})") from exc
    lo = {k: S.lo[v] for k, v in hv.items()}
    hi = {k: S.hi[v] for k, v in hv.items()}
    return HodgeResult(d, lo, hi, assumptions)


# -- reports ----------------------------------------------------------------------

FOURFOLD_KEYS = {"h11": (1, 1), "h21": (2, 1), "h31": (3, 1), "h22": (2, 2)}


def invariant_report(Z: ZeroLocus, hodge=True) -> dict:
    h0, note = Z.h0_minus_K()
    out = {
        "dim": Z.dim,
        "minusK": list(Z.minus_K),
        "fano": Z.is_fano,
        "h0mK": h0,
        "vol": Z.volume(),
        "chiT": Z.chi_tangent(),
        "euler": Z.euler_top(),
    }
    notes = [note]
    if hodge:
        H = Z.hodge()
        hd = {}
        keys = FOURFOLD_KEYS if Z.dim == 4 else {f"h{p}{q}": (p, q) for p in range(Z.dim + 1) for q in range(p + 1) if p + q <= Z.dim}
        for name, (p, q) in keys.items():
            hd[name] = H.get(p, q)
        hd["determinate"] = H.determinate([keys[k] for k in keys])
        out["hodge"] = hd
        notes.extend(H.assumptions)
        if Z.dim == 4 and hd["determinate"]:
            check_triangle(Z, hd)
    out["notes"] = notes
    return out


def check_triangle(Z: ZeroLocus, hd: dict):
    """chi(Omega^1), chi(Omega^2) and e against a fourfold's Hodge diamond."""
    h11, h21, h31, h22 = hd["h11"], hd["h21"], hd["h31"], hd["h22"]
    got = (Z.chi_omega(1), Z.chi_omega(2), Z.euler_top())
    want = (-h11 + h21 - h31, -2 * h21 + h22, 2 + 2 * h11 - 4 * h21 + 2 * h31 + h22)
    if got != want:
        raise ArithmeticError(f"consistency triangle failed: {got} vs {want}")
    return True


def invariants(spec, hodge=True) -> dict:
    return ZeroLocus.from_spec(spec).report(hodge=hodge)
