"""Degeneracy loci of bundle maps: expected dimensions, Eagon-Northcott Euler
characteristics, conic-bundle discriminants and the fiber dichotomy for a
projection of Z(E1 boxtimes E2) to one factor."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import chow
from .bundles import Ambient, Bundle, is_globally_generated
from .chow import ChowClass, ch_bundle, chern_from_ch, hyperplane, pair
from .dsl import ZeroLocusSpec, bundle_string, evaluate, parse_spec
from .zerolocus import ZeroLocus


class DegeneracyError(ValueError):
    pass


def expected_dim(dimX: int, e: int, f: int, k: int) -> int:
    """Expected dimension of D_k(phi) for phi: E -> F of ranks e, f."""
    if not 0 <= k <= min(e, f):
        raise DegeneracyError(f"need 0 <= k <= min(e, f), got k={k}, e={e}, f={f}")
    return dimX - (e - k) * (f - k)


def _base(base, assume_generic=False):
    if isinstance(base, str):
        base = parse_spec(base)
    if isinstance(base, Ambient):
        return ZeroLocus(base, Bundle.zero(base), assume_generic=assume_generic)
    if isinstance(base, ZeroLocusSpec):
        return ZeroLocus.from_spec(base, assume_generic=assume_generic)
    if isinstance(base, ZeroLocus):
        return base
    raise TypeError(f"cannot use {type(base).__name__} as a base")


def _as_bundle(X, e):
    if isinstance(e, Bundle):
        return e
    if isinstance(e, str):
        from .dsl import parse
        e = parse(e)
    return evaluate(e, X)


def en_terms(E: Bundle, F: Bundle):
    """[(j, wedge^(f+j) E (x) Sym^j F^dual (x) det F^dual)] for j = 0 .. e-f."""
    e, f = E.rank, F.rank
    if e <= f:
        raise DegeneracyError(f"Eagon-Northcott needs rank E > rank F (got {e} <= {f})")
    Fd = F.dual()
    detd = Fd.wedge(f)
    out = []
    for j in range(e - f + 1):
        term = E.wedge(f + j).tensor(Fd.sym(j) if j else Bundle.trivial(E.ambient)).tensor(detd)
        out.append((j, term))
    return out


def en_chi(base, E, F, assume_generic=False) -> int:
    """chi(O_D) for D = D_(f-1) of a generic phi: E -> F, from the
    Eagon-Northcott resolution; every chi is taken on the base locus."""
    Z = _base(base, assume_generic)
    E, F = _as_bundle(Z.X, E), _as_bundle(Z.X, F)
    tot = Z.koszul_chi(Bundle.trivial(Z.X))
    for j, term in en_terms(E, F):
        tot -= (-1) ** j * Z.koszul_chi(term)
    return tot


def en_report(base, E, F, assume_generic=False) -> dict:
    Z = _base(base, assume_generic)
    E, F = _as_bundle(Z.X, E), _as_bundle(Z.X, F)
    e, f = E.rank, F.rank
    dim = expected_dim(Z.dim, e, f, f - 1) if e > f else None
    out = {"base_dim": Z.dim, "e": e, "f": f, "expected_dim": dim,
           "terms": [{"j": j, "bundle": bundle_string(t), "chi": Z.koszul_chi(t)} for j, t in en_terms(E, F)],
           "chi_O": Z.koszul_chi(Bundle.trivial(Z.X))}
    out["chi_OD"] = out["chi_O"] - sum((-1) ** t["j"] * t["chi"] for t in out["terms"])
    if dim is not None and dim < 0:
        out["warning"] = "expected dimension is negative: the locus is empty for generic phi"
    return out


# -- conic bundles -------------------------------------------------------------

@dataclass
class ConicData:
    """A conic bundle given by K^dual -> Sym^2 E with E of rank 3."""
    ch_E: ChowClass
    k: ChowClass


@dataclass
class Discriminant:
    delta: ChowClass
    delta_sing: ChowClass
    degree_delta: int
    points_sing: int
    base_dim: int

    def to_json(self):
        return {"delta": self.delta.to_json(), "delta_sing": self.delta_sing.to_json(),
                "degree_delta": self.degree_delta, "points_sing": self.points_sing}


def _int(v: Fraction) -> int:
    if v.denominator != 1:
        raise ArithmeticError(f"non-integral degree {v}")
    return int(v)


def discriminant_classes(c1, c2, c3, k):
    delta = 2 * c1 + 3 * k
    sing = 4 * (k * k * k + 2 * k * k * c1 + k * c1 * c1 + k * c2 + c1 * c2 - c3)
    return delta, sing


def conic_discriminant(base, E=None, k=None, *, ch_E=None, polarization=None, assume_generic=False) -> Discriminant:
    """[Delta] = 2 c1 + 3 k and [Delta_sing] = 4 (k^3 + 2 k^2 c1 + k c1^2 + k c2 + c1 c2 - c3).

    E is a rank three bundle on the ambient (or its Chern character via ch_E);
    k is a line bundle given by degrees, or a class. Degrees integrate against
    the base and powers of the polarization (default O(1,..,1)).
    """
    Z = _base(base, assume_generic)
    X = Z.X
    if ch_E is None:
        E = _as_bundle(X, E)
        if E.rank != 3:
            raise DegeneracyError(f"conic bundles need rank 3, got {E.rank}")
        ch_E = ch_bundle(E)
    elif ch_E.constant() != 3:
        raise DegeneracyError(f"conic bundles need rank 3, got {ch_E.constant()}")
    if k is None:
        k = ChowClass(X)
    elif not isinstance(k, ChowClass):
        k = hyperplane(X, tuple(k))
    if Z.dim != 3:
        raise DegeneracyError(f"the discriminant degrees are for a threefold base, got dimension {Z.dim}")
    c = chern_from_ch(ch_E)
    delta, sing = discriminant_classes(c.part(1), c.part(2), c.part(3), k)
    h = hyperplane(X, polarization or (1,) * len(X))
    fund = Z.ctop if Z.F.rank else ChowClass.scalar(X, 1)
    deg = _int(pair(delta * h * h, fund))
    pts = _int(pair(sing, fund))
    return Discriminant(delta, sing, deg, pts, Z.dim)


def plucker_conic(X: Ambient, W: Bundle, targets: Bundle) -> ConicData:
    """Conic data of Gr(2, W) cut by relative hyperplanes, with W of rank 4.

    The sections give wedge^2 W -> targets with kernel S of rank 3; the conic
    is the Pluecker quadric on S with values in det W, so E = S^dual and
    K = det W.
    """
    if W.rank != 4:
        raise DegeneracyError("Pluecker conics need W of rank 4")
    chS = ch_bundle(W.wedge(2)) - ch_bundle(targets)
    if chS.constant() != 3:
        raise DegeneracyError("the kernel must have rank 3")
    chE = sum((chS.part(d) * (-1) ** d for d in range(X.dim + 1)), ChowClass(X))
    return ConicData(chE, hyperplane(X, W.det_degrees()))


# -- projections of box-product loci -----------------------------------------------

CAVEAT = ("expected dimensions only: a stratum of expected dimension >= 0 may still be empty, "
          "and fibers are not checked for smoothness")


@dataclass
class Stratum:
    rank: int
    expected_dim: int
    fiber: str


@dataclass
class ProjectionProfile:
    target: int
    base: str
    generic_fiber: str
    e: int
    f: int
    strata: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_json(self):
        return {"target_factor": self.target, "base": self.base, "generic_fiber": self.generic_fiber,
                "phi": {"source_rank": self.e, "target_rank": self.f},
                "strata": [s.__dict__ for s in self.strata], "notes": self.notes}


def projection_profile(spec, factor: int) -> ProjectionProfile:
    """Fiber dichotomy for projecting Z(E1 boxtimes E2 + rest) in Gr1 x Gr2 to
    factor `factor` (1 or 2). Summands living on one factor cut the base or
    every fiber; E1, E2 must be irreducible and globally generated."""
    if isinstance(spec, str):
        spec = parse_spec(spec)
    X = spec.ambient
    if len(X) != 2:
        raise DegeneracyError("projection profiles need exactly two factors")
    if factor not in (1, 2):
        raise DegeneracyError("factor must be 1 or 2")
    t, s = factor - 1, 2 - factor
    B = evaluate(spec.cutting, X)
    triv = X.trivial_key()
    mixed, on_t, on_s = [], {}, {}
    for key, m in sorted(B.terms.items()):
        live = [i for i in range(2) if key[i] != triv[i]]
        if len(live) == 2:
            mixed.append((key, m))
        elif live == [t]:
            on_t[key] = m
        elif live == [s]:
            on_s[key] = m
    if len(mixed) != 1 or mixed[0][1] != 1:
        raise DegeneracyError("need exactly one summand E1 boxtimes E2 involving both factors, with multiplicity one")
    key = mixed[0][0]
    ok, why = is_globally_generated(B)
    if not ok:
        raise DegeneracyError(f"hypothesis violated: {why}")
    Ft, Fs = X.factors[t], X.factors[s]
    Xt, Xs = Ambient((Ft,)), Ambient((Fs,))
    Et = Bundle(Xt, {(key[t],): 1})
    Es = Bundle(Xs, {(key[s],): 1})
    base = Bundle(Xt, {(k2[t],): m for k2, m in on_t.items()})
    rest = Bundle(Xs, {(k2[s],): m for k2, m in on_s.items()})
    base_spec = parse_spec(f"{Xt} :: {bundle_string(base)}")
    base_dim = Xt.dim - base.rank
    e = Et.rank
    f = Es.cohomology()[0]

    def fiber(r):
        Fb = Es.scale(r) + rest if r else rest
        if Fb.rank > Xs.dim:
            return "empty"
        return f"{Xs} :: {bundle_string(Fb)}"

    prof = ProjectionProfile(factor, str(base_spec), "", e, f)
    prof.notes.append(CAVEAT)
    m = min(e, f)
    if e * Es.rank + rest.rank <= Xs.dim:
        prof.generic_fiber = fiber(e)
        prof.notes.append(f"rank product {e * Es.rank} fits in dim {Xs.dim}: the projection is onto the base")
    else:
        prof.generic_fiber = "empty"
        prof.notes.append(f"rank product {e * Es.rank} exceeds dim {Xs.dim}: the generic fiber is empty")
    # phi: E_t^dual -> H^0(E_s) (x) O drops to rank r on D_r
    for r in range(m - 1, -1, -1):
        d = expected_dim(base_dim, e, f, r)
        if d < 0:
            continue
        prof.strata.append(Stratum(r, d, fiber(r)))
    return prof
