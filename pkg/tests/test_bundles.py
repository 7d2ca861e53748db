from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from grassfano.bundles import Ambient, Bundle, GrFactor, canonical, cohomology_of, is_globally_generated
from grassfano.chow import chi_hrr
from grassfano.dsl import evaluate, parse, parse_ambient


def _h(amb, expr):
    X = parse_ambient(amb)
    return cohomology_of(evaluate(parse(expr), X)).h


def test_bbw_examples():
    assert _h("P(2)", "O(-3)") == {2: 1}
    assert _h("Gr(2,5)", "O(1)") == {0: 10}
    assert _h("Gr(2,5)", "dual(U[1])") == {0: 5}
    assert _h("Gr(2,5)", "Q[1]") == {0: 5}
    assert _h("P(1) x P(1)", "O(-2,0)") == {1: 1}
    assert _h("Gr(2,5)", "sym^2(dual(U[1]))") == {0: 15}


def test_single_summand_keys():
    X = parse_ambient("Gr(2,5)")
    B = evaluate(parse("dual(U[1])"), X)
    assert list(B.terms) == [(((1, 0), (0, 0, 0)),)] and B.rank == 2
    B = evaluate(parse("wedge^2(Q[1])"), X)
    assert list(B.terms) == [(((0, 0), (1, 1, 0)),)] and B.rank == 3


def test_wedge2_of_box_product():
    X = parse_ambient("P(2) x Gr(2,5)")
    got = evaluate(parse("wedge^2(Q[1] # dual(U[2]))"), X)
    want = evaluate(parse("sym^2(Q[1]) # O(0,1) + wedge^2(Q[1]) # sym^2(dual(U[2]))"), X)
    assert got == want and got.rank == 6


def test_rank_examples():
    X = parse_ambient("P(2) x Gr(2,5)")
    assert evaluate(parse("O(1,1) + O(0,1)^3"), X).rank == 4
    X = parse_ambient("P(4) x Gr(2,8)")
    assert evaluate(parse("Q[1] # dual(U[2]) + dual(U[2]) * O(1,0) + O(0,1)^2"), X).rank == 12


def test_canonical():
    assert canonical(parse_ambient("P(4)")) == (-5,)
    assert canonical(parse_ambient("Gr(2,5)")) == (-5,)
    assert canonical(parse_ambient("P(2) x Gr(2,5)")) == (-3, -5)


def test_global_generation():
    X = parse_ambient("Gr(2,5)")
    assert is_globally_generated(evaluate(parse("O(1)"), X))[0]
    assert not is_globally_generated(evaluate(parse("U[1]"), X))[0]
    assert is_globally_generated(evaluate(parse("sym^2(dual(U[1])) + O(1)"), X))[0]
    X = parse_ambient("P(2) x Gr(2,5)")
    assert is_globally_generated(evaluate(parse("O(1,1)"), X))[0]


@st.composite
def irreducible(draw):
    """One irreducible summand on one or two factors up to Gr(3,7), weights in [-4, 4]."""
    factors = []
    for _ in range(draw(st.integers(1, 2))):
        n = draw(st.integers(2, 7))
        factors.append(GrFactor(draw(st.integers(1, min(3, n - 1))), n))
    X = Ambient(tuple(factors))
    pairs = []
    for f in factors:
        a = sorted(draw(st.lists(st.integers(-4, 4), min_size=f.k, max_size=f.k)), reverse=True)
        b = sorted(draw(st.lists(st.integers(-4, 4), min_size=f.q, max_size=f.q)), reverse=True)
        pairs.append((tuple(a), tuple(b)))
    return Bundle.from_pairs(X, pairs)


@settings(max_examples=500)
@given(irreducible())
def test_bbw_single_degree(B):
    assert len(cohomology_of(B).degrees()) <= 1


@settings(max_examples=500)
@given(irreducible())
def test_serre_duality(B):
    X = B.ambient
    dual = B.dual().twist(canonical(X))
    h, hd = cohomology_of(B), cohomology_of(dual)
    assert all(h[q] == hd[X.dim - q] for q in range(X.dim + 1))


@settings(max_examples=200)
@given(irreducible(), irreducible())
def test_bbw_matches_hrr(B, C):
    if C.ambient == B.ambient:
        B = B + C
    assert cohomology_of(B).euler() == chi_hrr(B.ambient, B)
