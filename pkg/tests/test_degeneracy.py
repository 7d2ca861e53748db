from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grassfano.bundles import Bundle
from grassfano.chow import ChowClass, schubert, sigma1
from grassfano.degeneracy import (DegeneracyError, conic_discriminant, discriminant_classes, en_chi, en_report,
                                  expected_dim, plucker_conic, projection_profile)
from grassfano.dsl import parse_ambient
from grassfano.zerolocus import ZeroLocus

X53 = "Gr(2,5) :: O(1)^3"


def test_expected_dim_examples():
    assert expected_dim(3, 1, 3, 0) == 0
    assert expected_dim(8, 2, 3, 1) == 6
    assert expected_dim(5, 2, 4, 2) == 5
    with pytest.raises(DegeneracyError):
        expected_dim(3, 1, 3, 2)


@settings(max_examples=300)
@given(st.integers(0, 20), st.integers(1, 6), st.integers(1, 6), st.integers(0, 6))
def test_expected_dim_symmetric_and_increasing(d, e, f, k):
    k = min(k, min(e, f))
    assert expected_dim(d, e, f, k) == expected_dim(d, f, e, k)
    if k < min(e, f):
        assert expected_dim(d, e, f, k) < expected_dim(d, e, f, k + 1)


def test_en_five_points():
    assert en_chi(X53, "O(0)^3", "O(1)") == 5
    rep = en_report(X53, "O(0)^3", "O(1)")
    assert rep["expected_dim"] == 0 and rep["chi_OD"] == 5
    assert [t["chi"] for t in rep["terms"]] == [0, -3, -7]


def test_en_empty_locus():
    assert en_chi("P(1) :: 0", "O(0)^2", "O(0)") == 0


def test_en_rank_hypothesis():
    with pytest.raises(DegeneracyError):
        en_chi(X53, "O(0)", "O(1)")


def test_restricted_line_bundles_on_x53():
    Z = ZeroLocus.from_spec(X53)
    assert [Z.koszul_chi(Bundle.line(Z.X, (d,))) for d in (0, -1, -2)] == [1, 0, -1]


def test_f28_exceptional_surface():
    S = ZeroLocus.from_spec("Gr(2,4) x P(4) :: (Q[1] * O(0,1))^2 + dual(U[1]) * O(0,1)")
    assert S.dim == 2
    assert S.koszul_chi(Bundle.trivial(S.X)) == 1
    assert S.euler_top() == 15


def test_conic_on_x53():
    d = conic_discriminant("Gr(3,5) :: O(1)^3", "dual(U[1])", (0,))
    H = sigma1(d.delta.X, 0)
    assert d.delta == 2 * H
    assert d.degree_delta == 10 and d.points_sing == 8


def test_conic_trivial():
    d = conic_discriminant("P(3)", "O(0)^3", (0,))
    assert d.delta == ChowClass(d.delta.X) and d.delta_sing == ChowClass(d.delta.X)
    assert d.degree_delta == d.points_sing == 0


def test_conic_needs_rank_three_over_threefold():
    with pytest.raises(DegeneracyError):
        conic_discriminant("P(3)", "O(0)^2")
    with pytest.raises(DegeneracyError):
        conic_discriminant("P(4)", "O(0)^3")


def test_plucker_conic_on_quadric_threefold():
    X = parse_ambient("P(4)")
    cd = plucker_conic(X, Bundle.quotient(X, 0), Bundle.line(X, (1,)).scale(3))
    d = conic_discriminant("P(4) :: O(2)", ch_E=cd.ch_E, k=cd.k)
    assert d.delta == 3 * sigma1(X, 0)
    assert d.degree_delta == 6
    # the Euler number of the total space pins the node count: e = 2 e(Q3) + e(Delta) - #nodes = 16
    assert d.points_sing == 8


@st.composite
def threefold_data(draw):
    X = parse_ambient("P(1) x Gr(2,4)")
    basis = [(0, (1,)), (1, (1,)), (1, (2,)), (1, (1, 1)), (1, (2, 1))]

    def cls(deg):
        c = ChowClass(X)
        for i, lam in basis:
            if (1 if i == 0 else sum(lam)) == deg:
                c = c + schubert(X, i, lam) * draw(st.integers(-4, 4))
        return c
    return cls(1), cls(2), cls(3), cls(1), cls(1)


@settings(max_examples=200)
@given(threefold_data())
def test_delta_twist_invariance(data):
    c1, c2, c3, k, t = data
    d0, _ = discriminant_classes(c1, c2, c3, k)
    d1, _ = discriminant_classes(c1 + 3 * t, c2, c3, k - 2 * t)
    assert d0 == d1


def test_projection_profiles():
    p = projection_profile("P(2) x Gr(2,5) :: O(1,1) + O(0,1)^3", 2)
    assert p.generic_fiber == "P(2) :: O(1)"
    assert [(s.rank, s.expected_dim) for s in p.strata] == [(0, 0)]
    p = projection_profile("P(2) x Gr(2,5) :: Q[1] # dual(U[2])", 1)
    assert p.generic_fiber == "Gr(2,5) :: dual(U[1])^2"
    p = projection_profile("P(1) x P(1) :: O(2,2)", 1)
    assert p.generic_fiber == "P(1) :: O(2)"
    p = projection_profile("P(2) x P(1) :: Q[1] # O(0,1)", 1)
    assert p.generic_fiber == "empty"
    with pytest.raises(DegeneracyError):
        projection_profile("P(2) x Gr(2,5) :: O(1,1)^2", 1)
    with pytest.raises(DegeneracyError):
        projection_profile("P(2) x Gr(2,5) :: O(-1,1)", 1)
