from __future__ import annotations

import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grassfano.dsl import evaluate
from grassfano.quiver import (QuiverDatum, QuiverError, build_tower, canonical_form, flatten, parse_token, quiver_dim,
                              to_zero_locus, topo_order, validate)

DATA = Path(__file__).parent / "data"


def _load(name):
    return QuiverDatum.from_json(json.loads((DATA / f"{name}.json").read_text()))


GOLDENS = {
    "k1": "P(4) :: 0",
    "k2": "P(1) x P(4) :: O(1,1)",
    "k109": "Gr(2,5) x P(4) :: O(1,0)^3 + (Q[1] * O(0,1))",
    "k127": "P(4) x P(5) :: O(3,0) + (Q[1] * O(0,1))",
    "k508": "P(2) x Gr(2,5) :: O(1,1) + O(0,1)^3",
    "k582": "P(4) x Gr(3,5) :: Q[2] * O(1,0) + O(0,1)^3 + O(2,0)",
}


@pytest.mark.parametrize("name", sorted(GOLDENS))
def test_flatten_goldens(name):
    assert canonical_form(to_zero_locus(_load(name))) == canonical_form(GOLDENS[name])


def test_k212_flattening():
    spec = to_zero_locus(_load("k212"))
    want = "P(5) x P(2) x Gr(2,5) :: (Q[2] # dual(U[3])) + (Q[3] * O(1,0,0)) + (dual(U[3]) * O(1,0,0))"
    assert canonical_form(spec) == canonical_form(want)


def test_validate_errors():
    validate(_load("k1"))
    with pytest.raises(QuiverError, match="acyclic violated"):
        validate(QuiverDatum(((0, 1, 0), (0, 0, 1), (0, 1, 0)), (1, 1, 1)))
    with pytest.raises(QuiverError, match="unique source violated"):
        validate(QuiverDatum(((0, 1, 0), (0, 0, 0), (0, 1, 0)), (1, 1, 1)))
    with pytest.raises(QuiverError, match="r0 = 1"):
        validate(QuiverDatum(((0, 3), (0, 0)), (2, 1)))
    with pytest.raises(QuiverError, match="arity"):
        validate(QuiverDatum.from_json({"adjacency": [[0, 5], [0, 0]], "dims": [1, 1], "bundle": [["0", "0"]]}))
    with pytest.raises(QuiverError, match="empty moduli"):
        build_tower(QuiverDatum(((0, 2), (0, 0)), (1, 3)))


def test_tokens():
    assert parse_token("0") is None
    assert parse_token("s[2,1]w") == ((2, 1), "w")
    for bad in ("s[1,2]w", "s[2]x", "t[1]b", "s[0]w"):
        with pytest.raises(QuiverError):
            parse_token(bad)


def test_dims():
    assert quiver_dim(_load("k1")) == 4
    assert quiver_dim(_load("k508")) == 8
    assert quiver_dim(QuiverDatum(((0, 6), (0, 0)), (1, 2))) == 8


def test_towers():
    steps = build_tower(_load("k2")).steps
    assert [(s.rank, s.fiber_rank) for s in steps] == [(1, 5), (1, 3)]
    steps = build_tower(_load("k127")).steps
    assert [(s.rank, s.fiber_rank) for s in steps] == [(1, 5), (1, 2)]
    steps = build_tower(_load("k582")).steps
    assert [(s.vertex, s.rank, s.fiber_rank) for s in steps] == [(2, 3, 5), (1, 1, 3)]


def test_translation_parts():
    res = flatten(_load("k508"))
    assert res.structural.is_zero()
    res = flatten(_load("k127"))
    assert res.structural.rank == 4 and res.translated.rank == 1
    res = flatten(QuiverDatum(((0, 5), (0, 0)), (1, 2)))
    assert res.translated.is_zero() and str(res.spec) == "Gr(2,5) :: 0"


def _check_dims(d):
    res = flatten(d)
    X = res.ambient
    assert X.dim - res.structural.rank == build_tower(d).dim == quiver_dim(d)
    spec = res.spec
    assert spec.ambient.dim - evaluate(spec.cutting, spec.ambient).rank == quiver_dim(d) - res.translated.rank


@pytest.mark.parametrize("name", ["k1", "k2", "k109", "k127", "k508", "k582", "k212"])
def test_dim_consistency_goldens(name):
    _check_dims(_load(name))


def test_catalog_quiver_entries():
    from grassfano import catalog
    entries = [e for e in catalog.load() if e.quiver is not None]
    assert len(entries) >= 4
    for e in entries:
        _check_dims(e.quiver)
        assert flatten(e.quiver).spec.ambient.dim - evaluate(e.spec.cutting, e.spec.ambient).rank == 4
        assert canonical_form(flatten(e.quiver).spec) == canonical_form(e.spec)


@st.composite
def quivers(draw):
    """Acyclic data with vertex 0 the unique source, realizable as a tower."""
    n = draw(st.integers(2, 4))
    A = [[0] * n for _ in range(n)]
    dims = [1]
    for j in range(1, n):
        preds = draw(st.lists(st.integers(0, j - 1), min_size=1, max_size=2, unique=True))
        if 0 not in preds and draw(st.booleans()):
            preds.append(0)
        for i in preds:
            A[i][j] = draw(st.integers(1, 3))
        frank = sum(A[i][j] * dims[i] for i in range(j))
        if frank < 2:
            A[0][j] += 2 - frank
            frank = 2
        dims.append(draw(st.integers(1, min(3, frank - 1))))
    return QuiverDatum(tuple(map(tuple, A)), tuple(dims))


def _relabel(d, perm):
    """Relabel vertices: new index perm[i] for old vertex i (perm[0] = 0)."""
    n = d.size
    A = [[0] * n for _ in range(n)]
    dims = [0] * n
    for i in range(n):
        dims[perm[i]] = d.dims[i]
        for j in range(n):
            A[perm[i]][perm[j]] = d.adjacency[i][j]
    return QuiverDatum(tuple(map(tuple, A)), tuple(dims))


@settings(max_examples=200)
@given(quivers())
def test_random_dim_consistency(d):
    try:
        flatten(d)
    except QuiverError as exc:
        assert "mixes" in str(exc)
        return
    _check_dims(d)


@settings(max_examples=200)
@given(quivers(), st.randoms(use_true_random=False))
def test_relabeling_invariance(d, rnd):
    try:
        before = canonical_form(to_zero_locus(d))
    except QuiverError:
        return
    order = topo_order(d)
    # a random topological order, then relabel so that order becomes 0..n-1
    done, new_order = {0}, [0]
    while len(new_order) < d.size:
        ready = [j for j in range(d.size) if j not in done and all(i in done for i, _ in d.preds(j))]
        j = rnd.choice(sorted(ready))
        new_order.append(j)
        done.add(j)
    perm = [0] * d.size
    for pos, v in enumerate(new_order):
        perm[v] = pos
    assert len(order) == d.size
    assert canonical_form(to_zero_locus(_relabel(d, perm))) == before
