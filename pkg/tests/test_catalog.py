from __future__ import annotations

import pytest

from grassfano import catalog
from grassfano.catalog import CatalogError

ENTRY = """\
- id: K_742
  label: F.1.1
  picard_rank: 1
  presentation: "Gr(2,5) :: O(1) + O(3)"
  expected: {h0mK: 9, vol: 15, chiT: -109, h11: 1, h31: 41, h22: 232}
"""


@pytest.fixture(scope="module")
def entries():
    return catalog.load()


def test_shipped_corpus(entries):
    assert len(entries) >= 30
    assert {e.picard_rank for e in entries} >= {1, 2, 3, 4}
    ids = [e.id for e in entries]
    assert len(ids) == len(set(ids))


def test_f11_expected(entries):
    e = next(e for e in entries if e.label == "F.1.1")
    x = e.expected
    assert (x["h0mK"], x["vol"], x["chiT"], x["h11"], x["h31"], x["h22"]) == (9, 15, -109, 1, 41, 232)
    assert "h21" not in x


def test_nonzero_h21_h31_coverage(entries):
    odd = [e for e in entries if e.expected.get("h21", 0) or e.expected["h31"]]
    assert len(odd) >= 5
    by_label = {e.label: e for e in entries}
    assert by_label["F.2.22"].expected["h21"] == 5
    assert by_label["F.2.44"].expected["h31"] == 8


def test_malformed_token_names_entry():
    bad = ENTRY.replace('presentation: "Gr(2,5) :: O(1) + O(3)"',
                        'quiver: {"adjacency": [[0, 5], [0, 0]], "dims": [1, 1], "bundle": [["s[1,3]w"]]}')
    with pytest.raises(CatalogError, match=r"entry K_742 \(line 1\).*s\[1,3\]w"):
        catalog.loads(bad)


def test_bad_presentation_names_entry():
    with pytest.raises(CatalogError, match="entry K_742"):
        catalog.loads(ENTRY.replace("O(3)", "O(3,1)]"))


def test_duplicate_rejected():
    with pytest.raises(CatalogError, match="duplicate id"):
        catalog.loads(ENTRY + ENTRY)


@pytest.mark.parametrize("old,new,msg", [
    ("chiT: -109", "chiT: -109, h44: 2", "unknown invariant"),
    ("vol: 15", "vol: -15", "nonnegative"),
    ("h31: 41, ", "", "h31: missing"),
    ("picard_rank: 1", "picard_rank: one", "picard_rank"),
    ("label: F.1.1", "label: F11", "label"),
    ("id: K_742", "id: 742", "id"),
])
def test_schema_errors(old, new, msg):
    with pytest.raises(CatalogError, match=msg):
        catalog.loads(ENTRY.replace(old, new))


def test_unknown_field():
    with pytest.raises(CatalogError, match="unknown field"):
        catalog.loads(ENTRY + "  colour: blue\n")


def test_picard_rank_warning():
    e, = catalog.loads(ENTRY.replace("picard_rank: 1", "picard_rank: 2"))
    assert e.warnings


def test_select(entries):
    assert [e.id for e in catalog.select(entries, "K508")] == ["K_508"]
    assert all(e.label.startswith("F.3.") for e in catalog.select(entries, "F.3.*"))
    assert all(e.picard_rank == 4 for e in catalog.select(entries, "rank=4"))
    with pytest.raises(CatalogError):
        catalog.select(entries, "K_999999")


def test_verify_k508_and_k742(entries):
    rep = catalog.verify(entries, "K_508,K_742")
    assert [r["status"] for r in rep["results"]] == ["PASS", "PASS"] and rep["ok"]


def test_corrupted_value_fails_with_diff():
    e, = catalog.loads(ENTRY.replace("vol: 15", "vol: 16"))
    rep = catalog.verify([e])
    r = rep["results"][0]
    assert r["status"] == "FAIL" and not rep["ok"]
    assert r["fields"]["vol"] == {"expected": 16, "got": 15, "status": "mismatch"}
    assert "vol: expected 16, got 15" in catalog.report_text(rep)
    assert "K_742,F.1.1,FAIL,vol,16,15,mismatch" in catalog.report_csv(rep)


def test_erratum_is_not_a_pass():
    text = ENTRY.replace("vol: 15", "vol: 16") + "  errata: {vol: {value: 15, evidence: recomputed}}\n"
    rep = catalog.verify(catalog.loads(text))
    assert rep["results"][0]["status"] == "ERRATUM" and not rep["ok"]


def test_parallel_report_identical(entries):
    sel = "F.1.*,K_508,K_212"
    serial = catalog.report_json(catalog.verify(entries, sel, threads=1))
    assert catalog.report_json(catalog.verify(entries, sel, threads=4)) == serial
    assert catalog.report_json(catalog.verify(entries, sel, threads=1)) == serial


def test_order_independent(entries):
    sel = "F.1.*,K_508"
    forward = catalog.verify(entries, sel)["results"]
    backward = catalog.verify(list(reversed(entries)), sel, threads=2)["results"]
    assert sorted(forward, key=lambda r: r["id"]) == sorted(backward, key=lambda r: r["id"])
