"""The shipped corpus of Fano fourfold families: loading, validation and
batch verification against freshly computed invariants."""

from __future__ import annotations

import csv
import io
import json
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .dsl import DSLError, ZeroLocusSpec, parse_spec
from .quiver import QuiverDatum, QuiverError, canonical_form, flatten, validate

FIELDS = ("h0mK", "vol", "chiT", "h11", "h21", "h31", "h22")
REQUIRED_FIELDS = ("h0mK", "vol", "chiT", "h11", "h31", "h22")
KEYS = {"id", "label", "picard_rank", "presentation", "quiver", "expected", "source", "external", "notes", "errata"}
_ID = re.compile(r"^K_\d+$")
_LABEL = re.compile(r"^F\.\d+\.\d+$")


class CatalogError(ValueError):
    pass


@dataclass
class CatalogEntry:
    id: str
    label: str
    picard_rank: int
    expected: dict
    presentation: str | None = None
    spec: ZeroLocusSpec | None = None
    quiver: QuiverDatum | None = None
    source: str = ""
    external: list = field(default_factory=list)
    notes: str = ""
    errata: dict = field(default_factory=dict)
    line: int = 0
    warnings: list = field(default_factory=list)

    def resolved_spec(self) -> ZeroLocusSpec:
        if self.spec is not None:
            return self.spec
        return flatten(self.quiver).spec


def default_path() -> Path:
    return Path(str(resources.files("grassfano") / "data" / "catalog.yaml"))


def _fail(where, msg):
    raise CatalogError(f"{where}: {msg}")


def _entry(obj, line) -> CatalogEntry:
    where = f"line {line}"
    if not isinstance(obj, dict):
        _fail(where, "entry must be a mapping")
    eid = obj.get("id")
    if eid is not None:
        where = f"entry {eid} (line {line})"
    unknown = set(obj) - KEYS
    if unknown:
        _fail(where, f"unknown field(s) {sorted(unknown)}")
    for k in ("id", "label", "picard_rank", "expected"):
        if k not in obj:
            _fail(where, f"missing field '{k}'")
    if not isinstance(eid, str) or not _ID.match(eid):
        _fail(where, f"field 'id' must look like K_508, got {eid!r}")
    if not isinstance(obj["label"], str) or not _LABEL.match(obj["label"]):
        _fail(where, f"field 'label' must look like F.2.1, got {obj['label']!r}")
    rank = obj["picard_rank"]
    if not isinstance(rank, int) or isinstance(rank, bool) or rank < 1:
        _fail(where, "field 'picard_rank' must be a positive integer")
    exp = obj["expected"]
    if not isinstance(exp, dict):
        _fail(where, "field 'expected' must be a mapping")
    for k in exp:
        if k not in FIELDS:
            _fail(where, f"expected.{k}: unknown invariant")
    for k in REQUIRED_FIELDS:
        if k not in exp:
            _fail(where, f"expected.{k}: missing")
    for k, v in exp.items():
        if not isinstance(v, int) or isinstance(v, bool):
            _fail(where, f"expected.{k}: must be an integer, got {v!r}")
        if k != "chiT" and v < 0:
            _fail(where, f"expected.{k}: must be nonnegative, got {v}")
    if "presentation" not in obj and "quiver" not in obj:
        _fail(where, "needs 'presentation' or 'quiver'")
    e = CatalogEntry(eid, obj["label"], rank, dict(exp), line=line)
    if "presentation" in obj:
        if not isinstance(obj["presentation"], str):
            _fail(where, "field 'presentation' must be a string")
        e.presentation = obj["presentation"]
        try:
            e.spec = parse_spec(e.presentation)
        except (DSLError, ValueError) as exc:
            _fail(where, f"presentation: {exc}")
    if "quiver" in obj:
        try:
            e.quiver = QuiverDatum.from_json(obj["quiver"])
            validate(e.quiver)
        except (QuiverError, TypeError, AttributeError) as exc:
            _fail(where, f"quiver: {exc}")
    e.source = str(obj.get("source", ""))
    ext = obj.get("external", [])
    if not isinstance(ext, list) or not all(isinstance(x, str) for x in ext):
        _fail(where, "field 'external' must be a list of strings")
    e.external = list(ext)
    e.notes = str(obj.get("notes", ""))
    errata = obj.get("errata", {})
    if not isinstance(errata, dict):
        _fail(where, "field 'errata' must be a mapping")
    for k, v in errata.items():
        if k not in exp:
            _fail(where, f"errata.{k}: not an expected invariant of this entry")
        if not isinstance(v, dict) or set(v) != {"value", "evidence"} or not isinstance(v["value"], int):
            _fail(where, f"errata.{k}: needs an integer 'value' and an 'evidence' string")
    e.errata = {k: dict(v) for k, v in errata.items()}
    spec = e.spec if e.spec is not None else None
    if spec is not None and len(spec.ambient) != rank:
        e.warnings.append(f"picard_rank {rank} differs from the {len(spec.ambient)} ambient factors")
    return e


def loads(text: str, name="<catalog>") -> list:
    loader = yaml.SafeLoader(text)
    try:
        node = loader.get_single_node()
        if node is None:
            return []
        if not isinstance(node, yaml.SequenceNode):
            raise CatalogError(f"{name}: top level must be a list of entries")
        out, seen = [], {}
        for item in node.value:
            line = item.start_mark.line + 1
            obj = loader.construct_object(item, deep=True)
            e = _entry(obj, line)
            if e.id in seen:
                raise CatalogError(f"entry {e.id} (line {line}): duplicate id, first defined on line {seen[e.id]}")
            seen[e.id] = line
            out.append(e)
        return out
    except yaml.YAMLError as exc:
        raise CatalogError(f"{name}: {exc}") from exc
    finally:
        loader.dispose()


def load(path=None) -> list:
    p = Path(path) if path is not None else default_path()
    try:
        text = p.read_text()
    except OSError as exc:
        raise CatalogError(f"cannot read {p}: {exc}") from exc
    return loads(text, str(p))


def _norm_id(tok):
    m = re.fullmatch(r"[Kk]_?(\d+)", tok)
    return f"K_{m.group(1)}" if m else None


def select(entries, selector=None) -> list:
    """'all' / None, or comma-separated ids (K508, K_508), labels (F.2.1),
    label prefixes (F.2.*) and Picard ranks (rank=2)."""
    if selector in (None, "", "all"):
        return list(entries)
    toks = [t.strip() for t in selector.split(",") if t.strip()]
    out = []
    for e in entries:
        for t in toks:
            if _norm_id(t) == e.id or t == e.label:
                break
            if t.endswith(".*") and e.label.startswith(t[:-1]):
                break
            if t.startswith("rank=") and t[5:].isdigit() and int(t[5:]) == e.picard_rank:
                break
        else:
            continue
        out.append(e)
    if not out:
        raise CatalogError(f"selector {selector!r} matches no entry")
    return out


# -- verification -------------------------------------------------------------------

def _compare(name, exp, got, errata):
    if isinstance(got, list):
        lo, hi = got
        st = "indeterminate" if lo <= exp <= hi else "mismatch"
    elif got == exp:
        st = "ok"
    elif name in errata and errata[name]["value"] == got:
        st = "erratum"
    else:
        st = "mismatch"
    return {"expected": exp, "got": got, "status": st}


def verify_entry(e: CatalogEntry, truncate=None) -> dict:
    from .zerolocus import ZeroLocus
    res = {"id": e.id, "label": e.label, "status": "ERROR", "fields": {}, "notes": list(e.warnings)}
    try:
        spec = e.resolved_spec()
        if e.quiver is not None and e.spec is not None:
            same = canonical_form(flatten(e.quiver).spec) == canonical_form(e.spec)
            res["quiver_flattening"] = "match" if same else "differs"
        elif e.quiver is not None:
            res["quiver_flattening"] = "used"
        Z = ZeroLocus.from_spec(spec)
        rep = Z.report(hodge=True)
        got = {"h0mK": rep["h0mK"], "vol": rep["vol"], "chiT": rep["chiT"]}
        for k in ("h11", "h21", "h31", "h22"):
            got[k] = rep["hodge"][k]
        res["dim"] = rep["dim"]
        res["computed"] = dict(got, euler=rep["euler"], determinate=rep["hodge"]["determinate"])
        for k in FIELDS:
            if k in e.expected:
                res["fields"][k] = _compare(k, e.expected[k], got[k], e.errata)
        sts = {f["status"] for f in res["fields"].values()}
        if res.get("quiver_flattening") == "differs":
            sts.add("mismatch")
        if "mismatch" in sts:
            res["status"] = "FAIL"
        elif "indeterminate" in sts:
            res["status"] = "INDETERMINATE"
        elif "erratum" in sts:
            res["status"] = "ERRATUM"
        else:
            res["status"] = "PASS"
    except Exception as exc:  # reported per entry, not raised
        res["error"] = f"{type(exc).__name__}: {exc}"
    return res


STATUSES = ("PASS", "ERRATUM", "INDETERMINATE", "FAIL", "ERROR")


def verify(entries, selector=None, threads=1) -> dict:
    chosen = select(entries, selector)
    if threads and threads > 1 and len(chosen) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(verify_entry, chosen, chunksize=1))
    else:
        results = [verify_entry(e) for e in chosen]
    summary = {s: sum(1 for r in results if r["status"] == s) for s in STATUSES}
    summary["total"] = len(results)
    return {"results": results, "summary": summary, "ok": summary["PASS"] == len(results)}


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def report_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "label", "status", "field", "expected", "got", "field_status"])
    for r in report["results"]:
        if not r["fields"]:
            w.writerow([r["id"], r["label"], r["status"], "", "", "", r.get("error", "")])
        for k, f in r["fields"].items():
            got = f["got"] if not isinstance(f["got"], list) else "[{},{}]".format(*f["got"])
            w.writerow([r["id"], r["label"], r["status"], k, f["expected"], got, f["status"]])
    return buf.getvalue()


def report_text(report: dict) -> str:
    lines = []
    for r in report["results"]:
        bad = [f"{k}: expected {f['expected']}, got {f['got']} ({f['status']})"
               for k, f in r["fields"].items() if f["status"] != "ok"]
        tail = "; ".join(bad)
        if "error" in r:
            tail = r["error"]
        lines.append(f"{r['status']:<13} {r['id']:<7} {r['label']:<7} {tail}".rstrip())
    s = report["summary"]
    lines.append(" ".join(f"{k}={s[k]}" for k in STATUSES) + f" total={s['total']}")
    return "\n".join(lines) + "\n"
