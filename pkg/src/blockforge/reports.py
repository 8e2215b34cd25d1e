"""Report documents for searches and verifiers.

Every report has the keys ``format_version, kind, query, verdict, witnesses,
stats, seed, budget`` in that order, plus a ``details`` object.  Wall-clock
time is only recorded when asked for, so identical runs give identical bytes.
"""

from __future__ import annotations

import json
from typing import Any

from blockforge.io import FORMAT_VERSION, DocumentError, dumps, encode_distance
from blockforge.search import EXHAUSTED, WITNESS, FarPathQuery, SearchCertificate
from blockforge.verify import (
    FAIL,
    NOT_VERIFIED,
    PASS,
    BlockerReport,
    BlockVerification,
    DistanceReport,
)

REPORT_KEYS = ("format_version", "kind", "query", "verdict", "witnesses", "stats", "seed", "budget", "details")


def _report(kind, query, verdict, witnesses, stats, seed, budget, details) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "query": query,
        "verdict": verdict,
        "witnesses": witnesses,
        "stats": stats,
        "seed": seed,
        "budget": budget,
        "details": details,
    }


def query_doc(q: FarPathQuery) -> dict:
    return {"S": list(q.S), "T": list(q.T), "k": q.k, "c": q.c, "forbidden": list(q.forbidden)}


def search_stats_doc(cert: SearchCertificate, timing: bool = False) -> dict:
    out = cert.stats.as_dict(timing)
    out.setdefault("elapsed_ms", None)
    return out


def far_paths_report(q: FarPathQuery, cert: SearchCertificate, timing: bool = False) -> dict:
    """Raw search result; the verdict is the search outcome."""
    witnesses = []
    details: dict[str, Any] = {"outcome": cert.outcome}
    if cert.witness is not None:
        witnesses = [list(p) for p in cert.witness.paths]
        details["certified_min_pairwise_distance"] = encode_distance(cert.witness.certified_min_pairwise_distance)
    return _report("far_paths", query_doc(q), cert.outcome, witnesses, search_stats_doc(cert, timing), None, q.budget, details)


def far_pairs_verdict(cert: SearchCertificate) -> str:
    """No far pair avoiding the root is the property being checked."""
    if cert.outcome == EXHAUSTED:
        return PASS
    if cert.outcome == WITNESS:
        return FAIL
    return NOT_VERIFIED


def far_pairs_report(q: FarPathQuery, cert: SearchCertificate, timing: bool = False) -> dict:
    doc = far_paths_report(q, cert, timing)
    doc["kind"] = "far_pairs"
    doc["verdict"] = far_pairs_verdict(cert)
    return doc


def distances_doc(d: DistanceReport) -> dict:
    return {
        "labels": list(d.labels),
        "vertices": list(d.vertices),
        "matrix": [[encode_distance(x) for x in row] for row in d.matrix],
        "min_within_terminals": encode_distance(d.min_within_terminals),
        "root_to_terminals": encode_distance(d.root_to_terminals),
        "required_within": d.required_within,
        "required_root": d.required_root,
    }


def distances_report(d: DistanceReport) -> dict:
    return _report("distances", {}, PASS if d.passed else FAIL, [], {}, None, None, distances_doc(d))


def blockers_doc(r: BlockerReport) -> dict:
    return {
        "outcome": r.verdict,
        "covering_set": None if r.covering_set is None else list(r.covering_set),
        "subsets_tested": r.subsets_tested,
        "by_size": {str(k): v for k, v in sorted(r.by_size.items())},
        "trials": r.trials,
    }


def blockers_report(r: BlockerReport) -> dict:
    query = {"size_bound": r.size_bound, "mode": r.mode}
    witnesses = [{"X": list(X), "path": None if p is None else list(p)} for X, p in sorted(r.witnesses.items())]
    if r.covering_set is not None:
        witnesses = [{"X": list(r.covering_set), "path": None}]
    stats = {"subsets_tested": r.subsets_tested}
    return _report("blockers", query, PASS if r.passed else FAIL, witnesses, stats, r.seed, None, blockers_doc(r))


def refusal_report(kind: str, query: dict, reason: str) -> dict:
    return _report(kind, query, NOT_VERIFIED, [], {}, None, None, {"refusal": reason})


def block_report(v: BlockVerification, timing: bool = False) -> dict:
    far = far_pairs_report(v.far_pairs_query, v.far_pairs, timing)
    blk = {"refusal": v.blockers_refusal} if v.blockers is None else blockers_doc(v.blockers)
    details = {
        "distances": {"verdict": PASS if v.distances.passed else FAIL, **distances_doc(v.distances)},
        "blockers": {"verdict": NOT_VERIFIED if v.blockers is None else (PASS if v.blockers.passed else FAIL), **blk},
        "far_pairs": {"verdict": far["verdict"], **far["details"]},
    }
    return _report("block", far["query"], v.verdict, far["witnesses"], far["stats"], None, far["budget"], details)


def parse_report(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not a JSON document: {exc}") from exc
    if not isinstance(doc, dict) or tuple(doc) != REPORT_KEYS:
        raise DocumentError("not a report document")
    return doc


def render(doc: dict) -> str:
    return dumps(doc)
