"""Self-contained certificate documents and their offline replay.

A certificate document is a JSON object carrying the configuration it talks
about, the claimed result and a ``reverify`` list naming the primitive
facts a checker has to confirm.  :func:`verify_certificate` replays those
facts with ``meets``/``span``/``contains`` only; it never asks which
algorithm produced the claim.  Claims of the form "no counterexample
exists" cannot be replayed from finitely many primitive facts, so they are
re-decided by the exhaustive scan, which is the reference decider.
"""

from __future__ import annotations

from typing import Any

from .errors import BudgetExceeded, InputError, MalformedCertificate
from .grassmannian import GrassmannPointSet, cayley_bacharach_test, evaluate_form
from .linalg import span
from .special_position import (
    Configuration,
    PartitionReport,
    SpCertificate,
    reverify_facts,
    reverify_witness,
    sp_bruteforce,
)
from .tables import DEFAULT_BUDGET

SP_CERTIFICATE = "sp_certificate"
PARTITION_REPORT = "partition_report"
CB_REPORT = "cb_report"
SEARCH_RESULT = "sharpness_result"
KINDS = (SP_CERTIFICATE, PARTITION_REPORT, CB_REPORT, SEARCH_RESULT)


def sp_document(c: Configuration, cert: SpCertificate) -> dict:
    out = {"kind": SP_CERTIFICATE, "configuration": c.to_json()}
    out.update(cert.to_json())
    if cert.holds:
        out["reverify"] = [{"fact": "exhaustive_scan", "expected": "no_single_miss"}]
    else:
        out["reverify"] = [{"fact": "dim", "of": "l_plane", "expected": c.n - c.k}] + reverify_facts(c, cert.j)
    return out


def partition_document(c: Configuration, report: PartitionReport) -> dict:
    out = {"kind": PARTITION_REPORT, "configuration": c.to_json()}
    out.update(report.to_json())
    facts: list[dict] = [{"fact": "partition", "of": list(range(c.d))}]
    for i, block in enumerate(report.blocks):
        facts.append({"fact": "block_sp", "block": i, "expected": True})
    out["reverify"] = facts
    return out


def cb_document(gamma: GrassmannPointSet, report) -> dict:
    out = {"kind": CB_REPORT, "point_set": gamma.to_json()}
    out.update(report.to_json())
    if report.holds:
        out["reverify"] = [{"fact": "rank_drop", "expected": False}]
    else:
        out["reverify"] = [
            {"fact": "form_value", "point": i, "expected": "nonzero" if i == report.failing_index else "zero"}
            for i in range(len(gamma.points))
        ]
    return out


# replay ------------------------------------------------------------------


def _require(obj: Any, key: str):
    if not isinstance(obj, dict) or key not in obj:
        raise MalformedCertificate(f"missing key {key!r}")
    return obj[key]


def _load_config(doc: dict) -> Configuration:
    try:
        return Configuration.from_json(_require(doc, "configuration"))
    except MalformedCertificate:
        raise
    except InputError as exc:
        raise MalformedCertificate(f"bad configuration: {exc}") from exc


def _replay_sp(doc: dict, budget: int | None) -> bool:
    c = _load_config(doc)
    try:
        cert = SpCertificate.from_json(doc, c.field)
    except InputError as exc:
        raise MalformedCertificate(str(exc)) from exc
    if cert.holds:
        return sp_bruteforce(c, budget).holds
    if not isinstance(cert.j, int) or isinstance(cert.j, bool):
        raise MalformedCertificate("witness index must be an integer")
    return reverify_witness(c, cert.j, cert.l_plane)


def _replay_partition(doc: dict, budget: int | None) -> bool:
    c = _load_config(doc)
    try:
        report = PartitionReport.from_json(doc, c.field)
    except InputError as exc:
        raise MalformedCertificate(str(exc)) from exc
    if doc.get("m") != report.m:
        return False
    flat = sorted(i for b in report.blocks for i in b)
    if report.d != c.d or flat != list(range(c.d)):
        return False
    if any(len(b) < 2 for b in report.blocks) or report.decomposable != (report.m >= 2):
        return False
    if len(report.certificates) != report.m:
        return False
    for block, cert in zip(report.blocks, report.certificates):
        if not cert.holds or not sp_bruteforce(c.sub(block), budget).holds:
            return False
    return True


def _replay_cb(doc: dict, budget: int | None) -> bool:
    try:
        gamma = GrassmannPointSet.from_json(_require(doc, "point_set"))
        r = _require(doc, "r")
        holds = _require(doc, "holds")
    except MalformedCertificate:
        raise
    except InputError as exc:
        raise MalformedCertificate(str(exc)) from exc
    if not isinstance(r, int) or r < 1 or not isinstance(holds, bool):
        raise MalformedCertificate("bad r or holds")
    f = gamma.field
    if holds:
        return cayley_bacharach_test(gamma, r).holds
    j = _require(doc, "failing_index")
    raw_form = _require(doc, "separating_form")
    if not isinstance(j, int) or not 0 <= j < len(gamma.points) or not isinstance(raw_form, list):
        return False
    try:
        form = [(tuple(t["exponents"]), f.parse(str(t["coeff"]))) for t in raw_form]
    except (KeyError, TypeError, InputError) as exc:
        raise MalformedCertificate(f"bad separating form: {exc}") from exc
    nvars = len(gamma.points[0].coords)
    if any(len(e) != nvars or sum(e) != r or min(e) < 0 for e, _ in form):
        return False
    for i, p in enumerate(gamma.points):
        value = evaluate_form(f, form, p.coords)
        if bool(value) != (i == j):
            return False
    return True


def _replay_search(doc: dict, budget: int | None) -> bool:
    if _require(doc, "configuration") is None:
        return True
    c = _load_config(doc)
    cert_doc = dict(_require(doc, "certificate"))
    cert_doc["configuration"] = doc["configuration"]
    part_doc = dict(_require(doc, "partition"))
    part_doc["configuration"] = doc["configuration"]
    if not _replay_sp(cert_doc, budget) or not _replay_partition(part_doc, budget):
        return False
    return span(list(c.planes)).dim == doc.get("span_dim") and not part_doc["decomposable"]


def verify_certificate(doc: Any, budget: int | None = DEFAULT_BUDGET) -> bool:
    """Replay a certificate document; False when any claimed fact fails.

    Raises :class:`MalformedCertificate` when the document cannot be read.
    """
    kind = _require(doc, "kind")
    try:
        if kind == SP_CERTIFICATE:
            return _replay_sp(doc, budget)
        if kind == PARTITION_REPORT:
            return _replay_partition(doc, budget)
        if kind == CB_REPORT:
            return _replay_cb(doc, budget)
        if kind == SEARCH_RESULT:
            return _replay_search(doc, budget)
    except (MalformedCertificate, BudgetExceeded):
        raise
    except InputError:
        # well-formed JSON whose content contradicts itself, e.g. a tampered
        # basis that no longer has the stated dimension
        return False
    raise MalformedCertificate(f"unknown certificate kind {kind!r}")

