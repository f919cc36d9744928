"""Command-line front end.

Every command reads JSON (``--input``, ``-`` for stdin), writes one JSON
document (``--output`` or stdout) and echoes its resolved parameters under
``params``.  Exit codes: 0 computed, 2 invalid input, 3 budget exceeded.
Diagnostics go to stderr only.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from typing import Any

from .certificates import SEARCH_RESULT, cb_document, partition_document, sp_document, verify_certificate
from .errors import BudgetExceeded, InputError
from .fields import Field
from .grassmannian import GrassmannPointSet, cayley_bacharach_test, enumerate_subspaces
from .lab import plane_configuration_cover, quadric_through_lines, sharpness_search, survey_exhaustive
from .linalg import ProjSubspace, project_from, projection_target
from .special_position import (
    DEFAULT_MAX_D,
    DEFAULT_TRIALS,
    Configuration,
    PartitionReport,
    Tester,
    check_sp,
    decompose,
    span_bound_report,
)
from .tables import DEFAULT_BUDGET, subspace_count

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3


def parse_field(text: str) -> Field:
    """``rational``/``Q``, or a prime as ``7``, ``gf:7``, ``GF(7)``."""
    t = text.strip().lower()
    if t in ("rational", "q"):
        return Field.rational()
    m = re.fullmatch(r"(?:gf[:(]?)?(\d+)\)?", t)
    if not m:
        raise argparse.ArgumentTypeError(f"bad field {text!r}")
    try:
        return Field.gf(int(m.group(1)))
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def parse_budget(text: str) -> int | None:
    if text.lower() in ("none", "unlimited"):
        return None
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad budget {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("budget must be positive")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


def _nonnegative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("expected a nonnegative integer")
    return value


# input helpers -----------------------------------------------------------


def _read_json(path: str | None) -> Any:
    if path is None:
        raise InputError("this command needs --input")
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not JSON: {exc}") from exc


def _config_from(obj: Any, field: Field | None) -> Configuration:
    if isinstance(obj, dict) and "configuration" in obj:
        obj = obj["configuration"]
    if not isinstance(obj, dict):
        raise InputError("expected a configuration object")
    return Configuration.from_json(obj, field)


def _field_json(field: Field | None):
    return None if field is None else field.to_json()


# commands ----------------------------------------------------------------


def cmd_check_sp(args) -> dict:
    c = _config_from(_read_json(args.input), args.field)
    cert = check_sp(c, args.tester, exact=not args.inexact, seed=args.seed, trials=args.trials, budget=args.budget)
    return sp_document(c, cert)


def cmd_decompose(args) -> dict:
    c = _config_from(_read_json(args.input), args.field)
    report = decompose(c, args.tester, max_d=args.max_d, budget=args.budget, seed=args.seed, trials=args.trials)
    return partition_document(c, report)


def cmd_span_bound(args) -> dict:
    obj = _read_json(args.input)
    c = _config_from(obj, args.field)
    if isinstance(obj, dict) and obj.get("kind") == "partition_report":
        report = PartitionReport.from_json(obj, c.field)
    else:
        report = decompose(c, args.tester, max_d=args.max_d, budget=args.budget, seed=args.seed, trials=args.trials)
    bound = span_bound_report(c, report)
    out = {"configuration": c.to_json(), "partition": report.to_json()}
    out.update(bound.to_json())
    out["cover"] = plane_configuration_cover(c, report).to_json()
    return out


def cmd_cb_test(args) -> dict:
    obj = _read_json(args.input)
    if isinstance(obj, dict) and "points" in obj:
        gamma = GrassmannPointSet.from_json(obj)
    else:
        c = _config_from(obj, args.field)
        gamma = GrassmannPointSet.of_planes(list(c.planes), c.k)
    report = cayley_bacharach_test(gamma, args.r, budget=args.budget)
    return cb_document(gamma, report)


def cmd_project(args) -> dict:
    obj = _read_json(args.input)
    if not isinstance(obj, dict) or "center" not in obj or "subspaces" not in obj:
        raise InputError('project expects {"field", "center", "subspaces": [...]}')
    field = args.field or Field.from_json(obj.get("field"))
    center = ProjSubspace.from_json(field, obj["center"])
    if not isinstance(obj["subspaces"], list):
        raise InputError("subspaces must be a list")
    images = [project_from(center, ProjSubspace.from_json(field, s)) for s in obj["subspaces"]]
    return {
        "field": field.to_json(),
        "center": center.to_json(),
        "target_n": projection_target(center),
        "images": [s.to_json() for s in images],
        "image_dims": [s.dim for s in images],
    }


def cmd_enumerate(args) -> dict:
    field = args.field or Field.gf(2)
    if not field.is_prime:
        raise InputError("enumeration needs a prime field")
    count = subspace_count(field.modulus, args.n, args.m) if 0 <= args.m <= args.n else 0
    items = []
    for i, s in enumerate(enumerate_subspaces(field, args.n, args.m, args.budget)):
        if args.limit is not None and i >= args.limit:
            break
        items.append(s.to_json())
    return {"field": field.to_json(), "n": args.n, "m": args.m, "count": count, "subspaces": items}


def cmd_survey(args) -> dict:
    Field.gf(args.q)
    res = survey_exhaustive(args.q, args.n, args.k, args.d, budget=args.budget, workers=args.workers)
    return res.to_json(with_records=args.records)


def cmd_sharpness(args) -> dict:
    field = args.field or Field.gf(5)
    res = sharpness_search(args.n, args.k, args.d, field, seed=args.seed, iterations=args.iterations, budget=args.budget)
    out = {"kind": SEARCH_RESULT}
    out.update(res.to_json())
    return out


def cmd_quadric(args) -> dict:
    c = _config_from(_read_json(args.input), args.field)
    out = {"configuration": c.to_json()}
    out.update(quadric_through_lines(c).to_json())
    return out


def cmd_verify_certificate(args) -> dict:
    doc = _read_json(args.input)
    return {"valid": verify_certificate(doc, budget=args.budget)}


COMMANDS = {
    "check-sp": (cmd_check_sp, "decide SP(n-k) for a configuration"),
    "decompose": (cmd_decompose, "minimal partition into indecomposable SP blocks"),
    "span-bound": (cmd_span_bound, "span dimension against the bound for a configuration"),
    "cb-test": (cmd_cb_test, "Cayley-Bacharach test for degree-r Plücker forms"),
    "project": (cmd_project, "project subspaces from a center"),
    "enumerate": (cmd_enumerate, "list the m-planes of P^n over a prime field"),
    "survey": (cmd_survey, "exhaustive survey of d-multisets of (k-1)-planes"),
    "sharpness": (cmd_sharpness, "search for indecomposable SP configurations with large span"),
    "quadric": (cmd_quadric, "quadric surface through lines in a P^3"),
    "verify-certificate": (cmd_verify_certificate, "replay a certificate document"),
}


# schemas -----------------------------------------------------------------

_SCALAR = {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}
_FIELD = {"oneOf": [{"const": "rational"}, {"type": "object", "properties": {"gf": {"type": "integer"}}, "required": ["gf"]}]}
_SUBSPACE = {
    "type": "object",
    "properties": {"n": {"type": "integer", "minimum": 0}, "basis": {"type": "array", "items": {"type": "array", "items": _SCALAR}}},
    "required": ["n", "basis"],
}
_CONFIGURATION = {
    "type": "object",
    "properties": {
        "field": _FIELD,
        "n": {"type": "integer", "minimum": 1},
        "k": {"type": "integer", "minimum": 1},
        "planes": {"type": "array", "items": _SUBSPACE, "minItems": 1},
    },
    "required": ["field", "n", "k", "planes"],
}
_PLUCKER = {
    "type": "object",
    "properties": {"k": {"type": "integer"}, "n": {"type": "integer"}, "coords": {"type": "array", "items": _SCALAR}},
    "required": ["k", "n", "coords"],
}
_POINT_SET = {
    "type": "object",
    "properties": {"field": _FIELD, "k": {"type": "integer"}, "n": {"type": "integer"}, "points": {"type": "array", "items": _PLUCKER}},
    "required": ["field", "k", "n", "points"],
}
_SP_CERT = {
    "type": "object",
    "properties": {
        "kind": {"const": "sp_certificate"},
        "configuration": _CONFIGURATION,
        "verdict": {"enum": ["holds", "fails"]},
        "method": {"enum": ["bruteforce", "tuple_witness"]},
        "witness": {"type": "object", "properties": {"j": {"type": "integer"}, "l_plane": _SUBSPACE}, "required": ["j", "l_plane"]},
        "reverify": {"type": "array"},
    },
    "required": ["kind", "configuration", "verdict", "method"],
}
_PARTITION = {
    "type": "object",
    "properties": {
        "kind": {"const": "partition_report"},
        "configuration": _CONFIGURATION,
        "d": {"type": "integer"},
        "decomposable": {"type": "boolean"},
        "m": {"type": "integer"},
        "minimal_partition": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "per_block_certificates": {"type": "array"},
    },
    "required": ["kind", "configuration", "d", "decomposable", "m", "minimal_partition", "per_block_certificates"],
}

SCHEMAS = {
    "scalar": _SCALAR,
    "field": _FIELD,
    "subspace": _SUBSPACE,
    "configuration": _CONFIGURATION,
    "plucker_point": _PLUCKER,
    "point_set": _POINT_SET,
    "sp_certificate": _SP_CERT,
    "partition_report": _PARTITION,
    "project_input": {
        "type": "object",
        "properties": {"field": _FIELD, "center": _SUBSPACE, "subspaces": {"type": "array", "items": _SUBSPACE}},
        "required": ["field", "center", "subspaces"],
    },
    "inputs": {
        "check-sp": "configuration",
        "decompose": "configuration",
        "span-bound": "configuration or partition_report",
        "cb-test": "point_set or configuration",
        "project": "project_input",
        "quadric": "configuration",
        "verify-certificate": "sp_certificate, partition_report, cb_report or sharpness_result",
    },
}


# driver ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", help="input JSON path, '-' for stdin")
    common.add_argument("--output", "-o", help="output JSON path (default stdout)")
    common.add_argument("--seed", type=_nonnegative, default=0)
    common.add_argument("--budget", type=parse_budget, default=DEFAULT_BUDGET, help="max enumerated objects, or 'none'")
    common.add_argument("--field", type=parse_field, default=None, help="reinterpret input over this field")
    common.add_argument("--tester", choices=[t.value for t in Tester], default=Tester.AUTO.value)
    common.add_argument("--trials", type=_positive, default=DEFAULT_TRIALS)
    common.add_argument("--workers", type=_positive, default=os.cpu_count() or 1)

    parser = argparse.ArgumentParser(prog="specialpos", description="Special position and Cayley-Bacharach toolkit.")
    parser.add_argument("--schema", action="store_true", help="print the JSON schemas and exit")
    sub = parser.add_subparsers(dest="command")
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "check-sp":
            p.add_argument("--inexact", action="store_true", help="accept a randomized 'holds'")
        if name in ("decompose", "span-bound"):
            p.add_argument("--max-d", type=_positive, default=DEFAULT_MAX_D)
        if name == "cb-test":
            p.add_argument("--r", type=_positive, default=1)
        if name == "enumerate":
            p.add_argument("--n", type=_nonnegative, required=True)
            p.add_argument("--m", type=_nonnegative, required=True)
            p.add_argument("--limit", type=_nonnegative, default=None)
        if name == "survey":
            p.add_argument("--q", type=_positive, required=True)
            p.add_argument("--n", type=_positive, required=True)
            p.add_argument("--k", type=_positive, required=True)
            p.add_argument("--d", type=_positive, required=True)
            p.add_argument("--records", action="store_true", help="include every SP configuration found")
        if name == "sharpness":
            p.add_argument("--n", type=_positive, required=True)
            p.add_argument("--k", type=_positive, required=True)
            p.add_argument("--d", type=_positive, required=True)
            p.add_argument("--iterations", type=_positive, default=200)
    return parser


def _resolved(args) -> dict:
    skip = {"command", "schema", "output", "input"}
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in skip:
            continue
        out[key] = _field_json(value) if isinstance(value, Field) else value
    out["input"] = args.input
    return out


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.schema:
        sys.stdout.write(dumps(SCHEMAS))
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    handler = COMMANDS[args.command][0]
    try:
        result = handler(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InputError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    doc = {"command": args.command, "params": _resolved(args)}
    doc.update(result)
    text = dumps(doc)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
