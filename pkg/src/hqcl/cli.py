"""Command line front end: ``hqcl parse | eval | suite | consequence | entangle``.

Exit codes: 0 success, 1 suite failure, 2 usage or syntax error, 3 model
validation failure.  Reports go to stdout and diagnostics to stderr.  JSON
reports are byte-identical for identical arguments except for the
``"timestamp"`` field.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from ._config import backend_name, semantic_tol
from .formula import ParseError, parse
from .modelspec import SpecError, load_spec
from .perspective import TruthPerspective
from .qumix import DimensionError, classify_entanglement, vector_from_json
from .search import check_classical_consequence, search_counterexample
from .semantics import generalized_truth_value, probability_of, validate_model
from .suites import SUITES, run_suite
from .tree import build_tree, compile_gate_tree

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INVALID = 0, 1, 2, 3


class UsageError(Exception):
    """Bad command line input; reported on stderr with exit code 2."""


def _emit_json(payload: dict, started: float) -> None:
    payload = dict(payload)
    payload["timestamp"] = {
        "generated": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "seconds": round(time.perf_counter() - started, 6),
    }
    print(json.dumps(payload, indent=2, sort_keys=True))


def _parse_formula(text: str, what: str = "formula"):
    try:
        return parse(text)
    except ParseError as exc:
        raise UsageError(f"{what}: {exc}\n{exc.caret()}") from exc


def _matrix_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


# ---------------------------------------------------------------- commands


def cmd_parse(args) -> int:
    f = _parse_formula(args.formula)
    print(f)
    if args.tree:
        print(build_tree(f).render())
    if args.gate_tree:
        gt = compile_gate_tree(f, TruthPerspective.named(args.perspective))
        rows = gt.render()
        if not rows:
            print("(no gates: atomic formula)")
        for i, row in zip(range(len(rows), 0, -1), rows):
            print(f"G{i}: {row}")
    return EXIT_OK


def _read_json_arg(value: str):
    path = Path(value)
    if path.exists():
        return json.loads(path.read_text())
    return json.loads(value)


def cmd_eval(args, started: float) -> int:
    try:
        data = _read_json_arg(args.model)
        model = load_spec(data)
    except (SpecError, ValueError, KeyError) as exc:
        if isinstance(exc, ParseError):
            raise UsageError(f"formula: {exc}\n{exc.caret()}") from exc
        raise UsageError(f"model spec: {exc}") from exc
    diag = validate_model(model)
    if not diag.ok:
        for line in diag.messages():
            print(line, file=sys.stderr)
        if args.report == "json":
            _emit_json({"command": "eval", "formula": str(model.formula), "valid": False,
                        "diagnostics": diag.as_dict()}, started)
        return EXIT_INVALID
    rows = []
    for occ in model.tree.nodes():
        gtv = generalized_truth_value(model, occ)
        rows.append({
            "occurrence": str(occ),
            "formula": str(occ.formula),
            "probability": probability_of(model, occ),
            "generalized_truth_value": _matrix_json(gtv),
        })
    if args.report == "json":
        _emit_json({"command": "eval", "formula": str(model.formula), "valid": True,
                    "perspective": model.perspective.name, "diagnostics": diag.as_dict(),
                    "occurrences": rows}, started)
    else:
        print(f"model of {model.formula} ({model.n} qubits, perspective {model.perspective.name})")
        print(f"valid: yes; compositional: {'yes' if diag.compositional else 'no'}")
        width = max(len(r["occurrence"]) for r in rows)
        for r in rows:
            print(f"  {r['occurrence']:<{width}}  Prob = {r['probability']:.12g}")
    return EXIT_OK


def cmd_suite(args, started: float) -> int:
    results = run_suite(args.name, trials=args.trials, seed=args.seed)
    passed = all(r.passed for r in results)
    if args.report == "json":
        _emit_json({"command": "suite", "suite": args.name, "trials": args.trials, "seed": args.seed,
                    "passed": passed, "cases": [r.as_dict() for r in results]}, started)
    else:
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            print(f"{status}  {r.id:<14} {r.detail}")
        print(f"{sum(r.passed for r in results)}/{len(results)} cases passed")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_consequence(args, started: float) -> int:
    alpha = _parse_formula(args.alpha, "alpha")
    beta = _parse_formula(args.beta, "beta")
    contexts = [_parse_formula(c, "context") for c in args.context or ()]
    try:
        if args.classical:
            if contexts:
                raise UsageError("--classical checks the default context only")
            verdict = check_classical_consequence(alpha, beta)
        else:
            verdict = search_counterexample(alpha, beta, contexts, generator=args.strategy,
                                            trials=args.trials, seed=args.seed)
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.report == "json":
        payload = {"command": "consequence", "seed": args.seed}
        payload.update(verdict.as_dict())
        _emit_json(payload, started)
    else:
        print(f"{alpha} |= {beta}: {verdict.status} after {verdict.trials} model(s)")
        if verdict.falsified:
            print(f"  context {verdict.context}: Prob(alpha) = {verdict.prob_alpha:.12g} "
                  f"> Prob(beta) = {verdict.prob_beta:.12g}")
            print("  replayable model spec:")
            print(json.dumps(verdict.spec, sort_keys=True))
        for note in verdict.notes:
            print(f"  note: {note}")
    return EXIT_OK


def _read_state(value: str) -> np.ndarray:
    try:
        data = _read_json_arg(value)
    except json.JSONDecodeError as exc:
        raise UsageError(f"state: not JSON and not a file: {exc}") from exc
    arr = np.asarray(data)
    if arr.ndim == 1:
        return arr.astype(np.complex128)
    try:
        return vector_from_json(data)
    except ValueError as exc:
        raise UsageError(f"state: {exc}") from exc


def cmd_entangle(args, started: float) -> int:
    vec = _read_state(args.state)
    n = int(round(np.log2(max(vec.size, 1))))
    if args.parts:
        try:
            blocks = [int(p) for p in args.parts.split(",")]
        except ValueError as exc:
            raise UsageError(f"--parts: {exc}") from exc
    else:
        blocks = [1] * n
    try:
        report = classify_entanglement(vec, blocks)
    except (ValueError, DimensionError) as exc:
        raise UsageError(str(exc)) from exc
    if args.report == "json":
        payload = {"command": "entangle"}
        payload.update(report.as_dict())
        _emit_json(payload, started)
    else:
        for i, (p, m) in enumerate(zip(report.purities, report.properly_mixed), start=1):
            print(f"part {i} ({report.blocks[i - 1]} qubit(s)): purity {p:.12g}{'  proper mixture' if m else ''}")
        print(f"entangled w.r.t. parts: {sorted(report.entangled_wrt) or 'none'}")
        print(f"{len(blocks)}-partite entangled: {'yes' if report.t_partite_entangled else 'no'}")
        print(f"maximally entangled: {'yes' if report.maximally_entangled else 'no'}")
    return EXIT_OK


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hqcl", description="Holistic quantum computational logic toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a formula and show its trees")
    p.add_argument("formula")
    p.add_argument("--tree", action="store_true", help="print the syntactical tree, top level first")
    p.add_argument("--gate-tree", action="store_true", help="print the per-level block gates")
    p.add_argument("--perspective", default="identity", choices=("identity", "hadamard"))

    p = sub.add_parser("eval", help="validate a model spec and report probabilities")
    p.add_argument("model", help="model spec file or inline JSON")
    p.add_argument("--report", choices=("text", "json"), default="text")

    p = sub.add_parser("suite", help="run a built-in suite")
    p.add_argument("name", choices=SUITES + ("all",))
    p.add_argument("--trials", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", choices=("text", "json"), default="text")

    p = sub.add_parser("consequence", help="search for a counterexample to alpha |= beta")
    p.add_argument("--alpha", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--context", action="append", help="extra context formula (repeatable)")
    p.add_argument("--trials", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strategy", choices=("comp", "ent", "both"), default="both")
    p.add_argument("--classical", action="store_true", help="exhaustive register check (Boolean fragment)")
    p.add_argument("--report", choices=("text", "json"), default="text")

    p = sub.add_parser("entangle", help="classify the entanglement of a quregister")
    p.add_argument("state", help="JSON amplitudes ([re, im] pairs or reals), inline or as a file")
    p.add_argument("--parts", help="comma separated block sizes (default: one qubit per part)")
    p.add_argument("--report", choices=("text", "json"), default="text")
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed its message
        return EXIT_USAGE if exc.code else EXIT_OK
    started = time.perf_counter()
    try:
        semantic_tol()
        backend_name()
        if args.command == "parse":
            return cmd_parse(args)
        handler = {"eval": cmd_eval, "suite": cmd_suite, "consequence": cmd_consequence,
                   "entangle": cmd_entangle}[args.command]
        return handler(args, started)
    except UsageError as exc:
        print(f"hqcl {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:  # bad HQCL_TOL / HQCL_BACKEND
        print(f"hqcl: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
