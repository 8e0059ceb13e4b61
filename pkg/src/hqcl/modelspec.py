"""JSON model specifications.

A spec fixes a perspective, a context formula and the meaning of one level::

    {"truth_perspective": {"name": "identity"},
     "formula": "q1 & q2",
     "assign": {"level": "bottom", "expr": <qumix-expr>}}

Qumix expressions::

    {"pure": [[re, im], ...]}          quregister projector
    {"mixed_id": n}                    I^(n) / 2**n
    {"proj": "0" | "1"}                T|0><0|T^dagger or T|1><1|T^dagger
    {"tensor": [expr, ...]}
    {"mix": [[w, expr | amplitudes], ...]}
    {"apply": {"gate": gate-spec, "to": expr}}

Gate specs are ``{"name": "NOT"|"T"|"XOR"|"SQI"|"SQN"|"AND"|"I", "args": [...]}``
or ``{"tensor": [gate-spec, ...]}``.  Gates are read as twin gates of the spec's
perspective, which is the identity unless stated.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ._config import DENSE_MAX_QUBITS, MIN_WEIGHT
from .gates import GateSpec, apply_gate, tensor_gates
from .perspective import IDENTITY, TruthPerspective, perspective_from_json, perspective_to_json
from .qumix import Qumix, tensor_all, vector_from_json, vector_to_json
from .semantics import ScopedModel, build_model


class SpecError(ValueError):
    """Malformed model specification."""


def _gate(spec, T: TruthPerspective):
    if not isinstance(spec, dict):
        raise SpecError(f"gate spec must be an object, got {spec!r}")
    if "tensor" in spec:
        parts = [_gate(s, T) for s in spec["tensor"]]
        if any(isinstance(p, GateSpec) and p.name == "AND" for p in parts):
            raise SpecError("AND cannot appear inside a gate tensor")
        return tensor_gates([p.unitary() if isinstance(p, GateSpec) else p for p in parts])
    try:
        return GateSpec(spec["name"], tuple(spec.get("args", ())), T)
    except KeyError:
        raise SpecError(f"gate spec needs a 'name': {spec!r}") from None
    except (TypeError, ValueError) as exc:
        raise SpecError(str(exc)) from exc


def _apply(gate, rho: Qumix) -> Qumix:
    if isinstance(gate, GateSpec):
        return gate.apply(rho)
    return apply_gate(gate, rho)


def _mix(entries, T: TruthPerspective) -> Qumix:
    if not entries:
        raise SpecError("'mix' needs at least one entry")
    parts = []
    for entry in entries:
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise SpecError("'mix' entries are [weight, expr] pairs")
        w, sub = entry
        w = float(w)
        if w <= MIN_WEIGHT:
            raise SpecError(f"mixture weights must be > {MIN_WEIGHT}, got {w!r}")
        rho = Qumix.pure(vector_from_json(sub)) if isinstance(sub, list) else eval_expr(sub, T)
        parts.append((w, rho))
    total = sum(w for w, _ in parts)
    if abs(total - 1.0) > 1e-9:
        raise SpecError(f"mixture weights must sum to 1, got {total!r}")
    n = parts[0][1].n
    if any(rho.n != n for _, rho in parts):
        raise SpecError("all members of a mixture must have the same qubit count")
    if any(not rho.is_ensemble for _, rho in parts) and n <= DENSE_MAX_QUBITS:
        return Qumix._dense_unchecked(sum(w * rho.array() for w, rho in parts))
    parts = [(w, rho.to_ensemble()) for w, rho in parts]
    weights = np.concatenate([w * rho.weights for w, rho in parts])
    states = np.concatenate([rho.states for _, rho in parts])
    return Qumix._ensemble_unchecked(weights, states)


def eval_expr(expr, T: TruthPerspective = IDENTITY) -> Qumix:
    """Evaluate a qumix expression under perspective ``T``."""
    if isinstance(expr, Qumix):
        return expr
    if not isinstance(expr, dict) or len(expr) != 1:
        raise SpecError(f"a qumix expression is an object with one key, got {expr!r}")
    (key, value), = expr.items()
    try:
        if key == "pure":
            return Qumix.pure(vector_from_json(value))
        if key == "mixed_id":
            return Qumix.maximally_mixed(int(value))
        if key == "proj":
            if str(value) not in ("0", "1"):
                raise SpecError(f"'proj' is \"0\" or \"1\", got {value!r}")
            return Qumix.pure(T.one if str(value) == "1" else T.zero)
        if key == "tensor":
            return tensor_all(eval_expr(e, T) for e in value)
        if key == "mix":
            return _mix(value, T)
        if key == "apply":
            rho = eval_expr(value["to"], T)
            return _apply(_gate(value["gate"], T), rho)
    except SpecError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"bad {key!r} expression: {exc}") from exc
    raise SpecError(f"unknown qumix expression {key!r}")


def load_spec(data) -> ScopedModel:
    """Build the model described by a spec object, JSON text or file path."""
    if isinstance(data, Path):
        data = json.loads(data.read_text())
    elif isinstance(data, str):
        data = json.loads(data)
    if not isinstance(data, dict):
        raise SpecError("a model spec is a JSON object")
    for key in ("formula", "assign"):
        if key not in data:
            raise SpecError(f"model spec is missing {key!r}")
    T = perspective_from_json(data.get("truth_perspective"))
    assign = data["assign"]
    if not isinstance(assign, dict) or "expr" not in assign:
        raise SpecError("'assign' needs an 'expr'")
    seed = eval_expr(assign["expr"], T)
    return build_model(T, data["formula"], assign.get("level", "top"), seed)


def make_spec(formula, expr, *, level="top", perspective: TruthPerspective = IDENTITY) -> dict:
    return {
        "truth_perspective": perspective_to_json(perspective),
        "formula": str(formula),
        "assign": {"level": level, "expr": expr},
    }


# ----------------------------------------------------------- expr helpers

def pure_expr(vec) -> dict:
    return {"pure": vector_to_json(vec)}


def mix_expr(weights, vectors) -> dict:
    return {"mix": [[float(w), vector_to_json(v)] for w, v in zip(weights, vectors)]}
