"""Holistic models scoped to one context formula.

A :class:`ScopedModel` stores one qumix per level of the context's syntactical
tree.  Consecutive levels are linked by the compiled level gates, so fixing the
meaning of any single level fixes all of them.  The contextual meaning of an
occurrence is the reduced state of its level meaning on the occurrence's block.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ._config import DENSE_MAX_QUBITS, semantic_tol
from .formula import Atom, Const, Formula, as_formula, atoms, conj
from .gates import Gate, apply_gate
from .perspective import IDENTITY, TruthPerspective, probability, preorder_le
from .qumix import (
    DimensionError,
    Qumix,
    as_qumix,
    purity,
    reduce_qubits,
    tensor,
    tensor_all,
    trace_distance,
)
from .tree import GateTree, Occurrence, SyntacticalTree, build_tree, compile_gate_tree

#: above this many qubits the compositionality flag uses the squared Frobenius gap
_COMPOSITIONAL_DENSE_MAX = 8
_FROBENIUS_SQ_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ScopedModel:
    """Holistic model fragment for one context ``formula``; ``levels[0]`` is ``Level_1``."""

    perspective: TruthPerspective
    gate_tree: GateTree
    levels: tuple[Qumix, ...]

    @property
    def tree(self) -> SyntacticalTree:
        return self.gate_tree.tree

    @property
    def formula(self) -> Formula:
        return self.tree.formula

    @property
    def height(self) -> int:
        return self.tree.height

    @property
    def n(self) -> int:
        return self.tree.width

    def meaning(self, level: int) -> Qumix:
        """``Hol(Level_level)``."""
        if not 1 <= level <= self.height:
            raise IndexError(f"level {level} outside 1..{self.height}")
        return self.levels[level - 1]

    @property
    def bottom(self) -> Qumix:
        return self.levels[0]

    @property
    def top(self) -> Qumix:
        return self.levels[-1]

    def occurrence(self, sub: Formula | str) -> Occurrence:
        return self.tree.first(sub)


@dataclass(frozen=True, eq=False)
class ContextualMeaning:
    """``Hol^gamma(beta)`` together with where it was read off."""

    qumix: Qumix
    context: Formula
    occurrence: Occurrence

    @property
    def formula(self) -> Formula:
        return self.occurrence.formula


def _resolve_level_range(level, height: int) -> int:
    if level == "top":
        return height
    if level == "bottom":
        return 1
    if isinstance(level, bool) or not isinstance(level, (int, np.integer)):
        raise ValueError(f"level must be an integer, 'top' or 'bottom', got {level!r}")
    if not 1 <= int(level) <= height:
        raise IndexError(f"seed level {level} outside 1..{height}")
    return int(level)


def build_model(
    perspective: TruthPerspective,
    context: Formula | str,
    seed_level,
    seed,
) -> ScopedModel:
    """Fill every level from the meaning ``seed`` of ``Level_seed_level``.

    Lower levels follow by applying the level gates, higher levels by their
    inverses.  Constants and normality are not checked here; see
    :func:`validate_model`.
    """
    gt = compile_gate_tree(as_formula(context), perspective)
    h = gt.tree.height
    level = _resolve_level_range(seed_level, h)
    rho = as_qumix(seed)
    if rho.n != gt.tree.width:
        raise DimensionError(
            f"seed has {rho.n} qubits but {gt.tree.formula} needs At = {gt.tree.width}"
        )
    levels: list[Qumix | None] = [None] * h
    levels[level - 1] = rho
    for i in range(level - 1, 0, -1):
        levels[i - 1] = apply_gate(gt.gate(i), levels[i])
    for i in range(level, h):
        levels[i] = apply_gate(gt.gate(i).adjoint(), levels[i - 1])
    return ScopedModel(perspective, gt, tuple(levels))


def _leaf_meaning(leaf: Formula, perspective: TruthPerspective, atom_meanings: Mapping[int, Qumix]) -> Qumix:
    if isinstance(leaf, Const):
        return Qumix.pure(perspective.one if leaf.value else perspective.zero)
    try:
        rho = as_qumix(atom_meanings[leaf.index])
    except KeyError:
        raise ValueError(f"no meaning given for atom q{leaf.index}") from None
    if rho.n != 1:
        raise DimensionError(f"atom q{leaf.index} needs a one-qubit meaning, got {rho.n} qubits")
    return rho


def compositional_top(perspective: TruthPerspective, context: Formula, atom_meanings: Mapping[int, Qumix]) -> Qumix:
    tree = build_tree(context)
    leaves = [o.formula for o in tree.level(tree.height)]
    return tensor_all(_leaf_meaning(leaf, perspective, atom_meanings) for leaf in leaves)


def build_compositional_model(
    perspective: TruthPerspective,
    context: Formula | str,
    atom_meanings: Mapping[int, Qumix],
) -> ScopedModel:
    """Top level = tensor of one shared meaning per atom (``t``/``f`` automatic)."""
    context = as_formula(context)
    top = compositional_top(perspective, context, atom_meanings)
    return build_model(perspective, context, "top", top)


# ---------------------------------------------------------------- meanings


def contextual_meaning(model: ScopedModel, occ: Occurrence | Formula | str) -> ContextualMeaning:
    if not isinstance(occ, Occurrence):
        occ = model.occurrence(occ)
    elif not model.tree.contains(occ):
        raise KeyError(f"occurrence {occ} does not belong to the tree of {model.formula}")
    rho = reduce_qubits(model.meaning(occ.level), occ.qubits)
    return ContextualMeaning(rho, model.formula, occ)


def _occ(model: ScopedModel, occ) -> Occurrence:
    if isinstance(occ, Occurrence):
        if not model.tree.contains(occ):
            raise KeyError(f"occurrence {occ} does not belong to the tree of {model.formula}")
        return occ
    return model.occurrence(occ)


def generalized_truth_value(model: ScopedModel, occ=None) -> np.ndarray:
    """Reduced state (2x2) of the last qubit of an occurrence, by default the whole formula."""
    occ = model.tree.root if occ is None else _occ(model, occ)
    return reduce_qubits(model.meaning(occ.level), (occ.last_qubit,)).array()


def probability_of(model: ScopedModel, occ=None) -> float:
    """``p_T(Hol^gamma(beta))``; only the last qubit of the block is needed."""
    occ = model.tree.root if occ is None else _occ(model, occ)
    last = reduce_qubits(model.meaning(occ.level), (occ.last_qubit,))
    return probability(model.perspective, last)


def check_truth(model: ScopedModel, *, tol: float | None = None) -> bool:
    tol = semantic_tol() if tol is None else tol
    return abs(probability_of(model) - 1.0) <= tol


def check_consequence_in_context(model: ScopedModel, alpha, beta, *, tol: float | None = None) -> bool:
    """``Hol^gamma(alpha) <=_T Hol^gamma(beta)``."""
    tol = semantic_tol() if tol is None else tol
    return probability_of(model, alpha) <= probability_of(model, beta) + tol


# -------------------------------------------------------------- validation


@dataclass
class Diagnostics:
    """Outcome of :func:`validate_model`; ``ok`` ignores the compositionality flag."""

    tol: float
    linkage: list[float] = field(default_factory=list)
    constant_violations: list[tuple[Occurrence, float]] = field(default_factory=list)
    normality_violations: list[tuple[Formula, Occurrence, Occurrence, float]] = field(default_factory=list)
    compositional_levels: list[bool] | None = None

    @property
    def linkage_ok(self) -> bool:
        return all(r <= self.tol for r in self.linkage)

    @property
    def ok(self) -> bool:
        return self.linkage_ok and not self.constant_violations and not self.normality_violations

    @property
    def compositional(self) -> bool | None:
        if self.compositional_levels is None:
            return None
        return all(self.compositional_levels)

    def messages(self) -> list[str]:
        out = []
        for i, r in enumerate(self.linkage, start=1):
            if r > self.tol:
                out.append(f"linkage: level {i} differs from G({i}) applied to level {i + 1} by {r:.3e}")
        for occ, d in self.constant_violations:
            out.append(f"constant: {occ} has the wrong meaning (distance {d:.3e})")
        for f, a, b, d in self.normality_violations:
            out.append(f"normality: {f} at {a} and {b} differ by {d:.3e}")
        return out

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "linkage_residuals": [float(r) for r in self.linkage],
            "constant_violations": [[str(o), float(d)] for o, d in self.constant_violations],
            "normality_violations": [[str(f), str(a), str(b), float(d)] for f, a, b, d in self.normality_violations],
            "compositional": self.compositional,
        }


def _linkage_residual(expected: Qumix, actual: Qumix) -> float:
    if (
        expected.is_ensemble
        and actual.is_ensemble
        and expected.states.shape == actual.states.shape
        and np.array_equal(expected.weights, actual.weights)
    ):
        # || |a><a| - |b><b| ||_1 <= 2 ||a - b||, summed over members
        diff = np.linalg.norm(expected.states - actual.states, axis=1)
        return float(2.0 * np.dot(expected.weights, diff))
    return trace_distance(expected, actual)


def _apply_product(states: np.ndarray, factors: list[np.ndarray], widths: list[int]) -> np.ndarray:
    k = states.shape[0]
    t = states.reshape((k,) + tuple(1 << w for w in widths))
    for j, f in enumerate(factors):
        t = np.moveaxis(np.tensordot(f, t, axes=([1], [j + 1])), 0, j + 1)
    return t.reshape(k, -1)


def _product_gap(rho: Qumix, factors: list[Qumix], widths: list[int]) -> float:
    """Squared Frobenius distance between ``rho`` and the tensor of ``factors``."""
    mats = [f.array() for f in factors]
    prod_sq = float(np.prod([np.real(np.vdot(m, m)) for m in mats]))
    if rho.is_ensemble:
        applied = _apply_product(rho.states, mats, widths)
        cross = float(np.real(np.einsum("k,ki,ki->", rho.weights, rho.states.conj(), applied)))
    else:
        big = mats[0]
        for m in mats[1:]:
            big = np.kron(big, m)
        cross = float(np.real(np.vdot(big, rho.matrix)))
    return purity(rho) + prod_sq - 2.0 * cross


def _level_is_compositional(rho: Qumix, row: tuple[Occurrence, ...], tol: float) -> bool:
    if len(row) == 1:
        return True
    factors = [reduce_qubits(rho, o.qubits) for o in row]
    if any(f.n > DENSE_MAX_QUBITS for f in factors):
        return False
    if rho.n <= _COMPOSITIONAL_DENSE_MAX:
        return trace_distance(rho, tensor_all(factors)) <= tol
    return _product_gap(rho, factors, [o.width for o in row]) <= _FROBENIUS_SQ_TOL


def validate_model(
    model: ScopedModel,
    *,
    tol: float | None = None,
    compositional: bool = True,
    linkage: bool = True,
) -> Diagnostics:
    """Check linkage, constant meanings and normality; optionally flag compositionality."""
    tol = semantic_tol() if tol is None else tol
    diag = Diagnostics(tol=tol)
    gt = model.gate_tree
    if linkage:
        for i in range(1, model.height):
            diag.linkage.append(_linkage_residual(model.meaning(i), apply_gate(gt.gate(i), model.meaning(i + 1))))

    # atom blocks are never touched by the identity blocks below them, so the
    # top level decides every constant occurrence
    T = model.perspective
    targets = {True: T.truth_local(), False: T.falsity_local()}
    top = model.top
    for occ in model.tree.level(model.height):
        if isinstance(occ.formula, Const):
            red = reduce_qubits(top, (occ.offset,)).array()
            d = float(np.abs(np.linalg.eigvalsh(red - targets[occ.formula.value])).sum())
            if d > tol:
                diag.constant_violations.append((occ, d))

    groups: dict[Formula, list[Occurrence]] = defaultdict(list)
    for occ in model.tree.nodes():
        groups[occ.formula].append(occ)
    for f, occs in groups.items():
        if len(occs) < 2 or isinstance(f, Const):
            continue
        ref = reduce_qubits(model.meaning(occs[0].level), occs[0].qubits)
        for other in occs[1:]:
            red = reduce_qubits(model.meaning(other.level), other.qubits)
            d = trace_distance(ref, red)
            if d > tol:
                diag.normality_violations.append((f, occs[0], other, d))

    if compositional:
        diag.compositional_levels = [
            _level_is_compositional(model.meaning(i), model.tree.level(i), tol)
            for i in range(1, model.height + 1)
        ]
    return diag


# ------------------------------------------------------------ constructions


def extend_model(
    model: ScopedModel,
    beta: Formula | str,
    atom_meanings: Mapping[int, Qumix],
) -> ScopedModel:
    """Model for ``gamma & beta`` that keeps every contextual meaning of ``gamma``.

    Only atom-disjoint ``beta`` is supported: its top block is the tensor of its
    per-occurrence meanings (equal atoms share one meaning) and the new
    conjunction gets a falsity ancilla.
    """
    beta = as_formula(beta)
    shared = atoms(beta) & atoms(model.formula)
    if shared:
        names = ", ".join(f"q{i}" for i in sorted(shared))
        raise ValueError(f"extend_model needs atom-disjoint formulas; shared atoms: {names}")
    T = model.perspective
    beta_top = compositional_top(T, beta, atom_meanings)
    top = tensor(tensor(model.top, beta_top), Qumix.pure(T.zero))
    return build_model(T, conj(model.formula, beta), "top", top)


def transport(model: ScopedModel, perspective: TruthPerspective) -> ScopedModel:
    """Move every level meaning to ``perspective`` by conjugating with ``T' T^dagger`` on all qubits."""
    u = perspective.u @ model.perspective.u.conj().T
    layer = Gate.local_layer(model.n, u, label="transport")
    gt = compile_gate_tree(model.formula, perspective)
    return ScopedModel(perspective, gt, tuple(apply_gate(layer, rho) for rho in model.levels))


def canonical(model: ScopedModel) -> ScopedModel:
    return transport(model, IDENTITY)


def atom_formulas(f: Formula) -> list[Atom]:
    return [Atom(i) for i in sorted(atoms(f))]
