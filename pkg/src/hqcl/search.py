"""Counterexample search for holistic consequence, and the classical fragment.

Validity quantifies over every model and every context, so it cannot be
decided by enumeration.  :func:`search_counterexample` is a deterministic,
seeded surrogate: it first sweeps a small palette of atom meanings and then
draws random validated models from one or both generators.  Every candidate
model is described by a JSON spec and built through :func:`load_spec`, so an
emitted counterexample replays through exactly the same code path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ._config import semantic_tol
from .formula import (
    Atom,
    Const,
    Formula,
    Not,
    Toffoli,
    Xor,
    as_formula,
    atoms,
    conj,
    is_subformula,
    subformulas,
)
from .modelspec import load_spec, make_spec, mix_expr, pure_expr
from .perspective import IDENTITY, random_perspective
from .qumix import vector_to_json
from .semantics import probability_of, validate_model
from .tree import build_tree, compile_gate_tree

GENERATORS = ("comp", "ent", "both")
PALETTE = ({"mixed_id": 1}, {"proj": "0"}, {"proj": "1"})


@dataclass
class Verdict:
    """Outcome of a consequence check.

    ``status`` is ``"counterexample"``, ``"not-falsified"`` or (classical
    fragment only) ``"holds-exhaustively"``.
    """

    status: str
    alpha: Formula
    beta: Formula
    contexts: list[Formula]
    trials: int
    generator: str
    context: Formula | None = None
    prob_alpha: float | None = None
    prob_beta: float | None = None
    spec: dict | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def falsified(self) -> bool:
        return self.status == "counterexample"

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "contexts": [str(c) for c in self.contexts],
            "trials": self.trials,
            "generator": self.generator,
            "context": None if self.context is None else str(self.context),
            "prob_alpha": self.prob_alpha,
            "prob_beta": self.prob_beta,
            "spec": self.spec,
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------- generators


def _haar_unitary(rng: np.random.Generator) -> np.ndarray:
    return random_perspective(rng).u


def _leaf_expr(leaf: Formula, atom_exprs: dict[int, dict]) -> dict:
    if isinstance(leaf, Const):
        return {"proj": "1" if leaf.value else "0"}
    return atom_exprs[leaf.index]


def compositional_expr(context: Formula, atom_exprs: dict[int, dict]) -> dict:
    tree = build_tree(context)
    leaves = [o.formula for o in tree.level(tree.height)]
    return {"tensor": [_leaf_expr(leaf, atom_exprs) for leaf in leaves]}


def random_atom_expr(rng: np.random.Generator) -> dict:
    """Random one-qubit meaning: a mixture of the eigenvectors of a Haar unitary."""
    u = _haar_unitary(rng)
    if rng.random() < 0.25:
        return pure_expr(u[:, 0])
    lam = float(rng.uniform(0.02, 0.98))
    return mix_expr([lam, 1.0 - lam], [u[:, 0], u[:, 1]])


def compositional_spec(context: Formula, rng: np.random.Generator) -> dict:
    exprs = {a: random_atom_expr(rng) for a in sorted(atoms(context))}
    return make_spec(context, compositional_expr(context, exprs))


def entangled_spec(context: Formula, rng: np.random.Generator) -> dict:
    """Pure top-level seed that correlates the atoms of ``context``.

    ``|Psi> = sum_x sqrt(p_x) e^{i phi_x} (x)_leaves |e_{a, x_a}>`` where every
    atom ``a`` has its own random orthonormal basis ``e_a`` and constants sit at
    their fixed states.  Every occurrence of an atom carries the same basis
    vector in each branch, so equal subformulas see equal reduced states.
    """
    tree = build_tree(context)
    leaves = [o.formula for o in tree.level(tree.height)]
    names = sorted(atoms(context))
    bases = {a: _haar_unitary(rng) for a in names}
    k = len(names)
    p = rng.dirichlet(np.ones(1 << k))
    phases = np.exp(2j * np.pi * rng.random(1 << k))
    const = {True: np.array([0, 1], dtype=np.complex128), False: np.array([1, 0], dtype=np.complex128)}
    psi = np.zeros(1 << len(leaves), dtype=np.complex128)
    for x, bits in enumerate(itertools.product((0, 1), repeat=k)):
        choice = dict(zip(names, bits))
        vec = np.ones(1, dtype=np.complex128)
        for leaf in leaves:
            factor = const[leaf.value] if isinstance(leaf, Const) else bases[leaf.index][:, choice[leaf.index]]
            vec = np.kron(vec, factor)
        psi += np.sqrt(p[x]) * phases[x] * vec
    psi /= np.linalg.norm(psi)
    return make_spec(context, {"pure": vector_to_json(psi)})


def paired_spec(context: Formula, rng: np.random.Generator) -> dict:
    """Seed whose atom occurrences are paired off in maximally entangled states.

    The non-constant leaves are matched at random (occurrences of different
    atoms may be paired) and every pair carries ``(I (x) V)|Phi+>`` for a
    Haar-random ``V``.  Each atom occurrence then reduces to ``I/2``, so the
    atoms are normal by construction; a leftover leaf is ``I/2`` itself.
    Repeated compound subformulas are left to validation.
    """
    tree = build_tree(context)
    leaves = [o.formula for o in tree.level(tree.height)]
    n = len(leaves)
    free = [i for i, leaf in enumerate(leaves) if not isinstance(leaf, Const)]
    order = list(rng.permutation(free))
    pairs = [(order[2 * j], order[2 * j + 1]) for j in range(len(order) // 2)]
    leftover = order[-1] if len(order) % 2 else None

    def vector(left_bit: int | None) -> np.ndarray:
        psi = np.ones(1, dtype=np.complex128)
        axes: list[int] = []
        for a, b in pairs:
            v = pair_states[(a, b)]
            psi = np.kron(psi, v)
            axes += [a, b]
        for i, leaf in enumerate(leaves):
            if isinstance(leaf, Const):
                psi = np.kron(psi, np.eye(2)[int(leaf.value)])
                axes.append(i)
        if leftover is not None:
            psi = np.kron(psi, np.eye(2)[left_bit])
            axes.append(leftover)
        # reorder tensor factors from construction order to leaf order
        return np.transpose(psi.reshape([2] * n), np.argsort(axes)).reshape(-1)

    pair_states = {}
    for a, b in pairs:
        v = _haar_unitary(rng)
        pair_states[(a, b)] = (np.kron(np.eye(2), v) @ np.array([1, 0, 0, 1])) / np.sqrt(2)
    if leftover is None:
        return make_spec(context, pure_expr(vector(None)))
    return make_spec(context, mix_expr([0.5, 0.5], [vector(0), vector(1)]))


def palette_specs(context: Formula):
    """Every assignment of (1/2 I, P0, P1) to the atoms, in product order."""
    names = sorted(atoms(context))
    for choice in itertools.product(PALETTE, repeat=len(names)):
        yield make_spec(context, compositional_expr(context, dict(zip(names, choice))))


# -------------------------------------------------------------------- search


def _trial_rng(seed: int, context_index: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), context_index, trial]))


def _check(spec: dict, alpha: Formula, beta: Formula, tol: float):
    model = load_spec(spec)
    if not validate_model(model, compositional=False, linkage=False, tol=tol).ok:
        return None
    tree = model.tree
    pa = probability_of(model, tree.first(alpha))
    pb = probability_of(model, tree.first(beta))
    return pa, pb


def iter_model_probabilities(
    context: Formula,
    alpha: Formula,
    beta: Formula,
    *,
    generator: str = "both",
    trials: int = 300,
    seed: int = 0,
    context_index: int = 0,
    palette: bool = True,
    tol: float | None = None,
    notes: list[str] | None = None,
):
    """Yield ``(kind, spec, (p_alpha, p_beta))`` for validated models of ``context``.

    Palette models come first (kind ``"palette"``), then ``trials`` random
    models.  ``"ent"`` draws come from :func:`entangled_spec` or
    :func:`paired_spec` with equal odds.  Draws that fail validation are skipped; after ``10 * trials``
    draws the generator is declared starved and a note is appended.
    """
    tol = semantic_tol() if tol is None else tol
    if palette:
        for spec in palette_specs(context):
            probs = _check(spec, alpha, beta, tol)
            if probs is not None:
                yield "palette", spec, probs
    accepted = attempts = 0
    while accepted < trials:
        if attempts >= 10 * trials:
            if notes is not None:
                notes.append(
                    f"generator starved in context {context}: {accepted} of {trials} models after {attempts} draws"
                )
            return
        rng = _trial_rng(seed, context_index, attempts)
        kind = generator if generator != "both" else ("comp", "ent")[attempts % 2]
        if kind == "comp":
            spec = compositional_spec(context, rng)
        elif rng.random() < 0.5:
            spec = entangled_spec(context, rng)
        else:
            spec = paired_spec(context, rng)
        attempts += 1
        probs = _check(spec, alpha, beta, tol)
        if probs is None:
            continue
        accepted += 1
        yield kind, spec, probs


def default_context(alpha: Formula, beta: Formula) -> Formula:
    return conj(alpha, beta)


def resolve_contexts(alpha: Formula, beta: Formula, contexts=None) -> list[Formula]:
    out = [default_context(alpha, beta)]
    for c in contexts or ():
        c = as_formula(c)
        if c not in out:
            out.append(c)
    for c in out:
        for sub in (alpha, beta):
            if not is_subformula(sub, c):
                raise ValueError(f"{sub} is not a subformula of the context {c}")
    return out


def search_counterexample(
    alpha,
    beta,
    contexts=None,
    *,
    generator: str = "both",
    trials: int = 300,
    seed: int = 0,
    palette: bool = True,
    tol: float | None = None,
) -> Verdict:
    """Look for a model in which ``p(Hol^gamma(alpha)) > p(Hol^gamma(beta))``.

    The default context ``alpha & beta`` is always checked; user contexts are
    added after it.  ``trials`` counts validated random models per context.
    """
    if generator not in GENERATORS:
        raise ValueError(f"generator must be one of {GENERATORS}, got {generator!r}")
    if trials < 0:
        raise ValueError("trials must be non-negative")
    tol = semantic_tol() if tol is None else tol
    alpha, beta = as_formula(alpha), as_formula(beta)
    ctxs = resolve_contexts(alpha, beta, contexts)
    verdict = Verdict("not-falsified", alpha, beta, ctxs, 0, generator)

    def found(spec, ctx, probs):
        verdict.status = "counterexample"
        verdict.context = ctx
        verdict.prob_alpha, verdict.prob_beta = probs
        verdict.spec = spec
        return verdict

    for ci, ctx in enumerate(ctxs):
        for kind, spec, probs in iter_model_probabilities(
            ctx, alpha, beta, generator=generator, trials=trials, seed=seed,
            context_index=ci, palette=palette, tol=tol, notes=verdict.notes,
        ):
            verdict.trials += 1
            if probs[0] > probs[1] + tol:
                return found(spec, ctx, probs)
    verdict.notes.append("only the listed contexts were checked; validity quantifies over all contexts")
    return verdict


def search_equivalence(alpha, beta, contexts=None, **kwargs) -> tuple[Verdict, Verdict]:
    return (
        search_counterexample(alpha, beta, contexts, **kwargs),
        search_counterexample(beta, alpha, contexts, **kwargs),
    )


# --------------------------------------------------------- classical fragment


def is_boolean(f: Formula) -> bool:
    """Connectives among ``~``, ``&``, ``|`` and ``(+)`` plus constants.

    ``&`` is ``T(a, b, f)``, so a Toffoli node belongs to the fragment only
    when its third argument is the constant ``f``.
    """
    for node in subformulas(f):
        if isinstance(node, (Atom, Const, Not, Xor)):
            continue
        if isinstance(node, Toffoli) and node.third == Const(False):
            continue
        return False
    return True


def _register_index(bits: list[int]) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | b
    return out


def check_classical_consequence(alpha, beta, *, tol: float | None = None) -> Verdict:
    """Exhaustive check over the register models of the context ``alpha & beta``.

    Each assignment of ``P0``/``P1`` to the atoms gives a compositional model
    whose top level is a canonical register.  The Boolean gates permute
    registers, so every level stays a register and the probability of an
    occurrence is the bit of its last qubit.
    """
    tol = semantic_tol() if tol is None else tol
    alpha, beta = as_formula(alpha), as_formula(beta)
    for f in (alpha, beta):
        if not is_boolean(f):
            raise ValueError(f"{f} is outside the Boolean fragment")
    ctx = default_context(alpha, beta)
    gt = compile_gate_tree(ctx, IDENTITY)
    tree = gt.tree
    n, h = tree.width, tree.height
    names = sorted(atoms(ctx))
    leaves = [o.formula for o in tree.level(h)]
    assignments = list(itertools.product((0, 1), repeat=len(names)))
    tops = np.array(
        [
            _register_index([(int(leaf.value) if isinstance(leaf, Const) else dict(zip(names, bits))[leaf.index]) for leaf in leaves])
            for bits in assignments
        ],
        dtype=np.int64,
    )
    levels = [None] * h
    levels[h - 1] = tops
    for i in range(h - 1, 0, -1):
        levels[i - 1] = gt.gate(i).apply_basis(levels[i])
    oa, ob = tree.first(alpha), tree.first(beta)
    pa = (levels[oa.level - 1] >> (n - 1 - oa.last_qubit)) & 1
    pb = (levels[ob.level - 1] >> (n - 1 - ob.last_qubit)) & 1
    bad = np.nonzero(pa > pb)[0]
    verdict = Verdict("holds-exhaustively", alpha, beta, [ctx], len(assignments), "registers")
    if bad.size:
        r = int(bad[0])
        exprs = {a: {"proj": str(b)} for a, b in zip(names, assignments[r])}
        verdict.status = "counterexample"
        verdict.context = ctx
        verdict.prob_alpha, verdict.prob_beta = float(pa[r]), float(pb[r])
        verdict.spec = make_spec(ctx, compositional_expr(ctx, exprs))
    return verdict


def truth_value(f: Formula, valuation: dict[int, bool]) -> bool:
    """Two-valued evaluation of a Boolean formula."""
    if isinstance(f, Atom):
        return bool(valuation[f.index])
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        return not truth_value(f.arg, valuation)
    if isinstance(f, Xor):
        return truth_value(f.first, valuation) != truth_value(f.second, valuation)
    if isinstance(f, Toffoli):
        return (truth_value(f.first, valuation) and truth_value(f.second, valuation)) != truth_value(f.third, valuation)
    raise ValueError(f"{f} is outside the Boolean fragment")


def truth_table_consequence(alpha, beta) -> bool:
    alpha, beta = as_formula(alpha), as_formula(beta)
    names = sorted(atoms(alpha) | atoms(beta))
    for bits in itertools.product((False, True), repeat=len(names)):
        v = dict(zip(names, bits))
        if truth_value(alpha, v) and not truth_value(beta, v):
            return False
    return True
