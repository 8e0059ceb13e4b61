"""Syntactical trees and their compilation to gate trees.

``Level_1`` holds the formula itself; ``Level_{i+1}`` replaces every molecular
entry of ``Level_i`` by its immediate subformulas and repeats atomic entries.
The last level contains atomic formulas only.  Levels are numbered from the
bottom (1 = the whole formula, ``height`` = the atoms) and every entry keeps a
stable position.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .formula import Const, Formula, Not, SqrtId, SqrtNot, Toffoli, Xor, as_formula, atomic_complexity
from .gates import Gate, GateSpec, tensor_gates
from .perspective import IDENTITY, TruthPerspective


@dataclass(frozen=True)
class Occurrence:
    """One entry of one level of a syntactical tree.

    ``path`` addresses the node inside the root AST (child indices from the
    root); ``offset`` and ``width`` give its contiguous qubit block.
    """

    level: int
    position: int
    path: tuple[int, ...]
    formula: Formula
    offset: int
    width: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(range(self.offset, self.offset + self.width))

    @property
    def last_qubit(self) -> int:
        return self.offset + self.width - 1

    def __str__(self):
        return f"{self.formula}@L{self.level}.{self.position + 1}"


@dataclass(frozen=True, eq=False)
class SyntacticalTree:
    formula: Formula
    levels: tuple[tuple[Occurrence, ...], ...]

    @property
    def height(self) -> int:
        return len(self.levels)

    @property
    def width(self) -> int:
        return atomic_complexity(self.formula)

    def level(self, i: int) -> tuple[Occurrence, ...]:
        if not 1 <= i <= self.height:
            raise IndexError(f"level {i} outside 1..{self.height}")
        return self.levels[i - 1]

    @property
    def root(self) -> Occurrence:
        return self.levels[0][0]

    def nodes(self) -> tuple[Occurrence, ...]:
        """One occurrence per AST node: the lowest level where the node appears."""
        seen: dict[tuple[int, ...], Occurrence] = {}
        for lvl in self.levels:
            for occ in lvl:
                seen.setdefault(occ.path, occ)
        return tuple(seen.values())

    def occurrences(self, sub: Formula | str) -> list[Occurrence]:
        """Every ``(level, position)`` entry equal to ``sub``."""
        sub = as_formula(sub)
        return [occ for lvl in self.levels for occ in lvl if occ.formula == sub]

    def first(self, sub: Formula | str) -> Occurrence:
        """The lowest-level occurrence of ``sub`` (leftmost on ties)."""
        found = self.occurrences(sub)
        if not found:
            raise KeyError(f"{as_formula(sub)} is not a subformula of {self.formula}")
        return found[0]

    def contains(self, occ: Occurrence) -> bool:
        return (
            1 <= occ.level <= self.height
            and 0 <= occ.position < len(self.levels[occ.level - 1])
            and self.levels[occ.level - 1][occ.position] == occ
        )

    def render(self) -> str:
        """Levels top-down, ``Level_h`` (the atoms) first."""
        lines = []
        for i in range(self.height, 0, -1):
            entries = ", ".join(str(o.formula) for o in self.level(i))
            lines.append(f"Level {i}: ({entries})")
        return "\n".join(lines)


@lru_cache(maxsize=4096)
def _build(f: Formula) -> SyntacticalTree:
    current = [((), f, 0)]
    levels = []
    while True:
        row = tuple(
            Occurrence(len(levels) + 1, pos, path, g, off, atomic_complexity(g))
            for pos, (path, g, off) in enumerate(current)
        )
        levels.append(row)
        if all(g.is_atomic for _, g, _ in current):
            break
        nxt = []
        for path, g, off in current:
            if g.is_atomic:
                nxt.append((path, g, off))
                continue
            for k, child in enumerate(g.children):
                nxt.append((path + (k,), child, off))
                off += atomic_complexity(child)
        current = nxt
    return SyntacticalTree(f, tuple(levels))


def build_tree(f: Formula | str) -> SyntacticalTree:
    return _build(as_formula(f))


# ------------------------------------------------------------------- gate tree


_CONNECTIVE_NAMES = {Not: "NOT", SqrtId: "SQI", SqrtNot: "SQN", Toffoli: "T", Xor: "XOR"}


@lru_cache(maxsize=4096)
def _gate_spec(name: str, params: tuple[int, ...], perspective: TruthPerspective) -> GateSpec:
    return GateSpec(name, params, perspective)


def connective_gate(f: Formula, perspective: TruthPerspective = IDENTITY) -> GateSpec:
    """Gate that maps the meaning of ``f``'s children to the meaning of ``f``."""
    if f.is_atomic:
        return _gate_spec("I", (1,), perspective)
    widths = tuple(atomic_complexity(c) for c in f.children)
    params = (sum(widths),) if len(widths) == 1 else widths
    return _gate_spec(_CONNECTIVE_NAMES[type(f)], params, perspective)


@dataclass(frozen=True, eq=False)
class GateTree:
    """``blocks[i - 1]`` lists the block gates of ``G_(i)``, mapping ``Level_{i+1}`` to ``Level_i``."""

    tree: SyntacticalTree
    perspective: TruthPerspective
    blocks: tuple[tuple[GateSpec, ...], ...]
    gates: tuple[Gate, ...]

    def gate(self, i: int) -> Gate:
        if not 1 <= i < self.tree.height:
            raise IndexError(f"gate level {i} outside 1..{self.tree.height - 1}")
        return self.gates[i - 1]

    def render(self) -> list[str]:
        """``G_(h-1), ..., G_(1)`` as block strings, top gate first."""
        out = []
        for i in range(len(self.blocks), 0, -1):
            out.append(" ⊗ ".join(str(s) for s in self.blocks[i - 1]))
        return out


@lru_cache(maxsize=4096)
def _compile(f: Formula, perspective: TruthPerspective) -> GateTree:
    tree = _build(f)
    blocks, gates = [], []
    for lvl in tree.levels[:-1]:
        specs = tuple(connective_gate(o.formula, perspective) for o in lvl)
        blocks.append(specs)
        gates.append(tensor_gates([s.unitary() for s in specs]))
    return GateTree(tree, perspective, tuple(blocks), tuple(gates))


def compile_gate_tree(tree: SyntacticalTree | Formula | str, perspective: TruthPerspective = IDENTITY) -> GateTree:
    f = tree.formula if isinstance(tree, SyntacticalTree) else as_formula(tree)
    return _compile(f, perspective)


def occurrences(tree: SyntacticalTree, sub: Formula | str) -> list[Occurrence]:
    return tree.occurrences(sub)


def constant_leaves(tree: SyntacticalTree) -> list[Occurrence]:
    return [o for o in tree.level(tree.height) if isinstance(o.formula, Const)]
