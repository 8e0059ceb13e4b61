import pytest

from hqcl import TruthPerspective, build_tree, compile_gate_tree, parse
from hqcl.formula import FALSE
from hqcl.tree import constant_leaves, occurrences


def test_worked_example_tree():
    tree = build_tree("~T(q1,~q1,f)")
    assert tree.height == 4 and tree.width == 3
    assert tree.render().splitlines() == [
        "Level 4: (q1, q1, f)",
        "Level 3: (q1, ~q1, f)",
        "Level 2: (q1 & ~q1)",
        "Level 1: (~(q1 & ~q1))",
    ]
    fs = [(o.level, o.position, o.offset) for o in tree.occurrences(FALSE)]
    assert fs == [(3, 2, 2), (4, 2, 2)]


def test_worked_example_gate_tree():
    gt = compile_gate_tree("~T(q1,~q1,f)")
    assert gt.render() == ["I(1) ⊗ NOT(1) ⊗ I(1)", "T(1,1,1)", "NOT(3)"]
    assert gt.gate(1).n == 3
    with pytest.raises(IndexError):
        gt.gate(4)


def test_atomic_formula_has_one_level():
    tree = build_tree("q1")
    assert tree.height == 1 and tree.root.qubits == (0,)
    assert compile_gate_tree("q1").render() == []


def test_offsets_are_contiguous_blocks():
    tree = build_tree("(q1 & q2) (+) sid q3")
    for lvl in tree.levels:
        offset = 0
        for occ in lvl:
            assert occ.offset == offset
            offset += occ.width
        assert offset == tree.width


def test_nodes_are_lowest_level_per_path():
    tree = build_tree("q1 & ~q2")
    nodes = tree.nodes()
    assert len({o.path for o in nodes}) == len(nodes) == 5
    atom = [o for o in nodes if str(o.formula) == "q1"][0]
    assert atom.level == 2


def test_occurrences_and_constants():
    tree = build_tree("q1 & q1")
    assert len(occurrences(tree, "q1")) == 2
    assert [o.position for o in constant_leaves(tree)] == [2]
    assert str(tree.first("q1")) == "q1@L2.1"
    assert tree.contains(tree.root)


def test_gate_tree_uses_twins():
    h = TruthPerspective.hadamard()
    gt = compile_gate_tree(parse("~q1"), h)
    assert gt.perspective == h
    # the twin NOT maps |1_T> to |0_T>
    out = gt.gate(1).apply_vector(h.one)
    assert abs(abs(out @ h.zero.conj()) - 1) < 1e-12
