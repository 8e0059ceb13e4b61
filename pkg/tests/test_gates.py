import itertools

import numpy as np
import pytest

from hqcl import (
    IDENTITY,
    GateSpec,
    Qumix,
    TruthPerspective,
    and_gate,
    apply_gate,
    hadamard,
    identity,
    ket,
    not_gate,
    probability,
    random_perspective,
    sqrt_not,
    tensor_gates,
    toffoli,
    twin_gate,
    xor,
)
from hqcl.gates import Gate, gate_from_specs


def basis_image(gate, bits):
    out = gate.apply_vector(ket(bits))
    return format(int(np.argmax(np.abs(out))), f"0{gate.n}b")


@pytest.mark.parametrize("bits", ["000", "101", "110", "111"])
def test_toffoli_truth_table(bits):
    x, y, z = map(int, bits)
    assert basis_image(toffoli(1, 1, 1), bits) == f"{x}{y}{z ^ (x & y)}"


@pytest.mark.parametrize("m,n", [(1, 1), (2, 1), (1, 3)])
def test_xor_flips_last_qubit(m, n):
    g = xor(m, n)
    for bits in itertools.product("01", repeat=m + n):
        bits = "".join(bits)
        expected = bits[:-1] + str(int(bits[-1]) ^ int(bits[m - 1]))
        assert basis_image(g, bits) == expected


def test_not_touches_only_last_qubit():
    assert basis_image(not_gate(3), "010") == "011"


@pytest.mark.parametrize("n", [1, 2, 3])
def test_square_roots(n):
    h, s = hadamard(n).matrix(), sqrt_not(n).matrix()
    np.testing.assert_allclose(h @ h, np.eye(1 << n), atol=1e-12)
    np.testing.assert_allclose(s @ s, not_gate(n).matrix(), atol=1e-12)


@pytest.mark.parametrize("g", [toffoli(1, 2, 1), xor(2, 1), sqrt_not(2), hadamard(1)])
def test_gates_are_unitary(g):
    u = g.matrix()
    np.testing.assert_allclose(u @ u.conj().T, np.eye(1 << g.n), atol=1e-12)
    np.testing.assert_allclose(g.adjoint().matrix(), u.conj().T, atol=1e-12)


def test_twin_gate_is_conjugation(rng):
    T = random_perspective(rng)
    g = toffoli(1, 1, 1)
    big = np.kron(np.kron(T.u, T.u), T.u)
    np.testing.assert_allclose(twin_gate(g, T).matrix(), big @ g.matrix() @ big.conj().T, atol=1e-12)
    assert twin_gate(g, IDENTITY) is g


def test_tensor_and_shift():
    g = tensor_gates([identity(1), not_gate(1), identity(1)])
    np.testing.assert_allclose(g.matrix(), np.kron(np.kron(np.eye(2), not_gate(1).matrix()), np.eye(2)))
    assert g.label == "I(1) ⊗ NOT(1) ⊗ I(1)"


def test_then_composes_in_order():
    g = not_gate(2).then(xor(1, 1))
    np.testing.assert_allclose(g.matrix(), xor(1, 1).matrix() @ not_gate(2).matrix())


def test_apply_basis_matches_vectors():
    g = toffoli(2, 1, 1).then(not_gate(4))
    idx = np.arange(16)
    images = g.apply_basis(idx)
    for i in idx:
        assert images[i] == np.argmax(np.abs(g.apply_vector(np.eye(16)[i])))
    with pytest.raises(ValueError):
        hadamard(2).apply_basis(idx[:4])


def test_and_gate_under_hadamard_perspective():
    h = TruthPerspective.hadamard()
    rho = Qumix.pure(np.kron(h.one, h.one))
    assert probability(h, and_gate(h, 1, 1, rho)) == pytest.approx(1.0)


def test_dense_qumix_gate(rng):
    rho = Qumix.maximally_mixed(2).to_dense()
    out = apply_gate(xor(1, 1), rho)
    assert not out.is_ensemble
    np.testing.assert_allclose(out.array(), np.eye(4) / 4, atol=1e-12)


@pytest.mark.parametrize(
    "name,params,error",
    [("NOT", (1, 2), "parameter"), ("FOO", (1,), "unknown"), ("T", (0, 1, 1), ">= 1"), ("AND", (1,), "AND")],
)
def test_gate_spec_validation(name, params, error):
    with pytest.raises(ValueError, match=error):
        GateSpec(name, params)


def test_gate_spec_basics():
    spec = GateSpec("toffoli", (1, 2, 1))
    assert str(spec) == "T(1,2,1)" and spec.width == 4
    assert isinstance(gate_from_specs([spec, GateSpec("I", (1,))]), Gate)
    with pytest.raises(ValueError):
        GateSpec("AND", (1, 1)).unitary()
    out = GateSpec("AND", (1, 1)).apply(Qumix.pure(ket("11")))
    assert out.n == 3 and probability(IDENTITY, out) == pytest.approx(1.0)
