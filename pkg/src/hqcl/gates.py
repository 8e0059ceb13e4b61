"""Structured quantum gates, their twins under a truth-perspective, and AND.

Gates are never stored as dense matrices.  A :class:`Gate` is a sequence of
primitive operations on an ``n``-qubit register:

* ``("flip", controls, target)`` - flip ``target`` when every control is 1
  (NOT, XOR and Toffoli are all of this form);
* ``("rot", qubit, u)`` - apply the 2x2 unitary ``u`` to one qubit.

Qubits are 0-based with qubit 0 the first tensor factor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from ._config import ALGEBRAIC_TOL, DENSE_MAX_QUBITS
from .perspective import IDENTITY, TruthPerspective
from .qumix import DimensionError, Qumix, tensor

NOT_1 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SQI_1 = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
SQN_1 = np.array([[1 - 1j, 1 + 1j], [1 + 1j, 1 - 1j]], dtype=np.complex128) / 2


@dataclass(frozen=True, eq=False)
class Gate:
    """A unitary on ``n`` qubits given as primitive flips and one-qubit rotations."""

    n: int
    ops: tuple = ()
    label: str = field(default="G", compare=False)

    @classmethod
    def local_layer(cls, n: int, u: np.ndarray, label: str = "U") -> "Gate":
        u = np.asarray(u, dtype=np.complex128)
        return cls(n, tuple(("rot", q, u) for q in range(n)), label)

    def apply_states(self, states: np.ndarray) -> np.ndarray:
        """Apply the gate to row-stacked state vectors of shape ``(k, 2**n)``."""
        if states.shape[-1] != 1 << self.n:
            raise DimensionError(f"{self.label} acts on {self.n} qubits, got dim {states.shape[-1]}")
        k = _kernels.active
        out = np.ascontiguousarray(states, dtype=np.complex128)
        for op in self.ops:
            if op[0] == "flip":
                _, controls, target = op
                cmask = 0
                for c in controls:
                    cmask |= 1 << (self.n - 1 - c)
                out = k.flip(out, cmask, 1 << (self.n - 1 - target))
            else:
                _, qubit, u = op
                out = k.rotate(out, u, self.n - 1 - qubit)
        return out

    @property
    def is_permutation(self) -> bool:
        return all(op[0] == "flip" for op in self.ops)

    def apply_basis(self, indices: np.ndarray) -> np.ndarray:
        """Image of canonical basis registers (given by index) under a permutation gate."""
        if not self.is_permutation:
            raise ValueError(f"{self.label} is not a permutation of the canonical basis")
        out = np.array(indices, dtype=np.int64, copy=True)
        for _, controls, target in self.ops:
            cmask = 0
            for c in controls:
                cmask |= 1 << (self.n - 1 - c)
            hit = (out & cmask) == cmask
            out[hit] ^= 1 << (self.n - 1 - target)
        return out

    def apply_vector(self, vec) -> np.ndarray:
        return self.apply_states(np.asarray(vec, dtype=np.complex128)[None, :])[0]

    def __call__(self, rho: Qumix) -> Qumix:
        return apply_gate(self, rho)

    def adjoint(self) -> "Gate":
        ops = []
        for op in reversed(self.ops):
            if op[0] == "flip":
                ops.append(op)
            else:
                ops.append(("rot", op[1], op[2].conj().T))
        return Gate(self.n, tuple(ops), f"{self.label}^dagger")

    def then(self, other: "Gate") -> "Gate":
        """Gate that applies ``self`` first and ``other`` afterwards."""
        if other.n != self.n:
            raise DimensionError("composed gates must act on the same number of qubits")
        return Gate(self.n, self.ops + other.ops, f"{other.label}*{self.label}")

    def shifted(self, offset: int, total: int) -> "Gate":
        """The same gate acting on qubits ``offset..offset+n-1`` of a ``total``-qubit space."""
        ops = []
        for op in self.ops:
            if op[0] == "flip":
                ops.append(("flip", tuple(c + offset for c in op[1]), op[2] + offset))
            else:
                ops.append(("rot", op[1] + offset, op[2]))
        return Gate(total, tuple(ops), self.label)

    def matrix(self) -> np.ndarray:
        """Dense matrix (identity checks only, ``n <= 10``)."""
        if self.n > DENSE_MAX_QUBITS:
            raise DimensionError(f"dense gates are limited to {DENSE_MAX_QUBITS} qubits")
        return self.apply_states(np.eye(1 << self.n, dtype=np.complex128)).T

    def __repr__(self):
        return f"Gate({self.label}, n={self.n})"


def _check_arity(*sizes: int) -> None:
    if any(int(s) < 1 for s in sizes):
        raise ValueError(f"gate arities must be >= 1, got {sizes}")


def identity(n: int) -> Gate:
    _check_arity(n)
    return Gate(n, (), f"I({n})")


def not_gate(n: int) -> Gate:
    """``NOT^(n)``: flips the last qubit."""
    _check_arity(n)
    return Gate(n, (("flip", (), n - 1),), f"NOT({n})")


def toffoli(m: int, n: int, p: int) -> Gate:
    """``T^(m,n,p)``: last qubit ``z_p`` becomes ``x_m y_n + z_p (mod 2)``."""
    _check_arity(m, n, p)
    return Gate(m + n + p, (("flip", (m - 1, m + n - 1), m + n + p - 1),), f"T({m},{n},{p})")


def xor(m: int, n: int) -> Gate:
    """``XOR^(m,n)``: last qubit ``y_n`` becomes ``x_m + y_n (mod 2)``."""
    _check_arity(m, n)
    return Gate(m + n, (("flip", (m - 1,), m + n - 1),), f"XOR({m},{n})")


def hadamard(n: int) -> Gate:
    """``sqrt(I)^(n)``: Hadamard on the last qubit."""
    _check_arity(n)
    return Gate(n, (("rot", n - 1, SQI_1),), f"SQI({n})")


def sqrt_not(n: int) -> Gate:
    """``sqrt(NOT)^(n)`` on the last qubit."""
    _check_arity(n)
    return Gate(n, (("rot", n - 1, SQN_1),), f"SQN({n})")


def tensor_gates(gates: Sequence[Gate]) -> Gate:
    """``G1 (x) G2 (x) ...`` on consecutive qubit blocks."""
    total = sum(g.n for g in gates)
    ops: list = []
    offset = 0
    for g in gates:
        ops.extend(g.shifted(offset, total).ops)
        offset += g.n
    return Gate(total, tuple(ops), " ⊗ ".join(g.label for g in gates))


def twin_gate(g: Gate, T: TruthPerspective) -> Gate:
    """``G_T = T^(n) G T^(n)^dagger``."""
    if T.is_identity or not g.ops:
        return g
    touched = sorted({q for op in g.ops for q in ((op[1] + (op[2],)) if op[0] == "flip" else (op[1],))})
    udag = T.u.conj().T
    pre = tuple(("rot", q, udag) for q in touched)
    post = tuple(("rot", q, T.u) for q in touched)
    return Gate(g.n, pre + g.ops + post, f"{g.label}_T")


def apply_gate(g: Gate, rho: Qumix) -> Qumix:
    """Qumix gate ``rho -> G rho G^dagger``."""
    if g.n != rho.n:
        raise DimensionError(f"{g.label} acts on {g.n} qubits, qumix has {rho.n}")
    if not g.ops:
        return rho
    return rho.conjugate_by(g.apply_states)


def and_gate(T: TruthPerspective, m: int, n: int, rho: Qumix) -> Qumix:
    """Holistic conjunction ``AND_T^(m,n)(rho) = T_T^(m,n,1)(rho (x) T-P_0^(1))``."""
    _check_arity(m, n)
    if rho.n != m + n:
        raise DimensionError(f"AND({m},{n}) needs a {m + n}-qubit qumix, got {rho.n}")
    ancilla = Qumix.pure(T.zero)
    return apply_gate(twin_gate(toffoli(m, n, 1), T), tensor(rho, ancilla))


def toffoli_decomposition_check(m: int, n: int, *, tol: float = ALGEBRAIC_TOL) -> bool:
    """Check ``T^(m,n,1) = (I - P1m (x) P1n) (x) I + P1m (x) P1n (x) NOT`` densely."""
    _check_arity(m, n)
    if m + n + 1 > DENSE_MAX_QUBITS:
        raise DimensionError(f"decomposition check limited to {DENSE_MAX_QUBITS} qubits")
    p1 = np.diag([0.0, 1.0]).astype(np.complex128)

    def last_true(k: int) -> np.ndarray:
        return np.kron(np.eye(1 << (k - 1)), p1)

    both = np.kron(last_true(m), last_true(n))
    rhs = np.kron(np.eye(1 << (m + n)) - both, np.eye(2)) + np.kron(both, NOT_1)
    return bool(np.max(np.abs(toffoli(m, n, 1).matrix() - rhs)) <= tol)


# ------------------------------------------------------------------ GateSpec

_BUILDERS = {
    "NOT": (not_gate, 1),
    "T": (toffoli, 3),
    "TOFFOLI": (toffoli, 3),
    "XOR": (xor, 2),
    "SQI": (hadamard, 1),
    "SQN": (sqrt_not, 1),
    "I": (identity, 1),
}


@lru_cache(maxsize=2048)
def _twin_of(name: str, params: tuple[int, ...], T: TruthPerspective) -> Gate:
    return twin_gate(_BUILDERS[name][0](*params), T)


@dataclass(frozen=True)
class GateSpec:
    """A named gate with its arity parameters and truth-perspective."""

    name: str
    params: tuple[int, ...]
    perspective: TruthPerspective = IDENTITY

    def __post_init__(self):
        name = self.name.upper()
        if name == "TOFFOLI":
            name = "T"
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "params", tuple(int(p) for p in self.params))
        if name == "AND":
            if len(self.params) != 2:
                raise ValueError("AND takes parameters (m, n)")
        elif name not in _BUILDERS:
            raise ValueError(f"unknown gate {self.name!r}")
        elif len(self.params) != _BUILDERS[name][1]:
            raise ValueError(f"{name} takes {_BUILDERS[name][1]} parameter(s), got {self.params}")
        _check_arity(*self.params)

    @property
    def width(self) -> int:
        """Qubits of the input space."""
        return sum(self.params)

    def unitary(self) -> Gate:
        if self.name == "AND":
            raise ValueError("AND appends an ancilla and is not a unitary on its input")
        return _twin_of(self.name, self.params, self.perspective)

    def apply(self, rho: Qumix) -> Qumix:
        if self.name == "AND":
            return and_gate(self.perspective, self.params[0], self.params[1], rho)
        return apply_gate(self.unitary(), rho)

    def __str__(self):
        return f"{self.name}({','.join(map(str, self.params))})"


def gate_from_specs(specs: Iterable[GateSpec]) -> Gate:
    return tensor_gates([s.unitary() for s in specs])
