"""Truth-perspectives: 2x2 unitaries that decide which basis counts as Truth/Falsity."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from ._config import DENSE_MAX_QUBITS, SEMANTIC_TOL
from .qumix import DimensionError, Qumix

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)


@dataclass(frozen=True, eq=False)
class TruthPerspective:
    """A truth-perspective ``T``: ``|1_T> = T|1>`` is Truth, ``|0_T> = T|0>`` Falsity."""

    u: np.ndarray
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        u = np.array(self.u, dtype=np.complex128)
        if u.shape != (2, 2):
            raise ValueError(f"a truth-perspective is a 2x2 matrix, got shape {u.shape}")
        if np.max(np.abs(u.conj().T @ u - np.eye(2))) > SEMANTIC_TOL:
            raise ValueError("a truth-perspective must be unitary")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "_is_identity", bool(np.array_equal(u, np.eye(2))))
        object.__setattr__(self, "_hash", hash(u.tobytes()))

    @classmethod
    def identity(cls) -> "TruthPerspective":
        return cls(np.eye(2), name="identity")

    @classmethod
    def hadamard(cls) -> "TruthPerspective":
        return cls(_HADAMARD, name="hadamard")

    @classmethod
    def named(cls, name: str) -> "TruthPerspective":
        try:
            return {"identity": cls.identity, "hadamard": cls.hadamard}[name]()
        except KeyError:
            raise ValueError(f"unknown truth-perspective {name!r}") from None

    @property
    def is_identity(self) -> bool:
        return self._is_identity

    @property
    def one(self) -> np.ndarray:
        return self.u[:, 1].copy()

    @property
    def zero(self) -> np.ndarray:
        return self.u[:, 0].copy()

    def truth_local(self) -> np.ndarray:
        """``T|1><1|T^dagger`` on one qubit."""
        return np.outer(self.one, self.one.conj())

    def falsity_local(self) -> np.ndarray:
        return np.outer(self.zero, self.zero.conj())

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, TruthPerspective) and np.array_equal(self.u, other.u)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"TruthPerspective({self.name or self.u.round(6).tolist()})"


IDENTITY = TruthPerspective.identity()


def random_perspective(rng: np.random.Generator) -> TruthPerspective:
    """Haar-random 2x2 unitary."""
    z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return TruthPerspective(q * (d / np.abs(d)))


def perspective_to_json(T: TruthPerspective) -> dict:
    if T.name in ("identity", "hadamard"):
        return {"name": T.name}
    return {"matrix": [[[float(z.real), float(z.imag)] for z in row] for row in T.u]}


def perspective_from_json(data) -> TruthPerspective:
    if data is None:
        return IDENTITY
    if isinstance(data, str):
        return TruthPerspective.named(data)
    if "name" in data:
        return TruthPerspective.named(data["name"])
    if "matrix" in data:
        m = np.asarray(data["matrix"], dtype=np.float64)
        if m.shape != (2, 2, 2):
            raise ValueError("perspective matrix must be [[[re,im],[re,im]],[[re,im],[re,im]]]")
        return TruthPerspective(m[..., 0] + 1j * m[..., 1])
    raise ValueError(f"cannot read a truth-perspective from {data!r}")


# ------------------------------------------------------------- n-fold extension


@dataclass(frozen=True, eq=False)
class LocalOperator:
    """``I^(n-1) (x) local`` acting on the last qubit of an ``n``-qubit space."""

    n: int
    local: np.ndarray

    def apply(self, states: np.ndarray) -> np.ndarray:
        return _kernels.active.rotate(np.ascontiguousarray(states), self.local, 0)

    def dense(self) -> np.ndarray:
        if self.n > DENSE_MAX_QUBITS:
            raise DimensionError(f"refusing to densify a {self.n}-qubit operator")
        return np.kron(np.eye(1 << (self.n - 1)), self.local)


def extend(T: TruthPerspective, n: int):
    """``T^(n) = T (x) ... (x) T`` as a structured unitary."""
    from .gates import Gate

    if n < 1:
        raise ValueError("n must be >= 1")
    return Gate.local_layer(n, T.u, label=f"T^({n})")


def t_register(T: TruthPerspective, bits: Sequence[int]) -> np.ndarray:
    """``|x1_T, ..., xn_T> = T|x1> (x) ... (x) T|xn>``."""
    bits = list(bits)
    if not bits:
        raise ValueError("a register needs at least one bit")
    vec = np.ones(1, dtype=np.complex128)
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bits must be 0 or 1, got {b!r}")
        vec = np.kron(vec, T.u[:, b])
    return vec


def truth_projector(T: TruthPerspective, n: int) -> LocalOperator:
    """``T-P_1^(n)``: projector onto the span of the T-true registers."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return LocalOperator(n, T.truth_local())


def falsity_projector(T: TruthPerspective, n: int) -> LocalOperator:
    if n < 1:
        raise ValueError("n must be >= 1")
    return LocalOperator(n, T.falsity_local())


def last_qubit_state(rho: Qumix) -> np.ndarray:
    from .qumix import reduce_qubits

    return reduce_qubits(rho, (rho.n - 1,)).array()


def probability(T: TruthPerspective, rho: Qumix, *, tol: float = SEMANTIC_TOL) -> float:
    """``Prob_T(rho) = tr(T-P_1^(n) rho)``, clamped to ``[0, 1]``.

    Only the last qubit is inspected, so the cost is linear in the ensemble size
    times ``2**n`` and no dense operator is ever built.
    """
    r = last_qubit_state(rho) if rho.n > 1 else rho.array()
    p = float(np.real(np.trace(T.truth_local() @ r)))
    if p < -tol or p > 1 + tol:
        raise ValueError(f"probability {p!r} outside [0, 1] beyond tolerance")
    return min(1.0, max(0.0, p))


def preorder_le(T: TruthPerspective, rho: Qumix, sigma: Qumix, *, tol: float = SEMANTIC_TOL) -> bool:
    """``rho <=_T sigma`` iff ``Prob_T(rho) <= Prob_T(sigma)`` (up to ``tol``)."""
    return probability(T, rho) <= probability(T, sigma) + tol
