"""State vectors, qumixes (density operators), tensor products and reduced states.

Index convention: ``|x1,...,xn>`` sits at amplitude index ``sum(x_i * 2**(n-i))``,
i.e. the first tensor factor is the most significant bit and the last qubit
varies fastest.  ``|0> = (1, 0)`` and ``|1> = (0, 1)``.

A :class:`Qumix` is held either as an ensemble ``sum_i w_i |psi_i><psi_i|`` (a
weight vector plus a row-stacked array of unit vectors) or as a dense
``2**n x 2**n`` matrix.  Dense matrices are only allowed up to
:data:`~hqcl._config.DENSE_MAX_QUBITS` qubits; larger spaces must use ensembles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels
from ._config import DENSE_MAX_QUBITS, MIN_WEIGHT, PROPER_MIXTURE_TOL, SEMANTIC_TOL


class DimensionError(ValueError):
    """Operands live in incompatible spaces."""


def _qubits_for(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or (1 << n) != dim:
        raise DimensionError(f"dimension {dim} is not 2**n with n >= 1")
    return n


def state_vector(amplitudes, *, quregister: bool = True, tol: float = SEMANTIC_TOL) -> np.ndarray:
    """Validate ``amplitudes`` as a state vector of ``2**n`` complex entries.

    With ``quregister=True`` the squared norm must be 1 within ``tol``.
    """
    vec = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    _qubits_for(vec.size)
    if quregister:
        norm2 = float(np.vdot(vec, vec).real)
        if abs(norm2 - 1.0) > tol:
            raise ValueError(f"quregister must have unit norm, got |psi|^2 = {norm2!r}")
    return vec


def ket(bits: Sequence[int] | str) -> np.ndarray:
    """Canonical register ``|x1,...,xn>``; ``bits`` may be a string like ``"010"``."""
    if isinstance(bits, str):
        bits = [int(c) for c in bits]
    if not bits:
        raise ValueError("a register needs at least one bit")
    index = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bits must be 0 or 1, got {b!r}")
        index = (index << 1) | b
    vec = np.zeros(1 << len(bits), dtype=np.complex128)
    vec[index] = 1.0
    return vec


@dataclass(frozen=True, eq=False)
class Qumix:
    """A density operator on ``n`` qubits, stored as an ensemble or densely.

    Build instances with :meth:`pure`, :meth:`from_ensemble`, :meth:`from_dense`
    or :meth:`maximally_mixed`; they validate the invariants and freeze the arrays.
    """

    n: int
    weights: np.ndarray | None = field(default=None, repr=False)
    states: np.ndarray | None = field(default=None, repr=False)
    matrix: np.ndarray | None = field(default=None, repr=False)

    # -- constructors ---------------------------------------------------

    @classmethod
    def pure(cls, amplitudes, *, tol: float = SEMANTIC_TOL) -> "Qumix":
        vec = state_vector(amplitudes, tol=tol)
        return cls._ensemble_unchecked(np.ones(1), vec[None, :])

    @classmethod
    def from_ensemble(cls, weights, states, *, tol: float = SEMANTIC_TOL) -> "Qumix":
        w = np.asarray(weights, dtype=np.float64).reshape(-1)
        s = np.array(states, dtype=np.complex128, ndmin=2)
        if s.shape[0] != w.size:
            raise ValueError(f"{w.size} weights for {s.shape[0]} states")
        if w.size == 0:
            raise ValueError("an ensemble needs at least one member")
        _qubits_for(s.shape[1])
        if np.any(w <= MIN_WEIGHT):
            raise ValueError("ensemble weights must be > 1e-12")
        if abs(w.sum() - 1.0) > tol:
            raise ValueError(f"ensemble weights must sum to 1, got {w.sum()!r}")
        norms = np.einsum("ki,ki->k", s.conj(), s).real
        if np.any(np.abs(norms - 1.0) > tol):
            raise ValueError("every ensemble member must be a unit vector")
        return cls._ensemble_unchecked(w, s)

    @classmethod
    def from_dense(cls, matrix, *, tol: float = SEMANTIC_TOL) -> "Qumix":
        m = np.array(matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got shape {m.shape}")
        n = _qubits_for(m.shape[0])
        if n > DENSE_MAX_QUBITS:
            raise DimensionError(f"dense qumixes are limited to {DENSE_MAX_QUBITS} qubits")
        if np.max(np.abs(m - m.conj().T)) > tol:
            raise ValueError("density matrix must be Hermitian")
        if abs(np.trace(m) - 1.0) > tol:
            raise ValueError(f"density matrix must have trace 1, got {np.trace(m)!r}")
        if np.linalg.eigvalsh(m).min() < -tol:
            raise ValueError("density matrix must be positive semidefinite")
        return cls._dense_unchecked(m)

    @classmethod
    def maximally_mixed(cls, n: int) -> "Qumix":
        """``I^(n) / 2**n`` as a uniform ensemble over the canonical basis."""
        dim = 1 << n
        return cls._ensemble_unchecked(np.full(dim, 1.0 / dim), np.eye(dim, dtype=np.complex128))

    @classmethod
    def _ensemble_unchecked(cls, weights: np.ndarray, states: np.ndarray) -> "Qumix":
        w = np.ascontiguousarray(weights, dtype=np.float64)
        s = np.ascontiguousarray(states, dtype=np.complex128)
        w.setflags(write=False)
        s.setflags(write=False)
        return cls(n=_qubits_for(s.shape[1]), weights=w, states=s)

    @classmethod
    def _dense_unchecked(cls, matrix: np.ndarray) -> "Qumix":
        m = np.ascontiguousarray(matrix, dtype=np.complex128)
        m.setflags(write=False)
        return cls(n=_qubits_for(m.shape[0]), matrix=m)

    # -- representation ---------------------------------------------------

    @property
    def is_ensemble(self) -> bool:
        return self.states is not None

    @property
    def dim(self) -> int:
        return 1 << self.n

    @property
    def rank_bound(self) -> int:
        return self.states.shape[0] if self.is_ensemble else self.dim

    def to_dense(self) -> "Qumix":
        if not self.is_ensemble:
            return self
        if self.n > DENSE_MAX_QUBITS:
            raise DimensionError(
                f"refusing to densify a {self.n}-qubit qumix (limit {DENSE_MAX_QUBITS})"
            )
        return Qumix._dense_unchecked(_ensemble_matrix(self.weights, self.states))

    def to_ensemble(self) -> "Qumix":
        if self.is_ensemble:
            return self
        vals, vecs = np.linalg.eigh(self.matrix)
        keep = vals > MIN_WEIGHT
        return Qumix._ensemble_unchecked(vals[keep], vecs[:, keep].T)

    def array(self) -> np.ndarray:
        """Dense matrix of this qumix (only up to the dense qubit limit)."""
        return self.to_dense().matrix

    def conjugate_by(self, apply: Callable[[np.ndarray], np.ndarray]) -> "Qumix":
        """``U rho U^dagger``, where ``apply`` maps row-stacked vectors ``v`` to ``U v``."""
        if self.is_ensemble:
            return Qumix._ensemble_unchecked(self.weights, apply(self.states))
        left = apply(np.ascontiguousarray(self.matrix.T)).T
        out = apply(np.ascontiguousarray(left.conj())).conj()
        return Qumix._dense_unchecked((out + out.conj().T) / 2)

    def __repr__(self) -> str:
        kind = f"ensemble[{self.states.shape[0]}]" if self.is_ensemble else "dense"
        return f"Qumix(n={self.n}, {kind})"


def _ensemble_matrix(weights: np.ndarray, states: np.ndarray) -> np.ndarray:
    return (states.T * weights) @ states.conj()


def as_qumix(value) -> Qumix:
    """Coerce a Qumix, a state vector or a density matrix into a :class:`Qumix`."""
    if isinstance(value, Qumix):
        return value
    arr = np.asarray(value, dtype=np.complex128)
    if arr.ndim == 1:
        return Qumix.pure(arr)
    return Qumix.from_dense(arr)


def projector(amplitudes) -> Qumix:
    """``P_|psi>`` for a quregister ``|psi>``."""
    return Qumix.pure(amplitudes)


# ------------------------------------------------------------------ operators


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """An explicit ``2**n x 2**n`` operator with a kind tag."""

    entries: np.ndarray
    kind: str = "general"

    def __post_init__(self):
        m = np.array(self.entries, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"operator must be square, got shape {m.shape}")
        _qubits_for(m.shape[0])
        if self.kind not in ("unitary", "projector", "hermitian", "general"):
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.kind == "unitary":
            if np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) > SEMANTIC_TOL:
                raise ValueError("operator tagged unitary is not unitary")
        if self.kind in ("projector", "hermitian"):
            if np.max(np.abs(m - m.conj().T)) > SEMANTIC_TOL:
                raise ValueError(f"operator tagged {self.kind} is not self-adjoint")
        if self.kind == "projector" and np.max(np.abs(m @ m - m)) > SEMANTIC_TOL:
            raise ValueError("operator tagged projector is not idempotent")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return _qubits_for(self.entries.shape[0])


# ----------------------------------------------------------------- operations


def tensor(a: Qumix, b: Qumix) -> Qumix:
    """``a (x) b``; ensembles multiply member-wise, dense operands use ``kron``."""
    if a.is_ensemble and b.is_ensemble:
        w = np.outer(a.weights, b.weights).reshape(-1)
        s = np.einsum("ai,bj->abij", a.states, b.states).reshape(w.size, -1)
        return Qumix._ensemble_unchecked(w, s)
    if a.n + b.n <= DENSE_MAX_QUBITS:
        return Qumix._dense_unchecked(np.kron(a.array(), b.array()))
    return tensor(a.to_ensemble(), b.to_ensemble())


def tensor_all(factors: Iterable[Qumix]) -> Qumix:
    factors = list(factors)
    if not factors:
        raise ValueError("tensor of an empty sequence")
    out = factors[0]
    for f in factors[1:]:
        out = tensor(out, f)
    return out


def trace(rho: Qumix) -> complex:
    if rho.is_ensemble:
        norms = np.einsum("ki,ki->k", rho.states.conj(), rho.states).real
        return complex(np.dot(rho.weights, norms))
    return complex(np.trace(rho.matrix))


def purity(rho: Qumix) -> float:
    """``tr(rho^2)``."""
    if rho.is_ensemble:
        gram = rho.states.conj() @ rho.states.T
        return float(rho.weights @ (np.abs(gram) ** 2) @ rho.weights)
    return float(np.real(np.vdot(rho.matrix.conj().T, rho.matrix)))


def _check_partition(blocks: Sequence[int], n: int) -> list[int]:
    blocks = [int(b) for b in blocks]
    if not blocks:
        raise ValueError("empty partition")
    if any(b < 1 for b in blocks):
        raise ValueError(f"partition blocks must be positive, got {blocks}")
    if sum(blocks) != n:
        raise DimensionError(f"partition {blocks} does not sum to {n} qubits")
    return blocks


def partition_qubits(blocks: Sequence[int], indices: Sequence[int], n: int) -> tuple[int, ...]:
    """Qubits (0-based) covered by the 1-based block ``indices`` of ``blocks``."""
    blocks = _check_partition(blocks, n)
    indices = [int(i) for i in indices]
    if not indices:
        raise ValueError("at least one block index is required")
    if any(i < 1 or i > len(blocks) for i in indices):
        raise IndexError(f"block indices {indices} out of range 1..{len(blocks)}")
    if any(b <= a for a, b in zip(indices, indices[1:])):
        raise ValueError(f"block indices must be strictly increasing, got {indices}")
    starts = np.concatenate([[0], np.cumsum(blocks)])
    qubits: list[int] = []
    for i in indices:
        qubits.extend(range(int(starts[i - 1]), int(starts[i])))
    return tuple(qubits)


def reduce_qubits(rho: Qumix, qubits: Sequence[int]) -> Qumix:
    """Reduced state on ``qubits`` (0-based, kept in the given order).

    The result is dense when it has at most the dense qubit limit, otherwise an
    ensemble obtained by splitting every member along the traced-out basis.
    """
    keep = tuple(int(q) for q in qubits)
    if len(set(keep)) != len(keep) or any(q < 0 or q >= rho.n for q in keep):
        raise IndexError(f"invalid qubit selection {keep} for {rho.n} qubits")
    if keep == tuple(range(rho.n)):
        return rho
    keep_index, trace_index = _kernels.split_indices(rho.n, keep)
    m = len(keep)
    if not rho.is_ensemble:
        K, T = keep_index.size, trace_index.size
        full = keep_index[:, None] + trace_index[None, :]
        blocks = rho.matrix[full[:, :, None, None], full[None, None, :, :]]
        red = np.einsum("atbt->ab", blocks.reshape(K, T, K, T))
        return Qumix._dense_unchecked((red + red.conj().T) / 2)
    if m <= DENSE_MAX_QUBITS:
        red = _kernels.active.reduce(rho.weights, rho.states, keep_index, trace_index)
        return Qumix._dense_unchecked((red + red.conj().T) / 2)
    parts = rho.states[:, keep_index[:, None] + trace_index[None, :]]
    parts = np.transpose(parts, (0, 2, 1)).reshape(-1, keep_index.size)
    w = np.repeat(rho.weights, trace_index.size) * np.einsum("ki,ki->k", parts.conj(), parts).real
    keep_rows = w > MIN_WEIGHT
    parts = parts[keep_rows]
    w = w[keep_rows]
    parts = parts / np.sqrt(np.einsum("ki,ki->k", parts.conj(), parts).real)[:, None]
    return Qumix._ensemble_unchecked(w, parts)


def reduced_state(rho: Qumix, blocks: Sequence[int], indices: Sequence[int]) -> Qumix:
    """``Red^{(indices)}_{[blocks]}(rho)``: keep the selected blocks, trace out the rest."""
    return reduce_qubits(rho, partition_qubits(blocks, indices, rho.n))


def expect(A, rho: Qumix) -> complex:
    """``tr(A rho)``."""
    op = A.entries if isinstance(A, DenseOperator) else np.asarray(A, dtype=np.complex128)
    if op.shape != (rho.dim, rho.dim):
        raise DimensionError(f"operator of shape {op.shape} on a {rho.n}-qubit qumix")
    if rho.is_ensemble:
        return complex(np.einsum("k,ki,ij,kj->", rho.weights, rho.states.conj(), op, rho.states))
    return complex(np.trace(op @ rho.matrix))


def trace_distance(a: Qumix, b: Qumix) -> float:
    """Trace norm ``||a - b||_1`` (sum of singular values of the difference)."""
    if a.n != b.n:
        raise DimensionError(f"cannot compare {a.n}- and {b.n}-qubit qumixes")
    if a.is_ensemble and b.is_ensemble and a.rank_bound + b.rank_bound < a.dim:
        # ||V^dagger D V||_1 through a QR of the stacked members: exact, no 2^n x 2^n matrix.
        stacked = np.concatenate([a.states, b.states]).T
        signs = np.concatenate([a.weights, -b.weights])
        _, r = np.linalg.qr(stacked)
        core = (r * signs) @ r.conj().T
        return float(np.abs(np.linalg.eigvalsh((core + core.conj().T) / 2)).sum())
    if a.n > DENSE_MAX_QUBITS:
        raise DimensionError(
            f"trace distance of {a.n}-qubit qumixes needs combined rank below {a.dim}"
        )
    diff = a.array() - b.array()
    return float(np.abs(np.linalg.eigvalsh((diff + diff.conj().T) / 2)).sum())


# --------------------------------------------------------------- entanglement


@dataclass(frozen=True)
class EntanglementReport:
    """Outcome of :func:`classify_entanglement`; block indices are 1-based."""

    blocks: tuple[int, ...]
    purities: tuple[float, ...]
    properly_mixed: tuple[bool, ...]
    t_partite_entangled: bool
    maximally_entangled: bool
    entangled_wrt: frozenset[int]

    def as_dict(self) -> dict:
        return {
            "blocks": list(self.blocks),
            "purities": list(self.purities),
            "properly_mixed": list(self.properly_mixed),
            "t_partite_entangled": self.t_partite_entangled,
            "maximally_entangled": self.maximally_entangled,
            "entangled_wrt": sorted(self.entangled_wrt),
        }


def classify_entanglement(psi, blocks: Sequence[int], *, tol: float = SEMANTIC_TOL) -> EntanglementReport:
    """Proper-mixture analysis of the block reductions of a quregister."""
    vec = state_vector(psi, tol=tol)
    rho = Qumix.pure(vec)
    blocks = _check_partition(blocks, rho.n)
    purities, mixed, maximal = [], [], []
    for i, size in enumerate(blocks, start=1):
        red = reduced_state(rho, blocks, [i])
        p = purity(red)
        purities.append(p)
        mixed.append(p < 1.0 - PROPER_MIXTURE_TOL)
        target = np.eye(1 << size) / (1 << size)
        maximal.append(bool(np.max(np.abs(red.array() - target)) <= tol))
    return EntanglementReport(
        blocks=tuple(blocks),
        purities=tuple(purities),
        properly_mixed=tuple(mixed),
        t_partite_entangled=all(mixed),
        maximally_entangled=all(maximal),
        entangled_wrt=frozenset(i for i, m in enumerate(mixed, start=1) if m),
    )


# ---------------------------------------------------------------- wire format


def vector_to_json(vec) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(vec, dtype=np.complex128)]


def vector_from_json(data) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ValueError("state vectors are arrays of [re, im] pairs") from exc
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("state vectors are arrays of [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def qumix_to_json(rho: Qumix) -> dict:
    """``{"mix": [[w, [[re, im], ...]], ...]}``; dense qumixes go through their eigenbasis."""
    ens = rho.to_ensemble()
    return {"mix": [[float(w), vector_to_json(s)] for w, s in zip(ens.weights, ens.states)]}


def qumix_from_json(data) -> Qumix:
    if not isinstance(data, dict) or "mix" not in data:
        raise ValueError('qumix ensembles are serialized as {"mix": [[w, vector], ...]}')
    weights, states = [], []
    for entry in data["mix"]:
        w, vec = entry
        weights.append(float(w))
        states.append(vector_from_json(vec))
    return Qumix.from_ensemble(weights, states)
