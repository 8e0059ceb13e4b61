"""Hot loops of the simulator, in a pure-numpy and a numba flavour.

All kernels act on a batch of state vectors stored row-wise in a C-contiguous
``(k, 2**n)`` complex128 array and return a fresh array.  Qubit ``q`` of an
``n``-qubit register (``q = 0`` is the first tensor factor) lives at bit
``n - 1 - q`` of the amplitude index.

``HQCL_BACKEND=numpy`` forces the numpy path; otherwise the numba kernels are
used when numba imports cleanly.
"""

from __future__ import annotations

from functools import lru_cache
from types import SimpleNamespace

import numpy as np

from ._config import backend_name


# --------------------------------------------------------------------- numpy


@lru_cache(maxsize=512)
def _flip_permutation(dim: int, ctrl_mask: int, target_mask: int) -> np.ndarray:
    idx = np.arange(dim, dtype=np.int64)
    hit = (idx & ctrl_mask) == ctrl_mask
    perm = np.where(hit, idx ^ target_mask, idx)
    perm.setflags(write=False)
    return perm


def np_flip(states: np.ndarray, ctrl_mask: int, target_mask: int) -> np.ndarray:
    perm = _flip_permutation(states.shape[1], ctrl_mask, target_mask)
    return np.ascontiguousarray(states[:, perm])


def np_rotate(states: np.ndarray, u: np.ndarray, bit: int) -> np.ndarray:
    k, dim = states.shape
    view = states.reshape(k, dim >> (bit + 1), 2, 1 << bit)
    out = np.einsum("ab,xiby->xiay", u, view, optimize=False)
    return np.ascontiguousarray(out.reshape(k, dim))


def np_reduce(
    weights: np.ndarray, states: np.ndarray, keep_index: np.ndarray, trace_index: np.ndarray
) -> np.ndarray:
    blocks = states[:, keep_index[:, None] + trace_index[None, :]] * np.sqrt(weights)[:, None, None]
    flat = np.transpose(blocks, (1, 0, 2)).reshape(keep_index.size, -1)
    return flat @ flat.conj().T


numpy_kernels = SimpleNamespace(
    name="numpy", flip=np_flip, rotate=np_rotate, reduce=np_reduce
)


# --------------------------------------------------------------------- numba


def _flip_loop(states, ctrl_mask, target_mask):
    k, dim = states.shape
    out = states.copy()
    for r in range(k):
        for i in range(dim):
            if (i & ctrl_mask) == ctrl_mask and (i & target_mask) == 0:
                j = i | target_mask
                out[r, i] = states[r, j]
                out[r, j] = states[r, i]
    return out


def _rotate_loop(states, u, bit):
    k, dim = states.shape
    out = np.empty_like(states)
    step = 1 << bit
    u00, u01, u10, u11 = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
    for r in range(k):
        for i in range(dim):
            if i & step:
                continue
            a0 = states[r, i]
            a1 = states[r, i | step]
            out[r, i] = u00 * a0 + u01 * a1
            out[r, i | step] = u10 * a0 + u11 * a1
    return out


def _reduce_loop(weights, states, keep_index, trace_index):
    kdim = keep_index.shape[0]
    tdim = trace_index.shape[0]
    rho = np.zeros((kdim, kdim), dtype=np.complex128)
    block = np.empty((kdim, tdim), dtype=np.complex128)
    for r in range(states.shape[0]):
        w = weights[r]
        for a in range(kdim):
            base = keep_index[a]
            for t in range(tdim):
                block[a, t] = states[r, base + trace_index[t]]
        for a in range(kdim):
            for b in range(a, kdim):
                acc = 0j
                for t in range(tdim):
                    acc += block[a, t] * np.conj(block[b, t])
                rho[a, b] += w * acc
    for a in range(kdim):
        for b in range(a + 1, kdim):
            rho[b, a] = np.conj(rho[a, b])
    return rho


try:  # pragma: no cover - exercised implicitly when numba is present
    from numba import njit

    numba_kernels = SimpleNamespace(
        name="numba",
        flip=njit(cache=True)(_flip_loop),
        rotate=njit(cache=True)(_rotate_loop),
        reduce=njit(cache=True)(_reduce_loop),
    )
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba_kernels = None
    HAVE_NUMBA = False


def select(name: str | None = None) -> SimpleNamespace:
    """Return the kernel namespace for ``name`` (default: ``HQCL_BACKEND``)."""
    name = name or backend_name()
    if name == "numba" and HAVE_NUMBA:
        return numba_kernels
    return numpy_kernels


active = select()


# ------------------------------------------------------------------- helpers


@lru_cache(maxsize=1024)
def split_indices(n: int, keep: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    """Index tables for keeping the qubits ``keep`` (in that order) of ``n``.

    Full amplitude index = ``keep_index[a] + trace_index[t]``, where ``a``
    enumerates the kept qubits (first listed = most significant) and ``t`` the
    traced-out ones in their natural order.
    """
    traced = tuple(q for q in range(n) if q not in keep)
    keep_bits = [n - 1 - q for q in keep]
    trace_bits = [n - 1 - q for q in traced]

    def table(bits: list[int]) -> np.ndarray:
        m = len(bits)
        a = np.arange(1 << m, dtype=np.int64)
        out = np.zeros(1 << m, dtype=np.int64)
        for pos, b in enumerate(bits):
            out |= ((a >> (m - 1 - pos)) & 1) << b
        out.setflags(write=False)
        return out

    return table(keep_bits), table(trace_bits)
