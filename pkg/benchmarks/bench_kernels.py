"""Compare the numba and numpy kernel backends.

Run with ``python3 benchmarks/bench_kernels.py [--qubits 13] [--members 32]``.
Each kernel is called once to trigger compilation, checked against the other
backend, then timed with ``timeit``.  A final row times the 13-qubit golden
model build end to end under both backends.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from hqcl import _kernels
from hqcl.gates import SQN_1


def _workload(qubits: int, members: int, seed: int):
    rng = np.random.default_rng(seed)
    states = rng.normal(size=(members, 1 << qubits)) + 1j * rng.normal(size=(members, 1 << qubits))
    states /= np.linalg.norm(states, axis=1, keepdims=True)
    weights = rng.dirichlet(np.ones(members))
    keep = tuple(int(q) for q in rng.choice(qubits, size=min(5, qubits), replace=False))
    ki, ti = _kernels.split_indices(qubits, keep)
    cmask = (1 << (qubits - 1)) | (1 << (qubits - 3))
    return {
        "flip": lambda k: k.flip(states, cmask, 1),
        "rotate": lambda k: k.rotate(states, SQN_1, qubits // 2),
        "reduce": lambda k: k.reduce(weights, states, ki, ti),
    }


_GOLDEN_SNIPPET = (
    "import time; from hqcl import suites; c = suites.golden_case('nval-6'); "
    "t = time.perf_counter(); suites.run_golden(c); suites.run_golden(c); "
    "print((time.perf_counter() - t) / 2)"
)


def _golden_seconds(backend: str) -> float:
    env = dict(os.environ, HQCL_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", _GOLDEN_SNIPPET], env=env, check=True,
                         capture_output=True, text=True)
    return float(out.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, default=13)
    ap.add_argument("--members", type=int, default=32)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--skip-golden", action="store_true")
    args = ap.parse_args(argv)

    if not _kernels.HAVE_NUMBA:
        sys.exit("numba is not installed; nothing to compare")
    backends = [_kernels.numpy_kernels, _kernels.numba_kernels]
    work = _workload(args.qubits, args.members, args.seed)

    print(f"{args.members} members x {args.qubits} qubits, best of {args.repeat}")
    print(f"{'kernel':<10}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, call in work.items():
        ref, fast = call(backends[0]), call(backends[1])  # warm-up and JIT
        gap = float(np.max(np.abs(ref - fast)))
        assert gap < 1e-10, f"{name}: backends disagree by {gap}"
        times = [min(timeit.repeat(lambda k=k: call(k), number=1, repeat=args.repeat)) for k in backends]
        print(f"{name:<10}{times[0] * 1e3:>12.2f}{times[1] * 1e3:>12.2f}{times[0] / times[1]:>10.2f}")

    if not args.skip_golden:
        t_np, t_nb = _golden_seconds("numpy"), _golden_seconds("numba")
        print(f"{'nval-6':<10}{t_np * 1e3:>12.1f}{t_nb * 1e3:>12.1f}{t_np / t_nb:>10.2f}")


if __name__ == "__main__":
    main()
