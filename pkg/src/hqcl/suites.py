"""Built-in golden cases and property suites.

Suites
------
``valbool``   valid arguments for the Boolean connectives (random models)
``nval``      ten explicit counterexamples to classical arguments
``genui``     equivalences for the genuine quantum connectives
``gates``     gate identities and the probability laws of AND
``entangle``  entanglement classification of the standard examples
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._config import ALGEBRAIC_TOL, semantic_tol
from .formula import as_formula, conj
from .gates import and_gate, hadamard, not_gate, sqrt_not, toffoli_decomposition_check
from .modelspec import load_spec, make_spec
from .perspective import IDENTITY, random_perspective, truth_projector
from .qumix import Qumix, classify_entanglement, ket, reduced_state, tensor, trace_distance, vector_to_json
from .search import iter_model_probabilities
from .semantics import probability_of, validate_model

SUITES = ("valbool", "nval", "genui", "gates", "entangle")


@dataclass
class CaseResult:
    id: str
    passed: bool
    expected: dict = field(default_factory=dict)
    measured: dict = field(default_factory=dict)
    detail: str = ""
    seconds: float = 0.0

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "passed": self.passed,
            "expected": self.expected,
            "measured": self.measured,
            "detail": self.detail,
        }


# ----------------------------------------------------- expression builders

HALF_I = {"mixed_id": 1}
P0 = {"proj": "0"}
P1 = {"proj": "1"}


def _pure(vec) -> dict:
    v = np.asarray(vec, dtype=np.complex128)
    return {"pure": vector_to_json(v / np.linalg.norm(v))}


def _ket_diff(a: str, b: str) -> dict:
    """``P_{(|a> - |b>)/sqrt 2}``."""
    return _pure(ket(a) - ket(b))


SINGLET = _ket_diff("01", "10")


def _t(m, n, p, to) -> dict:
    return {"apply": {"gate": {"name": "T", "args": [m, n, p]}, "to": to}}


def _not(n, to) -> dict:
    return {"apply": {"gate": {"name": "NOT", "args": [n]}, "to": to}}


def _xor(m, n, to) -> dict:
    return {"apply": {"gate": {"name": "XOR", "args": [m, n]}, "to": to}}


def _gates(gates: list[tuple[str, list[int]]], to) -> dict:
    spec = {"tensor": [{"name": g, "args": a} for g, a in gates]}
    return {"apply": {"gate": spec, "to": to}}


def _x(*parts) -> dict:
    return {"tensor": list(parts)}


# --------------------------------------------------------------- golden cases


@dataclass(frozen=True)
class GoldenCase:
    """A context, the meaning of one of its levels and the expected probabilities.

    ``claim`` names the pair ``(alpha, beta)`` whose consequence the model
    refutes: the measured ``p(alpha)`` must exceed ``p(beta)``.
    """

    id: str
    context: str
    expr: dict
    expected: tuple[tuple[str, float], ...]
    claim: tuple[str, str]
    provenance: str = "closed-form"
    level: str = "bottom"
    note: str = ""

    def spec(self) -> dict:
        return make_spec(self.context, self.expr, level=self.level)


_TOP_OR = _not(3, _t(1, 1, 1, _x(SINGLET, P0)))
_AND_HH = _t(1, 1, 1, _x(HALF_I, HALF_I, P0))
_NOT_AND_HH = _not(3, _AND_HH)

GOLDEN: tuple[GoldenCase, ...] = (
    GoldenCase(
        "nval-1",
        "q1 & q1",
        _AND_HH,
        (("q1", 0.5), ("q1 & q1", 0.25)),
        ("q1", "q1 & q1"),
    ),
    GoldenCase(
        "nval-2",
        "(q1 & q2) & (q2 & q1)",
        _t(3, 3, 1, _x(_AND_HH, _t(1, 1, 1, _x(SINGLET, P0)), P0)),
        (("q1 & q2", 0.25), ("q2 & q1", 0.0)),
        ("q1 & q2", "q2 & q1"),
    ),
    GoldenCase(
        "nval-3",
        "(q1 & (q2 & q3)) & ((q1 & q2) & q3)",
        _t(
            5, 5, 1,
            _x(
                _t(1, 3, 1, _x(HALF_I, _AND_HH, P0)),
                _t(3, 1, 1, _gates([("T", [1, 1, 1]), ("I", [2])], _ket_diff("01010", "10000"))),
                P0,
            ),
        ),
        (("q1 & (q2 & q3)", 0.125), ("q1 & q2 & q3", 0.0)),
        ("q1 & (q2 & q3)", "q1 & q2 & q3"),
    ),
    GoldenCase(
        "nval-4",
        "((q1 & q2) & q3) & (q1 & (q2 & q3))",
        _t(
            5, 5, 1,
            _x(
                _t(3, 1, 1, _x(_AND_HH, HALF_I, P0)),
                _t(1, 3, 1, _gates([("I", [1]), ("T", [1, 1, 1]), ("I", [1])], _ket_diff("11000", "00100"))),
                P0,
            ),
        ),
        (("q1 & q2 & q3", 0.125), ("q1 & (q2 & q3)", 0.0)),
        ("q1 & q2 & q3", "q1 & (q2 & q3)"),
        provenance="derived",
        note="mirror image of nval-3; expected values come from direct evaluation",
    ),
    GoldenCase(
        "nval-5",
        "(q1 & (q2 | q3)) & ((q1 & q2) | (q1 & q3))",
        _t(
            5, 7, 1,
            _x(
                _t(1, 3, 1, _x(HALF_I, _TOP_OR, P0)),
                _not(7, _t(3, 3, 1, _x(_NOT_AND_HH, _NOT_AND_HH, P0))),
                P0,
            ),
        ),
        (("q1 & (q2 | q3)", 0.5), ("q1 & q2 | q1 & q3", 7 / 16)),
        ("q1 & (q2 | q3)", "q1 & q2 | q1 & q3"),
    ),
    GoldenCase(
        "nval-6",
        "(q1 & (q2 | q3)) & ((q1 & q2) | (q1 & q3))",
        _t(
            5, 7, 1,
            _x(
                _t(1, 3, 1, _x(HALF_I, _not(3, _AND_HH), P0)),
                _not(7, _t(3, 3, 1, _x(_NOT_AND_HH, _NOT_AND_HH, P0))),
                P0,
            ),
        ),
        (("q1 & q2 | q1 & q3", 7 / 16), ("q1 & (q2 | q3)", 3 / 8)),
        ("q1 & q2 | q1 & q3", "q1 & (q2 | q3)"),
    ),
    GoldenCase(
        "nval-7",
        "(q1 & q2) & q3",
        _t(3, 1, 1, _x(_AND_HH, HALF_I, P0)),
        (("q1", 0.5), ("q2", 0.5), ("q3", 0.5), ("q1 & q2", 0.25)),
        ("q3", "q1 & q2"),
        note="p(q3) stays below p(q1) and p(q2) yet exceeds p(q1 & q2)",
    ),
    GoldenCase(
        "nval-8",
        "(q1 & ~q1) & q2",
        _t(3, 1, 1, _x(_AND_HH, P0, P0)),
        (("q1 & ~q1", 0.25), ("q2", 0.0)),
        ("q1 & ~q1", "q2"),
    ),
    GoldenCase(
        "nval-9",
        "(q1 (+) q2) & (q2 (+) q1)",
        _t(2, 2, 1, _x(_xor(1, 1, SINGLET), _xor(1, 1, _x(HALF_I, HALF_I)), P0)),
        (("q1 (+) q2", 1.0), ("q2 (+) q1", 0.5)),
        ("q1 (+) q2", "q2 (+) q1"),
    ),
    GoldenCase(
        "nval-10",
        "(q1 (+) q2) & (q1 | q2)",
        _t(
            2, 3, 1,
            _x(
                _xor(1, 1, SINGLET),
                _not(3, _t(1, 1, 1, _gates([("NOT", [1]), ("NOT", [1]), ("I", [1])], _x(HALF_I, HALF_I, P0)))),
                P0,
            ),
        ),
        (("q1 (+) q2", 1.0), ("q1 | q2", 0.75)),
        ("q1 (+) q2", "q1 | q2"),
    ),
    GoldenCase(
        "nval-10b",
        "(q1 (+) q2) & (~q1 | ~q2)",
        _x(SINGLET, HALF_I, HALF_I, P0, P0),
        (("q1 (+) q2", 1.0), ("~q1 | ~q2", 0.75)),
        ("q1 (+) q2", "~q1 | ~q2"),
        provenance="derived",
        level="top",
        note="second half of the last counterexample; the model is seeded at the top level",
    ),
)


def golden_case(case_id: str) -> GoldenCase:
    for case in GOLDEN:
        if case.id == case_id:
            return case
    raise KeyError(case_id)


def run_golden(case: GoldenCase, *, tol: float | None = None) -> CaseResult:
    tol = semantic_tol() if tol is None else tol
    model = load_spec(case.spec())
    diag = validate_model(model, tol=tol)
    measured = {f: probability_of(model, f) for f, _ in case.expected}
    expected = {f: v for f, v in case.expected}
    residual = max(abs(measured[f] - expected[f]) for f in expected)
    a, b = case.claim
    pa = probability_of(model, a)
    pb = probability_of(model, b)
    refutes = pa > pb + tol
    passed = diag.ok and residual <= tol and refutes
    detail = f"[{case.provenance}] residual {residual:.2e}; p({a}) = {pa:.6g} > p({b}) = {pb:.6g}: {refutes}"
    if not diag.ok:
        detail += "; " + "; ".join(diag.messages())
    measured["compositional"] = diag.compositional
    return CaseResult(case.id, passed, expected, measured, detail)


# ------------------------------------------------------------ valbool suite

#: (id, alpha, beta, relation): "|=" is consequence, "=" is equivalence
VALBOOL_ITEMS: tuple[tuple[str, str, str, str], ...] = (
    ("valbool-1a", "q1 & q2", "q1", "|="),
    ("valbool-1b", "q1 & q2", "q2", "|="),
    # weakening, instantiated with the valid premises q1 & q2 |= q1 and ~~q1 |= q1
    ("valbool-2a", "q1 & q2 & q3", "q1", "|="),
    ("valbool-2b", "~~q1 & q3", "q1", "|="),
    ("valbool-3", "~~q1", "q1", "="),
    # contraposition of q1 & q2 |= q1 and of f |= q1
    ("valbool-4a", "~q1", "~(q1 & q2)", "|="),
    ("valbool-4b", "~q1", "~f", "|="),
    ("valbool-5a", "f", "q1", "|="),
    ("valbool-5b", "q1", "t", "|="),
    # disjunction duals
    ("valbool-1a-or", "q1", "q1 | q2", "|="),
    ("valbool-1b-or", "q2", "q1 | q2", "|="),
    ("valbool-2-or", "q1 & q2", "q1 | q3", "|="),
)

#: equivalences for the genuine quantum connectives
GENUI_ITEMS: tuple[tuple[str, str, str], ...] = (
    ("genui-1", "sid sid q1", "q1"),
    ("genui-2", "sid f", "sid t"),
    ("genui-3a", "~sid f", "sid f"),
    ("genui-3b", "~sid t", "sid t"),
    ("genui-4", "sid (q1 & q2)", "sid f"),
    ("genui-5", "snot snot q1", "~q1"),
    ("genui-6", "snot f", "snot t"),
    ("genui-7a", "~snot f", "snot f"),
    ("genui-7b", "~snot t", "snot t"),
    ("genui-8", "~snot q1", "snot ~q1"),
    ("genui-9", "snot (q1 & q2)", "snot f"),
    ("genui-10", "sid snot q1", "sid q1"),
    ("genui-11", "snot sid q1", "~snot q1"),
    ("genui-12", "sid snot (q1 & q2)", "snot f"),
    ("genui-13", "snot sid (q1 & q2)", "snot f"),
)


def _sweep(case_id, alpha, beta, mode, *, trials, seed, tol) -> CaseResult:
    """Random validated models of ``alpha & beta``; ``mode`` is ``|=`` or ``=``."""
    alpha, beta = as_formula(alpha), as_formula(beta)
    ctx = conj(alpha, beta)
    notes: list[str] = []
    worst = 0.0
    count = random = 0
    witness = None
    for kind, spec, (pa, pb) in iter_model_probabilities(
        ctx, alpha, beta, trials=trials, seed=seed, tol=tol, notes=notes
    ):
        count += 1
        random += kind != "palette"
        gap = abs(pa - pb) if mode == "=" else pa - pb
        if gap > worst:
            worst = gap
            witness = spec
    passed = worst <= tol and random >= trials
    relation = "p(alpha) = p(beta)" if mode == "=" else "p(alpha) <= p(beta)"
    detail = f"{alpha} vs {beta}: {relation} over {count} models ({random} random), worst gap {worst:.2e}"
    if notes:
        detail += "; " + "; ".join(notes)
    measured = {"models": count, "random_models": random, "worst_gap": worst}
    if not passed and witness is not None:
        measured["witness"] = witness
    return CaseResult(case_id, passed, {"relation": relation, "tol": tol}, measured, detail)


def _gate_identities(tol: float = ALGEBRAIC_TOL) -> CaseResult:
    worst = 0.0
    for n in range(1, 5):
        h = hadamard(n).matrix()
        s = sqrt_not(n).matrix()
        x = not_gate(n).matrix()
        worst = max(
            worst,
            np.max(np.abs(h @ h - np.eye(1 << n))),
            np.max(np.abs(s @ s - x)),
            np.max(np.abs(x @ s - s @ x)),
        )
    return CaseResult(
        "genui-gates",
        bool(worst <= tol),
        {"max_entry_error": tol},
        {"max_entry_error": float(worst)},
        "sqrt(I)^2 = I, sqrt(NOT)^2 = NOT and NOT sqrt(NOT) = sqrt(NOT) NOT for n <= 4",
    )


# ---------------------------------------------------------------- gates suite


def random_density(rng: np.random.Generator, n: int, rank: int | None = None) -> Qumix:
    dim = 1 << n
    rank = rank or int(rng.integers(1, dim + 1))
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    return Qumix.from_dense(m / np.trace(m).real)


def and_law_gaps(rho: Qumix, m: int, n: int, T=IDENTITY) -> tuple[float, float, float]:
    """(equality gap, excess over Red^(1), excess over Red^(2)) for ``AND^(m,n)(rho)``."""
    from .perspective import probability

    p_and = probability(T, and_gate(T, m, n, rho))
    both = np.kron(truth_projector(T, m).dense(), truth_projector(T, n).dense())
    exact = float(np.real(np.trace(both @ rho.array())))
    p1 = probability(T, reduced_state(rho, [m, n], [1]))
    p2 = probability(T, reduced_state(rho, [m, n], [2]))
    return abs(p_and - exact), p_and - p1, p_and - p2


def _and_laws(*, samples: int, seed: int, tol: float) -> CaseResult:
    rng = np.random.default_rng(seed)
    perspectives = [IDENTITY] + [random_perspective(rng) for _ in range(5)]
    worst = [0.0, 0.0, 0.0]
    for i in range(samples):
        total = int(rng.integers(2, 7))
        m = int(rng.integers(1, total))
        rho = random_density(rng, total)
        T = perspectives[i % len(perspectives)]
        gaps = and_law_gaps(rho, m, total - m, T)
        worst = [max(w, g) for w, g in zip(worst, gaps)]
    passed = worst[0] <= tol and worst[1] <= tol and worst[2] <= tol
    return CaseResult(
        "gates-and-laws",
        passed,
        {"tol": tol},
        {"samples": samples, "equality_gap": worst[0], "excess_red1": worst[1], "excess_red2": worst[2]},
        "p(AND(rho)) = tr((P1 (x) P1) rho) <= p(Red^(1) rho), p(Red^(2) rho)",
    )


def bell_example(tol: float | None = None) -> CaseResult:
    from .perspective import probability

    tol = semantic_tol() if tol is None else tol
    bell = Qumix.pure((ket("00") + ket("11")) / np.sqrt(2))
    ghz = Qumix.pure((ket("000") + ket("111")) / np.sqrt(2))
    out = and_gate(IDENTITY, 1, 1, bell)
    product = tensor(reduced_state(bell, [1, 1], [1]), reduced_state(bell, [1, 1], [2]))
    p_whole = probability(IDENTITY, out)
    p_parts = probability(IDENTITY, and_gate(IDENTITY, 1, 1, product))
    dist = trace_distance(out, ghz)
    passed = abs(p_whole - 0.5) <= tol and abs(p_parts - 0.25) <= tol and dist <= tol
    return CaseResult(
        "gates-bell",
        passed,
        {"p_and_bell": 0.5, "p_and_reductions": 0.25, "distance_to_ghz": 0.0},
        {"p_and_bell": p_whole, "p_and_reductions": p_parts, "distance_to_ghz": dist},
        "AND of a Bell pair is a GHZ state; AND of its reductions is not",
    )


def _toffoli_decomposition() -> CaseResult:
    results = {f"{m},{n}": toffoli_decomposition_check(m, n) for m in (1, 2, 3) for n in (1, 2, 3)}
    return CaseResult(
        "gates-toffoli",
        all(results.values()),
        {"identity": True},
        results,
        "T^(m,n,1) = (I - P1 (x) P1) (x) I + P1 (x) P1 (x) NOT for m, n in 1..3",
    )


def _projector_order() -> CaseResult:
    worst = 0.0
    for m in range(1, 4):
        for n in range(1, 4):
            p1m = truth_projector(IDENTITY, m).dense()
            p1n = truth_projector(IDENTITY, n).dense()
            p = np.kron(p1m, p1n)
            for q in (np.kron(p1m, np.eye(1 << n)), np.kron(np.eye(1 << m), p1n)):
                worst = max(worst, float(np.max(np.abs(p @ q - p))))
    return CaseResult(
        "gates-projector-order",
        worst <= ALGEBRAIC_TOL,
        {"max_entry_error": ALGEBRAIC_TOL},
        {"max_entry_error": worst},
        "P1 (x) P1 <= P1 (x) I and <= I (x) P1 as PQ = P",
    )


# -------------------------------------------------------------- entangle suite


def entanglement_cases(*, seed: int, changes: int = 20) -> list[CaseResult]:
    ghz = (ket("000") + ket("111")) / np.sqrt(2)
    partial = (ket("000") + ket("110")) / np.sqrt(2)
    r1 = classify_entanglement(ghz, [1, 1, 1])
    r2 = classify_entanglement(partial, [1, 1, 1])
    out = [
        CaseResult(
            "entangle-ghz",
            r1.t_partite_entangled and r1.maximally_entangled,
            {"t_partite_entangled": True, "maximally_entangled": True},
            r1.as_dict(),
            "(|000> + |111>)/sqrt 2 over [1, 1, 1]",
        ),
        CaseResult(
            "entangle-partial",
            r2.entangled_wrt == frozenset({1, 2}) and not r2.t_partite_entangled,
            {"entangled_wrt": [1, 2]},
            r2.as_dict(),
            "(|000> + |110>)/sqrt 2 over [1, 1, 1]",
        ),
    ]
    rng = np.random.default_rng(seed)
    stable = True
    for _ in range(changes):
        T = random_perspective(rng)
        layer = np.kron(np.kron(T.u, T.u), T.u)
        for psi, ref in ((ghz, r1), (partial, r2)):
            r = classify_entanglement(layer @ psi, [1, 1, 1])
            stable &= (
                r.properly_mixed == ref.properly_mixed
                and r.maximally_entangled == ref.maximally_entangled
                and r.entangled_wrt == ref.entangled_wrt
            )
    out.append(
        CaseResult(
            "entangle-invariance",
            bool(stable),
            {"stable_flags": True},
            {"perspective_changes": changes, "stable_flags": bool(stable)},
            "flags survive T (x) T (x) T for random T",
        )
    )
    return out


# -------------------------------------------------------------------- driver


def _timed(fn: Callable[[], CaseResult]) -> CaseResult:
    start = time.perf_counter()
    res = fn()
    res.seconds = time.perf_counter() - start
    return res


def run_suite(name: str, *, trials: int = 300, seed: int = 0, tol: float | None = None) -> list[CaseResult]:
    """Run one named suite (or ``"all"``); deterministic for fixed arguments."""
    tol = semantic_tol() if tol is None else tol
    if name == "all":
        return [r for s in SUITES for r in run_suite(s, trials=trials, seed=seed, tol=tol)]
    if name == "nval":
        return [_timed(lambda c=c: run_golden(c, tol=tol)) for c in GOLDEN]
    if name == "valbool":
        return [
            _timed(lambda i=i: _sweep(i[0], i[1], i[2], i[3], trials=trials, seed=seed, tol=tol))
            for i in VALBOOL_ITEMS
        ]
    if name == "genui":
        out = [
            _timed(lambda i=i: _sweep(i[0], i[1], i[2], "=", trials=trials, seed=seed, tol=tol))
            for i in GENUI_ITEMS
        ]
        out.append(_timed(_gate_identities))
        return out
    if name == "gates":
        return [
            _timed(_toffoli_decomposition),
            _timed(lambda: bell_example(tol)),
            _timed(_projector_order),
            _timed(lambda: _and_laws(samples=max(trials, 500), seed=seed, tol=tol)),
        ]
    if name == "entangle":
        start = time.perf_counter()
        res = entanglement_cases(seed=seed)
        for r in res:
            r.seconds = (time.perf_counter() - start) / len(res)
        return res
    raise ValueError(f"unknown suite {name!r}; choose from {SUITES + ('all',)}")


__all__ = [
    "CaseResult",
    "GOLDEN",
    "GENUI_ITEMS",
    "GoldenCase",
    "SUITES",
    "VALBOOL_ITEMS",
    "and_law_gaps",
    "bell_example",
    "entanglement_cases",
    "golden_case",
    "random_density",
    "run_golden",
    "run_suite",
]
