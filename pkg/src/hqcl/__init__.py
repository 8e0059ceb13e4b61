"""Holistic quantum computational logic.

Formulas denote qumixes (density operators) on a register of qubits.  A model
assigns a qumix to every level of a formula's syntactical tree, and the
meaning of a subformula is read off the whole by partial trace.
"""

from ._config import ALGEBRAIC_TOL, SEMANTIC_TOL, backend_name, semantic_tol
from .formula import (
    FALSE,
    TRUE,
    Atom,
    Const,
    Formula,
    Not,
    ParseError,
    SqrtId,
    SqrtNot,
    Toffoli,
    Xor,
    atomic_complexity,
    atoms,
    conj,
    disj,
    is_subformula,
    parse,
    subformulas,
    to_text,
)
from .gates import (
    Gate,
    GateSpec,
    and_gate,
    apply_gate,
    hadamard,
    identity,
    not_gate,
    sqrt_not,
    tensor_gates,
    toffoli,
    toffoli_decomposition_check,
    twin_gate,
    xor,
)
from .modelspec import SpecError, eval_expr, load_spec, make_spec
from .perspective import (
    IDENTITY,
    TruthPerspective,
    falsity_projector,
    preorder_le,
    probability,
    random_perspective,
    t_register,
    truth_projector,
)
from .qumix import (
    DimensionError,
    EntanglementReport,
    Qumix,
    classify_entanglement,
    expect,
    ket,
    purity,
    reduce_qubits,
    reduced_state,
    tensor,
    tensor_all,
    trace,
    trace_distance,
)
from .search import (
    Verdict,
    check_classical_consequence,
    search_counterexample,
    search_equivalence,
    truth_table_consequence,
)
from .semantics import (
    ContextualMeaning,
    Diagnostics,
    ScopedModel,
    build_compositional_model,
    build_model,
    check_consequence_in_context,
    check_truth,
    contextual_meaning,
    extend_model,
    generalized_truth_value,
    probability_of,
    transport,
    validate_model,
)
from .suites import CaseResult, run_suite
from .tree import GateTree, Occurrence, SyntacticalTree, build_tree, compile_gate_tree

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
