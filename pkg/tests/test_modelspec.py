import json

import numpy as np
import pytest

from hqcl import Qumix, SpecError, TruthPerspective, eval_expr, ket, load_spec, make_spec, probability_of, trace_distance
from hqcl.modelspec import mix_expr, pure_expr

HALF = {"mixed_id": 1}
P0 = {"proj": "0"}


def test_pure_and_tensor():
    rho = eval_expr({"tensor": [pure_expr(ket("1")), P0]})
    np.testing.assert_allclose(rho.array(), np.diag([0, 0, 1, 0]), atol=1e-12)


def test_proj_follows_perspective():
    h = TruthPerspective.hadamard()
    rho = eval_expr({"proj": "1"}, h)
    np.testing.assert_allclose(rho.array(), np.outer(h.one, h.one.conj()), atol=1e-12)


def test_mix_of_vectors_and_expressions():
    rho = eval_expr({"mix": [[0.25, pure_expr(ket("0"))["pure"]], [0.75, {"proj": "1"}]]})
    np.testing.assert_allclose(rho.array(), np.diag([0.25, 0.75]), atol=1e-12)
    rho = eval_expr(mix_expr([0.5, 0.5], [ket("0"), ket("1")]))
    np.testing.assert_allclose(rho.array(), np.eye(2) / 2, atol=1e-12)


def test_mix_with_dense_member():
    rho = eval_expr({"mix": [[0.5, HALF], [0.5, {"apply": {"gate": {"name": "SQI", "args": [1]}, "to": HALF}}]]})
    np.testing.assert_allclose(rho.array(), np.eye(2) / 2, atol=1e-12)


def test_apply_and_gate_and_tensor_gate():
    rho = eval_expr({"apply": {"gate": {"name": "AND", "args": [1, 1]}, "to": {"tensor": [{"proj": "1"}] * 2}}})
    assert rho.n == 3
    rho = eval_expr({"apply": {"gate": {"tensor": [{"name": "NOT", "args": [1]}, {"name": "I", "args": [1]}]},
                               "to": {"tensor": [P0, P0]}}})
    assert trace_distance(rho, Qumix.pure(ket("10"))) < 1e-12


@pytest.mark.parametrize(
    "expr,match",
    [
        ({"proj": "2"}, "proj"),
        ({"mixed": 1}, "unknown"),
        ({"mix": []}, "at least one"),
        ({"mix": [[0.3, P0], [0.3, P0]]}, "sum to 1"),
        ({"mix": [[1.0, P0], [0.0, P0]]}, "weights"),
        ({"mix": [[0.5, P0], [0.5, {"tensor": [P0, P0]}]]}, "same qubit count"),
        ({"apply": {"gate": {"name": "ZAP", "args": [1]}, "to": P0}}, "unknown gate"),
        ({"apply": {"gate": {"args": [1]}, "to": P0}}, "name"),
        ({"apply": {"gate": {"tensor": [{"name": "AND", "args": [1, 1]}]}, "to": P0}}, "AND"),
        ({"pure": [[1, 0], [1, 0]]}, "pure"),
        ([1, 2], "one key"),
    ],
)
def test_malformed_expressions(expr, match):
    with pytest.raises(SpecError, match=match):
        eval_expr(expr)


def test_load_spec_from_text_and_path(tmp_path):
    spec = make_spec("q1 & q1", {"tensor": [HALF, HALF, P0]}, level="top")
    path = tmp_path / "m.json"
    path.write_text(json.dumps(spec))
    for source in (spec, json.dumps(spec), path):
        assert probability_of(load_spec(source)) == pytest.approx(0.25)


@pytest.mark.parametrize(
    "spec,match",
    [
        ({"formula": "q1"}, "assign"),
        ({"assign": {"expr": HALF}}, "formula"),
        ({"formula": "q1", "assign": {"level": 1}}, "expr"),
        ([], "object"),
    ],
)
def test_malformed_specs(spec, match):
    with pytest.raises(SpecError, match=match):
        load_spec(spec)


def test_bad_perspective_name():
    with pytest.raises(ValueError):
        load_spec({"truth_perspective": {"name": "sideways"}, "formula": "q1", "assign": {"expr": HALF}})
