"""Unit tests for the built-in ONNX decoder and numpy executor."""

from __future__ import annotations


import numpy as np
import pytest

from climatext.classify.onnx_decode import OnnxDecodeError, decode_model
from climatext.classify.onnx_exec import GraphRunner, UnsupportedOp
from climatext.classify.onnx_decode import Graph, Model, Node


# --- tiny protobuf writer (test-local, independent of the package code) -----

def _varint(v: int) -> bytes:
    v &= 0xFFFFFFFFFFFFFFFF  # negatives encode as 64-bit two's complement
    out = bytearray()
    while True:
        b = v & 0x7F
        v >>= 7
        out.append(b | (0x80 if v else 0))
        if not v:
            return bytes(out)


def _field(num: int, wire: int, payload: bytes) -> bytes:
    return _varint((num << 3) | wire) + payload


def _ld(num: int, payload: bytes) -> bytes:
    return _field(num, 2, _varint(len(payload)) + payload)


def _tensor(name: str, arr: np.ndarray) -> bytes:
    dtypes = {np.dtype("float32"): 1, np.dtype("int64"): 7}
    body = b"".join(_field(1, 0, _varint(d)) for d in arr.shape)
    body += _field(2, 0, _varint(dtypes[arr.dtype]))
    body += _ld(8, name.encode())
    body += _ld(9, arr.tobytes())
    return body


def _node(op: str, inputs: list[str], outputs: list[str],
          attrs: bytes = b"") -> bytes:
    body = b"".join(_ld(1, i.encode()) for i in inputs)
    body += b"".join(_ld(2, o.encode()) for o in outputs)
    body += _ld(4, op.encode())
    body += attrs
    return body


def _attr_int(name: str, value: int) -> bytes:
    body = _ld(1, name.encode()) + _field(3, 0, _varint(value))
    body += _field(20, 0, _varint(2))  # AttributeProto.INT
    return _ld(5, body)


def _value_info(name: str) -> bytes:
    return _ld(1, name.encode())


def build_model_bytes() -> bytes:
    # y = softmax(x @ W + b, axis=-1)
    w = np.arange(12, dtype=np.float32).reshape(4, 3) / 10.0
    b = np.asarray([0.1, -0.2, 0.3], dtype=np.float32)
    graph = b"".join([
        _ld(1, _node("MatMul", ["x", "W"], ["xw"])),
        _ld(1, _node("Add", ["xw", "b"], ["logits"])),
        _ld(1, _node("Softmax", ["logits"], ["probs"], _attr_int("axis", -1))),
        _ld(2, b"tiny"),
        _ld(5, _tensor("W", w)),
        _ld(5, _tensor("b", b)),
        _ld(11, _value_info("x")),
        _ld(12, _value_info("probs")),
    ])
    opset = _ld(1, b"") + _field(2, 0, _varint(13))
    model = (_field(1, 0, _varint(8))       # ir_version
             + _ld(2, opset)
             + _ld(3, b"test-writer")
             + _ld(7, graph))
    return model


class TestDecoder:
    def test_round_trip_structure(self):
        model = decode_model(build_model_bytes())
        assert model.producer == "test-writer"
        assert model.opset_version == 13
        g = model.graph
        assert [n.op_type for n in g.nodes] == ["MatMul", "Add", "Softmax"]
        assert g.nodes[2].attrs["axis"] == -1
        assert set(g.initializers) == {"W", "b"}
        assert g.initializers["W"].shape == (4, 3)
        assert g.inputs == ["x"] and g.outputs == ["probs"]

    def test_truncated_raises(self):
        with pytest.raises(OnnxDecodeError):
            decode_model(build_model_bytes()[:-4])

    def test_no_graph_raises(self):
        with pytest.raises(OnnxDecodeError, match="no graph"):
            decode_model(_field(1, 0, _varint(8)))


class TestRunner:
    def test_matmul_add_softmax_vs_numpy(self):
        model = decode_model(build_model_bytes())
        runner = GraphRunner(model)
        x = np.random.default_rng(0).normal(size=(5, 4)).astype(np.float32)
        got = runner.run({"x": x})["probs"]
        w = model.graph.initializers["W"]
        b = model.graph.initializers["b"]
        logits = x @ w + b
        e = np.exp(logits - logits.max(axis=-1, keepdims=True))
        expected = e / e.sum(axis=-1, keepdims=True)
        np.testing.assert_allclose(got, expected, rtol=1e-6)
        assert runner.input_names == ["x"]

    def test_unsupported_op_rejected_at_load(self):
        g = Graph(nodes=[Node(op_type="Conv", inputs=["x"], outputs=["y"])],
                  initializers={}, inputs=["x"], outputs=["y"])
        with pytest.raises(UnsupportedOp, match="Conv"):
            GraphRunner(Model(graph=g))

    def test_missing_feed_raises(self):
        runner = GraphRunner(decode_model(build_model_bytes()))
        with pytest.raises(ValueError, match="missing graph inputs"):
            runner.run({})


def run_single(op, attrs, args, n_outputs=1):
    names = [f"in{i}" for i in range(len(args))]
    g = Graph(nodes=[Node(op_type=op, inputs=names, outputs=["out"],
                          attrs=attrs)],
              initializers={}, inputs=names, outputs=["out"])
    return GraphRunner(Model(graph=g)).run(
        {n: a for n, a in zip(names, args)})["out"]


class TestOps:
    rng = np.random.default_rng(42)

    def test_gather_axis0(self):
        table = self.rng.normal(size=(10, 4)).astype(np.float32)
        idx = np.asarray([[1, 3], [0, 9]], dtype=np.int64)
        got = run_single("Gather", {"axis": 0}, [table, idx])
        np.testing.assert_array_equal(got, table[idx])

    def test_reshape_with_zero_and_minus_one(self):
        x = self.rng.normal(size=(2, 3, 8)).astype(np.float32)
        shape = np.asarray([0, 0, 2, 4], dtype=np.int64)
        got = run_single("Reshape", {}, [x, shape])
        assert got.shape == (2, 3, 2, 4)
        got2 = run_single("Reshape", {}, [x, np.asarray([0, -1], dtype=np.int64)])
        assert got2.shape == (2, 24)

    def test_transpose(self):
        x = self.rng.normal(size=(2, 3, 4, 5)).astype(np.float32)
        got = run_single("Transpose", {"perm": [0, 2, 1, 3]}, [x])
        np.testing.assert_array_equal(got, x.transpose(0, 2, 1, 3))

    def test_unsqueeze_via_input_axes(self):
        x = np.ones((2, 3), dtype=np.float32)
        got = run_single("Unsqueeze", {}, [x, np.asarray([1], dtype=np.int64)])
        assert got.shape == (2, 1, 3)

    def test_reduce_mean_keepdims(self):
        x = self.rng.normal(size=(3, 6)).astype(np.float32)
        got = run_single("ReduceMean", {"axes": [-1], "keepdims": 1}, [x])
        np.testing.assert_allclose(got, x.mean(axis=-1, keepdims=True), rtol=1e-6)

    def test_erf_matches_scipy(self):
        from scipy.special import erf
        x = np.linspace(-3, 3, 31, dtype=np.float32)
        np.testing.assert_allclose(run_single("Erf", {}, [x]), erf(x), rtol=1e-6)

    def test_cumsum(self):
        x = np.asarray([[1, 1, 1, 0]], dtype=np.int64)
        got = run_single("CumSum", {}, [x, np.asarray(1, dtype=np.int64)])
        np.testing.assert_array_equal(got, [[1, 2, 3, 3]])

    def test_slice(self):
        x = self.rng.normal(size=(4, 6)).astype(np.float32)
        got = run_single("Slice", {}, [x,
                                       np.asarray([0], dtype=np.int64),
                                       np.asarray([1], dtype=np.int64),
                                       np.asarray([1], dtype=np.int64)])
        np.testing.assert_array_equal(got, x[:, 0:1])

    def test_cast(self):
        x = np.asarray([1.7, -2.2], dtype=np.float32)
        got = run_single("Cast", {"to": 7}, [x])
        assert got.dtype == np.int64

    def test_softmax_rows_sum_to_one(self):
        x = self.rng.normal(size=(5, 7)).astype(np.float32)
        got = run_single("Softmax", {"axis": -1}, [x])
        np.testing.assert_allclose(got.sum(axis=-1), np.ones(5), rtol=1e-6)

    def test_where_equal(self):
        a = np.asarray([1, 2, 3], dtype=np.int64)
        eq = run_single("Equal", {}, [a, np.asarray([1, 0, 3], dtype=np.int64)])
        np.testing.assert_array_equal(eq, [True, False, True])
        out = run_single("Where", {}, [eq,
                                       np.asarray([10., 10., 10.], dtype=np.float32),
                                       np.asarray([0., 0., 0.], dtype=np.float32)])
        np.testing.assert_array_equal(out, [10., 0., 10.])
