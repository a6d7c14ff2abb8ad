"""Numpy executor for decoded ONNX graphs.

Implements the operator subset used by transformer sequence-classifier
graphs, each following the ONNX operator spec (opset 13 semantics), so
files that run here also run on a standard runtime. Unknown ops raise at
load time rather than mid-inference.
"""

from __future__ import annotations

import numpy as np

from .onnx_decode import TENSOR_DTYPES, Model


class UnsupportedOp(ValueError):
    pass


def _erf(x: np.ndarray) -> np.ndarray:
    # Abramowitz-Stegun 7.1.26 is not enough for 1e-4 logit parity; use
    # the scipy ufunc (exact to double precision).
    from scipy.special import erf
    return erf(x)


def _reshape(data, shape, allowzero=0):
    shape = [int(s) for s in np.asarray(shape).ravel()]
    if not allowzero:
        shape = [data.shape[i] if s == 0 else s for i, s in enumerate(shape)]
    return data.reshape(shape)


def _slice_op(data, starts, ends, axes=None, steps=None):
    starts = np.asarray(starts).ravel()
    ends = np.asarray(ends).ravel()
    axes = (np.asarray(axes).ravel() if axes is not None
            else np.arange(len(starts)))
    steps = (np.asarray(steps).ravel() if steps is not None
             else np.ones(len(starts), dtype=np.int64))
    index: list = [slice(None)] * data.ndim
    for s, e, a, st in zip(starts, ends, axes, steps):
        a = int(a) % data.ndim
        s, e, st = int(s), int(e), int(st)
        # ONNX clamps out-of-range starts/ends the same way python slices do
        index[a] = slice(s, e, st)
    return data[tuple(index)]


def _reduce_mean(data, axes=None, keepdims=1):
    axis = tuple(int(a) for a in axes) if axes else None
    return np.mean(data, axis=axis, keepdims=bool(keepdims), dtype=data.dtype)


def _softmax(x, axis=-1):
    x = x - np.max(x, axis=axis, keepdims=True)
    e = np.exp(x)
    return e / np.sum(e, axis=axis, keepdims=True)


def _gather(data, indices, axis=0):
    return np.take(data, indices.astype(np.int64), axis=int(axis))


def _cast(data, to):
    return data.astype(TENSOR_DTYPES[int(to)])


def _cumsum(data, axis, exclusive=0, reverse=0):
    ax = int(np.asarray(axis).ravel()[0])
    if exclusive or reverse:
        raise UnsupportedOp("CumSum exclusive/reverse not supported")
    return np.cumsum(data, axis=ax, dtype=data.dtype)


def _unsqueeze(data, axes):
    for a in sorted(int(a) for a in np.asarray(axes).ravel()):
        data = np.expand_dims(data, a if a >= 0 else a + data.ndim + 1)
    return data


def _expand(data, shape):
    return data * np.ones([int(s) for s in np.asarray(shape).ravel()],
                          dtype=data.dtype)


def _matmul(a, b):
    # accumulate in float32 like standard runtimes; inputs are float32
    return np.matmul(a, b)


_BINARY = {
    "Add": np.add,
    "Sub": np.subtract,
    "Mul": np.multiply,
    "Div": np.divide,
    "Pow": np.power,
}

_UNARY = {
    "Tanh": np.tanh,
    "Sqrt": np.sqrt,
    "Erf": _erf,
    "Neg": np.negative,
    "Exp": np.exp,
    "Sigmoid": lambda x: 1.0 / (1.0 + np.exp(-x)),
    "Relu": lambda x: np.maximum(x, 0),
    "Identity": lambda x: x,
}

SUPPORTED_OPS = (set(_BINARY) | set(_UNARY) |
                 {"MatMul", "Gather", "Softmax", "Reshape", "Transpose",
                  "Unsqueeze", "Squeeze", "Cast", "CumSum", "Slice", "Concat",
                  "ReduceMean", "Expand", "Shape", "Constant", "Where",
                  "Equal", "ConstantOfShape"})


class GraphRunner:
    """Executes one decoded model; instances are stateless across calls."""

    def __init__(self, model: Model):
        self.model = model
        self.graph = model.graph
        unsupported = sorted({n.op_type for n in self.graph.nodes}
                             - SUPPORTED_OPS)
        if unsupported:
            raise UnsupportedOp(f"graph uses unsupported ops: {unsupported}")
        self._feed_names = [name for name in self.graph.inputs
                            if name not in self.graph.initializers]

    @property
    def input_names(self) -> list[str]:
        return list(self._feed_names)

    @property
    def output_names(self) -> list[str]:
        return list(self.graph.outputs)

    def run(self, feeds: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
        missing = [n for n in self._feed_names if n not in feeds]
        if missing:
            raise ValueError(f"missing graph inputs: {missing}")
        env: dict[str, np.ndarray] = dict(self.graph.initializers)
        env.update({k: np.asarray(v) for k, v in feeds.items()})
        for node in self.graph.nodes:
            args = [env[name] if name else None for name in node.inputs]
            env[node.outputs[0]] = self._apply(node.op_type, node.attrs, args)
        return {name: env[name] for name in self.graph.outputs}

    @staticmethod
    def _apply(op: str, attrs: dict, args: list) -> np.ndarray:
        if op in _BINARY:
            return _BINARY[op](args[0], args[1])
        if op in _UNARY:
            return _UNARY[op](args[0])
        if op == "MatMul":
            return _matmul(args[0], args[1])
        if op == "Gather":
            return _gather(args[0], args[1], attrs.get("axis", 0))
        if op == "Softmax":
            return _softmax(args[0], attrs.get("axis", -1))
        if op == "Reshape":
            return _reshape(args[0], args[1], attrs.get("allowzero", 0))
        if op == "Transpose":
            perm = attrs.get("perm")
            return np.transpose(args[0], perm and [int(p) for p in perm])
        if op == "Unsqueeze":
            axes = args[1] if len(args) > 1 else attrs.get("axes")
            return _unsqueeze(args[0], axes)
        if op == "Squeeze":
            axes = args[1] if len(args) > 1 else attrs.get("axes")
            if axes is None:
                return np.squeeze(args[0])
            return np.squeeze(args[0], axis=tuple(int(a) for a in np.asarray(axes).ravel()))
        if op == "Cast":
            return _cast(args[0], attrs["to"])
        if op == "CumSum":
            return _cumsum(args[0], args[1])
        if op == "Slice":
            return _slice_op(args[0], args[1], args[2],
                             args[3] if len(args) > 3 else None,
                             args[4] if len(args) > 4 else None)
        if op == "Concat":
            return np.concatenate([a for a in args], axis=int(attrs["axis"]))
        if op == "ReduceMean":
            return _reduce_mean(args[0], attrs.get("axes"), attrs.get("keepdims", 1))
        if op == "Expand":
            return _expand(args[0], args[1])
        if op == "Shape":
            return np.asarray(args[0].shape, dtype=np.int64)
        if op == "Constant":
            for key in ("value", "value_float", "value_int"):
                if key in attrs:
                    return np.asarray(attrs[key])
            raise UnsupportedOp("Constant node without value attribute")
        if op == "Where":
            return np.where(args[0], args[1], args[2])
        if op == "Equal":
            return np.equal(args[0], args[1])
        if op == "ConstantOfShape":
            value = attrs.get("value")
            fill = value.ravel()[0] if value is not None else np.float32(0)
            return np.full([int(s) for s in np.asarray(args[0]).ravel()], fill,
                           dtype=value.dtype if value is not None else np.float32)
        raise UnsupportedOp(op)


def load_runner(path) -> GraphRunner:
    """Decode an .onnx file and wrap it in a GraphRunner."""
    from .onnx_decode import decode_model
    with open(path, "rb") as fh:
        return GraphRunner(decode_model(fh.read()))
