"""Minimal ONNX ModelProto writer (protobuf wire format, no deps).

Only the messages a feed-forward inference graph needs: nodes with
int/float/ints/tensor attributes, float/int64 initializers, and value
infos with symbolic batch/sequence dims. Field numbers follow onnx.proto3.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

FLOAT = 1
INT64 = 7

_DTYPE_CODES = {np.dtype("float32"): FLOAT, np.dtype("int64"): INT64}


def _varint(value: int) -> bytes:
    value &= 0xFFFFFFFFFFFFFFFF
    out = bytearray()
    while True:
        b = value & 0x7F
        value >>= 7
        out.append(b | (0x80 if value else 0))
        if not value:
            return bytes(out)


def _key(field_num: int, wire: int) -> bytes:
    return _varint((field_num << 3) | wire)


def _vint(field_num: int, value: int) -> bytes:
    return _key(field_num, 0) + _varint(value)


def _bytes_field(field_num: int, payload: bytes) -> bytes:
    return _key(field_num, 2) + _varint(len(payload)) + payload


def _str(field_num: int, text: str) -> bytes:
    return _bytes_field(field_num, text.encode("utf-8"))


def _float32(field_num: int, value: float) -> bytes:
    return _key(field_num, 5) + struct.pack("<f", value)


def tensor_proto(name: str, array: np.ndarray) -> bytes:
    arr = np.asarray(array)
    if arr.ndim:
        arr = np.ascontiguousarray(arr)
    code = _DTYPE_CODES.get(arr.dtype)
    if code is None:
        raise ValueError(f"unsupported initializer dtype {arr.dtype} for {name}")
    body = b"".join(_vint(1, d) for d in arr.shape)
    body += _vint(2, code)
    body += _str(8, name)
    body += _bytes_field(9, arr.tobytes())
    return body


def _attribute(name: str, value) -> bytes:
    body = _str(1, name)
    if isinstance(value, bool):
        raise TypeError("bool attributes are ambiguous; use int")
    if isinstance(value, int):
        body += _vint(3, value) + _vint(20, 2)            # INT
    elif isinstance(value, float):
        body += _float32(2, value) + _vint(20, 1)         # FLOAT
    elif isinstance(value, (list, tuple)) and all(
            isinstance(v, int) for v in value):
        body += b"".join(_vint(8, v) for v in value) + _vint(20, 7)  # INTS
    elif isinstance(value, np.ndarray):
        body += _bytes_field(5, tensor_proto("", value)) + _vint(20, 4)  # TENSOR
    else:
        raise TypeError(f"unsupported attribute type for {name}: {type(value)}")
    return body


@dataclass
class NodeSpec:
    op_type: str
    inputs: list[str]
    outputs: list[str]
    attrs: dict = field(default_factory=dict)
    name: str = ""


def node_proto(node: NodeSpec) -> bytes:
    body = b"".join(_str(1, i) for i in node.inputs)
    body += b"".join(_str(2, o) for o in node.outputs)
    if node.name:
        body += _str(3, node.name)
    body += _str(4, node.op_type)
    body += b"".join(_bytes_field(5, _attribute(k, v))
                     for k, v in node.attrs.items())
    return body


def value_info(name: str, elem_type: int, dims: list) -> bytes:
    """dims entries: int (fixed) or str (symbolic, e.g. 'batch')."""
    shape = b""
    for d in dims:
        dim = _vint(1, d) if isinstance(d, int) else _str(2, d)
        shape += _bytes_field(1, dim)
    tensor_type = _vint(1, elem_type) + _bytes_field(2, shape)
    type_proto = _bytes_field(1, tensor_type)
    return _str(1, name) + _bytes_field(2, type_proto)


class GraphBuilder:
    """Accumulates nodes/initializers and serializes one ModelProto."""

    def __init__(self, name: str):
        self.name = name
        self.nodes: list[NodeSpec] = []
        self.initializers: dict[str, np.ndarray] = {}
        self.inputs: list[bytes] = []
        self.outputs: list[bytes] = []
        self._counter = 0

    def fresh(self, stem: str) -> str:
        self._counter += 1
        return f"{stem}_{self._counter}"

    def init(self, stem: str, array: np.ndarray) -> str:
        name = self.fresh(stem)
        arr = np.asarray(array)
        if arr.ndim:  # ascontiguousarray would promote 0-d scalars to 1-D
            arr = np.ascontiguousarray(arr)
        self.initializers[name] = arr
        return name

    def const_f32(self, stem: str, value) -> str:
        return self.init(stem, np.asarray(value, dtype=np.float32))

    def const_i64(self, stem: str, value) -> str:
        return self.init(stem, np.asarray(value, dtype=np.int64))

    def add_node(self, op_type: str, inputs: list[str], stem: str | None = None,
                 out_name: str | None = None, **attrs) -> str:
        stem = stem or op_type.lower()
        outputs = [out_name or self.fresh(stem)]
        self.nodes.append(NodeSpec(op_type=op_type, inputs=list(inputs),
                                   outputs=outputs, attrs=attrs,
                                   name=self.fresh(f"node_{stem}")))
        return outputs[0]

    def declare_input(self, name: str, elem_type: int, dims: list) -> None:
        self.inputs.append(value_info(name, elem_type, dims))

    def declare_output(self, name: str, elem_type: int, dims: list) -> None:
        self.outputs.append(value_info(name, elem_type, dims))

    def serialize(self, producer: str = "climexport",
                  opset: int = 13, ir_version: int = 8) -> bytes:
        graph = b"".join(_bytes_field(1, node_proto(n)) for n in self.nodes)
        graph += _str(2, self.name)
        graph += b"".join(_bytes_field(5, tensor_proto(k, v))
                          for k, v in self.initializers.items())
        graph += b"".join(_bytes_field(11, vi) for vi in self.inputs)
        graph += b"".join(_bytes_field(12, vi) for vi in self.outputs)
        opset_id = _str(1, "") + _vint(2, opset)
        model = (_vint(1, ir_version)
                 + _bytes_field(2, opset_id)
                 + _str(3, producer)
                 + _bytes_field(7, graph))
        return model
