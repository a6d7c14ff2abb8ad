"""Self-contained ONNX model file decoder.

Parses the protobuf wire format directly (no protobuf/onnx dependency)
into light dataclasses covering the subset of ModelProto needed to run
sequence-classifier graphs: graph topology, node attributes, and
initializer tensors.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

# TensorProto.DataType -> numpy dtype
TENSOR_DTYPES = {
    1: np.dtype("float32"),
    2: np.dtype("uint8"),
    3: np.dtype("int8"),
    5: np.dtype("int16"),
    6: np.dtype("int32"),
    7: np.dtype("int64"),
    9: np.dtype("bool"),
    10: np.dtype("float16"),
    11: np.dtype("float64"),
    12: np.dtype("uint32"),
    13: np.dtype("uint64"),
}


class OnnxDecodeError(ValueError):
    pass


def _read_varint(buf: bytes, pos: int) -> tuple[int, int]:
    result = 0
    shift = 0
    while True:
        if pos >= len(buf):
            raise OnnxDecodeError("truncated varint")
        b = buf[pos]
        pos += 1
        result |= (b & 0x7F) << shift
        if not b & 0x80:
            return result, pos
        shift += 7
        if shift > 70:
            raise OnnxDecodeError("varint too long")


def _iter_fields(buf: bytes):
    """Yield (field_number, wire_type, value) over one message's bytes."""
    pos = 0
    n = len(buf)
    while pos < n:
        key, pos = _read_varint(buf, pos)
        fnum, wtype = key >> 3, key & 0x07
        if wtype == 0:
            value, pos = _read_varint(buf, pos)
        elif wtype == 1:
            value = buf[pos:pos + 8]
            pos += 8
        elif wtype == 2:
            length, pos = _read_varint(buf, pos)
            value = buf[pos:pos + length]
            if len(value) != length:
                raise OnnxDecodeError("truncated length-delimited field")
            pos += length
        elif wtype == 5:
            value = buf[pos:pos + 4]
            pos += 4
        else:
            raise OnnxDecodeError(f"unsupported wire type {wtype}")
        yield fnum, wtype, value


def _as_signed(v: int) -> int:
    return v - (1 << 64) if v >= (1 << 63) else v


@dataclass
class Tensor:
    name: str
    array: np.ndarray


@dataclass
class Node:
    op_type: str
    inputs: list[str]
    outputs: list[str]
    name: str = ""
    attrs: dict = field(default_factory=dict)


@dataclass
class Graph:
    nodes: list[Node]
    initializers: dict[str, np.ndarray]
    inputs: list[str]
    outputs: list[str]
    name: str = ""


@dataclass
class Model:
    graph: Graph
    ir_version: int = 0
    opset_version: int = 0
    producer: str = ""
    metadata: dict[str, str] = field(default_factory=dict)


def _decode_tensor(buf: bytes) -> Tensor:
    dims: list[int] = []
    data_type = 1
    raw = b""
    floats: list[float] = []
    ints: list[int] = []
    doubles: list[float] = []
    name = ""
    for fnum, wtype, value in _iter_fields(buf):
        if fnum == 1:  # dims
            if wtype == 0:
                dims.append(_as_signed(value))
            else:
                pos = 0
                while pos < len(value):
                    v, pos = _read_varint(value, pos)
                    dims.append(_as_signed(v))
        elif fnum == 2:
            data_type = value
        elif fnum == 4:  # float_data
            if wtype == 5:
                floats.append(struct.unpack("<f", value)[0])
            else:
                floats.extend(struct.unpack(f"<{len(value) // 4}f", value))
        elif fnum == 5 or fnum == 7:  # int32_data / int64_data
            if wtype == 0:
                ints.append(_as_signed(value))
            else:
                pos = 0
                while pos < len(value):
                    v, pos = _read_varint(value, pos)
                    ints.append(_as_signed(v))
        elif fnum == 8:
            name = value.decode("utf-8")
        elif fnum == 9:
            raw = value
        elif fnum == 10:  # double_data
            if wtype == 1:
                doubles.append(struct.unpack("<d", value)[0])
            else:
                doubles.extend(struct.unpack(f"<{len(value) // 8}d", value))
    dtype = TENSOR_DTYPES.get(data_type)
    if dtype is None:
        raise OnnxDecodeError(f"unsupported tensor data type {data_type} for {name!r}")
    if raw:
        arr = np.frombuffer(raw, dtype=dtype)
    elif floats:
        arr = np.asarray(floats, dtype=dtype)
    elif doubles:
        arr = np.asarray(doubles, dtype=dtype)
    else:
        arr = np.asarray(ints, dtype=dtype)
    return Tensor(name=name, array=arr.reshape(dims) if dims else arr.reshape(()))


def _decode_attr(buf: bytes) -> tuple[str, object]:
    name = ""
    atype = 0
    f_val = 0.0
    i_val = 0
    s_val = b""
    t_val = None
    floats: list[float] = []
    ints: list[int] = []
    strings: list[bytes] = []
    for fnum, wtype, value in _iter_fields(buf):
        if fnum == 1:
            name = value.decode("utf-8")
        elif fnum == 20:
            atype = value
        elif fnum == 2:
            f_val = struct.unpack("<f", value)[0]
        elif fnum == 3:
            i_val = _as_signed(value)
        elif fnum == 4:
            s_val = value
        elif fnum == 5:
            t_val = _decode_tensor(value)
        elif fnum == 7:
            if wtype == 5:
                floats.append(struct.unpack("<f", value)[0])
            else:
                floats.extend(struct.unpack(f"<{len(value) // 4}f", value))
        elif fnum == 8:
            if wtype == 0:
                ints.append(_as_signed(value))
            else:
                pos = 0
                while pos < len(value):
                    v, pos = _read_varint(value, pos)
                    ints.append(_as_signed(v))
        elif fnum == 9:
            strings.append(value)
    by_type = {
        1: f_val, 2: i_val, 3: s_val.decode("utf-8", "replace"),
        4: t_val.array if t_val is not None else None,
        6: floats, 7: ints, 8: [s.decode("utf-8", "replace") for s in strings],
    }
    if atype not in by_type:
        raise OnnxDecodeError(f"unsupported attribute type {atype} for {name!r}")
    return name, by_type[atype]


def _decode_node(buf: bytes) -> Node:
    node = Node(op_type="", inputs=[], outputs=[])
    for fnum, _wtype, value in _iter_fields(buf):
        if fnum == 1:
            node.inputs.append(value.decode("utf-8"))
        elif fnum == 2:
            node.outputs.append(value.decode("utf-8"))
        elif fnum == 3:
            node.name = value.decode("utf-8")
        elif fnum == 4:
            node.op_type = value.decode("utf-8")
        elif fnum == 5:
            k, v = _decode_attr(value)
            node.attrs[k] = v
    return node


def _value_info_name(buf: bytes) -> str:
    for fnum, _wtype, value in _iter_fields(buf):
        if fnum == 1:
            return value.decode("utf-8")
    return ""


def _decode_graph(buf: bytes) -> Graph:
    graph = Graph(nodes=[], initializers={}, inputs=[], outputs=[])
    for fnum, _wtype, value in _iter_fields(buf):
        if fnum == 1:
            graph.nodes.append(_decode_node(value))
        elif fnum == 2:
            graph.name = value.decode("utf-8")
        elif fnum == 5:
            t = _decode_tensor(value)
            graph.initializers[t.name] = t.array
        elif fnum == 11:
            graph.inputs.append(_value_info_name(value))
        elif fnum == 12:
            graph.outputs.append(_value_info_name(value))
    return graph


def decode_model(data: bytes) -> Model:
    """Decode ONNX ModelProto bytes."""
    graph = None
    ir_version = 0
    opset = 0
    producer = ""
    metadata: dict[str, str] = {}
    for fnum, _wtype, value in _iter_fields(data):
        if fnum == 1:
            ir_version = _as_signed(value)
        elif fnum == 2:
            domain, version = "", 0
            for f2, _w2, v2 in _iter_fields(value):
                if f2 == 1:
                    domain = v2.decode("utf-8")
                elif f2 == 2:
                    version = _as_signed(v2)
            if domain in ("", "ai.onnx"):
                opset = max(opset, version)
        elif fnum == 3:
            producer = value.decode("utf-8")
        elif fnum == 7:
            graph = _decode_graph(value)
        elif fnum == 14:
            k = v = ""
            for f2, _w2, v2 in _iter_fields(value):
                if f2 == 1:
                    k = v2.decode("utf-8")
                elif f2 == 2:
                    v = v2.decode("utf-8")
            metadata[k] = v
    if graph is None:
        raise OnnxDecodeError("model has no graph")
    return Model(graph=graph, ir_version=ir_version, opset_version=opset,
                 producer=producer, metadata=metadata)
