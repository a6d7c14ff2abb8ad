"""ONNX graph construction for RoBERTa-family sequence classifiers.

Rebuilds the checkpoint's forward pass (embeddings with the cumulative
position-id scheme, pre-softmax additive attention mask, erf GELU,
first-token classification head) as explicit opset-13 nodes over the
extracted weights. Inputs: input_ids int64 [batch, seq], attention_mask
float32 [batch, seq]. Output: logits float32 [batch, n_labels].
"""

from __future__ import annotations

import math

import numpy as np

from .onnx_write import FLOAT, INT64, GraphBuilder

FP32_MIN = float(np.finfo(np.float32).min)


class ConversionMismatch(ValueError):
    """Checkpoint shape/metadata disagrees with what the builder expects."""


def _np(tensor) -> np.ndarray:
    return tensor.detach().cpu().numpy().astype(np.float32)


class RobertaGraphBuilder:
    def __init__(self, config, state_dict):
        if getattr(config, "hidden_act", "gelu") != "gelu":
            raise ConversionMismatch(
                f"unsupported activation {config.hidden_act!r} (need erf gelu)")
        self.cfg = config
        self.sd = state_dict
        self.b = GraphBuilder("sequence_classifier")

    def _w(self, key: str) -> np.ndarray:
        try:
            return _np(self.sd[key])
        except KeyError:
            raise ConversionMismatch(f"missing weight {key}") from None

    def _linear(self, x: str, prefix: str, stem: str) -> str:
        w = self.b.init(f"{stem}_w", self._w(f"{prefix}.weight").T)
        bias = self.b.init(f"{stem}_b", self._w(f"{prefix}.bias"))
        mm = self.b.add_node("MatMul", [x, w], stem=f"{stem}_mm")
        return self.b.add_node("Add", [mm, bias], stem=f"{stem}_add")

    def _layer_norm(self, x: str, prefix: str, stem: str) -> str:
        b = self.b
        gamma = b.init(f"{stem}_g", self._w(f"{prefix}.weight"))
        beta = b.init(f"{stem}_b", self._w(f"{prefix}.bias"))
        eps = b.const_f32(f"{stem}_eps", self.cfg.layer_norm_eps)
        mean = b.add_node("ReduceMean", [x], stem=f"{stem}_mu",
                          axes=[-1], keepdims=1)
        centered = b.add_node("Sub", [x, mean], stem=f"{stem}_c")
        sq = b.add_node("Mul", [centered, centered], stem=f"{stem}_sq")
        var = b.add_node("ReduceMean", [sq], stem=f"{stem}_var",
                         axes=[-1], keepdims=1)
        denom = b.add_node("Sqrt", [b.add_node("Add", [var, eps],
                                               stem=f"{stem}_ve")],
                           stem=f"{stem}_sd")
        normed = b.add_node("Div", [centered, denom], stem=f"{stem}_n")
        scaled = b.add_node("Mul", [normed, gamma], stem=f"{stem}_s")
        return b.add_node("Add", [scaled, beta], stem=f"{stem}_out")

    def _gelu(self, x: str, stem: str) -> str:
        b = self.b
        half = b.const_f32(f"{stem}_half", 0.5)
        one = b.const_f32(f"{stem}_one", 1.0)
        sqrt2 = b.const_f32(f"{stem}_sqrt2", math.sqrt(2.0))
        erf = b.add_node("Erf", [b.add_node("Div", [x, sqrt2],
                                            stem=f"{stem}_z")],
                         stem=f"{stem}_erf")
        gate = b.add_node("Add", [erf, one], stem=f"{stem}_gate")
        return b.add_node("Mul",
                          [b.add_node("Mul", [x, half], stem=f"{stem}_xh"), gate],
                          stem=f"{stem}_out")

    def _embeddings(self) -> tuple[str, str]:
        """Returns (hidden_states, additive_attention_bias)."""
        b = self.b
        cfg = self.cfg
        pad = cfg.pad_token_id

        word = b.init("word_emb", self._w("roberta.embeddings.word_embeddings.weight"))
        pos = b.init("pos_emb", self._w("roberta.embeddings.position_embeddings.weight"))
        # token_type_ids are all zero: adding row 0 as a constant vector
        tt0 = b.init("tok_type0",
                     self._w("roberta.embeddings.token_type_embeddings.weight")[0])

        # position ids: cumsum over non-pad positions, offset by pad id
        pad_c = b.const_i64("pad_id", pad)
        is_pad = b.add_node("Equal", ["input_ids", pad_c], stem="is_pad")
        pad01 = b.add_node("Cast", [is_pad], stem="pad01", to=INT64)
        one_i = b.const_i64("one_i", 1)
        not_pad = b.add_node("Sub", [one_i, pad01], stem="not_pad")
        axis1 = b.const_i64("axis1", np.asarray(1))
        csum = b.add_node("CumSum", [not_pad, axis1], stem="csum")
        incr = b.add_node("Mul", [csum, not_pad], stem="incr")
        pos_ids = b.add_node("Add", [incr, pad_c], stem="pos_ids")

        we = b.add_node("Gather", [word, "input_ids"], stem="we", axis=0)
        pe = b.add_node("Gather", [pos, pos_ids], stem="pe", axis=0)
        summed = b.add_node("Add",
                            [b.add_node("Add", [we, pe], stem="wp"), tt0],
                            stem="emb_sum")
        hidden = self._layer_norm(summed, "roberta.embeddings.LayerNorm", "emb_ln")

        # additive mask: (1 - attention_mask) * fp32_min, shape [B,1,1,S]
        one_f = b.const_f32("one_f", 1.0)
        inv = b.add_node("Sub", [one_f, "attention_mask"], stem="inv_mask")
        neg = b.add_node("Mul", [inv, b.const_f32("fp32_min", FP32_MIN)],
                         stem="neg_mask")
        axes = b.const_i64("mask_axes", np.asarray([1, 2]))
        bias = b.add_node("Unsqueeze", [neg, axes], stem="attn_bias")
        return hidden, bias

    def _attention(self, x: str, i: int, bias: str) -> str:
        b = self.b
        cfg = self.cfg
        h = cfg.num_attention_heads
        dh = cfg.hidden_size // h
        prefix = f"roberta.encoder.layer.{i}.attention"
        shape_split = b.const_i64(f"l{i}_split", np.asarray([0, 0, h, dh]))
        shape_merge = b.const_i64(f"l{i}_merge", np.asarray([0, 0, cfg.hidden_size]))

        def heads(name: str, linear_out: str, transposed_for_scores=True) -> str:
            r = b.add_node("Reshape", [linear_out, shape_split],
                           stem=f"l{i}_{name}_r")
            return b.add_node("Transpose", [r], stem=f"l{i}_{name}_t",
                              perm=[0, 2, 1, 3])

        q = heads("q", self._linear(x, f"{prefix}.self.query", f"l{i}_q"))
        k = heads("k", self._linear(x, f"{prefix}.self.key", f"l{i}_k"))
        v = heads("v", self._linear(x, f"{prefix}.self.value", f"l{i}_v"))

        kt = b.add_node("Transpose", [k], stem=f"l{i}_kT", perm=[0, 1, 3, 2])
        scores = b.add_node("MatMul", [q, kt], stem=f"l{i}_scores")
        scale = b.const_f32(f"l{i}_scale", 1.0 / math.sqrt(dh))
        scaled = b.add_node("Mul", [scores, scale], stem=f"l{i}_scaled")
        masked = b.add_node("Add", [scaled, bias], stem=f"l{i}_masked")
        probs = b.add_node("Softmax", [masked], stem=f"l{i}_probs", axis=-1)
        ctx = b.add_node("MatMul", [probs, v], stem=f"l{i}_ctx")
        merged = b.add_node(
            "Reshape",
            [b.add_node("Transpose", [ctx], stem=f"l{i}_ctx_t",
                        perm=[0, 2, 1, 3]), shape_merge],
            stem=f"l{i}_ctx_m")
        out = self._linear(merged, f"{prefix}.output.dense", f"l{i}_attn_out")
        residual = b.add_node("Add", [x, out], stem=f"l{i}_attn_res")
        return self._layer_norm(residual, f"{prefix}.output.LayerNorm",
                                f"l{i}_attn_ln")

    def _ffn(self, x: str, i: int) -> str:
        b = self.b
        prefix = f"roberta.encoder.layer.{i}"
        inner = self._gelu(
            self._linear(x, f"{prefix}.intermediate.dense", f"l{i}_ffn1"),
            f"l{i}_gelu")
        out = self._linear(inner, f"{prefix}.output.dense", f"l{i}_ffn2")
        residual = b.add_node("Add", [x, out], stem=f"l{i}_ffn_res")
        return self._layer_norm(residual, f"{prefix}.output.LayerNorm",
                                f"l{i}_ffn_ln")

    def _head(self, x: str) -> str:
        b = self.b
        first = b.add_node("Gather", [x, b.const_i64("tok0", np.asarray(0))],
                           stem="first_token", axis=1)
        dense = self._linear(first, "classifier.dense", "head_dense")
        t = b.add_node("Tanh", [dense], stem="head_tanh")
        w = b.init("head_out_w", self._w("classifier.out_proj.weight").T)
        bias = b.init("head_out_b", self._w("classifier.out_proj.bias"))
        mm = b.add_node("MatMul", [t, w], stem="head_out_mm")
        return b.add_node("Add", [mm, bias], stem="logits", out_name="logits")

    def build(self) -> bytes:
        b = self.b
        b.declare_input("input_ids", INT64, ["batch", "seq"])
        b.declare_input("attention_mask", FLOAT, ["batch", "seq"])
        hidden, bias = self._embeddings()
        for i in range(self.cfg.num_hidden_layers):
            hidden = self._attention(hidden, i, bias)
            hidden = self._ffn(hidden, i)
        self._head(hidden)
        b.declare_output("logits", FLOAT, ["batch", self.cfg.num_labels])
        return b.serialize()


def build_classifier_graph(model) -> bytes:
    """ONNX bytes for a transformers RobertaForSequenceClassification."""
    n_labels = model.config.num_labels
    out_proj = model.state_dict()["classifier.out_proj.weight"]
    if out_proj.shape[0] != n_labels:
        raise ConversionMismatch(
            f"head emits {out_proj.shape[0]} logits, config says {n_labels}")
    return RobertaGraphBuilder(model.config, model.state_dict()).build()
