"""Checkpoint export: HF model dirs/ids -> ONNX + tokenizer + metadata."""

from __future__ import annotations

import json
import shutil
from dataclasses import dataclass, field
from pathlib import Path

from .graphs import ConversionMismatch, build_classifier_graph
from .labels import AXES, canonicalize

# published checkpoints, overridable per axis (local paths work offline)
DEFAULT_MODELS: dict[str, str] = {
    "sentiment": "climatebert/distilroberta-base-climate-sentiment",
    "commitment": "climatebert/distilroberta-base-climate-commitment",
    "specificity": "climatebert/distilroberta-base-climate-specificity",
    "target": "climatebert/netzero-reduction",
}


class DownloadFailure(RuntimeError):
    pass


@dataclass
class ExportSpec:
    output_dir: Path
    samples_path: Path
    models: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_MODELS))

    def __post_init__(self):
        if sorted(self.models) != sorted(AXES):
            raise ValueError(f"need exactly the four axes {sorted(AXES)}, "
                             f"got {sorted(self.models)}")
        self.output_dir = Path(self.output_dir)
        self.samples_path = Path(self.samples_path)
        if not self.samples_path.is_file() or not self.read_samples():
            raise ValueError(f"samples file empty or missing: {self.samples_path}")

    def read_samples(self) -> list[str]:
        lines = self.samples_path.read_text(encoding="utf-8").splitlines()
        return [ln.strip() for ln in lines if ln.strip()]


def _load_checkpoint(ref: str):
    import torch
    from transformers import AutoModelForSequenceClassification, AutoTokenizer

    try:
        model = AutoModelForSequenceClassification.from_pretrained(ref)
        tokenizer = AutoTokenizer.from_pretrained(ref)
    except Exception as exc:
        raise DownloadFailure(f"cannot load checkpoint {ref!r}: {exc}") from exc
    model.eval()
    torch.set_grad_enabled(False)
    return model, tokenizer


def export_axis(axis: str, ref: str, out_dir: Path) -> dict:
    """One axis: writes <axis>.onnx, <axis>.json, <axis>.tokenizer.json."""
    model, tokenizer = _load_checkpoint(ref)
    cfg = model.config
    model_labels = [cfg.id2label[i] for i in range(cfg.num_labels)]
    canonical = canonicalize(axis, model_labels)
    if len(model_labels) != len(AXES[axis]):
        raise ConversionMismatch(
            f"{axis}: model emits {len(model_labels)} logits, "
            f"expected {len(AXES[axis])}")
    graph = build_classifier_graph(model)

    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{axis}.onnx").write_bytes(graph)

    tok_name = f"{axis}.tokenizer.json"
    _write_tokenizer(tokenizer, out_dir / tok_name)

    max_len = int(min(getattr(tokenizer, "model_max_length", 512) or 512,
                      cfg.max_position_embeddings - 2))
    meta = {
        "axis": axis,
        "source": ref,
        "model_labels": model_labels,
        "canonical_labels": canonical,
        "max_length": max_len,
        "pad_token_id": int(cfg.pad_token_id),
        "tokenizer_file": tok_name,
        "hidden_size": int(cfg.hidden_size),
        "num_layers": int(cfg.num_hidden_layers),
        "opset": 13,
    }
    (out_dir / f"{axis}.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return meta


def _write_tokenizer(tokenizer, dest: Path) -> None:
    backend = getattr(tokenizer, "backend_tokenizer", None)
    if backend is not None:
        backend.save(str(dest))
        return
    # slow tokenizer: save_pretrained emits tokenizer.json for most models
    import tempfile
    with tempfile.TemporaryDirectory() as tmp:
        tokenizer.save_pretrained(tmp)
        src = Path(tmp) / "tokenizer.json"
        if not src.is_file():
            raise ConversionMismatch(
                "tokenizer has no fast backend and emits no tokenizer.json")
        shutil.copy(src, dest)


def export_models(spec: ExportSpec) -> dict[str, dict]:
    """All four axes; returns metadata per axis."""
    return {axis: export_axis(axis, ref, spec.output_dir)
            for axis, ref in sorted(spec.models.items())}


def emit_parity_fixture(spec: ExportSpec) -> Path:
    """Reference logits for every sample paragraph on every axis.

    The logits come from the source checkpoint's torch forward pass, so
    the fixture is an oracle for any runtime that consumes the exported
    graphs (parity gate: max |dlogit| <= 1e-4).
    """
    samples = spec.read_samples()
    out_path = spec.output_dir / "parity.jsonl"
    rows = []
    for axis, ref in sorted(spec.models.items()):
        model, tokenizer = _load_checkpoint(ref)
        meta_path = spec.output_dir / f"{axis}.json"
        max_len = 512
        if meta_path.is_file():
            max_len = json.loads(meta_path.read_text())["max_length"]
        for text in samples:
            enc = tokenizer([text], return_tensors="pt", truncation=True,
                            max_length=max_len)
            logits = model(**enc).logits[0].tolist()
            rows.append({"text": text, "axis": axis,
                         "logits": [round(float(v), 8) for v in logits]})
    with open(out_path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    return out_path
