"""Classifier backends: graph inference, fixture playback, keyword stub."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import BackendUnavailable, FixtureMiss, ModelLoadFailure
from ..ingest import Paragraph
from .labels import AXES, AXIS_NAMES, ParagraphLabels, from_scores, one_hot

log = logging.getLogger(__name__)

BACKEND_KINDS = ("graph_runtime", "fixture", "stub")


@dataclass(frozen=True)
class BackendDescriptor:
    kind: str
    model_paths: dict[str, Path] = field(default_factory=dict)
    fixture_path: Path | None = None

    def __post_init__(self):
        if self.kind not in BACKEND_KINDS:
            raise ValueError(f"kind must be one of {BACKEND_KINDS}, got {self.kind!r}")
        if self.kind == "graph_runtime":
            missing = [a for a in AXIS_NAMES if a not in self.model_paths]
            if missing:
                raise ValueError(f"graph_runtime needs model paths for axes {missing}")
            for axis, p in self.model_paths.items():
                if not Path(p).is_file():
                    raise ValueError(f"model file for {axis} not found: {p}")
        if self.kind == "fixture":
            if self.fixture_path is None or not Path(self.fixture_path).is_file():
                raise ValueError(f"fixture file not found: {self.fixture_path}")


# --- stub backend -----------------------------------------------------------
#
# Deterministic keyword rules, one per axis, documented here and in the
# README. First matching rule wins; scores are one-hot.

STUB_RULES: dict[str, tuple[tuple[str, tuple[str, ...]], ...]] = {
    "sentiment": (
        ("risk", ("risk", "threat", "hazard", "stranded", "exposure", "liability")),
        ("opportunity", ("opportunity", "opportunities", "growth", "benefit", "advantage")),
    ),
    "commitment": (
        ("commitment", ("commit", "pledge", "we aim", "our goal", "we will reduce",
                        "dedicated to", "strive to")),
    ),
    "specificity": (
        ("specific", ("%", " by 20", " tonnes", " tco2e", "baseline", "versus 20",
                      "compared to 20")),
    ),
    "target": (
        ("netzero", ("net zero", "net-zero", "carbon neutral", "climate neutral")),
        ("reduction", ("reduce emissions", "reduction target", "cut emissions",
                       "lower emissions", "emission reduction")),
    ),
}

STUB_DEFAULTS = {"sentiment": "neutral", "commitment": "no_commitment",
                 "specificity": "general", "target": "no_target"}


def stub_classify(text: str) -> ParagraphLabels:
    """Rule-table classification; identical output for identical input."""
    hay = " ".join(text.lower().split())
    chosen = {}
    for axis, rules in STUB_RULES.items():
        label = STUB_DEFAULTS[axis]
        for candidate, needles in rules:
            if any(n in hay for n in needles):
                label = candidate
                break
        chosen[axis] = label
    scores = {axis: one_hot(axis, lab) for axis, lab in chosen.items()}
    return ParagraphLabels(scores=scores, **chosen)


class StubBackend:
    thread_safe = True

    def classify(self, paragraph: Paragraph) -> ParagraphLabels:
        return stub_classify(paragraph.text)


# --- fixture backend --------------------------------------------------------


class FixtureBackend:
    """Plays back recorded labels from a JSON-lines file.

    Each line: {"firm_id": ..., "seq": ..., "labels": {axis: label},
    "scores": {axis: [floats]}} (scores optional; one-hot assumed).
    """

    thread_safe = True

    def __init__(self, fixture_path: Path):
        self._by_key: dict[tuple[str, int], ParagraphLabels] = {}
        with open(fixture_path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    labels = rec["labels"]
                    scores = rec.get("scores") or {
                        axis: one_hot(axis, labels[axis]) for axis in AXES}
                    pl = ParagraphLabels(
                        scores={a: tuple(float(x) for x in v)
                                for a, v in scores.items()},
                        **{a: labels[a] for a in AXES})
                except (KeyError, ValueError, json.JSONDecodeError) as exc:
                    raise ModelLoadFailure(
                        f"{fixture_path}:{lineno}: bad fixture record: {exc}") from exc
                self._by_key[(str(rec["firm_id"]), int(rec["seq"]))] = pl

    def classify(self, paragraph: Paragraph) -> ParagraphLabels:
        key = (paragraph.firm_id, paragraph.seq)
        try:
            return self._by_key[key]
        except KeyError:
            raise FixtureMiss(f"paragraph {key} absent from fixture") from None


# --- graph runtime backend --------------------------------------------------


class GraphBackend:
    """Runs one ONNX sequence-classifier per axis with its own tokenizer.

    Each model file sits next to a JSON metadata file (same stem, suffix
    .json) naming the label order, max sequence length, pad token id, and
    the tokenizer asset. Truncated paragraphs are counted: silent
    truncation would bias downstream ratios invisibly.
    """

    thread_safe = True  # executors are stateless per call

    def __init__(self, model_paths: dict[str, Path]):
        try:
            from tokenizers import Tokenizer
        except ImportError as exc:
            raise BackendUnavailable(f"tokenizers package unavailable: {exc}") from exc
        from .onnx_exec import load_runner

        self._runners = {}
        self._meta = {}
        self._tokenizers = {}
        self.truncated: list[tuple[str, int]] = []  # (firm_id, seq) per event
        for axis in AXIS_NAMES:
            path = Path(model_paths[axis])
            meta_path = path.with_suffix(".json")
            try:
                meta = json.loads(meta_path.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise ModelLoadFailure(f"cannot read metadata {meta_path}: {exc}") from exc
            expected = set(AXES[axis])
            canonical = meta.get("canonical_labels") or meta.get("labels")
            if set(canonical) != expected:
                raise ModelLoadFailure(
                    f"{axis} metadata labels {canonical} != expected {sorted(expected)}")
            try:
                self._runners[axis] = load_runner(path)
            except Exception as exc:
                raise ModelLoadFailure(f"cannot load graph {path}: {exc}") from exc
            tok_path = path.parent / meta.get("tokenizer_file", "tokenizer.json")
            try:
                self._tokenizers[axis] = Tokenizer.from_file(str(tok_path))
            except Exception as exc:
                raise ModelLoadFailure(f"cannot load tokenizer {tok_path}: {exc}") from exc
            self._meta[axis] = meta

    def _encode(self, axis: str, texts: list[str]) -> tuple[np.ndarray, np.ndarray, list[int]]:
        meta = self._meta[axis]
        max_len = int(meta.get("max_length", 512))
        pad_id = int(meta.get("pad_token_id", 1))
        encs = self._tokenizers[axis].encode_batch(texts)
        truncated_idx = []
        ids = []
        for i, e in enumerate(encs):
            seq = e.ids
            if len(seq) > max_len:
                seq = seq[:max_len]
                truncated_idx.append(i)
            ids.append(seq)
        width = max(len(s) for s in ids)
        input_ids = np.full((len(ids), width), pad_id, dtype=np.int64)
        mask = np.zeros((len(ids), width), dtype=np.int64)
        for i, seq in enumerate(ids):
            input_ids[i, :len(seq)] = seq
            mask[i, :len(seq)] = 1
        return input_ids, mask, truncated_idx

    def classify_many(self, paragraphs: list[Paragraph]) -> list[ParagraphLabels]:
        texts = [p.text for p in paragraphs]
        probs_by_axis: dict[str, np.ndarray] = {}
        for axis in AXIS_NAMES:
            input_ids, mask, truncated_idx = self._encode(axis, texts)
            if truncated_idx:
                self.truncated.extend(
                    (paragraphs[i].firm_id, paragraphs[i].seq) for i in truncated_idx)
                log.warning("%s: truncated %d/%d paragraphs to max length",
                            axis, len(truncated_idx), len(paragraphs))
            runner = self._runners[axis]
            feeds = {"input_ids": input_ids,
                     "attention_mask": mask.astype(np.float32)}
            feeds = {k: v for k, v in feeds.items() if k in runner.input_names}
            logits = runner.run(feeds)[runner.output_names[0]]
            probs = _softmax_rows(np.asarray(logits, dtype=np.float64))
            # reorder model-card label order into the declared axis order
            order = [list(self._meta[axis]["canonical_labels"]).index(lab)
                     for lab in AXES[axis]]
            probs_by_axis[axis] = probs[:, order]
        out = []
        for i in range(len(paragraphs)):
            scores = {axis: tuple(probs_by_axis[axis][i].tolist())
                      for axis in AXIS_NAMES}
            scores = {a: _renormalize(v) for a, v in scores.items()}
            out.append(from_scores(scores))
        return out

    def classify(self, paragraph: Paragraph) -> ParagraphLabels:
        return self.classify_many([paragraph])[0]


def _softmax_rows(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _renormalize(vec: tuple[float, ...]) -> tuple[float, ...]:
    s = sum(vec)
    return tuple(v / s for v in vec)


# --- gateway ---------------------------------------------------------------


def make_backend(desc: BackendDescriptor):
    if desc.kind == "stub":
        return StubBackend()
    if desc.kind == "fixture":
        return FixtureBackend(Path(desc.fixture_path))
    return GraphBackend(desc.model_paths)


def classify_batch(paragraphs: list[Paragraph],
                   backend: BackendDescriptor | object) -> list[ParagraphLabels]:
    """One ParagraphLabels per input paragraph, order preserved.

    Accepts either a descriptor (backend constructed per call) or an
    already-constructed backend object (to amortize model loading).
    """
    impl = make_backend(backend) if isinstance(backend, BackendDescriptor) else backend
    for p in paragraphs:
        if not p.text:
            raise ValueError(f"empty paragraph text for {(p.firm_id, p.seq)}")
    if hasattr(impl, "classify_many"):
        return impl.classify_many(list(paragraphs))
    return [impl.classify(p) for p in paragraphs]
