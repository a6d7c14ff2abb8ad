"""Offline test checkpoints: tiny seeded RoBERTa classifiers.

Lets the export pipeline (and any downstream runtime) be exercised
without network access: a real transformers checkpoint directory with a
word-level fast tokenizer, built deterministically from a seed.
"""

from __future__ import annotations

from pathlib import Path

from .labels import AXES

_BASE_WORDS = [
    "climate", "change", "risk", "opportunity", "net", "zero", "emissions",
    "scope", "carbon", "we", "commit", "to", "reduce", "reduction", "target",
    "by", "baseline", "strategy", "footprint", "greenhouse", "gas", "energy",
    "renewable", "transition", "our", "the", "of", "and", "a", "in", "for",
    "across", "with", "versus", "pledge", "goal", "tonnes", "data", "report",
    "board", "policy", "audit", "supplier", "portfolio", "growth", "cost",
]


def build_tiny_checkpoint(dest: Path | str, axis: str, seed: int = 0,
                          hidden_size: int = 32, num_layers: int = 2) -> Path:
    """Writes a loadable sequence-classifier checkpoint for ``axis``."""
    import torch
    from tokenizers import Tokenizer, models, pre_tokenizers, processors
    from transformers import (
        PreTrainedTokenizerFast,
        RobertaConfig,
        RobertaForSequenceClassification,
    )

    if axis not in AXES:
        raise ValueError(f"unknown axis {axis!r}")
    labels = list(AXES[axis])
    dest = Path(dest)
    dest.mkdir(parents=True, exist_ok=True)

    vocab = {"<s>": 0, "<pad>": 1, "</s>": 2, "<unk>": 3}
    for word in _BASE_WORDS:
        vocab[word] = len(vocab)
    tok = Tokenizer(models.WordLevel(vocab, unk_token="<unk>"))
    tok.pre_tokenizer = pre_tokenizers.Whitespace()
    tok.post_processor = processors.TemplateProcessing(
        single="<s> $A </s>",
        pair="<s> $A </s> </s> $B </s>",
        special_tokens=[("<s>", 0), ("</s>", 2)],
    )
    fast = PreTrainedTokenizerFast(tokenizer_object=tok, bos_token="<s>",
                                   eos_token="</s>", pad_token="<pad>",
                                   unk_token="<unk>", model_max_length=64)

    torch.manual_seed(seed)
    config = RobertaConfig(
        vocab_size=len(vocab), hidden_size=hidden_size,
        num_hidden_layers=num_layers, num_attention_heads=2,
        intermediate_size=hidden_size * 2, max_position_embeddings=66,
        num_labels=len(labels),
        id2label={i: lab for i, lab in enumerate(labels)},
        label2id={lab: i for i, lab in enumerate(labels)},
    )
    model = RobertaForSequenceClassification(config).eval()
    model.save_pretrained(dest)
    fast.save_pretrained(dest)
    return dest


def build_all_tiny_checkpoints(base: Path | str, seed: int = 0) -> dict[str, str]:
    """One tiny checkpoint per axis; returns the model-ref map."""
    base = Path(base)
    refs = {}
    for i, axis in enumerate(sorted(AXES)):
        refs[axis] = str(build_tiny_checkpoint(base / axis, axis, seed=seed + i))
    return refs
