"""climexport CLI: export checkpoints and emit the parity fixture."""

from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path

import click

from .export import DEFAULT_MODELS, DownloadFailure, ExportSpec, emit_parity_fixture, export_models
from .graphs import ConversionMismatch
from .labels import LabelMapError


def _default_samples() -> Path:
    return Path(str(resources.files("climexport") / "data" /
                    "sample_paragraphs.txt"))


@click.group()
def main():
    """Convert the four paragraph-classifier checkpoints to ONNX."""


@main.command()
@click.option("--output", "-o", required=True, type=click.Path(file_okay=False),
              help="Directory for <axis>.onnx/.json/.tokenizer.json + parity.jsonl")
@click.option("--model", "-m", "models", multiple=True,
              help="Override one axis: axis=hf_id_or_local_path (repeatable).")
@click.option("--samples", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Sample paragraphs file (one per line).")
@click.option("--skip-fixture", is_flag=True,
              help="Export graphs only, no parity fixture.")
def export(output: str, models: tuple[str, ...], samples: str | None,
           skip_fixture: bool):
    """Export all four axes and write the parity fixture."""
    refs = dict(DEFAULT_MODELS)
    for item in models:
        axis, _, ref = item.partition("=")
        if not ref:
            raise click.BadParameter(f"--model needs axis=ref, got {item!r}")
        refs[axis] = ref
    try:
        spec = ExportSpec(output_dir=Path(output),
                          samples_path=Path(samples) if samples
                          else _default_samples(),
                          models=refs)
        metas = export_models(spec)
        for axis, meta in sorted(metas.items()):
            click.echo(f"{axis}: {len(meta['model_labels'])} labels "
                       f"{meta['model_labels']} -> {meta['canonical_labels']}")
        if not skip_fixture:
            path = emit_parity_fixture(spec)
            n_lines = sum(1 for _ in open(path, encoding="utf-8"))
            click.echo(f"parity fixture: {path} ({n_lines} lines)")
    except (DownloadFailure, ConversionMismatch, LabelMapError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
