"""Builds offline test artifacts for the downstream parity gate.

Creates four tiny seeded checkpoints, exports them to ONNX with
tokenizer assets, and emits the parity fixture into
export_kit/artifacts/ (the default location the pipeline's acceptance
suite probes; override with CLIMATEXT_PARITY_DIR).

With network access, export the published checkpoints instead:
    climexport export -o export_kit/artifacts
"""

from __future__ import annotations

import sys
import tempfile
from importlib import resources
from pathlib import Path

from climexport.export import ExportSpec, emit_parity_fixture, export_models
from climexport.testing import build_all_tiny_checkpoints


def main() -> int:
    out = Path(__file__).resolve().parent.parent / "artifacts"
    samples = Path(str(resources.files("climexport") / "data"
                       / "sample_paragraphs.txt"))
    with tempfile.TemporaryDirectory() as tmp:
        refs = build_all_tiny_checkpoints(Path(tmp), seed=0)
        spec = ExportSpec(output_dir=out, samples_path=samples, models=refs)
        export_models(spec)
        fixture = emit_parity_fixture(spec)
    print(f"artifacts written to {out}")
    print(f"parity fixture: {fixture}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
