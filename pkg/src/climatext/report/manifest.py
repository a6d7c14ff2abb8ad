"""Run manifest: config snapshot, input digests, output inventory."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
from pathlib import Path


def file_sha256(path: Path | str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def build_manifest(config_snapshot: dict, input_paths: list[Path | str],
                   output_dir: Path | str,
                   extra: dict | None = None) -> dict:
    """Manifest document sufficient to re-run bit-identically.

    The timestamp is the only non-reproducible field; comparisons should
    drop it (see strip_timestamp).
    """
    output_dir = Path(output_dir)
    outputs = {}
    for p in sorted(output_dir.rglob("*")):
        if p.is_file() and p.name != "manifest.json":
            outputs[str(p.relative_to(output_dir))] = file_sha256(p)
    return {
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "config": config_snapshot,
        "inputs": {str(p): file_sha256(p) for p in sorted(map(str, input_paths))},
        "outputs": outputs,
        **(extra or {}),
    }


def write_manifest(path: Path | str, manifest: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def strip_timestamp(manifest: dict) -> dict:
    return {k: v for k, v in manifest.items() if k != "timestamp"}
