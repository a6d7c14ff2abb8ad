"""Export pipeline tests over offline tiny checkpoints."""

from __future__ import annotations

import json
import os

import pytest

os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")

from click.testing import CliRunner

from climexport.cli import main
from climexport.export import ExportSpec, emit_parity_fixture, export_axis, export_models
from climexport.labels import AXES
from climexport.testing import build_all_tiny_checkpoints

SAMPLES = [
    "climate change risk across the portfolio",
    "we commit to net zero by target baseline",
    "carbon footprint data report for energy",
    "reduction target versus baseline tonnes",
    "supplier policy audit of emissions scope",
    "renewable energy growth opportunity",
    "greenhouse gas strategy of the board",
    "transition cost data for our portfolio",
    "we pledge a goal to reduce emissions",
    "scope emissions in the annual report",
    "climate data for the supplier audit",
    "net zero strategy and growth",
]


@pytest.fixture(scope="module")
def checkpoints(tmp_path_factory):
    base = tmp_path_factory.mktemp("ckpts")
    return build_all_tiny_checkpoints(base, seed=0)


@pytest.fixture(scope="module")
def samples_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("samples") / "paragraphs.txt"
    path.write_text("\n".join(SAMPLES) + "\n", encoding="utf-8")
    return path


@pytest.fixture(scope="module")
def exported(checkpoints, samples_file, tmp_path_factory):
    out = tmp_path_factory.mktemp("export")
    spec = ExportSpec(output_dir=out, samples_path=samples_file,
                      models=checkpoints)
    metas = export_models(spec)
    fixture = emit_parity_fixture(spec)
    return out, metas, fixture


class TestExportModels:
    def test_files_per_axis(self, exported):
        out, metas, _ = exported
        for axis in AXES:
            assert (out / f"{axis}.onnx").stat().st_size > 10_000
            assert (out / f"{axis}.json").is_file()
            assert (out / f"{axis}.tokenizer.json").is_file()
        assert set(metas) == set(AXES)

    def test_metadata_contents(self, exported):
        out, _, _ = exported
        meta = json.loads((out / "sentiment.json").read_text())
        assert meta["canonical_labels"] == ["risk", "neutral", "opportunity"]
        assert meta["model_labels"] == ["risk", "neutral", "opportunity"]
        assert meta["pad_token_id"] == 1
        assert meta["max_length"] == 64
        assert meta["tokenizer_file"] == "sentiment.tokenizer.json"

    def test_logit_counts_match_axes(self, exported):
        out, metas, _ = exported
        assert len(metas["sentiment"]["model_labels"]) == 3
        assert len(metas["commitment"]["model_labels"]) == 2
        assert len(metas["specificity"]["model_labels"]) == 2
        assert len(metas["target"]["model_labels"]) == 3

    def test_reexport_identical_bytes(self, checkpoints, tmp_path):
        a = export_axis("commitment", checkpoints["commitment"], tmp_path / "a")
        b = export_axis("commitment", checkpoints["commitment"], tmp_path / "b")
        assert a == b
        assert (tmp_path / "a" / "commitment.onnx").read_bytes() == \
            (tmp_path / "b" / "commitment.onnx").read_bytes()


class TestParityFixture:
    def test_line_count(self, exported):
        _, _, fixture = exported
        lines = [json.loads(l) for l in open(fixture, encoding="utf-8")
                 if l.strip()]
        assert len(lines) == len(SAMPLES) * 4
        per_axis = {}
        for rec in lines:
            per_axis.setdefault(rec["axis"], 0)
            per_axis[rec["axis"]] += 1
        assert all(v >= 10 for v in per_axis.values())

    def test_logits_match_torch_forward(self, exported, checkpoints):
        import torch
        from transformers import AutoModelForSequenceClassification, AutoTokenizer
        _, _, fixture = exported
        rows = [json.loads(l) for l in open(fixture, encoding="utf-8")
                if l.strip()]
        axis = "target"
        model = AutoModelForSequenceClassification.from_pretrained(
            checkpoints[axis]).eval()
        tok = AutoTokenizer.from_pretrained(checkpoints[axis])
        with torch.no_grad():
            for rec in [r for r in rows if r["axis"] == axis][:4]:
                enc = tok([rec["text"]], return_tensors="pt", truncation=True,
                          max_length=64)
                ref = model(**enc).logits[0].tolist()
                assert ref == pytest.approx(rec["logits"], abs=1e-6)

    def test_rerun_identical_within_tolerance(self, checkpoints, samples_file,
                                              tmp_path):
        spec = ExportSpec(output_dir=tmp_path, samples_path=samples_file,
                          models=checkpoints)
        export_models(spec)
        p1 = emit_parity_fixture(spec).read_text()
        p2 = emit_parity_fixture(spec).read_text()
        assert p1 == p2


class TestSpecValidation:
    def test_requires_all_axes(self, samples_file, tmp_path):
        with pytest.raises(ValueError, match="four axes"):
            ExportSpec(output_dir=tmp_path, samples_path=samples_file,
                       models={"sentiment": "x"})

    def test_requires_samples(self, checkpoints, tmp_path):
        empty = tmp_path / "empty.txt"
        empty.write_text("", encoding="utf-8")
        with pytest.raises(ValueError, match="samples"):
            ExportSpec(output_dir=tmp_path, samples_path=empty,
                       models=checkpoints)


class TestErrors:
    def test_unreachable_checkpoint_raises_download_failure(self, samples_file,
                                                            tmp_path):
        from climexport.export import DownloadFailure, export_axis
        with pytest.raises(DownloadFailure):
            export_axis("sentiment", "no-such-org/no-such-model", tmp_path)


class TestCli:
    def test_export_command(self, checkpoints, samples_file, tmp_path):
        args = ["export", "-o", str(tmp_path / "out"),
                "--samples", str(samples_file)]
        for axis, ref in checkpoints.items():
            args += ["-m", f"{axis}={ref}"]
        result = CliRunner().invoke(main, args)
        assert result.exit_code == 0, result.output
        assert "parity fixture" in result.output
        assert (tmp_path / "out" / "parity.jsonl").is_file()

    def test_skip_fixture_flag(self, checkpoints, samples_file, tmp_path):
        args = ["export", "-o", str(tmp_path / "out"),
                "--samples", str(samples_file), "--skip-fixture"]
        for axis, ref in checkpoints.items():
            args += ["-m", f"{axis}={ref}"]
        result = CliRunner().invoke(main, args)
        assert result.exit_code == 0, result.output
        assert not (tmp_path / "out" / "parity.jsonl").exists()
        assert (tmp_path / "out" / "target.onnx").is_file()

    def test_bad_model_override(self, tmp_path):
        result = CliRunner().invoke(main, ["export", "-o", str(tmp_path),
                                           "-m", "nonsense"])
        assert result.exit_code != 0
