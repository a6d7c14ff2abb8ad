from __future__ import annotations

import dataclasses
from pathlib import Path

import pytest

from climatext.config import ClusterSettings, PipelineConfig

DATA_DIR = Path(__file__).parent / "data"
CORPUS12 = DATA_DIR / "corpus12"


@pytest.fixture(scope="session")
def corpus12_dir() -> Path:
    assert (CORPUS12 / "manifest.csv").is_file(), "bundled corpus missing"
    return CORPUS12


@pytest.fixture
def demo_config(corpus12_dir, tmp_path) -> PipelineConfig:
    """Pipeline config over the bundled corpus, output under tmp_path."""
    return PipelineConfig(
        manifest_csv=str(corpus12_dir / "manifest.csv"),
        firms_csv=str(corpus12_dir / "firms.csv"),
        output_dir=str(tmp_path / "out"),
        backend_kind="stub",
        clustering=ClusterSettings(k=4, k_min=1, k_max=6, seed=7, restarts=8),
    )


@pytest.fixture
def replace_cfg():
    """dataclasses.replace passthrough, for readable config tweaks."""
    return dataclasses.replace


def make_pdf(path: Path, paragraphs: list[str], page_break_after: int | None = None):
    """Build a small fixture PDF; returns the paragraphs (the text oracle)."""
    from reportlab.lib.pagesizes import letter
    from reportlab.lib.styles import getSampleStyleSheet
    from reportlab.platypus import PageBreak, Paragraph, SimpleDocTemplate

    styles = getSampleStyleSheet()
    story = []
    for i, p in enumerate(paragraphs):
        story.append(Paragraph(p, styles["Normal"]))
        if page_break_after is not None and i == page_break_after:
            story.append(PageBreak())
    SimpleDocTemplate(str(path), pagesize=letter).build(story)
    return paragraphs


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one line per acceptance criterion after the run."""
    import sys
    mod = (sys.modules.get("test_acceptance")
           or sys.modules.get("tests.test_acceptance"))
    results = getattr(mod, "RESULTS", None) if mod else None
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in results:
        terminalreporter.write_line(f"  [{status:^14}] {name}")
