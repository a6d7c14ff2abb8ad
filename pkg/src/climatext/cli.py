"""Command-line interface.

A TOML config file is the canonical source of settings; common fields
have flag overrides. Subcommands map 1:1 to pipeline stages plus
`validate` and `run-all`.
"""

from __future__ import annotations

import dataclasses
import logging
import sys
from pathlib import Path

import click

from .config import ClusterSettings, PipelineConfig
from .errors import ClimatextError
from .pipeline import Pipeline


def _load_config(config_path: str, **overrides) -> PipelineConfig:
    cfg = PipelineConfig.load(Path(config_path))
    agg_fields = {f.name for f in dataclasses.fields(cfg.aggregation)}
    clus_fields = {f.name for f in dataclasses.fields(ClusterSettings)}
    agg_over = {}
    clus_over = {}
    direct = {}
    for key, value in overrides.items():
        if value is None:
            continue
        if key in agg_fields:
            agg_over[key] = value
        elif key in clus_fields:
            clus_over[key] = value
        else:
            direct[key] = value
    if agg_over:
        direct["aggregation"] = dataclasses.replace(cfg.aggregation, **agg_over)
    if clus_over:
        direct["clustering"] = dataclasses.replace(cfg.clustering, **clus_over)
    return dataclasses.replace(cfg, **direct) if direct else cfg


config_option = click.option("--config", "-c", "config_path", required=True,
                             type=click.Path(exists=True, dir_okay=False),
                             help="TOML pipeline configuration.")

threshold_options = [
    click.option("--sentiment-threshold", type=float, default=None),
    click.option("--commitment-threshold", type=float, default=None),
    click.option("--specificity-threshold", type=float, default=None),
    click.option("--target-threshold", type=float, default=None),
]


def _with(options):
    def wrap(f):
        for opt in reversed(options):
            f = opt(f)
        return f
    return wrap


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Debug logging.")
def main(verbose: bool):
    """Climate-disclosure narrative analytics pipeline."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s")


def _run(stage: str, cfg: PipelineConfig) -> int:
    pipeline = Pipeline(cfg)
    try:
        if stage == "run-all":
            results = pipeline.run_all()
        else:
            results = [pipeline.run_stage(stage)]
    except ClimatextError as exc:
        click.echo(f"error [{stage}]: {exc}", err=True)
        return 1
    for r in results:
        click.echo(f"{r.name}: {r.status} ({len(r.outputs)} artifacts)")
    return 0


@main.command()
@config_option
def validate(config_path: str):
    """Check the config and inputs without running anything."""
    cfg = _load_config(config_path)
    try:
        notes = Pipeline(cfg).validate()
    except ClimatextError as exc:
        click.echo(f"invalid: {exc}", err=True)
        sys.exit(1)
    for note in notes:
        click.echo(note)
    click.echo("ok")


def _stage_command(stage: str, help_text: str):
    @main.command(name=stage, help=help_text)
    @config_option
    @click.option("--workers", type=int, default=None,
                  help="Parallel workers for per-document work.")
    @_with(threshold_options)
    @click.option("--min-chars", type=int, default=None)
    @click.option("--binning", type=click.Choice(["octile", "log_edges",
                                                  "explicit_edges"]), default=None)
    @click.option("--seed", type=int, default=None)
    @click.option("--k", type=int, default=None)
    @click.option("--restarts", type=int, default=None)
    @click.option("--method", type=click.Choice(["kmeans", "gmm"]), default=None)
    @click.option("--output-dir", type=str, default=None)
    def _cmd(config_path: str, **overrides):
        cfg = _load_config(config_path, **overrides)
        sys.exit(_run(stage, cfg))
    return _cmd


_stage_command("run-all", "Run every stage in order (cached stages skip).")
for _stage, _help in (
    ("ingest", "Extract, segment, and keyword-filter the documents."),
    ("classify", "Run the paragraph classifiers over retained paragraphs."),
    ("aggregate", "Aggregate paragraph labels into report-level narratives."),
    ("join", "Join narratives with firm attributes and class bins."),
    ("stats", "Distributions, Spearman matrix, and cross-tabulations."),
    ("cluster", "Standardize features, fit clusters, scan k."),
    ("report", "Render tables, figures, and the run manifest."),
):
    _stage_command(_stage, _help)


if __name__ == "__main__":
    main()
