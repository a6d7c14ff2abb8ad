"""Stage orchestration: ingest -> classify -> aggregate -> join -> stats
-> cluster -> report.

Every stage reads/writes plain files under <output>/work and caches on a
signature of its config slice plus upstream artifact digests, so
rerunning with unchanged inputs is a per-stage no-op.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .aggregate import aggregate_corpus, read_narratives_csv, write_narratives_csv
from .classify import AXES, AXIS_NAMES, ParagraphLabels, classify_batch, make_backend
from .cluster import (
    build_features,
    elbow_scan,
    gmm_fit,
    kmeans_fit,
    pca_project,
    profile_clusters,
    select_k_bic,
    write_model_json,
)
from .config import PipelineConfig
from .errors import ClimatextError, EmptyDocument, MissingUpstream, StageFailure
from .firms import assign_emission_classes, load_firms
from .ingest import Paragraph, extract_text, load_manifest, segment_paragraphs
from .keywords import filter_corpus
from .report import (
    AnalysisBundle,
    build_manifest,
    file_sha256,
    render_figures,
    render_tables,
    write_manifest,
)
from .stats import (
    CorrelationMatrix,
    CrossTab,
    Distribution,
    EncodedRecord,
    NARRATIVE_VARIABLES,
    correlation_matrix,
    crosstab,
    overall_distribution,
)

log = logging.getLogger(__name__)

STAGES = ("ingest", "classify", "aggregate", "join", "stats", "cluster", "report")

CROSSTAB_PAIRS = (
    ("commitment", "sentiment"), ("commitment", "specificity"),
    ("commitment", "netzero"),
    ("specificity", "sentiment"), ("specificity", "netzero"),
    ("netzero", "sentiment"),
)
CLASS_ROW_VARIABLES = ("cap_class", "emp_class", "sector",
                       "ei_class", "ej_class", "ek_class")


@dataclass
class StageResult:
    name: str
    status: str  # "ran" | "cached"
    outputs: list[Path]


class Pipeline:
    def __init__(self, config: PipelineConfig):
        self.config = config
        self.out = config.output_path
        self.work = self.out / "work"
        self.state_dir = self.work / ".stage"

    # --- artifact paths ---

    def artifact(self, name: str) -> Path:
        return self.work / name

    def _upstreams(self, stage: str) -> list[Path]:
        a = self.artifact
        return {
            "ingest": [],
            "classify": [a("paragraphs.jsonl")],
            "aggregate": [a("labels.jsonl"), a("retention.csv")],
            "join": [a("narratives.csv")],
            "stats": [a("analysis.csv")],
            "cluster": [a("analysis.csv")],
            "report": [a("stats_bundle.json"), a("cluster_model.json"),
                       a("analysis.csv")],
        }[stage]

    # --- caching ---

    def _signature(self, stage: str, extra: dict) -> str:
        payload = {"stage": stage, "extra": extra,
                   "upstreams": {str(p): file_sha256(p)
                                 for p in self._upstreams(stage)}}
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def _cached(self, stage: str, signature: str) -> list[Path] | None:
        state = self.state_dir / f"{stage}.json"
        if not state.is_file():
            return None
        try:
            doc = json.loads(state.read_text())
        except json.JSONDecodeError:
            return None
        if doc.get("signature") != signature:
            return None
        outputs = [Path(p) for p in doc.get("outputs", [])]
        if all(p.is_file() for p in outputs):
            return outputs
        return None

    def _store(self, stage: str, signature: str, outputs: list[Path]) -> None:
        self.state_dir.mkdir(parents=True, exist_ok=True)
        (self.state_dir / f"{stage}.json").write_text(json.dumps(
            {"signature": signature, "outputs": [str(p) for p in outputs]},
            indent=2, sort_keys=True))

    # --- public API ---

    def validate(self) -> list[str]:
        """Fail-fast config and input checks; returns human-readable notes."""
        cfg = self.config
        notes = []
        for label, path in (("manifest_csv", cfg.manifest_path),
                            ("firms_csv", cfg.firms_path)):
            if not path.is_file():
                raise ClimatextError(f"{label} not found: {path}")
        docs = load_manifest(cfg.manifest_path)
        missing = [str(d.path) for d in docs if not Path(d.path).is_file()]
        if missing:
            raise ClimatextError(f"documents missing: {missing[:5]}"
                                 + ("..." if len(missing) > 5 else ""))
        cfg.backend_descriptor()  # raises if paths are absent
        cfg.keyword_set()
        firms, report = load_firms(cfg.firms_path)
        notes.append(f"{len(docs)} documents, {len(firms)} firm records "
                     f"({len(report.rejected)} rejected rows)")
        return notes

    def run_stage(self, stage: str) -> StageResult:
        if stage not in STAGES:
            raise ClimatextError(f"unknown stage {stage!r} (choose from {STAGES})")
        for upstream in self._upstreams(stage):
            if not upstream.is_file():
                raise MissingUpstream(str(upstream))
        runner = getattr(self, f"_stage_{stage}")
        extra = runner(dry=True)
        signature = self._signature(stage, extra)
        cached = self._cached(stage, signature)
        if cached is not None:
            return StageResult(stage, "cached", cached)
        outputs = runner(dry=False)
        self._store(stage, signature, outputs)
        return StageResult(stage, "ran", outputs)

    def run_all(self) -> list[StageResult]:
        """All stages in order; a failure names its stage and preserves
        any partial outputs already written."""
        self.validate()
        results = []
        for stage in STAGES:
            try:
                results.append(self.run_stage(stage))
            except StageFailure:
                raise
            except Exception as exc:
                raise StageFailure(stage, exc) from exc
        return results

    # --- stages -------------------------------------------------------------
    # Each _stage_x(dry=True) returns its config-slice dict (for the
    # signature); dry=False executes and returns the output paths.

    def _stage_ingest(self, dry: bool):
        cfg = self.config
        docs = load_manifest(cfg.manifest_path)
        if dry:
            return {"min_chars": cfg.min_chars,
                    "keywords": {k: list(v)
                                 for k, v in cfg.keyword_set().groups.items()},
                    "manifest": file_sha256(cfg.manifest_path),
                    "documents": {d.firm_id: file_sha256(d.path) for d in docs}}
        keywords = cfg.keyword_set()

        def ingest_one(doc):
            try:
                text = extract_text(doc)
            except EmptyDocument:
                return doc, [], None
            paras = segment_paragraphs(text, firm_id=doc.firm_id,
                                       min_chars=cfg.min_chars)
            return doc, paras, filter_corpus(paras, keywords)

        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                results = list(pool.map(ingest_one, docs))
        else:
            results = [ingest_one(d) for d in docs]

        self.work.mkdir(parents=True, exist_ok=True)
        paragraphs_path = self.artifact("paragraphs.jsonl")
        retention_path = self.artifact("retention.csv")
        with open(paragraphs_path, "w", encoding="utf-8") as fh:
            for doc, paras, fr in results:
                if fr is None:
                    continue
                for p, groups in zip(fr.retained, fr.matched_groups):
                    fh.write(json.dumps(
                        {"firm_id": p.firm_id, "seq": p.seq, "text": p.text,
                         "groups": sorted(groups)}, ensure_ascii=False) + "\n")
        with open(retention_path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["firm_id", "total_paragraphs", "retained", "ratio", "flagged"])
            for doc, paras, fr in results:
                if fr is None:
                    w.writerow([doc.firm_id, 0, 0, "0", "empty_document"])
                    continue
                flag = "no_climate_content" if fr.flagged_empty else ""
                w.writerow([doc.firm_id, fr.total, len(fr.retained),
                            f"{fr.retention_ratio:.6f}", flag])
        return [paragraphs_path, retention_path]

    def _stage_classify(self, dry: bool):
        cfg = self.config
        desc = cfg.backend_descriptor()
        if dry:
            extra = {"kind": desc.kind}
            if desc.kind == "fixture":
                extra["fixture"] = file_sha256(desc.fixture_path)
            elif desc.kind == "graph_runtime":
                digests = {}
                for axis, path in sorted(desc.model_paths.items()):
                    digests[axis] = file_sha256(path)
                    meta_path = Path(path).with_suffix(".json")
                    if meta_path.is_file():
                        digests[f"{axis}.meta"] = file_sha256(meta_path)
                        meta = json.loads(meta_path.read_text())
                        tok = Path(path).parent / meta.get("tokenizer_file",
                                                           "tokenizer.json")
                        if tok.is_file():
                            digests[f"{axis}.tokenizer"] = file_sha256(tok)
                extra["models"] = digests
            return extra
        paragraphs = _read_paragraphs(self.artifact("paragraphs.jsonl"))
        backend = make_backend(desc)
        labels_path = self.artifact("labels.jsonl")
        with open(labels_path, "w", encoding="utf-8") as fh:
            for firm_id, paras in paragraphs.items():
                labels = classify_batch(paras, backend)
                for p, pl in zip(paras, labels):
                    fh.write(json.dumps(
                        {"firm_id": firm_id, "seq": p.seq,
                         "labels": {a: pl.label(a) for a in AXIS_NAMES},
                         "scores": {a: [round(float(x), 9) for x in pl.scores[a]]
                                    for a in AXIS_NAMES}},
                        ensure_ascii=False) + "\n")
        return [labels_path]

    def _stage_aggregate(self, dry: bool):
        cfg = self.config
        if dry:
            from dataclasses import asdict
            return {"aggregation": asdict(cfg.aggregation)}
        per_firm = _read_labels(self.artifact("labels.jsonl"))
        # firms whose documents retained nothing must surface on the skip
        # list, not vanish
        with open(self.artifact("retention.csv"), newline="", encoding="utf-8") as fh:
            flagged = [row["firm_id"] for row in csv.DictReader(fh)
                       if row["flagged"]]
        result = aggregate_corpus(per_firm, cfg.aggregation)
        skipped = sorted(set(result.skipped) | set(flagged))
        narratives_path = self.artifact("narratives.csv")
        write_narratives_csv(narratives_path, result)
        skipped_path = self.artifact("aggregate_skipped.csv")
        with open(skipped_path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["firm_id", "reason"])
            for firm_id in skipped:
                w.writerow([firm_id, "no_classified_paragraphs"])
        return [narratives_path, skipped_path]

    def _stage_join(self, dry: bool):
        cfg = self.config
        if dry:
            return {"binning": cfg.binning,
                    "explicit_edges": cfg.explicit_edges,
                    "firms": file_sha256(cfg.firms_path)}
        narratives = read_narratives_csv(self.artifact("narratives.csv")).narratives
        firms, load_report = load_firms(cfg.firms_path)
        firms_by_id = {f.firm_id: f for f in firms}
        joined_ids = [fid for fid in narratives if fid in firms_by_id]
        joined_firms = [firms_by_id[f] for f in joined_ids]
        assignments, edges = assign_emission_classes(
            joined_firms, binning=cfg.binning, explicit_edges=cfg.explicit_edges)

        analysis_path = self.artifact("analysis.csv")
        with open(analysis_path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["firm_id", "sector",
                        "sentiment_global", "commitment_global",
                        "specificity_global", "netzero_global",
                        "cap_class", "emp_class",
                        "ei_class", "ej_class", "ek_class"])
            for fid in sorted(joined_ids):
                n = narratives[fid]
                f = firms_by_id[fid]
                a = assignments[fid]
                w.writerow([fid, f.sector,
                            n.sentiment_global, n.commitment_global,
                            n.specificity_global, n.netzero_global,
                            a.cap_class, a.emp_class,
                            a.ei_class or "", a.ej_class or "", a.ek_class or ""])
        edges_path = self.artifact("bin_edges.json")
        edges_path.write_text(json.dumps(
            {"binning": cfg.binning, "edges": edges,
             "n_joined": len(joined_ids),
             "narratives_without_firm": sorted(set(narratives) - set(firms_by_id)),
             "firms_without_narrative": sorted(set(firms_by_id) - set(narratives)),
             "rejected_firm_rows": load_report.rejected,
             "missing_emissions": load_report.missing_counts},
            indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return [analysis_path, edges_path]

    def _stage_stats(self, dry: bool):
        if dry:
            return {}
        records = read_analysis_csv(self.artifact("analysis.csv"))
        dists = [overall_distribution(records, v) for v in NARRATIVE_VARIABLES]
        corr = correlation_matrix(records)
        tabs = [crosstab(records, r, c) for r, c in CROSSTAB_PAIRS]
        for rv in CLASS_ROW_VARIABLES:
            for cv in NARRATIVE_VARIABLES:
                tabs.append(crosstab(records, rv, cv))
        bundle_path = self.artifact("stats_bundle.json")
        bundle_path.write_text(_stats_to_json(dists, corr, tabs), encoding="utf-8")
        return [bundle_path]

    def _stage_cluster(self, dry: bool):
        cfg = self.config
        if dry:
            from dataclasses import asdict
            return {"clustering": asdict(cfg.clustering)}
        records = read_analysis_csv(self.artifact("analysis.csv"))
        features = build_features(records)
        cs = cfg.clustering
        n = features.n_rows
        k = min(cs.k, n)
        if k < cs.k:
            log.warning("clamping k from %d to %d (only %d complete rows)",
                        cs.k, k, n)
        outputs = []
        if cs.method == "kmeans":
            model = kmeans_fit(features, k, seed=cs.seed, n_restarts=cs.restarts)
        else:
            model = gmm_fit(features, k, seed=cs.seed, covariance=cs.covariance,
                            n_restarts=max(1, cs.restarts // 4))
        if k != cs.k:
            model.metadata["k_clamped_from"] = cs.k
        model_path = self.artifact("cluster_model.json")
        write_model_json(model_path, model, features)
        outputs.append(model_path)

        k_max = min(cs.k_max, n)
        scan = elbow_scan(features, range(cs.k_min, k_max + 1), seed=cs.seed,
                          n_restarts=cs.restarts)
        elbow_path = self.artifact("elbow.json")
        elbow_path.write_text(json.dumps({str(k_): v for k_, v in scan.items()},
                                         indent=2, sort_keys=True) + "\n",
                              encoding="utf-8")
        outputs.append(elbow_path)

        if cs.run_bic_scan:
            try:
                best_k, bics = select_k_bic(features, range(cs.k_min, k_max + 1),
                                            seed=cs.seed, covariance=cs.covariance)
                bic_path = self.artifact("bic.json")
                bic_path.write_text(json.dumps(
                    {"best_k": best_k,
                     "bic": {str(k_): v for k_, v in bics.items()}},
                    indent=2, sort_keys=True) + "\n", encoding="utf-8")
                outputs.append(bic_path)
            except ValueError as exc:
                log.warning("BIC scan failed: %s", exc)

        n_comp = min(3, features.std_values.shape[1])
        pca = pca_project(features, n_components=n_comp)
        pca_path = self.artifact("pca.json")
        pca_path.write_text(json.dumps(
            {"projected": np.round(pca.projected, 12).tolist(),
             "explained_ratio": pca.explained_ratio.tolist(),
             "components": pca.components.tolist(),
             "assignments": model.assignments.tolist()},
            indent=2, sort_keys=True) + "\n", encoding="utf-8")
        outputs.append(pca_path)

        profiles = profile_clusters(model, features,
                                    firms={f.firm_id: f for f in
                                           load_firms(cfg.firms_path)[0]})
        prof_path = self.artifact("cluster_profiles.json")
        prof_path.write_text(json.dumps(
            [{"cluster": p.cluster, "count": p.count,
              "centroid_original": list(p.centroid_original),
              "sector_counts": p.sector_counts} for p in profiles],
            indent=2, sort_keys=True) + "\n", encoding="utf-8")
        outputs.append(prof_path)
        return outputs

    def _stage_report(self, dry: bool):
        cfg = self.config
        if dry:
            extra = {}
            for extra_artifact in ("elbow.json", "bic.json", "pca.json",
                                   "cluster_profiles.json"):
                p = self.artifact(extra_artifact)
                if p.is_file():
                    extra[extra_artifact] = file_sha256(p)
            return extra
        bundle = self._load_bundle()
        tables = render_tables(bundle, self.out / "tables")
        figures = render_figures(bundle, self.out / "figures")
        docs = load_manifest(cfg.manifest_path)
        input_paths = [cfg.manifest_path, cfg.firms_path] + [d.path for d in docs]
        edges_doc = json.loads(self.artifact("bin_edges.json").read_text())
        manifest = build_manifest(cfg.snapshot(), input_paths, self.out,
                                  extra={"bin_edges": edges_doc["edges"],
                                         "binning": edges_doc["binning"]})
        manifest_path = self.out / "manifest.json"
        write_manifest(manifest_path, manifest)
        return tables + figures + [manifest_path]

    def _load_bundle(self) -> AnalysisBundle:
        dists, corr, tabs = _stats_from_json(
            self.artifact("stats_bundle.json").read_text(encoding="utf-8"))
        bundle = AnalysisBundle(distributions=dists, correlation=corr,
                                crosstabs=tabs)
        model_doc = json.loads(self.artifact("cluster_model.json").read_text())
        bundle.cluster_model = _model_from_json(model_doc)
        records = read_analysis_csv(self.artifact("analysis.csv"))
        bundle.features = build_features(records)
        elbow_path = self.artifact("elbow.json")
        if elbow_path.is_file():
            bundle.elbow = {int(k): float(v) for k, v in
                            json.loads(elbow_path.read_text()).items()}
        bic_path = self.artifact("bic.json")
        if bic_path.is_file():
            bundle.bic = {int(k): float(v) for k, v in
                          json.loads(bic_path.read_text())["bic"].items()}
        pca_path = self.artifact("pca.json")
        if pca_path.is_file():
            doc = json.loads(pca_path.read_text())
            from .cluster import PcaResult
            bundle.pca = PcaResult(
                projected=np.asarray(doc["projected"]),
                components=np.asarray(doc["components"]),
                explained_variance=np.zeros(len(doc["explained_ratio"])),
                explained_ratio=np.asarray(doc["explained_ratio"]),
                mean=np.zeros(np.asarray(doc["components"]).shape[1]))
        return bundle


# --- artifact readers ---------------------------------------------------------


def _read_paragraphs(path: Path) -> dict[str, list[Paragraph]]:
    per_firm: dict[str, list[Paragraph]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            p = Paragraph(firm_id=rec["firm_id"], seq=int(rec["seq"]),
                          text=rec["text"])
            per_firm.setdefault(p.firm_id, []).append(p)
    for paras in per_firm.values():
        paras.sort(key=lambda p: p.seq)
    return per_firm


def _read_labels(path: Path) -> dict[str, list[ParagraphLabels]]:
    per_firm: dict[str, list[ParagraphLabels]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            scores = {a: tuple(float(x) for x in v)
                      for a, v in rec["scores"].items()}
            pl = ParagraphLabels(scores=scores,
                                 **{a: rec["labels"][a] for a in AXES})
            per_firm.setdefault(str(rec["firm_id"]), []).append(pl)
    return per_firm


def read_analysis_csv(path: Path) -> list[EncodedRecord]:
    from .firms import class_code as _cc
    from .stats import (
        COMMITMENT_CODES,
        NETZERO_CODES,
        SENTIMENT_CODES,
        SPECIFICITY_CODES,
    )
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            records.append(EncodedRecord(
                firm_id=row["firm_id"],
                sentiment_code=SENTIMENT_CODES[row["sentiment_global"]],
                commitment_code=COMMITMENT_CODES[row["commitment_global"]],
                specificity_code=SPECIFICITY_CODES[row["specificity_global"]],
                netzero_code=NETZERO_CODES[row["netzero_global"]],
                cap_code=_cc(row["cap_class"]),
                emp_code=_cc(row["emp_class"]),
                ei_code=_cc(row["ei_class"] or None),
                ej_code=_cc(row["ej_class"] or None),
                ek_code=_cc(row["ek_class"] or None),
                sector=row["sector"]))
    return records


# --- stats bundle (de)serialization -------------------------------------------


def _stats_to_json(dists: list[Distribution], corr: CorrelationMatrix,
                   tabs: list[CrossTab]) -> str:
    doc = {
        "distributions": [
            {"variable": d.variable, "categories": list(d.categories),
             "counts": list(d.counts), "total": d.total} for d in dists],
        "correlation": {
            "variables": list(corr.variables),
            "rho": [list(r) for r in corr.rho],
            "pvalues": [list(r) for r in corr.pvalues],
            "n_obs": [list(r) for r in corr.n_obs]},
        "crosstabs": [
            {"row_variable": t.row_variable, "col_variable": t.col_variable,
             "row_categories": list(t.row_categories),
             "col_categories": list(t.col_categories),
             "counts": [list(r) for r in t.counts]} for t in tabs],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _stats_from_json(text: str):
    doc = json.loads(text)
    dists = [Distribution(variable=d["variable"],
                          categories=tuple(d["categories"]),
                          counts=tuple(d["counts"]), total=d["total"])
             for d in doc["distributions"]]
    c = doc["correlation"]
    corr = CorrelationMatrix(
        variables=tuple(c["variables"]),
        rho=tuple(tuple(v for v in row) for row in c["rho"]),
        pvalues=tuple(tuple(v for v in row) for row in c["pvalues"]),
        n_obs=tuple(tuple(row) for row in c["n_obs"]))
    tabs = [CrossTab(row_variable=t["row_variable"],
                     col_variable=t["col_variable"],
                     row_categories=tuple(t["row_categories"]),
                     col_categories=tuple(t["col_categories"]),
                     counts=tuple(tuple(r) for r in t["counts"]))
            for t in doc["crosstabs"]]
    return dists, corr, tabs


def _model_from_json(doc: dict):
    from .cluster import ClusterModel
    return ClusterModel(
        method=doc["method"], k=doc["k"],
        assignments=np.asarray(doc["assignments"], dtype=np.int64),
        centroids_std=np.asarray(doc["centroids_std"]),
        centroids_original=np.asarray(doc["centroids_original"]),
        seed=doc["seed"], n_restarts=doc["n_restarts"],
        inertia=doc.get("inertia"), log_likelihood=doc.get("log_likelihood"),
        bic=doc.get("bic"), metadata=doc.get("metadata", {}))
