"""Pipeline configuration: one TOML file is the canonical source.

CLI flags mirror these fields and override the file; the model directory
for the graph backend can also come from CLIMATEXT_MODEL_DIR.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import tomli
import tomlkit

from .aggregate import AggregationConfig
from .classify import AXIS_NAMES, BackendDescriptor
from .errors import ConfigError
from .firms import BINNING_MODES
from .ingest import DEFAULT_MIN_CHARS

ENV_MODEL_DIR = "CLIMATEXT_MODEL_DIR"


@dataclass(frozen=True)
class ClusterSettings:
    method: str = "kmeans"          # headline model: kmeans | gmm
    k: int = 10
    k_min: int = 1
    k_max: int = 15
    seed: int = 42
    restarts: int = 20
    covariance: str = "diagonal"
    run_bic_scan: bool = True

    def __post_init__(self):
        if self.method not in ("kmeans", "gmm"):
            raise ConfigError(f"cluster method must be kmeans|gmm, got {self.method!r}")
        if not 1 <= self.k_min <= self.k_max:
            raise ConfigError("need 1 <= k_min <= k_max")
        if self.k < 1:
            raise ConfigError("k must be >= 1")


@dataclass(frozen=True)
class PipelineConfig:
    manifest_csv: str
    firms_csv: str
    output_dir: str = "out"
    backend_kind: str = "stub"
    fixture_path: str | None = None
    model_dir: str | None = None
    min_chars: int = DEFAULT_MIN_CHARS
    aggregation: AggregationConfig = field(default_factory=AggregationConfig)
    binning: str = "octile"
    explicit_edges: dict[str, list[float]] | None = None
    clustering: ClusterSettings = field(default_factory=ClusterSettings)
    workers: int = 1
    # optional [keywords] table: group name -> phrase list (replaces that
    # group's default phrases; groups not mentioned keep the default)
    keywords: dict[str, list[str]] | None = None
    root: str = "."  # directory config paths resolve against (not serialized)

    def __post_init__(self):
        if self.binning not in BINNING_MODES:
            raise ConfigError(f"binning must be one of {BINNING_MODES}")
        if self.backend_kind not in ("stub", "fixture", "graph_runtime"):
            raise ConfigError(f"unknown backend kind {self.backend_kind!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    # --- path resolution ---

    def _resolve(self, p: str | None) -> Path | None:
        if p is None:
            return None
        path = Path(p)
        return path if path.is_absolute() else Path(self.root) / path

    @property
    def manifest_path(self) -> Path:
        return self._resolve(self.manifest_csv)

    @property
    def firms_path(self) -> Path:
        return self._resolve(self.firms_csv)

    @property
    def output_path(self) -> Path:
        return self._resolve(self.output_dir)

    def backend_descriptor(self) -> BackendDescriptor:
        if self.backend_kind == "stub":
            return BackendDescriptor(kind="stub")
        if self.backend_kind == "fixture":
            if not self.fixture_path:
                raise ConfigError("fixture backend requires fixture_path")
            return BackendDescriptor(kind="fixture",
                                     fixture_path=self._resolve(self.fixture_path))
        model_dir = self.model_dir or os.environ.get(ENV_MODEL_DIR)
        if not model_dir:
            raise ConfigError(
                f"graph_runtime backend requires model_dir (or ${ENV_MODEL_DIR})")
        base = self._resolve(model_dir)
        paths = {axis: base / f"{axis}.onnx" for axis in AXIS_NAMES}
        return BackendDescriptor(kind="graph_runtime", model_paths=paths)

    def keyword_set(self):
        from .keywords import DEFAULT_GROUPS, KeywordSet
        if not self.keywords:
            return KeywordSet()
        groups = dict(DEFAULT_GROUPS)
        for name, phrases in self.keywords.items():
            groups[name] = tuple(p.lower() for p in phrases)
        return KeywordSet(groups=groups)

    # --- serialization ---

    def to_dict(self) -> dict:
        doc = {
            "inputs": {"manifest_csv": self.manifest_csv,
                       "firms_csv": self.firms_csv},
            "backend": {"kind": self.backend_kind},
            "segmentation": {"min_chars": self.min_chars},
            "aggregation": asdict(self.aggregation),
            "binning": {"mode": self.binning},
            "clustering": asdict(self.clustering),
            "output": {"dir": self.output_dir, "workers": self.workers},
        }
        if self.fixture_path:
            doc["backend"]["fixture_path"] = self.fixture_path
        if self.model_dir:
            doc["backend"]["model_dir"] = self.model_dir
        if self.explicit_edges:
            doc["binning"]["explicit_edges"] = {
                k: [float(x) for x in v] for k, v in self.explicit_edges.items()}
        if self.keywords:
            doc["keywords"] = {k: list(v) for k, v in self.keywords.items()}
        return doc

    @classmethod
    def from_dict(cls, doc: dict, root: str = ".") -> "PipelineConfig":
        try:
            inputs = doc["inputs"]
            backend = doc.get("backend", {})
            seg = doc.get("segmentation", {})
            agg = doc.get("aggregation", {})
            binning = doc.get("binning", {})
            clus = doc.get("clustering", {})
            output = doc.get("output", {})
            known = {f.name for f in fields(AggregationConfig)}
            unknown = set(agg) - known
            if unknown:
                raise ConfigError(f"unknown aggregation keys: {sorted(unknown)}")
            explicit = binning.get("explicit_edges")
            return cls(
                manifest_csv=inputs["manifest_csv"],
                firms_csv=inputs["firms_csv"],
                output_dir=output.get("dir", "out"),
                backend_kind=backend.get("kind", "stub"),
                fixture_path=backend.get("fixture_path"),
                model_dir=backend.get("model_dir"),
                min_chars=int(seg.get("min_chars", DEFAULT_MIN_CHARS)),
                aggregation=AggregationConfig(**agg),
                binning=binning.get("mode", "octile"),
                explicit_edges={k: [float(x) for x in v]
                                for k, v in explicit.items()} if explicit else None,
                clustering=ClusterSettings(**clus),
                workers=int(output.get("workers", 1)),
                keywords={k: [str(p) for p in v]
                          for k, v in doc["keywords"].items()}
                if "keywords" in doc else None,
                root=root,
            )
        except KeyError as exc:
            raise ConfigError(f"missing config key: {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def dumps(self) -> str:
        return tomlkit.dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str, root: str = ".") -> "PipelineConfig":
        return cls.from_dict(tomli.loads(text), root=root)

    @classmethod
    def load(cls, path: Path | str) -> "PipelineConfig":
        path = Path(path)
        return cls.loads(path.read_text(encoding="utf-8"), root=str(path.parent))

    def save(self, path: Path | str) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    def with_root(self, root: str) -> "PipelineConfig":
        return replace(self, root=root)

    def snapshot(self) -> dict:
        """Config as stored in the run manifest (root excluded)."""
        return self.to_dict()
