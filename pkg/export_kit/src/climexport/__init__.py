"""climexport: checkpoint-to-ONNX conversion with parity fixtures."""

from .export import DEFAULT_MODELS, ExportSpec, emit_parity_fixture, export_models
from .graphs import ConversionMismatch, build_classifier_graph
from .labels import AXES, LabelMapError, canonicalize

__version__ = "0.1.0"

__all__ = [
    "AXES",
    "ConversionMismatch",
    "DEFAULT_MODELS",
    "ExportSpec",
    "LabelMapError",
    "build_classifier_graph",
    "canonicalize",
    "emit_parity_fixture",
    "export_models",
]
