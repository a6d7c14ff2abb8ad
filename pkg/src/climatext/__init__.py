"""climatext: climate-disclosure narrative analytics pipeline."""

__version__ = "0.1.0"
