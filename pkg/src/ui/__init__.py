"""Console-side helpers: progress bars and result export."""
from .exporter import ResultExporter
from .progress import SweepProgress

__all__ = ["ResultExporter", "SweepProgress"]
