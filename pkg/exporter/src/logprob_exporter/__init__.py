"""Per-token logprob exporter for causal language models."""

from .export import ExportJob, ExportReport, export_logprobs

__all__ = ["ExportJob", "ExportReport", "export_logprobs"]
