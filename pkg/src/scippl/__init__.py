"""scippl: perplexity-based surprise scoring and scientometric analysis."""

__version__ = "0.1.0"
