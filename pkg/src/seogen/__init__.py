"""SEO headline generation engine.

Penalty-shaped beam search over a pluggable subtoken scorer, plus the
keyword-ranking pipeline, evaluation metrics, a CLI, and an HTTP
suggestion service.
"""

__version__ = "0.1.0"
