"""Case-sensitive word-boundary matching of keyword surfaces in text."""

from __future__ import annotations

import re


def _surface_pattern(surface: str) -> re.Pattern:
    # \w is unicode-aware, so umlauts count as word characters.
    return re.compile(r"(?<!\w)" + re.escape(surface) + r"(?!\w)")


def find_surface(surface: str, text: str) -> int | None:
    """Character offset of the first word-boundary occurrence, or None."""
    m = _surface_pattern(surface).search(text)
    return m.start() if m else None


def count_surface(surface: str, text: str) -> int:
    return len(_surface_pattern(surface).findall(text))
