"""Clients for the external entity-recognition and search-volume services.

Real backends sit behind two tiny interfaces; the repository ships
deterministic file-backed fixture implementations plus minimal HTTP
clients documenting the wire shape a production service would expose.
"""

from __future__ import annotations

import json
from abc import ABC, abstractmethod
from datetime import date, timedelta
from pathlib import Path
from typing import Iterable, NamedTuple

from .corpus import Article
from .errors import TransportError, ValidationError


class NerEntity(NamedTuple):
    surface: str
    relevance: float
    tag: str


class NerClient(ABC):
    @abstractmethod
    def entities(self, article: Article) -> list[NerEntity]:
        """Entities found in the article; may raise TransportError."""


class VolumeClient(ABC):
    @abstractmethod
    def volumes(self, keyword: str) -> list[tuple[date, float]]:
        """Dated relative search volumes (0..100), sorted ascending by date."""


def _parse_entity(obj: dict) -> NerEntity:
    return NerEntity(
        surface=str(obj["surface"]),
        relevance=float(obj.get("relevance", 0.0)),
        tag=str(obj.get("tag", "")),
    )


class FixtureNerClient(NerClient):
    """Entities read from a JSON map article_id -> [{surface, relevance, tag}].

    Unknown article ids yield an empty list. Ids listed in fail_for
    simulate a backend timeout by raising TransportError.
    """

    def __init__(self, path: str | Path, fail_for: Iterable[str] = ()):
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise ValidationError(f"NER fixture {path} must be a JSON object")
        self._by_id = {
            str(aid): [_parse_entity(e) for e in ents] for aid, ents in raw.items()
        }
        self._fail_for = set(fail_for)

    def entities(self, article: Article) -> list[NerEntity]:
        if article.id in self._fail_for:
            raise TransportError(
                f"entity recognition timed out for article {article.id!r}"
            )
        return list(self._by_id.get(article.id, []))


class CatalogNerClient(NerClient):
    """Entities matched by scanning the text against a known-surface catalog.

    Used by the suggestion service, where pasted article text has no
    corpus id. The catalog file is a JSON list of {surface, relevance,
    tag}; an entity is reported when its surface occurs in the text
    (case-sensitive word-boundary match).
    """

    def __init__(self, catalog: Iterable[NerEntity]):
        self._catalog = list(catalog)

    @classmethod
    def from_file(cls, path: str | Path) -> "CatalogNerClient":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(raw, list):
            raise ValidationError(f"NER catalog {path} must be a JSON list")
        return cls(_parse_entity(e) for e in raw)

    @classmethod
    def from_fixture_map(cls, path: str | Path) -> "CatalogNerClient":
        """Derive a catalog from a per-article fixture (first surface wins)."""
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise ValidationError(f"NER fixture {path} must be a JSON object")
        seen: dict[str, NerEntity] = {}
        for ents in raw.values():
            for e in ents:
                ent = _parse_entity(e)
                seen.setdefault(ent.surface, ent)
        return cls(seen.values())

    def entities(self, article: Article) -> list[NerEntity]:
        from .textmatch import find_surface  # local import to avoid a cycle

        return [e for e in self._catalog if find_surface(e.surface, article.text) is not None]


class HttpNerClient(NerClient):
    """POST {base_url}/entities with {"id", "text"}; expects a JSON list
    of {surface, relevance, tag}."""

    def __init__(self, base_url: str, timeout: float = 10.0, transport=None):
        import httpx

        self._client = httpx.Client(
            base_url=base_url, timeout=timeout, transport=transport
        )

    def entities(self, article: Article) -> list[NerEntity]:
        import httpx

        try:
            resp = self._client.post(
                "/entities", json={"id": article.id, "text": article.text}
            )
            resp.raise_for_status()
            return [_parse_entity(e) for e in resp.json()]
        except httpx.HTTPError as exc:
            raise TransportError(
                f"entity recognition failed for article {article.id!r}: {exc}"
            ) from exc


class FixtureVolumeClient(VolumeClient):
    """Volumes read from a JSON map keyword -> [{date, volume}]."""

    def __init__(self, path: str | Path, fail_for: Iterable[str] = ()):
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise ValidationError(f"volume fixture {path} must be a JSON object")
        self._by_keyword: dict[str, list[tuple[date, float]]] = {}
        for kw, series in raw.items():
            points = [
                (date.fromisoformat(p["date"]), float(p["volume"])) for p in series
            ]
            self._by_keyword[str(kw)] = sorted(points)
        self._fail_for = set(fail_for)

    def volumes(self, keyword: str) -> list[tuple[date, float]]:
        if keyword in self._fail_for:
            raise TransportError(f"search-volume lookup timed out for {keyword!r}")
        return list(self._by_keyword.get(keyword, []))


class HttpVolumeClient(VolumeClient):
    """GET {base_url}/volumes?keyword=...; expects a JSON list of
    {date, volume}."""

    def __init__(self, base_url: str, timeout: float = 10.0, transport=None):
        import httpx

        self._client = httpx.Client(
            base_url=base_url, timeout=timeout, transport=transport
        )

    def volumes(self, keyword: str) -> list[tuple[date, float]]:
        import httpx

        try:
            resp = self._client.get("/volumes", params={"keyword": keyword})
            resp.raise_for_status()
            points = [
                (date.fromisoformat(p["date"]), float(p["volume"]))
                for p in resp.json()
            ]
            return sorted(points)
        except httpx.HTTPError as exc:
            raise TransportError(f"search-volume lookup failed for {keyword!r}: {exc}") from exc


def volume_features(
    series: list[tuple[date, float]], at: date | None
) -> tuple[float, float]:
    """(volume at the reference date, relative change vs three days prior).

    The volume "at" a date is the most recent data point on or before it;
    missing data counts as 0. With no reference date the series' last
    point serves as the reference.
    """
    if not series:
        return 0.0, 0.0
    if at is None:
        at = series[-1][0]

    def value_at(d: date) -> float:
        best = 0.0
        for point_date, vol in series:
            if point_date > d:
                break
            best = vol
        return best

    current = value_at(at)
    prior = value_at(at - timedelta(days=3))
    return current, (current - prior) / max(1.0, prior)
