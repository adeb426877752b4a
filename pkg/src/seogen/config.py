"""Run configuration shared by the CLI and the suggestion service.

A JSON config file provides defaults; command-line flags override
individual values. Unknown keys anywhere in the file are rejected so
typos fail loudly, and path-valued entries can be checked for existence
before a pipeline starts.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .decoder import DecodeConfig
from .errors import ParseError, ValidationError
from .penalties import PenaltyParams

PATH_FIELDS = (
    "vocab",
    "scorer_model",
    "ranker_model",
    "external_scores",
    "ner_fixture",
    "ner_catalog",
    "volume_fixture",
    "corpus",
    "embeddings",
    "abbreviations",
)


@dataclass(frozen=True)
class DecodeSettings:
    beam_size: int = 10
    max_len: int = 20
    n_best: int = 1
    r: int = 12
    alpha: float = 0.6
    beta: float = 1.5
    position_scale: float = 3.0
    rank_penalty_combine: str = "max"
    blocked_ngram_orders: tuple[int, ...] = (2, 3)
    block_repeat_words: bool = True
    use_keywords: bool = True

    def to_decode_config(self) -> DecodeConfig:
        return DecodeConfig(
            beam_size=self.beam_size,
            max_len=self.max_len,
            n_best=self.n_best,
            penalty=PenaltyParams(
                r=self.r,
                alpha=self.alpha,
                beta=self.beta,
                position_scale=self.position_scale,
                rank_penalty_combine=self.rank_penalty_combine,
            ),
            blocked_ngram_orders=frozenset(self.blocked_ngram_orders),
            block_repeat_words=self.block_repeat_words,
        )


@dataclass(frozen=True)
class FilterSettings:
    min_body_words: int = 30
    max_body_words: int = 512
    min_title_words: int = 3
    max_title_words: int = 12


@dataclass(frozen=True)
class ServiceSettings:
    host: str = "127.0.0.1"
    port: int = 8000
    cors_origins: tuple[str, ...] = ("*",)
    access_log: str = "access_log.jsonl"
    fsync_log: bool = False


@dataclass(frozen=True)
class RunConfig:
    vocab: str | None = None
    scorer_model: str | None = None
    ranker_model: str | None = None
    external_scores: str | None = None
    ner_fixture: str | None = None
    ner_catalog: str | None = None
    volume_fixture: str | None = None
    corpus: str | None = None
    embeddings: str | None = None
    abbreviations: str | None = None
    decode: DecodeSettings = field(default_factory=DecodeSettings)
    filters: FilterSettings = field(default_factory=FilterSettings)
    service: ServiceSettings = field(default_factory=ServiceSettings)

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc), path=str(path), line=exc.lineno) from exc
        if not isinstance(raw, dict):
            raise ValidationError(f"config {path} must be a JSON object")
        return cls.from_dict(raw, source=str(path))

    @classmethod
    def from_dict(cls, raw: dict, source: str = "<config>") -> "RunConfig":
        return _build(cls, raw, source, prefix="")

    def with_overrides(self, overrides: dict[str, object]) -> "RunConfig":
        """Apply flat overrides with dotted keys, e.g. {"decode.beta": 2.0}."""
        cfg = self
        for dotted, value in overrides.items():
            if value is None:
                continue
            parts = dotted.split(".")
            cfg = _replace_path(cfg, parts, value, dotted)
        return cfg

    def require_paths(self, *names: str) -> None:
        """Validate that the named path entries are set and exist on disk."""
        problems = []
        for name in names:
            if name not in PATH_FIELDS:
                raise ValidationError(f"unknown path entry {name!r}")
            value = getattr(self, name)
            if value is None:
                problems.append(f"{name} is not configured")
            elif not Path(value).exists():
                problems.append(f"{name}: no such file {value!r}")
        if problems:
            raise ValidationError("; ".join(problems))


_SECTION_TYPES = {
    "decode": DecodeSettings,
    "filters": FilterSettings,
    "service": ServiceSettings,
}


def _build(cls, raw: dict, source: str, prefix: str):
    known = {f.name: f for f in fields(cls)}
    unknown = set(raw) - set(known)
    if unknown:
        where = f"{prefix}{sorted(unknown)[0]}"
        raise ValidationError(f"{source}: unknown config key {where!r}")
    kwargs = {}
    for name, value in raw.items():
        section = _SECTION_TYPES.get(name) if cls is RunConfig else None
        if section is not None:
            if not isinstance(value, dict):
                raise ValidationError(f"{source}: section {name!r} must be an object")
            kwargs[name] = _build(section, value, source, prefix=f"{name}.")
        elif isinstance(value, list):
            kwargs[name] = tuple(value)
        else:
            kwargs[name] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ValidationError(f"{source}: {exc}") from exc


def _replace_path(cfg, parts: list[str], value, dotted: str):
    name = parts[0]
    if not any(f.name == name for f in fields(cfg)):
        raise ValidationError(f"unknown config override {dotted!r}")
    if len(parts) == 1:
        if isinstance(value, list):
            value = tuple(value)
        return dataclasses.replace(cfg, **{name: value})
    return dataclasses.replace(
        cfg, **{name: _replace_path(getattr(cfg, name), parts[1:], value, dotted)}
    )
