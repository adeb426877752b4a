"""Deterministic subword tokenizer shared by decoding, keywords, and metrics.

Words are split on whitespace and decomposed greedy-longest-match against
the vocabulary; non-initial pieces carry the continuation prefix ("##" by
default). A word with no full decomposition becomes a single UNK, so
encoding is total. Casing is preserved; text is NFC-normalized.
"""

from __future__ import annotations

import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import ValidationError

PAD_TOKEN = "[PAD]"
UNK_TOKEN = "[UNK]"
BOS_TOKEN = "[BOS]"
EOS_TOKEN = "[EOS]"

# Vocab file layout: one subtoken per line, first four lines are the
# specials in this order.
N_SPECIALS = 4


@dataclass(frozen=True)
class Vocab:
    """Immutable subtoken vocabulary with fixed special ids 0..3."""

    tokens: tuple[str, ...]
    continuation_prefix: str = "##"
    _token_to_id: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.tokens) < N_SPECIALS:
            raise ValidationError(
                f"vocab needs at least the {N_SPECIALS} special tokens, "
                f"got {len(self.tokens)} entries"
            )
        mapping = {}
        for i, tok in enumerate(self.tokens):
            if not tok:
                raise ValidationError(f"empty vocab entry at index {i}")
            if tok in mapping:
                raise ValidationError(f"duplicate vocab entry {tok!r}")
            mapping[tok] = i
        if len({self.pad_id, self.unk_id, self.bos_id, self.eos_id}) != N_SPECIALS:
            raise ValidationError("special tokens must be distinct")
        object.__setattr__(self, "_token_to_id", mapping)

    pad_id = 0
    unk_id = 1
    bos_id = 2
    eos_id = 3

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._token_to_id

    def id_of(self, token: str) -> int | None:
        return self._token_to_id.get(token)

    def token_of(self, token_id: int) -> str:
        if not 0 <= token_id < len(self.tokens):
            raise ValidationError(
                f"token id {token_id} out of range for vocab of size {len(self.tokens)}"
            )
        return self.tokens[token_id]

    @property
    def special_ids(self) -> frozenset[int]:
        return frozenset((self.pad_id, self.unk_id, self.bos_id, self.eos_id))

    def is_continuation(self, token_id: int) -> bool:
        return self.token_of(token_id).startswith(self.continuation_prefix)

    @classmethod
    def from_tokens(cls, content_tokens: Iterable[str], continuation_prefix: str = "##") -> "Vocab":
        """Build a vocab from content tokens, prepending the four specials."""
        return cls(
            tokens=(PAD_TOKEN, UNK_TOKEN, BOS_TOKEN, EOS_TOKEN, *content_tokens),
            continuation_prefix=continuation_prefix,
        )

    def missing_alphabet_chars(self, alphabet: Iterable[str]) -> list[str]:
        """Characters of the declared alphabet with no single-char entry."""
        return [c for c in alphabet if c not in self._token_to_id]


def load_vocab(path: str | Path, continuation_prefix: str = "##") -> Vocab:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    tokens = []
    for ln in lines:
        tok = ln.rstrip("\n")
        if tok:
            tokens.append(unicodedata.normalize("NFC", tok))
    if len(tokens) < N_SPECIALS:
        raise ValidationError(f"vocab file {path} has fewer than {N_SPECIALS} entries")
    return Vocab(tokens=tuple(tokens), continuation_prefix=continuation_prefix)


def save_vocab(vocab: Vocab, path: str | Path) -> None:
    Path(path).write_text("\n".join(vocab.tokens) + "\n", encoding="utf-8")


def _split_words(text: str) -> list[str]:
    return unicodedata.normalize("NFC", text).split()


def _decompose(word: str, vocab: Vocab) -> list[int] | None:
    """Greedy longest-match decomposition; None when the word is untokenizable."""
    prefix = vocab.continuation_prefix
    ids = []
    start = 0
    while start < len(word):
        end = len(word)
        match = None
        while end > start:
            piece = word[start:end]
            if start > 0:
                piece = prefix + piece
            tid = vocab.id_of(piece)
            if tid is not None:
                match = tid
                break
            end -= 1
        if match is None:
            return None
        ids.append(match)
        start = end
    return ids


def encode(text: str, vocab: Vocab) -> list[int]:
    """Tokenize text into subtoken ids; never fails (UNK absorbs)."""
    ids = []
    for word in _split_words(text):
        pieces = _decompose(word, vocab)
        if pieces is None:
            ids.append(vocab.unk_id)
        else:
            ids.extend(pieces)
    return ids


def decode(ids: Iterable[int], vocab: Vocab) -> str:
    """Detokenize, joining continuation pieces and dropping specials."""
    words: list[str] = []
    prefix = vocab.continuation_prefix
    for tid in ids:
        tok = vocab.token_of(tid)
        if tid in vocab.special_ids:
            continue
        if tok.startswith(prefix) and words:
            words[-1] += tok[len(prefix):]
        elif tok.startswith(prefix):
            # leading continuation piece: no previous word to attach to
            words.append(tok[len(prefix):])
        else:
            words.append(tok)
    return " ".join(words)


def keyword_to_subtokens(keyword: str, vocab: Vocab) -> list[int]:
    """Encode a keyword surface; empty keywords are rejected."""
    if not keyword.strip():
        raise ValidationError("keyword must be non-empty")
    return encode(keyword, vocab)


def build_vocab(
    texts: Iterable[str],
    top_k: int = 1000,
    continuation_prefix: str = "##",
) -> Vocab:
    """Derive a vocab from a corpus: top-K words plus every seen character.

    Characters are added in both word-initial and continuation form so
    that any word over the corpus alphabet decomposes without UNK.
    """
    word_counts: Counter[str] = Counter()
    alphabet: set[str] = set()
    for text in texts:
        for word in _split_words(text):
            word_counts[word] += 1
            alphabet.update(word)
    if not word_counts:
        raise ValidationError("cannot build a vocab from an empty corpus")
    top_words = [w for w, _ in sorted(word_counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k]]
    entries: list[str] = []
    seen: set[str] = set()
    for tok in top_words:
        if tok not in seen:
            entries.append(tok)
            seen.add(tok)
    for ch in sorted(alphabet):
        for form in (ch, continuation_prefix + ch):
            if form not in seen:
                entries.append(form)
                seen.add(form)
    return Vocab.from_tokens(entries, continuation_prefix=continuation_prefix)
