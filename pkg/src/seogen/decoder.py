"""Penalty-shaped beam search with keyword matching and n-gram blocking.

Synchronized beam search: every live beam is extended by one subtoken per
step, blocked extensions are removed, and candidates are pruned to
beam_size by the composite score at the current length. A beam finishes
when it emits EOS or reaches max_len; beams at max_len are finalized as
if EOS had been emitted (its log-probability is added, no token is
appended). Sequence length counts every emitted subtoken after BOS,
including a final EOS.

exhaustive_search enumerates the same hypothesis space outright and is
the decoder's testing oracle; both rank by the identical composite score
and break ties by lexicographic token-id order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .errors import InternalError, SearchSpaceError, ValidationError
from .penalties import PenaltyParams, composite_score, effective_rank_penalty, length_penalty
from .scorer import Scorer
from .tokenizer import Vocab, decode as detokenize


class Match(NamedTuple):
    keyword_index: int
    rank: int
    match_pos: int


class DecodeKeyword(NamedTuple):
    """Keyword as the decoder sees it: subtoken ids plus its rank."""

    subtokens: tuple[int, ...]
    rank: int


class Candidate(NamedTuple):
    text: str
    score: float
    beam: "Beam"


@dataclass(frozen=True)
class Beam:
    tokens: tuple[int, ...]
    cum_log_prob: float
    matches: tuple[Match, ...] = ()
    finished: bool = False

    @property
    def length(self) -> int:
        """Emitted subtokens after BOS (EOS included when emitted)."""
        return len(self.tokens) - 1


@dataclass(frozen=True)
class DecodeConfig:
    beam_size: int = 10
    max_len: int = 20
    penalty: PenaltyParams = field(default_factory=PenaltyParams)
    blocked_ngram_orders: frozenset[int] = frozenset({2, 3})
    block_repeat_words: bool = True
    n_best: int = 1

    def __post_init__(self):
        if self.beam_size < 1:
            raise ValidationError(f"beam_size must be >= 1, got {self.beam_size}")
        if self.max_len < 1:
            raise ValidationError(f"max_len must be >= 1, got {self.max_len}")
        if not 1 <= self.n_best <= self.beam_size:
            raise ValidationError(
                f"n_best must be in 1..beam_size, got {self.n_best}"
            )
        if any(n < 1 for n in self.blocked_ngram_orders):
            raise ValidationError("blocked n-gram orders must be >= 1")
        if self.penalty.alpha > 0 and self.max_len >= 2 * self.penalty.r + 6:
            raise ValidationError(
                f"max_len={self.max_len} with r={self.penalty.r} leaves the length "
                f"penalty undefined; require max_len < 2*r + 6"
            )
        object.__setattr__(self, "blocked_ngram_orders", frozenset(self.blocked_ngram_orders))


def blocked_tokens(tokens: Sequence[int], config: DecodeConfig, vocab: Vocab) -> set[int]:
    """Token ids that may not extend this sequence.

    Repetition blocking forbids re-emitting the previous subtoken when it
    starts a word; n-gram blocking forbids completing any n-gram (for the
    configured orders) already present in the sequence, BOS included.
    """
    blocked: set[int] = set()
    last = tokens[-1]
    if config.block_repeat_words and not vocab.is_continuation(last) \
            and last not in vocab.special_ids:
        blocked.add(last)
    for n in config.blocked_ngram_orders:
        if len(tokens) < n:
            continue
        seen: dict[tuple[int, ...], set[int]] = {}
        for i in range(len(tokens) - n + 1):
            seen.setdefault(tuple(tokens[i:i + n - 1]), set()).add(tokens[i + n - 1])
        suffix = tuple(tokens[len(tokens) - n + 1:])
        blocked |= seen.get(suffix, set())
    return blocked


def is_blocked(beam: Beam, candidate_token: int, config: DecodeConfig, vocab: Vocab) -> bool:
    return candidate_token in blocked_tokens(beam.tokens, config, vocab)


def keyword_completions(
    tokens: Sequence[int],
    keywords: Sequence[DecodeKeyword],
    new_length: int,
) -> dict[int, list[Match]]:
    """Matches completed by each possible next token.

    tokens is the current sequence (BOS first); new_length the length the
    beam will have after the extension. A keyword completes when its full
    subtoken sequence would form a suffix of the extended sequence; the
    recorded position is the 0-based index (BOS excluded) of its first
    subtoken.
    """
    completions: dict[int, list[Match]] = {}
    for idx, kw in enumerate(keywords):
        subs = kw.subtokens
        L = len(subs)
        if L == 0 or L > new_length:
            continue
        if L > 1 and tuple(tokens[len(tokens) - (L - 1):]) != subs[:-1]:
            continue
        match = Match(keyword_index=idx, rank=kw.rank, match_pos=new_length - L)
        completions.setdefault(subs[-1], []).append(match)
    return completions


def match_keywords(beam: Beam, keywords: Sequence[DecodeKeyword]) -> tuple[Match, ...]:
    """Matches for the latest extension of beam (its last token just appended)."""
    new_length = beam.length
    history = beam.tokens[:-1]
    completions = keyword_completions(history, keywords, new_length)
    new = completions.get(beam.tokens[-1], [])
    return beam.matches + tuple(new)


def _validate_inputs(
    source: Sequence[int],
    scorer: Scorer,
    keywords: Sequence[DecodeKeyword],
    vocab: Vocab,
) -> None:
    if not source:
        raise ValidationError("source must be non-empty")
    if scorer.vocab_size != len(vocab):
        raise ValidationError(
            f"scorer vocab size {scorer.vocab_size} does not match vocab size {len(vocab)}"
        )
    for kw in keywords:
        if not kw.subtokens:
            raise ValidationError("keywords must be pre-subtokenized and non-empty")
        if kw.rank < 0:
            raise ValidationError(f"keyword rank must be >= 0, got {kw.rank}")


def decode(
    source: Sequence[int],
    scorer: Scorer,
    config: DecodeConfig,
    vocab: Vocab,
    keywords: Sequence[DecodeKeyword] = (),
) -> list[Candidate]:
    """Run penalty-shaped beam search; returns n_best finished candidates."""
    _validate_inputs(source, scorer, keywords, vocab)
    params = config.penalty
    eos = vocab.eos_id
    V = scorer.vocab_size
    source = tuple(source)

    live = [Beam(tokens=(vocab.bos_id,), cum_log_prob=0.0)]
    finished: list[Beam] = []

    for step in range(1, config.max_len + 1):
        if not live:
            break
        B = len(live)
        log_probs = np.empty((B, V), dtype=np.float64)
        for i, beam in enumerate(live):
            log_probs[i, :] = scorer.score_next(source, beam.tokens)

        cand_cum = np.asarray([b.cum_log_prob for b in live])[:, None] + log_probs

        rp_eff = np.empty((B, V), dtype=np.float64)
        step_completions: list[dict[int, list[Match]]] = []
        for i, beam in enumerate(live):
            pairs = [(m.rank, m.match_pos) for m in beam.matches]
            base = effective_rank_penalty(pairs, params)
            rp_eff[i, :] = base
            comps = keyword_completions(beam.tokens, keywords, step)
            step_completions.append(comps)
            for tok, new_matches in comps.items():
                all_pairs = pairs + [(m.rank, m.match_pos) for m in new_matches]
                rp_eff[i, tok] = effective_rank_penalty(all_pairs, params)
            for tok in blocked_tokens(beam.tokens, config, vocab):
                cand_cum[i, tok] = -np.inf

        lp = length_penalty(step, params)
        scores = _kernels.score_candidates(
            np.ascontiguousarray(cand_cum), np.ascontiguousarray(rp_eff), lp
        )

        flat = scores.ravel()
        order = np.argsort(-flat, kind="stable")
        next_live: list[Beam] = []
        selected = 0
        for flat_idx in order:
            if selected >= config.beam_size:
                break
            s = flat[flat_idx]
            if not np.isfinite(s):
                break
            i, tok = divmod(int(flat_idx), V)
            parent = live[i]
            new_tokens = parent.tokens + (tok,)
            new_matches = parent.matches + tuple(step_completions[i].get(tok, ()))
            new_cum = float(cand_cum[i, tok])
            selected += 1
            if tok == eos:
                finished.append(Beam(new_tokens, new_cum, new_matches, finished=True))
            elif step == config.max_len:
                eos_logp = float(scorer.score_next(source, new_tokens)[eos])
                finished.append(Beam(new_tokens, new_cum + eos_logp, new_matches, finished=True))
            else:
                next_live.append(Beam(new_tokens, new_cum, new_matches))
        next_live.sort(key=lambda b: b.tokens)
        live = next_live

    if not finished:
        raise InternalError("beam search produced no finished beam")

    scored = [
        (
            composite_score(
                b.cum_log_prob, b.length, [(m.rank, m.match_pos) for m in b.matches], params
            ),
            b,
        )
        for b in finished
    ]
    scored.sort(key=lambda sb: (-sb[0], sb[1].tokens))
    return [
        Candidate(text=detokenize(beam.tokens, vocab), score=score, beam=beam)
        for score, beam in scored[: config.n_best]
    ]


class ExhaustiveResult(NamedTuple):
    text: str
    score: float
    tokens: tuple[int, ...]


def exhaustive_search(
    source: Sequence[int],
    scorer: Scorer,
    config: DecodeConfig,
    vocab: Vocab,
    keywords: Sequence[DecodeKeyword] = (),
    max_expansions: int = 10_000_000,
) -> ExhaustiveResult:
    """Enumerate every completable sequence and return the score argmax.

    Mirrors decode()'s hypothesis space exactly (blocking, EOS
    termination, forced completion at max_len) but explores it without
    pruning. Guarded: raises once max_expansions extensions have been
    considered.
    """
    _validate_inputs(source, scorer, keywords, vocab)
    params = config.penalty
    eos = vocab.eos_id
    V = scorer.vocab_size
    source = tuple(source)

    best: tuple[float, tuple[int, ...]] | None = None
    expansions = 0

    def consider(score: float, tokens: tuple[int, ...]) -> None:
        nonlocal best
        if best is None or score > best[0] or (score == best[0] and tokens < best[1]):
            best = (score, tokens)

    def walk(tokens: tuple[int, ...], cum: float, matches: tuple[Match, ...]) -> None:
        nonlocal expansions
        length = len(tokens) - 1
        log_probs = scorer.score_next(source, tokens)
        blocked = blocked_tokens(tokens, config, vocab)
        completions = keyword_completions(tokens, keywords, length + 1)
        for tok in range(V):
            expansions += 1
            if expansions > max_expansions:
                raise SearchSpaceError(
                    f"exhaustive search exceeded {max_expansions} expansions"
                )
            if tok in blocked:
                continue
            new_cum = cum + float(log_probs[tok])
            if new_cum == -np.inf:
                continue
            new_tokens = tokens + (tok,)
            new_matches = matches + tuple(completions.get(tok, ()))
            pairs = [(m.rank, m.match_pos) for m in new_matches]
            if tok == eos:
                consider(composite_score(new_cum, length + 1, pairs, params), new_tokens)
            elif length + 1 == config.max_len:
                eos_logp = float(scorer.score_next(source, new_tokens)[eos])
                consider(
                    composite_score(new_cum + eos_logp, length + 1, pairs, params),
                    new_tokens,
                )
            else:
                walk(new_tokens, new_cum, new_matches)

    walk((vocab.bos_id,), 0.0, ())
    if best is None:
        raise InternalError("exhaustive search found no completable sequence")
    return ExhaustiveResult(
        text=detokenize(best[1], vocab), score=best[0], tokens=best[1]
    )
