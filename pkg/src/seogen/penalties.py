"""Length and keyword-rank penalties and the composite beam score.

A beam's score is its cumulative log-probability divided by a penalty
product: a length penalty shaped like a triangular ramp peaking at the
target length r, and a rank penalty that rewards beams containing
well-ranked keywords near the start of the sequence. Scalar math lives
in the kernel backend so the compiled and fallback paths stay identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from . import _kernels
from .errors import ValidationError

RANK_COMBINE_MODES = ("max", "product")


@dataclass(frozen=True)
class PenaltyParams:
    """Decoding penalty hyperparameters.

    r: target title length in decoder subtokens.
    alpha: length-normalization exponent; 0 disables the length penalty.
    beta: rank-penalty accent; larger values reward keyword matches more.
    position_scale: divisor applied to the match position inside the
        rank penalty's exponent.
    rank_penalty_combine: how penalties of multiple matched keywords
        combine into one effective value ("max" or "product").
    """

    r: int = 12
    alpha: float = 0.6
    beta: float = 1.5
    position_scale: float = 3.0
    rank_penalty_combine: str = "max"

    def __post_init__(self):
        if self.r < 1:
            raise ValidationError(f"r must be >= 1, got {self.r}")
        if self.alpha < 0:
            raise ValidationError(f"alpha must be >= 0, got {self.alpha}")
        if self.position_scale <= 0:
            raise ValidationError(
                f"position_scale must be > 0, got {self.position_scale}"
            )
        if self.rank_penalty_combine not in RANK_COMBINE_MODES:
            raise ValidationError(
                f"rank_penalty_combine must be one of {RANK_COMBINE_MODES}, "
                f"got {self.rank_penalty_combine!r}"
            )


def theta(length: int, r: int) -> float:
    """Triangular ramp: length for length < r, else 2r - length."""
    if length < 0:
        raise ValidationError(f"length must be >= 0, got {length}")
    return _kernels.theta(float(length), float(r))


def length_penalty(length: int, params: PenaltyParams) -> float:
    """(5 + theta(length, r) + 1)^alpha / 6^alpha.

    Maximized at length == r; equals 1.0 exactly when alpha == 0.
    Undefined (raises) once length >= 2r + 6, where the base turns
    non-positive; decoder configs are validated against that bound.
    """
    if length < 0:
        raise ValidationError(f"length must be >= 0, got {length}")
    if params.alpha == 0.0:
        return 1.0
    return _kernels.length_penalty(float(length), float(params.r), params.alpha)


def rank_penalty(rank: int, match_pos: int, params: PenaltyParams) -> float:
    """1 + exp(-rank - match_pos / position_scale + beta).

    Strictly decreasing in both rank and match position, always > 1,
    approaching 1 as the match moves toward the end of the sequence.
    """
    if rank < 0:
        raise ValidationError(f"rank must be >= 0, got {rank}")
    if match_pos < 0:
        raise ValidationError(f"match_pos must be >= 0, got {match_pos}")
    return _kernels.rank_penalty(
        float(rank), float(match_pos), params.beta, params.position_scale
    )


def effective_rank_penalty(
    matches: Iterable[tuple[int, int]], params: PenaltyParams
) -> float:
    """Combine per-match penalties into one divisor; 1.0 when no matches.

    matches yields (rank, match_pos) pairs for every completed keyword
    occurrence in the beam.
    """
    rp = 1.0
    if params.rank_penalty_combine == "max":
        for rank, pos in matches:
            rp = max(rp, rank_penalty(rank, pos, params))
    else:
        for rank, pos in matches:
            rp *= rank_penalty(rank, pos, params)
    return rp


def composite_score(
    cum_log_prob: float,
    length: int,
    matches: Iterable[tuple[int, int]],
    params: PenaltyParams,
) -> float:
    """cum_log_prob / (lp(length) * rp_eff(matches))."""
    if cum_log_prob > 0:
        raise ValidationError(
            f"cum_log_prob must be <= 0, got {cum_log_prob}"
        )
    lp = length_penalty(length, params)
    rp = effective_rank_penalty(matches, params)
    return cum_log_prob / (lp * rp)
