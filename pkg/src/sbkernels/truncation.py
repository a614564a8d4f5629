"""Series values carrying a rigorous bound on the omitted tail."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class TruncatedSum:
    """Partial sum of a convergent series.

    ``tail_bound`` bounds the absolute value of everything that was not summed;
    it says nothing about floating-point rounding inside the partial sum.
    """

    value: complex
    tail_bound: float
    terms_used: int

    def __post_init__(self) -> None:
        if not self.tail_bound >= 0:
            raise ValueError(f"tail_bound must be non-negative, got {self.tail_bound}")
        if self.terms_used < 1:
            raise ValueError(f"terms_used must be >= 1, got {self.terms_used}")

    def to_dict(self) -> dict:
        z = complex(self.value)
        return {
            "value": [z.real, z.imag],
            "tail_bound": self.tail_bound,
            "terms_used": self.terms_used,
        }


def geometric_tail(first_omitted: float, ratio: float) -> float:
    """Bound ``sum_{k>=0} first_omitted * ratio**k`` for a ratio below one.

    Valid whenever every later term ratio is at most ``ratio``.
    """
    if ratio >= 1.0:
        return math.inf
    return first_omitted / (1.0 - ratio)
