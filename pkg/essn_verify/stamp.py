# Python Version: 3.x
"""This module has the totally ordered domain used for σ, π, η and ξ.

A stamp compares lexicographically as (tier, rank, txn). Tier -1 and +1 are the -inf and +inf sentinels, so no numeric trick is needed to order them against finite stamps.
"""

from typing import *

TIER_NEG_INF = -1
TIER_FINITE = 0
TIER_POS_INF = 1


class Stamp(NamedTuple):
    tier: int
    rank: int = 0
    txn: int = 0

    def is_finite(self) -> bool:
        return self.tier == TIER_FINITE

    def __str__(self) -> str:
        if self.tier == TIER_NEG_INF:
            return '-inf'
        if self.tier == TIER_POS_INF:
            return '+inf'
        return str(self.rank)


NEG_INF = Stamp(TIER_NEG_INF)
POS_INF = Stamp(TIER_POS_INF)


def finite(rank: int, txn: int) -> Stamp:
    return Stamp(TIER_FINITE, rank, txn)

