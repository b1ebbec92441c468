"""
Erlang-B loss model for the congested UAV -> relay and relay -> D2D links.

B(N, A) is computed with the recursion
    B(0, A) = 1,  B(k, A) = A*B(k-1, A) / (k + A*B(k-1, A))
which stays in [0, 1] at every step and never forms A^N or N!.
"""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from covsim.core.validation import require_count, require_non_negative, require_positive
from covsim.core.errors import ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrafficLoad:
    """Offered traffic A (Erlang) on N channels"""
    offered_erlang: float
    channels: int

    def __post_init__(self):
        require_non_negative("offered_erlang", self.offered_erlang)
        require_count("channels", self.channels, minimum=0)


def _erlang_b(channels: int, offered: float) -> float:
    b = 1.0
    for k in range(1, channels + 1):
        ab = offered * b
        b = ab / (k + ab)
    return b


def loss_probability(load: TrafficLoad) -> float:
    """Erlang-B blocking probability"""
    return _erlang_b(load.channels, float(load.offered_erlang))


def carried_traffic(load: TrafficLoad) -> float:
    """Traffic actually served, A*(1 - B)"""
    return float(load.offered_erlang) * (1.0 - loss_probability(load))


def channels_for_grade(offered_erlang: float, target_blocking: float) -> int:
    """Smallest N with B(N, A) <= target."""
    require_positive("offered_erlang", offered_erlang)
    if not 0.0 < target_blocking < 1.0:
        raise ParameterError("target_blocking", f"must lie in (0, 1), got {target_blocking!r}")

    # B(N, A) -> 0 as N grows, so the walk terminates
    n, b = 0, 1.0
    while b > target_blocking:
        n += 1
        ab = offered_erlang * b
        b = ab / (n + ab)
    logger.debug("A=%g Erlang needs %d channels for B <= %g", offered_erlang, n, target_blocking)
    return n


def blocking_table(offered_grid: Sequence[float], channel_grid: Sequence[int]) -> np.ndarray:
    """B(N, A) for every (channels, offered) pair; rows follow channel_grid."""
    table = np.empty((len(channel_grid), len(offered_grid)), dtype=float)
    for j, a in enumerate(offered_grid):
        for i, n in enumerate(channel_grid):
            table[i, j] = loss_probability(TrafficLoad(a, n))
    return table
