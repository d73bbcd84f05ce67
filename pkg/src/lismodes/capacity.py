"""Waterfilling over parallel Gaussian mode channels y_n = xi_n x_n + w_n."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from lismodes.errors import InvalidArgument, InvalidInput


@dataclass(frozen=True, eq=False)
class Allocation:
    gains: np.ndarray
    noise: float
    total_power: float
    powers: np.ndarray
    water_level: float

    @property
    def active(self) -> int:
        return int(np.count_nonzero(self.powers > 0))


def waterfill(gains: Sequence[float], noise: float, total_power: float) -> Allocation:
    """Capacity-optimal powers for channel power gains ``gains``.

    Channels are sorted by their noise floor ``noise / g``; the largest
    active set whose water level clears its last floor is the solution, so
    no iteration tolerance is involved.
    """
    g = np.asarray(gains, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise InvalidArgument("gains must be a non-empty 1-D sequence")
    if not (np.all(np.isfinite(g)) and math.isfinite(noise) and math.isfinite(total_power)):
        raise InvalidInput("non-finite waterfilling input")
    if np.any(g <= 0) or noise <= 0 or total_power <= 0:
        raise InvalidArgument("gains, noise and total power must be positive")

    floors = noise / g
    order = np.argsort(floors, kind="stable")
    sorted_floors = floors[order]
    csum = np.cumsum(sorted_floors)
    m = len(g)
    for m in range(len(g), 0, -1):
        mu = (total_power + csum[m - 1]) / m
        if mu > sorted_floors[m - 1]:
            break
    mu = (total_power + csum[m - 1]) / m
    powers = np.clip(mu - floors, 0.0, None)
    powers[order[m:]] = 0.0
    return Allocation(g, float(noise), float(total_power), powers, float(mu))


def capacity(alloc: Allocation) -> float:
    """Sum rate in bits per channel use."""
    snr = alloc.powers * alloc.gains / alloc.noise
    return math.fsum(np.log2(1.0 + snr))
