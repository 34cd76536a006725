"""Per-slot random environment: uplink channel gain and available CPU frequency cap.

Draws are addressed by ``(seed, t)`` through a counter-based generator (Philox),
so slot ``t`` sees the same environment whatever order slots are queried in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

H2_FLOOR = 1e-300

# Philox counter word 0 selects the stream; word 1 carries the slot index.
STREAM_ENV = 0
STREAM_ACCURACY = 1


def slot_generator(seed: int, t: int, stream: int = STREAM_ENV) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed), counter=[int(stream), int(t), 0, 0]))


@dataclass(frozen=True)
class ChannelParams:
    distance: float = 100.0  # m
    pathloss_exponent: float = 3.5
    reference_gain_db: float = -40.0  # gain at 1 m
    fading: bool = True  # Rayleigh block fading
    f_cap_low: float = 1.0e9  # Hz
    f_cap_high: float = 2.5e9  # Hz
    seed: int = 0

    def __post_init__(self):
        if not self.distance > 0:
            raise ValueError("distance must be > 0")
        if not self.pathloss_exponent > 0:
            raise ValueError("pathloss_exponent must be > 0")
        if not 0 < self.f_cap_low <= self.f_cap_high:
            raise ValueError("need 0 < f_cap_low <= f_cap_high")

    @property
    def mean_gain(self) -> float:
        return 10.0 ** (self.reference_gain_db / 10.0) * self.distance ** (-self.pathloss_exponent)


@dataclass(frozen=True)
class SlotEnv:
    h2: float
    f_max: float


def draw_slot_env(t: int, params: ChannelParams) -> SlotEnv:
    if t < 0:
        raise ValueError("slot index must be >= 0")
    u_fade, u_cap = slot_generator(params.seed, t).random(2)
    # inverse-CDF Exp(1): exactly two uniforms per slot, never a rejection loop
    g = max(-math.log1p(-u_fade), H2_FLOOR) if params.fading else 1.0
    h2 = max(params.mean_gain * g, H2_FLOOR)
    f_max = params.f_cap_low + (params.f_cap_high - params.f_cap_low) * u_cap
    return SlotEnv(h2, f_max)
