"""Per-slot TX power, latency and accuracy for a candidate (R, f, encoder, anchor set)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

LN2 = math.log(2.0)


@dataclass(frozen=True)
class PhysParams:
    """Physical constants of the TX.

    ``N0`` multiplies the Shannon bracket directly, i.e. it is the noise power
    term of the transmit-power formula rather than a per-Hz density.
    """

    B: float = 1e6  # Hz
    N0: float = 1e-13  # W
    kappa: float = 1e-27  # W s^3
    q: int = 32  # bits per relrep entry
    cycles_per_flop: float = 0.125  # 8-wide SIMD
    R_min: float = 1e5  # bit/s
    R_max: float = 1e7  # bit/s
    f_min: float = 2e8  # Hz
    f_max_cap: float = 3e9  # Hz

    def __post_init__(self):
        for name in ("B", "N0", "kappa", "q", "cycles_per_flop", "R_min", "R_max", "f_min", "f_max_cap"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if not self.R_min < self.R_max:
            raise ValueError("R_min must be < R_max")
        if not self.f_min < self.f_max_cap:
            raise ValueError("f_min must be < f_max_cap")


@dataclass(frozen=True)
class EncoderProfile:
    id: str
    flops: float
    dim: int

    def __post_init__(self):
        if not self.flops > 0:
            raise ValueError(f"encoder {self.id!r}: flops must be > 0")
        if self.dim < 1:
            raise ValueError(f"encoder {self.id!r}: dim must be >= 1")


@dataclass(frozen=True)
class AnchorOption:
    id: str
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"anchor set {self.id!r}: size must be >= 1")


@dataclass(frozen=True)
class ActionSpace:
    """The finite encoder x anchor-set choices with their profiled accuracy.

    ``accuracy[i, j]`` is the accuracy of encoder ``i`` with anchor option ``j``.
    """

    encoders: tuple[EncoderProfile, ...]
    anchor_options: tuple[AnchorOption, ...]
    accuracy: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "encoders", tuple(self.encoders))
        object.__setattr__(self, "anchor_options", tuple(self.anchor_options))
        acc = np.array(self.accuracy, dtype=float)
        if acc.shape != (len(self.encoders), len(self.anchor_options)):
            raise ValueError(f"accuracy table has shape {acc.shape}, expected "
                             f"({len(self.encoders)}, {len(self.anchor_options)})")
        if not self.encoders or not self.anchor_options:
            raise ValueError("action space must be non-empty")
        if np.any(~np.isfinite(acc)) or acc.min() < 0 or acc.max() > 1:
            raise ValueError("accuracy values must lie in [0, 1]")
        for ids, what in (([e.id for e in self.encoders], "encoder"),
                          ([a.id for a in self.anchor_options], "anchor set")):
            if len(set(ids)) != len(ids):
                raise ValueError(f"duplicate {what} id")
        acc.setflags(write=False)
        object.__setattr__(self, "accuracy", acc)

    @classmethod
    def from_table(cls, encoders: Sequence[EncoderProfile], anchor_sizes: Sequence[int],
                   table: dict[tuple[str, int], float]) -> "ActionSpace":
        sizes = sorted(set(int(n) for n in anchor_sizes))
        missing = [(e.id, n) for e in encoders for n in sizes if (e.id, n) not in table]
        if missing:
            raise ValueError(f"accuracy missing for (encoder, anchor size) pairs: {missing}")
        acc = [[table[(e.id, n)] for n in sizes] for e in encoders]
        return cls(tuple(encoders), tuple(AnchorOption(f"A{n}", n) for n in sizes), np.array(acc))

    @property
    def shape(self) -> tuple[int, int]:
        return self.accuracy.shape

    def encoder_index(self, encoder_id: str) -> int:
        for i, e in enumerate(self.encoders):
            if e.id == encoder_id:
                return i
        raise KeyError(encoder_id)

    def anchor_index(self, anchor_id: str) -> int:
        for j, a in enumerate(self.anchor_options):
            if a.id == anchor_id:
                return j
        raise KeyError(anchor_id)

    def cycles_table(self, params: PhysParams) -> np.ndarray:
        return np.array([[compute_cycles(e, a.size, params) for a in self.anchor_options]
                         for e in self.encoders])

    def anchor_sizes(self) -> np.ndarray:
        return np.array([a.size for a in self.anchor_options], dtype=float)


@dataclass(frozen=True)
class SlotOutcome:
    p_u: float
    p_c: float
    p_total: float
    L_u: float
    L_c: float
    L_total: float
    G: float
    latency_violation: bool


def compute_cycles(encoder: EncoderProfile, n_anchors: int, params: PhysParams) -> float:
    """CPU cycles for one sample: encoder forward pass plus 2*d flops per anchor."""
    if n_anchors < 1:
        raise ValueError("n_anchors must be >= 1")
    return (encoder.flops + 2.0 * encoder.dim * n_anchors) * params.cycles_per_flop


def uplink_power(R, h2, params: PhysParams):
    return (params.N0 / h2) * np.expm1((R / params.B) * LN2)


def compute_power(R: float, f: float, h2: float, params: PhysParams) -> tuple[float, float, float]:
    if not h2 > 0:
        raise ValueError(f"channel gain must be > 0, got {h2!r}")
    if not (R > 0 and f > 0):
        raise ValueError("rate and frequency must be > 0")
    p_u = float(uplink_power(R, h2, params))
    p_c = params.kappa * f ** 3
    return p_u, p_c, p_u + p_c


def compute_latency(R: float, f: float, N: float, n_anchors: int,
                    params: PhysParams) -> tuple[float, float, float]:
    if not (R > 0 and f > 0):
        raise ValueError("rate and frequency must be > 0")
    L_u = n_anchors * params.q / R
    L_c = N / f
    return L_u, L_c, L_u + L_c


def lookup_accuracy(space: ActionSpace, encoder_id: str, anchor_id: str) -> float:
    return float(space.accuracy[space.encoder_index(encoder_id), space.anchor_index(anchor_id)])


def evaluate_slot(R: float, f: float, h2: float, encoder: EncoderProfile, anchors: AnchorOption,
                  G: float, L_ist: float, params: PhysParams) -> SlotOutcome:
    p_u, p_c, p = compute_power(R, f, h2, params)
    N = compute_cycles(encoder, anchors.size, params)
    L_u, L_c, L = compute_latency(R, f, N, anchors.size, params)
    return SlotOutcome(p_u, p_c, p, L_u, L_c, L, G, L >= L_ist)
