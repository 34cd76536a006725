"""Drift-plus-penalty controller.

Three virtual queues track the long-term constraints: ``Z`` (mean latency),
``Q`` (mean accuracy) and ``Y`` (probability of exceeding the instantaneous
latency threshold). Each slot minimises

    Psi = (Z + Y) * L - Q * G + V * p

over rate, CPU frequency, encoder and anchor set. For a fixed (encoder,
anchor set) the problem separates into a rate part and a frequency part with
closed-form minimisers; the discrete pair is found by exhaustive search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import SlotEnv
from .numerics import lambert_w0
from .system_model import LN2, ActionSpace, PhysParams, SlotOutcome, uplink_power

RATE_LOG_BASES = {"ln": LN2, "log10": math.log10(2.0)}


@dataclass(frozen=True)
class QueueState:
    Z: float = 0.0
    Q: float = 0.0
    Y: float = 0.0

    def __post_init__(self):
        if min(self.Z, self.Q, self.Y) < 0:
            raise ValueError("virtual queues must be nonnegative")


@dataclass(frozen=True)
class ControlParams:
    V: float = 1.0
    eps_z: float = 3.0
    eps_q: float = 0.3
    eps_y: float = 0.05
    L_bar: float = 0.04  # s
    G_bar: float = 0.8
    L_ist: float = 0.0475  # s
    p_ist: float = 0.3
    # "ln" follows the rate formula's dimensional reading; "log10" is the literal print
    rate_log: str = "ln"

    def __post_init__(self):
        for name in ("V", "eps_z", "eps_q", "eps_y", "L_bar"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if not 0 < self.p_ist < 1:
            raise ValueError("p_ist must lie in (0, 1)")
        if not 0 < self.G_bar < 1:
            raise ValueError("G_bar must lie in (0, 1)")
        if not self.L_ist >= self.L_bar:
            raise ValueError("L_ist must be >= L_bar")
        if self.rate_log not in RATE_LOG_BASES:
            raise ValueError(f"rate_log must be one of {sorted(RATE_LOG_BASES)}")


@dataclass(frozen=True)
class SlotDecision:
    encoder_index: int
    anchor_index: int
    encoder: str
    anchors: str
    R: float
    f: float
    psi: float


def update_queues(state: QueueState, outcome: SlotOutcome, params: ControlParams) -> QueueState:
    violation = 1.0 if outcome.L_total >= params.L_ist else 0.0
    return QueueState(
        Z=max(0.0, state.Z + params.eps_z * (outcome.L_total - params.L_bar)),
        Q=max(0.0, state.Q + params.eps_q * (params.G_bar - outcome.G)),
        Y=max(0.0, state.Y + params.eps_y * (violation - params.p_ist)),
    )


def slot_objective(Z, Q, Y, L, G, p_total, V):
    return (Z + Y) * L - Q * G + V * p_total


def _rate_prefactor(phys: PhysParams, ctrl: ControlParams) -> float:
    return 2.0 * phys.B / RATE_LOG_BASES[ctrl.rate_log]


def optimal_rate(Z: float, Y: float, n_anchors: int, h2: float, phys: PhysParams,
                 ctrl: ControlParams) -> float:
    """Rate minimising ``(Z+Y) * n*q/R + V * p_u(R)``, clipped to [R_min, R_max]."""
    arg = 0.5 * math.sqrt((Z + Y) * n_anchors * phys.q * h2 * LN2 / (phys.B * ctrl.V * phys.N0))
    R = _rate_prefactor(phys, ctrl) * lambert_w0(arg)
    return min(max(R, phys.R_min), phys.R_max)


def optimal_frequency(Z: float, Y: float, N: float, f_max: float, phys: PhysParams,
                      ctrl: ControlParams) -> float:
    """Frequency minimising ``(Z+Y) * N/f + V * kappa * f**3``, clipped to [f_min, f_max]."""
    f = ((Z + Y) * N / (3.0 * ctrl.V * phys.kappa)) ** 0.25
    return min(max(f, phys.f_min), f_max)


class Controller:
    """Per-slot decision over a fixed action space; tables are precomputed once."""

    def __init__(self, space: ActionSpace, phys: PhysParams, ctrl: ControlParams):
        self.space = space
        self.phys = phys
        self.ctrl = ctrl
        self.cycles = space.cycles_table(phys)  # (E, A)
        self.sizes = space.anchor_sizes()  # (A,)
        self.bits = self.sizes * phys.q
        self._bits_list = self.bits.tolist()
        self.accuracy = space.accuracy

    def candidates(self, state: QueueState, env: SlotEnv):
        """Closed-form (R, f), latency, power and objective for every pair."""
        phys, ctrl = self.phys, self.ctrl
        zy = state.Z + state.Y
        # a handful of anchor options: scalar W is cheaper than a vectorised call
        c = zy * env.h2 * LN2 / (phys.B * ctrl.V * phys.N0)
        pref = _rate_prefactor(phys, ctrl)
        R = np.array([min(max(pref * lambert_w0(0.5 * math.sqrt(c * b)), phys.R_min), phys.R_max)
                      for b in self._bits_list])  # (A,)
        f_free = (zy * self.cycles / (3.0 * ctrl.V * phys.kappa)) ** 0.25
        f = np.minimum(np.maximum(f_free, phys.f_min), env.f_max)  # (E, A)
        L_u = self.bits / R
        L_c = self.cycles / f
        L = L_u[None, :] + L_c
        p_u = uplink_power(R, env.h2, phys)
        p_c = phys.kappa * f ** 3
        p = p_u[None, :] + p_c
        psi = slot_objective(state.Z, state.Q, state.Y, L, self.accuracy, p, ctrl.V)
        return R, f, L, p, psi

    def decide(self, state: QueueState, env: SlotEnv) -> SlotDecision:
        R, f, _, _, psi = self.candidates(state, env)
        # argmin returns the first minimum in C order: lexicographic (encoder, anchor) tie-break
        i, j = np.unravel_index(int(np.argmin(psi)), psi.shape)
        return SlotDecision(int(i), int(j), self.space.encoders[i].id, self.space.anchor_options[j].id,
                            float(R[j]), float(f[i, j]), float(psi[i, j]))


def decide(state: QueueState, env: SlotEnv, space: ActionSpace, phys: PhysParams,
           ctrl: ControlParams) -> SlotDecision:
    return Controller(space, phys, ctrl).decide(state, env)
