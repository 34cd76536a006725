"""Time-slot loop and (L_bar, G_bar, seed) sweeps."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .channel import STREAM_ACCURACY, draw_slot_env, slot_generator
from .controller import Controller, QueueState, update_queues
from .system_model import ActionSpace, SlotOutcome, uplink_power

SLOT_COLUMNS = ("t", "encoder", "anchors", "R", "f", "p_u", "p_c", "L_u", "L_c", "L", "G",
                "violation", "Z", "Q", "Y")
SWEEP_COLUMNS = ("L_bar", "G_bar", "seed", "avg_power", "avg_latency", "avg_accuracy", "violation_freq")
SUMMARY_COLUMNS = ("L_bar", "G_bar", "n_seeds", "mean_power", "std_power", "mean_latency",
                   "mean_accuracy", "mean_violation_freq")

_FLOAT_COLS = ("R", "f", "p_u", "p_c", "L_u", "L_c", "L", "G", "Z", "Q", "Y")


def _fmt(x: float) -> str:
    return repr(float(x))


@dataclass
class RunRecord:
    """Slot-level trace of one run. ``Z, Q, Y`` are the queue values the slot's
    decision was taken with (i.e. before that slot's update)."""

    encoder: list[str]
    anchors: list[str]
    R: np.ndarray
    f: np.ndarray
    p_u: np.ndarray
    p_c: np.ndarray
    L_u: np.ndarray
    L_c: np.ndarray
    L: np.ndarray
    G: np.ndarray
    violation: np.ndarray
    Z: np.ndarray
    Q: np.ndarray
    Y: np.ndarray

    @classmethod
    def empty(cls, horizon: int) -> "RunRecord":
        z = lambda: np.zeros(horizon)  # noqa: E731
        return cls([""] * horizon, [""] * horizon, z(), z(), z(), z(), z(), z(), z(), z(),
                   np.zeros(horizon, dtype=bool), z(), z(), z())

    def __len__(self) -> int:
        return len(self.encoder)

    @property
    def p(self) -> np.ndarray:
        return self.p_u + self.p_c

    def _mean(self, x) -> float | None:
        return float(np.mean(x)) if len(self) else None

    @property
    def avg_power(self) -> float | None:
        return self._mean(self.p)

    @property
    def avg_latency(self) -> float | None:
        return self._mean(self.L)

    @property
    def avg_accuracy(self) -> float | None:
        return self._mean(self.G)

    @property
    def violation_freq(self) -> float | None:
        return self._mean(self.violation.astype(float))

    def running_average(self, name: str) -> np.ndarray:
        x = np.asarray(getattr(self, name), dtype=float)
        return np.cumsum(x) / np.arange(1, len(x) + 1)

    def rows(self):
        for t in range(len(self)):
            yield (t, self.encoder[t], self.anchors[t]) + tuple(
                getattr(self, c)[t] for c in ("R", "f", "p_u", "p_c", "L_u", "L_c", "L", "G")
            ) + (bool(self.violation[t]), self.Z[t], self.Q[t], self.Y[t])


def run(cfg, space: ActionSpace, horizon: int | None = None) -> RunRecord:
    """Simulate ``horizon`` slots (default ``cfg.horizon``) starting from empty queues.

    Per slot: draw the environment, decide, realise the outcome, update the queues.
    """
    cfg.validate_against(space)
    T = cfg.horizon if horizon is None else int(horizon)
    if T < 0:
        raise ValueError("horizon must be >= 0")
    phys, chan, ctrl = cfg.physical, cfg.channel_params(), cfg.control
    controller = Controller(space, phys, ctrl)
    rec = RunRecord.empty(T)
    state = QueueState()
    bernoulli = cfg.accuracy_mode == "bernoulli"
    for t in range(T):
        env = draw_slot_env(t, chan)
        R, f, _, _, psi = controller.candidates(state, env)
        i, j = np.unravel_index(int(np.argmin(psi)), psi.shape)
        r, fr = float(R[j]), float(f[i, j])
        G = float(controller.accuracy[i, j])
        if bernoulli:
            G = 1.0 if slot_generator(chan.seed, t, STREAM_ACCURACY).random() < G else 0.0
        n_bits = float(controller.bits[j])
        L_u = n_bits / r
        L_c = float(controller.cycles[i, j]) / fr
        p_c = phys.kappa * fr ** 3
        p_u = float(uplink_power(r, env.h2, phys))
        Lt = L_u + L_c
        viol = Lt >= ctrl.L_ist
        rec.encoder[t] = space.encoders[i].id
        rec.anchors[t] = space.anchor_options[j].id
        rec.R[t], rec.f[t], rec.p_u[t], rec.p_c[t] = r, fr, p_u, p_c
        rec.L_u[t], rec.L_c[t], rec.L[t], rec.G[t] = L_u, L_c, Lt, G
        rec.violation[t] = viol
        rec.Z[t], rec.Q[t], rec.Y[t] = state.Z, state.Q, state.Y
        state = update_queues(state, SlotOutcome(p_u, p_c, p_u + p_c, L_u, L_c, Lt, G, viol), ctrl)
    return rec


def slot_csv_text(record: RunRecord) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SLOT_COLUMNS)
    for row in record.rows():
        t, enc, anc, *vals = row
        floats = vals[:8]
        viol = vals[8]
        queues = vals[9:]
        w.writerow([t, enc, anc] + [_fmt(v) for v in floats] + [int(viol)] + [_fmt(v) for v in queues])
    return buf.getvalue()


def timeseries_export(record: RunRecord, path) -> Path:
    """Write the slot-level CSV; identical records give byte-identical files."""
    if len(record) == 0:
        raise ValueError("cannot export an empty record")
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(slot_csv_text(record))
    except OSError as exc:
        raise OSError(f"failed to write slot CSV to {path}: {exc}") from exc
    return path


def load_timeseries(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != SLOT_COLUMNS:
            raise ValueError(f"{path}: unexpected header {header}")
        cols = {c: [] for c in SLOT_COLUMNS}
        for row in reader:
            for c, v in zip(SLOT_COLUMNS, row):
                cols[c].append(v)
    out = {"t": np.array(cols["t"], dtype=int), "encoder": np.array(cols["encoder"]),
           "anchors": np.array(cols["anchors"]), "violation": np.array(cols["violation"], dtype=int)}
    out.update({c: np.array(cols[c], dtype=float) for c in _FLOAT_COLS})
    return out


# --- sweeps ---

@dataclass(frozen=True)
class SweepGrid:
    L_bar: tuple[float, ...] = (0.03, 0.04, 0.05, 0.06)
    G_bar: tuple[float, ...] = (0.7, 0.8, 0.9)
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    horizon: int = 10_000

    def __post_init__(self):
        if not (self.L_bar and self.G_bar and self.seeds):
            raise ValueError("sweep grid lists must be non-empty")
        if self.horizon < 1:
            raise ValueError("sweep horizon must be >= 1")

    def cells(self):
        for lb in sorted(self.L_bar):
            for gb in sorted(self.G_bar):
                for s in sorted(self.seeds):
                    yield lb, gb, s


@dataclass(frozen=True)
class SweepRow:
    L_bar: float
    G_bar: float
    seed: int
    avg_power: float
    avg_latency: float
    avg_accuracy: float
    violation_freq: float


def cell_config(cfg, L_bar: float, G_bar: float, seed: int):
    """Config of one sweep cell; the instantaneous threshold follows L_bar."""
    ctrl = replace(cfg.control, L_bar=L_bar, G_bar=G_bar, L_ist=L_bar + cfg.L_ist_offset)
    return replace(cfg, control=ctrl, seed=seed)


def _run_cell(args) -> SweepRow:
    cfg, space, lb, gb, seed, horizon = args
    rec = run(cell_config(cfg, lb, gb, seed), space, horizon)
    return SweepRow(lb, gb, seed, rec.avg_power, rec.avg_latency, rec.avg_accuracy, rec.violation_freq)


def sweep(grid: SweepGrid, cfg, space: ActionSpace, workers: int = 1) -> list[SweepRow]:
    """One run per (L_bar, G_bar, seed); rows sorted by that key whatever the input order."""
    jobs = [(cfg, space, lb, gb, s, grid.horizon) for lb, gb, s in grid.cells()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_cell, jobs))
    else:
        rows = [_run_cell(j) for j in jobs]
    return sorted(rows, key=lambda r: (r.L_bar, r.G_bar, r.seed))


def summarize(rows: list[SweepRow]) -> list[dict]:
    """Mean and (population) std of the long-run average power over seeds per (L_bar, G_bar)."""
    groups: dict[tuple[float, float], list[SweepRow]] = {}
    for r in sorted(rows, key=lambda r: (r.L_bar, r.G_bar, r.seed)):
        groups.setdefault((r.L_bar, r.G_bar), []).append(r)
    out = []
    for (lb, gb), rs in groups.items():
        power = np.array([r.avg_power for r in rs])
        out.append(dict(L_bar=lb, G_bar=gb, n_seeds=len(rs), mean_power=float(power.mean()),
                        std_power=float(power.std()),
                        mean_latency=float(np.mean([r.avg_latency for r in rs])),
                        mean_accuracy=float(np.mean([r.avg_accuracy for r in rs])),
                        mean_violation_freq=float(np.mean([r.violation_freq for r in rs]))))
    return out


def sweep_csv_text(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r.L_bar), _fmt(r.G_bar), r.seed, _fmt(r.avg_power), _fmt(r.avg_latency),
                    _fmt(r.avg_accuracy), _fmt(r.violation_freq)])
    return buf.getvalue()


def summary_csv_text(summary: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for s in summary:
        w.writerow([s["n_seeds"] if c == "n_seeds" else _fmt(s[c]) for c in SUMMARY_COLUMNS])
    return buf.getvalue()
