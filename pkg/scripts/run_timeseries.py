"""Slot-level latency and accuracy of one run, with running averages.

Writes slots.csv and prints the running averages of latency, accuracy and
power at a few checkpoints next to the long-term targets.

    python scripts/run_timeseries.py --config configs/default.ini --out results/timeseries
"""

import argparse
import dataclasses
from pathlib import Path

import numpy as np

from relsemcom.config import load_config
from relsemcom.profiles import load_profile
from relsemcom.simulator import run, timeseries_export

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=ROOT / "configs" / "default.ini")
    ap.add_argument("--profile", type=Path)
    ap.add_argument("--out", type=Path, default=ROOT / "results" / "timeseries")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--horizon", type=int)
    args = ap.parse_args()

    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    space = load_profile(args.profile or (args.config.parent / cfg.profile))
    rec = run(cfg, space, args.horizon)
    if not len(rec):
        raise SystemExit("horizon is 0: nothing to export")

    args.out.mkdir(parents=True, exist_ok=True)
    path = timeseries_export(rec, args.out / "slots.csv")

    L, G, p = rec.running_average("L"), rec.running_average("G"), rec.running_average("p")
    T = len(rec)
    checkpoints = sorted({min(T, c) for c in (10, 100, 1000, T // 2, T)})
    ctrl = cfg.control
    print(f"targets: L_bar={ctrl.L_bar} s, G_bar={ctrl.G_bar}, P(L >= {ctrl.L_ist}) <= {ctrl.p_ist}")
    print(f"{'slots':>8} {'avg L [s]':>12} {'avg G':>8} {'avg p [W]':>11}")
    for c in checkpoints:
        print(f"{c:>8d} {L[c - 1]:>12.5f} {G[c - 1]:>8.4f} {p[c - 1]:>11.4g}")
    print(f"violation frequency {rec.violation_freq:.4f}")
    used, counts = np.unique([f"{e}/{a}" for e, a in zip(rec.encoder, rec.anchors)], return_counts=True)
    for name, c in sorted(zip(used, counts), key=lambda x: -x[1]):
        print(f"  {name:<32} {c / T:6.1%}")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
