"""Average power versus the latency budget for each accuracy target.

Runs the L_bar x G_bar x seed grid from a config, writes sweep.csv and
sweep_summary.csv, and prints the mean +- std power table.

    python scripts/run_sweep.py --config configs/default.ini --out results/sweep
"""

import argparse
import dataclasses
from pathlib import Path

from relsemcom.config import load_config
from relsemcom.profiles import load_profile
from relsemcom.simulator import summarize, summary_csv_text, sweep, sweep_csv_text

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=ROOT / "configs" / "default.ini")
    ap.add_argument("--profile", type=Path)
    ap.add_argument("--out", type=Path, default=ROOT / "results" / "sweep")
    ap.add_argument("--horizon", type=int)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    cfg = load_config(args.config)
    profile = args.profile or (args.config.parent / cfg.profile)
    space = load_profile(profile)
    grid = cfg.sweep if args.horizon is None else dataclasses.replace(cfg.sweep, horizon=args.horizon)

    rows = sweep(grid, cfg, space, workers=args.workers)
    summary = summarize(rows)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "sweep.csv").write_text(sweep_csv_text(rows))
    (args.out / "sweep_summary.csv").write_text(summary_csv_text(summary))

    L_vals = sorted({s["L_bar"] for s in summary})
    print("mean power [W] (+- std over seeds)")
    print("G_bar \\ L_bar " + "".join(f"{lb:>20.3f}" for lb in L_vals))
    for gb in sorted({s["G_bar"] for s in summary}):
        cells = {s["L_bar"]: s for s in summary if s["G_bar"] == gb}
        print(f"{gb:<14.2f}" + "".join(
            f"{cells[lb]['mean_power']:>11.4g} +- {cells[lb]['std_power']:<6.2g}" for lb in L_vals))
    print(f"wrote {args.out / 'sweep.csv'} and {args.out / 'sweep_summary.csv'}")


if __name__ == "__main__":
    main()
