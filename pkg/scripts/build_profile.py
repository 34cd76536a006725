"""Build the encoder x anchor-set accuracy profile from the synthetic stitching study.

    python scripts/build_profile.py --config configs/default.ini --out profiles/default.csv
"""

import argparse
from pathlib import Path

from relsemcom.config import load_config
from relsemcom.profiles import build_profile, save_profile

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=ROOT / "configs" / "default.ini")
    ap.add_argument("--out", type=Path, default=ROOT / "results" / "profile.csv")
    args = ap.parse_args()

    params = load_config(args.config).stitching
    space = build_profile(params)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    save_profile(args.out, space)

    sizes = [a.size for a in space.anchor_options]
    print(f"{'encoder':<24}" + "".join(f"{f'n={n}':>9}" for n in sizes))
    for e, row in zip(space.encoders, space.accuracy):
        print(f"{e.id:<24}" + "".join(f"{g:>9.4f}" for g in row))
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
