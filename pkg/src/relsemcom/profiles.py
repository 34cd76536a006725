"""Encoder/accuracy profile files and their construction from a stitching study.

A profile is a CSV with header ``record,encoder,flops,dim,anchors,accuracy``:
``encoder`` rows fill ``flops`` and ``dim``; ``accuracy`` rows fill ``anchors``
(anchor-set size) and ``accuracy``. Every (encoder, anchor size) cell must be
present exactly once.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .config import ConfigError, StitchingParams
from .stitching import SyntheticEncoder, build_accuracy_profile, generate_dataset
from .system_model import ActionSpace, EncoderProfile

PROFILE_COLUMNS = ("record", "encoder", "flops", "dim", "anchors", "accuracy")


def profile_csv_text(encoders, table: dict[tuple[str, int], float]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PROFILE_COLUMNS)
    for e in encoders:
        w.writerow(["encoder", e.id, repr(float(e.flops)), e.dim, "", ""])
    sizes = sorted({n for _, n in table})
    for e in encoders:
        for n in sizes:
            w.writerow(["accuracy", e.id, "", "", n, repr(float(table[(e.id, n)]))])
    return buf.getvalue()


def space_to_table(space: ActionSpace) -> dict[tuple[str, int], float]:
    return {(e.id, a.size): float(space.accuracy[i, j])
            for i, e in enumerate(space.encoders) for j, a in enumerate(space.anchor_options)}


def save_profile(path, space: ActionSpace) -> Path:
    path = Path(path)
    path.write_text(profile_csv_text(space.encoders, space_to_table(space)))
    return path


def parse_profile(text: str, source: str = "<string>") -> ActionSpace:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != PROFILE_COLUMNS:
        raise ConfigError(f"{source}: header must be {','.join(PROFILE_COLUMNS)}")
    encoders: dict[str, EncoderProfile] = {}
    table: dict[tuple[str, int], float] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(PROFILE_COLUMNS):
            raise ConfigError(f"{source}:{lineno}: expected {len(PROFILE_COLUMNS)} fields")
        kind, enc = row[0], row[1]
        try:
            if kind == "encoder":
                if enc in encoders:
                    raise ConfigError(f"{source}:{lineno}: duplicate encoder {enc!r}")
                encoders[enc] = EncoderProfile(enc, float(row[2]), int(row[3]))
            elif kind == "accuracy":
                key = (enc, int(row[4]))
                if key in table:
                    raise ConfigError(f"{source}:{lineno}: duplicate accuracy cell {key}")
                g = float(row[5])
                if not 0.0 <= g <= 1.0:
                    raise ConfigError(f"{source}:{lineno}: accuracy {g} outside [0, 1]")
                table[key] = g
            else:
                raise ConfigError(f"{source}:{lineno}: unknown record type {kind!r}")
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from exc
    if not encoders:
        raise ConfigError(f"{source}: no encoder rows")
    stray = sorted({e for e, _ in table} - set(encoders))
    if stray:
        raise ConfigError(f"{source}: accuracy rows for undeclared encoders {stray}")
    sizes = sorted({n for _, n in table})
    if not sizes:
        raise ConfigError(f"{source}: no accuracy rows")
    try:
        return ActionSpace.from_table(list(encoders.values()), sizes, table)
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load_profile(path) -> ActionSpace:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read profile {path}: {exc}") from exc
    return parse_profile(text, str(path))


def synthetic_encoders(params: StitchingParams) -> list[SyntheticEncoder]:
    """Random orthogonal encoders, one per EncoderSpec, seeded by position."""
    return [SyntheticEncoder.random(s.id, params.dim, seed=1000 + k, scale=s.scale,
                                    noise_sigma=s.noise_sigma, flops=s.flops)
            for k, s in enumerate(params.encoders)]


def build_profile(params: StitchingParams) -> ActionSpace:
    """Run the stitching study and package it as an action space."""
    data = generate_dataset(params.num_classes, params.per_class, params.dim, params.spread,
                            params.data_seed, params.val_fraction)
    encs = synthetic_encoders(params)
    if params.train_encoder:
        ref = next(e for e in encs if e.id == params.train_encoder)
    else:
        ref = SyntheticEncoder.random("reference", params.dim, seed=999)
    table = build_accuracy_profile(encs, params.anchor_sizes, data, params.seeds, params.ridge, ref)
    profiles = [EncoderProfile(e.id, e.flops, e.dim) for e in encs]
    return ActionSpace.from_table(profiles, params.anchor_sizes, table)
