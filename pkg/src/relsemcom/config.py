"""Experiment configuration: one INI-style file, one section per subsystem.

Every key has a default, so an empty file is a valid configuration. Unknown
sections and keys are rejected to catch typos.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .channel import ChannelParams
from .controller import ControlParams
from .simulator import SweepGrid
from .system_model import ActionSpace, PhysParams


class ConfigError(ValueError):
    """Invalid configuration or profile file."""


@dataclass(frozen=True)
class EncoderSpec:
    """A synthetic encoder for profile building: cost, noise level, output scale."""

    id: str
    flops: float
    noise_sigma: float = 0.0
    scale: float = 1.0

    @classmethod
    def parse(cls, text: str) -> "EncoderSpec":
        parts = [p.strip() for p in text.split(":")]
        if not 2 <= len(parts) <= 4 or not parts[0]:
            raise ValueError(f"encoder spec {text!r} is not id:flops[:noise_sigma[:scale]]")
        return cls(parts[0], *(float(p) for p in parts[1:]))

    def format(self) -> str:
        return f"{self.id}:{self.flops!r}:{self.noise_sigma!r}:{self.scale!r}"


# The three CNN encoders of the reference model table (FLOPs per image), with
# synthetic noise levels decreasing with model size.
DEFAULT_ENCODERS = (
    EncoderSpec("mobilenetv3_small_100", 111.98e6, 0.16),
    EncoderSpec("mobilenetv3_large_100", 435.36e6, 0.10),
    EncoderSpec("rexnet_100", 799.28e6, 0.05),
)


@dataclass(frozen=True)
class StitchingParams:
    num_classes: int = 10
    per_class: int = 100
    dim: int = 64
    spread: float = 0.2
    val_fraction: float = 0.5
    data_seed: int = 0
    anchor_sizes: tuple[int, ...] = (10, 25, 50, 100)
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    ridge: float = 1e-2
    encoders: tuple[EncoderSpec, ...] = DEFAULT_ENCODERS
    # decoders are trained through this encoder; empty means a noise-free
    # reference encoder that is not itself part of the action space
    train_encoder: str = ""

    def __post_init__(self):
        if not self.encoders:
            raise ValueError("at least one encoder is required")
        if not self.anchor_sizes or min(self.anchor_sizes) < 1:
            raise ValueError("anchor_sizes must be positive")
        ids = [e.id for e in self.encoders]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate encoder id")
        if self.train_encoder and self.train_encoder not in ids:
            raise ValueError(f"train_encoder {self.train_encoder!r} is not among the encoders")


@dataclass(frozen=True)
class SimConfig:
    physical: PhysParams = field(default_factory=PhysParams)
    channel: ChannelParams = field(default_factory=ChannelParams)
    control: ControlParams = field(default_factory=ControlParams)
    horizon: int = 10_000
    seed: int = 0
    # "table": G_t is the profiled accuracy; "bernoulli": a per-slot 0/1 draw with that mean
    accuracy_mode: str = "table"
    L_ist_offset: float = 7.5e-3  # s, threshold above L_bar used by sweeps
    sweep: SweepGrid = field(default_factory=SweepGrid)
    stitching: StitchingParams = field(default_factory=StitchingParams)
    profile: str = ""

    def __post_init__(self):
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")
        if self.accuracy_mode not in ("table", "bernoulli"):
            raise ValueError("accuracy_mode must be 'table' or 'bernoulli'")
        if self.L_ist_offset < 0:
            raise ValueError("L_ist_offset must be >= 0")
        if self.channel.f_cap_low < self.physical.f_min:
            raise ValueError("channel f_cap_low must be >= physical f_min")
        if self.channel.f_cap_high > self.physical.f_max_cap:
            raise ValueError("channel f_cap_high must be <= physical f_max_cap")

    def channel_params(self) -> ChannelParams:
        return replace(self.channel, seed=self.seed)

    def validate_against(self, space: ActionSpace) -> None:
        if not space.encoders or not space.anchor_options:
            raise ConfigError("empty action space")


# --- parsing ---

_SECTIONS = {
    "physical": PhysParams,
    "channel": ChannelParams,
    "control": ControlParams,
    "sweep": SweepGrid,
    "stitching": StitchingParams,
}
_SIMULATION_KEYS = ("horizon", "seed", "accuracy_mode", "L_ist_offset", "profile")
_IGNORED = {"channel": {"seed"}}  # the run seed lives in [simulation]


def _convert(tp, raw: str):
    raw = raw.strip()
    if tp in ("float", float):
        return float(raw)
    if tp in ("int", int):
        return int(raw)
    if tp in ("bool", bool):
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if tp in ("str", str):
        return raw
    if tp == "tuple[float, ...]":
        return tuple(float(v) for v in raw.split(",") if v.strip())
    if tp == "tuple[int, ...]":
        return tuple(int(v) for v in raw.split(",") if v.strip())
    if tp == "tuple[EncoderSpec, ...]":
        return tuple(EncoderSpec.parse(v) for v in raw.split(",") if v.strip())
    raise TypeError(f"unsupported config field type {tp!r}")


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(v.format() if isinstance(v, EncoderSpec) else _format(v) for v in value)
    return str(value)


def _section_kwargs(parser, section: str, cls) -> dict:
    known = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, raw in parser.items(section):
        if key in _IGNORED.get(section, ()):
            raise ConfigError(f"[{section}] {key}: set the run seed in [simulation] instead")
        if key not in known:
            raise ConfigError(f"[{section}] unknown key {key!r}")
        try:
            kwargs[key] = _convert(known[key].type, raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[{section}] {key}: {exc}") from exc
    return kwargs


def _parse_error_message(exc: configparser.Error, source: str) -> str:
    if isinstance(exc, configparser.MissingSectionHeaderError):
        return f"{source}:{exc.lineno}: parse error: key outside any [section]"
    if isinstance(exc, configparser.ParsingError) and exc.errors:
        lineno, line = exc.errors[0]
        return f"{source}:{lineno}: parse error: cannot parse {line}"
    if isinstance(exc, configparser.DuplicateOptionError):
        return f"{source}:{exc.lineno}: parse error: duplicate key {exc.option!r} in [{exc.section}]"
    if isinstance(exc, configparser.DuplicateSectionError):
        return f"{source}:{exc.lineno}: parse error: duplicate section [{exc.section}]"
    return f"{source}: parse error: {exc}"


def parse_config(text: str, source: str = "<string>") -> SimConfig:
    parser = configparser.ConfigParser(interpolation=None, default_section="__defaults__")
    parser.optionxform = str  # keys are case-sensitive (L_bar, N0, ...)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(_parse_error_message(exc, source)) from exc
    unknown = set(parser.sections()) - set(_SECTIONS) - {"simulation"}
    if unknown:
        raise ConfigError(f"unknown section(s): {sorted(unknown)}")

    parts = {}
    try:
        for name, cls in _SECTIONS.items():
            kw = _section_kwargs(parser, name, cls) if parser.has_section(name) else {}
            if name == "control" and "L_ist" not in kw:
                kw["_derive_L_ist"] = True
            parts[name] = kw
        sim_kw = {}
        if parser.has_section("simulation"):
            types = {f.name: f.type for f in fields(SimConfig)}
            for key, raw in parser.items("simulation"):
                if key not in _SIMULATION_KEYS:
                    raise ConfigError(f"[simulation] unknown key {key!r}")
                try:
                    sim_kw[key] = _convert(types[key], raw)
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"[simulation] {key}: {exc}") from exc

        offset = sim_kw.get("L_ist_offset", SimConfig.L_ist_offset)
        ctrl_kw = parts["control"]
        if ctrl_kw.pop("_derive_L_ist", False):
            ctrl_kw["L_ist"] = ctrl_kw.get("L_bar", ControlParams.L_bar) + offset
        return SimConfig(
            physical=PhysParams(**parts["physical"]),
            channel=ChannelParams(**parts["channel"]),
            control=ControlParams(**ctrl_kw),
            sweep=SweepGrid(**parts["sweep"]),
            stitching=StitchingParams(**parts["stitching"]),
            **sim_kw,
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc


def load_config(path) -> SimConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        return parse_config(text, source=str(path))
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def dump_config(cfg: SimConfig) -> str:
    """Serialise every field explicitly; ``parse_config(dump_config(c)) == c``."""
    lines = ["[simulation]"]
    for key in _SIMULATION_KEYS:
        lines.append(f"{key} = {_format(getattr(cfg, key))}")
    for name in _SECTIONS:
        obj = getattr(cfg, name)
        lines.append("")
        lines.append(f"[{name}]")
        for f in fields(obj):
            if f.name in _IGNORED.get(name, ()):
                continue
            lines.append(f"{f.name} = {_format(getattr(obj, f.name))}")
    return "\n".join(lines) + "\n"


def with_overrides(cfg: SimConfig, **overrides) -> SimConfig:
    """Apply command-line overrides (``None`` means not given)."""
    given = {k: v for k, v in overrides.items() if v is not None}
    return dataclasses.replace(cfg, **given) if given else cfg
