"""Simulation config: a flat ``key = value`` text document.

Lines are ``key = value``; ``#`` starts a comment. Lists are comma
separated. Unknown keys are rejected so a typo never silently falls back to
a default. ``numerology`` is either one subcarrier spacing in Hz (all
``num_rbs`` RBs share it) or ``spacing:count`` parts, e.g.
``15000:60, 60000:40`` for 60 RBs of 180 kHz followed by 40 of 720 kHz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

from nrsched.channel import (
    ALLOWED_SPACINGS_HZ,
    ChannelModel,
    Numerology,
    ResourceGrid,
    build_mixed_grid,
)
from nrsched.hnn import TIE_LOWEST, TIE_RANDOM

SOLVERS = ("hnn", "greedy", "exhaustive")
TIE_RULES = (TIE_LOWEST, TIE_RANDOM)


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid config:\n" + "\n".join(f"  - {p}" for p in self.problems))


@dataclass(frozen=True)
class SimulationConfig:
    num_ues: int = 10
    num_rbs: int = 100
    numerology: tuple[tuple[float, int], ...] = ((15e3, 100),)
    subcarriers_per_rb: int = 12
    total_bandwidth_hz: float = 18e6
    cell_radius_m: float = 250.0
    pathloss_exponent: float = 3.0
    ref_distance_m: float = 1.0
    min_distance_m: float = 10.0
    tx_power_w: float = 1.0
    # 30 dB at 25 m (a tenth of the default radius) with 1 W and no fading
    noise_power_w: float = 3.5555555555555554e-15
    ewma_epsilon: float = 0.9
    gpf_alpha: tuple[float, ...] = (0.2, 1.0)
    num_slots: int = 1000
    warmup_fraction: float = 0.1
    seed: tuple[int, ...] = tuple(range(10))
    tie_rule: str = TIE_LOWEST
    solver: str = "hnn"
    average_floor_bps: float = 1.0
    max_sweeps: int = 10
    static_channel: bool = False

    @property
    def seeds(self) -> tuple[int, ...]:
        return self.seed

    @property
    def alphas(self) -> tuple[float, ...]:
        return self.gpf_alpha

    @property
    def warmup_slots(self) -> int:
        return int(math.floor(self.warmup_fraction * self.num_slots))

    def grid(self) -> ResourceGrid:
        parts = [(Numerology(s, self.subcarriers_per_rb), n) for s, n in self.numerology]
        return build_mixed_grid(parts, self.total_bandwidth_hz)

    def channel_model(self) -> ChannelModel:
        return ChannelModel(
            total_bandwidth_hz=self.total_bandwidth_hz,
            noise_power_w=self.noise_power_w,
            pathloss_exponent=self.pathloss_exponent,
            ref_distance_m=self.ref_distance_m,
            static=self.static_channel,
        )

    def problems(self) -> list[str]:
        """Every validation failure, not just the first."""
        out = []
        positive = (
            "num_ues", "num_rbs", "subcarriers_per_rb", "total_bandwidth_hz", "cell_radius_m",
            "ref_distance_m", "tx_power_w", "noise_power_w", "num_slots",
            "average_floor_bps", "max_sweeps",
        )
        for name in positive:
            if not getattr(self, name) > 0:
                out.append(f"{name} must be positive (got {getattr(self, name)!r})")
        if not self.pathloss_exponent > 0:
            out.append("pathloss_exponent must be positive")
        if not 0 <= self.min_distance_m < self.cell_radius_m:
            out.append("min_distance_m must satisfy 0 <= min_distance_m < cell_radius_m")
        if not 0.0 <= self.ewma_epsilon <= 1.0:
            out.append(f"ewma_epsilon must lie in [0, 1] (got {self.ewma_epsilon!r})")
        if not 0.0 <= self.warmup_fraction < 1.0:
            out.append(f"warmup_fraction must lie in [0, 1) (got {self.warmup_fraction!r})")
        if not self.gpf_alpha:
            out.append("gpf_alpha needs at least one value")
        out.extend(f"gpf_alpha values must be >= 0 (got {a!r})" for a in self.gpf_alpha if a < 0)
        if len(set(self.gpf_alpha)) != len(self.gpf_alpha):
            out.append("gpf_alpha values must be distinct")
        if not self.seed:
            out.append("seed needs at least one value")
        out.extend(f"seeds must be >= 0 (got {s!r})" for s in self.seed if s < 0)
        if len(set(self.seed)) != len(self.seed):
            out.append("seed values must be distinct")
        if self.tie_rule not in TIE_RULES:
            out.append(f"tie_rule must be one of {TIE_RULES} (got {self.tie_rule!r})")
        if self.solver not in SOLVERS:
            out.append(f"solver must be one of {SOLVERS} (got {self.solver!r})")
        for spacing, count in self.numerology:
            if spacing not in ALLOWED_SPACINGS_HZ:
                out.append(f"numerology spacing {spacing:g} Hz not allowed")
            if count < 1:
                out.append(f"numerology part {spacing:g} Hz needs a positive RB count")
        if sum(c for _, c in self.numerology) != self.num_rbs:
            out.append(
                f"numerology covers {sum(c for _, c in self.numerology)} RBs but num_rbs={self.num_rbs}"
            )
        used = sum(s * self.subcarriers_per_rb * c for s, c in self.numerology)
        if self.total_bandwidth_hz > 0 and used > self.total_bandwidth_hz * (1 + 1e-12):
            out.append(
                f"RBs need {used:g} Hz but total_bandwidth_hz is {self.total_bandwidth_hz:g}"
            )
        return out

    def validate(self) -> "SimulationConfig":
        problems = self.problems()
        if problems:
            raise ConfigError(problems)
        return self

    def with_overrides(self, **overrides) -> "SimulationConfig":
        given = {k: v for k, v in overrides.items() if v is not None}
        if "num_rbs" in given and "numerology" not in given and len(self.numerology) == 1:
            given["numerology"] = ((self.numerology[0][0], given["num_rbs"]),)
        return replace(self, **given)

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            lines.append(f"{f.name} = {_format_value(f.name, getattr(self, f.name))}")
        return "\n".join(lines) + "\n"


KEYS = tuple(f.name for f in fields(SimulationConfig))
_INT_KEYS = {"num_ues", "num_rbs", "subcarriers_per_rb", "num_slots", "max_sweeps"}
_FLOAT_KEYS = {
    "total_bandwidth_hz", "cell_radius_m", "pathloss_exponent", "ref_distance_m",
    "min_distance_m", "tx_power_w", "noise_power_w", "ewma_epsilon", "warmup_fraction",
    "average_floor_bps",
}
_BOOL_WORDS = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _format_value(name: str, value) -> str:
    if name == "numerology":
        return ", ".join(f"{s:g}:{c}" for s, c in value)
    if isinstance(value, tuple):
        return ", ".join(repr(v) for v in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(value) if isinstance(value, float) else str(value)


def parse_int(text: str) -> int:
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"{text!r} is not an integer")
    return int(value)


def parse_list(text: str, conv) -> tuple:
    items = [t.strip() for t in text.split(",") if t.strip()]
    return tuple(conv(t) for t in items)


def parse_numerology(text: str) -> tuple[tuple[float, int], ...] | float:
    """Single spacing returns a float; ``spacing:count`` parts return pairs."""
    if ":" not in text:
        return float(text)
    parts = []
    for item in text.split(","):
        spacing, _, count = item.partition(":")
        parts.append((float(spacing), parse_int(count)))
    return tuple(parts)


def parse_config_text(text: str, source: str = "<config>") -> SimulationConfig:
    raw: dict[str, str] = {}
    problems = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            problems.append(f"{source}:{lineno}: expected 'key = value'")
        elif key not in KEYS:
            problems.append(f"{source}:{lineno}: unknown key {key!r}")
        elif key in raw:
            problems.append(f"{source}:{lineno}: duplicate key {key!r}")
        else:
            raw[key] = value

    values = {}
    for key, value in raw.items():
        try:
            if key in _INT_KEYS:
                values[key] = parse_int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key == "gpf_alpha":
                values[key] = parse_list(value, float)
            elif key == "seed":
                values[key] = parse_list(value, parse_int)
            elif key == "static_channel":
                values[key] = _BOOL_WORDS[value.lower()]
            elif key == "numerology":
                values[key] = parse_numerology(value)
            else:
                values[key] = value
        except (ValueError, KeyError):
            problems.append(f"{source}: bad value for {key}: {value!r}")

    numerology = values.get("numerology")
    if isinstance(numerology, float):
        values["numerology"] = ((numerology, values.get("num_rbs", SimulationConfig.num_rbs)),)
    elif numerology is None and "num_rbs" in values:
        spacing = SimulationConfig.numerology[0][0]
        values["numerology"] = ((spacing, values["num_rbs"]),)

    if problems:
        # still report semantic problems of the keys that did parse
        try:
            problems.extend(SimulationConfig(**values).problems())
        except TypeError:
            pass
        raise ConfigError(problems)
    return SimulationConfig(**values).validate()


def load_config(path: str | Path) -> SimulationConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError([f"cannot read {path}: {exc.strerror}"]) from exc
    return parse_config_text(text, str(path))
