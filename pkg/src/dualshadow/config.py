"""Flat key-value config file with per-module validated defaults."""

from dataclasses import dataclass, fields

from .fusion import DEFAULT_G0, DEFAULT_S


@dataclass
class Config:
    edge_sigma: float = 2.0
    brightest_fraction: float = 0.01
    classifier_g0: float = DEFAULT_G0
    classifier_s: float = DEFAULT_S
    synth_size: int = 128
    synth_vertices: int = 6
    synth_attenuation: float = 0.55
    synth_penumbra: float = 0.0
    output_dir: str = "."

    def __post_init__(self):
        if self.edge_sigma <= 0:
            raise ValueError("edge_sigma must be positive")
        if not 0.0 < self.brightest_fraction <= 1.0:
            raise ValueError("brightest_fraction must lie in (0, 1]")
        if self.classifier_s <= 0:
            raise ValueError("classifier_s must be positive")
        if self.synth_size < 8:
            raise ValueError("synth_size must be at least 8")
        if self.synth_vertices < 3:
            raise ValueError("synth_vertices must be at least 3")
        if not 0.0 < self.synth_attenuation < 1.0:
            raise ValueError("synth_attenuation must lie in (0, 1)")
        if self.synth_penumbra < 0:
            raise ValueError("synth_penumbra must be non-negative")


def load_config(path):
    """Parse `key = value` lines; unknown keys or bad values raise ValueError."""
    types = {f.name: f.type for f in fields(Config)}
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}: line {lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key = key.strip()
            val = val.strip()
            if key not in types:
                raise ValueError(f"{path}: line {lineno}: unknown key {key!r}")
            try:
                values[key] = types[key](val)
            except ValueError:
                raise ValueError(
                    f"{path}: line {lineno}: cannot parse {val!r} as "
                    f"{types[key].__name__}") from None
    return Config(**values)
