"""Scenario configuration: flat sectioned key-value (INI) or JSON documents
with validated fields and defaults matching the bundled baseline scenario."""

import configparser
import hashlib
import io
import json
import math
from dataclasses import dataclass, field, fields

from .antenna import AntennaPattern, upa_pattern
from .channel import LinkModel, ReferenceLink
from .geometry import AnnulusRegion, UserSet, grid_placement

__all__ = ["ScenarioConfig", "ConfigError", "parse_scenario", "GridSpec"]


class ConfigError(ValueError):
    """Configuration document failed validation; message names the key path."""


@dataclass(frozen=True)
class GridSpec:
    """Evenly spaced evaluation grid: start, stop, count."""
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ValueError("grid needs at least 2 points")
        if self.stop <= self.start:
            raise ValueError("grid stop must exceed start")

    @classmethod
    def parse(cls, raw):
        if isinstance(raw, GridSpec):
            return raw
        if isinstance(raw, (list, tuple)) and len(raw) == 3:
            return cls(float(raw[0]), float(raw[1]), int(raw[2]))
        parts = str(raw).split(":")
        if len(parts) != 3:
            raise ValueError(f"expected start:stop:count, got {raw!r}")
        return cls(float(parts[0]), float(parts[1]), int(parts[2]))

    def values(self):
        import numpy as np
        return np.linspace(self.start, self.stop, self.count)

    def __str__(self):
        return f"{self.start:g}:{self.stop:g}:{self.count}"


# (section, key) -> (default, converter)
_BOOL = {"true": True, "false": False, "1": True, "0": False,
         "yes": True, "no": False}


def _to_bool(v):
    if isinstance(v, bool):
        return v
    try:
        return _BOOL[str(v).strip().lower()]
    except KeyError:
        raise ValueError(f"expected a boolean, got {v!r}")


def _to_opt_int(v):
    return None if v in (None, "", "none") else int(v)


def _to_opt_float(v):
    return None if v in (None, "", "none") else float(v)


_SCHEMA = {
    "region": {
        "r_in_m": (0.3, float),
        "r_out_m": (2.1, float),
    },
    "users": {
        "k": (36, int),
        "grid_n": (None, _to_opt_int),
        "grid_spacing_m": (None, _to_opt_float),
        "w_m": (0.3, float),
        "orbital_d_m": (0.25, float),
    },
    "antennas": {
        "nt": (1, int),
        "nr": (1, int),
    },
    "link": {
        "m_l": (4, int),
        "m_n": (2, int),
        "alpha_l": (2.0, float),
        "alpha_n": (4.0, float),
        "sigma2_db": (-20.0, float),
        "p_t": (1.0, float),
        "r0_m": (0.3, float),
        "phi0_deg": (0.0, float),
        "psi0_deg": (0.0, float),
        "trivial_elevation": (False, _to_bool),
        "power_ratio": (1.0, float),
    },
    "analysis": {
        "beta_grid_db": ("-20:40:61", GridSpec.parse),
        "eta_grid": ("0:10:51", GridSpec.parse),
        "ergodic_beta_min_db": (-40.0, float),
        "ergodic_beta_max_db": (60.0, float),
        "ergodic_points": (2000, int),
        "trials": (100_000, int),
        "seed": (1, int),
        "level": ("a1", str),
    },
}

_LEVELS = ("a1", "a2", "a3", "a4", "fixed")


@dataclass
class ScenarioConfig:
    """Validated scenario: geometry, user population, antennas, link model,
    and analysis settings. Field names mirror the config document keys."""
    r_in_m: float = 0.3
    r_out_m: float = 2.1
    k: int = 36
    grid_n: int = None
    grid_spacing_m: float = None
    w_m: float = 0.3
    orbital_d_m: float = 0.25
    nt: int = 1
    nr: int = 1
    m_l: int = 4
    m_n: int = 2
    alpha_l: float = 2.0
    alpha_n: float = 4.0
    sigma2_db: float = -20.0
    p_t: float = 1.0
    r0_m: float = 0.3
    phi0_deg: float = 0.0
    psi0_deg: float = 0.0
    trivial_elevation: bool = False
    power_ratio: float = 1.0
    beta_grid_db: GridSpec = field(default_factory=lambda: GridSpec(-20.0, 40.0, 61))
    eta_grid: GridSpec = field(default_factory=lambda: GridSpec(0.0, 10.0, 51))
    ergodic_beta_min_db: float = -40.0
    ergodic_beta_max_db: float = 60.0
    ergodic_points: int = 2000
    trials: int = 100_000
    seed: int = 1
    level: str = "a1"

    def __post_init__(self):
        self.validate()

    def validate(self):
        def bad(key, msg):
            raise ConfigError(f"{key}: {msg}")

        if self.r_in_m <= 0 or self.r_out_m <= self.r_in_m:
            bad("region.r_in_m/r_out_m", "need 0 < r_in_m < r_out_m")
        if (self.grid_n is None) != (self.grid_spacing_m is None):
            bad("users.grid_n", "grid_n and grid_spacing_m must be set together")
        if self.grid_n is not None and self.grid_n < 1:
            bad("users.grid_n", "must be >= 1")
        if self.grid_spacing_m is not None and self.grid_spacing_m <= 0:
            bad("users.grid_spacing_m", "must be positive")
        if self.k < 0:
            bad("users.k", "must be non-negative")
        if self.w_m <= 0:
            bad("users.w_m", "must be positive")
        if self.orbital_d_m <= self.w_m / 2.0:
            bad("users.orbital_d_m", f"must exceed w_m/2 = {self.w_m / 2.0}")
        for key, n in (("antennas.nt", self.nt), ("antennas.nr", self.nr)):
            if n < 1:
                bad(key, "must be >= 1")
        for key, m in (("link.m_l", self.m_l), ("link.m_n", self.m_n)):
            if m < 1:
                bad(key, "must be a positive integer")
        if not (0.0 < self.alpha_l <= self.alpha_n):
            bad("link.alpha_l/alpha_n", "need alpha_n >= alpha_l > 0")
        if not (0.0 <= self.p_t <= 1.0):
            bad("link.p_t", f"must lie in [0, 1], got {self.p_t}")
        if self.r0_m <= 0:
            bad("link.r0_m", "must be positive")
        if self.power_ratio <= 0:
            bad("link.power_ratio", "must be positive")
        if self.ergodic_beta_min_db >= self.ergodic_beta_max_db:
            bad("analysis.ergodic_beta_min_db", "must be below ergodic_beta_max_db")
        if self.ergodic_points < 2:
            bad("analysis.ergodic_points", "must be >= 2")
        if self.trials < 1:
            bad("analysis.trials", "must be >= 1")
        if self.level not in _LEVELS:
            bad("analysis.level", f"must be one of {_LEVELS}, got {self.level!r}")

    # -- derived model objects ------------------------------------------------

    def region(self) -> AnnulusRegion:
        return AnnulusRegion(self.r_in_m, self.r_out_m)

    def link(self) -> LinkModel:
        return LinkModel(m_los=self.m_l, m_nlos=self.m_n,
                         alpha_los=self.alpha_l, alpha_nlos=self.alpha_n,
                         noise=10.0 ** (self.sigma2_db / 10.0),
                         p_t=self.p_t, power_ratio=self.power_ratio)

    def reference(self) -> ReferenceLink:
        return ReferenceLink.from_link(self.link(), self.r0_m,
                                       phi0=math.radians(self.phi0_deg),
                                       psi0=math.radians(self.psi0_deg))

    def tx_pattern(self) -> AntennaPattern:
        return upa_pattern(self.nt)

    def rx_pattern(self) -> AntennaPattern:
        return upa_pattern(self.nr)

    def fixed_users(self) -> UserSet:
        if self.grid_n is None:
            raise ConfigError("users.grid_n: fixed-grid placement requires "
                              "grid_n and grid_spacing_m")
        return grid_placement(self.grid_n, self.grid_spacing_m, self.region(),
                              blockage_diameter=self.w_m)

    def effective_k(self) -> int:
        if self.grid_n is not None:
            return self.fixed_users().k
        return self.k

    def interferer_density(self) -> float:
        return self.effective_k() / self.region().area()

    # -- serialization --------------------------------------------------------

    def to_dict(self) -> dict:
        out = {}
        for section, keys in _SCHEMA.items():
            out[section] = {}
            for key in keys:
                val = getattr(self, key)
                if isinstance(val, GridSpec):
                    val = str(val)
                out[section][key] = val
        return out

    def manifest(self) -> dict:
        from . import __version__
        return {
            "artifact": "mmwnet",
            "version": __version__,
            "config": self.to_dict(),
            "derived": {
                "k": self.effective_k(),
                "lambda_per_m2": self.interferer_density(),
                "area_m2": self.region().area(),
                "sigma2_linear": 10.0 ** (self.sigma2_db / 10.0),
            },
            "scenario_hash": self.hash(),
        }

    def hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def replace(self, **updates) -> "ScenarioConfig":
        current = {f.name: getattr(self, f.name) for f in fields(self)}
        current.update(updates)
        return ScenarioConfig(**current)


def _parse_ini(text: str) -> dict:
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config document: {exc}") from exc
    return {s: dict(parser.items(s)) for s in parser.sections()}


def parse_scenario(source) -> ScenarioConfig:
    """Build a validated ScenarioConfig from a path, file object, or text.

    Accepts a sectioned key=value document or a JSON object keyed by the
    same sections; an empty document yields the baseline defaults. Unknown
    sections or keys and out-of-range values are rejected with the failing
    key path in the message.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = str(source)
        if "\n" not in text and "=" not in text and "{" not in text:
            with open(text, "r", encoding="utf-8") as fh:
                text = fh.read()
    text = text.strip()
    if not text:
        raw = {}
    elif text.startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON config: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("JSON config must be an object of sections")
    else:
        raw = _parse_ini(text)

    values = {}
    for section, entries in raw.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section {section!r}")
        if not isinstance(entries, dict):
            raise ConfigError(f"section {section!r} must hold key/value pairs")
        for key, val in entries.items():
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}")
            _, conv = _SCHEMA[section][key]
            try:
                values[key] = conv(val)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{section}.{key}: {exc}") from exc
    if "k" in values and values.get("grid_n") is not None:
        raise ConfigError("users.k conflicts with users.grid_n; set one")
    try:
        return ScenarioConfig(**values)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def dump_example(fileobj=None) -> str:
    """Render the default configuration as an editable INI document."""
    cfg = ScenarioConfig()
    buf = io.StringIO()
    for section, keys in _SCHEMA.items():
        buf.write(f"[{section}]\n")
        for key in keys:
            val = getattr(cfg, key)
            if val is None:
                continue
            if isinstance(val, GridSpec):
                val = str(val)
            buf.write(f"{key} = {val}\n")
        buf.write("\n")
    text = buf.getvalue()
    if fileobj is not None:
        fileobj.write(text)
    return text
