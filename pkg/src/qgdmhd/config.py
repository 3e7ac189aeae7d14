"""Run configuration: strict sectioned key=value files.

Unknown sections or keys are rejected.  Scenario presets provide
defaults; file values override presets; --override flags override both.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field

import numpy as np

from .eos import make_eos
from .errors import ConfigurationError
from .grid import Grid
from .regularization import CoefficientLaw, RegParams
from .scenarios import auto_tau0, initial_state, scenario_defaults
from .system import Sources

_SCHEMA = {
    "scenario": {"name", "seed"},
    "grid": {"d", "n", "extent", "boundary", "stencil_order"},
    "eos": {"type", "R", "c_v", "s0"},
    "regularization": {"tau_mode", "tau0", "alpha", "mu", "lam", "kappa"},
    "sources": {"F", "Q"},
    "time": {"t_end", "cfl", "scheme", "max_steps"},
    "output": {"directory", "snapshot_every", "audit_every", "residuals"},
}

_GLOBAL_DEFAULTS = {
    "scenario": {"name": "uniform", "seed": "0"},
    "eos": {"type": "ideal", "R": "1.0", "c_v": "1.5", "s0": "0.0"},
    "grid": {"stencil_order": "2"},
    "regularization": {"tau_mode": "constant", "tau0": "0.0", "alpha": "0.5",
                       "mu": "constant:0.0", "lam": "constant:0.0",
                       "kappa": "constant:0.0"},
    "sources": {"F": "none", "Q": "none"},
    "time": {"t_end": "0.1", "cfl": "0.4", "scheme": "rk2", "max_steps": "1000000"},
    "output": {"directory": "out", "snapshot_every": "0", "audit_every": "10",
               "residuals": "false"},
}


@dataclass
class RunConfig:
    """Validated configuration as nested {section: {key: str}}."""

    values: dict = field(default_factory=dict)

    def get(self, section, key):
        return self.values[section][key]

    def getfloat(self, section, key):
        try:
            return float(self.get(section, key))
        except ValueError:
            raise ConfigurationError(
                f"[{section}] {key} must be a number, got {self.get(section, key)!r}"
            ) from None

    def getint(self, section, key):
        try:
            return int(self.get(section, key))
        except ValueError:
            raise ConfigurationError(
                f"[{section}] {key} must be an integer, got {self.get(section, key)!r}"
            ) from None

    def getbool(self, section, key):
        raw = self.get(section, key).strip().lower()
        if raw in ("true", "yes", "1"):
            return True
        if raw in ("false", "no", "0"):
            return False
        raise ConfigurationError(f"[{section}] {key} must be a boolean, got {raw!r}")

    def dump(self) -> str:
        lines = []
        for section in _SCHEMA:
            lines.append(f"[{section}]")
            for key, value in sorted(self.values.get(section, {}).items()):
                lines.append(f"{key} = {value}")
            lines.append("")
        return "\n".join(lines)


def _merge(base: dict, extra: dict):
    for section, kv in extra.items():
        base.setdefault(section, {}).update(kv)


def _validate(values: dict):
    for section, kv in values.items():
        if section not in _SCHEMA:
            raise ConfigurationError(f"unknown config section [{section}]")
        for key in kv:
            if key not in _SCHEMA[section]:
                raise ConfigurationError(f"unknown key '{key}' in section [{section}]")


def load_config(path, overrides=()) -> RunConfig:
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keys are case-sensitive
    read = parser.read(path)
    if not read:
        raise ConfigurationError(f"cannot read config file {path}")
    file_values = {s: dict(parser.items(s)) for s in parser.sections()}
    _validate(file_values)

    scenario = file_values.get("scenario", {}).get("name", "uniform")
    values = {s: dict(kv) for s, kv in _GLOBAL_DEFAULTS.items()}
    _merge(values, scenario_defaults(scenario))
    _merge(values, file_values)

    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigurationError(
                f"override must look like section.key=value, got {item!r}"
            )
        target, value = item.split("=", 1)
        section, key = target.split(".", 1)
        _merge(values, {section: {key: value}})

    _validate(values)
    return RunConfig(values=values)


def _parse_tuple(raw, n, cast, what):
    parts = [p.strip() for p in str(raw).split(",")]
    if len(parts) == 1:
        parts = parts * n
    if len(parts) != n:
        raise ConfigurationError(f"{what} needs 1 or {n} comma-separated values, got {raw!r}")
    try:
        return tuple(cast(p) for p in parts)
    except ValueError:
        raise ConfigurationError(f"cannot parse {what} from {raw!r}") from None


def build_grid(cfg: RunConfig) -> Grid:
    d = cfg.getint("grid", "d")
    if d not in (1, 2):
        raise ConfigurationError(f"grid d must be 1 or 2, got {d}")
    shape = _parse_tuple(cfg.get("grid", "n"), d, int, "[grid] n")
    extent = _parse_tuple(cfg.get("grid", "extent"), d, float, "[grid] extent")
    boundary = _parse_tuple(cfg.get("grid", "boundary"), d, str, "[grid] boundary")
    return Grid(shape=shape, extent=extent, boundary=boundary,
                stencil_order=cfg.getint("grid", "stencil_order"))


def build_eos(cfg: RunConfig):
    kind = cfg.get("eos", "type")
    if kind != "ideal":
        raise ConfigurationError(f"unsupported EOS type {kind!r}")
    return make_eos("ideal", R=cfg.getfloat("eos", "R"),
                    c_v=cfg.getfloat("eos", "c_v"), s0=cfg.getfloat("eos", "s0"))


def _parse_coefficient(raw, what) -> CoefficientLaw:
    raw = str(raw).strip()
    if ":" in raw:
        kind, value = raw.split(":", 1)
    else:
        kind, value = "constant", raw
    try:
        return CoefficientLaw(kind.strip(), float(value))
    except ValueError:
        raise ConfigurationError(f"cannot parse coefficient {what} from {raw!r}") from None


def build_params(cfg: RunConfig, initial=None, eos=None) -> RegParams:
    tau0_raw = cfg.get("regularization", "tau0").strip().lower()
    alpha = cfg.getfloat("regularization", "alpha")
    if tau0_raw == "auto":
        if initial is None or eos is None:
            raise ConfigurationError("tau0 = auto needs an initial state")
        tau0 = auto_tau0(initial, eos, alpha)
    else:
        tau0 = cfg.getfloat("regularization", "tau0")
    return RegParams(
        tau_mode=cfg.get("regularization", "tau_mode"),
        tau0=tau0,
        alpha=alpha,
        mu=_parse_coefficient(cfg.get("regularization", "mu"), "mu"),
        lam=_parse_coefficient(cfg.get("regularization", "lam"), "lam"),
        kappa=_parse_coefficient(cfg.get("regularization", "kappa"), "kappa"),
    )


def build_sources(cfg: RunConfig) -> Sources:
    def parse(which, vector):
        raw = cfg.get("sources", which).strip()
        if raw.lower() == "none":
            return None
        if not raw.startswith("constant:"):
            raise ConfigurationError(f"[sources] {which} must be 'none' or 'constant:...'")
        body = raw[len("constant:"):]
        if vector:
            vals = _parse_tuple(body, 3, float, f"[sources] {which}")
            return lambda x, t: np.broadcast_to(
                np.asarray(vals)[(slice(None),) + (None,) * (x.ndim - 1)], x.shape
            )
        val = float(body)
        if val < 0.0 and which == "Q":
            raise ConfigurationError(f"[sources] Q must be >= 0, got {val}")
        return lambda x, t: np.full(x.shape[1:], val)

    return Sources(F=parse("F", vector=True), Q=parse("Q", vector=False))


def build_all(cfg: RunConfig):
    """(grid, eos, params, sources, initial state, scenario name)."""
    grid = build_grid(cfg)
    eos = build_eos(cfg)
    name = cfg.get("scenario", "name")
    seed = cfg.getint("scenario", "seed")
    state = initial_state(name, grid, eos, seed=seed)
    params = build_params(cfg, initial=state, eos=eos)
    sources = build_sources(cfg)
    return grid, eos, params, sources, state, name
