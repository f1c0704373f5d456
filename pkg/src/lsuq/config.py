"""Run configuration: plain-text key = value files with per-module sections.

Unknown sections or keys are rejected so that typos never silently fall back
to defaults; every run echoes the fully resolved configuration next to its
outputs.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields

import numpy as np

from . import forward_uq, geometry, potential, qmc
from .errors import ConfigError

RULE_TOKENS = ("mc", "lattice", "lattice_tent", "ipl2", "ipl3")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration for every CLI run."""

    # [run]
    label: str = "run"
    output_dir: str = "."
    # [geometry]
    zeta: float = 3.0
    theta: float = 0.25
    s: int = 100
    kappa_frame: str = "material"
    radius_floor: float = 0.0  # > 0 clamps the radius (large-deformation guard)
    # [mesh]
    mesh_level: int = 2
    # [solver]
    solver: str = "direct"
    iter_tol: float = 1e-10
    quad_order: int = 2
    near_threshold: float = 0.05
    duffy_points: int = 0  # 0 = rule default
    # [observation]
    obs_count: int = 10
    obs_radius: float = 2.0
    obs_phase: float = 0.0
    # [forward]
    N_list: tuple[int, ...] = (8, 16, 32, 64, 128, 256, 512)
    N_ref: int = 2048
    rules: tuple[str, ...] = ("lattice_tent",)
    error_norm: str = "max"
    shifts: int = 4
    shift_seed: int = 0
    timing: bool = False
    # [bayes]
    sigma: float = 0.1
    noise_seed: int = 0
    ystar: tuple[float, ...] = ()  # empty = documented default
    angles: int = 256
    N: int = 512

    def __post_init__(self):
        if self.s < 2 or self.s % 2 != 0:
            raise ConfigError("s must be a positive even integer (sin/cos pairs)")
        for token in self.rules:
            if token not in RULE_TOKENS:
                raise ConfigError(
                    f"unknown rule {token!r}; choose from {', '.join(RULE_TOKENS)}"
                )
        if self.solver not in ("direct", "iterative"):
            raise ConfigError("solver must be 'direct' or 'iterative'")
        if self.kappa_frame not in ("material", "spatial"):
            raise ConfigError("kappa_frame must be 'material' or 'spatial'")
        if self.error_norm not in ("max", "l2"):
            raise ConfigError("error_norm must be 'max' or 'l2'")


_SECTIONS = {
    "run": ("label", "output_dir"),
    "geometry": ("zeta", "theta", "s", "kappa_frame", "radius_floor"),
    "mesh": ("mesh_level",),
    "solver": ("solver", "iter_tol", "quad_order", "near_threshold", "duffy_points"),
    "observation": ("obs_count", "obs_radius", "obs_phase"),
    "forward": ("N_list", "N_ref", "rules", "error_norm", "shifts", "shift_seed",
                "timing"),
    "bayes": ("sigma", "noise_seed", "ystar", "angles", "N"),
}


def _parse_value(key: str, raw: str, target_type, target_default):
    raw = raw.strip()
    try:
        if isinstance(target_default, bool):
            if raw.lower() not in ("true", "false", "0", "1", "yes", "no"):
                raise ValueError(raw)
            return raw.lower() in ("true", "1", "yes")
        if isinstance(target_default, int):
            return int(raw)
        if isinstance(target_default, float):
            return float(raw)
        if isinstance(target_default, tuple):
            if not raw:
                return ()
            items = [tok.strip() for tok in raw.split(",")]
            if target_default and isinstance(target_default[0], str) or key == "rules":
                return tuple(items)
            if key == "ystar":
                return tuple(float(tok) for tok in items)
            return tuple(int(tok) for tok in items)
        return raw
    except ValueError as exc:
        raise ConfigError(f"cannot parse value for {key!r}: {raw!r}") from exc


def load_config(path) -> RunConfig:
    """Parse the key = value file, rejecting unknown sections and keys."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keys are case-sensitive (N_list vs n_list)
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    defaults = {f.name: f.default for f in fields(RunConfig)}
    values = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SECTIONS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            values[key] = _parse_value(key, raw, None, defaults[key])
    return RunConfig(**values)


def echo_config(cfg: RunConfig, path) -> None:
    """Write the fully resolved configuration (defaults included) verbatim."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    for section, keys in _SECTIONS.items():
        parser[section] = {}
        for key in keys:
            value = getattr(cfg, key)
            if isinstance(value, tuple):
                value = ",".join(str(v) for v in value)
            parser[section][key] = str(value)
    with open(path, "w") as fh:
        parser.write(fh)


def solver_context(cfg: RunConfig) -> forward_uq.SolverContext:
    model = geometry.RadiusModel(
        theta=cfg.theta, zeta=cfg.zeta, modes=cfg.s // 2,
        clamp_floor=cfg.radius_floor if cfg.radius_floor > 0.0 else None,
    )
    setup = potential.ObservationSetup.ring(
        1.0, count=cfg.obs_count, radius=cfg.obs_radius, phase=cfg.obs_phase
    )
    return forward_uq.SolverContext(
        model=model,
        level=cfg.mesh_level,
        setup=setup,
        quad_order=cfg.quad_order,
        near_threshold=cfg.near_threshold,
        duffy_points=cfg.duffy_points if cfg.duffy_points > 0 else None,
        kappa_frame=cfg.kappa_frame,
        solver_method=cfg.solver,
        iter_tol=cfg.iter_tol,
    )


def rule_specs(cfg: RunConfig) -> tuple[forward_uq.RuleSpec, ...]:
    table = {
        "mc": dict(kind=qmc.KIND_MC),
        "lattice": dict(kind=qmc.KIND_RLR),
        "lattice_tent": dict(kind=qmc.KIND_RLR, use_tent=True),
        "ipl2": dict(kind=qmc.KIND_IPL, alpha=2),
        "ipl3": dict(kind=qmc.KIND_IPL, alpha=3),
    }
    return tuple(
        forward_uq.RuleSpec(
            shift_count=cfg.shifts, shift_seed=cfg.shift_seed, **table[token]
        )
        for token in cfg.rules
    )


def ground_truth(cfg: RunConfig) -> np.ndarray:
    from . import bayes

    if not cfg.ystar:
        return bayes.default_ground_truth(cfg.s)
    y = np.zeros(cfg.s)
    if len(cfg.ystar) > cfg.s:
        raise ConfigError("ystar has more entries than the parameter dimension s")
    y[: len(cfg.ystar)] = cfg.ystar
    return y
