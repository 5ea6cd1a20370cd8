"""TOML run configuration for the CLI."""

import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .errors import ConfigError
from .manifold import flat_torus, round_sphere
from .signals import (
    ball_signal,
    band_signal,
    constant_signal,
    grid_signal,
    half_space_signal,
    load_grid_csv,
)

DEFAULT_BUDGET_NODES = 10**7
DEFAULT_BUDGET_ATOMS = 10**4


@dataclass
class RunConfig:
    manifold: dict = field(default_factory=dict)
    window: dict = field(default_factory=dict)
    lattice: dict = field(default_factory=dict)
    signal: dict = field(default_factory=dict)
    probes: dict = field(default_factory=dict)
    detection: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    fock: dict = field(default_factory=dict)
    frame: dict = field(default_factory=dict)
    arm: dict = field(default_factory=dict)
    point: dict = field(default_factory=dict)
    budget: dict = field(default_factory=dict)
    threads: Optional[int] = None


_SECTIONS = (
    "manifold", "window", "lattice", "signal", "probes", "detection",
    "grid", "fock", "frame", "arm", "point", "budget",
)


def load_config(path):
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML in {path}: {exc}") from exc
    cfg = RunConfig()
    for key, value in data.items():
        if key == "threads":
            if not isinstance(value, int) or value < 1:
                raise ConfigError("threads must be a positive integer")
            cfg.threads = value
        elif key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"section [{key}] must be a table")
            setattr(cfg, key, value)
        else:
            raise ConfigError(f"unknown config key {key!r}")
    return cfg


def resolve_threads(cfg, cli_value=None):
    """CLI flag beats the config key, which beats the environment variable."""
    if cli_value is not None:
        return max(1, int(cli_value))
    if cfg.threads is not None:
        return cfg.threads
    env = os.environ.get("CONTACT_GABOR_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError("CONTACT_GABOR_THREADS must be an integer") from exc
    return 1


def build_manifold(cfg):
    spec = dict(cfg.manifold)
    kind = spec.get("kind", "flat-torus")
    if kind == "flat-torus":
        radii = spec.get("radii", [1.0, 1.0])
        try:
            return flat_torus(np.asarray(radii, dtype=float))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad torus radii {radii!r}") from exc
    if kind == "round-sphere":
        try:
            return round_sphere(float(spec.get("radius", 1.0)))
        except (TypeError, ValueError) as exc:
            raise ConfigError("bad sphere radius") from exc
    raise ConfigError(f"unknown manifold kind {kind!r}")


def build_window_matrix(cfg, dim):
    spec = dict(cfg.window)
    if "a_matrix" in spec:
        a = np.asarray(spec["a_matrix"], dtype=float)
        if a.shape != (dim, dim):
            raise ConfigError(f"a_matrix must be {dim}x{dim}")
        return a
    try:
        scalar = float(spec.get("a", np.pi))
    except (TypeError, ValueError) as exc:
        raise ConfigError("window scale a must be a number") from exc
    return scalar * np.eye(dim)


def build_signal(cfg, chart):
    spec = dict(cfg.signal)
    kind = spec.get("kind", "constant")
    try:
        if kind == "constant":
            return constant_signal(float(spec.get("value", 1.0)))
        if kind == "half-space":
            return half_space_signal(
                chart, int(spec.get("axis", 0)), float(spec["threshold"])
            )
        if kind == "ball":
            return ball_signal(
                chart, np.asarray(spec["center"], dtype=float), float(spec["radius"])
            )
        if kind == "band":
            return band_signal(
                chart,
                np.asarray(spec["coeffs"], dtype=float),
                float(spec["width"]),
                complement=bool(spec.get("complement", False)),
            )
        if kind == "grid":
            return grid_signal(chart, load_grid_csv(spec["path"]))
    except KeyError as exc:
        raise ConfigError(f"signal kind {kind!r} is missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad signal spec: {exc}") from exc
    raise ConfigError(f"unknown signal kind {kind!r}")


def probe_points(cfg, dim):
    spec = dict(cfg.probes)
    pts = spec.get("points", [])
    arr = np.atleast_2d(np.asarray(pts, dtype=float)) if len(pts) else np.zeros((0, dim))
    if arr.size and arr.shape[1] != dim:
        raise ConfigError(f"probe points must have {dim} coordinates")
    return arr


def budget_caps(cfg):
    spec = dict(cfg.budget)
    nodes = int(spec.get("max_nodes", DEFAULT_BUDGET_NODES))
    atoms = int(spec.get("max_atoms", DEFAULT_BUDGET_ATOMS))
    return nodes, atoms
