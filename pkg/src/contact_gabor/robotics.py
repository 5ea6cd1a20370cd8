"""Planar-arm configuration tori and constraint-boundary mapping.

A planar arm with full-rotation joints (self-intersection allowed) has the
flat n-torus as configuration space. Constraints are probability densities
on it; the boundary pipeline sweeps probe points and reports the detected
unoriented normal of the constraint wall at each probe.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .gabor import detect_boundary_normal
from .manifold import flat_torus, reduce_point
from .signals import SignalOnB, band_signal, normalize_density


@dataclass(frozen=True)
class ArmSpec:
    """Link lengths in meters."""

    lengths: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "lengths", np.atleast_1d(np.asarray(self.lengths, dtype=float))
        )
        if np.any(self.lengths <= 0):
            raise ValueError("link lengths must be positive")

    @property
    def n(self):
        return self.lengths.size


@dataclass(frozen=True)
class ConstraintDensity:
    """Normalized density on the configuration torus."""

    signal: SignalOnB
    normalization: float
    kind: str


def arm_config_space(spec):
    """Configuration chart: flat T^n with unit radii, period 2*pi per joint."""
    return flat_torus(np.ones(spec.n))


def workspace_map(spec, theta, mode="forward-kinematics"):
    """End-effector position.

    forward-kinematics composes the joint angles cumulatively (standard
    planar arm); paper-literal evaluates the linear combination of angles
    verbatim and promotes the scalar to (value, 0).
    """
    theta = np.asarray(theta, dtype=float)
    if mode == "paper-literal":
        return np.array([float(spec.lengths @ theta), 0.0])
    if mode != "forward-kinematics":
        raise ValueError(f"unknown workspace mode {mode!r}")
    angles = np.cumsum(theta)
    x = float(np.sum(spec.lengths * np.cos(angles)))
    y = float(np.sum(spec.lengths * np.sin(angles)))
    return np.array([x, y])


def constraint_to_signal(chart, f, resolution=256):
    """Normalize a nonnegative signal into a constraint density."""
    signal, mass = normalize_density(f, chart, resolution=resolution)
    return ConstraintDensity(signal=signal, normalization=1.0 / mass, kind=f.kind)


def anti_diagonal_band_constraint(chart, width=0.3, resolution=256):
    """Density of the band around the fold line theta_1 = -theta_2."""
    raw = band_signal(chart, coeffs=[1.0, 1.0], width=width)
    return constraint_to_signal(chart, raw, resolution=resolution)


def band_edge_probes(count=16, width=0.3, side=1.0):
    """Probe points on the edge of the anti-diagonal band.

    Points move along the fold line and sit at distance width/2 from it on
    the chosen side; the wall normal there is +/- (1, 1)/sqrt(2).
    """
    t = 2.0 * np.pi * np.arange(count) / count
    u = np.array([1.0, 1.0]) / np.sqrt(2.0)
    pts = np.column_stack([t, -t]) + side * 0.5 * width * u[None, :]
    return pts


@dataclass(frozen=True)
class ProbeResult:
    probe: np.ndarray
    normal: np.ndarray
    contrast: float
    no_boundary: bool


def boundary_map_pipeline(chart, density, probes, spec, sphere_resolution=720,
                          contrast_threshold=0.05, nodes_per_axis=61, threads=1):
    """Detect the constraint-wall normal at each probe point.

    Probes are processed independently (thread pool when threads > 1) and
    results are returned in probe order.
    """
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    f = density.signal if isinstance(density, ConstraintDensity) else density

    def run_one(idx):
        b = reduce_point(chart, probes[idx])
        det = detect_boundary_normal(
            f, chart, b, spec,
            sphere_resolution=sphere_resolution,
            contrast_threshold=contrast_threshold,
            nodes_per_axis=nodes_per_axis,
        )
        normal = det.normal if det.normal is not None else np.zeros(chart.dim)
        return ProbeResult(probe=b, normal=normal, contrast=det.contrast,
                           no_boundary=det.no_boundary)

    if threads > 1 and probes.shape[0] > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_one, range(probes.shape[0])))
    else:
        results = [run_one(i) for i in range(probes.shape[0])]
    return results


def pipeline_csv_rows(results):
    """Rows for the pipeline report CSV, one per probe."""
    rows = []
    for r in results:
        rows.append(
            [
                r.probe[0],
                r.probe[1],
                r.normal[0],
                r.normal[1],
                r.contrast,
                int(r.no_boundary),
            ]
        )
    return rows
