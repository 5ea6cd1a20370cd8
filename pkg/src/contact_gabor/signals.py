"""Signals on the base manifold and their lifts into tangent fibers.

The lift of f at a cosphere point samples chi(|V|_g) * f(exp_b(V)) on a
tensor Gauss-Legendre grid in the chart frame of T_b B. The cutoff chi is
a quintic smoothstep that is exactly 1 inside the injectivity ball and
exactly 0 past the overshoot, so quadrature domains truncate cleanly.
"""

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BudgetExceededError, DegenerateConstraintError
from .grids import (
    chart_quadrature,
    gauss_legendre_axis,
    sphere_directions,
    sphere_measure,
    tensor_grid,
)
from .manifold import (
    exp_map_many,
    injectivity_radius,
    metric_at,
    reduce_point,
    volume_density,
)

NODE_BUDGET = 10**7


@dataclass(frozen=True)
class SignalOnB:
    """Signal on the base: vectorized evaluator over (m, n) point arrays."""

    evaluate: Callable[[np.ndarray], np.ndarray]
    kind: str = "custom"

    def __call__(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.asarray(self.evaluate(pts))


def constant_signal(value=1.0):
    v = complex(value) if isinstance(value, complex) else float(value)

    def ev(pts):
        return np.full(pts.shape[0], v)

    return SignalOnB(evaluate=ev, kind="constant")


def half_space_signal(chart, axis, threshold):
    """Indicator of {coordinate[axis] < threshold} on the chart box."""
    axis = int(axis)
    threshold = float(threshold)

    def ev(pts):
        pts = _reduced(chart, pts)
        return (pts[:, axis] < threshold).astype(float)

    return SignalOnB(evaluate=ev, kind="half-space")


def ball_signal(chart, center, radius):
    """Indicator of a metric ball (periodic wrap-around on torus charts)."""
    center = np.asarray(center, dtype=float)
    radius = float(radius)

    def ev(pts):
        pts = _reduced(chart, pts)
        diff = pts - center[None, :]
        for i in range(chart.dim):
            if chart.periodic[i]:
                w = chart.box_width[i]
                diff[:, i] = np.mod(diff[:, i] + 0.5 * w, w) - 0.5 * w
        if chart.kind == "flat-torus":
            diff = diff * chart.radii[None, :]
        return (np.linalg.norm(diff, axis=1) < radius).astype(float)

    return SignalOnB(evaluate=ev, kind="ball")


def band_signal(chart, coeffs, width, complement=False):
    """Indicator of a band around the closed line sum_i coeffs_i * theta_i = 0.

    coeffs should be integers for the level set to close up on the torus;
    the band contains points within width/2 of the line in the chart
    Euclidean distance. complement=True flips the indicator.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    width = float(width)
    nrm = np.linalg.norm(coeffs)

    def ev(pts):
        pts = _reduced(chart, pts)
        s = pts @ coeffs
        s = np.mod(s + np.pi, 2.0 * np.pi) - np.pi
        inside = (np.abs(s) / nrm) < 0.5 * width
        return (~inside if complement else inside).astype(float)

    return SignalOnB(evaluate=ev, kind="band")


def grid_signal(chart, values):
    """Multilinear interpolation of row-major samples on a uniform chart grid.

    Periodic axes wrap; non-periodic axes clamp at the box edge. Sample i
    along axis a sits at box_lo[a] + i * width[a] / N_a for periodic axes
    (period-closing) and at the same spacing with the last sample on the
    far edge for non-periodic axes.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != chart.dim:
        raise ValueError("grid rank must match the chart dimension")
    shape = values.shape

    def ev(pts):
        pts = _reduced(chart, pts)
        out = np.zeros(pts.shape[0])
        idx0 = []
        frac = []
        for a in range(chart.dim):
            na = shape[a]
            width = chart.box_width[a]
            if chart.periodic[a]:
                x = (pts[:, a] - chart.box_lo[a]) / width * na
                i0 = np.floor(x).astype(int)
                frac.append(x - i0)
                idx0.append(np.mod(i0, na))
            else:
                x = (pts[:, a] - chart.box_lo[a]) / width * (na - 1)
                x = np.clip(x, 0.0, na - 1.0)
                i0 = np.minimum(np.floor(x).astype(int), na - 2)
                frac.append(x - i0)
                idx0.append(i0)
        for corner in range(2**chart.dim):
            w = np.ones(pts.shape[0])
            ix = []
            for a in range(chart.dim):
                hi = (corner >> a) & 1
                w = w * (frac[a] if hi else 1.0 - frac[a])
                ia = idx0[a] + hi
                if chart.periodic[a]:
                    ia = np.mod(ia, shape[a])
                ix.append(ia)
            out += w * values[tuple(ix)]
        return out

    return SignalOnB(evaluate=ev, kind="grid")


def _reduced(chart, pts):
    return reduce_point(chart, np.atleast_2d(np.asarray(pts, dtype=float)))


def save_grid_csv(path, values):
    """Row-major CSV with a leading axis-size header line."""
    values = np.asarray(values, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(values.shape))
        flat = values.reshape(-1, values.shape[-1]) if values.ndim > 1 else values[None, :]
        for row in flat:
            writer.writerow([format(x, ".17g") for x in row])


def load_grid_csv(path):
    with open(path, "r", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        shape = tuple(int(s) for s in header)
        data = [float(x) for row in reader for x in row]
    arr = np.array(data)
    if arr.size != int(np.prod(shape)):
        raise ValueError(
            f"grid CSV holds {arr.size} values, header promises {np.prod(shape)}"
        )
    return arr.reshape(shape)


# ---------------------------------------------------------------------------
# cutoff and fiber grids

@dataclass(frozen=True)
class CutoffSpec:
    """Quintic smoothstep cutoff: 1 on [0, R], 0 past (1+overshoot)*R."""

    plateau_radius: float
    overshoot: float = 0.25


def cutoff_chi(spec, r):
    r = np.asarray(r, dtype=float)
    R = spec.plateau_radius
    edge = (1.0 + spec.overshoot) * R
    s = np.clip((r - R) / (spec.overshoot * R), 0.0, 1.0)
    val = 1.0 - s**3 * (10.0 - 15.0 * s + 6.0 * s * s)
    return np.where(r <= R, 1.0, np.where(r >= edge, 0.0, val))


@dataclass(frozen=True)
class FiberGrid:
    """Tensor Gauss-Legendre grid in one fiber, chart coordinate frame."""

    half_widths: np.ndarray
    nodes_per_axis: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def dim(self):
        return self.half_widths.size


def fiber_grid_box(half_widths, nodes_per_axis=61):
    """Grid on the box prod_i [-L_i, L_i]."""
    half_widths = np.atleast_1d(np.asarray(half_widths, dtype=float))
    axes = [gauss_legendre_axis(L, nodes_per_axis) for L in half_widths]
    nodes, weights = tensor_grid([a[0] for a in axes], [a[1] for a in axes])
    return FiberGrid(
        half_widths=half_widths,
        nodes_per_axis=int(nodes_per_axis),
        nodes=nodes,
        weights=weights,
    )


def fiber_grid(chart, b, cutoff=None, nodes_per_axis=61):
    """Fiber grid at b covering the cutoff support.

    The support of chi is the metric ball of radius (1+overshoot)*R; its
    bounding box in chart components has half-width
    (1+overshoot)*R*sqrt(g^{-1}_ii) per axis, which reduces to the common
    half-width (1+overshoot)*R for unit metrics.
    """
    if cutoff is None:
        cutoff = CutoffSpec(plateau_radius=injectivity_radius(chart, b))
    g = metric_at(chart, b)
    ginv = np.linalg.inv(g)
    edge = (1.0 + cutoff.overshoot) * cutoff.plateau_radius
    half = edge * np.sqrt(np.diag(ginv))
    if nodes_per_axis**chart.dim > NODE_BUDGET:
        raise BudgetExceededError(nodes_per_axis**chart.dim, NODE_BUDGET)
    return fiber_grid_box(half, nodes_per_axis)


@dataclass(frozen=True)
class LiftedFiberSignal:
    """Samples of the lift at grid nodes plus the fiber volume density."""

    point: object
    grid: FiberGrid
    values: np.ndarray
    density: float


def lift_signal(f, chart, m, grid):
    """Lift f to the fiber at m: chi(|V|_g) * f(exp_b(V)) at grid nodes.

    The identification of the fiber with T_b B is the identity on chart
    components, so the samples depend on m only through the base point.
    """
    b = reduce_point(chart, m.b)
    g = metric_at(chart, b)
    vnorm = np.sqrt(np.maximum(0.0, np.einsum("ja,ab,jb->j", grid.nodes, g, grid.nodes)))
    cutoff = CutoffSpec(plateau_radius=injectivity_radius(chart, b))
    chi = cutoff_chi(cutoff, vnorm)
    targets = exp_map_many(chart, b, grid.nodes)
    fv = np.asarray(f(targets))
    values = chi * fv
    return LiftedFiberSignal(
        point=m, grid=grid, values=values, density=volume_density(chart, b)
    )


def fiber_l2_norm(s):
    """L2 norm over one fiber with the metric volume element."""
    return float(np.sqrt(s.density * np.sum(s.grid.weights * np.abs(s.values) ** 2)))


def global_l2_norm(f, chart, base_resolution=8, sphere_resolution=8,
                   nodes_per_axis=31):
    """L2(E) norm: fiber norms squared integrated over chart x sphere.

    Chart quadrature is trapezoid/midpoint, sphere directions are uniform
    angles (n=2) or Fibonacci points (n>=3); fibers use Gauss-Legendre.
    """
    if base_resolution < 2 or sphere_resolution < 2:
        raise ValueError("resolutions must be at least 2")
    n = chart.dim
    base_nodes, base_weights = chart_quadrature(chart, base_resolution)
    dirs = sphere_directions(n, sphere_resolution)
    total_nodes = base_nodes.shape[0] * dirs.shape[0] * nodes_per_axis**n
    if total_nodes > NODE_BUDGET:
        raise BudgetExceededError(total_nodes, NODE_BUDGET)
    sphere_w = sphere_measure(n) / dirs.shape[0]
    from .contact import cosphere_point  # local import to avoid a cycle

    acc = 0.0
    for b, wb in zip(base_nodes, base_weights):
        grid = fiber_grid(chart, b, nodes_per_axis=nodes_per_axis)
        dens = volume_density(chart, b)
        for d in dirs:
            m = cosphere_point(chart, b, d)
            s = lift_signal(f, chart, m, grid)
            acc += wb * dens * sphere_w * fiber_l2_norm(s) ** 2
    return float(np.sqrt(acc))


def normalize_density(f, chart, resolution=256, tol=1e-12):
    """Scale f to unit integral over the chart (used for constraint densities)."""
    nodes, weights = chart_quadrature(chart, resolution)
    if chart.kind == "flat-torus":
        vols = np.full(nodes.shape[0], volume_density(chart, nodes[0]))
    else:
        vols = np.array([volume_density(chart, b) for b in nodes])
    mass = float(np.sum(weights * vols * np.asarray(f(nodes), dtype=float)))
    if not np.isfinite(mass) or mass <= tol:
        raise DegenerateConstraintError(f"constraint has mass {mass}")
    scale = 1.0 / mass

    def ev(pts):
        return scale * np.asarray(f(pts), dtype=float)

    return SignalOnB(evaluate=ev, kind=f.kind), mass
