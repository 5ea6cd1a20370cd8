"""Chart-based Riemannian manifolds.

A chart carries a coordinate box, per-axis periodicity, and a metric
evaluator. Built-in kinds (flat torus, round sphere) get closed-form
exponential maps and injectivity radii; generic charts fall back to a
fixed-step RK4 geodesic integrator with finite-difference Christoffel
symbols and a user-declared injectivity radius.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ChartExitError, MetricDegenerateError, MissingParameterError

FLAT_TORUS = "flat-torus"
ROUND_SPHERE = "round-sphere"
GENERIC = "generic"


@dataclass(frozen=True)
class RiemannianChart:
    """Single coordinate chart with a metric evaluator.

    metric_fn maps a chart point (n,) to a symmetric positive definite
    (n, n) matrix. Periodic axes must have period equal to the box width.
    """

    dim: int
    box_lo: np.ndarray
    box_hi: np.ndarray
    periodic: np.ndarray
    metric_fn: Callable[[np.ndarray], np.ndarray]
    kind: str = GENERIC
    radii: Optional[np.ndarray] = None
    radius: Optional[float] = None
    inj_radius: Optional[float] = None
    rk4_steps_per_unit: int = 64
    fd_step_rel: float = 1e-5

    @property
    def box_width(self):
        return self.box_hi - self.box_lo


def flat_torus(radii):
    """Flat torus T^n with circle radii r_i; chart box [0, 2*pi)^n."""
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    n = radii.size
    if np.any(radii <= 0):
        raise ValueError("torus radii must be positive")
    g = np.diag(radii**2)

    def metric(_b):
        return g

    return RiemannianChart(
        dim=n,
        box_lo=np.zeros(n),
        box_hi=np.full(n, 2.0 * np.pi),
        periodic=np.ones(n, dtype=bool),
        metric_fn=metric,
        kind=FLAT_TORUS,
        radii=radii,
    )


def round_sphere(radius):
    """Round 2-sphere of the given radius, colatitude/longitude chart.

    Coordinates (theta, phi) with theta in (0, pi) non-periodic and phi in
    [0, 2*pi) periodic; the chart metric degenerates at the poles, which lie
    on the (open) box boundary.
    """
    r = float(radius)
    if r <= 0:
        raise ValueError("sphere radius must be positive")

    def metric(b):
        s = np.sin(b[0])
        return np.diag([r * r, r * r * s * s])

    return RiemannianChart(
        dim=2,
        box_lo=np.array([0.0, 0.0]),
        box_hi=np.array([np.pi, 2.0 * np.pi]),
        periodic=np.array([False, True]),
        metric_fn=metric,
        kind=ROUND_SPHERE,
        radius=r,
    )


def generic_chart(dim, box_lo, box_hi, periodic, metric_fn, inj_radius=None,
                  rk4_steps_per_unit=64, fd_step_rel=1e-5):
    """User-defined chart; inj_radius must be supplied for lift-based work."""
    return RiemannianChart(
        dim=int(dim),
        box_lo=np.asarray(box_lo, dtype=float),
        box_hi=np.asarray(box_hi, dtype=float),
        periodic=np.asarray(periodic, dtype=bool),
        metric_fn=metric_fn,
        kind=GENERIC,
        inj_radius=None if inj_radius is None else float(inj_radius),
        rk4_steps_per_unit=int(rk4_steps_per_unit),
        fd_step_rel=float(fd_step_rel),
    )


def reduce_point(chart, b):
    """Canonical representative: periodic coordinates wrapped into the box.

    Coordinates already inside the box are returned bit-identically.
    """
    b = np.array(b, dtype=float)
    if b.ndim == 1:
        bb = b[None, :]
        return _reduce_rows(chart, bb)[0]
    return _reduce_rows(chart, b)


def _reduce_rows(chart, pts):
    pts = np.array(pts, dtype=float)
    for i in range(chart.dim):
        if not chart.periodic[i]:
            continue
        lo = chart.box_lo[i]
        width = chart.box_width[i]
        col = pts[:, i]
        out = (col < lo) | (col >= lo + width)
        if np.any(out):
            col = col.copy()
            col[out] = lo + np.mod(col[out] - lo, width)
            pts[:, i] = col
    return pts


def metric_at(chart, b):
    """Metric matrix at b; raises MetricDegenerateError if not SPD."""
    b = reduce_point(chart, b)
    g = np.asarray(chart.metric_fn(b), dtype=float)
    if g.shape != (chart.dim, chart.dim):
        raise MetricDegenerateError(b, f"metric has shape {g.shape}")
    if not np.allclose(g, g.T, atol=1e-12 * max(1.0, np.abs(g).max())):
        raise MetricDegenerateError(b, "metric is not symmetric")
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise MetricDegenerateError(b, str(exc)) from exc
    return g


def volume_density(chart, b):
    """sqrt(det g) at b."""
    return float(np.sqrt(np.linalg.det(metric_at(chart, b))))


def metric_norm(chart, b, v):
    """Metric length of tangent components v at b."""
    g = metric_at(chart, b)
    v = np.asarray(v, dtype=float)
    return float(np.sqrt(max(0.0, v @ g @ v)))


def lower_index(chart, b, v):
    """Tangent components -> cotangent components (musical isomorphism)."""
    return metric_at(chart, b) @ np.asarray(v, dtype=float)


def raise_index(chart, b, eta):
    """Cotangent components -> tangent components."""
    return np.linalg.solve(metric_at(chart, b), np.asarray(eta, dtype=float))


def injectivity_radius(chart, b=None):
    """Injectivity radius at b (constant for the built-in charts)."""
    if chart.kind == FLAT_TORUS:
        return float(np.pi * np.min(chart.radii))
    if chart.kind == ROUND_SPHERE:
        return float(np.pi * chart.radius)
    if chart.inj_radius is None:
        raise MissingParameterError(
            "generic chart has no configured injectivity radius"
        )
    return float(chart.inj_radius)


def _check_in_box(chart, b, margin=0.0):
    for i in range(chart.dim):
        if chart.periodic[i]:
            continue
        if b[i] < chart.box_lo[i] + margin or b[i] > chart.box_hi[i] - margin:
            raise ChartExitError(b, axis=i)


def christoffel(chart, b):
    """Christoffel symbols Gamma[k, i, j] by central differences of the metric."""
    n = chart.dim
    b = reduce_point(chart, b)
    g = metric_at(chart, b)
    ginv = np.linalg.inv(g)
    dg = np.empty((n, n, n))
    for k in range(n):
        h = chart.fd_step_rel * chart.box_width[k]
        bp = b.copy()
        bm = b.copy()
        bp[k] += h
        bm[k] -= h
        if not chart.periodic[k]:
            _check_in_box(chart, bp)
            _check_in_box(chart, bm)
        dg[k] = (metric_at(chart, bp) - metric_at(chart, bm)) / (2.0 * h)
    gamma = np.empty((n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                s = 0.0
                for l in range(n):
                    s += ginv[k, l] * (dg[i][j, l] + dg[j][i, l] - dg[l][i, j])
                gamma[k, i, j] = 0.5 * s
    return gamma


def _sphere_embed(chart, b):
    r = chart.radius
    th, ph = b
    return r * np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])


def _sphere_exp(chart, b, v):
    r = chart.radius
    th, ph = b
    u0 = _sphere_embed(chart, b) / r
    t_th = np.array([np.cos(th) * np.cos(ph), np.cos(th) * np.sin(ph), -np.sin(th)])
    t_ph = np.array([-np.sin(th) * np.sin(ph), np.sin(th) * np.cos(ph), 0.0])
    vem = r * (v[0] * t_th + v[1] * t_ph)
    speed = np.linalg.norm(vem)
    if speed == 0.0:
        return np.array(b, dtype=float)
    vhat = vem / speed
    u1 = np.cos(speed / r) * u0 + np.sin(speed / r) * vhat
    th1 = float(np.arccos(np.clip(u1[2], -1.0, 1.0)))
    ph1 = float(np.mod(np.arctan2(u1[1], u1[0]), 2.0 * np.pi))
    return np.array([th1, ph1])


def exp_map_rk4(chart, b, v, return_path=False):
    """Geodesic exponential by fixed-step RK4 on the geodesic equation.

    Step count is rk4_steps_per_unit per unit of metric speed, so results
    are schedule-deterministic. Periodic coordinates are reduced after
    every step; leaving the box on a non-periodic axis raises ChartExitError.
    """
    b = reduce_point(chart, b)
    v = np.asarray(v, dtype=float)
    speed = metric_norm(chart, b, v)
    if speed == 0.0:
        return (b, [(b, v)]) if return_path else b
    nsteps = max(1, int(np.ceil(chart.rk4_steps_per_unit * speed)))
    dt = 1.0 / nsteps

    def accel(pos, vel):
        gamma = christoffel(chart, pos)
        return -np.einsum("kij,i,j->k", gamma, vel, vel)

    pos = b.copy()
    vel = v.copy()
    path = [(pos.copy(), vel.copy())]
    for _ in range(nsteps):
        k1p, k1v = vel, accel(pos, vel)
        k2p, k2v = vel + 0.5 * dt * k1v, accel(pos + 0.5 * dt * k1p, vel + 0.5 * dt * k1v)
        k3p, k3v = vel + 0.5 * dt * k2v, accel(pos + 0.5 * dt * k2p, vel + 0.5 * dt * k2v)
        k4p, k4v = vel + dt * k3v, accel(pos + dt * k3p, vel + dt * k3v)
        pos = pos + (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        vel = vel + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        pos = reduce_point(chart, pos)
        _check_in_box(chart, pos)
        if return_path:
            path.append((pos.copy(), vel.copy()))
    return (pos, path) if return_path else pos


def exp_map(chart, b, v):
    """Exponential map exp_b(v) in chart coordinates.

    Flat tori translate, round spheres follow great circles, generic charts
    integrate the geodesic equation.
    """
    b = reduce_point(chart, b)
    v = np.asarray(v, dtype=float)
    if chart.kind == FLAT_TORUS:
        return reduce_point(chart, b + v)
    if chart.kind == ROUND_SPHERE:
        return _sphere_exp(chart, b, v)
    return exp_map_rk4(chart, b, v)


def exp_map_many(chart, b, vs):
    """Vectorized exp_b over rows of vs; used by fiber lifts."""
    b = reduce_point(chart, b)
    vs = np.asarray(vs, dtype=float)
    if chart.kind == FLAT_TORUS:
        return _reduce_rows(chart, b[None, :] + vs)
    if chart.kind == ROUND_SPHERE:
        return _sphere_exp_many(chart, b, vs)
    return np.array([exp_map_rk4(chart, b, v) for v in vs])


def _sphere_exp_many(chart, b, vs):
    r = chart.radius
    th, ph = b
    u0 = _sphere_embed(chart, b) / r
    t_th = np.array([np.cos(th) * np.cos(ph), np.cos(th) * np.sin(ph), -np.sin(th)])
    t_ph = np.array([-np.sin(th) * np.sin(ph), np.sin(th) * np.cos(ph), 0.0])
    vem = r * (vs[:, :1] * t_th[None, :] + vs[:, 1:2] * t_ph[None, :])
    speed = np.linalg.norm(vem, axis=1)
    out = np.empty_like(vs)
    zero = speed == 0.0
    safe = ~zero
    if np.any(zero):
        out[zero] = b
    if np.any(safe):
        vhat = vem[safe] / speed[safe, None]
        s = speed[safe] / r
        u1 = np.cos(s)[:, None] * u0[None, :] + np.sin(s)[:, None] * vhat
        out[safe, 0] = np.arccos(np.clip(u1[:, 2], -1.0, 1.0))
        out[safe, 1] = np.mod(np.arctan2(u1[:, 1], u1[:, 0]), 2.0 * np.pi)
    return out
