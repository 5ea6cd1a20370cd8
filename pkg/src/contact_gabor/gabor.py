"""Phase-twisted Gaussian windows, Gabor coefficients, boundary detection,
and empirical frame bounds.

The window at a cosphere point (b, p) is exp(-V^t A(b) V - i <p, V>); its
time-frequency shifts along a truncated lattice yield coefficients whose
squared sums sandwich signal norms when the system is a frame. Boundary
normals are read off as the direction maximizing |O| where O integrates
the lifted signal against the window over one fiber.
"""

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .contact import CospherePoint, cosphere_point, inverse_metric
from .errors import (
    BudgetExceededError,
    GridMismatchError,
    IterationLimitError,
    WindowDegenerateError,
)
from .grids import gauss_legendre_axis, sphere_directions, tensor_grid
from .lattice import enumerate_lattice_points
from .manifold import metric_at, reduce_point, volume_density
from .signals import FiberGrid, fiber_grid, lift_signal

ATOM_BUDGET = 10**4


@dataclass(frozen=True)
class WindowSpec:
    """Gaussian window tensor A(b) with an eigenvalue floor."""

    a_fn: Callable[[np.ndarray], np.ndarray]
    eig_floor: float = 1e-6


def window_spec(a=np.pi, eig_floor=1e-6, dim=None):
    """Window from a scalar (a*I), a constant matrix, or a callable b -> A(b)."""
    if callable(a):
        return WindowSpec(a_fn=a, eig_floor=eig_floor)
    a_arr = np.asarray(a, dtype=float)
    if a_arr.ndim == 0:
        scalar = float(a_arr)

        def a_fn(b):
            n = dim if dim is not None else np.atleast_1d(b).size
            return scalar * np.eye(n)

        return WindowSpec(a_fn=a_fn, eig_floor=eig_floor)
    if a_arr.ndim != 2 or a_arr.shape[0] != a_arr.shape[1]:
        raise ValueError("window tensor must be square")

    def a_const(_b):
        return a_arr

    return WindowSpec(a_fn=a_const, eig_floor=eig_floor)


def window_matrix(spec, b):
    """Validated A(b): symmetric with eigenvalues above the floor."""
    a = np.asarray(spec.a_fn(np.asarray(b, dtype=float)), dtype=float)
    if not np.allclose(a, a.T, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise WindowDegenerateError(f"window tensor not symmetric at {b}")
    eigs = np.linalg.eigvalsh(a)
    if np.min(eigs) < spec.eig_floor:
        raise WindowDegenerateError(
            f"window eigenvalue {np.min(eigs):g} below floor {spec.eig_floor:g} at {b}"
        )
    return a


@dataclass(frozen=True)
class GaborAtom:
    """Translation W and modulation xi in one fiber."""

    point: CospherePoint
    translation: np.ndarray
    modulation: np.ndarray


def window_eval(spec, m, v):
    """Window value(s) exp(-V^t A V - i <eta_p, V>) at fiber vectors v."""
    a = window_matrix(spec, m.b)
    v = np.atleast_2d(np.asarray(v, dtype=float))
    quad = np.einsum("ja,ab,jb->j", v, a, v)
    phase = v @ np.asarray(m.p, dtype=float)
    out = np.exp(-quad - 1j * phase)
    return out if out.size > 1 else complex(out[0])


def tf_shift_eval(spec, atom, v):
    """Time-frequency shifted window: modulation after translation."""
    m = atom.point
    a = window_matrix(spec, m.b)
    v = np.atleast_2d(np.asarray(v, dtype=float))
    diff = v - atom.translation[None, :]
    quad = np.einsum("ja,ab,jb->j", diff, a, diff)
    phase = 2.0 * np.pi * (v @ atom.modulation) + diff @ np.asarray(m.p, dtype=float)
    out = np.exp(-quad - 1j * phase)
    return out if out.size > 1 else complex(out[0])


def gabor_coefficient(s, atom, spec):
    """Fiber inner product of a lifted signal with one shifted window."""
    if np.asarray(atom.translation).size != s.grid.nodes.shape[1]:
        raise GridMismatchError("atom dimension does not match the lifted signal grid")
    vals = np.atleast_1d(tf_shift_eval(spec, atom, s.grid.nodes))
    if vals.shape[0] != s.values.shape[0]:
        raise GridMismatchError("atom grid does not match the lifted signal grid")
    return complex(s.density * np.sum(s.grid.weights * s.values * np.conj(vals)))


def gaussian_grid_mass(spec, b, grid):
    """Quadrature of exp(-V^t A V) over a fiber grid (bijection-proof integral)."""
    a = window_matrix(spec, b)
    quad = np.einsum("ja,ab,jb->j", grid.nodes, a, grid.nodes)
    return float(np.sum(grid.weights * np.exp(-quad)))


def window_l2_norm_sq(spec, m, grid, density=1.0):
    """Grid value of the squared window norm, integrand exp(-2 V^t A V)."""
    a = window_matrix(spec, m.b)
    quad = np.einsum("ja,ab,jb->j", grid.nodes, a, grid.nodes)
    return float(density * np.sum(grid.weights * np.exp(-2.0 * quad)))


# ---------------------------------------------------------------------------
# output function and boundary detection

@dataclass(frozen=True)
class OutputField:
    """Scan of O over a set of unit covector directions at one base point."""

    b: np.ndarray
    directions: np.ndarray
    values: np.ndarray
    resolution: int

    def to_csv_rows(self):
        rows = []
        for d, val in zip(self.directions, self.values):
            if d.size == 2:
                ang = [float(np.mod(np.arctan2(d[1], d[0]), 2.0 * np.pi))]
            elif d.size == 3:
                ang = [
                    float(np.arccos(np.clip(d[2], -1.0, 1.0))),
                    float(np.mod(np.arctan2(d[1], d[0]), 2.0 * np.pi)),
                ]
            else:
                ang = [float(x) for x in d]
            rows.append(ang + [val.real, val.imag, abs(val)])
        return rows


@dataclass(frozen=True)
class DetectionResult:
    normal: Optional[np.ndarray]
    contrast: float
    field: OutputField
    no_boundary: bool


def output_function(f, chart, b, p, spec, nodes_per_axis=61):
    """O_b(f, eta_p): fiber integral of the lifted signal against the window.

    The integrand uses the window itself (not its conjugate).
    """
    m = cosphere_point(chart, b, p)
    grid = fiber_grid(chart, m.b, nodes_per_axis=nodes_per_axis)
    s = lift_signal(f, chart, m, grid)
    w = np.atleast_1d(window_eval(spec, m, grid.nodes))
    return complex(s.density * np.sum(grid.weights * s.values * w))


def output_scan(f, chart, b, spec, directions, nodes_per_axis=61, grid=None,
                lifted=None):
    """Evaluate O over many directions, lifting the signal only once.

    The lift does not depend on the fiber direction, so the scan reduces to
    modulation integrals of one weighted sample vector; those go through
    the phase_scan kernel.
    """
    b = reduce_point(chart, b)
    if grid is None:
        grid = fiber_grid(chart, b, nodes_per_axis=nodes_per_axis)
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    gstar = inverse_metric(chart, b)
    norms = np.sqrt(np.einsum("ka,ab,kb->k", directions, gstar, directions))
    dirs = directions / norms[:, None]
    m0 = CospherePoint(b=b, p=dirs[0])
    if lifted is None:
        lifted = lift_signal(f, chart, m0, grid)
    a = window_matrix(spec, b)
    quad = np.einsum("ja,ab,jb->j", grid.nodes, a, grid.nodes)
    coeffs = lifted.density * grid.weights * lifted.values * np.exp(-quad)
    values = _kernels.phase_scan(grid.nodes, coeffs.astype(np.complex128), dirs)
    return OutputField(b=b, directions=dirs, values=values, resolution=len(dirs)), lifted


def _refine_angle(scan_fn, ang_lo, ang_hi, steps=10):
    """Golden-section ascent of |O| on one angular bracket."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = ang_lo, ang_hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = scan_fn(c), scan_fn(d)
    for _ in range(steps):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = scan_fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = scan_fn(d)
    return 0.5 * (a + b)


def detect_boundary_normal(f, chart, b, spec, sphere_resolution=720,
                           contrast_threshold=0.05, nodes_per_axis=61,
                           refine_steps=10, strength_threshold=0.02):
    """Direction on the cosphere maximizing |O|, reported unoriented.

    Scans a uniform direction set, refines the best direction (golden
    section over the angle for n=2, local ascent for n>=3), and flags
    no-boundary in two scale-invariant situations: the scan contrast
    (max-min)/max falls below contrast_threshold (locally constant
    signal), or the peak response is a negligible fraction of its
    Cauchy-Schwarz bound |O| <= ||lift|| * ||window|| (no signal mass near
    the probe). The sign of the normal is not certified; the canonical
    representative has its first sizable component positive.
    """
    if sphere_resolution < 8:
        raise ValueError("sphere resolution must be at least 8 directions")
    n = chart.dim
    b = reduce_point(chart, b)
    dirs = sphere_directions(n, sphere_resolution)
    grid = fiber_grid(chart, b, nodes_per_axis=nodes_per_axis)
    fld, lifted = output_scan(f, chart, b, spec, dirs, grid=grid)
    mags = np.abs(fld.values)
    mmax = float(mags.max())
    mmin = float(mags.min())
    contrast = 0.0 if mmax == 0.0 else (mmax - mmin) / mmax
    from .signals import fiber_l2_norm

    bound = fiber_l2_norm(lifted) * np.sqrt(
        window_l2_norm_sq(spec, lifted.point, grid, density=lifted.density)
    )
    strength = 0.0 if bound == 0.0 else mmax / bound
    if contrast < contrast_threshold or strength < strength_threshold:
        return DetectionResult(normal=None, contrast=contrast, field=fld,
                               no_boundary=True)
    best = int(np.argmax(mags))
    if n == 2:
        step = 2.0 * np.pi / sphere_resolution
        ang0 = np.arctan2(dirs[best, 1], dirs[best, 0])

        def val(ang):
            d = np.array([[np.cos(ang), np.sin(ang)]])
            f2, _ = output_scan(f, chart, b, spec, d, grid=grid, lifted=lifted)
            return abs(f2.values[0])

        ang = _refine_angle(val, ang0 - step, ang0 + step, steps=refine_steps)
        p = np.array([np.cos(ang), np.sin(ang)])
    else:
        p = dirs[best]
        step = np.sqrt(4.0 * np.pi / sphere_resolution)

        def val_dir(d):
            f2, _ = output_scan(f, chart, b, spec, d[None, :], grid=grid,
                                lifted=lifted)
            return abs(f2.values[0])

        fbest = val_dir(p)
        for _ in range(refine_steps):
            basis = _tangent_basis(p)
            moved = False
            for t in basis:
                for sgn in (1.0, -1.0):
                    cand = p + sgn * step * t
                    cand = cand / np.linalg.norm(cand)
                    fc = val_dir(cand)
                    if fc > fbest:
                        p, fbest, moved = cand, fc, True
            if not moved:
                step *= 0.5
    gstar = inverse_metric(chart, b)
    p = p / np.sqrt(p @ gstar @ p)
    p = _canonical_sign(p)
    return DetectionResult(normal=p, contrast=contrast, field=fld,
                           no_boundary=False)


def _tangent_basis(p):
    n = p.size
    basis = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        t = e - (e @ p) * p
        nrm = np.linalg.norm(t)
        if nrm > 1e-8:
            basis.append(t / nrm)
        if len(basis) == n - 1:
            break
    return basis


def _canonical_sign(p):
    for x in p:
        if abs(x) > 1e-12:
            return p if x > 0 else -p
    return p


# ---------------------------------------------------------------------------
# frame bounds

@dataclass(frozen=True)
class FrameReport:
    """Empirical frame bounds at one cosphere point plus certificate status."""

    variant: str
    b_scales: np.ndarray
    c_scales: np.ndarray
    truncation: int
    nodes_per_unit: int
    margin: float
    a_est: float
    b_est: float
    certificate: str
    trace: list = field(default_factory=list)

    def to_json(self):
        return json.dumps(
            {
                "lattice": {
                    "variant": self.variant,
                    "b_scales": [float(x) for x in self.b_scales],
                    "c_scales": [float(x) for x in self.c_scales],
                },
                "truncation": self.truncation,
                "grid": {
                    "nodes_per_unit": self.nodes_per_unit,
                    "margin": self.margin,
                },
                "a_est": self.a_est,
                "b_est": self.b_est,
                "certificate": self.certificate,
                "trace": [[int(k), float(a)] for k, a in self.trace],
            },
            indent=2,
            sort_keys=True,
        )


def _power_iteration(matvec, dim, iters=500, tol=1e-8, seed=0):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    v = v / np.linalg.norm(v)
    lam = 0.0
    trace = []
    for _ in range(iters):
        w = matvec(v)
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        v = w / nrm
        new_lam = float(np.real(np.vdot(v, matvec(v))))
        trace.append(new_lam)
        if abs(new_lam - lam) <= tol * max(1.0, abs(new_lam)):
            return new_lam
        lam = new_lam
    raise IterationLimitError(trace)


def _estimation_grid(lf, K, a, nodes_per_unit, margin):
    trans_reach = K * np.sum(np.abs(lf.translations), axis=0)
    eig_min = float(np.min(np.linalg.eigvalsh(a)))
    half = trans_reach + margin * np.sqrt(np.pi / eig_min)
    n_nodes = int(np.ceil(nodes_per_unit * 2.0 * np.max(half)))
    axes = [gauss_legendre_axis(h, n_nodes) for h in half]
    nodes, weights = tensor_grid([ax[0] for ax in axes], [ax[1] for ax in axes])
    return FiberGrid(half_widths=half, nodes_per_axis=n_nodes, nodes=nodes,
                     weights=weights), axes


def _prolate_axis_basis(t, w, t_lim, f_lim, cut=0.5):
    """Orthonormal basis of time- and band-concentrated axis functions.

    Eigenvectors (in sqrt-weight coordinates) of the compose-and-project
    operator "restrict to |t| <= t_lim, band-limit to |f| <= f_lim" with
    eigenvalue at least cut; the count tracks the time-bandwidth product.
    """
    mask = np.abs(t) <= t_lim
    sw = np.sqrt(w)
    ker = 2.0 * f_lim * np.sinc(2.0 * f_lim * (t[:, None] - t[None, :]))
    op = sw[:, None] * ker * sw[None, :]
    op = np.where(mask[:, None] & mask[None, :], op, 0.0)
    evals, evecs = np.linalg.eigh(op)
    keep = evals >= cut
    return evals[keep], evecs[:, keep]


def _test_subspace(axes, t_reach, f_reach, a, cut=0.5):
    """Tensor basis of test functions in the central half of phase space.

    Per axis, test functions live within half the reach of the translation
    centers in time and the modulation centers in frequency; floors sized
    from the window tensor keep the window itself representable at K = 0.
    Restricting the lower-bound search to this concentrated subspace is
    what makes the truncated estimate track the frame property: spatial
    restriction alone leaves rough grid functions that no truncated atom
    set controls.
    """
    eigs = np.linalg.eigvalsh(a)
    t_floor = np.sqrt(11.5 / float(eigs.min()))
    f_floor = np.sqrt(11.5 * float(eigs.max())) / np.pi
    bases = []
    for axis, (t, w) in enumerate(axes):
        t_lim = max(0.5 * t_reach[axis], t_floor)
        f_lim = max(0.5 * f_reach[axis], f_floor)
        evals, evecs = _prolate_axis_basis(t, w, t_lim, f_lim, cut=cut)
        bases.append((evals, evecs))
    evals = bases[0][0]
    q = bases[0][1]
    for ev2, q2 in bases[1:]:
        prod = np.multiply.outer(evals, ev2).reshape(-1)
        q = np.einsum("pi,qj->pqij", q, q2).reshape(q.shape[0] * q2.shape[0], -1)
        keep = prod >= cut
        evals = prod[keep]
        q = q[:, keep]
    return q


def _bounds_at_k(chart, lf, K, spec, nodes_per_unit, margin, iters, tol, seed,
                 return_ops=False):
    m = lf.frame.point
    a = window_matrix(spec, m.b)
    count = (2 * K + 1) ** (2 * lf.translations.shape[0])
    if count > ATOM_BUDGET:
        raise BudgetExceededError(count, ATOM_BUDGET)
    _, trans, mods = enumerate_lattice_points(lf, K)
    grid, axes = _estimation_grid(lf, K, a, nodes_per_unit, margin)
    dens = volume_density(chart, m.b)
    atoms = _kernels.shift_matrix(grid.nodes, a, np.asarray(m.p, dtype=float),
                                  trans, mods)
    # analysis map in plain l2 coordinates: g_hat = sqrt(w*dens) * g
    sq = np.sqrt(grid.weights * dens)
    cmat = np.conj(atoms) * sq[None, :]
    t_reach = K * np.sum(np.abs(lf.translations), axis=0)
    f_reach = K * np.sum(np.abs(lf.modulations), axis=0)
    qsub = _test_subspace(axes, t_reach, f_reach, a)
    emat = cmat @ qsub
    dim = emat.shape[1]

    def smat(v):
        return emat.conj().T @ (emat @ v)

    b_est = _power_iteration(smat, dim, iters=iters, tol=tol, seed=seed)

    def shifted(v):
        return b_est * v - smat(v)

    mu = _power_iteration(shifted, dim, iters=iters, tol=tol, seed=seed + 1)
    a_est = max(0.0, b_est - mu)
    if return_ops:
        return a_est, b_est, emat, qsub, grid
    return a_est, b_est, None, None, None


def frame_bounds_estimate(chart, lf, spec, truncation=4, nodes_per_unit=16,
                          margin=3.5, iters=20000, tol=1e-8, seed=0):
    """Extremal Rayleigh quotients of the truncated frame operator.

    Test functions are restricted to the central half of the covered
    phase-space box on an estimation grid that grows with the truncation
    radius, so atoms near the edge keep their mass on-grid. The trace
    reruns the estimate at K, K+1, K+2. The iteration budget is sized for
    the nearly degenerate bottom cluster that appears on the non-frame
    side of the Gaussian dichotomy; each iteration is a small matvec.
    """
    K = int(truncation)
    trace = []
    a_est = b_est = None
    for k in (K, K + 1, K + 2):
        ak, bk, _, _, _ = _bounds_at_k(chart, lf, k, spec, nodes_per_unit,
                                       margin, iters, tol, seed)
        trace.append((k, ak))
        if k == K:
            a_est, b_est = ak, bk
    cert = corollary_frame_certificate(lf.spec.b_scales, lf.spec.c_scales,
                                       lattice_frame=lf)
    return FrameReport(
        variant=lf.spec.variant,
        b_scales=lf.spec.b_scales,
        c_scales=lf.spec.c_scales,
        truncation=K,
        nodes_per_unit=nodes_per_unit,
        margin=margin,
        a_est=a_est,
        b_est=b_est,
        certificate=cert,
        trace=trace,
    )


def corollary_frame_certificate(b_scales, c_scales, lattice_frame=None):
    """Sufficient-condition certificate for separable geometric lattices.

    frame-certified requires 0 < b_i < 1 with b_i = +/- c_i exactly and an
    orthonormal separable frame (flat or hypercomplex provenance, not
    degenerate); anything else is unknown -- the criterion is one-sided and
    never declares a non-frame.
    """
    b_scales = np.atleast_1d(np.asarray(b_scales, dtype=float))
    c_scales = np.atleast_1d(np.asarray(c_scales, dtype=float))
    if lattice_frame is not None:
        if lattice_frame.degenerate:
            return "not-applicable"
        if lattice_frame.frame.provenance not in ("analytic-flat", "hypercomplex"):
            return "unknown"
    if b_scales.shape != c_scales.shape:
        return "unknown"
    if np.all((b_scales > 0.0) & (b_scales < 1.0)) and np.all(
        np.abs(b_scales) == np.abs(c_scales)
    ):
        return "frame-certified"
    return "unknown"
