"""Contact covector frames on the unit cotangent bundle.

At a cosphere point (b, p) the frame consists of p together with a
deterministic orthonormal completion in the inverse metric, or of the
quaternionic rotations of p on a hypercomplex chart. Reeb vectors come
from the metric dual on flat charts and from a finite-difference solve of
the defining equations elsewhere.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ReebDegenerateError
from .manifold import FLAT_TORUS, metric_at, reduce_point

_TOL_UNIT = 1e-12


@dataclass(frozen=True)
class CospherePoint:
    """Base point plus unit covector (unit in the inverse metric)."""

    b: np.ndarray
    p: np.ndarray


@dataclass(frozen=True)
class ContactFrame:
    """Covector frame and Reeb vectors at a cosphere point.

    covectors[0] is the defining covector p; rows are unit and mutually
    orthogonal in the inverse metric. provenance is one of "analytic-flat",
    "numeric-generic", "hypercomplex".
    """

    point: CospherePoint
    covectors: np.ndarray
    reeb: np.ndarray
    provenance: str


@dataclass(frozen=True)
class HypercomplexStructure:
    """Triple of constant almost-complex structures with I*J = K = -J*I."""

    imat: np.ndarray
    jmat: np.ndarray
    kmat: np.ndarray

    def rotations(self):
        return (self.imat, self.jmat, self.kmat)


def standard_hypercomplex():
    """The built-in integer quaternionic matrices on a 4-dimensional chart."""
    imat = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float)
    jmat = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], dtype=float)
    return HypercomplexStructure(imat=imat, jmat=jmat, kmat=imat @ jmat)


def inverse_metric(chart, b):
    return np.linalg.inv(metric_at(chart, b))


def gstar_norm(gstar, p):
    return float(np.sqrt(max(0.0, p @ gstar @ p)))


def cosphere_point(chart, b, p):
    """Normalize p to unit inverse-metric length and wrap b into the chart."""
    b = reduce_point(chart, b)
    p = np.asarray(p, dtype=float)
    nrm = gstar_norm(inverse_metric(chart, b), p)
    if nrm == 0.0:
        raise ValueError("cosphere covector must be nonzero")
    return CospherePoint(b=b, p=p / nrm)


def _gram_schmidt(gstar, rows, start):
    """Modified Gram-Schmidt in the g* inner product, in place from `start`."""
    for i in range(start, rows.shape[0]):
        v = rows[i]
        for j in range(i):
            v = v - (rows[j] @ gstar @ v) * rows[j]
        nrm = gstar_norm(gstar, v)
        rows[i] = v / nrm
    return rows


def orthonormal_completion(p, gstar):
    """Covectors completing p to a positively oriented g*-orthonormal frame.

    Deterministic: n=2 rotates by +90 degrees in an orthonormal coframe;
    n>=3 applies the sign-safe Householder reflection carrying the last
    coordinate axis to p, followed by Gram-Schmidt in g*. Returns an
    (n-1, n) array of covector components.
    """
    p = np.asarray(p, dtype=float)
    n = p.size
    if n == 1:
        return np.zeros((0, 1))
    # orthonormal coframe coordinates: y = L^T x with g* = L L^T
    L = np.linalg.cholesky(gstar)
    S = L.T
    Sinv = np.linalg.inv(S)
    y = S @ p
    y = y / np.linalg.norm(y)
    if n == 2:
        ys = np.array([[-y[1], y[0]]])
    else:
        s = -1.0 if y[-1] >= 0.0 else 1.0
        w = y.copy()
        w[-1] -= s
        denom = w @ w
        H = np.eye(n) - 2.0 * np.outer(w, w) / denom
        ys = H[:, :-1].T
        if np.linalg.det(np.vstack([y, ys]).T) < 0.0:
            ys[-1] = -ys[-1]
    rows = np.vstack([p / gstar_norm(gstar, p), ys @ Sinv.T])
    rows = _gram_schmidt(gstar, rows, 1)
    return rows[1:]


def contact_covectors(chart, m, structure=None):
    """Rows of contact covectors at m; row 0 is m.p itself.

    With a hypercomplex structure the remaining rows are the transposed
    quaternionic matrices applied to p; otherwise the deterministic
    orthonormal completion in the inverse metric at m.b.
    """
    p = np.asarray(m.p, dtype=float)
    if structure is not None:
        if p.size != 4:
            raise ValueError("hypercomplex frames require a 4-dimensional chart")
        rots = structure.rotations()
        return np.vstack([p] + [r.T @ p for r in rots])
    gstar = inverse_metric(chart, m.b)
    return np.vstack([p, orthonormal_completion(p, gstar)])


def _covector_field(chart, m, structure, idx):
    """Contact covector i as a field over the (b, q) chart of M near m.

    The fiber is parameterized by p(q) = normalize(p0 + sum q_l u_l) with
    u_l the completion directions frozen at the center point. Returns
    (2n-1,) coefficients over (b, q); the dq slots are zero by construction
    (the fibers are tangent to the kernel of every frame covector).
    """
    n = chart.dim
    p0 = np.asarray(m.p, dtype=float)
    gstar0 = inverse_metric(chart, m.b)
    udirs = orthonormal_completion(p0, gstar0)

    def field(x):
        b = np.asarray(x[:n], dtype=float)
        q = np.asarray(x[n:], dtype=float)
        praw = p0 + (q @ udirs if q.size else 0.0)
        gstar = inverse_metric(chart, b)
        p = praw / gstar_norm(gstar, praw)
        mm = CospherePoint(b=reduce_point(chart, b), p=p)
        cov = contact_covectors(chart, mm, structure)[idx]
        out = np.zeros(2 * n - 1)
        out[:n] = cov
        return out

    return field


def _field_differential(chart, field, x0, n):
    """Antisymmetric matrix D_jk = d_j a_k - d_k a_j by central differences."""
    dim = 2 * n - 1
    scale = float(np.max(chart.box_width))
    h = 1e-5 * scale
    jac = np.empty((dim, dim))
    for j in range(dim):
        xp = x0.copy()
        xm = x0.copy()
        xp[j] += h
        xm[j] -= h
        jac[j] = (field(xp) - field(xm)) / (2.0 * h)
    return jac - jac.T


def _reeb_numeric(chart, m, structure, idx):
    n = chart.dim
    x0 = np.concatenate([np.asarray(m.b, dtype=float), np.zeros(n - 1)])
    field = _covector_field(chart, m, structure, idx)
    a0 = field(x0)
    D = _field_differential(chart, field, x0, n)
    # stack iota_R dalpha = 0 with alpha(R) = 1
    mat = np.vstack([D.T, a0[None, :]])
    rhs = np.zeros(2 * n)
    rhs[-1] = 1.0
    sol, _, rank, _ = np.linalg.lstsq(mat, rhs, rcond=None)
    if rank < 2 * n - 1:
        raise ReebDegenerateError(m, residual=None)
    resid = float(np.linalg.norm(mat @ sol - rhs))
    if resid > 1e-6:
        raise ReebDegenerateError(m, residual=resid)
    return sol


def reeb_fields(chart, m, covectors, method="auto"):
    """Reeb vectors of the frame covectors, one row per covector.

    method "analytic" takes the metric dual (valid on flat charts, where the
    covector fields have constant coefficients in b), "numeric" solves the
    defining equations with finite differences over the (b, q) chart, "auto"
    picks analytic exactly on flat charts. Numeric rows are returned as the
    horizontal (b-)components; verticality is reported by
    reeb_vertical_components rather than assumed.
    """
    covectors = np.asarray(covectors, dtype=float)
    if method == "auto":
        method = "analytic" if chart.kind == FLAT_TORUS else "numeric"
    if method == "analytic":
        g = metric_at(chart, m.b)
        return np.linalg.solve(g, covectors.T).T
    n = chart.dim
    structure = None
    if covectors.shape[0] == 4 and n == 4:
        # the caller may have built a hypercomplex frame; recover it from rows
        structure = _structure_from_rows(m, covectors)
    sols = [
        _reeb_numeric(chart, m, structure, i)[:n] for i in range(covectors.shape[0])
    ]
    return np.vstack(sols)


def reeb_vertical_components(chart, m, covectors, structure=None):
    """Fiber (q-)components of the numerically solved Reeb vectors."""
    n = chart.dim
    rows = []
    for i in range(np.asarray(covectors).shape[0]):
        sol = _reeb_numeric(chart, m, structure, i)
        rows.append(sol[n:])
    return np.vstack(rows) if rows else np.zeros((0, max(n - 1, 0)))


def _structure_from_rows(m, covectors):
    """Detect whether rows match the standard quaternionic frame at m.p."""
    st = standard_hypercomplex()
    p = np.asarray(m.p, dtype=float)
    want = np.vstack([p] + [r.T @ p for r in st.rotations()])
    if np.allclose(want, covectors, atol=1e-12):
        return st
    return None


def contact_frame(chart, m, structure=None, reeb_method="auto"):
    """Build the full contact frame (covectors + Reeb vectors) at m."""
    covs = contact_covectors(chart, m, structure)
    if reeb_method == "auto" and structure is not None and chart.kind == FLAT_TORUS:
        reeb_method = "analytic"
    if structure is not None and reeb_method == "numeric":
        n = chart.dim
        sols = [_reeb_numeric(chart, m, structure, i)[:n] for i in range(covs.shape[0])]
        reeb = np.vstack(sols)
    else:
        reeb = reeb_fields(chart, m, covs, method=reeb_method)
    if structure is not None:
        provenance = "hypercomplex"
    elif chart.kind == FLAT_TORUS:
        provenance = "analytic-flat"
    else:
        provenance = "numeric-generic"
    return ContactFrame(point=m, covectors=covs, reeb=reeb, provenance=provenance)


def frame_covector_field(chart, m, idx, structure=None):
    """Public handle on the (b, q)-parameterized covector field through m."""
    return _covector_field(chart, m, structure, idx)


# ---------------------------------------------------------------------------
# contact condition alpha ^ (d alpha)^(n-1) via a small exterior algebra

def _wedge(f1, f2):
    out = {}
    for idx1, c1 in f1.items():
        for idx2, c2 in f2.items():
            if set(idx1) & set(idx2):
                continue
            merged = idx1 + idx2
            order = np.argsort(merged, kind="stable")
            # parity of the sorting permutation
            perm = list(order)
            sign = 1
            for i in range(len(perm)):
                while perm[i] != i:
                    j = perm[i]
                    perm[i], perm[j] = perm[j], perm[i]
                    sign = -sign
            key = tuple(sorted(merged))
            out[key] = out.get(key, 0.0) + sign * c1 * c2
    return out


def contact_condition_check(chart, m, field, order):
    """|coefficient of alpha ^ (d alpha)^(order-1)| at m in the (b, q) chart.

    field maps x = (b, q) in R^(2n-1) to the (2n-1,) covector coefficients;
    the differential is taken by central differences. Exact forms give
    values at rounding level, contact forms stay bounded away from zero.
    """
    n = chart.dim
    dim = 2 * n - 1
    x0 = np.concatenate([np.asarray(m.b, dtype=float), np.zeros(n - 1)])
    a0 = np.asarray(field(x0), dtype=float)
    D = _field_differential(chart, field, x0, n)
    alpha = {(i,): a0[i] for i in range(dim) if a0[i] != 0.0}
    dalpha = {
        (j, k): D[j, k]
        for j, k in itertools.combinations(range(dim), 2)
        if D[j, k] != 0.0
    }
    form = alpha
    for _ in range(order - 1):
        form = _wedge(form, dalpha)
    top = tuple(range(dim))
    return abs(form.get(top, 0.0))
