import numpy as np
import pytest
from scipy import special

from contact_gabor import (
    BudgetExceededError,
    GaborAtom,
    IterationLimitError,
    LatticeSpec,
    WindowDegenerateError,
    build_lattice_frame,
    contact_frame,
    corollary_frame_certificate,
    cosphere_point,
    detect_boundary_normal,
    fiber_grid,
    flat_torus,
    frame_bounds_estimate,
    gabor_coefficient,
    half_space_signal,
    ball_signal,
    constant_signal,
    lift_signal,
    output_function,
    output_scan,
    tf_shift_eval,
    window_eval,
    window_spec,
)
from contact_gabor.errors import GridMismatchError
from contact_gabor.gabor import (
    _bounds_at_k,
    _power_iteration,
    gaussian_grid_mass,
    window_l2_norm_sq,
    window_matrix,
)
from contact_gabor.grids import sphere_directions
from contact_gabor.signals import FiberGrid, LiftedFiberSignal, fiber_grid_box

T2 = flat_torus([1.0, 1.0])
T1 = flat_torus([1.0])


def m_at(b=(0.0, 0.0), p=(1.0, 0.0), chart=T2):
    return cosphere_point(chart, list(b), list(p))


def test_window_at_zero():
    spec = window_spec(np.eye(2))
    assert window_eval(spec, m_at(), np.zeros(2)) == pytest.approx(1.0)


def test_window_unit_example():
    spec = window_spec(np.eye(2))
    val = window_eval(spec, m_at(p=(1.0, 0.0)), np.array([1.0, 0.0]))
    assert val == pytest.approx(np.exp(-1.0) * np.exp(-1j))
    assert abs(val) == pytest.approx(np.exp(-1.0))


def test_window_eigenvalue_floor():
    spec = window_spec(np.diag([1.0, 1e-9]))
    with pytest.raises(WindowDegenerateError):
        window_eval(spec, m_at(), np.zeros(2))


def test_gaussian_grid_mass_closed_form():
    spec1 = window_spec(np.pi * np.eye(1))
    g1 = fiber_grid(T1, [0.0])
    assert abs(gaussian_grid_mass(spec1, [0.0], g1) - 1.0) < 1e-6

    spec2 = window_spec(np.pi * np.eye(2))
    g2 = fiber_grid(T2, [0.0, 0.0])
    want = np.sqrt(np.pi**2 / np.linalg.det(np.pi * np.eye(2)))
    assert abs(gaussian_grid_mass(spec2, [0.0, 0.0], g2) - want) < 1e-6


def test_shift_identity_at_origin():
    spec = window_spec(np.eye(2))
    m = m_at()
    atom = GaborAtom(point=m, translation=np.zeros(2), modulation=np.zeros(2))
    v = np.array([[0.3, -0.2], [1.0, 0.5]])
    assert np.allclose(tf_shift_eval(spec, atom, v), window_eval(spec, m, v))


def test_shift_modulus_ignores_modulation():
    spec = window_spec(np.eye(2))
    m = m_at()
    w = np.array([0.4, 0.1])
    a1 = GaborAtom(point=m, translation=w, modulation=np.zeros(2))
    a2 = GaborAtom(point=m, translation=w, modulation=np.array([2.3, -1.1]))
    v = np.array([[0.3, -0.2], [1.0, 0.5], [-0.7, 0.9]])
    assert np.allclose(np.abs(tf_shift_eval(spec, a1, v)),
                       np.abs(tf_shift_eval(spec, a2, v)))


def test_shift_matches_direct_formula():
    spec = window_spec(np.eye(2))
    m = m_at(p=(0.6, 0.8))
    rng = np.random.default_rng(3)
    w = rng.normal(size=2)
    xi = rng.normal(size=2)
    atom = GaborAtom(point=m, translation=w, modulation=xi)
    v = rng.normal(size=(100, 2))
    direct = np.array(
        [
            np.exp(-2j * np.pi * (xi @ vv))
            * np.exp(-(vv - w) @ np.eye(2) @ (vv - w) - 1j * (np.array([0.6, 0.8]) @ (vv - w)))
            for vv in v
        ]
    )
    assert np.abs(tf_shift_eval(spec, atom, v) - direct).max() < 1e-12


def test_coefficient_self_inner_product():
    spec = window_spec(np.eye(2))
    m = m_at()
    grid = fiber_grid(T2, m.b, nodes_per_axis=41)
    vals = np.atleast_1d(window_eval(spec, m, grid.nodes))
    s = LiftedFiberSignal(point=m, grid=grid, values=vals, density=1.0)
    atom = GaborAtom(point=m, translation=np.zeros(2), modulation=np.zeros(2))
    c = gabor_coefficient(s, atom, spec)
    assert abs(c.imag) < 1e-12
    assert c.real == pytest.approx(window_l2_norm_sq(spec, m, grid), rel=1e-12)


def test_coefficient_zero_signal():
    spec = window_spec(np.eye(2))
    m = m_at()
    grid = fiber_grid(T2, m.b, nodes_per_axis=21)
    s = LiftedFiberSignal(point=m, grid=grid,
                          values=np.zeros(grid.nodes.shape[0]), density=1.0)
    atom = GaborAtom(point=m, translation=np.ones(2), modulation=np.ones(2))
    assert gabor_coefficient(s, atom, spec) == 0.0


def test_coefficient_riemann_oracle():
    # independent midpoint quadrature of the same continuum integral; a
    # smooth signal so both rules actually converge (indicator jumps are
    # O(1/N) for any rule)
    chart = T1
    spec = window_spec(np.pi * np.eye(1))
    m = cosphere_point(chart, [0.0], [1.0])
    f = type(constant_signal(1.0))(
        evaluate=lambda pts: 1.0 + np.cos(pts[:, 0]) + 0.3 * np.sin(2 * pts[:, 0]),
        kind="custom",
    )
    atom = GaborAtom(point=m, translation=np.array([0.4]),
                     modulation=np.array([0.3]))
    grid = fiber_grid(chart, m.b, nodes_per_axis=61)
    c_gl = gabor_coefficient(lift_signal(f, chart, m, grid), atom, spec)

    L = grid.half_widths[0]
    n_mid = 4001
    mid = -L + (np.arange(n_mid) + 0.5) * (2 * L / n_mid)
    mid_grid = FiberGrid(half_widths=grid.half_widths, nodes_per_axis=n_mid,
                         nodes=mid[:, None],
                         weights=np.full(n_mid, 2 * L / n_mid))
    c_mid = gabor_coefficient(lift_signal(f, chart, m, mid_grid), atom, spec)
    assert abs(abs(c_gl) - abs(c_mid)) < 1e-4


def test_coefficient_grid_mismatch():
    spec = window_spec(np.eye(2))
    m = m_at()
    grid = fiber_grid(T2, m.b, nodes_per_axis=21)
    s = LiftedFiberSignal(point=m, grid=grid,
                          values=np.zeros(grid.nodes.shape[0]), density=1.0)
    atom = GaborAtom(point=m, translation=np.zeros(3), modulation=np.zeros(3))
    with pytest.raises(GridMismatchError):
        gabor_coefficient(s, atom, spec)


def test_output_zero_signal():
    spec = window_spec(np.eye(2))
    assert output_function(constant_signal(0.0), T2, [0.0, 0.0], [1.0, 0.0],
                           spec) == 0.0


def test_output_rotational_invariance():
    spec = window_spec(2.0 * np.eye(2))
    b = np.array([1.0, 2.0])
    dirs = sphere_directions(2, 48)
    fld, _ = output_scan(constant_signal(1.0), T2, b, spec, dirs)
    mags = np.abs(fld.values)
    assert (mags.max() - mags.min()) / mags.max() < 1e-8


def test_output_halfspace_erfi_profile():
    # 1D factorized closed form with the erfi half-line profile. The grid
    # values carry the O(1/N) error of a mid-window jump, so compare the
    # normal/tangent ratio (where it largely cancels) at the default grid
    # and the absolute values on a finer one.
    spec = window_spec(np.eye(2))
    b = np.array([np.pi, 2.0])
    f = half_space_signal(T2, 0, np.pi)

    half_line = (np.sqrt(np.pi) / 2) * np.exp(-0.25) * (1 + 1j * special.erfi(0.5))
    closed_normal = abs(half_line) * np.sqrt(np.pi)
    closed_tangent = (np.sqrt(np.pi) / 2) * np.sqrt(np.pi) * np.exp(-0.25)
    assert closed_normal > closed_tangent

    o_normal = output_function(f, T2, b, [1.0, 0.0], spec)
    o_tangent = output_function(f, T2, b, [0.0, 1.0], spec)
    assert abs(o_normal) > abs(o_tangent)
    assert abs(o_normal) / abs(o_tangent) == pytest.approx(
        closed_normal / closed_tangent, rel=2e-2
    )

    fine_n = abs(output_function(f, T2, b, [1.0, 0.0], spec, nodes_per_axis=401))
    fine_t = abs(output_function(f, T2, b, [0.0, 1.0], spec, nodes_per_axis=401))
    assert fine_n == pytest.approx(closed_normal, rel=2e-2)
    assert fine_t == pytest.approx(closed_tangent, rel=2e-2)


def test_detect_halfspace_normal():
    spec = window_spec(np.eye(2))
    f = half_space_signal(T2, 0, np.pi)
    det = detect_boundary_normal(f, T2, [np.pi, 2.0], spec, sphere_resolution=720)
    assert not det.no_boundary
    ang = np.degrees(np.arccos(min(1.0, abs(det.normal[0]))))
    assert ang < 3.0


def test_detect_ball_radial():
    spec = window_spec(np.eye(2))
    f = ball_signal(T2, [np.pi, np.pi], 1.5)
    det = detect_boundary_normal(f, T2, [np.pi + 1.5, np.pi], spec,
                                 sphere_resolution=720)
    ang = np.degrees(np.arccos(min(1.0, abs(det.normal[0]))))
    assert ang < 3.0


def test_detect_no_boundary_flag():
    spec = window_spec(np.eye(2))
    det = detect_boundary_normal(constant_signal(1.0), T2, [1.0, 1.0], spec,
                                 sphere_resolution=180)
    assert det.no_boundary
    assert det.normal is None


def test_detect_scale_invariance_exact():
    # scaling samples by a power of two rescales |O| exactly, so the whole
    # argmax/refinement path sees identical comparisons
    spec = window_spec(np.eye(2))
    f1 = half_space_signal(T2, 0, np.pi)
    f4 = constant_signal(0.0)

    class Scaled:
        kind = "scaled"

        def __call__(self, pts):
            return 4.0 * f1(pts)

    det1 = detect_boundary_normal(f1, T2, [np.pi, 1.0], spec, sphere_resolution=360)
    det4 = detect_boundary_normal(Scaled(), T2, [np.pi, 1.0], spec,
                                  sphere_resolution=360)
    assert np.array_equal(det1.normal, det4.normal)


def test_detect_tangential_gradient_small():
    spec = window_spec(np.eye(2))
    f = half_space_signal(T2, 0, np.pi)
    det = detect_boundary_normal(f, T2, [np.pi, 2.0], spec, sphere_resolution=720)
    ang0 = np.arctan2(det.normal[1], det.normal[0])
    h = 1e-3
    vals = [
        abs(output_function(f, T2, [np.pi, 2.0],
                            [np.cos(ang0 + s * h), np.sin(ang0 + s * h)], spec))
        for s in (-1.0, 0.0, 1.0)
    ]
    deriv = (vals[2] - vals[0]) / (2 * h)
    assert abs(deriv) < 1e-3 * vals[1]


# ---------------------------------------------------------------------------
# frame bounds


def lattice_t1(scale, K=4):
    m = cosphere_point(T1, [0.0], [1.0])
    fr = contact_frame(T1, m)
    spec = LatticeSpec(variant="reeb", b_scales=[scale], c_scales=[scale],
                       truncation=K)
    return build_lattice_frame(fr, spec)


def test_frame_bounds_rank_one():
    lf = lattice_t1(0.7)
    wspec = window_spec(np.pi * np.eye(1))
    a_est, b_est, emat, _, grid = _bounds_at_k(T1, lf, 0, wspec, 16, 3.5,
                                               20000, 1e-8, 0, return_ops=True)
    quad = grid.nodes[:, 0] ** 2 * np.pi
    norm_sq = float(np.sum(grid.weights * np.exp(-2 * quad)))
    assert abs(b_est - norm_sq) < 1e-6


def test_frame_report_dichotomy():
    wspec = window_spec(np.pi * np.eye(1))
    rep_frame = frame_bounds_estimate(T1, lattice_t1(0.7), wspec, truncation=4)
    trace = dict(rep_frame.trace)
    assert rep_frame.a_est > 0.05
    assert abs(trace[6] - trace[4]) < 0.2 * trace[4]
    assert rep_frame.certificate == "frame-certified"
    assert 0.0 <= rep_frame.a_est <= rep_frame.b_est

    rep_no = frame_bounds_estimate(T1, lattice_t1(1.1), wspec, truncation=4)
    trace_no = dict(rep_no.trace)
    assert trace_no[4] >= 10.0 * trace_no[6]
    assert rep_no.certificate == "unknown"


def test_frame_sandwich_internal_consistency():
    wspec = window_spec(np.pi * np.eye(1))
    lf = lattice_t1(0.7)
    a_est, b_est, emat, qsub, _ = _bounds_at_k(T1, lf, 4, wspec, 16, 3.5,
                                               20000, 1e-8, 0, return_ops=True)
    rng = np.random.default_rng(0)
    for _ in range(20):
        v = rng.normal(size=emat.shape[1]) + 1j * rng.normal(size=emat.shape[1])
        quad = float(np.linalg.norm(emat @ v) ** 2)
        nrm = float(np.linalg.norm(v) ** 2)
        assert a_est * nrm <= quad + 1e-6 * nrm
        assert quad <= b_est * nrm + 1e-6 * nrm


def test_frame_atom_budget():
    wspec = window_spec(np.pi * np.eye(1))
    with pytest.raises(BudgetExceededError):
        frame_bounds_estimate(T1, lattice_t1(0.7), wspec, truncation=60)


def test_power_iteration_limit_error():
    mat = np.diag([2.0, 1.0])

    def mv(v):
        return mat @ v

    with pytest.raises(IterationLimitError) as err:
        _power_iteration(mv, 2, iters=2, tol=1e-30, seed=0)
    assert len(err.value.trace) == 2


def test_certificate_cases():
    assert corollary_frame_certificate([0.7, 0.7], [0.7, 0.7]) == "frame-certified"
    assert corollary_frame_certificate([1.2, 0.7], [1.2, 0.7]) == "unknown"
    assert corollary_frame_certificate([0.7, 0.7], [-0.7, 0.7]) == "frame-certified"
    assert corollary_frame_certificate([0.5], [0.4]) == "unknown"


def test_certificate_requires_orthonormal_provenance():
    lf = lattice_t1(0.7)
    assert corollary_frame_certificate([0.7], [0.7], lattice_frame=lf) == "frame-certified"

    from contact_gabor.contact import ContactFrame, CospherePoint
    from contact_gabor.lattice import LatticeFrame

    generic = LatticeFrame(
        frame=ContactFrame(
            point=CospherePoint(b=np.zeros(1), p=np.ones(1)),
            covectors=np.ones((1, 1)),
            reeb=np.ones((1, 1)),
            provenance="numeric-generic",
        ),
        spec=lf.spec,
        translations=np.ones((1, 1)) * 0.7,
        modulations=np.ones((1, 1)) * 0.7,
        degenerate=False,
    )
    assert corollary_frame_certificate([0.7], [0.7], lattice_frame=generic) == "unknown"


def test_certified_implies_stable_positive_lower_bound():
    wspec = window_spec(np.pi * np.eye(1))
    rep = frame_bounds_estimate(T1, lattice_t1(0.7), wspec, truncation=4)
    assert rep.certificate == "frame-certified"
    a_vals = [a for _, a in rep.trace]
    assert min(a_vals) > 0.0
    assert max(a_vals) - min(a_vals) < 0.2 * max(a_vals)
