import numpy as np
import pytest

from contact_gabor import (
    ArmSpec,
    DegenerateConstraintError,
    anti_diagonal_band_constraint,
    arm_config_space,
    band_edge_probes,
    boundary_map_pipeline,
    constant_signal,
    constraint_to_signal,
    window_spec,
    workspace_map,
)
from contact_gabor.grids import chart_quadrature
from contact_gabor.robotics import pipeline_csv_rows
from contact_gabor.signals import SignalOnB


NORMAL = np.array([1.0, 1.0]) / np.sqrt(2.0)


def test_config_space_dimensions():
    assert arm_config_space(ArmSpec(lengths=[1.0])).dim == 1
    chart = arm_config_space(ArmSpec(lengths=[1.0, 1.0]))
    assert chart.dim == 2
    assert np.allclose(chart.box_hi - chart.box_lo, 2 * np.pi)
    assert arm_config_space(ArmSpec(lengths=[1.0, 0.5, 0.25])).dim == 3


def test_workspace_forward_kinematics():
    spec = ArmSpec(lengths=[1.0, 1.0])
    assert np.allclose(workspace_map(spec, [0.0, 0.0]), [2.0, 0.0])
    assert np.abs(workspace_map(spec, [0.0, np.pi])).max() < 1e-12


def test_workspace_paper_literal():
    spec = ArmSpec(lengths=[1.0, 1.0])
    assert np.allclose(workspace_map(spec, [0.0, 0.0], mode="paper-literal"),
                       [0.0, 0.0])
    assert np.allclose(workspace_map(spec, [0.3, 0.4], mode="paper-literal"),
                       [0.7, 0.0])


def test_arm_lengths_validated():
    with pytest.raises(ValueError):
        ArmSpec(lengths=[1.0, -1.0])


def test_constraint_normalization():
    chart = arm_config_space(ArmSpec(lengths=[1.0, 1.0]))
    for width in (0.3, 0.6):
        density = anti_diagonal_band_constraint(chart, width=width)
        nodes, weights = chart_quadrature(chart, 256)
        mass = float(np.sum(weights * density.signal(nodes)))
        assert mass == pytest.approx(1.0, abs=1e-3)


def test_degenerate_constraint():
    chart = arm_config_space(ArmSpec(lengths=[1.0, 1.0]))
    with pytest.raises(DegenerateConstraintError):
        constraint_to_signal(chart, constant_signal(0.0))


def test_band_edge_probes_on_edge():
    probes = band_edge_probes(8, width=0.3)
    assert probes.shape == (8, 2)
    # distance to the fold line is width/2 for every probe
    s = np.mod(probes @ np.array([1.0, 1.0]) + np.pi, 2 * np.pi) - np.pi
    assert np.allclose(np.abs(s) / np.sqrt(2.0), 0.15)


@pytest.mark.parametrize("width", [0.3, 0.6])
def test_anti_diagonal_band_detection(width):
    spec = ArmSpec(lengths=[1.0, 1.0])
    chart = arm_config_space(spec)
    density = anti_diagonal_band_constraint(chart, width=width)
    probes = band_edge_probes(16, width=width)
    results = boundary_map_pipeline(chart, density, probes, window_spec(np.eye(2)))
    assert len(results) == len(probes)
    hits = 0
    for r in results:
        if r.no_boundary:
            continue
        ang = np.degrees(np.arccos(min(1.0, abs(r.normal @ NORMAL))))
        hits += ang < 5.0
    assert hits >= 14


def test_detection_invariant_under_relabeling():
    spec = ArmSpec(lengths=[1.0, 1.0])
    chart = arm_config_space(spec)
    density = anti_diagonal_band_constraint(chart, width=0.3)
    probe = band_edge_probes(4, width=0.3)[1]
    shifted = probe + 2 * np.pi * np.array([3.0, -2.0])
    r1 = boundary_map_pipeline(chart, density, probe[None, :], window_spec(np.eye(2)))
    r2 = boundary_map_pipeline(chart, density, shifted[None, :], window_spec(np.eye(2)))
    assert np.array_equal(r1[0].normal, r2[0].normal)


def test_probe_far_from_band_flags_no_boundary():
    spec = ArmSpec(lengths=[1.0, 1.0])
    chart = arm_config_space(spec)
    density = anti_diagonal_band_constraint(chart, width=0.3)
    res = boundary_map_pipeline(chart, density, [[np.pi / 2, np.pi / 2]],
                                window_spec(np.eye(2)))
    assert res[0].no_boundary


def test_report_rows_match_probe_count():
    spec = ArmSpec(lengths=[1.0, 1.0])
    chart = arm_config_space(spec)
    density = anti_diagonal_band_constraint(chart, width=0.3)
    probes = band_edge_probes(5, width=0.3)
    results = boundary_map_pipeline(chart, density, probes, window_spec(np.eye(2)),
                                    sphere_resolution=90, nodes_per_axis=31)
    rows = pipeline_csv_rows(results)
    assert len(rows) == 5
    assert all(len(r) == 6 for r in rows)


def test_threaded_pipeline_matches_serial():
    spec = ArmSpec(lengths=[1.0, 1.0])
    chart = arm_config_space(spec)
    density = anti_diagonal_band_constraint(chart, width=0.3)
    probes = band_edge_probes(6, width=0.3)
    kwargs = dict(sphere_resolution=90, nodes_per_axis=31)
    serial = boundary_map_pipeline(chart, density, probes, window_spec(np.eye(2)),
                                   threads=1, **kwargs)
    threaded = boundary_map_pipeline(chart, density, probes, window_spec(np.eye(2)),
                                     threads=4, **kwargs)
    for a, b in zip(serial, threaded):
        assert np.array_equal(a.normal, b.normal)
        assert a.contrast == b.contrast
