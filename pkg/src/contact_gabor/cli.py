"""Batch front door: detect | frame-check | bargmann-verify | arm-demo.

Exit codes: 0 success, 1 numerical or budget failure (with a JSON error
report in the output directory), 2 configuration error.
"""

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .bargmann import verification_suite
from .config import (
    budget_caps,
    build_manifold,
    build_signal,
    build_window_matrix,
    load_config,
    probe_points,
    resolve_threads,
)
from .contact import contact_frame, cosphere_point
from .errors import BudgetExceededError, ConfigError, ContactGaborError
from .gabor import detect_boundary_normal, frame_bounds_estimate, window_spec
from .lattice import LatticeSpec, build_lattice_frame
from .manifold import reduce_point
from .robotics import (
    ArmSpec,
    anti_diagonal_band_constraint,
    arm_config_space,
    band_edge_probes,
    boundary_map_pipeline,
    pipeline_csv_rows,
)
from .svgplot import render_svg_heatmap, render_torus_probes


def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _check_grid_budget(cfg, dim):
    max_nodes, _ = budget_caps(cfg)
    nodes = int(cfg.grid.get("nodes_per_axis", 61))
    if nodes**dim > max_nodes:
        raise BudgetExceededError(nodes**dim, max_nodes)
    return nodes


def run_detect(cfg, out_dir, seed=0, threads=1):
    chart = build_manifold(cfg)
    nodes = _check_grid_budget(cfg, chart.dim)
    signal = build_signal(cfg, chart)
    amat = build_window_matrix(cfg, chart.dim)
    spec = window_spec(amat)
    probes = probe_points(cfg, chart.dim)
    directions = int(cfg.detection.get("directions", 720))
    tau = float(cfg.detection.get("contrast_threshold", 0.05))
    refine = int(cfg.detection.get("refine_steps", 10))

    def run_one(idx):
        b = reduce_point(chart, probes[idx])
        return detect_boundary_normal(
            signal, chart, b, spec, sphere_resolution=directions,
            contrast_threshold=tau, nodes_per_axis=nodes, refine_steps=refine,
        )

    if threads > 1 and probes.shape[0] > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            dets = list(pool.map(run_one, range(probes.shape[0])))
    else:
        dets = [run_one(i) for i in range(probes.shape[0])]

    n = chart.dim
    normal_rows = []
    field_rows = []
    for i, det in enumerate(dets):
        normal = det.normal if det.normal is not None else np.zeros(n)
        normal_rows.append(
            list(probes[i]) + list(normal) + [det.contrast, int(det.no_boundary)]
        )
        for row in det.field.to_csv_rows():
            field_rows.append([i] + row)
    header = (
        [f"probe_{k+1}" for k in range(n)]
        + [f"normal_{k+1}" for k in range(n)]
        + ["contrast", "no_boundary"]
    )
    angle_cols = {2: ["angle_rad"], 3: ["colatitude_rad", "longitude_rad"]}.get(
        n, [f"dir_{k+1}" for k in range(n)]
    )
    out = Path(out_dir)
    normals_path = out / "detect_normals.csv"
    fields_path = out / "detect_fields.csv"
    svg_path = out / "detect_heatmap.svg"
    _write_csv(normals_path, header, normal_rows)
    _write_csv(fields_path, ["probe_index"] + angle_cols + ["re_o", "im_o", "abs_o"],
               field_rows)
    mags = np.abs(dets[0].field.values) if dets else np.zeros(1)
    svg_path.write_text(render_svg_heatmap(mags, axis_label="|O| vs direction"))
    return [normals_path, fields_path, svg_path]


def run_frame_check(cfg, out_dir, seed=0, threads=1):
    chart = build_manifold(cfg)
    amat = build_window_matrix(cfg, chart.dim)
    spec = window_spec(amat)
    b0 = np.asarray(cfg.point.get("b", np.zeros(chart.dim)), dtype=float)
    p0 = np.asarray(cfg.point.get("p", np.eye(chart.dim)[0]), dtype=float)
    m = cosphere_point(chart, b0, p0)
    frame = contact_frame(chart, m)
    lat = dict(cfg.lattice)
    lspec = LatticeSpec(
        variant=lat.get("variant", "reeb"),
        b_scales=np.asarray(lat.get("b_scales", [0.7] * chart.dim), dtype=float),
        c_scales=np.asarray(lat.get("c_scales", [0.7] * chart.dim), dtype=float),
        truncation=int(lat.get("truncation", 4)),
    )
    lf = build_lattice_frame(frame, lspec)
    _, max_atoms = budget_caps(cfg)
    count = (2 * lspec.truncation + 1) ** (2 * chart.dim)
    if count > max_atoms:
        raise BudgetExceededError(count, max_atoms)
    report = frame_bounds_estimate(
        chart, lf, spec,
        truncation=lspec.truncation,
        nodes_per_unit=int(cfg.frame.get("nodes_per_unit", 16)),
        margin=float(cfg.frame.get("margin", 3.5)),
        iters=int(cfg.frame.get("iters", 20000)),
        tol=float(cfg.frame.get("tol", 1e-8)),
        seed=seed,
    )
    out = Path(out_dir)
    path = out / "frame_report.json"
    path.write_text(report.to_json() + "\n")
    return [path]


def run_bargmann_verify(cfg, out_dir, seed=0, threads=1):
    dim = 1
    if "a_matrix" in cfg.window:
        dim = len(cfg.window["a_matrix"])
    amat = build_window_matrix(cfg, dim)
    results, all_pass = verification_suite(
        amat,
        seed=seed,
        half_width=float(cfg.fock.get("half_width", 4.0)),
        z_nodes=int(cfg.fock.get("nodes_per_axis", 41)),
        random_checks=int(cfg.fock.get("random_checks", 20)),
        fiber_nodes=int(cfg.grid.get("nodes_per_axis", 61)),
    )
    out = Path(out_dir)
    path = out / "bargmann_report.json"
    _write_json(path, {"identities": results, "all_pass": all_pass})
    if not all_pass:
        raise ContactGaborError("bargmann verification suite failed")
    return [path]


def run_arm_demo(cfg, out_dir, seed=0, threads=1):
    arm = dict(cfg.arm)
    lengths = np.asarray(arm.get("lengths", [1.0, 1.0]), dtype=float)
    spec_arm = ArmSpec(lengths=lengths)
    chart = arm_config_space(spec_arm)
    if chart.dim != 2:
        raise ConfigError("the arm demo runs on a two-joint arm")
    nodes = _check_grid_budget(cfg, chart.dim)
    width = float(arm.get("band_width", 0.3))
    count = int(arm.get("probe_count", 16))
    density = anti_diagonal_band_constraint(chart, width=width)
    probes = band_edge_probes(count=count, width=width)
    amat = build_window_matrix(cfg, chart.dim)
    wspec = window_spec(amat)
    results = boundary_map_pipeline(
        chart, density, probes, wspec,
        sphere_resolution=int(cfg.detection.get("directions", 720)),
        contrast_threshold=float(cfg.detection.get("contrast_threshold", 0.05)),
        nodes_per_axis=nodes,
        threads=threads,
    )
    out = Path(out_dir)
    csv_path = out / "arm_pipeline.csv"
    svg_path = out / "arm_probes.svg"
    _write_csv(
        csv_path,
        ["probe_theta1", "probe_theta2", "normal_theta_component1",
         "normal_theta_component2", "contrast", "flag"],
        pipeline_csv_rows(results),
    )
    svg_path.write_text(
        render_torus_probes(
            [r.probe for r in results],
            [r.normal for r in results],
            [r.no_boundary for r in results],
        )
    )
    return [csv_path, svg_path]


_COMMANDS = {
    "detect": run_detect,
    "frame-check": run_frame_check,
    "bargmann-verify": run_bargmann_verify,
    "arm-demo": run_arm_demo,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="contact-gabor",
        description="Gabor analysis on manifolds: boundary detection, frame "
        "bounds, Bargmann verification, and the planar-arm demo.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=False, default=None,
                       help="TOML run configuration")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=0, help="seed for random suites")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (overrides config and environment)")
    args = parser.parse_args(argv)

    try:
        if args.config is None:
            from .config import RunConfig

            cfg = RunConfig()
        else:
            cfg = load_config(args.config)
        threads = resolve_threads(cfg, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        paths = _COMMANDS[args.command](cfg, out_dir, seed=args.seed,
                                        threads=threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # numerical/budget failures -> exit 1 + report
        report = {
            "command": args.command,
            "error": type(exc).__name__,
            "message": str(exc),
        }
        _write_json(out_dir / "error_report.json", report)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
