import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from contact_gabor.svgplot import render_svg_heatmap

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = Path(__file__).resolve().parent / "golden"


def run_cli(args, cwd=ROOT):
    return subprocess.run(
        [sys.executable, "-m", "contact_gabor.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


def write(path, text):
    path.write_text(text)
    return path


SMALL_DETECT = """
[manifold]
kind = "flat-torus"
radii = [1.0, 1.0]

[window]
a = 1.0

[signal]
kind = "half-space"
axis = 0
threshold = 3.14159265358979312

[probes]
points = [[3.14159265358979312, 1.0], [3.14159265358979312, 2.0],
          [1.5707963267948966, 1.0]]

[detection]
directions = 180

[grid]
nodes_per_axis = 31
"""

SMALL_ARM = """
[arm]
lengths = [1.0, 1.0]
band_width = 0.3
probe_count = 6

[window]
a = 1.0

[detection]
directions = 180

[grid]
nodes_per_axis = 31
"""

SMALL_FRAME = """
[manifold]
kind = "flat-torus"
radii = [1.0]

[window]
a = 3.14159265358979312

[lattice]
b_scales = [0.7]
c_scales = [0.7]
truncation = 2
"""

SMALL_BARGMANN = """
[window]
a = 3.14159265358979312

[fock]
random_checks = 3
"""


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_detect_writes_three_files(tmp_path):
    cfg = write(tmp_path / "c.toml", SMALL_DETECT)
    res = run_cli(["detect", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert res.returncode == 0, res.stderr
    names = sorted(p.name for p in (tmp_path / "o").iterdir())
    assert names == ["detect_fields.csv", "detect_heatmap.svg", "detect_normals.csv"]
    rows = read_csv(tmp_path / "o" / "detect_normals.csv")
    assert len(rows) == 4  # header + 3 probes
    assert rows[0][-1] == "no_boundary"
    assert rows[3][-1] == "1"  # interior probe flags no boundary


def test_golden_halfspace_normals(tmp_path):
    res = run_cli([
        "detect", "--config", str(ROOT / "configs" / "halfspace_demo.toml"),
        "--out", str(tmp_path),
    ])
    assert res.returncode == 0, res.stderr
    got = read_csv(tmp_path / "detect_normals.csv")
    want = read_csv(GOLDEN / "halfspace_normals.csv")
    assert got[0] == want[0]
    assert len(got) == len(want)
    for grow, wrow in zip(got[1:], want[1:]):
        for gval, wval in zip(grow, wrow):
            assert abs(float(gval) - float(wval)) < 1e-6


def test_thread_count_determinism(tmp_path):
    outs = []
    for cmd, cfg_text in (
        ("detect", SMALL_DETECT),
        ("frame-check", SMALL_FRAME),
        ("bargmann-verify", SMALL_BARGMANN),
        ("arm-demo", SMALL_ARM),
    ):
        cfg = write(tmp_path / f"{cmd}.toml", cfg_text)
        for threads in ("1", "4"):
            out = tmp_path / f"{cmd}-{threads}"
            res = run_cli([cmd, "--config", str(cfg), "--out", str(out),
                           "--threads", threads])
            assert res.returncode == 0, res.stderr
        for fname in sorted((tmp_path / f"{cmd}-1").iterdir()):
            a = fname.read_bytes()
            b = (tmp_path / f"{cmd}-4" / fname.name).read_bytes()
            assert a == b, f"{cmd}/{fname.name} differs between thread counts"
        outs.append(cmd)
    assert len(outs) == 4


def test_malformed_toml_exit_2(tmp_path):
    cfg = write(tmp_path / "bad.toml", "[manifold\nkind =")
    res = run_cli(["detect", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert res.returncode == 2


def test_unknown_key_exit_2(tmp_path):
    cfg = write(tmp_path / "bad.toml", "[mystery]\nx = 1\n")
    res = run_cli(["detect", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert res.returncode == 2


def test_budget_exceeded_exit_1(tmp_path):
    cfg = write(tmp_path / "big.toml", SMALL_DETECT.replace(
        "nodes_per_axis = 31", "nodes_per_axis = 1000000"))
    out = tmp_path / "o"
    res = run_cli(["detect", "--config", str(cfg), "--out", str(out)])
    assert res.returncode == 1
    report = json.loads((out / "error_report.json").read_text())
    assert report["error"] == "BudgetExceededError"


def test_frame_check_certificates(tmp_path):
    for cfg_name, cert in (("frame_check_049.toml", "frame-certified"),
                           ("frame_check_121.toml", "unknown")):
        out = tmp_path / cfg_name
        res = run_cli(["frame-check", "--config",
                       str(ROOT / "configs" / cfg_name), "--out", str(out)])
        assert res.returncode == 0, res.stderr
        rep = json.loads((out / "frame_report.json").read_text())
        assert rep["certificate"] == cert
        assert len(rep["trace"]) == 3
    rep049 = json.loads((tmp_path / "frame_check_049.toml" / "frame_report.json").read_text())
    assert rep049["a_est"] > 0.05
    rep121 = json.loads((tmp_path / "frame_check_121.toml" / "frame_report.json").read_text())
    assert rep121["trace"][0][1] >= 10 * rep121["trace"][2][1]


def test_bargmann_verify_default_passes(tmp_path):
    cfg = write(tmp_path / "c.toml", SMALL_BARGMANN)
    res = run_cli(["bargmann-verify", "--config", str(cfg),
                   "--out", str(tmp_path / "o")])
    assert res.returncode == 0, res.stderr
    rep = json.loads((tmp_path / "o" / "bargmann_report.json").read_text())
    assert rep["all_pass"]
    names = [r["identity"] for r in rep["identities"]]
    assert "norm_lemma" in names and "embedding" in names


def test_bargmann_verify_4pi_embedding_informational(tmp_path):
    cfg = write(tmp_path / "c.toml",
                SMALL_BARGMANN.replace("a = 3.14159265358979312",
                                        "a = 12.566370614359172"))
    res = run_cli(["bargmann-verify", "--config", str(cfg),
                   "--out", str(tmp_path / "o")])
    assert res.returncode == 0, res.stderr
    rep = json.loads((tmp_path / "o" / "bargmann_report.json").read_text())
    emb = [r for r in rep["identities"] if r["identity"] == "embedding"][0]
    assert emb["embeds"] is False
    assert rep["all_pass"]


def test_bargmann_verify_no_config_uses_defaults(tmp_path):
    res = run_cli(["bargmann-verify", "--out", str(tmp_path / "o")])
    assert res.returncode == 0, res.stderr


def test_arm_demo_rows_and_accuracy(tmp_path):
    res = run_cli(["arm-demo", "--config",
                   str(ROOT / "configs" / "arm_demo.toml"),
                   "--out", str(tmp_path)])
    assert res.returncode == 0, res.stderr
    rows = read_csv(tmp_path / "arm_pipeline.csv")
    assert rows[0] == ["probe_theta1", "probe_theta2", "normal_theta_component1",
                       "normal_theta_component2", "contrast", "flag"]
    assert len(rows) == 17
    u = np.array([1.0, 1.0]) / np.sqrt(2)
    hits = 0
    for row in rows[1:]:
        if row[5] == "1":
            continue
        n = np.array([float(row[2]), float(row[3])])
        ang = np.degrees(np.arccos(min(1.0, abs(n @ u))))
        hits += ang < 5.0
    assert hits >= 14


def test_arm_demo_zero_probes(tmp_path):
    cfg = write(tmp_path / "c.toml", SMALL_ARM.replace("probe_count = 6",
                                                       "probe_count = 0"))
    res = run_cli(["arm-demo", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert res.returncode == 0, res.stderr
    rows = read_csv(tmp_path / "o" / "arm_pipeline.csv")
    assert len(rows) == 1  # header only


def test_svg_single_value_and_ring():
    one = render_svg_heatmap([2.0])
    assert one.count("<rect") == 1
    assert "min=2" in one and "max=2" in one
    ring = render_svg_heatmap(np.sin(np.linspace(0, 2 * np.pi, 360)))
    assert ring.count("<path") == 360


def test_svg_byte_deterministic():
    vals = np.linspace(0.0, 1.0, 77)
    assert render_svg_heatmap(vals) == render_svg_heatmap(vals.copy())


def test_env_threads_respected(tmp_path, monkeypatch):
    cfg = write(tmp_path / "c.toml", SMALL_ARM)
    out1 = tmp_path / "env2"
    res = subprocess.run(
        [sys.executable, "-m", "contact_gabor.cli", "arm-demo", "--config",
         str(cfg), "--out", str(out1)],
        capture_output=True, text=True, cwd=ROOT,
        env={**__import__("os").environ, "CONTACT_GABOR_THREADS": "2"},
    )
    assert res.returncode == 0, res.stderr
