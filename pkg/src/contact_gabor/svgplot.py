"""Dependency-free SVG emitters; byte-deterministic for identical input."""

import numpy as np

_STOPS = [
    (0.0, (68, 1, 84)),
    (0.25, (59, 82, 139)),
    (0.5, (33, 145, 140)),
    (0.75, (94, 201, 98)),
    (1.0, (253, 231, 37)),
]


def _color(t):
    t = min(max(float(t), 0.0), 1.0)
    for (t0, c0), (t1, c1) in zip(_STOPS, _STOPS[1:]):
        if t <= t1:
            u = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
            rgb = tuple(round(a + u * (b - a)) for a, b in zip(c0, c1))
            return "#%02x%02x%02x" % rgb
    return "#%02x%02x%02x" % _STOPS[-1][1]


def _fmt(x):
    return format(float(x), ".6f")


def render_svg_heatmap(values, axis_label="direction"):
    """Heatmap of a value sequence: one cell for a single value, otherwise a
    ring with one annular sector per value. Linear color map, min/max
    annotated."""
    values = np.atleast_1d(np.asarray(values, dtype=float))
    if values.size == 0:
        raise ValueError("need at least one value")
    vmin = float(values.min())
    vmax = float(values.max())
    span = vmax - vmin
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="420" height="460" '
        'viewBox="0 0 420 460">'
    ]
    if values.size == 1:
        parts.append(
            f'<rect x="60" y="60" width="300" height="300" fill="{_color(0.5)}" />'
        )
    else:
        cx, cy, r0, r1 = 210.0, 210.0, 90.0, 180.0
        k = values.size
        for i, v in enumerate(values):
            t = 0.5 if span == 0.0 else (v - vmin) / span
            a0 = 2.0 * np.pi * i / k
            a1 = 2.0 * np.pi * (i + 1) / k
            x00, y00 = cx + r0 * np.cos(a0), cy - r0 * np.sin(a0)
            x01, y01 = cx + r1 * np.cos(a0), cy - r1 * np.sin(a0)
            x11, y11 = cx + r1 * np.cos(a1), cy - r1 * np.sin(a1)
            x10, y10 = cx + r0 * np.cos(a1), cy - r0 * np.sin(a1)
            path = (
                f"M {_fmt(x00)} {_fmt(y00)} L {_fmt(x01)} {_fmt(y01)} "
                f"A {_fmt(r1)} {_fmt(r1)} 0 0 0 {_fmt(x11)} {_fmt(y11)} "
                f"L {_fmt(x10)} {_fmt(y10)} "
                f"A {_fmt(r0)} {_fmt(r0)} 0 0 1 {_fmt(x00)} {_fmt(y00)} Z"
            )
            parts.append(f'<path d="{path}" fill="{_color(t)}" stroke="none" />')
    parts.append(
        f'<text x="10" y="420" font-family="monospace" font-size="14">'
        f"min={format(vmin, '.17g')}</text>"
    )
    parts.append(
        f'<text x="10" y="440" font-family="monospace" font-size="14">'
        f"max={format(vmax, '.17g')}</text>"
    )
    parts.append(
        f'<text x="10" y="30" font-family="monospace" font-size="14">{axis_label}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts)


def render_torus_probes(probes, normals, flags, box=2.0 * np.pi):
    """Square torus plot with probe dots and detected normal ticks."""
    probes = list(probes)
    normals = list(normals)
    flags = list(flags)
    size = 400.0
    pad = 30.0
    scale = size / box
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="460" height="460" '
        'viewBox="0 0 460 460">',
        f'<rect x="{_fmt(pad)}" y="{_fmt(pad)}" width="{_fmt(size)}" '
        f'height="{_fmt(size)}" fill="#f7f7f7" stroke="#333" />',
    ]
    tick = 18.0
    for (b, nrm, flg) in zip(probes, normals, flags):
        x = pad + b[0] * scale
        y = pad + size - b[1] * scale
        color = "#999999" if flg else "#c03020"
        parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="4" fill="{color}" />')
        if not flg and np.linalg.norm(nrm) > 0:
            dx, dy = nrm[0], nrm[1]
            parts.append(
                f'<line x1="{_fmt(x - tick * dx)}" y1="{_fmt(y + tick * dy)}" '
                f'x2="{_fmt(x + tick * dx)}" y2="{_fmt(y - tick * dy)}" '
                'stroke="#1040c0" stroke-width="2" />'
            )
    parts.append("</svg>")
    return "\n".join(parts)
