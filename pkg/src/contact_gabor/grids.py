"""Quadrature grids: Gauss-Legendre tensor products and direction sets."""

import numpy as np


def gauss_legendre_axis(half_width, n_nodes):
    """Nodes and weights of n-point Gauss-Legendre on [-half_width, half_width]."""
    x, w = np.polynomial.legendre.leggauss(int(n_nodes))
    return x * half_width, w * half_width


def tensor_grid(axis_nodes, axis_weights):
    """Tensor-product grid from per-axis 1D rules.

    Returns (nodes, weights): nodes has shape (prod(N_i), dim) in row-major
    (last axis fastest) order, weights the matching products.
    """
    grids = np.meshgrid(*axis_nodes, indexing="ij")
    nodes = np.stack([g.reshape(-1) for g in grids], axis=-1)
    wgrids = np.meshgrid(*axis_weights, indexing="ij")
    weights = np.ones(nodes.shape[0])
    for wg in wgrids:
        weights = weights * wg.reshape(-1)
    return nodes, weights


def sphere_directions(dim, count):
    """Deterministic direction set on the unit sphere S^(dim-1).

    dim=2 uses uniformly spaced angles, dim=3 a Fibonacci sphere; higher
    dimensions fall back to a seeded Gaussian-normalized set (deterministic
    for a given count, used only outside the certified low-dimensional paths).
    """
    count = int(count)
    if count < 1:
        raise ValueError("direction count must be positive")
    if dim == 1:
        return np.array([[1.0], [-1.0]])[: max(count, 1)]
    if dim == 2:
        ang = 2.0 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(ang), np.sin(ang)])
    if dim == 3:
        k = np.arange(count)
        golden = (1.0 + np.sqrt(5.0)) / 2.0
        z = 1.0 - (2.0 * k + 1.0) / count
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        phi = 2.0 * np.pi * k / golden
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    rng = np.random.default_rng(count * 1000003 + dim)
    v = rng.normal(size=(count, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sphere_measure(dim):
    """Total measure of the round unit sphere S^(dim-1)."""
    from math import gamma, pi

    return 2.0 * pi ** (dim / 2.0) / gamma(dim / 2.0)


def chart_quadrature(chart, resolution):
    """Quadrature rule over the chart box.

    Periodic axes use the trapezoid rule (uniform nodes, since endpoints are
    identified); non-periodic axes use the midpoint rule to stay clear of
    possibly degenerate box edges.
    """
    axis_nodes = []
    axis_weights = []
    for i in range(chart.dim):
        lo, hi = chart.box_lo[i], chart.box_hi[i]
        width = hi - lo
        if chart.periodic[i]:
            nodes = lo + width * np.arange(resolution) / resolution
        else:
            nodes = lo + width * (np.arange(resolution) + 0.5) / resolution
        axis_nodes.append(nodes)
        axis_weights.append(np.full(resolution, width / resolution))
    return tensor_grid(axis_nodes, axis_weights)
