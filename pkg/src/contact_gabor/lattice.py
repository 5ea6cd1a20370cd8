"""Framed lattices in the fibers of E + E^dual.

Translation generators come from the Reeb vectors (Reeb variant) or from
the dual basis of the contact covectors (dual-basis variant); modulation
generators are scaled contact covectors. Truncated integer combinations
provide the finite Gabor shift sets used downstream.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .contact import ContactFrame, contact_frame, cosphere_point
from .errors import BudgetExceededError

ENUM_BUDGET = 10**7
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class LatticeSpec:
    """Scales and truncation for the framed lattice.

    variant: "reeb" or "dual-basis". b_scales multiply the translation
    generators, c_scales the modulation generators; truncation bounds each
    integer index by [-K, K].
    """

    variant: str = "reeb"
    b_scales: np.ndarray = None
    c_scales: np.ndarray = None
    truncation: int = 4

    def __post_init__(self):
        object.__setattr__(self, "b_scales", np.atleast_1d(np.asarray(self.b_scales, dtype=float)))
        object.__setattr__(self, "c_scales", np.atleast_1d(np.asarray(self.c_scales, dtype=float)))
        if self.variant not in ("reeb", "dual-basis"):
            raise ValueError(f"unknown lattice variant {self.variant!r}")
        if not np.all(np.isfinite(self.b_scales)) or np.any(self.b_scales == 0):
            raise ValueError("translation scales must be finite and nonzero")
        if not np.all(np.isfinite(self.c_scales)) or np.any(self.c_scales == 0):
            raise ValueError("modulation scales must be finite and nonzero")
        if self.truncation < 0:
            raise ValueError("truncation must be nonnegative")


@dataclass(frozen=True)
class LatticeFrame:
    """2n generators at one cosphere point: rows of translations/modulations."""

    frame: ContactFrame
    spec: LatticeSpec
    translations: np.ndarray
    modulations: np.ndarray
    degenerate: bool


def build_lattice_frame(frame, spec):
    """Scaled generators from a contact frame.

    The dual-basis variant solves <F_j, V_i> = delta_ij; a singular system
    only sets the degeneracy flag (such points fall outside the dense open
    set where the lattice bundle has full rank).
    """
    covs = np.asarray(frame.covectors, dtype=float)
    n = covs.shape[0]
    if spec.b_scales.size != n or spec.c_scales.size != n:
        raise ValueError("scale vectors must have one entry per generator")
    mods = spec.c_scales[:, None] * covs
    degenerate = False
    if spec.variant == "reeb":
        base = np.asarray(frame.reeb, dtype=float)
    else:
        if abs(np.linalg.det(covs)) <= DEGENERACY_TOL:
            degenerate = True
            base = np.zeros_like(covs)
        else:
            # columns of inv(covs) are the dual basis of the covector rows
            base = np.linalg.inv(covs).T
    trans = spec.b_scales[:, None] * base
    lf = LatticeFrame(frame=frame, spec=spec, translations=trans,
                      modulations=mods, degenerate=degenerate)
    if not degenerate and abs(np.linalg.det(generator_matrix(lf))) <= DEGENERACY_TOL:
        lf = LatticeFrame(frame=frame, spec=spec, translations=trans,
                          modulations=mods, degenerate=True)
    return lf


def generator_matrix(lf):
    """Block-diagonal (2n, 2n) matrix of generator columns."""
    n = lf.translations.shape[1]
    out = np.zeros((2 * n, 2 * n))
    out[:n, :n] = lf.translations.T
    out[n:, n:] = lf.modulations.T
    return out


def enumerate_lattice_points(lf, truncation=None):
    """All truncated integer combinations in deterministic lexicographic order.

    Returns (indices, translations, modulations) with one row per lattice
    point; indices run over [-K, K]^(2n), first the translation block.
    """
    if lf.degenerate:
        raise ValueError("cannot enumerate a degenerate lattice frame")
    if truncation is None:
        raise ValueError("truncation K is required")
    K = int(truncation)
    n = lf.translations.shape[0]
    count = (2 * K + 1) ** (2 * n)
    if count > ENUM_BUDGET:
        raise BudgetExceededError(count, ENUM_BUDGET)
    rng = range(-K, K + 1)
    indices = np.array(list(itertools.product(rng, repeat=2 * n)), dtype=int)
    trans = indices[:, :n] @ lf.translations
    mods = indices[:, n:] @ lf.modulations
    return indices, trans, mods


def degenerate_locus_probe(chart, spec, samples, seed=0, structure=None,
                           frame_fn=None):
    """Fraction of uniformly sampled cosphere points with degenerate lattices."""
    if samples < 1:
        raise ValueError("sample count must be at least 1")
    rng = np.random.default_rng(seed)
    build = frame_fn or (lambda c, m: contact_frame(c, m, structure=structure))
    bad = 0
    for _ in range(samples):
        b = chart.box_lo + rng.random(chart.dim) * chart.box_width
        p = rng.normal(size=chart.dim)
        while np.linalg.norm(p) < 1e-12:
            p = rng.normal(size=chart.dim)
        m = cosphere_point(chart, b, p)
        frame = build(chart, m)
        lf = build_lattice_frame(frame, spec)
        bad += int(lf.degenerate)
    return bad / samples
