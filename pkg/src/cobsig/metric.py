"""Discrete Riemannian metrics as edge lengths.

The metric on a complex is a positive length per 1-skeleton edge, in the
style of piecewise-flat (edge-length) geometry: each simplex is the flat
simplex determined by its edge lengths, volumes come from the Cayley-Menger
determinant, and conformal deformation rescales edges by the square root of
the endpoint-averaged conformal factor.

All metric fields are immutable after construction; the volume computations
are pure functions.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .complex import CobordismComplex, REGION_TAGS
from .errors import MetricError, RegionError
from .fields import ScalarField

#: Simplex volumes below EPS_VOL * (mean edge length)^d are rejected.
EPS_VOL = 1e-10


class MetricField:
    """Positive lengths over a fixed edge set.

    Rows of ``edges`` are canonical (u < v) and lexsorted; ``source`` is
    "induced" for ambient-Euclidean metrics and "deformed" after conformal
    scaling.
    """

    def __init__(self, edges, lengths, source: str):
        e = np.array(edges, dtype=np.int64).reshape(-1, 2)
        if np.any(e[:, 0] >= e[:, 1]):
            raise MetricError("edges must be canonical (u, v) pairs with u < v")
        order = np.lexsort((e[:, 1], e[:, 0]))
        e = e[order]
        ln = np.array(lengths, dtype=np.float64)[order]
        if len(ln) != len(e):
            raise MetricError("one length per edge required")
        if np.any(~np.isfinite(ln)) or np.any(ln <= 0.0):
            k = int(np.argmin(ln))
            raise MetricError(
                f"nonpositive length {ln[k]!r} on edge {tuple(e[k])}"
            )
        e.flags.writeable = False
        ln.flags.writeable = False
        self.edges = e
        self.lengths = ln
        self.source = source
        nv = int(e.max()) + 1 if len(e) else 0
        self._codes = e[:, 0] * np.int64(nv + 1) + e[:, 1]
        self._nv_plus = np.int64(nv + 1)

    @property
    def edge_lengths(self) -> dict:
        """Mapping from (u, v) pairs (u < v) to lengths."""
        return {
            (int(u), int(v)): float(l)
            for (u, v), l in zip(self.edges, self.lengths)
        }

    def length(self, u: int, v: int) -> float:
        return float(self.pair_lengths(np.array([[u, v]], dtype=np.int64))[0])

    def pair_lengths(self, pairs: np.ndarray) -> np.ndarray:
        """Lengths for an (m, 2) array of vertex pairs (any order)."""
        p = np.asarray(pairs, dtype=np.int64)
        lo = np.minimum(p[..., 0], p[..., 1])
        hi = np.maximum(p[..., 0], p[..., 1])
        codes = lo * self._nv_plus + hi
        idx = np.searchsorted(self._codes, codes)
        ok = (idx < len(self._codes)) & (
            self._codes[np.minimum(idx, len(self._codes) - 1)] == codes
        )
        if not np.all(ok):
            k = np.argwhere(~ok).ravel()[0]
            raise MetricError(f"edge {int(lo.flat[k]), int(hi.flat[k])} not in metric")
        return self.lengths[idx]

def induced_metric(cx: CobordismComplex) -> MetricField:
    """Edge lengths induced by the ambient Euclidean embedding."""
    edges = cx.edges()
    diff = cx.vertices[edges[:, 0]] - cx.vertices[edges[:, 1]]
    lengths = np.sqrt(np.sum(diff * diff, axis=1))
    if np.any(lengths <= 0.0):
        k = int(np.argmin(lengths))
        raise MetricError(
            f"coincident vertices on edge {tuple(edges[k])}: zero length"
        )
    return MetricField(edges, lengths, "induced")


def conformal_scale(metric: MetricField, factor) -> MetricField:
    """Deform a metric by a positive per-vertex conformal factor.

    Each edge (u, v) is rescaled by sqrt((a(u) + a(v)) / 2), i.e. the factor
    is sampled at the edge midpoint by the arithmetic mean of its endpoint
    values.  A factor identically 1 returns bit-identical lengths.
    """
    a = np.asarray(getattr(factor, "values", factor), dtype=np.float64)
    if np.any(~np.isfinite(a)) or np.any(a <= 0.0):
        raise MetricError("conformal factor must be positive and finite")
    mean = (a[metric.edges[:, 0]] + a[metric.edges[:, 1]]) / 2.0
    return MetricField(metric.edges, metric.lengths * np.sqrt(mean), "deformed")


def _cayley_menger_vol2(sq: np.ndarray, q: int) -> np.ndarray:
    """Squared q-volumes from an (m, q+1, q+1) matrix of squared lengths."""
    m = sq.shape[0]
    B = np.ones((m, q + 2, q + 2), dtype=np.float64)
    B[:, 0, 0] = 0.0
    B[:, 1:, 1:] = sq
    det = np.linalg.det(B)
    coeff = (-1.0) ** (q + 1) / (2.0**q * math.factorial(q) ** 2)
    return coeff * det


def _squared_length_matrix(metric: MetricField, simplices: np.ndarray) -> np.ndarray:
    simp = np.asarray(simplices, dtype=np.int64)
    m, qp1 = simp.shape
    sq = np.zeros((m, qp1, qp1), dtype=np.float64)
    for i, j in itertools.combinations(range(qp1), 2):
        l = metric.pair_lengths(simp[:, [i, j]])
        sq[:, i, j] = l * l
        sq[:, j, i] = sq[:, i, j]
    return sq


def simplex_volumes(metric: MetricField, simplices) -> np.ndarray:
    """Cayley-Menger volumes of a batch of simplices (rows of indices).

    Raises MetricError when a simplex violates the simplex inequalities
    (nonpositive squared volume) or is thinner than the EPS_VOL threshold,
    which signals an invalid metric deformation.
    """
    simp = np.asarray(simplices, dtype=np.int64)
    if simp.ndim == 1:
        simp = simp[None, :]
    q = simp.shape[1] - 1
    if q == 1:
        return metric.pair_lengths(simp)
    sq = _squared_length_matrix(metric, simp)
    vol2 = _cayley_menger_vol2(sq, q)
    if np.any(vol2 <= 0.0):
        k = int(np.argmin(vol2))
        raise MetricError(
            f"simplex {tuple(simp[k])} has nonpositive squared volume "
            f"{vol2[k]:.3e}: metric violates the simplex inequalities"
        )
    vol = np.sqrt(vol2)
    n_edges = q * (q + 1) // 2
    mean_len = np.zeros(len(simp))
    for i, j in itertools.combinations(range(q + 1), 2):
        mean_len += metric.pair_lengths(simp[:, [i, j]])
    mean_len /= n_edges
    floor = EPS_VOL * mean_len**q
    if np.any(vol < floor):
        k = int(np.argmin(vol - floor))
        raise MetricError(
            f"simplex {tuple(simp[k])} is degenerate: volume {vol[k]:.3e} "
            f"below threshold {floor[k]:.3e}"
        )
    return vol


def simplex_volume(metric: MetricField, simplex) -> float:
    """Volume of one simplex given as a tuple of vertex indices."""
    return float(simplex_volumes(metric, np.asarray(simplex)[None, :])[0])


def lumped_vertex_volume(signal) -> ScalarField:
    """Quadrature weights: each vertex gets 1/(d+1) of incident simplex volumes.

    The weights partition the total volume exactly (up to float summation).
    """
    cx = signal.complex
    vols = signal.simplex_volumes()
    d = cx.dim
    w = np.zeros(cx.n_vertices, dtype=np.float64)
    share = vols / (d + 1)
    for col in range(d + 1):
        np.add.at(w, cx.simplices[:, col], share)
    return ScalarField(w)


def total_volume(signal) -> float:
    """Sum of top-simplex volumes."""
    return float(np.sum(signal.simplex_volumes()))


def region_volume(signal, tag: str) -> float:
    """Volume of a labeled boundary region with its induced metric.

    Facets are (d-1)-simplices; their Cayley-Menger volume uses the same
    edge lengths as the bulk metric.
    """
    if tag not in REGION_TAGS:
        raise RegionError(f"unknown region tag {tag!r}")
    facets = sorted(signal.complex.labels[tag])
    if not facets:
        raise RegionError(f"region {tag!r} has no facets")
    arr = np.array(facets, dtype=np.int64)
    return float(np.sum(simplex_volumes(signal.metric, arr)))
