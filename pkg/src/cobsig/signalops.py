"""Noise injection, filter extraction, and composition of signals.

Noise is a local conformal deformation: a bump factor equal to epsilon on a
small inner ball, 1 outside a larger ball, and smoothly increasing between.
A filter keeps a connected subcomplex containing all of region A; freshly
exposed interior facets join region B.  Composition glues the Y boundary of
one signal to the X boundary of another along an explicit vertex
correspondence.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .complex import build_complex, region_vertices
from .errors import CobsigError, CompositionError, FilterError, NoiseError
from .fields import ScalarField
from .geodesy import DEFAULT_STEINER_LEVEL, distance_to_vertex
from .metric import MetricField, conformal_scale
from .signal import Signal, make_signal


@dataclass(frozen=True)
class NoiseSpec:
    """A conformal noise ball: center vertex, radii, and depth.

    The closed delta-ball must avoid the closures of regions A and X so the
    modulation integrals keep positive integrands; that geometric condition
    depends on the signal and is checked by ``check_noise_spec``.
    """

    center: int
    delta0: float
    delta: float
    epsilon: float

    def __post_init__(self):
        if not 0.0 < self.delta0 < self.delta:
            raise NoiseError("need 0 < delta0 < delta")
        if not 0.0 < self.epsilon < 1.0:
            raise NoiseError("epsilon must lie in (0, 1)")


@dataclass(frozen=True)
class Correspondence:
    """Explicit vertex pairing for gluing: rows of (left vertex, right vertex).

    Matched vertices must agree in coordinates within ``tolerance`` and the
    left signal's Y facets must map exactly onto the right signal's X facets.
    """

    pairs: tuple
    tolerance: float

    def __post_init__(self):
        object.__setattr__(
            self, "pairs", tuple((int(a), int(b)) for a, b in self.pairs)
        )
        if self.tolerance < 0:
            raise CompositionError("tolerance must be nonnegative")

    def as_dict(self) -> dict:
        return dict(self.pairs)


def check_noise_spec(signal: Signal, spec: NoiseSpec,
                     steiner_level: int = DEFAULT_STEINER_LEVEL) -> ScalarField:
    """Verify the ball-avoidance invariant; returns the center distance field."""
    if not 0 <= spec.center < signal.complex.n_vertices:
        raise NoiseError(f"center vertex {spec.center} out of range")
    rho = distance_to_vertex(signal, spec.center, steiner_level)
    for tag in ("A", "X"):
        ids = region_vertices(signal.complex, tag)
        closest = float(np.min(rho.values[ids]))
        if closest <= spec.delta:
            raise NoiseError(
                f"closed delta-ball (delta={spec.delta}) reaches region {tag} "
                f"(nearest vertex at {closest:.6g})"
            )
    return rho


def _smoothstep(t: np.ndarray) -> np.ndarray:
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0)


def bump_field(signal: Signal, spec: NoiseSpec,
               steiner_level: int = DEFAULT_STEINER_LEVEL) -> ScalarField:
    """Conformal bump factor: epsilon inside the closed delta0-ball, 1 outside
    the open delta-ball, and a quintic-smoothstep blend in between.

    The plateaus are exact by construction, so edges whose endpoints both
    carry factor 1 are bit-identical after deformation.
    """
    rho = check_noise_spec(signal, spec, steiner_level).values
    t = (rho - spec.delta0) / (spec.delta - spec.delta0)
    blend = spec.epsilon + (1.0 - spec.epsilon) * _smoothstep(np.clip(t, 0.0, 1.0))
    a = np.where(t <= 0.0, spec.epsilon, np.where(t >= 1.0, 1.0, blend))
    return ScalarField(a)


def apply_noise(signal: Signal, spec: NoiseSpec,
                steiner_level: int = DEFAULT_STEINER_LEVEL) -> Signal:
    """New signal with the conformally deformed metric.

    Edge lengths with both endpoints outside the open delta-ball are
    unchanged bit-exactly.  Hints are dropped: analytic values for the
    undeformed geometry do not survive the deformation.
    """
    a = bump_field(signal, spec, steiner_level)
    deformed = conformal_scale(signal.metric, a)
    return make_signal(signal.complex, deformed, hints={})


def keep_by_predicate(signal: Signal, predicate) -> np.ndarray:
    """Indices of top simplices whose vertices all satisfy ``predicate(coords)``."""
    cx = signal.complex
    flags = np.array([bool(predicate(p)) for p in cx.vertices])
    return np.argwhere(np.all(flags[cx.simplices], axis=1)).ravel()


def _connected(simplices: np.ndarray) -> bool:
    """Connectivity of the kept simplices through shared facets or vertices."""
    n = len(simplices)
    if n <= 1:
        return True
    vert_to_simp: dict[int, list] = {}
    for k, s in enumerate(simplices):
        for v in s:
            vert_to_simp.setdefault(int(v), []).append(k)
    seen = np.zeros(n, dtype=bool)
    queue = deque([0])
    seen[0] = True
    while queue:
        k = queue.popleft()
        for v in simplices[k]:
            for other in vert_to_simp[int(v)]:
                if not seen[other]:
                    seen[other] = True
                    queue.append(other)
    return bool(seen.all())


def extract_filter(signal: Signal, kept_simplices) -> Signal:
    """Sub-signal over the kept top simplices.

    Requirements: the kept set is nonempty and connected, region A survives
    in full, and the sub-boundary decomposes into A' = A, X' within X,
    Y' within Y, surviving B facets, plus newly exposed interior facets
    which are labeled B'.  The corner strata of A with X and with Y must be
    preserved.  Whether a noise ball avoids the filter is the caller's
    concern (see the filter inequality check).
    """
    cx = signal.complex
    kept = np.unique(np.asarray(kept_simplices, dtype=np.int64))
    if len(kept) == 0:
        raise FilterError("kept simplex set is empty")
    if kept.min() < 0 or kept.max() >= cx.n_simplices:
        raise FilterError("kept simplex index out of range")
    sub_simplices = cx.simplices[kept]
    if not _connected(sub_simplices):
        raise FilterError("kept simplices are not connected")

    # boundary facets of the subcomplex, in original vertex ids
    incidence: dict[tuple, int] = {}
    for s in sub_simplices:
        for omit in range(cx.dim + 1):
            f = tuple(sorted(np.delete(s, omit).tolist()))
            incidence[f] = incidence.get(f, 0) + 1
    sub_boundary = {f for f, c in incidence.items() if c == 1}

    for f in cx.labels["A"]:
        if f not in sub_boundary:
            raise FilterError(f"filter drops part of region A (facet {f})")

    new_labels = {"X": set(), "Y": set(), "A": set(), "B": set()}
    for f in sub_boundary:
        if f in cx.labels["A"]:
            new_labels["A"].add(f)
        elif f in cx.labels["X"]:
            new_labels["X"].add(f)
        elif f in cx.labels["Y"]:
            new_labels["Y"].add(f)
        else:
            # old B facets stay in B; cut facets (previously interior) join B
            new_labels["B"].add(f)

    # renumber vertices
    used = np.unique(sub_simplices)
    remap = -np.ones(cx.n_vertices, dtype=np.int64)
    remap[used] = np.arange(len(used))
    new_simp = remap[sub_simplices]
    relabeled = {
        tag: [tuple(remap[list(f)]) for f in facets]
        for tag, facets in new_labels.items()
    }
    try:
        sub_cx = build_complex(cx.vertices[used], new_simp, relabeled,
                               cx.signs[kept])
        sub_edges_orig = np.array(
            [[used[u], used[v]] for u, v in sub_cx.edges()], dtype=np.int64
        )
        sub_metric = MetricField(
            sub_cx.edges(), signal.metric.pair_lengths(sub_edges_orig),
            signal.metric.source,
        )
        out = make_signal(sub_cx, sub_metric, hints={})
    except CobsigError as exc:
        raise FilterError(f"filter boundary fails validation: {exc}") from exc

    # corner strata with A must survive unchanged (in original vertex ids)
    for other in ("X", "Y"):
        before = cx.corner_faces("A", other)
        after = {
            tuple(sorted(int(used[v]) for v in face))
            for face in out.complex.corner_faces("A", other)
        }
        if after != set(before):
            raise FilterError(
                f"filter changes the A-{other} corner stratum"
            )
    return out


def make_correspondence(left: Signal, right: Signal,
                        tolerance: float = 1e-9) -> Correspondence:
    """Pair left Y-vertices with right X-vertices by matching coordinates.

    This is an explicit construction step the caller opts into; composition
    itself never guesses a matching.
    """
    ly = region_vertices(left.complex, "Y")
    rx = region_vertices(right.complex, "X")
    if len(ly) != len(rx):
        raise CompositionError(
            f"cannot match {len(ly)} Y-vertices with {len(rx)} X-vertices"
        )
    rx_coords = right.complex.vertices[rx]
    pairs = []
    for v in ly:
        d = np.linalg.norm(rx_coords - left.complex.vertices[v], axis=1)
        k = int(np.argmin(d))
        if d[k] > tolerance:
            raise CompositionError(
                f"no right X-vertex within {tolerance} of left vertex {int(v)}"
            )
        pairs.append((int(v), int(rx[k])))
    if len({b for _, b in pairs}) != len(pairs):
        raise CompositionError("coordinate matching is not one-to-one")
    return Correspondence(tuple(pairs), tolerance)


def compose(left: Signal, right: Signal, corr: Correspondence) -> Signal:
    """Glue two signals along left-Y = right-X.

    Labels on the glued result: X from the left, Y from the right, A and B
    are unions of both sides.  The glued facets become interior.  The result
    must validate; in particular the combined A and B may share neither a
    facet nor a corner face.
    """
    lcx, rcx = left.complex, right.complex
    if lcx.dim != rcx.dim or lcx.ambient_dim != rcx.ambient_dim:
        raise CompositionError("dimension mismatch between the two signals")

    vmap = corr.as_dict()
    ly = set(region_vertices(lcx, "Y").tolist())
    rx = set(region_vertices(rcx, "X").tolist())
    if set(vmap.keys()) != ly or set(vmap.values()) != rx or len(vmap) != len(ly):
        raise CompositionError(
            "correspondence must biject left Y-vertices with right X-vertices"
        )
    for a, b in vmap.items():
        gap = float(np.linalg.norm(lcx.vertices[a] - rcx.vertices[b]))
        if gap > corr.tolerance:
            raise CompositionError(
                f"glued vertices {a}<->{b} differ by {gap:.3g} "
                f"(tolerance {corr.tolerance})"
            )
    inv = {b: a for a, b in vmap.items()}
    mapped_y = {tuple(sorted(vmap[v] for v in f)) for f in lcx.labels["Y"]}
    if mapped_y != set(rcx.labels["X"]):
        raise CompositionError("Y facets do not map onto right X facets")

    # interiors must be disjoint: only glued vertices may coincide
    tol = max(corr.tolerance, 1e-12)
    keys = {tuple(np.round(p / tol).astype(np.int64)): i
            for i, p in enumerate(lcx.vertices)}
    for j, p in enumerate(rcx.vertices):
        if j in inv:
            continue
        if tuple(np.round(p / tol).astype(np.int64)) in keys:
            raise CompositionError(
                f"right vertex {j} coincides with the left signal "
                "outside the glued region"
            )

    # merge vertex sets: left vertices keep their ids
    extra = [j for j in range(rcx.n_vertices) if j not in inv]
    offset_map = np.empty(rcx.n_vertices, dtype=np.int64)
    for j, a in inv.items():
        offset_map[j] = a
    for k, j in enumerate(extra):
        offset_map[j] = lcx.n_vertices + k
    merged_vertices = np.vstack([lcx.vertices, rcx.vertices[extra]])
    merged_simplices = np.vstack([lcx.simplices, offset_map[rcx.simplices]])
    merged_signs = np.concatenate([lcx.signs, rcx.signs])

    def remap_facets(facets):
        return [tuple(sorted(int(offset_map[v]) for v in f)) for f in facets]

    labels = {
        "X": [tuple(f) for f in lcx.labels["X"]],
        "Y": remap_facets(rcx.labels["Y"]),
        "A": [tuple(f) for f in lcx.labels["A"]] + remap_facets(rcx.labels["A"]),
        "B": [tuple(f) for f in lcx.labels["B"]] + remap_facets(rcx.labels["B"]),
    }

    try:
        merged = build_complex(merged_vertices, merged_simplices, labels,
                               merged_signs)
        edges = merged.edges()
        # left lengths win on glued edges; both sides agree within tolerance
        # for induced metrics because the glued coordinates agree
        left_codes = {
            (int(u), int(v)) for u, v in left.metric.edges
        }
        lengths = np.empty(len(edges))
        right_back = np.full(merged_vertices.shape[0], -1, dtype=np.int64)
        right_back[offset_map] = np.arange(rcx.n_vertices)
        for k, (u, v) in enumerate(edges):
            if (int(u), int(v)) in left_codes:
                lengths[k] = left.metric.length(int(u), int(v))
            else:
                ru, rv = int(right_back[u]), int(right_back[v])
                lengths[k] = right.metric.length(ru, rv)
        metric = MetricField(edges, lengths, "induced"
                             if left.metric.source == right.metric.source ==
                             "induced" else "deformed")
        return make_signal(merged, metric, hints={})
    except CobsigError as exc:
        raise CompositionError(f"composed signal fails validation: {exc}") from exc
