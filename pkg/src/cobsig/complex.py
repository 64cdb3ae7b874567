"""Labeled simplicial complexes representing relative cobordisms with corners.

A complex stores straight d-simplices (d = 2 or 3) embedded in R^n, together
with orientation signs and boundary-facet labels for four regions X, Y, A, B.
The boundary of the underlying domain must decompose as X + Sigma + Y with
Sigma = A + B; corner strata (the (d-2)-faces shared between facets of two
regions) are derived on demand, never stored.

Complexes are immutable after construction and safe for concurrent reads.
``build_complex`` checks structural well-formedness only; the cobordism
invariants live in ``validate`` so that deliberately broken instances can be
constructed and inspected.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import MeshError, RegionError

REGION_TAGS = ("X", "Y", "A", "B")

Facet = tuple[int, ...]


def _sorted_tuple(verts) -> Facet:
    return tuple(sorted(int(v) for v in verts))


def _perm_parity(a, b) -> int:
    """Sign of the permutation taking ordering ``a`` to ordering ``b``."""
    index = {v: i for i, v in enumerate(b)}
    perm = [index[v] for v in a]
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        cycle_len = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            cycle_len += 1
        if cycle_len % 2 == 0:
            sign = -sign
    return sign


class CobordismComplex:
    """Immutable d-complex with ambient coordinates and region labels.

    Attributes
    ----------
    dim : int
        Dimension d of the top simplices (2 or 3).
    ambient_dim : int
        Dimension n >= d of the ambient coordinates.
    vertices : (nv, n) float array, read-only
    simplices : (nt, d+1) int array, read-only
    signs : (nt,) int array of +-1, read-only
    labels : dict mapping region tag to frozenset of facet tuples
    """

    def __init__(self, vertices, simplices, signs, labels, facet_incidence):
        self.vertices = vertices
        self.simplices = simplices
        self.signs = signs
        self.labels = labels
        self._facet_incidence = facet_incidence
        self.boundary_facets = frozenset(
            f for f, inc in facet_incidence.items() if len(inc) == 1
        )

    # -- basic queries ----------------------------------------------------

    @property
    def dim(self) -> int:
        return self.simplices.shape[1] - 1

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_simplices(self) -> int:
        return self.simplices.shape[0]

    def facet_incidence(self, facet: Facet):
        """List of (simplex index, omitted position) pairs incident to a facet."""
        return self._facet_incidence[facet]

    @property
    def interior_facets(self) -> frozenset:
        return frozenset(
            f for f, inc in self._facet_incidence.items() if len(inc) == 2
        )

    def edges(self) -> np.ndarray:
        """All 1-skeleton edges as a (ne, 2) array of sorted pairs, lexsorted."""
        d = self.dim
        pairs = []
        for i, j in itertools.combinations(range(d + 1), 2):
            pairs.append(self.simplices[:, [i, j]])
        e = np.vstack(pairs)
        e.sort(axis=1)
        return np.unique(e, axis=0)

    def facet_edges(self, tag: str) -> np.ndarray:
        """Edges of the subcomplex spanned by the facets labeled ``tag``."""
        facets = sorted(self.labels[tag])
        if not facets:
            raise RegionError(f"region {tag!r} has no facets")
        pairs = []
        for f in facets:
            for u, v in itertools.combinations(f, 2):
                pairs.append((u, v))
        e = np.array(pairs, dtype=np.int64)
        return np.unique(e, axis=0)

    def corner_faces(self, tag_a: str, tag_b: str) -> frozenset:
        """(d-2)-faces shared between facets of two regions."""
        for t in (tag_a, tag_b):
            if t not in REGION_TAGS:
                raise RegionError(f"unknown region tag {t!r}")
        k = self.dim - 1  # number of vertices in a (d-2)-face
        faces_a = {
            c for f in self.labels[tag_a] for c in itertools.combinations(f, k)
        }
        faces_b = {
            c for f in self.labels[tag_b] for c in itertools.combinations(f, k)
        }
        return frozenset(faces_a & faces_b)

    # -- derived labelings -------------------------------------------------

    def with_labels(self, labels) -> "CobordismComplex":
        """Same geometry with a different region labeling."""
        return build_complex(self.vertices, self.simplices, labels, self.signs)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "ambient_dim": self.ambient_dim,
            "vertices": [list(map(float, row)) for row in self.vertices],
            "simplices": [
                {"verts": list(map(int, s)), "sign": int(g)}
                for s, g in zip(self.simplices, self.signs)
            ],
            "labels": {
                tag: sorted(list(map(int, f)) for f in self.labels[tag])
                for tag in REGION_TAGS
            },
        }

    def __eq__(self, other):
        if not isinstance(other, CobordismComplex):
            return NotImplemented
        return (
            np.array_equal(self.vertices, other.vertices)
            and np.array_equal(self.simplices, other.simplices)
            and np.array_equal(self.signs, other.signs)
            and self.labels == other.labels
        )

    def __hash__(self):
        return id(self)

    def __repr__(self):
        return (
            f"CobordismComplex(dim={self.dim}, ambient_dim={self.ambient_dim}, "
            f"nv={self.n_vertices}, nt={self.n_simplices})"
        )


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the cobordism invariant checks.

    ``ok`` holds exactly when ``violations`` is empty; each violation is an
    (invariant-name, offending-item) pair and all violations are reported,
    not only the first.
    """

    ok: bool
    violations: tuple

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [list(v) for v in self.violations],
        }


def build_complex(vertices, simplices, labels, signs=None) -> CobordismComplex:
    """Assemble a labeled complex and derive its facet structure.

    Parameters
    ----------
    vertices : (nv, n) array-like of float coordinates
    simplices : (nt, d+1) array-like of vertex indices, d in {2, 3}
    labels : mapping from region tag (X/Y/A/B) to iterable of facet index
        tuples; every labeled facet must be a boundary facet
    signs : optional (nt,) iterable of orientation signs +-1 (default +1)

    The cobordism invariants (region coverage, disjointness, corners,
    orientation consistency) are *not* enforced here; run ``validate``.
    """
    verts = np.array(vertices, dtype=np.float64)
    if verts.ndim != 2:
        raise MeshError("vertices must be a 2d array of coordinates")
    simp = np.array(simplices, dtype=np.int64)
    if simp.ndim != 2 or simp.shape[0] == 0:
        raise MeshError("simplices must be a nonempty 2d array of index tuples")
    d = simp.shape[1] - 1
    if d not in (2, 3):
        raise MeshError(f"only dimensions 2 and 3 are supported, got d={d}")
    if verts.shape[1] < d:
        raise MeshError(
            f"ambient dimension {verts.shape[1]} below complex dimension {d}"
        )
    nv = verts.shape[0]
    if simp.min() < 0 or simp.max() >= nv:
        raise MeshError("simplex vertex index out of range")
    for k, s in enumerate(simp):
        if len(set(s.tolist())) != d + 1:
            raise MeshError(f"simplex {k} repeats a vertex: {tuple(s)}")

    if signs is None:
        sgn = np.ones(len(simp), dtype=np.int64)
    else:
        sgn = np.asarray(signs, dtype=np.int64)
        if sgn.shape != (len(simp),) or not np.all(np.abs(sgn) == 1):
            raise MeshError("signs must be +-1, one per top simplex")

    incidence: dict[Facet, list] = {}
    for t, s in enumerate(simp):
        for omit in range(d + 1):
            f = _sorted_tuple(np.delete(s, omit))
            incidence.setdefault(f, []).append((t, omit))

    boundary = {f for f, inc in incidence.items() if len(inc) == 1}

    clean_labels: dict[str, frozenset] = {}
    labels = dict(labels)
    for tag in labels:
        if tag not in REGION_TAGS:
            raise MeshError(f"unknown region tag {tag!r}")
    for tag in REGION_TAGS:
        facets = set()
        for f in labels.get(tag, ()):
            ft = _sorted_tuple(f)
            if len(ft) != d or len(set(ft)) != d:
                raise MeshError(f"label {tag}: {ft} is not a (d-1)-simplex")
            if ft not in incidence:
                raise MeshError(f"label {tag}: {ft} is not a facet of the complex")
            if ft not in boundary:
                raise MeshError(f"label {tag}: {ft} is not a boundary facet")
            facets.add(ft)
        clean_labels[tag] = frozenset(facets)

    verts.flags.writeable = False
    simp.flags.writeable = False
    sgn.flags.writeable = False
    return CobordismComplex(verts, simp, sgn, clean_labels, incidence)


def validate(cx: CobordismComplex) -> ValidationReport:
    """Check every cobordism invariant; violations are data, not errors."""
    bad: list[tuple[str, str]] = []

    labeled: dict[Facet, list[str]] = {}
    for tag in REGION_TAGS:
        for f in cx.labels[tag]:
            labeled.setdefault(f, []).append(tag)

    for f, inc in cx._facet_incidence.items():
        if len(inc) > 2:
            bad.append(("nonmanifold-facet", f"{f} borders {len(inc)} simplices"))

    for f in sorted(cx.boundary_facets):
        tags = labeled.get(f, [])
        if not tags:
            bad.append(("unlabeled-boundary-facet", str(f)))
        elif len(tags) > 1:
            bad.append(("multiply-labeled-facet", f"{f} in {sorted(tags)}"))
    for f in sorted(labeled):
        if f not in cx.boundary_facets:
            bad.append(("interior-facet-labeled", str(f)))

    for tag in REGION_TAGS:
        if not cx.labels[tag]:
            bad.append(("empty-region", tag))

    if cx.labels["X"] & cx.labels["Y"]:
        bad.append(("X-Y-shared-facet", str(sorted(cx.labels["X"] & cx.labels["Y"]))))
    if cx.labels["A"] & cx.labels["B"]:
        bad.append(("A-B-shared-facet", str(sorted(cx.labels["A"] & cx.labels["B"]))))
    shared_corner = cx.corner_faces("A", "B")
    if shared_corner:
        bad.append(("A-B-shared-corner-face", str(sorted(shared_corner))))

    if cx.labels["A"] and cx.labels["X"] and not cx.corner_faces("A", "X"):
        bad.append(("A-X-corner-empty", "no shared (d-2)-face between A and X"))

    # Orientation: each interior facet must be induced with opposite
    # orientations by its two incident top simplices.
    for f, inc in cx._facet_incidence.items():
        if len(inc) != 2:
            continue
        (t1, o1), (t2, o2) = inc
        f1 = tuple(np.delete(cx.simplices[t1], o1))
        f2 = tuple(np.delete(cx.simplices[t2], o2))
        m1 = int(cx.signs[t1]) * (-1) ** o1
        m2 = int(cx.signs[t2]) * (-1) ** o2
        if m1 * m2 * _perm_parity(f1, f2) != -1:
            bad.append(
                ("inconsistent-orientation", f"facet {f} between simplices {t1},{t2}")
            )

    bad.sort()
    return ValidationReport(ok=not bad, violations=tuple(bad))


def region_vertices(cx: CobordismComplex, tag: str) -> np.ndarray:
    """Vertex indices of a closed region, or of a derived corner stratum.

    ``tag`` is one of X/Y/A/B, or a two-letter corner tag such as "AX"
    naming the (d-2)-faces shared between the two regions' facets.  Corner
    vertices belong to every incident closed region.
    """
    if tag in REGION_TAGS:
        out = set()
        for f in cx.labels[tag]:
            out.update(f)
        return np.array(sorted(out), dtype=np.int64)
    if len(tag) == 2 and tag[0] in REGION_TAGS and tag[1] in REGION_TAGS:
        faces = cx.corner_faces(tag[0], tag[1])
        out = set()
        for f in faces:
            out.update(f)
        return np.array(sorted(out), dtype=np.int64)
    raise RegionError(f"unknown region tag {tag!r}")
