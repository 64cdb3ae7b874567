"""Complex construction, validation, regions, and serialization."""

import numpy as np
import pytest

import cobsig as cs
from cobsig.complex import build_complex, region_vertices, validate
from cobsig.errors import MeshError, RegionError

UNIT_SQUARE_VERTS = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
UNIT_SQUARE_TRIS = [(0, 1, 2), (0, 2, 3)]
UNIT_SQUARE_LABELS = {
    "X": [(0, 1)],
    "Y": [(2, 3)],
    "A": [(0, 3)],
    "B": [(1, 2)],
}


def unit_square():
    return build_complex(UNIT_SQUARE_VERTS, UNIT_SQUARE_TRIS, UNIT_SQUARE_LABELS)


def test_unit_square_builds_and_validates():
    cx = unit_square()
    assert cx.dim == 2
    assert cx.ambient_dim == 2
    report = validate(cx)
    assert report.ok
    assert report.violations == ()


def test_boundary_facet_count_structured_grid(square16):
    # 4 sides, n facets per side
    cx = square16.complex
    assert len(cx.boundary_facets) == 4 * 16
    for tag in "XYAB":
        assert len(cx.labels[tag]) == 16


def test_grid_4x4_facets_per_region():
    sig = cs.gen_square(4)
    cx = sig.complex
    assert cx.n_simplices == 32
    assert len(cx.boundary_facets) == 16
    for tag in "XYAB":
        assert len(cx.labels[tag]) == 4


def test_single_triangle_all_edges_A_rejected():
    cx = build_complex(
        [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)],
        [(0, 1, 2)],
        {"A": [(0, 1), (1, 2), (0, 2)]},
    )
    report = validate(cx)
    assert not report.ok
    names = {v[0] for v in report.violations}
    assert "empty-region" in names


def test_overlapping_A_B_label_reported():
    labels = dict(UNIT_SQUARE_LABELS)
    labels["B"] = [(1, 2), (0, 3)]  # B also claims the left edge
    cx = build_complex(UNIT_SQUARE_VERTS, UNIT_SQUARE_TRIS, labels)
    report = validate(cx)
    assert not report.ok
    names = {v[0] for v in report.violations}
    assert "A-B-shared-facet" in names
    assert "multiply-labeled-facet" in names


def test_unlabeled_boundary_facet_reported():
    labels = {k: v for k, v in UNIT_SQUARE_LABELS.items()}
    labels["B"] = []
    cx = build_complex(UNIT_SQUARE_VERTS, UNIT_SQUARE_TRIS, labels)
    report = validate(cx)
    names = {v[0] for v in report.violations}
    assert "unlabeled-boundary-facet" in names
    assert "empty-region" in names


def test_build_rejects_bad_indices():
    with pytest.raises(MeshError):
        build_complex(UNIT_SQUARE_VERTS, [(0, 1, 7)], UNIT_SQUARE_LABELS)


def test_build_rejects_repeated_vertex():
    with pytest.raises(MeshError):
        build_complex(UNIT_SQUARE_VERTS, [(0, 1, 1), (0, 2, 3)], {})


def test_build_rejects_interior_facet_label():
    labels = dict(UNIT_SQUARE_LABELS)
    labels["A"] = [(0, 2)]  # the shared diagonal is interior
    with pytest.raises(MeshError):
        build_complex(UNIT_SQUARE_VERTS, UNIT_SQUARE_TRIS, labels)


def test_build_rejects_unknown_tag():
    with pytest.raises(MeshError):
        build_complex(UNIT_SQUARE_VERTS, UNIT_SQUARE_TRIS, {"Q": [(0, 1)]})


def test_build_rejects_unsupported_dimension():
    with pytest.raises(MeshError):
        build_complex([(0.0,), (1.0,)], [(0, 1)], {})


def test_orientation_mismatch_reported():
    # flip one triangle: the shared diagonal is then induced twice with the
    # same orientation
    cx = build_complex(
        UNIT_SQUARE_VERTS,
        [(0, 1, 2), (0, 3, 2)],
        UNIT_SQUARE_LABELS,
    )
    report = validate(cx)
    names = {v[0] for v in report.violations}
    assert "inconsistent-orientation" in names


def test_orientation_sign_flag_restores_consistency():
    cx = build_complex(
        UNIT_SQUARE_VERTS,
        [(0, 1, 2), (0, 3, 2)],
        UNIT_SQUARE_LABELS,
        signs=[1, -1],
    )
    assert validate(cx).ok


def test_region_vertices_square(square8):
    cx = square8.complex
    left = region_vertices(cx, "A")
    coords = cx.vertices[left]
    assert np.all(coords[:, 0] == 0.0)
    assert len(left) == 9


def test_region_vertices_corner(square8):
    cx = square8.complex
    corner = region_vertices(cx, "AX")
    assert len(corner) == 1
    assert np.allclose(cx.vertices[corner[0]], (0.0, 0.0))


def test_region_vertices_unknown_tag(square8):
    with pytest.raises(RegionError):
        region_vertices(square8.complex, "Q")


def test_corner_strata_nonempty_all_pairs(square8):
    cx = square8.complex
    for a, b in (("A", "X"), ("A", "Y"), ("B", "X"), ("B", "Y")):
        assert cx.corner_faces(a, b)


def test_labeled_sets_partition_boundary(square16, shell16):
    for sig in (square16, shell16):
        cx = sig.complex
        union = set()
        total = 0
        for tag in "XYAB":
            union |= cx.labels[tag]
            total += len(cx.labels[tag])
        assert union == set(cx.boundary_facets)
        assert total == len(cx.boundary_facets)


def test_corner_vertices_lie_on_both_regions(shell16):
    cx = shell16.complex
    ax = set(region_vertices(cx, "AX").tolist())
    a = set(region_vertices(cx, "A").tolist())
    x = set(region_vertices(cx, "X").tolist())
    assert ax and ax <= (a & x)


def test_serialization_round_trip(square8):
    cx = square8.complex
    data = cx.to_dict()
    back = build_complex(
        data["vertices"],
        [s["verts"] for s in data["simplices"]],
        data["labels"],
        [s["sign"] for s in data["simplices"]],
    )
    assert back == cx


def test_region_vertices_of_annular_inner_wall(shell16):
    cx = shell16.complex
    inner = region_vertices(cx, "X")
    radii = np.hypot(cx.vertices[inner, 0], cx.vertices[inner, 1])
    assert np.allclose(radii, 1.0, atol=1e-12)


def test_orientation_mismatch_reported_3d(shell16):
    cx = shell16.complex
    simp = cx.simplices.copy()
    simp[0] = simp[0][[0, 1, 3, 2]]  # flip one tetrahedron, keep its sign
    flipped = build_complex(cx.vertices, simp,
                            {t: sorted(cx.labels[t]) for t in "XYAB"},
                            cx.signs)
    names = {v[0] for v in validate(flipped).violations}
    assert "inconsistent-orientation" in names
