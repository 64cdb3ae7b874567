"""Canonical test instances with analytic ground truth.

Structured grids only: axis-aligned geodesics are exact on them and the
construction is deterministic.  Every generated signal validates, and its
``hints`` carry closed-form energies, volumes, diameters, and boundary
injectivity radii for the smooth geometry it approximates.
"""

from __future__ import annotations

import math

import numpy as np

from .complex import build_complex
from .errors import MeshError
from .signal import Signal, make_signal


def _grid_signal(width: float, height: float, nx: int, ny: int,
                 origin=(0.0, 0.0), hints=None) -> Signal:
    """Axis-aligned rectangle triangulated as an nx-by-ny grid.

    Labels: X bottom, Y top, A left, B right.  All triangles are
    counterclockwise with the cell diagonal running lower-left to
    upper-right.
    """
    x0, y0 = float(origin[0]), float(origin[1])
    xs = x0 + width * np.arange(nx + 1) / nx
    ys = y0 + height * np.arange(ny + 1) / ny

    def vid(ix, iy):
        return iy * (nx + 1) + ix

    verts = np.empty(((nx + 1) * (ny + 1), 2))
    for iy in range(ny + 1):
        for ix in range(nx + 1):
            verts[vid(ix, iy)] = (xs[ix], ys[iy])

    tris = []
    for iy in range(ny):
        for ix in range(nx):
            v00, v10 = vid(ix, iy), vid(ix + 1, iy)
            v11, v01 = vid(ix + 1, iy + 1), vid(ix, iy + 1)
            tris.append((v00, v10, v11))
            tris.append((v00, v11, v01))

    labels = {
        "X": [(vid(i, 0), vid(i + 1, 0)) for i in range(nx)],
        "Y": [(vid(i, ny), vid(i + 1, ny)) for i in range(nx)],
        "A": [(vid(0, j), vid(0, j + 1)) for j in range(ny)],
        "B": [(vid(nx, j), vid(nx, j + 1)) for j in range(ny)],
    }
    cx = build_complex(verts, np.array(tris, dtype=np.int64), labels)
    return make_signal(cx, hints=hints)


def gen_square(n: int) -> Signal:
    """Unit square as an n-by-n grid of 2 n^2 triangles."""
    n = int(n)
    if n < 2:
        raise MeshError("square resolution must be at least 2")
    hints = {
        "E": 0.5,
        "EF": 0.5,
        "i_A": 1.0,
        "i_X": 1.0,
        "diam_M": math.sqrt(2.0),
        "diam_A": 1.0,
        "diam_X": 1.0,
        "vol_M": 1.0,
        "vol_A": 1.0,
        "vol_X": 1.0,
        "resolution": float(n),
    }
    return _grid_signal(1.0, 1.0, n, n, hints=hints)


def gen_rectangle(width: float, height: float, n: int,
                  origin=(0.0, 0.0)) -> Signal:
    """Axis-aligned rectangle; resolution n counts subdivisions per unit length.

    Used as composition ground truth; hints are translation invariant.
    """
    if width <= 0 or height <= 0:
        raise MeshError("rectangle dimensions must be positive")
    n = int(n)
    if n < 2:
        raise MeshError("rectangle resolution must be at least 2")
    nx = max(1, round(n * width))
    ny = max(1, round(n * height))
    hints = {
        "E": width * width * height / 2.0,
        "EF": width * height * height / 2.0,
        "i_A": width,
        "i_X": height,
        "diam_M": math.hypot(width, height),
        "diam_A": height,
        "diam_X": width,
        "vol_M": width * height,
        "vol_A": height,
        "vol_X": width,
        "resolution": float(n),
    }
    return _grid_signal(width, height, nx, ny, origin=origin, hints=hints)


def _kuhn_tets():
    """The six path tetrahedra of a unit cube, as corner index triples."""
    axes = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    tets = []
    for perm in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
        c = (0, 0, 0)
        path = [c]
        for axis in perm:
            c = tuple(c[k] + axes[axis][k] for k in range(3))
            path.append(c)
        tets.append(tuple(path))
    return tets


_KUHN = _kuhn_tets()


def gen_annular_shell(r0: float, r1: float, height: float, res: int) -> Signal:
    """Radially thickened cylinder: the solid r0 <= r <= r1, 0 <= z <= height.

    ``res`` segments run around the axis; radial and vertical subdivisions
    are proportional to the arc step.  Labels: X inner wall, Y outer wall,
    A bottom annulus, B top annulus.  Cells split into six path tetrahedra
    each, oriented positively in the ambient space.
    """
    if not 0 < r0 < r1:
        raise MeshError("need 0 < r0 < r1")
    if height <= 0:
        raise MeshError("height must be positive")
    res = int(res)
    if res < 8:
        raise MeshError("shell resolution must be at least 8")

    step = 2.0 * math.pi * (0.5 * (r0 + r1)) / res
    nr = max(1, round((r1 - r0) / step))
    nz = max(1, round(height / step))
    nt = res

    rs = r0 + (r1 - r0) * np.arange(nr + 1) / nr
    zs = height * np.arange(nz + 1) / nz
    thetas = 2.0 * math.pi * np.arange(nt) / nt

    def vid(it, jr, kz):
        return (it % nt) * (nr + 1) * (nz + 1) + jr * (nz + 1) + kz

    verts = np.empty((nt * (nr + 1) * (nz + 1), 3))
    for it in range(nt):
        ct, st = math.cos(thetas[it]), math.sin(thetas[it])
        for jr in range(nr + 1):
            for kz in range(nz + 1):
                verts[vid(it, jr, kz)] = (rs[jr] * ct, rs[jr] * st, zs[kz])

    tets = []
    for it in range(nt):
        for jr in range(nr):
            for kz in range(nz):
                corner = {}
                for a in (0, 1):
                    for b in (0, 1):
                        for c in (0, 1):
                            corner[(a, b, c)] = vid(it + a, jr + b, kz + c)
                for path in _KUHN:
                    tets.append([corner[p] for p in path])
    tets = np.array(tets, dtype=np.int64)

    # orient every tetrahedron positively in ambient coordinates
    p = verts[tets]
    det = np.linalg.det(p[:, 1:] - p[:, :1])
    flip = det < 0
    tets[flip] = tets[flip][:, [0, 1, 3, 2]]
    if np.any(np.isclose(np.abs(det), 0.0)):
        raise MeshError("degenerate tetrahedron in shell construction")

    bare = build_complex(verts, tets, {})
    radii = np.hypot(verts[:, 0], verts[:, 1])
    tol = 1e-9 * max(r1, height)
    labels = {"X": [], "Y": [], "A": [], "B": []}
    for f in sorted(bare.boundary_facets):
        fr = radii[list(f)]
        fz = verts[list(f), 2]
        if np.all(np.abs(fr - r0) < tol):
            labels["X"].append(f)
        elif np.all(np.abs(fr - r1) < tol):
            labels["Y"].append(f)
        elif np.all(np.abs(fz) < tol):
            labels["A"].append(f)
        elif np.all(np.abs(fz - height) < tol):
            labels["B"].append(f)
        else:
            raise MeshError(f"unclassifiable boundary facet {f}")

    cx = bare.with_labels(labels)

    # closed-form values for the smooth shell
    vol = math.pi * (r1 * r1 - r0 * r0) * height
    around = 2.0 * math.sqrt(r1 * r1 - r0 * r0) + r0 * (
        math.pi - 2.0 * math.acos(r0 / r1)
    )
    hints = {
        "E": vol * height / 2.0,
        "EF": 2.0 * math.pi * height * (
            (r1**3 - r0**3) / 3.0 - r0 * (r1 * r1 - r0 * r0) / 2.0
        ),
        "i_A": height,
        "i_X": r1 - r0,
        "diam_M": math.hypot(around, height),
        "diam_A": around,
        "diam_X": math.hypot(math.pi * r0, height),
        "vol_M": vol,
        "vol_A": math.pi * (r1 * r1 - r0 * r0),
        "vol_X": 2.0 * math.pi * r0 * height,
        "resolution": float(res),
    }
    return make_signal(cx, hints=hints)


def vertex_at(signal: Signal, coords, tol: float = 1e-9) -> int:
    """Index of the vertex at the given coordinates (within tolerance)."""
    target = np.asarray(coords, dtype=np.float64)
    d = np.linalg.norm(signal.complex.vertices - target, axis=1)
    k = int(np.argmin(d))
    if d[k] > tol:
        raise MeshError(f"no vertex within {tol} of {tuple(target)}")
    return k
