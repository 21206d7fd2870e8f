"""Paper-independent integer linking numbers.

Two oracles provide topological ground truth for the integrals:

* signed crossing counts of closed polylines under a generic planar
  projection (curve pairs in R^3, or in S^3/H^3 after passing to a
  chart of the complement);
* signed intersection counts of a triangulated cone over a curve with
  an oriented closed surface mesh (curve/surface pairs in a
  contractible R^4 chart).

All predicates run in double precision with an explicit degeneracy
band and seeded randomized retries instead of exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OracleFailureError, UsageError, ValidationError
from .spaces import Space, SpaceKind, frame_batch
from .submanifolds import ParamSubmanifold, sample

_DEGENERACY_BAND = 1e-7
_MAX_RETRIES = 32


@dataclass(frozen=True)
class Polyline:
    """Closed polyline; the last vertex repeats the first."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or len(pts) < 4:
            raise ValidationError("polyline needs at least 3 distinct vertices")
        if not np.allclose(pts[0], pts[-1], atol=1e-12):
            raise ValidationError("polyline must close up (first vertex == last)")
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def segments(self):
        return self.points[:-1], self.points[1:]

    def reversed(self) -> "Polyline":
        return Polyline(self.points[::-1].copy())


@dataclass(frozen=True)
class TriMesh:
    """Oriented closed triangle mesh in R^4."""

    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=float)
        tris = np.asarray(self.triangles, dtype=int)
        if verts.ndim != 2 or verts.shape[1] != 4:
            raise ValidationError("vertices must be an (n, 4) array")
        if tris.ndim != 2 or tris.shape[1] != 3:
            raise ValidationError("triangles must be an (m, 3) index array")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "triangles", tris)

    def corners(self):
        v = self.vertices
        t = self.triangles
        return v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]

    def check_closed_oriented(self):
        """Every directed edge must be cancelled by its reverse exactly once."""
        edges = {}
        for tri in self.triangles:
            for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                edges[(a, b)] = edges.get((a, b), 0) + 1
        for (a, b), count in edges.items():
            if count != 1 or edges.get((b, a), 0) != 1:
                raise ValidationError(
                    f"mesh is not a closed oriented surface at edge {(a, b)}")


def polyline_from_curve(curve: ParamSubmanifold, n: int = 256) -> Polyline:
    """Sample a closed parametrized curve into a polyline (ambient coords)."""
    if curve.k != 1:
        raise UsageError("polyline extraction needs a curve")
    u = sample(curve, n).nodes
    pts = np.asarray(curve.chart(u), dtype=float)
    if curve.orientation < 0:
        pts = pts[::-1]
    return Polyline(np.vstack([pts, pts[:1]]))


def trimesh_from_surface(surface: ParamSubmanifold, resolution=(32, 32)) -> TriMesh:
    """Triangulate a closed parametrized surface on its parameter grid.

    Interval axes include their endpoints (poles of sphere-like charts);
    zero-area triangles arising at poles are dropped.
    """
    if surface.k != 2:
        raise UsageError("mesh extraction needs a surface")
    n0, n1 = resolution
    axes_nodes, wraps = [], []
    for ax, n in zip(surface.axes, (n0, n1)):
        if hasattr(ax, "period"):
            axes_nodes.append(np.arange(n) * ax.period / n)
            wraps.append(True)
        else:
            axes_nodes.append(np.linspace(ax.lo, ax.hi, n + 1))
            wraps.append(False)
    g0, g1 = np.meshgrid(axes_nodes[0], axes_nodes[1], indexing="ij")
    grid = np.stack([g0, g1], axis=-1)
    raw = np.asarray(surface.chart(grid.reshape(-1, 2)), dtype=float)
    # weld coincident vertices (pole rows of sphere-like charts)
    scale = max(1.0, np.abs(raw).max())
    key = np.round(raw / (1e-9 * scale)).astype(np.int64)
    _, first, remap = np.unique(key, axis=0, return_index=True,
                                return_inverse=True)
    verts = raw[first]
    rows, cols = g0.shape
    idx = remap.reshape(rows, cols)

    def vid(i, j):
        return idx[i % rows if wraps[0] else i, j % cols if wraps[1] else j]

    tris = []
    imax = rows if wraps[0] else rows - 1
    jmax = cols if wraps[1] else cols - 1
    for i in range(imax):
        for j in range(jmax):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i + 1, j + 1), vid(i, j + 1)
            for tri in ((a, b, c), (a, c, d)):
                if len(set(tri)) == 3:
                    tris.append(tri)
    tris = np.asarray(tris, dtype=int)
    if surface.orientation < 0:
        tris = tris[:, [0, 2, 1]]
    mesh = TriMesh(verts, tris)
    return mesh


# ---------------------------------------------------------------------------
# crossing-count oracle for curve pairs in R^3
# ---------------------------------------------------------------------------

def crossing_linking_r3(k_line: Polyline, l_line: Polyline, seed=0) -> int:
    """Linking number as half the signed crossing sum in a generic projection."""
    if k_line.dim != 3 or l_line.dim != 3:
        raise UsageError("crossing oracle works on polylines in R^3")
    rng = np.random.default_rng(seed)
    scale = max(np.abs(k_line.points).max(), np.abs(l_line.points).max(), 1.0)
    for _ in range(_MAX_RETRIES):
        basis = np.linalg.qr(rng.normal(size=(3, 3)))[0]
        if np.linalg.det(basis) < 0:
            basis[:, 0] = -basis[:, 0]
        e1, e2, view = basis.T
        total = _crossing_sum(k_line, l_line, e1, e2, view, scale)
        if total is not None and total % 2 == 0:
            return total // 2
    raise OracleFailureError("no non-degenerate projection found")


def _crossing_sum(k_line, l_line, e1, e2, view, scale):
    a0, a1 = k_line.segments()
    b0, b1 = l_line.segments()
    pa0 = np.stack([a0 @ e1, a0 @ e2], axis=-1)
    pa1 = np.stack([a1 @ e1, a1 @ e2], axis=-1)
    pb0 = np.stack([b0 @ e1, b0 @ e2], axis=-1)
    pb1 = np.stack([b1 @ e1, b1 @ e2], axis=-1)
    u = pa1 - pa0                                   # (nk, 2)
    w = pb1 - pb0                                   # (nl, 2)
    cross_uw = u[:, None, 0] * w[None, :, 1] - u[:, None, 1] * w[None, :, 0]
    rhs = pb0[None, :, :] - pa0[:, None, :]
    det_s = rhs[..., 0] * w[None, :, 1] - rhs[..., 1] * w[None, :, 0]
    det_t = rhs[..., 0] * u[:, None, 1] - rhs[..., 1] * u[:, None, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = det_s / cross_uw
        t = -det_t / -cross_uw
    parallel = np.abs(cross_uw) < 1e-14 * scale * scale
    s = np.where(parallel, -1.0, s)
    t = np.where(parallel, -1.0, t)
    inside = (s > 0) & (s < 1) & (t > 0) & (t < 1)
    margin = np.minimum(np.minimum(np.abs(s), np.abs(1 - s)),
                        np.minimum(np.abs(t), np.abs(1 - t)))
    if np.any(inside & (margin < _DEGENERACY_BAND)):
        return None
    ik, il = np.nonzero(inside)
    if ik.size == 0:
        return 0
    za = (a0[ik] + s[ik, il, None] * (a1 - a0)[ik]) @ view
    zb = (b0[il] + t[ik, il, None] * (b1 - b0)[il]) @ view
    if np.any(np.abs(za - zb) < _DEGENERACY_BAND * scale):
        return None
    k_over = za > zb
    sign = np.sign(cross_uw[ik, il])
    return int(np.sum(np.where(k_over, sign, -sign)))


# ---------------------------------------------------------------------------
# complement charts for S^3 and H^3 curve pairs
# ---------------------------------------------------------------------------

def chart_to_r3(space: Space, points: np.ndarray, basepoint=None) -> Polyline:
    """Map a closed curve sample to R^3: stereographic (S^3) or ball (H^3)."""
    pts = np.asarray(points, dtype=float)
    if not np.allclose(pts[0], pts[-1], atol=1e-9):
        pts = np.vstack([pts, pts[:1]])
    if space.kind is SpaceKind.SPHERE and space.dim == 3:
        if basepoint is None:
            raise UsageError("stereographic chart needs a projection basepoint")
        pole = np.asarray(basepoint, dtype=float)
        pole = pole / np.linalg.norm(pole)
        denom = 1.0 - pts @ pole
        if np.any(np.abs(denom) < 1e-6):
            raise ValidationError("curve passes too close to the projection basepoint")
        frame = frame_batch(space, pole)           # det(f1,f2,f3,pole) = +1
        coords = (pts @ frame.T) / denom[:, None]
        return Polyline(coords)
    if space.kind is SpaceKind.HYPERBOLIC and space.dim == 3:
        return Polyline(pts[:, :3] / (1.0 + pts[:, 3:4]))
    raise UsageError("complement charts are implemented for S^3 and H^3")


def curve_pair_linking(space: Space, k_curve: ParamSubmanifold,
                       l_curve: ParamSubmanifold, n: int = 256, seed=0) -> int:
    """Crossing-oracle linking of two closed curves in R^3, S^3 or H^3."""
    ka = polyline_from_curve(k_curve, n)
    la = polyline_from_curve(l_curve, n)
    if space.kind is SpaceKind.EUCLIDEAN and space.dim == 3:
        return crossing_linking_r3(ka, la, seed)
    if space.kind is SpaceKind.HYPERBOLIC and space.dim == 3:
        return crossing_linking_r3(chart_to_r3(space, ka.points),
                                   chart_to_r3(space, la.points), seed)
    if space.kind is SpaceKind.SPHERE and space.dim == 3:
        rng = np.random.default_rng(seed)
        for _ in range(_MAX_RETRIES):
            pole = rng.normal(size=4)
            pole /= np.linalg.norm(pole)
            try:
                pk = chart_to_r3(space, ka.points, pole)
                pl = chart_to_r3(space, la.points, pole)
            except ValidationError:
                continue
            return crossing_linking_r3(pk, pl, int(rng.integers(1 << 31)))
        raise OracleFailureError("no valid stereographic basepoint found")
    raise UsageError("curve-pair oracle supports R^3, S^3 and H^3")


# ---------------------------------------------------------------------------
# cone-intersection oracle for curve/surface pairs in an R^4 chart
# ---------------------------------------------------------------------------

def cone_linking_r4(k_line: Polyline, l_mesh: TriMesh, apex, seed=0) -> int:
    """Signed transverse intersections of the cone over K with the mesh L."""
    if k_line.dim != 4:
        raise UsageError("cone oracle works on polylines in R^4")
    rng = np.random.default_rng(seed)
    apex = np.asarray(apex, dtype=float)
    scale = max(np.abs(k_line.points).max(), np.abs(l_mesh.vertices).max(),
                np.abs(apex).max(), 1.0)
    for attempt in range(_MAX_RETRIES):
        jitter = 0.0 if attempt == 0 else 1e-6 * scale * rng.normal(size=4)
        count = _cone_count(k_line, l_mesh, apex + jitter, scale)
        if count is not None:
            return count
    raise OracleFailureError("cone oracle stayed degenerate after retries")


def _cone_count(k_line, l_mesh, apex, scale):
    a0, a1 = k_line.segments()
    u1 = a0 - apex                                  # cone triangle edges
    u2 = a1 - apex
    b0, b1, b2 = l_mesh.corners()
    w1 = b1 - b0
    w2 = b2 - b0
    nk, nl = len(u1), len(b0)
    # solve apex + s1 u1 + s2 u2 = b0 + t1 w1 + t2 w2 for all pairs
    mat = np.empty((nk, nl, 4, 4))
    mat[..., 0] = np.broadcast_to(u1[:, None, :], (nk, nl, 4))
    mat[..., 1] = np.broadcast_to(u2[:, None, :], (nk, nl, 4))
    mat[..., 2] = np.broadcast_to(-w1[None, :, :], (nk, nl, 4))
    mat[..., 3] = np.broadcast_to(-w2[None, :, :], (nk, nl, 4))
    rhs = b0[None, :, :] - apex
    det = np.linalg.det(mat)
    ok = np.abs(det) > 1e-12 * scale ** 4
    sol = np.full((nk, nl, 4), -1.0)
    if np.any(ok):
        rhs_b = np.broadcast_to(rhs, (nk, nl, 4))[ok]
        sol[ok] = np.linalg.solve(mat[ok], rhs_b[..., None])[..., 0]
    s1, s2, t1, t2 = sol[..., 0], sol[..., 1], sol[..., 2], sol[..., 3]
    inside = (s1 > 0) & (s2 > 0) & (s1 + s2 < 1) & \
             (t1 > 0) & (t2 > 0) & (t1 + t2 < 1)
    margins = np.stack([s1, s2, 1 - s1 - s2, t1, t2, 1 - t1 - t2]).min(axis=0)
    # ambiguous whenever the solution is within the band of the simplex
    # boundary, whether just inside or just outside
    near = ok & (margins > -_DEGENERACY_BAND) & (margins < _DEGENERACY_BAND)
    if np.any(near):
        return None
    # singular pairs (near-parallel planes): only degenerate if the affine
    # spans nearly touch with parameters near the triangles
    bad_i, bad_j = np.nonzero(~ok)
    for i, j in zip(bad_i, bad_j):
        sol_ls, res, *_ = np.linalg.lstsq(mat[i, j], rhs[0, j], rcond=None)
        gap = np.linalg.norm(mat[i, j] @ sol_ls - rhs[0, j])
        if gap > 1e-6 * scale:
            continue
        p1, p2, q1, q2 = sol_ls
        margin = min(p1, p2, 1 - p1 - p2, q1, q2, 1 - q1 - q2)
        if margin > -0.05:
            return None
    ik, il = np.nonzero(inside)
    if ik.size == 0:
        return 0
    frames = np.stack([u1[ik], u2[ik], w1[il], w2[il]], axis=-1)
    return int(np.sum(np.sign(np.linalg.det(frames))))


def _boxes_overlap(apex, a0, a1, b0, b1, b2):
    clo = np.minimum(np.minimum(a0, a1), apex)[:, None, :]
    chi = np.maximum(np.maximum(a0, a1), apex)[:, None, :]
    tlo = np.minimum(np.minimum(b0, b1), b2)[None, :, :]
    thi = np.maximum(np.maximum(b0, b1), b2)[None, :, :]
    return np.all((clo <= thi) & (tlo <= chi), axis=-1)


def chart_pair_linking(k_base: ParamSubmanifold, l_base: ParamSubmanifold,
                       apex=None, n: int = 256, mesh_resolution=(48, 48),
                       seed=0) -> int:
    """Cone-oracle linking for a curve/surface pair given in R^4 chart coords."""
    if k_base.space.kind is not SpaceKind.EUCLIDEAN or k_base.space.dim != 4:
        raise UsageError("chart oracle expects R^4 chart-coordinate objects")
    ka = polyline_from_curve(k_base, n)
    mesh = trimesh_from_surface(l_base, mesh_resolution)
    mesh.check_closed_oriented()
    rng = np.random.default_rng(seed)
    scale = max(np.abs(ka.points).max(), np.abs(mesh.vertices).max(), 1.0)
    if apex is None:
        apex = 3.0 * scale * _random_unit(rng)
    return cone_linking_r4(ka, mesh, apex, seed=int(rng.integers(1 << 31)))


def _random_unit(rng):
    v = rng.normal(size=4)
    return v / np.linalg.norm(v)
