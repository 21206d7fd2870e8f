"""Oriented closed parametrized curves and surfaces in the model spaces.

A submanifold is a chart map from a product of circles (period 2*pi)
and closed intervals into the ambient model, plus an optional analytic
derivative.  Chart and derivative callables are vectorized: they accept
parameter arrays of shape (..., k) and return (..., ambient) resp.
(..., k, ambient).  Quadrature sampling uses uniform (trapezoid) nodes
on circle factors, which is spectrally accurate for smooth periodic
integrands, and Gauss-Legendre nodes on interval factors.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateChartError, UsageError, ValidationError
from .spaces import (
    Isometry,
    Space,
    SpaceKind,
    SpacePoint,
    Tangent,
    frame_batch,
    project_tangent_batch,
    renormalize_point,
    riemannian_inner,
)

_FD_REL_STEP = 1e-5
_RANK_TOL = 1e-8
CP2_CHART_RADIUS = np.pi / 2 - 0.05


@dataclass(frozen=True)
class CircleAxis:
    period: float = 2 * np.pi

    @property
    def extent(self) -> float:
        return self.period


@dataclass(frozen=True)
class IntervalAxis:
    lo: float
    hi: float

    @property
    def extent(self) -> float:
        return self.hi - self.lo


Axis = CircleAxis | IntervalAxis


@dataclass(frozen=True)
class ParamSubmanifold:
    """Closed oriented k-submanifold given by a (vectorized) chart map."""

    space: Space
    k: int
    axes: tuple[Axis, ...]
    chart: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray] | None = None
    orientation: int = 1
    name: str = ""

    def __post_init__(self):
        if len(self.axes) != self.k:
            raise ValidationError("one domain axis per dimension is required")
        if self.k not in (1, 2):
            raise ValidationError("only curves (k=1) and surfaces (k=2) are supported")
        if self.orientation not in (+1, -1):
            raise ValidationError("orientation must be +1 or -1")

    def point(self, u) -> SpacePoint:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        return SpacePoint(self.space, self.chart(u))

    def flipped(self) -> "ParamSubmanifold":
        return dataclasses.replace(self, orientation=-self.orientation)

    def domain_volume(self) -> float:
        return float(np.prod([ax.extent for ax in self.axes]))


@dataclass(frozen=True)
class SampleSet:
    """Quadrature nodes/weights over the parameter domain."""

    nodes: np.ndarray        # (N, k)
    weights: np.ndarray      # (N,)
    resolution: tuple[int, ...]


def sample(m: ParamSubmanifold, resolution) -> SampleSet:
    """Tensor-product quadrature nodes for the parameter domain of m."""
    res = _normalize_resolution(m.k, resolution)
    axis_nodes, axis_weights = [], []
    for ax, n in zip(m.axes, res):
        if isinstance(ax, CircleAxis):
            axis_nodes.append(np.arange(n) * (ax.period / n))
            axis_weights.append(np.full(n, ax.period / n))
        else:
            x, w = np.polynomial.legendre.leggauss(n)
            mid, half = (ax.lo + ax.hi) / 2, (ax.hi - ax.lo) / 2
            axis_nodes.append(mid + half * x)
            axis_weights.append(half * w)
    grids = np.meshgrid(*axis_nodes, indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    wgrids = np.meshgrid(*axis_weights, indexing="ij")
    weights = np.prod(np.stack([g.ravel() for g in wgrids]), axis=0)
    return SampleSet(nodes=nodes, weights=weights, resolution=res)


def _normalize_resolution(k: int, resolution) -> tuple[int, ...]:
    if np.isscalar(resolution):
        res = (int(resolution),) * k
    else:
        res = tuple(int(r) for r in resolution)
    if len(res) != k:
        raise UsageError(f"resolution must have one entry per axis ({k})")
    if any(r < 1 for r in res):
        raise UsageError("resolution entries must be positive")
    return res


def evaluate_batch(m: ParamSubmanifold, u: np.ndarray,
                   check_rank: bool = False):
    """Chart points and oriented tangent bases at parameter rows u (N, k).

    Returns (points (N, ambient), tangents (N, k, ambient)).  Derivatives
    come from the analytic callable when present, otherwise from central
    differences projected back onto the tangent space.
    """
    u = np.asarray(u, dtype=float)
    pts = m.chart(u)
    if m.derivative is not None:
        tans = np.asarray(m.derivative(u))
    else:
        cols = []
        for i, ax in enumerate(m.axes):
            h = _FD_REL_STEP * ax.extent
            up, um = u.copy(), u.copy()
            up[..., i] += h
            um[..., i] -= h
            cols.append((m.chart(up) - m.chart(um)) / (2 * h))
        tans = np.stack(cols, axis=-2)
        tans = project_tangent_batch(m.space, pts[..., None, :], tans)
    if m.orientation < 0:
        tans = tans.copy()
        tans[..., 0, :] = -tans[..., 0, :]
    if check_rank:
        _check_rank(m, tans)
    return pts, tans


def _check_rank(m: ParamSubmanifold, tans: np.ndarray):
    gram = np.real(np.einsum("...ia,...ja,a->...ij", tans, np.conj(tans),
                             m.space._signature()))
    if m.k == 1:
        smin = np.sqrt(np.clip(gram[..., 0, 0], 0, None))
    else:
        ev = np.linalg.eigvalsh(gram)
        smin = np.sqrt(np.clip(ev[..., 0], 0, None))
    if np.any(smin < _RANK_TOL):
        raise DegenerateChartError(
            f"parametrization is rank-deficient (smallest singular value "
            f"{float(np.min(smin)):.2e})")


def tangent_basis(m: ParamSubmanifold, u) -> list[Tangent]:
    """Oriented basis of parameter derivatives at a single parameter tuple."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.shape != (m.k,):
        raise UsageError(f"parameter tuple must have length {m.k}")
    pts, tans = evaluate_batch(m, u, check_rank=True)
    base = SpacePoint(m.space, pts)
    return [Tangent(base, tans[i]) for i in range(m.k)]


# ---------------------------------------------------------------------------
# builtin families
# ---------------------------------------------------------------------------

def _orthonormal_rows(rows: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    rows = np.asarray(rows, dtype=float)
    g = rows @ rows.T
    if np.abs(g - np.eye(len(rows))).max() > tol:
        raise ValidationError("frame rows must be orthonormal")
    return rows


def euclidean_circle(center, frame, radius) -> ParamSubmanifold:
    center = np.asarray(center, dtype=float)
    frame = _orthonormal_rows(np.asarray(frame, dtype=float)[:2])
    if frame.shape != (2, center.shape[0]):
        raise ValidationError("need a 2-frame matching the ambient dimension")
    radius = float(radius)
    if radius <= 0:
        raise ValidationError("radius must be positive")
    space = Space.euclidean(center.shape[0])
    a1, a2 = frame

    def chart(u):
        t = u[..., 0]
        return center + radius * (np.cos(t)[..., None] * a1
                                  + np.sin(t)[..., None] * a2)

    def deriv(u):
        t = u[..., 0]
        vec = radius * (-np.sin(t)[..., None] * a1 + np.cos(t)[..., None] * a2)
        return vec[..., None, :]

    return ParamSubmanifold(space, 1, (CircleAxis(),), chart, deriv)


def euclidean_round_sphere(center, radius, frame=None) -> ParamSubmanifold:
    center = np.asarray(center, dtype=float)
    n = center.shape[0]
    if frame is None:
        frame = np.eye(n)[:3]
    frame = _orthonormal_rows(np.asarray(frame, dtype=float)[:3])
    if frame.shape != (3, n):
        raise ValidationError("need a 3-frame matching the ambient dimension")
    radius = float(radius)
    if radius <= 0:
        raise ValidationError("radius must be positive")
    space = Space.euclidean(n)
    a1, a2, a3 = frame

    def direction(th, ph):
        return (np.sin(th) * np.cos(ph))[..., None] * a1 \
            + (np.sin(th) * np.sin(ph))[..., None] * a2 \
            + np.cos(th)[..., None] * a3

    def chart(u):
        return center + radius * direction(u[..., 0], u[..., 1])

    def deriv(u):
        th, ph = u[..., 0], u[..., 1]
        d_th = (np.cos(th) * np.cos(ph))[..., None] * a1 \
            + (np.cos(th) * np.sin(ph))[..., None] * a2 \
            - np.sin(th)[..., None] * a3
        d_ph = (-np.sin(th) * np.sin(ph))[..., None] * a1 \
            + (np.sin(th) * np.cos(ph))[..., None] * a2
        return radius * np.stack([d_th, d_ph], axis=-2)

    return ParamSubmanifold(space, 2, (IntervalAxis(0.0, np.pi), CircleAxis()),
                            chart, deriv)


def great_circle_s3(plane) -> ParamSubmanifold:
    plane = _orthonormal_rows(np.asarray(plane, dtype=float)[:2])
    if plane.shape != (2, 4):
        raise ValidationError("great circle needs an orthonormal 2-plane in R^4")
    p1, p2 = plane
    space = Space.sphere(3)

    def chart(u):
        t = u[..., 0]
        return np.cos(t)[..., None] * p1 + np.sin(t)[..., None] * p2

    def deriv(u):
        t = u[..., 0]
        return np.stack([-np.sin(t)[..., None] * p1 + np.cos(t)[..., None] * p2],
                        axis=-2)

    return ParamSubmanifold(space, 1, (CircleAxis(),), chart, deriv)


def torus_curve_s3(p: int, q: int, r1: float = math.sqrt(0.5),
                   phase1: float = 0.0, phase2: float = 0.0) -> ParamSubmanifold:
    """Curve u -> (r1 e^{i(pu+phase1)}, r2 e^{i(qu+phase2)}) on the Clifford torus."""
    p, q = int(p), int(q)
    if p == 0 and q == 0:
        raise ValidationError("torus curve needs (p, q) != (0, 0)")
    r1 = float(r1)
    if not 0 < r1 <= 1:
        raise ValidationError("torus radius split must satisfy 0 < r1 <= 1")
    r2 = math.sqrt(max(0.0, 1.0 - r1 * r1))
    space = Space.sphere(3)

    def chart(u):
        t = u[..., 0]
        return np.stack([r1 * np.cos(p * t + phase1), r1 * np.sin(p * t + phase1),
                         r2 * np.cos(q * t + phase2), r2 * np.sin(q * t + phase2)],
                        axis=-1)

    def deriv(u):
        t = u[..., 0]
        vec = np.stack([-r1 * p * np.sin(p * t + phase1),
                        r1 * p * np.cos(p * t + phase1),
                        -r2 * q * np.sin(q * t + phase2),
                        r2 * q * np.cos(q * t + phase2)], axis=-1)
        return vec[..., None, :]

    return ParamSubmanifold(space, 1, (CircleAxis(),), chart, deriv)


def small_sphere_sn(center, rho: float, k: int = 1, frame=None) -> ParamSubmanifold:
    """Geodesic sphere of dimension k (1 or 2) and radius rho around a point of S^n."""
    center = np.asarray(center, dtype=float)
    center = center / np.linalg.norm(center)
    n = center.shape[0] - 1
    space = Space.sphere(n)
    rho = float(rho)
    if not 0 < rho < np.pi:
        raise ValidationError("geodesic radius must lie in (0, pi)")
    k = int(k)
    if k not in (1, 2):
        raise ValidationError("small spheres are supported for k in {1, 2}")
    if frame is None:
        frame = frame_batch(space, center)[: k + 1]
    frame = np.asarray(frame, dtype=float)[: k + 1]
    if frame.shape != (k + 1, n + 1):
        raise ValidationError("need a tangent (k+1)-frame at the center")
    c, s = math.cos(rho), math.sin(rho)

    if k == 1:
        a1, a2 = frame

        def chart(u):
            t = u[..., 0]
            return c * center + s * (np.cos(t)[..., None] * a1
                                     + np.sin(t)[..., None] * a2)

        def deriv(u):
            t = u[..., 0]
            return s * np.stack([-np.sin(t)[..., None] * a1
                                 + np.cos(t)[..., None] * a2], axis=-2)

        return ParamSubmanifold(space, 1, (CircleAxis(),), chart, deriv)

    a1, a2, a3 = frame

    def chart(u):
        th, ph = u[..., 0], u[..., 1]
        dirv = (np.sin(th) * np.cos(ph))[..., None] * a1 \
            + (np.sin(th) * np.sin(ph))[..., None] * a2 \
            + np.cos(th)[..., None] * a3
        return c * center + s * dirv

    def deriv(u):
        th, ph = u[..., 0], u[..., 1]
        d_th = (np.cos(th) * np.cos(ph))[..., None] * a1 \
            + (np.cos(th) * np.sin(ph))[..., None] * a2 \
            - np.sin(th)[..., None] * a3
        d_ph = (-np.sin(th) * np.sin(ph))[..., None] * a1 \
            + (np.sin(th) * np.cos(ph))[..., None] * a2
        return s * np.stack([d_th, d_ph], axis=-2)

    return ParamSubmanifold(space, 2, (IntervalAxis(0.0, np.pi), CircleAxis()),
                            chart, deriv)


def _fourier_from_points(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Trigonometric interpolant coefficients through a closed polyline."""
    points = np.asarray(points, dtype=float)
    if np.allclose(points[0], points[-1]):
        points = points[:-1]
    npts = len(points)
    coeffs = np.fft.rfft(points, axis=0) / npts
    mmax = coeffs.shape[0] - 1
    cos_c = np.zeros((mmax + 1, 3))
    sin_c = np.zeros((mmax, 3))
    cos_c[0] = np.real(coeffs[0])
    for mode in range(1, mmax + 1):
        scale = 1.0 if (mode == mmax and npts % 2 == 0) else 2.0
        cos_c[mode] = scale * np.real(coeffs[mode])
        sin_c[mode - 1] = -scale * np.imag(coeffs[mode])
    return cos_c, sin_c


def poincare_ball_curve_h3(cos_coeffs=None, sin_coeffs=None,
                           points=None, margin: float = 1e-3) -> ParamSubmanifold:
    """Closed curve in the Poincare ball, lifted to the hyperboloid model.

    The curve may be given by Fourier coefficients (cos_coeffs of shape
    (M+1, 3), sin_coeffs of shape (M, 3)) or by a closed polyline
    (converted to its trigonometric interpolant).
    """
    if points is not None:
        cos_coeffs, sin_coeffs = _fourier_from_points(np.asarray(points, dtype=float))
    if cos_coeffs is None:
        raise ValidationError("need Fourier coefficients or a closed polyline")
    cos_c = np.atleast_2d(np.asarray(cos_coeffs, dtype=float))
    sin_c = np.atleast_2d(np.asarray(sin_coeffs, dtype=float)) \
        if sin_coeffs is not None else np.zeros((0, 3))
    if cos_c.shape[1] != 3 or (len(sin_c) and sin_c.shape[1] != 3):
        raise ValidationError("coefficients must be 3-vectors")
    space = Space.hyperbolic(3)

    def ball(u):
        t = u[..., 0]
        out = np.broadcast_to(cos_c[0], t.shape + (3,)).copy()
        for mode in range(1, len(cos_c)):
            out = out + np.cos(mode * t)[..., None] * cos_c[mode]
        for mode in range(1, len(sin_c) + 1):
            out = out + np.sin(mode * t)[..., None] * sin_c[mode - 1]
        return out

    def d_ball(u):
        t = u[..., 0]
        out = np.zeros(t.shape + (3,))
        for mode in range(1, len(cos_c)):
            out = out - mode * np.sin(mode * t)[..., None] * cos_c[mode]
        for mode in range(1, len(sin_c) + 1):
            out = out + mode * np.cos(mode * t)[..., None] * sin_c[mode - 1]
        return out

    probe = ball(np.linspace(0, 2 * np.pi, 512)[:, None])
    rmax = np.linalg.norm(probe, axis=-1).max()
    if rmax >= 1.0 - margin:
        raise ValidationError(
            f"curve leaves the Poincare ball (max radius {rmax:.4f})")

    def chart(u):
        b = ball(u)
        s = np.sum(b * b, axis=-1)
        f = 1.0 / (1.0 - s)
        return np.concatenate([2 * f[..., None] * b, ((1 + s) * f)[..., None]],
                              axis=-1)

    def deriv(u):
        b, h = ball(u), d_ball(u)
        s = np.sum(b * b, axis=-1)
        f = 1.0 / (1.0 - s)
        ch = np.sum(b * h, axis=-1)
        top = 2 * f[..., None] * h + 4 * (f * f * ch)[..., None] * b
        last = 4 * (f * f * ch)[..., None]
        return np.concatenate([top, last], axis=-1)[..., None, :]

    return ParamSubmanifold(space, 1, (CircleAxis(),), chart, deriv)


def _exp_chart(space: Space, basepoint_rep=None):
    """Geodesic normal-coordinate chart R^4 -> CP^2/CH^2 at a basepoint."""
    if basepoint_rep is None:
        base = np.zeros(3, dtype=complex)
        base[0 if space.kind is SpaceKind.COMPLEX_PROJECTIVE_2 else 2] = 1.0
    else:
        base = np.asarray(basepoint_rep, dtype=complex)
        base = renormalize_point(space, base)
    frame = frame_batch(space, base)  # (4, 3) complex, complex-oriented

    def mapping(u):
        v = np.einsum("...i,ij->...j", u, frame)
        r = np.linalg.norm(u, axis=-1)
        safe = np.where(r > 1e-300, r, 1.0)
        if space.kind is SpaceKind.COMPLEX_PROJECTIVE_2:
            rad, tang = np.cos(r), np.sin(safe) / safe
        else:
            rad, tang = np.cosh(r), np.sinh(safe) / safe
        out = rad[..., None] * base + tang[..., None] * v
        return renormalize_point(space, out)

    return mapping


def _chart_family(space: Space, base: ParamSubmanifold,
                  basepoint=None) -> ParamSubmanifold:
    if base.space.kind is not SpaceKind.EUCLIDEAN or base.space.dim != 4:
        raise ValidationError("chart families need a base submanifold in R^4")
    mapping = _exp_chart(space, basepoint)
    if space.kind is SpaceKind.COMPLEX_PROJECTIVE_2:
        probe = sample(base, 64 if base.k == 1 else (64, 64))
        radii = np.linalg.norm(base.chart(probe.nodes), axis=-1)
        if radii.max() > CP2_CHART_RADIUS:
            raise ValidationError(
                f"chart image leaves the geodesic ball of radius "
                f"{CP2_CHART_RADIUS:.4f} (max {radii.max():.4f})")
    return ParamSubmanifold(space, base.k, base.axes,
                            lambda u: mapping(base.chart(u)), None)


def chart_curve_ch2(base, basepoint=None) -> ParamSubmanifold:
    return _chart_family(Space.ch2(), _as_base(base, 1), basepoint)


def chart_surface_ch2(base, basepoint=None) -> ParamSubmanifold:
    return _chart_family(Space.ch2(), _as_base(base, 2), basepoint)


def chart_curve_cp2(base, basepoint=None) -> ParamSubmanifold:
    return _chart_family(Space.cp2(), _as_base(base, 1), basepoint)


def chart_surface_cp2(base, basepoint=None) -> ParamSubmanifold:
    return _chart_family(Space.cp2(), _as_base(base, 2), basepoint)


def _as_base(base, k: int) -> ParamSubmanifold:
    if isinstance(base, dict):
        base = builtin(base["family"], {key: v for key, v in base.items()
                                        if key != "family"})
    if not isinstance(base, ParamSubmanifold):
        raise ValidationError("base must be a builtin record or a ParamSubmanifold")
    if base.k != k:
        raise ValidationError(f"base submanifold must have dimension {k}")
    return base


_FAMILIES = {
    "euclidean_circle": euclidean_circle,
    "euclidean_round_sphere": euclidean_round_sphere,
    "great_circle_S3": great_circle_s3,
    "torus_curve_S3": torus_curve_s3,
    "small_sphere_Sn": small_sphere_sn,
    "poincare_ball_curve_H3": poincare_ball_curve_h3,
    "chart_curve_CH2": chart_curve_ch2,
    "chart_surface_CH2": chart_surface_ch2,
    "chart_curve_CP2": chart_curve_cp2,
    "chart_surface_CP2": chart_surface_cp2,
}


def builtin(family: str, params: dict) -> ParamSubmanifold:
    """Construct a builtin submanifold family from a parameter record."""
    if family not in _FAMILIES:
        raise ValidationError(
            f"unknown family '{family}'; available: {sorted(_FAMILIES)}")
    params = dict(params)
    orientation = int(params.pop("orientation", 1))
    try:
        m = _FAMILIES[family](**params)
    except TypeError as exc:
        raise ValidationError(f"bad parameters for family '{family}': {exc}") from exc
    if orientation < 0:
        m = m.flipped()
    return dataclasses.replace(m, name=family)


def transform(m: ParamSubmanifold, iso: Isometry) -> ParamSubmanifold:
    """Submanifold whose chart is the isometric image of m's chart."""
    if iso.space != m.space:
        raise UsageError("isometry and submanifold live in different spaces")
    mat = iso.matrix

    def chart(u):
        out = np.einsum("ij,...j->...i", mat, m.chart(u))
        if iso.shift is not None:
            out = out + iso.shift
        return out

    deriv = None
    if m.derivative is not None:
        deriv = lambda u: np.einsum("ij,...kj->...ki", mat, m.derivative(u))
    return dataclasses.replace(m, chart=chart, derivative=deriv)
