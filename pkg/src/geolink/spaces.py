"""Exact geometry of the five model spaces.

Each space is realized in an ambient model with closed-form geodesics:

* Euclidean R^n: plain vectors of length n.
* Sphere S^n: unit vectors in R^{n+1}, curvature +1.
* Hyperbolic H^n: upper hyperboloid in Minkowski R^{n,1} (signature
  ``(+,...,+,-)``, last coordinate positive), curvature -1.
* Complex projective plane CP^2: complex 3-vectors with ``<z,z> = +1``
  modulo phase, sectional curvature in [1,4], diameter pi/2.
* Complex hyperbolic plane CH^2: complex 3-vectors with ``<z,z> = -1``
  for the signature-(2,1) Hermitian form, modulo phase, curvature in
  [-4,-1].

Tangent vectors are ambient vectors orthogonal to the base point in the
model's pairing (horizontal representatives for the complex spaces).
All public operations are pure functions of ``SpacePoint``/``Tangent``
values; the private ``*_batch`` helpers implement the same formulas on
arrays with leading batch axes and are what the integration engine uses.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CutLocusError,
    DegenerateInputError,
    UsageError,
    ValidationError,
)

_NORM_TOL = 1e-12       # ambient normalization tolerance for SpacePoint
_TANGENCY_TOL = 1e-8    # tangency tolerance for Tangent construction
_CUT_TOL = 1e-9         # "at the cut locus" band width


class SpaceKind(enum.Enum):
    EUCLIDEAN = "euclidean"
    SPHERE = "sphere"
    HYPERBOLIC = "hyperbolic"
    COMPLEX_HYPERBOLIC_2 = "ch2"
    COMPLEX_PROJECTIVE_2 = "cp2"


_COMPLEX_KINDS = (SpaceKind.COMPLEX_HYPERBOLIC_2, SpaceKind.COMPLEX_PROJECTIVE_2)


@dataclass(frozen=True)
class Space:
    """A model space: kind plus real dimension.

    ``m`` is the multiplicity of the curvature-4 eigenvalue of the
    radial curvature operator: 0 for the constant-curvature spaces and
    1 for CH^2/CP^2.
    """

    kind: SpaceKind
    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise ValidationError("space dimension must be >= 2")
        if self.kind in _COMPLEX_KINDS and self.dim != 4:
            raise ValidationError(f"{self.kind.value} has real dimension 4")

    @staticmethod
    def euclidean(n: int) -> "Space":
        return Space(SpaceKind.EUCLIDEAN, n)

    @staticmethod
    def sphere(n: int) -> "Space":
        return Space(SpaceKind.SPHERE, n)

    @staticmethod
    def hyperbolic(n: int) -> "Space":
        return Space(SpaceKind.HYPERBOLIC, n)

    @staticmethod
    def ch2() -> "Space":
        return Space(SpaceKind.COMPLEX_HYPERBOLIC_2, 4)

    @staticmethod
    def cp2() -> "Space":
        return Space(SpaceKind.COMPLEX_PROJECTIVE_2, 4)

    @property
    def m(self) -> int:
        return 1 if self.kind in _COMPLEX_KINDS else 0

    @property
    def is_complex(self) -> bool:
        return self.kind in _COMPLEX_KINDS

    @property
    def ambient_dim(self) -> int:
        """Length of the ambient coordinate vector (complex length for C-spaces)."""
        if self.kind is SpaceKind.EUCLIDEAN:
            return self.dim
        if self.is_complex:
            return 3
        return self.dim + 1

    @property
    def dtype(self):
        return np.complex128 if self.is_complex else np.float64

    @property
    def cut_distance(self) -> float:
        """Distance to the cut locus (inf for the noncompact spaces)."""
        if self.kind is SpaceKind.SPHERE:
            return np.pi
        if self.kind is SpaceKind.COMPLEX_PROJECTIVE_2:
            return np.pi / 2
        return np.inf

    def _signature(self) -> np.ndarray:
        sig = np.ones(self.ambient_dim)
        if self.kind in (SpaceKind.HYPERBOLIC, SpaceKind.COMPLEX_HYPERBOLIC_2):
            sig[-1] = -1.0
        return sig

    def __str__(self):
        if self.is_complex:
            return self.kind.value
        return f"{self.kind.value}{self.dim}"


# ---------------------------------------------------------------------------
# batch primitives (arrays with leading batch axes, last axis = ambient)
# ---------------------------------------------------------------------------

def ambient_inner(space: Space, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Model pairing: Euclidean dot, Minkowski form, or (pseudo-)Hermitian form.

    Linear in ``a``, conjugate-linear in ``b`` for the complex spaces.
    """
    sig = space._signature()
    if space.is_complex:
        return np.einsum("...i,...i,i->...", a, np.conj(b), sig)
    return np.einsum("...i,...i,i->...", a, b, sig)


def riemannian_inner(space: Space, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Real (Riemannian) inner product of tangent representatives."""
    return np.real(ambient_inner(space, a, b))


def project_tangent_batch(space: Space, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Project ambient vectors onto the tangent (horizontal) space at x."""
    if space.kind is SpaceKind.EUCLIDEAN:
        return v
    q = ambient_inner(space, v, x)
    xx = ambient_inner(space, x, x)  # +-1 by the model constraint
    return v - (q / xx)[..., None] * x


def point_norm_defect(space: Space, x: np.ndarray) -> np.ndarray:
    """How far x is from the model constraint set (0 on the model)."""
    q = ambient_inner(space, x, x)
    if space.kind is SpaceKind.EUCLIDEAN:
        return np.zeros(np.shape(q))
    target = -1.0 if space.kind in (SpaceKind.HYPERBOLIC,
                                    SpaceKind.COMPLEX_HYPERBOLIC_2) else 1.0
    return np.abs(np.real(q) - target) + np.abs(np.imag(q))


def renormalize_point(space: Space, x: np.ndarray) -> np.ndarray:
    """Rescale ambient representatives back onto the model constraint set."""
    if space.kind is SpaceKind.EUCLIDEAN:
        return x
    q = np.real(ambient_inner(space, x, x))
    return x / np.sqrt(np.abs(q))[..., None]


def distance_batch(space: Space, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    kind = space.kind
    if kind is SpaceKind.EUCLIDEAN:
        return np.linalg.norm(x - y, axis=-1)
    if kind is SpaceKind.SPHERE:
        # chordal form: atan2(|x-y|, |x+y|) is accurate at both ends
        return 2.0 * np.arctan2(np.linalg.norm(x - y, axis=-1),
                                np.linalg.norm(x + y, axis=-1))
    if kind is SpaceKind.HYPERBOLIC:
        # chordal form: <x-y, x-y>_M = 4 sinh^2(d/2), stable at both ends
        q2 = ambient_inner(space, x - y, x - y)
        return 2.0 * np.arcsinh(0.5 * np.sqrt(np.clip(q2, 0.0, None)))
    q = np.abs(ambient_inner(space, x, y))
    if kind is SpaceKind.COMPLEX_HYPERBOLIC_2:   # cosh(d) = |<x,y>|
        return _stable_arccosh(q)
    # CP^2: cos(d) = |<x,y>|, d in [0, pi/2]
    s = np.sqrt(np.clip(1.0 - q * q, 0.0, None))
    return np.arctan2(s, q)


def _stable_arccosh(q: np.ndarray) -> np.ndarray:
    u = np.clip(q - 1.0, 0.0, None)
    return np.log1p(u + np.sqrt(u * (u + 2.0)))


@dataclass
class GeodesicBatch:
    """Precomputed data of the minimizing geodesics from x to y.

    ``transport`` maps tangent representatives at x to representatives
    at y (phase-aligned with y's given representative on the complex
    spaces).  ``tangent`` is the unit initial velocity at x.
    """

    space: Space
    x: np.ndarray
    d: np.ndarray
    tangent: np.ndarray
    _coef: np.ndarray           # (cos d - 1) or (cosh d - 1); 0 for Euclidean
    _xterm: np.ndarray          # -sin d (compact) or +sinh d (hyperbolic); 0 Euclid
    _phase: np.ndarray | None   # phase-back factor for the complex spaces

    def transport(self, v: np.ndarray) -> np.ndarray:
        if self.space.kind is SpaceKind.EUCLIDEAN:
            return v
        c = ambient_inner(self.space, v, self.tangent)
        out = v + c[..., None] * (self._coef[..., None] * self.tangent
                                  + self._xterm[..., None] * self.x)
        if self._phase is not None:
            out = self._phase[..., None] * out
        return out


def geodesic_batch(space: Space, x: np.ndarray, y: np.ndarray) -> GeodesicBatch:
    """Distance, unit log, and parallel transport data for batches of pairs.

    Preconditions (checked by the scalar wrappers, assumed here): pairs
    are distinct and strictly inside the cut locus.
    """
    kind = space.kind
    d = distance_batch(space, x, y)
    zero = np.zeros_like(d)
    if kind is SpaceKind.EUCLIDEAN:
        t = (y - x) / d[..., None]
        return GeodesicBatch(space, x, d, t, zero, zero, None)
    if kind is SpaceKind.SPHERE:
        c, s = np.cos(d), np.sin(d)
        t = (y - c[..., None] * x) / s[..., None]
        return GeodesicBatch(space, x, d, t, c - 1.0, -s, None)
    if kind is SpaceKind.HYPERBOLIC:
        c, s = np.cosh(d), np.sinh(d)
        t = (y - c[..., None] * x) / s[..., None]
        return GeodesicBatch(space, x, d, t, c - 1.0, s, None)
    q = ambient_inner(space, y, x)
    absq = np.abs(q)
    if kind is SpaceKind.COMPLEX_PROJECTIVE_2:
        # representative of y with <y', x> real positive
        align = np.conj(q) / absq
        c, s = np.cos(d), np.sin(d)
        xterm = -s
    else:
        # representative of y with <y', x> a positive multiple of <x,x>
        align = -np.conj(q) / absq
        c, s = np.cosh(d), np.sinh(d)
        xterm = s
    yal = align[..., None] * y
    t = (yal - c[..., None] * x) / s[..., None]
    phase = 1.0 / align
    return GeodesicBatch(space, x, d, t, c - 1.0, xterm, phase)


def exp_batch(space: Space, x: np.ndarray, v: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Unit-speed geodesic from x with initial velocity v, at parameter t."""
    kind = space.kind
    t = np.asarray(t, dtype=float)
    if kind is SpaceKind.EUCLIDEAN:
        return x + t[..., None] * v
    if kind in (SpaceKind.SPHERE, SpaceKind.COMPLEX_PROJECTIVE_2):
        return np.cos(t)[..., None] * x + np.sin(t)[..., None] * v
    return np.cosh(t)[..., None] * x + np.sinh(t)[..., None] * v


def frame_batch(space: Space, x: np.ndarray) -> np.ndarray:
    """Positively oriented orthonormal tangent frames, shape (..., dim, ambient).

    Real spaces use a Householder reflection pinning the base point to a
    coordinate axis; complex spaces return (u1, i*u1, u2, i*u2) for a
    Hermitian-orthonormal horizontal pair (u1, u2), which realizes the
    complex orientation.
    """
    kind = space.kind
    amb = space.ambient_dim
    if kind is SpaceKind.EUCLIDEAN:
        eye = np.eye(amb)
        return np.broadcast_to(eye, x.shape[:-1] + (amb, amb)).copy()
    if kind in (SpaceKind.SPHERE, SpaceKind.HYPERBOLIC):
        sig = space._signature()
        e = np.zeros(amb)
        e[-1] = 1.0
        sgn = np.where(x[..., -1] >= 0, -1.0, 1.0)
        if kind is SpaceKind.HYPERBOLIC:
            sgn = -np.ones_like(x[..., -1])  # upper sheet: always x_last >= 1
        w = x - sgn[..., None] * e
        ww = np.einsum("...i,...i,i->...", w, w, sig)
        small = np.abs(ww) < 1e-30
        ww_safe = np.where(small, 1.0, ww)
        # columns H e_i, i < dim; H = I - 2 w (w^T sig)/<w,w>
        frame = np.zeros(x.shape[:-1] + (space.dim, amb))
        for i in range(space.dim):
            ei = np.zeros(amb)
            ei[i] = 1.0
            coef = 2.0 * w[..., i] * sig[i] / ww_safe
            col = ei - coef[..., None] * w
            frame[..., i, :] = np.where(small[..., None], ei, col)
        # det(H) = -1, so det(f_1..f_n, x) = -sgn; flip one vector if needed
        flip = np.where(small, 1.0, -sgn)
        frame[..., 0, :] *= flip[..., None]
        return frame
    # complex spaces: greedy Hermitian Gram-Schmidt over projected basis vectors
    batch = x.shape[:-1]
    cands = []
    for i in range(3):
        ei = np.zeros(3, dtype=complex)
        ei[i] = 1.0
        cands.append(project_tangent_batch(space, x, np.broadcast_to(ei, x.shape)))
    norms = np.stack([np.real(ambient_inner(space, c, c)) for c in cands])
    order = np.argsort(-norms, axis=0)
    stack = np.stack(cands)                       # (3, ..., 3)
    take = lambda idx: np.take_along_axis(
        stack, idx[None, ..., None], axis=0)[0]
    u1 = take(order[0])
    u1 = u1 / np.sqrt(np.real(ambient_inner(space, u1, u1)))[..., None]
    # second vector: the better conditioned of the remaining two candidates
    # after removing the u1 component (guards against cancellation at points
    # far from the basepoint, where projected candidates can nearly align)
    v_a = take(order[1])
    v_a = v_a - ambient_inner(space, v_a, u1)[..., None] * u1
    v_b = take(order[2])
    v_b = v_b - ambient_inner(space, v_b, u1)[..., None] * u1
    n_a = np.real(ambient_inner(space, v_a, v_a))
    n_b = np.real(ambient_inner(space, v_b, v_b))
    u2 = np.where((n_a >= n_b)[..., None], v_a, v_b)
    u2 = u2 / np.sqrt(np.clip(np.maximum(n_a, n_b), 1e-300, None))[..., None]
    u2 = u2 - ambient_inner(space, u2, u1)[..., None] * u1   # second GS pass
    u2 = u2 / np.sqrt(np.clip(np.real(ambient_inner(space, u2, u2)),
                              1e-300, None))[..., None]
    frame = np.empty(batch + (4, 3), dtype=complex)
    frame[..., 0, :] = u1
    frame[..., 1, :] = 1j * u1
    frame[..., 2, :] = u2
    frame[..., 3, :] = 1j * u2
    return frame


def volume_batch(space: Space, y: np.ndarray, w: np.ndarray,
                 frame: np.ndarray | None = None) -> np.ndarray:
    """Oriented volume of dim-many tangent vectors; w has shape (..., dim, ambient).

    Real spaces: ambient determinant with the base point appended as the
    last column, which equals the coordinate determinant in a positively
    oriented orthonormal frame (outward/future normal last).  Complex
    spaces: real coordinate determinant in the complex-oriented frame.
    """
    kind = space.kind
    if kind is SpaceKind.EUCLIDEAN:
        return np.linalg.det(np.swapaxes(w, -1, -2))
    if kind in (SpaceKind.SPHERE, SpaceKind.HYPERBOLIC):
        cols = np.concatenate([w, y[..., None, :]], axis=-2)
        return np.linalg.det(np.swapaxes(cols, -1, -2))
    if frame is None:
        frame = frame_batch(space, y)
    sig = space._signature()
    coords = np.einsum("...ja,...ia,a->...ij", frame, np.conj(w), sig)
    return np.linalg.det(np.real(coords))


# ---------------------------------------------------------------------------
# scalar API
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpacePoint:
    """A point given by a normalized representative in the ambient model."""

    space: Space
    rep: np.ndarray = field(repr=False)

    def __post_init__(self):
        rep = np.asarray(self.rep, dtype=self.space.dtype)
        if rep.shape != (self.space.ambient_dim,):
            raise UsageError(
                f"expected ambient vector of length {self.space.ambient_dim}, "
                f"got shape {rep.shape}")
        defect = float(point_norm_defect(self.space, rep))
        if defect > _NORM_TOL * 10:
            raise ValidationError(f"ambient normalization violated by {defect:.2e}")
        if self.space.kind is SpaceKind.HYPERBOLIC and rep[-1] <= 0:
            raise ValidationError("hyperboloid representative must have positive last coordinate")
        object.__setattr__(self, "rep", rep)


@dataclass(frozen=True)
class Tangent:
    """A tangent vector: base point plus an ambient vector satisfying tangency."""

    base: SpacePoint
    vec: np.ndarray = field(repr=False)

    def __post_init__(self):
        vec = np.asarray(self.vec, dtype=self.base.space.dtype)
        if vec.shape != (self.base.space.ambient_dim,):
            raise UsageError("tangent vector has wrong ambient length")
        space = self.base.space
        if space.kind is not SpaceKind.EUCLIDEAN:
            defect = abs(ambient_inner(space, vec, self.base.rep))
            scale = max(1.0, float(np.linalg.norm(vec)))
            if defect > _TANGENCY_TOL * scale:
                raise ValidationError(f"tangency constraint violated by {float(defect):.2e}")
        object.__setattr__(self, "vec", vec)

    @property
    def space(self) -> Space:
        return self.base.space

    def norm(self) -> float:
        return float(np.sqrt(riemannian_inner(self.space, self.vec, self.vec)))


def _check_same_space(x: SpacePoint, y: SpacePoint):
    if x.space != y.space:
        raise UsageError(f"points live in different spaces: {x.space} vs {y.space}")


def distance(x: SpacePoint, y: SpacePoint) -> float:
    """Geodesic distance between two points of the same space."""
    _check_same_space(x, y)
    return float(distance_batch(x.space, x.rep, y.rep))


def _checked_geodesic(x: SpacePoint, y: SpacePoint) -> GeodesicBatch:
    _check_same_space(x, y)
    d = float(distance_batch(x.space, x.rep, y.rep))
    if d < 1e-12:
        raise DegenerateInputError("coincident points have no unique direction")
    if d > x.space.cut_distance - _CUT_TOL:
        raise CutLocusError(
            f"distance {d:.6f} at or beyond the cut locus "
            f"({x.space.cut_distance:.6f})")
    return geodesic_batch(x.space, x.rep, y.rep)


def log_unit(x: SpacePoint, y: SpacePoint) -> Tangent:
    """Unit tangent at x pointing along the minimizing geodesic to y."""
    geo = _checked_geodesic(x, y)
    return Tangent(x, geo.tangent)


def exp_map(x: SpacePoint, v: Tangent, t: float) -> SpacePoint:
    """Point at arclength t along the unit-speed geodesic from x with velocity v."""
    if v.base is not x and not np.array_equal(v.base.rep, x.rep):
        raise UsageError("velocity is not based at the given point")
    if abs(v.norm() - 1.0) > 1e-8:
        raise UsageError(f"exp_map requires a unit velocity, |v| = {v.norm():.12f}")
    rep = exp_batch(x.space, x.rep, v.vec, np.asarray(float(t)))
    return SpacePoint(x.space, renormalize_point(x.space, rep))


def parallel_transport(x: SpacePoint, y: SpacePoint, v: Tangent) -> Tangent:
    """Parallel transport of v along the minimizing geodesic from x to y."""
    if v.base is not x and not np.array_equal(v.base.rep, x.rep):
        raise UsageError("vector is not based at the transport origin")
    geo = _checked_geodesic(x, y)
    return Tangent(y, geo.transport(v.vec))


def orthonormal_frame(x: SpacePoint) -> list[Tangent]:
    """Positively oriented orthonormal basis of the tangent space at x."""
    frame = frame_batch(x.space, x.rep)
    return [Tangent(x, frame[i]) for i in range(x.space.dim)]


def volume_form(y: SpacePoint, w: list[Tangent]) -> float:
    """Oriented volume of dim-many tangent vectors at y."""
    if len(w) != y.space.dim:
        raise UsageError(f"volume form needs {y.space.dim} vectors, got {len(w)}")
    for t in w:
        if not np.array_equal(t.base.rep, y.rep):
            raise UsageError("volume form arguments must be based at the same point")
    mat = np.stack([t.vec for t in w])
    return float(volume_batch(y.space, y.rep, mat))


def complex_structure(v: Tangent) -> Tangent:
    """Multiplication by i on the horizontal representative (CP^2/CH^2 only)."""
    if not v.space.is_complex:
        raise UsageError("complex structure only exists on CP^2/CH^2")
    return Tangent(v.base, 1j * v.vec)


def same_point(x: SpacePoint, y: SpacePoint, tol: float = 1e-9) -> bool:
    """Equality as points of the space (phase-insensitive for CP^2/CH^2)."""
    _check_same_space(x, y)
    return float(distance_batch(x.space, x.rep, y.rep)) < tol


# ---------------------------------------------------------------------------
# randomized test plumbing (seeded, also used by the CLI oracles)
# ---------------------------------------------------------------------------

def random_point(space: Space, rng: np.random.Generator,
                 radius: float = 2.0) -> SpacePoint:
    """Random point; noncompact spaces are sampled in a ball of the given radius."""
    kind = space.kind
    if kind is SpaceKind.EUCLIDEAN:
        return SpacePoint(space, rng.normal(size=space.dim) * radius)
    if kind is SpaceKind.SPHERE:
        v = rng.normal(size=space.dim + 1)
        return SpacePoint(space, v / np.linalg.norm(v))
    if kind is SpaceKind.COMPLEX_PROJECTIVE_2:
        z = rng.normal(size=3) + 1j * rng.normal(size=3)
        return SpacePoint(space, z / np.sqrt(np.real(ambient_inner(space, z, z))))
    # hyperbolic-type: exponential of a random direction at the basepoint
    base = _basepoint(space)
    v = _random_tangent_rep(space, base, rng)
    t = rng.uniform(0.05, radius)
    rep = exp_batch(space, base, v, np.asarray(t))
    rep = renormalize_point(space, rep)
    if kind is SpaceKind.COMPLEX_HYPERBOLIC_2:
        rep = rep * np.exp(1j * rng.uniform(0, 2 * np.pi))
    return SpacePoint(space, rep)


def _basepoint(space: Space) -> np.ndarray:
    amb = space.ambient_dim
    e = np.zeros(amb, dtype=space.dtype)
    if space.kind is SpaceKind.EUCLIDEAN:
        return e
    e[-1] = 1.0
    if space.kind is SpaceKind.COMPLEX_PROJECTIVE_2:
        e = np.zeros(amb, dtype=space.dtype)
        e[0] = 1.0
    return e


def basepoint(space: Space) -> SpacePoint:
    """Canonical basepoint of the ambient model."""
    return SpacePoint(space, _basepoint(space))


def _random_tangent_rep(space: Space, x: np.ndarray,
                        rng: np.random.Generator) -> np.ndarray:
    if space.is_complex:
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
    else:
        v = rng.normal(size=space.ambient_dim)
    v = project_tangent_batch(space, x, v)
    return v / np.sqrt(np.real(ambient_inner(space, v, v)))


def random_unit_tangent(x: SpacePoint, rng: np.random.Generator) -> Tangent:
    return Tangent(x, _random_tangent_rep(x.space, x.rep, rng))


@dataclass(frozen=True)
class Isometry:
    """Ambient-model isometry: linear part plus a shift (Euclidean only)."""

    space: Space
    matrix: np.ndarray
    shift: np.ndarray | None = None

    def apply_point(self, x: SpacePoint) -> SpacePoint:
        rep = self.matrix @ x.rep
        if self.shift is not None:
            rep = rep + self.shift
        return SpacePoint(self.space, renormalize_point(self.space, rep))

    def apply_tangent(self, v: Tangent) -> Tangent:
        return Tangent(self.apply_point(v.base), self.matrix @ v.vec)


def _random_rotation(n: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def _random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r))).conj()


def random_isometry(space: Space, rng: np.random.Generator) -> Isometry:
    """Random orientation-preserving ambient isometry of the model."""
    kind = space.kind
    if kind is SpaceKind.EUCLIDEAN:
        return Isometry(space, _random_rotation(space.dim, rng),
                        rng.normal(size=space.dim))
    if kind is SpaceKind.SPHERE:
        return Isometry(space, _random_rotation(space.dim + 1, rng))
    if kind is SpaceKind.HYPERBOLIC:
        n = space.dim
        boost = np.eye(n + 1)
        t = rng.uniform(-1.5, 1.5)
        boost[n - 1, n - 1] = boost[n, n] = np.cosh(t)
        boost[n - 1, n] = boost[n, n - 1] = np.sinh(t)
        r1 = np.eye(n + 1)
        r1[:n, :n] = _random_rotation(n, rng)
        r2 = np.eye(n + 1)
        r2[:n, :n] = _random_rotation(n, rng)
        return Isometry(space, r1 @ boost @ r2)
    if kind is SpaceKind.COMPLEX_PROJECTIVE_2:
        return Isometry(space, _random_unitary(3, rng))
    # CH^2: U(2)xU(1) factors around a real boost in the (e2, e3) plane
    t = rng.uniform(-1.0, 1.0)
    boost = np.eye(3, dtype=complex)
    boost[1, 1] = boost[2, 2] = np.cosh(t)
    boost[1, 2] = boost[2, 1] = np.sinh(t)
    u1 = np.eye(3, dtype=complex)
    u1[:2, :2] = _random_unitary(2, rng)
    u1[2, 2] = np.exp(1j * rng.uniform(0, 2 * np.pi))
    u2 = np.eye(3, dtype=complex)
    u2[:2, :2] = _random_unitary(2, rng)
    u2[2, 2] = np.exp(1j * rng.uniform(0, 2 * np.pi))
    return Isometry(space, u1 @ boost @ u2)
