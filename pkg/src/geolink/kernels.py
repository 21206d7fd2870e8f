"""Distance kernels and transport-operator spectra of the linking integrand.

Every supported space contributes a scalar kernel ``lambda(d)`` and a
distance-dependent endomorphism of the tangent space at the source
point.  The endomorphism is diagonal with respect to the splitting

    span{T}  (+)  span{iT}  (+)  orthogonal complement,

where ``T`` is the unit tangent pointing at the target point; the
``iT`` block only exists on CP^2/CH^2.  Constant-curvature spaces use
the identity.  All kernels carry their minus signs so that one
integrand shape serves every space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DomainError,
    SingularInputError,
    UnsupportedConfigurationError,
    UsageError,
)
from .spaces import (
    Space,
    SpaceKind,
    SpacePoint,
    Tangent,
    ambient_inner,
    distance_batch,
    geodesic_batch,
)

_GL64_NODES, _GL64_WEIGHTS = np.polynomial.legendre.leggauss(64)
_CUT_SERIES_BAND = 1e-3     # switch to series expansions this close to the cut


def unit_sphere_area(n: int) -> float:
    """Surface measure of the unit n-sphere in R^{n+1} (e.g. 4*pi for n=2)."""
    return 2.0 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)


def _as_positive(d, name="d"):
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise SingularInputError(f"{name} must be strictly positive")
    return d


def lambda_euclidean(n: int, k: int, d) -> np.ndarray | float:
    """Riesz-potential kernel of Euclidean R^n: -1/(d^{n-1} * area(S^{n-1}))."""
    d = _as_positive(d)
    out = -1.0 / (d ** (n - 1) * unit_sphere_area(n - 1))
    return out if out.ndim else float(out)


def lambda_sphere(n: int, k: int, d) -> np.ndarray | float:
    """Kernel of S^n for degree k, by 64-point Gauss-Legendre quadrature.

    The tail integral is evaluated after the shift s = d + t, which keeps
    the integrand analytic on [0, pi - d] for every d in (0, pi).
    """
    d = np.asarray(d, dtype=float)
    if np.any((d <= 0) | (d >= np.pi)):
        raise DomainError("sphere kernel needs 0 < d < pi")
    half = (np.pi - d)[..., None] / 2.0
    t = half * (_GL64_NODES + 1.0)
    integrand = np.sin(d[..., None] + t) ** (n - 1 - k) * np.sin(t) ** k
    tail = half[..., 0] * (integrand * _GL64_WEIGHTS).sum(axis=-1)
    out = -tail / (np.sin(d) ** (n - 1) * unit_sphere_area(n))
    return out if out.ndim else float(out)


def _lambda_sphere_cut_series(n: int, k: int, eps: np.ndarray) -> np.ndarray:
    """Two-term expansion of the sphere kernel in eps = pi - d."""
    a, b = n - 1 - k, k
    beta = lambda p, q: math.gamma(p) * math.gamma(q) / math.gamma(p + q)
    c0 = beta(b + 1, a + 1)
    c2 = ((n - 1) * beta(b + 1, a + 1)
          - a * beta(b + 1, a + 3) - b * beta(b + 3, a + 1)) / 6.0
    return -(eps / unit_sphere_area(n)) * (c0 + c2 * eps * eps)


def lambda_negcurved(space: Space, d) -> np.ndarray | float:
    """Kernel of the negatively curved spaces H^n (m=0) and CH^2 (m=1)."""
    if space.kind not in (SpaceKind.HYPERBOLIC, SpaceKind.COMPLEX_HYPERBOLIC_2):
        raise UsageError("lambda_negcurved needs a negatively curved space")
    d = _as_positive(d)
    m, n = space.m, space.dim
    out = -(2.0 ** m) / (unit_sphere_area(n - 1)
                         * np.sinh(2.0 * d) ** m
                         * np.sinh(d) ** (n - m - 1))
    return out if out.ndim else float(out)


def negcurved_eigenvalues(space: Space, d):
    """Eigenvalues (on T, on iT, on the rest) of the transport operator.

    The iT eigenspace is empty for H^n; the returned middle value is the
    formula value e^{-2d} in either case.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise DomainError("distance must be nonnegative")
    one = np.ones_like(d)
    out = (one, np.exp(-2.0 * d), np.exp(-d))
    if d.ndim:
        return out
    return tuple(float(v) for v in out)


def cp2_coeffs(d):
    """Closed forms of the CP^2 transport-operator entries on iT and on
    the complex-orthogonal complement of T."""
    d = np.asarray(d, dtype=float)
    if np.any((d < 0) | (d > np.pi / 2 + 1e-15)):
        raise DomainError("CP^2 coefficients need 0 <= d <= pi/2")
    l0 = ((np.pi - 2 * d) * np.sin(2 * d) + 2 * np.cos(2 * d) + 2) / 8.0
    l1 = (np.cos(3 * d) + (4 * d - 2 * np.pi) * np.sin(d) + 7 * np.cos(d)) / 16.0
    if d.ndim:
        return l0, l1
    return float(l0), float(l1)


def _lambda_cp2(d) -> np.ndarray:
    d = _as_positive(np.asarray(d, dtype=float))
    return -(2.0 / np.pi ** 2) / (np.sin(2 * d) * np.sin(d) ** 2)


@dataclass(frozen=True)
class KernelSpec:
    """Scalar kernel plus transport-operator spectrum for one (space, k).

    ``weighted_eigenvalues`` returns the products lambda * eigenvalue per
    block, with two-term series used inside the cut-locus band of the
    compact spaces where the raw closed forms are 0/0.  The span{T}
    product is reported as 0 on CP^2 near the cut: it diverges there,
    but the linking integrand wedges with the transported T, which
    annihilates that block, so the value is never consumed.
    """

    space: Space
    k: int
    lam: Callable[[np.ndarray], np.ndarray]

    def eigenvalues(self, d):
        """Plain (on-T, on-iT, on-rest) eigenvalue triple at distance d."""
        d = np.asarray(d, dtype=float)
        kind = self.space.kind
        one = np.ones_like(d)
        if kind in (SpaceKind.EUCLIDEAN, SpaceKind.SPHERE):
            return one, one, one
        if kind in (SpaceKind.HYPERBOLIC, SpaceKind.COMPLEX_HYPERBOLIC_2):
            return negcurved_eigenvalues(self.space, d)
        l0, l1 = cp2_coeffs(d)
        return one, l0, l1

    def weighted_eigenvalues(self, d):
        """Products lambda(d) * eigenvalues, continuous up to the cut locus."""
        d = np.asarray(d, dtype=float)
        kind = self.space.kind
        if kind is SpaceKind.SPHERE:
            eps = np.pi - d
            near = eps < _CUT_SERIES_BAND
            lam = np.where(near, _lambda_sphere_cut_series(self.space.dim, self.k, eps),
                           lambda_sphere(self.space.dim, self.k,
                                         np.where(near, np.pi / 2, d)))
            return lam, lam, lam
        if kind is SpaceKind.COMPLEX_PROJECTIVE_2:
            eps = np.pi / 2 - d
            near = eps < _CUT_SERIES_BAND
            safe = np.where(near, np.pi / 4, d)
            lam = _lambda_cp2(safe)
            l0, l1 = cp2_coeffs(safe)
            p0 = np.where(near, -(eps / np.pi ** 2) * (1 + 7 * eps ** 2 / 6), lam * l0)
            p1 = np.where(near, -(eps ** 2 / (3 * np.pi ** 2)) * (1 + 19 * eps ** 2 / 15),
                          lam * l1)
            pt = np.where(near, 0.0, lam)
            return pt, p0, p1
        lam = self.lam(d)
        e_t, e_it, e_rest = self.eigenvalues(d)
        return lam * e_t, lam * e_it, lam * e_rest

    def l_action(self, x: SpacePoint, y: SpacePoint, v: Tangent) -> Tangent:
        """Apply the transport operator for the pair (x, y) to v at x."""
        if v.base is not x and not np.array_equal(v.base.rep, x.rep):
            raise UsageError("vector must be based at the source point")
        kind = self.space.kind
        if kind in (SpaceKind.EUCLIDEAN, SpaceKind.SPHERE):
            return v
        geo = geodesic_batch(self.space, x.rep, y.rep)
        t_vec = geo.tangent
        d = float(geo.d)
        e_t, e_it, e_rest = self.eigenvalues(d)
        c = ambient_inner(self.space, v.vec, t_vec)
        if self.space.is_complex:
            out = (float(e_t) * np.real(c) * t_vec
                   + float(e_it) * np.imag(c) * (1j * t_vec)
                   + float(e_rest) * (v.vec - c * t_vec))
        else:
            out = float(e_t) * c * t_vec + float(e_rest) * (v.vec - c * t_vec)
        return Tangent(x, out)


def kernel_for(space: Space, k: int) -> KernelSpec:
    """Assemble the kernel for linking a k-submanifold in the given space."""
    if k < 1:
        raise UnsupportedConfigurationError("degree k must be >= 1")
    if k + 1 > space.dim:
        raise UnsupportedConfigurationError(
            f"degree {k} too large for a {space.dim}-dimensional space")
    kind = space.kind
    if kind is SpaceKind.EUCLIDEAN:
        lam = lambda d, n=space.dim: lambda_euclidean(n, k, d)
    elif kind is SpaceKind.SPHERE:
        lam = lambda d, n=space.dim: lambda_sphere(n, k, d)
    elif kind in (SpaceKind.HYPERBOLIC, SpaceKind.COMPLEX_HYPERBOLIC_2):
        lam = lambda d: lambda_negcurved(space, d)
    else:
        if k != 1:
            raise UnsupportedConfigurationError(
                "CP^2 kernel is only available for curve degree k = 1")
        lam = _lambda_cp2
    return KernelSpec(space=space, k=k, lam=lam)


def kernel_table(space: Space, k: int, d_from: float, d_to: float,
                 steps: int) -> np.ndarray:
    """Rows (d, lambda, eigenvalue triple) on a uniform grid, for CSV export."""
    if steps < 1:
        raise UsageError("steps must be >= 1")
    spec = kernel_for(space, k)
    d = np.linspace(d_from, d_to, steps) if steps > 1 else np.array([d_from])
    e_t, e_it, e_rest = spec.eigenvalues(d)
    with np.errstate(divide="ignore"):
        lam = np.where(d > 0, spec.lam(np.where(d > 0, d, 1.0)), -np.inf)
    return np.column_stack([d, lam, e_t, e_it, e_rest])
