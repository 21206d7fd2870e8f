"""Double-integral evaluation of linking numbers.

The integrand couples a source point x on K with a target point y on L:
the kernel weight at distance d(x, y) times the oriented volume at y of

    (L-tangents)  ^  (transported unit direction x -> y)
                  ^  (transported, spectrally weighted K-tangents).

Raw parameter derivatives enter the volume form, so the parameter
Jacobians cancel against the Riemannian measures and plain tensor
quadrature over the two parameter domains yields the integral.

Summation is a fixed-shape pairwise reduction (numpy block summation
over tiles of source nodes, then an ordered reduction over tiles), so
results are bit-reproducible for a fixed resolution and independent of
the worker count.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import CutLocusError, ProximityError, UsageError
from .kernels import KernelSpec, kernel_for
from .spaces import (
    Space,
    SpacePoint,
    Tangent,
    ambient_inner,
    distance_batch,
    frame_batch,
    geodesic_batch,
    volume_batch,
)
from .submanifolds import ParamSubmanifold, evaluate_batch, sample

#: Calibrated sign relating the integral to the crossing/cone oracle
#: convention, one constant per space kind (see tests/test_acceptance.py).
#: The integral of a positively linked fixture equals SIGN * oracle.
ORACLE_SIGN = {
    "euclidean": +1,
    "sphere": +1,
    "hyperbolic": +1,
    "cp2": +1,
    "ch2": +1,
}

_CUT_SKIP_BAND = 1e-9


@dataclass(frozen=True)
class LinkingOptions:
    threads: int = 0             # 0: take the GEOLINK_THREADS env default
    tile: int = 64               # source nodes per reduction tile
    min_separation: float = 1e-4
    integer_tolerance: float = 1e-2


@dataclass(frozen=True)
class LinkingResult:
    value: float
    nearest_integer: int
    integer_gap: float
    error_estimate: float
    nodes_K: int
    nodes_L: int
    min_distance: float
    wall_time: float


@dataclass(frozen=True)
class ConvergenceReport:
    results: list[LinkingResult]
    converged: bool

    @property
    def final(self) -> LinkingResult:
        return self.results[-1]


def _threads(options: LinkingOptions) -> int:
    if options.threads > 0:
        return options.threads
    return max(1, int(os.environ.get("GEOLINK_THREADS", "1")))


def integrand(spec: KernelSpec, x_data, y_data) -> float:
    """Integrand at one source/target pair.

    ``x_data`` is (point, k tangents) on K and ``y_data`` (point, l
    tangents) on L.  Raises CutLocusError for pairs at the cut locus,
    which the quadrature engine treats as a measure-zero skip.
    """
    x, xt = x_data
    y, yt = y_data
    space = spec.space
    d = float(distance_batch(space, x.rep, y.rep))
    if d <= 0:
        raise UsageError("integrand needs distinct points")
    if d > space.cut_distance - _CUT_SKIP_BAND:
        raise CutLocusError("pair at the cut locus; node must be skipped")
    xt_arr = np.stack([t.vec for t in xt])[None]
    yt_arr = np.stack([t.vec for t in yt])[None]
    vals = _pair_values(space, spec, x.rep[None], xt_arr, y.rep[None], yt_arr,
                        None)
    return float(vals[0])


def _pair_values(space: Space, spec: KernelSpec, xp, xt, yp, yt, l_frames):
    """Integrand values for flattened pair batches.

    xp (B, amb), xt (B, k, amb), yp (B, amb), yt (B, l, amb); all pairs
    must be strictly separated and inside the cut locus.
    """
    geo = geodesic_batch(space, xp, yp)
    t_vec = geo.tangent
    d = geo.d
    k = xt.shape[-2]
    _, w_it, w_rest = spec.weighted_eigenvalues(d)
    _, e_it, e_rest = spec.eigenvalues(d)
    cols = [geo.transport(t_vec)]
    for j in range(k):
        v = xt[..., j, :]
        c = ambient_inner(space, v, t_vec)
        # the component along T is annihilated by the wedge with the
        # transported T column, so it is dropped before weighting
        perp = v - c[..., None] * t_vec
        cit, crest = (w_it, w_rest) if j == 0 else (e_it, e_rest)
        if space.is_complex:
            u = (cit * np.imag(c))[..., None] * (1j * t_vec) \
                + crest[..., None] * perp
        else:
            u = crest[..., None] * perp
        cols.append(geo.transport(u))
    w = np.concatenate([yt, np.stack(cols, axis=-2)], axis=-2)
    return volume_batch(space, yp, w, frame=l_frames)


def _pairwise_min_distance(space, xp, yp, tile) -> float:
    mins = []
    for lo in range(0, xp.shape[0], tile):
        d = distance_batch(space, xp[lo:lo + tile, None, :], yp[None, :, :])
        mins.append(float(d.min()))
    return min(mins)


def _tile_sums(space, spec, xp, xt, wk, yp, yt, wl, l_frames, tile, threads):
    """Per-tile partial sums over the pair grid, fixed reduction shape."""
    nk = xp.shape[0]
    tiles = [(i, min(i + tile, nk)) for i in range(0, nk, tile)]
    partial = np.zeros(len(tiles))
    cut = space.cut_distance - _CUT_SKIP_BAND

    def run(idx):
        lo, hi = tiles[idx]
        x_blk = xp[lo:hi, None, :]
        d = distance_batch(space, x_blk, yp[None, :, :])
        valid = d > 0
        if np.isfinite(cut):
            valid &= d < cut
        ik, il = np.nonzero(valid)
        vals = np.zeros(d.shape)
        if ik.size:
            vals[ik, il] = _pair_values(
                space, spec, xp[lo + ik], xt[lo + ik], yp[il], yt[il],
                None if l_frames is None else l_frames[il])
        partial[idx] = float(np.sum(vals * wk[lo:hi, None] * wl[None, :]))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, range(len(tiles))))
    else:
        for idx in range(len(tiles)):
            run(idx)
    return partial


def _resolutions(k_dim, l_dim, resolution):
    if np.isscalar(resolution):
        return (int(resolution),) * k_dim, (int(resolution),) * l_dim
    res_k, res_l = resolution
    norm = lambda r, dim: (int(r),) * dim if np.isscalar(r) else tuple(map(int, r))
    return norm(res_k, k_dim), norm(res_l, l_dim)


def _halve(res):
    return tuple(max(4, r // 2) for r in res)


def _quadrature_value(space, spec, k_sub, l_sub, res_k, res_l, options,
                      threads, want_min_distance=False):
    sk, sl = sample(k_sub, res_k), sample(l_sub, res_l)
    xp, xt = evaluate_batch(k_sub, sk.nodes)
    yp, yt = evaluate_batch(l_sub, sl.nodes)
    dmin = _pairwise_min_distance(space, xp, yp, options.tile)
    if dmin <= options.min_separation:
        raise ProximityError(dmin, options.min_separation)
    l_frames = frame_batch(space, yp) if space.is_complex else None
    partial = _tile_sums(space, spec, xp, xt, sk.weights, yp, yt,
                         sl.weights, l_frames, options.tile, threads)
    return float(np.sum(partial)), dmin, len(sk.weights), len(sl.weights)


def linking_integral(space: Space, k_sub: ParamSubmanifold,
                     l_sub: ParamSubmanifold, resolution,
                     options: LinkingOptions | None = None) -> LinkingResult:
    """Linking integral of a disjoint pair by tensor-product quadrature.

    ``resolution`` is either one per-axis count for every axis of both
    factors, or a pair (counts for K, counts for L).  The error estimate
    compares against the same quadrature at half resolution.
    """
    options = options or LinkingOptions()
    if k_sub.space != space or l_sub.space != space:
        raise UsageError("submanifolds must live in the given space")
    if k_sub.k + l_sub.k + 1 != space.dim:
        raise UsageError(
            f"degree constraint violated: {k_sub.k} + {l_sub.k} + 1 != {space.dim}")
    spec = kernel_for(space, k_sub.k)
    res_k, res_l = _resolutions(k_sub.k, l_sub.k, resolution)
    threads = _threads(options)
    start = time.perf_counter()
    value, dmin, nk, nl = _quadrature_value(
        space, spec, k_sub, l_sub, res_k, res_l, options, threads)
    coarse, _, _, _ = _quadrature_value(
        space, spec, k_sub, l_sub, _halve(res_k), _halve(res_l), options, threads)
    elapsed = time.perf_counter() - start
    nearest = int(round(value))
    return LinkingResult(
        value=value, nearest_integer=nearest, integer_gap=abs(value - nearest),
        error_estimate=abs(value - coarse), nodes_K=nk, nodes_L=nl,
        min_distance=dmin, wall_time=elapsed)


def convergence_run(space: Space, k_sub: ParamSubmanifold,
                    l_sub: ParamSubmanifold, start_resolution, budget: int = 3,
                    tolerance: float | None = None,
                    options: LinkingOptions | None = None) -> ConvergenceReport:
    """Double the resolution until the value sits on an integer.

    Stops once integer_gap < tolerance or after ``budget`` refinements;
    non-convergence is reported in the flag, not raised.
    """
    options = options or LinkingOptions()
    tol = options.integer_tolerance if tolerance is None else tolerance
    res_k, res_l = _resolutions(k_sub.k, l_sub.k, start_resolution)
    results = []
    for _ in range(max(1, budget)):
        result = linking_integral(space, k_sub, l_sub, (res_k, res_l), options)
        results.append(result)
        if result.integer_gap < tol:
            return ConvergenceReport(results, True)
        res_k = tuple(2 * r for r in res_k)
        res_l = tuple(2 * r for r in res_l)
    return ConvergenceReport(results, False)
