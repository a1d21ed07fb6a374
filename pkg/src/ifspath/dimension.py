"""Similarity dimension solver and box-counting dimension estimate."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import ApproxCurve, IfsPath
from .scalars import to_float


@dataclass(frozen=True)
class DimensionResult:
    s: float
    residual: float
    iterations: int


def moran_value(ratios: Sequence[float], s: float) -> float:
    return math.fsum(r ** s for r in ratios) - 1.0


def similarity_dimension(path: IfsPath, tol: float = 1e-13, max_iter: int = 200) -> DimensionResult:
    """The unique root s > 0 of sum r_i^s = 1.

    f(s) = sum r_i^s - 1 is strictly decreasing with f(0) = N - 1 > 0, so the
    root is bracketed by [0, log N / log(1/max r)].  Bisection narrows the
    bracket, then Newton polishes; the residual contract is |f(s)| <= 1e-13.
    """
    ratios = [to_float(s.ratio) for s in path.maps]
    n = len(ratios)
    rmax = max(ratios)
    hi = math.log(n) / math.log(1.0 / rmax)
    lo = 0.0
    iterations = 0
    for _ in range(60):
        iterations += 1
        mid = 0.5 * (lo + hi)
        if moran_value(ratios, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    s = 0.5 * (lo + hi)
    for _ in range(max_iter - iterations):
        iterations += 1
        f = moran_value(ratios, s)
        fp = math.fsum(r ** s * math.log(r) for r in ratios)
        step = f / fp
        s_new = s - step
        if not lo <= s_new <= hi:
            break
        s = s_new
        if abs(step) < 1e-16 * (1.0 + abs(s)):
            break
    residual = abs(moran_value(ratios, s))
    return DimensionResult(s, residual, iterations)


def _sample_polyline(polyline: np.ndarray, spacing: float) -> np.ndarray:
    """Points along the polyline at most `spacing` apart (plus vertices)."""
    p0, p1 = polyline[:-1], polyline[1:]
    seg_len = np.linalg.norm(p1 - p0, axis=1)
    ns = np.maximum(1, np.ceil(seg_len / spacing).astype(np.int64))
    chunks = [polyline[-1:]]
    for count in np.unique(ns):
        mask = ns == count
        a, b = p0[mask], p1[mask]
        ts = np.linspace(0.0, 1.0, count + 1)[:-1]
        pts = a[:, None, :] * (1.0 - ts)[None, :, None] + b[:, None, :] * ts[None, :, None]
        chunks.append(pts.reshape(-1, polyline.shape[1]))
    return np.vstack(chunks)


SNAP = 1e-9


def _axis_cells(vals: np.ndarray, eps: float, lo: float, hi: float):
    """Cell indices along one axis with closed-cell semantics.

    A coordinate on an interior grid line belongs to both adjacent cells;
    the grid is clipped to the data range [lo, hi], so boundary lines do
    not spill cells outside the bounding box.
    """
    f = vals / eps
    r = np.rint(f)
    on_line = np.abs(f - r) < SNAP
    primary = np.where(on_line, r, np.floor(f)).astype(np.int64)
    secondary = np.where(on_line, r - 1, primary).astype(np.int64)
    fl = lo / eps
    imin = int(math.floor(fl + SNAP))
    fh = hi / eps
    m = math.floor(fh + SNAP)
    imax = m - 1 if abs(fh - m) < 2 * SNAP else m
    imax = max(imax, imin)
    return np.clip(primary, imin, imax), np.clip(secondary, imin, imax)


def _count_cells(pts: np.ndarray, eps: float, lo: np.ndarray, hi: np.ndarray) -> int:
    """Occupied cells of the offset-0 grid meeting the sampled set."""
    dim = pts.shape[1]
    per_axis = [
        _axis_cells(pts[:, d], eps, float(lo[d]), float(hi[d])) for d in range(dim)
    ]
    if dim == 2:
        (xp, xs), (yp, ys) = per_axis

        def key(ix, iy):
            return (ix + (1 << 20)) * (1 << 32) + (iy + (1 << 20))

        keys = [key(xp, yp)]
        mx = xs != xp
        my = ys != yp
        if mx.any():
            keys.append(key(xs[mx], yp[mx]))
        if my.any():
            keys.append(key(xp[my], ys[my]))
        both = mx & my
        if both.any():
            keys.append(key(xs[both], ys[both]))
        return len(np.unique(np.concatenate(keys)))
    idx_sets = []
    import itertools as _it

    for choice in _it.product(*[(0, 1)] * dim):
        cols = [per_axis[d][choice[d]] for d in range(dim)]
        idx_sets.append(np.stack(cols, axis=1))
    return len(np.unique(np.vstack(idx_sets), axis=0))


def grid_count(polyline: np.ndarray, eps: float) -> int:
    """Number of eps-grid cells met by the polyline (offset-0 grid).

    Segments are sampled at spacing eps/4, which cannot skip a cell the
    segment crosses by more than a sliver; adequate for the declared
    estimate tolerances.
    """
    pts = _sample_polyline(polyline, eps / 4.0)
    return _count_cells(pts, eps, polyline.min(axis=0), polyline.max(axis=0))


def box_dimension_estimate(curve: ApproxCurve, scales: Sequence[float]) -> float:
    """Least-squares slope of log(box count) against log(1/scale).

    The scales must form a usable regime: at least 3 of them, spanning at
    least two decades, all above the curve's error bound.
    """
    scales = sorted(float(s) for s in scales)
    if len(scales) < 3:
        raise ValueError("need at least 3 scales")
    if scales[0] <= curve.error_bound:
        raise ValueError(
            f"scale {scales[0]} is at or below the error bound {curve.error_bound}; unreliable"
        )
    if scales[-1] / scales[0] < 100.0:
        raise ValueError("scales must span at least two decades")
    pts = _sample_polyline(curve.polyline, scales[0] / 4.0)
    lo = curve.polyline.min(axis=0)
    hi = curve.polyline.max(axis=0)
    xs = [math.log(1.0 / s) for s in scales]
    ys = [math.log(_count_cells(pts, s, lo, hi)) for s in scales]
    slope = np.polyfit(xs, ys, 1)[0]
    return float(slope)
