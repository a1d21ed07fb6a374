"""The Hutchinson parameterization phi : [0,1] -> gamma.

The canonical partition cuts [0,1] into N pieces of length r_i^s, where s
is the similarity dimension; the companion IFS s_i(t) = t*t_i + (1-t)*t_{i-1}
maps [0,1] onto the i-th piece.  phi is the uniform limit of the piecewise
linear maps phi_k and satisfies the structural identity
S_w o phi = phi o s_w for every word w.  Evaluation refines the symbolic
address of t until the copy diameter certifies the requested tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np

from .dimension import similarity_dimension
from .geometry import MatrixOrthogonal, Similarity, Word
from .model import IfsPath, build_scheme, error_bound, iterate_polyline
from .scalars import Scalar, as_fraction, is_exact, to_float


@dataclass(frozen=True)
class Partition:
    """Breakpoints 0 = t_0 < ... < t_N = 1 with t_i - t_{i-1} = r_i^s."""

    breakpoints: tuple
    s: float
    exact: bool

    @property
    def lengths(self) -> tuple:
        return tuple(
            b - a for a, b in zip(self.breakpoints[:-1], self.breakpoints[1:])
        )

    def sum_residual(self) -> float:
        return abs(math.fsum(to_float(x) for x in self.lengths) - 1.0)


@dataclass(frozen=True)
class CompanionIfs:
    """The 1D system s_1..s_N induced by the partition."""

    partition: Partition
    path: IfsPath  # one-dimensional IFS path on [0, 1]

    @property
    def n_maps(self) -> int:
        return len(self.partition.breakpoints) - 1

    def letter_interval(self, letter: int):
        return (self.partition.breakpoints[letter - 1], self.partition.breakpoints[letter])

    def word_interval(self, word: Sequence[int]):
        """s_w([0,1]) as (a, b); exact when the partition is exact."""
        if self.partition.exact:
            a, width = Fraction(0), Fraction(1)
        else:
            a, width = 0.0, 1.0
        for letter in word:
            lo = self.partition.breakpoints[letter - 1]
            a = a + width * lo
            width = width * (self.partition.breakpoints[letter] - lo)
        return a, a + width

    def word_eval(self, word: Sequence[int], t):
        a, b = self.word_interval(word)
        return a + (b - a) * t


@dataclass(frozen=True)
class ParamPoint:
    t: float
    address: Word
    value: tuple
    error: float


def build_partition(path: IfsPath) -> Tuple[Partition, CompanionIfs]:
    """Canonical partition with lengths r_i^s, plus the companion 1D system.

    When every ratio is exact and they are all equal, r^s = 1/N exactly, so
    breakpoints are the exact fractions i/N; otherwise floats with the final
    breakpoint pinned to 1.
    """
    ratios = [s.ratio for s in path.maps]
    n = len(ratios)
    dim = similarity_dimension(path)
    if all(is_exact(r) for r in ratios) and len({as_fraction(r) for r in ratios}) == 1:
        breakpoints = tuple(Fraction(i, n) for i in range(n + 1))
        part = Partition(breakpoints, dim.s, True)
    else:
        lengths = [to_float(r) ** dim.s for r in ratios]
        pts = [0.0]
        for ln in lengths:
            pts.append(pts[-1] + ln)
        pts[-1] = 1.0
        part = Partition(tuple(pts), dim.s, False)
    maps = []
    for i in range(n):
        lo, hi = part.breakpoints[i], part.breakpoints[i + 1]
        one = Fraction(1) if part.exact else 1.0
        maps.append(Similarity(hi - lo, MatrixOrthogonal(((one,),)), (lo,)))
    companion = CompanionIfs(part, IfsPath(tuple(maps), normalized=True))
    return part, companion


def address_of(t, k: int, companion: CompanionIfs) -> Word:
    """A generation-k word w with t in s_w([0,1]).

    Ties at interior breakpoints resolve to the left interval (t = t_i maps
    to letter i); t = 0 takes letter 1.  Exact when the partition and t are
    exact.
    """
    if not 0 <= t <= 1:
        raise ValueError(f"t = {t} outside [0, 1]")
    part = companion.partition
    exact = part.exact and isinstance(t, (Fraction, int))
    letters = []
    cur = Fraction(t) if exact else float(t)
    for _ in range(k):
        letter = _pick_letter(cur, part)
        letters.append(letter)
        lo, hi = part.breakpoints[letter - 1], part.breakpoints[letter]
        cur = (cur - lo) / (hi - lo)
        if not exact:
            cur = min(max(cur, 0.0), 1.0)
    return tuple(letters)


def _pick_letter(t, part: Partition) -> int:
    if t <= part.breakpoints[0]:
        return 1
    n = len(part.breakpoints) - 1
    for i in range(1, n + 1):
        if t <= part.breakpoints[i]:
            return i
    return n


@lru_cache(maxsize=64)
def diameter_bound(path: IfsPath) -> float:
    """Computable over-estimate of diam(gamma): diam(T^1(I)) + 2 err_1."""
    poly = iterate_polyline(path, 1)
    best = 0.0
    for i in range(len(poly)):
        for j in range(i + 1, len(poly)):
            best = max(best, float(np.linalg.norm(poly[i] - poly[j])))
    return best + 2.0 * error_bound(path, 1)


def eval_phi(path: IfsPath, t: float, tol: float, max_depth: int = 20_000) -> ParamPoint:
    """phi(t) to within tol, by deepening the symbolic address of t.

    The value is S_w(midpoint of I) for the first word w whose copy
    diameter bound r_w * diam_bound drops to tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    part, companion = _cached_partition(path)
    dbound = diameter_bound(path)
    scheme = build_scheme(path)
    letters = []
    cur = t if part.exact and isinstance(t, Fraction) else float(t)
    scale = 1.0
    while scale * dbound > tol:
        if len(letters) > max_depth:
            raise RuntimeError("tol too small for the address-depth budget")
        letter = _pick_letter(cur, part)
        letters.append(letter)
        lo, hi = part.breakpoints[letter - 1], part.breakpoints[letter]
        cur = (cur - lo) / (hi - lo)
        if not part.exact:
            cur = min(max(cur, 0.0), 1.0)
        scale *= scheme.ratios[letter - 1]
    anchor = np.zeros(path.dim)
    anchor[0] = 0.5
    m, v = scheme.word_affine(letters)
    value = m @ anchor + v
    return ParamPoint(float(t), tuple(letters), tuple(float(x) for x in value), scale * dbound)


@lru_cache(maxsize=64)
def _cached_partition(path: IfsPath):
    return build_partition(path)


def phi_vector(path: IfsPath, ts, tol: float) -> np.ndarray:
    """phi at many parameters, each to within tol (vectorized descent).

    Maintains one affine map per parameter, refining every element's
    address level by level until its copy diameter certificate reaches tol.
    """
    part, _ = _cached_partition(path)
    scheme = build_scheme(path)
    dbound = diameter_bound(path)
    bps = np.array([to_float(x) for x in part.breakpoints])
    letter_m = np.stack(scheme.mats)
    letter_v = np.stack(scheme.vecs)
    ratios = np.array(scheme.ratios)
    t = np.clip(np.asarray(ts, dtype=float), 0.0, 1.0)
    count, dim = len(t), path.dim
    mats = np.broadcast_to(np.eye(dim), (count, dim, dim)).copy()
    vecs = np.zeros((count, dim))
    scale = np.ones(count)
    cur = t.copy()
    for _ in range(40_000):
        active = scale * dbound > tol
        if not active.any():
            break
        letters = np.searchsorted(bps, cur[active], side="left")
        letters = np.clip(letters, 1, len(bps) - 1)
        lo = bps[letters - 1]
        width = bps[letters] - lo
        cur[active] = np.clip((cur[active] - lo) / width, 0.0, 1.0)
        idx = letters - 1
        ma = mats[active]
        vecs[active] = np.einsum("nij,nj->ni", ma, letter_v[idx]) + vecs[active]
        mats[active] = np.einsum("nij,njk->nik", ma, letter_m[idx])
        scale[active] *= ratios[idx]
    else:
        raise RuntimeError("tol too small for the address-depth budget")
    anchor = np.zeros(dim)
    anchor[0] = 0.5
    return np.einsum("nij,j->ni", mats, anchor) + vecs


def check_structural_identity(
    path: IfsPath,
    word: Sequence[int],
    samples: int = 1000,
    tol: float = 1e-10,
    seed: int = 0,
) -> float:
    """max over sampled t of |S_w(phi(t)) - phi(s_w(t))|; contract <= 3 tol."""
    part, companion = _cached_partition(path)
    sw = path.word_map(word)
    rng = np.random.default_rng(seed)
    ts = rng.random(samples)
    a, b = companion.word_interval(word)
    a, b = to_float(a), to_float(b)
    left_pts = phi_vector(path, ts, tol)
    m, v = build_scheme(path).word_affine(word)
    left = left_pts @ m.T + v
    right = phi_vector(path, np.clip(a + (b - a) * ts, 0.0, 1.0), tol)
    return float(np.linalg.norm(left - right, axis=1).max())


def breakpoint_array(path: IfsPath, generation: int) -> np.ndarray:
    """All generation-g companion breakpoints in order (N^g + 1 values)."""
    part, _ = _cached_partition(path)
    n = len(part.lengths)
    if part.exact:
        return np.arange(n ** generation + 1, dtype=float) / float(n ** generation)
    lengths = np.array([to_float(x) for x in part.lengths])
    bps = np.array([0.0, 1.0])
    for _ in range(generation):
        starts = bps[:-1]
        widths = np.diff(bps)
        inner = starts[:, None] + widths[:, None] * np.concatenate(([0.0], np.cumsum(lengths)))[None, :]
        bps = np.append(inner[:, :-1].ravel(), 1.0)
    return bps


def holder_profile(path: IfsPath, generation: int):
    """(sup_ratio, inf_ratio) of d(phi(u), phi(v)) / |u - v|^(1/s) over all
    pairs of distinct generation-g companion breakpoints.

    phi at a breakpoint is the corresponding vertex of the generation-g
    polyline, so the scan is an exact pairwise pass over the vertices.  For
    exact equal-length partitions the gap between breakpoints i < j is
    (j - i)/N^g, so the power table over index differences is precomputed
    once; the square of the ratio is compared and rooted at the end.
    """
    part, _ = _cached_partition(path)
    poly = iterate_polyline(path, generation)
    inv_s = 1.0 / part.s
    n_pts = len(poly)
    coords = [np.ascontiguousarray(poly[:, d]) for d in range(poly.shape[1])]
    sup2, inf2 = 0.0, math.inf
    if part.exact:
        ipow2 = (np.arange(1, n_pts) / float(n_pts - 1)) ** (-2.0 * inv_s)
    else:
        bps = breakpoint_array(path, generation)
    for i in range(n_pts - 1):
        d2 = None
        for axis in coords:
            dx = axis[i + 1 :] - axis[i]
            d2 = dx * dx if d2 is None else d2 + dx * dx
        if part.exact:
            r2 = d2 * ipow2[: n_pts - 1 - i]
        else:
            gaps = bps[i + 1 :] - bps[i]
            r2 = d2 * gaps ** (-2.0 * inv_s)
        sup2 = max(sup2, float(r2.max()))
        inf2 = min(inf2, float(r2.min()))
    return math.sqrt(sup2), math.sqrt(inf2)


def holder_scatter(path: IfsPath, generation: int):
    """All breakpoint pairs (u, v, distance, gap, ratio) at a small generation.

    Intended for CSV export; the pair count grows as N^(2g), so generations
    beyond about 5 are rejected.
    """
    part, companion = _cached_partition(path)
    n = companion.n_maps
    if n ** generation > 1024:
        raise ValueError("scatter export limited to N^g <= 1024 breakpoints")
    poly = iterate_polyline(path, generation)
    bps = _breakpoint_values(part, generation)
    inv_s = 1.0 / part.s
    rows = []
    for i in range(len(bps)):
        for j in range(i + 1, len(bps)):
            gap = bps[j] - bps[i]
            d = float(np.linalg.norm(poly[j] - poly[i]))
            rows.append((bps[i], bps[j], d, gap, d / gap ** inv_s))
    return rows


def _breakpoint_values(part: Partition, generation: int):
    vals = [0.0]
    lengths = [to_float(x) for x in part.lengths]

    def rec(lo, width, depth):
        if depth == 0:
            vals.append(lo + width)
            return
        acc = lo
        for ln in lengths:
            rec(acc, width * ln, depth - 1)
            acc += width * ln

    rec(0.0, 1.0, generation)
    out = [0.0]
    for v in vals[1:]:
        if v > out[-1] + 0.0:
            out.append(v)
    return out


def arclength_decomposition(path: IfsPath, u, v, depth: int):
    """Greedy maximal-interval decomposition of (u, v) up to the given depth.

    Returns (terms, covered): terms are (word, interval length, measure
    proxy r_w^s); maximal companion intervals inside [u, v] are taken level
    by level, never nested inside an already chosen interval.
    """
    part, companion = _cached_partition(path)
    exact = part.exact and isinstance(u, Fraction) and isinstance(v, Fraction)
    if not exact:
        u, v = to_float(u), to_float(v)
    terms = []

    def rec(lo, hi, word):
        if lo >= u and hi <= v:
            if exact:
                proxy = Fraction(1)
                for letter in word:
                    proxy *= part.breakpoints[letter] - part.breakpoints[letter - 1]
            else:
                proxy = _word_measure(part, word)
            terms.append((word, hi - lo, proxy))
            return
        if len(word) >= depth or hi <= u or lo >= v:
            return
        acc = lo
        width = hi - lo
        for letter in range(1, companion.n_maps + 1):
            ln = part.breakpoints[letter] - part.breakpoints[letter - 1]
            nxt = acc + width * ln
            rec(acc, nxt, word + (letter,))
            acc = nxt

    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    rec(zero, one, ())
    covered = sum((t[1] for t in terms), zero)
    return terms, covered


def _word_measure(part: Partition, word) -> float:
    out = 1.0
    for letter in word:
        out *= to_float(part.breakpoints[letter] - part.breakpoints[letter - 1])
    return out


def arclength_identity(path: IfsPath, u, v, depth: int):
    """(lhs, rhs): sum of r_w^s over the decomposition vs covered length.

    These agree exactly in exact arithmetic because r_w^s is the companion
    interval length; covered tends to v - u as the depth grows.
    """
    terms, covered = arclength_decomposition(path, u, v, depth)
    zero = covered * 0
    lhs = sum((t[2] for t in terms), zero)
    return lhs, covered
