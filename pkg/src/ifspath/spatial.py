"""Hierarchical bounding machinery over the copies of an invariant set.

Every word w addresses the copy S_w(gamma).  An invariant ball B (a disk
with S_i(B) inside B for all i, containing the base segment I) turns each
word into a rigorous bounding disk: S_w(B) has center S_w(c0) and radius
r_w * R0, and contains both S_w(gamma) and S_w(T^k(I)) for every k.  All
certified separations, Hausdorff distances and ratio extremes run as
branch-and-bound over these disks; leaves evaluate exact points or line
segments of a concrete polyline generation.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


@dataclass
class CurveScheme:
    """Float-side view of a normalized IFS path."""

    mats: list      # per-letter n x n float matrices (ratio folded in)
    vecs: list      # per-letter translation vectors
    ratios: list    # per-letter contraction ratios (floats)
    center: np.ndarray
    radius: float
    dim: int

    @property
    def n_maps(self) -> int:
        return len(self.mats)

    @property
    def max_ratio(self) -> float:
        return max(self.ratios)

    def word_affine(self, word: Sequence[int]):
        m = np.eye(self.dim)
        v = np.zeros(self.dim)
        for letter in word:
            ml, vl = self.mats[letter - 1], self.vecs[letter - 1]
            v = m @ vl + v
            m = m @ ml
        return m, v

    def word_scale(self, word: Sequence[int]) -> float:
        s = 1.0
        for letter in word:
            s *= self.ratios[letter - 1]
        return s

    def apply_word(self, word, pts: np.ndarray) -> np.ndarray:
        m, v = self.word_affine(word)
        return pts @ m.T + v


class _Node:
    __slots__ = ("word", "m", "v", "scale")

    def __init__(self, word, m, v, scale):
        self.word = word
        self.m = m
        self.v = v
        self.scale = scale


def make_node(scheme: CurveScheme, word=()) -> _Node:
    m, v = scheme.word_affine(word)
    return _Node(tuple(word), m, v, scheme.word_scale(word))


def node_child(scheme: CurveScheme, node: _Node, letter: int) -> _Node:
    ml, vl = scheme.mats[letter - 1], scheme.vecs[letter - 1]
    return _Node(
        node.word + (letter,),
        node.m @ ml,
        node.m @ vl + node.v,
        node.scale * scheme.ratios[letter - 1],
    )


def node_disk(scheme: CurveScheme, node: _Node):
    return node.m @ scheme.center + node.v, node.scale * scheme.radius


def node_anchor(scheme: CurveScheme, node: _Node, t: float = 0.0) -> np.ndarray:
    """Image of the base segment point (t, 0, ...); t in {0, 1} lies on gamma."""
    p = np.zeros(scheme.dim)
    p[0] = t
    return node.m @ p + node.v


# ---------------------------------------------------------------------------
# minimum distance between two copies


@dataclass
class PairResult:
    status: str                # "separated" | "coincident" | "undecided"
    lower: float               # certified lower bound on the set distance
    upper: float               # distance of a concrete witness point pair
    word_a: tuple = ()
    word_b: tuple = ()
    point_a: Optional[np.ndarray] = None
    point_b: Optional[np.ndarray] = None


def pair_min_distance(
    scheme: CurveScheme,
    word_a: Sequence[int],
    word_b: Sequence[int],
    *,
    coincidence_tol: float,
    separation_gap: float = 0.25,
    max_nodes: int = 200_000,
) -> PairResult:
    """Certified minimum distance between the copies S_a(gamma), S_b(gamma).

    Separated: the certified lower bound reaches separation_gap times the
    best witness distance.  Coincident: two sub-copies of diameter below
    coincidence_tol lie within coincidence_tol of each other (the witness is
    a near-intersection point pair).  Undecided: node budget exhausted.
    """
    best_upper = math.inf
    best_wit = (tuple(word_a), tuple(word_b), None, None)
    heap = []
    counter = itertools.count()

    def push(na, nb):
        nonlocal best_upper, best_wit
        ca, ra = node_disk(scheme, na)
        cb, rb = node_disk(scheme, nb)
        low = max(0.0, float(np.linalg.norm(ca - cb)) - ra - rb)
        for ta in (0.0, 1.0):
            pa = node_anchor(scheme, na, ta)
            for tb in (0.0, 1.0):
                pb = node_anchor(scheme, nb, tb)
                d = float(np.linalg.norm(pa - pb))
                if d < best_upper:
                    best_upper = d
                    best_wit = (na.word, nb.word, pa, pb)
        # ties pop deepest-first so touching branches resolve depth-first
        depth = len(na.word) + len(nb.word)
        heapq.heappush(heap, (low, -depth, next(counter), na, nb, ra, rb))

    push(make_node(scheme, word_a), make_node(scheme, word_b))
    visited = 0
    while heap:
        low, _, _, na, nb, ra, rb = heapq.heappop(heap)
        if low >= separation_gap * best_upper and low > 0.0:
            return PairResult("separated", low, best_upper, *best_wit)
        if 2 * ra <= coincidence_tol and 2 * rb <= coincidence_tol:
            pa, pb = node_anchor(scheme, na), node_anchor(scheme, nb)
            d = float(np.linalg.norm(pa - pb))
            if d <= coincidence_tol:
                return PairResult("coincident", low, d, na.word, nb.word, pa, pb)
            continue
        visited += 1
        if visited > max_nodes:
            return PairResult("undecided", low, best_upper, *best_wit)
        if ra >= rb:
            for letter in range(1, scheme.n_maps + 1):
                push(node_child(scheme, na, letter), nb)
        else:
            for letter in range(1, scheme.n_maps + 1):
                push(na, node_child(scheme, nb, letter))
    return PairResult("separated", best_upper, best_upper, *best_wit)


def chain_pair_search(
    scheme: CurveScheme,
    word_a: Sequence[int],
    word_b: Sequence[int],
    *,
    tol: float,
    min_separation: float,
    max_nodes: int = 150_000,
):
    """Coincidence hunt between two copies that may legitimately share the
    junction S_a(e1) = S_b(0).

    The all-N / all-1 continuation pair (the sub-copies that genuinely
    contain the junction) is expanded in place and never tested; candidate
    hits closer than min_separation to the junction are rejected.  Returns
    (word_a, word_b, point, gap, separation) for the first certified
    off-junction near-intersection (gap <= tol), else None.
    """
    n = scheme.n_maps
    e1 = np.zeros(scheme.dim)
    e1[0] = 1.0
    ma, va = scheme.word_affine(word_a)
    z = ma @ e1 + va
    len_a, len_b = len(word_a), len(word_b)

    def is_chain(wu, wv):
        return all(x == n for x in wu[len_a:]) and all(x == 1 for x in wv[len_b:])

    heap = []
    counter = itertools.count()

    def push(nu, nv):
        if is_chain(nu.word, nv.word):
            if nu.scale * 2 * scheme.radius < min_separation:
                return  # chain residual sits inside the junction ball
            for la in range(1, n + 1):
                ca = node_child(scheme, nu, la)
                for lb in range(1, n + 1):
                    push(ca, node_child(scheme, nv, lb))
            return
        cu, ru = node_disk(scheme, nu)
        cv, rv = node_disk(scheme, nv)
        if float(np.linalg.norm(cu - z)) + ru < min_separation:
            return
        low = max(0.0, float(np.linalg.norm(cu - cv)) - ru - rv)
        if low > tol:
            return
        depth = len(nu.word) + len(nv.word)
        heapq.heappush(heap, (low, -depth, next(counter), nu, nv, ru, rv))

    push(make_node(scheme, word_a), make_node(scheme, word_b))
    visited = 0
    while heap and visited < max_nodes:
        low, _, _, nu, nv, ru, rv = heapq.heappop(heap)
        if 2 * ru <= tol and 2 * rv <= tol:
            pu = node_anchor(scheme, nu)
            pv = node_anchor(scheme, nv)
            gap = float(np.linalg.norm(pu - pv))
            sep = float(np.linalg.norm(pu - z))
            if gap <= tol and sep >= min_separation:
                return nu.word, nv.word, pu, gap, sep
            continue
        visited += 1
        if ru >= rv:
            for letter in range(1, n + 1):
                push(node_child(scheme, nu, letter), nv)
        else:
            for letter in range(1, n + 1):
                push(nu, node_child(scheme, nv, letter))
    return None


# ---------------------------------------------------------------------------
# directed Hausdorff distance between polyline generations


def _point_to_segment(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.linalg.norm(p - a))
    t = float((p - a) @ ab) / denom
    t = min(1.0, max(0.0, t))
    return float(np.linalg.norm(p - (a + t * ab)))


def point_to_generation(scheme: CurveScheme, p: np.ndarray, k: int) -> float:
    """Exact (to fp) min distance from p to the polyline T^k(I)."""
    best = math.inf
    heap = [(0.0, 0, make_node(scheme, ()))]
    counter = itertools.count(1)
    while heap:
        low, _, node = heapq.heappop(heap)
        if low >= best:
            break
        if len(node.word) == k:
            a = node_anchor(scheme, node, 0.0)
            b = node_anchor(scheme, node, 1.0)
            best = min(best, _point_to_segment(p, a, b))
            continue
        for letter in range(1, scheme.n_maps + 1):
            child = node_child(scheme, node, letter)
            c, r = node_disk(scheme, child)
            lo = max(0.0, float(np.linalg.norm(p - c)) - r)
            if lo < best:
                heapq.heappush(heap, (lo, next(counter), child))
    return best


def segment_upper_bound(scheme: CurveScheme, a: np.ndarray, b: np.ndarray, k: int) -> float:
    """Upper bound on max over the segment [a, b] of the distance to T^k(I).

    For any single target segment s, d(., s) is convex, so its max over
    [a, b] sits at an endpoint; hence min over target segments of
    max(d(a, s), d(b, s)) bounds the segment's sup-distance.  Found by
    branch-and-bound over the target hierarchy.
    """
    best = math.inf
    heap = [(0.0, 0, make_node(scheme, ()))]
    counter = itertools.count(1)
    while heap:
        low, _, node = heapq.heappop(heap)
        if low >= best:
            break
        if len(node.word) == k:
            pa = node_anchor(scheme, node, 0.0)
            pb = node_anchor(scheme, node, 1.0)
            val = max(_point_to_segment(a, pa, pb), _point_to_segment(b, pa, pb))
            best = min(best, val)
            continue
        for letter in range(1, scheme.n_maps + 1):
            child = node_child(scheme, node, letter)
            c, r = node_disk(scheme, child)
            lo = max(
                0.0,
                max(float(np.linalg.norm(a - c)), float(np.linalg.norm(b - c))) - r,
            )
            if lo < best:
                heapq.heappush(heap, (lo, next(counter), child))
    return best


def directed_hausdorff(scheme: CurveScheme, k_from: int, k_to: int, rel_tol: float = 1e-9) -> float:
    """sup over T^k_from(I) of the distance to T^k_to(I).

    Returns an upper bound within rel_tol (plus an absolute floor of
    1e-12 * ball radius, which keeps coincident generations terminating) of
    the achieved lower bound, so it certifies the true directed distance.
    """
    best_low = 0.0
    abs_tol = 1e-12 * scheme.radius
    heap = []
    counter = itertools.count()

    def push(word, t0, t1):
        nonlocal best_low
        node = make_node(scheme, word)
        a = node_anchor(scheme, node, t0)
        b = node_anchor(scheme, node, t1)
        da = point_to_generation(scheme, a, k_to)
        db = point_to_generation(scheme, b, k_to)
        best_low = max(best_low, da, db)
        if len(word) == k_from:
            lipschitz = max(da, db) + float(np.linalg.norm(a - b)) / 2.0
            up = min(lipschitz, segment_upper_bound(scheme, a, b, k_to))
        else:
            c, r = node_disk(scheme, node)
            up = point_to_generation(scheme, c, k_to) + r
        heapq.heappush(heap, (-up, next(counter), word, t0, t1))

    push((), 0.0, 1.0)
    while heap:
        neg_up, _, word, t0, t1 = heapq.heappop(heap)
        up = -neg_up
        if up <= best_low * (1 + rel_tol) + abs_tol:
            return up
        if len(word) < k_from:
            for letter in range(1, scheme.n_maps + 1):
                push(word + (letter,), 0.0, 1.0)
        else:
            tm = 0.5 * (t0 + t1)
            push(word, t0, tm)
            push(word, tm, t1)
    return best_low


def hausdorff_step(scheme: CurveScheme, rel_tol: float = 1e-9) -> float:
    """Upper bound on d_H(T(I), I)."""
    return max(
        directed_hausdorff(scheme, 1, 0, rel_tol),
        directed_hausdorff(scheme, 0, 1, rel_tol),
    )


def hausdorff_between(scheme: CurveScheme, ka: int, kb: int, rel_tol: float = 1e-9) -> float:
    return max(
        directed_hausdorff(scheme, ka, kb, rel_tol),
        directed_hausdorff(scheme, kb, ka, rel_tol),
    )
