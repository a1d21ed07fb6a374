"""Bounded-turning estimates and the algebraic quasiarc conditions.

The normalizing constant D_S is the minimum distance between points of the
curve separated by a pair of distinct generation-1 vertices; case-2 triples
(x, z, y) locate pairs separated by a unique earliest-generation vertex z,
with block indices k, l placing x and y inside the junction chains.  The
bounded-turning constant follows Lemma "max(d(x,z), d(z,y)) <= C d(x,y)
implies turning constant 2 C diam / D_S".  The algebraic checker searches
exact witnesses for r_1^t = r_N^s and A_1^q = A_N^p, and the cone checker
certifies disjoint angular hulls at every junction apex.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .geometry import MatrixOrthogonal, PlanarOrthogonal, Similarity, Word
from .model import IfsPath, build_scheme, error_bound, iterate_polyline
from .param import diameter_bound
from .report import FAIL, PASS, UNDECIDED, AnalysisReport
from .scalars import Rotation2, as_fraction, is_exact, to_float


class ArcScreeningError(RuntimeError):
    """The operation requires an arc certificate that is not available."""


class ShallowGenerationError(RuntimeError):
    """The generation is too shallow for a positive rigorous bound."""


# ---------------------------------------------------------------------------
# D_S


def junction_vertices(path: IfsPath) -> np.ndarray:
    """The N+1 generation-1 vertices 0, S_1(e1), ..., S_{N-1}(e1), e1."""
    return iterate_polyline(path, 1)


def compute_DS(
    path: IfsPath,
    generation: int,
    *,
    arc_verdict: Optional[str] = "require",
    budget: int = 10_000_000,
) -> Tuple[float, float]:
    """(lower, estimate) for D_S at the given polyline generation.

    For each pair of distinct generation-1 vertices, the minimum of d(x, y)
    over x before the pair and y after it is estimated on generation-g
    polyline points; lower = estimate - 2 * error_bound is a rigorous lower
    bound when positive.  arc_verdict: pass "CERTIFIED_ARC" (or any string
    from a screening step) to proceed, None to override screening.
    """
    if arc_verdict == "require":
        raise ArcScreeningError("compute_DS needs an arc screening verdict (or override)")
    if arc_verdict is not None and arc_verdict != "CERTIFIED_ARC":
        raise ArcScreeningError(f"arc screening verdict is {arc_verdict}, not CERTIFIED_ARC")
    poly = iterate_polyline(path, generation, budget)
    n = path.n_maps
    step = n ** (generation - 1)
    estimate = math.inf
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            prefix = poly[: i * step + 1]
            suffix = poly[j * step:]
            if len(prefix) <= len(suffix):
                tree = cKDTree(suffix)
                d = tree.query(prefix)[0].min()
            else:
                tree = cKDTree(prefix)
                d = tree.query(suffix)[0].min()
            estimate = min(estimate, float(d))
    lower = estimate - 2.0 * error_bound(path, generation)
    if lower <= 0.0:
        raise ShallowGenerationError(
            f"D_S lower bound {lower} is not positive at generation {generation}"
        )
    return lower, estimate


# ---------------------------------------------------------------------------
# case-2 triples


@dataclass(frozen=True)
class CaseTriple:
    """A case-2 configuration: x < z < y with z the unique earliest vertex."""

    x_index: int            # generation-g vertex index of x
    y_index: int
    m: int                  # earliest separating generation
    sigma: Word             # word of length m-1
    sigma_m: int            # letter in 1..N-1 with S_{sigma sigma_m}(e1) = z
    k: int                  # x in block sigma sigma_m N^k but not N^(k+1)
    l: int                  # y in block sigma (sigma_m+1) 1^l but not 1^(l+1)
    x: tuple
    z: tuple
    y: tuple

    def ratio(self) -> float:
        xa, za, ya = map(np.asarray, (self.x, self.z, self.y))
        d = float(np.linalg.norm(xa - ya))
        if d == 0.0:
            return math.inf
        return max(float(np.linalg.norm(xa - za)), float(np.linalg.norm(za - ya))) / d


def _first_separation(i: int, j: int, g_fine: int, n: int):
    """Smallest m with a multiple of n^(g_fine - m) strictly inside (i, j),
    plus the count of such multiples and the first one."""
    for m in range(1, g_fine + 1):
        p = n ** (g_fine - m)
        lo = (i // p + 1) * p
        if lo <= i:
            lo += p
        hi = ((j - 1) // p) * p
        if hi >= j:
            hi -= p
        if lo <= hi and lo > i:
            count = (hi - lo) // p + 1
            return m, count, lo
    return None, 0, -1


def _digits(value: int, length: int, n: int) -> Word:
    letters = []
    for _ in range(length):
        value, rem = divmod(value, n)
        letters.append(rem + 1)
    return tuple(reversed(letters))


def _block_depth(delta: int, span_pow: int, n: int) -> int:
    """k with n^(c-1) < delta <= n^c and k = span_pow - c."""
    c = 0
    power = 1
    while power < delta:
        power *= n
        c += 1
    return span_pow - c


def classify_pair(i: int, j: int, generation: int, n: int):
    """Classify the generation-g vertex pair (i, j) working at resolution
    g+1, so that adjacent pairs (whose separating vertex appears one level
    deeper) are handled too.  Returns None for case-1 pairs, else the tuple
    (m, sigma, sigma_m, k, l, z_fine_index)."""
    gf = generation + 1
    i2, j2 = i * n, j * n
    m, count, z2 = _first_separation(i2, j2, gf, n)
    if m is None or count != 1:
        return None
    p = n ** (gf - m)
    q = z2 // p
    word = _digits(q - 1, m, n)
    sigma, sigma_m = word[:-1], word[-1]
    if sigma_m == n:
        return None  # z would be a vertex of an earlier generation
    k = _block_depth(z2 - i2, gf - m, n)
    l = _block_depth(j2 - z2, gf - m, n)
    return m, sigma, sigma_m, k, l, z2


def enumerate_case2_triples(
    path: IfsPath, generation: int, pair_budget: int = 2_000_000
) -> List[CaseTriple]:
    """All case-2 triples over pairs of generation-g vertices.

    Pure integer classification on vertex indices (companion intervals nest
    N-adically by count), so the result is exact and deterministic.
    """
    n = path.n_maps
    n_vertices = n ** generation + 1
    if n_vertices * (n_vertices - 1) // 2 > pair_budget:
        raise MemoryError("pair budget exceeded; use bt_constant's pooled scan instead")
    poly = iterate_polyline(path, generation)
    fine = iterate_polyline(path, generation + 1)
    out = []
    for i in range(n_vertices):
        for j in range(i + 1, n_vertices):
            cls = classify_pair(i, j, generation, n)
            if cls is None:
                continue
            m, sigma, sigma_m, k, l, z2 = cls
            out.append(
                CaseTriple(
                    i, j, m, sigma, sigma_m, k, l,
                    tuple(poly[i]), tuple(fine[z2]), tuple(poly[j]),
                )
            )
    return out


# ---------------------------------------------------------------------------
# bounded turning


@dataclass
class BtReport:
    D_S_lower: float
    D_S_estimate: float
    C_triple: float
    C_bt: float
    generation: int
    verdict: str
    scan: str
    witness: Optional[dict] = None
    converse_max: Optional[float] = None


@lru_cache(maxsize=64)
def _vertex_cache(path: IfsPath, depth: int) -> np.ndarray:
    return iterate_polyline(path, depth)


def _thin_indices(count: int, cap: int) -> np.ndarray:
    if count <= cap:
        return np.arange(count)
    return np.unique(np.round(np.linspace(0, count - 1, cap)).astype(np.int64))


def scan_triples_pooled(
    path: IfsPath,
    generation: int,
    cap_per_block: int = 512,
) -> Tuple[float, dict, int]:
    """Max case-2 ratio over generation-g vertex pairs, pooled at the
    generation-1 junctions.

    Every case-2 triple maps by S_sigma^{-1} to a triple flanking a
    generation-1 junction with the same ratio (similarities preserve
    ratios), and generation-g' vertices (g' <= g) are generation-g vertices,
    so the pooled scan over junction blocks S_{i N^k}, S_{(i+1) 1^l} with
    inner vertex sets V_{g-1-k}, V_{g-1-l} covers exactly the case-2 ratio
    spectrum at generation g.  Blocks larger than cap_per_block points are
    thinned deterministically (evenly in vertex index).
    """
    n = path.n_maps
    scheme = build_scheme(path)
    best = 0.0
    witness: dict = {}
    evaluated = 0
    for junction in range(1, n):
        z = scheme.apply_word((junction,), np.array([_e1f(path.dim)]))[0]
        lefts = []
        for k in range(generation):
            j = generation - 1 - k
            verts = _vertex_cache(path, j)
            upper = max(1, (n - 1) * n ** (j - 1)) if j >= 1 else 1
            idx = _thin_indices(upper, cap_per_block)
            word = (junction,) + (n,) * k
            pts = scheme.apply_word(word, verts[idx])
            dxz = np.linalg.norm(pts - z, axis=1)
            lefts.append((word, idx, pts, dxz))
        rights = []
        for l in range(generation):
            j = generation - 1 - l
            verts = _vertex_cache(path, j)
            lowcut = n ** (j - 1) + 1 if j >= 1 else 1
            count = n ** j + 1 - lowcut
            idx = _thin_indices(count, cap_per_block) + lowcut
            word = (junction + 1,) + (1,) * l
            pts = scheme.apply_word(word, verts[idx])
            dzy = np.linalg.norm(pts - z, axis=1)
            rights.append((word, idx, pts, dzy))
        for wl, il, xl, dxz in lefts:
            if not len(xl):
                continue
            for wr, ir, yr, dzy in rights:
                if not len(yr):
                    continue
                # disk-based upper bound for the block pair
                cl, rl = _word_disk(scheme, wl)
                cr, rr = _word_disk(scheme, wr)
                dmin = max(0.0, float(np.linalg.norm(cl - cr)) - rl - rr)
                dmax_num = max(
                    float(np.linalg.norm(cl - z)) + rl, float(np.linalg.norm(cr - z)) + rr
                )
                if dmin > 0.0 and dmax_num / dmin <= best:
                    continue
                dist = np.linalg.norm(xl[:, None, :] - yr[None, :, :], axis=2)
                num = np.maximum(dxz[:, None], dzy[None, :])
                with np.errstate(divide="ignore", invalid="ignore"):
                    ratios = np.where(dist > 0, num / dist, 0.0)
                evaluated += ratios.size
                mx = float(ratios.max())
                if mx > best:
                    best = mx
                    a, b = np.unravel_index(int(ratios.argmax()), ratios.shape)
                    witness = {
                        "junction": junction,
                        "left_word": wl,
                        "right_word": wr,
                        "x": tuple(map(float, xl[a])),
                        "y": tuple(map(float, yr[b])),
                        "z": tuple(map(float, z)),
                        "d_xy": float(dist[a, b]),
                    }
    return best, witness, evaluated


def _word_disk(scheme, word):
    m, v = scheme.word_affine(word)
    return m @ scheme.center + v, scheme.word_scale(word) * scheme.radius


def _e1f(dim: int) -> np.ndarray:
    v = np.zeros(dim)
    v[0] = 1.0
    return v


def bt_constant(
    path: IfsPath,
    generation: int,
    *,
    arc_verdict: Optional[str] = "require",
    ds_generation: Optional[int] = None,
    cap_per_block: int = 512,
    converse_samples: int = 200,
    seed: int = 0,
) -> BtReport:
    """Bounded-turning report at the given generation.

    C_triple is the pooled maximum over scanned case-2 triples; C_bt is the
    Lemma constant 2 C diam(gamma) / D_S using the rigorous D_S lower bound.
    The converse direction (subarc diameter <= C_bt d(x, y)) is spot-checked
    on seeded random vertex pairs with polyline spans plus error inflation.
    """
    dsg = ds_generation if ds_generation is not None else min(generation, 8)
    ds_lower, ds_est = compute_DS(path, dsg, arc_verdict=arc_verdict)
    c_triple, witness, evaluated = scan_triples_pooled(path, generation, cap_per_block)
    diam = diameter_bound(path)
    c_bt = 2.0 * c_triple * diam / ds_lower
    # converse spot check on random generation-g vertex pairs
    gshallow = min(generation, 9)
    poly = iterate_polyline(path, gshallow)
    err = error_bound(path, gshallow)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(converse_samples):
        i, j = sorted(rng.integers(0, len(poly), size=2))
        if i == j:
            continue
        d = float(np.linalg.norm(poly[i] - poly[j]))
        if d <= 2 * err:
            continue
        span = poly[i : j + 1]
        diam_sub = float(
            np.linalg.norm(span.max(axis=0) - span.min(axis=0))
        ) + 2 * err
        worst = max(worst, diam_sub / (c_bt * d))
    return BtReport(
        D_S_lower=ds_lower,
        D_S_estimate=ds_est,
        C_triple=c_triple,
        C_bt=c_bt,
        generation=generation,
        verdict=PASS if worst <= 1.0 else UNDECIDED,
        scan=f"pooled-thinned cap={cap_per_block} evaluated={evaluated}",
        witness=witness,
        converse_max=worst,
    )


# ---------------------------------------------------------------------------
# Theorem "r_1^t = r_N^s and A_1^q = A_N^p" checker


@dataclass
class CondResult:
    verdict: str        # PASS / FAIL / UNDECIDED
    witness: Optional[Tuple[int, int]] = None
    mode: str = "exact"  # exact | numeric


@dataclass
class Thm14Report:
    condA: CondResult
    condB: CondResult
    M: Optional[int]
    corollary_case: Optional[str]
    search_bound: int

    @property
    def verdict(self) -> str:
        if self.condA.verdict == PASS and self.condB.verdict == PASS:
            return PASS
        if FAIL in (self.condA.verdict, self.condB.verdict):
            return FAIL
        return UNDECIDED


def _ratio_power_search(r1, rn, bound: int) -> CondResult:
    if is_exact(r1) and is_exact(rn):
        f1, fn = as_fraction(r1), as_fraction(rn)
        pow1 = {1: f1}
        pown = {1: fn}
        for t in range(2, bound + 1):
            pow1[t] = pow1[t - 1] * f1
            pown[t] = pown[t - 1] * fn
        hits = [
            (t, s)
            for t in range(1, bound + 1)
            for s in range(1, bound + 1)
            if pow1[t] == pown[s]
        ]
        if hits:
            t, s = min(hits, key=lambda ts: (ts[0] + ts[1], ts[0]))
            return CondResult(PASS, (t, s), "exact")
        return CondResult(FAIL, None, "exact")
    x1, xn = to_float(r1), to_float(rn)
    for t in range(1, bound + 1):
        for s in range(1, bound + 1):
            a, b = x1 ** t, xn ** s
            if abs(a - b) <= 1e-12 * max(a, b):
                return CondResult(PASS, (t, s), "numeric")
    return CondResult(UNDECIDED, None, "numeric")


def _planar_power_search(a1: PlanarOrthogonal, an: PlanarOrthogonal, bound: int) -> CondResult:
    pow1 = [a1.power(q) for q in range(bound + 1)]
    pown = [an.power(p) for p in range(bound + 1)]
    for q in range(1, bound + 1):
        for p in range(1, bound + 1):
            if pow1[q].same(pown[p]):
                return CondResult(PASS, (q, p), "exact")
    # numeric fallback at 1e-12, tagged, for unmatched opaque angles
    opaque = not (a1.rotation.is_exact_turns and an.rotation.is_exact_turns)
    if opaque:
        for q in range(1, bound + 1):
            for p in range(1, bound + 1):
                if np.allclose(
                    pow1[q].float_matrix, pown[p].float_matrix, atol=1e-12
                ):
                    return CondResult(PASS, (q, p), "numeric")
        return CondResult(UNDECIDED, None, "numeric")
    return CondResult(FAIL, None, "exact")


def _matrix_power_search(a1: MatrixOrthogonal, an: MatrixOrthogonal, bound: int) -> CondResult:
    exact = a1.is_exact() and an.is_exact()
    p1 = a1
    for q in range(1, bound + 1):
        pn = an
        for p in range(1, bound + 1):
            if exact:
                if p1.exact_matrix() == pn.exact_matrix():
                    return CondResult(PASS, (q, p), "exact")
            elif np.allclose(p1.float_matrix, pn.float_matrix, atol=1e-12):
                return CondResult(PASS, (q, p), "numeric")
            pn = pn.compose(an)
        p1 = p1.compose(a1)
    return CondResult(FAIL if exact else UNDECIDED, None, "exact" if exact else "numeric")


def _corollary_case(a1, an, condB: CondResult) -> Optional[str]:
    if condB.verdict != PASS or not isinstance(a1, PlanarOrthogonal):
        return None
    rot1, rotn = a1.rotation, an.rotation
    if not a1.reflect and not an.reflect and rot1.is_exact_turns and rotn.is_exact_turns:
        return "1: both orientation preserving with rational angles"
    if a1.reflect and an.reflect:
        return "2: both orientation reversing"
    if (not a1.reflect and rot1.is_exact_turns and an.reflect) or (
        not an.reflect and rotn.is_exact_turns and a1.reflect
    ):
        return "3: mixed orientation with rational rotation angle"
    if a1.reflect == an.reflect and rot1.same_angle(rotn):
        return "4: equal first and last angles"
    return "generic power search"


def check_theorem14(path: IfsPath, search_bound: int = 64) -> Thm14Report:
    """Search exact witnesses for the two algebraic quasiarc conditions.

    Condition A: r_1^t = r_N^s for naturals t, s up to the bound (exact
    rational power comparison where the ratios are exact).  Condition B:
    A_1^q = A_N^p via dihedral algebra in the plane (token-aware, so equal
    opaque angles certify q = p cases) or matrix powers in higher dimension.
    Verdicts FAIL mean "no witness within the bound" for exact inputs;
    numeric-mode verdicts are tagged.
    """
    first, last = path.maps[0], path.maps[-1]
    condA = _ratio_power_search(first.ratio, last.ratio, search_bound)
    if isinstance(first.orth, PlanarOrthogonal):
        condB = _planar_power_search(first.orth, last.orth, search_bound)
    else:
        condB = _matrix_power_search(first.orth, last.orth, search_bound)
    m_value = None
    if condA.verdict == PASS and condB.verdict == PASS:
        t, s = condA.witness
        q, p = condB.witness
        m_value = q * p * s * t
    return Thm14Report(
        condA=condA,
        condB=condB,
        M=m_value,
        corollary_case=_corollary_case(first.orth, last.orth, condB),
        search_bound=search_bound,
    )


# ---------------------------------------------------------------------------
# cone containment


@dataclass
class AngularSet:
    """Union of closed angular intervals (start, width) on the circle."""

    intervals: List[Tuple[float, float]] = field(default_factory=list)

    @staticmethod
    def full() -> "AngularSet":
        return AngularSet([(0.0, 2 * math.pi)])

    def is_full(self) -> bool:
        return any(w >= 2 * math.pi - 1e-12 for _, w in self.intervals)

    def add(self, start: float, width: float):
        if width >= 2 * math.pi:
            self.intervals = [(0.0, 2 * math.pi)]
            return
        self.intervals.append((start % (2 * math.pi), width))

    def merged(self) -> "AngularSet":
        if not self.intervals:
            return AngularSet([])
        if self.is_full():
            return AngularSet.full()
        items = sorted((s, w) for s, w in self.intervals)
        out = []
        for s, w in items:
            if out and s <= out[-1][0] + out[-1][1] + 1e-15:
                out[-1] = (out[-1][0], max(out[-1][1], s + w - out[-1][0]))
            else:
                out.append((s, w))
        # wrap-around merge
        if len(out) > 1:
            s0, w0 = out[0]
            sl, wl = out[-1]
            if sl + wl >= s0 + 2 * math.pi - 1e-15:
                w0_new = max(s0 + w0, sl + wl - 2 * math.pi) - (sl - 2 * math.pi)
                out = out[1:-1] + [(sl, min(w0_new, 2 * math.pi))]
        total = sum(w for _, w in out)
        if total >= 2 * math.pi - 1e-12:
            return AngularSet.full()
        return AngularSet(out)

    def rotated(self, angle: float) -> "AngularSet":
        return AngularSet([((s + angle) % (2 * math.pi), w) for s, w in self.intervals])

    def mirrored(self) -> "AngularSet":
        # direction theta maps to -theta under reflection in the x-axis
        return AngularSet([((-(s + w)) % (2 * math.pi), w) for s, w in self.intervals])

    def contains_angle(self, theta: float, margin: float = 0.0) -> bool:
        t = theta % (2 * math.pi)
        for s, w in self.intervals:
            d = (t - s) % (2 * math.pi)
            if margin <= d <= w - margin:
                return True
        return False

    def intersects(self, other: "AngularSet") -> bool:
        for s, w in self.intervals:
            for s2, w2 in other.intervals:
                d = (s2 - s) % (2 * math.pi)
                if d <= w + 1e-15 or d + w2 >= 2 * math.pi - 1e-15:
                    return True
        return False

    def circular_hull(self) -> Optional[Tuple[float, float]]:
        """Smallest single interval covering the set, or None if full."""
        merged = self.merged()
        if merged.is_full():
            return None
        items = sorted(
            (s, w) for s, w in merged.intervals
        )
        # largest gap between consecutive intervals determines the hull
        best_gap, best_at = -1.0, 0.0
        k = len(items)
        for idx in range(k):
            s, w = items[idx]
            s_next = items[(idx + 1) % k][0] + (2 * math.pi if idx == k - 1 else 0.0)
            gap = s_next - (s + w)
            if gap > best_gap:
                best_gap = gap
                best_at = (s + w) % (2 * math.pi)
        if best_gap <= 0.0:
            return None
        start = (best_at + best_gap) % (2 * math.pi)
        return (start, 2 * math.pi - best_gap)


def _orth_angle_action(orth: PlanarOrthogonal, aset: AngularSet) -> AngularSet:
    out = aset.mirrored() if orth.reflect else aset
    return out.rotated(orth.rotation.radians)


def _orth_order(orth: PlanarOrthogonal, cap: int = 360) -> Optional[int]:
    """Smallest P >= 1 with orth^P = identity, or None beyond the cap."""
    if orth.reflect:
        return 2
    rot = orth.rotation
    if not rot.is_exact_turns:
        return None
    den = rot.turns.denominator
    return den if den <= cap else None


def endpoint_direction_data(path: IfsPath, end: str, depth: int = 7):
    """Certified direction sets of gamma seen from an endpoint (0 or e1).

    Returns (upper, swept): upper is a certified superset of the directions
    of gamma - endpoint, built from piece disks with the endpoint chain
    resolved through the orbit of the end map's orthogonal part; swept is a
    certified subset, the union of arcs swept between consecutive vertices
    of apex-separated narrow pieces (the direction path of a connected piece
    inside a disk is continuous, so it covers the in-disk arc between its
    endpoint directions).
    """
    scheme = build_scheme(path)
    n = path.n_maps
    dim = path.dim
    if dim != 2:
        raise ValueError("cone machinery is planar only")
    apex = np.zeros(2)
    chain_letter = 1 if end == "left" else n
    if end == "right":
        apex[0] = 1.0
    end_orth = path.maps[chain_letter - 1].orth

    base_upper = AngularSet()
    swept = AngularSet()

    def piece_interval(word):
        m, v = scheme.word_affine(word)
        c = m @ scheme.center + v
        r = scheme.word_scale(word) * scheme.radius
        d = c - apex
        dist = float(np.linalg.norm(d))
        if dist <= r:
            return None  # piece may wrap around the apex
        half = math.asin(min(1.0, r / dist))
        return (math.atan2(d[1], d[0]) - half, 2 * half)

    def anchor_dir(word, t):
        m, v = scheme.word_affine(word)
        p = m @ np.array([t, 0.0]) + v - apex
        return math.atan2(p[1], p[0])

    def visit(word, budget_depth):
        iv = piece_interval(word)
        if iv is not None and iv[1] < 0.5:
            base_upper.add(*iv)
            a0, a1 = anchor_dir(word, 0.0), anchor_dir(word, 1.0)
            width = (a1 - a0) % (2 * math.pi)
            if width <= iv[1] + 1e-12:
                swept.add(a0, width)
            else:
                swept.add(a1, (a0 - a1) % (2 * math.pi))
            return
        if budget_depth == 0:
            if iv is None:
                base_upper.add(0.0, 2 * math.pi)
            else:
                base_upper.add(*iv)
            return
        for letter in range(1, n + 1):
            if not word and letter == chain_letter:
                continue  # the endpoint chain is handled by the orbit below
            visit(word + (letter,), budget_depth - 1)

    visit((), depth)

    order = _orth_order(end_orth)
    upper = AngularSet()
    if order is None:
        upper = AngularSet.full()
    else:
        action = PlanarOrthogonal(Rotation2.zero(), False)
        for _ in range(order):
            for iv in base_upper.merged().intervals:
                for s2, w2 in _orth_angle_action(action, AngularSet([iv])).intervals:
                    upper.add(s2, w2)
            action = action.compose(end_orth)

    # the endpoint chain copies S_chain^k(gamma) sit inside gamma, so the
    # swept subset is closed under the chain action as well; unroll it over
    # the orbit (capped for infinite-order rotations)
    unroll = order if order is not None else 24
    swept_full = AngularSet()
    action = PlanarOrthogonal(Rotation2.zero(), False)
    for _ in range(unroll):
        for iv in swept.merged().intervals:
            for s2, w2 in _orth_angle_action(action, AngularSet([iv])).intervals:
                swept_full.add(s2, w2)
        action = action.compose(end_orth)
    return upper.merged(), swept_full.merged()


def check_cone_containment(path: IfsPath, generation: int = 7) -> AnalysisReport:
    """Certify or refute disjoint angular hulls at every junction apex.

    PASS: at every junction the two flank hulls (certified supersets) fit in
    disjoint single intervals of width <= pi; explicit cones are emitted.
    FAIL: at some junction either the certified swept subsets of the two
    flanks overlap in an arc wider than the angular margin, or the flanks
    provably meet away from the apex (then both cones would share that
    point).  Anything else is "not certified at this depth".
    """
    if path.dim != 2:
        raise ValueError("cone containment check is planar only")
    n = path.n_maps
    rep = AnalysisReport("cone-containment")
    upper_left, swept_left = endpoint_direction_data(path, "right", generation)
    upper_right, swept_right = endpoint_direction_data(path, "left", generation)
    scheme = build_scheme(path)
    co_tol = 1e-12 * 2 * scheme.radius
    margin = 1e-9
    all_pass = True
    any_fail = False
    for junction in range(1, n):
        orth_l = path.maps[junction - 1].orth
        orth_r = path.maps[junction].orth
        hull_l = _orth_angle_action(orth_l, upper_left).merged()
        hull_r = _orth_angle_action(orth_r, upper_right).merged()
        sw_l = _orth_angle_action(orth_l, swept_left).merged()
        sw_r = _orth_angle_action(orth_r, swept_right).merged()
        child = AnalysisReport(f"junction-{junction}")
        cover_l = hull_l.circular_hull()
        cover_r = hull_r.circular_hull()
        separated = (
            cover_l is not None
            and cover_r is not None
            and cover_l[1] <= math.pi
            and cover_r[1] <= math.pi
            and not AngularSet([cover_l]).intersects(AngularSet([cover_r]))
        )
        if separated:
            child.verdict = PASS
            child.add("cone_left", cover_l, "certified")
            child.add("cone_right", cover_r, "certified")
            rep.children.append(child)
            continue
        overlap = _swept_overlap(sw_l, sw_r, margin)
        if overlap is not None:
            child.verdict = FAIL
            child.add("overlap_arc", overlap, "certified")
            any_fail = True
            all_pass = False
            rep.children.append(child)
            continue
        from . import spatial as _spatial

        hit = _spatial.chain_pair_search(
            scheme, (junction,), (junction + 1,),
            tol=co_tol, min_separation=co_tol * 1e3,
        )
        if hit is not None:
            child.verdict = FAIL
            child.add("common_point", tuple(map(float, hit[2])), "certified")
            child.add("common_point_gap", hit[3], "certified")
            any_fail = True
            all_pass = False
        else:
            child.verdict = UNDECIDED
            child.add("note", f"not certified at depth {generation}")
            all_pass = False
        rep.children.append(child)
    rep.verdict = PASS if all_pass else (FAIL if any_fail else UNDECIDED)
    rep.add("generation", generation)
    return rep


def _swept_overlap(a: AngularSet, b: AngularSet, margin: float):
    for s, w in a.intervals:
        for s2, w2 in b.intervals:
            lo = max(0.0, (s2 - s) % (2 * math.pi))
            if lo < w:
                width = min(w - lo, w2)
                if width > margin:
                    return ((s + lo) % (2 * math.pi), width)
            lo2 = (s - s2) % (2 * math.pi)
            if lo2 < w2:
                width = min(w2 - lo2, w)
                if width > margin:
                    return (s % (2 * math.pi), width)
    return None
