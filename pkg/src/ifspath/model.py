"""The IFS-path object: validation, normalization, Hutchinson iteration.

An IFS path is an ordered list of N >= 2 contracting similarities whose
copies chain endpoint to endpoint: with a the fixed point of the first map
and b the fixed point of the last, S_i(b) = S_{i+1}(a) for every i < N.
Normalization conjugates the system so that a is the origin and b is e1;
iteration produces the piecewise-linear approximants T^k(I) together with a
proven Hausdorff-distance error bound to the invariant set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np

from . import spatial
from .geometry import (
    MatrixOrthogonal,
    PlanarOrthogonal,
    Point,
    Similarity,
    Word,
    e1,
    origin,
    pt_float,
    pt_is_exact,
    word_map,
)
from .report import FAIL, PASS, AnalysisReport
from .scalars import Fraction as _Fraction, Rotation2, as_fraction, is_exact, to_float

DEFAULT_BUDGET = 10_000_000
CHAIN_TOL = 1e-12


class BudgetError(RuntimeError):
    """Raised when an operation would exceed the configured point budget."""


@dataclass(frozen=True)
class IfsPath:
    """Ordered list of contracting similarities with the path property."""

    maps: Tuple[Similarity, ...]
    normalized: bool = False

    def __post_init__(self):
        if len(self.maps) < 2:
            raise ValueError("an IFS path needs at least 2 maps")
        dims = {s.dim for s in self.maps}
        if len(dims) != 1:
            raise ValueError("all maps must share one dimension")
        object.__setattr__(self, "maps", tuple(self.maps))

    @property
    def n_maps(self) -> int:
        return len(self.maps)

    @property
    def dim(self) -> int:
        return self.maps[0].dim

    @property
    def ratios(self) -> list:
        return [s.ratio for s in self.maps]

    @property
    def max_ratio(self) -> float:
        return max(to_float(s.ratio) for s in self.maps)

    def endpoints(self) -> Tuple[Point, Point]:
        """(a, b): fixed points of the first and last map."""
        return self.maps[0].fixed_point(), self.maps[-1].fixed_point()

    def word_map(self, word: Sequence[int]):
        return word_map(self.maps, word)


@dataclass(frozen=True)
class ApproxCurve:
    """The polyline T^k(I) with a rigorous Hausdorff error bound to gamma."""

    generation: int
    polyline: np.ndarray
    error_bound: float

    @property
    def n_segments(self) -> int:
        return len(self.polyline) - 1

    def bounds(self):
        return self.polyline.min(axis=0), self.polyline.max(axis=0)


@dataclass(frozen=True)
class VertexSet:
    generation: int
    entries: tuple  # ordered tuple of (word, float point tuple)

    @property
    def points(self) -> np.ndarray:
        return np.array([p for _, p in self.entries])


def _diameter_scale(pts: List[np.ndarray]) -> float:
    arr = np.array(pts)
    span = float(np.linalg.norm(arr.max(axis=0) - arr.min(axis=0)))
    return max(span, 1.0)


def validate_path(maps: Sequence[Similarity]) -> AnalysisReport:
    """Check the endpoint-chaining conditions for an ordered list of maps.

    PASS iff S_i(b) = S_{i+1}(a) holds for every i < N, with a and b the
    contraction fixed points of the first and last map (exact equality for
    exact systems, residual <= 1e-12 * diameter otherwise).
    """
    rep = AnalysisReport("validate-path")
    if len(maps) < 2:
        rep.verdict = FAIL
        rep.add("error", "fewer than 2 maps")
        return rep
    a = maps[0].fixed_point()
    b = maps[-1].fixed_point()
    rep.add("a", tuple(to_float(c) for c in a), "computed")
    rep.add("b", tuple(to_float(c) for c in b), "computed")
    lefts = [s.apply(b) for s in maps[:-1]]
    rights = [s.apply(a) for s in maps[1:]]
    scale = _diameter_scale([pt_float(a), pt_float(b)] + [pt_float(p) for p in lefts])
    tol = CHAIN_TOL * scale
    verdict = PASS
    for i, (left, right) in enumerate(zip(lefts, rights), start=1):
        residual = float(np.linalg.norm(pt_float(left) - pt_float(right)))
        exact = pt_is_exact(left) and pt_is_exact(right)
        ok = (left == right) if exact else residual <= tol
        if not ok:
            verdict = FAIL
            rep.add(f"chain({i},{i + 1})", residual, "violated")
        else:
            rep.add(f"chain({i},{i + 1})", residual, "exact" if exact and left == right else "residual")
    rep.verdict = verdict
    rep.add("tolerance", tol)
    return rep


def _is_normalized(a: Point, b: Point, dim: int) -> bool:
    fa, fb = pt_float(a), pt_float(b)
    ea = np.zeros(dim)
    eb = np.zeros(dim)
    eb[0] = 1.0
    return bool(
        np.linalg.norm(fa - ea) <= CHAIN_TOL and np.linalg.norm(fb - eb) <= CHAIN_TOL
    )


def normalize(path: IfsPath) -> IfsPath:
    """Conjugate so the first fixed point is the origin and the last is e1.

    Idempotent; exactness is preserved when the segment a->b is axis-aligned
    with exact coordinates (the common case for already-normalized or merely
    translated/scaled systems), and degrades to floats otherwise.
    """
    a, b = path.endpoints()
    if _is_normalized(a, b, path.dim):
        return IfsPath(path.maps, normalized=True)
    fa, fb = pt_float(a), pt_float(b)
    d = fb - fa
    dist = float(np.linalg.norm(d))
    if dist <= 1e-15:
        raise ValueError("degenerate path: the two endpoint fixed points coincide")

    exact_axis = (
        pt_is_exact(a)
        and pt_is_exact(b)
        and all(as_fraction(x) == as_fraction(y) for x, y in zip(a[1:], b[1:]))
    )
    if path.dim == 2:
        if exact_axis:
            dx = as_fraction(b[0]) - as_fraction(a[0])
            rho = 1 / abs(dx)
            turns = Fraction(0) if dx > 0 else Fraction(1, 2)
            q_orth = PlanarOrthogonal(Rotation2.from_turns(turns), False)
            new_maps = [_conjugate_planar(s, rho, q_orth, a) for s in path.maps]
        else:
            theta = -math.atan2(d[1], d[0])
            from .scalars import radians_token

            q_orth = PlanarOrthogonal(radians_token(theta), False)
            rho = 1.0 / dist
            new_maps = [_conjugate_planar(s, rho, q_orth, a) for s in path.maps]
    else:
        q = _orthogonal_completion(d / dist)
        rho = 1.0 / dist
        new_maps = [_conjugate_matrix(s, rho, q, fa) for s in path.maps]
    out = IfsPath(tuple(new_maps), normalized=True)
    na, nb = out.endpoints()
    if not _is_normalized(na, nb, out.dim):
        raise ArithmeticError("normalization failed to reach the canonical frame")
    return out


def _conjugate_planar(s: Similarity, rho, q_orth: PlanarOrthogonal, a: Point) -> Similarity:
    # S' = g o S o g^{-1} with g(x) = rho * Q (x - a); the ratio is unchanged.
    orth = s.orth
    if not isinstance(orth, PlanarOrthogonal):
        raise TypeError("planar conjugation needs planar orthogonal parts")
    if orth.reflect:
        new_orth = PlanarOrthogonal(orth.rotation.compose(q_orth.rotation.times(2)), True)
    else:
        new_orth = orth
    sa = s.apply(a)
    if is_exact(rho) and pt_is_exact(sa) and pt_is_exact(a) and q_orth.exact_matrix() is not None:
        m = q_orth.exact_matrix()
        diff = tuple(as_fraction(x) - as_fraction(y) for x, y in zip(sa, a))
        trans = tuple(as_fraction(rho) * (m[i][0] * diff[0] + m[i][1] * diff[1]) for i in range(2))
    else:
        v = to_float(rho) * (q_orth.float_matrix @ (pt_float(sa) - pt_float(a)))
        trans = tuple(float(x) for x in v)
    return Similarity(s.ratio, new_orth, trans)


def _conjugate_matrix(s: Similarity, rho: float, q: np.ndarray, fa: np.ndarray) -> Similarity:
    m = q @ s.orth.float_matrix @ q.T
    new_orth = MatrixOrthogonal(tuple(tuple(float(x) for x in row) for row in m))
    v = rho * (q @ (pt_float(s.apply(tuple(fa))) - fa))
    return Similarity(to_float(s.ratio), new_orth, tuple(float(x) for x in v))


def _orthogonal_completion(u: np.ndarray) -> np.ndarray:
    """Orthogonal Q with Q u = e1, built by Gram-Schmidt on u and the basis."""
    n = len(u)
    cols = [u]
    for i in range(n):
        cand = np.zeros(n)
        cand[i] = 1.0
        for c in cols:
            cand = cand - (cand @ c) * c
        norm = np.linalg.norm(cand)
        if norm > 1e-9:
            cols.append(cand / norm)
        if len(cols) == n:
            break
    return np.array(cols)


# ---------------------------------------------------------------------------
# float-side machinery


@lru_cache(maxsize=64)
def build_scheme(path: IfsPath) -> spatial.CurveScheme:
    """Float view plus invariant ball: S_i(B) inside B for all i, I inside B."""
    n = path.dim
    center = np.zeros(n)
    center[0] = 0.5
    radius = 0.5
    for s in path.maps:
        r = to_float(s.ratio)
        need = float(np.linalg.norm(s.float_matrix @ center + s.float_vector - center)) / (1.0 - r)
        radius = max(radius, need)
    radius *= 1.0 + 1e-9
    return spatial.CurveScheme(
        mats=[s.float_matrix for s in path.maps],
        vecs=[s.float_vector for s in path.maps],
        ratios=[to_float(s.ratio) for s in path.maps],
        center=center,
        radius=radius,
        dim=n,
    )


@lru_cache(maxsize=64)
def step_hausdorff(path: IfsPath) -> float:
    """Certified upper bound on d_H(T(I), I)."""
    return spatial.hausdorff_step(build_scheme(path))


def error_bound(path: IfsPath, k: int) -> float:
    """(max r)^k * d_H(T(I), I) / (1 - max r): proven bound on
    d_H(T^k(I), gamma)."""
    r = path.max_ratio
    return r ** k * step_hausdorff(path) / (1.0 - r)


def iterate_polyline(path: IfsPath, k: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Vertices of T^k(I) in path order (N^k + 1 points)."""
    n_pts = path.n_maps ** k + 1
    if n_pts > budget:
        raise BudgetError(f"T^{k}(I) needs {n_pts} points, budget is {budget}")
    pts = np.zeros((2, path.dim))
    pts[1, 0] = 1.0
    for _ in range(k):
        pieces = [s.apply_np(pts) for s in path.maps]
        out = [pieces[0]]
        for piece in pieces[1:]:
            out.append(piece[1:])
        pts = np.vstack(out)
    return pts


def iterate(path: IfsPath, k: int, budget: int = DEFAULT_BUDGET) -> ApproxCurve:
    """T^k(I) with its error bound; requires a normalized path."""
    if not path.normalized:
        raise ValueError("iterate needs a normalized path (call normalize first)")
    if k < 0:
        raise ValueError("generation must be >= 0")
    return ApproxCurve(k, iterate_polyline(path, k, budget), error_bound(path, k))


def _word_of_interval(index: int, depth: int, n: int) -> Word:
    letters = []
    for _ in range(depth):
        index, rem = divmod(index, n)
        letters.append(rem + 1)
    return tuple(reversed(letters))


def vertices(path: IfsPath, m: int, budget: int = DEFAULT_BUDGET) -> VertexSet:
    """All distinct generation-m vertices S_w(0), S_w(e1), chain-merged.

    Vertex i of the generation-m polyline is S_w(0) for the i-th depth-m
    word (and the final vertex is S_{(N..N)}(e1)); exact duplicates beyond
    the chain identifications are merged, keeping the first address.
    """
    if not path.normalized:
        raise ValueError("vertices needs a normalized path")
    poly = iterate_polyline(path, m, budget)
    n = path.n_maps
    scale = _diameter_scale([poly.min(axis=0), poly.max(axis=0)])
    seen = {}
    entries = []
    for i, p in enumerate(poly):
        key = tuple(np.round(p / (scale * 1e-12)).astype(np.int64))
        if key in seen:
            continue
        seen[key] = i
        if i < n ** m:
            word = _word_of_interval(i, m, n)
        else:
            word = tuple([n] * m)
        entries.append((word, tuple(float(x) for x in p)))
    return VertexSet(m, tuple(entries))
