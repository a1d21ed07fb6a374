"""Arc certification and non-arc witness search.

A path is an arc when adjacent copies meet only at their shared junction
and non-adjacent copies are disjoint.  Certification sweeps polyline
generations: non-adjacent copy pairs must separate by more than the summed
error bounds, adjacent pairs the same after deleting a ball of radius twice
the error bound around the legitimate junction point.  Forbidden
coincidences are hunted by branch-and-bound descent over sub-copy pairs
(driven to the 1e-12 * diam resolution), which also powers the loop-witness
search of the planar non-arc criteria.
"""

from __future__ import annotations


import itertools
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from . import spatial
from .geometry import PlanarOrthogonal
from .model import BudgetError, IfsPath, build_scheme, error_bound, iterate_polyline
from .param import diameter_bound
from .quasiarc import _ratio_power_search
from .report import FAIL, PASS, UNDECIDED, AnalysisReport
from .scalars import as_fraction, is_exact, to_float

CERTIFIED_ARC = "CERTIFIED_ARC"
NON_ARC_WITNESS = "NON_ARC_WITNESS"


@dataclass(frozen=True)
class CoincidenceWitness:
    """Two addresses whose copies provably meet (to tolerance): a forbidden
    configuration for an arc."""

    word_a: tuple
    word_b: tuple
    point: tuple
    gap: float


@dataclass(frozen=True)
class ArcVerdict:
    status: str
    generation: int
    margin: float = 0.0               # smallest separation margin at the certificate
    witness: Optional[CoincidenceWitness] = None
    detail: str = ""

    @property
    def is_arc(self) -> bool:
        return self.status == CERTIFIED_ARC


def _junction_point(scheme, i: int) -> np.ndarray:
    e1 = np.zeros(scheme.dim)
    e1[0] = 1.0
    m, v = scheme.word_affine((i,))
    return m @ e1 + v


def certify_arc(
    path: IfsPath,
    max_generation: int = 10,
    budget: int = 2_000_000,
) -> ArcVerdict:
    """Certify the two separation conditions or produce a coincidence.

    At each generation g the copy portions of T^g(I) must separate by more
    than the summed error bounds (adjacent pairs after deleting the ball of
    radius 2 * error_bound around their junction).  Pairs that stay close
    are screened once by branch-and-bound descent: a certified coincidence
    within 1e-12 * diam is a NON_ARC_WITNESS.  If the sweep ends with
    neither outcome the verdict is UNDECIDED.
    """
    scheme = build_scheme(path)
    n = path.n_maps
    diam = diameter_bound(path)
    co_tol = 1e-12 * diam
    screened: dict = {}

    def screen(i, j) -> Optional[CoincidenceWitness]:
        if (i, j) in screened:
            return screened[(i, j)]
        if j == i + 1:
            hit = spatial.chain_pair_search(
                scheme, (i,), (j,), tol=co_tol, min_separation=co_tol * 1e3
            )
            wit = (
                CoincidenceWitness(hit[0], hit[1], tuple(map(float, hit[2])), hit[3])
                if hit
                else None
            )
        else:
            res = spatial.pair_min_distance(scheme, (i,), (j,), coincidence_tol=co_tol)
            wit = (
                CoincidenceWitness(
                    res.word_a, res.word_b, tuple(map(float, res.point_a)), res.upper
                )
                if res.status == "coincident"
                else None
            )
        screened[(i, j)] = wit
        return wit

    for g in range(1, max_generation + 1):
        try:
            poly = iterate_polyline(path, g, budget)
        except BudgetError:
            return ArcVerdict(UNDECIDED, g - 1, detail="point budget reached")
        err = error_bound(path, g)
        step = n ** (g - 1)
        portions = [poly[i * step : (i + 1) * step + 1] for i in range(n)]
        trees = [cKDTree(p) for p in portions]
        worst_margin = math.inf
        all_ok = True
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                a = portions[i - 1]
                if j == i + 1:
                    z = _junction_point(scheme, i)
                    keep_a = np.linalg.norm(a - z, axis=1) > 2 * err
                    b = portions[j - 1]
                    keep_b = np.linalg.norm(b - z, axis=1) > 2 * err
                    pa, pb = a[keep_a], b[keep_b]
                    if len(pa) == 0 or len(pb) == 0:
                        all_ok = False
                        continue
                    d = float(cKDTree(pb).query(pa)[0].min())
                else:
                    d = float(trees[j - 1].query(a)[0].min())
                if d > 2 * err:
                    worst_margin = min(worst_margin, d - 2 * err)
                    continue
                all_ok = False
                wit = screen(i, j)
                if wit is not None:
                    return ArcVerdict(
                        NON_ARC_WITNESS,
                        g,
                        witness=wit,
                        detail=f"copies {i} and {j} meet away from their junction"
                        if j == i + 1
                        else f"non-adjacent copies {i} and {j} meet",
                    )
        if all_ok:
            return ArcVerdict(CERTIFIED_ARC, g, margin=float(worst_margin))
    return ArcVerdict(UNDECIDED, max_generation, detail="separation not reached")


# ---------------------------------------------------------------------------
# planar non-arc criteria


def _planar_orths(path: IfsPath):
    orths = [s.orth for s in path.maps]
    if not all(isinstance(o, PlanarOrthogonal) for o in orths):
        raise ValueError("non-arc criteria are planar only")
    return orths


def _find_t_for_square(r1, rn, bound: int) -> Optional[int]:
    """Smallest t with r_1^t = r_N^2, exact where possible."""
    if is_exact(r1) and is_exact(rn):
        target = as_fraction(rn) ** 2
        power = as_fraction(1)
        for t in range(1, bound + 1):
            power = power * as_fraction(r1)
            if power == target:
                return t
        return None
    target = to_float(rn) ** 2
    for t in range(1, bound + 1):
        if abs(to_float(r1) ** t - target) <= 1e-12 * target:
            return t
    return None


def check_thm18_conditions(path: IfsPath, search_bound: int = 64) -> AnalysisReport:
    """Evaluate the planar non-arc criteria and the remark variant.

    Main rule: both end maps orientation preserving, some (t, s) with
    r_1^t = r_N^s and t*a_1 - s*a_N an irrational multiple of 2*pi, and a
    junction with equal orientation parity (its rotation obstruction is
    delegated to rotation_obstruction and the loop search).  Remark rule:
    first map preserving, last reversing, r_1^t = r_N^2 with t*a_1
    irrational.  Irrationality is decided only by marked tokens; a rational
    combination refutes the rule.
    """
    rep = AnalysisReport("non-arc-criteria")
    orths = _planar_orths(path)
    first, last = orths[0], orths[-1]
    r1, rn = path.maps[0].ratio, path.maps[-1].ratio

    parity_junctions = tuple(
        i for i in range(1, path.n_maps) if orths[i - 1].reflect == orths[i].reflect
    )
    rep.add("parity_junctions", parity_junctions)

    rule1 = AnalysisReport("rule-main")
    if first.reflect or last.reflect:
        rule1.verdict = FAIL
        rule1.add("orientation", "end maps not both orientation preserving")
    else:
        cond_a = _ratio_power_search(r1, rn, search_bound)
        if cond_a.verdict != PASS:
            rule1.verdict = UNDECIDED if cond_a.verdict == UNDECIDED else FAIL
            rule1.add("ratios", "no commensurability witness within bound")
        else:
            t, s = cond_a.witness
            rule1.add("t", t)
            rule1.add("s", s)
            comb = first.rotation.times(t).compose(last.rotation.times(s).negate())
            kind = comb.rationality()
            rule1.add("angle_combination", kind)
            if kind == "rational":
                rule1.verdict = FAIL
                rule1.add("note", "t a_1 - s a_N is a rational multiple of 2 pi")
            elif kind == "irrational" and parity_junctions:
                rule1.verdict = PASS
            else:
                rule1.verdict = UNDECIDED
                rule1.add("note", "irrationality not certified by token marking")
    rep.children.append(rule1)

    rule2 = AnalysisReport("rule-remark")
    if first.reflect or not last.reflect:
        rule2.verdict = FAIL
        rule2.add("orientation", "needs first map preserving, last map reversing")
    else:
        t = _find_t_for_square(r1, rn, search_bound)
        if t is None:
            rule2.verdict = FAIL
            rule2.add("ratios", "no t with r_1^t = r_N^2 within bound")
        else:
            rule2.add("t", t)
            kind = first.rotation.times(t).rationality()
            rule2.add("angle_combination", kind)
            if kind == "rational":
                rule2.verdict = FAIL
            elif kind == "irrational" and parity_junctions:
                rule2.verdict = PASS
            else:
                rule2.verdict = UNDECIDED
    rep.children.append(rule2)

    if PASS in (rule1.verdict, rule2.verdict):
        rep.verdict = PASS
    elif rule1.verdict == FAIL and rule2.verdict == FAIL:
        rep.verdict = FAIL
        rep.add("note", "criteria not met")
    else:
        rep.verdict = UNDECIDED
    return rep


# ---------------------------------------------------------------------------
# rotation obstruction (radial test)


class _RadialSet:
    """Union of closed radius intervals: a certified superset of the radii
    a flank occupies around the apex."""

    def __init__(self):
        self.items: List[Tuple[float, float]] = []

    def add(self, lo: float, hi: float):
        self.items.append((max(lo, 0.0), hi))

    def merged(self) -> List[Tuple[float, float]]:
        out: List[Tuple[float, float]] = []
        for lo, hi in sorted(self.items):
            if out and lo <= out[-1][1] + 1e-15:
                out[-1] = (out[-1][0], max(out[-1][1], hi))
            else:
                out.append((lo, hi))
        return out

    def gaps(self) -> List[Tuple[float, float]]:
        m = self.merged()
        return [(m[i][1], m[i + 1][0]) for i in range(len(m) - 1)]


def _flank_radial_data(scheme, flank_word, apex, depth: int, sample_depth: int):
    sup = _RadialSet()
    present: List[float] = []
    flank_scale = scheme.word_scale(flank_word)

    def visit(node, budget):
        c, r = spatial.node_disk(scheme, node)
        d = float(np.linalg.norm(c - apex))
        if budget == 0 or r <= 1e-5 * flank_scale * scheme.radius:
            sup.add(d - r, d + r)
            return
        for letter in range(1, scheme.n_maps + 1):
            visit(spatial.node_child(scheme, node, letter), budget - 1)

    visit(spatial.make_node(scheme, flank_word), depth)
    for word in itertools.product(range(1, scheme.n_maps + 1), repeat=sample_depth):
        node = spatial.make_node(scheme, tuple(flank_word) + word)
        for t in (0.0, 1.0):
            p = spatial.node_anchor(scheme, node, t)
            present.append(float(np.linalg.norm(p - apex)))
    return sup, present


def rotation_obstruction(path: IfsPath, junction: int, generation: int = 8) -> AnalysisReport:
    """Radial obstruction: rotations about the apex preserve apex distance.

    Direction "left into right" is blocked when a certified radius realized
    by the left flank (an exact vertex distance) falls outside the right
    flank's radial superset with margin; PASS needs both directions blocked,
    otherwise UNDECIDED (no radial gap is usable).
    """
    scheme = build_scheme(path)
    n = path.n_maps
    if not 1 <= junction <= n - 1:
        raise ValueError(f"junction must be in 1..{n - 1}")
    apex = _junction_point(scheme, junction)
    scale = min(scheme.word_scale((junction,)), scheme.word_scale((junction + 1,)))
    if scale * scheme.radius <= 1e-13:
        raise ValueError("degenerate apex: copy diameter below resolution")
    sample_depth = max(2, min(5, generation // 2))
    sup_l, pres_l = _flank_radial_data(scheme, (junction,), apex, generation, sample_depth)
    sup_r, pres_r = _flank_radial_data(scheme, (junction + 1,), apex, generation, sample_depth)
    margin = 1e-9 * scheme.radius

    def blocked(present, superset):
        merged = superset.merged()
        top = max(hi for _, hi in merged)
        for r in present:
            if r > top + margin:
                return r
        for lo, hi in superset.gaps():
            for r in present:
                if lo + margin < r < hi - margin:
                    return r
        return None

    l_to_r = blocked(pres_l, sup_r)
    r_to_l = blocked(pres_r, sup_l)
    rep = AnalysisReport(f"rotation-obstruction-junction-{junction}")
    rep.add("left_blocked_radius", l_to_r, "certified" if l_to_r is not None else None)
    rep.add("right_blocked_radius", r_to_l, "certified" if r_to_l is not None else None)
    rep.verdict = PASS if (l_to_r is not None and r_to_l is not None) else UNDECIDED
    return rep


# ---------------------------------------------------------------------------
# loop witness search


@dataclass(frozen=True)
class LoopWitness:
    """Two renormalized junction blocks meeting at the junction and at a
    second point: together they bound a closed curve inside gamma."""

    junction: int
    multiple: int
    block_a: tuple                # the block word i N^(m s)
    block_b: tuple                # the block word (i+1) 1^(m t)
    word_a: tuple                 # deep sub-copy address at the intersection
    word_b: tuple
    intersection: tuple
    intersection_gap: float
    junction_point: tuple
    separation: float


def find_loop_witness(path: IfsPath, search_bound: int = 24) -> Optional[LoopWitness]:
    """Sweep the renormalized block pairs S_{i N^(m s)}, S_{(i+1) 1^(m t)}.

    The ratio witness (t, s) makes the two block scales comparable; the
    angle combination rotates the left block relative to the right one as m
    grows.  The first certified off-junction intersection of a block pair
    is returned; None when the criteria fail outright or nothing is found.
    """
    pre = check_thm18_conditions(path, search_bound=64)
    if pre.verdict == FAIL:
        return None
    t_s = None
    rule = pre.child("rule-main")
    if rule is not None and rule.get("t") is not None:
        t_s = (rule.get("t"), rule.get("s"))
    if t_s is None:
        remark = pre.child("rule-remark")
        if remark is not None and remark.get("t") is not None:
            t_s = (remark.get("t"), 2)
    if t_s is None:
        return None
    t, s = int(t_s[0]), int(t_s[1])
    scheme = build_scheme(path)
    n = path.n_maps
    diam = diameter_bound(path)
    tol = 1e-10 * diam
    parity = pre.get("parity_junctions") or tuple(range(1, n))
    e1 = np.zeros(scheme.dim)
    e1[0] = 1.0
    for m in range(0, search_bound + 1):
        for junction in parity:
            junction = int(junction)
            wa = (junction,) + (n,) * (m * s)
            wb = (junction + 1,) + (1,) * (m * t)
            block_scale = scheme.word_scale(wa)
            if block_scale * diam < 1e5 * tol:
                continue
            min_sep = 0.02 * block_scale * diam
            hit = spatial.chain_pair_search(scheme, wa, wb, tol=tol, min_separation=min_sep)
            if hit is not None:
                word_a, word_b, point, gap, sep = hit
                ma, va = scheme.word_affine(wa)
                z = ma @ e1 + va
                return LoopWitness(
                    junction, m, wa, wb, word_a, word_b,
                    tuple(map(float, point)), gap,
                    tuple(map(float, z)), sep,
                )
    return None


def reconstruct_loop(path: IfsPath, witness: LoopWitness, detail: int = 4):
    """Polylines of the two loop sub-arcs and their two shared points.

    Block A runs from the recovered intersection to the junction, block B
    from the junction onward to the intersection; the junction is shared
    exactly (both blocks contain it by construction), the intersection up
    to the witness gap.
    """
    scheme = build_scheme(path)
    base = iterate_polyline(path, detail)
    arc_a = scheme.apply_word(witness.block_a, base)
    arc_b = scheme.apply_word(witness.block_b, base)
    return arc_a, arc_b, (witness.junction_point, witness.intersection)
