"""Registry of the example systems: every curve the analyses exercise.

The S(a, b) family covers the zigzag quasiarcs (the Koch arc is S(1/3, 1/3));
the rotating arc, the gasket and the carpet path are fixed constructions;
wenxi_like is a constructed arc whose end ratios are incommensurable (its
bounded-turning constant degenerates), and loopy is a constructed path
meeting the non-arc criteria with a findable loop witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Optional

from .geometry import PlanarOrthogonal, Similarity, planar_similarity
from .model import IfsPath, normalize
from .scalars import Rotation2, acos_token, radians_token

F = Fraction
LOG4_OVER_LOG3 = math.log(4.0) / math.log(3.0)


def _turns(t) -> Rotation2:
    return Rotation2.from_turns(F(t) if not isinstance(t, F) else t)


def family_sab(a, b) -> IfsPath:
    """The four-map family S(a, b): flat, rise, fall, flat.

    a and b in (0, 1/2) with b >= |1/2 - a|; the rise/fall angle is
    arccos((1/2 - a)/b), exact (1/6 turn) when that cosine is exactly 1/2.
    """
    af, bf = float(a), float(b)
    if not (0 < af < 0.5 and 0 < bf < 0.5):
        raise ValueError("family parameters must lie in (0, 1/2)")
    c = (0.5 - af) / bf
    if c > 1.0:
        raise ValueError("b too small: rise angle undefined")
    exact = isinstance(a, F) and isinstance(b, F)
    exact_a = isinstance(a, F)
    if exact and F(1, 2) - a == b * F(1, 2):
        beta = _turns(F(1, 6))
        h_sq = b * b - (F(1, 2) - a) ** 2
        # h = sqrt(h_sq) is rational only in contrived cases; keep float
        h = math.sqrt(float(h_sq))
    else:
        beta = radians_token(math.acos(c))
        h = math.sqrt(bf * bf - (0.5 - af) ** 2)
    mid = (F(1, 2) if exact_a else 0.5, h)
    one_minus_a = 1 - a if exact_a else 1.0 - af
    zero = F(0) if exact_a else 0.0
    maps = (
        planar_similarity(a, _turns(0), False, (zero, zero)),
        planar_similarity(b, beta, False, (a, zero)),
        planar_similarity(b, beta.negate(), False, mid),
        planar_similarity(a, _turns(0), False, (one_minus_a, zero)),
    )
    return IfsPath(maps, normalized=True)


def _solve_family_b(a: float, s_target: float = LOG4_OVER_LOG3) -> float:
    """b with 2 a^s + 2 b^s = 1 at the target similarity dimension."""
    return (0.5 - a ** s_target) ** (1.0 / s_target)


def build_interval() -> IfsPath:
    maps = (
        planar_similarity(F(1, 2), _turns(0), False, (F(0), F(0))),
        planar_similarity(F(1, 2), _turns(0), False, (F(1, 2), F(0))),
    )
    return IfsPath(maps, normalized=True)


def build_koch() -> IfsPath:
    return family_sab(F(1, 3), F(1, 3))


def build_figure1b() -> IfsPath:
    return family_sab(F(1, 4), _solve_family_b(0.25))


def build_figure1c() -> IfsPath:
    return family_sab(F(3, 10), _solve_family_b(0.3))


def build_rotating() -> IfsPath:
    """The spiraling quasiarc: all ratios 1/3, angles +-arccos(3/4).

    arccos(3/4) is an irrational multiple of pi (its cosine is rational but
    not 0, +-1/2, +-1), so the token carries the irrational mark.
    """
    third = F(1, 3)
    alpha = acos_token(3, 4, 1, irrational=True)
    alpha_neg = acos_token(3, 4, -1, irrational=True)
    sqrt7_12 = math.sqrt(7.0) / 12.0
    maps = (
        planar_similarity(third, alpha, False, (F(0), F(0))),
        planar_similarity(third, alpha_neg, False, (0.25, sqrt7_12)),
        planar_similarity(third, alpha_neg, False, (F(1, 2), F(0))),
        planar_similarity(third, alpha, False, (0.75, -sqrt7_12)),
    )
    return IfsPath(maps, normalized=True)


def build_gasket() -> IfsPath:
    """Sierpinski gasket as a 3-map path: reflections at the outer maps."""
    half = F(1, 2)
    s34 = math.sqrt(3.0) / 4.0
    maps = (
        planar_similarity(half, _turns(F(1, 6)), True, (F(0), F(0))),
        planar_similarity(half, _turns(0), False, (F(1, 4), s34)),
        planar_similarity(half, _turns(F(5, 6)), True, (F(3, 4), s34)),
    )
    return IfsPath(maps, normalized=True)


def build_carpet() -> IfsPath:
    """Sierpinski carpet as a 9-map path visiting the ring of cells.

    The bottom-right cell is visited twice, so the similarity dimension is
    log 9 / log 3 = 2 while the attractor is the carpet itself.  All data
    is exact: quarter-turn orientations and rational translations.
    """
    third = F(1, 3)
    z, t1, t2 = F(0), F(1, 3), F(2, 3)
    one = F(1)
    spec = (
        ((z, z), F(1, 4), True),
        ((z, t1), F(1, 4), True),
        ((z, t2), F(0), False),
        ((t1, t2), F(0), False),
        ((t2, t2), F(0), False),
        ((one, t2), F(3, 4), True),
        ((one, t1), F(1, 2), False),
        ((t2, t1), F(3, 4), True),
        ((t2, z), F(0), False),
    )
    maps = tuple(
        planar_similarity(third, _turns(turns), reflect, pos)
        for pos, turns, reflect in spec
    )
    return IfsPath(maps, normalized=True)


def build_wenxi_like() -> IfsPath:
    """Constructed arc violating the ratio condition: r_1 = 9/20, r_N = 3/10.

    (9/20)^t = (3/10)^s is impossible for naturals (the powers of 20 and 10
    have different 5-adic valuations unless t = s, and then 9^t = 3^t
    fails), while the spiraling junctions make the turning constant grow.
    """
    theta = acos_token(3, 4, 1, irrational=True)
    theta_neg_2 = radians_token(-math.asin(0.75))
    rho = math.sqrt(7.0) / 8.0
    r1, r4 = F(9, 20), F(3, 10)
    v1 = (0.45 * 0.75, 0.45 * math.sqrt(7.0) / 4.0)
    v2 = (rho * math.sqrt(7.0) / 4.0, -rho * 0.75)
    maps = (
        planar_similarity(r1, theta, False, (F(0), F(0))),
        planar_similarity(rho, theta_neg_2, False, v1),
        planar_similarity(rho, theta_neg_2, False, (v1[0] + v2[0], v1[1] + v2[1])),
        planar_similarity(r4, theta, False, (
            v1[0] + 2 * v2[0], v1[1] + 2 * v2[1],
        )),
    )
    return IfsPath(maps, normalized=True)


def build_loopy() -> IfsPath:
    """Constructed non-arc meeting the loop criteria.

    r_1 = 1/2, r_3 = 1/4 give r_1^2 = r_3, and the first angle arccos(3/5)
    is marked irrational (rational cosine 3/5 outside {0, 1/2, 1}), so
    2 a_1 - 0 is a certified irrational multiple of 2 pi.
    """
    alpha = acos_token(3, 5, 1, irrational=True)
    v1 = (F(3, 10), F(2, 5))
    mid_angle = radians_token(math.atan2(-0.4, 0.45))
    r2 = math.sqrt(0.45 ** 2 + 0.4 ** 2)
    maps = (
        planar_similarity(F(1, 2), alpha, False, (F(0), F(0))),
        planar_similarity(r2, mid_angle, False, v1),
        planar_similarity(F(1, 4), _turns(0), False, (F(3, 4), F(0))),
    )
    return IfsPath(maps, normalized=True)


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    builder: Callable[[], IfsPath]
    description: str
    expected: Dict[str, object] = field(default_factory=dict)
    provenance: Dict[str, str] = field(default_factory=dict)
    assume_arc: bool = False      # paper-asserted or screening-backed arc

    def build(self) -> IfsPath:
        return normalize(self.builder())


_LOG = {
    "koch_dim": LOG4_OVER_LOG3,
    "gasket_dim": math.log(3.0) / math.log(2.0),
}

GALLERY = (
    GalleryEntry(
        "interval",
        build_interval,
        "the unit segment split in halves",
        expected={"dimension": 1.0, "arc": "CERTIFIED_ARC", "thm14": "PASS", "cone": "PASS"},
        provenance={"dimension": "exact", "arc": "certified", "thm14": "exact", "cone": "certified"},
    ),
    GalleryEntry(
        "koch",
        build_koch,
        "Koch arc S(1/3, 1/3), dimension log4/log3",
        expected={
            "dimension": _LOG["koch_dim"],
            "arc": "CERTIFIED_ARC",
            "thm14": "PASS",
            "cone": "PASS",
        },
        provenance={"dimension": "paper", "arc": "certified", "thm14": "exact", "cone": "paper"},
    ),
    GalleryEntry(
        "figure1b",
        build_figure1b,
        "S(1/4, b) tuned to dimension log4/log3",
        expected={
            "dimension": _LOG["koch_dim"],
            "arc": "CERTIFIED_ARC",
            "thm14": "PASS",
            "cone": "PASS",
        },
        provenance={"dimension": "constructed", "arc": "certified", "thm14": "exact", "cone": "paper"},
    ),
    GalleryEntry(
        "figure1c",
        build_figure1c,
        "S(3/10, b) tuned to dimension log4/log3",
        expected={
            "dimension": _LOG["koch_dim"],
            "arc": "CERTIFIED_ARC",
            "thm14": "PASS",
            "cone": "PASS",
        },
        provenance={"dimension": "constructed", "arc": "certified", "thm14": "exact", "cone": "paper"},
    ),
    GalleryEntry(
        "rotating",
        build_rotating,
        "spiraling quasiarc with angles arccos(3/4), dimension log4/log3",
        expected={
            "dimension": _LOG["koch_dim"],
            "arc": "CERTIFIED_ARC",
            "thm14": "PASS",
            "cone": "FAIL",
        },
        provenance={"dimension": "paper", "arc": "certified", "thm14": "paper", "cone": "paper"},
    ),
    GalleryEntry(
        "gasket",
        build_gasket,
        "Sierpinski gasket path (not an arc)",
        expected={
            "dimension": _LOG["gasket_dim"],
            "arc": "NON_ARC_WITNESS",
            "thm14": "PASS",
            "cone": "PASS",
        },
        provenance={"dimension": "exact", "arc": "paper", "thm14": "exact", "cone": "paper"},
    ),
    GalleryEntry(
        "carpet",
        build_carpet,
        "Sierpinski carpet path, similarity dimension 2",
        expected={
            "dimension": 2.0,
            "arc": "NON_ARC_WITNESS",
            "thm14": "PASS",
            "cone": "FAIL",
        },
        provenance={"dimension": "paper", "arc": "computed", "thm14": "exact", "cone": "computed"},
    ),
    GalleryEntry(
        "wenxi_like",
        build_wenxi_like,
        "constructed arc with incommensurable end ratios (turning degenerates)",
        expected={"arc": "CERTIFIED_ARC", "thm14": "FAIL", "cone": "FAIL"},
        provenance={"arc": "certified", "thm14": "exact", "cone": "computed"},
    ),
    GalleryEntry(
        "loopy",
        build_loopy,
        "constructed path meeting the non-arc loop criteria",
        expected={"arc": "NON_ARC_WITNESS", "thm14": "UNDECIDED"},
        provenance={"arc": "computed", "thm14": "computed"},
    ),
)


def gallery_names():
    return [e.name for e in GALLERY]


def get_entry(name: str) -> GalleryEntry:
    for e in GALLERY:
        if e.name == name:
            return e
    raise KeyError(f"no gallery entry named {name!r}; known: {', '.join(gallery_names())}")
