"""Contracting similarities of R^n and symbolic words over an IFS alphabet.

A similarity is ratio * orthogonal + translation with ratio in (0, 1).
Planar orthogonal parts keep rotation and reflection symbolically (dihedral
algebra stays exact); higher dimensions store a matrix.  Operations follow
exact arithmetic whenever every ingredient is exact and fall back to floats
with documented 1e-12 tolerances otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .scalars import (
    Rotation2,
    Scalar,
    as_fraction,
    is_exact,
    scalar_eq,
    to_float,
)

Point = Tuple[Scalar, ...]
Word = Tuple[int, ...]

ORTHO_TOL = 1e-12


def pt_float(p: Sequence[Scalar]) -> np.ndarray:
    return np.array([to_float(c) for c in p], dtype=float)


def pt_is_exact(p: Sequence[Scalar]) -> bool:
    return all(is_exact(c) for c in p)


def origin(n: int) -> Point:
    return tuple(Fraction(0) for _ in range(n))


def e1(n: int) -> Point:
    return (Fraction(1),) + tuple(Fraction(0) for _ in range(n - 1))


@dataclass(frozen=True)
class PlanarOrthogonal:
    """Orthogonal map of R^2 as rotation o (optional reflection in the x-axis).

    The reflection is applied before the rotation, so the matrix is
    R(angle) @ diag(1, -1) when ``reflect`` is set.  Products follow the
    dihedral law; reflect parity of a product is the XOR of parities.
    """

    rotation: Rotation2
    reflect: bool = False

    @property
    def dim(self) -> int:
        return 2

    @property
    def orientation_preserving(self) -> bool:
        return not self.reflect

    def compose(self, other: "PlanarOrthogonal") -> "PlanarOrthogonal":
        rot = other.rotation.negate() if self.reflect else other.rotation
        return PlanarOrthogonal(self.rotation.compose(rot), self.reflect ^ other.reflect)

    def power(self, k: int) -> "PlanarOrthogonal":
        if k < 0:
            raise ValueError("nonnegative powers only")
        if self.reflect:
            # a reflection is an involution
            return self if k % 2 == 1 else PlanarOrthogonal(Rotation2.zero(), False)
        return PlanarOrthogonal(self.rotation.times(k), False)

    def inverse(self) -> "PlanarOrthogonal":
        if self.reflect:
            return self
        return PlanarOrthogonal(self.rotation.negate(), False)

    def same(self, other: "PlanarOrthogonal") -> bool:
        """Symbolically decidable exact equality."""
        return self.reflect == other.reflect and self.rotation.same_angle(other.rotation)

    def exact_matrix(self) -> Optional[tuple]:
        cs = self.rotation.cos_sin()
        if not (is_exact(cs[0]) and is_exact(cs[1])):
            return None
        c, s = as_fraction(cs[0]), as_fraction(cs[1])
        if self.reflect:
            return ((c, s), (s, -c))
        return ((c, -s), (s, c))

    @cached_property
    def float_matrix(self) -> np.ndarray:
        r = self.rotation.radians
        c, s = math.cos(r), math.sin(r)
        m = np.array([[c, -s], [s, c]])
        if self.reflect:
            m = m @ np.diag([1.0, -1.0])
        return m


@dataclass(frozen=True)
class MatrixOrthogonal:
    """Orthogonal map of R^n (n >= 1) given by its matrix of scalars."""

    entries: tuple  # tuple of row tuples

    def __post_init__(self):
        n = len(self.entries)
        if n < 1 or any(len(row) != n for row in self.entries):
            raise ValueError("matrix must be square, n >= 1")
        m = self.float_matrix
        if not np.allclose(m.T @ m, np.eye(n), atol=ORTHO_TOL):
            raise ValueError("matrix is not orthogonal within 1e-12")

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def orientation_preserving(self) -> bool:
        return np.linalg.det(self.float_matrix) > 0

    @cached_property
    def float_matrix(self) -> np.ndarray:
        return np.array([[to_float(x) for x in row] for row in self.entries])

    def is_exact(self) -> bool:
        return all(is_exact(x) for row in self.entries for x in row)

    def exact_matrix(self) -> Optional[tuple]:
        if self.is_exact():
            return tuple(tuple(as_fraction(x) for x in row) for row in self.entries)
        return None

    def compose(self, other: "MatrixOrthogonal") -> "MatrixOrthogonal":
        a, b = self.exact_matrix(), other.exact_matrix()
        if a is not None and b is not None:
            n = self.dim
            rows = tuple(
                tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
                for i in range(n)
            )
            return MatrixOrthogonal(rows)
        m = self.float_matrix @ other.float_matrix
        return MatrixOrthogonal(tuple(tuple(float(x) for x in row) for row in m))

    def power(self, k: int) -> "MatrixOrthogonal":
        if k < 0:
            raise ValueError("nonnegative powers only")
        result = MatrixOrthogonal(_identity_entries(self.dim))
        base = self
        while k:
            if k & 1:
                result = result.compose(base)
            base = base.compose(base)
            k >>= 1
        return result

    def same(self, other: "MatrixOrthogonal") -> bool:
        a, b = self.exact_matrix(), other.exact_matrix()
        if a is not None and b is not None:
            return a == b
        return bool(np.allclose(self.float_matrix, other.float_matrix, atol=ORTHO_TOL))


def _identity_entries(n: int) -> tuple:
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n)) for i in range(n)
    )


OrthogonalPart = Union[PlanarOrthogonal, MatrixOrthogonal]


def identity_orthogonal(n: int) -> OrthogonalPart:
    if n == 2:
        return PlanarOrthogonal(Rotation2.zero(), False)
    return MatrixOrthogonal(_identity_entries(n))


@dataclass(frozen=True)
class Similarity:
    """One contracting similarity x -> ratio * A(x) + b."""

    ratio: Scalar
    orth: OrthogonalPart
    translation: Point

    def __post_init__(self):
        r = to_float(self.ratio)
        if not 0.0 < r < 1.0:
            raise ValueError(f"ratio {self.ratio} is not a contraction in (0,1)")
        if len(self.translation) != self.orth.dim:
            raise ValueError("translation dimension does not match orthogonal part")
        object.__setattr__(self, "translation", tuple(self.translation))

    @property
    def dim(self) -> int:
        return self.orth.dim

    @cached_property
    def float_matrix(self) -> np.ndarray:
        return to_float(self.ratio) * self.orth.float_matrix

    @cached_property
    def float_vector(self) -> np.ndarray:
        return pt_float(self.translation)

    def exact_linear(self) -> Optional[tuple]:
        """ratio * A as an exact Fraction matrix, if representable."""
        if not is_exact(self.ratio):
            return None
        m = self.orth.exact_matrix()
        if m is None:
            return None
        r = as_fraction(self.ratio)
        return tuple(tuple(r * x for x in row) for row in m)

    def is_exact(self) -> bool:
        return self.exact_linear() is not None and pt_is_exact(self.translation)

    def apply(self, p: Point) -> Point:
        """r*A(p) + b, exact when every input is exact."""
        if len(p) != self.dim:
            raise ValueError(f"point dimension {len(p)} != map dimension {self.dim}")
        lin = self.exact_linear()
        if lin is not None and pt_is_exact(p) and pt_is_exact(self.translation):
            q = tuple(as_fraction(c) for c in p)
            return tuple(
                sum(lin[i][j] * q[j] for j in range(self.dim)) + as_fraction(self.translation[i])
                for i in range(self.dim)
            )
        v = self.float_matrix @ pt_float(p) + self.float_vector
        return tuple(float(x) for x in v)

    def apply_np(self, pts: np.ndarray) -> np.ndarray:
        return pts @ self.float_matrix.T + self.float_vector

    def compose(self, other: "Similarity") -> "Similarity":
        """self o other; ratios multiply, orthogonal parts compose."""
        if self.dim != other.dim:
            raise ValueError("dimension mismatch in compose")
        if is_exact(self.ratio) and is_exact(other.ratio):
            ratio = as_fraction(self.ratio) * as_fraction(other.ratio)
        else:
            ratio = to_float(self.ratio) * to_float(other.ratio)
        return Similarity(ratio, self.orth.compose(other.orth), self.apply(other.translation))

    def fixed_point(self) -> Point:
        """The unique x with S(x) = x, solving (I - rA) x = b."""
        lin = self.exact_linear()
        if lin is not None and pt_is_exact(self.translation):
            n = self.dim
            a = [
                [(Fraction(1) if i == j else Fraction(0)) - lin[i][j] for j in range(n)]
                for i in range(n)
            ]
            rhs = [as_fraction(c) for c in self.translation]
            return tuple(_solve_exact(a, rhs))
        n = self.dim
        x = np.linalg.solve(np.eye(n) - self.float_matrix, self.float_vector)
        return tuple(float(v) for v in x)


def _solve_exact(a, rhs):
    """Gaussian elimination over Fractions; (I - rA) is always invertible."""
    n = len(rhs)
    m = [row[:] + [rhs[i]] for i, row in enumerate(a)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        inv = Fraction(1) / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


class IdentityMap:
    """Marker returned by word_map for the empty word.

    The identity is not a contraction, so it cannot be a Similarity; callers
    that accept empty words must handle this object.
    """

    def apply(self, p):
        return tuple(p)

    def apply_np(self, pts):
        return pts

    def compose(self, other):
        return other

    def __repr__(self):
        return "IdentityMap()"


IDENTITY = IdentityMap()


def validate_word(word: Sequence[int], n_maps: int) -> Word:
    w = tuple(int(x) for x in word)
    for letter in w:
        if not 1 <= letter <= n_maps:
            raise ValueError(f"letter {letter} outside alphabet 1..{n_maps}")
    return w


def word_map(maps: Sequence[Similarity], word: Sequence[int]):
    """S_word = S_w1 o S_w2 o ... o S_wm; empty word gives IDENTITY."""
    w = validate_word(word, len(maps))
    if not w:
        return IDENTITY
    result = maps[w[0] - 1]
    for letter in w[1:]:
        result = result.compose(maps[letter - 1])
    return result


def word_ratio(maps: Sequence[Similarity], word: Sequence[int]) -> Scalar:
    w = validate_word(word, len(maps))
    ratios = [maps[letter - 1].ratio for letter in w]
    if all(is_exact(r) for r in ratios):
        out = Fraction(1)
        for r in ratios:
            out *= as_fraction(r)
        return out
    out = 1.0
    for r in ratios:
        out *= to_float(r)
    return out


def points_close(p: Point, q: Point, tol: float) -> bool:
    if pt_is_exact(p) and pt_is_exact(q):
        return all(as_fraction(a) == as_fraction(b) for a, b in zip(p, q))
    return bool(np.linalg.norm(pt_float(p) - pt_float(q)) <= tol)


def scalar_point(p: Point) -> Point:
    return tuple(p)


def planar_similarity(
    ratio: Scalar,
    rotation: Rotation2,
    reflect: bool,
    translation: Sequence[Scalar],
) -> Similarity:
    return Similarity(ratio, PlanarOrthogonal(rotation, reflect), tuple(translation))
