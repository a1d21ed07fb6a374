"""Exact-where-possible scalars and planar rotation bookkeeping.

A scalar is either an exact rational (``fractions.Fraction``) or a float.
Arithmetic between exact values stays exact; anything touching a float
degrades to float.  Rotations are stored as an exact fraction of a full
turn plus an integer combination of opaque angle tokens, so that angle
algebra (composition, integer powers, sign flips) is decidable even when
the angle itself is irrational, e.g. arccos(3/4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Scalar = Union[Fraction, int, float]

TWO_PI = 2.0 * math.pi


def is_exact(x: Scalar) -> bool:
    return isinstance(x, (Fraction, int))


def to_float(x: Scalar) -> float:
    return float(x)


def as_fraction(x: Scalar) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not an exact scalar: {x!r}")


def scalar_eq(a: Scalar, b: Scalar, tol: float = 1e-12) -> bool:
    """Exact comparison when both sides are exact, |a-b| <= tol otherwise."""
    if is_exact(a) and is_exact(b):
        return as_fraction(a) == as_fraction(b)
    return abs(to_float(a) - to_float(b)) <= tol


@dataclass(frozen=True)
class OpaqueToken:
    """Identity of an angle that has no exact rational-turn representation.

    Tokens compare by value (kind and arguments), so the same construction
    in two places yields the same token.  ``irrational`` is an input-level
    assertion that the angle is an irrational multiple of 2*pi; it is never
    inferred from floating point data.
    """

    kind: str
    args: tuple
    radians: float
    irrational: bool = False

    def identity(self) -> tuple:
        return (self.kind, self.args)

    def __repr__(self):
        flag = ", irrational" if self.irrational else ""
        return f"OpaqueToken({self.kind}{self.args}{flag})"


def acos_token(num: int, den: int, sign: int = 1, irrational: bool = False) -> "Rotation2":
    """Angle sign*arccos(num/den) as a single-token rotation."""
    if den <= 0 or abs(num) > den:
        raise ValueError(f"acos argument {num}/{den} outside [-1, 1]")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    tok = OpaqueToken("acos", (num, den), math.acos(num / den), irrational)
    return Rotation2(Fraction(0), ((tok, sign),))


def radians_token(value: float, irrational: bool = False) -> "Rotation2":
    tok = OpaqueToken("radians", (repr(float(value)),), float(value), irrational)
    return Rotation2(Fraction(0), ((tok, 1),))


def _norm_tokens(tokens) -> tuple:
    acc: dict[tuple, list] = {}
    for tok, coeff in tokens:
        key = tok.identity()
        if key in acc:
            acc[key][1] += coeff
        else:
            acc[key] = [tok, coeff]
    items = [(tok, c) for tok, c in acc.values() if c != 0]
    items.sort(key=lambda tc: tc[0].identity())
    return tuple(items)


@dataclass(frozen=True)
class Rotation2:
    """A planar rotation angle: exact turns plus opaque-token combination.

    ``turns`` is reduced modulo 1 into [0, 1).  Two rotations are equal as
    real angles whenever their token combinations match and their turn
    fractions agree; tokenless values are fully exact.
    """

    turns: Fraction = Fraction(0)
    tokens: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "turns", as_fraction(self.turns) % 1)
        object.__setattr__(self, "tokens", _norm_tokens(self.tokens))

    @staticmethod
    def from_turns(t) -> "Rotation2":
        return Rotation2(Fraction(t))

    @staticmethod
    def zero() -> "Rotation2":
        return Rotation2(Fraction(0))

    @property
    def is_exact_turns(self) -> bool:
        return not self.tokens

    @property
    def radians(self) -> float:
        val = float(self.turns) * TWO_PI
        for tok, coeff in self.tokens:
            val += coeff * tok.radians
        return math.remainder(val, TWO_PI)

    def compose(self, other: "Rotation2") -> "Rotation2":
        return Rotation2(self.turns + other.turns, self.tokens + other.tokens)

    def negate(self) -> "Rotation2":
        return Rotation2(-self.turns, tuple((t, -c) for t, c in self.tokens))

    def times(self, k: int) -> "Rotation2":
        return Rotation2(self.turns * k, tuple((t, c * k) for t, c in self.tokens))

    def same_angle(self, other: "Rotation2") -> bool:
        """Decidable equality as real angles mod 2*pi (symbolic)."""
        return self.turns == other.turns and self.tokens == other.tokens

    def is_zero_angle(self) -> bool:
        return self.turns == 0 and not self.tokens

    def rationality(self) -> str:
        """'rational', 'irrational', or 'unknown' as a multiple of 2*pi.

        A single irrational-marked token with nonzero coefficient plus any
        exact turn fraction is certified irrational; independent tokens are
        never combined, so mixed combinations stay 'unknown'.
        """
        if not self.tokens:
            return "rational"
        if len(self.tokens) == 1 and self.tokens[0][0].irrational:
            return "irrational"
        return "unknown"

    def cos_sin(self) -> tuple:
        """(cos, sin) as exact Fractions when representable, else floats."""
        if self.is_exact_turns:
            quarter = self.turns * 4
            if quarter.denominator == 1:
                return _QUARTER_COS_SIN[int(quarter) % 4]
        r = self.radians
        return (math.cos(r), math.sin(r))

    def __repr__(self):
        if self.is_exact_turns:
            return f"Rotation2({self.turns} turns)"
        parts = [f"{self.turns} turns"] + [f"{c}*{t.kind}{t.args}" for t, c in self.tokens]
        return "Rotation2(" + " + ".join(parts) + ")"


_QUARTER_COS_SIN = {
    0: (Fraction(1), Fraction(0)),
    1: (Fraction(0), Fraction(1)),
    2: (Fraction(-1), Fraction(0)),
    3: (Fraction(0), Fraction(-1)),
}
