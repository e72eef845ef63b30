"""Building blocks described by their dimension functions.

A block is determined by a lower-semicontinuous, strictly positive,
integer-valued step function on [0,1] (its dimension function).  The
same data can be presented as an n x n nested-matrix picture: a chain of
open subsets A_1 >= A_2 >= ... of [0,1], with the dimension at t equal
to one plus the number of sets containing t.  This module converts
between the two presentations and validates them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .pwcalc import (
    ONE,
    ZERO,
    Interval,
    StepFunction,
    frac,
    is_lsc,
)


@dataclass(frozen=True)
class SpecialCheck:
    valid: bool
    reason: Union[str, None] = None
    witness: Union[Fraction, None] = None

    def __bool__(self) -> bool:
        return self.valid


def validate_special(d: StepFunction) -> SpecialCheck:
    """Check that d is a valid dimension function.

    Required: lower semicontinuous, integer-valued, >= 1 everywhere,
    finitely many pieces (automatic for this representation).
    """
    if not isinstance(d, StepFunction):
        return SpecialCheck(False, "not a step function")
    lsc = is_lsc(d)
    if not lsc:
        return SpecialCheck(False, "not lower semicontinuous", lsc.witness)
    for p in d.pieces:
        if p.value.denominator != 1:
            return SpecialCheck(
                False, f"non-integer value {p.value}", p.interval.sample()
            )
        if p.value < 1:
            return SpecialCheck(
                False, f"value {p.value} below 1", p.interval.sample()
            )
    return SpecialCheck(True)


def ensure_dimension_function(d: StepFunction) -> StepFunction:
    check = validate_special(d)
    if not check:
        raise ValueError(f"invalid dimension function: {check.reason}")
    return d


def _validate_open_set(intervals: Sequence[Interval]) -> tuple:
    """Validate a finite union of intervals open in [0,1]; returns it sorted."""
    ivs = tuple(sorted(intervals, key=lambda iv: iv.lo))
    for iv in ivs:
        if iv.is_point:
            raise ValueError("single points are not open in [0,1]")
        if iv.lo_closed and iv.lo != ZERO:
            raise ValueError(f"interval closed at {iv.lo} is not open in [0,1]")
        if iv.hi_closed and iv.hi != ONE:
            raise ValueError(f"interval closed at {iv.hi} is not open in [0,1]")
    for cur, nxt in zip(ivs, ivs[1:]):
        if cur.hi > nxt.lo:
            raise ValueError("intervals of an open set must be disjoint")
    return ivs


def _union_contains(outer: Sequence[Interval], inner: Sequence[Interval]) -> bool:
    # a connected interval inside a disjoint union lies inside one component
    return all(any(o.contains_interval(i) for o in outer) for i in inner)


@dataclass(frozen=True)
class NestedPresentation:
    """Nested-open-set presentation: n-1 open subsets with A_{i+1} <= A_i."""

    n: int
    opens: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("matrix size must be >= 1")
        opens = tuple(_validate_open_set(s) for s in self.opens)
        if len(opens) != self.n - 1:
            raise ValueError(f"expected {self.n - 1} open sets, got {len(opens)}")
        for bigger, smaller in zip(opens, opens[1:]):
            if not _union_contains(bigger, smaller):
                raise ValueError("open sets are not nested")
        object.__setattr__(self, "opens", opens)

    def membership_count(self, t: Fraction) -> int:
        t = frac(t)
        return sum(
            1 for s in self.opens if any(iv.contains(t) for iv in s)
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "opens": [[iv.to_json() for iv in s] for s in self.opens],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "NestedPresentation":
        return cls(
            int(obj["n"]),
            tuple(
                tuple(Interval.from_json(iv) for iv in s) for s in obj["opens"]
            ),
        )


def dim_from_nested(p: NestedPresentation) -> StepFunction:
    """Dimension function d(t) = 1 + #{i : t in A_i} of a presentation."""
    pts = {ZERO, ONE}
    for s in p.opens:
        for iv in s:
            pts.add(iv.lo)
            pts.add(iv.hi)
    pts = sorted(pts)
    point_vals = [Fraction(1 + p.membership_count(t)) for t in pts]
    open_vals = [
        Fraction(1 + p.membership_count((a + b) / 2))
        for a, b in zip(pts, pts[1:])
    ]
    return StepFunction.from_profile(pts, point_vals, open_vals)


def _superlevel(d: StepFunction, level: int) -> tuple:
    """The set {t : d(t) >= level} as a sorted tuple of intervals."""
    out = []
    for piece in d.pieces:
        if piece.value < level:
            continue
        iv = piece.interval
        if out:
            prev = out[-1]
            if prev.hi == iv.lo and (prev.hi_closed or iv.lo_closed):
                out[-1] = Interval(prev.lo, iv.hi, prev.lo_closed, iv.hi_closed)
                continue
        out.append(iv)
    return tuple(out)


def nested_from_dim(d: StepFunction) -> NestedPresentation:
    """Recover the nested presentation; superlevel sets of an lsc function are open."""
    ensure_dimension_function(d)
    n = int(d.max_value())
    opens = tuple(_superlevel(d, level) for level in range(2, n + 1))
    return NestedPresentation(n, opens)
