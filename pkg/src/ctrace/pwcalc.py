"""Exact calculus of piecewise-linear and step functions on [0,1].

All coordinates and values are arbitrary-precision rationals
(:class:`fractions.Fraction`); there is no floating point anywhere in
this module.  Operations are pure and return canonical representations:
collinear interior breakpoints and equal-valued adjacent step pieces are
always merged, so ``==`` between two values is equality as functions on
[0,1].  Step functions carry explicit open/closed endpoint flags and may
contain degenerate single-point pieces, which is how an isolated point
value differing from both one-sided limits is represented.

Comparisons at open endpoints use one-sided limits; a supremum that is
approached but not attained is reported with a limit flag pointing at
the endpoint it is approached from.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(x) -> Fraction:
    """Coerce ``x`` (Fraction, int, 'a/b' string, or [num, den] pair) to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (list, tuple)) and len(x) == 2:
        num, den = x
        return Fraction(int(num), int(den))
    raise TypeError(f"cannot interpret {x!r} as a rational")


def frac_pair(x: Fraction) -> list:
    """Encode a Fraction as a reduced [numerator, denominator] pair."""
    return [x.numerator, x.denominator]


@dataclass(frozen=True)
class Interval:
    """A nonempty rational subinterval of [0,1] with endpoint flags.

    Degenerate single-point intervals are allowed and must be closed on
    both sides.
    """

    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lo", frac(self.lo))
        object.__setattr__(self, "hi", frac(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval: lo={self.lo} > hi={self.hi}")
        if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
            raise ValueError("a single-point interval must be closed on both sides")

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, t: Fraction) -> bool:
        if t < self.lo or t > self.hi:
            return False
        if t == self.lo and not self.lo_closed:
            return False
        if t == self.hi and not self.hi_closed:
            return False
        return True

    def contains_interval(self, other: "Interval") -> bool:
        lo_ok = self.lo < other.lo or (
            self.lo == other.lo and (self.lo_closed or not other.lo_closed)
        )
        hi_ok = other.hi < self.hi or (
            other.hi == self.hi and (self.hi_closed or not other.hi_closed)
        )
        return lo_ok and hi_ok

    def intersects(self, other: "Interval") -> bool:
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return False
        if lo < hi:
            return True
        return self.contains(lo) and other.contains(lo)

    def sample(self) -> Fraction:
        """A point guaranteed to lie in the interval."""
        if self.is_point:
            return self.lo
        return (self.lo + self.hi) / 2

    def to_json(self) -> dict:
        return {
            "lo": frac_pair(self.lo),
            "hi": frac_pair(self.hi),
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Interval":
        return cls(
            frac(obj["lo"]), frac(obj["hi"]),
            bool(obj["lo_closed"]), bool(obj["hi_closed"]),
        )


@dataclass(frozen=True)
class Piece:
    interval: Interval
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", frac(self.value))

    def to_json(self) -> dict:
        out = self.interval.to_json()
        out["value"] = frac_pair(self.value)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Piece":
        return cls(Interval.from_json(obj), frac(obj["value"]))


@dataclass(frozen=True)
class StepFunction:
    """A finite-piece function on [0,1], constant on each piece.

    The pieces partition [0,1] exactly once.  Canonical form merges
    adjacent pieces carrying equal values, so two StepFunctions are
    ``==`` iff they are equal as functions.
    """

    pieces: tuple

    def __post_init__(self):
        pieces = tuple(
            p if isinstance(p, Piece) else Piece(p[0], p[1]) for p in self.pieces
        )
        if not pieces:
            raise ValueError("a step function needs at least one piece")
        pieces = tuple(sorted(pieces, key=lambda p: (p.interval.lo, not p.interval.lo_closed)))
        first, last = pieces[0].interval, pieces[-1].interval
        if first.lo != ZERO or not first.lo_closed:
            raise ValueError("pieces must start at 0 (closed)")
        if last.hi != ONE or not last.hi_closed:
            raise ValueError("pieces must end at 1 (closed)")
        for cur, nxt in zip(pieces, pieces[1:]):
            if cur.interval.hi != nxt.interval.lo:
                raise ValueError(
                    f"pieces do not tile [0,1]: gap or overlap at "
                    f"{cur.interval.hi} vs {nxt.interval.lo}"
                )
            if cur.interval.hi_closed == nxt.interval.lo_closed:
                raise ValueError(
                    f"endpoint {cur.interval.hi} covered "
                    f"{'twice' if cur.interval.hi_closed else 'by no piece'}"
                )
        merged = [pieces[0]]
        for p in pieces[1:]:
            lastp = merged[-1]
            if lastp.value == p.value:
                merged[-1] = Piece(
                    Interval(
                        lastp.interval.lo, p.interval.hi,
                        lastp.interval.lo_closed, p.interval.hi_closed,
                    ),
                    p.value,
                )
            else:
                merged.append(p)
        object.__setattr__(self, "pieces", tuple(merged))

    @classmethod
    def constant(cls, v) -> "StepFunction":
        return cls((Piece(Interval(ZERO, ONE), frac(v)),))

    @classmethod
    def from_profile(cls, points: Sequence[Fraction],
                     point_values: Sequence[Fraction],
                     open_values: Sequence[Fraction]) -> "StepFunction":
        """Build from values at ``points`` and on the open gaps between them."""
        pieces = []
        for i, t in enumerate(points):
            pieces.append(Piece(Interval(t, t), point_values[i]))
            if i + 1 < len(points):
                pieces.append(
                    Piece(Interval(t, points[i + 1], False, False), open_values[i])
                )
        return cls(tuple(pieces))

    def eval(self, t) -> Fraction:
        """Exact value at t; the value of the unique piece containing t."""
        t = frac(t)
        if t < ZERO or t > ONE:
            raise ValueError(f"t={t} outside [0,1]")
        for p in self.pieces:
            if p.interval.contains(t):
                return p.value
        raise AssertionError("partition invariant violated")

    def partition_points(self) -> tuple:
        pts = set()
        for p in self.pieces:
            pts.add(p.interval.lo)
            pts.add(p.interval.hi)
        return tuple(sorted(pts))

    def values(self) -> tuple:
        return tuple(p.value for p in self.pieces)

    def min_value(self) -> Fraction:
        return min(self.values())

    def max_value(self) -> Fraction:
        return max(self.values())

    def min_on(self, window: Interval) -> Fraction:
        """Minimum over the pieces meeting ``window`` (exact; attained)."""
        vals = [p.value for p in self.pieces if p.interval.intersects(window)]
        if not vals:
            raise ValueError("window meets no piece")
        return min(vals)

    def scale(self, c) -> "StepFunction":
        c = frac(c)
        return StepFunction(
            tuple(Piece(p.interval, c * p.value) for p in self.pieces)
        )

    def jumps(self) -> tuple:
        """Discontinuity records (t, left limit, value, right limit).

        Limits are None beyond the endpoints 0 and 1.
        """
        pts = self.partition_points()
        out = []
        for i, t in enumerate(pts):
            v = self.eval(t)
            left = self.eval((pts[i - 1] + t) / 2) if i > 0 else None
            right = self.eval((t + pts[i + 1]) / 2) if i + 1 < len(pts) else None
            if (left is not None and left != v) or (right is not None and right != v):
                out.append(Jump(t, left, v, right))
        return tuple(out)

    def to_json(self) -> dict:
        return {"kind": "step", "pieces": [p.to_json() for p in self.pieces]}

    @classmethod
    def from_json(cls, obj: dict) -> "StepFunction":
        if obj.get("kind") != "step":
            raise ValueError("not a step-function payload")
        return cls(tuple(Piece.from_json(p) for p in obj["pieces"]))


@dataclass(frozen=True)
class Jump:
    t: Fraction
    left: Union[Fraction, None]
    value: Fraction
    right: Union[Fraction, None]


@dataclass(frozen=True)
class PLFunction:
    """A continuous piecewise-linear function on [0,1].

    ``breakpoints`` is strictly increasing from 0 to 1; between
    consecutive breakpoints the function interpolates linearly.
    Collinear interior breakpoints are removed on construction.
    """

    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        bps = tuple(frac(t) for t in self.breakpoints)
        vals = tuple(frac(v) for v in self.values)
        if len(bps) != len(vals):
            raise ValueError("breakpoints and values must have equal length")
        if len(bps) < 2:
            raise ValueError("need at least the two endpoints 0 and 1")
        if bps[0] != ZERO or bps[-1] != ONE:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        pts = [(bps[0], vals[0])]
        for t, v in zip(bps[1:], vals[1:]):
            while len(pts) >= 2:
                (t0, v0), (t1, v1) = pts[-2], pts[-1]
                if (v1 - v0) * (t - t1) == (v - v1) * (t1 - t0):
                    pts.pop()
                else:
                    break
            pts.append((t, v))
        object.__setattr__(self, "breakpoints", tuple(t for t, _ in pts))
        object.__setattr__(self, "values", tuple(v for _, v in pts))

    @classmethod
    def constant(cls, v) -> "PLFunction":
        v = frac(v)
        return cls((ZERO, ONE), (v, v))

    @classmethod
    def identity(cls) -> "PLFunction":
        return cls((ZERO, ONE), (ZERO, ONE))

    @classmethod
    def from_pairs(cls, pairs: Iterable) -> "PLFunction":
        pairs = list(pairs)
        return cls(
            tuple(t for t, _ in pairs), tuple(v for _, v in pairs)
        )

    def eval(self, t) -> Fraction:
        """Exact value at t by linear interpolation."""
        t = frac(t)
        if t < ZERO or t > ONE:
            raise ValueError(f"t={t} outside [0,1]")
        i = bisect.bisect_right(self.breakpoints, t) - 1
        if i >= len(self.breakpoints) - 1:
            return self.values[-1]
        t0, t1 = self.breakpoints[i], self.breakpoints[i + 1]
        v0, v1 = self.values[i], self.values[i + 1]
        return v0 + (t - t0) * (v1 - v0) / (t1 - t0)

    def segments(self):
        """Yield (t0, t1, v0, v1) for each maximal linear segment."""
        for i in range(len(self.breakpoints) - 1):
            yield (
                self.breakpoints[i], self.breakpoints[i + 1],
                self.values[i], self.values[i + 1],
            )

    def min_value(self) -> Fraction:
        return min(self.values)

    def max_value(self) -> Fraction:
        return max(self.values)

    def into_unit_interval(self) -> bool:
        return self.min_value() >= ZERO and self.max_value() <= ONE

    def shift(self, c) -> "PLFunction":
        c = frac(c)
        return PLFunction(self.breakpoints, tuple(v + c for v in self.values))

    def scale(self, c) -> "PLFunction":
        c = frac(c)
        return PLFunction(self.breakpoints, tuple(c * v for v in self.values))

    def __add__(self, other: "PLFunction") -> "PLFunction":
        return linear_combine([1, 1], [self, other])

    def __sub__(self, other: "PLFunction") -> "PLFunction":
        return linear_combine([1, -1], [self, other])

    def __neg__(self) -> "PLFunction":
        return self.scale(-1)

    def to_json(self) -> dict:
        return {
            "kind": "pl",
            "points": [
                [frac_pair(t), frac_pair(v)]
                for t, v in zip(self.breakpoints, self.values)
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PLFunction":
        if obj.get("kind") != "pl":
            raise ValueError("not a piecewise-linear payload")
        pts = obj["points"]
        return cls(
            tuple(frac(t) for t, _ in pts), tuple(frac(v) for _, v in pts)
        )


PiecewiseFunction = Union[PLFunction, StepFunction]


def function_from_json(obj: dict) -> PiecewiseFunction:
    kind = obj.get("kind")
    if kind == "pl":
        return PLFunction.from_json(obj)
    if kind == "step":
        return StepFunction.from_json(obj)
    raise ValueError(f"unknown function kind: {kind!r}")


# ---------------------------------------------------------------------------
# merged-refinement machinery
# ---------------------------------------------------------------------------


def merged_points(*fns: PiecewiseFunction) -> tuple:
    """Sorted union of all breakpoints / partition points, including 0 and 1."""
    pts = {ZERO, ONE}
    for f in fns:
        if isinstance(f, PLFunction):
            pts.update(f.breakpoints)
        elif isinstance(f, StepFunction):
            pts.update(f.partition_points())
        else:
            raise TypeError(f"not a piecewise function: {f!r}")
    return tuple(sorted(pts))


def _open_limits(f: PiecewiseFunction, a: Fraction, b: Fraction):
    """One-sided limits of f on an open interval (a,b) free of its breakpoints.

    Returns (limit at a+, limit at b-); on such an interval f is linear,
    so the pair determines it.
    """
    if isinstance(f, PLFunction):
        return f.eval(a), f.eval(b)
    v = f.eval((a + b) / 2)
    return v, v


@dataclass(frozen=True)
class LeResult:
    holds: bool
    witness: Union[Fraction, None] = None

    def __bool__(self) -> bool:
        return self.holds


def _violation_point(a, b, hA, hB, allow_equal):
    """A point of (a,b) where the linear h with limits (hA,hB) is > 0 (or >= 0)."""
    if allow_equal and hA == 0 and hB == 0:
        return (a + b) / 2
    if hA > 0 and hB > 0:
        return (a + b) / 2
    if hA > 0:
        root = a + (b - a) * hA / (hA - hB)
        return (a + root) / 2
    if hB > 0:
        root = a + (b - a) * hA / (hA - hB)
        return (root + b) / 2
    return None


def le_pointwise(f: PiecewiseFunction, g: PiecewiseFunction,
                 strict: bool = False) -> LeResult:
    """Exact pointwise comparison f <= g (or f < g when ``strict``).

    On failure the witness is a point t with f(t) > g(t) (>= for strict).
    """
    pts = merged_points(f, g)
    for t in pts:
        d = f.eval(t) - g.eval(t)
        if d > 0 or (strict and d == 0):
            return LeResult(False, t)
    for a, b in zip(pts, pts[1:]):
        fa, fb = _open_limits(f, a, b)
        ga, gb = _open_limits(g, a, b)
        hA, hB = fa - ga, fb - gb
        if strict:
            ok = hA <= 0 and hB <= 0 and not (hA == 0 and hB == 0)
        else:
            ok = hA <= 0 and hB <= 0
        if not ok:
            return LeResult(False, _violation_point(a, b, hA, hB, strict))
    return LeResult(True, None)


AT = "at"
ABOVE = "above"   # one-sided limit approaching the point from above
BELOW = "below"   # one-sided limit approaching the point from below


@dataclass(frozen=True)
class Extremum:
    value: Fraction
    at: Fraction
    side: str

    @property
    def attained(self) -> bool:
        return self.side == AT


def _scan(candidates, better) -> Extremum:
    best = None
    for value, at, side in candidates:
        if best is None or better(value, best.value):
            best = Extremum(value, at, side)
    return best


def weighted_sup_norm(f: PLFunction, w: StepFunction) -> Extremum:
    """Exact supremum of |f(t)| / w(t) over [0,1].

    The weight must be strictly positive.  The supremum is attained at a
    merged breakpoint or approached as a one-sided limit at an open
    piece endpoint; ``side`` records which.
    """
    if not isinstance(f, PLFunction):
        raise TypeError("weighted_sup_norm expects a piecewise-linear function")
    if not isinstance(w, StepFunction):
        raise TypeError("weights are step functions")
    if w.min_value() <= 0:
        raise ValueError("weight must be strictly positive")

    def candidates():
        pts = merged_points(f, w)
        for i, t in enumerate(pts):
            yield abs(f.eval(t)) / w.eval(t), t, AT
            if i + 1 < len(pts):
                a, b = t, pts[i + 1]
                fa, fb = _open_limits(f, a, b)
                c = w.eval((a + b) / 2)
                if fa == fb:
                    yield abs(fa) / c, (a + b) / 2, AT
                else:
                    yield abs(fa) / c, a, ABOVE
                    yield abs(fb) / c, b, BELOW

    return _scan(candidates(), lambda v, best: v > best)


def inf_difference(upper: PiecewiseFunction, lower: PiecewiseFunction) -> Extremum:
    """Exact infimum of upper(t) - lower(t) over [0,1], with attainment info."""

    def candidates():
        pts = merged_points(upper, lower)
        for i, t in enumerate(pts):
            yield upper.eval(t) - lower.eval(t), t, AT
            if i + 1 < len(pts):
                a, b = t, pts[i + 1]
                ua, ub = _open_limits(upper, a, b)
                la, lb = _open_limits(lower, a, b)
                hA, hB = ua - la, ub - lb
                if hA == hB:
                    yield hA, (a + b) / 2, AT
                else:
                    yield hA, a, ABOVE
                    yield hB, b, BELOW

    return _scan(candidates(), lambda v, best: v < best)


@dataclass(frozen=True)
class LscResult:
    holds: bool
    witness: Union[Fraction, None] = None

    def __bool__(self) -> bool:
        return self.holds


def is_lsc(d: StepFunction) -> LscResult:
    """Check lower semicontinuity: no point value exceeds a one-sided limit."""
    pts = d.partition_points()
    for i, t in enumerate(pts):
        v = d.eval(t)
        if i > 0 and v > d.eval((pts[i - 1] + t) / 2):
            return LscResult(False, t)
        if i + 1 < len(pts) and v > d.eval((t + pts[i + 1]) / 2):
            return LscResult(False, t)
    return LscResult(True, None)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def linear_combine(coeffs: Sequence, fns: Sequence[PLFunction]) -> PLFunction:
    """Exact pointwise linear combination sum(c_i * f_i)."""
    if not coeffs or not fns:
        raise ValueError("empty linear combination")
    if len(coeffs) != len(fns):
        raise ValueError("coefficient/function count mismatch")
    coeffs = [frac(c) for c in coeffs]
    pts = merged_points(*fns)
    vals = [sum((c * f.eval(t) for c, f in zip(coeffs, fns)), ZERO) for t in pts]
    return PLFunction(pts, tuple(vals))


def _require_into_unit(g: PLFunction):
    if not g.into_unit_interval():
        raise ValueError("inner function must map [0,1] into [0,1]")


def _segment_preimages(g: PLFunction, targets) -> set:
    """Preimages under g of each target value, per linear segment of g."""
    out = set()
    for t0, t1, y0, y1 in g.segments():
        if y0 == y1:
            continue
        lo, hi = min(y0, y1), max(y0, y1)
        for c in targets:
            if lo < c < hi:
                out.add(t0 + (c - y0) * (t1 - t0) / (y1 - y0))
    return out


def compose_pl(f: PLFunction, g: PLFunction) -> PLFunction:
    """Exact composition f(g(t)) for g mapping [0,1] into [0,1]."""
    _require_into_unit(g)
    pts = set(g.breakpoints)
    pts.update(_segment_preimages(g, f.breakpoints))
    pts = sorted(pts)
    return PLFunction(tuple(pts), tuple(f.eval(g.eval(t)) for t in pts))


def compose_step_pl(d: StepFunction, g: PLFunction) -> StepFunction:
    """Exact composition d(g(t)) as a step function.

    Finite because g is piecewise monotone; preserves lower
    semicontinuity of d.
    """
    _require_into_unit(g)
    pts = set(g.breakpoints)
    pts.update(_segment_preimages(g, d.partition_points()))
    pts = sorted(pts)
    point_vals = [d.eval(g.eval(t)) for t in pts]
    open_vals = [
        d.eval(g.eval((a + b) / 2)) for a, b in zip(pts, pts[1:])
    ]
    return StepFunction.from_profile(pts, point_vals, open_vals)


def combine_steps(steps: Sequence[StepFunction],
                  op: Callable) -> StepFunction:
    """Pointwise combination op(v_1, ..., v_n) of several step functions."""
    if not steps:
        raise ValueError("nothing to combine")
    pts = merged_points(*steps)
    point_vals = [op(*(s.eval(t) for s in steps)) for t in pts]
    open_vals = [
        op(*(s.eval((a + b) / 2) for s in steps))
        for a, b in zip(pts, pts[1:])
    ]
    return StepFunction.from_profile(pts, point_vals, open_vals)


def add_steps(steps: Sequence[StepFunction]) -> StepFunction:
    return combine_steps(steps, lambda *vs: sum(vs, ZERO))


def unit_weight() -> StepFunction:
    return StepFunction.constant(1)
