"""Shared test utilities: random instance generators and a dumb
sampling oracle for comparisons and extrema.

The oracle never reasons about refinements or witnesses: it evaluates
the per-cell linear formulas of both functions at the cell endpoints
(one-sided limits), the cell midpoint, and every grid sample inside the
cell, and takes the decision from those numbers alone.  Grid density
comes from CTRACE_GRID_SAMPLES (default 10000).  Inner loops run on
integers for speed; all reported values are exact.
"""

from __future__ import annotations

import math
import os
import random
from fractions import Fraction

from ctrace.pwcalc import (
    ONE,
    PLFunction,
    StepFunction,
    ZERO,
    merged_points,
)

GRID = int(os.environ.get("CTRACE_GRID_SAMPLES", "10000"))


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------


def _cell_formula(f, a, b):
    """(alpha, beta) with f(t) = alpha + beta*t on the open cell (a,b)."""
    if isinstance(f, PLFunction):
        va, vb = f.eval(a), f.eval(b)
        beta = (vb - va) / (b - a)
        return va - beta * a, beta
    v = f.eval((a + b) / 2)
    return v, Fraction(0)


def _k_formula(alpha, beta, grid):
    """Integers (A, B, C) with alpha + beta*(k/grid) = (A + B*k)/C."""
    gamma = beta / grid
    den = math.lcm(alpha.denominator, gamma.denominator)
    return (
        alpha.numerator * (den // alpha.denominator),
        gamma.numerator * (den // gamma.denominator),
        den,
    )


def _interior_grid_range(a, b, grid):
    lo = math.floor(a * grid) + 1
    hi = math.ceil(b * grid) - 1
    return lo, hi


def oracle_le(f, g, strict=False, grid=GRID):
    """Sampling verdict for f <= g (< when strict): point values, cell
    endpoint limits, cell midpoints, and all grid samples."""

    def bad(x, y):
        return x > y or (strict and x == y)

    pts = merged_points(f, g)
    for t in pts:
        if bad(f.eval(t), g.eval(t)):
            return False, t
    for a, b in zip(pts, pts[1:]):
        fa, fb = _cell_formula(f, a, b)
        ga, gb = _cell_formula(g, a, b)
        for t in (a, (a + b) / 2, b):
            if bad(fa + fb * t, ga + gb * t):
                return False, t
        af, bf, cf = _k_formula(fa, fb, grid)
        ag, bg, cg = _k_formula(ga, gb, grid)
        lo, hi = _interior_grid_range(a, b, grid)
        for k in range(lo, hi + 1):
            lhs = (af + bf * k) * cg
            rhs = (ag + bg * k) * cf
            if lhs > rhs or (strict and lhs == rhs):
                return False, Fraction(k, grid)
    return True, None


def oracle_weighted_sup(f, w, grid=GRID) -> Fraction:
    """Sampling supremum of |f|/w over the same candidate set."""
    best_num, best_den = -1, 1  # value as best_num / best_den

    def offer(num, den):
        nonlocal best_num, best_den
        if num * best_den > best_num * den:
            best_num, best_den = num, den

    pts = merged_points(f, w)
    for t in pts:
        v, wv = abs(f.eval(t)), w.eval(t)
        offer(v.numerator * wv.denominator, v.denominator * wv.numerator)
    for a, b in zip(pts, pts[1:]):
        fa, fb = _cell_formula(f, a, b)
        wv = w.eval((a + b) / 2)
        for t in (a, (a + b) / 2, b):
            v = abs(fa + fb * t)
            offer(v.numerator * wv.denominator, v.denominator * wv.numerator)
        af, bf, cf = _k_formula(fa, fb, grid)
        den = cf * wv.numerator
        lo, hi = _interior_grid_range(a, b, grid)
        for k in range(lo, hi + 1):
            offer(abs(af + bf * k) * wv.denominator, den)
    return Fraction(best_num, best_den)


def oracle_inf_diff(upper, lower, grid=GRID) -> Fraction:
    """Sampling infimum of upper - lower over the same candidate set."""
    best = None

    def offer(v):
        nonlocal best
        if best is None or v < best:
            best = v

    pts = merged_points(upper, lower)
    for t in pts:
        offer(upper.eval(t) - lower.eval(t))
    for a, b in zip(pts, pts[1:]):
        ua, ub = _cell_formula(upper, a, b)
        la, lb = _cell_formula(lower, a, b)
        da, db = ua - la, ub - lb
        for t in (a, (a + b) / 2, b):
            offer(da + db * t)
        ad, bd, cd = _k_formula(da, db, grid)
        lo, hi = _interior_grid_range(a, b, grid)
        best_num = None
        for k in range(lo, hi + 1):
            num = ad + bd * k
            if best_num is None or num < best_num:
                best_num = num
        if best_num is not None:
            offer(Fraction(best_num, cd))
    return best


def enumeration_sup(group, f, j, max_den=10**4):
    """Brute-force sup of state j over the dimension range.

    For q*Z the scan walks every multiple below the bound; for Q it
    covers all fractions with denominator up to max_den.
    """
    from ctrace.invariant import INF, GroupKind, dimension_range_membership

    bound = INF
    for i, fi in enumerate(f.vertex_values):
        if fi != INF:
            ratio = fi / group.rates[i]
            if bound == INF or ratio < bound:
                bound = ratio
    if bound == INF:
        return INF
    if group.kind is GroupKind.SCALED_INTEGERS:
        best = None
        n = 0
        while True:
            x = group.q * n
            if not dimension_range_membership(group, f, x):
                break
            best = x
            n += 1
        return None if best is None else group.rates[j] * best
    best = Fraction(0)
    for den in range(1, max_den + 1):
        num = math.ceil(bound * den) - 1
        cand = Fraction(num, den)
        if cand > best and dimension_range_membership(group, f, cand):
            best = cand
    return group.rates[j] * best


# ---------------------------------------------------------------------------
# random instances
# ---------------------------------------------------------------------------

_DENOMS = (1, 2, 3, 4, 5, 6, 8, 12, 16)


def rand_fraction(rng: random.Random, lo=0, hi=1, max_den=16) -> Fraction:
    den = rng.choice([d for d in _DENOMS if d <= max_den])
    lo, hi = Fraction(lo), Fraction(hi)
    span = (hi - lo) * den
    k = rng.randint(0, math.floor(span))
    return lo + Fraction(k, den)


def rand_cuts(rng: random.Random, max_cuts=4) -> list:
    cuts = set()
    for _ in range(rng.randint(0, max_cuts)):
        t = rand_fraction(rng)
        if ZERO < t < ONE:
            cuts.add(t)
    return sorted(cuts)


def rand_pl(rng: random.Random, max_breaks=4, lo=-2, hi=3) -> PLFunction:
    pts = [ZERO] + rand_cuts(rng, max_breaks) + [ONE]
    vals = [rand_fraction(rng, lo, hi) for _ in pts]
    return PLFunction(tuple(pts), tuple(vals))


def rand_pl_unit(rng: random.Random, max_breaks=4) -> PLFunction:
    pts = [ZERO] + rand_cuts(rng, max_breaks) + [ONE]
    vals = [rand_fraction(rng, 0, 1) for _ in pts]
    return PLFunction(tuple(pts), tuple(vals))


def rand_step(rng: random.Random, max_cuts=4, lo=-2, hi=3) -> StepFunction:
    pts = [ZERO] + rand_cuts(rng, max_cuts) + [ONE]
    pvals = [rand_fraction(rng, lo, hi) for _ in pts]
    ovals = [rand_fraction(rng, lo, hi) for _ in pts[1:]]
    return StepFunction.from_profile(pts, pvals, ovals)


def rand_positive_step(rng: random.Random, max_cuts=3) -> StepFunction:
    pts = [ZERO] + rand_cuts(rng, max_cuts) + [ONE]
    pvals = [rand_fraction(rng, Fraction(1, 4), 3) for _ in pts]
    ovals = [rand_fraction(rng, Fraction(1, 4), 3) for _ in pts[1:]]
    return StepFunction.from_profile(pts, pvals, ovals)


def rand_lsc_int_step(rng: random.Random, max_jumps=5, vmax=5) -> StepFunction:
    """Random lsc integer step function with values >= 1.

    Point values never exceed the neighboring open values; with some
    probability a point dips strictly below both (an isolated pinch).
    """
    pts = [ZERO] + rand_cuts(rng, max_jumps) + [ONE]
    ovals = [Fraction(rng.randint(1, vmax)) for _ in pts[1:]]
    pvals = []
    for i in range(len(pts)):
        neighbors = []
        if i > 0:
            neighbors.append(ovals[i - 1])
        if i < len(ovals):
            neighbors.append(ovals[i])
        cap = min(neighbors)
        value = Fraction(rng.randint(1, int(cap))) if rng.random() < 0.3 else cap
        pvals.append(value)
    return StepFunction.from_profile(pts, pvals, ovals)


def rand_pattern(rng: random.Random, max_m=8, max_breaks=3):
    from ctrace.patterns import EigenPattern

    m = rng.randint(1, max_m)
    return EigenPattern(tuple(rand_pl_unit(rng, max_breaks) for _ in range(m)))
