"""Eigenvalue-pattern maps on functions over [0,1].

A pattern is a finite multiset of continuous piecewise-linear
eigenfunctions [0,1] -> [0,1]; it acts on a function f by
T(f) = sum_i f(lambda_i(t)), optionally divided by the multiplicity so
that constants are preserved.  This module also provides the associated
checks: compatibility with a target dimension function (with optional
multiplicative slack), eigenvalue density over a uniform grid of
subintervals, the weighted-norm closeness hypothesis built from ramp
probe functions, gap computation between pushed and target dimension
functions, and exact verification of a strict inequality pushed through
a chain of stages.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .blocks import ensure_dimension_function
from .errors import PreconditionFailed
from .pwcalc import (
    AT,
    Extremum,
    LeResult,
    ONE,
    PLFunction,
    StepFunction,
    ZERO,
    add_steps,
    compose_pl,
    compose_step_pl,
    frac,
    frac_pair,
    inf_difference,
    le_pointwise,
    linear_combine,
    merged_points,
    weighted_sup_norm,
)


@dataclass(frozen=True)
class EigenPattern:
    """A nonempty multiset of eigenfunctions [0,1] -> [0,1]."""

    eigenfunctions: tuple

    def __post_init__(self):
        fns = tuple(self.eigenfunctions)
        if not fns:
            raise ValueError("a pattern needs at least one eigenfunction")
        for f in fns:
            if not isinstance(f, PLFunction):
                raise TypeError("eigenfunctions must be piecewise linear")
            if not f.into_unit_interval():
                raise ValueError("eigenfunctions must map [0,1] into [0,1]")
        object.__setattr__(self, "eigenfunctions", fns)

    @property
    def multiplicity(self) -> int:
        return len(self.eigenfunctions)

    @classmethod
    def identities(cls, m: int) -> "EigenPattern":
        return cls(tuple(PLFunction.identity() for _ in range(m)))

    def then(self, later: "EigenPattern") -> "EigenPattern":
        """The pattern of the composite map: first self, then ``later``.

        apply_pattern(self.then(later), f) == apply_pattern(later, apply_pattern(self, f)).
        """
        return EigenPattern(
            tuple(
                compose_pl(mine, theirs)
                for theirs in later.eigenfunctions
                for mine in self.eigenfunctions
            )
        )

    def to_json(self) -> dict:
        return {"eigenfunctions": [f.to_json() for f in self.eigenfunctions]}

    @classmethod
    def from_json(cls, obj: dict) -> "EigenPattern":
        return cls(tuple(PLFunction.from_json(f) for f in obj["eigenfunctions"]))


def apply_pattern(pattern: EigenPattern, f: PLFunction,
                  normalized: bool = False) -> PLFunction:
    """Exact sum (or average, when ``normalized``) of f over the eigenfunctions."""
    fns = [compose_pl(f, lam) for lam in pattern.eigenfunctions]
    coeff = Fraction(1, pattern.multiplicity) if normalized else Fraction(1)
    return linear_combine([coeff] * len(fns), fns)


def push_dimension(pattern: EigenPattern, d: StepFunction) -> StepFunction:
    """Exact sum of d over the eigenfunctions; lsc when d is lsc."""
    ensure_dimension_function(d)
    return add_steps([compose_step_pl(d, lam) for lam in pattern.eigenfunctions])


def check_compat(pattern: EigenPattern, f: PLFunction, d_target: StepFunction,
                 slack=0) -> LeResult:
    """Verify pattern(f) <= (1 + slack) * d_target pointwise, exactly."""
    slack = frac(slack)
    if slack < 0:
        raise ValueError("slack must be nonnegative")
    return le_pointwise(apply_pattern(pattern, f), d_target.scale(1 + slack))


@dataclass(frozen=True)
class DensityResult:
    holds: bool
    witness_t: Union[Fraction, None] = None
    witness_bin: Union[int, None] = None

    def __bool__(self) -> bool:
        return self.holds


def density_check(pattern: EigenPattern, d: int, delta) -> DensityResult:
    """Check that at every t, each of the d subintervals [j/d,(j+1)/d]
    holds at least the fraction ``delta`` of the eigenvalues.

    Subintervals are closed, so boundary points count for both
    neighbors.  Exact: the counts are piecewise constant in t.
    """
    delta = frac(delta)
    if d < 1:
        raise ValueError("need at least one subinterval")
    if not ZERO < delta <= Fraction(1, d):
        raise ValueError("delta must lie in (0, 1/d]")
    m = pattern.multiplicity
    needed = delta * m
    cuts = [Fraction(j, d) for j in range(d + 1)]
    pts = set()
    for lam in pattern.eigenfunctions:
        pts.update(lam.breakpoints)
        for t0, t1, y0, y1 in lam.segments():
            if y0 == y1:
                continue
            lo, hi = min(y0, y1), max(y0, y1)
            for c in cuts:
                if lo < c < hi:
                    pts.add(t0 + (c - y0) * (t1 - t0) / (y1 - y0))
    pts = sorted(pts | {ZERO, ONE})
    samples = list(pts)
    samples.extend((a + b) / 2 for a, b in zip(pts, pts[1:]))
    for t in samples:
        values = [lam.eval(t) for lam in pattern.eigenfunctions]
        for j in range(d):
            lo, hi = cuts[j], cuts[j + 1]
            count = sum(1 for v in values if lo <= v <= hi)
            if count < needed:
                return DensityResult(False, t, j)
    return DensityResult(True)


def ramp_functions(d: int) -> list:
    """The d probe ramps r_0..r_{d-1}: r_i is 0 on [0, i/d], 1 on
    [(i+1)/d, 1], and linear in between."""
    if d < 1:
        raise ValueError("need at least one ramp")
    out = []
    for i in range(d):
        pts = [(ZERO, ZERO)] if i == 0 else [(ZERO, ZERO), (Fraction(i, d), ZERO)]
        pts.append((Fraction(i + 1, d), ONE))
        if i + 1 < d:
            pts.append((ONE, ONE))
        out.append(PLFunction.from_pairs(pts))
    return out


@dataclass(frozen=True)
class UniquenessReport:
    holds: bool
    density_ok: bool
    failing_ramp: Union[int, None] = None
    lhs_norm: Union[Fraction, None] = None
    rhs_bound: Union[Fraction, None] = None

    def __bool__(self) -> bool:
        return self.holds


def uniqueness_hypothesis_check(phi: EigenPattern, psi: EigenPattern, d: int,
                                delta, w_dom: StepFunction,
                                w_cod: StepFunction) -> UniquenessReport:
    """Check the closeness hypothesis for two patterns.

    Both patterns must pass the density check, and on every probe ramp
    the weighted norm of the difference must fall strictly below
    delta times the domain norm of the ramp.  The verdict is balanced:
    rescaling both weights by a common positive constant cannot change it.
    """
    delta = frac(delta)
    for w in (w_dom, w_cod):
        if w.min_value() <= 0:
            raise ValueError("weights must be strictly positive")
    if not density_check(phi, d, delta) or not density_check(psi, d, delta):
        return UniquenessReport(False, density_ok=False)
    for i, ramp in enumerate(ramp_functions(d)):
        diff = apply_pattern(phi, ramp) - apply_pattern(psi, ramp)
        lhs = weighted_sup_norm(diff, w_cod).value
        rhs = delta * weighted_sup_norm(ramp, w_dom).value
        if not lhs < rhs:
            return UniquenessReport(False, True, i, lhs, rhs)
    return UniquenessReport(True, True)


@dataclass(frozen=True)
class GapReport:
    """Exact infimum of target minus pushed-source, with its witness."""

    gap: Fraction
    at: Fraction
    attained: bool = True

    @property
    def satisfied(self) -> bool:
        return self.gap > 0

    def to_json(self) -> dict:
        return {
            "gap": frac_pair(self.gap),
            "at": frac_pair(self.at),
            "attained": self.attained,
        }


def compute_gap(pattern: EigenPattern, d_src: StepFunction,
                d_tgt: StepFunction) -> GapReport:
    """Exact inf over t of d_tgt(t) - sum_i d_src(lambda_i(t))."""
    pushed = push_dimension(pattern, d_src)
    ext = inf_difference(d_tgt, pushed)
    return GapReport(ext.value, ext.at, ext.side == AT)


@dataclass(frozen=True)
class ChainStage:
    """A stage of an intertwining chain: the map out of an algebra
    together with that algebra's dimension function."""

    pattern: EigenPattern
    dim: StepFunction


@dataclass(frozen=True)
class ChainReport:
    verified: bool
    margin: Union[Fraction, None] = None
    margin_at: Union[Fraction, None] = None
    reason: Union[str, None] = None
    witness: Union[Fraction, None] = None
    stage_gaps: tuple = ()

    def __bool__(self) -> bool:
        return self.verified


def verify_chain(stages: Sequence, tau: EigenPattern, d_target: StepFunction,
                 f: PLFunction, delta_1, eps_n) -> ChainReport:
    """Push f through the chain and certify the strict target inequality.

    ``stages`` lists (pattern, source dimension function) pairs for the
    horizontal maps, in order; ``tau`` is the final map into the algebra
    with dimension function ``d_target``.  Patterns apply in normalized
    (constant-preserving) form, so adding a constant commutes with the
    chain.  Verifies exactly: every consecutive-stage gap exceeds
    delta_1; the pushed function plus delta_1 stays strictly below the
    target plus eps_n; and hence (since eps_n <= delta_1) the pushed
    function stays strictly below the target.  Returns the minimal
    residual margin between target and pushed function.
    """
    stages = [s if isinstance(s, ChainStage) else ChainStage(*s) for s in stages]
    if not stages:
        raise PreconditionFailed("chain needs at least one stage")
    delta_1, eps_n = frac(delta_1), frac(eps_n)
    if eps_n > delta_1:
        raise PreconditionFailed(f"eps_n={eps_n} exceeds delta_1={delta_1}")
    for st in stages:
        ensure_dimension_function(st.dim)
    lead = le_pointwise(f, stages[0].dim)
    if not lead:
        raise PreconditionFailed(
            "f is not dominated by the first-stage dimension function",
            witness=lead.witness,
        )
    gaps = []
    for k in range(len(stages) - 1):
        rep = compute_gap(stages[k].pattern, stages[k].dim, stages[k + 1].dim)
        gaps.append(rep)
        if not rep.gap > delta_1:
            return ChainReport(
                False,
                reason=f"stage {k} gap {rep.gap} does not exceed delta_1",
                witness=rep.at,
                stage_gaps=tuple(gaps),
            )
    g = f
    for st in stages:
        g = apply_pattern(st.pattern, g, normalized=True)
    g = apply_pattern(tau, g, normalized=True)
    main = le_pointwise(g.shift(delta_1 - eps_n), d_target, strict=True)
    if not main:
        return ChainReport(
            False,
            reason="pushed function reaches the target within delta_1 - eps_n",
            witness=main.witness,
            stage_gaps=tuple(gaps),
        )
    conclusion = le_pointwise(g, d_target, strict=True)
    if not conclusion:  # implied by the previous check; kept as a guard
        return ChainReport(
            False,
            reason="pushed function touches the target",
            witness=conclusion.witness,
            stage_gaps=tuple(gaps),
        )
    margin = inf_difference(d_target, g)
    return ChainReport(
        True, margin=margin.value, margin_at=margin.at, stage_gaps=tuple(gaps)
    )
