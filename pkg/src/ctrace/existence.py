"""Constraint-preserving perturbation of eigenvalue patterns.

Given a dimension function d_A with isolated jumps, a continuous
under-approximation f' of d_A, and a pattern T with T(f') dominated by a
target dimension function d_B, the eigenfunctions of T are perturbed by
at most 2*delta in the sup norm so that pushing d_A through the
perturbed pattern stays below d_B.  The construction is a single
"squash" reparametrization sigma of [0,1] applied inside every
perturbed eigenfunction: around each jump of d_A, sigma clamps a
2*delta window to a point where d_A is smallest and rejoins the
identity along short linear ramps, which gives d_A(sigma(x)) <= f'(x)
everywhere and hence d_A(sigma(lambda_i(t))) <= f'(lambda_i(t)) for
every eigenfunction.

Every produced certificate embeds the exact facts it claims, and
``verify_certificate`` re-derives all of them from scratch.

The module also reproduces a worked infeasibility instance showing that
a multiplicative slack on the domination hypothesis cannot be repaired
by small perturbations: with enough identical eigenfunctions, the
pattern is forced to overshoot a constant target at t = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .blocks import ensure_dimension_function
from .errors import Infeasible, PreconditionFailed
from .patterns import EigenPattern, apply_pattern, check_compat, push_dimension
from .pwcalc import (
    Interval,
    ONE,
    PLFunction,
    StepFunction,
    ZERO,
    compose_pl,
    compose_step_pl,
    frac,
    frac_pair,
    le_pointwise,
    unit_weight,
    weighted_sup_norm,
)


def choose_delta(eps, m: int) -> Fraction:
    """The window half-width eps / (2 m^2) matching the norm budget."""
    eps = frac(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if m < 1:
        raise ValueError("multiplicity must be >= 1")
    return eps / (2 * m * m)


def _window(s: Fraction, delta: Fraction) -> tuple:
    return max(ZERO, s - delta), min(ONE, s + delta)


def _check_windows(d: StepFunction, delta: Fraction):
    jumps = d.jumps()
    points = [j.t for j in jumps]
    for s, s2 in zip(points, points[1:]):
        if not s2 - s > 2 * delta:
            raise ValueError(
                f"windows overlap: jumps at {s} and {s2} closer than 2*delta"
            )
    for s in points:
        if s == ZERO or s == ONE:
            # truncated window; still must leave room on the far side
            if not delta < ONE:
                raise ValueError("window around an endpoint jump covers all of [0,1]")
        elif not (delta < s and delta < ONE - s):
            raise ValueError(
                f"window around {s} reaches an endpoint; shrink delta"
            )
    return jumps


def make_underapprox(d: StepFunction, delta) -> PLFunction:
    """Continuous piecewise-linear f' <= d equal to d away from its jumps.

    Around each jump s, within the window of half-width delta, f'
    interpolates linearly between the window-edge values of d and the
    point value d(s); in particular f'(s) = d(s).
    """
    delta = frac(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    ensure_dimension_function(d)
    jumps = _check_windows(d, delta)
    pts = [(ZERO, d.eval(ZERO))]

    def push(t, v):
        if pts and pts[-1][0] == t:
            if pts[-1][1] != v:
                raise AssertionError("inconsistent construction")
            return
        pts.append((t, v))

    for j in jumps:
        a, b = _window(j.t, delta)
        if a > ZERO:
            push(a, d.eval(a))
        push(j.t, j.value)
        if b < ONE:
            push(b, d.eval(b))
    push(ONE, d.eval(ONE))
    return PLFunction.from_pairs(pts)


def _clamp_target(j) -> Fraction:
    """Clamp position for a jump: a window edge whose d-value already
    equals the point value if one exists (left edge preferred), else the
    jump point itself."""
    if j.left is not None and j.left == j.value:
        return "left"
    if j.right is not None and j.right == j.value:
        return "right"
    return "center"


def squash_map(d: StepFunction, delta) -> PLFunction:
    """The reparametrization sigma with d(sigma(x)) <= f'(x) and
    |sigma(x) - x| <= 2*delta everywhere.

    sigma is the identity away from the jump windows of d; each window
    [s-delta, s+delta] is clamped to a point of minimal d-value among
    the window edges and s, and sigma rejoins the identity along linear
    ramps of half the available gap (at most delta/2 wide).
    """
    delta = frac(delta)
    ensure_dimension_function(d)
    jumps = _check_windows(d, delta)
    pts = [(ZERO, ZERO)]

    def push(t, v):
        if pts and pts[-1][0] == t:
            if pts[-1][1] != v:
                raise AssertionError("inconsistent construction")
            return
        pts.append((t, v))

    windows = [_window(j.t, delta) for j in jumps]
    for idx, j in enumerate(jumps):
        a, b = windows[idx]
        side = _clamp_target(j)
        c = {"left": a, "right": b, "center": j.t}[side]
        if c != a:
            prev_end = windows[idx - 1][1] if idx > 0 else ZERO
            w_left = min(delta, a - prev_end) / 2
            push(a - w_left, a - w_left)
            push(a, c)
        else:
            push(a, c)
        push(b, c)
        if c != b:
            next_start = windows[idx + 1][0] if idx + 1 < len(windows) else ONE
            w_right = min(delta, next_start - b) / 2
            push(b + w_right, b + w_right)
    push(ONE, ONE)
    return PLFunction.from_pairs(pts)


@dataclass(frozen=True)
class EigenFact:
    """Per-eigenfunction certificate entry: the exact sup distance."""

    sup_distance: Fraction

    def to_json(self) -> dict:
        return {"sup_distance": frac_pair(self.sup_distance)}

    @classmethod
    def from_json(cls, obj: dict) -> "EigenFact":
        return cls(frac(obj["sup_distance"]))


@dataclass(frozen=True)
class ElementFact:
    """Per-test-element certificate entry: deviation and allowed bound."""

    deviation: Fraction
    bound: Fraction

    def to_json(self) -> dict:
        return {"deviation": frac_pair(self.deviation), "bound": frac_pair(self.bound)}

    @classmethod
    def from_json(cls, obj: dict) -> "ElementFact":
        return cls(frac(obj["deviation"]), frac(obj["bound"]))


@dataclass(frozen=True)
class PerturbationCertificate:
    """Self-contained record of a successful perturbation.

    Every claimed fact is embedded exactly and can be re-derived by
    ``verify_certificate`` from the stored data alone.
    """

    d_a: StepFunction
    f_prime: PLFunction
    d_b: StepFunction
    original: EigenPattern
    perturbed: EigenPattern
    delta: Fraction
    eps: Fraction
    w_dom: StepFunction
    w_cod: StepFunction
    test_elements: tuple
    eigen_facts: tuple
    pushed: StepFunction
    element_facts: tuple

    def to_json(self) -> dict:
        return {
            "kind": "perturbation_certificate",
            "d_A": self.d_a.to_json(),
            "f_prime": self.f_prime.to_json(),
            "d_B": self.d_b.to_json(),
            "original": self.original.to_json(),
            "perturbed": self.perturbed.to_json(),
            "delta": frac_pair(self.delta),
            "eps": frac_pair(self.eps),
            "w_dom": self.w_dom.to_json(),
            "w_cod": self.w_cod.to_json(),
            "test_elements": [a.to_json() for a in self.test_elements],
            "eigen_facts": [e.to_json() for e in self.eigen_facts],
            "pushed": self.pushed.to_json(),
            "element_facts": [e.to_json() for e in self.element_facts],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PerturbationCertificate":
        if obj.get("kind") != "perturbation_certificate":
            raise ValueError("not a perturbation certificate")
        return cls(
            d_a=StepFunction.from_json(obj["d_A"]),
            f_prime=PLFunction.from_json(obj["f_prime"]),
            d_b=StepFunction.from_json(obj["d_B"]),
            original=EigenPattern.from_json(obj["original"]),
            perturbed=EigenPattern.from_json(obj["perturbed"]),
            delta=frac(obj["delta"]),
            eps=frac(obj["eps"]),
            w_dom=StepFunction.from_json(obj["w_dom"]),
            w_cod=StepFunction.from_json(obj["w_cod"]),
            test_elements=tuple(PLFunction.from_json(a) for a in obj["test_elements"]),
            eigen_facts=tuple(EigenFact.from_json(e) for e in obj["eigen_facts"]),
            pushed=StepFunction.from_json(obj["pushed"]),
            element_facts=tuple(ElementFact.from_json(e) for e in obj["element_facts"]),
        )


def perturb_pattern(d_a: StepFunction, f_prime: PLFunction, pattern: EigenPattern,
                    d_b: StepFunction, delta, test_elements: Sequence[PLFunction],
                    eps, w_dom: StepFunction,
                    w_cod: StepFunction) -> PerturbationCertificate:
    """Perturb the pattern so d_A pushes below d_B; emit an exact certificate.

    Certified facts: (a) each eigenfunction moves by at most 2*delta in
    the sup norm; (b) d_A composed with each perturbed eigenfunction is
    dominated by f' composed with the original one, and the pushed sum
    is dominated by d_B; (c) for each test element a, the weighted
    deviation between the original and perturbed pattern applied to a is
    at most eps times the domain norm of a.

    Raises :class:`Infeasible` with a witness point when the domination
    hypothesis pattern(f') <= d_B fails, or when no perturbation of the
    implemented family satisfies (b) or (c); facts are never weakened.
    """
    delta, eps = frac(delta), frac(eps)
    if delta <= 0 or eps <= 0:
        raise ValueError("delta and eps must be positive")
    ensure_dimension_function(d_a)
    ensure_dimension_function(d_b)
    for w in (w_dom, w_cod):
        if w.min_value() <= 0:
            raise ValueError("weights must be strictly positive")
    expected = make_underapprox(d_a, delta)
    if f_prime != expected:
        raise PreconditionFailed(
            "f_prime is not the canonical under-approximation of d_A at this delta"
        )
    dominated = le_pointwise(f_prime, d_a)
    if not dominated:
        raise PreconditionFailed(
            "f_prime exceeds d_A", witness=dominated.witness
        )
    hypothesis = check_compat(pattern, f_prime, d_b, 0)
    if not hypothesis:
        raise Infeasible(
            "pattern(f') exceeds d_B; no admissible perturbation exists",
            witness=hypothesis.witness,
        )

    sigma = squash_map(d_a, delta)
    perturbed = EigenPattern(
        tuple(compose_pl(sigma, lam) for lam in pattern.eigenfunctions)
    )
    one = unit_weight()
    eigen_facts = []
    for lam, lam_hat in zip(pattern.eigenfunctions, perturbed.eigenfunctions):
        dist = weighted_sup_norm(lam_hat - lam, one).value
        if dist > 2 * delta:
            raise AssertionError("squash construction exceeded its own budget")
        dom = le_pointwise(compose_step_pl(d_a, lam_hat), compose_pl(f_prime, lam))
        if not dom:
            raise Infeasible(
                "perturbed eigenfunction escapes the under-approximation",
                witness=dom.witness,
            )
        eigen_facts.append(EigenFact(dist))
    pushed = push_dimension(perturbed, d_a)
    below = le_pointwise(pushed, d_b)
    if not below:
        raise Infeasible(
            "pushed dimension function exceeds d_B", witness=below.witness
        )
    element_facts = []
    for a in test_elements:
        diff = apply_pattern(pattern, a) - apply_pattern(perturbed, a)
        dev = weighted_sup_norm(diff, w_cod).value
        bound = eps * weighted_sup_norm(a, w_dom).value
        if dev > bound:
            raise Infeasible(
                f"deviation {dev} on a test element exceeds the budget {bound}"
            )
        element_facts.append(ElementFact(dev, bound))
    return PerturbationCertificate(
        d_a=d_a,
        f_prime=f_prime,
        d_b=d_b,
        original=pattern,
        perturbed=perturbed,
        delta=delta,
        eps=eps,
        w_dom=w_dom,
        w_cod=w_cod,
        test_elements=tuple(test_elements),
        eigen_facts=tuple(eigen_facts),
        pushed=pushed,
        element_facts=tuple(element_facts),
    )


@dataclass(frozen=True)
class CheckItem:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    items: tuple

    def __bool__(self) -> bool:
        return self.ok

    def failures(self) -> list:
        return [i for i in self.items if not i.ok]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "items": [
                {"name": i.name, "ok": i.ok, "detail": i.detail} for i in self.items
            ],
        }


def verify_certificate(cert: PerturbationCertificate) -> CertificateCheck:
    """Independently re-check every fact embedded in a certificate.

    Uses only the exact calculus and pattern primitives; returns an
    itemized report rather than raising.
    """
    items = []
    one = unit_weight()

    def add(name, ok, detail=""):
        items.append(CheckItem(name, bool(ok), detail))

    add(
        "pattern_sizes_match",
        cert.original.multiplicity == cert.perturbed.multiplicity
        and len(cert.eigen_facts) == cert.original.multiplicity,
    )
    underapprox = le_pointwise(cert.f_prime, cert.d_a)
    add("f_prime_below_d_A", underapprox.holds,
        "" if underapprox else f"witness {underapprox.witness}")
    if cert.original.multiplicity == cert.perturbed.multiplicity:
        pairs = zip(cert.original.eigenfunctions, cert.perturbed.eigenfunctions)
        for i, (lam, lam_hat) in enumerate(pairs):
            dist = weighted_sup_norm(lam_hat - lam, one).value
            fact = cert.eigen_facts[i] if i < len(cert.eigen_facts) else None
            add(
                f"eigen_distance[{i}]",
                fact is not None and dist == fact.sup_distance
                and dist <= 2 * cert.delta,
                f"distance {dist}",
            )
            dom = le_pointwise(
                compose_step_pl(cert.d_a, lam_hat), compose_pl(cert.f_prime, lam)
            )
            add(
                f"eigen_domination[{i}]",
                dom.holds,
                "" if dom else f"witness {dom.witness}",
            )
    pushed = push_dimension(cert.perturbed, cert.d_a)
    add("pushed_matches", pushed == cert.pushed)
    below = le_pointwise(pushed, cert.d_b)
    add("pushed_below_target", below.holds,
        "" if below else f"witness {below.witness}")
    add(
        "element_count_matches",
        len(cert.element_facts) == len(cert.test_elements),
    )
    for j, a in enumerate(cert.test_elements):
        diff = apply_pattern(cert.original, a) - apply_pattern(cert.perturbed, a)
        dev = weighted_sup_norm(diff, cert.w_cod).value
        bound = cert.eps * weighted_sup_norm(a, cert.w_dom).value
        fact = cert.element_facts[j] if j < len(cert.element_facts) else None
        add(
            f"element_deviation[{j}]",
            fact is not None and dev == fact.deviation
            and bound == fact.bound and dev <= bound,
            f"deviation {dev} vs bound {bound}",
        )
    return CertificateCheck(all(i.ok for i in items), tuple(items))


# ---------------------------------------------------------------------------
# the slack-hypothesis counterexample
# ---------------------------------------------------------------------------


def pinched_dimension_function() -> StepFunction:
    """Value 2 on [0,1/2) and (1/2,1], value 1 at the single point 1/2."""
    half = Fraction(1, 2)
    return StepFunction.from_profile(
        [ZERO, half, ONE],
        [Fraction(2), Fraction(1), Fraction(2)],
        [Fraction(2), Fraction(2)],
    )


@dataclass(frozen=True)
class CounterexampleReport:
    """Worked instance where a slack-weakened hypothesis is unrepairable.

    With m identical identity eigenfunctions, 1/(2m-1) < delta makes the
    slack hypothesis pattern(f) <= (1+delta) * d_B hold for the constant
    target d_B = 2m-1, yet every pattern whose eigenfunctions stay
    within 2*eps0 < 1/2 of the identity at t = 0 pushes the pinched
    dimension function to 2m > 2m-1 there.
    """

    delta: Fraction
    eps0: Fraction
    multiplicity: int
    d_b_value: Fraction
    hypothesis_ok: bool
    infeasible_ok: bool
    witness: Fraction
    pushed_at_witness: Fraction
    d_a: StepFunction = field(repr=False)
    f: PLFunction = field(repr=False)

    def to_json(self) -> dict:
        return {
            "kind": "counterexample_report",
            "delta": frac_pair(self.delta),
            "eps0": frac_pair(self.eps0),
            "multiplicity": self.multiplicity,
            "d_B_value": frac_pair(self.d_b_value),
            "hypothesis_ok": self.hypothesis_ok,
            "infeasible_ok": self.infeasible_ok,
            "witness": frac_pair(self.witness),
            "pushed_at_witness": frac_pair(self.pushed_at_witness),
            "d_A": self.d_a.to_json(),
            "f": self.f.to_json(),
        }


def reproduce_counterexample(delta, eps0) -> CounterexampleReport:
    """Build and exactly verify the slack-hypothesis counterexample.

    Picks the minimal multiplicity m with 1/(2m-1) < delta, the pinched
    dimension function as source, m identity eigenfunctions, and the
    constant target 2m-1.  Verifies the slack hypothesis exactly, then
    certifies infeasibility at t = 0: any eigenfunction value within
    2*eps0 of 0 misses the pinch point 1/2, so the push there is 2m.
    """
    delta, eps0 = frac(delta), frac(eps0)
    if not ZERO < delta < ONE:
        raise ValueError("delta must lie in (0,1)")
    if not ZERO < eps0 < Fraction(1, 4):
        raise ValueError("eps0 must lie in (0, 1/4)")
    m = 1
    while not Fraction(1, 2 * m - 1) < delta:
        m += 1
    d_a = pinched_dimension_function()
    pattern = EigenPattern.identities(m)
    d_b_value = Fraction(2 * m - 1)
    d_b = StepFunction.constant(d_b_value)
    f = make_underapprox(d_a, Fraction(1, 8))
    hypothesis = check_compat(pattern, f, d_b, slack=delta)

    # any eigenfunction within 2*eps0 of the identity at 0 lands in
    # [0, 2*eps0], where the pinched function is identically 2
    reach = 2 * eps0
    low_region = Interval(ZERO, reach)
    forced_value = d_a.min_on(low_region)
    pushed_at_zero = Fraction(m) * forced_value
    infeasible = (
        reach < Fraction(1, 2)
        and forced_value == 2
        and pushed_at_zero > d_b_value
    )
    return CounterexampleReport(
        delta=delta,
        eps0=eps0,
        multiplicity=m,
        d_b_value=d_b_value,
        hypothesis_ok=hypothesis.holds,
        infeasible_ok=infeasible,
        witness=ZERO,
        pushed_at_witness=pushed_at_zero,
        d_a=d_a,
        f=f,
    )
