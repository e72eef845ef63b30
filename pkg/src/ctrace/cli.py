"""Command-line front end.

Loads JSON payloads (from a file argument or stdin), dispatches to the
library, and prints a deterministic JSON result: keys sorted, rationals
as reduced [numerator, denominator] pairs.

Exit codes: 0 verified/true, 1 refuted/false (witness in the JSON),
2 precondition or schema error, 3 infeasible perturbation,
4 not decidable.

A payload that is a JSON array is treated as a batch of independent
per-interval instances: each entry is processed on its own, the results
are concatenated, and the worst exit code wins.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from .blocks import (
    NestedPresentation,
    dim_from_nested,
    nested_from_dim,
    validate_special,
)
from .errors import Infeasible
from .existence import (
    PerturbationCertificate,
    make_underapprox,
    perturb_pattern,
    reproduce_counterexample,
    verify_certificate,
)
from .invariant import (
    AiVerdict,
    GroupModel,
    SimplexModel,
    TraceNormMap,
    ai_criterion,
    classify_point,
    dimension_range_membership,
    ext,
    ext_json,
    lsc_decompose,
    trace_norm_eval,
)
from .patterns import (
    ChainStage,
    EigenPattern,
    apply_pattern,
    check_compat,
    compute_gap,
    density_check,
    push_dimension,
    uniqueness_hypothesis_check,
    verify_chain,
)
from .pwcalc import (
    PLFunction,
    StepFunction,
    frac,
    frac_pair,
    function_from_json,
    le_pointwise,
    weighted_sup_norm,
)
from .unitary import IsometryPath, patch_at_singularity, validate_unitary_path

OK = 0
REFUTED = 1
BAD_INPUT = 2
INFEASIBLE = 3
NOT_DECIDABLE = 4


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, separators=(",", ":")))
    sys.stdout.write("\n")


def _opt_pair(x):
    return None if x is None else frac_pair(x)


def _load_payload(args):
    if args.infile and args.infile != "-":
        with open(args.infile, "r", encoding="utf-8") as fh:
            return json.load(fh)
    return json.load(sys.stdin)


def _steps(obj) -> StepFunction:
    return StepFunction.from_json(obj)


def _pl(obj) -> PLFunction:
    return PLFunction.from_json(obj)


def _group(payload) -> GroupModel:
    # the pairing matrix may sit beside the group object or inside it
    obj = dict(payload["group"])
    if "pairing" in payload:
        obj["pairing"] = payload["pairing"]
    return GroupModel.from_json(obj)


# --- handlers: each takes (payload, args) and returns (result, exit code) --


def _pw_eval(payload, args):
    f = function_from_json(payload["f"])
    value = f.eval(frac(payload["t"]))
    return {"value": frac_pair(value)}, OK


def _pw_le(payload, args):
    f = function_from_json(payload["f"])
    g = function_from_json(payload["g"])
    res = le_pointwise(f, g, strict=bool(payload.get("strict", False)))
    out = {"holds": res.holds, "witness": _opt_pair(res.witness)}
    return out, OK if res.holds else REFUTED


def _pw_norm(payload, args):
    res = weighted_sup_norm(_pl(payload["f"]), _steps(payload["w"]))
    return {
        "value": frac_pair(res.value),
        "at": frac_pair(res.at),
        "side": res.side,
    }, OK


def _block_validate(payload, args):
    check = validate_special(_steps(payload))
    out = {
        "valid": check.valid,
        "reason": check.reason,
        "witness": _opt_pair(check.witness),
    }
    return out, OK if check.valid else REFUTED


def _block_from_nested(payload, args):
    return dim_from_nested(NestedPresentation.from_json(payload)).to_json(), OK


def _block_to_nested(payload, args):
    return nested_from_dim(_steps(payload)).to_json(), OK


def _pattern_apply(payload, args):
    out = apply_pattern(
        EigenPattern.from_json(payload["pattern"]),
        _pl(payload["f"]),
        normalized=bool(payload.get("normalized", False)),
    )
    return out.to_json(), OK


def _pattern_push(payload, args):
    out = push_dimension(EigenPattern.from_json(payload["pattern"]), _steps(payload["d"]))
    return out.to_json(), OK


def _pattern_compat(payload, args):
    res = check_compat(
        EigenPattern.from_json(payload["pattern"]),
        _pl(payload["f"]),
        _steps(payload["d_B"]),
        slack=frac(payload.get("slack", 0)),
    )
    out = {"holds": res.holds, "witness": _opt_pair(res.witness)}
    return out, OK if res.holds else REFUTED


def _pattern_density(payload, args):
    res = density_check(
        EigenPattern.from_json(payload["pattern"]),
        int(payload["d"]),
        frac(payload["delta"]),
    )
    out = {
        "holds": res.holds,
        "witness_t": _opt_pair(res.witness_t),
        "witness_bin": res.witness_bin,
    }
    return out, OK if res.holds else REFUTED


def _pattern_gap(payload, args):
    rep = compute_gap(
        EigenPattern.from_json(payload["pattern"]),
        _steps(payload["d_src"]),
        _steps(payload["d_tgt"]),
    )
    return rep.to_json(), OK if rep.satisfied else REFUTED


def _pattern_chain(payload, args):
    stages = [
        ChainStage(EigenPattern.from_json(s["pattern"]), _steps(s["dim"]))
        for s in payload["stages"]
    ]
    rep = verify_chain(
        stages,
        EigenPattern.from_json(payload["tau"]),
        _steps(payload["d_target"]),
        _pl(payload["f"]),
        frac(payload["delta_1"]),
        frac(payload["eps_n"]),
    )
    out = {
        "verified": rep.verified,
        "margin": _opt_pair(rep.margin),
        "margin_at": _opt_pair(rep.margin_at),
        "reason": rep.reason,
        "witness": _opt_pair(rep.witness),
        "stage_gaps": [g.to_json() for g in rep.stage_gaps],
    }
    return out, OK if rep.verified else REFUTED


def _pattern_uniqhyp(payload, args):
    rep = uniqueness_hypothesis_check(
        EigenPattern.from_json(payload["phi"]),
        EigenPattern.from_json(payload["psi"]),
        int(payload["d"]),
        frac(payload["delta"]),
        _steps(payload["w_dom"]),
        _steps(payload["w_cod"]),
    )
    out = {
        "holds": rep.holds,
        "density_ok": rep.density_ok,
        "failing_ramp": rep.failing_ramp,
        "lhs_norm": _opt_pair(rep.lhs_norm),
        "rhs_bound": _opt_pair(rep.rhs_bound),
    }
    return out, OK if rep.holds else REFUTED


def _exist_fprime(payload, args):
    out = make_underapprox(_steps(payload["d"]), frac(payload["delta"]))
    return out.to_json(), OK


def _exist_perturb(payload, args):
    d_a = _steps(payload["d_A"])
    delta = frac(payload["delta"])
    f_prime = (
        _pl(payload["f_prime"])
        if "f_prime" in payload
        else make_underapprox(d_a, delta)
    )
    cert = perturb_pattern(
        d_a,
        f_prime,
        EigenPattern.from_json(payload["pattern"]),
        _steps(payload["d_B"]),
        delta,
        [_pl(a) for a in payload.get("test_elements", [])],
        frac(payload["eps"]),
        _steps(payload["w_dom"]),
        _steps(payload["w_cod"]),
    )
    return cert.to_json(), OK


def _exist_verify(payload, args):
    check = verify_certificate(PerturbationCertificate.from_json(payload))
    return check.to_json(), OK if check.ok else REFUTED


def _exist_counterexample(payload, args):
    rep = reproduce_counterexample(frac(args.delta), frac(args.eps0))
    ok = rep.hypothesis_ok and rep.infeasible_ok
    return rep.to_json(), OK if ok else REFUTED


def _invariant_eval(payload, args):
    f = TraceNormMap.from_json(payload["f"])
    value = trace_norm_eval(f, [frac(c) for c in payload["s"]])
    return {"value": ext_json(value)}, OK


def _invariant_range(payload, args):
    res = dimension_range_membership(
        _group(payload),
        TraceNormMap.from_json(payload["f"]),
        frac(payload["x"]),
        require_positive=bool(payload.get("require_positive", True)),
    )
    out = {"member": res.member, "failing_vertex": res.failing_vertex}
    return out, OK if res.member else REFUTED


def _invariant_ai(payload, args):
    group = _group(payload)
    rep = ai_criterion(group, SimplexModel.from_json(payload["simplex"]),
                       TraceNormMap.from_json(payload["f"]))
    if rep.verdict is AiVerdict.NOT_DECIDABLE:
        return rep.to_json(), NOT_DECIDABLE
    return rep.to_json(), OK if rep.verdict is AiVerdict.AI else REFUTED


def _invariant_decompose(payload, args):
    parts = lsc_decompose(
        TraceNormMap.from_json(payload["f"]),
        [frac(c) for c in payload["caps"]],
    )
    return {"parts": [[frac_pair(v) for v in part] for part in parts]}, OK


def _invariant_classify(payload, args):
    group = _group(payload)
    points = payload["points"]
    rows = []
    for xy in points:
        x, y = ext(xy[0]), ext(xy[1])
        cls = classify_point((x, y), group)
        rows.append({"x": ext_json(x), "y": ext_json(y), "class": cls.value})
    if args.plot_out:
        with open(args.plot_out, "w", encoding="utf-8") as fh:
            for r in rows:
                x = r["x"] if r["x"] == "inf" else Fraction(*r["x"])
                y = r["y"] if r["y"] == "inf" else Fraction(*r["y"])
                fh.write(f"{x} {y} {r['class']}\n")
    return {"points": rows}, OK


def _unitary_patch(payload, args):
    res = patch_at_singularity(IsometryPath.from_json(payload))
    return res.to_json(), OK


def _unitary_validate(payload, args):
    path = IsometryPath.from_json(payload["path"])
    samples = payload["unitaries"]
    mats = np.array(
        [np.array(s["re"]) + 1j * np.array(s["im"]) for s in samples],
        dtype=complex,
    )
    rep = validate_unitary_path(mats, path)
    return rep.to_json(), OK if rep.ok else REFUTED


_HANDLERS = {
    ("pw", "eval"): (_pw_eval, True),
    ("pw", "le"): (_pw_le, True),
    ("pw", "norm"): (_pw_norm, True),
    ("block", "validate"): (_block_validate, True),
    ("block", "from-nested"): (_block_from_nested, True),
    ("block", "to-nested"): (_block_to_nested, True),
    ("pattern", "apply"): (_pattern_apply, True),
    ("pattern", "push"): (_pattern_push, True),
    ("pattern", "compat"): (_pattern_compat, True),
    ("pattern", "density"): (_pattern_density, True),
    ("pattern", "gap"): (_pattern_gap, True),
    ("pattern", "chain"): (_pattern_chain, True),
    ("pattern", "uniqhyp"): (_pattern_uniqhyp, True),
    ("exist", "fprime"): (_exist_fprime, True),
    ("exist", "perturb"): (_exist_perturb, True),
    ("exist", "verify"): (_exist_verify, True),
    ("exist", "counterexample"): (_exist_counterexample, False),
    ("invariant", "eval"): (_invariant_eval, True),
    ("invariant", "range"): (_invariant_range, True),
    ("invariant", "ai"): (_invariant_ai, True),
    ("invariant", "decompose"): (_invariant_decompose, True),
    ("invariant", "classify"): (_invariant_classify, True),
    ("unitary", "patch"): (_unitary_patch, True),
    ("unitary", "validate"): (_unitary_validate, True),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctrace",
        description="Exact step/piecewise-linear calculus, eigenvalue-pattern "
        "checks, perturbation certificates, invariant-range models, and "
        "unitary path patching.",
    )
    sub = parser.add_subparsers(dest="group_cmd", required=True)

    def leaf(group, name, needs_file=True):
        p = group.add_parser(name)
        if needs_file:
            p.add_argument(
                "infile", nargs="?", default="-",
                help="JSON payload file (default: stdin)",
            )
        return p

    pw = sub.add_parser("pw").add_subparsers(dest="sub_cmd", required=True)
    for name in ("eval", "le", "norm"):
        leaf(pw, name)

    block = sub.add_parser("block").add_subparsers(dest="sub_cmd", required=True)
    for name in ("validate", "from-nested", "to-nested"):
        leaf(block, name)

    pattern = sub.add_parser("pattern").add_subparsers(dest="sub_cmd", required=True)
    for name in ("apply", "push", "compat", "density", "gap", "chain", "uniqhyp"):
        leaf(pattern, name)

    exist = sub.add_parser("exist").add_subparsers(dest="sub_cmd", required=True)
    for name in ("fprime", "perturb", "verify"):
        leaf(exist, name)
    ce = leaf(exist, "counterexample", needs_file=False)
    ce.add_argument("--delta", required=True, help="slack, as a/b")
    ce.add_argument("--eps0", required=True, help="perturbation budget in (0,1/4), as a/b")

    invariant = sub.add_parser("invariant").add_subparsers(dest="sub_cmd", required=True)
    for name in ("eval", "range", "ai", "decompose"):
        leaf(invariant, name)
    cl = leaf(invariant, "classify")
    cl.add_argument("--plot-out", default=None, help="write 'x y class' rows here")

    unitary = sub.add_parser("unitary").add_subparsers(dest="sub_cmd", required=True)
    for name in ("patch", "validate"):
        leaf(unitary, name)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else BAD_INPUT
        return OK if code == 0 else BAD_INPUT
    handler, takes_payload = _HANDLERS[(args.group_cmd, args.sub_cmd)]
    try:
        payload = _load_payload(args) if takes_payload else None
        if takes_payload and isinstance(payload, list):
            results, codes = [], [OK]
            for entry in payload:
                res, code = handler(entry, args)
                results.append(res)
                codes.append(code)
            _emit(results)
            return max(codes)
        result, code = handler(payload, args)
        _emit(result)
        return code
    except Infeasible as exc:
        _emit({
            "error": "infeasible",
            "message": str(exc),
            "witness": _opt_pair(getattr(exc, "witness", None)),
        })
        return INFEASIBLE
    except (ValueError, KeyError, TypeError, IndexError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return BAD_INPUT


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
