"""Command-line front end.

Subcommands
-----------
delta               delta estimate for a tensor file and partition
verify              full inequality report (JSON or CSV)
matrix              quadratic-form matrices, minors and thresholds
construct-equality  emit an equality-attaining tensor from a params file
immersion-check     round-trip a tensor through its gradient-graph immersion
sample              randomized verification campaign, CSV output

Exit codes: 0 success, 1 verification failure (a gap below -1e-9),
2 input error.  Errors are reported as one JSON object on stderr.
The environment variable DELTAINV_SEED supplies the default seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .bounds import GAP_TOL, evaluate
from .campaign import CampaignConfig, CampaignSummary, campaign_csv, run_campaign
from .delta import OptimizerOptions, delta_invariant
from .equality import EqualityParamsT1, EqualityParamsT2, build_t1, build_t2
from .errors import DeltainvError, FormatError
from .immersion import (
    lagrangian_check,
    lemma1_roundtrip,
    potential_from_tensor,
    second_fundamental_form_numeric,
)
from .quadforms import (
    STATEMENT_I,
    STATEMENT_II,
    THEOREM2,
    build_M,
    critical_C,
    psd_verdict,
    psd_verdict_minors,
)
from .tensors import CubicForm, PartitionSpec

SEED_ENV = "DELTAINV_SEED"


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise FormatError(f"{SEED_ENV} must be an integer, got {raw!r}")


def _parse_partition(raw: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in raw.split(","))
    except ValueError:
        raise FormatError(f"cannot parse partition {raw!r}; expected e.g. '2,3'")


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc}")


def _load_tensor(path: str) -> CubicForm:
    return CubicForm.from_json_dict(_load_json(path))


def _optimizer_options(args) -> OptimizerOptions:
    return OptimizerOptions(
        restarts=args.restarts,
        max_iters=args.max_iters,
        tol=args.tol,
        seed=args.seed if args.seed is not None else _default_seed(),
    )


def _add_optimizer_flags(parser):
    parser.add_argument("--restarts", type=int, default=16)
    parser.add_argument("--max-iters", type=int, default=500)
    parser.add_argument("--tol", type=float, default=1e-9)
    parser.add_argument("--seed", type=int, default=None,
                        help=f"defaults to ${SEED_ENV} or 0")


def cmd_delta(args) -> int:
    h = _load_tensor(args.tensor)
    P = PartitionSpec(h.n, _parse_partition(args.partition))
    result = delta_invariant(h, args.c, P, _optimizer_options(args))
    print(json.dumps(result.to_json_dict(), indent=2))
    return 0


def cmd_verify(args) -> int:
    h = _load_tensor(args.tensor)
    P = PartitionSpec(h.n, _parse_partition(args.partition))
    report = evaluate(h, args.c, P, _optimizer_options(args))
    if args.format == "csv":
        sys.stdout.write(report.to_csv())
    else:
        print(report.to_json())
    return 1 if report.violated else 0


def _fraction_json(value: Fraction) -> dict:
    return {
        "num": value.numerator,
        "den": value.denominator,
        "value": float(value),
    }


def cmd_matrix(args) -> int:
    P = PartitionSpec(args.n, _parse_partition(args.partition))
    try:
        C = Fraction(args.C)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"cannot parse coefficient {args.C!r}")
    bundle = build_M(P, args.ell, C)
    psd, eig_min = psd_verdict(bundle)
    out = {
        "n": P.n,
        "partition": list(P.blocks),
        "ell": args.ell,
        "C": _fraction_json(C),
        "M": bundle.M.tolist(),
        "Mprime": bundle.Mprime.tolist(),
        "minors": [float(d) for d in bundle.minors],
        "critical_C": _fraction_json(bundle.critical_C),
        "thresholds": {
            "STATEMENT_I": _fraction_json(critical_C(P, args.ell, STATEMENT_I)),
            "STATEMENT_II": (
                _fraction_json(critical_C(P, args.ell, STATEMENT_II))
                if P.residual >= 1
                else None
            ),
            "THEOREM2": (
                _fraction_json(critical_C(P, args.ell, THEOREM2))
                if P.residual == 0
                else None
            ),
        },
        "psd": psd,
        "psd_by_minors": psd_verdict_minors(bundle),
        "min_eigenvalue": eig_min,
    }
    print(json.dumps(out, indent=2))
    return 0


def _params_t1(P: PartitionSpec, data: dict) -> EqualityParamsT1:
    lambdas = data.get("lambdas")
    if lambdas is None:
        raise FormatError("params file needs a 'lambdas' list for theorem 1")
    return EqualityParamsT1(P, lambdas, data.get("inblock"))


def _params_t2(P: PartitionSpec, data: dict) -> EqualityParamsT2:
    return EqualityParamsT2(P, data.get("inblock"), data.get("traces"))


def cmd_construct_equality(args) -> int:
    P = PartitionSpec(args.n, _parse_partition(args.partition))
    data = _load_json(args.params)
    if not isinstance(data, dict):
        raise FormatError("params file must hold a JSON object")
    if args.theorem == 1:
        h = build_t1(_params_t1(P, data))
    else:
        h = build_t2(_params_t2(P, data))
    print(json.dumps(h.to_json_dict(), indent=2))
    return 0


def cmd_immersion_check(args) -> int:
    a = _load_tensor(args.tensor)
    if args.at is not None:
        x = np.asarray(_load_json(args.at), dtype=float)
    else:
        x = np.zeros(a.n)
    f = potential_from_tensor(a)
    out = {
        "n": a.n,
        "point": x.tolist(),
        "roundtrip_error": lemma1_roundtrip(a, x),
        "lagrangian_defect": lagrangian_check(f, x),
    }
    if args.fd_crosscheck:
        exact = second_fundamental_form_numeric(f, x, fd=False)
        fd = second_fundamental_form_numeric(f, x, fd=True)
        out["fd_crosscheck"] = {
            "roundtrip_error": lemma1_roundtrip(a, x, fd=True),
            "max_difference_vs_exact": float(np.max(np.abs(exact - fd))),
        }
    print(json.dumps(out, indent=2))
    return 0


def cmd_sample(args) -> int:
    data = _load_json(args.config)
    if "seed" not in data:
        data["seed"] = _default_seed()
    config = CampaignConfig.from_json_dict(data)
    summary = CampaignSummary()
    text = campaign_csv(run_campaign(config), summary)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(json.dumps(summary.to_json_dict()), file=sys.stderr)
    return 1 if summary.min_gap < -GAP_TOL else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deltainv",
        description=(
            "Delta-invariants of pointwise Lagrangian data, optimal curvature "
            "bounds, proof-machinery matrices and gradient-graph immersions."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("delta", help="delta estimate for a tensor file")
    p.add_argument("tensor", help="tensor JSON file")
    p.add_argument("--partition", required=True, help="block sizes, e.g. 2,3")
    p.add_argument("--c", type=float, default=0.0)
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("verify", help="inequality report for a tensor file")
    p.add_argument("tensor")
    p.add_argument("--partition", required=True)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("matrix", help="quadratic-form matrices and thresholds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--C", required=True, help="coefficient, e.g. 1/6 or 0.25")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("construct-equality", help="emit an equality witness")
    p.add_argument("--theorem", type=int, choices=(1, 2), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--params", required=True, help="JSON parameter file")
    p.set_defaults(func=cmd_construct_equality)

    p = sub.add_parser("immersion-check", help="gradient-graph round trip")
    p.add_argument("--tensor", required=True)
    p.add_argument("--at", default=None, help="JSON file with the base point")
    p.add_argument("--fd-crosscheck", action="store_true")
    p.set_defaults(func=cmd_immersion_check)

    p = sub.add_parser("sample", help="randomized verification campaign")
    p.add_argument("--config", required=True, help="campaign config JSON")
    p.add_argument("--out", default=None, help="CSV output file (default stdout)")
    p.set_defaults(func=cmd_sample)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DeltainvError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(payload), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
