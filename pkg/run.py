"""
CLI entry point for the qcurve verifier.

Usage:
    python run.py lemmas --lmax 200
    python run.py frey --a 1 --b 2 --d 3
    python run.py conductor
    python run.py quer
    python run.py weil --strict
    python run.py newforms-validate --dataset forms.json
    python run.py theorem --d 2 --dataset forms.json --format json
    python run.py search --d 2 --p 17 --height 200
    python run.py eligible --d 3 --x 1000000
"""

from __future__ import annotations

import argparse
import logging
import random
import sys
from math import gcd
from typing import Optional, Sequence

from core.config import ConfigError, RunConfig, load_config
from core.descent import SolutionInputError, classify_solution, lemma_scan, search_solutions, verify_phi_identities
from core.eliminate import (
    INNER_TWIST_A3,
    RELEVANT_LEVELS,
    EliminationError,
    assemble_theorem,
    eligible_primes,
    eliminate_form,
    frey_trace_at_P3,
    hecke_trace_81,
    hecke_trace_oracle_check,
    s3_parity_violations,
    twist_and_match,
)
from core.elliptic import (
    DegenerateCurveError,
    discriminant_check,
    frey_twist,
    reduction_at_P3,
    twist_scaling_check,
    twisted_trace_check,
    verify_isogeny,
)
from core.fields import THETA, I
from core.galois import (
    chi8,
    cocycle_table_check,
    embedding_verify,
    epsilon_checks,
    gamma_report,
    splitting_map_check,
    sqrt_m2_norm_check,
)
from core.localization import P3
from core.newforms import (
    DatasetCountError,
    DatasetSchemaError,
    NewformClass,
    check_record,
    classify_newform,
    load_newforms,
    read_newforms,
    summarize,
)
from core.report_generator import DISCREPANCY, FAIL, INCONCLUSIVE, Report, emit_report, write_report
from core.tate import conductor_profile, twist2_conductor_at_2
from core.weil import (
    CONDUCTOR_TABLE,
    SERRE_LEVELS,
    CaseLabelError,
    all_row_diagnostics,
    milne_check,
    serre_parameters,
    twisted_serre_level,
)

logger = logging.getLogger("qcurve.run")

WITNESS_PAIRS = ((1, 1, 2), (3, 5, 2), (1, -1, 2), (1, 2, 3))
INPUT_ERRORS = (
    ConfigError, SolutionInputError, CaseLabelError, DatasetSchemaError,
    DegenerateCurveError, FileNotFoundError, ValueError,
)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------
def cmd_lemmas(args, config: RunConfig) -> Report:
    report = Report("lemmas")
    identities = verify_phi_identities(args.height)
    report.add("descent.identities", identities.ok, identities.to_dict())
    scan = lemma_scan(args.lmax)
    report.add("descent.residue_lemmas", scan.ok, scan.to_dict())
    return report


def cmd_frey(args, config: RunConfig) -> Report:
    a, b, d = args.a, args.b, args.d
    report = Report("frey")
    case = classify_solution(a, b, d, trial_limit=config.trial_limit)
    report.add("descent.classification", True, case.to_dict())

    disc = discriminant_check(a, b)
    report.add("frey.discriminant", disc.ok, disc.to_dict())
    scaling = twist_scaling_check(a, b)
    report.add("frey.twist_scaling", scaling.ok, scaling.to_dict())

    profile = conductor_profile(a, b, d, trial_limit=config.trial_limit)
    details = {k: v for k, v in profile.to_dict().items() if k != "local"}
    report.add("frey.conductor", (profile.exponents["P2"], profile.exponents["P5"]) in profile.expected, details)
    report.add("frey.multiplicative", profile.multiplicative_ok,
               {"primes": list(profile.multiplicative), "unverified_tail": list(profile.unverified_tail)},
               otherwise=INCONCLUSIVE if profile.unverified_tail else FAIL)

    if case.nu2 == 1:
        twist2 = twist2_conductor_at_2(a, b)
        report.add("frey.twist2_conductor", twist2.in_expected, {"exponent": twist2.exponent})

    if (a + b) % 3 == 0:
        trace = frey_trace_at_P3(a, b)
        report.add("frey.trace_p3", trace == -18, {"a_P3": trace, "expected": -18})
        reduced = reduction_at_P3(a, b)
        reference = reduction_at_P3(1, -1)
        report.add("frey.reduction_p3", reduced.ainvs == reference.ainvs,
                   {"curve": reduced.to_dict(), "reference": reference.to_dict()})
        sign = twisted_trace_check(frey_twist(a, b), P3, THETA)
        report.add("frey.twist_trace_sign", sign.ok, sign.to_dict())
    return report


def cmd_isogeny(args, config: RunConfig) -> Report:
    report = Report("isogeny")
    if args.a is not None and args.b is not None:
        pairs = [(args.a, args.b)]
    else:
        rng = random.Random(args.seed)
        pairs = []
        while len(pairs) < args.samples:
            a, b = rng.randint(-50, 50), rng.randint(-50, 50)
            if (a, b) != (0, 0) and gcd(a, b) == 1:
                pairs.append((a, b))
    for a, b in pairs:
        check = verify_isogeny(a, b)
        report.add("isogeny.mu", check.ok, check.to_dict())
    return report


def cmd_conductor(args, config: RunConfig) -> Report:
    report = Report("conductor")
    if args.a is not None and args.b is not None:
        witnesses = [(args.a, args.b, args.d)]
    else:
        witnesses = list(WITNESS_PAIRS)
    for a, b, d in witnesses:
        profile = conductor_profile(a, b, d, trial_limit=config.trial_limit)
        details = {k: v for k, v in profile.to_dict().items() if k != "local"}
        report.add("frey.conductor", (profile.exponents["P2"], profile.exponents["P5"]) in profile.expected, details)
        if profile.case.nu2 == 1:
            twist2 = twist2_conductor_at_2(a, b)
            report.add("frey.twist2_conductor", twist2.in_expected, {"a": a, "b": b, "exponent": twist2.exponent})
    return report


def cmd_quer(args, config: RunConfig) -> Report:
    report = Report("quer")
    eps = epsilon_checks()
    report.add("quer.epsilon", eps.ok, {"character": eps.epsilon.to_dict(),
                                        "checks": [c.to_dict() for c in eps.checks]})
    cocycle = cocycle_table_check()
    report.add("quer.cocycle", cocycle.ok, cocycle.to_dict())
    embedding = embedding_verify()
    report.add("quer.embedding", embedding.ok, embedding.to_dict())
    splitting = splitting_map_check(embedding)
    report.add("quer.splitting", splitting.ok, splitting.to_dict())
    gamma = gamma_report()
    gamma_ok = (gamma.norm == 5 and gamma.matches_frey_twist
                and gamma.valuations["P2"] == 0 and gamma.valuations["P3"] == 0)
    report.add("quer.gamma", gamma_ok, gamma.to_dict())
    norm = sqrt_m2_norm_check()
    report.add("quer.sqrt_m2_norm", norm.ok, norm.to_dict())
    return report


def cmd_weil(args, config: RunConfig) -> Report:
    report = Report("weil")
    for key in CONDUCTOR_TABLE:
        check = milne_check(key)
        report.add("weil.milne", check.ok, check.to_dict())
    levels = sorted({serre_parameters(key).level for key in CONDUCTOR_TABLE}, reverse=True)
    report.add("weil.serre_levels", tuple(levels) == SERRE_LEVELS,
               {"levels": levels, "by_case": {f"{k[0]} nu2={k[1]}": serre_parameters(k).level
                                             for k in CONDUCTOR_TABLE}})
    for diag in all_row_diagnostics():
        report.add("weil.table_row", not diag.discrepancy, diag.to_dict(), otherwise=DISCREPANCY)
    twisted = {e: twisted_serre_level(e) for e in (0, 4)}
    report.add("weil.twisted_level", set(twisted.values()) == {100, 400}, {"by_exponent": twisted})
    return report


def validate_dataset(path) -> Report:
    """Schema, census per level and per-record invariants of a newform document."""
    report = Report("newforms-validate")
    forms = read_newforms(path, check=False)
    report.add("newforms.schema", True, {"forms": len(forms)})
    summary = summarize(forms)
    report.add("newforms.census", not summary.mismatches, summary.to_dict())
    issues = [issue.to_dict() for f in forms for issue in check_record(f)]
    report.add("newforms.invariants", not issues, {"issues": issues[:50], "count": len(issues)})
    parity = s3_parity_violations(forms)
    report.add("newforms.s3_parity", not parity, {"violations": [list(v) for v in parity[:50]]})
    return report


def cmd_newforms_validate(args, config: RunConfig) -> Report:
    return validate_dataset(config.require_dataset())


def cmd_eliminate(args, config: RunConfig) -> Report:
    report = Report("eliminate")
    forms = load_newforms(config.require_dataset())
    for a3, expected in ((2 * I - 2, 14), (I - 1, 2)):
        value = hecke_trace_81(a3)
        report.add("eliminate.hecke_trace", value == expected, {"a3": str(a3), "value": str(value)})
    failures = hecke_trace_oracle_check()
    report.add("eliminate.hecke_trace", not failures, {"oracle_samples": 100, "failures": len(failures)})

    for f in forms:
        if f.level not in RELEVANT_LEVELS[args.d]:
            continue
        if classify_newform(f) is NewformClass.S3 and f.level == 1600:
            match = twist_and_match(f, chi8(), forms)
            report.add("eliminate.twist_match", match.level == 800, match.to_dict())
        result = eliminate_form(f, args.d, forms)
        report.add("eliminate.form", not result.inconclusive, result.to_dict(), otherwise=INCONCLUSIVE)
        if result.method == INNER_TWIST_A3:
            report.add("eliminate.s2_cross_check", result.cross_check_ok,
                       {"newform": f.label, "direct": sorted(result.exceptional),
                        "fourth_power": sorted(result.cross_check or ())})
    return report


def cmd_theorem(args, config: RunConfig) -> Report:
    report = Report("theorem")
    forms = load_newforms(config.require_dataset())
    theorem = assemble_theorem(args.d, forms)
    report.add("theorem.conditions", True, {"d": args.d, "conditions": list(theorem.conditions),
                                            "residues_mod_20": list(theorem.residues_mod_20),
                                            "newforms": len(theorem.results)})
    report.add("theorem.density", True, {"density": float(theorem.density)})
    report.add("theorem.bound", not theorem.bound_discrepancy,
               {"stated": theorem.lower_bound, "derived": theorem.derived_lower_bound},
               otherwise=DISCREPANCY)
    return report


def cmd_search(args, config: RunConfig) -> Report:
    report = Report("search")
    height = args.height or config.search_height
    hits = search_solutions(args.d, args.p, height, include_degenerate=args.include_degenerate)
    nontrivial = [h.to_dict() for h in hits if not h.trivial]
    report.add("search.trivial_only", not nontrivial,
               {"d": args.d, "p": args.p, "height": height, "hits": [[h.a, h.b, h.z] for h in hits],
                "nontrivial": nontrivial})
    return report


def cmd_eligible(args, config: RunConfig) -> Report:
    report = Report("eligible")
    result = eligible_primes(args.d, args.x)
    report.add("eligible.density", result.ok, result.to_dict())
    return report


COMMANDS = {
    "lemmas": cmd_lemmas,
    "frey": cmd_frey,
    "isogeny": cmd_isogeny,
    "conductor": cmd_conductor,
    "quer": cmd_quer,
    "weil": cmd_weil,
    "newforms-validate": cmd_newforms_validate,
    "eliminate": cmd_eliminate,
    "theorem": cmd_theorem,
    "search": cmd_search,
    "eligible": cmd_eligible,
}


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=None, help="Report format (default: text)")
    common.add_argument("--output", default=None, help="Also write the report to this path")
    common.add_argument("--strict", action="store_true", default=None, help="Fail on discrepancy entries")
    common.add_argument("--dataset", default=None, help="Newform dataset (JSON); overrides QCURVE_DATASET")
    common.add_argument("--log-level", default=None, help="Logging level (default: WARNING)")

    parser = argparse.ArgumentParser(description="Exact verification of the modular method for x^5 + y^5 = d z^p")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("lemmas", parents=[common], help="Descent identities and residue lemmas")
    p.add_argument("--lmax", type=int, default=200, help="Largest prime for the residue scan")
    p.add_argument("--height", type=int, default=20, help="Box for the φ identities")

    p = sub.add_parser("frey", parents=[common], help="Frey curve checks for one pair")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--d", type=int, choices=(2, 3), required=True)

    p = sub.add_parser("isogeny", parents=[common], help="Symbolic 2-isogeny checks")
    p.add_argument("--a", type=int, default=None)
    p.add_argument("--b", type=int, default=None)
    p.add_argument("--samples", type=int, default=20, help="Random pairs when --a/--b are absent")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("conductor", parents=[common], help="Tate's algorithm on witness pairs")
    p.add_argument("--a", type=int, default=None)
    p.add_argument("--b", type=int, default=None)
    p.add_argument("--d", type=int, choices=(2, 3), default=2)

    sub.add_parser("quer", parents=[common], help="Character, cocycle and splitting map")
    sub.add_parser("weil", parents=[common], help="Conductor bookkeeping and Serre levels")
    sub.add_parser("newforms-validate", parents=[common], help="Schema, census and invariants of the dataset")

    for name, text in (("eliminate", "Per-newform eliminations"), ("theorem", "Assemble the final statement")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--d", type=int, choices=(2, 3), required=True)

    p = sub.add_parser("search", parents=[common], help="Small-height solution search")
    p.add_argument("--d", type=int, choices=(2, 3), required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--height", type=int, default=None, help="Box size (default: QCURVE_SEARCH_HEIGHT or 200)")
    p.add_argument("--include-degenerate", action="store_true", help="Also visit pairs with a + b = 0")

    p = sub.add_parser("eligible", parents=[common], help="Exponents covered by the final statement")
    p.add_argument("--d", type=int, choices=(2, 3), required=True)
    p.add_argument("--x", type=int, default=10 ** 6)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2

    try:
        config = load_config({
            "dataset": args.dataset,
            "format": args.format,
            "strict": args.strict,
            "log_level": args.log_level,
        })
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    logging.basicConfig(
        level=getattr(logging, config.log_level),
        format="%(asctime)s  %(name)-24s  %(levelname)-8s  %(message)s",
        stream=sys.stderr,
        force=True,
    )

    try:
        report = COMMANDS[args.command](args, config)
    except INPUT_ERRORS as exc:
        logger.error("%s: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DatasetCountError, EliminationError) as exc:
        logger.error("%s: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        return 1

    text = emit_report(report, config.format)
    sys.stdout.write(text)
    if args.output:
        try:
            write_report(report, config.format, args.output)
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return 2
    code = report.exit_code(config.strict)
    logger.info("%s finished with exit code %d (%s)", args.command, code, report.summary)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
