"""Batch command-line front door: exhaustive theorem scans, transfer-map
iterations with trace files, and the seeded property suites.

Exit codes: 0 success, 2 precondition or usage error, 3 iteration stopped at
the step limit, 4 an asserted suite failed.  Report and trace files are byte
deterministic for a fixed semantic configuration: worker count and output
locations never appear in them, and timing goes to stderr only.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from math import factorial
from pathlib import Path

from .arrowcheck import verify_arrow
from .dynamics import (
    check_collapse_conjecture,
    force,
    force_profile,
    force_transfer_class,
    iterate_force_transfer,
    orbit_class,
    write_trace,
)
from .measures import (
    Distribution,
    format_rational,
    has_full_support,
    is_permutation_invariant,
    lift_distribution,
    star_distribution,
    uniform_distribution,
)
from .orders import enumerate_orders, all_voter_permutations
from .quotient import check_metric_axioms, rule_distance, space_from_rules
from .rules import (
    compose_voter_permutation,
    cylinder_extend,
    load_rule,
    pairwise_majority_rule,
    random_pareto_rule,
    save_rule,
    table_digest,
)

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_STEP_LIMIT = 3
EXIT_SUITE_FAILURE = 4

REPORT_FORMAT_VERSION = 1

SUITE_NAMES = ("metric", "isometry", "relabel", "welldef", "cylinder", "collapse")
ASSERTED_SUITES = frozenset(SUITE_NAMES) - {"collapse"}
DEFAULT_SAMPLES = {
    "metric": 50,
    "isometry": 200,
    "relabel": 200,
    "welldef": 100,
    "cylinder": 200,
    "collapse": 1000,
}


def _canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _resolve_distribution(
    name: str, n: int, m: int, epsilon: Fraction, y_index: int
) -> Distribution:
    orders = enumerate_orders(m)
    if not 0 <= y_index < len(orders):
        raise ValueError(f"--y-index {y_index} out of range for m={m}")
    y = orders[y_index]
    if name == "uniform":
        return uniform_distribution(n, m)
    if name == "star":
        return star_distribution(n, m, epsilon, y)
    if name == "lift-star":
        if n < 2:
            raise ValueError("lift-star needs at least two voters")
        return lift_distribution(star_distribution(n - 1, m, epsilon, y), n - 1)
    raise ValueError(f"unknown distribution spec {name!r}")


def _write_output(payload: dict, out_dir: Path | None, filename: str) -> None:
    text = _canonical_json(payload)
    sys.stdout.write(text)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / filename).write_text(text)


def _cmd_verify_arrow(args: argparse.Namespace) -> int:
    started = time.monotonic()
    report = verify_arrow(args.voters, args.candidates, jobs=args.jobs)
    elapsed = time.monotonic() - started
    rules_found = [
        {
            "candidate_index": index,
            "rule_table_digest": table_digest(rule),
            "dictator_voter": voter,
            "file": f"rule_{index:06d}.json",
        }
        for (index, rule), voter in zip(report.found, report.dictators)
    ]
    payload = {
        "format_version": REPORT_FORMAT_VERSION,
        "config": {
            "command": "verify-arrow",
            "voters": args.voters,
            "candidates": args.candidates,
        },
        "n": report.n,
        "m": report.m,
        "candidates_scanned": report.candidates_scanned,
        "rules_found": rules_found,
        "rules_found_count": len(rules_found),
        "all_dictators": report.all_dictators,
    }
    _write_output(payload, args.out, "verify_arrow_report.json")
    if args.out is not None:
        for index, rule in report.found:
            save_rule(rule, args.out / f"rule_{index:06d}.json")
    print(f"verify-arrow: scanned {report.candidates_scanned} in {elapsed:.2f}s", file=sys.stderr)
    if not report.all_dictators:
        print("verify-arrow: found a non-dictatorial survivor", file=sys.stderr)
        return EXIT_SUITE_FAILURE
    return EXIT_OK


def _cmd_iterate(args: argparse.Namespace) -> int:
    rule = load_rule(args.rule)
    mu = _resolve_distribution(args.dist, rule.n, rule.m, args.epsilon, args.y_index)
    trace = iterate_force_transfer(mu, rule, args.max_steps)
    config = {
        "command": "iterate",
        "voters": rule.n,
        "candidates": rule.m,
        "dist": args.dist,
        "epsilon": format_rational(args.epsilon),
        "y_index": args.y_index,
        "max_steps": args.max_steps,
        "rule_table_digest": table_digest(rule),
    }
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        write_trace(trace, args.out / "trace.jsonl", config)
    summary = {
        "terminated_by": trace.terminated_by,
        "steps": len(trace.steps),
        "fixpoint_is_dictatorship": trace.fixpoint_is_dictatorship,
    }
    sys.stdout.write(_canonical_json({"format_version": REPORT_FORMAT_VERSION, "config": config, **summary}))
    return EXIT_OK if trace.terminated_by == "fixpoint" else EXIT_STEP_LIMIT


def _sample_count(args: argparse.Namespace, suite: str) -> int:
    return args.samples if args.samples is not None else DEFAULT_SAMPLES[suite]


def _suite_metric(args: argparse.Namespace, mu: Distribution) -> dict:
    count = _sample_count(args, "metric")
    rules = [random_pareto_rule(args.voters, args.candidates, args.seed + i) for i in range(count)]
    report = check_metric_axioms(space_from_rules(mu, rules))
    return {
        "passed": report.ok,
        "points": len(rules),
        "violation": report.violation,
        "witness": list(report.witness),
    }


def _suite_isometry(args: argparse.Namespace, mu: Distribution) -> dict:
    count = _sample_count(args, "isometry")
    rules = [random_pareto_rule(args.voters, args.candidates, args.seed + i) for i in range(count)]
    perms = all_voter_permutations(args.voters)
    checked = 0
    for f, g in zip(rules[0::2], rules[1::2]):
        base = rule_distance(mu, f, g)
        for perm in perms:
            relabeled = rule_distance(
                mu, compose_voter_permutation(f, perm), compose_voter_permutation(g, perm)
            )
            if relabeled != base:
                return {"passed": False, "pairs_checked": checked}
            checked += 1
    return {"passed": True, "pairs_checked": checked}


def _suite_relabel(args: argparse.Namespace, mu: Distribution) -> dict:
    count = _sample_count(args, "relabel")
    rules = [random_pareto_rule(args.voters, args.candidates, args.seed + i) for i in range(count)]
    perms = all_voter_permutations(args.voters)
    checked = 0
    for g in rules:
        for perm in perms:
            f = compose_voter_permutation(g, perm)
            for i in range(args.voters):
                if force(mu, g, i) != force(mu, f, perm.mapping[i]):
                    return {"passed": False, "relabelings_checked": checked}
            checked += 1
    return {"passed": True, "relabelings_checked": checked}


def _suite_welldef(args: argparse.Namespace, mu: Distribution) -> dict:
    count = _sample_count(args, "welldef")
    orbits_checked = 0
    for i in range(count):
        rule = random_pareto_rule(args.voters, args.candidates, args.seed + i)
        cls = orbit_class(mu, rule)
        try:
            force_transfer_class(mu, cls, verify_representatives=True)
        except RuntimeError:
            return {"passed": False, "orbits_checked": orbits_checked}
        for member in cls.members:
            if orbit_class(mu, member) != cls:
                return {"passed": False, "orbits_checked": orbits_checked}
        orbits_checked += 1
    return {"passed": True, "orbits_checked": orbits_checked}


def _suite_cylinder(args: argparse.Namespace, _mu: Distribution) -> dict:
    if args.voters < 2:
        raise ValueError("the cylinder suite needs at least two voters")
    count = _sample_count(args, "cylinder")
    n, m = args.voters, args.candidates
    k = n - 1
    y = enumerate_orders(m)[args.y_index]
    bound = Fraction(2, n * factorial(m))
    details: dict = {"passed": True, "bound": format_rational(bound), "base_distributions": {}}
    for label, nu in (
        ("uniform", uniform_distribution(k, m)),
        ("star", star_distribution(k, m, args.epsilon, y)),
    ):
        lifted = lift_distribution(nu, k)
        part = {
            "full_support": has_full_support(lifted),
            "permutation_invariant": is_permutation_invariant(lifted),
            "rules_checked": 0,
        }
        ok = part["full_support"] and part["permutation_invariant"]
        for i in range(count):
            g = random_pareto_rule(k, m, args.seed + i)
            fp = force_profile(lifted, cylinder_extend(g))
            if fp.forces[n - 1] > bound:
                ok = False
                break
            if any(fp.forces[j] < force(nu, g, j) / n for j in range(k)):
                ok = False
                break
            part["rules_checked"] += 1
        part["passed"] = ok
        details["base_distributions"][label] = part
        details["passed"] = details["passed"] and ok
    return details


def _suite_collapse(args: argparse.Namespace, _mu: Distribution) -> dict:
    n, m = args.voters, args.candidates
    count = _sample_count(args, "collapse")
    mu = uniform_distribution(n, m)
    rules = [random_pareto_rule(n, m, args.seed + i) for i in range(count)]
    tally = check_collapse_conjecture(mu, rules, jobs=args.jobs)

    # Witness part: cylinder rules need a non-dictatorial base, so it runs at
    # the smallest electorate with one (three voters) regardless of --voters.
    nw = max(n, 3)
    y = enumerate_orders(m)[args.y_index]
    lifted = lift_distribution(star_distribution(nw - 1, m, args.epsilon, y), nw - 1)
    witness_rules = [cylinder_extend(pairwise_majority_rule(nw - 1, m))]
    witness_rules += [
        cylinder_extend(random_pareto_rule(nw - 1, m, args.seed + i)) for i in range(3)
    ]
    witness_report = check_collapse_conjecture(lifted, witness_rules, jobs=args.jobs)
    witnesses = [
        {
            "rule_table_digest": e.rule_digest,
            "iterate_equals_rule": e.iterate_equals_rule,
            "iterate_is_dictatorship": e.iterate_is_dictatorship,
        }
        for e in witness_report.entries
        if not e.passed
    ]
    return {
        "passed": True,
        "asserted": False,
        "uniform": {
            "rules_checked": len(tally.entries),
            "passed_count": tally.passed_count,
            "failed_count": tally.failed_count,
        },
        "lifted_star": {
            "voters": nw,
            "rules_checked": len(witness_report.entries),
            "failed_count": witness_report.failed_count,
            "witnesses": witnesses,
        },
    }


_SUITE_RUNNERS = {
    "metric": _suite_metric,
    "isometry": _suite_isometry,
    "relabel": _suite_relabel,
    "welldef": _suite_welldef,
    "cylinder": _suite_cylinder,
    "collapse": _suite_collapse,
}


def _cmd_check(args: argparse.Namespace) -> int:
    started = time.monotonic()
    names = SUITE_NAMES if args.suite == "all" else (args.suite,)
    mu = _resolve_distribution(
        args.dist, args.voters, args.candidates, args.epsilon, args.y_index
    )
    results = {}
    for name in names:
        outcome = _SUITE_RUNNERS[name](args, mu)
        outcome.setdefault("asserted", name in ASSERTED_SUITES)
        results[name] = outcome
    all_passed = all(r["passed"] for name, r in results.items() if name in ASSERTED_SUITES)
    payload = {
        "format_version": REPORT_FORMAT_VERSION,
        "config": {
            "command": "check",
            "suite": args.suite,
            "voters": args.voters,
            "candidates": args.candidates,
            "dist": args.dist,
            "epsilon": format_rational(args.epsilon),
            "y_index": args.y_index,
            "seed": args.seed,
            "samples": args.samples,
        },
        "suites": results,
        "all_passed": all_passed,
    }
    _write_output(payload, args.out, "check_report.json")
    print(f"check: {', '.join(names)} in {time.monotonic() - started:.2f}s", file=sys.stderr)
    return EXIT_OK if all_passed else EXIT_SUITE_FAILURE


def _add_common(parser: argparse.ArgumentParser, *, voters: bool = True) -> None:
    if voters:
        parser.add_argument("--voters", type=int, default=2, help="electorate size n")
        parser.add_argument("--candidates", type=int, default=3, help="candidate count m")
    parser.add_argument(
        "--dist",
        choices=("uniform", "star", "lift-star"),
        default="uniform",
        help="profile distribution",
    )
    parser.add_argument(
        "--epsilon",
        type=Fraction,
        default=Fraction(1, 2),
        help="near-unanimous spread mass as p/q (star and lift-star)",
    )
    parser.add_argument(
        "--y-index", type=int, default=0, help="canonical index of the favored ranking"
    )
    parser.add_argument("--seed", type=int, default=0, help="base seed for rule populations")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes")
    parser.add_argument("--out", type=Path, default=None, help="directory for report files")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arrowlab",
        description="Exact laboratory for voting-rule dynamics and Arrow-theorem checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser(
        "verify-arrow",
        help="enumerate all unanimity+independence rules and check they are dictatorships",
    )
    p_verify.add_argument("--voters", type=int, required=True)
    p_verify.add_argument("--candidates", type=int, required=True)
    p_verify.add_argument("--jobs", type=int, default=1)
    p_verify.add_argument("--out", type=Path, default=None)
    p_verify.set_defaults(handler=_cmd_verify_arrow)

    p_iter = sub.add_parser("iterate", help="iterate the ballot-transfer map on a rule file")
    p_iter.add_argument("--rule", type=Path, required=True, help="rule file to iterate")
    p_iter.add_argument("--max-steps", type=int, default=64)
    _add_common(p_iter, voters=False)
    p_iter.set_defaults(handler=_cmd_iterate)

    p_check = sub.add_parser("check", help="run the seeded property suites")
    p_check.add_argument("--suite", choices=SUITE_NAMES + ("all",), default="all")
    p_check.add_argument(
        "--samples", type=int, default=None, help="override the per-suite population size"
    )
    _add_common(p_check)
    p_check.set_defaults(handler=_cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
