#!/usr/bin/env python3
"""Survey how often n transfer steps collapse a rule onto a dictatorship.

Runs the collapse check over a seeded population under the impartial-culture
distribution, then over cylinder rules under the lifted near-unanimous
distribution, where exact non-dictatorial fixpoints appear.
"""

import argparse
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from arrowlab.dynamics import check_collapse_conjecture
from arrowlab.measures import lift_distribution, star_distribution, uniform_distribution
from arrowlab.orders import enumerate_orders
from arrowlab.rules import cylinder_extend, pairwise_majority_rule, random_pareto_rule


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--voters", type=int, default=2)
    parser.add_argument("--candidates", type=int, default=3)
    parser.add_argument("--samples", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--epsilon", type=Fraction, default=Fraction(1, 2))
    args = parser.parse_args()

    mu = uniform_distribution(args.voters, args.candidates)
    rules = [
        random_pareto_rule(args.voters, args.candidates, args.seed + i)
        for i in range(args.samples)
    ]
    tally = check_collapse_conjecture(mu, rules)
    print(f"impartial culture ({args.voters} voters, {args.candidates} candidates, "
          f"{args.samples} rules): {tally.passed_count} collapsed, {tally.failed_count} did not")

    base_voters = max(args.voters, 3) - 1
    y = enumerate_orders(args.candidates)[0]
    lifted = lift_distribution(
        star_distribution(base_voters, args.candidates, args.epsilon, y), base_voters
    )
    witnesses = [cylinder_extend(pairwise_majority_rule(base_voters, args.candidates))]
    witnesses += [
        cylinder_extend(random_pareto_rule(base_voters, args.candidates, args.seed + i))
        for i in range(5)
    ]
    report = check_collapse_conjecture(lifted, witnesses)
    print(f"lifted near-unanimous ({base_voters + 1} voters): "
          f"{report.failed_count}/{len(report.entries)} cylinder rules are "
          f"transfer-fixed without being dictatorships")
    for entry in report.entries:
        if not entry.passed:
            print(f"  witness {entry.rule_digest[:16]}: fixed={entry.iterate_equals_rule}, "
                  f"dictatorship={entry.iterate_is_dictatorship}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
