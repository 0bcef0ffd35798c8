"""Voter force and the ballot-transfer dynamics on spaces of voting rules.

The force of a voter is the probability that the election outcome equals that
voter's own ballot.  The transfer map rewrites every least-forceful voter's
ballot with the ballot of the first most-forceful voter before applying the
rule; iterating it drives rules toward dictatorships under many distributions,
and the machinery here makes each step, its force vector, and its fixpoint
status inspectable with exact arithmetic.
"""

from __future__ import annotations

import json
import random
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Literal, Sequence

from .measures import (
    Distribution,
    format_rational,
    has_full_support,
    is_permutation_invariant,
)
from .orders import all_voter_permutations, encode_digits, profile_digit_tuples
from .rules import (
    VotingRule,
    compose_collapse,
    compose_voter_permutation,
    is_dictatorship,
    table_digest,
)

TRACE_FORMAT_VERSION = 1

TieBreak = Literal["min", "max", "random"]


@dataclass(frozen=True)
class ForceProfile:
    """All voters' forces plus the exact argmax and argmin voter sets."""

    forces: tuple[Fraction, ...]
    most_forceful: tuple[int, ...]
    least_forceful: tuple[int, ...]


@dataclass(frozen=True)
class OrbitClass:
    """An equivalence class of rules: a singleton, or the full relabeling
    orbit of a rule with a unique most-forceful voter."""

    members: tuple[VotingRule, ...]

    def __post_init__(self):
        members = tuple(sorted(set(self.members), key=lambda r: r.table))
        object.__setattr__(self, "members", members)
        if not members:
            raise ValueError("an orbit class cannot be empty")

    def __contains__(self, rule: VotingRule) -> bool:
        return rule in self.members


@dataclass(frozen=True)
class IterationTrace:
    """The successive distinct iterates of the transfer map, with their force data."""

    steps: tuple[tuple[VotingRule, ForceProfile], ...]
    terminated_by: Literal["fixpoint", "step-limit"]
    fixpoint_is_dictatorship: bool


@dataclass(frozen=True)
class CollapseEntry:
    rule_digest: str
    passed: bool
    collapse_voter: int | None
    iterate_digest: str
    iterate_is_dictatorship: bool
    iterate_equals_rule: bool


@dataclass(frozen=True)
class CollapseReport:
    """Per-rule outcomes of the n-step collapse check.  Informational only:
    the check records findings and never asserts."""

    n: int
    m: int
    steps: int
    entries: tuple[CollapseEntry, ...]

    @property
    def passed_count(self) -> int:
        return sum(1 for e in self.entries if e.passed)

    @property
    def failed_count(self) -> int:
        return len(self.entries) - self.passed_count


def _check_dims(mu: Distribution, rule: VotingRule) -> None:
    if mu.n != rule.n or mu.m != rule.m:
        raise ValueError(
            f"distribution ({mu.n}, {mu.m}) incompatible with rule ({rule.n}, {rule.m})"
        )


def force(mu: Distribution, rule: VotingRule, i: int) -> Fraction:
    """Probability under ``mu`` that the outcome equals voter i's ballot."""
    _check_dims(mu, rule)
    if not 0 <= i < rule.n:
        raise ValueError(f"voter {i} out of range for n={rule.n}")
    total = Fraction(0)
    for k, digits in enumerate(profile_digit_tuples(rule.n, rule.m)):
        if rule.table[k] == digits[i]:
            total += mu.weights[k]
    return total


def force_profile(mu: Distribution, rule: VotingRule) -> ForceProfile:
    """Forces of all voters in one sweep, with exact argmax/argmin sets."""
    _check_dims(mu, rule)
    totals = [Fraction(0)] * rule.n
    for k, digits in enumerate(profile_digit_tuples(rule.n, rule.m)):
        out = rule.table[k]
        w = mu.weights[k]
        for i in range(rule.n):
            if digits[i] == out:
                totals[i] += w
    top = max(totals)
    bottom = min(totals)
    most = tuple(i for i, v in enumerate(totals) if v == top)
    least = tuple(i for i, v in enumerate(totals) if v == bottom)
    return ForceProfile(tuple(totals), most, least)


def _transfer_source(fp: ForceProfile, tie_break: TieBreak, tie_break_seed: int) -> int:
    if tie_break == "min":
        return min(fp.most_forceful)
    if tie_break == "max":
        return max(fp.most_forceful)
    if tie_break == "random":
        return random.Random(tie_break_seed).choice(fp.most_forceful)
    raise ValueError(f"unknown tie_break {tie_break!r}")


def _transfer_table(
    rule: VotingRule, fp: ForceProfile, tie_break: TieBreak, tie_break_seed: int
) -> tuple[int, ...]:
    source = _transfer_source(fp, tie_break, tie_break_seed)
    least = set(fp.least_forceful)
    table = []
    for digits in profile_digit_tuples(rule.n, rule.m):
        rewritten = tuple(
            digits[source] if i in least else digits[i] for i in range(rule.n)
        )
        table.append(rule.table[encode_digits(rewritten, rule.m)])
    return tuple(table)


def force_transfer(
    mu: Distribution,
    rule: VotingRule,
    tie_break: TieBreak = "min",
    tie_break_seed: int = 0,
) -> VotingRule:
    """One application of the transfer map: every least-forceful voter's ballot
    is replaced by the ballot of the tie-break choice among the most forceful
    (lowest index by default), and the rule is evaluated on the rewritten profile.

    Requires a full-support distribution.  Preserves the unanimity property:
    rewriting ballots with another ballot of the same profile cannot create a
    new unanimous comparison that the original profile lacked.
    """
    _check_dims(mu, rule)
    if not has_full_support(mu):
        raise ValueError("the transfer map requires a full-support distribution")
    fp = force_profile(mu, rule)
    return VotingRule(rule.n, rule.m, _transfer_table(rule, fp, tie_break, tie_break_seed))


def equivalent(mu: Distribution, f: VotingRule, g: VotingRule) -> bool:
    """Rules are equivalent when equal, or when one is a voter relabeling of
    the other and has a unique most-forceful voter.

    The relabeling case is only sound when ``mu`` is permutation-invariant;
    exercising it under a non-invariant distribution raises a warning.
    """
    if not has_full_support(mu):
        raise ValueError("equivalence is defined relative to a full-support distribution")
    if f == g:
        return True
    if f.n != g.n or f.m != g.m:
        return False
    for perm in all_voter_permutations(f.n):
        if f == compose_voter_permutation(g, perm):
            if len(force_profile(mu, f).most_forceful) == 1:
                if not is_permutation_invariant(mu):
                    warnings.warn(
                        "relabeling equivalence used under a distribution that is "
                        "not permutation-invariant; the force structure need not transfer",
                        RuntimeWarning,
                        stacklevel=2,
                    )
                return True
            return False
    return False


def orbit_class(mu: Distribution, rule: VotingRule) -> OrbitClass:
    """The equivalence class of a rule: its full relabeling orbit when its
    most-forceful voter is unique, else the singleton."""
    if not has_full_support(mu):
        raise ValueError("orbit classes are defined relative to a full-support distribution")
    fp = force_profile(mu, rule)
    if len(fp.most_forceful) != 1:
        return OrbitClass((rule,))
    members = {compose_voter_permutation(rule, perm) for perm in all_voter_permutations(rule.n)}
    return OrbitClass(tuple(members))


def force_transfer_class(
    mu: Distribution, cls: OrbitClass, verify_representatives: bool = False
) -> OrbitClass:
    """The transfer map on equivalence classes, computed from the canonical
    representative.

    Requires a permutation-invariant full-support distribution; that is what
    makes the class of the image independent of the representative.  The
    optional diagnostic recomputes the image from every member and insists the
    classes agree.
    """
    if not has_full_support(mu):
        raise ValueError("the transfer map requires a full-support distribution")
    if not is_permutation_invariant(mu):
        raise ValueError(
            "the class-level transfer map requires a permutation-invariant distribution"
        )
    image = orbit_class(mu, force_transfer(mu, cls.members[0]))
    if verify_representatives:
        for member in cls.members[1:]:
            other = orbit_class(mu, force_transfer(mu, member))
            if other != image:
                raise RuntimeError(
                    "transfer map image depends on the representative; "
                    f"{table_digest(cls.members[0])} vs {table_digest(member)}"
                )
    return image


def iterate_force_transfer(
    mu: Distribution,
    rule: VotingRule,
    max_steps: int,
    tie_break: TieBreak = "min",
    tie_break_seed: int = 0,
) -> IterationTrace:
    """Apply the transfer map until the newly computed rule equals the current
    one (a fixpoint) or ``max_steps`` applications have been spent.

    The trace stores the distinct iterates only; on fixpoint termination the
    next computed rule equaled the last stored one.
    """
    _check_dims(mu, rule)
    if not has_full_support(mu):
        raise ValueError("the transfer map requires a full-support distribution")
    if max_steps < 0:
        raise ValueError("max_steps must be nonnegative")
    steps = [(rule, force_profile(mu, rule))]
    terminated: Literal["fixpoint", "step-limit"] = "step-limit"
    current = rule
    for _ in range(max_steps):
        fp = steps[-1][1]
        nxt = VotingRule(
            current.n, current.m, _transfer_table(current, fp, tie_break, tie_break_seed)
        )
        if nxt == current:
            terminated = "fixpoint"
            break
        steps.append((nxt, force_profile(mu, nxt)))
        current = nxt
    is_dict = terminated == "fixpoint" and is_dictatorship(steps[-1][0]) is not None
    return IterationTrace(tuple(steps), terminated, is_dict)


def check_collapse_conjecture(
    mu: Distribution, rules: Sequence[VotingRule], jobs: int = 1
) -> CollapseReport:
    """For each rule, test whether n transfer steps land on the rule composed
    with some voter's self-collapse (equivalently, on a dictatorship for
    unanimity-respecting rules).

    This is a reporting operation: some distributions fix non-dictatorial
    rules exactly, so outcomes are findings, not assertions.
    """
    if not has_full_support(mu):
        raise ValueError("the transfer map requires a full-support distribution")
    if not is_permutation_invariant(mu):
        raise ValueError("the collapse check requires a permutation-invariant distribution")
    rules = tuple(rules)
    if jobs > 1 and len(rules) > 1:
        import multiprocessing

        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=jobs) as pool:
            entries = pool.starmap(_collapse_entry, [(mu, r) for r in rules])
    else:
        entries = [_collapse_entry(mu, r) for r in rules]
    return CollapseReport(mu.n, mu.m, mu.n, tuple(entries))


def _collapse_entry(mu: Distribution, rule: VotingRule) -> CollapseEntry:
    iterate = rule
    for _ in range(rule.n):
        iterate = force_transfer(mu, iterate)
    collapse_voter = None
    for i in range(rule.n):
        if iterate == compose_collapse(rule, i):
            collapse_voter = i
            break
    return CollapseEntry(
        rule_digest=table_digest(rule),
        passed=collapse_voter is not None,
        collapse_voter=collapse_voter,
        iterate_digest=table_digest(iterate),
        iterate_is_dictatorship=is_dictatorship(iterate) is not None,
        iterate_equals_rule=iterate == rule,
    )


def write_trace(trace: IterationTrace, path: str | Path, config: dict | None = None) -> None:
    """Write a trace as line-delimited JSON: a header record carrying the
    format version and resolved configuration, one record per step with the
    rule's table digest and force data, and a footer with the termination
    status."""
    lines = [
        json.dumps(
            {"format_version": TRACE_FORMAT_VERSION, "config": config or {}},
            sort_keys=True,
        )
    ]
    for step, (rule, fp) in enumerate(trace.steps):
        lines.append(
            json.dumps(
                {
                    "step": step,
                    "rule_table_digest": table_digest(rule),
                    "forces": [format_rational(v) for v in fp.forces],
                    "most_forceful": list(fp.most_forceful),
                    "least_forceful": list(fp.least_forceful),
                },
                sort_keys=True,
            )
        )
    lines.append(
        json.dumps(
            {
                "terminated_by": trace.terminated_by,
                "fixpoint_is_dictatorship": trace.fixpoint_is_dictatorship,
                "steps": len(trace.steps),
            },
            sort_keys=True,
        )
    )
    Path(path).write_text("\n".join(lines) + "\n")
