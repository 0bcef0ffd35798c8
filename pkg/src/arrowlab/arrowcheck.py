"""Brute-force verification of Arrow's impossibility theorem at desk scale.

Any rule satisfying independence of irrelevant alternatives decomposes into
one Boolean aggregator per candidate pair, mapping the voters' pairwise
comparisons to the societal comparison; unanimity pins the all-agree rows.
Enumerating every pinned aggregator combination and keeping the combinations
whose per-profile tournament is acyclic therefore enumerates exactly the
rules that satisfy both unanimity and independence.  Arrow's theorem predicts
that only the n dictatorships survive.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .dynamics import force, force_profile, force_transfer
from .measures import (
    has_full_support,
    is_permutation_invariant,
    lift_distribution,
    star_distribution,
)
from .orders import LinearOrder, check_scale, order_index, profile_digit_tuples
from .rules import (
    VotingRule,
    cylinder_extend,
    is_dictatorship,
    is_pareto,
    table_digest,
    _prefers_matrix,
)

MAX_CANDIDATE_COMBINATIONS = 20_000_000


def candidate_pairs(m: int) -> tuple[tuple[int, int], ...]:
    """Unordered candidate pairs in lexicographic order; the pair axis of every aggregator."""
    return tuple((a, b) for a in range(m) for b in range(a + 1, m))


@dataclass(frozen=True)
class PairwiseAggregator:
    """One Boolean function per candidate pair, from the n voters' pairwise
    comparisons (bit i = voter i prefers the pair's first candidate) to the
    societal comparison.  The all-true and all-false input rows are pinned to
    true and false respectively."""

    n: int
    m: int
    tables: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "tables", tuple(self.tables))
        if len(self.tables) != comb(self.m, 2):
            raise ValueError(
                f"{len(self.tables)} pair tables, expected {comb(self.m, 2)} for m={self.m}"
            )
        rows = 1 << self.n
        for t in self.tables:
            if not 0 <= t < (1 << rows):
                raise ValueError(f"truth table {t} out of range for n={self.n}")
            if t & 1:
                raise ValueError("all-false input row must output false")
            if not (t >> (rows - 1)) & 1:
                raise ValueError("all-true input row must output true")

    def output(self, pair_idx: int, row: int) -> bool:
        return bool((self.tables[pair_idx] >> row) & 1)


def free_bits_per_pair(n: int) -> int:
    return (1 << n) - 2


def candidates_total(n: int, m: int) -> int:
    return (1 << free_bits_per_pair(n)) ** comb(m, 2)


def _table_from_free(free: int, n: int) -> int:
    """Expand a free-bit integer into a full truth table with pinned rows.

    Free rows are the inputs 1 .. 2^n - 2 in increasing order; bit r-1 of
    ``free`` is the output at row r.
    """
    rows = 1 << n
    table = 1 << (rows - 1)
    for r in range(1, rows - 1):
        if (free >> (r - 1)) & 1:
            table |= 1 << r
    return table


def aggregator_from_candidate_index(index: int, n: int, m: int) -> PairwiseAggregator:
    """Decode the lexicographic enumeration counter (pair 0 most significant,
    free truth-table bits within each pair)."""
    pair_count = comb(m, 2)
    per_pair = 1 << free_bits_per_pair(n)
    if not 0 <= index < per_pair**pair_count:
        raise ValueError(f"candidate index {index} out of range for (n={n}, m={m})")
    digits = []
    for _ in range(pair_count):
        index, d = divmod(index, per_pair)
        digits.append(d)
    digits.reverse()
    return PairwiseAggregator(n, m, tuple(_table_from_free(d, n) for d in digits))


def projection_aggregator(n: int, m: int, voter: int) -> PairwiseAggregator:
    """The aggregator that copies one voter's comparison on every pair."""
    if not 0 <= voter < n:
        raise ValueError(f"voter {voter} out of range for n={n}")
    rows = 1 << n
    table = 0
    for r in range(rows):
        if (r >> voter) & 1:
            table |= 1 << r
    return PairwiseAggregator(n, m, (table,) * comb(m, 2))


@lru_cache(maxsize=None)
def _pair_rows(n: int, m: int) -> tuple[tuple[int, ...], ...]:
    """rows[pair_idx][profile_idx]: packed voter comparisons for that pair."""
    pref = _prefers_matrix(m)
    pairs = candidate_pairs(m)
    digit_tuples = profile_digit_tuples(n, m)
    out = []
    for a, b in pairs:
        row_list = []
        for digits in digit_tuples:
            row = 0
            for i, d in enumerate(digits):
                if pref[d][a][b]:
                    row |= 1 << i
            row_list.append(row)
        out.append(tuple(row_list))
    return tuple(out)


@lru_cache(maxsize=None)
def _disagreement_scan_order(n: int, m: int) -> tuple[int, ...]:
    """Profile indices ordered so contentious profiles come first; cyclic
    combinations then fail after scanning only a handful of profiles."""
    rows = _pair_rows(n, m)
    full = (1 << n) - 1

    def contention(k: int) -> int:
        return sum(1 for pair_rows in rows if pair_rows[k] not in (0, full))

    count = factorial(m) ** n
    return tuple(sorted(range(count), key=lambda k: (-contention(k), k)))


def _order_from_outcomes(bits: tuple[bool, ...], m: int) -> LinearOrder | None:
    """Turn per-pair outcomes into a ranking, or None when the tournament cycles.

    A tournament is transitive exactly when its out-degrees are all distinct,
    in which case sorting by descending out-degree is the ranking.
    """
    outdeg = [0] * m
    for (a, b), first_wins in zip(candidate_pairs(m), bits):
        if first_wins:
            outdeg[a] += 1
        else:
            outdeg[b] += 1
    if sorted(outdeg) != list(range(m)):
        return None
    return LinearOrder(tuple(sorted(range(m), key=lambda c: -outdeg[c])))


def assemble_rule(agg: PairwiseAggregator, n: int, m: int) -> VotingRule | None:
    """Evaluate the aggregator on every profile; the rule exists iff every
    profile's outcome tournament is acyclic."""
    if agg.n != n or agg.m != m:
        raise ValueError(f"aggregator ({agg.n}, {agg.m}) does not match (n={n}, m={m})")
    rows = _pair_rows(n, m)
    pair_count = comb(m, 2)
    table = []
    for k in range(factorial(m) ** n):
        bits = tuple(agg.output(p, rows[p][k]) for p in range(pair_count))
        order = _order_from_outcomes(bits, m)
        if order is None:
            return None
        table.append(order_index(order))
    return VotingRule(n, m, tuple(table))


def aggregator_from_rule(rule: VotingRule) -> PairwiseAggregator | None:
    """Recover the per-pair aggregator of a rule, or None when some pair's
    outcome is not a function of the voters' comparisons on that pair."""
    pref = _prefers_matrix(rule.m)
    rows = _pair_rows(rule.n, rule.m)
    tables = []
    for p, (a, b) in enumerate(candidate_pairs(rule.m)):
        mapping: dict[int, bool] = {}
        for k in range(factorial(rule.m) ** rule.n):
            out = pref[rule.table[k]][a][b]
            if mapping.setdefault(rows[p][k], out) != out:
                return None
        table = 0
        for row, bit in mapping.items():
            if bit:
                table |= 1 << row
        tables.append(table)
    try:
        return PairwiseAggregator(rule.n, rule.m, tuple(tables))
    except ValueError:
        return None


@lru_cache(maxsize=None)
def _pair_output_masks(n: int, m: int) -> tuple[tuple[int, ...], ...]:
    """masks[pair_idx][free_bits]: outcome bits of that pair function, packed
    across all profiles into one integer (bit k = profile k)."""
    rows = _pair_rows(n, m)
    per_pair = 1 << free_bits_per_pair(n)
    out = []
    for pair_rows in rows:
        per_function = []
        for free in range(per_pair):
            full_table = _table_from_free(free, n)
            bits = 0
            for k, row in enumerate(pair_rows):
                if (full_table >> row) & 1:
                    bits |= 1 << k
            per_function.append(bits)
        out.append(tuple(per_function))
    return tuple(out)


def _scan_block_three_candidates(n: int, lo: int, hi: int) -> list[int]:
    """Survivor candidate indices in [lo, hi) for m=3, via whole-profile bitmasks.

    With pairs (0,1), (0,2), (1,2) and outcome bits A, B, C, a profile is
    cyclic exactly when A and C agree while B disagrees with them.
    """
    m = 3
    masks = _pair_output_masks(n, m)
    per_pair = 1 << free_bits_per_pair(n)
    full = (1 << (factorial(m) ** n)) - 1
    survivors = []
    for c in range(lo, hi):
        t01, rest = divmod(c, per_pair * per_pair)
        t02, t12 = divmod(rest, per_pair)
        a = masks[0][t01]
        b = masks[1][t02]
        cc = masks[2][t12]
        cyc = (a & cc & (b ^ full)) | ((a ^ full) & (cc ^ full) & b)
        if cyc == 0:
            survivors.append(c)
    return survivors


def _scan_block_general(n: int, m: int, lo: int, hi: int) -> list[int]:
    """Survivor candidate indices in [lo, hi) for any m, with early abort on
    the first cyclic profile."""
    rows = _pair_rows(n, m)
    pair_count = comb(m, 2)
    per_pair = 1 << free_bits_per_pair(n)
    scan_order = _disagreement_scan_order(n, m)
    pairs = candidate_pairs(m)
    survivors = []
    for c in range(lo, hi):
        digits = []
        rem = c
        for _ in range(pair_count):
            rem, d = divmod(rem, per_pair)
            digits.append(d)
        digits.reverse()
        tables = [_table_from_free(d, n) for d in digits]
        ok = True
        for k in scan_order:
            outdeg = [0] * m
            for p in range(pair_count):
                if (tables[p] >> rows[p][k]) & 1:
                    outdeg[pairs[p][0]] += 1
                else:
                    outdeg[pairs[p][1]] += 1
            if sorted(outdeg) != list(range(m)):
                ok = False
                break
        if ok:
            survivors.append(c)
    return survivors


def _scan_block(args: tuple[int, int, int, int]) -> list[int]:
    n, m, lo, hi = args
    if m == 3:
        return _scan_block_three_candidates(n, lo, hi)
    return _scan_block_general(n, m, lo, hi)


@dataclass(frozen=True)
class ArrowReport:
    """Outcome of the exhaustive scan: every total rule found, with its
    candidate index and dictatorship status."""

    n: int
    m: int
    candidates_scanned: int
    found: tuple[tuple[int, VotingRule], ...]
    dictators: tuple[int | None, ...]

    @property
    def all_dictators(self) -> bool:
        return all(d is not None for d in self.dictators)


def verify_arrow(n: int, m: int, jobs: int = 1) -> ArrowReport:
    """Enumerate every pinned aggregator combination, assemble each into a
    rule where possible, and report the survivors.

    The enumeration order is lexicographic in the truth-table bits, so the
    report is reproducible byte for byte, and block-parallel scans merge into
    the same order.
    """
    if n < 1:
        raise ValueError(f"need at least one voter, got n={n}")
    if m < 3:
        raise ValueError(f"the theorem needs at least three candidates, got m={m}")
    check_scale(n, m)
    total = candidates_total(n, m)
    if total > MAX_CANDIDATE_COMBINATIONS:
        raise ValueError(
            f"{total} aggregator combinations at (n={n}, m={m}) exceed the "
            f"supported bound of {MAX_CANDIDATE_COMBINATIONS}"
        )
    jobs = max(1, jobs)
    if jobs == 1 or total < 4 * jobs:
        survivors = _scan_block((n, m, 0, total))
    else:
        step = (total + jobs - 1) // jobs
        blocks = [(n, m, lo, min(lo + step, total)) for lo in range(0, total, step)]
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=jobs) as pool:
            survivors = [c for block in pool.map(_scan_block, blocks) for c in block]
    survivors.sort()
    found = []
    for c in survivors:
        rule = assemble_rule(aggregator_from_candidate_index(c, n, m), n, m)
        if rule is None:
            raise RuntimeError(f"scan accepted candidate {c} but assembly found a cycle")
        found.append((c, rule))
    dictators = tuple(is_dictatorship(rule) for _, rule in found)
    return ArrowReport(n, m, total, tuple(found), dictators)


@dataclass(frozen=True)
class ReplayReport:
    """End-to-end record of extending a rule by a powerless trailing voter and
    watching the transfer map fix it under the lifted near-unanimous
    distribution."""

    n: int
    m: int
    epsilon: Fraction
    base_rule_digest: str
    extended_rule_digest: str
    full_support: bool
    permutation_invariant: bool
    forces: tuple[Fraction, ...]
    base_forces: tuple[Fraction, ...]
    last_voter_unique_least: bool
    transfer_fixed: bool
    dictator_voter: int | None
    last_force_bound_ok: bool
    kept_force_bounds_ok: bool


def replay_contradiction(g: VotingRule, epsilon: Fraction, y: LinearOrder) -> ReplayReport:
    """Extend ``g`` by one ignored trailing voter, lift the near-unanimous
    distribution over the original electorate to the extended one, and report
    the force structure, the exact fixedness of the extended rule under the
    transfer map, and its dictatorship status.

    For a non-dictatorial unanimity-respecting ``g`` this exhibits a
    non-dictatorial rule that the transfer map fixes exactly.
    """
    if not is_pareto(g):
        raise ValueError("the base rule must respect unanimous comparisons")
    nu = star_distribution(g.n, g.m, epsilon, y)
    mu = lift_distribution(nu, g.n)
    f = cylinder_extend(g)
    n = f.n
    fp = force_profile(mu, f)
    base_forces = tuple(force(nu, g, i) for i in range(g.n))
    bound = Fraction(2, n * factorial(f.m))
    return ReplayReport(
        n=n,
        m=f.m,
        epsilon=Fraction(epsilon),
        base_rule_digest=table_digest(g),
        extended_rule_digest=table_digest(f),
        full_support=has_full_support(mu),
        permutation_invariant=is_permutation_invariant(mu),
        forces=fp.forces,
        base_forces=base_forces,
        last_voter_unique_least=fp.least_forceful == (n - 1,),
        transfer_fixed=force_transfer(mu, f) == f,
        dictator_voter=is_dictatorship(f),
        last_force_bound_ok=fp.forces[n - 1] <= bound,
        kept_force_bounds_ok=all(
            fp.forces[i] >= base_forces[i] / n for i in range(g.n)
        ),
    )
