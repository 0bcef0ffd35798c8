"""Exact-rational probability distributions over profile space.

Every weight is a ``fractions.Fraction``; no float enters any computation.
Besides the uniform (impartial-culture) distribution, the module provides the
near-unanimous "star" family, which loads one unanimous profile and spreads
the rest evenly, and the permutation-averaged lift that turns a distribution
for n-1 voters into an n-voter distribution that is invariant under every
relabeling of the voters.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from pathlib import Path

from .orders import (
    LinearOrder,
    Profile,
    check_scale,
    encode_digits,
    order_index,
    profile_digit_tuples,
    profile_index,
)

DISTRIBUTION_FORMAT_VERSION = 1


def format_rational(q: Fraction) -> str:
    """Lowest-terms ``p/q`` string; denominators are always written out."""
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(text)


def _as_fraction(value) -> Fraction:
    if isinstance(value, float):
        raise TypeError("float weights are not allowed; pass Fraction, int, or 'p/q' string")
    return Fraction(value)


@dataclass(frozen=True)
class Distribution:
    """Exact weights over all (m!)^n profiles, indexed by profile index."""

    n: int
    m: int
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        check_scale(self.n, self.m)
        weights = tuple(_as_fraction(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        size = factorial(self.m) ** self.n
        if len(weights) != size:
            raise ValueError(f"{len(weights)} weights, expected {size}")
        if any(w < 0 for w in weights):
            raise ValueError("weights must be nonnegative")
        total = sum(weights)
        if total != 1:
            raise ValueError(f"weights sum to {total}, expected exactly 1")


def weight_of(dist: Distribution, profile: Profile) -> Fraction:
    if profile.n != dist.n or profile.m != dist.m:
        raise ValueError(
            f"profile ({profile.n}, {profile.m}) incompatible with distribution ({dist.n}, {dist.m})"
        )
    return dist.weights[profile_index(profile)]


def uniform_distribution(n: int, m: int) -> Distribution:
    """Every profile equally likely (the impartial-culture distribution)."""
    size = factorial(m) ** n
    w = Fraction(1, size)
    return Distribution(n, m, (w,) * size)


def star_distribution(k: int, m: int, epsilon: Fraction, y: LinearOrder) -> Distribution:
    """Weight 1 - epsilon on the profile where all k voters cast ``y``, the
    remaining epsilon spread evenly over every other profile.

    Requires at least three candidates and ``0 < epsilon < 1 - 2/m!``; the
    bound is strict at both ends.
    """
    if m < 3:
        raise ValueError(f"star distribution needs at least three candidates, got m={m}")
    epsilon = _as_fraction(epsilon)
    limit = 1 - Fraction(2, factorial(m))
    if not 0 < epsilon < limit:
        raise ValueError(f"epsilon must lie strictly between 0 and {limit}, got {epsilon}")
    if y.m != m:
        raise ValueError(f"order over {y.m} candidates does not match m={m}")
    size = factorial(m) ** k
    spread = epsilon / (size - 1)
    unanimous = encode_digits((order_index(y),) * k, m)
    weights = tuple(1 - epsilon if idx == unanimous else spread for idx in range(size))
    return Distribution(k, m, weights)


def lift_distribution(dist: Distribution, i: int) -> Distribution:
    """Average a distribution for n-1 voters over all n! voter relabelings,
    dropping seat ``i`` after each relabeling, and normalize by n! * m!.

    The result is a full n-voter distribution: it sums to exactly 1, is
    invariant under every voter relabeling, and keeps full support whenever
    the input has it.  (The normalizing constant already accounts for the
    relabeling sum, so the weights themselves total 1.)
    """
    n = dist.n + 1
    m = dist.m
    if not 0 <= i < n:
        raise ValueError(f"seat {i} out of range for n={n}")
    check_scale(n, m)
    mf = factorial(m)
    denom = factorial(n) * mf
    perms = tuple(itertools.permutations(range(n)))
    weights = []
    for digits in profile_digit_tuples(n, m):
        total = Fraction(0)
        for tau in perms:
            permuted = tuple(digits[tau[j]] for j in range(n))
            dropped = permuted[:i] + permuted[i + 1 :]
            total += dist.weights[encode_digits(dropped, m)]
        weights.append(total / denom)
    return Distribution(n, m, tuple(weights))


@lru_cache(maxsize=None)
def is_permutation_invariant(dist: Distribution) -> bool:
    """True iff every voter relabeling leaves all weights unchanged."""
    digit_tuples = profile_digit_tuples(dist.n, dist.m)
    for mapping in itertools.permutations(range(dist.n)):
        for k, digits in enumerate(digit_tuples):
            permuted = encode_digits(tuple(digits[j] for j in mapping), dist.m)
            if dist.weights[permuted] != dist.weights[k]:
                return False
    return True


@lru_cache(maxsize=None)
def has_full_support(dist: Distribution) -> bool:
    return all(w > 0 for w in dist.weights)


def save_distribution(dist: Distribution, path: str | Path) -> None:
    record = {
        "format_version": DISTRIBUTION_FORMAT_VERSION,
        "n": dist.n,
        "m": dist.m,
        "weights": [format_rational(w) for w in dist.weights],
    }
    Path(path).write_text(json.dumps(record, sort_keys=True, indent=2) + "\n")


def load_distribution(path: str | Path) -> Distribution:
    record = json.loads(Path(path).read_text())
    if record.get("format_version") != DISTRIBUTION_FORMAT_VERSION:
        raise ValueError(
            f"unsupported distribution format_version {record.get('format_version')!r}"
        )
    weights = tuple(parse_rational(w) for w in record["weights"])
    return Distribution(record["n"], record["m"], weights)
