"""Candidates, strict rankings, ballots, and the index arithmetic behind every lookup table.

Voters and candidates are 0-indexed throughout.  A ranking lists candidate
indices from most preferred to least preferred; its canonical index is its
lexicographic rank among all rankings of the same width.  A profile of n
ballots maps to the base-m! integer whose digit for voter 0 is most
significant.  These two conventions are normative for every file format in
this package.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import lru_cache
from math import factorial

MAX_VOTERS = 4
MAX_CANDIDATES = 4
MAX_TABLE_ENTRIES = 331_776
SCALE_OVERRIDE_ENV = "ARROWLAB_SCALE_OVERRIDE"


def check_scale(n: int, m: int) -> None:
    """Reject electorate sizes whose dense tables stop being desk-scale.

    Setting the environment variable named by ``SCALE_OVERRIDE_ENV`` to a
    non-empty value lifts the bound at the caller's own risk.
    """
    if n < 1:
        raise ValueError(f"need at least one voter, got n={n}")
    if m < 1:
        raise ValueError(f"need at least one candidate, got m={m}")
    if os.environ.get(SCALE_OVERRIDE_ENV):
        return
    if n > MAX_VOTERS or m > MAX_CANDIDATES or factorial(m) ** n > MAX_TABLE_ENTRIES:
        raise ValueError(
            f"scale (n={n}, m={m}) exceeds desk bounds "
            f"(n <= {MAX_VOTERS}, m <= {MAX_CANDIDATES}, table <= {MAX_TABLE_ENTRIES}); "
            f"set {SCALE_OVERRIDE_ENV}=1 to override"
        )


@dataclass(frozen=True)
class LinearOrder:
    """A strict total ranking of candidates 0..m-1, most preferred first."""

    ranking: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ranking", tuple(self.ranking))
        m = len(self.ranking)
        if m < 1:
            raise ValueError("ranking must contain at least one candidate")
        if sorted(self.ranking) != list(range(m)):
            raise ValueError(f"ranking {self.ranking!r} is not a permutation of 0..{m - 1}")

    @property
    def m(self) -> int:
        return len(self.ranking)

    def prefers(self, a: int, b: int) -> bool:
        """True iff candidate ``a`` is ranked strictly above candidate ``b``."""
        if a == b:
            raise ValueError(f"candidates must differ, got a=b={a}")
        if not (0 <= a < self.m and 0 <= b < self.m):
            raise ValueError(f"candidate pair ({a}, {b}) out of range for m={self.m}")
        return self.ranking.index(a) < self.ranking.index(b)


@dataclass(frozen=True)
class Profile:
    """One ballot per voter; the input point of a voting rule."""

    ballots: tuple[LinearOrder, ...]

    def __post_init__(self):
        object.__setattr__(self, "ballots", tuple(self.ballots))
        if len(self.ballots) < 1:
            raise ValueError("a profile needs at least one voter")
        widths = {b.m for b in self.ballots}
        if len(widths) != 1:
            raise ValueError(f"ballots disagree on candidate count: {sorted(widths)}")

    @property
    def n(self) -> int:
        return len(self.ballots)

    @property
    def m(self) -> int:
        return self.ballots[0].m


@dataclass(frozen=True)
class VoterPermutation:
    """A relabeling of the n voters; ``mapping[i]`` is the voter whose ballot lands at seat i."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(self.mapping))
        n = len(self.mapping)
        if sorted(self.mapping) != list(range(n)):
            raise ValueError(f"mapping {self.mapping!r} is not a bijection on 0..{n - 1}")

    @property
    def n(self) -> int:
        return len(self.mapping)

    def compose(self, other: "VoterPermutation") -> "VoterPermutation":
        """Composition chosen so that applying ``self`` then ``other`` to a
        profile equals applying ``self.compose(other)`` once (the group-action law)."""
        if self.n != other.n:
            raise ValueError("permutation sizes disagree")
        return VoterPermutation(tuple(self.mapping[j] for j in other.mapping))

    def inverse(self) -> "VoterPermutation":
        inv = [0] * self.n
        for i, j in enumerate(self.mapping):
            inv[j] = i
        return VoterPermutation(tuple(inv))

    @staticmethod
    def identity(n: int) -> "VoterPermutation":
        return VoterPermutation(tuple(range(n)))


@lru_cache(maxsize=None)
def enumerate_orders(m: int) -> tuple[LinearOrder, ...]:
    """All m! strict rankings of m candidates, in lexicographic order of their ranking tuples.

    The position of an order in this tuple is its canonical index.
    """
    if m < 1:
        raise ValueError(f"need at least one candidate, got m={m}")
    return tuple(LinearOrder(perm) for perm in itertools.permutations(range(m)))


@lru_cache(maxsize=None)
def _order_index_map(m: int) -> dict[tuple[int, ...], int]:
    return {o.ranking: i for i, o in enumerate(enumerate_orders(m))}


def order_index(order: LinearOrder) -> int:
    """Canonical index of a ranking (its lexicographic rank)."""
    return _order_index_map(order.m)[order.ranking]


@lru_cache(maxsize=None)
def all_voter_permutations(n: int) -> tuple[VoterPermutation, ...]:
    """All n! voter relabelings, in lexicographic order of their mapping tuples."""
    return tuple(VoterPermutation(p) for p in itertools.permutations(range(n)))


@lru_cache(maxsize=None)
def profile_digit_tuples(n: int, m: int) -> tuple[tuple[int, ...], ...]:
    """Every profile at scale (n, m) as a tuple of ballot indices, listed in profile-index order."""
    check_scale(n, m)
    return tuple(itertools.product(range(factorial(m)), repeat=n))


def encode_digits(digits: tuple[int, ...], m: int) -> int:
    """Profile index of a tuple of ballot indices (voter 0 most significant)."""
    mf = factorial(m)
    k = 0
    for d in digits:
        k = k * mf + d
    return k


def profile_index(profile: Profile) -> int:
    """Dense index of a profile: the base-m! number of its ballots' canonical indices."""
    idx = _order_index_map(profile.m)
    return encode_digits(tuple(idx[b.ranking] for b in profile.ballots), profile.m)


def profile_from_index(index: int, n: int, m: int) -> Profile:
    """Inverse of ``profile_index`` on 0..(m!)^n - 1."""
    mf = factorial(m)
    if not 0 <= index < mf**n:
        raise ValueError(f"profile index {index} out of range for (n={n}, m={m})")
    orders = enumerate_orders(m)
    digits = []
    for _ in range(n):
        index, d = divmod(index, mf)
        digits.append(d)
    return Profile(tuple(orders[d] for d in reversed(digits)))


def apply_voter_permutation(profile: Profile, perm: VoterPermutation) -> Profile:
    """Relabel voters: seat i of the result holds the ballot of voter ``perm.mapping[i]``."""
    if profile.n != perm.n:
        raise ValueError(f"profile has {profile.n} voters but permutation has {perm.n}")
    return Profile(tuple(profile.ballots[j] for j in perm.mapping))


def collapse_to_voter(profile: Profile, i: int) -> Profile:
    """Replace every ballot by voter i's ballot."""
    if not 0 <= i < profile.n:
        raise ValueError(f"voter {i} out of range for n={profile.n}")
    return Profile((profile.ballots[i],) * profile.n)


def drop_voter(profile: Profile, i: int) -> Profile:
    """Remove voter i's ballot, keeping the others in order."""
    if profile.n < 2:
        raise ValueError("cannot drop the only voter")
    if not 0 <= i < profile.n:
        raise ValueError(f"voter {i} out of range for n={profile.n}")
    return Profile(profile.ballots[:i] + profile.ballots[i + 1 :])


def insert_voter(profile: Profile, ballot: LinearOrder, i: int) -> Profile:
    """Insert a ballot at seat i; inverse of ``drop_voter`` at the same seat."""
    if not 0 <= i <= profile.n:
        raise ValueError(f"seat {i} out of range for n={profile.n}")
    if ballot.m != profile.m:
        raise ValueError("ballot width disagrees with profile")
    return Profile(profile.ballots[:i] + (ballot,) + profile.ballots[i:])


def unanimous_profile(order: LinearOrder, n: int) -> Profile:
    return Profile((order,) * n)
