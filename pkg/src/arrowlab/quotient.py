"""Finite metric spaces, quotient distances, and exact metric-axiom certification.

Two routes to the quotient distance live side by side: the chain route
(shortest path through free moves inside equivalence classes) and the orbit
route (minimum distance over class representatives).  The orbit route is only
valid when the classes are orbits of a group of distance-preserving
permutations; a brute-force diagnostic verifies that hypothesis on demand.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from .measures import Distribution, format_rational, parse_rational
from .rules import VotingRule

FIXTURE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class FiniteMetricSpace:
    """A finite point set with a dense, exact distance matrix.

    Construction does not enforce the metric axioms; ``check_metric_axioms``
    exists precisely to certify or refute them.
    """

    points: tuple
    dist: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        matrix = tuple(tuple(Fraction(v) for v in row) for row in self.dist)
        object.__setattr__(self, "dist", matrix)
        size = len(self.points)
        if len(matrix) != size or any(len(row) != size for row in matrix):
            raise ValueError("distance matrix shape does not match point count")

    @property
    def size(self) -> int:
        return len(self.points)

    def distance(self, i: int, j: int) -> Fraction:
        return self.dist[i][j]

    @staticmethod
    def from_function(points: Sequence, fn: Callable) -> "FiniteMetricSpace":
        """Build the matrix by calling ``fn(p, q)`` once per unordered pair."""
        pts = tuple(points)
        size = len(pts)
        matrix = [[Fraction(0)] * size for _ in range(size)]
        for i in range(size):
            for j in range(i + 1, size):
                d = Fraction(fn(pts[i], pts[j]))
                matrix[i][j] = d
                matrix[j][i] = d
        return FiniteMetricSpace(pts, tuple(tuple(row) for row in matrix))


@dataclass(frozen=True)
class EquivalencePartition:
    """A partition of point indices, stored as a class id per point."""

    class_of: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "class_of", tuple(self.class_of))

    def same_class(self, i: int, j: int) -> bool:
        return self.class_of[i] == self.class_of[j]

    def classes(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for i, c in enumerate(self.class_of):
            out.setdefault(c, []).append(i)
        return {c: tuple(members) for c, members in out.items()}

    @staticmethod
    def singletons(size: int) -> "EquivalencePartition":
        return EquivalencePartition(tuple(range(size)))


@dataclass(frozen=True)
class MetricCheckReport:
    ok: bool
    violation: str | None = None
    witness: tuple[int, ...] = ()


def rule_distance(mu: Distribution, f: VotingRule, g: VotingRule) -> Fraction:
    """Probability under ``mu`` that two rules elect different rankings."""
    if not (mu.n == f.n == g.n and mu.m == f.m == g.m):
        raise ValueError("distribution and rules disagree on (n, m)")
    total = Fraction(0)
    for w, a, b in zip(mu.weights, f.table, g.table):
        if a != b:
            total += w
    return total


def space_from_rules(mu: Distribution, rules: Sequence[VotingRule]) -> FiniteMetricSpace:
    """The finite space of the given rules under the election-disagreement distance."""
    return FiniteMetricSpace.from_function(tuple(rules), lambda f, g: rule_distance(mu, f, g))


def check_metric_axioms(space: FiniteMetricSpace) -> MetricCheckReport:
    """Exhaustively certify nonnegativity, zero diagonal, identity of
    indiscernibles, symmetry, and the triangle inequality; stop at the first
    violation."""
    n = space.size
    d = space.dist
    for i in range(n):
        if d[i][i] != 0:
            return MetricCheckReport(False, "nonzero-self-distance", (i,))
    for i in range(n):
        for j in range(i + 1, n):
            if d[i][j] < 0:
                return MetricCheckReport(False, "negative-distance", (i, j))
            if d[i][j] != d[j][i]:
                return MetricCheckReport(False, "asymmetry", (i, j))
            if d[i][j] == 0 and space.points[i] != space.points[j]:
                return MetricCheckReport(False, "zero-distance-distinct-points", (i, j))
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                if d[i][k] > d[i][j] + d[j][k]:
                    return MetricCheckReport(False, "triangle", (i, j, k))
                if d[i][j] > d[i][k] + d[k][j]:
                    return MetricCheckReport(False, "triangle", (i, k, j))
                if d[j][k] > d[j][i] + d[i][k]:
                    return MetricCheckReport(False, "triangle", (j, i, k))
    return MetricCheckReport(True)


def quotient_distance_chain(
    space: FiniteMetricSpace, part: EquivalencePartition, x: int, y: int
) -> Fraction:
    """Minimum total length over chains from x to y, where moving inside an
    equivalence class is free and hopping between points costs their distance.

    Computed as a shortest path; on a finite space the minimum is attained,
    so the result is an exact value rather than an infimum.
    """
    n = space.size
    dist: list[Fraction | None] = [None] * n
    dist[x] = Fraction(0)
    visited = [False] * n
    for _ in range(n):
        u = None
        best = None
        for v in range(n):
            if not visited[v] and dist[v] is not None and (best is None or dist[v] < best):
                u = v
                best = dist[v]
        if u is None:
            break
        visited[u] = True
        if u == y:
            break
        du = dist[u]
        assert du is not None
        for v in range(n):
            if visited[v]:
                continue
            step = Fraction(0) if part.same_class(u, v) else space.dist[u][v]
            nd = du + step
            if dist[v] is None or nd < dist[v]:
                dist[v] = nd
    result = dist[y]
    assert result is not None
    return result


def quotient_distance_orbit(
    space: FiniteMetricSpace, part: EquivalencePartition, x: int, y: int
) -> Fraction:
    """Minimum distance over all representatives of the two classes.

    Only agrees with the chain construction when the classes are orbits of a
    group of isometries; that hypothesis is the caller's obligation (see
    ``verify_orbit_partition``).
    """
    if part.same_class(x, y):
        return Fraction(0)
    xs = [i for i in range(space.size) if part.same_class(i, x)]
    ys = [j for j in range(space.size) if part.same_class(j, y)]
    return min(space.dist[i][j] for i in xs for j in ys)


def _find_class_preserving_isometry(
    space: FiniteMetricSpace, part: EquivalencePartition, src: int, dst: int
) -> bool:
    """Backtracking search for a distance-preserving permutation that maps
    every class into itself and sends ``src`` to ``dst``."""
    n = space.size
    if part.class_of[src] != part.class_of[dst]:
        return False
    image: list[int | None] = [None] * n
    used = [False] * n
    image[src] = dst
    used[dst] = True
    order = [p for p in range(n) if p != src]

    def extend(pos: int) -> bool:
        if pos == len(order):
            return True
        p = order[pos]
        for q in range(n):
            if used[q] or part.class_of[q] != part.class_of[p]:
                continue
            ok = True
            for r in range(n):
                if image[r] is not None and space.dist[p][r] != space.dist[q][image[r]]:
                    ok = False
                    break
            if ok:
                image[p] = q
                used[q] = True
                if extend(pos + 1):
                    return True
                image[p] = None
                used[q] = False
        return False

    return extend(0)


def verify_orbit_partition(space: FiniteMetricSpace, part: EquivalencePartition) -> bool:
    """Brute-force check that the partition's classes are the orbits of some
    group of isometries of the space.

    Holds iff, within each class, every point is reachable from the class
    representative by a class-preserving isometry.
    """
    for members in part.classes().values():
        rep = members[0]
        for other in members[1:]:
            if not _find_class_preserving_isometry(space, part, rep, other):
                return False
    return True


def random_orbit_fixture(
    n_points: int, seed: int
) -> tuple[FiniteMetricSpace, EquivalencePartition]:
    """A seeded synthetic space whose partition is an isometry-orbit partition
    by construction.

    A random point permutation generates a cyclic group; its cycles become the
    classes, and each orbit of unordered pairs receives one random distance in
    [1, 2].  Distances in that band satisfy the triangle inequality outright,
    and constancy on pair orbits makes every group element an isometry.
    """
    if n_points < 1:
        raise ValueError("need at least one point")
    rng = random.Random(seed)
    perm = list(range(n_points))
    rng.shuffle(perm)

    class_of = [-1] * n_points
    next_class = 0
    for start in range(n_points):
        if class_of[start] != -1:
            continue
        p = start
        while class_of[p] == -1:
            class_of[p] = next_class
            p = perm[p]
        next_class += 1

    matrix = [[Fraction(0)] * n_points for _ in range(n_points)]
    assigned: set[tuple[int, int]] = set()
    for i in range(n_points):
        for j in range(i + 1, n_points):
            if (i, j) in assigned:
                continue
            value = Fraction(16 + rng.randrange(17), 16)
            a, b = i, j
            while True:
                lo, hi = min(a, b), max(a, b)
                if (lo, hi) in assigned:
                    break
                matrix[lo][hi] = value
                matrix[hi][lo] = value
                assigned.add((lo, hi))
                a, b = perm[a], perm[b]
    space = FiniteMetricSpace(tuple(range(n_points)), tuple(tuple(row) for row in matrix))
    return space, EquivalencePartition(tuple(class_of))


def save_fixture(
    space: FiniteMetricSpace, part: EquivalencePartition, path: str | Path
) -> None:
    upper = [
        format_rational(space.dist[i][j])
        for i in range(space.size)
        for j in range(i + 1, space.size)
    ]
    record = {
        "format_version": FIXTURE_FORMAT_VERSION,
        "points": space.size,
        "dist": upper,
        "classes": list(part.class_of),
    }
    Path(path).write_text(json.dumps(record, sort_keys=True, indent=2) + "\n")


def load_fixture(path: str | Path) -> tuple[FiniteMetricSpace, EquivalencePartition]:
    record = json.loads(Path(path).read_text())
    if record.get("format_version") != FIXTURE_FORMAT_VERSION:
        raise ValueError(f"unsupported fixture format_version {record.get('format_version')!r}")
    n = record["points"]
    values = [parse_rational(v) for v in record["dist"]]
    if len(values) != n * (n - 1) // 2:
        raise ValueError("upper-triangular distance array has the wrong length")
    matrix = [[Fraction(0)] * n for _ in range(n)]
    pos = 0
    for i in range(n):
        for j in range(i + 1, n):
            matrix[i][j] = values[pos]
            matrix[j][i] = values[pos]
            pos += 1
    space = FiniteMetricSpace(tuple(range(n)), tuple(tuple(row) for row in matrix))
    return space, EquivalencePartition(tuple(record["classes"]))
