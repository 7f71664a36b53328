"""Exact primitives: diagrams, dyadic lattice points, coordinate permutations,
metrics and polytope membership.

Everything here is integer-exact; floats only enter through query vectors and
the distance helpers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

EUCLIDEAN = "euclidean"
COSINE = "cosine"
METRICS = (EUCLIDEAN, COSINE)

INTERIOR = "interior"
BOUNDARY = "boundary"
OUTSIDE = "outside"


def check_metric(kind: str) -> str:
    if kind not in METRICS:
        raise ValueError(f"unknown metric {kind!r}, expected one of {METRICS}")
    return kind


@dataclass(frozen=True)
class YoungDiagram:
    """A partition written as row lengths lambda_1 >= ... >= lambda_{n+1}.

    The row vector includes trailing zeros; the rank n of the ambient
    coordinate system is ``len(rows) - 1``.  A diagram with all rows equal is
    rejected: its polytope is a single point and carries no boundary.
    """

    rows: tuple[int, ...]

    def __post_init__(self):
        rows = tuple(int(r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if len(rows) < 2:
            raise ValueError("diagram needs at least two rows (incl. trailing zero)")
        if any(r < 0 for r in rows):
            raise ValueError(f"negative row length in {rows}")
        if any(a < b for a, b in zip(rows, rows[1:])):
            raise ValueError(f"rows must be weakly decreasing, got {rows}")
        if rows[0] < 1:
            raise ValueError("first row must contain at least one box")
        if len(set(rows)) == 1:
            raise ValueError(f"degenerate diagram {rows}: all rows equal")

    @classmethod
    def from_rows(cls, rows: Sequence[int]) -> "YoungDiagram":
        """Build from positive row lengths, appending one empty row.

        ``from_rows((2, 1, 1))`` is the rank-3 diagram with weight vector
        (2, 1, 1, 0).  A trailing zero that is already present is kept as is.
        """
        rows = tuple(int(r) for r in rows)
        if rows and rows[-1] > 0:
            rows = rows + (0,)
        return cls(rows)

    @property
    def rank(self) -> int:
        return len(self.rows) - 1

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def boxes(self) -> int:
        return sum(self.rows)

    def prefix_sums(self) -> tuple[int, ...]:
        out, acc = [], 0
        for r in self.rows:
            acc += r
            out.append(acc)
        return tuple(out)

    def scaled(self, factor: int) -> "YoungDiagram":
        """The diagram with every column repeated ``factor`` times."""
        if factor < 1:
            raise ValueError("scale factor must be >= 1")
        return YoungDiagram(tuple(r * factor for r in self.rows))

    def highest_weight(self) -> "ScaledPoint":
        return ScaledPoint(self.rows, 0)

    def __str__(self):
        return "(" + ",".join(str(r) for r in self.rows) + ")"


@dataclass(frozen=True)
class ScaledPoint:
    """A lattice point with coordinates ``numerators[i] / 2**level``.

    Kept in canonical form: at level > 0 at least one numerator is odd, so
    equal rational points always compare equal.
    """

    numerators: tuple[int, ...]
    level: int = 0

    def __post_init__(self):
        nums = tuple(int(v) for v in self.numerators)
        level = int(self.level)
        if level < 0:
            raise ValueError("level must be non-negative")
        while level > 0 and all(v % 2 == 0 for v in nums):
            nums = tuple(v // 2 for v in nums)
            level -= 1
        object.__setattr__(self, "numerators", nums)
        object.__setattr__(self, "level", level)

    @property
    def dim(self) -> int:
        return len(self.numerators)

    def numerators_at(self, level: int) -> tuple[int, ...]:
        """Numerators rescaled to a coarser-than-or-equal target scale."""
        if level < self.level:
            raise ValueError(f"point at level {self.level} not representable at {level}")
        shift = level - self.level
        return tuple(v << shift for v in self.numerators)

    def values(self) -> tuple[float, ...]:
        den = float(1 << self.level)
        return tuple(v / den for v in self.numerators)

    def exact_strings(self) -> tuple[str, ...]:
        """Per-coordinate reduced "num/2^k" strings, e.g. "3/2" or "1"."""
        out = []
        for v in self.numerators:
            num, lev = v, self.level
            while lev > 0 and num % 2 == 0:
                num //= 2
                lev -= 1
            out.append(str(num) if lev == 0 else f"{num}/{1 << lev}")
        return tuple(out)

    def sorted_desc(self) -> "ScaledPoint":
        return ScaledPoint(tuple(sorted(self.numerators, reverse=True)), self.level)

    def is_dominant(self) -> bool:
        n = self.numerators
        return all(a >= b for a, b in zip(n, n[1:]))

    def __str__(self):
        return "(" + ",".join(self.exact_strings()) + ")"


@dataclass(frozen=True)
class Permutation:
    """A rearrangement of coordinate slots.

    ``order[i]`` is the source slot feeding result slot i, so
    ``apply(x)[i] == x[order[i]]``.
    """

    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(int(i) for i in self.order)
        object.__setattr__(self, "order", order)
        if sorted(order) != list(range(len(order))):
            raise ValueError(f"not a permutation of 0..{len(order) - 1}: {order}")

    @classmethod
    def identity(cls, dim: int) -> "Permutation":
        return cls(tuple(range(dim)))

    @property
    def dim(self) -> int:
        return len(self.order)

    def apply(self, seq: Sequence) -> tuple:
        if len(seq) != self.dim:
            raise ValueError("length mismatch")
        return tuple(seq[i] for i in self.order)

    def inverse(self) -> "Permutation":
        inv = [0] * self.dim
        for i, src in enumerate(self.order):
            inv[src] = i
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: compose(other).apply(x) == self.apply(other.apply(x))."""
        return Permutation(tuple(other.order[i] for i in self.order))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.order))


def dominant_sort(vector: Sequence) -> tuple[tuple, Permutation]:
    """Stable descending sort: returns the sorted vector and the permutation
    that produced it (ties keep their original order)."""
    idx = sorted(range(len(vector)), key=lambda i: (-vector[i], i))
    perm = Permutation(tuple(idx))
    return perm.apply(vector), perm


def membership(p: ScaledPoint, lam: YoungDiagram) -> str:
    """Classify a lattice point against the weight polytope of ``lam``.

    Uses the majorization test on the descending rearrangement, so the result
    is invariant under coordinate permutations of ``p``.
    """
    if p.dim != lam.dim:
        raise ValueError(f"point dim {p.dim} != diagram dim {lam.dim}")
    scale = 1 << p.level
    caps = [c * scale for c in lam.prefix_sums()]
    q = sorted(p.numerators, reverse=True)
    acc = 0
    tight = False
    for i, v in enumerate(q):
        acc += v
        if i < lam.dim - 1:
            if acc > caps[i]:
                return OUTSIDE
            if acc == caps[i]:
                tight = True
    if acc != caps[-1]:
        return OUTSIDE
    return BOUNDARY if tight else INTERIOR


def distance(a: Sequence[float], b: Sequence[float], metric: str = EUCLIDEAN) -> float:
    if len(a) != len(b):
        raise ValueError("length mismatch")
    check_metric(metric)
    if metric == EUCLIDEAN:
        acc = 0.0
        for x, y in zip(a, b):
            d = x - y
            acc += d * d
        return math.sqrt(acc)
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine distance undefined for the zero vector")
    dot = sum(x * y for x, y in zip(a, b))
    d = 1.0 - dot / (na * nb)
    # parallel vectors can land an ulp below zero
    return d if d > 0.0 else 0.0


def polytope_center(lam: YoungDiagram) -> tuple[float, ...]:
    """Barycenter of the weight polytope, the unique permutation-fixed point."""
    c = lam.boxes / lam.dim
    return (c,) * lam.dim
