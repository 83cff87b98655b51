"""Brute-force ground truth for average-radius list decodability of tiny codes.

All codewords are enumerated (q^k of them), then every (L+1)-subset is scored
against its plurality center: the coordinate-wise most frequent symbol, ties
broken by the canonical element order, which minimizes the summed distance
because the objective decomposes per coordinate.  Distances are exact
rationals with denominator n; a verdict is never approximate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterator, Sequence

from .gf import FieldElement
from .rscode import PuncturedRSCode


class EmptyList(ValueError):
    """Plurality center of no words requested."""


class EnumerationCapExceeded(ValueError):
    """Code or subset space larger than the configured caps."""


@dataclass
class Verdict:
    decodable: bool
    radius: Fraction
    list_bound: int
    examined: int                                  # subsets scored
    center: tuple[FieldElement, ...] | None = None
    messages: tuple[tuple[FieldElement, ...], ...] | None = None
    words: tuple[tuple[FieldElement, ...], ...] | None = None
    average: Fraction | None = None

    def to_json(self) -> dict:
        return {
            "decodable": self.decodable,
            "radius": str(self.radius),
            "list_bound": self.list_bound,
            "examined": self.examined,
            "center": [c.rep for c in self.center] if self.center else None,
            "messages": [[c.rep for c in m] for m in self.messages] if self.messages else None,
            "words": [[c.rep for c in w] for w in self.words] if self.words else None,
            "average": str(self.average) if self.average is not None else None,
        }


def plurality_center(words: Sequence[Sequence[FieldElement]]) -> tuple[FieldElement, ...]:
    """Coordinate-wise most frequent symbol, ties to the smallest element."""
    if not words:
        raise EmptyList("no words given")
    n = len(words[0])
    if any(len(w) != n for w in words):
        raise ValueError("words must share one length")
    ctx = words[0][0].ctx
    reps = [[ctx.element(x).rep for x in w] for w in words]
    return tuple(FieldElement(ctx, _plurality_rep([w[i] for w in reps])) for i in range(n))


def _plurality_rep(column: list[int]) -> int:
    counts: dict[int, int] = {}
    for v in column:
        counts[v] = counts.get(v, 0) + 1
    best_v, best_c = None, -1
    for v, c in counts.items():
        if c > best_c or (c == best_c and v < best_v):
            best_v, best_c = v, c
    return best_v


def enumerate_codewords(
    code: PuncturedRSCode, enum_cap: int = 100_000
) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """All (message, word) pairs as raw-code tuples, in message-lex order."""
    q, k, n = code.ctx.order, code.k, code.n
    total = q**k
    if total > enum_cap:
        raise EnumerationCapExceeded(f"{total} codewords exceed the cap {enum_cap}")
    ctx = code.ctx
    point_reps = [p.rep for p in code.points]
    # powers[i][e] = point_i ** e
    powers = []
    for a in point_reps:
        row = [1]
        for _ in range(k - 1):
            row.append(ctx.mul(row[-1], a))
        powers.append(row)
    messages: list[tuple[int, ...]] = []
    words: list[tuple[int, ...]] = []
    mul, add = ctx.mul, ctx.add
    msg = [0] * k
    for _ in range(total):
        w = []
        for i in range(n):
            pi = powers[i]
            acc = 0
            for j in range(k):
                cj = msg[j]
                if cj:
                    acc = add(acc, mul(cj, pi[j]))
            w.append(acc)
        messages.append(tuple(msg))
        words.append(tuple(w))
        for j in range(k):  # odometer, low coefficient fastest
            msg[j] += 1
            if msg[j] < q:
                break
            msg[j] = 0
    return messages, words


@dataclass
class RawViolation:
    subset: tuple[int, ...]           # codeword indices
    center: tuple[int, ...]           # raw codes
    total_distance: int
    average: Fraction


def iter_violations(
    code: PuncturedRSCode,
    radius: Fraction,
    list_bound: int,
    enum_cap: int = 100_000,
    tuple_cap: int = 10_000_000,
) -> Iterator[RawViolation]:
    """Scan all (L+1)-subsets in canonical order, yielding each violation."""
    radius = Fraction(radius)
    _, words = enumerate_codewords(code, enum_cap)
    count = len(words)
    size = list_bound + 1
    if count >= size and comb(count, size) > tuple_cap:
        raise EnumerationCapExceeded(
            f"{comb(count, size)} subsets exceed the cap {tuple_cap}"
        )
    n = code.n
    # violation iff total distance <= radius * size * n
    limit = radius * size * n
    for subset in combinations(range(count), size):
        chosen = [words[i] for i in subset]
        total = 0
        for i in range(n):
            col = [w[i] for w in chosen]
            counts: dict[int, int] = {}
            for v in col:
                counts[v] = counts.get(v, 0) + 1
            total += size - max(counts.values())
        if total <= limit:
            center = tuple(_plurality_rep([w[i] for w in chosen]) for i in range(n))
            yield RawViolation(subset, center, total, Fraction(total, size * n))


def is_avg_list_decodable(
    code: PuncturedRSCode,
    radius: Fraction,
    list_bound: int,
    enum_cap: int = 100_000,
    tuple_cap: int = 10_000_000,
) -> Verdict:
    """Exhaustive average-radius verdict; on violation, returns the first
    offending subset in canonical enumeration order with full witness data."""
    radius = Fraction(radius)
    messages, words = enumerate_codewords(code, enum_cap)
    count = len(words)
    size = list_bound + 1
    examined = comb(count, size) if count >= size else 0
    if examined > tuple_cap:
        raise EnumerationCapExceeded(f"{examined} subsets exceed the cap {tuple_cap}")
    ctx = code.ctx
    for viol in iter_violations(code, radius, list_bound, enum_cap, tuple_cap):
        return Verdict(
            False,
            radius,
            list_bound,
            examined,
            tuple(FieldElement(ctx, c) for c in viol.center),
            tuple(tuple(FieldElement(ctx, c) for c in messages[i]) for i in viol.subset),
            tuple(tuple(FieldElement(ctx, c) for c in words[i]) for i in viol.subset),
            viol.average,
        )
    return Verdict(True, radius, list_bound, examined)


def is_max_list_decodable(
    code: PuncturedRSCode,
    radius: Fraction,
    list_bound: int,
    enum_cap: int = 100_000,
    tuple_cap: int = 10_000_000,
) -> bool:
    """Plain (max-radius) decodability by scanning subsets around their
    plurality center; used as a spot check against the average-radius oracle."""
    radius = Fraction(radius)
    _, words = enumerate_codewords(code, enum_cap)
    count = len(words)
    size = list_bound + 1
    if count >= size and comb(count, size) > tuple_cap:
        raise EnumerationCapExceeded("subset space too large")
    n = code.n
    # for the max criterion the best center is not per-coordinate decomposable;
    # scan all centers only when the word space is tiny, else use codeword-balls
    limit = radius * n
    for subset in combinations(range(count), size):
        chosen = [words[i] for i in subset]
        center = tuple(_plurality_rep([w[i] for w in chosen]) for i in range(n))
        if all(sum(1 for i in range(n) if w[i] != center[i]) <= limit for w in chosen):
            return False
    return True


def min_distance(code: PuncturedRSCode, enum_cap: int = 100_000) -> Fraction:
    """Exact relative minimum distance, exhaustively over nonzero codewords."""
    q, k = code.ctx.order, code.k
    if q**k > enum_cap:
        raise EnumerationCapExceeded(f"{q**k} codewords exceed the cap {enum_cap}")
    _, words = enumerate_codewords(code, enum_cap)
    best = None
    for w in words[1:]:  # linearity: min distance = min nonzero weight
        wt = sum(1 for x in w if x)
        if best is None or wt < best:
            best = wt
    if best is None:
        raise ValueError("code has a single codeword")
    return Fraction(best, code.n)


def singleton_limit(rate: Fraction, list_bound: int) -> Fraction:
    """Radius ceiling L/(L+1) * (1 - R) for any rate-R linear code."""
    return Fraction(list_bound, list_bound + 1) * (1 - rate)
