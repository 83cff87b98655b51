"""Indexed families of subsets of the coordinate set, and their overlap weight.

The weight of a subfamily is the total size minus the union size: the number
of "excess" memberships, which is exactly how many constraint rows the family
contributes.  A family is admissible for dimension k and slack s when the
whole family has weight at least (1+s)(t-1)k while every proper nonempty
subfamily J stays at or below (1+s)(|J|-1)k.  All comparisons are exact
rational arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence


class EmptyJ(ValueError):
    """Weight of an empty subfamily requested."""


class SearchSpaceTooLarge(ValueError):
    """Exhaustive enumeration would exceed the configured guard."""


@dataclass(frozen=True)
class SetSystem:
    n: int
    sets: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        if len(self.sets) < 2:
            raise ValueError("a set system needs at least two member sets")
        for s in self.sets:
            if not isinstance(s, frozenset):
                raise TypeError("member sets must be frozensets")
            if any(not 0 <= i < self.n for i in s):
                raise ValueError("member sets must be subsets of range(n)")

    @property
    def t(self) -> int:
        return len(self.sets)

    @staticmethod
    def of(n: int, sets: Iterable[Iterable[int]]) -> "SetSystem":
        return SetSystem(n, tuple(frozenset(s) for s in sets))

    def masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << i for i in s) for s in self.sets)

    def to_json(self) -> dict:
        return {"n": self.n, "t": self.t, "sets": [sorted(s) for s in self.sets]}

    @staticmethod
    def from_json(obj: dict | str) -> "SetSystem":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return SetSystem.of(obj["n"], obj["sets"])


def weight(system: SetSystem, indices: Iterable[int] | None = None) -> int:
    """Sum of member sizes minus union size over the chosen subfamily."""
    if indices is None:
        chosen = list(range(system.t))
    else:
        chosen = sorted(set(indices))
        if not chosen:
            raise EmptyJ("weight of the empty subfamily is undefined")
        if chosen[0] < 0 or chosen[-1] >= system.t:
            raise IndexError("subfamily indices out of range")
    union: set[int] = set()
    total = 0
    for j in chosen:
        total += len(system.sets[j])
        union |= system.sets[j]
    return total - len(union)


def memberships(system: SetSystem) -> tuple[frozenset[int], ...]:
    """For each ground element, the indices of the member sets containing it."""
    out: list[set[int]] = [set() for _ in range(system.n)]
    for j, s in enumerate(system.sets):
        for i in s:
            out[i].add(j)
    return tuple(frozenset(s) for s in out)


def system_from_memberships(n: int, member: Sequence[Iterable[int]], t: int) -> SetSystem:
    """Inverse of memberships: rebuild the family from per-element index sets."""
    sets: list[set[int]] = [set() for _ in range(t)]
    for i, js in enumerate(member):
        for j in js:
            sets[j].add(i)
    return SetSystem.of(n, sets)


@dataclass(frozen=True)
class AdmissibilityReport:
    weight_total: int
    lower_ok: bool            # whole family reaches (1+slack)(t-1)k
    proper_ok: bool           # every proper nonempty subfamily stays within its cap
    violating: tuple[int, ...] | None
    slack: Fraction
    k: int

    @property
    def satisfied(self) -> bool:
        return self.lower_ok and self.proper_ok


def check_admissible(system: SetSystem, k: int, slack: Fraction | int) -> AdmissibilityReport:
    """Evaluate both admissibility conditions with exact rational arithmetic.

    Slack may be any rational greater than -1; the usual regime is >= 0, but
    per-violation witnesses use the largest slack a tuple supports, which can
    be negative for codes whose pairwise agreements are capped below k.
    """
    slack = Fraction(slack)
    if slack <= -1:
        raise ValueError("slack must exceed -1")
    t = system.t
    scale = 1 + slack
    wt_total = weight(system)
    lower_ok = wt_total >= scale * (t - 1) * k
    proper_ok = True
    violating: tuple[int, ...] | None = None
    # proper nonempty subfamilies, smallest first so the report pinpoints one
    for size in range(1, t):
        for combo in _combinations(t, size):
            if weight(system, combo) > scale * (size - 1) * k:
                proper_ok = False
                violating = combo
                break
        if not proper_ok:
            break
    return AdmissibilityReport(wt_total, lower_ok, proper_ok, violating, slack, k)


def _combinations(t: int, size: int) -> Iterator[tuple[int, ...]]:
    import itertools

    return itertools.combinations(range(t), size)


def enumerate_admissible(
    n: int, k: int, t: int, slack: Fraction | int, guard: int = 24
) -> Iterator[SetSystem]:
    """Every admissible system on range(n), exactly once, in ascending order
    of the tuple of characteristic masks (bit i of a mask = membership of i).

    No symmetry reduction is applied: permutation-equivalent systems all
    appear.  Guarded by n*t <= guard since the raw space has 2^(n*t) points.
    """
    if t < 2:
        raise ValueError("need t >= 2")
    if n * t > guard:
        raise SearchSpaceTooLarge(f"2^({n}*{t}) candidate systems exceeds the guard {guard}")
    slack = Fraction(slack)
    if slack <= -1:
        raise ValueError("slack must exceed -1")
    den, num = slack.denominator, slack.numerator
    plus = den + num  # (1 + slack) * den
    size = 1 << n
    pc = [x.bit_count() for x in range(size)]
    total_rhs = plus * (t - 1) * k  # want wt*den >= this

    # proper subfamilies containing index t-1 are checked in the leaf loop;
    # those fully inside the prefix are checked as soon as complete
    prefix_checks: list[list[tuple[int, ...]]] = [[] for _ in range(t)]
    leaf_checks: list[tuple[int, ...]] = []
    import itertools

    for sz in range(2, t):
        for combo in itertools.combinations(range(t), sz):
            if combo[-1] == t - 1:
                leaf_checks.append(combo[:-1])
            else:
                prefix_checks[combo[-1]].append(combo)

    masks = [0] * t
    counts = [0] * t

    def level(j: int) -> Iterator[SetSystem]:
        if j == t - 1:
            # loop-invariant data for the leaf checks
            checks = []
            for pre in leaf_checks:
                u = 0
                c = 0
                for i in pre:
                    u |= masks[i]
                    c += counts[i]
                checks.append((c, u, plus * len(pre) * k))
            u_all = 0
            c_all = 0
            for i in range(t - 1):
                u_all |= masks[i]
                c_all += counts[i]
            for mt in range(size):
                ct = pc[mt]
                ok = True
                for c, u, rhs in checks:
                    if (c + ct - pc[u | mt]) * den > rhs:
                        ok = False
                        break
                if not ok:
                    continue
                if (c_all + ct - pc[u_all | mt]) * den < total_rhs:
                    continue
                masks[j] = mt
                yield _system_from_masks(n, masks)
            return
        for mj in range(size):
            masks[j] = mj
            counts[j] = pc[mj]
            ok = True
            for combo in prefix_checks[j]:
                u = 0
                c = 0
                for i in combo:
                    u |= masks[i]
                    c += counts[i]
                if (c - pc[u]) * den > plus * (len(combo) - 1) * k:
                    ok = False
                    break
            if ok:
                yield from level(j + 1)

    return level(0)


def _system_from_masks(n: int, masks: Sequence[int]) -> SetSystem:
    return SetSystem(
        n, tuple(frozenset(i for i in range(n) if m >> i & 1) for m in masks)
    )
