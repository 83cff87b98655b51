"""Full-column-rank certification of evaluated constraint matrices.

The certifier walks up to `rounds` passes.  Each pass checks that the current
row-deleted symbolic matrix still has full column rank (otherwise FAIL),
tracks the lexicographically smallest nonsingular maximal square submatrix,
and substitutes the assignment one variable at a time into its determinant.
If the determinant survives every substitution the evaluated matrix provably
has full column rank (SUCCESS); if it dies at some variable, that faulty
coordinate's rows are deleted and the next pass begins.  After `rounds`
faulty coordinates the certifier gives up and reports them.

Runs against the same (dimension, membership-pattern) class share the
symbolic work through a cache: the symbolic rank, the submatrix selection
and its determinant depend only on the ordered pattern of memberships over
the coordinates that contribute rows, not on which coordinates those are.

Also here: the closed-form per-tuple/union/global failure-probability bounds
and the parameter planner (slack, rounds, radius, required field size) for
the two guarantee modes.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .gf import FieldCtx, FieldElement, lift_for_testing
from .linalg import (
    PolyMatrix,
    _rank_eval_tower,
    det_poly,
    lex_min_nonsingular_rows,
    rank_symbolic,
)
from .mpoly import MultiPoly, is_zero_poly
from .rim import build_rim
from .setsys import SetSystem

SUCCESS = "SUCCESS"
FAIL = "FAIL"
FAULTY_TUPLE = "FAULTY_TUPLE"


class SymbolicallySingular(ValueError):
    """Tracked submatrix is singular before any assignment."""


class QTooSmall(ValueError):
    """Field too small for the bound formulas (need q >= n)."""


class BadEpsilon(ValueError):
    """Gap parameter outside [0, 1)."""


class BadC(ValueError):
    """Confidence exponent must exceed 2."""


@dataclass(frozen=True)
class RoundEvidence:
    round: int
    deleted_before: tuple[int, ...]
    selection: tuple[int, ...]
    faulty: int | None
    det_fingerprint: str


@dataclass
class CertificationOutcome:
    tag: str
    faulty_tuple: tuple[int, ...] | None
    selection: tuple[int, ...] | None        # certifying row set (SUCCESS only)
    rounds: list[RoundEvidence]

    @property
    def is_success(self) -> bool:
        return self.tag == SUCCESS

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "faulty_tuple": list(self.faulty_tuple) if self.faulty_tuple else None,
            "selection": list(self.selection) if self.selection else None,
            "rounds": [
                {
                    "round": e.round,
                    "deleted_before": list(e.deleted_before),
                    "selection": list(e.selection),
                    "faulty": e.faulty,
                    "det_fingerprint": e.det_fingerprint,
                }
                for e in self.rounds
            ],
        }


# ---------------------------------------------------------------------------
# Faulty-index search.
# ---------------------------------------------------------------------------


def faulty_index(
    matrix: PolyMatrix,
    selection: Sequence[int],
    assignment: Sequence[FieldElement | int],
    strategy: str = "symbolic",
    degree_bound: int | None = None,
    trials: int = 3,
    rng: random.Random | None = None,
) -> int | None:
    """First variable whose substitution kills the tracked determinant.

    The determinant of the selected square submatrix is substituted one
    variable at a time in index order; once it collapses to the zero
    polynomial it stays zero, so the answer is the unique flip point, or None
    when the fully assigned determinant is still nonzero.

    symbolic: test zeroness on the explicit term map (exact, default).
    grid: test on a degree-bounded evaluation grid (exact, slower).
    randomized: never expands the determinant; evaluates the partially
        assigned submatrix at random extension points (one-sided).
    """
    if len(assignment) != matrix.nvars:
        raise ValueError("assignment must bind every variable")
    sub = matrix.submatrix(selection, range(matrix.ncols))
    values = [v.rep if isinstance(v, FieldElement) else v for v in assignment]

    if strategy in ("symbolic", "grid"):
        det = det_poly(sub)
        if det.is_zero:
            raise SymbolicallySingular("selected submatrix is singular")
        bound = degree_bound if degree_bound is not None else max(det.max_degree(), 0)
        cur = det
        for i in range(matrix.nvars):
            if cur.degree_in(i) <= 0:
                continue  # this variable cannot flip the determinant
            cur = cur.partial_assign({i: values[i]})
            if strategy == "symbolic":
                dead = cur.is_zero
            else:
                dead = bool(is_zero_poly(cur, "grid", degree_bound=bound))
            if dead:
                return i
        return None

    if strategy == "randomized":
        rng = rng if rng is not None else random.Random(0xFA117)
        tower = lift_for_testing(matrix.ctx)

        def vanishes(bound_vals: dict[int, int]) -> bool:
            assigned = sub.partial_assign(bound_vals)
            for _ in range(max(1, trials)):
                pts = tower.sample_distinct(matrix.nvars, rng)
                if _rank_eval_tower(assigned, tower, pts) == assigned.ncols:
                    return False
            return True

        if vanishes({}):
            raise SymbolicallySingular("selected submatrix looks singular (randomized)")
        bound_vals: dict[int, int] = {}
        for i in range(matrix.nvars):
            bound_vals[i] = values[i]
            if vanishes(dict(bound_vals)):
                return i
        return None

    raise ValueError(f"unknown strategy {strategy!r}")


# ---------------------------------------------------------------------------
# Pattern-class cache.
#
# The ordered tuple of membership sets over the contributing coordinates
# determines the constraint matrix up to renaming its variables by the
# (order-preserving) support compression, so symbolic rank, the lex-min row
# selection and the compressed determinant can be shared across systems.
# ---------------------------------------------------------------------------


@dataclass
class _ClassInfo:
    full_rank: bool
    selection: tuple[int, ...] | None
    det: MultiPoly | None        # in compressed variables (one per support coordinate)
    det_text: str | None


_CLASS_CACHE: dict[tuple, _ClassInfo] = {}


def _pattern_and_support(system: SetSystem, deleted: frozenset[int]) -> tuple[tuple[int, ...], list[int]]:
    t = system.t
    masks = [0] * system.n
    for j, s in enumerate(system.sets):
        for i in s:
            if i not in deleted:
                masks[i] |= 1 << j
    pattern, support = [], []
    for i in range(system.n):
        if masks[i].bit_count() >= 2:
            pattern.append(masks[i])
            support.append(i)
    return tuple(pattern), support


def _class_info(ctx: FieldCtx, k: int, t: int, pattern: tuple[int, ...]) -> _ClassInfo:
    key = (ctx, k, t, pattern)
    info = _CLASS_CACHE.get(key)
    if info is not None:
        return info
    s = len(pattern)
    sets = [frozenset(i for i in range(s) if pattern[i] >> j & 1) for j in range(t)]
    compressed = SetSystem(max(s, 1), tuple(sets))
    r = build_rim(compressed, k, ctx=ctx)
    cols = (t - 1) * k
    if rank_symbolic(r.matrix) < cols:
        info = _ClassInfo(False, None, None, None)
    else:
        sel = lex_min_nonsingular_rows(r.matrix)
        det = det_poly(r.matrix.submatrix(sel, range(cols)))
        info = _ClassInfo(True, sel, det, str(det))
    _CLASS_CACHE[key] = info
    return info


_RANK_CACHE: dict[tuple, bool] = {}


def clear_class_cache() -> None:
    _CLASS_CACHE.clear()
    _RANK_CACHE.clear()


def symbolic_full_rank(ctx: FieldCtx, system: SetSystem, k: int, deleted: Sequence[int] = ()) -> bool:
    """Exact symbolic full-column-rank check of the row-deleted matrix.

    Cached on the sorted membership pattern: permuting coordinates permutes
    rows and renames variables, neither of which changes the rank.
    """
    pattern, _ = _pattern_and_support(system, frozenset(deleted))
    t = system.t
    key = (ctx, k, t, tuple(sorted(pattern)))
    hit = _RANK_CACHE.get(key)
    if hit is None:
        sorted_pattern = key[3]
        s = len(sorted_pattern)
        sets = [frozenset(i for i in range(s) if sorted_pattern[i] >> j & 1) for j in range(t)]
        compressed = SetSystem(max(s, 1), tuple(sets))
        r = build_rim(compressed, k, ctx=ctx)
        hit = rank_symbolic(r.matrix) == (t - 1) * k
        _RANK_CACHE[key] = hit
    return hit


def _fingerprint(support: Sequence[int], det_text: str) -> str:
    h = hashlib.sha256()
    h.update(repr(tuple(support)).encode())
    h.update(det_text.encode())
    return h.hexdigest()[:16]


# ---------------------------------------------------------------------------
# The certifier.
# ---------------------------------------------------------------------------


def certify_full_column_rank(
    system: SetSystem,
    k: int,
    points: Sequence[FieldElement],
    rounds: int,
    strategy: str = "symbolic",
    use_cache: bool = True,
    collect_evidence: bool = True,
) -> CertificationOutcome:
    """Run the row-deletion certification loop on an assignment.

    Returns SUCCESS (with the certifying row selection), FAIL (some
    row-deleted matrix lost full column rank symbolically), or the tuple of
    faulty coordinates found in each round.
    """
    if rounds < 1:
        raise ValueError("need at least one round")
    n = system.n
    if len(points) != n:
        raise ValueError("need one point per coordinate")
    ctx = points[0].ctx
    reps = [p.rep for p in points]
    if len(set(reps)) != n:
        raise ValueError("points must be distinct")
    if use_cache and strategy == "symbolic":
        return _certify_cached(system, k, ctx, reps, rounds, collect_evidence)
    return _certify_direct(system, k, points, rounds, strategy)


def _certify_cached(
    system: SetSystem,
    k: int,
    ctx: FieldCtx,
    reps: Sequence[int],
    rounds: int,
    collect_evidence: bool,
) -> CertificationOutcome:
    t = system.t
    deleted: set[int] = set()
    evidence: list[RoundEvidence] = []
    faulty: list[int] = []
    for rno in range(1, rounds + 1):
        pattern, support = _pattern_and_support(system, frozenset(deleted))
        info = _class_info(ctx, k, t, pattern)
        if not info.full_rank:
            return CertificationOutcome(FAIL, None, None, evidence)
        det = info.det
        flip: int | None = None
        cur = det
        for c, ground in enumerate(support):
            if cur.degree_in(c) <= 0:
                continue
            cur = cur.partial_assign({c: reps[ground]})
            if cur.is_zero:
                flip = ground
                break
        if collect_evidence:
            evidence.append(
                RoundEvidence(
                    rno,
                    tuple(sorted(deleted)),
                    info.selection,
                    flip,
                    _fingerprint(support, info.det_text),
                )
            )
        if flip is None:
            return CertificationOutcome(SUCCESS, None, info.selection, evidence)
        faulty.append(flip)
        deleted.add(flip)
    return CertificationOutcome(FAULTY_TUPLE, tuple(faulty), None, evidence)


def _certify_direct(
    system: SetSystem,
    k: int,
    points: Sequence[FieldElement],
    rounds: int,
    strategy: str,
) -> CertificationOutcome:
    """Literal uncached loop composed from the public operations."""
    ctx = points[0].ctx
    t = system.t
    cols = (t - 1) * k
    deleted: set[int] = set()
    evidence: list[RoundEvidence] = []
    faulty: list[int] = []
    for rno in range(1, rounds + 1):
        sub_system = SetSystem(system.n, tuple(s - deleted for s in system.sets))
        r = build_rim(sub_system, k, ctx=ctx)
        if rank_symbolic(r.matrix) < cols:
            return CertificationOutcome(FAIL, None, None, evidence)
        sel = lex_min_nonsingular_rows(r.matrix)
        det_text = str(det_poly(r.matrix.submatrix(sel, range(cols))))
        flip = faulty_index(r.matrix, sel, points, strategy=strategy)
        evidence.append(
            RoundEvidence(rno, tuple(sorted(deleted)), sel, flip, _fingerprint(range(system.n), det_text))
        )
        if flip is None:
            return CertificationOutcome(SUCCESS, None, sel, evidence)
        faulty.append(flip)
        deleted.add(flip)
    return CertificationOutcome(FAULTY_TUPLE, tuple(faulty), None, evidence)


# ---------------------------------------------------------------------------
# Closed-form failure bounds.
# ---------------------------------------------------------------------------


@dataclass
class BoundReport:
    t: int
    n: int
    k: int
    q: int
    rounds: int
    per_tuple: Fraction           # one fixed faulty sequence
    union: Fraction               # any faulty sequence
    global_log2: float | None     # log2 of the all-systems union bound
    global_float: float | None
    global_exact: Fraction | None

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "n": self.n,
            "k": self.k,
            "q": self.q,
            "rounds": self.rounds,
            "per_tuple": str(self.per_tuple),
            "union": str(self.union),
            "global_log2": self.global_log2,
            "global_float": self.global_float,
            "global_exact": str(self.global_exact) if self.global_exact is not None else None,
        }


def failure_bound(
    t: int,
    n: int,
    k: int,
    q: int,
    rounds: int,
    list_size: int | None = None,
    eps: Fraction | None = None,
) -> BoundReport:
    """Exact rational failure-probability bounds for the certifier.

    per_tuple bounds the probability of one fixed r-tuple of faulty
    coordinates; union multiplies by the n^r choices.  When list_size and eps
    are supplied, the report also carries the all-systems bound
    2^((L+2)n) * (L*n*(k-1)/(q-n+1))^(eps*n/L) as a log2/float pair (and
    exactly, whenever the exponent is an integer).
    """
    if rounds < 1:
        raise ValueError("need at least one round")
    if q < n:
        raise QTooSmall(f"need q >= n, got q={q}, n={n}")
    denom = q - n + 1
    per_tuple = Fraction((t - 1) * (k - 1), denom) ** rounds
    union = Fraction((t - 1) * n * (k - 1), denom) ** rounds
    global_log2 = global_float = global_exact = None
    if list_size is not None and eps is not None:
        eps = Fraction(eps)
        base = Fraction(list_size * n * (k - 1), denom)
        exponent = eps * n / list_size
        if base == 0:
            global_log2, global_float, global_exact = None, 0.0, Fraction(0)
        else:
            global_log2 = (list_size + 2) * n + float(exponent) * math.log2(base)
            global_float = 2.0**global_log2 if global_log2 < 1024 else math.inf
            if exponent.denominator == 1:
                global_exact = Fraction(2) ** ((list_size + 2) * n) * base ** int(exponent)
    return BoundReport(t, n, k, q, rounds, per_tuple, union, global_log2, global_float, global_exact)


# ---------------------------------------------------------------------------
# Parameter planning.
# ---------------------------------------------------------------------------


@dataclass
class ParamPlan:
    mode: str
    n: int
    k: int
    list_size: int
    eps: Fraction
    c: Fraction
    delta: Fraction | None
    slack: Fraction
    rounds_by_t: dict[int, int]
    radius: Fraction
    required_q: int | None        # None when eps = 0 (no finite closed form)

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "n": self.n,
            "k": self.k,
            "list_size": self.list_size,
            "eps": str(self.eps),
            "c": str(self.c),
            "delta": str(self.delta) if self.delta is not None else None,
            "slack": str(self.slack),
            "rounds_by_t": {str(t): r for t, r in self.rounds_by_t.items()},
            "radius": str(self.radius),
            "required_q": self.required_q,
        }


def _nth_root_ceil(x: int, b: int) -> int:
    """Smallest M with M**b >= x (exact integer arithmetic)."""
    if x <= 0:
        return 0
    if b == 1:
        return x
    hi = 1 << ((x.bit_length() + b - 1) // b + 1)
    lo = 0
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**b >= x:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _required_q(list_size: int, c: Fraction, eff_eps: Fraction, n: int, k: int) -> int | None:
    if eff_eps == 0:
        return None
    core = list_size * n * (k - 1)
    if core == 0:
        return n
    exponent = Fraction(list_size) * (list_size + c) / eff_eps
    a, b = exponent.numerator, exponent.denominator
    return _nth_root_ceil((1 << a) * core**b, b) + n


def certification_params(
    mode: str,
    *,
    eps: Fraction | int,
    c: Fraction | int,
    n: int,
    k: int,
    list_size: int | None = None,
    delta: Fraction | None = None,
) -> ParamPlan:
    """Plan slack, per-t rounds, decoding radius and the field-size threshold.

    mode "main": fixed list size; the radius is L/(L+1) * (1 - R - eps) and
        the slack is eps*n/k (eps = 0 is allowed: slack 0, one round, no
        finite field-size formula).
    mode "capacity": radius 1 - R - eps; the list size is derived from eps
        and the split parameter delta, and the slack uses delta*eps.
    """
    eps = Fraction(eps)
    c = Fraction(c)
    if not 0 <= eps < 1:
        raise BadEpsilon(f"eps must lie in [0, 1), got {eps}")
    if c <= 2:
        raise BadC(f"confidence exponent must exceed 2, got {c}")
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    rate = Fraction(k, n)

    if mode == "main":
        if list_size is None or list_size < 1:
            raise ValueError("main mode needs a positive list size")
        eff_eps = eps
        radius = Fraction(list_size, list_size + 1) * (1 - rate - eps)
        dlt = None
    elif mode == "capacity":
        if delta is None:
            raise ValueError("capacity mode needs delta")
        dlt = Fraction(delta)
        if not 0 < dlt < 1:
            raise ValueError("delta must lie in (0, 1)")
        if eps == 0:
            raise BadEpsilon("capacity mode needs eps > 0")
        list_size = max(math.ceil(Fraction(1 - rate, (1 - dlt) * eps)) - 1, 1)
        eff_eps = dlt * eps
        radius = 1 - rate - eps
    else:
        raise ValueError(f"unknown mode {mode!r}")

    slack = eff_eps * n / Fraction(k)
    rounds_by_t = {
        t: math.floor(slack * k / (t - 1) + 1) for t in range(2, list_size + 2)
    }
    return ParamPlan(
        mode, n, k, list_size, eps, c, dlt, slack, rounds_by_t, radius,
        _required_q(list_size, c, eff_eps, n, k),
    )
