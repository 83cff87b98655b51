"""Agreement-constraint matrices for set systems over a generator matrix.

For a system of t subsets of the coordinate range and a generator matrix G
with n rows, each coordinate i lying in at least two member sets contributes
one constraint row per extra membership: the row carries +G_i in the block of
the smallest membership and -G_i in the block of the extra membership (the
block of the last member set is implicit and omitted, since its unknown is
pinned to zero).  Rows are ordered by (coordinate, extra-membership) and the
matrix has weight(system) rows and (t-1)*k columns.

A nonzero kernel of the evaluated matrix is exactly a witness that some list
of codewords agrees with a common center along the system's sets, which is
what `witness_from_violation` extracts from a concrete decoding violation,
and what `embed_kernel_vector` transports into the kernel of the staircase
block matrix of a parity check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .gf import FieldCtx, FieldElement
from .linalg import (
    FieldMatrix,
    PolyMatrix,
    is_zero_matrix,
    matmul_field,
    matvec_field,
    rank_field,
    staircase_matrix,
)
from .mpoly import MultiPoly
from .rscode import PuncturedRSCode, dual_diag, message_from_codeword, points_vandermonde
from .setsys import SetSystem, memberships, weight


class CoverageViolated(ValueError):
    """The member sets do not cover the whole coordinate range."""


class NotInKernel(ValueError):
    """Claimed kernel vector fails the exact matrix-vector check."""


class NotAViolation(ValueError):
    """The words do not violate decodability within the allowed radius."""


class NoAdmissibleS(ValueError):
    """No subfamily reaches the weight threshold (a precondition breach)."""


@dataclass(frozen=True)
class RowOrigin:
    ground: int              # coordinate whose generator row fills the blocks
    pos: int                 # 1-based index among this coordinate's rows
    plus_block: int          # block holding +G_row (the smallest membership)
    minus_block: int | None  # block holding -G_row; None when paired with the last set


@dataclass
class ReducedIntersectionMatrix:
    system: SetSystem
    k: int
    matrix: PolyMatrix | FieldMatrix
    origins: tuple[RowOrigin, ...]
    points: tuple[FieldElement, ...] | None  # None for the symbolic form

    @property
    def symbolic(self) -> bool:
        return self.points is None

    @property
    def ncols(self) -> int:
        return self.matrix.ncols

    @property
    def nrows(self) -> int:
        return self.matrix.nrows


def _row_plan(system: SetSystem) -> list[RowOrigin]:
    t = system.t
    plan = []
    for i, mem in enumerate(memberships(system)):
        js = sorted(mem)
        if len(js) < 2:
            continue
        j1 = js[0]
        for pos, ju in enumerate(js[1:], start=1):
            plan.append(RowOrigin(i, pos, j1, ju if ju != t - 1 else None))
    return plan


def build_rim(
    system: SetSystem,
    k: int,
    *,
    ctx: FieldCtx | None = None,
    points: Sequence[FieldElement] | None = None,
) -> ReducedIntersectionMatrix:
    """Construct the constraint matrix, symbolic (over ctx) or evaluated (at points)."""
    if (ctx is None) == (points is None):
        raise ValueError("provide exactly one of ctx (symbolic) or points (evaluated)")
    t = system.t
    cols = (t - 1) * k
    plan = _row_plan(system)
    if points is not None:
        pctx = points[0].ctx
        if len(points) != system.n:
            raise ValueError("need one evaluation point per coordinate")
        gen = points_vandermonde(pctx, [p.rep for p in points], k)
        return ReducedIntersectionMatrix(
            system, k, _fill_field(pctx, plan, gen, t, k), tuple(plan), tuple(points)
        )
    n = system.n
    rows = []
    for o in plan:
        row = [MultiPoly.zero(ctx, n)] * cols
        for e in range(k):
            mono = MultiPoly.monomial(ctx, n, o.ground, e)
            row[o.plus_block * k + e] = mono
            if o.minus_block is not None:
                row[o.minus_block * k + e] = -mono
        rows.append(row)
    mat = PolyMatrix(ctx, n, len(rows), cols, rows)
    return ReducedIntersectionMatrix(system, k, mat, tuple(plan), None)


def build_rim_from_matrix(system: SetSystem, gen: FieldMatrix) -> ReducedIntersectionMatrix:
    """Evaluated constraint matrix for an arbitrary generator matrix."""
    if gen.nrows != system.n:
        raise ValueError("generator must have one row per coordinate")
    t, k = system.t, gen.ncols
    plan = _row_plan(system)
    return ReducedIntersectionMatrix(
        system, k, _fill_field(gen.ctx, plan, gen, t, k), tuple(plan), None
    )


def _fill_field(ctx, plan, gen: FieldMatrix, t: int, k: int) -> FieldMatrix:
    cols = (t - 1) * k
    rows = []
    for o in plan:
        row = [0] * cols
        src = gen.data[o.ground]
        base = o.plus_block * k
        row[base : base + k] = src
        if o.minus_block is not None:
            base = o.minus_block * k
            for e in range(k):
                row[base + e] = ctx.neg(src[e])
        rows.append(row)
    return FieldMatrix(ctx, len(rows), cols, rows)


def delete_rows(rim: ReducedIntersectionMatrix, removed: Sequence[int]) -> ReducedIntersectionMatrix:
    """Drop every row whose coordinate lies in `removed`.

    Structurally identical to rebuilding on the system with those coordinates
    deleted from every member set; this is asserted, not assumed.
    """
    removed_set = set(removed)
    keep = [idx for idx, o in enumerate(rim.origins) if o.ground not in removed_set]
    sub_system = SetSystem(rim.system.n, tuple(s - removed_set for s in rim.system.sets))
    mat = rim.matrix.submatrix(keep, range(rim.ncols))
    out = ReducedIntersectionMatrix(
        sub_system, rim.k, mat, tuple(rim.origins[i] for i in keep), rim.points
    )
    if rim.points is not None:
        rebuilt = build_rim(sub_system, rim.k, points=rim.points)
    else:
        rebuilt = build_rim(sub_system, rim.k, ctx=rim.matrix.ctx)
    if rebuilt.matrix != out.matrix:
        raise AssertionError("row deletion disagrees with rebuilding on the reduced system")
    return out


def evaluate_rim(rim: ReducedIntersectionMatrix, points: Sequence[FieldElement]) -> ReducedIntersectionMatrix:
    """Substitute concrete points into the symbolic form."""
    if not rim.symbolic:
        raise ValueError("matrix is already evaluated")
    return build_rim(rim.system, rim.k, points=tuple(points))


# ---------------------------------------------------------------------------
# Kernel embedding into the staircase matrix of a parity check.
# ---------------------------------------------------------------------------


def duality_pair(points: Sequence[FieldElement], k: int) -> tuple[FieldMatrix, FieldMatrix]:
    """A full-column-rank generator and a parity matrix with parity @ gen = 0.

    The generator is the k-column power matrix with row i scaled by the dual
    diagonal entry; the parity matrix is the transposed (n-k)-column power
    matrix on the same points.
    """
    ctx = points[0].ctx
    n = len(points)
    reps = [p.rep for p in points]
    scal = dual_diag(points)
    v = points_vandermonde(ctx, reps, k)
    gen = FieldMatrix(
        ctx, n, k, [[ctx.mul(scal[i].rep, v.data[i][j]) for j in range(k)] for i in range(n)]
    )
    parity = points_vandermonde(ctx, reps, n - k).transpose()
    return gen, parity


def embed_kernel_vector(
    system: SetSystem,
    gen: FieldMatrix,
    parity: FieldMatrix,
    x: Sequence[int],
) -> list[int]:
    """Map a kernel vector of the constraint matrix into the kernel of the
    staircase matrix built from the parity rows on the complement sets.

    Construction: coordinate i is routed to its smallest containing member
    set; phi(x) stacks those generator-row contractions; block j of the image
    is (phi(x) - G x_j) restricted to the complement of member set j, with the
    first block negated.
    """
    ctx = gen.ctx
    n, k, t = gen.nrows, gen.ncols, system.t
    if system.n != n:
        raise ValueError("system ground size must match the generator rows")
    covered = set()
    for s in system.sets:
        covered |= s
    if covered != set(range(n)):
        raise CoverageViolated("member sets must cover every coordinate")
    if not is_zero_matrix(matmul_field(parity, gen)):
        raise ValueError("parity @ gen must vanish")
    if rank_field(gen) != k:
        raise ValueError("generator must have full column rank")
    if len(x) != (t - 1) * k:
        raise ValueError("vector length must be (t-1)*k")
    r = build_rim_from_matrix(system, gen)
    if any(matvec_field(r.matrix, list(x))):
        raise NotInKernel("x is not in the kernel of the constraint matrix")

    blocks = [list(x[j * k : (j + 1) * k]) for j in range(t - 1)] + [[0] * k]
    smallest = [min(m) for m in memberships(system)]
    mul, add, sub = ctx.mul, ctx.add, ctx.sub
    phi = []
    for i in range(n):
        row = gen.data[i]
        xb = blocks[smallest[i]]
        acc = 0
        for a, b in zip(row, xb):
            if a and b:
                acc = add(acc, mul(a, b))
        phi.append(acc)
    out: list[int] = []
    for j in range(t):
        comp = [i for i in range(n) if i not in system.sets[j]]
        xb = blocks[j]
        for i in comp:
            row = gen.data[i]
            acc = phi[i]
            for a, b in zip(row, xb):
                if a and b:
                    acc = sub(acc, mul(a, b))
            out.append(ctx.neg(acc) if j == 0 else acc)
    return out


def verify_embedding(
    system: SetSystem, gen: FieldMatrix, parity: FieldMatrix, x: Sequence[int]
) -> bool:
    """Exact check: the image lies in the staircase kernel, and a nonzero
    input cannot map to zero."""
    psi = embed_kernel_vector(system, gen, parity, x)
    comp_sets = [sorted(set(range(gen.nrows)) - s) for s in system.sets]
    stair = staircase_matrix(parity, comp_sets)
    if any(matvec_field(stair, psi)):
        return False
    if any(x) and not any(psi):
        return False
    return True


# ---------------------------------------------------------------------------
# Witness extraction from a concrete decoding violation.
# ---------------------------------------------------------------------------


@dataclass
class ViolationWitness:
    system: SetSystem                 # the reindexed minimal subfamily on [n]
    vector: list[int]                 # nonzero kernel vector of the evaluated matrix
    subset: tuple[int, ...]           # positions of the chosen words in the input list
    t: int
    slack: Fraction                   # slack the admissibility conditions hold for
    average: Fraction                 # exact average relative distance to the center
    rim: ReducedIntersectionMatrix    # evaluated constraint matrix the vector kills


def max_witness_slack(n: int, k: int, list_size: int, average: Fraction) -> Fraction:
    """Largest slack for which an average distance fits under the witness radius."""
    return Fraction(n, k) - average * n * (list_size + 1) / Fraction(list_size * k) - 1


def witness_from_violation(
    code: PuncturedRSCode,
    center: Sequence[FieldElement],
    words: Sequence[Sequence[FieldElement]],
    slack: Fraction | None = None,
) -> ViolationWitness:
    """From words violating average-radius decodability, extract a minimal
    subfamily of agreement sets and a nonzero kernel vector of its constraint
    matrix, verified exactly.

    When slack is omitted, the largest slack some subfamily's weight supports
    is used, so the returned admissibility conditions are as strong as the
    tuple allows; it can be negative for codes whose pairwise agreements are
    structurally capped below k.  The subfamily is the smallest-cardinality
    qualifying subset, ties broken lexicographically; it is inclusion-minimal,
    which is what makes the proper-subfamily caps hold.
    """
    n, k = code.n, code.k
    ctx = code.ctx
    count = len(words)
    if count < 2:
        raise NotAViolation("need at least two words")
    if len(center) != n or any(len(w) != n for w in words):
        raise NotAViolation("center and words must have the code's block length")
    word_reps = [tuple(ctx.element(x).rep for x in w) for w in words]
    if len(set(word_reps)) != count:
        raise NotAViolation("codewords must be pairwise distinct")
    center_reps = [ctx.element(x).rep for x in center]
    lsz = count - 1

    agree = [frozenset(i for i in range(n) if w[i] == center_reps[i]) for w in word_reps]
    total_dist = sum(n - len(a) for a in agree)
    average = Fraction(total_dist, count * n)

    subfamily_weight: dict[tuple[int, ...], int] = {}
    for size in range(2, count + 1):
        for combo in combinations(range(count), size):
            union: set[int] = set()
            tot = 0
            for j in combo:
                tot += len(agree[j])
                union |= agree[j]
            subfamily_weight[combo] = tot - len(union)

    if slack is None:
        best = max(
            (Fraction(w, (len(c) - 1) * k) for c, w in subfamily_weight.items()),
            default=Fraction(0),
        )
        if best <= 0:
            raise NoAdmissibleS("agreement sets carry no overlap weight")
        slack = best - 1
    else:
        slack = Fraction(slack)
        cap = Fraction(lsz, lsz + 1) * Fraction(n - (1 + slack) * k, n)
        if average > cap:
            raise NotAViolation(f"average distance {average} exceeds the radius cap {cap}")

    threshold = 1 + slack
    chosen: tuple[int, ...] | None = None
    for size in range(2, count + 1):
        for combo in combinations(range(count), size):
            if subfamily_weight[combo] >= threshold * (size - 1) * k:
                chosen = combo
                break
        if chosen:
            break
    if chosen is None:
        raise NoAdmissibleS("no subfamily reaches the weight threshold")

    t = len(chosen)
    system = SetSystem(n, tuple(agree[j] for j in chosen))
    messages = [
        [m.rep for m in message_from_codeword(code, [FieldElement(ctx, r) for r in word_reps[j]])]
        for j in chosen
    ]
    last = messages[-1]
    vec: list[int] = []
    for mj in messages[:-1]:
        vec.extend(ctx.sub(a, b) for a, b in zip(mj, last))
    r = build_rim(system, k, points=code.points)
    if any(matvec_field(r.matrix, vec)):
        raise AssertionError("witness vector fails the exact kernel check")
    if not any(vec):
        raise AssertionError("witness vector is zero despite distinct codewords")
    return ViolationWitness(system, vec, chosen, t, slack, average, r)
