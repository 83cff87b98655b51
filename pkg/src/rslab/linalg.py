"""Exact linear algebra over a finite field and over its polynomial ring.

Field matrices store raw element codes; polynomial matrices store
:class:`~rslab.mpoly.MultiPoly` entries sharing one (context, nvars) pair.
Row/column counts are stored explicitly so degenerate 0-row matrices (which
occur naturally here) round-trip cleanly.

Symbolic elimination uses cross-multiplication pivoting, which needs no
fraction field and is exact over the polynomial ring; entries grow, but all
matrices in this package are small.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .gf import FieldCtx, TowerField, lift_for_testing
from .mpoly import MultiPoly


class NotSquare(ValueError):
    """Determinant of a non-square matrix requested."""


class NotFullColumnRank(ValueError):
    """Operation requires a matrix of full column rank."""


class MethodMismatch(AssertionError):
    """Two supposedly-equivalent computations disagreed (an implementation bug)."""


class TooManyBlocks(ValueError):
    """Partition enumeration requested beyond the configured cap."""


# ---------------------------------------------------------------------------
# Matrix containers.
# ---------------------------------------------------------------------------


@dataclass
class FieldMatrix:
    ctx: FieldCtx
    nrows: int
    ncols: int
    data: list[list[int]]

    def __post_init__(self) -> None:
        if len(self.data) != self.nrows or any(len(r) != self.ncols for r in self.data):
            raise ValueError("matrix dimensions do not match storage")

    @classmethod
    def from_rows(cls, ctx: FieldCtx, rows: Sequence[Sequence[int]], ncols: int | None = None):
        rows = [list(r) for r in rows]
        if ncols is None:
            if not rows:
                raise ValueError("cannot infer width of an empty matrix")
            ncols = len(rows[0])
        return cls(ctx, len(rows), ncols, rows)

    @classmethod
    def zeros(cls, ctx: FieldCtx, nrows: int, ncols: int):
        return cls(ctx, nrows, ncols, [[0] * ncols for _ in range(nrows)])

    @classmethod
    def identity(cls, ctx: FieldCtx, n: int):
        m = cls.zeros(ctx, n, n)
        for i in range(n):
            m.data[i][i] = 1
        return m

    def copy(self) -> "FieldMatrix":
        return FieldMatrix(self.ctx, self.nrows, self.ncols, [r[:] for r in self.data])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "FieldMatrix":
        data = [[self.data[i][j] for j in cols] for i in rows]
        return FieldMatrix(self.ctx, len(rows), len(cols), data)

    def transpose(self) -> "FieldMatrix":
        data = [[self.data[i][j] for i in range(self.nrows)] for j in range(self.ncols)]
        return FieldMatrix(self.ctx, self.ncols, self.nrows, data)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldMatrix)
            and self.ctx == other.ctx
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.data == other.data
        )


@dataclass
class PolyMatrix:
    ctx: FieldCtx
    nvars: int
    nrows: int
    ncols: int
    data: list[list[MultiPoly]]

    def __post_init__(self) -> None:
        if len(self.data) != self.nrows or any(len(r) != self.ncols for r in self.data):
            raise ValueError("matrix dimensions do not match storage")
        for row in self.data:
            for e in row:
                if e.ctx != self.ctx or e.nvars != self.nvars:
                    raise ValueError("entries must share the matrix context")

    @classmethod
    def from_rows(cls, ctx: FieldCtx, nvars: int, rows, ncols: int | None = None):
        rows = [list(r) for r in rows]
        if ncols is None:
            if not rows:
                raise ValueError("cannot infer width of an empty matrix")
            ncols = len(rows[0])
        return cls(ctx, nvars, len(rows), ncols, rows)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        data = [[self.data[i][j] for j in cols] for i in rows]
        return PolyMatrix(self.ctx, self.nvars, len(rows), len(cols), data)

    def partial_assign(self, bindings) -> "PolyMatrix":
        data = [[e.partial_assign(bindings) for e in row] for row in self.data]
        return PolyMatrix(self.ctx, self.nvars, self.nrows, self.ncols, data)

    def evaluate(self, point) -> FieldMatrix:
        data = [[e.evaluate(point) for e in row] for row in self.data]
        return FieldMatrix(self.ctx, self.nrows, self.ncols, data)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PolyMatrix)
            and self.ctx == other.ctx
            and self.nvars == other.nvars
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.data == other.data
        )

    def text_grid(self) -> str:
        """Canonical text dump: one row per line, entries separated by ' | '."""
        return "\n".join(" | ".join(str(e) for e in row) for row in self.data)


# ---------------------------------------------------------------------------
# Field-matrix computations.
# ---------------------------------------------------------------------------


def rank_field(mat: FieldMatrix) -> int:
    ctx = mat.ctx
    mul, sub, inv = ctx.mul, ctx.sub, ctx.inv
    a = [row[:] for row in mat.data]
    m, n = mat.nrows, mat.ncols
    rank = 0
    for c in range(n):
        piv = None
        for r in range(rank, m):
            if a[r][c]:
                piv = r
                break
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        pr = a[rank]
        pinv = inv(pr[c])
        for r in range(rank + 1, m):
            f = a[r][c]
            if f:
                f = mul(f, pinv)
                ar = a[r]
                for j in range(c, n):
                    ar[j] = sub(ar[j], mul(f, pr[j]))
        rank += 1
        if rank == m:
            break
    return rank


def kernel_field(mat: FieldMatrix) -> list[list[int]]:
    """Basis of the right kernel; every vector satisfies M v = 0 exactly."""
    ctx = mat.ctx
    mul, sub, inv, neg = ctx.mul, ctx.sub, ctx.inv, ctx.neg
    a = [row[:] for row in mat.data]
    m, n = mat.nrows, mat.ncols
    piv_cols: list[int] = []
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, m):
            if a[i][c]:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        s = inv(a[r][c])
        a[r] = [mul(s, x) for x in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                ai = a[i]
                ar = a[r]
                for j in range(n):
                    ai[j] = sub(ai[j], mul(f, ar[j]))
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    basis = []
    piv_set = set(piv_cols)
    for free in range(n):
        if free in piv_set:
            continue
        v = [0] * n
        v[free] = 1
        for row_idx, c in enumerate(piv_cols):
            v[c] = neg(a[row_idx][free])
        basis.append(v)
    return basis


def det_field(mat: FieldMatrix) -> int:
    if mat.nrows != mat.ncols:
        raise NotSquare("determinant of a non-square matrix")
    ctx = mat.ctx
    mul, sub, inv = ctx.mul, ctx.sub, ctx.inv
    a = [row[:] for row in mat.data]
    n = mat.nrows
    det = 1
    for c in range(n):
        piv = None
        for r in range(c, n):
            if a[r][c]:
                piv = r
                break
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = ctx.neg(det)
        det = mul(det, a[c][c])
        pinv = inv(a[c][c])
        pr = a[c]
        for r in range(c + 1, n):
            f = a[r][c]
            if f:
                f = mul(f, pinv)
                ar = a[r]
                for j in range(c, n):
                    ar[j] = sub(ar[j], mul(f, pr[j]))
    return det


def matmul_field(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    if a.ncols != b.nrows:
        raise ValueError("inner dimensions disagree")
    ctx = a.ctx
    mul, add = ctx.mul, ctx.add
    out = [[0] * b.ncols for _ in range(a.nrows)]
    for i in range(a.nrows):
        ai = a.data[i]
        oi = out[i]
        for kk in range(a.ncols):
            f = ai[kk]
            if f:
                bk = b.data[kk]
                for j in range(b.ncols):
                    if bk[j]:
                        oi[j] = add(oi[j], mul(f, bk[j]))
    return FieldMatrix(ctx, a.nrows, b.ncols, out)


def matvec_field(mat: FieldMatrix, v: Sequence[int]) -> list[int]:
    if len(v) != mat.ncols:
        raise ValueError("vector length must equal the column count")
    ctx = mat.ctx
    mul, add = ctx.mul, ctx.add
    out = []
    for row in mat.data:
        acc = 0
        for x, y in zip(row, v):
            if x and y:
                acc = add(acc, mul(x, y))
        out.append(acc)
    return out


def is_zero_matrix(mat: FieldMatrix) -> bool:
    return all(not x for row in mat.data for x in row)


def solve_field(mat: FieldMatrix, rhs: Sequence[int]) -> list[int]:
    """Solve M x = rhs for square nonsingular M."""
    if mat.nrows != mat.ncols:
        raise NotSquare("solve requires a square matrix")
    ctx = mat.ctx
    mul, sub, inv = ctx.mul, ctx.sub, ctx.inv
    n = mat.nrows
    a = [row[:] + [rhs[i]] for i, row in enumerate(mat.data)]
    for c in range(n):
        piv = None
        for r in range(c, n):
            if a[r][c]:
                piv = r
                break
        if piv is None:
            raise NotFullColumnRank("singular system")
        a[c], a[piv] = a[piv], a[c]
        s = inv(a[c][c])
        a[c] = [mul(s, x) for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [sub(x, mul(f, y)) for x, y in zip(a[r], a[c])]
    return [a[i][n] for i in range(n)]


# ---------------------------------------------------------------------------
# Polynomial-matrix computations.
# ---------------------------------------------------------------------------


def det_poly(mat: PolyMatrix) -> MultiPoly:
    """Exact symbolic determinant via expansion by minors, memoized on column sets."""
    if mat.nrows != mat.ncols:
        raise NotSquare("determinant of a non-square matrix")
    n = mat.nrows
    ctx, nvars = mat.ctx, mat.nvars
    if n == 0:
        return MultiPoly.const(ctx, nvars, 1)
    memo: dict[int, MultiPoly] = {0: MultiPoly.const(ctx, nvars, 1)}

    def minor(colmask: int, depth: int) -> MultiPoly:
        # determinant of the top `depth` rows restricted to the columns in colmask
        cached = memo.get(colmask)
        if cached is not None:
            return cached
        row = mat.data[depth - 1]
        acc = MultiPoly.zero(ctx, nvars)
        sign = bool((depth - 1) & 1)  # cofactor parity for the expansion row
        rest = colmask
        while rest:
            low = rest & -rest
            j = low.bit_length() - 1
            rest ^= low
            e = row[j]
            if not e.is_zero:
                term = e * minor(colmask ^ low, depth - 1)
                acc = acc - term if sign else acc + term
            sign = not sign
        memo[colmask] = acc
        return acc

    return minor((1 << n) - 1, n)


def rank_symbolic(
    mat: PolyMatrix,
    strategy: str = "symbolic",
    rng: random.Random | None = None,
    trials: int = 3,
    min_ext_order: int = 1 << 20,
) -> int:
    """Rank over the rational function field.

    symbolic: exact cross-multiplication elimination.
    randomized-eval: evaluate at random distinct points of a large extension
        and take the max field rank over the trials; never exceeds the true
        rank, and equals it with high probability.
    """
    if strategy == "symbolic":
        return _rank_symbolic_exact(mat)
    if strategy == "randomized-eval":
        rng = rng if rng is not None else random.Random(0xE7A1)
        tower = lift_for_testing(mat.ctx, min_ext_order)
        best = 0
        for _ in range(max(1, trials)):
            pts = tower.sample_distinct(mat.nvars, rng)
            best = max(best, _rank_eval_tower(mat, tower, pts))
        return best
    raise ValueError(f"unknown strategy {strategy!r}")


def _rank_symbolic_exact(mat: PolyMatrix) -> int:
    rows = [row[:] for row in mat.data]
    m, n = mat.nrows, mat.ncols
    rank = 0
    for c in range(n):
        piv = None
        for r in range(rank, m):
            if not rows[r][c].is_zero:
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        pe = pr[c]
        for r in range(rank + 1, m):
            e = rows[r][c]
            if not e.is_zero:
                rr = rows[r]
                rows[r] = [pe * rr[j] - e * pr[j] for j in range(n)]
        rank += 1
        if rank == m or rank == n:
            break
    return rank


def _rank_eval_tower(mat: PolyMatrix, tower: TowerField, point) -> int:
    rows = [[e.evaluate_tower(tower, point) for e in row] for row in mat.data]
    m, n = mat.nrows, mat.ncols
    rank = 0
    for c in range(n):
        piv = None
        for r in range(rank, m):
            if not tower.is_zero(rows[r][c]):
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        pe = pr[c]
        for r in range(rank + 1, m):
            e = rows[r][c]
            if not tower.is_zero(e):
                rr = rows[r]
                rows[r] = [tower.sub(tower.mul(pe, rr[j]), tower.mul(e, pr[j])) for j in range(n)]
        rank += 1
        if rank == m or rank == n:
            break
    return rank


def lex_min_nonsingular_rows(mat: PolyMatrix) -> tuple[int, ...]:
    """Lexicographically smallest row set whose square submatrix is nonsingular.

    Greedy scan: a row joins the selection iff it raises the symbolic rank.
    Because row sets independent over the function field form a matroid, the
    greedy selection is exactly the lex-min basis.
    """
    ell = mat.ncols
    selected: list[int] = []
    sel_rows: list[list[MultiPoly]] = []
    for i in range(mat.nrows):
        cand = sel_rows + [mat.data[i]]
        pm = PolyMatrix(mat.ctx, mat.nvars, len(cand), ell, [r[:] for r in cand])
        if _rank_symbolic_exact(pm) == len(cand):
            selected.append(i)
            sel_rows = cand
            if len(selected) == ell:
                return tuple(selected)
    raise NotFullColumnRank(f"matrix has symbolic rank {len(selected)} < {ell}")


# ---------------------------------------------------------------------------
# Subspace intersection dimension, two ways.
# ---------------------------------------------------------------------------


def _column_basis(ctx: FieldCtx, vectors: list[list[int]], height: int) -> list[list[int]]:
    """Independent subset spanning the same column space (pivot columns)."""
    if not vectors:
        return []
    mul, sub, inv = ctx.mul, ctx.sub, ctx.inv
    a = [[v[i] for v in vectors] for i in range(height)]
    m, n = height, len(vectors)
    piv_cols = []
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, m):
            if a[i][c]:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pinv = inv(a[r][c])
        for i in range(r + 1, m):
            f = a[i][c]
            if f:
                f = mul(f, pinv)
                for j in range(c, n):
                    a[i][j] = sub(a[i][j], mul(f, a[r][j]))
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    return [vectors[c] for c in piv_cols]


def staircase_matrix(h: FieldMatrix, col_sets: Sequence[Sequence[int]]) -> FieldMatrix:
    """Block matrix with H_{A_1} repeated down the first block column and
    H_{A_2}, ..., H_{A_l} on the block diagonal of the remaining columns."""
    ell = len(col_sets)
    if ell < 2:
        raise ValueError("need at least two column sets")
    ctx = h.ctx
    sets = [sorted(s) for s in col_sets]
    widths = [len(s) for s in sets]
    total = sum(widths)
    nrows = (ell - 1) * h.nrows
    out = FieldMatrix.zeros(ctx, nrows, total)
    offsets = [0]
    for w in widths[:-1]:
        offsets.append(offsets[-1] + w)
    for blk in range(ell - 1):
        rbase = blk * h.nrows
        for r in range(h.nrows):
            row = out.data[rbase + r]
            src = h.data[r]
            for j, c in enumerate(sets[0]):
                row[j] = src[c]
            ob = offsets[blk + 1]
            for j, c in enumerate(sets[blk + 1]):
                row[ob + j] = src[c]
    return out


def intersection_dim(h: FieldMatrix, col_sets: Sequence[Iterable[int]]) -> int:
    """Dimension of the intersection of the column spans of H restricted to
    each index set, computed two independent ways and cross-checked.

    (a) iterated pairwise subspace intersection via kernel computations;
    (b) sum of the individual span dimensions minus the rank of the
        staircase block matrix.
    """
    sets = [sorted(set(s)) for s in col_sets]
    if len(sets) < 2:
        raise ValueError("need at least two column sets")
    ctx = h.ctx
    k = h.nrows

    # (a) direct iterated intersection
    def cols_of(s):
        return [[h.data[r][c] for r in range(k)] for c in s]

    current = _column_basis(ctx, cols_of(sets[0]), k)
    for s in sets[1:]:
        other = _column_basis(ctx, cols_of(s), k)
        if not current or not other:
            current = []
            break
        joint = FieldMatrix(
            ctx, k, len(current) + len(other),
            [[*(v[i] for v in current), *(w[i] for w in other)] for i in range(k)],
        )
        inter_vecs = []
        mul, add = ctx.mul, ctx.add
        for ker in kernel_field(joint):
            coeffs = ker[: len(current)]
            vec = [0] * k
            for c, v in zip(coeffs, current):
                if c:
                    for i in range(k):
                        if v[i]:
                            vec[i] = add(vec[i], mul(c, v[i]))
            inter_vecs.append(vec)
        current = _column_basis(ctx, inter_vecs, k)
    dim_direct = len(current)

    # (b) rank identity on the staircase matrix
    dims = [len(_column_basis(ctx, cols_of(s), k)) for s in sets]
    stair = staircase_matrix(h, sets)
    dim_formula = sum(dims) - rank_field(stair)

    if dim_direct != dim_formula:
        raise MethodMismatch(
            f"direct intersection gave {dim_direct}, staircase identity gave {dim_formula}"
        )
    return dim_direct


# ---------------------------------------------------------------------------
# Partition maximum for generic intersection dimensions.
# ---------------------------------------------------------------------------


def set_partitions(n: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All partitions of range(n) via restricted-growth strings, in RGS order."""
    if n == 0:
        yield ()
        return
    a = [0] * n
    while True:
        nblocks = max(a) + 1
        blocks: list[list[int]] = [[] for _ in range(nblocks)]
        for i, b in enumerate(a):
            blocks[b].append(i)
        yield tuple(tuple(b) for b in blocks)
        i = n - 1
        while i > 0 and a[i] > max(a[:i]):
            i -= 1
        if i == 0:
            return
        a[i] += 1
        for j in range(i + 1, n):
            a[j] = 0


def partition_formula(col_sets: Sequence[Iterable[int]], k: int, cap: int = 6) -> int:
    """Max over set partitions of the index family of
    sum_i |intersection over the i-th block| - (#blocks - 1) * k."""
    sets = [frozenset(s) for s in col_sets]
    ell = len(sets)
    if ell > cap:
        raise TooManyBlocks(f"{ell} sets exceeds the partition-enumeration cap {cap}")
    best = None
    for part in set_partitions(ell):
        total = 0
        for block in part:
            inter = sets[block[0]]
            for j in block[1:]:
                inter = inter & sets[j]
            total += len(inter)
        val = total - (len(part) - 1) * k
        if best is None or val > best:
            best = val
    return best if best is not None else 0
