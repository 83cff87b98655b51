import itertools
import random

import pytest

from rslab.linalg import (
    FieldMatrix,
    NotFullColumnRank,
    NotSquare,
    PolyMatrix,
    TooManyBlocks,
    det_field,
    det_poly,
    intersection_dim,
    kernel_field,
    lex_min_nonsingular_rows,
    matvec_field,
    partition_formula,
    rank_field,
    rank_symbolic,
    set_partitions,
    solve_field,
    staircase_matrix,
)
from rslab.mpoly import MultiPoly
from rslab.rscode import symbolic_vandermonde


def rand_poly(ctx, nvars, rng, nterms=3, maxdeg=2):
    terms = {}
    for _ in range(nterms):
        e = tuple(rng.randrange(maxdeg + 1) for _ in range(nvars))
        terms[e] = rng.randrange(ctx.order)
    return MultiPoly(ctx, nvars, terms)


def rand_field_matrix(ctx, rng, m, n):
    return FieldMatrix(ctx, m, n, [[rng.randrange(ctx.order) for _ in range(n)] for _ in range(m)])


def test_rank_and_kernel_identity(gf7):
    eye = FieldMatrix.identity(gf7, 3)
    assert rank_field(eye) == 3
    assert kernel_field(eye) == []


def test_rank_and_kernel_zero(gf7):
    z = FieldMatrix.zeros(gf7, 2, 3)
    assert rank_field(z) == 0
    assert len(kernel_field(z)) == 3


def test_vandermonde_rank_and_det(gf7):
    # points (1,2,3): det = (2-1)(3-1)(3-2) = 2
    v = FieldMatrix.from_rows(gf7, [[1, 1, 1], [1, 2, 4], [1, 3, 2]])
    assert rank_field(v) == 3
    assert det_field(v) == 2


def test_kernel_vectors_are_exact(gf7):
    rng = random.Random(2)
    for _ in range(200):
        m, n = rng.randrange(1, 6), rng.randrange(1, 6)
        mat = rand_field_matrix(gf7, rng, m, n)
        basis = kernel_field(mat)
        assert rank_field(mat) + len(basis) == n
        for v in basis:
            assert all(x == 0 for x in matvec_field(mat, v))


def test_solve_field(gf101):
    rng = random.Random(4)
    for _ in range(50):
        n = rng.randrange(1, 5)
        mat = rand_field_matrix(gf101, rng, n, n)
        if rank_field(mat) < n:
            continue
        x = [rng.randrange(101) for _ in range(n)]
        rhs = matvec_field(mat, x)
        assert solve_field(mat, rhs) == x


def test_det_poly_vandermonde_2x2(gf7):
    m = symbolic_vandermonde(2, 2, gf7)
    x1 = MultiPoly.variable(gf7, 2, 0)
    x2 = MultiPoly.variable(gf7, 2, 1)
    assert det_poly(m) == x2 - x1


def test_det_poly_diagonal(gf7):
    x1 = MultiPoly.variable(gf7, 2, 0)
    x2 = MultiPoly.variable(gf7, 2, 1)
    z = MultiPoly.zero(gf7, 2)
    m = PolyMatrix.from_rows(gf7, 2, [[x1, z], [z, x2]])
    assert det_poly(m) == x1 * x2


def test_det_poly_requires_square(gf7):
    m = PolyMatrix.from_rows(gf7, 2, [[MultiPoly.zero(gf7, 2)] * 2])
    with pytest.raises(NotSquare):
        det_poly(m)


def test_det_poly_matches_evaluated_det(gf101):
    # substitute-then-eliminate is the independent oracle
    rng = random.Random(7)
    for _ in range(100):
        n = rng.randrange(1, 5)
        m = PolyMatrix.from_rows(
            gf101, 2, [[rand_poly(gf101, 2, rng) for _ in range(n)] for _ in range(n)]
        )
        pt = [rng.randrange(101), rng.randrange(101)]
        assert det_poly(m).evaluate(pt) == det_field(m.evaluate(pt))


def test_symbolic_vandermonde_rank(gf7):
    for n, k in [(3, 2), (4, 3), (5, 2), (4, 4)]:
        assert rank_symbolic(symbolic_vandermonde(n, k, gf7)) == k


def test_rank_symbolic_zero_matrix(gf7):
    z = MultiPoly.zero(gf7, 2)
    assert rank_symbolic(PolyMatrix(gf7, 2, 2, 2, [[z, z], [z, z]])) == 0


def test_randomized_rank_matches_symbolic(gf101):
    rng = random.Random(13)
    for i in range(100):
        m = PolyMatrix.from_rows(
            gf101, 3, [[rand_poly(gf101, 3, rng) for _ in range(4)] for _ in range(4)]
        )
        assert rank_symbolic(m, "randomized-eval", rng=random.Random(i)) == rank_symbolic(m)


def test_rank_invariant_under_row_ops(gf101):
    rng = random.Random(19)
    for _ in range(50):
        m, n = rng.randrange(2, 6), rng.randrange(2, 6)
        mat = rand_field_matrix(gf101, rng, m, n)
        base = rank_field(mat)
        rows = [r[:] for r in mat.data]
        rng.shuffle(rows)
        scale = rng.randrange(1, 101)
        rows[0] = [gf101.mul(scale, x) for x in rows[0]]
        assert rank_field(FieldMatrix(gf101, m, n, rows)) == base


def test_lex_min_skips_zero_row(gf7):
    z = MultiPoly.zero(gf7, 1)
    one = MultiPoly.const(gf7, 1, 1)
    m = PolyMatrix.from_rows(gf7, 1, [[z], [one], [one]])
    assert lex_min_nonsingular_rows(m) == (1,)


def test_lex_min_identity_prefix(gf7):
    one = MultiPoly.const(gf7, 2, 1)
    z = MultiPoly.zero(gf7, 2)
    x1 = MultiPoly.variable(gf7, 2, 0)
    m = PolyMatrix.from_rows(gf7, 2, [[one, z], [z, one], [x1, x1]])
    assert lex_min_nonsingular_rows(m) == (0, 1)


def test_lex_min_requires_full_rank(gf7):
    z = MultiPoly.zero(gf7, 1)
    m = PolyMatrix.from_rows(gf7, 1, [[z], [z]])
    with pytest.raises(NotFullColumnRank):
        lex_min_nonsingular_rows(m)


def test_lex_min_matches_exhaustive(gf101):
    rng = random.Random(23)
    checked = 0
    while checked < 50:
        rows, cols = rng.randrange(2, 8), rng.randrange(1, 5)
        if cols > rows:
            continue
        m = PolyMatrix.from_rows(
            gf101, 2, [[rand_poly(gf101, 2, rng, 2, 2) for _ in range(cols)] for _ in range(rows)]
        )
        if rank_symbolic(m) < cols:
            continue
        expected = next(
            sel for sel in itertools.combinations(range(rows), cols)
            if not det_poly(m.submatrix(sel, range(cols))).is_zero
        )
        assert lex_min_nonsingular_rows(m) == expected
        checked += 1


def test_intersection_dim_disjoint_axes(gf7):
    from rslab.gf import make_field

    f3 = make_field(3)
    assert intersection_dim(FieldMatrix.identity(f3, 2), [{0}, {1}]) == 0


def test_intersection_dim_identical_full_sets(gf101):
    rng = random.Random(29)
    h = rand_field_matrix(gf101, rng, 2, 6)
    assert intersection_dim(h, [{0, 1}, {0, 1}]) == 2


def test_intersection_dim_methods_agree(gf65537):
    # the two computations are mutual oracles; any disagreement raises
    rng = random.Random(31)
    for _ in range(200):
        k = rng.randrange(1, 5)
        n = rng.randrange(max(2, k), 9)
        h = rand_field_matrix(gf65537, rng, k, n)
        sets = [
            set(rng.sample(range(n), rng.randrange(0, min(k, n) + 1)))
            for _ in range(rng.randrange(2, 5))
        ]
        intersection_dim(h, sets)


def test_staircase_shape(gf7):
    h = FieldMatrix.identity(gf7, 2)
    stair = staircase_matrix(h, [[0], [1], [0, 1]])
    assert stair.nrows == 4 and stair.ncols == 4


def test_partition_count_is_bell():
    assert len(list(set_partitions(1))) == 1
    assert len(list(set_partitions(2))) == 2
    assert len(list(set_partitions(4))) == 15
    assert len(list(set_partitions(6))) == 203


def test_partition_formula_examples():
    # two sets: singleton split wins: 2 + 2 - 2 = 2
    assert partition_formula([{0, 1}, {1, 2}], 2) == 2
    # single set: its size
    assert partition_formula([{0, 1, 2}], 5) == 3


def test_partition_formula_cap():
    with pytest.raises(TooManyBlocks):
        partition_formula([{0}] * 7, 1)


def test_partition_formula_matches_random_matrix(gf65537):
    # random matrices over a large prime field behave generically
    rng = random.Random(37)
    agreements = 0
    for _ in range(100):
        k = rng.randrange(1, 5)
        n = rng.randrange(max(2, k), 9)
        sets = [
            set(rng.sample(range(n), rng.randrange(0, min(k, n) + 1)))
            for _ in range(rng.randrange(2, 5))
        ]
        h = rand_field_matrix(gf65537, rng, k, n)
        if intersection_dim(h, sets) == max(partition_formula(sets, k), 0):
            agreements += 1
    assert agreements >= 99
