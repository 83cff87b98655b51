import math
import random
from fractions import Fraction

import pytest

from rslab.certify import (
    FAIL,
    FAULTY_TUPLE,
    SUCCESS,
    BadC,
    BadEpsilon,
    QTooSmall,
    SymbolicallySingular,
    certification_params,
    certify_full_column_rank,
    failure_bound,
    faulty_index,
    symbolic_full_rank,
)
from rslab.gf import make_field, sample_distinct
from rslab.linalg import PolyMatrix, rank_field
from rslab.mpoly import MultiPoly
from rslab.rim import build_rim
from rslab.rscode import symbolic_vandermonde
from rslab.setsys import SetSystem, enumerate_admissible


def rand_system(rng, n, t):
    return SetSystem(
        n, tuple(frozenset(rng.sample(range(n), rng.randrange(0, n + 1))) for _ in range(t))
    )


def test_faulty_index_flips_at_zero(gf101):
    m = PolyMatrix.from_rows(gf101, 1, [[MultiPoly.variable(gf101, 1, 0)]])
    assert faulty_index(m, [0], [0]) == 0
    assert faulty_index(m, [0], [5]) is None


def test_faulty_index_constant_matrix_never_flips(gf101):
    m = PolyMatrix.from_rows(gf101, 1, [[MultiPoly.const(gf101, 1, 3)]])
    assert faulty_index(m, [0], [0]) is None


def test_faulty_index_rejects_singular_selection(gf101):
    z = MultiPoly.zero(gf101, 1)
    m = PolyMatrix.from_rows(gf101, 1, [[z]])
    with pytest.raises(SymbolicallySingular):
        faulty_index(m, [0], [1])


def test_faulty_index_strategies_agree(gf101):
    v = symbolic_vandermonde(4, 2, gf101)
    sel = (0, 1)
    for i in range(60):
        rng = random.Random(i)
        # repetitions allowed: the operation itself has no distinctness demand
        reps = [rng.randrange(6) for _ in range(4)]
        a = faulty_index(v, sel, reps, "symbolic")
        b = faulty_index(v, sel, reps, "grid", degree_bound=1)
        c = faulty_index(v, sel, reps, "randomized", rng=random.Random(i))
        assert a == b == c


def pair_cover_system(n_layers=1):
    """Coordinates hosting every pair of a 4-set family; its tracked 6x6
    determinant genuinely vanishes on a positive fraction of distinct points."""
    import itertools

    from rslab.setsys import system_from_memberships

    pairs = [frozenset(p) for p in itertools.combinations(range(4), 2)]
    member = pairs * n_layers
    return system_from_memberships(6 * n_layers, member, 4)


def test_faulty_index_reverified_by_direct_evaluation():
    # the returned index must flip the determinant: nonzero before, zero after
    from rslab.linalg import det_poly, lex_min_nonsingular_rows

    f13 = make_field(13)
    sys_ = pair_cover_system()
    r = build_rim(sys_, 2, ctx=f13)
    sel = lex_min_nonsingular_rows(r.matrix)
    det = det_poly(r.matrix.submatrix(sel, range(6)))
    rng = random.Random(5)
    hits = 0
    for _ in range(150):
        reps = [p.rep for p in sample_distinct(f13, 6, rng)]
        idx = faulty_index(r.matrix, sel, reps)
        if idx is None:
            assert det.evaluate(reps) != 0
            continue
        before = det.partial_assign({i: reps[i] for i in range(idx)})
        after = before.partial_assign({idx: reps[idx]})
        assert not before.is_zero and after.is_zero
        # zero persists for all later prefixes
        assert after.partial_assign({i: reps[i] for i in range(idx + 1, 6)}).is_zero
        hits += 1
    assert hits > 0


def test_certify_constant_full_rank_system(gf101):
    # two identical sets, k=1: the matrix is all-ones, SUCCESS for any points
    sys_ = SetSystem.of(2, [{0, 1}, {0, 1}])
    for seed in range(5):
        pts = sample_distinct(gf101, 2, random.Random(seed))
        out = certify_full_column_rank(sys_, 1, pts, rounds=3)
        assert out.tag == SUCCESS


def test_certify_reports_fail_on_deficient_system(gf101):
    # weight 1 < 2 columns: symbolically rank-deficient
    sys_ = SetSystem.of(3, [{0, 1}, {0, 2}])
    pts = sample_distinct(gf101, 3, random.Random(0))
    out = certify_full_column_rank(sys_, 2, pts, rounds=1)
    assert out.tag == FAIL


def test_certify_cached_matches_direct_and_grid(gf101):
    rng = random.Random(7)
    for _ in range(120):
        n, t, k = rng.randrange(3, 6), rng.randrange(2, 4), rng.randrange(1, 4)
        sys_ = rand_system(rng, n, t)
        pts = sample_distinct(gf101, n, rng)
        r = rng.randrange(1, 4)
        cached = certify_full_column_rank(sys_, k, pts, r)
        direct = certify_full_column_rank(sys_, k, pts, r, use_cache=False)
        grid = certify_full_column_rank(sys_, k, pts, r, strategy="grid", use_cache=False)
        assert cached.tag == direct.tag == grid.tag
        assert cached.faulty_tuple == direct.faulty_tuple == grid.faulty_tuple
        assert cached.selection == direct.selection


def test_certify_outcome_trichotomy_and_distinctness():
    f13 = make_field(13)
    rng = random.Random(11)
    bare = pair_cover_system()
    doubled = pair_cover_system(2)
    seen = set()
    flips_recorded = 0
    for _ in range(300):
        pts = sample_distinct(f13, 6, rng)
        out = certify_full_column_rank(bare, 2, pts, rounds=1)
        seen.add(out.tag)
        assert out.tag in (SUCCESS, FAIL, FAULTY_TUPLE)
        if out.tag == FAULTY_TUPLE:
            assert len(out.faulty_tuple) == 1
        if out.tag == SUCCESS:
            ev = build_rim(bare, 2, points=pts)
            assert rank_field(ev.matrix) == 6
    assert seen >= {SUCCESS, FAULTY_TUPLE}
    for _ in range(200):
        pts = sample_distinct(f13, 12, rng)
        out = certify_full_column_rank(doubled, 2, pts, rounds=3)
        assert out.tag in (SUCCESS, FAIL, FAULTY_TUPLE)
        # a deleted coordinate can never flip again
        for ev in out.rounds:
            if ev.faulty is not None:
                assert ev.faulty not in ev.deleted_before
                flips_recorded += 1
        if out.faulty_tuple is not None:
            assert len(set(out.faulty_tuple)) == len(out.faulty_tuple)
        if out.tag == SUCCESS:
            evm = build_rim(doubled, 2, points=pts)
            assert rank_field(evm.matrix) == 6
    assert flips_recorded > 0


def test_never_fail_on_admissible_families(gf101):
    slack = Fraction(1, 2)
    rng = random.Random(13)
    fam = list(enumerate_admissible(5, 2, 2, slack))
    rounds = math.floor(slack * 2 / 1 + 1)
    assert fam
    for sys_ in fam:
        assert symbolic_full_rank(gf101, sys_, 2)
        for _ in range(3):
            pts = sample_distinct(gf101, 5, rng)
            out = certify_full_column_rank(sys_, 2, pts, rounds)
            assert out.tag != FAIL
            if out.tag == SUCCESS:
                ev = build_rim(sys_, 2, points=pts)
                assert rank_field(ev.matrix) == 2


def test_empirical_tuple_rate_within_bound():
    # per-tuple bound from the closed form, checked loosely by Monte Carlo
    f13 = make_field(13)
    sys_ = SetSystem.of(6, [{0, 1, 2, 3, 4}, {0, 1, 2, 3, 5}, {0, 1, 2, 4, 5}])
    rng = random.Random(17)
    trials = 400
    tuples = 0
    for _ in range(trials):
        pts = sample_distinct(f13, 6, rng)
        out = certify_full_column_rank(sys_, 2, pts, rounds=1)
        tuples += out.tag == FAULTY_TUPLE
    bound = failure_bound(3, 6, 2, 13, 1)
    rate = tuples / trials
    cap = float(bound.union)
    sigma = math.sqrt(max(cap * (1 - cap), rate * (1 - rate)) / trials)
    assert rate <= cap + 3 * sigma


def test_success_outcome_serializes(gf101):
    sys_ = SetSystem.of(2, [{0, 1}, {0, 1}])
    pts = sample_distinct(gf101, 2, random.Random(1))
    blob = certify_full_column_rank(sys_, 1, pts, rounds=1).to_json()
    assert blob["tag"] == SUCCESS
    assert blob["rounds"][0]["det_fingerprint"]


def test_failure_bound_examples():
    br = failure_bound(2, 4, 2, 101, 2)
    assert br.per_tuple == Fraction(1, 98) ** 2
    assert br.union == Fraction(4, 98) ** 2


def test_failure_bound_boundary_is_one():
    # q - n + 1 == (t-1) n (k-1) makes the union bound exactly 1 at one round
    q = (2 - 1) * 4 * (2 - 1) + 4 - 1
    assert failure_bound(2, 4, 2, q, 1).union == 1


def test_failure_bound_monotone():
    prev = None
    for q in (50, 100, 200, 400):
        b = failure_bound(2, 4, 2, q, 2).union
        if prev is not None:
            assert b < prev
        prev = b
    assert failure_bound(2, 4, 2, 100, 3).union < failure_bound(2, 4, 2, 100, 2).union


def test_failure_bound_rejects_small_field():
    with pytest.raises(QTooSmall):
        failure_bound(2, 6, 2, 5, 1)


def test_failure_bound_global_part():
    b = failure_bound(2, 6, 2, 4093, 2, list_size=2, eps=Fraction(1, 2))
    assert b.global_log2 is not None
    assert b.global_float >= 0.0
    bk1 = failure_bound(2, 4, 1, 101, 1, list_size=1, eps=Fraction(1, 2))
    assert bk1.global_float == 0.0  # k=1 makes the base vanish


def test_params_main_golden():
    plan = certification_params("main", eps=Fraction(1, 2), c=3, n=4, k=2, list_size=1)
    assert plan.required_q == 2**8 * 4 + 4 == 1028
    assert plan.slack == 1
    assert plan.rounds_by_t == {2: 3}
    assert plan.radius == 0


def test_params_eps_zero_remark():
    plan = certification_params("main", eps=0, c=3, n=6, k=2, list_size=2)
    assert plan.slack == 0
    assert plan.rounds_by_t == {2: 1, 3: 1}
    assert plan.required_q is None
    assert plan.radius == Fraction(2, 3) * (1 - Fraction(2, 6))


def test_params_capacity_list_size():
    plan = certification_params("capacity", eps=Fraction(1, 4), c=3, n=8, k=2, delta=Fraction(1, 2))
    assert plan.list_size == max(math.ceil(Fraction(2 * (1 - Fraction(2, 8)), Fraction(1, 4))) - 1, 1)
    assert plan.radius == 1 - Fraction(2, 8) - Fraction(1, 4)
    assert plan.slack == Fraction(1, 2) * Fraction(1, 4) * 8 / 2


def test_params_k1_required_field_is_n():
    plan = certification_params("main", eps=Fraction(1, 2), c=3, n=4, k=1, list_size=1)
    assert plan.required_q == 4


def test_params_validation():
    with pytest.raises(BadEpsilon):
        certification_params("main", eps=Fraction(3, 2), c=3, n=4, k=2, list_size=1)
    with pytest.raises(BadC):
        certification_params("main", eps=Fraction(1, 2), c=2, n=4, k=2, list_size=1)
    with pytest.raises(BadEpsilon):
        certification_params("capacity", eps=0, c=3, n=4, k=2, delta=Fraction(1, 2))
    with pytest.raises(ValueError):
        certification_params("capacity", eps=Fraction(1, 2), c=3, n=4, k=2, delta=None)


def test_params_fractional_exponent_rounds_up():
    # exponent L(L+c)/eps = 1*(1+3)/(2/3) = 6 exactly; perturb c to force a
    # non-integer exponent and check the ceiling is exact
    plan = certification_params("main", eps=Fraction(2, 3), c=Fraction(7, 2), n=4, k=2, list_size=1)
    exponent = Fraction(1) * (1 + Fraction(7, 2)) / Fraction(2, 3)  # 27/4
    core = 1 * 4 * 1
    want = core * 2 ** float(exponent)
    assert plan.required_q - 4 >= want - 1
    assert (plan.required_q - 4 - 1) ** exponent.denominator < (2 ** exponent.numerator) * core ** exponent.denominator


def test_certify_randomized_strategy_matches_symbolic():
    f13 = make_field(13)
    sys_ = pair_cover_system()
    rng = random.Random(21)
    flips = 0
    for i in range(25):
        pts = sample_distinct(f13, 6, rng)
        sym = certify_full_column_rank(sys_, 2, pts, 1)
        rnd = certify_full_column_rank(sys_, 2, pts, 1, strategy="randomized", use_cache=False)
        assert sym.tag == rnd.tag
        assert sym.faulty_tuple == rnd.faulty_tuple
        flips += sym.tag == FAULTY_TUPLE
    assert flips > 0


def test_cached_matches_direct_on_flip_paths():
    # same comparison on a system whose tracked determinant actually dies
    f13 = make_field(13)
    sys_ = pair_cover_system()
    rng = random.Random(31)
    flips = 0
    for _ in range(60):
        pts = sample_distinct(f13, 6, rng)
        cached = certify_full_column_rank(sys_, 2, pts, 1)
        direct = certify_full_column_rank(sys_, 2, pts, 1, use_cache=False)
        assert cached.tag == direct.tag
        assert cached.faulty_tuple == direct.faulty_tuple
        assert cached.selection == direct.selection
        flips += cached.tag == FAULTY_TUPLE
    assert flips > 0
