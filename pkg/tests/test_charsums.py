"""Character sums: hand-enumerated values, oracle cross-checks, reductions, bounds."""

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from matpowlab.charsums import (
    SumResult,
    _Kahan,
    analyze_instance,
    evaluate_bounds,
    gauss_subgroup,
    kappa_n,
    kloosterman_subgroup,
    matrix_exp_sum,
    nonsplit_pair_bound,
    split_pair_bound,
    sum_moment,
    weil_explicit_bound,
)
from matpowlab.counting import count_JK
from matpowlab.errors import BudgetExceeded, MixedContext
from matpowlab.ffield import (
    CharacterSpec,
    SubgroupSpec,
    char_eval,
    make_field,
    norm_subgroup,
    primitive_root,
    standard_character,
    subgroup_of_order,
)
from matpowlab.matgrp import (
    MatEntity,
    VecEntity,
    companion_realization,
    matrix_order,
    sl2_companion,
)
from oracles import naive_char_sum

_SMALL_PRIMES = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59,
                 61, 67, 71, 73, 79, 83, 89, 97, 101]


def _row(ctx, *vals):
    return VecEntity([ctx.elem(v) for v in vals], "row")


def _col(ctx, *vals):
    return VecEntity([ctx.elem(v) for v in vals], "column")


def _oracle_matrix_sum(a_vec, b_vec, A, chi=None):
    """Reference sum via full matrix powers and math.fsum."""
    if chi is None:
        chi = standard_character(A.ctx)
    tau = matrix_order(A)
    terms = []
    M = A
    for _ in range(tau):
        terms.append(char_eval(chi, a_vec @ (M @ b_vec)))
        M = M @ A
    return naive_char_sum(terms)


def test_matrix_sum_hand_enumerated():
    # A = [[0,-1],[1,0]] has order 4; the (0,0) entries of its powers are 0,-1,0,1
    ctx = make_field(5)
    A = sl2_companion(ctx, 0)
    res = matrix_exp_sum(_row(ctx, 1, 0), _col(ctx, 1, 0), A)
    expected = 2.0 + 2.0 * math.cos(2.0 * math.pi / 5.0)
    assert res.length == 4
    assert abs(res.value - expected) < 1e-12
    assert abs(res.value.imag) < 1e-12


def test_matrix_sum_zero_right_vector_gives_tau():
    ctx = make_field(7)
    A = sl2_companion(ctx, 1)
    tau = matrix_order(A)
    res = matrix_exp_sum(_row(ctx, 1, 2), _col(ctx, 0, 0), A)
    assert abs(res.value - tau) < 1e-12
    assert res.length == tau


def test_matrix_sum_identity_matrix():
    ctx = make_field(7)
    A = MatEntity.identity(ctx, 2)
    res = matrix_exp_sum(_row(ctx, 1, 1), _col(ctx, 1, 1), A)
    assert res.length == 1
    assert abs(res.value - cmath.exp(4j * math.pi / 7)) < 1e-12
    # a.b = 14 = 0 mod 7 gives the unit term
    res0 = matrix_exp_sum(_row(ctx, 2, 3), _col(ctx, 1, 4), A)
    assert abs(res0.value - 1.0) < 1e-12


def test_matrix_sum_matches_oracle_degree_one():
    ctx7 = make_field(7)
    a = _row(ctx7, 1, 2)
    b = _col(ctx7, 3, 1)
    for u in range(7):
        A = sl2_companion(ctx7, u)
        got = matrix_exp_sum(a, b, A)
        want = _oracle_matrix_sum(a, b, A)
        assert abs(got.value - want) < 1e-9
    ctx13 = make_field(13)
    A1 = MatEntity([[ctx13.elem(2)]])
    got = matrix_exp_sum(_row(ctx13, 5), _col(ctx13, 3), A1)
    assert abs(got.value - _oracle_matrix_sum(_row(ctx13, 5), _col(ctx13, 3), A1)) < 1e-9


def test_matrix_sum_matches_oracle_dimension_three():
    ctx = make_field(5)
    # companion of X^3 + X + 1, irreducible mod 5
    A = MatEntity(
        [
            [ctx.zero, ctx.zero, -ctx.one],
            [ctx.one, ctx.zero, -ctx.one],
            [ctx.zero, ctx.one, ctx.zero],
        ]
    )
    a = _row(ctx, 1, 2, 3)
    b = _col(ctx, 4, 0, 1)
    got = matrix_exp_sum(a, b, A)
    want = _oracle_matrix_sum(a, b, A)
    assert abs(got.value - want) < 1e-9


def test_matrix_sum_matches_oracle_quadratic_extension():
    ext = make_field(3, 2)
    w = ext.omega()
    A = MatEntity([[w, ext.one], [ext.one, ext.one]])
    assert A.det()
    a = VecEntity([ext.one, w], "row")
    b = VecEntity([w + ext.one, ext.one], "column")
    got = matrix_exp_sum(a, b, A)
    want = _oracle_matrix_sum(a, b, A)
    assert abs(got.value - want) < 1e-9


def test_matrix_sum_nonstandard_character():
    ctx = make_field(11)
    chi = CharacterSpec(ctx.elem(4))
    A = sl2_companion(ctx, 3)
    a = _row(ctx, 2, 1)
    b = _col(ctx, 1, 5)
    got = matrix_exp_sum(a, b, A, chi=chi)
    want = _oracle_matrix_sum(a, b, A, chi=chi)
    assert abs(got.value - want) < 1e-9


def test_matrix_sum_budget_and_validation():
    ctx = make_field(13)
    A1 = MatEntity([[ctx.elem(2)]])  # order of 2 mod 13 is 12
    with pytest.raises(BudgetExceeded) as err:
        matrix_exp_sum(_row(ctx, 1), _col(ctx, 1), A1, max_tau=5)
    assert err.value.estimated_work == 12
    A = sl2_companion(ctx, 1)
    with pytest.raises(ValueError):
        matrix_exp_sum(_col(ctx, 1, 0), _col(ctx, 1, 0), A)
    with pytest.raises(ValueError):
        matrix_exp_sum(_row(ctx, 1, 0), _row(ctx, 1, 0), A)
    other = make_field(7)
    with pytest.raises(MixedContext):
        matrix_exp_sum(_row(other, 1, 0), _col(ctx, 1, 0), A)
    with pytest.raises(MixedContext):
        matrix_exp_sum(_row(ctx, 1, 0), _col(ctx, 1, 0), A,
                       chi=standard_character(other))


def test_sum_result_invariants_on_batch():
    ctx = make_field(11)
    for u in range(11):
        A = sl2_companion(ctx, u)
        res = matrix_exp_sum(_row(ctx, 1, 3), _col(ctx, 2, 1), A)
        assert abs(res.abs - abs(res.value)) < 1e-12
        assert res.abs <= res.length + 1e-9


def test_kloosterman_two_term_hand_value():
    ctx = make_field(3)
    G = subgroup_of_order(ctx, 2)
    res = kloosterman_subgroup(G, ctx.one, ctx.one)
    assert res.length == 2
    assert abs(res.value - (-1.0)) < 1e-12


def test_kloosterman_zero_coefficients_give_order():
    ctx = make_field(13)
    G = subgroup_of_order(ctx, 6)
    res = kloosterman_subgroup(G, ctx.zero, ctx.zero)
    assert abs(res.value - 6.0) < 1e-12


def test_kloosterman_full_group_weil_bound():
    rng = np.random.default_rng(20240816)
    for p in _SMALL_PRIMES:
        ctx = make_field(p)
        G = subgroup_of_order(ctx, p - 1)
        if p <= 13:
            pairs = [(a, b) for a in range(1, p) for b in range(1, p)]
        else:
            pairs = [(int(rng.integers(1, p)), int(rng.integers(1, p)))
                     for _ in range(3)]
        for a, b in pairs:
            res = kloosterman_subgroup(G, ctx.elem(a), ctx.elem(b))
            assert res.abs <= weil_explicit_bound(p) + 1e-9


def test_kloosterman_symmetry():
    ctx = make_field(31)
    for order in (5, 6, 15, 30):
        G = subgroup_of_order(ctx, order)
        fwd = kloosterman_subgroup(G, ctx.elem(3), ctx.elem(7))
        rev = kloosterman_subgroup(G, ctx.elem(7), ctx.elem(3))
        assert abs(fwd.value - rev.value) < 1e-12


def test_gauss_full_group_is_minus_one():
    for p, degree in ((5, 1), (13, 1), (101, 1), (7, 2)):
        ctx = make_field(p, degree)
        G = subgroup_of_order(ctx, ctx.group_order)
        for aval in (ctx.one, primitive_root(ctx)):
            res = gauss_subgroup(G, aval)
            assert abs(res.value - (-1.0)) < 1e-10
    ctx = make_field(13)
    G = subgroup_of_order(ctx, 12)
    assert abs(gauss_subgroup(G, ctx.zero).value - 12.0) < 1e-12


def test_kloosterman_matches_diagonal_matrix_sum():
    # a u + b / u along the subgroup equals the (a,1) A^x (1,b) walk with
    # A = diag(g, 1/g)
    rng = np.random.default_rng(7)
    for p, order in ((7, 6), (13, 4), (31, 15)):
        ctx = make_field(p)
        G = subgroup_of_order(ctx, order)
        g = G.generator
        A = MatEntity([[g, ctx.zero], [ctx.zero, g.inverse()]])
        for _ in range(4):
            a = ctx.elem(int(rng.integers(0, p)))
            b = ctx.elem(int(rng.integers(0, p)))
            lhs = kloosterman_subgroup(G, a, b)
            rhs = matrix_exp_sum(VecEntity([a, ctx.one], "row"),
                                 VecEntity([ctx.one, b], "column"), A)
            assert lhs.length == rhs.length == order
            assert abs(lhs.value - rhs.value) < 1e-9


def test_gauss_matches_companion_matrix_sum():
    # the norm-one walk in the quadratic extension collapses to a trace
    # sequence generated by the companion matrix over the base field
    for p in (7, 11):
        ext = make_field(p, 2)
        N = norm_subgroup(ext)
        lam = N.generator
        for k in (1, 2, 5):
            a = primitive_root(ext) ** k
            lhs = gauss_subgroup(N, a)
            a_vec, b_vec, A = companion_realization(lam, a)
            rhs = matrix_exp_sum(a_vec, b_vec, A)
            assert lhs.length == rhs.length == p + 1
            assert abs(lhs.value - rhs.value) < 1e-9
    # a proper subgroup of the norm-one group reduces the same way
    ext = make_field(11, 2)
    N = norm_subgroup(ext)
    lam = N.generator ** 3
    G = SubgroupSpec(lam, 4)
    a = ext.omega() + ext.one
    a_vec, b_vec, A = companion_realization(lam, a)
    assert matrix_order(A) == 4
    assert abs(gauss_subgroup(G, a).value
               - matrix_exp_sum(a_vec, b_vec, A).value) < 1e-9


def test_holder_chain_per_instance():
    rng = np.random.default_rng(11)
    checked = 0
    for p in (5, 7):
        ctx = make_field(p)
        for u in range(p):
            A = sl2_companion(ctx, u)
            tau = matrix_order(A)
            a = _row(ctx, int(rng.integers(0, p)), int(rng.integers(0, p)))
            b = _col(ctx, int(rng.integers(0, p)), int(rng.integers(0, p)))
            if not a or not b:
                continue
            s = matrix_exp_sum(a, b, A).abs
            for k, ell in ((2, 2), (2, 3), (3, 3)):
                J = count_JK(a, A, k).value
                K = count_JK(b, A, ell).value
                lhs = s ** (2 * k * ell)
                rhs = (ctx.q ** A.n
                       * float(tau) ** (2 * k * ell - 2 * k - 2 * ell) * J * K)
                assert lhs <= rhs * (1.0 + 1e-6)
                checked += 1
    assert checked >= 30


def test_holder_chain_dimension_three():
    ctx = make_field(5)
    A = MatEntity(
        [
            [ctx.zero, ctx.zero, -ctx.one],
            [ctx.one, ctx.zero, -ctx.one],
            [ctx.zero, ctx.one, ctx.zero],
        ]
    )
    tau = matrix_order(A)
    a = _row(ctx, 1, 2, 3)
    b = _col(ctx, 4, 0, 1)
    s = matrix_exp_sum(a, b, A).abs
    for k, ell in ((2, 2), (2, 3), (3, 3)):
        J = count_JK(a, A, k).value
        K = count_JK(b, A, ell).value
        rhs = ctx.q ** 3 * float(tau) ** (2 * k * ell - 2 * k - 2 * ell) * J * K
        assert s ** (2 * k * ell) <= rhs * (1.0 + 1e-6)


def test_moment_gauss_second_is_q_times_order():
    for p, degree, order in ((13, 1, 3), (13, 1, 12), (7, 2, 8)):
        ctx = make_field(p, degree)
        G = subgroup_of_order(ctx, order)
        res = sum_moment("gauss", G, 2)
        assert res.exact == ctx.q * order
        assert abs(res.value - res.exact) <= 1e-6 * res.exact


def test_moment_kloosterman_second_is_q_squared_times_order():
    ctx = make_field(13)
    G = subgroup_of_order(ctx, 6)
    res = sum_moment("kloosterman", G, 2)
    assert res.exact == 13 ** 2 * 6
    assert abs(res.value - res.exact) <= 1e-6 * res.exact


def test_moment_sixth_dual_path_kloosterman():
    ctx = make_field(11)
    G = subgroup_of_order(ctx, 5)
    for m in (4, 6):
        res = sum_moment("kloosterman", G, m)
        assert res.exact is not None
        assert abs(res.value - res.exact) <= 1e-6 * res.exact


def test_moment_sixth_dual_path_gauss_extension():
    ext = make_field(11, 2)
    N = norm_subgroup(ext)
    G = SubgroupSpec(N.generator ** 2, 6)
    res = sum_moment("gauss", G, 6)
    assert res.exact is not None
    assert abs(res.value - res.exact) <= 1e-6 * res.exact


def test_moment_character_invariance():
    ctx = make_field(13)
    G = subgroup_of_order(ctx, 4)
    base = sum_moment("kloosterman", G, 4)
    twisted = sum_moment("kloosterman", G, 4, chi=CharacterSpec(ctx.elem(5)))
    assert abs(base.value - twisted.value) <= 1e-9 * base.value


def test_moment_budget_and_validation():
    ctx = make_field(13)
    G = subgroup_of_order(ctx, 6)
    with pytest.raises(BudgetExceeded) as err:
        sum_moment("kloosterman", G, 2, max_work=10)
    assert err.value.estimated_work == 13 * 13 * 6
    with pytest.raises(ValueError):
        sum_moment("legendre", G, 2)
    with pytest.raises(ValueError):
        sum_moment("gauss", G, 0)


def test_kappa_frozen_values():
    assert kappa_n(1) == Fraction(1, 4)
    assert kappa_n(2) == Fraction(1, 16)
    assert kappa_n(3) == Fraction(1, 24)
    assert kappa_n(4) == Fraction(1, 48)
    assert kappa_n(5) == Fraction(1, 80)
    # large-n check against the 3 n^2 asymptotic shape
    assert kappa_n(100) == Fraction(1, 4 * 100 * 75)
    with pytest.raises(ValueError):
        kappa_n(0)


def test_bound_report_split_instance():
    ctx = make_field(13)
    g = primitive_root(ctx)
    A = MatEntity([[g, ctx.zero], [ctx.zero, g.inverse()]])
    a = _row(ctx, 1, 1)
    b = _col(ctx, 1, 1)
    res = matrix_exp_sum(a, b, A)
    report = evaluate_bounds(res, A, a, b)
    names = [e.name for e in report.bounds]
    assert names == ["trivial", "square-root", "power-saving", "split-pair"]
    by_name = {e.name: e for e in report.bounds}
    assert by_name["trivial"].status == "pass"
    assert by_name["square-root"].status == "pass"
    assert by_name["power-saving"].status == "report"
    # tau^2 = 144 < q^n = 169 selects the short-period branch
    assert "3/4" in by_name["power-saving"].formula
    assert report.kappa == Fraction(1, 16)
    assert report.tau == 12 and report.q == 13
    assert by_name["split-pair"].value == pytest.approx(split_pair_bound(12, 13))
    for e in report.bounds:
        assert e.ratio == pytest.approx(report.observed / e.value)


def test_bound_report_irreducible_instance():
    ctx = make_field(13)
    A = sl2_companion(ctx, 3)  # X^2 - 3X + 1 has non-square discriminant 5 mod 13
    a = _row(ctx, 1, 0)
    b = _col(ctx, 0, 1)
    res = matrix_exp_sum(a, b, A)
    h = analyze_instance(a, b, A)
    assert h.class_tag == "irreducible"
    assert h.ext_left_independent and h.ext_right_independent
    assert not h.extension_mismatch
    report = evaluate_bounds(res, A, a, b, hypotheses=h)
    names = [e.name for e in report.bounds]
    assert "irreducible-saving" in names
    assert "nonsplit-pair" in names
    assert "split-pair" not in names
    by_name = {e.name: e for e in report.bounds}
    assert by_name["nonsplit-pair"].value == pytest.approx(
        nonsplit_pair_bound(h.tau, 13))


def test_bound_report_dependent_vector_drops_conditional_bounds():
    ctx = make_field(13)
    A = MatEntity([[ctx.elem(3), ctx.zero], [ctx.zero, ctx.elem(9)]])
    a = _row(ctx, 1, 0)  # eigenvector row: the power orbit stays on a line
    b = _col(ctx, 1, 1)
    h = analyze_instance(a, b, A)
    assert not h.left_independent and h.right_independent
    res = matrix_exp_sum(a, b, A)
    names = [e.name for e in evaluate_bounds(res, A, a, b, hypotheses=h).bounds]
    assert names == ["trivial"]


def test_bound_report_long_period_branch():
    ctx = make_field(7)
    A = MatEntity([[ctx.elem(3)]])  # order 6 > sqrt(7)
    a = _row(ctx, 1)
    b = _col(ctx, 1)
    res = matrix_exp_sum(a, b, A)
    report = evaluate_bounds(res, A, a, b)
    by_name = {e.name: e for e in report.bounds}
    assert "1/2-kappa" in by_name["power-saving"].formula
    assert report.kappa == Fraction(1, 4)


def test_bound_report_fail_status_on_forged_observation():
    ctx = make_field(13)
    A = sl2_companion(ctx, 3)
    a = _row(ctx, 1, 0)
    b = _col(ctx, 0, 1)
    real = matrix_exp_sum(a, b, A)
    forged = SumResult(real.value, real.length + 5.0, real.length,
                       real.character, real.kind, real.parameters)
    report = evaluate_bounds(forged, A, a, b)
    assert report.bounds[0].name == "trivial"
    assert report.bounds[0].status == "fail"


def test_extension_independence_never_disagrees_on_sl2_sample():
    rng = np.random.default_rng(13)
    for p in (7, 11, 13):
        ctx = make_field(p)
        for u in range(p):
            A = sl2_companion(ctx, u)
            a = _row(ctx, int(rng.integers(0, p)), int(rng.integers(0, p)))
            b = _col(ctx, int(rng.integers(0, p)), int(rng.integers(0, p)))
            if not a or not b:
                continue
            h = analyze_instance(a, b, A)
            assert h.ext_left_independent == h.left_independent
            assert h.ext_right_independent == h.right_independent


def test_kahan_accumulator_matches_fsum():
    rng = np.random.default_rng(7)
    table = np.exp(2j * np.pi * np.arange(23) / 23)
    args = rng.integers(0, 23, size=5000)
    acc = _Kahan()
    for k in args:
        acc.add(table[k])
    want = naive_char_sum([complex(table[k]) for k in args])
    assert abs(acc.value - want) < 1e-12
