"""Tests for the three congruence diagonalization routes."""

import random
from fractions import Fraction

import pytest

from polydiag.arith import Polynomial, parse_polynomial
from polydiag.diagonal import (
    block_step,
    diagonalization_bundle,
    pivot_congruence,
    single_path_diagonalize,
    standard_form_check,
    standard_form_diagonalize,
)
from polydiag.errors import (
    BundleTooLarge,
    NotStandardForm,
    NotSymmetric,
    ZeroMatrix,
)
from polydiag.polymat import PolyMatrix

from helpers import const_matrix, rand_symmetric, rand_symmetric_total_deg


def P(text, nvars=1):
    return parse_polynomial(text, nvars)


def M(rows, nvars=1):
    return PolyMatrix.from_rows([[P(s, nvars) for s in row] for row in rows])


VANISHING_MINORS = const_matrix([[1, -1, 1], [-1, 1, 1], [1, 1, 1]])


def assert_certificate_holds(a, cert):
    """The three identities every diagonalization certificate claims."""
    n = a.rows
    eye = PolyMatrix.identity(n, a.nvars)
    assert cert.X_plus @ cert.X_minus == cert.w * eye
    assert cert.X_minus @ cert.X_plus == cert.w * eye
    assert cert.D.is_diagonal()
    assert cert.D == cert.X_minus @ a @ cert.X_minus.transpose()
    assert (cert.w * cert.w) * a == cert.X_plus @ cert.D @ cert.X_plus.transpose()


def rand_standard_form(rng, n, nvars):
    # generic symmetric matrices are standard form; reject the rare others
    while True:
        a = rand_symmetric(rng, n, nvars)
        try:
            standard_form_check(a)
        except (ZeroMatrix, NotStandardForm):
            continue
        return a


# -- standard_form_check ----------------------------------------------------


def test_standard_form_check_examples():
    data = standard_form_check(M([["1", "t1"], ["t1", "t1^2 + 1"]]))
    assert data.rank == 2
    assert data.minors == (P("1"), P("1"))

    for n in (2, 3, 4):
        data = standard_form_check(PolyMatrix.identity(n, 1))
        assert data.rank == n
        assert data.minors == (Polynomial.one(1),) * n


def test_standard_form_check_vanishing_minor_fixture():
    with pytest.raises(NotStandardForm) as exc:
        standard_form_check(VANISHING_MINORS)
    assert exc.value.p == 2
    assert "M_2" in str(exc.value)


def test_standard_form_check_rejections():
    with pytest.raises(NotSymmetric):
        standard_form_check(M([["1", "t1"], ["0", "1"]]))
    with pytest.raises(ZeroMatrix):
        standard_form_check(PolyMatrix.zeros(2, 2, 1))
    with pytest.raises(ValueError):
        standard_form_check(M([["t1"]]))


# -- standard_form_diagonalize ----------------------------------------------


def test_standard_identity_matrix():
    cert = standard_form_diagonalize(PolyMatrix.identity(2, 1))
    eye = PolyMatrix.identity(2, 1)
    assert cert.X_plus == eye and cert.X_minus == eye
    assert cert.D == eye
    assert cert.w == Polynomial.one(1)


def test_standard_unit_minor_example():
    a = M([["1", "t1"], ["t1", "t1^2 + 1"]])
    cert = standard_form_diagonalize(a)
    assert cert.X_minus == M([["1", "0"], ["-t1", "1"]])
    assert cert.X_plus == M([["1", "0"], ["t1", "1"]])
    assert cert.D == PolyMatrix.identity(2, 1)
    assert cert.w == Polynomial.one(1)
    assert_certificate_holds(a, cert)


def test_standard_scaled_example():
    a = M([["t1", "1"], ["1", "t1"]])
    cert = standard_form_diagonalize(a)
    # m = M_1 = t; the certificate scales everything by it
    assert cert.X_minus == M([["t1", "0"], ["-1", "t1"]])
    assert cert.X_plus == M([["t1", "0"], ["1", "t1"]])
    assert cert.D == PolyMatrix.diagonal([P("t1^3"), P("t1^3 - t1")])
    assert cert.w == P("t1^2")
    assert_certificate_holds(a, cert)


def test_standard_rank_deficient():
    a = const_matrix([[1, 1], [1, 1]])
    cert = standard_form_diagonalize(a)
    assert cert.D == const_matrix([[1, 0], [0, 0]])
    assert cert.w == Polynomial.one(1)
    assert_certificate_holds(a, cert)


def test_standard_triangular_shape():
    rng = random.Random(301)
    for _ in range(30):
        n = rng.randint(2, 4)
        a = rand_standard_form(rng, n, rng.randint(1, 2))
        cert = standard_form_diagonalize(a)
        m = cert.X_plus[0, 0]
        for i in range(n):
            assert cert.X_plus[i, i] == m
            assert cert.X_minus[i, i] == m
            for j in range(i + 1, n):
                assert cert.X_plus[i, j].is_zero()
                assert cert.X_minus[i, j].is_zero()
        assert cert.w == m * m
        assert_certificate_holds(a, cert)


def test_standard_rejects_vanishing_minor_fixture():
    with pytest.raises(NotStandardForm):
        standard_form_diagonalize(VANISHING_MINORS)


# -- block_step ---------------------------------------------------------------


def test_block_step_unit_corner():
    a = M([["1", "0", "0"], ["0", "t1", "1"], ["0", "1", "t1^2"]])
    at, xp, xm, alpha = block_step(a)
    assert alpha == Polynomial.one(1)
    assert at == a
    assert xp == PolyMatrix.identity(3, 1)
    assert xm == PolyMatrix.identity(3, 1)


def test_block_step_example():
    a = M([["t1", "1"], ["1", "t1"]])
    at, xp, xm, alpha = block_step(a)
    assert alpha == P("t1")
    assert at == PolyMatrix.diagonal([P("t1^3"), P("t1^3 - t1")])
    assert xp == M([["t1", "0"], ["1", "t1"]])
    assert xm == M([["t1", "0"], ["-1", "t1"]])
    a4 = alpha ** 4
    assert a4 * a == xp @ at @ xp.transpose()


def test_block_step_zero_corner_annihilates():
    a = M([["0", "t1"], ["t1", "0"]])
    at, xp, xm, alpha = block_step(a)
    assert alpha.is_zero()
    assert at.is_zero()
    assert xm @ a @ xm.transpose() == at


def test_block_step_random_identities():
    rng = random.Random(302)
    for _ in range(60):
        n = rng.randint(2, 4)
        a = rand_symmetric(rng, n, rng.randint(1, 2))
        at, xp, xm, alpha = block_step(a)
        a2 = alpha * alpha
        eye = PolyMatrix.identity(n, a.nvars)
        assert xp @ xm == a2 * eye
        assert xm @ xp == a2 * eye
        assert at == xm @ a @ xm.transpose()
        assert (a2 * a2) * a == xp @ at @ xp.transpose()


def test_block_step_rejections():
    with pytest.raises(NotSymmetric):
        block_step(M([["1", "t1"], ["0", "1"]]))
    with pytest.raises(ValueError):
        block_step(M([["t1"]]))


# -- pivot_congruence ---------------------------------------------------------


def test_pivot_corner_is_noop():
    a = M([["t1", "1"], ["1", "t1"]])
    a_ij, v, scale = pivot_congruence(a, 1, 1)
    assert a_ij == a
    assert v == PolyMatrix.identity(2, 1)
    assert scale == 1


def test_pivot_diagonal_swap():
    a = M([["t1", "1"], ["1", "t1^2"]])
    a_ij, v, scale = pivot_congruence(a, 2, 2)
    assert a_ij[0, 0] == a[1, 1]
    assert scale == 1
    assert a_ij == v @ a @ v.transpose()


def test_pivot_off_diagonal_doubles_average():
    a = M([["0", "t1"], ["t1", "0"]])
    a_ij, v, scale = pivot_congruence(a, 1, 2)
    assert a_ij[0, 0] == P("2*t1")
    assert scale == 2
    assert a_ij == v @ a @ v.transpose()


def test_pivot_congruence_random():
    rng = random.Random(303)
    for _ in range(60):
        n = rng.randint(2, 4)
        a = rand_symmetric(rng, n, 2)
        i = rng.randint(1, n)
        j = rng.randint(i, n)
        a_ij, v, scale = pivot_congruence(a, i, j)
        assert a_ij == v @ a @ v.transpose()
        avg = a[i - 1, j - 1] + Fraction(1, 2) * (a[i - 1, i - 1] + a[j - 1, j - 1])
        if i == j:
            avg = a[i - 1, i - 1]
        assert a_ij[0, 0] == scale * avg
        assert v.determinant().degree() == 0  # det is a nonzero constant


def test_pivot_index_validation():
    a = PolyMatrix.identity(3, 1)
    with pytest.raises(ValueError):
        pivot_congruence(a, 2, 1)
    with pytest.raises(ValueError):
        pivot_congruence(a, 0, 1)
    with pytest.raises(ValueError):
        pivot_congruence(a, 1, 4)


# -- single_path_diagonalize --------------------------------------------------


def test_single_path_identity():
    cert = single_path_diagonalize(PolyMatrix.identity(3, 1))
    assert cert.D == PolyMatrix.identity(3, 1)
    assert cert.w == Polynomial.one(1)


def test_single_path_example():
    a = M([["t1", "1"], ["1", "t1"]])
    cert = single_path_diagonalize(a)
    assert cert.D == PolyMatrix.diagonal([P("t1^3"), P("t1^3 - t1")])
    assert cert.w == P("t1^2")
    assert_certificate_holds(a, cert)


def test_single_path_zero_matrix_rejected():
    with pytest.raises(ZeroMatrix):
        single_path_diagonalize(PolyMatrix.zeros(2, 2, 1))


def test_single_path_zero_diagonal():
    # every diagonal entry vanishes; the off-diagonal averaged pivot carries
    a = M([["0", "t1"], ["t1", "0"]])
    cert = single_path_diagonalize(a)
    assert_certificate_holds(a, cert)
    assert not cert.w.is_zero()


def test_single_path_handles_non_standard_form():
    cert = single_path_diagonalize(VANISHING_MINORS)
    assert_certificate_holds(VANISHING_MINORS, cert)


def test_single_path_random_identities():
    # degree triples per recursion level, so n = 4 stays univariate
    rng = random.Random(304)
    for _ in range(40):
        n = rng.randint(2, 4)
        d = 1 if n == 4 else rng.randint(1, 2)
        a = rand_symmetric_total_deg(rng, n, d)
        if a.is_zero():
            continue
        cert = single_path_diagonalize(a)
        assert_certificate_holds(a, cert)


# -- diagonalization_bundle ---------------------------------------------------


def test_bundle_branch_counts():
    assert len(diagonalization_bundle(PolyMatrix.identity(2, 1)).branches) == 3
    a3 = M(
        [["t1", "1", "0"], ["1", "t1", "1"], ["0", "1", "t1"]]
    )
    assert len(diagonalization_bundle(a3).branches) == 18


def test_bundle_identity_subject():
    bundle = diagonalization_bundle(PolyMatrix.identity(2, 1))
    seen = set()
    for cert, trace in bundle.branches:
        assert_certificate_holds(PolyMatrix.identity(2, 1), cert)
        for entry in cert.D.diagonal_entries():
            assert entry.is_constant()
            seen.add(entry.constant_value())
    # pivot (1,2) on I_2 routes through corner value 2: entries 8 and 2
    assert seen == {Fraction(1), Fraction(8), Fraction(2)}


def test_bundle_branches_ordered_by_pivot():
    bundle = diagonalization_bundle(PolyMatrix.identity(2, 1))
    first_pivots = [trace.pivots[0] for _, trace in bundle.branches]
    assert first_pivots == [(1, 1), (1, 2), (2, 2)]
    assert [trace.scales[0] for _, trace in bundle.branches] == [1, 2, 1]


def test_bundle_rank_one_square():
    # v^t v for v = (t, 1); the (1,2) branch pivots on (t+1)^2
    a = M([["t1^2", "t1"], ["t1", "1"]])
    bundle = diagonalization_bundle(a)
    assert len(bundle.branches) == 3
    for cert, _ in bundle.branches:
        assert_certificate_holds(a, cert)
    cert12 = bundle.branches[1][0]
    assert bundle.branches[1][1].pivots == ((1, 2),)
    assert cert12.D[0, 0] == P("t1 + 1") ** 6
    assert cert12.D[1, 1].is_zero()


def test_bundle_compacts_zero_rows():
    a = PolyMatrix.diagonal([P("t1"), Polynomial.zero(1), P("1")])
    bundle = diagonalization_bundle(a)
    cert, trace = bundle.branches[0]
    assert trace.pivots == ((1, 1),)
    assert cert.D == PolyMatrix.diagonal([P("t1^3"), P("0"), P("t1^2")])
    assert cert.w == P("t1^2")
    for cert, _ in bundle.branches:
        assert_certificate_holds(a, cert)


def test_bundle_random_identities():
    rng = random.Random(305)
    for _ in range(20):
        n = rng.randint(2, 3)
        a = rand_symmetric_total_deg(rng, n, rng.randint(1, 2))
        if a.is_zero():
            continue
        bundle = diagonalization_bundle(a)
        for cert, trace in bundle.branches:
            assert_certificate_holds(a, cert)
            assert len(trace.pivots) >= 1


def test_bundle_trace_replay():
    """Replaying a branch trace reproduces its w as the product of
    squared corner values."""
    rng = random.Random(306)
    for _ in range(15):
        n = rng.randint(2, 3)
        a = rand_symmetric_total_deg(rng, n, 1)
        if a.is_zero():
            continue
        bundle = diagonalization_bundle(a)
        for cert, trace in bundle.branches:
            m = a
            w = Polynomial.one(1)
            for step, (i, j) in enumerate(trace.pivots):
                a_ij, v, scale = pivot_congruence(m, i, j)
                assert scale == trace.scales[step]
                alpha = a_ij[0, 0]
                w = w * alpha * alpha
                k = m.rows
                trailing = a_ij
                if k > 1:
                    at, _, xm_step, _ = block_step(a_ij)
                    trailing = at.submatrix(tuple(range(2, k + 1)), tuple(range(2, k + 1)))
                if trailing.is_zero():
                    assert step == len(trace.pivots) - 1
                    break
                kept = tuple(
                    p + 1
                    for p in range(trailing.rows)
                    if any(not trailing[p, q].is_zero() for q in range(trailing.cols))
                )
                m = trailing.submatrix(kept, kept)
            assert cert.w == w


def test_bundle_zero_matrix_rejected():
    with pytest.raises(ZeroMatrix):
        diagonalization_bundle(PolyMatrix.zeros(3, 3, 2))


def test_bundle_cap():
    a3 = M([["t1", "1", "0"], ["1", "t1", "1"], ["0", "1", "t1"]])
    with pytest.raises(BundleTooLarge):
        diagonalization_bundle(a3, cap_branches=5)
    with pytest.raises(ValueError):
        diagonalization_bundle(a3, cap_branches=0)
