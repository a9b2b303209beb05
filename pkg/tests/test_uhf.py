"""Tensor towers, the corner transfer operator, and the isometry dictionary."""

from fractions import Fraction

import pytest

from corealg.graph import bouquet
from corealg.scalar import ONE, Radical
from corealg.star_algebra import matrix_unit, unit
from corealg.uhf_cuntz import (
    CuntzFamilyError,
    TensorElement,
    UhfSystem,
    almost_faithful_witness,
    averaging_unitary,
    canonical_cuntz_family,
    iso_generators_check,
    orthonormal_columns,
    pi_T,
    pi_T_report,
    prefix_rep_sweep,
    rank_rescale,
    tensor_prepend,
    uhf_L,
    uhf_alpha,
    verify_cuntz_family,
    words,
)


def e(n, mu, nu, c=1):
    return TensorElement.unit_entry(n, tuple(mu), tuple(nu), c)


# -- tensor arithmetic ---------------------------------------------------------


def test_matrix_unit_multiplication():
    assert (e(2, [1], [2]) * e(2, [2], [1])).equal(e(2, [1], [1]))
    assert (e(2, [1], [2]) * e(2, [1], [2])).is_zero()
    two = e(2, [1, 2], [2, 1]) * e(2, [2, 1], [1, 1])
    assert two.equal(e(2, [1, 2], [1, 1]))


def test_lift_is_unital_embedding():
    a = e(2, [1], [2], Fraction(3, 5))
    lifted = a.lift(3)
    assert lifted.k == 3 and lifted.equal(a)
    assert lifted.trace() == a.trace() * 4  # trace scales with the tower step
    with pytest.raises(ValueError):
        lifted.lift(1)


def test_adjoint_and_trace():
    a = e(3, [1, 2], [2, 2], Fraction(1, 2)) + e(3, [1, 1], [1, 1])
    assert a.adjoint().adjoint().equal(a)
    assert a.trace() == 1
    assert TensorElement.identity(2, 2).trace() == 4
    assert (a * a.adjoint()).trace() == Fraction(5, 4)


def test_words_and_identity():
    assert len(words(2, 2)) == 4
    assert len(words(3, 0)) == 1
    ident = TensorElement.identity(2, 2)
    a = e(2, [1, 2], [2, 1])
    assert (ident * a).equal(a) and (a * ident).equal(a)


def test_to_numeric_matches_entries():
    a = e(2, [1], [2]) + e(2, [2], [1])
    m = a.to_numeric()
    assert m.shape == (2, 2)
    assert m[0, 1] == 1.0 and m[1, 0] == 1.0 and m[0, 0] == 0.0


# -- the (alpha, L) pair -------------------------------------------------------


def test_system_validation():
    with pytest.raises(ValueError):
        UhfSystem(2, 3)
    with pytest.raises(ValueError):
        UhfSystem(2, 0)


def test_alpha_prepends_corner():
    sys = UhfSystem(2, 2)
    a = e(2, [1], [2])
    img = uhf_alpha(sys, a)
    assert img.equal(tensor_prepend(sys.p_tensor(), a))
    assert img.k == 2
    # With the full corner (N = n) alpha is unital.
    assert uhf_alpha(sys, TensorElement.identity(2, 0)).equal(
        TensorElement.identity(2, 1))


def test_alpha_not_unital_on_proper_corner():
    sys = UhfSystem(2, 1)
    img = uhf_alpha(sys, TensorElement.identity(2, 0))
    assert img.equal(sys.p_tensor())
    assert not img.equal(TensorElement.identity(2, 1))


def test_transfer_values_pinned():
    sys = UhfSystem(2, 1)
    # L keeps e_{mu nu} only when the first letters agree and lie in the corner.
    assert uhf_L(sys, e(2, [1, 1], [1, 2])).equal(e(2, [1], [2]))
    assert uhf_L(sys, e(2, [2, 1], [2, 2])).is_zero()
    assert uhf_L(sys, e(2, [1, 1], [2, 2])).is_zero()
    wide = UhfSystem(2, 2)
    assert uhf_L(wide, e(2, [2, 1], [2, 2])).equal(e(2, [1], [2], Fraction(1, 2)))


def test_transfer_left_inverse_exhaustive():
    for n, N in ((2, 1), (2, 2), (3, 2)):
        sys = UhfSystem(n, N)
        for k in (0, 1, 2):
            for mu in words(n, k):
                for nu in words(n, k):
                    a = e(n, mu, nu)
                    assert uhf_L(sys, uhf_alpha(sys, a)).equal(a)


def test_transfer_module_identity():
    sys = UhfSystem(2, 2)
    for mu in words(2, 1):
        for nu in words(2, 1):
            a = e(2, mu, nu)
            for kap in words(2, 2):
                for lam in words(2, 2):
                    b = e(2, kap, lam)
                    lhs = uhf_L(sys, uhf_alpha(sys, a) * b)
                    assert lhs.equal(a * uhf_L(sys, b))


# -- isometry dictionary -------------------------------------------------------


def test_canonical_family_verifies():
    for n, N in ((2, 1), (2, 2), (3, 2)):
        g, family = canonical_cuntz_family(UhfSystem(n, N))
        assert len(g.edge_names) == n * N
        verify_cuntz_family(family)


def test_corrupted_family_rejected():
    g, family = canonical_cuntz_family(UhfSystem(2, 1))
    bad = dict(family)
    bad[(1, 1)] = bad[(2, 1)]
    with pytest.raises(CuntzFamilyError):
        verify_cuntz_family(bad)


def test_pi_T_pinned_single_isometries():
    sys = UhfSystem(2, 1)
    g, family = canonical_cuntz_family(sys)
    img = pi_T(sys, family, e(2, [1], [2]))
    expected = matrix_unit(g, g.path(["s1_1"]), g.path(["s2_1"]))
    assert img.equal(expected)
    assert pi_T(sys, family, TensorElement.identity(2, 0)).equal(unit(g))


def test_pi_T_multiplicative_report():
    for n, N in ((2, 1), (2, 2)):
        sys = UhfSystem(n, N)
        g, family = canonical_cuntz_family(sys)
        for k in (1, 2):
            a = e(n, [1] * k, ([2] if n > 1 else [1]) * k)
            report = pi_T_report(sys, family, a)
            assert report.passed, report.lines()


def test_prefix_model():
    sys = UhfSystem(2, 1)
    a = e(2, [1, 2], [1, 1]) + e(2, [2, 2], [2, 2], Fraction(1, 3))
    report = prefix_rep_sweep(sys, a, m=3)
    assert report.passed, report.lines()
    assert report.checks > 0


def test_almost_faithful_witness():
    sys = UhfSystem(2, 1)
    assert almost_faithful_witness(sys, e(2, [1], [1])) == (1, 1)
    assert almost_faithful_witness(sys, e(2, [2], [2])) is not None
    assert almost_faithful_witness(sys, TensorElement(2, 1)) is None


def test_averaging_unitary_pinned():
    u = averaging_unitary(2)
    h = Radical.inv_sqrt(2)
    assert u[0][0] == h and u[0][1] == h
    assert u[1][0] == h and u[1][1] == -h


def test_orthonormal_columns():
    cols = orthonormal_columns([[Fraction(1), Fraction(1)],
                                [Fraction(1), Fraction(0)]])
    for i in range(2):
        for j in range(2):
            dot = sum((cols[k][i] * cols[k][j] for k in range(2)), Radical())
            assert dot == (ONE if i == j else 0)


def test_rank_rescale_pinned():
    sys1, u, rep = rank_rescale(2, 1, e(2, [1], [1]))
    assert (sys1.n, sys1.N) == (2, 1) and rep.passed
    assert u[0][0] == ONE and u[1][1] == ONE and u[0][1] == 0
    p = tensor_prepend(e(2, [1], [1]), TensorElement.identity(2, 1))
    sys2, _, rep2 = rank_rescale(2, 2, p)
    assert (sys2.n, sys2.N) == (4, 2) and rep2.passed


def test_rank_rescale_rejects_non_projection():
    with pytest.raises(ValueError):
        rank_rescale(2, 1, e(2, [1], [2]))


def test_iso_generators():
    report = iso_generators_check(UhfSystem(2, 1))
    assert report.passed, report.lines()
