"""Matrix realization: dual-path Q, trace identities, J extraction."""

from fractions import Fraction

import pytest

from skrw.classical import so3_basis
from skrw.exact import Mat3
from skrw.realization import (DependentSError, SklyaninParams, build_s,
                              defining_residuals, expand_f, on_sklyanin_locus,
                              q_closed_form, q_from_linear_system,
                              q_solve_result, realize)
from skrw.sampling import child_rng, sample_general, sample_locus, sample_realizable

F = Fraction


def test_diagonal_point(diagonal_real):
    # worked point: scalar Q and a permuted so(3) triple
    assert diagonal_real.q == Mat3.identity() * F(-1, 2)
    e1, e2, e3 = so3_basis()
    assert diagonal_real.s == (e1, e3, e2)


def test_dual_path_q_on_samples():
    for i in range(25):
        rng = child_rng(11, i)
        p, real = sample_realizable(rng, sample_general)
        assert q_closed_form(p) == real.q
        res = q_solve_result(real.s)
        assert res.consistent and res.kernel_dimension == 0
        assert all(r.is_zero() for r in defining_residuals(real.s, real.q))


def test_q_solver_without_closed_form():
    s = build_s(SklyaninParams.of(1, "1/2", 2, 0, 0, 3))
    q = q_from_linear_system(s)
    assert all(r.is_zero() for r in defining_residuals(s, q))


def test_q_invertible_and_orthogonality():
    for i in range(15):
        rng = child_rng(12, i)
        _, real = sample_realizable(rng, sample_general)
        assert real.q.det() != 0
        s, q = real.s, real.q
        for a in range(3):
            for b in range(a + 1, 3):
                assert (s[a] * q * s[b] + s[b] * q * s[a]).trace() == 0


def test_locus_matches_trace_condition():
    for i in range(15):
        rng = child_rng(13, i)
        p, real = sample_realizable(rng, sample_locus)
        s = real.s
        assert on_sklyanin_locus(s)
        for a in range(3):
            for b in range(a + 1, 3):
                assert (s[a] * s[b]).trace() == 0
    # off-locus controls: each of beta, delta, epsilon alone breaks one trace
    for vals, pair in (((1, "1/2", 2, 0, 0, 3), (0, 1)),
                       ((1, 0, 2, "1/3", 0, 3), (0, 2)),
                       ((1, 0, 2, 0, "1/4", 3), (1, 2))):
        real = realize(SklyaninParams.of(*vals))
        s = real.s
        assert not on_sklyanin_locus(s)
        a, b = pair
        assert (s[a] * s[b]).trace() != 0


# closed-form J values, hand-computed from A = a^2, B = g^2, C = z^2:
# J23 = A(C-B)/(BC), J31 = B(A-C)/(CA), J12 = C(B-A)/(AB)
J_ORACLES = (
    ((1, 0, 2, 0, 0, 3), (F(27, 4), F(5, 36), F(-32, 9))),
    ((2, 0, 3, 0, 0, 5), (F(125, 36), F(64, 225), F(-189, 100))),
    ((1, 0, 2, 0, 0, -7), (F(147, 4), F(45, 196), F(-192, 49))),
)


@pytest.mark.parametrize("vals,js", J_ORACLES)
def test_j_extraction_against_closed_form(vals, js):
    real = realize(SklyaninParams.of(*vals))
    j = expand_f(real)
    assert j.js == js


def test_j_identity_on_locus_samples():
    for i in range(20):
        rng = child_rng(14, i)
        _, real = sample_realizable(rng, sample_locus)
        j12, j23, j31 = expand_f(real).js
        assert j12 + j23 + j31 + j12 * j23 * j31 == 0


def test_scalar_q_sublocus_j_zero(diagonal_real):
    assert expand_f(diagonal_real).js == (F(0), F(0), F(0))
    real = realize(SklyaninParams.of("3/5", 0, "-3/5", 0, 0, "3/5"))
    assert expand_f(real).js == (F(0), F(0), F(0))
    assert real.q == Mat3.identity() * real.q[0, 0]


def test_degenerate_parameters_rejected():
    # a vanishing parameter collapses one S matrix to zero
    with pytest.raises(DependentSError):
        realize(SklyaninParams.of(1, 0, 1, 0, 0, 0))
    with pytest.raises(DependentSError):
        realize(SklyaninParams.of(0, 0, 1, 0, 0, 1))
