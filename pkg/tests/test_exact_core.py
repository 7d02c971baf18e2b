"""Exact linear algebra: Mat3, dense and keyed solvers."""

from fractions import Fraction

import pytest

from skrw.exact import (Mat3, anticommutator, commutator, express_in_span,
                        levi_civita, solve_keyed, solve_linear)

F = Fraction


def test_mat3_arithmetic():
    a = Mat3(((1, 2, 0), (0, 1, 0), (3, 0, 1)))
    b = Mat3(((0, 1, 0), (1, 0, 0), (0, 0, 2)))
    assert (a + b) - b == a
    assert (a * b).trace() == F(4)
    assert (a * F(3))[2, 0] == F(9)
    assert (F(3) * a) == a * F(3)
    assert a.transpose().transpose() == a
    assert Mat3.identity().det() == 1
    assert a.det() == F(1)
    assert Mat3.from_flat(a.flatten()) == a


def test_mat3_symmetry_predicates():
    skew = Mat3(((0, 1, -2), (-1, 0, 3), (2, -3, 0)))
    assert skew.is_skew() and not skew.is_symmetric()
    sym = Mat3(((1, 2, 3), (2, 4, 5), (3, 5, 6)))
    assert sym.is_symmetric() and not sym.is_skew()
    assert Mat3.zero().is_zero()


def test_levi_civita():
    assert levi_civita(1, 2, 3) == 1
    assert levi_civita(2, 1, 3) == -1
    assert levi_civita(1, 1, 2) == 0
    total = sum(levi_civita(i, j, k) ** 2
                for i in (1, 2, 3) for j in (1, 2, 3) for k in (1, 2, 3))
    assert total == 6


def test_commutators():
    a = Mat3(((0, 1, 0), (-1, 0, 0), (0, 0, 0)))
    b = Mat3(((0, 0, 0), (0, 0, 1), (0, -1, 0)))
    assert commutator(a, a).is_zero()
    assert commutator(a, b) == -commutator(b, a)
    assert anticommutator(a, b) == anticommutator(b, a)


def test_solve_linear_unique():
    res = solve_linear([[2, 1], [1, 3]], [5, 10])
    assert res.consistent and res.kernel_dimension == 0
    assert res.particular == (F(1), F(3))
    assert res.rank == 2


def test_solve_linear_kernel_and_inconsistent():
    res = solve_linear([[1, 2, 3], [2, 4, 6]], [1, 2])
    assert res.consistent and res.kernel_dimension == 2
    for vec in res.kernel:
        assert sum(F(c) * v for c, v in zip([1, 2, 3], vec)) == 0
    bad = solve_linear([[1, 1], [1, 1]], [0, 1])
    assert not bad.consistent
    assert bad.kernel_dimension == 0


def test_solve_keyed_matches_dense():
    rows = [({"x": F(1), "y": F(2)}, F(5)),
            ({"y": F(1), "z": F(-1)}, F(0)),
            ({"x": F(1), "z": F(1)}, F(4))]
    res = solve_keyed(rows, ("x", "y", "z"))
    assert res.consistent and res.kernel_dimension == 0
    x, y, z = res.value("x"), res.value("y"), res.value("z")
    assert x + 2 * y == 5 and y == z and x + z == 4


def test_solve_keyed_kernel_and_gauge():
    rows = [({"x": F(1), "y": F(-1)}, F(0))]
    res = solve_keyed(rows, ("x", "y"))
    assert res.kernel_dimension == 1
    sol = res.at_gauge((F(7),))
    # both unknowns move together along the kernel direction
    assert sol.get("x", 0) == sol.get("y", 0)
    missing = res.value("unused")
    assert missing == 0


def test_solve_keyed_inconsistent():
    rows = [({"x": F(1)}, F(1)), ({"x": F(1)}, F(2))]
    res = solve_keyed(rows, ("x",))
    assert not res.consistent


def test_express_in_span():
    e1 = Mat3(((1, 0, 0), (0, 0, 0), (0, 0, 0)))
    e2 = Mat3(((0, 0, 0), (0, 1, 0), (0, 0, 0)))
    target = e1 * F(2) + e2 * F(-3)
    fit = express_in_span(target, [e1, e2])
    assert fit.in_span and fit.coeffs == (F(2), F(-3))
    off = Mat3(((0, 0, 0), (0, 0, 0), (0, 0, 1)))
    assert not express_in_span(off, [e1, e2]).in_span


def test_mat3_rejects_mutation():
    a = Mat3.identity()
    with pytest.raises(AttributeError):
        a.rows = ()
