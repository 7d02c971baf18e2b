"""Rewrite engine: normal forms, confluence, symmetrization, Jacobi."""

import random
from fractions import Fraction

import pytest

from skrw.exact import levi_civita
from skrw.ncalg import (BracketTables, DegreeCapError, MissingEntryError,
                        NCPoly, RewriteSystem, diamond_check, formal_jacobi,
                        random_order_reduction, render_nc, weyl_symmetrize,
                        word_key, word_ordered)

F = Fraction


def so3_tables() -> BracketTables:
    entries = {}
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            if i < j:
                k = ({1, 2, 3} - {i, j}).pop()
                entries[(i, j)] = NCPoly.term((k,), levi_civita(i, j, k))
    return BracketTables(entries=entries)


def so3_rules() -> RewriteSystem:
    return RewriteSystem(so3_tables(), degree_cap=3,
                         pair_filter=lambda b, a: 1 <= a and b <= 3)


def test_ncpoly_arithmetic():
    p = NCPoly.term((1, 2)) + NCPoly.term((1, 2), F(-1))
    assert p.is_zero()
    q = NCPoly.gen(1) * NCPoly.gen(2) + NCPoly.const(3)
    assert q.terms[(1, 2)] == 1 and q.terms[()] == 3
    assert render_nc(NCPoly.term((2, 1), F(-1, 2))) == "(-1/2)*S2*S1"


def test_word_order_helpers():
    assert word_ordered((1, 2, 2))
    assert not word_ordered((2, 1))
    # graded before lex
    assert word_key((3,)) < word_key((1, 1))


def test_so3_normal_form_single_step():
    rs = so3_rules()
    # S2S1 -> S1S2 - S3 in the Lie presentation
    nf = rs.normal_form(NCPoly.term((2, 1)))
    assert nf == NCPoly.term((1, 2)) + NCPoly.term((3,), F(-1))
    ordered = NCPoly.term((1, 2, 3))
    assert rs.normal_form(ordered) == ordered


def test_normal_form_idempotent_and_linear():
    rs = so3_rules()
    p = NCPoly.term((3, 2, 1), F(2)) + NCPoly.term((2, 1), F(-5))
    nf = rs.normal_form(p)
    assert rs.normal_form(nf) == nf
    split = rs.normal_form(NCPoly.term((3, 2, 1), F(2))) + \
        rs.normal_form(NCPoly.term((2, 1), F(-5)))
    assert nf == split


def test_degree_cap_enforced():
    rs = so3_rules()
    with pytest.raises(DegreeCapError):
        rs.normal_form(NCPoly.term((3, 2, 1, 1)))


def test_missing_entry_raises():
    tabs = so3_tables()
    with pytest.raises(MissingEntryError):
        tabs.bracket(4, 5)


def test_so3_diamond_passes():
    report = diamond_check(so3_rules())
    assert report.passed
    assert len(report.entries) == 1  # only S3S2S1 at degree 3


def test_corrupted_rule_breaks_diamond():
    # plain rescaling [S1,S2] = 2*S3 stays a Lie algebra; an added S1
    # term breaks Jacobi and the overlap must detect it
    entries = dict(so3_tables().entries)
    entries[(1, 2)] = NCPoly.term((3,)) + NCPoly.term((1,))
    rs = RewriteSystem(BracketTables(entries=entries), degree_cap=3,
                       pair_filter=lambda b, a: 1 <= a and b <= 3)
    assert not diamond_check(rs).passed


def test_random_order_reduction_agrees():
    rs = so3_rules()
    rng = random.Random("order-check")
    for _ in range(40):
        terms = {}
        for _ in range(rng.randint(1, 4)):
            w = tuple(rng.choice((1, 2, 3)) for _ in range(rng.randint(0, 3)))
            terms[w] = terms.get(w, F(0)) + F(rng.randint(-4, 4))
        p = NCPoly(terms)
        a = random_order_reduction(p, rs, random.Random(rng.random()))
        b = random_order_reduction(p, rs, random.Random(rng.random()))
        assert a == b == rs.normal_form(p)


def test_weyl_symmetrize():
    half = F(1, 2)
    assert weyl_symmetrize((1, 2)) == \
        NCPoly.term((1, 2), half) + NCPoly.term((2, 1), half)
    assert weyl_symmetrize((1, 1)) == NCPoly.term((1, 1))
    three = weyl_symmetrize((1, 2, 3))
    assert len(three.terms) == 6
    assert sum(three.terms.values()) == 1


def test_formal_jacobi_so3():
    rs = so3_rules()
    assert formal_jacobi(rs, (1, 2, 3)).is_zero()
    # repeated arguments vanish identically
    assert formal_jacobi(rs, (1, 1, 2)).is_zero()


def test_rule_order_flags_on_lie_presentation():
    rs = so3_rules()
    assert rs.strictly_lowering
