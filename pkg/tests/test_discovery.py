"""Discovery pipeline oracles at the worked point plus generic detection.

The canonical [T,T] coefficients are pinned against the classical s.t
tensor (computed in the commutative module, certified by its own Jacobi
suite) and against direct matrix arithmetic done here with Mat3 only.
"""

from fractions import Fraction

import pytest

from skrw.classical import rw_so3_table, st_coefficient_tensor
from skrw.discovery import (ClaimViolationError, ContractionGaugeError,
                            DiscoveryError, ST_SLOTS, TT_PAIRS, XiCoeffs,
                            candidate_family, orthogonality_readings,
                            rescale_consistency, solve_t_family, solve_tt,
                            solve_xi, t_family_residuals, verify_tables)
from skrw.exact import Mat3, anticommutator, commutator
from skrw.ncalg import BracketTables, NCPoly, T_LETTERS
from skrw.realization import SklyaninParams, realize

F = Fraction

GENERIC = SklyaninParams.of(1, 0, 2, 0, 0, 3)


def test_kernel_and_claims_at_diagonal(diagonal_run):
    fam = diagonal_run.family
    assert fam.kernel_dimension == 2
    assert fam.claims.ok
    assert fam.claims.traceless_rank == 1
    assert fam.claims.trace_ok
    assert fam.claims.trace_ratio == 1  # witness normalized to r = 1
    assert fam.candidate_in_span


def test_distinguished_family_matrices(diagonal_run):
    fam = diagonal_run.family
    assert fam.letter(4) == Mat3(((1, 0, 0), (0, 1, 0), (0, 0, -2)))
    for a in T_LETTERS:
        assert fam.letter(a).trace() == 0
        assert fam.letter(a).is_symmetric()


def test_family_solves_defining_system(diagonal_real, diagonal_run):
    residuals = t_family_residuals(diagonal_real, diagonal_run.family.matrices)
    assert all(r.is_zero() for r in residuals)


def test_candidate_proportional_to_traceless_part(diagonal_real, diagonal_run):
    cand = candidate_family(diagonal_real)
    fam = diagonal_run.family
    # remove traces, then the distinguished family is -3/2 of the candidate
    for slot, mat in cand.items():
        tl = mat - Mat3.identity() * (mat.trace() / 3)
        assert tl * F(-3, 2) == fam.matrices[slot]


def test_generic_point_violates_claims():
    real = realize(GENERIC)
    with pytest.raises(ClaimViolationError) as info:
        solve_t_family(real)
    fam = info.value.family
    assert fam.kernel_dimension == 1
    assert fam.claims.traceless_rank == 0
    relaxed = solve_t_family(real, require_claims=False)
    assert relaxed.matrices is None


def test_xi_vanishes_at_diagonal(diagonal_run):
    xi = diagonal_run.xi
    assert xi.solution_dimension == 0
    assert xi.certified
    assert not xi.xi


def test_forged_xi_breaks_tt_stage(diagonal_real, diagonal_run):
    fam = diagonal_run.family
    xi = diagonal_run.xi
    forged = dict(xi.xi)
    forged[("xi", 4, 1, 6)] = F(1, 3)
    with pytest.raises(DiscoveryError):
        solve_tt(diagonal_real, fam,
                 XiCoeffs(forged, xi.solution_dimension, xi.iterations, True))


def test_tt_canonical_values(diagonal_run):
    tt = diagonal_run.tt
    assert tt.formal_dimension == 2
    assert tt.gauge_dimension == 1
    assert tt.contraction.rho == F(3, 4)
    assert tt.contraction.t_rescale == F(-3, 2)
    assert sum(1 for v in tt.c.values() if v) == 37
    assert tt.value(4, 5, 1, 8) == 2       # [T11,T22] has 2*(S1 T23 + T23 S1)
    assert tt.value(6, 7, 1, 4) == F(9, 4)
    assert tt.value(5, 4, 1, 8) == -2      # antisymmetric accessor
    assert tt.ordering_agrees


def test_tt_matches_rescaled_classical_tensor(diagonal_run):
    gamma = st_coefficient_tensor(rw_so3_table("corrected"))
    tt = diagonal_run.tt
    rho = tt.contraction.rho
    seen = set()
    for (a, b, m, q), v in gamma.items():
        key = (a + 1, b + 1, m + 1, q + 1)
        assert tt.value(*key) == rho * v
        seen.add(("c",) + key)
    # nothing outside the classical support
    for key, v in tt.c.items():
        if v:
            assert key in seen


def test_tt_matrix_identities(diagonal_real, diagonal_run):
    fam = diagonal_run.family
    tt = diagonal_run.tt
    s = diagonal_real.s
    for (a, b) in TT_PAIRS:
        lhs = commutator(fam.letter(a), fam.letter(b))
        rhs = Mat3.zero()
        for (m, q) in ST_SLOTS:
            v = tt.value(a, b, m, q)
            if v:
                rhs = rhs + anticommutator(s[m - 1], fam.letter(q)) * v
        assert lhs == rhs


def test_q_commutes_with_family(diagonal_real, diagonal_run):
    q = diagonal_real.q
    for a in T_LETTERS:
        assert commutator(q, diagonal_run.family.letter(a)).is_zero()


def test_ttt_jacobi_is_an_obstruction(diagonal_run):
    ttt = diagonal_run.tt.ttt
    assert not ttt.all_zero
    assert len(ttt.nonzero_triples) == 10


def test_rescaling_consistency(diagonal_real, diagonal_run):
    assert rescale_consistency(diagonal_real, diagonal_run.family,
                               diagonal_run.xi, diagonal_run.tt, factor=2)


def test_scaled_family_scales_coefficients(diagonal_real, diagonal_run):
    fam2 = diagonal_run.family.scaled(F(2))
    xi2 = solve_xi(diagonal_real, fam2)
    tt2 = solve_tt(diagonal_real, fam2, xi2)
    for key, v in diagonal_run.tt.c.items():
        assert tt2.c.get(key, F(0)) == 2 * v
    assert tt2.contraction.rho == F(3, 2)


def test_orthogonality_readings(diagonal_real, diagonal_run):
    readings = orthogonality_readings(diagonal_real, diagonal_run.family)
    assert readings == {"pairwise": False, "mixed": True}


def test_structure_maps(diagonal_run):
    s = diagonal_run.structure
    assert s.generators == ("Q", "S1", "S2", "S3", "T11", "T22", "T12",
                            "T13", "T23")
    # T12.S1 reorders to S1 T12 - 2 Q T13
    assert s.r_map[(6, 1)].sorted_terms() == [((0, 7), F(-2)), ((1, 6), F(1))]
    assert all(v == 0 for v in s.sigma.values())
    assert s.t_map[(4, 5)] == ((F(2), 1, 8), (F(2), 2, 7), (F(2), 3, 6))
    meta = s.metadata
    assert meta["ttt_outcome"] == "fail"
    assert meta["ordering_independent"] is True
    assert meta["js"] == (F(0), F(0), F(0))


def test_verify_tables_pass_and_detect_corruption(diagonal_run):
    tables = diagonal_run.structure.tables
    out = verify_tables(tables)
    assert all(c["status"] == "pass" for c in out["checks"])
    assert out["experimental"]["ttt_jacobi"]["outcome"] == "fail"

    entries = dict(tables.entries)
    poly = entries[(1, 6)]
    bumped = dict(poly.terms)
    first = next(iter(bumped))
    bumped[first] = bumped[first] + F(1, 7)
    entries[(1, 6)] = NCPoly(bumped)
    bad = verify_tables(BracketTables(entries=entries))
    statuses = {c["name"]: c["status"] for c in bad["checks"]}
    assert statuses["jacobi-asserted"] == "fail"


def test_matrix_only_kernel_dimension(diagonal_real, diagonal_run):
    # the matrix constraints alone leave a huge solution space; joining
    # the formal Jacobi rows is what cuts it to the affine line
    from skrw.discovery import C_VARS, _matrix_rows
    from skrw.exact import solve_keyed

    res = solve_keyed(_matrix_rows(diagonal_real,
                                   diagonal_run.family.letters()), C_VARS)
    assert res.consistent
    assert res.kernel_dimension == 120


def test_contraction_gauge_rejects_unconstrained_space(diagonal_run):
    # with no rows at all every c is admissible and no unique classical
    # contraction point exists
    from skrw.discovery import C_VARS, _contraction_gauge
    from skrw.exact import solve_keyed

    free = solve_keyed([], C_VARS)
    assert free.kernel_dimension == len(C_VARS)
    with pytest.raises(ContractionGaugeError):
        _contraction_gauge(free)
