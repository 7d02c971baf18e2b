"""Discovery of the tensor-operator structure over a matrix realization.

Four stages, each exact:

1. solve_t_family: the 162x36 homogeneous system for six symmetric matrices
   T_jk with [S_i, T_jk] = sum_l eps_ijl (Q T_lk + T_lk Q)
                         + sum_l eps_ikl (Q T_jl + T_jl Q),
   with kernel-structure claim checks and a normalized traceless
   representative family.
2. solve_xi: the coefficients xi in [Q, T_a] = sum xi (S_k T_b + T_b S_k),
   determined by formal Jacobi identities for (Q, S, T) and (S, S, T)
   triples, certified nonlinearly and cross-checked in matrices.
3. solve_tt: the coefficients c in [T_a, T_b] = sum c (S_m T_q + T_q S_m),
   determined jointly by matrix equality and formal Jacobi for (S, T, T)
   and (Q, T, T) triples; the residual one-parameter gauge is fixed by
   requiring a single global rescaling onto the classical bracket table.
4. assemble_structure: bracket tables, the reordering map on T x {Q, S}
   words, the pair map on T-pairs, and shape checks.

The kernel-structure claims fail off the scalar-Q sublocus (where the
F_i do not vanish); solve_t_family reports that as a claim violation and
the later stages are only defined where the claims hold.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .classical import rw_so3_table, st_coefficient_tensor, st_entry
from .exact import (KeyedSolveResult, Mat3, Rat, anticommutator, commutator,
                    levi_civita, solve_keyed, solve_linear)
from .ncalg import (Affine, BracketTables, NCPoly, RewriteSystem, S_LETTERS,
                    T_LETTERS, T_LETTER_SLOT, diamond_check, formal_jacobi,
                    ordering_independence_check)
from .realization import SYM_PAIRS, SklyaninRealization, expand_f

# six matrix slots (j, k) with j <= k; the first three carry the trace
FULL_T_SLOTS = ((1, 1), (2, 2), (3, 3), (1, 2), (1, 3), (2, 3))
# symmetric 3x3 entry order used for the 6 coordinates of one slot
SYM_ENTRIES = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))

# (S letter, T letter) slots for symmetrized products S_k T_b + T_b S_k
ST_SLOTS = tuple((k, b) for k in S_LETTERS for b in T_LETTERS)

XI_VARS = tuple(("xi", a, k, b) for a in T_LETTERS for (k, b) in ST_SLOTS)

TT_PAIRS = tuple(combinations(T_LETTERS, 2))
C_VARS = tuple(("c", a, b, m, q) for (a, b) in TT_PAIRS for (m, q) in ST_SLOTS)

QST_TRIPLES = tuple((0, i, a) for i in S_LETTERS for a in T_LETTERS)
SST_TRIPLES = tuple((i, j, a) for i, j in combinations(S_LETTERS, 2)
                    for a in T_LETTERS)
STT_TRIPLES = tuple((i, a, b) for i in S_LETTERS for (a, b) in TT_PAIRS)
QTT_TRIPLES = tuple((0, a, b) for (a, b) in TT_PAIRS)
TTT_TRIPLES = tuple(combinations(T_LETTERS, 3))


class DiscoveryError(Exception):
    """Base for discovery-stage failures."""


class EmptyKernelError(DiscoveryError):
    """The T-system has only the zero solution; no family exists at all."""


class ClaimViolationError(DiscoveryError):
    """Kernel structure contradicts the claimed T-family shape.

    Carries the full family report so callers can surface the witness.
    """

    def __init__(self, message: str, family: "TFamily") -> None:
        super().__init__(message)
        self.family = family


class InconsistentSystemError(DiscoveryError):
    """A formal linear stage admits no exact solution."""


class EvaluationMismatchError(DiscoveryError):
    """A formal solution fails its matrix-level cross-check."""


class ContractionGaugeError(DiscoveryError):
    """The classical single-rescale condition does not pin the gauge."""

    def __init__(self, message: str, kernel: tuple) -> None:
        super().__init__(message)
        self.kernel = kernel


class ShapeViolationError(DiscoveryError):
    """A solved bracket lands outside its declared structural form."""


def reordering_pair(b: int, a: int) -> bool:
    """Rule filter keeping S.S, S.Q, T.S and T.Q swaps but no T.T swaps."""
    return not (b in T_LETTERS and a in T_LETTERS)


# ---------------------------------------------------------------------------
# stage 1: the matrix T-system


@dataclass(frozen=True)
class TFamilyClaims:
    """Non-vacuous kernel-structure checks.

    traceless_rank counts independent traceless components across the
    kernel (the claim needs exactly 1: a line, unique up to a common
    multiple). trace_witness gives kernel coordinates of an element whose
    trace part T11+T22+T33 equals trace_ratio * Q with nonzero ratio.
    """

    traceless_rank: int
    trace_witness: tuple[Rat, ...] | None
    trace_ratio: Rat | None

    @property
    def line_ok(self) -> bool:
        return self.traceless_rank == 1

    @property
    def trace_ok(self) -> bool:
        return self.trace_witness is not None

    @property
    def ok(self) -> bool:
        return self.line_ok and self.trace_ok


@dataclass(frozen=True)
class TFamily:
    """Kernel of the T-system plus the distinguished traceless family.

    matrices covers all six slots of the distinguished representative
    (trace part zero, first nonzero coordinate normalized to 1); None when
    the claims fail. kernel holds 36-coordinate basis vectors in slot-major
    order FULL_T_SLOTS x SYM_ENTRIES.
    """

    matrices: dict | None
    kernel: tuple[tuple[Rat, ...], ...]
    kernel_dimension: int
    normalization: str
    claims: TFamilyClaims
    candidate_in_span: bool

    def letter(self, a: int) -> Mat3:
        if self.matrices is None:
            raise DiscoveryError("no distinguished family available")
        return self.matrices[T_LETTER_SLOT[a]]

    def letters(self) -> dict[int, Mat3]:
        return {a: self.letter(a) for a in T_LETTERS}

    def scaled(self, factor) -> "TFamily":
        f = Fraction(factor)
        mats = {slot: m * f for slot, m in self.matrices.items()}
        return TFamily(mats, self.kernel, self.kernel_dimension,
                       f"scaled-{f}", self.claims, self.candidate_in_span)


def t_system_rows(real: SklyaninRealization) -> list[list[Rat]]:
    """162 rows over the 36 symmetric-entry unknowns, slot-major."""
    s = real.s
    q = real.q
    e_slots = [(r, c) for r in range(3) for c in range(3)]

    def unit(slot: int, si: int) -> dict[int, Mat3]:
        m = [[Fraction(0)] * 3 for _ in range(3)]
        r, c = SYM_ENTRIES[si]
        m[r][c] = Fraction(1)
        m[c][r] = Fraction(1)
        out = {k: Mat3.zero() for k in range(6)}
        out[slot] = Mat3(m)
        return out

    def slot_of(a: int, b: int) -> int:
        return FULL_T_SLOTS.index((min(a, b), max(a, b)))

    basis = [(slot, si) for slot in range(6) for si in range(6)]
    rows = []
    for i in range(1, 4):
        for (j, k) in FULL_T_SLOTS:
            cols = []
            for (slot, si) in basis:
                tm = unit(slot, si)
                resid = commutator(s[i - 1], tm[slot_of(j, k)])
                for l in range(1, 4):
                    e1 = levi_civita(i, j, l)
                    if e1:
                        resid = resid - anticommutator(q, tm[slot_of(l, k)]) * Fraction(e1)
                    e2 = levi_civita(i, k, l)
                    if e2:
                        resid = resid - anticommutator(q, tm[slot_of(j, l)]) * Fraction(e2)
                cols.append([resid[r, c] for (r, c) in e_slots])
            for ei in range(9):
                rows.append([cols[v][ei] for v in range(36)])
    return rows


def vector_to_matrices(vec) -> dict:
    """36-coordinate kernel vector to the six symmetric slot matrices."""
    out = {}
    for n, slot in enumerate(FULL_T_SLOTS):
        m = [[Fraction(0)] * 3 for _ in range(3)]
        for si, (r, c) in enumerate(SYM_ENTRIES):
            v = vec[n * 6 + si]
            m[r][c] = v
            m[c][r] = v
        out[slot] = Mat3(m)
    return out


def matrices_to_vector(mats: dict) -> tuple[Rat, ...]:
    return tuple(mats[slot][r, c] for slot in FULL_T_SLOTS for (r, c) in SYM_ENTRIES)


def _traceless_coords(vec) -> list[Rat]:
    """Off-diagonal slots plus the two diagonal differences (30 numbers)."""
    out = []
    for n in range(3, 6):
        out.extend(vec[n * 6:(n + 1) * 6])
    for n in (0, 1):
        out.extend(vec[n * 6 + si] - vec[(n + 1) * 6 + si] for si in range(6))
    return out


def _trace_matrix(vec) -> Mat3:
    mats = vector_to_matrices(vec)
    return mats[(1, 1)] + mats[(2, 2)] + mats[(3, 3)]


def candidate_family(real: SklyaninRealization) -> dict:
    """The anticommutator family T_jk = S_j S_k + S_k S_j on all six slots."""
    s = real.s
    return {(j, k): anticommutator(s[j - 1], s[k - 1]) for (j, k) in FULL_T_SLOTS}


def t_family_residuals(real: SklyaninRealization, mats: dict) -> list[Mat3]:
    """Direct matrix audit of the defining relations for a full family."""
    s = real.s
    q = real.q
    out = []
    for i in range(1, 4):
        for (j, k) in FULL_T_SLOTS:
            resid = commutator(s[i - 1], mats[(j, k)])
            for l in range(1, 4):
                e1 = levi_civita(i, j, l)
                if e1:
                    resid = resid - anticommutator(q, mats[(min(l, k), max(l, k))]) * Fraction(e1)
                e2 = levi_civita(i, k, l)
                if e2:
                    resid = resid - anticommutator(q, mats[(min(j, l), max(j, l))]) * Fraction(e2)
            out.append(resid)
    return out


def solve_t_family(real: SklyaninRealization,
                   require_claims: bool = True) -> TFamily:
    """Kernel of the T-system with claim checks and a normalized family.

    Claim (a): the traceless components across the kernel span exactly a
    line. Claim (b): some kernel element has nonzero trace part exactly
    proportional to Q. Both are checked non-vacuously; with require_claims
    a violation raises ClaimViolationError carrying the report.
    """
    rows = t_system_rows(real)
    res = solve_linear(rows, [Fraction(0)] * len(rows))
    kb = res.kernel
    if not kb:
        raise EmptyKernelError("T-system kernel is zero")

    tl_rank = solve_linear([_traceless_coords(v) for v in kb],
                           [Fraction(0)] * len(kb)).rank

    # claim (b): unknowns (x_1..x_k, r) with sum x_i M_i = r Q, r != 0
    traces = [_trace_matrix(v) for v in kb]
    brow = []
    for (p, qq) in SYM_ENTRIES:
        brow.append([m[p, qq] for m in traces] + [-real.q[p, qq]])
    bres = solve_linear(brow, [Fraction(0)] * len(brow))
    witness = None
    ratio = None
    for vec in bres.kernel:
        if vec[-1] != 0:
            inv = 1 / vec[-1]
            witness = tuple(x * inv for x in vec[:-1])
            ratio = Fraction(1)
            break
    claims = TFamilyClaims(tl_rank, witness, ratio)

    cand = matrices_to_vector(candidate_family(real))
    cres = solve_linear([[kb[i][e] for i in range(len(kb))] for e in range(36)],
                        list(cand))
    in_span = cres.consistent

    distinguished = None
    if claims.ok:
        # trace-free kernel combos: sum x_i M_i = 0
        zrow = [[m[p, qq] for m in traces] for (p, qq) in SYM_ENTRIES]
        zres = solve_linear(zrow, [Fraction(0)] * len(zrow))
        for combo in zres.kernel:
            vec = [sum(combo[i] * kb[i][e] for i in range(len(kb)))
                   for e in range(36)]
            if any(x != 0 for x in _traceless_coords(vec)):
                first = next(x for x in vec if x != 0)
                vec = [x / first for x in vec]
                distinguished = vector_to_matrices(vec)
                break
        if distinguished is None:
            raise DiscoveryError(
                "claims hold but no trace-free kernel element has a "
                "nonzero traceless part")
        bad = [r for r in t_family_residuals(real, distinguished)
               if not r.is_zero()]
        if bad:
            raise DiscoveryError("distinguished family fails the relations")

    family = TFamily(distinguished, kb, len(kb), "first-nonzero-1",
                     claims, in_span)
    if require_claims and not claims.ok:
        parts = []
        if not claims.line_ok:
            parts.append(f"traceless components have rank {tl_rank}, not 1")
        if not claims.trace_ok:
            parts.append("no kernel element has nonzero trace part "
                         "proportional to Q")
        raise ClaimViolationError("; ".join(parts), family)
    return family


def orthogonality_readings(real: SklyaninRealization, family: TFamily) -> dict:
    """Record which candidate readings of Q-orthogonality hold empirically.

    Reading "pairwise": tr(T_a Q T_b + T_b Q T_a) = 0 for all slot pairs.
    Reading "mixed": tr(S_i Q T_a + T_a Q S_i) = 0 for all i and slots.
    """
    q = real.q
    mats = family.matrices
    pairwise = all(
        (mats[p1] * q * mats[p2] + mats[p2] * q * mats[p1]).trace() == 0
        for p1, p2 in combinations(FULL_T_SLOTS, 2))
    mixed = all(
        (real.s[i - 1] * q * mats[p] + mats[p] * q * real.s[i - 1]).trace() == 0
        for i in range(1, 4) for p in FULL_T_SLOTS)
    return {"pairwise": pairwise, "mixed": mixed}


# ---------------------------------------------------------------------------
# formal bracket tables over the nine-letter alphabet


def sq_entries(real: SklyaninRealization) -> dict:
    """[S_i, S_j] and [Q, S_i] entries from the realization's F-expansion."""
    ent = {}
    for i in range(1, 4):
        for j in range(i + 1, 4):
            k = ({1, 2, 3} - {i, j}).pop()
            e = levi_civita(i, j, k)
            ent[(i, j)] = NCPoly({(0, k): Fraction(e), (k, 0): Fraction(e)})
    exp = expand_f(real)
    for i in range(1, 4):
        terms: dict = {}
        for (a, b), c in zip(SYM_PAIRS, exp.coeffs[i - 1]):
            if c == 0:
                continue
            if a == b:
                terms[(a, a)] = terms.get((a, a), Fraction(0)) + 2 * c
            else:
                terms[(a, b)] = terms.get((a, b), Fraction(0)) + c
                terms[(b, a)] = terms.get((b, a), Fraction(0)) + c
        ent[(0, i)] = NCPoly(terms)
    return ent


def st_entries() -> dict:
    """[S_i, T_a] = equivariant action with Q-symmetrized coefficients.

    Point-independent: the action constants come from the corrected
    classical table, with each t-generator coefficient carried by the
    symmetrized pair Q T_b + T_b Q.
    """
    ent = {}
    for i in range(1, 4):
        for a in T_LETTERS:
            act = st_entry(i, T_LETTER_SLOT[a])
            terms: dict = {}
            for exps, c in act.terms.items():
                b = exps.index(1) + 1
                terms[(0, b)] = terms.get((0, b), Fraction(0)) + c
                terms[(b, 0)] = terms.get((b, 0), Fraction(0)) + c
            ent[(i, a)] = NCPoly(terms)
    return ent


def qt_entries(xi: dict) -> dict:
    """[Q, T_a] = sum xi (S_k T_b + T_b S_k) from exact coefficients."""
    ent = {}
    for a in T_LETTERS:
        terms: dict = {}
        for (k, b) in ST_SLOTS:
            co = xi.get(("xi", a, k, b), Fraction(0))
            if co == 0:
                continue
            for w in ((k, b), (b, k)):
                terms[w] = terms.get(w, Fraction(0)) + co
        ent[(0, a)] = NCPoly(terms)
    return ent


def _qt_entries_affine(base: dict) -> dict:
    ent = {}
    for a in T_LETTERS:
        terms: dict = {}
        for (k, b) in ST_SLOTS:
            co = Affine.var(("xi", a, k, b), base.get(("xi", a, k, b), Fraction(0)))
            for w in ((k, b), (b, k)):
                terms[w] = terms.get(w, Affine(0)) + co
        ent[(0, a)] = NCPoly(terms)
    return ent


def tt_entries(c: dict) -> dict:
    """[T_a, T_b] = sum c (S_m T_q + T_q S_m) from exact coefficients."""
    ent = {}
    for (a, b) in TT_PAIRS:
        terms: dict = {}
        for (m, q) in ST_SLOTS:
            co = c.get(("c", a, b, m, q), Fraction(0))
            if co == 0:
                continue
            for w in ((m, q), (q, m)):
                terms[w] = terms.get(w, Fraction(0)) + co
        ent[(a, b)] = NCPoly(terms)
    return ent


def _tt_entries_affine() -> dict:
    ent = {}
    for (a, b) in TT_PAIRS:
        terms: dict = {}
        for (m, q) in ST_SLOTS:
            co = Affine(0, {("c", a, b, m, q): Fraction(1)})
            for w in ((m, q), (q, m)):
                terms[w] = terms.get(w, Affine(0)) + co
        ent[(a, b)] = NCPoly(terms)
    return ent


def base_entries(real: SklyaninRealization) -> dict:
    return {**sq_entries(real), **st_entries()}


def full_entries(real: SklyaninRealization, xi: dict, c: dict) -> dict:
    return {**base_entries(real), **qt_entries(xi), **tt_entries(c)}


def _residual_rows(residuals) -> list[tuple[dict, Rat]]:
    rows = []
    for r in residuals:
        for _, co in r.sorted_terms():
            if isinstance(co, Affine):
                rows.append((dict(co.lin), -co.const))
            elif co != 0:
                rows.append(({}, -Fraction(co)))
    return rows


# ---------------------------------------------------------------------------
# stage 2: the [Q, T] coefficients


@dataclass(frozen=True)
class XiCoeffs:
    """Solved [Q,T] coefficients with the formal solution-set dimension.

    xi maps ("xi", a, k, b) keys to nonzero values only; certified means
    the pure-coefficient rebuild had identically zero residuals for every
    (Q,S,T) and (S,S,T) triple.
    """

    xi: dict
    solution_dimension: int
    iterations: int
    certified: bool

    def value(self, a: int, k: int, b: int) -> Rat:
        return self.xi.get(("xi", a, k, b), Fraction(0))


def _xi_residuals(real: SklyaninRealization, qt: dict,
                  degree_cap: int) -> list[NCPoly]:
    ent = {**base_entries(real), **qt}
    rs = RewriteSystem(BracketTables(ent), degree_cap=degree_cap,
                       pair_filter=reordering_pair)
    return [formal_jacobi(rs, tr) for tr in QST_TRIPLES + SST_TRIPLES]


def solve_xi(real: SklyaninRealization, family: TFamily,
             degree_cap: int = 3, max_iterations: int = 4) -> XiCoeffs:
    """Solve the formal (Q,S,T) + (S,S,T) Jacobi system for xi.

    The reduced residuals are quadratic in xi (xi-dependent rules act on
    xi-dependent coefficients), so each pass solves the exact first-order
    system at the current base point; the certificate then rebuilds the
    tables with plain Fraction coefficients and demands identically zero
    residuals. Matrix cross-check: the evaluated sum against [Q, T_a].
    """
    xi: dict = {}
    dim = None
    for it in range(1, max_iterations + 1):
        res = _xi_residuals(real, _qt_entries_affine(xi), degree_cap)
        solved = solve_keyed(_residual_rows(res), XI_VARS)
        if not solved.consistent:
            raise InconsistentSystemError(
                "formal [Q,T] stage admits no exact solution")
        dim = solved.kernel_dimension
        xi_new = {key: solved.value(key) for key in XI_VARS if solved.value(key)}
        exact = _xi_residuals(real, qt_entries(xi_new), degree_cap)
        if all(r.is_zero() for r in exact):
            xi = xi_new
            break
        if xi_new == xi:
            raise InconsistentSystemError(
                "formal [Q,T] iteration stalled without a certificate")
        xi = xi_new
    else:
        raise InconsistentSystemError(
            "formal [Q,T] iteration failed to certify")

    for a in T_LETTERS:
        acc = commutator(real.q, family.letter(a))
        for (k, b) in ST_SLOTS:
            co = xi.get(("xi", a, k, b), Fraction(0))
            if co:
                acc = acc - anticommutator(real.s[k - 1], family.letter(b)) * co
        if not acc.is_zero():
            raise EvaluationMismatchError(
                f"evaluated [Q,T] mismatch on letter {a}")
    return XiCoeffs(xi, dim, it, True)


# ---------------------------------------------------------------------------
# stage 3: the [T, T] coefficients


@dataclass(frozen=True)
class ContractionFit:
    """Unique single-rescale match onto the classical bracket table.

    c = rho * gamma entrywise over the classical s.t coefficients gamma,
    under the sign convention S_i -> -s_i; equivalently the T-rescale
    T -> mu t with mu = -2 rho. support counts matched table slots.
    """

    rho: Rat
    t_rescale: Rat
    support: int
    gauge_point: tuple[Rat, ...]


@dataclass(frozen=True)
class TTTReport:
    """Experimental outcome of the formal (T,T,T) Jacobi residuals."""

    zero_triples: tuple
    nonzero_triples: tuple
    witness: dict

    @property
    def all_zero(self) -> bool:
        return not self.nonzero_triples


@dataclass(frozen=True)
class TTSolve:
    """Canonical [T,T] coefficients and their determination record.

    c holds nonzero ("c", a, b, m, q) entries for a < b (antisymmetry in
    the pair is by storage). gauge_dimension is the solution-space
    dimension of the joint matrix+formal system before the contraction
    gauge; formal_dimension drops the matrix rows.
    """

    c: dict
    gauge_dimension: int
    formal_dimension: int
    contraction: ContractionFit
    ttt: TTTReport
    ordering_agrees: bool

    def value(self, a: int, b: int, m: int, q: int) -> Rat:
        if a == b:
            return Fraction(0)
        if a < b:
            return self.c.get(("c", a, b, m, q), Fraction(0))
        return -self.c.get(("c", b, a, m, q), Fraction(0))


def _matrix_rows(real: SklyaninRealization, letters: dict) -> list:
    prods = {(m, q): anticommutator(real.s[m - 1], letters[q])
             for (m, q) in ST_SLOTS}
    rows = []
    for (a, b) in TT_PAIRS:
        target = commutator(letters[a], letters[b])
        for r in range(3):
            for col in range(3):
                lin = {}
                for (m, q) in ST_SLOTS:
                    v = prods[(m, q)][r, col]
                    if v:
                        lin[("c", a, b, m, q)] = v
                rows.append((lin, target[r, col]))
    return rows


def _classical_support() -> dict:
    """Classical s.t coefficients keyed by the quantum c-variable."""
    tensor = st_coefficient_tensor(rw_so3_table("corrected"))
    return {("c", a + 1, b + 1, m + 1, q + 1): gamma
            for (a, b, m, q), gamma in tensor.items()}


def _contraction_gauge(joint: KeyedSolveResult) -> tuple[tuple, Rat]:
    """Pin the residual gauge by the single-rescale classical condition.

    Unknowns: one parameter per kernel direction plus the scale rho.
    Support slots demand c(t) = rho * gamma; every other slot with data
    demands c(t) = 0. Overdetermined; must have a unique solution.
    """
    support = _classical_support()
    g = joint.kernel_dimension
    rows = []
    rhs = []
    keys = set(support)
    keys.update(joint.particular)
    for vec in joint.kernel:
        keys.update(vec)
    for key in sorted(keys):
        row = [vec.get(key, Fraction(0)) for vec in joint.kernel]
        row.append(-support.get(key, Fraction(0)))
        rows.append(row)
        rhs.append(-joint.particular.get(key, Fraction(0)))
    res = solve_linear(rows, rhs)
    if not res.consistent:
        raise ContractionGaugeError(
            "no gauge point matches the classical table by one rescale",
            joint.kernel)
    if res.kernel_dimension != 0:
        raise ContractionGaugeError(
            "classical rescale condition leaves residual freedom",
            joint.kernel)
    ts = res.particular[:g]
    rho = res.particular[g]
    if rho == 0:
        raise ContractionGaugeError("degenerate zero-scale classical fit",
                                    joint.kernel)
    return ts, rho


def solve_tt(real: SklyaninRealization, family: TFamily, xi: XiCoeffs,
             degree_cap: int = 3) -> TTSolve:
    """Joint matrix+formal solve for the [T,T] coefficients.

    Constraints: (i) matrix equality [T_a,T_b] = sum c (S_m T_q + T_q S_m)
    for the family's matrices, (ii) formal Jacobi for (S,T,T) and (Q,T,T)
    triples. The formal system alone is homogeneous in c; the joint
    solution set is an affine subspace whose dimension is reported, and
    the classical contraction picks the canonical point. Certificates:
    formal residuals identically zero, zero residual matrices, ordering
    independence of the symmetrized right-hand sides.
    """
    base = base_entries(real)
    qt = qt_entries(xi.xi)

    ent = {**base, **qt, **_tt_entries_affine()}
    rs = RewriteSystem(BracketTables(ent), degree_cap=degree_cap)
    formal_rows = _residual_rows(
        [formal_jacobi(rs, tr) for tr in STT_TRIPLES + QTT_TRIPLES])

    formal_only = solve_keyed(formal_rows, C_VARS)
    if not formal_only.consistent:
        raise InconsistentSystemError("formal [T,T] stage is inconsistent")

    letters = family.letters()
    joint = solve_keyed(formal_rows + _matrix_rows(real, letters), C_VARS)
    if not joint.consistent:
        raise InconsistentSystemError(
            "matrix and formal [T,T] constraints are jointly inconsistent")

    ts, rho = _contraction_gauge(joint)
    c = joint.at_gauge(ts)

    ent_x = {**base, **qt, **tt_entries(c)}
    rs_x = RewriteSystem(BracketTables(ent_x), degree_cap=degree_cap)
    for tr in STT_TRIPLES + QTT_TRIPLES:
        if not formal_jacobi(rs_x, tr).is_zero():
            raise InconsistentSystemError(
                f"canonical c fails the formal certificate on {tr}")

    prods = {(m, q): anticommutator(real.s[m - 1], letters[q])
             for (m, q) in ST_SLOTS}
    for (a, b) in TT_PAIRS:
        acc = commutator(letters[a], letters[b])
        for (m, q) in ST_SLOTS:
            v = c.get(("c", a, b, m, q), Fraction(0))
            if v:
                acc = acc - prods[(m, q)] * v
        if not acc.is_zero():
            raise EvaluationMismatchError(
                f"matrix [T,T] residual nonzero for pair {(a, b)}")

    support = _classical_support()
    matched = 0
    for key, gamma in support.items():
        if c.get(key, Fraction(0)) != rho * gamma:
            raise ContractionGaugeError(
                f"canonical c misses the classical slot {key}", joint.kernel)
        matched += 1
    for key, v in c.items():
        if key not in support and v != 0:
            raise ContractionGaugeError(
                f"canonical c leaks outside the classical support at {key}",
                joint.kernel)
    fit = ContractionFit(rho, -2 * rho, matched, tuple(ts))

    ttt_res = [formal_jacobi(rs_x, tr) for tr in TTT_TRIPLES]
    zero = tuple(tr for tr, r in zip(TTT_TRIPLES, ttt_res) if r.is_zero())
    nonzero = tuple(tr for tr, r in zip(TTT_TRIPLES, ttt_res)
                    if not r.is_zero())
    witness = {}
    for tr, r in zip(TTT_TRIPLES, ttt_res):
        if not r.is_zero():
            witness[tr] = r.sorted_terms()[:2]
    ttt = TTTReport(zero, nonzero, witness)

    sym_rhs = {}
    for (a, b) in TT_PAIRS:
        terms = [(v, m, q) for (m, q) in ST_SLOTS
                 if (v := c.get(("c", a, b, m, q), Fraction(0)))]
        sym_rhs[(a, b)] = terms
    ordering = ordering_independence_check(sym_rhs, rs_x)
    agrees = all(rep["agree"] for rep in ordering.values())

    return TTSolve(c, joint.kernel_dimension, formal_only.kernel_dimension,
                   fit, ttt, agrees)


def rescale_consistency(real: SklyaninRealization, family: TFamily,
                        xi: XiCoeffs, tt: TTSolve,
                        factor=2) -> bool:
    """Audit: scaling T by mu scales the canonical c and rho by mu.

    Re-derives the contraction fit on the scaled family from the scaled
    matrix constraints (the formal constraints are scale-invariant).
    """
    f = Fraction(factor)
    scaled = family.scaled(f)
    letters = scaled.letters()
    expect = {k: v * f for k, v in tt.c.items()}
    prods = {(m, q): anticommutator(real.s[m - 1], letters[q])
             for (m, q) in ST_SLOTS}
    for (a, b) in TT_PAIRS:
        acc = commutator(letters[a], letters[b])
        for (m, q) in ST_SLOTS:
            v = expect.get(("c", a, b, m, q), Fraction(0))
            if v:
                acc = acc - prods[(m, q)] * v
        if not acc.is_zero():
            return False
    support = _classical_support()
    rho = tt.contraction.rho * f
    return all(expect.get(k, Fraction(0)) == rho * g for k, g in support.items())


# ---------------------------------------------------------------------------
# stage 4: structure assembly


@dataclass(frozen=True)
class NWSOStructure:
    """Assembled bracket tables plus the reordering and pair maps.

    r_map keys are (t_letter, algebra_letter) with the normal form of the
    product t.algebra as value (every word: one algebra letter then one
    t-letter, or the commuted pair). t_map keys are t-letter pairs with
    the list of (coefficient, s_letter, t_letter) symmetrized terms.
    sigma is the scalar part of the pair map, identically zero here.
    """

    generators: tuple[str, ...]
    tables: BracketTables
    r_map: dict
    t_map: dict
    sigma: dict
    metadata: dict

    def bracket(self, i: int, j: int) -> NCPoly:
        return self.tables.bracket(i, j)


GENERATOR_NAMES = ("Q", "S1", "S2", "S3", "T11", "T22", "T12", "T13", "T23")


def assemble_structure(real: SklyaninRealization, family: TFamily,
                       xi: XiCoeffs, tt: TTSolve,
                       degree_cap: int = 3) -> NWSOStructure:
    """Package tables, derive the reordering map, run shape checks."""
    entries = full_entries(real, xi.xi, tt.c)
    tables = BracketTables(entries)
    rs = RewriteSystem(tables, degree_cap=degree_cap,
                       pair_filter=reordering_pair)

    r_map = {}
    for t in T_LETTERS:
        for x in (0,) + S_LETTERS:
            nf = rs.normal_form(NCPoly.term((t, x)))
            for word, _ in nf.sorted_terms():
                if len(word) != 2 or word[0] in T_LETTERS or word[1] not in T_LETTERS:
                    raise ShapeViolationError(
                        f"reordering of T{t}.X{x} leaves the algebra-tensor form")
            r_map[(t, x)] = nf

    t_map = {}
    for (a, b) in TT_PAIRS:
        terms = []
        for (m, q) in ST_SLOTS:
            v = tt.c.get(("c", a, b, m, q), Fraction(0))
            if v:
                terms.append((v, m, q))
        t_map[(a, b)] = tuple(terms)
        entry = entries[(a, b)]
        for word, _ in entry.sorted_terms():
            s_count = sum(1 for letter in word if letter in S_LETTERS)
            t_count = sum(1 for letter in word if letter in T_LETTERS)
            q_count = sum(1 for letter in word if letter == 0)
            if not (s_count == 1 and t_count == 1 and q_count == 0):
                raise ShapeViolationError(
                    f"[T,T] entry for {(a, b)} is not S-linear T-linear")

    sigma = {pair: Fraction(0) for pair in TT_PAIRS}

    # round-trip audit: reordering T12.S1 and re-expanding returns S1.T12
    probe = r_map[(6, 1)]
    back = rs.normal_form(probe + tables.bracket(1, 6))
    if back != rs.normal_form(NCPoly.term((1, 6))):
        raise ShapeViolationError("reordering round-trip failed for T12.S1")

    j = expand_f(real)
    metadata = {
        "parameters": str(real.params),
        "t_normalization": family.normalization,
        "t_kernel_dimension": family.kernel_dimension,
        "xi_solution_dimension": xi.solution_dimension,
        "tt_gauge_dimension": tt.gauge_dimension,
        "tt_formal_dimension": tt.formal_dimension,
        "contraction_rho": tt.contraction.rho,
        "contraction_t_rescale": tt.contraction.t_rescale,
        "ttt_outcome": "pass" if tt.ttt.all_zero else "fail",
        "ordering_independent": tt.ordering_agrees,
        "js": j.js,
    }
    return NWSOStructure(GENERATOR_NAMES, tables, r_map, t_map, sigma, metadata)


ASSERTED_TRIPLES = tuple(
    tr for tr in combinations(range(9), 3) if tr not in set(TTT_TRIPLES))


def verify_tables(tables: BracketTables, degree_cap: int = 3) -> dict:
    """Re-check a stored structure from its bracket tables alone.

    Asserted content: the reordering-rule diamond resolves all overlaps,
    every generator triple outside the all-T family has identically zero
    formal Jacobi residual, and the [T,T] entries keep the S-linear
    T-linear shape. The all-T residuals are the experimental block.
    """
    out: dict = {"checks": [], "experimental": {}}

    def record(name: str, ok: bool, witness=None) -> None:
        out["checks"].append(
            {"name": name, "status": "pass" if ok else "fail",
             "witness": witness if not ok else None})

    try:
        rs = RewriteSystem(tables, degree_cap=degree_cap,
                           pair_filter=reordering_pair)
    except Exception as exc:
        record("reordering-rules", False, str(exc))
        return out
    rep = diamond_check(rs)
    record("diamond-reordering", rep.passed,
           [list(w) for w, *_ in rep.failures()[:3]])

    shape_bad = []
    for (a, b) in TT_PAIRS:
        for word, _ in tables.bracket(a, b).sorted_terms():
            s_count = sum(1 for letter in word if letter in S_LETTERS)
            t_count = sum(1 for letter in word if letter in T_LETTERS)
            if not (len(word) == 2 and s_count == 1 and t_count == 1):
                shape_bad.append((a, b, word))
    record("tt-shape-s-linear", not shape_bad, shape_bad[:3])

    try:
        rs_full = RewriteSystem(tables, degree_cap=degree_cap)
    except Exception as exc:
        record("jacobi-asserted", False, str(exc))
        return out
    bad = []
    for tr in ASSERTED_TRIPLES:
        r = formal_jacobi(rs_full, tr)
        if not r.is_zero():
            bad.append((tr, r.sorted_terms()[:2]))
    record("jacobi-asserted", not bad,
           [[list(tr), [[list(w), str(co)] for w, co in terms]]
            for tr, terms in bad[:3]])

    ttt_bad = []
    for tr in TTT_TRIPLES:
        r = formal_jacobi(rs_full, tr)
        if not r.is_zero():
            ttt_bad.append(tr)
    out["experimental"]["ttt_jacobi"] = {
        "outcome": "pass" if not ttt_bad else "fail",
        "nonzero_triples": [list(tr) for tr in ttt_bad],
    }
    return out


@dataclass(frozen=True)
class DiscoveryRun:
    """All stage outputs of one full discovery pipeline."""

    realization: SklyaninRealization
    family: TFamily
    xi: XiCoeffs
    tt: TTSolve
    structure: NWSOStructure


def discover(real: SklyaninRealization, degree_cap: int = 3) -> DiscoveryRun:
    """Full pipeline at one realization; claims must hold at its point."""
    family = solve_t_family(real)
    xi = solve_xi(real, family, degree_cap=degree_cap)
    tt = solve_tt(real, family, xi, degree_cap=degree_cap)
    structure = assemble_structure(real, family, xi, tt, degree_cap=degree_cap)
    return DiscoveryRun(real, family, xi, tt, structure)
