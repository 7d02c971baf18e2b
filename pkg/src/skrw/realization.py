"""Matrix realization of the quadratic algebra [S_i,S_j] = eps_ijk(QS_k+S_kQ).

Builds the skew triple S from six rational parameters, recovers the unique
symmetric Q both by closed form and by an independent linear solve, expands
F_i = [Q,S_i] over symmetrized products, extracts the J-parameters on the
trace-orthogonality locus, and provides the Q-orthogonality toolkit
(p(Q), third-matrix construction, multiplier recovery, congruence
diagonalization).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .exact import (
    LinSolveResult,
    Mat3,
    Rat,
    SpanFit,
    anticommutator,
    commutator,
    express_in_span,
    format_rat,
    levi_civita,
    solve_linear,
)

PARAM_NAMES = ("alpha", "beta", "gamma", "delta", "epsilon", "zeta")


class RealizationError(Exception):
    """Base class for realization-layer failures."""


class ZeroDenominatorError(RealizationError):
    def __init__(self, param: str) -> None:
        super().__init__(f"closed form undefined: parameter {param} is zero")
        self.param = param


class DependentSError(RealizationError):
    pass


class NoSolutionError(RealizationError):
    pass


class NonUniqueSolutionError(RealizationError):
    def __init__(self, kernel_dimension: int) -> None:
        super().__init__(f"Q-system kernel has dimension {kernel_dimension}, expected 0")
        self.kernel_dimension = kernel_dimension


class ExpansionError(RealizationError):
    pass


class SingularOperatorError(RealizationError):
    def __init__(self, message: str, kernel: tuple) -> None:
        super().__init__(message)
        self.kernel = kernel


@dataclass(frozen=True)
class SklyaninParams:
    alpha: Rat
    beta: Rat
    gamma: Rat
    delta: Rat
    epsilon: Rat
    zeta: Rat

    @staticmethod
    def of(*vals) -> "SklyaninParams":
        if len(vals) != 6:
            raise ValueError("need exactly 6 parameters")
        return SklyaninParams(*(Fraction(v) for v in vals))

    def astuple(self) -> tuple[Rat, ...]:
        return (self.alpha, self.beta, self.gamma, self.delta, self.epsilon, self.zeta)

    @property
    def closed_form_ok(self) -> bool:
        return self.alpha != 0 and self.gamma != 0 and self.zeta != 0

    def __str__(self) -> str:
        return "(" + ", ".join(format_rat(v) for v in self.astuple()) + ")"


DIAGONAL_POINT = SklyaninParams.of(1, 0, 1, 0, 0, 1)


def build_s(p: SklyaninParams) -> tuple[Mat3, Mat3, Mat3]:
    a, b, g, d, e, z = p.astuple()
    s1 = Mat3(((0, a, 0), (-a, 0, 0), (0, 0, 0)))
    s2 = Mat3(((0, b, g), (-b, 0, 0), (-g, 0, 0)))
    s3 = Mat3(((0, d, e), (-d, 0, z), (-e, -z, 0)))
    return s1, s2, s3


def q_closed_form(p: SklyaninParams, literal_vw: bool = False) -> Mat3:
    """Assemble Q from the printed entry formulas.

    The printed v+w numerator ends in -eps^2*gamma^2; the defining relations
    force -gamma^2*delta^2 instead (they agree iff delta^2 == eps^2). The
    repaired value is the default; literal_vw=True reproduces the printed
    one for the audit path.
    """
    a, b, g, d, e, z = p.astuple()
    for name, val in zip(("alpha", "gamma", "zeta"), (a, g, z)):
        if val == 0:
            raise ZeroDenominatorError(name)
    x = (a * a * e + b * b * e - b * g * d) / (a * g)
    y = (b * e - g * d) / a
    zz = (b * z) / a
    upv = -(g * z) / a
    upw = -(z * (a * a + b * b)) / (a * g)
    last = e * e * g * g if literal_vw else g * g * d * d
    vpw = (2 * b * g * d * e - a * a * e * e - b * b * e * e - a * a * g * g - last) / (a * g * z)
    u = (upv + upw - vpw) / 2
    v = upv - u
    w = upw - u
    return Mat3(((u, x, y), (x, v, zz), (y, zz, w)))


# symmetric-entry slot order (the fixed coordinate order for Q solves)
SYM_SLOTS = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))


def sym_basis() -> tuple[Mat3, ...]:
    out = []
    for i, j in SYM_SLOTS:
        m = [[Fraction(0)] * 3 for _ in range(3)]
        m[i][j] = Fraction(1)
        m[j][i] = Fraction(1)
        out.append(Mat3(m))
    return tuple(out)


def _s_independent(s: tuple[Mat3, Mat3, Mat3]) -> bool:
    rows = [[s[k].flatten()[e] for k in range(3)] for e in range(9)]
    return solve_linear(rows, [Fraction(0)] * 9).kernel_dimension == 0


def q_system(s: tuple[Mat3, Mat3, Mat3]) -> tuple[list[list[Rat]], list[Rat]]:
    """27 equations (3 pairs x 9 entries) in the 6 symmetric entries of Q."""
    basis = sym_basis()
    rows: list[list[Rat]] = []
    rhs: list[Rat] = []
    for i, j in combinations(range(1, 4), 2):
        lhs = commutator(s[i - 1], s[j - 1])
        cols = []
        for b in basis:
            acc = Mat3.zero()
            for k in range(1, 4):
                eps = levi_civita(i, j, k)
                if eps:
                    acc = acc + anticommutator(b, s[k - 1]) * eps
            cols.append(acc.flatten())
        flat = lhs.flatten()
        for e in range(9):
            rows.append([cols[c][e] for c in range(6)])
            rhs.append(flat[e])
    return rows, rhs


def q_from_linear_system(s: tuple[Mat3, Mat3, Mat3]) -> Mat3:
    """Solve the defining relations for symmetric Q; uniqueness is asserted."""
    if not _s_independent(s):
        raise DependentSError("S1, S2, S3 are linearly dependent")
    rows, rhs = q_system(s)
    res = solve_linear(rows, rhs)
    if not res.consistent:
        raise NoSolutionError("Q-system inconsistent for independent S input")
    if res.kernel_dimension != 0:
        raise NonUniqueSolutionError(res.kernel_dimension)
    q = [[Fraction(0)] * 3 for _ in range(3)]
    for val, (i, j) in zip(res.particular, SYM_SLOTS):
        q[i][j] = val
        q[j][i] = val
    return Mat3(q)


def q_solve_result(s: tuple[Mat3, Mat3, Mat3]) -> LinSolveResult:
    rows, rhs = q_system(s)
    return solve_linear(rows, rhs)


@dataclass(frozen=True)
class SklyaninRealization:
    params: SklyaninParams
    s1: Mat3
    s2: Mat3
    s3: Mat3
    q: Mat3

    @property
    def s(self) -> tuple[Mat3, Mat3, Mat3]:
        return (self.s1, self.s2, self.s3)

    def q_entries(self) -> dict[str, Rat]:
        q = self.q
        return {"u": q[0, 0], "v": q[1, 1], "w": q[2, 2],
                "x": q[0, 1], "y": q[0, 2], "z": q[1, 2]}


def defining_residuals(s: tuple[Mat3, Mat3, Mat3], q: Mat3) -> list[Mat3]:
    out = []
    for i, j in combinations(range(1, 4), 2):
        acc = commutator(s[i - 1], s[j - 1])
        for k in range(1, 4):
            eps = levi_civita(i, j, k)
            if eps:
                acc = acc - anticommutator(q, s[k - 1]) * eps
        out.append(acc)
    return out


def realize(p: SklyaninParams) -> SklyaninRealization:
    """Build S and the unique Q, verifying the defining relations exactly."""
    s = build_s(p)
    q = q_from_linear_system(s)
    if p.closed_form_ok and q_closed_form(p) != q:
        # cannot happen for the repaired closed form; guards against drift
        raise RealizationError("closed-form and solver Q disagree")
    bad = [r for r in defining_residuals(s, q) if not r.is_zero()]
    if bad:
        raise RealizationError("defining relation residual nonzero")
    return SklyaninRealization(p, *s, q)


def on_sklyanin_locus(s: tuple[Mat3, Mat3, Mat3]) -> bool:
    """Locus membership by the trace criterion tr(S_i S_j) = 0, i != j."""
    return all((s[i] * s[j]).trace() == 0
               for i, j in combinations(range(3), 2))


def locus_parameter_equivalence(p: SklyaninParams) -> dict[str, bool]:
    """Derived fact: for alpha,gamma != 0 the trace locus is beta=delta=eps=0."""
    s = build_s(p)
    trace_locus = on_sklyanin_locus(s)
    pattern = p.beta == 0 and p.delta == 0 and p.epsilon == 0
    return {
        "trace_locus": trace_locus,
        "parameter_pattern": pattern,
        "equivalent_here": (trace_locus == pattern) or not (p.alpha != 0 and p.gamma != 0),
    }


@dataclass(frozen=True)
class QuadExpansion:
    """F_i = [Q,S_i] expanded over the symmetrized products S_jS_k+S_kS_j."""

    coeffs: tuple[tuple[Rat, ...], ...]      # per i, slots SYM_PAIRS
    span_kernel: tuple[tuple[Rat, ...], ...]
    on_locus: bool
    js: tuple[Rat, Rat, Rat] | None          # (J12, J23, J31) on the locus
    j_identity_residual: Rat | None
    pure_sklyanin_form: bool | None          # locus only: no off-pattern terms


# (j,k) slots for the symmetrized-product basis, 1-based, j <= k
SYM_PAIRS = ((1, 1), (2, 2), (3, 3), (1, 2), (1, 3), (2, 3))


def expand_f(r: SklyaninRealization) -> QuadExpansion:
    """Expand each F_i and, on the locus, extract J and check the J-identity.

    Convention fixed by the identity check across sampled locus tuples:
    F_1 = J_23 (S_2S_3+S_3S_2), F_2 = J_31 (S_3S_1+S_1S_3),
    F_3 = J_12 (S_1S_2+S_2S_1), with the symmetrized-product coefficient
    equal to J directly (no double-count factor).
    """
    s = r.s
    span = [anticommutator(s[j - 1], s[k - 1]) for j, k in SYM_PAIRS]
    coeffs = []
    kernel: tuple = ()
    for i in range(3):
        fit: SpanFit = express_in_span(commutator(r.q, s[i]), span)
        if not fit.in_span:
            raise ExpansionError(f"F_{i + 1} lies outside the symmetrized-product span")
        coeffs.append(fit.coeffs)
        kernel = fit.kernel
    locus = on_sklyanin_locus(s)
    if not locus:
        return QuadExpansion(tuple(coeffs), kernel, False, None, None, None)

    j23 = coeffs[0][SYM_PAIRS.index((2, 3))]
    j31 = coeffs[1][SYM_PAIRS.index((1, 3))]
    j12 = coeffs[2][SYM_PAIRS.index((1, 2))]
    pure = all(
        c == 0
        for i, expected_slot in ((0, (2, 3)), (1, (1, 3)), (2, (1, 2)))
        for slot, c in zip(SYM_PAIRS, coeffs[i])
        if slot != expected_slot
    )
    residual = j12 + j23 + j31 + j12 * j23 * j31
    return QuadExpansion(tuple(coeffs), kernel, True, (j12, j23, j31), residual, pure)


def p_of_q(q: Mat3):
    """The operator A -> QA + AQ."""
    def p(a: Mat3) -> Mat3:
        return q * a + a * q
    return p


def _p_matrix_on_skews(q: Mat3) -> list[list[Rat]]:
    from .classical import so3_basis
    es = so3_basis()
    cols = []
    for e in es:
        img = q * e + e * q
        fit = express_in_span(img, list(es))
        if not fit.in_span:
            raise RealizationError("p(Q) image left the skew subspace")
        cols.append(fit.coeffs)
    return [[cols[c][r] for c in range(3)] for r in range(3)]


def p_inverse_on_skews(q: Mat3):
    """Exact inverse of p(Q) restricted to skew matrices; raises when singular.

    For diagonal Q the skew directions are eigenvectors with eigenvalues
    q_ii + q_jj; a vanishing pair sum is named in the error.
    """
    from .classical import so3_basis
    mat = _p_matrix_on_skews(q)
    es = so3_basis()

    def inv(a: Mat3) -> Mat3:
        fit = express_in_span(a, list(es))
        if not fit.in_span:
            raise ValueError("p_inverse input must be skew")
        res = solve_linear(mat, list(fit.coeffs))
        if not res.consistent or res.kernel_dimension:
            detail = ""
            if q[0, 1] == 0 and q[0, 2] == 0 and q[1, 2] == 0:
                sums = {"(1,2)": q[0, 0] + q[1, 1], "(1,3)": q[0, 0] + q[2, 2],
                        "(2,3)": q[1, 1] + q[2, 2]}
                zero = [k for k, v in sums.items() if v == 0]
                detail = f"; vanishing diagonal pair-sum(s) {zero}"
            raise SingularOperatorError(
                f"p(Q) is singular on the skew subspace{detail}", res.kernel)
        c = res.particular
        return es[0] * c[0] + es[1] * c[1] + es[2] * c[2]

    return inv


def q_orthogonality_trace(q: Mat3, a: Mat3, b: Mat3) -> Rat:
    return (a * q * b + b * q * a).trace()


def third_from_pair(q: Mat3, s1: Mat3, s2: Mat3) -> Mat3:
    """S3 = p(Q)^{-1}([S1,S2]); Q-orthogonal to both inputs by construction."""
    if not (s1.is_skew() and s2.is_skew()):
        raise ValueError("inputs must be skew")
    if q_orthogonality_trace(q, s1, s2) != 0:
        raise ValueError("inputs are not Q-orthogonal to each other")
    s3 = p_inverse_on_skews(q)(commutator(s1, s2))
    for s in (s1, s2):
        if q_orthogonality_trace(q, s, s3) != 0:
            raise RealizationError("constructed third matrix fails Q-orthogonality")
    return s3


@dataclass(frozen=True)
class MultiplierFit:
    """Squared multipliers making (l1 S1, l2 S2, l3 S3') satisfy the relations.

    The relations determine the squares; signs carry a (e1,e2,e1*e2)
    freedom, so rational square roots are reported only when the squares
    are perfect squares.
    """

    squares: tuple[Rat, Rat, Rat]
    roots: tuple[Rat, Rat, Rat] | None


def _rat_sqrt(x: Rat) -> Rat | None:
    if x < 0:
        return None
    from math import isqrt
    n, d = isqrt(x.numerator), isqrt(x.denominator)
    if n * n == x.numerator and d * d == x.denominator:
        return Fraction(n, d)
    return None


def find_multipliers(q: Mat3, s1: Mat3, s2: Mat3) -> MultiplierFit:
    """Recover the multipliers of the two-generator completion.

    With s3 = p(Q)^{-1}([S1,S2]) the scaled triple satisfies the defining
    relations iff [S2,S3] = mu1 p(S1) and [S3,S1] = mu2 p(S2) for scalars
    mu; then l1^2 = 1/mu2, l2^2 = 1/mu1, l3^2 = 1/(mu1 mu2).
    """
    s3 = third_from_pair(q, s1, s2)
    p = p_of_q(q)

    def ratio(target: Mat3, base: Mat3) -> Rat:
        fit = express_in_span(target, [base])
        if not fit.in_span:
            raise NoSolutionError("commutator not proportional to p(Q) image")
        return fit.coeffs[0]

    mu1 = ratio(commutator(s2, s3), p(s1))
    mu2 = ratio(commutator(s3, s1), p(s2))
    if mu1 == 0 or mu2 == 0:
        raise NoSolutionError("degenerate multiplier ratio")
    squares = (1 / mu2, 1 / mu1, 1 / (mu1 * mu2))
    roots = tuple(_rat_sqrt(x) for x in squares)
    return MultiplierFit(squares, None if any(x is None for x in roots) else roots)


def orthogonality_report(r: SklyaninRealization) -> dict:
    """Remark-level audit: det(Q), Q-orthogonality traces, locus detector."""
    s = r.s
    pairs = list(combinations(range(3), 2))
    return {
        "det_q": r.q.det(),
        "q_nondegenerate": r.q.det() != 0,
        "orthogonality_traces": {
            f"({i + 1},{j + 1})": q_orthogonality_trace(r.q, s[i], s[j]) for i, j in pairs},
        "product_traces": {
            f"({i + 1},{j + 1})": (s[i] * s[j]).trace() for i, j in pairs},
        "on_sklyanin_locus": on_sklyanin_locus(s),
    }


def congruence_diagonalize(q: Mat3) -> tuple[Mat3, Mat3]:
    """Rational congruence L Q L^T = D with D diagonal.

    Symmetric Gaussian elimination; a zero diagonal pivot with a nonzero
    off-diagonal partner is repaired by adding the partner row (keeps all
    operations rational). Returns (L, D).
    """
    a = [list(row) for row in q.rows]
    l = [[Fraction(1) if i == j else Fraction(0) for j in range(3)] for i in range(3)]

    def add_row(dst: int, src: int, f: Fraction) -> None:
        for j in range(3):
            a[dst][j] += f * a[src][j]
        for j in range(3):
            a[j][dst] += f * a[j][src]
        for j in range(3):
            l[dst][j] += f * l[src][j]

    for k in range(3):
        if a[k][k] == 0:
            partner = next((j for j in range(k + 1, 3) if a[k][j] != 0), None)
            if partner is not None:
                add_row(k, partner, Fraction(1))
        if a[k][k] == 0:
            continue
        for i in range(k + 1, 3):
            if a[i][k] != 0:
                add_row(i, k, -a[i][k] / a[k][k])
    d = Mat3(((a[0][0], 0, 0), (0, a[1][1], 0), (0, 0, a[2][2])))
    lm = Mat3(l)
    if lm * q * lm.transpose() != d:
        raise RealizationError("congruence diagonalization audit failed")
    return lm, d


def signature(d: Mat3) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a diagonal matrix."""
    vals = [d[i, i] for i in range(3)]
    return (sum(1 for v in vals if v > 0),
            sum(1 for v in vals if v < 0),
            sum(1 for v in vals if v == 0))
