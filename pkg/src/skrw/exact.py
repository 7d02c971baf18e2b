"""Exact rational scalars, 3x3 matrices, and small dense linear solvers.

Everything in this module is exact: scalars are `fractions.Fraction`
(aliased `Rat`), matrices are immutable 3x3 tuples of Fractions, and the
solvers run plain Gaussian elimination over the rationals. No floating
point is used or accepted anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rat = Fraction

_FLOATY = frozenset(".eE")


def parse_rat(text: str) -> Rat:
    """Parse an exact rational literal of the form "p", "-p" or "p/q".

    Floating-point spellings ("0.5", "1e3") are rejected: the pipeline's
    contracts are tolerance-free and a float literal is always a mistake.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty rational literal")
    if any(c in _FLOATY for c in s):
        raise ValueError(f"float literal {text!r} rejected; write an exact p/q")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational literal {text!r}: {exc}") from None


def format_rat(x: Rat) -> str:
    """Render a Fraction as "p" or "p/q" (the parse_rat inverse)."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _rat(x) -> Rat:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rat(x)
    raise TypeError(f"exact context cannot accept {type(x).__name__}: {x!r}")


class Mat3:
    """Immutable 3x3 matrix over the exact rationals.

    Rows are stored as a tuple of 3-tuples of Fractions; row-major order
    is the flattening convention everywhere (JSON, span solves).
    """

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable]) -> None:
        rs = tuple(tuple(_rat(x) for x in row) for row in rows)
        if len(rs) != 3 or any(len(r) != 3 for r in rs):
            raise ValueError("Mat3 needs exactly 3 rows of 3 entries")
        object.__setattr__(self, "rows", rs)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("Mat3 is immutable")

    @staticmethod
    def zero() -> "Mat3":
        return Mat3(((0, 0, 0), (0, 0, 0), (0, 0, 0)))

    @staticmethod
    def identity() -> "Mat3":
        return Mat3(((1, 0, 0), (0, 1, 0), (0, 0, 1)))

    def __getitem__(self, ij: tuple[int, int]) -> Rat:
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, Mat3) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __add__(self, other: "Mat3") -> "Mat3":
        return Mat3(tuple(a + b for a, b in zip(ra, rb))
                    for ra, rb in zip(self.rows, other.rows))

    def __sub__(self, other: "Mat3") -> "Mat3":
        return Mat3(tuple(a - b for a, b in zip(ra, rb))
                    for ra, rb in zip(self.rows, other.rows))

    def __neg__(self) -> "Mat3":
        return Mat3(tuple(-a for a in r) for r in self.rows)

    def __mul__(self, other):
        if isinstance(other, Mat3):
            return Mat3(
                tuple(sum((self.rows[i][k] * other.rows[k][j] for k in range(3)),
                          Fraction(0))
                      for j in range(3))
                for i in range(3))
        c = _rat(other)
        return Mat3(tuple(a * c for a in r) for r in self.rows)

    def __rmul__(self, other) -> "Mat3":
        c = _rat(other)
        return Mat3(tuple(c * a for a in r) for r in self.rows)

    def transpose(self) -> "Mat3":
        return Mat3(tuple(self.rows[j][i] for j in range(3)) for i in range(3))

    def trace(self) -> Rat:
        return self.rows[0][0] + self.rows[1][1] + self.rows[2][2]

    def det(self) -> Rat:
        r = self.rows
        return (r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
                - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
                + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]))

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.rows for a in r)

    def is_skew(self) -> bool:
        return self.transpose() == -self

    def is_symmetric(self) -> bool:
        return self.transpose() == self

    def flatten(self) -> tuple[Rat, ...]:
        """Row-major 9-vector; the fixed flattening convention."""
        return tuple(a for r in self.rows for a in r)

    @staticmethod
    def from_flat(v: Sequence) -> "Mat3":
        if len(v) != 9:
            raise ValueError("from_flat needs 9 entries")
        return Mat3((v[0:3], v[3:6], v[6:9]))

    def __repr__(self) -> str:
        return "Mat3(" + ", ".join(
            "(" + ", ".join(format_rat(a) for a in r) + ")" for r in self.rows) + ")"


def levi_civita(i: int, j: int, k: int) -> int:
    """Totally antisymmetric symbol on {1,2,3} with eps_123 = 1."""
    if {i, j, k} != {1, 2, 3}:
        return 0
    # parity of the permutation (i,j,k)
    inversions = sum(1 for a, b in ((i, j), (i, k), (j, k)) if a > b)
    return 1 if inversions % 2 == 0 else -1


def commutator(a: Mat3, b: Mat3) -> Mat3:
    return a * b - b * a


def anticommutator(a: Mat3, b: Mat3) -> Mat3:
    return a * b + b * a


@dataclass(frozen=True)
class LinSolveResult:
    """Outcome of an exact linear solve A x = b.

    particular is None exactly when the system is inconsistent; kernel is
    a basis of the null space (empty tuple for a unique solution).
    """

    particular: tuple[Rat, ...] | None
    kernel: tuple[tuple[Rat, ...], ...]
    rank: int

    @property
    def consistent(self) -> bool:
        return self.particular is not None

    @property
    def kernel_dimension(self) -> int:
        return len(self.kernel)


def solve_linear(rows: Sequence[Sequence[Rat]], rhs: Sequence[Rat]) -> LinSolveResult:
    """Solve A x = b exactly; return a particular solution and a kernel basis.

    Plain Gauss-Jordan over Fraction with partial pivoting (first nonzero
    pivot per column). Exactness makes pivoting a determinism choice, not a
    stability one.
    """
    m = len(rows)
    if len(rhs) != m:
        raise ValueError(f"dimension mismatch: {m} rows vs {len(rhs)} rhs entries")
    n = len(rows[0]) if m else 0
    if any(len(r) != n for r in rows):
        raise ValueError("ragged coefficient matrix")
    aug = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(rows)]

    pivot_cols: list[int] = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivot_cols.append(c)
        r += 1
        if r == m:
            break

    for i in range(r, m):
        if aug[i][n] != 0:
            return LinSolveResult(None, (), r)

    free_cols = [c for c in range(n) if c not in pivot_cols]
    part = [Fraction(0)] * n
    for i, c in enumerate(pivot_cols):
        part[c] = aug[i][n]

    kernel = []
    for fc in free_cols:
        vec = [Fraction(0)] * n
        vec[fc] = Fraction(1)
        for i, c in enumerate(pivot_cols):
            vec[c] = -aug[i][fc]
        kernel.append(tuple(vec))

    return LinSolveResult(tuple(part), tuple(kernel), r)


@dataclass(frozen=True)
class KeyedSolveResult:
    """Exact solve over named unknowns; rows are sparse {key: coeff} maps.

    particular maps every pivot key to its value (free keys default to 0);
    kernel vectors are sparse maps with one free key set to 1 each.
    """

    particular: dict | None
    kernel: tuple[dict, ...]
    rank: int

    @property
    def consistent(self) -> bool:
        return self.particular is not None

    @property
    def kernel_dimension(self) -> int:
        return len(self.kernel)

    def value(self, key) -> Rat:
        if self.particular is None:
            raise ValueError("inconsistent system has no solution values")
        return self.particular.get(key, Fraction(0))

    def at_gauge(self, ts: Sequence[Rat]) -> dict:
        """Particular solution shifted by sum(t_i * kernel_i), zeros dropped."""
        out = dict(self.particular)
        for t, vec in zip(ts, self.kernel):
            if t:
                for k, v in vec.items():
                    out[k] = out.get(k, Fraction(0)) + t * v
        return {k: v for k, v in out.items() if v}


def solve_keyed(rows: Sequence[tuple[dict, Rat]], variables: Sequence) -> KeyedSolveResult:
    """Sparse exact Gauss elimination keyed by arbitrary orderable unknowns.

    Each row is ({key: coeff}, rhs). Elimination pivots on the largest key
    per reduced row, so results are deterministic for a fixed variable
    order. Inconsistency is reported with particular = None, mirroring
    solve_linear.
    """
    pivots: dict = {}
    for row, rhs in rows:
        row = dict(row)
        changed = True
        while changed:
            changed = False
            for v in sorted(row, reverse=True):
                if v in pivots and row.get(v):
                    fac = row[v]
                    prow, prhs = pivots[v]
                    for k2, v2 in prow.items():
                        s = row.get(k2, Fraction(0)) - fac * v2
                        if s:
                            row[k2] = s
                        else:
                            row.pop(k2, None)
                    rhs = rhs - fac * prhs
                    changed = True
                    break
        row = {k: v for k, v in row.items() if v}
        if not row:
            if rhs != 0:
                return KeyedSolveResult(None, (), len(pivots))
            continue
        pv = max(row)
        inv = 1 / row[pv]
        pivots[pv] = ({k: v * inv for k, v in row.items()}, rhs * inv)
    # back-substitution pass until rows are reduced against all pivots
    done = False
    while not done:
        done = True
        for pv in list(pivots):
            row, rhs = pivots[pv]
            for v in [v for v in row if v != pv and v in pivots]:
                if v not in row:
                    continue
                fac = row[v]
                prow, prhs = pivots[v]
                for k2, v2 in prow.items():
                    s = row.get(k2, Fraction(0)) - fac * v2
                    if s:
                        row[k2] = s
                    else:
                        row.pop(k2, None)
                rhs = rhs - fac * prhs
                done = False
            pivots[pv] = (row, rhs)
    particular = {pv: rhs for pv, (row, rhs) in pivots.items()}
    free = [v for v in variables if v not in pivots]
    kernel = []
    for f in free:
        vec = {f: Fraction(1)}
        for pv, (row, _) in pivots.items():
            co = row.get(f)
            if co:
                vec[pv] = -co
        kernel.append(vec)
    return KeyedSolveResult(particular, tuple(kernel), len(pivots))


@dataclass(frozen=True)
class SpanFit:
    """express_in_span outcome; in_span False is a value, not a fault."""

    in_span: bool
    coeffs: tuple[Rat, ...] | None
    kernel: tuple[tuple[Rat, ...], ...]


def express_in_span(target: Mat3, spanning: Sequence[Mat3]) -> SpanFit:
    """Exact coefficients c with sum(c_k * spanning_k) == target.

    The kernel of the spanning map is returned as the non-uniqueness
    witness. Row-major 9-entry flattening.
    """
    if not spanning:
        raise ValueError("spanning list must be non-empty")
    cols = [s.flatten() for s in spanning]
    rows = [[cols[k][e] for k in range(len(cols))] for e in range(9)]
    res = solve_linear(rows, target.flatten())
    if not res.consistent:
        return SpanFit(False, None, res.kernel)
    return SpanFit(True, res.particular, res.kernel)
