"""Commutative Poisson layer: the eight-generator bracket tables and their audit.

Generators are s1,s2,s3 (so(3)) and the five independent symmetric-tensor
coordinates t11,t22,t12,t13,t23; t33 is eliminated as -t11-t22 throughout.
Three table variants exist because the printed relations contain misprints:

* "literal"       - both displayed sums taken exactly as printed.
* "corrected-st"  - the {s,t} action repaired to the standard equivariant
                    form (second term eps_ikl t_jl), {t,t} as printed.
* "corrected"     - additionally repairs the {t,t} table so that the whole
                    bracket satisfies Jacobi; its off-diagonal-pair entries
                    agree with the printed s.t terms and carry the forced
                    cubic corrections.

jacobi_report is the arbiter: only "corrected" passes all 56 triples.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterator

from .exact import Mat3, Rat, format_rat, levi_civita

GEN_NAMES: tuple[str, ...] = ("s1", "s2", "s3", "t11", "t22", "t12", "t13", "t23")
N_GENS = 8

# generator index -> symmetric t-slot, and back
T_SLOTS: tuple[tuple[int, int], ...] = ((1, 1), (2, 2), (1, 2), (1, 3), (2, 3))
_T_INDEX = {p: 3 + k for k, p in enumerate(T_SLOTS)}

# grading used by the homogeneity audit
GEN_DEGREE = (1, 1, 1, 2, 2, 2, 2, 2)

_ZERO_MONO = (0,) * N_GENS


class CPoly:
    """Sparse commutative polynomial over Rat in the eight generators.

    Stored as {exponent-tuple: coefficient} with no zero coefficients.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[tuple[int, ...], Rat] | None = None) -> None:
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}

    @staticmethod
    def zero() -> "CPoly":
        return CPoly()

    @staticmethod
    def const(c) -> "CPoly":
        c = Fraction(c)
        return CPoly({_ZERO_MONO: c}) if c else CPoly()

    @staticmethod
    def gen(i: int) -> "CPoly":
        mono = list(_ZERO_MONO)
        mono[i] = 1
        return CPoly({tuple(mono): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, CPoly) and self.terms == other.terms

    def __hash__(self):  # pragma: no cover - not used as dict key in hot paths
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "CPoly") -> "CPoly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, Fraction(0)) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return CPoly(out)

    def __neg__(self) -> "CPoly":
        return CPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "CPoly") -> "CPoly":
        return self + (-other)

    def scale(self, c) -> "CPoly":
        c = Fraction(c)
        if not c:
            return CPoly()
        return CPoly({m: c * x for m, x in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, CPoly):
            return self.scale(other)
        out: dict[tuple[int, ...], Rat] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = out.get(m, Fraction(0)) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return CPoly(out)

    __rmul__ = __mul__

    def diff(self, i: int) -> "CPoly":
        out: dict[tuple[int, ...], Rat] = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                d = list(m)
                d[i] = e - 1
                out[tuple(d)] = out.get(tuple(d), Fraction(0)) + c * e
        return CPoly(out)

    def degrees(self) -> set[int]:
        """Set of graded degrees (deg s = 1, deg t = 2) present."""
        return {sum(e * d for e, d in zip(m, GEN_DEGREE)) for m in self.terms}

    def coefficient(self, mono: tuple[int, ...]) -> Rat:
        return self.terms.get(mono, Fraction(0))

    def sorted_terms(self) -> Iterator[tuple[tuple[int, ...], Rat]]:
        return iter(sorted(self.terms.items()))

    def __repr__(self) -> str:
        return f"CPoly({render(self)})"


def render(p: CPoly) -> str:
    """Human-readable form, deterministic term order."""
    if p.is_zero():
        return "0"
    parts = []
    for mono, coeff in p.sorted_terms():
        factors = []
        for i, e in enumerate(mono):
            if e == 1:
                factors.append(GEN_NAMES[i])
            elif e > 1:
                factors.append(f"{GEN_NAMES[i]}^{e}")
        body = "*".join(factors) if factors else "1"
        cs = format_rat(coeff)
        if cs == "1" and factors:
            parts.append(body)
        elif cs == "-1" and factors:
            parts.append(f"-{body}")
        else:
            parts.append(f"{cs}*{body}" if factors else cs)
    out = parts[0]
    for part in parts[1:]:
        out += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
    return out


def tpoly(i: int, j: int) -> CPoly:
    """t_ij as a CPoly, with t33 eliminated and indices sorted."""
    a, b = min(i, j), max(i, j)
    if (a, b) == (3, 3):
        return -CPoly.gen(_T_INDEX[(1, 1)]) - CPoly.gen(_T_INDEX[(2, 2)])
    return CPoly.gen(_T_INDEX[(a, b)])


def so3_basis() -> tuple[Mat3, Mat3, Mat3]:
    """The fixed skew basis with commutator(e_i, e_j) = sum_k eps_ijk e_k."""
    e1 = Mat3(((0, 1, 0), (-1, 0, 0), (0, 0, 0)))
    e2 = Mat3(((0, 0, 0), (0, 0, 1), (0, -1, 0)))
    e3 = Mat3(((0, 0, 1), (0, 0, 0), (-1, 0, 0)))
    return e1, e2, e3


def st_entry(i: int, jk: tuple[int, int], literal: bool = False) -> CPoly:
    """{s_i, t_jk}: equivariant action, or the misprinted repeated-index form."""
    j, k = jk
    out = CPoly.zero()
    for l in (1, 2, 3):
        eij = levi_civita(i, j, l)
        if eij:
            out = out + tpoly(l, k).scale(eij)
        eik = levi_civita(i, k, l)
        if eik:
            # printed form repeats t_lk; the repaired action uses t_jl
            out = out + (tpoly(l, k) if literal else tpoly(j, l)).scale(eik)
    return out


def tt_entry_printed(ij: tuple[int, int], kl: tuple[int, int]) -> CPoly:
    """{t_ij, t_kl}: the four-term eps.s.t sum exactly as displayed."""
    i, j = ij
    k, l = kl
    out = CPoly.zero()
    for m in (1, 2, 3):
        s = CPoly.gen
        for eps, si, tt in (
            (levi_civita(i, k, m), j, (m, l)),
            (levi_civita(i, k, m), l, (j, m)),
            (levi_civita(i, l, m), j, (m, k)),
            (levi_civita(i, l, m), k, (j, m)),
            (levi_civita(j, k, m), i, (m, l)),
            (levi_civita(j, k, m), l, (i, m)),
            (levi_civita(j, l, m), i, (m, k)),
            (levi_civita(j, l, m), k, (i, m)),
        ):
            if eps:
                out = out + (s(si - 1) * tpoly(*tt)).scale(eps)
    return out


def _cp(spec: list[tuple[int, list[tuple[str, int]]] | tuple[Fraction, list]]) -> CPoly:
    out = CPoly.zero()
    for coeff, names in spec:
        term = CPoly.const(coeff)
        for name, e in names:
            g = CPoly.gen(GEN_NAMES.index(name))
            for _ in range(e):
                term = term * g
        out = out + term
    return out


def _f(p, q=1):
    return Fraction(p, q)


# The unique Jacobi-satisfying completion whose off-diagonal-pair entries
# reproduce the printed s.t terms and which is homogeneous of degree 3
# under deg s = 1, deg t = 2. The cubic terms are forced.
_TT_CORRECTED: dict[tuple[int, int], CPoly] = {}


def _init_tt_corrected() -> None:
    e = _TT_CORRECTED
    e[(3, 4)] = _cp([  # {t11, t22}
        (_f(-4), [("s1", 1), ("s2", 1), ("s3", 1)]),
        (_f(8, 3), [("s1", 1), ("t23", 1)]),
        (_f(8, 3), [("s2", 1), ("t13", 1)]),
        (_f(8, 3), [("s3", 1), ("t12", 1)]),
    ])
    e[(3, 5)] = _cp([  # {t11, t12}
        (_f(-2), [("s1", 2), ("s3", 1)]),
        (_f(10, 3), [("s1", 1), ("t13", 1)]),
        (_f(2, 3), [("s2", 1), ("t23", 1)]),
        (_f(2, 3), [("s3", 1), ("t11", 1)]),
        (_f(-2, 3), [("s3", 1), ("t22", 1)]),
    ])
    e[(3, 6)] = _cp([  # {t11, t13}
        (_f(2), [("s1", 2), ("s2", 1)]),
        (_f(-10, 3), [("s1", 1), ("t12", 1)]),
        (_f(-4, 3), [("s2", 1), ("t11", 1)]),
        (_f(-2, 3), [("s2", 1), ("t22", 1)]),
        (_f(-2, 3), [("s3", 1), ("t23", 1)]),
    ])
    e[(3, 7)] = _cp([  # {t11, t23}
        (_f(2), [("s1", 1), ("s2", 2)]),
        (_f(-2), [("s1", 1), ("s3", 2)]),
        (_f(-4, 3), [("s1", 1), ("t11", 1)]),
        (_f(-8, 3), [("s1", 1), ("t22", 1)]),
        (_f(-8, 3), [("s2", 1), ("t12", 1)]),
        (_f(8, 3), [("s3", 1), ("t13", 1)]),
    ])
    e[(4, 5)] = _cp([  # {t22, t12}
        (_f(-2, 3), [("s1", 1), ("t13", 1)]),
        (_f(2), [("s2", 2), ("s3", 1)]),
        (_f(-10, 3), [("s2", 1), ("t23", 1)]),
        (_f(2, 3), [("s3", 1), ("t11", 1)]),
        (_f(-2, 3), [("s3", 1), ("t22", 1)]),
    ])
    e[(4, 6)] = _cp([  # {t22, t13}
        (_f(-2), [("s1", 2), ("s2", 1)]),
        (_f(8, 3), [("s1", 1), ("t12", 1)]),
        (_f(2), [("s2", 1), ("s3", 2)]),
        (_f(8, 3), [("s2", 1), ("t11", 1)]),
        (_f(4, 3), [("s2", 1), ("t22", 1)]),
        (_f(-8, 3), [("s3", 1), ("t23", 1)]),
    ])
    e[(4, 7)] = _cp([  # {t22, t23}
        (_f(-2), [("s1", 1), ("s2", 2)]),
        (_f(2, 3), [("s1", 1), ("t11", 1)]),
        (_f(4, 3), [("s1", 1), ("t22", 1)]),
        (_f(10, 3), [("s2", 1), ("t12", 1)]),
        (_f(2, 3), [("s3", 1), ("t13", 1)]),
    ])
    e[(5, 6)] = _cp([  # {t12, t13}
        (_f(-1), [("s1", 3)]),
        (_f(1), [("s1", 1), ("s2", 2)]),
        (_f(1), [("s1", 1), ("s3", 2)]),
        (_f(3), [("s1", 1), ("t11", 1)]),
        (_f(-1), [("s2", 1), ("t12", 1)]),
        (_f(-1), [("s3", 1), ("t13", 1)]),
    ])
    e[(5, 7)] = _cp([  # {t12, t23}
        (_f(-1), [("s1", 2), ("s2", 1)]),
        (_f(1), [("s1", 1), ("t12", 1)]),
        (_f(1), [("s2", 3)]),
        (_f(-1), [("s2", 1), ("s3", 2)]),
        (_f(-3), [("s2", 1), ("t22", 1)]),
        (_f(1), [("s3", 1), ("t23", 1)]),
    ])
    e[(6, 7)] = _cp([  # {t13, t23}
        (_f(1), [("s1", 2), ("s3", 1)]),
        (_f(-1), [("s1", 1), ("t13", 1)]),
        (_f(1), [("s2", 2), ("s3", 1)]),
        (_f(-1), [("s2", 1), ("t23", 1)]),
        (_f(-1), [("s3", 3)]),
        (_f(-3), [("s3", 1), ("t11", 1)]),
        (_f(-3), [("s3", 1), ("t22", 1)]),
    ])


_init_tt_corrected()

VARIANTS = ("literal", "corrected-st", "corrected")


class BracketTable:
    """Antisymmetric bracket table on generator pairs, keyed (i, j) with i < j."""

    def __init__(self, entries: dict[tuple[int, int], CPoly], variant: str) -> None:
        self.entries = entries
        self.variant = variant

    def bracket_gens(self, i: int, j: int) -> CPoly:
        if i == j:
            return CPoly.zero()
        if i < j:
            return self.entries[(i, j)]
        return -self.entries[(j, i)]


def rw_so3_table(variant: str = "corrected") -> BracketTable:
    """Build the eight-generator bracket table in the requested variant."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown table variant {variant!r}; pick from {VARIANTS}")
    entries: dict[tuple[int, int], CPoly] = {}
    for i, j in combinations(range(3), 2):
        out = CPoly.zero()
        for k in (1, 2, 3):
            eps = levi_civita(i + 1, j + 1, k)
            if eps:
                out = out + CPoly.gen(k - 1).scale(eps)
        entries[(i, j)] = out
    literal = variant == "literal"
    for i in (1, 2, 3):
        for a, jk in enumerate(T_SLOTS):
            entries[(i - 1, 3 + a)] = st_entry(i, jk, literal=literal)
    for a, b in combinations(range(5), 2):
        if variant == "corrected":
            entries[(3 + a, 3 + b)] = _TT_CORRECTED[(3 + a, 3 + b)]
        else:
            entries[(3 + a, 3 + b)] = tt_entry_printed(T_SLOTS[a], T_SLOTS[b])
    return BracketTable(entries, variant)


def poisson_bracket(f: CPoly, g: CPoly, table: BracketTable) -> CPoly:
    """Bilinear antisymmetric Leibniz extension of the generator table."""
    out = CPoly.zero()
    for (a, b), val in table.entries.items():
        fa, gb = f.diff(a), g.diff(b)
        if not (fa.is_zero() or gb.is_zero()):
            out = out + fa * gb * val
        fb, ga = f.diff(b), g.diff(a)
        if not (fb.is_zero() or ga.is_zero()):
            out = out - fb * ga * val
    return out


def jacobi_report(table: BracketTable) -> list[tuple[tuple[int, int, int], CPoly]]:
    """Residual {a,{b,c}} + {b,{c,a}} + {c,{a,b}} for all 56 generator triples."""
    gens = [CPoly.gen(i) for i in range(N_GENS)]
    out = []
    for i, j, k in combinations(range(N_GENS), 3):
        a, b, c = gens[i], gens[j], gens[k]
        res = (poisson_bracket(a, poisson_bracket(b, c, table), table)
               + poisson_bracket(b, poisson_bracket(c, a, table), table)
               + poisson_bracket(c, poisson_bracket(a, b, table), table))
        out.append(((i, j, k), res))
    return out


def jacobi_failures(table: BracketTable) -> list[tuple[tuple[int, int, int], CPoly]]:
    return [(t, r) for t, r in jacobi_report(table) if not r.is_zero()]


def grading_report(table: BracketTable) -> dict[tuple[int, int], set[int]]:
    """Graded degrees per entry; a homogeneous table maps pair -> one degree."""
    return {pair: p.degrees() for pair, p in table.entries.items() if not p.is_zero()}


def st_coefficient_tensor(table: BracketTable) -> dict[tuple[int, int, int, int], Rat]:
    """Coefficients of s_m * t_pq inside each {t_a, t_b} entry.

    Keys are (a, b, m, q) with a < b over generator indices 3..7, m over
    0..2, q over 3..7. This is the part of the classical table that has a
    direct noncommutative counterpart (S.T words).
    """
    out: dict[tuple[int, int, int, int], Rat] = {}
    for (a, b), entry in table.entries.items():
        if a < 3:
            continue
        for m in range(3):
            for q in range(3, 8):
                mono = [0] * N_GENS
                mono[m] += 1
                mono[q] += 1
                c = entry.coefficient(tuple(mono))
                if c:
                    out[(a, b, m, q)] = c
    return out


def module_presentation_tables(literal: bool = False):
    """The so(3)-action presentation as noncommutative reordering tables.

    Letters follow the shared alphabet with Q absent: [s_i, s_j] the
    linear so(3) bracket, [s_i, t_a] the (corrected or printed) action,
    [t_a, t_b] = 0. The cubic-corrected {t, t} entries have no
    quadratic-with-lower reading, so the t-pairs commute here; the
    confluence content is the action's module property.
    """
    from .ncalg import BracketTables, NCPoly

    entries: dict = {}
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            if i < j:
                k = ({1, 2, 3} - {i, j}).pop()
                entries[(i, j)] = NCPoly.term((k,), levi_civita(i, j, k))
    for i in (1, 2, 3):
        for a, slot in enumerate(T_SLOTS):
            p = st_entry(i, slot, literal=literal)
            acc: dict = {}
            for mono, coeff in p.terms.items():
                v = mono.index(1)
                acc[(v + 1,)] = acc.get((v + 1,), Fraction(0)) + coeff
            entries[(i, a + 3 + 1)] = NCPoly(acc)
    for a in range(4, 9):
        for b in range(a + 1, 9):
            entries[(a, b)] = NCPoly.zero()
    return BracketTables(entries=entries)


def module_pair(b: int, a: int) -> bool:
    """Rule filter matching module_presentation_tables (no Q letter)."""
    return a >= 1
