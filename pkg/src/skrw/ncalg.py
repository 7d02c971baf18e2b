"""Noncommutative polynomial engine over the nine-letter alphabet.

Words are tuples of letter indices in the fixed order
Q < S1 < S2 < S3 < T11 < T22 < T12 < T13 < T23 (trace-eliminated T-basis).
The engine provides:

* NCPoly - free-algebra polynomials whose coefficients are exact rationals
  or first-order jets in named unknowns (class Affine; products truncate
  at first order, division requires an invertible constant part).
* BracketTables - [g_i, g_j] right-hand sides, antisymmetry built in.
* RewriteSystem - reordering rules x_b x_a -> x_a x_b + lower, stored in
  solved form: the raw adjacent-swap relations couple cyclically (e.g.
  S2 S1 and S3 Q through the quadratic forms), so each strongly connected
  component of the pair dependency graph is solved as a linear system;
  accepted replacements consist of fully ordered words of length <= 2.
* normal_form - expansion in the ordered-word basis. Whenever every rule
  strictly lowers the graded-lex order this equals naive leftmost
  rewriting. At generic parameter points it provably does not: the rule
  S1 Q -> c QS1 + c' S2S3 (c' = -2 J23/(1-J23)) raises the order, and the
  word S1 Q S1 rewrites back to itself with factor
  16 J23 J31 / ((1-J23)^2 (1-J31)^2), so the naive loop cycles. The
  engine therefore solves the leftmost-rewrite equations exactly: each
  strongly connected component of the (finite, degree-capped) word
  dependency graph is a linear system with a unique solution. Where the
  naive loop terminates the two notions coincide; per-rule order flags
  record which regime a system is in.
* diamond_check (degree-3 overlap resolution), weyl_symmetrize,
  ordering_independence_check, formal_jacobi. Confluence checks keep
  full force under fixed-point resolution: an inconsistent table still
  yields path-dependent expansions and fails.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Callable, Iterable, Sequence

NC_NAMES: tuple[str, ...] = ("Q", "S1", "S2", "S3", "T11", "T22", "T12", "T13", "T23")
Q_LETTER = 0
S_LETTERS = (1, 2, 3)
T_LETTERS = (4, 5, 6, 7, 8)
# letter -> symmetric index pair of the T it denotes
T_LETTER_SLOT = {4: (1, 1), 5: (2, 2), 6: (1, 2), 7: (1, 3), 8: (2, 3)}

Word = tuple[int, ...]


def word_key(w: Word) -> tuple[int, Word]:
    """Graded-lex sort key: length first, then left-to-right letters."""
    return (len(w), w)


def word_ordered(w: Word) -> bool:
    return all(w[i] <= w[i + 1] for i in range(len(w) - 1))


class Affine:
    """First-order jet c0 + sum_k c_k d_k in named unknown displacements.

    Products drop the quadratic part; inversion requires a nonzero constant
    part. This is exactly what a Newton step on an exact rational-function
    system needs, and nothing more.
    """

    __slots__ = ("const", "lin")

    def __init__(self, const=0, lin: dict | None = None) -> None:
        self.const = Fraction(const)
        self.lin = {k: v for k, v in (lin or {}).items() if v != 0}

    @staticmethod
    def var(key, base=0) -> "Affine":
        return Affine(base, {key: Fraction(1)})

    def is_zero(self) -> bool:
        return self.const == 0 and not self.lin

    def __eq__(self, other) -> bool:
        if isinstance(other, Affine):
            return self.const == other.const and self.lin == other.lin
        return not self.lin and self.const == other

    def __hash__(self):  # pragma: no cover
        return hash((self.const, frozenset(self.lin.items())))

    def __add__(self, other) -> "Affine":
        if isinstance(other, Affine):
            lin = dict(self.lin)
            for k, v in other.lin.items():
                s = lin.get(k, Fraction(0)) + v
                if s:
                    lin[k] = s
                else:
                    lin.pop(k, None)
            return Affine(self.const + other.const, lin)
        return Affine(self.const + Fraction(other), self.lin)

    __radd__ = __add__

    def __neg__(self) -> "Affine":
        return Affine(-self.const, {k: -v for k, v in self.lin.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, Affine) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + Fraction(other)

    def __mul__(self, other) -> "Affine":
        if isinstance(other, Affine):
            # first-order truncation: lin x lin dropped
            lin: dict = {}
            if other.const:
                for k, v in self.lin.items():
                    lin[k] = v * other.const
            if self.const:
                for k, v in other.lin.items():
                    s = lin.get(k, Fraction(0)) + self.const * v
                    if s:
                        lin[k] = s
                    else:
                        lin.pop(k, None)
            return Affine(self.const * other.const, lin)
        c = Fraction(other)
        return Affine(self.const * c, {k: v * c for k, v in self.lin.items()})

    __rmul__ = __mul__

    def inv(self) -> "Affine":
        if self.const == 0:
            raise ZeroDivisionError("jet has zero constant part; not invertible")
        ic = 1 / self.const
        return Affine(ic, {k: -v * ic * ic for k, v in self.lin.items()})

    def __truediv__(self, other):
        if isinstance(other, Affine):
            return self * other.inv()
        return self * (1 / Fraction(other))

    def evaluate(self, assignment: dict) -> Fraction:
        return self.const + sum(
            (v * assignment.get(k, Fraction(0)) for k, v in self.lin.items()),
            Fraction(0))

    def __repr__(self) -> str:
        parts = [str(self.const)] if self.const or not self.lin else []
        for k in sorted(self.lin):
            parts.append(f"{self.lin[k]}*d[{k}]")
        return "Affine(" + " + ".join(parts) + ")"


Coeff = Fraction | Affine


def c_is_zero(c: Coeff) -> bool:
    return c.is_zero() if isinstance(c, Affine) else c == 0


def c_div(a: Coeff, b: Coeff):
    if isinstance(b, Affine):
        return b.inv() * a
    return a * Fraction(1, 1) / b if isinstance(a, Affine) else a / b


def c_evaluate(c: Coeff, assignment: dict) -> Fraction:
    return c.evaluate(assignment) if isinstance(c, Affine) else c


class NCPoly:
    """Free-algebra polynomial: {word: coefficient}, zero coefficients dropped."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Word, Coeff] | None = None) -> None:
        self.terms = {w: c for w, c in (terms or {}).items() if not c_is_zero(c)}

    @staticmethod
    def zero() -> "NCPoly":
        return NCPoly()

    @staticmethod
    def const(c) -> "NCPoly":
        return NCPoly({(): Fraction(c) if isinstance(c, int) else c})

    @staticmethod
    def gen(i: int) -> "NCPoly":
        return NCPoly({(i,): Fraction(1)})

    @staticmethod
    def term(word: Iterable[int], c=1) -> "NCPoly":
        return NCPoly({tuple(word): Fraction(c) if isinstance(c, int) else c})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, NCPoly) and self.terms == other.terms

    def __hash__(self):  # pragma: no cover
        return hash(frozenset((w, repr(c)) for w, c in self.terms.items()))

    def __add__(self, other: "NCPoly") -> "NCPoly":
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w, Fraction(0)) + c
            if c_is_zero(s):
                out.pop(w, None)
            else:
                out[w] = s
        return NCPoly(out)

    def __neg__(self) -> "NCPoly":
        return NCPoly({w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "NCPoly") -> "NCPoly":
        return self + (-other)

    def scale(self, c) -> "NCPoly":
        if isinstance(c, int):
            c = Fraction(c)
        if c_is_zero(c):
            return NCPoly()
        return NCPoly({w: x * c for w, x in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, NCPoly):
            return self.scale(other)
        out: dict[Word, Coeff] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                s = out.get(w, Fraction(0)) + c1 * c2
                if c_is_zero(s):
                    out.pop(w, None)
                else:
                    out[w] = s
        return NCPoly(out)

    def __rmul__(self, c):
        return self.scale(c)

    def max_degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def evaluate_coeffs(self, assignment: dict) -> "NCPoly":
        return NCPoly({w: c_evaluate(c, assignment) for w, c in self.terms.items()})

    def sorted_terms(self) -> list[tuple[Word, Coeff]]:
        return sorted(self.terms.items(), key=lambda t: word_key(t[0]))

    def __repr__(self) -> str:
        return f"NCPoly({render_nc(self)})"


def render_nc(p: NCPoly) -> str:
    if p.is_zero():
        return "0"
    bits = []
    for w, c in p.sorted_terms():
        body = "*".join(NC_NAMES[i] for i in w) if w else "1"
        bits.append(f"({c})*{body}" if isinstance(c, Affine) else
                    (body if c == 1 else f"(-1)*{body}" if c == -1 else f"({c})*{body}"))
    return " + ".join(bits)


class MissingEntryError(KeyError):
    pass


class BracketTables:
    """Generator brackets [g_i, g_j], stored for i < j, antisymmetric access."""

    def __init__(self, entries: dict[tuple[int, int], NCPoly]) -> None:
        for (i, j) in entries:
            if not i < j:
                raise ValueError("store entries with i < j")
        self.entries = entries

    def has(self, i: int, j: int) -> bool:
        return i == j or (min(i, j), max(i, j)) in self.entries

    def bracket(self, i: int, j: int) -> NCPoly:
        if i == j:
            return NCPoly.zero()
        key = (min(i, j), max(i, j))
        if key not in self.entries:
            raise MissingEntryError(f"no bracket table entry for ({NC_NAMES[key[0]]},{NC_NAMES[key[1]]})")
        ent = self.entries[key]
        return ent if i < j else -ent


def derivation_bracket(p: NCPoly, letter: int, tables: BracketTables) -> NCPoly:
    """[p, x_letter], expanding [xy, z] = x[y, z] + [x, z]y letterwise."""
    out = NCPoly.zero()
    for w, c in p.terms.items():
        for pos, li in enumerate(w):
            inner = tables.bracket(li, letter)
            if inner.is_zero():
                continue
            piece = NCPoly.term(w[:pos]) * inner * NCPoly.term(w[pos + 1:])
            out = out + piece.scale(c)
    return out


class RewriteError(Exception):
    pass


class DegreeCapError(RewriteError):
    pass


class MissingRuleError(RewriteError):
    pass


class DegenerateRuleError(RewriteError):
    pass


def _tarjan_sccs(nodes: Sequence, edges: dict) -> list[list]:
    """Iterative Tarjan; components are emitted dependencies-first."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    out: list[list] = []
    counter = [0]

    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(edges.get(root, ())))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter[0]
                    counter[0] += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(edges.get(nxt, ()))))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[v] = min(low[v], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    u = stack.pop()
                    on_stack.discard(u)
                    comp.append(u)
                    if u == v:
                        break
                out.append(sorted(comp))
    return out


def _solve_fixed_point(unknowns: list[Word],
                       equation: Callable[[Word], NCPoly],
                       label: str) -> dict[Word, NCPoly]:
    """Solve X_w = equation(w) where the right sides may reference any X_u.

    equation(w) returns an NCPoly; words of that poly lying in `unknowns`
    are read as references to the corresponding X_u, everything else as
    literal basis words. Returns the unique solution, or raises
    DegenerateRuleError when (I - M) is singular.
    """
    comp_set = set(unknowns)
    order = list(unknowns)
    a: dict[Word, dict[Word, Coeff]] = {}
    c: dict[Word, NCPoly] = {}
    for w in order:
        rhs = equation(w)
        row: dict[Word, Coeff] = {w: Fraction(1)}
        rest: dict[Word, Coeff] = {}
        for word, co in rhs.terms.items():
            if word in comp_set:
                s = row.get(word, Fraction(0)) - co
                if c_is_zero(s):
                    row.pop(word, None)
                else:
                    row[word] = s
            else:
                rest[word] = co
        a[w] = row
        c[w] = NCPoly(rest)
    solved_by: dict[Word, Word] = {}
    remaining = list(order)
    for col in order:
        pr = next((w for w in remaining
                   if col in a[w] and not c_is_zero(a[w][col])
                   and not (isinstance(a[w][col], Affine) and a[w][col].const == 0)),
                  None)
        if pr is None:
            raise DegenerateRuleError(
                f"{label}: reordering system singular (degenerate parameter point)")
        piv = a[pr][col]
        inv = c_div(Fraction(1), piv)
        a[pr] = {k: v * inv for k, v in a[pr].items()}
        c[pr] = c[pr].scale(inv)
        for w in order:
            if w != pr and col in a[w]:
                f = a[w][col]
                if c_is_zero(f):
                    continue
                for k, v in a[pr].items():
                    s = a[w].get(k, Fraction(0)) - f * v
                    if c_is_zero(s):
                        a[w].pop(k, None)
                    else:
                        a[w][k] = s
                c[w] = c[w] - c[pr].scale(f)
        remaining.remove(pr)
        solved_by[col] = pr
    return {col: c[solved_by[col]] for col in order}


class RewriteSystem:
    """Solved reordering rules plus exact normal-form resolution.

    pair_filter limits which out-of-order pairs get rules (e.g. the
    Xi-solving stage has no [T,T] table yet and never meets T.T words).
    rule_order_flags[pair] records whether that rule's replacement words
    are all strictly graded-lex below the pair; when every flag is True
    naive leftmost rewriting terminates and matches the resolved normal
    form, otherwise only the fixed-point resolution is defined.
    """

    def __init__(self, tables: BracketTables, degree_cap: int = 3,
                 pair_filter: Callable[[int, int], bool] | None = None,
                 frozen_pairs: Iterable[Word] = ()) -> None:
        self.tables = tables
        self.degree_cap = degree_cap
        self.frozen_pairs = frozenset(frozen_pairs)
        pairs = [(b, a) for b in range(len(NC_NAMES)) for a in range(len(NC_NAMES))
                 if b > a and (b, a) not in self.frozen_pairs
                 and (pair_filter is None or pair_filter(b, a))]
        raw: dict[Word, NCPoly] = {}
        for b, a in pairs:
            raw[(b, a)] = NCPoly.term((a, b)) + tables.bracket(b, a)
        pair_set = set(raw)
        for node, rhs in raw.items():
            for w in rhs.terms:
                if len(w) > 2:
                    raise DegreeCapError(
                        f"table entry for {self._wname(node)} is not quadratic-with-lower")
                if (len(w) == 2 and w[0] > w[1] and w not in pair_set
                        and w not in self.frozen_pairs):
                    raise MissingRuleError(
                        f"rule for {self._wname(node)} needs excluded pair {self._wname(w)}")
        edges = {node: sorted({w for w in rhs.terms
                               if len(w) == 2 and w[0] > w[1] and w in pair_set})
                 for node, rhs in raw.items()}
        self.rules: dict[Word, NCPoly] = {}
        for comp in _tarjan_sccs(sorted(raw), edges):
            part = _solve_fixed_point(
                comp,
                lambda w: self._subst_rules(raw[w]),
                f"pair rule {self._wname(comp[0])}")
            self.rules.update(part)
        self.rule_order_flags: dict[Word, bool] = {}
        for node, rhs in self.rules.items():
            for w in rhs.terms:
                if not self.is_terminal(w) or len(w) > 2:
                    raise DegenerateRuleError(
                        f"replacement for {self._wname(node)} is not ordered quadratic")
            self.rule_order_flags[node] = all(
                word_key(w) < word_key(node) for w in rhs.terms)
        self._nf_memo: dict[Word, NCPoly] = {}

    def is_terminal(self, w: Word) -> bool:
        """No rewritable descent (frozen descents are left in place)."""
        return self._leftmost_descent(w) is None

    @property
    def strictly_lowering(self) -> bool:
        """True iff every rule lowers graded-lex order (naive loop regime)."""
        return all(self.rule_order_flags.values())

    @staticmethod
    def _wname(w: Word) -> str:
        return "".join(NC_NAMES[i] for i in w)

    def _subst_rules(self, p: NCPoly) -> NCPoly:
        out = NCPoly.zero()
        for w, c in p.terms.items():
            if w in self.rules:
                out = out + self.rules[w].scale(c)
            else:
                out = out + NCPoly({w: c})
        return out

    def leading_rewrite(self, w: Word) -> NCPoly | None:
        """One leftmost-step rewrite of a single word; None when ordered."""
        pos = self._leftmost_descent(w)
        if pos is None:
            return None
        return self._step(w, pos)

    def _leftmost_descent(self, w: Word) -> int | None:
        for pos in range(len(w) - 1):
            if w[pos] > w[pos + 1] and (w[pos], w[pos + 1]) not in self.frozen_pairs:
                return pos
        return None

    def _step(self, w: Word, pos: int) -> NCPoly:
        pair = (w[pos], w[pos + 1])
        if pair not in self.rules:
            raise MissingRuleError(f"no rule for pair {self._wname(pair)}")
        return NCPoly.term(w[:pos]) * self.rules[pair] * NCPoly.term(w[pos + 2:])

    def _resolve(self, start: Word,
                 memo: dict[Word, NCPoly],
                 choose: Callable[[Word], int] | None = None) -> NCPoly:
        """Expansion of `start` in the ordered-word basis.

        Lazily explores the one-step dependency graph (leftmost descent,
        or a supplied position choice) and solves each strongly connected
        component; memoized components feed later ones.
        """
        if self.is_terminal(start):
            return NCPoly.term(start)
        if start in memo:
            return memo[start]
        steps: dict[Word, NCPoly] = {}

        def step_of(w: Word) -> NCPoly:
            if w not in steps:
                pos = self._leftmost_descent(w) if choose is None else choose(w)
                steps[w] = self._step(w, pos)
            return steps[w]

        def deps_of(w: Word) -> list[Word]:
            return sorted({u for u in step_of(w).terms
                           if not self.is_terminal(u) and u not in memo})

        seen: dict[Word, None] = {}
        edges: dict[Word, list[Word]] = {}
        stack = [start]
        while stack:
            w = stack.pop()
            if w in seen:
                continue
            seen[w] = None
            edges[w] = deps_of(w)
            stack.extend(u for u in edges[w] if u not in seen)
        for comp in _tarjan_sccs(sorted(seen), edges):
            part = _solve_fixed_point(
                comp,
                lambda w: self._substitute_memo(step_of(w), memo, set(comp)),
                f"word {self._wname(comp[0])}")
            memo.update(part)
        return memo[start]

    def _substitute_memo(self, p: NCPoly, memo: dict[Word, NCPoly],
                         keep: set) -> NCPoly:
        out = NCPoly.zero()
        for w, c in p.terms.items():
            if w in keep or self.is_terminal(w):
                out = out + NCPoly({w: c})
            else:
                out = out + memo[w].scale(c)
        return out

    def normal_form(self, p: NCPoly) -> NCPoly:
        for w in p.terms:
            if len(w) > self.degree_cap:
                raise DegreeCapError(
                    f"word {self._wname(w)} exceeds degree cap {self.degree_cap}")
        out = NCPoly.zero()
        for w, c in p.terms.items():
            out = out + self._resolve(w, self._nf_memo).scale(c)
        return out


@dataclass(frozen=True)
class OverlapReport:
    """Degree-3 overlap resolutions: (word, both reductions, difference)."""

    entries: tuple[tuple[Word, NCPoly, NCPoly, NCPoly], ...]

    @property
    def passed(self) -> bool:
        return all(d.is_zero() for _, _, _, d in self.entries)

    def failures(self) -> list[tuple[Word, NCPoly, NCPoly, NCPoly]]:
        return [e for e in self.entries if not e[3].is_zero()]


def diamond_check(rs: RewriteSystem) -> OverlapReport:
    """Resolve every strictly descending triple both ways and compare.

    x_c x_b x_a with c > b > a is the complete ambiguity set for
    quadratic-with-lower rules at degree 3: rewrite (x_c x_b) first or
    (x_b x_a) first, then reduce both results to normal form.
    """
    letters = [i for i in range(len(NC_NAMES))
               if any(p[0] == i or p[1] == i for p in rs.rules)]
    entries = []
    for c in letters:
        for b in letters:
            for a in letters:
                if not (c > b > a):
                    continue
                if (c, b) not in rs.rules or (b, a) not in rs.rules:
                    continue
                left = rs.normal_form(rs.rules[(c, b)] * NCPoly.gen(a))
                right = rs.normal_form(NCPoly.gen(c) * rs.rules[(b, a)])
                entries.append(((c, b, a), left, right, left - right))
    return OverlapReport(tuple(entries))


def random_order_reduction(p: NCPoly, rs: RewriteSystem, rng) -> NCPoly:
    """Resolve with a random redex choice per word; must match normal_form.

    Each non-ordered word gets one defining rewrite at a randomly chosen
    descent position instead of the leftmost one; the fixed-point solve is
    otherwise identical. Agreement across strategies is the practical
    confluence spot-check.
    """
    memo: dict[Word, NCPoly] = {}

    def choose(w: Word) -> int:
        return rng.choice([i for i in range(len(w) - 1)
                           if w[i] > w[i + 1]
                           and (w[i], w[i + 1]) not in rs.frozen_pairs])

    out = NCPoly.zero()
    for w, c in p.terms.items():
        if len(w) > rs.degree_cap:
            raise DegreeCapError("degree cap exceeded")
        out = out + rs._resolve(w, memo, choose).scale(c)
    return out


def weyl_symmetrize(word: Iterable[int]) -> NCPoly:
    """Average of all letter orderings of a commutative monomial."""
    w = tuple(word)
    n = len(w)
    if n == 0:
        return NCPoly.const(1)
    share = Fraction(1, factorial(n))
    out: dict[Word, Coeff] = {}
    for perm in permutations(w):
        out[perm] = out.get(perm, Fraction(0)) + share
    return NCPoly(out)


def formal_jacobi(rs: RewriteSystem, triple: tuple[int, int, int]) -> NCPoly:
    """Normal form of [[a,b],c] + [[b,c],a] + [[c,a],b] from the tables."""
    a, b, c = triple
    t = rs.tables
    res = (derivation_bracket(t.bracket(a, b), c, t)
           + derivation_bracket(t.bracket(b, c), a, t)
           + derivation_bracket(t.bracket(c, a), b, t))
    return rs.normal_form(res)


def ordering_independence_check(
        sym_rhs: dict, rs: RewriteSystem) -> dict:
    """Left-, right- and Weyl-ordered presentations of symmetrized S.T sums.

    sym_rhs maps a label to a list of (coefficient, s_letter, t_letter)
    describing sum c (S T + T S). Individual terms reorder differently;
    the claim under test is that the full sums have equal normal forms.
    """
    out = {}
    for label, terms in sym_rhs.items():
        left = NCPoly.zero()
        right = NCPoly.zero()
        weyl = NCPoly.zero()
        for coeff, s, t in terms:
            left = left + NCPoly.term((s, t), 2 * coeff)
            right = right + NCPoly.term((t, s), 2 * coeff)
            weyl = weyl + NCPoly.term((s, t), coeff) + NCPoly.term((t, s), coeff)
        nl, nr, nw = (rs.normal_form(x) for x in (left, right, weyl))
        out[label] = {
            "agree": nl == nr == nw,
            "left": nl, "right": nr, "weyl": nw,
        }
    return out
