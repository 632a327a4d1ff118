"""Commutative scalar coefficients built from derivative words on opaque symbols.

A scalar is a Q-linear combination of products of factors; each factor is an
opaque function symbol carrying a finite word of frame derivatives.  Letters
are frame indices 1..2n+1: j <= n is X_j, n < j <= 2n is Y_{j-n}, and 2n+1 is
the vertical derivative T.  Words are stored outermost-first, so the word
(1, 2) applied to f reads X1(Y1(f)).

Normal form: within every word, letters are sorted by the fixed total order
X1 < Y1 < X2 < Y2 < ... < Xn < Yn < T.  Distinct-index letters commute and T
is central; the only non-commuting exchange is inside a conjugate pair, where

    Y_j . X_j  =  X_j . Y_j  -  bracket * T

with bracket = +1 under the default frame convention (the sign is tied to the
structure constant of the vertical coframe element; see the calculus module,
which derives it from d(d(f)) = 0 rather than postulating it).  This is the
standard normal ordering for the enveloping algebra of the frame, so normal
forms are unique and equality is decidable by syntactic comparison.

Factors commute with each other (coefficients of forms are ordinary functions);
a term's factors are kept sorted, terms with equal factor lists are merged, and
zero coefficients are dropped.  All coefficient arithmetic is exact Fraction.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

Word = tuple[int, ...]
Factor = tuple[str, Word]  # (symbol name, derivative word)
Term = tuple[Factor, ...]  # sorted

# Function symbols are opaque and identified by name alone; two occurrences of
# the same name denote the same symbol.
FunctionSymbol = str


class FrameIndexError(ValueError):
    pass


def letter_name(j: int, n: int) -> str:
    if j == 2 * n + 1:
        return "T"
    if 1 <= j <= n:
        return f"X{j}"
    if n < j <= 2 * n:
        return f"Y{j - n}"
    raise FrameIndexError(f"frame index {j} out of range for n={n}")


def _check_letter(j: int, n: int) -> None:
    if not 1 <= j <= 2 * n + 1:
        raise FrameIndexError(f"frame index {j} out of range for n={n}")


def _sort_key(j: int, n: int) -> int:
    # X1 < Y1 < X2 < Y2 < ... < Xn < Yn < T
    if j == 2 * n + 1:
        return 2 * n
    return 2 * (j - 1) if j <= n else 2 * (j - n) - 1


def rewrite_step(word: Word, i: int, n: int, bracket: int = 1):
    """One reduction at adjacent position i; returns ((word, coeff), ...).

    Position i must be out of order.  Exposed so tests can drive reductions in
    arbitrary order and confirm confluence against the canonical expansion.
    """
    a, b = word[i], word[i + 1]
    if _sort_key(a, n) <= _sort_key(b, n):
        raise ValueError(f"position {i} is already ordered")
    swapped = word[:i] + (b, a) + word[i + 2:]
    if b <= n and a == b + n:  # Y_j X_j = X_j Y_j - bracket*T
        return ((swapped, Fraction(1)), (word[:i] + (2 * n + 1,) + word[i + 2:], Fraction(-bracket)))
    return ((swapped, Fraction(1)),)


@lru_cache(maxsize=None)
def canonical_word(word: Word, n: int, bracket: int = 1):
    """Expand a word into its normal form: a tuple of (canonical word, coeff)."""
    for j in word:
        _check_letter(j, n)
    for i in range(len(word) - 1):
        if _sort_key(word[i], n) > _sort_key(word[i + 1], n):
            acc: dict[Word, Fraction] = {}
            for step_word, step_c in rewrite_step(word, i, n, bracket):
                for w2, c2 in canonical_word(step_word, n, bracket):
                    acc[w2] = acc.get(w2, Fraction(0)) + step_c * c2
            return tuple((w, c) for w, c in sorted(acc.items()) if c)
    return ((word, Fraction(1)),)


def _add_term(terms: dict, term: Term, coeff: Fraction) -> None:
    c = terms.get(term, Fraction(0)) + coeff
    if c:
        terms[term] = c
    else:
        terms.pop(term, None)


class ScalarExpr:
    """Immutable-by-convention linear combination; always in normal form."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Term, Fraction] | None = None):
        self.terms = terms if terms is not None else {}

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, ScalarExpr) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "ScalarExpr") -> "ScalarExpr":
        out = dict(self.terms)
        for t, c in other.terms.items():
            _add_term(out, t, c)
        return ScalarExpr(out)

    def __sub__(self, other: "ScalarExpr") -> "ScalarExpr":
        return self + (-other)

    def __neg__(self) -> "ScalarExpr":
        return ScalarExpr({t: -c for t, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, ScalarExpr):
            out: dict[Term, Fraction] = {}
            for t1, c1 in self.terms.items():
                for t2, c2 in other.terms.items():
                    _add_term(out, tuple(sorted(t1 + t2)), c1 * c2)
            return ScalarExpr(out)
        q = Fraction(other)
        if not q:
            return ScalarExpr()
        return ScalarExpr({t: c * q for t, c in self.terms.items()})

    __rmul__ = __mul__

    def __repr__(self):
        if not self.terms:
            return "ScalarExpr(0)"
        bits = []
        for t, c in sorted(self.terms.items()):
            fs = "*".join(f"{name}{list(w)}" if w else name for name, w in t) or "1"
            bits.append(f"{c}*{fs}")
        return "ScalarExpr(" + " + ".join(bits) + ")"


ZERO = ScalarExpr()


def rat(q) -> ScalarExpr:
    q = Fraction(q)
    return ScalarExpr({(): q}) if q else ScalarExpr()


def sym(name: str) -> ScalarExpr:
    return ScalarExpr({((name, ()),): Fraction(1)})


def word_atom(name: str, word: Word, n: int, bracket: int = 1) -> ScalarExpr:
    """The symbol `name` differentiated by `word` (outermost-first), normalized."""
    out: dict[Term, Fraction] = {}
    for w, c in canonical_word(tuple(word), n, bracket):
        _add_term(out, ((name, w),), c)
    return ScalarExpr(out)


def derive(e: ScalarExpr, j: int, n: int, bracket: int = 1) -> ScalarExpr:
    """Apply the frame derivative W_j by the product rule, then normalize."""
    _check_letter(j, n)
    out: dict[Term, Fraction] = {}
    for term, coeff in e.terms.items():
        for i, (name, word) in enumerate(term):
            rest = term[:i] + term[i + 1:]
            for w, c in canonical_word((j,) + word, n, bracket):
                _add_term(out, tuple(sorted(rest + ((name, w),))), coeff * c)
    return ScalarExpr(out)


def normalize(e: ScalarExpr, n: int, bracket: int = 1) -> ScalarExpr:
    """Re-normalize an expression; the identity map on anything built here.

    Useful for scalars assembled from raw term dictionaries in tests.
    """
    total = ScalarExpr()
    for term, coeff in e.terms.items():
        prod = rat(coeff)
        for name, word in term:
            prod = prod * word_atom(name, word, n, bracket)
        total = total + prod
    return total


def scalar_eq(a: ScalarExpr, b: ScalarExpr) -> bool:
    return (a - b).is_zero()
