"""Exterior algebra over the frame coframe with ScalarExpr coefficients.

Monomials are strictly increasing tuples of coframe indices 1..2n+1; the
vertical element theta is index 2n+1 and therefore always sorted last.  All
signs live in the coefficients.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import ScalarExpr, rat

Monomial = tuple[int, ...]


class DegreeError(ValueError):
    pass


def merge_monomials(a: Monomial, b: Monomial):
    """Merge two sorted monomials; None on a repeated index, else (sign, merged)."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    if set(a) & set(b):
        return None
    # sign = parity of moving b's letters into place across a's
    inversions = 0
    for x in a:
        for y in b:
            if x > y:
                inversions += 1
    merged = tuple(sorted(a + b))
    return (-1) ** inversions, merged


class Form:
    """Homogeneous form: degree plus {monomial: ScalarExpr}, zero terms dropped.

    Degrees above the frame dimension can only ever hold the zero form; they
    arise transiently when wedging near top degree.
    """

    __slots__ = ("degree", "terms")

    def __init__(self, degree: int, terms: dict[Monomial, ScalarExpr] | None = None):
        if degree < 0:
            raise DegreeError(f"negative degree {degree}")
        self.degree = degree
        self.terms = {}
        if terms:
            for m, c in terms.items():
                if len(m) != degree:
                    raise DegreeError(f"monomial {m} in degree-{degree} form")
                if not c.is_zero():
                    self.terms[m] = c

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, Form) and self.degree == other.degree and self.terms == other.terms

    def __add__(self, other: "Form") -> "Form":
        if self.degree != other.degree:
            raise DegreeError(f"degree {self.degree} + degree {other.degree}")
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, ScalarExpr()) + c
            if s.is_zero():
                out.pop(m, None)
            else:
                out[m] = s
        return Form(self.degree, out)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __neg__(self) -> "Form":
        return Form(self.degree, {m: -c for m, c in self.terms.items()})

    def scale(self, s) -> "Form":
        """Multiply every coefficient by a ScalarExpr or rational."""
        if not isinstance(s, ScalarExpr):
            s = rat(s)
        return Form(self.degree, {m: c * s for m, c in self.terms.items()})

    def __repr__(self):
        return f"Form({self.degree}, {self.terms!r})"


def zero_form(degree: int) -> Form:
    return Form(degree)


def scalar_form(e: ScalarExpr) -> Form:
    return Form(0, {(): e})


def basis_form(mono: Monomial, coeff=1) -> Form:
    c = coeff if isinstance(coeff, ScalarExpr) else rat(coeff)
    return Form(len(mono), {tuple(mono): c})


def wedge(a: Form, b: Form) -> Form:
    out: dict[Monomial, ScalarExpr] = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            merged = merge_monomials(ma, mb)
            if merged is None:
                continue
            sign, m = merged
            c = out.get(m, ScalarExpr()) + ca * cb * sign
            if c.is_zero():
                out.pop(m, None)
            else:
                out[m] = c
    return Form(a.degree + b.degree, out)


def horizontal_part(omega: Form, n: int) -> Form:
    theta = 2 * n + 1
    return Form(omega.degree, {m: c for m, c in omega.terms.items() if theta not in m})


def vertical_part(omega: Form, n: int) -> Form:
    theta = 2 * n + 1
    return Form(omega.degree, {m: c for m, c in omega.terms.items() if theta in m})


def decompose_theta(omega: Form, n: int):
    """Split omega = prime + beta ^ theta with both components theta-free.

    Returns (prime, beta); beta has degree omega.degree - 1 (the zero form of
    that degree when omega is horizontal; for degree-0 input beta is the empty
    degree-0 zero form placeholder at degree -1 being meaningless, so degree 0
    simply yields beta = zero of degree 0).
    """
    theta = 2 * n + 1
    prime: dict[Monomial, ScalarExpr] = {}
    beta: dict[Monomial, ScalarExpr] = {}
    for m, c in omega.terms.items():
        if theta in m:
            beta[m[:-1]] = c  # theta is last; the residual monomial keeps its sign
        else:
            prime[m] = c
    bdeg = max(omega.degree - 1, 0)
    return Form(omega.degree, prime), Form(bdeg, beta)
