"""Text front end for coframe forms.

Grammar, whitespace-insensitive, one precedence level for products:

    form   := ['+' | '-'] chain ( ('+' | '-') chain )*
    chain  := atom ( ('*' | '^') atom )*
    atom   := NUMBER | '(' form ')' | COVECTOR | DERIVATION '(' form ')' | NAME
    NUMBER := digits [ '/' digits ]

Covectors are dx1..dxn, dy1..dyn and theta; derivations are X1..Xn, Y1..Yn
and T, legal only in call position on a degree-0 operand.  Any other NAME is
an opaque scalar symbol.  '*' multiplies and needs a degree-0 side, '^'
wedges; both associate left.  '+' and '-' require equal degrees.

Rendering is canonical: monomials in ascending index order, unit rational
coefficients folded into the sign, multi-term scalar coefficients
parenthesized.  parse(render(x)) round-trips exactly.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .forms import Form, scalar_form, basis_form, wedge
from .scalars import ScalarExpr, derive, letter_name, rat, sym


class ParseError(ValueError):
    """Syntax, range, or degree error, carrying the source position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_TOKEN = re.compile(r"(?P<number>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^()])")
_DX = re.compile(r"dx([1-9]\d*)\Z")
_DY = re.compile(r"dy([1-9]\d*)\Z")
_XF = re.compile(r"X([1-9]\d*)\Z")
_YF = re.compile(r"Y([1-9]\d*)\Z")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def covector_name(j: int, n: int) -> str:
    if j <= n:
        return f"dx{j}"
    if j <= 2 * n:
        return f"dy{j - n}"
    return "theta"


class _Parser:
    def __init__(self, text: str, n: int, bracket: int):
        self.tokens = _tokenize(text)
        self.i = 0
        self.n = n
        self.bracket = bracket

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, text, pos = self.take()
        if kind != "op" or text != op:
            raise ParseError(f"expected {op!r}, found {text!r}" if text else f"expected {op!r}", pos)

    def _covector(self, name: str, pos: int):
        n = self.n
        if name == "theta":
            return 2 * n + 1
        for pattern, base in ((_DX, 0), (_DY, n)):
            m = pattern.match(name)
            if m:
                k = int(m.group(1))
                if k > n:
                    raise ParseError(f"{name} out of range for n={n}", pos)
                return base + k
        return None

    def _derivation(self, name: str, pos: int):
        n = self.n
        if name == "T":
            return 2 * n + 1
        for pattern, base in ((_XF, 0), (_YF, n)):
            m = pattern.match(name)
            if m:
                k = int(m.group(1))
                if k > n:
                    raise ParseError(f"{name} out of range for n={n}", pos)
                return base + k
        return None

    def atom(self) -> Form:
        kind, text, pos = self.take()
        if kind == "number":
            try:
                return scalar_form(rat(Fraction(text)))
            except ZeroDivisionError:
                raise ParseError(f"zero denominator in {text!r}", pos) from None
        if kind == "op" and text == "(":
            inner = self.form()
            self.expect_op(")")
            return inner
        if kind == "name":
            j = self._covector(text, pos)
            if j is not None:
                return basis_form((j,))
            j = self._derivation(text, pos)
            if j is not None:
                self.expect_op("(")
                operand = self.form()
                self.expect_op(")")
                if operand.degree != 0:
                    raise ParseError(f"{text}(...) needs a degree-0 operand", pos)
                e = operand.terms.get((), ScalarExpr())
                return scalar_form(derive(e, j, self.n, self.bracket))
            if self.peek()[:2] == ("op", "("):
                raise ParseError(f"{text!r} is not a derivation", pos)
            return scalar_form(sym(text))
        raise ParseError(f"unexpected {text!r}" if text else "unexpected end of input", pos)

    def chain(self) -> Form:
        acc = self.atom()
        while self.peek()[:2] in (("op", "*"), ("op", "^")):
            _, op, pos = self.take()
            rhs = self.atom()
            if op == "*" and acc.degree and rhs.degree:
                raise ParseError("'*' needs a degree-0 side; use '^' to wedge", pos)
            acc = wedge(acc, rhs)
        return acc

    def form(self) -> Form:
        sign = 1
        if self.peek()[:2] in (("op", "+"), ("op", "-")):
            sign = -1 if self.take()[1] == "-" else 1
        acc = self.chain()
        if sign < 0:
            acc = -acc
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            _, op, pos = self.take()
            rhs = self.chain()
            if rhs.degree != acc.degree:
                raise ParseError(f"cannot add degree {acc.degree} and degree {rhs.degree}", pos)
            acc = acc - rhs if op == "-" else acc + rhs
        return acc


def parse_form(text: str, n: int, bracket: int = 1) -> Form:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    parser = _Parser(text, n, bracket)
    result = parser.form()
    kind, text_, pos = parser.peek()
    if kind != "end":
        raise ParseError(f"trailing input {text_!r}", pos)
    return result


# ---------------------------------------------------------------- rendering

def _factor_text(name: str, word, n: int) -> str:
    out = name
    for j in reversed(word):
        out = f"{letter_name(j, n)}({out})"
    return out


def _term_pieces(term, coeff: Fraction, n: int):
    mag = abs(coeff)
    parts = [] if mag == 1 and term else [str(mag)]
    parts += [_factor_text(name, word, n) for name, word in term]
    return coeff < 0, "*".join(parts)


def render_scalar(e: ScalarExpr, n: int) -> str:
    if e.is_zero():
        return "0"
    out = []
    for term, coeff in sorted(e.terms.items()):
        negative, body = _term_pieces(term, coeff, n)
        if not out:
            out.append(f"-{body}" if negative else body)
        else:
            out.append(f" - {body}" if negative else f" + {body}")
    return "".join(out)


def render_form(form: Form, n: int) -> str:
    if form.degree == 0:
        return render_scalar(form.terms.get((), ScalarExpr()), n)
    if form.is_zero():
        return "0"
    out = []
    for mono, coeff in sorted(form.terms.items()):
        body = "^".join(covector_name(j, n) for j in mono)
        items = sorted(coeff.terms.items())
        if len(items) == 1 and items[0][0] == () and abs(items[0][1]) == 1:
            negative, prefix = items[0][1] < 0, ""
        elif len(items) == 1:
            negative, head = _term_pieces(*items[0], n)
            prefix = f"{head}*"
        else:
            negative, prefix = False, f"({render_scalar(coeff, n)})*"
        piece = prefix + body
        if not out:
            out.append(f"-{piece}" if negative else piece)
        else:
            out.append(f" - {piece}" if negative else f" + {piece}")
    return "".join(out)


def _latex_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(abs(q.numerator))
    return rf"\tfrac{{{abs(q.numerator)}}}{{{q.denominator}}}"


def _latex_symbol(name: str) -> str:
    m = re.fullmatch(r"([A-Za-z_]+?)(\d+)", name)
    if not m:
        return name
    stem, digits = m.group(1), m.group(2)
    sub = digits if len(digits) == 1 else f"{{{digits}}}"
    return f"{stem}_{sub}"


def _latex_letter(j: int, n: int) -> str:
    return _latex_symbol(letter_name(j, n))


def _latex_covector(j: int, n: int) -> str:
    return r"\theta" if j == 2 * n + 1 else _latex_symbol(covector_name(j, n))


def _latex_factor(name: str, word, n: int) -> str:
    out = _latex_symbol(name)
    for j in reversed(word):
        out = f"{_latex_letter(j, n)}({out})"
    return out


def _latex_term(term, coeff: Fraction, n: int):
    mag = _latex_rational(coeff)
    parts = [] if mag == "1" and term else [mag]
    parts += [_latex_factor(name, word, n) for name, word in term]
    return coeff < 0, r"\,".join(parts)


def latex_scalar(e: ScalarExpr, n: int) -> str:
    if e.is_zero():
        return "0"
    out = []
    for term, coeff in sorted(e.terms.items()):
        negative, body = _latex_term(term, coeff, n)
        if not out:
            out.append(f"-{body}" if negative else body)
        else:
            out.append(f" - {body}" if negative else f" + {body}")
    return "".join(out)


def latex_form(form: Form, n: int) -> str:
    if form.degree == 0:
        return latex_scalar(form.terms.get((), ScalarExpr()), n)
    if form.is_zero():
        return "0"
    out = []
    for mono, coeff in sorted(form.terms.items()):
        body = r" \wedge ".join(_latex_covector(j, n) for j in mono)
        items = sorted(coeff.terms.items())
        if len(items) == 1 and items[0][0] == () and abs(items[0][1]) == 1:
            negative, prefix = items[0][1] < 0, ""
        elif len(items) == 1:
            negative, head = _latex_term(*items[0], n)
            prefix = head + r"\,"
        else:
            negative, prefix = False, rf"\left({latex_scalar(coeff, n)}\right)\,"
        piece = prefix + body
        if not out:
            out.append(f"-{piece}" if negative else piece)
        else:
            out.append(f" - {piece}" if negative else f" + {piece}")
    return "".join(out)


def structured_scalar(e: ScalarExpr, n: int) -> list:
    out = []
    for term, coeff in sorted(e.terms.items()):
        out.append({
            "rational": str(coeff),
            "factors": [{"symbol": name, "word": [letter_name(j, n) for j in word]}
                        for name, word in term],
        })
    return out


def structured_form(form: Form, n: int) -> dict:
    return {
        "degree": form.degree,
        "terms": [{"monomial": [covector_name(j, n) for j in mono],
                   "coefficient": structured_scalar(coeff, n)}
                  for mono, coeff in sorted(form.terms.items())],
    }
