"""Coordinate realization of the frame calculus for numeric cross-validation.

Everything here deliberately re-implements the pipeline from the ground up:
polynomial coefficients instead of opaque symbols, a textbook exterior
derivative in the coordinate coframe instead of the frame-rule d, a fresh
matrix inverse on every wedge-inversion instead of the cached one, and its
own wedge-sign bookkeeping.  Agreement with the symbolic engine is then
evidence for both implementations, not a restatement of one of them.

The model is the standard polarized realization on R^(2n+1) with coordinates
(x_1..x_n, y_1..y_n, t):

    X_j = d/dx_j - (y_j/2) d/dt,   Y_j = d/dy_j + (x_j/2) d/dt,   T = d/dt,
    theta = dt + (1/2) sum_j (y_j dx_j - x_j dy_j).

With these choices {dx_j, dy_j, theta} is exactly dual to {X_j, Y_j, T},
[X_j, Y_j] = T with all other frame brackets zero, and d(theta) comes out as
-sum_j dx_j ^ dy_j, which is the default convention profile of the symbolic
engine.  The coordinate model is therefore pinned to that profile.

All arithmetic is exact over Fraction; finite differences are evaluated in
exact rational arithmetic too, so the only error in a central difference is
the genuine truncation term.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .identities import IdentityId
from .linalg import invert, mat_vec
from .scalars import ScalarExpr


class UnboundSymbolError(KeyError):
    pass


class Poly:
    """Polynomial in nvars variables: exponent tuple -> Fraction."""

    __slots__ = ("nvars", "coeffs")

    def __init__(self, nvars: int, coeffs: dict | None = None):
        self.nvars = nvars
        self.coeffs = {e: c for e, c in (coeffs or {}).items() if c != 0}

    @classmethod
    def const(cls, nvars: int, q) -> "Poly":
        return cls(nvars, {(0,) * nvars: Fraction(q)})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.nvars, frozenset(self.coeffs.items())))

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, Fraction(0)) + c
        return Poly(self.nvars, out)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, {e: -c for e, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, Poly):
            out: dict = {}
            for ea, ca in self.coeffs.items():
                for eb, cb in other.coeffs.items():
                    e = tuple(a + b for a, b in zip(ea, eb))
                    out[e] = out.get(e, Fraction(0)) + ca * cb
            return Poly(self.nvars, out)
        q = Fraction(other)
        return Poly(self.nvars, {e: c * q for e, c in self.coeffs.items()})

    __rmul__ = __mul__

    def partial(self, i: int) -> "Poly":
        out: dict = {}
        for e, c in self.coeffs.items():
            if e[i] == 0:
                continue
            de = list(e)
            de[i] -= 1
            out[tuple(de)] = out.get(tuple(de), Fraction(0)) + c * e[i]
        return Poly(self.nvars, out)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.coeffs), default=0)

    def evaluate(self, point) -> Fraction:
        total = Fraction(0)
        for e, c in self.coeffs.items():
            v = c
            for p, k in zip(point, e):
                for _ in range(k):
                    v *= p
            total += v
        return total

    def __repr__(self):
        return f"Poly({self.nvars}, {self.coeffs!r})"


@dataclass(frozen=True)
class CoordinateModel:
    """The polarized realization above; coordinate order (x_1..x_n, y_1..y_n, t)."""

    n: int

    @property
    def nvars(self) -> int:
        return 2 * self.n + 1

    def frame_apply(self, j: int, f: Poly) -> Poly:
        """Exact derivative of f along frame field j (1..n X, n+1..2n Y, 2n+1 T)."""
        n = self.n
        t = 2 * n
        if j == 2 * n + 1:
            return f.partial(t)
        if 1 <= j <= n:
            return f.partial(j - 1) + Poly.var(self.nvars, n + j - 1) * Fraction(-1, 2) * f.partial(t)
        if n < j <= 2 * n:
            return f.partial(j - 1) + Poly.var(self.nvars, j - n - 1) * Fraction(1, 2) * f.partial(t)
        raise ValueError(f"frame index {j} out of range for n={n}")

    def frame_vector(self, j: int, point) -> tuple:
        """Components of frame field j in the coordinate basis at a point."""
        n = self.n
        vec = [Fraction(0)] * self.nvars
        if j == 2 * n + 1:
            vec[2 * n] = Fraction(1)
        elif 1 <= j <= n:
            vec[j - 1] = Fraction(1)
            vec[2 * n] = -Fraction(point[n + j - 1]) / 2
        elif n < j <= 2 * n:
            vec[j - 1] = Fraction(1)
            vec[2 * n] = Fraction(point[j - n - 1]) / 2
        else:
            raise ValueError(f"frame index {j} out of range for n={n}")
        return tuple(vec)

    def coframe_row(self, k: int, point) -> tuple:
        """Components of coframe element k in the coordinate coframe at a point."""
        n = self.n
        if k == 2 * n + 1:  # theta
            row = [Fraction(0)] * self.nvars
            for j in range(n):
                row[j] = Fraction(point[n + j]) / 2
                row[n + j] = -Fraction(point[j]) / 2
            row[2 * n] = Fraction(1)
            return tuple(row)
        if 1 <= k <= 2 * n:
            row = [Fraction(0)] * self.nvars
            row[k - 1] = Fraction(1)
            return tuple(row)
        raise ValueError(f"coframe index {k} out of range for n={n}")


def duality_defect(model: CoordinateModel, point) -> Fraction:
    """Max |<coframe_k, frame_j> - delta_kj| at the point; 0 means exact duality."""
    worst = Fraction(0)
    for k in range(1, model.nvars + 1):
        row = model.coframe_row(k, point)
        for j in range(1, model.nvars + 1):
            vec = model.frame_vector(j, point)
            pairing = sum((r * v for r, v in zip(row, vec)), Fraction(0))
            expected = Fraction(1 if j == k else 0)
            worst = max(worst, abs(pairing - expected))
    return worst


def bracket_defect(model: CoordinateModel, f: Poly, point) -> Fraction:
    """Max |([W_a, W_b] - expected) f| at the point, over all frame pairs.

    Expected: [X_j, Y_j] = T, everything else commutes.  Exact arithmetic.
    """
    n = model.n
    worst = Fraction(0)
    for a in range(1, model.nvars + 1):
        for b in range(a + 1, model.nvars + 1):
            lie = (model.frame_apply(a, model.frame_apply(b, f))
                   - model.frame_apply(b, model.frame_apply(a, f)))
            if a <= n and b == a + n:
                lie = lie - model.frame_apply(2 * n + 1, f)
            worst = max(worst, abs(lie.evaluate(point)))
    return worst


# ------------------------------------------------------------ form algebra

def _insertion_sign(mono):
    """Sort covector indices by adjacent transpositions, tracking the sign.

    Returns (sign, sorted tuple), or (None, ()) when an index repeats.  This
    is an independent count, not shared with the symbolic wedge.
    """
    seq = list(mono)
    sign = 1
    for i in range(1, len(seq)):
        j = i
        while j > 0 and seq[j - 1] > seq[j]:
            seq[j - 1], seq[j] = seq[j], seq[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and seq[j - 1] == seq[j]:
            return None, ()
    return sign, tuple(seq)


class PolyForm:
    """Form with Poly coefficients over an abstract coframe basis 1..2n+1.

    The same container doubles as a coordinate-coframe form during the
    exterior-derivative detour; only the interpretation of index 2n+1
    changes (theta vs dt).
    """

    __slots__ = ("degree", "terms")

    def __init__(self, degree: int, terms: dict | None = None):
        self.degree = degree
        self.terms = {m: c for m, c in (terms or {}).items() if not c.is_zero()}

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return (isinstance(other, PolyForm) and self.degree == other.degree
                and self.terms == other.terms)

    def __add__(self, other: "PolyForm") -> "PolyForm":
        if self.degree != other.degree and not (self.is_zero() or other.is_zero()):
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return PolyForm(self.degree if self.terms or not other.terms else other.degree, out)

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        return self + other.scale(Fraction(-1))

    def scale(self, factor) -> "PolyForm":
        return PolyForm(self.degree, {m: c * factor for m, c in self.terms.items()})

    def __repr__(self):
        return f"PolyForm({self.degree}, {self.terms!r})"


def poly_wedge(a: PolyForm, b: PolyForm) -> PolyForm:
    degree = a.degree + b.degree
    out: dict = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            sign, merged = _insertion_sign(ma + mb)
            if sign is None:
                continue
            piece = ca * cb * Fraction(sign)
            out[merged] = out[merged] + piece if merged in out else piece
    return PolyForm(degree, out)


def poly_hor(form: PolyForm, model: CoordinateModel) -> PolyForm:
    th = model.nvars
    return PolyForm(form.degree, {m: c for m, c in form.terms.items() if th not in m})


def poly_vert(form: PolyForm, model: CoordinateModel) -> PolyForm:
    th = model.nvars
    return PolyForm(form.degree, {m: c for m, c in form.terms.items() if th in m})


def theta_polyform(model: CoordinateModel) -> PolyForm:
    return PolyForm(1, {(model.nvars,): Poly.const(model.nvars, 1)})


def dtheta_polyform(model: CoordinateModel) -> PolyForm:
    n = model.n
    return PolyForm(2, {(j, j + n): Poly.const(model.nvars, -1) for j in range(1, n + 1)})


def _theta_in_coordinates(model: CoordinateModel) -> PolyForm:
    # theta = dt + (1/2) sum (y_j dx_j - x_j dy_j), in the coordinate coframe
    n, nv = model.n, model.nvars
    terms = {(nv,): Poly.const(nv, 1)}
    for j in range(1, n + 1):
        terms[(j,)] = Poly.var(nv, n + j - 1) * Fraction(1, 2)
        terms[(j + n,)] = Poly.var(nv, j - 1) * Fraction(-1, 2)
    return PolyForm(1, terms)


def _dt_in_frame_coframe(model: CoordinateModel) -> PolyForm:
    # dt = theta - (1/2) sum (y_j dx_j - x_j dy_j)
    n, nv = model.n, model.nvars
    terms = {(nv,): Poly.const(nv, 1)}
    for j in range(1, n + 1):
        terms[(j,)] = Poly.var(nv, n + j - 1) * Fraction(-1, 2)
        terms[(j + n,)] = Poly.var(nv, j - 1) * Fraction(1, 2)
    return PolyForm(1, terms)


def _substitute_last(form: PolyForm, replacement: PolyForm, model: CoordinateModel) -> PolyForm:
    """Rewrite each monomial as a wedge of 1-forms, swapping index 2n+1 for
    the given combination."""
    nv = model.nvars
    out = PolyForm(form.degree)
    for mono, coeff in form.terms.items():
        acc = PolyForm(0, {(): coeff})
        for k in mono:
            factor = replacement if k == nv else PolyForm(1, {(k,): Poly.const(nv, 1)})
            acc = poly_wedge(acc, factor)
        out = out + acc
    return out


def poly_d(form: PolyForm, model: CoordinateModel) -> PolyForm:
    """Exterior derivative through the coordinate coframe.

    Substitute theta out, apply the flat textbook d (partials wedged with
    coordinate covectors), substitute dt back.  No frame product rule and no
    structure constants appear; they emerge from the substitution.
    """
    nv = model.nvars
    flat = _substitute_last(form, _theta_in_coordinates(model), model)
    out = PolyForm(form.degree + 1)
    for mono, coeff in flat.terms.items():
        for i in range(nv):
            dc = coeff.partial(i)
            if dc.is_zero():
                continue
            out = out + poly_wedge(PolyForm(1, {(i + 1,): dc}), PolyForm(form.degree, {mono: Poly.const(nv, 1)}))
    return _substitute_last(out, _dt_in_frame_coframe(model), model)


def poly_d_scalar(f: Poly, model: CoordinateModel) -> PolyForm:
    return poly_d(PolyForm(0, {(): f}), model)


def poly_L_inv(eta: PolyForm, model: CoordinateModel) -> PolyForm:
    """Invert the dtheta-wedge on horizontal (n-1)-forms; fresh solve per call."""
    n, nv = model.n, model.nvars
    th = nv
    for mono in eta.terms:
        if th in mono:
            raise ValueError("argument must be horizontal")
    lo = list(combinations(range(1, 2 * n + 1), n - 1))
    hi = list(combinations(range(1, 2 * n + 1), n + 1))
    hi_index = {m: i for i, m in enumerate(hi)}
    dth = dtheta_polyform(model)
    matrix = [[Fraction(0)] * len(lo) for _ in hi]
    for col, mono in enumerate(lo):
        image = poly_wedge(dth, PolyForm(n - 1, {mono: Poly.const(nv, 1)}))
        for m, c in image.terms.items():
            matrix[hi_index[m]][col] = c.evaluate((0,) * nv)
    coeffs = mat_vec(invert(matrix), [eta.terms.get(m, Poly(nv)) for m in hi], Poly(nv))
    return PolyForm(n - 1, dict(zip(lo, coeffs)))


def poly_script_L(alpha: PolyForm, model: CoordinateModel) -> PolyForm:
    return poly_L_inv(poly_hor(poly_d(alpha, model), model).scale(Fraction(-1)), model)


# ----------------------------------------------------- identity evaluation

def _hor_monomials(n: int, k: int):
    return list(combinations(range(1, 2 * n + 1), k))


def identity_symbols(identity: IdentityId, n: int) -> tuple:
    """Generic symbol names the polynomial re-build of an identity binds."""
    names = ["g"]
    names += ["w" + "".join(map(str, m)) for m in _hor_monomials(n, n)]
    names += ["b" + "".join(map(str, m)) for m in _hor_monomials(n, n - 1)]
    if identity is IdentityId.CLASS_INVARIANCE_EXPLORATORY:
        names += ["p" + "".join(map(str, m)) for m in _hor_monomials(n, n - 1)]
        if n >= 2:
            names += ["q" + "".join(map(str, m)) for m in _hor_monomials(n, n - 2)]
    return tuple(names)


def _bound_form(prefix: str, degree: int, bindings: dict, model: CoordinateModel) -> PolyForm:
    terms = {}
    for m in _hor_monomials(model.n, degree):
        name = prefix + "".join(map(str, m))
        if name not in bindings:
            raise UnboundSymbolError(f"no binding for symbol {name!r}")
        terms[m] = bindings[name]
    return PolyForm(degree, terms)


def _poly_rewrite_bracket(g: Poly, wprime: PolyForm, model: CoordinateModel) -> PolyForm:
    dg = poly_d_scalar(g, model)
    tg = model.frame_apply(model.nvars, g)
    return (wprime.scale(tg).scale(Fraction(-1))
            - poly_d(poly_L_inv(poly_hor(poly_wedge(dg, wprime), model), model), model)
            - poly_wedge(dg, poly_L_inv(poly_hor(poly_d(wprime, model), model), model)))


def _poly_rewrite_expression(g: Poly, wprime: PolyForm, model: CoordinateModel) -> PolyForm:
    sign = Fraction((-1) ** (model.n - 1))
    return poly_wedge(_poly_rewrite_bracket(g, wprime, model), theta_polyform(model)).scale(sign)


def identity_pairs(identity: IdentityId, n: int, bindings: dict, model: CoordinateModel | None = None):
    """(lhs, rhs) PolyForm pairs whose difference the identity asserts is zero.

    Mirrors the symbolic checkers with the independent polynomial pipeline.
    """
    model = model or CoordinateModel(n)
    if "g" not in bindings:
        raise UnboundSymbolError("no binding for symbol 'g'")
    g = bindings["g"]
    theta = theta_polyform(model)
    wprime = _bound_form("w", n, bindings, model)
    beta = _bound_form("b", n - 1, bindings, model)
    omega = wprime + poly_wedge(beta, theta)
    dg = poly_d_scalar(g, model)
    sl = poly_script_L(omega, model)
    gamma = poly_script_L(omega.scale(g), model) - sl.scale(g)

    if identity is IdentityId.LEMMA_3_14:
        rhs = poly_L_inv(poly_hor(poly_wedge(dg, omega), model).scale(Fraction(-1)), model)
        return [(gamma, rhs)]

    e_star = (poly_wedge(dg, omega + poly_wedge(theta, sl))
              + poly_d(poly_wedge(theta, gamma), model))

    if identity is IdentityId.LEMMA_3_15:
        return [(poly_wedge(e_star, theta), PolyForm(n + 2)),
                (poly_wedge(e_star, dtheta_polyform(model)), PolyForm(n + 3))]
    if identity is IdentityId.EQ_3_4_1:
        psi = (poly_d(poly_script_L(omega.scale(g), model), model)
               - poly_d(sl, model).scale(g))
        graded = (poly_vert(poly_wedge(dg, omega), model)
                  + poly_wedge(psi, theta).scale(Fraction((-1) ** (n - 1))))
        return [(graded, e_star)]
    if identity is IdentityId.FINAL_REWRITE_3_5:
        return [(_poly_rewrite_expression(g, wprime, model), e_star)]
    if identity is IdentityId.H1_EXPLICIT:
        if n != 1:
            raise ValueError(f"the explicit first-level expansion is defined for n=1, got n={n}")
        w1, w2 = wprime.terms.get((1,), Poly(3)), wprime.terms.get((2,), Poly(3))
        inner = model.frame_apply(1, g) * w2 - model.frame_apply(2, g) * w1
        curl = model.frame_apply(1, w2) - model.frame_apply(2, w1)
        tg = model.frame_apply(3, g)
        terms = {}
        for component, wc in ((1, w1), (2, w2)):
            terms[(component, 3)] = (-(tg * wc)
                                     + model.frame_apply(component, inner)
                                     + curl * model.frame_apply(component, g))
        return [(PolyForm(2, terms), e_star)]
    if identity is IdentityId.CLASS_INVARIANCE_EXPLORATORY:
        pert = poly_wedge(_bound_form("p", n - 1, bindings, model), theta)
        if n >= 2:
            pert = pert + poly_wedge(dtheta_polyform(model), _bound_form("q", n - 2, bindings, model))
        shifted = poly_hor(omega + pert, model)
        return [(_poly_rewrite_expression(g, shifted, model),
                 _poly_rewrite_expression(g, wprime, model))]
    raise ValueError(f"no polynomial re-build for {identity!r}")


# --------------------------------------------------------------- checking

def bind_and_eval(e: ScalarExpr, bindings: dict, point) -> Fraction:
    """Evaluate a symbolic scalar under polynomial bindings at a point.

    Derivative words apply innermost-first under the coordinate model, so the
    word (1, 2) on f evaluates X1 of Y1 of the bound polynomial.
    """
    if len(point) % 2 != 1:
        raise ValueError("point must have odd length (x..., y..., t)")
    model = CoordinateModel((len(point) - 1) // 2)
    total = Fraction(0)
    for term, coeff in e.terms.items():
        value = coeff
        for name, word in term:
            if name not in bindings:
                raise UnboundSymbolError(f"no binding for symbol {name!r}")
            f = bindings[name]
            for j in reversed(word):
                f = model.frame_apply(j, f)
            value *= f.evaluate(point)
        total += value
    return total


def finite_diff_check(e: ScalarExpr, bindings: dict, point, step) -> Fraction:
    """Worst relative deviation of central differences from exact frame
    derivatives, over every bound symbol in e and every frame direction.

    The difference runs along the frozen coordinate direction of the frame
    field at the point, all in exact rational arithmetic.
    """
    model = CoordinateModel((len(point) - 1) // 2)
    h = Fraction(step)
    if h <= 0:
        raise ValueError("step must be positive")
    names = sorted({name for term in e.terms for name, _ in term})
    worst = Fraction(0)
    for name in names:
        if name not in bindings:
            raise UnboundSymbolError(f"no binding for symbol {name!r}")
        f = bindings[name]
        for j in range(1, model.nvars + 1):
            exact = model.frame_apply(j, f).evaluate(point)
            vec = model.frame_vector(j, point)
            plus = tuple(p + h * v for p, v in zip(point, vec))
            minus = tuple(p - h * v for p, v in zip(point, vec))
            fd = (f.evaluate(plus) - f.evaluate(minus)) / (2 * h)
            worst = max(worst, abs(exact - fd) / max(Fraction(1), abs(exact)))
    return worst


def _random_poly(rng: random.Random, nvars: int) -> Poly:
    """Degree <= 3 polynomial with small coefficients and at least one
    non-constant monomial (so derivative-driven identities stay sensitive)."""
    while True:
        coeffs: dict = {}
        for k in range(rng.randint(1, 4)):
            degree = rng.randint(1, 3) if k == 0 else rng.randint(0, 3)
            e = [0] * nvars
            for _ in range(degree):
                e[rng.randrange(nvars)] += 1
            c = 0
            while c == 0:
                c = rng.randint(-3, 3)
            e = tuple(e)
            coeffs[e] = coeffs.get(e, Fraction(0)) + c
        p = Poly(nvars, coeffs)
        if any(sum(e) > 0 for e in p.coeffs):
            return p


def _random_point(rng: random.Random, nvars: int) -> tuple:
    return tuple(Fraction(rng.randint(-8, 8), rng.randint(1, 4)) for _ in range(nvars))


def _corrupt(rhs: PolyForm, model: CoordinateModel) -> PolyForm:
    """Mutation hook: flip the sign of the rhs, or add a unit monomial when
    the rhs is identically zero (a sign flip would be invisible there)."""
    if not rhs.is_zero():
        return rhs.scale(Fraction(-1))
    mono = tuple(range(1, rhs.degree + 1))
    if len(mono) != rhs.degree or (mono and mono[-1] > model.nvars):
        raise ValueError(f"no degree-{rhs.degree} monomial available to corrupt")
    return rhs + PolyForm(rhs.degree, {mono: Poly.const(model.nvars, 1)})


def random_identity_check(identity: IdentityId, n: int = 1, trials: int = 100,
                          seed: int = 0, corrupt_rhs: bool = False,
                          bindings: dict | None = None) -> dict:
    """Evaluate lhs - rhs of an identity at random rational points under
    random polynomial bindings; count trials with a nonzero evaluation.

    Each trial draws fresh bindings and a fresh point from its own stream
    seeded "{seed}:{trial}", so trials are independent and reproducible.
    Explicit bindings override the random draw for every trial.
    """
    model = CoordinateModel(n)
    names = identity_symbols(identity, n)
    violations = 0
    for trial in range(trials):
        rng = random.Random(f"{seed}:{trial}")
        bound = bindings if bindings is not None else {
            name: _random_poly(rng, model.nvars) for name in names}
        point = _random_point(rng, model.nvars)
        pairs = identity_pairs(identity, n, bound, model)
        if corrupt_rhs:
            lhs0, rhs0 = pairs[0]
            pairs[0] = (lhs0, _corrupt(rhs0, model))
        hit = False
        for lhs, rhs in pairs:
            diff = lhs - rhs
            if any(c.evaluate(point) != 0 for c in diff.terms.values()):
                hit = True
                break
        violations += hit
    return {
        "identity": identity.value,
        "n": n,
        "trials": trials,
        "seed": seed,
        "corrupted": corrupt_rhs,
        "violations": violations,
    }
