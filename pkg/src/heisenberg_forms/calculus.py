"""Left-invariant exterior calculus on the Heisenberg group H^n.

The coframe is dw_1..dw_2n plus the vertical element theta (index 2n+1); the
dual frame is W_1..W_2n plus T.  The single structural input is

    d theta = s * sum_j dw_j ^ dw_{j+n},    s = ConventionProfile.dtheta_sign,

with s = -1 by default.  Everything else is forced: requiring d(d f) = 0
determines the frame commutators ([W_j, W_{j+n}] = -s T, all others zero),
which is exactly the bracket constant the scalar layer rewrites with.
forced_bracket_relations() re-derives this from a free expansion with no
rewriting, and the test suite pins the two against each other.

d uses the graded product rule d(a ^ b) = da ^ b + (-1)^deg(a) a ^ db with no
exceptions.  L is the wedge with d theta on theta-free (n-1)-forms, inverted
exactly over Q; script_L(alpha) = Linv(-(d alpha)|hor) is the correction that
makes alpha + theta ^ script_L(alpha) have vertical differential.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from . import linalg
from .forms import (DegreeError, Form, basis_form, decompose_theta,
                    horizontal_part, merge_monomials, vertical_part, wedge,
                    zero_form)
from .scalars import ScalarExpr, derive, rat


class HorizontalityError(ValueError):
    pass


@dataclass(frozen=True)
class ConventionProfile:
    """Sign convention: d theta = dtheta_sign * sum dw_j ^ dw_{j+n}."""

    dtheta_sign: int = -1

    def __post_init__(self):
        if self.dtheta_sign not in (-1, 1):
            raise ValueError(f"dtheta_sign must be +1 or -1, got {self.dtheta_sign}")

    @property
    def bracket(self) -> int:
        # [X_j, Y_j] = bracket * T, forced by d(d f) = 0; see forced_bracket_relations.
        return -self.dtheta_sign

    @property
    def label(self) -> str:
        return "-" if self.dtheta_sign == -1 else "+"


DEFAULT_PROFILE = ConventionProfile(-1)
PROFILES = (ConventionProfile(-1), ConventionProfile(1))


@dataclass(frozen=True)
class HeisenbergContext:
    n: int
    convention: ConventionProfile = DEFAULT_PROFILE

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")

    @property
    def dim(self) -> int:
        return 2 * self.n + 1

    @property
    def theta_index(self) -> int:
        return 2 * self.n + 1

    @property
    def bracket(self) -> int:
        return self.convention.bracket


def hor_monomials(n: int, k: int):
    """Sorted theta-free monomials of degree k."""
    if k < 0:
        return ()
    return tuple(combinations(range(1, 2 * n + 1), k))

def all_monomials(n: int, k: int):
    if k < 0:
        return ()
    return tuple(combinations(range(1, 2 * n + 2), k))


def theta_form(ctx: HeisenbergContext) -> Form:
    return basis_form((ctx.theta_index,))


def dtheta_form(ctx: HeisenbergContext) -> Form:
    s = ctx.convention.dtheta_sign
    return Form(2, {(j, j + ctx.n): rat(s) for j in range(1, ctx.n + 1)})


def forced_bracket_relations(ctx: HeisenbergContext) -> dict:
    """Commutators forced by d(d f) = 0, derived without the rewrite system.

    Expands d(d f) for an abstract f using free two-letter words and collects,
    per 2-monomial, the word combination that must vanish.  Returns a map
    (a, b) -> q for a < b, meaning [W_a, W_b] = q * T (index 2n+1 plays T).
    """
    n, s = ctx.n, ctx.convention.dtheta_sign
    dim = 2 * n + 1
    by_mono: dict[tuple, dict[tuple, Fraction]] = {}
    for j in range(1, dim + 1):  # d f carries W_j f on coframe slot j
        for k in range(1, dim + 1):  # second derivative W_k W_j f on slot k ^ slot j
            if k == j:
                continue
            sign, mono = merge_monomials((k,), (j,))
            slot = by_mono.setdefault(mono, {})
            slot[(k, j)] = slot.get((k, j), Fraction(0)) + sign
    for i in range(1, n + 1):  # plus (T f) * d theta from the vertical slot
        slot = by_mono.setdefault((i, i + n), {})
        slot[(dim,)] = slot.get((dim,), Fraction(0)) + s
    relations = {}
    for (a, b), words in sorted(by_mono.items()):
        assert words[(a, b)] == 1 and words[(b, a)] == -1
        relations[(a, b)] = -words.get((dim,), Fraction(0))
    return relations


def d_scalar(e: ScalarExpr, ctx: HeisenbergContext) -> Form:
    """Differential of a scalar: sum_j W_j(e) dw_j + T(e) theta."""
    terms = {}
    for j in range(1, ctx.dim + 1):
        de = derive(e, j, ctx.n, ctx.bracket)
        if not de.is_zero():
            terms[(j,)] = de
    return Form(1, terms)


def d(omega: Form, ctx: HeisenbergContext) -> Form:
    """Exterior differential with the graded product rule.

    Total in the degree: at top degree and above every contribution repeats a
    coframe index, so the loop below produces the exact zero form without a
    special case.
    """
    acc = zero_form(omega.degree + 1)
    dth = dtheta_form(ctx)
    for mono, c in omega.terms.items():
        acc = acc + wedge(d_scalar(c, ctx), basis_form(mono))
        if mono and mono[-1] == ctx.theta_index:
            # d(mbar ^ theta) contributes (-1)^|mbar| mbar ^ dtheta
            mbar = mono[:-1]
            acc = acc + wedge(basis_form(mbar, c * ((-1) ** len(mbar))), dth)
    return acc


def _check_horizontal(omega: Form, ctx: HeisenbergContext, what: str) -> None:
    if any(ctx.theta_index in m for m in omega.terms):
        raise HorizontalityError(f"{what} must be theta-free")


@lru_cache(maxsize=None)
def _L_data(n: int, s: int):
    lo = hor_monomials(n, n - 1)
    hi = hor_monomials(n, n + 1)
    index = {m: i for i, m in enumerate(hi)}
    mat = [[Fraction(0)] * len(lo) for _ in hi]
    for col, m in enumerate(lo):
        for i in range(1, n + 1):
            merged = merge_monomials((i, i + n), m)
            if merged:
                sign, mono = merged
                mat[index[mono]][col] += s * sign
    inv = linalg.invert(mat)  # bijectivity is a theorem; failure would be a bug
    return lo, hi, tuple(tuple(r) for r in inv)


def L(beta: Form, ctx: HeisenbergContext) -> Form:
    """Wedge with d theta: theta-free (n-1)-forms to theta-free (n+1)-forms."""
    if beta.degree != ctx.n - 1:
        raise DegreeError(f"L expects degree {ctx.n - 1}, got {beta.degree}")
    _check_horizontal(beta, ctx, "L argument")
    return wedge(dtheta_form(ctx), beta)


def L_inv(eta: Form, ctx: HeisenbergContext) -> Form:
    """Exact inverse of L, via the cached rational matrix inverse."""
    if eta.degree != ctx.n + 1:
        raise DegreeError(f"Linv expects degree {ctx.n + 1}, got {eta.degree}")
    _check_horizontal(eta, ctx, "Linv argument")
    lo, hi, inv = _L_data(ctx.n, ctx.convention.dtheta_sign)
    vec = [eta.terms.get(m, ScalarExpr()) for m in hi]
    out = linalg.mat_vec(inv, vec, ScalarExpr())
    return Form(ctx.n - 1, {m: c for m, c in zip(lo, out) if not c.is_zero()})


def script_L(alpha: Form, ctx: HeisenbergContext) -> Form:
    """Linv(-(d alpha)|hor): the vertical-correction of a middle-degree form."""
    if alpha.degree != ctx.n:
        raise DegreeError(f"scriptL expects degree {ctx.n}, got {alpha.degree}")
    return L_inv(-horizontal_part(d(alpha, ctx), ctx.n), ctx)


def in_J(omega: Form, k: int, ctx: HeisenbergContext) -> bool:
    """Membership in J^k = {a : a ^ theta = 0 and a ^ dtheta = 0}; exact."""
    if omega.degree != k:
        raise DegreeError(f"degree {omega.degree} form against J^{k}")
    return wedge(omega, theta_form(ctx)).is_zero() and wedge(omega, dtheta_form(ctx)).is_zero()


@lru_cache(maxsize=None)
def _I_nullspace(n: int, k: int, s: int):
    rows = all_monomials(n, k)
    index = {m: i for i, m in enumerate(rows)}
    theta = 2 * n + 1
    cols = []
    for m in hor_monomials(n, k - 1):  # alpha ^ theta columns
        col = [Fraction(0)] * len(rows)
        col[index[m + (theta,)]] = Fraction(1)
        cols.append(col)
    for m in hor_monomials(n, k - 2):  # beta ^ dtheta columns
        col = [Fraction(0)] * len(rows)
        for i in range(1, n + 1):
            merged = merge_monomials(m, (i, i + n))
            if merged:
                sign, mono = merged
                col[index[mono]] += s * sign
        cols.append(col)
    if not cols:
        return rows, None
    mat = linalg.transpose(cols)  # rows x cols
    null = linalg.left_nullspace(mat)
    return rows, tuple(tuple(y) for y in null)


def in_I(omega: Form, k: int, ctx: HeisenbergContext) -> bool:
    """Membership in I^k = {alpha ^ theta + beta ^ dtheta}; exact linear solve.

    Solvability over the scalar module reduces to annihilation by the rational
    left null space of the monomial-coordinate matrix, because scalars form a
    free Q-module.
    """
    if omega.degree != k:
        raise DegreeError(f"degree {omega.degree} form against I^{k}")
    if k > ctx.dim:
        raise DegreeError(f"I^{k} undefined in dimension {ctx.dim}")
    rows, null = _I_nullspace(ctx.n, k, ctx.convention.dtheta_sign)
    if null is None:
        return omega.is_zero()
    vec = [omega.terms.get(m, ScalarExpr()) for m in rows]
    for y in null:
        acc = ScalarExpr()
        for c, v in zip(y, vec):
            if c:
                acc = acc + v * c
        if not acc.is_zero():
            return False
    return True


@lru_cache(maxsize=None)
def _reduce_complement(n: int, k: int, s: int):
    """I - P where P projects onto dtheta ^ (theta-free (k-2)-forms).

    Orthogonality is with respect to the inner product that makes coframe
    monomials orthonormal.
    """
    basis = hor_monomials(n, k)
    index = {m: i for i, m in enumerate(basis)}
    gens = hor_monomials(n, k - 2)
    if not gens:
        return basis, None
    B = [[Fraction(0)] * len(gens) for _ in basis]
    for col, m in enumerate(gens):
        for i in range(1, n + 1):
            merged = merge_monomials(m, (i, i + n))
            if merged:
                sign, mono = merged
                B[index[mono]][col] += s * sign
    Bt = linalg.transpose(B)
    P = linalg.mat_mul(linalg.mat_mul(B, linalg.invert(linalg.mat_mul(Bt, B))), Bt)
    comp = [[(Fraction(i == j)) - P[i][j] for j in range(len(basis))] for i in range(len(basis))]
    return basis, tuple(tuple(r) for r in comp)


def reduce_mod_I(omega: Form, k: int, ctx: HeisenbergContext) -> Form:
    """Canonical representative of omega modulo I^k, defined for k <= n.

    Drops the theta-part, then removes the orthogonal component of the
    horizontal part lying in dtheta ^ (theta-free (k-2)-forms).  Idempotent,
    and annihilates I^k exactly.
    """
    if omega.degree != k:
        raise DegreeError(f"degree {omega.degree} form reduced mod I^{k}")
    if k > ctx.n:
        raise DegreeError(f"reduction mod I^{k} only defined for k <= n = {ctx.n}")
    prime = horizontal_part(omega, ctx.n)
    basis, comp = _reduce_complement(ctx.n, k, ctx.convention.dtheta_sign)
    if comp is None:
        return prime
    vec = [prime.terms.get(m, ScalarExpr()) for m in basis]
    out = linalg.mat_vec(comp, vec, ScalarExpr())
    return Form(k, {m: c for m, c in zip(basis, out) if not c.is_zero()})
