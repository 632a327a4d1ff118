"""Dense exact linear algebra over Fraction, for small systems only."""

from __future__ import annotations

from fractions import Fraction


class SingularMatrixError(ArithmeticError):
    pass


def _copy(mat):
    return [[Fraction(x) for x in row] for row in mat]


def identity(m):
    return [[Fraction(1) if i == j else Fraction(0) for j in range(m)] for i in range(m)]


def invert(mat):
    """Inverse by Gauss-Jordan with partial pivoting. Raises SingularMatrixError."""
    m = len(mat)
    a = _copy(mat)
    inv = identity(m)
    for col in range(m):
        pivot = next((r for r in range(col, m) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrixError(f"singular at column {col}")
        a[col], a[pivot] = a[pivot], a[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        inv[col] = [x / p for x in inv[col]]
        for r in range(m):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return inv


def rref(mat):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    a = _copy(mat)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivot = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        p = a[r][c]
        a[r] = [x / p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def nullspace(mat):
    """Basis of {x : mat @ x = 0}, one vector per free column."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    red, pivots = rref(mat) if rows else ([], [])
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def transpose(mat):
    return [list(col) for col in zip(*mat)]


def left_nullspace(mat):
    """Basis of {y : y @ mat = 0}."""
    if not mat:
        return []
    return nullspace(transpose(mat))


def mat_mul(a, b):
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def mat_vec(mat, vec, zero):
    """mat @ vec where vec entries live in any Q-module (scalar * Fraction defined)."""
    out = []
    for row in mat:
        acc = zero
        for c, v in zip(row, vec):
            if c != 0:
                acc = acc + v * c
        out.append(acc)
    return out


def solve(mat, rhs):
    """Unique solution of a square invertible system."""
    inv = invert(mat)
    return [sum((c * v for c, v in zip(row, rhs)), Fraction(0)) for row in inv]
