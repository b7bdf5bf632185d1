"""Exact integer and rational linear algebra.

Everything in this module runs on Python ints and fractions.Fraction.
Floating point is banned here: discriminant-group structure and the
rational quadratic values computed downstream must be exact.

Matrices are plain lists of lists, row-major.
"""

from __future__ import annotations

from fractions import Fraction


def identity_matrix(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a: list[list], b: list[list]) -> list[list]:
    if len(a[0]) != len(b):
        raise ValueError("dimension mismatch in mat_mul")
    cols = len(b[0])
    return [
        [sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(cols)]
        for i in range(len(a))
    ]


def mat_vec(a: list[list], v: list) -> list:
    if len(a[0]) != len(v):
        raise ValueError("dimension mismatch in mat_vec")
    return [sum(row[k] * v[k] for k in range(len(v))) for row in a]


def vec_mat(v: list, a: list[list]) -> list:
    if len(v) != len(a):
        raise ValueError("dimension mismatch in vec_mat")
    return [sum(v[k] * a[k][j] for k in range(len(v))) for j in range(len(a[0]))]


def transpose(a: list[list]) -> list[list]:
    return [list(col) for col in zip(*a)]


def mat_frac(a: list[list]) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in a]


def vec_frac(v: list) -> list[Fraction]:
    return [Fraction(x) for x in v]


def bilinear(gram: list[list], v: list, w: list) -> Fraction:
    """v^t * gram * w over exact rationals."""
    n = len(gram)
    if len(v) != n or len(w) != n:
        raise ValueError("dimension mismatch in bilinear")
    return sum(Fraction(v[i]) * sum(Fraction(gram[i][j]) * Fraction(w[j]) for j in range(n)) for i in range(n))


def gram_of_sublist(gram: list[list], basis: list[list]) -> list[list[Fraction]]:
    """Gram matrix of the given vectors with respect to the ambient form."""
    return [[bilinear(gram, b_i, b_j) for b_j in basis] for b_i in basis]


def det_rational(m: list[list]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    n = len(m)
    a = mat_frac(m)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] * inv
                a[r] = [a[r][j] - f * a[col][j] for j in range(n)]
    return det


def rat_inverse(m: list[list]) -> list[list[Fraction]]:
    """Exact inverse by Gauss-Jordan elimination.

    Raises ValueError on a singular matrix.
    """
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("rat_inverse requires a square matrix")
    a = [row[:] + [Fraction(1) if i == j else Fraction(0) for j in range(n)]
         for i, row in enumerate(mat_frac(m))]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [a[r][j] - f * a[col][j] for j in range(2 * n)]
    return [row[n:] for row in a]


def solve_rational(m: list[list], rhs: list) -> list[Fraction]:
    """Solve m x = rhs exactly (square, nonsingular m)."""
    inv = rat_inverse(m)
    return mat_vec(inv, vec_frac(rhs))


def smith_normal_form(m: list[list[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Smith normal form with transforms: returns (U, D, V) with U*m*V = D.

    D is diagonal with d_i | d_{i+1} and nonnegative diagonal; U and V are
    unimodular.  Pivoting picks the smallest-absolute-value nonzero entry,
    ties broken in row-major order, so the transforms are reproducible.
    """
    a = [[int(x) for x in row] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = identity_matrix(rows)
    v = identity_matrix(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, factor):
        a[dst] = [a[dst][k] + factor * a[src][k] for k in range(cols)]
        u[dst] = [u[dst][k] + factor * u[src][k] for k in range(rows)]

    def add_col(dst, src, factor):
        for row in a:
            row[dst] += factor * row[src]
        for row in v:
            row[dst] += factor * row[src]

    t = 0
    while t < min(rows, cols):
        # smallest-absolute-value nonzero pivot in the trailing block
        pivot = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] != 0 and (pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        if pivot[0] != t:
            swap_rows(t, pivot[0])
        if pivot[1] != t:
            swap_cols(t, pivot[1])

        while True:
            # euclidean reduction of column t, then row t
            for i in range(t + 1, rows):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    add_row(i, t, -q)
                    if a[i][t] != 0:
                        swap_rows(t, i)
            if any(a[i][t] != 0 for i in range(t + 1, rows)):
                continue
            for j in range(t + 1, cols):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    add_col(j, t, -q)
                    if a[t][j] != 0:
                        swap_cols(t, j)
            if any(a[i][t] != 0 for i in range(t + 1, rows)) or any(
                a[t][j] != 0 for j in range(t + 1, cols)
            ):
                continue
            # divisibility of the trailing block by the pivot
            offender = next(
                (
                    (i, j)
                    for i in range(t + 1, rows)
                    for j in range(t + 1, cols)
                    if a[i][j] % a[t][t] != 0
                ),
                None,
            )
            if offender is None:
                break
            add_row(t, offender[0], 1)
        t += 1

    for i in range(min(rows, cols)):
        if a[i][i] < 0:
            a[i] = [-x for x in a[i]]
            u[i] = [-x for x in u[i]]
    return u, a, v
