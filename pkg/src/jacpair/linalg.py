"""Exact integer matrix kernel: Smith normal form and rational solving.

Matrices are plain lists of rows of Python ints. Nothing here touches
floating point; all entries are arbitrary precision.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple, Sequence

IntMatrix = list[list[int]]


class SnfResult(NamedTuple):
    U: IntMatrix
    S: IntMatrix
    V: IntMatrix


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> list[list]:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    if any(len(row) != inner for row in A):
        raise ValueError("incompatible shapes for matmul")
    Bt = list(zip(*B)) if B else [()] * cols
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Sequence[Sequence[int]], x: Sequence) -> list:
    return [sum(a * b for a, b in zip(row, x)) for row in A]


def _check_shape(A: Sequence[Sequence[int]]) -> tuple[int, int]:
    m = len(A)
    if m == 0 or len(A[0]) == 0:
        raise ValueError("matrix must be nonempty")
    n = len(A[0])
    if any(len(row) != n for row in A):
        raise ValueError("ragged matrix")
    return m, n


def _snf(A: Sequence[Sequence[int]], inverses: bool = False):
    m, n = _check_shape(A)
    S = [list(map(int, row)) for row in A]
    U = identity(m)
    V = identity(n)
    # inverses are maintained alongside: U^-1 under column ops, V^-1 under row ops
    Ui = identity(m) if inverses else None
    Vi = identity(n) if inverses else None

    def swap_rows(i, j):
        if i != j:
            S[i], S[j] = S[j], S[i]
            U[i], U[j] = U[j], U[i]
            if Ui is not None:
                for row in Ui:
                    row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        if i != j:
            for row in S:
                row[i], row[j] = row[j], row[i]
            for row in V:
                row[i], row[j] = row[j], row[i]
            if Vi is not None:
                Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, c):
        # row[dst] += c * row[src]
        if c:
            rs, rd = S[src], S[dst]
            for k in range(n):
                if rs[k]:
                    rd[k] += c * rs[k]
            us, ud = U[src], U[dst]
            for k in range(m):
                if us[k]:
                    ud[k] += c * us[k]
            if Ui is not None:
                for row in Ui:
                    if row[dst]:
                        row[src] -= c * row[dst]

    def add_col(dst, src, c):
        # col[dst] += c * col[src]
        if c:
            for row in S:
                if row[src]:
                    row[dst] += c * row[src]
            for row in V:
                if row[src]:
                    row[dst] += c * row[src]
            if Vi is not None:
                vd, vs = Vi[dst], Vi[src]
                for k in range(n):
                    if vd[k]:
                        vs[k] -= c * vd[k]

    def negate_row(i):
        S[i] = [-x for x in S[i]]
        U[i] = [-x for x in U[i]]
        if Ui is not None:
            for row in Ui:
                row[i] = -row[i]

    for t in range(min(m, n)):
        pivot = None
        best = None
        for i in range(t, m):
            row = S[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best):
                    best, pivot = abs(v), (i, j)
                    if best == 1:
                        break
            if best == 1:
                break
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            p = S[t][t]
            clean = True
            for i in range(t + 1, m):
                if S[i][t]:
                    add_row(i, t, -(S[i][t] // p))
                    if S[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if S[t][j]:
                    add_col(j, t, -(S[t][j] // p))
                    if S[t][j]:
                        clean = False
            if not clean:
                # a remainder smaller than the pivot survived; move it in
                best, pos = abs(p), None
                for i in range(t + 1, m):
                    if S[i][t] and abs(S[i][t]) < best:
                        best, pos = abs(S[i][t]), ("r", i)
                for j in range(t + 1, n):
                    if S[t][j] and abs(S[t][j]) < best:
                        best, pos = abs(S[t][j]), ("c", j)
                if pos is not None:
                    if pos[0] == "r":
                        swap_rows(t, pos[1])
                    else:
                        swap_cols(t, pos[1])
                continue
            bad = None
            for i in range(t + 1, m):
                row = S[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if S[t][t] < 0:
            negate_row(t)
    return U, S, V, Ui, Vi


def smith_normal_form(A: Sequence[Sequence[int]]) -> SnfResult:
    """Return unimodular U, V and diagonal S with U·A·V = S.

    The diagonal is nonnegative, each entry divides the next, and zeros
    come last. Pivots are chosen by minimal absolute value.

    >>> smith_normal_form([[2, 0], [0, 3]]).S
    [[1, 0], [0, 6]]
    """
    U, S, V, _, _ = _snf(A)
    return SnfResult(U, S, V)


def smith_decomposition(A: Sequence[Sequence[int]]):
    """Like :func:`smith_normal_form` but also returns U⁻¹ and V⁻¹."""
    U, S, V, Ui, Vi = _snf(A, inverses=True)
    return SnfResult(U, S, V), Ui, Vi


def diagonal(S: Sequence[Sequence[int]]) -> list[int]:
    return [S[i][i] for i in range(min(len(S), len(S[0]) if S else 0))]


def invariant_factors(A: Sequence[Sequence[int]]) -> list[int]:
    """Nontrivial invariant factors (entries > 1) of the cokernel of A."""
    return [d for d in diagonal(smith_normal_form(A).S) if d > 1]


def determinant(A: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n, n2 = _check_shape(A)
    if n != n2:
        raise ValueError("determinant needs a square matrix")
    M = [list(map(int, row)) for row in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def solve_rational(
    A: Sequence[Sequence[int]], b: Sequence[int]
) -> list[Fraction] | None:
    """Solve A·x = b over the rationals through the Smith form.

    Returns None when the system is inconsistent. Free variables, if any,
    are set to zero.
    """
    m, n = _check_shape(A)
    if len(b) != m:
        raise ValueError("right-hand side has the wrong length")
    U, S, V = smith_normal_form(A)
    c = matvec(U, b)
    y = [Fraction(0)] * n
    for i in range(m):
        d = S[i][i] if i < n else 0
        if d:
            y[i] = Fraction(c[i], d)
        elif c[i]:
            return None
    return matvec(V, y)
