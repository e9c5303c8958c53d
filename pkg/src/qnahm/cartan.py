"""Exact rational matrices and the Cartan-type constructors used by the sums.

Convention for the type-D Cartan matrix: nodes 1..k-1 form a path and the
fork node k is attached to node k-2 (d[k-2,k] = d[k,k-2] = -1).  One also
sees the attachment written at node k-3; only the k-2 attachment satisfies
C(D_k) * (closed-form inverse) = 2I, so the closed-form inverse is treated
as the authoritative object and pins the convention here.  Positive
definiteness is certified through exact LDL^T pivots.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import FactorizationError, InvalidDimensionError

Rat = Fraction


def _fr(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class RationalMatrix:
    """Dense square matrix with exact rational entries."""

    __slots__ = ("k", "rows")

    def __init__(self, rows):
        rows = [[_fr(v) for v in row] for row in rows]
        k = len(rows)
        if any(len(r) != k for r in rows):
            raise InvalidDimensionError("matrix must be square")
        self.k = k
        self.rows = rows

    @classmethod
    def identity(cls, k: int) -> "RationalMatrix":
        return cls([[Fraction(int(i == j)) for j in range(k)] for i in range(k)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, RationalMatrix) and self.rows == other.rows

    __hash__ = None

    def __repr__(self):
        body = "; ".join(" ".join(str(v) for v in row) for row in self.rows)
        return f"RationalMatrix[{body}]"

    def __mul__(self, other):
        if isinstance(other, RationalMatrix):
            if other.k != self.k:
                raise InvalidDimensionError("dimension mismatch")
            n = self.k
            return RationalMatrix(
                [[sum(self.rows[i][t] * other.rows[t][j] for t in range(n)) for j in range(n)]
                 for i in range(n)]
            )
        if isinstance(other, (int, Fraction)):
            return RationalMatrix([[v * other for v in row] for row in self.rows])
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def is_symmetric(self) -> bool:
        return all(
            self.rows[i][j] == self.rows[j][i] for i in range(self.k) for j in range(i)
        )

    def mat_vec(self, v):
        return [sum(self.rows[i][j] * _fr(v[j]) for j in range(self.k)) for i in range(self.k)]

    # -- factorization -------------------------------------------------------

    def ldlt(self):
        """Exact A = L D L^T with unit lower-triangular L; A must be symmetric.

        Returns (L, diag).  A zero pivot is tolerated only when the remaining
        column is zero as well (singular but factorizable); otherwise raises
        FactorizationError, which certifies the matrix is not definite.
        """
        if not self.is_symmetric():
            raise InvalidDimensionError("LDL^T needs a symmetric matrix")
        n = self.k
        L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        d = [Fraction(0)] * n
        for j in range(n):
            d[j] = self.rows[j][j] - sum(L[j][s] * L[j][s] * d[s] for s in range(j))
            for i in range(j + 1, n):
                off = self.rows[i][j] - sum(L[i][s] * L[j][s] * d[s] for s in range(j))
                if d[j] == 0:
                    if off != 0:
                        raise FactorizationError(
                            f"zero pivot at position {j + 1} with nonzero column entry"
                        )
                    L[i][j] = Fraction(0)
                else:
                    L[i][j] = off / d[j]
        return RationalMatrix(L), d

    def pivots(self):
        """The LDL^T pivot sequence (the definiteness certificate)."""
        return self.ldlt()[1]

    def is_positive_definite(self) -> bool:
        try:
            return all(p > 0 for p in self.pivots())
        except FactorizationError:
            return False

    def solve(self, b):
        """Solve A x = b through the LDL^T factors (A symmetric, nonsingular pivots)."""
        L, d = self.ldlt()
        n = self.k
        y = [_fr(v) for v in b]
        for i in range(n):  # L y' = b
            y[i] -= sum(L.rows[i][j] * y[j] for j in range(i))
        for i in range(n):  # D z = y'
            if d[i] == 0:
                raise FactorizationError("singular matrix")
            y[i] /= d[i]
        for i in reversed(range(n)):  # L^T x = z
            y[i] -= sum(L.rows[j][i] * y[j] for j in range(i + 1, n))
        return y

    def inverse(self) -> "RationalMatrix":
        """Exact inverse via LDL^T back-substitution (symmetric matrices)."""
        cols = [self.solve([Fraction(int(i == j)) for i in range(self.k)]) for j in range(self.k)]
        return RationalMatrix([[cols[j][i] for j in range(self.k)] for i in range(self.k)])

    def submatrix(self, rows, cols) -> "RationalMatrix":
        out = [[self.rows[i][j] for j in cols] for i in rows]
        if len(out) != len(out[0]):
            raise InvalidDimensionError("submatrix must be square")
        return RationalMatrix(out)


# ---------------------------------------------------------------------------
# Constructors (1-based index formulas)
# ---------------------------------------------------------------------------


def matrix_G(k: int) -> RationalMatrix:
    """G_k = (min(i, j))."""
    if k < 1:
        raise InvalidDimensionError("k must be >= 1")
    return RationalMatrix([[min(i, j) for j in range(1, k + 1)] for i in range(1, k + 1)])


def matrix_T(k: int) -> RationalMatrix:
    """Tadpole Cartan matrix: tridiagonal, diagonal 2 except corner entry 1."""
    if k < 1:
        raise InvalidDimensionError("k must be >= 1")
    rows = [[0] * k for _ in range(k)]
    for i in range(k):
        rows[i][i] = 2
        if i + 1 < k:
            rows[i][i + 1] = rows[i + 1][i] = -1
    rows[k - 1][k - 1] = 1
    return RationalMatrix(rows)


def matrix_D(k: int) -> RationalMatrix:
    """Type-D Cartan matrix: path on nodes 1..k-1, fork node k on node k-2."""
    if k < 3:
        raise InvalidDimensionError("k must be >= 3")
    rows = [[0] * k for _ in range(k)]
    for i in range(k):
        rows[i][i] = 2
    for i in range(k - 2):  # path edges 1-2, ..., (k-2)-(k-1)
        rows[i][i + 1] = rows[i + 1][i] = -1
    rows[k - 3][k - 1] = rows[k - 1][k - 3] = -1  # fork: node k on node k-2
    return RationalMatrix(rows)


def matrix_2Dinv(k: int) -> RationalMatrix:
    """Closed form of 2 * C(D_k)^{-1}."""
    if k < 3:
        raise InvalidDimensionError("k must be >= 3")
    rows = [[Fraction(0)] * k for _ in range(k)]
    for i in range(1, k - 1):
        for j in range(1, k - 1):
            rows[i - 1][j - 1] = Fraction(2 * min(i, j))
    for i in range(1, k - 1):
        rows[i - 1][k - 2] = rows[i - 1][k - 1] = Fraction(i)
        rows[k - 2][i - 1] = rows[k - 1][i - 1] = Fraction(i)
    rows[k - 2][k - 2] = rows[k - 1][k - 1] = Fraction(k, 2)
    rows[k - 2][k - 1] = rows[k - 1][k - 2] = Fraction(k, 2) - 1
    return RationalMatrix(rows)


def tilde_A(k: int, a) -> RationalMatrix:
    """The one-parameter deformation with corner block [[a, k-1-a], [k-1-a, a]]."""
    if k < 2:
        raise InvalidDimensionError("k must be >= 2")
    a = _fr(a)
    rows = [[Fraction(0)] * k for _ in range(k)]
    for i in range(1, k - 1):
        for j in range(1, k - 1):
            rows[i - 1][j - 1] = Fraction(2 * min(i, j))
    for i in range(1, k - 1):
        rows[i - 1][k - 2] = rows[i - 1][k - 1] = Fraction(i)
        rows[k - 2][i - 1] = rows[k - 1][i - 1] = Fraction(i)
    rows[k - 2][k - 2] = rows[k - 1][k - 1] = a
    rows[k - 2][k - 1] = rows[k - 1][k - 2] = k - 1 - a
    return RationalMatrix(rows)


def schur_delta(k: int, a) -> RationalMatrix:
    """Schur complement of the leading 2G_{k-2} block in tilde_A(k, a).

    Equals [[a - k/2 + 1, k/2 - a], [k/2 - a, a - k/2 + 1]], with
    eigenvalues 1 and 2a - k + 1; positive exactly when a > (k-1)/2.
    """
    if k < 3:
        raise InvalidDimensionError("k must be >= 3")
    A = tilde_A(k, a)
    top = list(range(k - 2))
    bottom = [k - 2, k - 1]
    G2 = A.submatrix(top, top)
    P = [[A.rows[i][j] for j in bottom] for i in top]  # (k-2) x 2
    Q = A.submatrix(bottom, bottom)
    # columns of (2G)^{-1} P via solves
    sol = [G2.solve([P[i][c] for i in range(k - 2)]) for c in range(2)]
    out = [
        [
            Q.rows[r][c] - sum(P[i][r] * sol[c][i] for i in range(k - 2))
            for c in range(2)
        ]
        for r in range(2)
    ]
    return RationalMatrix(out)
