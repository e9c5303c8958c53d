"""Nahm sums as exact truncated XSeries via exhaustive lattice enumeration.

The sum runs over the nonnegative orthant: every term is
q^(n^T A n / 2 + B.n + C) * x^(w.n) / ((q;q)_{n_1} ... (q;q)_{n_k}),
optionally restricted to a parity class n_i = n_j + r (mod 2) and optionally
evaluated in q^m (base_power).

Enumeration completes the square level by level using the exact LDL^T of A
(Fincke-Pohst style): with A = L D L^T the exponent is
C - B.A^{-1}B/2 + sum_i d_i v_i^2 / 2 where v_i is affine in n_i once the
later coordinates are fixed, so each level gets an exact integer interval
from the remaining exponent budget, and every lattice point with exponent
below the truncation bound is visited exactly once.  The linear term B is
folded into the completed square, so negative entries of B cannot break
exhaustiveness.  1/(q;q)_n factors are cached and partial products are
carried down the tree, truncated to the budget that still matters.
"""

from __future__ import annotations

from fractions import Fraction
from math import floor, gcd

from .cartan import RationalMatrix
from .errors import FactorizationError, InvalidSpecError
from .qseries import (
    PochhammerCache,
    QSeries,
    XSeries,
    MatchResult,
    compare,
    inv_euler,
)


def _fr(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class NahmSpec:
    """Data of one Nahm-type sum: matrix, shift vector, constant, parity, x-weights.

    The matrix must be symmetric positive definite; this is certified with
    exact LDL^T pivots at construction.  parity is (i, j, r) with 1-based
    distinct indices meaning n_i = n_j + r (mod 2).  base_power m evaluates
    the whole sum in q^m.
    """

    __slots__ = ("A", "B", "C", "parity", "xweight", "base_power")

    def __init__(self, A: RationalMatrix, B=None, C=0, parity=None, xweight=None, base_power=1):
        k = A.k
        if not A.is_symmetric():
            raise InvalidSpecError("matrix must be symmetric")
        try:
            pivots = A.pivots()
        except FactorizationError as exc:
            raise InvalidSpecError(f"matrix is not positive definite ({exc})") from None
        bad = next((i for i, p in enumerate(pivots, 1) if p <= 0), None)
        if bad is not None:
            raise InvalidSpecError(
                f"matrix is not positive definite (pivot {bad} = {pivots[bad - 1]})"
            )
        self.A = A
        self.B = tuple(_fr(b) for b in (B if B is not None else [0] * k))
        if len(self.B) != k:
            raise InvalidSpecError("shift vector length mismatch")
        self.C = _fr(C)
        if parity is not None:
            i, j, r = parity
            if not (1 <= i <= k and 1 <= j <= k) or i == j:
                raise InvalidSpecError("parity indices must be distinct and within 1..k")
            parity = (i, j, r % 2)
        self.parity = parity
        self.xweight = tuple(int(w) for w in (xweight if xweight is not None else [0] * k))
        if len(self.xweight) != k:
            raise InvalidSpecError("x-weight vector length mismatch")
        if base_power < 1:
            raise InvalidSpecError("base power must be a positive integer")
        self.base_power = int(base_power)

    @property
    def k(self) -> int:
        return self.A.k

    def without_parity(self) -> "NahmSpec":
        return NahmSpec(self.A, self.B, self.C, None, self.xweight, self.base_power)


def dual_data(A: RationalMatrix, B, C):
    """Zagier duality transform (A, B, C) -> (A^{-1}, A^{-1}B, B.A^{-1}B/2 - k/24 - C)."""
    Ainv = A.inverse()
    Bv = [_fr(b) for b in B]
    Bstar = Ainv.mat_vec(Bv)
    Cstar = sum(b * s for b, s in zip(Bv, Bstar)) / 2 - Fraction(A.k, 24) - _fr(C)
    return Ainv, Bstar, Cstar


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def _interval(dhalf: Fraction, t: Fraction, budget: Fraction):
    """Integers n >= 0 with dhalf*(n + t)^2 < budget (contiguous range)."""
    if budget <= 0:
        return range(0)

    def f(n):
        v = n + t
        return dhalf * v * v

    c = floor(-t)
    start = None
    for cand in (c, c + 1):
        if cand >= 0 and f(cand) < budget:
            start = cand
            break
    if start is None:
        if c < 0 and f(0) < budget:
            start = 0
        else:
            return range(0)
    lo = start
    while lo > 0 and f(lo - 1) < budget:
        lo -= 1
    hi = start
    while f(hi + 1) < budget:
        hi += 1
    return range(lo, hi + 1)


def _enumerate(spec: NahmSpec, trunc: Fraction, split: bool):
    """Core enumerator in the base variable; returns {bucket: {xdeg: {idx: coeff}}}.

    bucket 0/1 is the parity class of n_i + n_j when splitting, else only 0.
    """
    A, B, C = spec.A, spec.B, spec.C
    k = A.k
    L, d = A.ldlt()
    h = A.solve(list(B))  # A h = B; completed square center is -h
    kappa = C - sum(b * s for b, s in zip(B, h)) / 2

    # every leaf exponent is a sum of (A_ii/2) n_i^2, A_ij n_i n_j, B_i n_i and C
    # terms, so 2 * lcm of all entry denominators bounds its denominator
    den = 1
    for i in range(k):
        for j in range(k):
            den = den * A.rows[i][j].denominator // gcd(den, A.rows[i][j].denominator)
    for b in B:
        den = den * b.denominator // gcd(den, b.denominator)
    den = den * C.denominator // gcd(den, C.denominator)
    den *= 2

    if split:
        pi, pj = ((spec.parity[0] - 1, spec.parity[1] - 1) if spec.parity else (0, 1))
        buckets = {0: {}, 1: {}}
    elif spec.parity is not None:
        pi, pj = spec.parity[0] - 1, spec.parity[1] - 1
        buckets = {spec.parity[2]: {}}
    else:
        pi = pj = -1
        buckets = {0: {}}

    cache = PochhammerCache(max(trunc - min(kappa, 0), Fraction(0)))
    Ldat = [[L.rows[j][i] for j in range(i + 1, k)] for i in range(k)]
    w = spec.xweight
    n_fixed = [0] * k

    def descend(level, u_fixed, qpart, partial, xdeg):
        budget = trunc - qpart
        t = h[level] + sum(c * u for c, u in zip(Ldat[level], u_fixed))
        dhalf = d[level] / 2
        for n in _interval(dhalf, t, budget):
            v = n + t
            q2 = qpart + dhalf * v * v
            n_fixed[level] = n
            prod = partial.mul(cache.inv(n), cap=trunc - q2) if n else partial.truncated(trunc - q2)
            if level == 0:
                if pi >= 0:
                    b = (n_fixed[pi] + n_fixed[pj]) & 1
                    if b not in buckets:
                        continue
                else:
                    b = 0
                xslots = buckets[b]
                xd = xdeg + w[0] * n
                tgt = xslots.get(xd)
                if tgt is None:
                    tgt = xslots[xd] = {}
                if den % q2.denominator:
                    raise AssertionError(f"exponent {q2} off the 1/{den} grid")
                base = q2.numerator * (den // q2.denominator)
                step = den // prod.scale
                for e, c in prod.coeffs.items():
                    key = base + e * step
                    if key in tgt:
                        tgt[key] += c
                    else:
                        tgt[key] = c
            else:
                descend(level - 1, [n + h[level]] + u_fixed, q2, prod, xdeg + w[level] * n)

    descend(k - 1, [], kappa, QSeries.one(trunc - min(kappa, Fraction(0))), 0)
    return buckets, den


def _build_x(bucket: dict, den: int, trunc: Fraction, base_power: int) -> XSeries:
    slots = {}
    for xd, coeffs in bucket.items():
        s = QSeries(den, trunc, coeffs)
        if not s.is_zero():
            slots[xd] = s
    x = XSeries(slots, trunc)
    return x.substitute_power(base_power) if base_power != 1 else x


def nahm_sum(spec: NahmSpec, trunc) -> XSeries:
    """The Nahm sum of `spec`, exact below trunc (in the final variable q)."""
    trunc = _fr(trunc)
    base_trunc = trunc / spec.base_power
    buckets, den = _enumerate(spec, base_trunc, split=False)
    bucket = next(iter(buckets.values()))
    return _build_x(bucket, den, base_trunc, spec.base_power)


def nahm_sum_parity_pair(spec: NahmSpec, trunc, pair=None):
    """(even, odd) parts of the sum split by the parity of n_i + n_j.

    The designated index pair defaults to the NahmSpec's own parity pair,
    else to (k-1, k).  even + odd equals the unconstrained sum.
    """
    trunc = _fr(trunc)
    base_trunc = trunc / spec.base_power
    if pair is None:
        pair = (spec.parity[0], spec.parity[1]) if spec.parity else (spec.k - 1, spec.k)
    work = NahmSpec(spec.A, spec.B, spec.C, (pair[0], pair[1], 0), spec.xweight, spec.base_power)
    buckets, den = _enumerate(work, base_trunc, split=True)
    even = _build_x(buckets[0], den, base_trunc, spec.base_power)
    odd = _build_x(buckets[1], den, base_trunc, spec.base_power)
    return even, odd


# ---------------------------------------------------------------------------
# standalone identities from the proofs
# ---------------------------------------------------------------------------


def verify_lift_identity(i_max: int, j_max: int, trunc) -> MatchResult:
    """Check 1/((q;q)_i (q;q)_j) = sum_l q^((i-l)(j-l)) / ((q;q)_l (q;q)_{i-l} (q;q)_{j-l})."""
    trunc = _fr(trunc)
    cache = PochhammerCache(trunc)
    worst = None
    for i in range(i_max + 1):
        for j in range(j_max + 1):
            lhs = cache.inv(i) * cache.inv(j)
            rhs = QSeries.zero(trunc)
            for l in range(min(i, j) + 1):
                term = cache.inv(l) * cache.inv(i - l) * cache.inv(j - l)
                rhs = rhs + term.shift((i - l) * (j - l))
            res = compare(XSeries.from_q(lhs), XSeries.from_q(rhs))
            if not res.ok and worst is None:
                worst = res
    return worst if worst is not None else MatchResult("match", trunc)


def verify_durfee(n: int, trunc) -> MatchResult:
    """Check sum over n1 - n2 = n of q^(n1 n2)/((q;q)_{n1}(q;q)_{n2}) = 1/(q;q)_inf."""
    trunc = _fr(trunc)
    cache = PochhammerCache(trunc)
    total = QSeries.zero(trunc)
    n2 = max(0, -n)
    while Fraction((n2 + n) * n2) < trunc:
        n1 = n2 + n
        total = total + (cache.inv(n1) * cache.inv(n2)).shift(n1 * n2)
        n2 += 1
    return compare(XSeries.from_q(total), XSeries.from_q(inv_euler(trunc)))


def _fk_spec(k: int, a) -> NahmSpec:
    """Quadratic form of tilde_A(k, a) with coordinates cycled so that the
    deformed pair sits on (n_1, n_2); x-weight tracks n_1 - n_2."""
    from .cartan import tilde_A

    At = tilde_A(k, a)
    # position p of the original form reads coordinate perm[p] of the new one
    perm = list(range(2, k)) + [0, 1]
    rows = [[At.rows[0][0]] * k for _ in range(k)]
    inv = [0] * k
    for p, i in enumerate(perm):
        inv[i] = p
    for i in range(k):
        for j in range(k):
            rows[i][j] = At.rows[inv[i]][inv[j]]
    w = [0] * k
    w[0], w[1] = 1, -1
    return NahmSpec(RationalMatrix(rows), xweight=w)


def verify_fk_recursion(k: int, a, trunc) -> MatchResult:
    """Check F_k = F_{k+1} for the cycled tilde_A sums (needs a > k/2)."""
    a = _fr(a)
    if a <= Fraction(k, 2):
        raise InvalidSpecError(f"need a > {k}/2 so both matrices are positive definite")
    f_k = nahm_sum(_fk_spec(k, a), trunc)
    f_k1 = nahm_sum(_fk_spec(k + 1, a), trunc)
    return compare(f_k, f_k1)
