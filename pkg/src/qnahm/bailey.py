"""Executable Bailey-pair machinery: defining relation, S1 iteration,
parameter lift/reduce, the limiting identity, and the explicit pairs used in
the type-D proofs, plus a driver that replays whole proof chains.

A pair is stored as finite prefixes of the alpha and beta sequences (XSeries
values, so x-dependent pairs are first class) relative to a = q^e.  The
defining relation

    beta_n = sum_{r<=n} alpha_r / ((q;q)_{n-r} (q^{e+1};q)_{n+r})

is enforced by verify_bailey rather than assumed.  The limiting identity
needs a quantified tail bound: the first omitted term of
sum a^n q^{n^2} beta_n has exponent at least (M+1)^2 + e(M+1), so the prefix
length M must satisfy (M+1)(M+1+e) >= trunc.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InsufficientLengthError, SingularParameterError
from .qseries import (
    FactorSpec,
    MatchResult,
    PochhammerCache,
    QSeries,
    XSeries,
    compare,
    first_mismatch,
    geometric_inverse,
    pochhammer_infinite,
)


def _fr(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass
class BaileyPair:
    """Finite prefix of a Bailey pair relative to a = q^param_exp."""

    param_exp: Fraction
    alpha: list
    beta: list
    trunc: Fraction

    def __post_init__(self):
        self.param_exp = _fr(self.param_exp)
        self.trunc = _fr(self.trunc)
        if len(self.alpha) != len(self.beta):
            raise ValueError("alpha and beta prefixes must have equal length")
        if self.param_exp <= -1:
            raise SingularParameterError("need param_exp > -1 so (q^(e+1); q)_n converges")

    @property
    def length(self) -> int:
        return len(self.alpha) - 1


class _AqCache:
    """Inverses 1/(q^(e+1); q)_m, extended lazily."""

    def __init__(self, e: Fraction, trunc: Fraction):
        if e <= -1:
            raise SingularParameterError("need param_exp > -1 so (q^(e+1); q)_n converges")
        self.e = e
        self.trunc = trunc
        self._inv = [QSeries.one(trunc)]

    def inv(self, m: int) -> QSeries:
        while len(self._inv) <= m:
            j = len(self._inv) - 1  # next factor is (1 - q^(e+1+j))
            step = geometric_inverse(self.e + 1 + j, self.trunc)
            self._inv.append(self._inv[-1] * step)
        return self._inv[m]


def beta_from_alpha(e, alphas, trunc) -> "BaileyPair":
    """Build a pair from an alpha prefix via the defining relation."""
    e = _fr(e)
    trunc = _fr(trunc)
    qq = PochhammerCache(trunc)
    aq = _AqCache(e, trunc)
    alphas = [a if isinstance(a, XSeries) else XSeries.from_q(a) for a in alphas]
    betas = []
    for n in range(len(alphas)):
        acc = XSeries.zero(trunc)
        for r in range(n + 1):
            acc = acc + alphas[r] * qq.inv(n - r) * aq.inv(n + r)
        betas.append(acc)
    return BaileyPair(e, alphas, betas, trunc)


def verify_bailey(pair: BaileyPair) -> MatchResult:
    """Recompute every beta_n from alpha via the defining relation and compare.

    The mismatch, if any, carries the offending n in .mismatch_at.
    """
    qq = PochhammerCache(pair.trunc)
    aq = _AqCache(pair.param_exp, pair.trunc)
    for n in range(len(pair.beta)):
        acc = XSeries.zero(pair.trunc)
        for r in range(n + 1):
            acc = acc + pair.alpha[r] * qq.inv(n - r) * aq.inv(n + r)
        mm = first_mismatch(pair.beta[n], acc)
        if mm is not None:
            res = MatchResult("mismatch", pair.trunc, mm)
            res.mismatch_at = n
            return res
    res = MatchResult("match", pair.trunc)
    res.mismatch_at = None
    return res


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


def s1_transform(pair: BaileyPair) -> BaileyPair:
    """One Bailey-lemma S1 step: alpha_n *= a^n q^(n^2), beta convolves."""
    e = pair.param_exp
    qq = PochhammerCache(pair.trunc)
    alphas = [a.shift(n * n + e * n) for n, a in enumerate(pair.alpha)]
    betas = []
    for n in range(len(pair.beta)):
        acc = XSeries.zero(pair.trunc)
        for r in range(n + 1):
            acc = acc + pair.beta[r].shift(r * r + e * r) * qq.inv(n - r)
        betas.append(acc)
    return BaileyPair(e, alphas, betas, pair.trunc)


def lift_param(pair: BaileyPair) -> BaileyPair:
    """Raise the parameter a -> aq, keeping beta fixed."""
    e = pair.param_exp
    if e <= -1:
        raise SingularParameterError("lift needs param_exp > -1")
    M = pair.length
    big = pair.trunc + e * M + M * M + 1
    inv_1aq = XSeries.from_q(geometric_inverse(e + 1, big))
    alphas = [pair.alpha[0]]
    partial = pair.alpha[0]  # sum of a^{-r} q^{-r^2} alpha_r
    for n in range(1, M + 1):
        partial = partial + pair.alpha[n].shift(-(n * n) - e * n)
        front = QSeries.from_terms([(0, 1), (e + 2 * n + 1, -1)], big)
        a_new = partial * inv_1aq * XSeries.from_q(front)
        alphas.append(a_new.shift(n * n + e * n).truncated(pair.trunc))
    return BaileyPair(e + 1, alphas, list(pair.beta), pair.trunc)


def reduce_param(pair: BaileyPair) -> BaileyPair:
    """Lower the parameter a -> a/q, keeping beta fixed (needs a != 1)."""
    e = pair.param_exp
    if e == 0:
        raise SingularParameterError("reduce is singular at a = 1 (the 1 - a factor vanishes)")
    if e < 0:
        raise SingularParameterError("reduce needs param_exp > 0")
    trunc = pair.trunc
    one_minus_a = XSeries.from_q(QSeries.from_terms([(0, 1), (e, -1)], trunc + 2 * pair.length + 2 + e))
    alphas = [pair.alpha[0]]
    for n in range(1, pair.length + 1):
        t1 = pair.alpha[n] * XSeries.from_q(geometric_inverse(e + 2 * n, trunc))
        t2 = pair.alpha[n - 1].shift(e + 2 * n - 2) * XSeries.from_q(
            geometric_inverse(e + 2 * n - 2, trunc + e + 2 * n)
        )
        alphas.append((one_minus_a * (t1 - t2)).truncated(trunc))
    return BaileyPair(e - 1, alphas, list(pair.beta), trunc)


def required_length(e, trunc) -> int:
    """Smallest prefix length M with (M+1)(M+1+e) >= trunc."""
    e, trunc = _fr(e), _fr(trunc)
    m = 0
    while (m + 1) * (m + 1 + e) < trunc:
        m += 1
    return m


def limit_identity(pair: BaileyPair, trunc=None) -> MatchResult:
    """Compare both sides of the limiting identity
    sum a^n q^(n^2) beta_n = (1/(aq;q)_inf) sum a^n q^(n^2) alpha_n
    below trunc; the prefix must be long enough for the tail bound.

    The two sides are attached to the result as .lhs and .rhs.
    """
    e = pair.param_exp
    trunc = pair.trunc if trunc is None else _fr(trunc)
    trunc = min(trunc, pair.trunc)
    need = required_length(e, trunc)
    if pair.length < need:
        raise InsufficientLengthError(
            f"prefix length {pair.length} < required {need} for truncation {trunc}",
            required_length=need,
        )
    lhs = XSeries.zero(trunc)
    rhs_sum = XSeries.zero(trunc)
    for n in range(pair.length + 1):
        w = n * n + e * n
        lhs = lhs + pair.beta[n].shift(w).truncated(trunc)
        rhs_sum = rhs_sum + pair.alpha[n].shift(w).truncated(trunc)
    inv_aq = pochhammer_infinite(FactorSpec(1, e + 1, 1), trunc).q().inverse()
    rhs = rhs_sum * inv_aq
    res = compare(lhs, rhs)
    res.lhs = lhs
    res.rhs = rhs.truncated(trunc)
    return res


# ---------------------------------------------------------------------------
# the explicit pairs of the type-D proofs
# ---------------------------------------------------------------------------


def unit_pair(e, length: int, trunc) -> BaileyPair:
    """alpha_n = delta_{n,0}; beta_n = 1/((q;q)_n (q^{e+1};q)_n)."""
    e = _fr(e)
    trunc = _fr(trunc)
    one = XSeries.from_q(QSeries.one(trunc))
    zero = XSeries.zero(trunc)
    qq = PochhammerCache(trunc)
    aq = _AqCache(e, trunc)
    alphas = [one] + [zero] * length
    betas = [XSeries.from_q(qq.inv(n) * aq.inv(n)) for n in range(length + 1)]
    return BaileyPair(e, alphas, betas, trunc)


def even_theta_pair(k: int, a, length: int, trunc) -> BaileyPair:
    """Pair relative to 1 with alpha_r = q^((2a+1-k) r^2) (x^{2r} + x^{-2r}).

    beta is the symmetric double sum from the even-parity case of the proof.
    """
    a = _fr(a)
    trunc = _fr(trunc)
    g = 2 * a + 1 - k
    qq = PochhammerCache(trunc)
    alphas = [XSeries.from_q(QSeries.one(trunc))]
    for r in range(1, length + 1):
        mono = QSeries.monomial(1, g * r * r, trunc)
        alphas.append(XSeries({2 * r: mono, -2 * r: mono}))
    betas = []
    for s in range(length + 1):
        acc = XSeries.zero(trunc)
        for r in range(-s, s + 1):
            acc = acc + XSeries(
                {2 * r: (qq.inv(s + r) * qq.inv(s - r)).shift(g * r * r)}
            )
        betas.append(acc)
    return BaileyPair(Fraction(0), alphas, betas, trunc)


def odd_theta_pair(k: int, a, length: int, trunc) -> BaileyPair:
    """Pair relative to q with alpha_r = q^((2a+1-k)(r^2+r)) (x^{2r+1} + x^{-2r-1}).

    beta is (1-q) times the r-sum over -s-1..s of the odd-parity case.
    """
    a = _fr(a)
    trunc = _fr(trunc)
    g = 2 * a + 1 - k
    qq = PochhammerCache(trunc)
    one_minus_q = QSeries.from_terms([(0, 1), (1, -1)], trunc)
    alphas = []
    for r in range(length + 1):
        mono = QSeries.monomial(1, g * (r * r + r), trunc)
        alphas.append(XSeries({2 * r + 1: mono, -2 * r - 1: mono}))
    betas = []
    for s in range(length + 1):
        acc = XSeries.zero(trunc)
        for r in range(-s - 1, s + 1):
            acc = acc + XSeries(
                {2 * r + 1: (qq.inv(s - r) * qq.inv(s + r + 1)).shift(g * (r * r + r))}
            )
        betas.append((acc * XSeries.from_q(one_minus_q)).truncated(trunc))
    return BaileyPair(Fraction(1), alphas, betas, trunc)


def rr_even_pair(length: int, trunc) -> BaileyPair:
    """Pair relative to 1 with alpha_0 = 1, alpha_r = 2 q^(r^2)."""
    trunc = _fr(trunc)
    qq = PochhammerCache(trunc)
    alphas = [XSeries.from_q(QSeries.one(trunc))]
    alphas += [XSeries.from_q(QSeries.monomial(2, r * r, trunc)) for r in range(1, length + 1)]
    betas = []
    for s in range(length + 1):
        acc = QSeries.zero(trunc)
        for r in range(-s, s + 1):
            acc = acc + (qq.inv(s + r) * qq.inv(s - r)).shift(r * r)
        betas.append(XSeries.from_q(acc))
    return BaileyPair(Fraction(0), alphas, betas, trunc)


def rr_odd_pair(length: int, trunc) -> BaileyPair:
    """Pair relative to q with alpha_r = q^(r^2 + r)."""
    trunc = _fr(trunc)
    qq = PochhammerCache(trunc)
    one_minus_q = QSeries.from_terms([(0, 1), (1, -1)], trunc)
    alphas = [XSeries.from_q(QSeries.monomial(1, r * r + r, trunc)) for r in range(length + 1)]
    betas = []
    for s in range(length + 1):
        # the symmetric r-sum of the proof folds 2:1 onto r >= 0 here
        acc = QSeries.zero(trunc)
        for r in range(s + 1):
            acc = acc + (qq.inv(s - r) * qq.inv(s + r + 1)).shift(r * r + r)
        betas.append(XSeries.from_q((acc * one_minus_q).truncated(trunc)))
    return BaileyPair(Fraction(1), alphas, betas, trunc)


BUILTIN_PAIRS = {
    "unit": unit_pair,
    "even-theta": even_theta_pair,
    "odd-theta": odd_theta_pair,
    "rr-even": rr_even_pair,
    "rr-odd": rr_odd_pair,
}


def make_builtin_pair(name: str, length: int, trunc, *, e=0, k=None, a=None) -> BaileyPair:
    """Construct a named pair from the catalog."""
    if name == "unit":
        return unit_pair(e, length, trunc)
    if name == "even-theta":
        return even_theta_pair(int(k), a, length, trunc)
    if name == "odd-theta":
        return odd_theta_pair(int(k), a, length, trunc)
    if name == "rr-even":
        return rr_even_pair(length, trunc)
    if name == "rr-odd":
        return rr_odd_pair(length, trunc)
    raise KeyError(f"unknown pair {name!r}; choose from {sorted(BUILTIN_PAIRS)}")


TRANSFORMS = {
    "s1": s1_transform,
    "lift": lift_param,
    "reduce": reduce_param,
}


def apply_chain(pair: BaileyPair, steps) -> BaileyPair:
    """Apply a sequence of named transforms (e.g. ["s1", "s1", "lift"])."""
    for step in steps:
        try:
            pair = TRANSFORMS[step.strip()](pair)
        except KeyError:
            raise KeyError(f"unknown transform {step!r}; choose from {sorted(TRANSFORMS)}") from None
    return pair


# ---------------------------------------------------------------------------
# proof-chain replay
# ---------------------------------------------------------------------------


def _replay(pair: BaileyPair, level_coeffs, trunc) -> XSeries:
    """Fold a nested sum whose levels carry weights q^(s^2 + c*s) into the pair.

    level_coeffs lists the linear coefficients c innermost first.  Each level
    except the outermost is absorbed by an S1 step after lifting/reducing the
    parameter to match c; the outermost is evaluated by the limiting identity.
    Returns the value of the whole nested sum below trunc.
    """
    for idx, c in enumerate(level_coeffs):
        c = _fr(c)
        while pair.param_exp < c:
            pair = lift_param(pair)
        while pair.param_exp > c:
            pair = reduce_param(pair)
        if idx < len(level_coeffs) - 1:
            pair = s1_transform(pair)
        else:
            return limit_identity(pair, trunc).rhs
    raise ValueError("no levels to absorb")


def replay_deformed_chain(k: int, a, parity: str, length: int, trunc) -> XSeries:
    """Replay the even/odd proof chains of the bivariate family.

    Returns the claimed value of the parity-restricted Nahm sum on tilde_A(k, a)
    with weight x^(n_{k-1} - n_k), straight from the Bailey machinery.
    """
    trunc = _fr(trunc)
    if parity == "even":
        pair = even_theta_pair(k, a, length, trunc)
        return _replay(pair, [0] * (k - 1), trunc)
    if parity == "odd":
        # the x^(2r+1) weights live inside the pair; only q^(a/2)/(1-q) is outside
        pair = odd_theta_pair(k, a, length, trunc)
        value = _replay(pair, [1] * (k - 1), trunc)
        inv_1q = geometric_inverse(1, trunc + _fr(a) / 2)
        return (value * XSeries.from_q(inv_1q)).shift(_fr(a) / 2).truncated(trunc)
    raise ValueError("parity must be 'even' or 'odd'")


def replay_type_d_chain(k: int, lam: int, which: int, length: int, trunc) -> XSeries:
    """Replay the proof chains for the four eta-cleared type-D identities.

    which = 1, 2 reuse the bivariate chains at a = k/2 with x standing for
    q^(lam/2); which = 3, 4 run the lift / S1^lam / reduce / S1^(k-lam-2)
    chains of the weighted identities (lam in 1..k-1).  Returns the chain's
    value of q^(-c) * LHS; for 1, 2 the value is bivariate.
    """
    trunc = _fr(trunc)
    a = Fraction(k, 2)
    if which == 1:
        return replay_deformed_chain(k, a, "even", length, trunc)
    if which == 2:
        return replay_deformed_chain(k, a, "odd", length, trunc)
    if which not in (3, 4) or not 1 <= lam <= k - 1:
        raise ValueError("which must be 1..4 with lam in 1..k-1 for 3 and 4")
    # innermost lam levels carry the extra linear weight, the rest none/one
    if which == 3:
        pair = rr_even_pair(length, trunc)
        levels = [1] * lam + [0] * (k - 1 - lam)
        return _replay(pair, levels, trunc)
    pair = rr_odd_pair(length, trunc)
    levels = [2] * lam + [1] * (k - 1 - lam)
    value = _replay(pair, levels, trunc)
    pre = Fraction(k + 2 * lam, 4)
    inv_1q = geometric_inverse(1, trunc + pre)
    return (value * XSeries.from_q(inv_1q)).shift(pre).truncated(trunc) * 2
