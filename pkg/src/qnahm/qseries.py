"""Exact truncated q-series on a fractional exponent grid, with a Laurent x.

A ``QSeries`` stores finitely many nonzero rational coefficients at exponents
on the grid (1/scale)*Z together with a strict truncation bound ``trunc``
(a Fraction): coefficients at exponents >= trunc are unknown, everything
below is exact.  Truncation bounds are propagated through every operation,
using the valuation-aware rule for products, so a stored coefficient is
always a proven one.

``XSeries`` is a finite Laurent object in an auxiliary variable x whose
coefficients are QSeries values sharing one grid and one truncation bound.
Exponents may be negative in both q and x.

All values are immutable after construction; operations are pure functions,
so values can be shared freely between concurrent tasks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .errors import DivergenceError, NotInvertibleError, ScaleError

Rat = Fraction  # rational scalars; plain ints are accepted everywhere


def _fr(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _norm_coeff(c):
    # keep integer-valued coefficients as ints (hot-path arithmetic is cheaper)
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _icut(trunc: Fraction, scale: int) -> int:
    """Exclusive integer index bound: e/scale < trunc  iff  e < _icut."""
    n = trunc.numerator * scale
    d = trunc.denominator
    return -((-n) // d)


def floor_sqrt(x: Fraction) -> int:
    """floor(sqrt(x)) for x >= 0, exactly."""
    x = _fr(x)
    if x < 0:
        raise ValueError("negative argument")
    return isqrt(x.numerator * x.denominator) // x.denominator


class QSeries:
    """Truncated formal series in q with exact rational coefficients.

    Exponents live on (1/scale)*Z; ``coeffs`` maps the integer index e to the
    coefficient of q^(e/scale).  ``trunc`` is the strict knowledge bound.
    """

    __slots__ = ("scale", "trunc", "coeffs")

    def __init__(self, scale: int, trunc, coeffs: dict):
        trunc = _fr(trunc)
        cut = _icut(trunc, scale)
        clean = {}
        for e, c in coeffs.items():
            if c and e < cut:
                clean[e] = _norm_coeff(c)
        # canonical grid: shed a common factor of the exponent indices
        if scale > 1:
            g = scale
            for e in clean:
                g = gcd(g, e)
                if g == 1:
                    break
            if g > 1:
                clean = {e // g: c for e, c in clean.items()}
                scale //= g
        self.scale = scale
        self.trunc = trunc
        self.coeffs = clean

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, trunc) -> "QSeries":
        return cls(1, trunc, {})

    @classmethod
    def one(cls, trunc) -> "QSeries":
        return cls(1, trunc, {0: 1})

    @classmethod
    def monomial(cls, coeff, exponent, trunc) -> "QSeries":
        e = _fr(exponent)
        return cls(e.denominator, trunc, {e.numerator: coeff})

    @classmethod
    def from_terms(cls, terms, trunc) -> "QSeries":
        """Build from an iterable of (exponent, coefficient) pairs."""
        items = [(_fr(e), c) for e, c in terms]
        scale = 1
        for e, _ in items:
            scale = scale * e.denominator // gcd(scale, e.denominator)
        acc: dict = {}
        for e, c in items:
            idx = e.numerator * (scale // e.denominator)
            acc[idx] = acc.get(idx, 0) + c
        return cls(scale, trunc, acc)

    # -- inspection --------------------------------------------------------

    @property
    def min_exp(self):
        """Lowest exponent with a nonzero coefficient, or None."""
        if not self.coeffs:
            return None
        return Fraction(min(self.coeffs), self.scale)

    def _val(self) -> Fraction:
        # valuation used by the truncation rule; zero series ~ q^trunc * unknown
        if not self.coeffs:
            return self.trunc
        return Fraction(min(self.coeffs), self.scale)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, exponent) -> Fraction:
        """Coefficient of q^exponent; raises beyond the truncation bound."""
        e = _fr(exponent)
        if e >= self.trunc:
            raise ValueError(f"coefficient of q^{e} is beyond truncation {self.trunc}")
        if self.scale % e.denominator:
            return Fraction(0)
        return Fraction(self.coeffs.get(e.numerator * (self.scale // e.denominator), 0))

    def terms(self):
        """Sorted list of (exponent, coefficient) as Fractions."""
        return [
            (Fraction(e, self.scale), Fraction(self.coeffs[e])) for e in sorted(self.coeffs)
        ]

    # -- grid management ----------------------------------------------------

    def rescale(self, new_scale: int) -> "QSeries":
        """Re-express on a finer grid; new_scale must be a multiple of scale."""
        if new_scale % self.scale:
            raise ScaleError(f"{new_scale} is not a multiple of scale {self.scale}")
        f = new_scale // self.scale
        out = QSeries.__new__(QSeries)
        out.scale = new_scale
        out.trunc = self.trunc
        out.coeffs = {e * f: c for e, c in self.coeffs.items()}
        return out

    def _unify(self, other: "QSeries"):
        if self.scale == other.scale:
            return self, other
        s = self.scale * other.scale // gcd(self.scale, other.scale)
        return self.rescale(s), other.rescale(s)

    def truncated(self, trunc) -> "QSeries":
        trunc = _fr(trunc)
        if trunc >= self.trunc:
            return self
        return QSeries(self.scale, trunc, self.coeffs)

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, int):
            other = QSeries(1, self.trunc, {0: other})
        if not isinstance(other, QSeries):
            return NotImplemented
        a, b = self._unify(other)
        acc = dict(a.coeffs)
        for e, c in b.coeffs.items():
            acc[e] = acc.get(e, 0) + c
        return QSeries(a.scale, min(a.trunc, b.trunc), acc)

    __radd__ = __add__

    def __neg__(self):
        out = QSeries.__new__(QSeries)
        out.scale = self.scale
        out.trunc = self.trunc
        out.coeffs = {e: -c for e, c in self.coeffs.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, int):
            other = QSeries(1, self.trunc, {0: other})
        if not isinstance(other, QSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale_by(self, c) -> "QSeries":
        """Multiply every coefficient by the rational scalar c."""
        if not c:
            return QSeries(1, self.trunc, {})
        out = QSeries.__new__(QSeries)
        out.scale = self.scale
        out.trunc = self.trunc
        out.coeffs = {e: _norm_coeff(v * c) for e, v in self.coeffs.items()}
        return out

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale_by(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.mul(other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale_by(other)
        return NotImplemented

    def mul(self, other: "QSeries", cap=None) -> "QSeries":
        """Product truncated at min(Ta+val(b), Tb+val(a)) and optionally `cap`."""
        a, b = self._unify(other)
        trunc = min(a.trunc + b._val(), b.trunc + a._val())
        if cap is not None:
            trunc = min(trunc, _fr(cap))
        if not a.coeffs or not b.coeffs:
            return QSeries(1, trunc, {})
        cut = _icut(trunc, a.scale)
        acc = _mul_dicts(a.coeffs, b.coeffs, cut)
        return QSeries(a.scale, trunc, acc)

    def shift(self, r) -> "QSeries":
        """Multiply by q^r."""
        r = _fr(r)
        if r == 0:
            return self
        s = self.scale * r.denominator // gcd(self.scale, r.denominator)
        f = s // self.scale
        dr = r.numerator * (s // r.denominator)
        out = QSeries.__new__(QSeries)
        out.scale = s
        out.trunc = self.trunc + r
        out.coeffs = {e * f + dr: c for e, c in self.coeffs.items()}
        return out

    def inverse(self) -> "QSeries":
        """Multiplicative inverse; requires a known nonzero lowest term c*q^r.

        The result is proven below trunc - 2r.
        """
        if not self.coeffs:
            raise NotInvertibleError("zero series (or no known coefficients)")
        e0 = min(self.coeffs)
        c0 = self.coeffs[e0]
        r = Fraction(e0, self.scale)
        out_trunc = self.trunc - 2 * r
        # (1 + u)^{-1} with u = self/(c0 q^r) - 1, by the standard recurrence
        n = _icut(out_trunc, self.scale) + e0  # needed length of the unit part
        if n <= 0:
            return QSeries(1, out_trunc, {})
        u = sorted((e - e0, c) for e, c in self.coeffs.items() if e != e0)
        w = [0] * n
        w[0] = 1
        for m in range(1, n):
            s = 0
            for j, cj in u:
                if j > m:
                    break
                wm = w[m - j]
                if wm:
                    s += cj * wm
            if s:
                w[m] = _norm_coeff(-_frac_div(s, c0))
        coeffs = {m - e0: _norm_coeff(_frac_div(w[m], c0)) for m in range(n) if w[m]}
        return QSeries(self.scale, out_trunc, coeffs)

    def substitute_power(self, m: int) -> "QSeries":
        """q -> q^m; the truncation bound scales by m."""
        if m < 1:
            raise ValueError("power must be a positive integer")
        return QSeries(self.scale, self.trunc * m, {e * m: c for e, c in self.coeffs.items()})

    # -- comparison ----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            other = QSeries(1, self.trunc, {0: other})
        if not isinstance(other, QSeries):
            return NotImplemented
        a, b = self._unify(other)
        cut = _icut(min(a.trunc, b.trunc), a.scale)
        for e, c in a.coeffs.items():
            if e < cut and b.coeffs.get(e, 0) != c:
                return False
        for e, c in b.coeffs.items():
            if e < cut and e not in a.coeffs:
                return False
        return True

    __hash__ = None

    def __repr__(self):
        return f"QSeries({self!s})"

    def __str__(self):
        parts = []
        for e, c in self.terms()[:12]:
            if e == 0:
                parts.append(f"{c}")
            elif e.denominator == 1:
                parts.append(f"{c}*q^{e}")
            else:
                parts.append(f"{c}*q^({e})")
        if len(self.coeffs) > 12:
            parts.append("...")
        parts.append(f"O(q^{self.trunc})" if self.trunc.denominator == 1 else f"O(q^({self.trunc}))")
        return " + ".join(parts) if parts else "0"


def _frac_div(a, b):
    if b == 1:
        return a
    if b == -1:
        return -a
    return Fraction(a, 1) / b if not isinstance(a, Fraction) else a / b


def _mul_dicts(ca: dict, cb: dict, cut: int) -> dict:
    """Sparse/dense hybrid product of coefficient dicts, dropping keys >= cut."""
    if len(ca) > len(cb):
        ca, cb = cb, ca
    aitems = sorted(ca.items())
    bitems = sorted(cb.items())
    lo = aitems[0][0] + bitems[0][0]
    span = cut - lo
    if span <= 0:
        return {}
    if len(ca) * len(cb) > 2 * span:  # dense accumulation pays off
        buf = [0] * span
        for ea, va in aitems:
            lim = cut - ea
            for eb, vb in bitems:
                if eb >= lim:
                    break
                buf[ea + eb - lo] += va * vb
        return {i + lo: v for i, v in enumerate(buf) if v}
    acc: dict = {}
    for ea, va in aitems:
        lim = cut - ea
        for eb, vb in bitems:
            if eb >= lim:
                break
            k = ea + eb
            acc[k] = acc.get(k, 0) + va * vb
    return {k: v for k, v in acc.items() if v}


# --------------------------------------------------------------------------
# XSeries
# --------------------------------------------------------------------------


class XSeries:
    """Finite Laurent object in x with QSeries coefficients on a shared grid."""

    __slots__ = ("scale", "trunc", "slots")

    def __init__(self, slots: dict, trunc=None):
        if not slots and trunc is None:
            raise ValueError("empty XSeries needs an explicit truncation bound")
        t = _fr(trunc) if trunc is not None else None
        scale = 1
        for s in slots.values():
            scale = scale * s.scale // gcd(scale, s.scale)
            t = s.trunc if t is None else min(t, s.trunc)
        self.scale = scale
        self.trunc = t
        out = {}
        for d, s in slots.items():
            s = s.truncated(t)
            if s.scale != scale:
                s = s.rescale(scale)
            if s.coeffs:
                out[d] = s
        self.slots = out

    @classmethod
    def zero(cls, trunc) -> "XSeries":
        return cls({}, trunc)

    @classmethod
    def from_q(cls, qs: QSeries) -> "XSeries":
        return cls({0: qs})

    @classmethod
    def unit_x(cls, d: int, trunc) -> "XSeries":
        return cls({d: QSeries.one(trunc)})

    # -- inspection ----------------------------------------------------------

    def x_degrees(self):
        return sorted(self.slots)

    def slot(self, d: int) -> QSeries:
        """QSeries coefficient of x^d (zero series if absent)."""
        s = self.slots.get(d)
        return s if s is not None else QSeries(1, self.trunc, {})

    def q(self) -> QSeries:
        """Unwrap an x-free value."""
        degs = [d for d in self.slots if d != 0]
        if degs:
            raise ValueError(f"series involves x-degrees {degs}")
        return self.slot(0)

    def is_zero(self) -> bool:
        return not self.slots

    def coeff(self, x_degree: int, exponent) -> Fraction:
        return self.slot(x_degree).coeff(exponent)

    def _val(self) -> Fraction:
        if not self.slots:
            return self.trunc
        return min(s._val() for s in self.slots.values())

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other):
        other = _as_x(other, self.trunc)
        if other is None:
            return NotImplemented
        acc = dict(self.slots)
        for d, s in other.slots.items():
            acc[d] = acc[d] + s if d in acc else s
        return XSeries(acc, min(self.trunc, other.trunc))

    __radd__ = __add__

    def __neg__(self):
        return XSeries({d: -s for d, s in self.slots.items()}, self.trunc)

    def __sub__(self, other):
        other = _as_x(other, self.trunc)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return XSeries({d: s.scale_by(other) for d, s in self.slots.items()}, self.trunc)
        other = _as_x(other, self.trunc)
        if other is None:
            return NotImplemented
        return self.mul(other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.__mul__(other)
        return NotImplemented

    def mul(self, other: "XSeries", cap=None) -> "XSeries":
        trunc = min(self.trunc + other._val(), other.trunc + self._val())
        if cap is not None:
            trunc = min(trunc, _fr(cap))
        acc: dict = {}
        for da, sa in self.slots.items():
            for db, sb in other.slots.items():
                p = sa.mul(sb, cap=trunc)
                d = da + db
                acc[d] = acc[d] + p if d in acc else p
        return XSeries(acc, trunc)

    def shift(self, r) -> "XSeries":
        """Multiply by q^r."""
        return XSeries({d: s.shift(r) for d, s in self.slots.items()}, self.trunc + _fr(r))

    def xshift(self, k: int) -> "XSeries":
        """Multiply by x^k."""
        return XSeries({d + k: s for d, s in self.slots.items()}, self.trunc)

    def substitute_power(self, m: int) -> "XSeries":
        """q -> q^m in every slot (x untouched)."""
        return XSeries({d: s.substitute_power(m) for d, s in self.slots.items()}, self.trunc * m)

    def truncated(self, trunc) -> "XSeries":
        trunc = _fr(trunc)
        if trunc >= self.trunc:
            return self
        return XSeries({d: s.truncated(trunc) for d, s in self.slots.items()}, trunc)

    def fold_x1(self) -> QSeries:
        """Substitute x = 1 (sum the x-slices)."""
        acc = QSeries(1, self.trunc, {})
        for s in self.slots.values():
            acc = acc + s
        return acc

    def inverse(self) -> "XSeries":
        """Inverse when the x^0 part leads and the other degrees sit on one
        side of 0 with q-valuation growing at least linearly in |degree|."""
        f0 = self.slots.get(0)
        if f0 is None or not f0.coeffs:
            raise NotInvertibleError("x^0 part has no known nonzero term")
        pos = [d for d in self.slots if d > 0]
        neg = [d for d in self.slots if d < 0]
        if pos and neg:
            raise NotInvertibleError("mixed x-degrees are not invertible here")
        side = pos or neg
        inv0 = f0.inverse()
        trunc = inv0.trunc
        if not side:
            return XSeries({0: inv0}, trunc)
        sigma = min(self.slots[d]._val() / abs(d) for d in side)
        if sigma <= 0:
            raise NotInvertibleError("x-degrees do not gain q-valuation")
        dmax = int((trunc - inv0._val()) / sigma) + 1
        sgn = 1 if pos else -1
        out = {0: inv0}
        for step in range(1, dmax + 1):
            d = sgn * step
            s = QSeries(1, trunc, {})
            for e in side:
                prev = out.get(d - e)
                if prev is not None and abs(d - e) < abs(d):
                    s = s + self.slots[e].mul(prev, cap=trunc)
            if not s.is_zero():
                v = (-s).mul(inv0, cap=trunc)
                if not v.is_zero():
                    out[d] = v
        return XSeries(out, trunc)

    # -- comparison --------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (QSeries, int)):
            other = _as_x(other, self.trunc)
        if not isinstance(other, XSeries):
            return NotImplemented
        return first_mismatch(self, other) is None

    __hash__ = None

    def __repr__(self):
        if not self.slots:
            return f"XSeries(0 + O(q^{self.trunc}))"
        bits = [f"x^{d}*({s})" if d else f"({s})" for d, s in sorted(self.slots.items())]
        return "XSeries(" + " + ".join(bits) + ")"


def _as_x(v, trunc):
    if isinstance(v, XSeries):
        return v
    if isinstance(v, QSeries):
        return XSeries({0: v})
    if isinstance(v, int):
        return XSeries({0: QSeries(1, trunc, {0: v})}, trunc)
    return None


@dataclass
class Mismatch:
    """First differing coefficient between two series."""

    x_degree: int
    exponent: Fraction
    lhs: Fraction
    rhs: Fraction


@dataclass
class MatchResult:
    """Outcome of a coefficientwise comparison below a truncation bound."""

    status: str  # "match" | "mismatch"
    trunc: Fraction
    mismatch: Mismatch | None = None

    @property
    def ok(self) -> bool:
        return self.status == "match"


def first_mismatch(a, b) -> Mismatch | None:
    """Earliest differing coefficient (by exponent, then x-degree), or None."""
    ax = a if isinstance(a, XSeries) else _as_x(a, getattr(b, "trunc", 0))
    bx = b if isinstance(b, XSeries) else _as_x(b, ax.trunc)
    trunc = min(ax.trunc, bx.trunc)
    scale = ax.scale * bx.scale // gcd(ax.scale, bx.scale)
    cut = _icut(trunc, scale)
    diffs = []
    for d in set(ax.slots) | set(bx.slots):
        sa = ax.slot(d).rescale(scale) if ax.slot(d).scale != scale else ax.slot(d)
        sb = bx.slot(d).rescale(scale) if bx.slot(d).scale != scale else bx.slot(d)
        for e in set(sa.coeffs) | set(sb.coeffs):
            if e >= cut:
                continue
            ca = sa.coeffs.get(e, 0)
            cb = sb.coeffs.get(e, 0)
            if ca != cb:
                diffs.append((e, d, ca, cb))
    if not diffs:
        return None
    e, d, ca, cb = min(diffs)
    return Mismatch(d, Fraction(e, scale), Fraction(ca), Fraction(cb))


def compare(a, b) -> MatchResult:
    mm = first_mismatch(a, b)
    trunc = min(a.trunc, b.trunc)
    return MatchResult("match" if mm is None else "mismatch", trunc, mm)


# --------------------------------------------------------------------------
# Pochhammer symbols, theta sums, eta quotients
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FactorSpec:
    """One family of product factors (1 - sign * x^x_deg * q^(q_exp + k*modulus)).

    sign=+1 gives ordinary Pochhammer factors (1 - a q^k); sign=-1 gives
    (1 + a q^k).  modulus must be positive.
    """

    sign: int
    q_exp: Fraction
    modulus: Fraction
    x_deg: int = 0

    def __post_init__(self):
        object.__setattr__(self, "q_exp", _fr(self.q_exp))
        object.__setattr__(self, "modulus", _fr(self.modulus))
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.modulus <= 0:
            raise ValueError("modulus must be positive")


def _one_factor(f: FactorSpec, k: int, trunc) -> XSeries:
    e = f.q_exp + k * f.modulus
    mono = QSeries.monomial(-f.sign, e, trunc)
    one = QSeries.one(trunc)
    if f.x_deg == 0:
        return XSeries({0: one + mono})
    return XSeries({0: one, f.x_deg: mono})


def pochhammer_finite(f: FactorSpec, n: int, trunc) -> XSeries:
    """Product of the first n factors of f (n = 0 gives 1)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    trunc = _fr(trunc)
    acc = XSeries({0: QSeries.one(trunc)})
    for k in range(n):
        acc = acc * _one_factor(f, k, trunc)
    return acc


def pochhammer_infinite(f: FactorSpec, trunc) -> XSeries:
    """Infinite product of f-factors; factors at exponents >= trunc are 1.

    Requires q_exp > 0 for x-free factors (formal convergence).  Factors
    with negative q-exponents (only possible with x_deg != 0) erode the
    proven range; callers should pad trunc accordingly.
    """
    trunc = _fr(trunc)
    if f.x_deg == 0 and f.q_exp <= 0:
        raise DivergenceError(f"(1 - q^{f.q_exp}) factor does not converge as a formal product")
    acc = XSeries({0: QSeries.one(trunc)})
    k = 0
    while f.q_exp + k * f.modulus < trunc:
        acc = acc * _one_factor(f, k, trunc)
        k += 1
    return acc


def euler_factor(trunc) -> QSeries:
    """(q; q)_infinity."""
    return pochhammer_infinite(FactorSpec(1, Fraction(1), Fraction(1)), trunc).q()


def inv_euler(trunc) -> QSeries:
    """1/(q; q)_infinity, the partition generating function."""
    return euler_factor(trunc).inverse()


def geometric_inverse(r, trunc) -> QSeries:
    """1/(1 - q^r) for r > 0."""
    r = _fr(r)
    if r <= 0:
        raise DivergenceError("geometric inverse needs a positive exponent")
    trunc = _fr(trunc)
    terms = []
    j = 0
    while j * r < trunc:
        terms.append((j * r, 1))
        j += 1
    return QSeries.from_terms(terms, trunc)


class PochhammerCache:
    """Shared expansions of 1/(q^step; q^step)_n below a fixed bound.

    Exponents are integers (scale = step); entries are extended lazily and
    reused across an enumeration, where they dominate the series work.
    """

    def __init__(self, trunc, step: int = 1):
        self.trunc = _fr(trunc)
        self.step = step
        self._cut = max(_icut(self.trunc / step, 1), 0)
        self._dense = [[1] + [0] * (self._cut - 1 if self._cut else 0)]
        self._wrapped = {}

    def inv(self, n: int) -> QSeries:
        """1/(q^step; q^step)_n as a QSeries."""
        if n not in self._wrapped:
            d = self._dense_inv(n)
            qs = QSeries(1, self.trunc / self.step, {e: c for e, c in enumerate(d) if c})
            self._wrapped[n] = qs.substitute_power(self.step) if self.step != 1 else qs
        return self._wrapped[n]

    def _dense_inv(self, n: int):
        while len(self._dense) <= n:
            m = len(self._dense)
            prev = self._dense[-1]
            new = list(prev)
            for e in range(m, self._cut):
                new[e] += new[e - m]
            self._dense.append(new)
        return self._dense[n]


def theta_sum(quad, lin=0, const=0, weight_c0=1, weight_c1=0, xlin=0, xconst=0, *, trunc) -> XSeries:
    """Sum over all integers n of (c0 + c1*n) q^(quad*n^2 + lin*n + const) x^(xlin*n + xconst).

    The summation range is exactly the integers where the exponent is below
    trunc; quad must be positive.
    """
    quad, lin, const = _fr(quad), _fr(lin), _fr(const)
    trunc = _fr(trunc)
    if quad <= 0:
        raise DivergenceError("theta sum needs a positive quadratic coefficient")
    rng = _quadratic_int_range(quad, lin, const, trunc)
    slots: dict = {}
    for n in rng:
        w = weight_c0 + weight_c1 * n
        if not w:
            continue
        e = quad * n * n + lin * n + const
        d = xlin * n + xconst
        slots.setdefault(d, []).append((e, w))
    return XSeries(
        {d: QSeries.from_terms(terms, trunc) for d, terms in slots.items()}, trunc
    )


def _quadratic_int_range(quad, lin, const, bound):
    """All integers n with quad*n^2 + lin*n + const < bound (quad > 0)."""

    def f(n):
        return quad * n * n + lin * n + const

    vertex = -lin / (2 * quad)
    c = vertex.numerator // vertex.denominator  # floor
    start = None
    for cand in (c, c + 1):
        if f(cand) < bound:
            start = cand
            break
    if start is None:
        return range(0)
    lo = start
    while f(lo - 1) < bound:
        lo -= 1
    hi = start
    while f(hi + 1) < bound:
        hi += 1
    return range(lo, hi + 1)


def eta_quotient(factors, trunc) -> QSeries:
    """Product of J factors raised to integer powers.

    Each entry is (a, m, e): a = 0 encodes J_m = (q^m; q^m)_inf and
    1 <= a < m encodes J_{a,m} = (q^a, q^{m-a}, q^m; q^m)_inf, raised to e.
    """
    trunc = _fr(trunc)
    acc = QSeries.one(trunc)
    for a, m, e in factors:
        if m < 1 or a < 0 or (a and not a < m):
            raise ValueError(f"bad eta factor (a={a}, m={m})")
        if e == 0:
            continue
        base = pochhammer_infinite(FactorSpec(1, Fraction(m), Fraction(m)), trunc).q()
        if a:
            base = base * pochhammer_infinite(FactorSpec(1, Fraction(a), Fraction(m)), trunc).q()
            base = base * pochhammer_infinite(FactorSpec(1, Fraction(m - a), Fraction(m)), trunc).q()
        if e < 0:
            base = base.inverse()
        acc = acc * qs_pow(base, abs(e))
    return acc


def qs_pow(s, e: int):
    """s**e by binary powering (e >= 0); works for QSeries and XSeries."""
    if e < 0:
        raise ValueError("negative power; invert first")
    result = None
    base = s
    while e:
        if e & 1:
            result = base if result is None else result * base
        e >>= 1
        if e:
            base = base * base
    if result is None:
        return QSeries.one(s.trunc) if isinstance(s, QSeries) else XSeries({0: QSeries.one(s.trunc)})
    return result


def verify_jtp(shift: int = 0, *, trunc) -> MatchResult:
    """Check the triple-product expansion of the bilateral sum of x^n q^(n^2 + shift*n).

    shift = 0 is the plain identity; integer shifts tilt both sides by
    x -> x q^shift.
    """
    trunc = _fr(trunc)
    lhs = theta_sum(1, shift, 0, xlin=1, trunc=trunc)
    specs = [
        FactorSpec(-1, Fraction(1 + shift), Fraction(2), 1),
        FactorSpec(-1, Fraction(1 - shift), Fraction(2), -1),
        FactorSpec(1, Fraction(2), Fraction(2), 0),
    ]
    pad = sum((-s.q_exp) for s in specs if s.q_exp < 0)
    work = trunc + pad
    rhs = XSeries({0: QSeries.one(work)})
    for s in specs:
        rhs = rhs * pochhammer_infinite(s, work)
    return compare(lhs, rhs.truncated(trunc))


# --------------------------------------------------------------------------
# Serialization (CLI report format)
# --------------------------------------------------------------------------


def serialize_series(x) -> list:
    """Flatten to (x_degree, exp_num, exp_den, coeff_num, coeff_den) records,
    ordered by x-degree and then by exponent value."""
    if isinstance(x, QSeries):
        x = XSeries({0: x})
    records = []
    for d in x.x_degrees():
        for e, c in x.slot(d).terms():
            records.append((d, e.numerator, e.denominator, c.numerator, c.denominator))
    return records
