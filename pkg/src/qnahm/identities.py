"""The verification catalog: build both sides of each identity and compare.

Every catalog case is stored in eta-cleared normal form: the rational
q-power prefactors (the lambda^2/4k - 1/24 constants and the 1/24 of the
eta function) are cancelled symbolically before any series is expanded, so
the series can stay on a coarse exponent grid.  Raw mode multiplies the
prefactors back in on both sides and must agree with the cleared mode.

The right side of a case is an expression tree: a list of (coefficient,
factors) terms, each factor one of

    ("J", a, m, e)                        eta-quotient factor J_m^e / J_{a,m}^e
    ("P", sign, q_exp, modulus, x_deg, e) infinite Pochhammer product ^ e
    ("PF", sign, q_exp, modulus, x_deg, n, e)  finite Pochhammer ^ e
    ("theta", quad, lin, const, c0, c1, xlin, xconst)  bilateral theta sum
    ("qpow", r)  /  ("xpow", d)  /  ("invq",)  = 1/(q;q)_inf

which is exactly what the identity-spec DSL can write down.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from .cartan import RationalMatrix, matrix_2Dinv, matrix_D, matrix_G, tilde_A
from .errors import InvalidSpecError, QnahmError
from .nahm import (
    NahmSpec,
    nahm_sum,
    verify_durfee,
    verify_fk_recursion,
    verify_lift_identity,
)
from .qseries import (
    FactorSpec,
    PochhammerCache,
    QSeries,
    XSeries,
    compare,
    eta_quotient,
    floor_sqrt,
    pochhammer_finite,
    pochhammer_infinite,
    qs_pow,
    theta_sum,
    verify_jtp,
)

_EXACT = Fraction(10**9)  # truncation bound for exact polynomial factors


def _fr(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# ---------------------------------------------------------------------------
# expression trees
# ---------------------------------------------------------------------------


def _factor_erosion(f) -> Fraction:
    """How far a factor can lower the proven range of a product (>= 0)."""
    kind = f[0]
    if kind == "qpow":
        return max(Fraction(0), -_fr(f[1]))
    if kind in ("P", "PF"):
        sign, q_exp, modulus = f[1], _fr(f[2]), _fr(f[3])
        n = f[5] if kind == "PF" else None
        e = f[6] if kind == "PF" else f[5]
        total = Fraction(0)
        k = 0
        while q_exp + k * modulus < 0 and (n is None or k < n):
            total += -(q_exp + k * modulus)
            k += 1
        return total * abs(e) if e > 0 else Fraction(0)
    if kind == "theta":
        quad, lin, const = _fr(f[1]), _fr(f[2]), _fr(f[3])
        vmin = const - lin * lin / (4 * quad)
        return max(Fraction(0), -vmin)
    return Fraction(0)


def _eval_factor(f, trunc) -> XSeries:
    kind = f[0]
    if kind == "J":
        return XSeries.from_q(eta_quotient([(f[1], f[2], f[3])], trunc))
    if kind == "P":
        _, sign, q_exp, modulus, x_deg, e = f
        if e == 0:
            return XSeries.from_q(QSeries.one(trunc))
        base = pochhammer_infinite(FactorSpec(sign, q_exp, modulus, x_deg), trunc)
        if e < 0:
            base = base.inverse()
        return qs_pow(base, abs(e))
    if kind == "PF":
        _, sign, q_exp, modulus, x_deg, n, e = f
        if e == 0:
            return XSeries.from_q(QSeries.one(_EXACT))
        work = _EXACT if e > 0 else trunc
        base = pochhammer_finite(FactorSpec(sign, q_exp, modulus, x_deg), n, work)
        if e < 0:
            base = base.inverse()
        return qs_pow(base, abs(e))
    if kind == "theta":
        _, quad, lin, const, c0, c1, xlin, xconst = f
        return theta_sum(quad, lin, const, c0, c1, xlin, xconst, trunc=trunc)
    if kind == "qpow":
        return XSeries.from_q(QSeries.monomial(1, f[1], _EXACT))
    if kind == "xpow":
        return XSeries({f[1]: QSeries.one(_EXACT)}, _EXACT)
    if kind == "invq":
        return XSeries.from_q(
            pochhammer_infinite(FactorSpec(1, 1, 1), trunc).q().inverse()
        )
    raise ValueError(f"unknown factor kind {kind!r}")


def eval_rhs(tree, trunc) -> XSeries:
    """Evaluate an expression tree below trunc (exactly)."""
    trunc = _fr(trunc)
    total = XSeries.zero(trunc)
    for coeff, factors in tree:
        pad = sum((_factor_erosion(f) for f in factors), Fraction(0))
        work = trunc + pad
        acc = XSeries.from_q(QSeries.one(work))
        for f in factors:
            acc = acc * _eval_factor(f, work)
        total = total + acc.truncated(trunc) * _fr(coeff)
    return total.truncated(trunc)


# ---------------------------------------------------------------------------
# cases and reports
# ---------------------------------------------------------------------------


@dataclass
class IdentityCase:
    """One verifiable identity: a Nahm-sum (or tree) left side and a tree right side."""

    name: str
    params: dict
    spec: NahmSpec | None
    rhs: list
    default_order: Fraction
    lhs_tree: list | None = None  # tree-vs-tree cases (no Nahm side)
    xslice: int | None = None  # compare only this x-degree of the LHS
    raw_shift: Fraction = Fraction(0)  # raw mode: LHS gains q^raw_shift
    raw_rhs: list | None = None
    matrix_src: tuple | None = None  # builder rendering hint for the DSL
    extra: dict = field(default_factory=dict)

    def order_scale(self) -> int:
        return self.spec.base_power if self.spec is not None else 1

    def trunc_for(self, order) -> Fraction:
        return _fr(order if order is not None else self.default_order) * self.order_scale()

    def lhs_value(self, trunc, raw=False) -> XSeries:
        if self.lhs_tree is not None:
            return eval_rhs(self.lhs_tree, trunc)
        value = nahm_sum(self.spec, trunc + max(Fraction(0), self.raw_shift if raw else 0))
        if self.xslice is not None:
            value = XSeries.from_q(value.slot(self.xslice))
        if raw and self.raw_shift:
            value = value.shift(self.raw_shift).truncated(trunc + self.raw_shift)
        return value

    def rhs_value(self, trunc, raw=False) -> XSeries:
        tree = self.raw_rhs if (raw and self.raw_rhs is not None) else self.rhs
        shift = self.raw_shift if (raw and self.raw_rhs is not None) else Fraction(0)
        return eval_rhs(tree, trunc + shift)


@dataclass
class VerifyReport:
    """Result of one verification run."""

    name: str
    params: dict
    trunc: Fraction
    status: str  # match | mismatch | error
    first_mismatch: object = None
    elapsed: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "match"

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "params": {k: _param_json(v) for k, v in self.params.items()},
            "trunc": {"num": self.trunc.numerator, "den": self.trunc.denominator},
            "status": self.status,
            "elapsed_ms": round(self.elapsed * 1000, 3),
        }
        if self.first_mismatch is not None:
            mm = self.first_mismatch
            out["first_mismatch"] = {
                "x_degree": mm.x_degree,
                "exponent": {"num": mm.exponent.numerator, "den": mm.exponent.denominator},
                "lhs": {"num": mm.lhs.numerator, "den": mm.lhs.denominator},
                "rhs": {"num": mm.rhs.numerator, "den": mm.rhs.denominator},
            }
        if self.extra:
            out["extra"] = self.extra
        return out

    def line(self) -> str:
        ps = " ".join(f"{k}={v}" for k, v in self.params.items())
        head = "ok      " if self.ok else ("MISMATCH" if self.status == "mismatch" else "ERROR   ")
        msg = f"{head} {self.name}" + (f" [{ps}]" if ps else "") + f" order {self.trunc}"
        if self.status == "mismatch" and self.first_mismatch is not None:
            mm = self.first_mismatch
            msg += f"  first diff at x^{mm.x_degree} q^{mm.exponent}: lhs={mm.lhs} rhs={mm.rhs}"
        if self.status == "error":
            msg += f"  {self.extra.get('error', '')}"
        msg += f"  ({self.elapsed:.2f}s)"
        return msg


def _param_json(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    return v


def run_case(case: IdentityCase, order=None, raw=False) -> VerifyReport:
    """Compare both sides of a case at the given order (natural units)."""
    t0 = time.perf_counter()
    trunc = case.trunc_for(order)
    try:
        lhs = case.lhs_value(trunc, raw=raw)
        rhs = case.rhs_value(trunc, raw=raw)
        res = compare(lhs, rhs)
        return VerifyReport(
            case.name, case.params, trunc, res.status, res.mismatch,
            time.perf_counter() - t0, dict(case.extra),
        )
    except QnahmError as exc:
        return VerifyReport(
            case.name, case.params, trunc, "error", None,
            time.perf_counter() - t0,
            {**case.extra, "error": str(exc), "error_kind": type(exc).__name__},
        )


# ---------------------------------------------------------------------------
# case builders
# ---------------------------------------------------------------------------


def _invq():
    return ("invq",)


def case_rr(lam=0) -> IdentityCase:
    """Rogers-Ramanujan, lam = 0 or 1."""
    lam = int(lam)
    if lam not in (0, 1):
        raise InvalidSpecError("lam must be 0 or 1")
    spec = NahmSpec(RationalMatrix([[2]]), B=[lam])
    rhs = [(1, [("P", 1, lam + 1, 5, 0, -1), ("P", 1, 4 - lam, 5, 0, -1)])]
    return IdentityCase("rr", {"lambda": lam}, spec, rhs, Fraction(100))


def _type_d_data(k: int, lam: Fraction, which: int):
    lam = _fr(lam)
    if k < 3:
        raise InvalidSpecError("k must be >= 3")
    if which in (3, 4):
        if lam.denominator != 1 or not 1 <= lam <= k - 1:
            raise InvalidSpecError("for the weighted identities lam must be an integer in 1..k-1")
    B = [Fraction(0)] * k
    if which in (1, 2):
        B[k - 2], B[k - 1] = lam / 2, -lam / 2
    else:
        for i in range(k - int(lam), k - 1):  # 1-based i = k-lam .. k-2
            B[i - 1] = Fraction(i - k) + lam + 1
        B[k - 2] = B[k - 1] = lam / 2
    parity = (k - 1, k, 0 if which in (1, 3) else 1)
    spec = NahmSpec(matrix_2Dinv(k), B=B, parity=parity)
    ck = lam * lam / (4 * k) - Fraction(1, 24)
    if which == 1:
        rhs = [(1, [("theta", k, lam, 0, 1, 0, 0, 0), _invq()])]
        raw = [(1, [("qpow", Fraction(-1, 24)), ("theta", k, lam, lam * lam / (4 * k), 1, 0, 0, 0), _invq()])]
    elif which == 2:
        c = Fraction(k, 4) - lam / 2
        rhs = [(1, [("theta", k, k - lam, c, 1, 0, 0, 0), _invq()])]
        raw = [(1, [("qpow", Fraction(-1, 24)), ("theta", k, k - lam, (k - lam) ** 2 / Fraction(4 * k), 1, 0, 0, 0), _invq()])]
    elif which == 3:
        rhs = [(1, [("theta", k, lam, 0, 1, 2, 0, 0), _invq()])]
        raw = [(1, [("qpow", Fraction(-1, 24)), ("theta", k, lam, lam * lam / (4 * k), 1, 2, 0, 0), _invq()])]
    else:
        c = Fraction(k, 4) - lam / 2
        rhs = [(2, [("theta", k, -(k - lam), c, 0, 1, 0, 0), _invq()])]
        raw = [(2, [("qpow", Fraction(-1, 24)), ("theta", k, -(k - lam), (k - lam) ** 2 / Fraction(4 * k), 0, 1, 0, 0), _invq()])]
    return spec, rhs, raw, ck


def case_type_d(k=3, lam=0, which=1) -> IdentityCase:
    """Eta-cleared type-D identities (the four weighted theta forms)."""
    k, which = int(k), int(which)
    spec, rhs, raw, ck = _type_d_data(k, _fr(lam), which)
    order = Fraction(40 if k <= 4 else 25)
    return IdentityCase(
        "type-d", {"k": k, "lambda": _fr(lam), "which": which}, spec, rhs, order,
        raw_shift=ck, raw_rhs=raw, matrix_src=("inv2D", k),
    )


def case_kkmm(k=4, r=0) -> IdentityCase:
    """The unweighted parity identities (lambda = 0 specialization)."""
    k, r = int(k), int(r) % 2
    c = case_type_d(k, 0, 1 if r == 0 else 2)
    return IdentityCase(
        "kkmm", {"k": k, "r": r}, c.spec, c.rhs, Fraction(40),
        raw_shift=c.raw_shift, raw_rhs=c.raw_rhs, matrix_src=("inv2D", k),
    )


def case_deformed(k=3, a=2, which="full") -> IdentityCase:
    """Bivariate deformation identities on tilde_A(k, a), a > (k-1)/2."""
    k = int(k)
    a = _fr(a)
    if a <= Fraction(k - 1, 2):
        raise InvalidSpecError(f"need a > (k-1)/2 = {Fraction(k - 1, 2)} for positive definiteness")
    w = [0] * k
    w[k - 2], w[k - 1] = 1, -1
    if which == "even":
        spec = NahmSpec(tilde_A(k, a), parity=(k - 1, k, 0), xweight=w)
        rhs = [(1, [("P", -1, 2 * a, 4 * a, 2, 1), ("P", -1, 2 * a, 4 * a, -2, 1), ("P", 1, 4 * a, 4 * a, 0, 1), _invq()])]
    elif which == "odd":
        spec = NahmSpec(tilde_A(k, a), parity=(k - 1, k, 1), xweight=w)
        rhs = [(1, [("qpow", a / 2), ("xpow", 1), ("P", -1, 4 * a, 4 * a, 2, 1), ("P", -1, 0, 4 * a, -2, 1), ("P", 1, 4 * a, 4 * a, 0, 1), _invq()])]
    elif which == "full":
        spec = NahmSpec(tilde_A(k, a), xweight=w)
        rhs = [(1, [("P", -1, a / 2, a, 1, 1), ("P", -1, a / 2, a, -1, 1), ("P", 1, a, a, 0, 1), _invq()])]
    else:
        raise InvalidSpecError("which must be even, odd or full")
    order = Fraction(30 if k <= 4 else 20)
    return IdentityCase(
        "deformed", {"k": k, "a": a, "which": which}, spec, rhs, order,
        matrix_src=("tildeA", k, a),
    )


def case_x_slice(k=3, a=2, N=1) -> IdentityCase:
    """x^N slice of the bivariate identity: q^(a N^2 / 2)/(q;q)_inf."""
    k, N = int(k), int(N)
    a = _fr(a)
    if a <= Fraction(k - 1, 2):
        raise InvalidSpecError(
            "the stated bound a > 0 is not enumerable; need a > (k-1)/2 for a positive definite matrix"
        )
    w = [0] * k
    w[k - 2], w[k - 1] = 1, -1
    spec = NahmSpec(tilde_A(k, a), xweight=w)
    rhs = [(1, [("qpow", a * N * N / 2), _invq()])]
    return IdentityCase(
        "xslice", {"k": k, "a": a, "N": N}, spec, rhs, Fraction(25),
        xslice=N, matrix_src=("tildeA", k, a),
    )


def case_ag(k=2, s=1) -> IdentityCase:
    """Odd-moduli multisum identities on the doubled min(i,j) matrix."""
    k, s = int(k), int(s)
    if not (k >= 1 and 1 <= s <= k + 1):
        raise InvalidSpecError("need k >= 1 and 1 <= s <= k+1")
    B = [max(0, j - s + 1) for j in range(1, k + 1)]
    spec = NahmSpec(matrix_G(k) * 2, B=B)
    m = 2 * k + 3
    rhs = [(1, [("P", 1, s, m, 0, 1), ("P", 1, m - s, m, 0, 1), ("P", 1, m, m, 0, 1), _invq()])]
    return IdentityCase("ag", {"k": k, "s": s}, spec, rhs, Fraction(60), matrix_src=("G", k, Fraction(2)))


def case_stembridge(k=2) -> IdentityCase:
    """Half-squares multisum on min(i,j) (exponent grid (1/2)Z)."""
    k = int(k)
    if k < 1:
        raise InvalidSpecError("k must be >= 1")
    spec = NahmSpec(matrix_G(k))
    rhs = [(1, [
        ("P", -1, Fraction(1, 2), 1, 0, 1),
        ("P", 1, Fraction(k + 1, 2), k + 2, 0, 1),
        ("P", 1, Fraction(k + 3, 2), k + 2, 0, 1),
        ("P", 1, k + 2, k + 2, 0, 1),
        _invq(),
    ])]
    return IdentityCase("stembridge", {"k": k}, spec, rhs, Fraction(30), matrix_src=("G", k))


def case_zagier_rank2(a=2, lam=1) -> IdentityCase:
    """The rank-two specialization x = q^(lam/2)."""
    a, lam = _fr(a), _fr(lam)
    if a <= Fraction(1, 2):
        raise InvalidSpecError("need a > 1/2")
    spec = NahmSpec(tilde_A(2, a), B=[lam / 2, -lam / 2])
    rhs = [(1, [("theta", a / 2, lam / 2, 0, 1, 0, 0, 0), _invq()])]
    return IdentityCase(
        "zagier-rank2", {"a": a, "lambda": lam}, spec, rhs, Fraction(30),
        matrix_src=("tildeA", 2, a),
    )


def case_rank3_bivariate() -> IdentityCase:
    """The rank-three bivariate identity in its printed shape (k=3, a=2)."""
    spec = NahmSpec(tilde_A(3, 2), xweight=[0, 1, -1])
    rhs = [(1, [("P", -1, 1, 2, 1, 1), ("P", -1, 1, 2, -1, 1), ("P", 1, 2, 2, 0, 1), _invq()])]
    return IdentityCase("rank3-bivariate", {}, spec, rhs, Fraction(30), matrix_src=("tildeA", 3, 2))


def _andrews_rhs(k: int, i: int, order) -> list:
    terms = []
    j = 0
    while True:
        e_j = Fraction(j * (j - 1), 2) + k * j * j + (k - i + 1) * j
        if e_j >= order:
            break
        sign = 1 if j % 2 == 0 else -1
        common = [
            ("PF", 1, 1, 1, 1, j, 1),       # (xq;q)_j
            ("PF", 1, 1, 1, 0, j, -1),      # 1/(q;q)_j
            ("P", 1, 1, 1, 1, -1),          # 1/(xq;q)_inf
        ]
        terms.append((sign, [("xpow", k * j), ("qpow", e_j)] + common))
        terms.append((-sign, [("xpow", k * j + i), ("qpow", e_j + i * (2 * j + 1))] + common))
        j += 1
    return terms


def case_andrews(k=3, i=1, order=Fraction(30)) -> IdentityCase:
    """The multisum transformation with x kept formal (classical reading)."""
    k, i = int(k), int(i)
    if not (k >= 2 and 1 <= i <= k):
        raise InvalidSpecError("need k >= 2 and 1 <= i <= k")
    B = [max(0, j - i + 1) for j in range(1, k)]
    w = list(range(1, k))
    spec = NahmSpec(matrix_G(k - 1) * 2, B=B, xweight=w)
    rhs = _andrews_rhs(k, i, _fr(order))
    return IdentityCase("andrews", {"k": k, "i": i}, spec, rhs, _fr(order), matrix_src=("G", k - 1, Fraction(2)))


def andrews_literal_lhs(k: int, i: int, trunc) -> XSeries:
    """The literal-exponent reading (squares only up to index k-i).

    The quadratic form is singular for i >= 2, so this is enumerated over the
    simplex N_1 <= floor(sqrt(trunc)) instead of the definite-form engine.
    Raises for i = k, where no quadratic term is left and the sum diverges.
    """
    import itertools

    trunc = _fr(trunc)
    if i >= k:
        raise InvalidSpecError("literal reading has no quadratic part at i = k; the sum diverges")
    cache = PochhammerCache(trunc)
    bound = floor_sqrt(trunc)
    slots = {}
    for n in itertools.product(range(bound + 1), repeat=k - 1):
        if sum(n) > bound:
            continue
        N = [sum(n[j:]) for j in range(k - 1)]
        expo = sum(v * v for v in N[: k - i]) + sum(N[i - 1:])
        if expo >= trunc:
            continue
        term = QSeries.one(trunc - expo)
        for nj in n:
            term = term.mul(cache.inv(nj), cap=trunc - expo)
        xd = sum(N)
        cur = slots.get(xd)
        s = term.shift(expo)
        slots[xd] = s if cur is None else cur + s
    return XSeries(slots, trunc)


def verify_andrews_multisum(k: int, i: int, trunc=Fraction(30)) -> VerifyReport:
    """Verify the classical reading; report the literal reading's outcome too."""
    trunc = _fr(trunc)
    case = case_andrews(k, i, trunc)
    report = run_case(case, trunc)
    try:
        lit = andrews_literal_lhs(k, i, trunc)
        rhs = eval_rhs(case.rhs, trunc)
        report.extra["literal_reading"] = compare(lit, rhs).status
    except InvalidSpecError as exc:
        report.extra["literal_reading"] = f"error: {exc}"
    report.name = "andrews"
    return report


_SUBSTITUTED = {
    "halfD3": dict(
        matrix=lambda: matrix_D(3) * Fraction(1, 2),
        src=("D", 3, Fraction(1, 2)),
        base_power=2,
        const=Fraction(-1, 12),
        rhs=[
            (1, [("J", 0, 2, 3), ("J", 0, 6, 5), ("J", 0, 1, -2), ("J", 0, 3, -2), ("J", 0, 4, -2), ("J", 0, 12, -2)]),
            (4, [("qpow", 1), ("J", 0, 4, 2), ("J", 0, 12, 2), ("J", 0, 2, -3), ("J", 0, 6, -1)]),
        ],
    ),
    "halfD4": dict(
        matrix=lambda: matrix_D(4) * Fraction(1, 2),
        src=("D", 4, Fraction(1, 2)),
        base_power=2,
        const=Fraction(-1, 8),
        rhs=[
            (1, [("J", 0, 2, 5), ("J", 0, 4, 1), ("J", 0, 1, -4), ("J", 0, 8, -2)]),
            (8, [("qpow", 1), ("J", 0, 4, 3), ("J", 0, 8, 2), ("J", 0, 2, -5)]),
        ],
    ),
    "D3": dict(
        matrix=lambda: matrix_D(3),
        src=("D", 3, Fraction(1)),
        base_power=2,
        const=Fraction(-1, 14),
        rhs=[
            (Fraction(1, 2), [("J", 0, 2, 11), ("J", 1, 14, 1), ("J", 12, 28, 1), ("J", 0, 1, -6), ("J", 0, 4, -6), ("J", 0, 28, -1)]),
            (Fraction(1, 2), [("J", 0, 1, 5), ("J", 0, 7, 1), ("J", 3, 14, 1), ("J", 5, 14, 1), ("J", 0, 2, -5), ("J", 4, 14, -1), ("J", 6, 14, -1), ("J", 0, 14, -1)]),
            (-4, [("qpow", 2), ("J", 0, 4, 6), ("J", 0, 28, 3), ("J", 0, 2, -6), ("J", 4, 28, -1), ("J", 10, 28, -1), ("J", 12, 28, -1)]),
        ],
    ),
    "D3inv": dict(
        matrix=lambda: matrix_2Dinv(3) * Fraction(1, 2),
        src=("inv2D", 3, Fraction(1, 2)),
        base_power=8,
        const=Fraction(-3, 56),
        rhs=[
            (1, [("J", 0, 8, 1), ("J", 0, 56, 2), ("J", 0, 112, 1), ("J", 24, 112, 1), ("J", 40, 112, 1),
                 ("J", 0, 4, -1), ("J", 12, 112, -1), ("J", 28, 112, -1), ("J", 32, 112, -1), ("J", 44, 112, -1), ("J", 48, 112, -1)]),
            (2, [("qpow", 3), ("J", 0, 16, 1), ("J", 32, 112, 1), ("J", 0, 8, -2)]),
        ],
    ),
}


def case_substituted(which="halfD3") -> IdentityCase:
    """Dual-family identities in a substituted variable, prefactor cleared.

    The report carries both definiteness certificates: the LDL^T pivots of
    the left-side matrix and of its inverse (the dual partner).
    """
    if which not in _SUBSTITUTED:
        raise InvalidSpecError(f"which must be one of {sorted(_SUBSTITUTED)}")
    data = _SUBSTITUTED[which]
    A = data["matrix"]()
    spec = NahmSpec(A, base_power=data["base_power"])
    m = data["base_power"]
    raw_rhs = [(c, [("qpow", _fr(data["const"]) * m)] + list(fs)) for c, fs in data["rhs"]]
    extra = {
        "pivots": [str(p) for p in A.pivots()],
        "dual_pivots": [str(p) for p in A.inverse().pivots()],
    }
    return IdentityCase(
        "subst-" + which, {"which": which}, spec, data["rhs"], Fraction(40),
        raw_shift=_fr(data["const"]) * m, raw_rhs=raw_rhs,
        matrix_src=data["src"], extra=extra,
    )


def case_jtp(shift=0) -> IdentityCase:
    """The bivariate triple-product identity (tree vs tree)."""
    shift = int(shift)
    lhs = [(1, [("theta", 1, shift, 0, 1, 0, 1, 0)])]
    rhs = [(1, [("P", -1, 1 + shift, 2, 1, 1), ("P", -1, 1 - shift, 2, -1, 1), ("P", 1, 2, 2, 0, 1)])]
    return IdentityCase("jtp", {"shift": shift}, None, rhs, Fraction(60), lhs_tree=lhs)


# ---------------------------------------------------------------------------
# spec-level verify entry points
# ---------------------------------------------------------------------------


def verify_type_d(k, lam, which, trunc=None, raw=False) -> VerifyReport:
    return run_case(case_type_d(k, lam, which), trunc, raw=raw)


def verify_deformed(k, a, which, trunc=None) -> VerifyReport:
    return run_case(case_deformed(k, a, which), trunc)


def verify_x_slice(k, a, N, trunc=None) -> VerifyReport:
    return run_case(case_x_slice(k, a, N), trunc)


def verify_AG(k, s, trunc=None) -> VerifyReport:
    return run_case(case_ag(k, s), trunc)


def verify_stembridge(k, trunc=None) -> VerifyReport:
    return run_case(case_stembridge(k), trunc)


def verify_substituted(which, trunc=None, raw=False) -> VerifyReport:
    return run_case(case_substituted(which), trunc, raw=raw)


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------


@dataclass
class CatalogEntry:
    name: str
    build: object  # callable(**params) -> IdentityCase, or None for checks
    defaults: dict
    description: str
    check: object = None  # callable(order, **params) -> VerifyReport


def _check_jtp(order, shift=0):
    t0 = time.perf_counter()
    res = verify_jtp(int(shift), trunc=_fr(order))
    return VerifyReport("jtp", {"shift": int(shift)}, _fr(order), res.status,
                        res.mismatch, time.perf_counter() - t0)


def _check_durfee(order, N=0):
    t0 = time.perf_counter()
    res = verify_durfee(int(N), _fr(order))
    return VerifyReport("durfee", {"N": int(N)}, _fr(order), res.status,
                        res.mismatch, time.perf_counter() - t0)


def _check_lift(order, imax=4, jmax=4):
    t0 = time.perf_counter()
    res = verify_lift_identity(int(imax), int(jmax), _fr(order))
    return VerifyReport("lift", {"imax": int(imax), "jmax": int(jmax)}, _fr(order),
                        res.status, res.mismatch, time.perf_counter() - t0)


def _check_fkrec(order, k=2, a=2):
    t0 = time.perf_counter()
    try:
        res = verify_fk_recursion(int(k), _fr(a), _fr(order))
        return VerifyReport("fkrec", {"k": int(k), "a": _fr(a)}, _fr(order),
                            res.status, res.mismatch, time.perf_counter() - t0)
    except QnahmError as exc:
        return VerifyReport("fkrec", {"k": int(k), "a": _fr(a)}, _fr(order), "error",
                            None, time.perf_counter() - t0,
                            {"error": str(exc), "error_kind": type(exc).__name__})


def _check_andrews(order, k=3, i=1):
    return verify_andrews_multisum(int(k), int(i), _fr(order))


CATALOG = {
    "rr": CatalogEntry("rr", case_rr, {"lam": 0}, "Rogers-Ramanujan sums (lambda 0/1)"),
    "ag": CatalogEntry("ag", case_ag, {"k": 2, "s": 1}, "odd-moduli multisum family"),
    "stembridge": CatalogEntry("stembridge", case_stembridge, {"k": 2}, "half-square multisum family"),
    "kkmm": CatalogEntry("kkmm", case_kkmm, {"k": 4, "r": 0}, "unweighted type-D parity identities"),
    "type-d": CatalogEntry("type-d", case_type_d, {"k": 3, "lam": 1, "which": 1}, "type-D weighted theta identities"),
    "deformed": CatalogEntry("deformed", case_deformed, {"k": 3, "a": Fraction(2), "which": "full"}, "bivariate deformation identities"),
    "xslice": CatalogEntry("xslice", case_x_slice, {"k": 3, "a": Fraction(2), "N": 1}, "x^N slice of the bivariate family"),
    "zagier-rank2": CatalogEntry("zagier-rank2", case_zagier_rank2, {"a": Fraction(2), "lam": 1}, "rank-two specialization"),
    "rank3-bivariate": CatalogEntry("rank3-bivariate", case_rank3_bivariate, {}, "rank-three bivariate identity"),
    "andrews": CatalogEntry("andrews", None, {"k": 3, "i": 1}, "formal-x multisum transform (both exponent readings)", check=_check_andrews),
    "subst-halfD3": CatalogEntry("subst-halfD3", lambda: case_substituted("halfD3"), {}, "half Cartan matrix, rank 3, in q^2"),
    "subst-halfD4": CatalogEntry("subst-halfD4", lambda: case_substituted("halfD4"), {}, "half Cartan matrix, rank 4, in q^2"),
    "subst-D3": CatalogEntry("subst-D3", lambda: case_substituted("D3"), {}, "full Cartan matrix, rank 3, in q^2"),
    "subst-D3inv": CatalogEntry("subst-D3inv", lambda: case_substituted("D3inv"), {}, "inverse Cartan matrix, rank 3, in q^8"),
    "jtp": CatalogEntry("jtp", case_jtp, {"shift": 0}, "bivariate triple product"),
    "durfee": CatalogEntry("durfee", None, {"N": 0}, "rectangle identity, fixed difference N", check=_check_durfee),
    "lift": CatalogEntry("lift", None, {"imax": 4, "jmax": 4}, "index-lifting identity grid", check=_check_lift),
    "fkrec": CatalogEntry("fkrec", None, {"k": 2, "a": Fraction(2)}, "rank-raising recursion", check=_check_fkrec),
}

_DEFAULT_CHECK_ORDERS = {"jtp": Fraction(60), "durfee": Fraction(30), "lift": Fraction(30), "fkrec": Fraction(10)}


def run_catalog_case(name, params=None, order=None, raw=False) -> VerifyReport:
    """Run one catalog entry by name (unknown names yield an error report)."""
    t0 = time.perf_counter()
    entry = CATALOG.get(name)
    if entry is None:
        return VerifyReport(name, dict(params or {}), _fr(order or 0), "error", None,
                            time.perf_counter() - t0,
                            {"error": f"unknown catalog entry {name!r}", "error_kind": "UnknownCase"})
    merged = dict(entry.defaults)
    unknown = [k for k in (params or {}) if k not in entry.defaults]
    if unknown:
        return VerifyReport(name, dict(params or {}), _fr(order or 0), "error", None,
                            time.perf_counter() - t0,
                            {"error": f"entry {name!r} does not take parameter(s) {unknown}",
                             "error_kind": "UnknownCase"})
    merged.update(params or {})
    try:
        if entry.check is not None:
            o = order if order is not None else _DEFAULT_CHECK_ORDERS.get(name, Fraction(30))
            return entry.check(o, **merged)
        case = entry.build(**merged)
        return run_case(case, order, raw=raw)
    except QnahmError as exc:
        return VerifyReport(name, merged, _fr(order or 0), "error", None,
                            time.perf_counter() - t0,
                            {"error": str(exc), "error_kind": type(exc).__name__})


def verify_batch(names=None, orders=None, raw=False, jobs=1) -> list:
    """Run catalog entries (all by default); never aborts on a mismatch."""
    if names is None:
        names = list(CATALOG)
    orders = orders or {}
    args = [(n, None, orders.get(n), raw) for n in names]
    if jobs > 1 and len(args) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_star, args))
    return [_run_star(a) for a in args]


def _run_star(args):
    return run_catalog_case(*args)
