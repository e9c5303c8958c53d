"""Core series engine tests.

Expected values marked as derived are computed by the brute-force oracles in
oracles.py (partition counts, direct product expansion, direct bilateral
enumeration) and frozen here.
"""

import random
from fractions import Fraction as F

import pytest

from qnahm.errors import DivergenceError, NotInvertibleError, ScaleError
from qnahm.qseries import (
    FactorSpec,
    PochhammerCache,
    QSeries,
    XSeries,
    compare,
    eta_quotient,
    euler_factor,
    first_mismatch,
    geometric_inverse,
    inv_euler,
    pochhammer_finite,
    pochhammer_infinite,
    qs_pow,
    serialize_series,
    theta_sum,
    verify_jtp,
)

from oracles import (
    brute_partitions_with_parts,
    poly_mul,
    poly_from_factor,
    xpoly_mul,
    xpoly_from_factor,
)


def qs(pairs, trunc):
    return QSeries.from_terms(pairs, trunc)


# ---------------------------------------------------------------------------
# rescaling and equality
# ---------------------------------------------------------------------------


def test_rescale_identity_grid():
    s = qs([(0, 1), (1, 1)], 2)
    r = s.rescale(2)
    assert r.scale == 2
    assert sorted(r.coeffs) == [0, 2]
    assert r == s


def test_rescale_refines_grid():
    s = qs([(0, 1), (F(1, 2), 1)], 2)
    r = s.rescale(6)
    assert sorted(r.coeffs) == [0, 3]


def test_rescale_requires_multiple():
    s = qs([(F(1, 2), 1)], 2)
    with pytest.raises(ScaleError):
        s.rescale(3)


def test_equality_invariant_under_rescale():
    s = qs([(1, 1)], 5)
    assert s.rescale(3) == s
    assert s == s.rescale(3)


def test_equality_uses_smaller_trunc():
    a = qs([(0, 1), (1, 2)], 10)
    b = qs([(0, 1), (1, 2), (5, 9)], 6)
    # they agree below 6; the q^5 term of b is invisible to a? no: 5 < 6
    assert a != b
    assert a.truncated(5) == b


# ---------------------------------------------------------------------------
# ring operations
# ---------------------------------------------------------------------------


def test_add_mul_basics():
    one_minus_q = qs([(0, 1), (1, -1)], 10)
    q = qs([(1, 1)], 10)
    assert one_minus_q + q == QSeries.one(10)
    one_plus_q = qs([(0, 1), (1, 1)], 10)
    assert one_minus_q * one_plus_q == qs([(0, 1), (2, -1)], 10)


def test_shift_monomial():
    s = qs([(0, 1), (1, 1)], 2)
    t = s.shift(F(1, 24))
    assert t.scale == 24
    assert t.terms() == [(F(1, 24), F(1)), (F(25, 24), F(1))]
    assert t.trunc == 2 + F(1, 24)


def test_scalar_multiplication():
    s = qs([(0, 3), (2, -6)], 9)
    assert s * F(1, 3) == qs([(0, 1), (2, -2)], 9)
    assert F(1, 3) * s == s * F(1, 3)
    assert (s * 0).is_zero()


def test_ring_laws_random():
    rng = random.Random(20250809)

    def rand_series():
        terms = [(rng.randrange(0, 20), F(rng.randrange(-4, 5), rng.randrange(1, 4)))
                 for _ in range(rng.randrange(1, 7))]
        return QSeries.from_terms(terms, 20)

    for _ in range(25):
        a, b, c = rand_series(), rand_series(), rand_series()
        assert (a + b) + c == a + (b + c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c


def test_mul_truncation_uses_valuation():
    # a known below 5, b = q^3 * unit: product proven below 8
    a = qs([(0, 1), (1, 1)], 5)
    b = qs([(3, 1)], 9)
    assert (a * b).trunc == 8


# ---------------------------------------------------------------------------
# inversion
# ---------------------------------------------------------------------------


def test_inverse_geometric():
    s = qs([(0, 1), (1, -1)], 5)
    assert s.inverse() == qs([(0, 1), (1, 1), (2, 1), (3, 1), (4, 1)], 5)


def test_inverse_partition_series_against_oracle():
    trunc = 30
    inv = euler_factor(trunc).inverse()
    # oracle: partitions with all parts allowed
    expected = brute_partitions_with_parts(range(1, trunc), trunc)
    assert inv == QSeries.from_terms(list(expected.items()), trunc)
    # frozen prefix
    assert [int(inv.coeff(n)) for n in range(8)] == [1, 1, 2, 3, 5, 7, 11, 15]


def test_inverse_with_monomial_prefactor():
    s = qs([(1, 1), (2, -1)], 6)  # q(1-q), known below q^6
    inv = s.inverse()
    assert inv.trunc == 4
    assert inv.terms() == [(F(-1), F(1)), (F(0), F(1)), (F(1), F(1)), (F(2), F(1)), (F(3), F(1))]


def test_inverse_random_roundtrip():
    rng = random.Random(99)
    for _ in range(50):
        lead_exp = rng.randrange(-2, 3)
        terms = [(lead_exp, rng.choice([1, -1, 2, F(1, 2)]))]
        terms += [(lead_exp + rng.randrange(1, 8), F(rng.randrange(-3, 4), rng.randrange(1, 3)))
                  for _ in range(rng.randrange(0, 5))]
        s = QSeries.from_terms(terms, 20 + lead_exp)
        if s.is_zero():
            continue
        prod = s * s.inverse()
        assert prod == QSeries.one(prod.trunc)


def test_inverse_of_zero_rejected():
    with pytest.raises(NotInvertibleError):
        QSeries.zero(5).inverse()


# ---------------------------------------------------------------------------
# substitution
# ---------------------------------------------------------------------------


def test_substitute_power():
    s = qs([(0, 1), (1, 1)], 3)
    assert s.substitute_power(2) == qs([(0, 1), (2, 1)], 6)
    t = qs([(F(1, 2), 1)], 2).substitute_power(2)
    assert t.terms() == [(F(1), F(1))]
    assert t.scale == 1


def test_substitute_power_support():
    p = inv_euler(5).substitute_power(8)
    assert all(e.denominator == 1 and e % 8 == 0 for e, _ in p.terms())
    assert p.trunc == 40


# ---------------------------------------------------------------------------
# Pochhammer products
# ---------------------------------------------------------------------------


def test_pochhammer_finite_small():
    f = FactorSpec(1, 1, 1)
    assert pochhammer_finite(f, 0, 10).q() == QSeries.one(10)
    assert pochhammer_finite(f, 1, 10).q() == qs([(0, 1), (1, -1)], 10)


def test_pochhammer_finite_three_factors_oracle():
    # (q;q)_3 against direct 3-factor multiplication
    got = pochhammer_finite(FactorSpec(1, 1, 1), 3, 10).q()
    oracle = {0: 1}
    for k in (1, 2, 3):
        oracle = poly_mul(oracle, poly_from_factor(k), 10)
    assert got == QSeries.from_terms(oracle.items(), 10)


def test_pochhammer_finite_with_x():
    got = pochhammer_finite(FactorSpec(1, 1, 1, x_deg=1), 2, 4)
    assert got.slot(0) == QSeries.one(4)
    assert got.slot(1) == qs([(1, -1), (2, -1)], 4)
    assert got.slot(2) == qs([(3, 1)], 4)


def test_pochhammer_recursion_property():
    f = FactorSpec(1, F(1, 2), F(3, 2), x_deg=1)
    for n in range(4):
        whole = pochhammer_finite(f, n + 1, 12)
        step = pochhammer_finite(f, n, 12) * pochhammer_finite(
            FactorSpec(1, f.q_exp + n * f.modulus, f.modulus, 1), 1, 12
        )
        assert whole == step


def test_pochhammer_infinite_euler():
    # pentagonal-number pattern
    e = pochhammer_infinite(FactorSpec(1, 1, 1), 8).q()
    assert e == qs([(0, 1), (1, -1), (2, -1), (5, 1), (7, 1)], 8)


def test_pochhammer_infinite_sparse_modulus():
    got = pochhammer_infinite(FactorSpec(-1, 2, 4), 6).q()
    assert got == qs([(0, 1), (2, 1)], 6)


def test_pochhammer_infinite_with_x_oracle():
    got = pochhammer_infinite(FactorSpec(1, 1, 1, x_deg=1), 4)
    oracle = {(0, 0): 1}
    for k in (1, 2, 3):
        oracle = xpoly_mul(oracle, xpoly_from_factor(1, k, -1), 4)
    expect = {}
    for (d, e), c in oracle.items():
        expect.setdefault(d, []).append((e, c))
    want = XSeries({d: QSeries.from_terms(t, 4) for d, t in expect.items()}, 4)
    assert got == want


def test_pochhammer_infinite_agrees_with_long_finite():
    f = FactorSpec(1, 1, 1)
    inf = pochhammer_infinite(f, 12)
    fin = pochhammer_finite(f, 30, 12)  # factors beyond q^12 are 1 mod trunc
    assert inf == fin


def test_pochhammer_divergence():
    with pytest.raises(DivergenceError):
        pochhammer_infinite(FactorSpec(1, 0, 1), 5)
    with pytest.raises(ValueError):
        FactorSpec(1, 1, 0)


# ---------------------------------------------------------------------------
# theta sums
# ---------------------------------------------------------------------------


def test_theta_square_numbers():
    t = theta_sum(1, trunc=10).q()
    assert t == qs([(0, 1), (1, 2), (4, 2), (9, 2)], 10)


def test_theta_weighted_oracle():
    # direct enumeration of n = -2..2
    t = theta_sum(2, 1, 0, 1, 2, trunc=11).q()
    assert t == qs([(0, 1), (1, -1), (3, 3), (6, -3), (10, 5)], 11)


def test_theta_with_x_weights():
    t = theta_sum(2, 0, 0, xlin=2, trunc=9)
    assert t.slot(0) == QSeries.one(9)
    assert t.slot(2) == qs([(2, 1)], 9)
    assert t.slot(-2) == qs([(2, 1)], 9)
    assert t.slot(4) == qs([(8, 1)], 9)
    assert t.slot(-4) == qs([(8, 1)], 9)
    assert t.x_degrees() == [-4, -2, 0, 2, 4]


def test_theta_weight_linearity():
    quad, lin = F(3, 2), F(1, 3)
    w21 = theta_sum(quad, lin, 0, 1, 2, trunc=25)
    base = theta_sum(quad, lin, 0, 1, 0, trunc=25)
    slope = theta_sum(quad, lin, 0, 0, 1, trunc=25)
    assert w21 == base + 2 * slope


def test_theta_requires_positive_quadratic():
    with pytest.raises(DivergenceError):
        theta_sum(0, 1, trunc=5)


# ---------------------------------------------------------------------------
# Jacobi triple product
# ---------------------------------------------------------------------------


def test_jtp_x1_coefficient():
    lhs = theta_sum(1, xlin=1, trunc=9)
    assert lhs.slot(1) == qs([(1, 1)], 9)


def test_jtp_match_and_fold():
    res = verify_jtp(trunc=30)
    assert res.ok
    folded = theta_sum(1, xlin=1, trunc=10).fold_x1()
    assert folded == qs([(0, 1), (1, 2), (4, 2), (9, 2)], 10)


@pytest.mark.parametrize("shift", [-2, -1, 0, 1, 2, 3])
def test_jtp_shifts(shift):
    assert verify_jtp(shift, trunc=40).ok


def test_jtp_negative_control():
    lhs = theta_sum(1, xlin=1, trunc=9)
    bad = lhs + XSeries.unit_x(1, 9).shift(2)
    mm = first_mismatch(lhs, bad)
    assert mm is not None and mm.x_degree == 1 and mm.exponent == 2


# ---------------------------------------------------------------------------
# eta quotients
# ---------------------------------------------------------------------------


def test_eta_quotient_partition_series():
    got = eta_quotient([(0, 1, -1)], 5)
    assert got == qs([(0, 1), (1, 1), (2, 2), (3, 3), (4, 5)], 5)


def test_eta_quotient_j15_inverse_oracle():
    # 1/J_{1,5}: partitions into parts = 0, 1, 4 mod 5
    trunc = 12
    parts = [p for p in range(1, trunc) if p % 5 in (0, 1, 4)]
    expected = brute_partitions_with_parts(parts, trunc)
    got = eta_quotient([(1, 5, -1)], trunc)
    assert got == QSeries.from_terms(expected.items(), trunc)
    assert [int(got.coeff(n)) for n in range(7)] == [1, 1, 1, 1, 2, 3, 4]


def test_eta_quotient_cancellation():
    prod = eta_quotient([(0, 2, 1), (0, 2, -1)], 20)
    assert prod == QSeries.one(20)


def test_eta_quotient_powers_match_repeated_multiplication():
    a = eta_quotient([(0, 2, 3)], 15)
    j2 = eta_quotient([(0, 2, 1)], 15)
    assert a == j2 * j2 * j2


# ---------------------------------------------------------------------------
# XSeries behaviour
# ---------------------------------------------------------------------------


def test_xseries_mul_tracks_degrees():
    a = XSeries({1: QSeries.one(6)})
    b = XSeries({-2: qs([(1, 1)], 6)})
    p = a * b
    assert p.x_degrees() == [-1]
    assert p.slot(-1) == qs([(1, 1)], 6)


def test_xseries_inverse_euler_x():
    # 1/(xq;q)_inf should satisfy p * (xq;q)_inf = 1
    f = pochhammer_infinite(FactorSpec(1, 1, 1, x_deg=1), 12)
    inv = f.inverse()
    assert f * inv == XSeries({0: QSeries.one(12)})
    # classical expansion: x^m slice is q^m/(q;q)_m
    cache = PochhammerCache(12)
    for m in range(6):
        assert inv.slot(m) == cache.inv(m).shift(m)


def test_xseries_inverse_negative_side():
    f = pochhammer_infinite(FactorSpec(1, 1, 1, x_deg=-1), 12)
    inv = f.inverse()
    assert all(d <= 0 for d in inv.x_degrees())
    assert f * inv == XSeries({0: QSeries.one(12)})


def test_xseries_inverse_rejects_mixed_sides():
    f = XSeries({0: QSeries.one(8), 1: qs([(1, 1)], 8), -1: qs([(1, 1)], 8)})
    with pytest.raises(NotInvertibleError):
        f.inverse()


def test_xseries_laurent_in_q():
    s = XSeries({-2: qs([(F(-3, 2), 1)], 5)})
    t = s.shift(F(3, 2))
    assert t.slot(-2).terms() == [(F(0), F(1))]


def test_geometric_inverse():
    g = geometric_inverse(F(3, 2), 7)
    assert g.terms() == [(F(0), F(1)), (F(3, 2), F(1)), (F(3), F(1)), (F(9, 2), F(1)), (F(6), F(1))]


def test_qs_pow():
    s = qs([(0, 1), (1, 1)], 8)
    assert qs_pow(s, 0) == QSeries.one(8)
    assert qs_pow(s, 3) == s * s * s


def test_pochhammer_cache_matches_direct():
    cache = PochhammerCache(15)
    f = FactorSpec(1, 1, 1)
    for n in range(6):
        assert cache.inv(n) == pochhammer_finite(f, n, 15).q().inverse()


def test_serialization_order():
    s = XSeries({0: qs([(0, 1)], 4), 2: qs([(F(1, 2), F(3, 4))], 4)})
    recs = serialize_series(s)
    assert recs == [(0, 0, 1, 1, 1), (2, 1, 2, 3, 4)]


def test_compare_reports_lowest_exponent_first():
    a = XSeries({0: qs([(0, 1), (3, 1)], 9), 1: qs([(2, 5)], 9)})
    b = XSeries({0: qs([(0, 1), (3, 2)], 9), 1: qs([(2, 4)], 9)})
    mm = first_mismatch(a, b)
    assert (mm.x_degree, mm.exponent, mm.lhs, mm.rhs) == (1, 2, 5, 4)
    assert compare(a, a).ok
