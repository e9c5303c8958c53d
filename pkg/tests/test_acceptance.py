"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one pass/fail line; run with `pytest tests/test_acceptance.py -v -s`.
Tolerances (truncation orders, parameter grids, runtime ceilings) are pinned
here and nowhere else.
"""

import json
import random
import time
from fractions import Fraction as F

from qnahm.bailey import (
    beta_from_alpha,
    lift_param,
    limit_identity,
    reduce_param,
    replay_type_d_chain,
    s1_transform,
    unit_pair,
    verify_bailey,
)
from qnahm.cartan import RationalMatrix, matrix_2Dinv, matrix_D, matrix_G, matrix_T, tilde_A
from qnahm.cli import main
from qnahm.identities import (
    case_deformed,
    case_rank3_bivariate,
    run_catalog_case,
    verify_AG,
    verify_andrews_multisum,
    verify_x_slice,
    verify_substituted,
    verify_type_d,
    verify_deformed,
)
from qnahm.nahm import verify_durfee, verify_fk_recursion, verify_lift_identity
from qnahm.qseries import QSeries, XSeries, inv_euler, theta_sum, verify_jtp


def _pass(n, text):
    print(f"ACCEPTANCE {n:>2} PASS: {text}")


# ---------------------------------------------------------------------------


def test_criterion_01_rogers_ramanujan_q100():
    for lam in (0, 1):
        t0 = time.perf_counter()
        rep = run_catalog_case("rr", {"lam": lam}, order=F(100))
        dt = time.perf_counter() - t0
        assert rep.ok, rep.line()
        assert dt < 5.0, f"lambda={lam} took {dt:.1f}s (budget 5s)"
    _pass(1, "both Rogers-Ramanujan identities exact to q^100, < 5s each")


def test_criterion_02_andrews_gordon_q60():
    for k in range(1, 5):
        for s in range(1, k + 2):
            t0 = time.perf_counter()
            rep = verify_AG(k, s, F(60))
            dt = time.perf_counter() - t0
            assert rep.ok, rep.line()
            assert dt < 30.0, f"(k={k}, s={s}) took {dt:.1f}s (budget 30s)"
    _pass(2, "odd-moduli family exact to q^60 for all k <= 4, 1 <= s <= k+1")


def test_criterion_03_type_d_grid():
    for k in (3, 4, 5):
        order = F(40) if k <= 4 else F(25)
        for lam in (0, 1, k, k + 1, F(1, 3)):
            for which in (1, 2):
                t0 = time.perf_counter()
                rep = verify_type_d(k, lam, which, order)
                dt = time.perf_counter() - t0
                assert rep.ok, rep.line()
                assert dt < 60.0, rep.line()
        for lam in range(1, k):
            for which in (3, 4):
                t0 = time.perf_counter()
                rep = verify_type_d(k, lam, which, order)
                dt = time.perf_counter() - t0
                assert rep.ok, rep.line()
                assert dt < 60.0, rep.line()
    _pass(3, "all four eta-cleared identities exact to q^40 (k<=4) / q^25 (k=5)")


def test_criterion_04_deformed_bivariate():
    for k in (2, 3, 4, 5):
        order = F(30) if k <= 4 else F(20)
        for a in (F(k, 2), F(k - 1, 2) + F(1, 4), F(k)):
            for which in ("even", "odd", "full"):
                rep = verify_deformed(k, a, which, order)
                assert rep.ok, rep.line()
    # the k=2 and k=3 instances reproduce the published rank-2/rank-3 shapes
    for a in (F(1), F(3, 4), F(2)):
        for lam in (0, 1, 2):
            rep = run_catalog_case("zagier-rank2", {"a": a, "lam": lam}, order=F(30))
            assert rep.ok, rep.line()
    printed = case_rank3_bivariate()
    assert printed.rhs == case_deformed(3, 2, "full").rhs, "rank-3 shape differs from the general tree"
    rep = run_catalog_case("rank3-bivariate", order=F(30))
    assert rep.ok, rep.line()
    _pass(4, "bivariate identities exact to q^30 (k<=4) / q^20 (k=5); rank-2/3 shapes reproduced")


def test_criterion_05_x_slices():
    for k in (2, 3, 4):
        for a in (F(k, 2), F(k)):
            for N in range(-3, 4):
                rep = verify_x_slice(k, a, N, F(25))
                assert rep.ok, rep.line()
    _pass(5, "x^N slices equal q^(a N^2/2)/(q;q)_inf to q^25 for k <= 4, |N| <= 3")


def test_criterion_06a_randomized_transform_closure():
    rng = random.Random(1729)
    trunc = F(25)
    for idx in range(30):
        e = rng.choice([1, 2])
        alphas = [XSeries.from_q(QSeries.one(trunc))]
        for _ in range(6):
            terms = [
                (rng.randrange(0, 6), F(rng.randrange(-3, 4), rng.randrange(1, 3)))
                for _ in range(rng.randrange(1, 4))
            ]
            s = QSeries.from_terms(terms, trunc)
            if idx % 3 == 0:
                alphas.append(XSeries({rng.randrange(-2, 3): s}, trunc))
            else:
                alphas.append(XSeries.from_q(s))
        pair = beta_from_alpha(e, alphas, trunc)
        for name, f in (("s1", s1_transform), ("lift", lift_param), ("reduce", reduce_param)):
            out = f(pair)
            res = verify_bailey(out)
            assert res.ok, f"pair {idx}: {name} output fails the defining relation at n={res.mismatch_at}"
    _pass("6a", "30 randomized pairs: S1/lift/reduce outputs satisfy the defining relation to q^25")


def test_criterion_06b_proof_chains():
    for k in (3, 4):
        invp = XSeries.from_q(inv_euler(30))
        assert replay_type_d_chain(k, 0, 1, 8, 30) == theta_sum(k, xlin=2, trunc=30) * invp
        want2 = (theta_sum(k, k, 0, xlin=2, trunc=30) * invp).shift(F(k, 4)).xshift(1)
        assert replay_type_d_chain(k, 0, 2, 8, 30) == want2
        for lam in range(1, k):
            got3 = replay_type_d_chain(k, lam, 3, 8, 30)
            assert got3 == theta_sum(k, lam, 0, 1, 2, trunc=30) * invp, (k, lam, 3)
            got4 = replay_type_d_chain(k, lam, 4, 8, 30)
            want4 = (theta_sum(k, -(k - lam), F(k, 4) - F(lam, 2), 0, 1, trunc=30) * invp) * 2
            assert got4 == want4, (k, lam, 4)
    _pass("6b", "full proof chains for k = 3, 4 reproduce all four theta right sides to q^30")


def test_criterion_06c_limit_unit_pair():
    res = limit_identity(unit_pair(0, 6, 20), 20)
    assert res.ok
    _pass("6c", "limiting identity matches on the unit pair to q^20")


def test_criterion_07_side_identities():
    res = verify_jtp(trunc=60)
    assert res.ok, "triple product"
    for n in range(-4, 5):
        assert verify_durfee(n, F(30)).ok, f"rectangle identity at N={n}"
    assert verify_lift_identity(8, 8, F(30)).ok, "index-lifting identity grid"
    for k in (2, 3):
        assert verify_fk_recursion(k, 2, F(10)).ok, f"recursion at k={k}"
    _pass(7, "triple product q^60; rectangle |N|<=4 q^30; lifting i,j<=8 q^30; F_k=F_(k+1) q^10")


def test_criterion_08_andrews_multisum():
    for k in (2, 3, 4):
        for i in range(1, k + 1):
            rep = verify_andrews_multisum(k, i, F(30))
            assert rep.ok, rep.line()
            lit = rep.extra["literal_reading"]
            if i == 1:
                assert lit == "match", (k, i, lit)
            elif i == k:
                assert lit.startswith("error"), (k, i, lit)
            else:
                assert lit == "mismatch", (k, i, lit)
    _pass(8, "multisum transform exact to q^30 (classical reading); literal reading reported")


def test_criterion_09_substituted_order40():
    for which in ("halfD3", "halfD4", "D3", "D3inv"):
        rep = verify_substituted(which, F(40))
        assert rep.ok, rep.line()
        pivots = [F(p) for p in rep.extra["pivots"]]
        dual = [F(p) for p in rep.extra["dual_pivots"]]
        assert pivots and all(p > 0 for p in pivots), which
        assert dual and all(p > 0 for p in dual), which
    _pass(9, "all four substituted-variable identities exact to order 40; both pivot certificates emitted")


def test_criterion_10_matrix_layer():
    for k in range(3, 11):
        assert matrix_D(k) * matrix_2Dinv(k) == RationalMatrix.identity(k) * 2, k
    for k in range(1, 11):
        assert matrix_G(k).inverse() == matrix_T(k), k
    for k in range(2, 9):
        bound = F(k - 1, 2)
        for eps in (F(1, 7), F(2, 3)):
            assert tilde_A(k, bound + eps).is_positive_definite(), (k, eps)
            assert not tilde_A(k, bound - eps).is_positive_definite(), (k, eps)
        assert not tilde_A(k, bound).is_positive_definite(), k
    _pass(10, "closed-form inverses for k <= 10; positivity boundary confirmed for k = 2..8")


def test_criterion_11_cli_contract(tmp_path, capsys):
    code = main(["verify", "--builtin", "all", "--report", "json"])
    out = capsys.readouterr().out
    assert code == 0, out
    payload = json.loads(out)
    assert all(r["status"] == "match" for r in payload)

    golden = tmp_path / "golden.qid"
    golden.write_text(
        'identity "rr0" {\n'
        "    matrix = [[2]];\n"
        "    order = 30;\n"
        "    rhs = P(+, 1, 5)^-1 * P(+, 4, 5)^-1 + qpow(7);\n"
        "}\n"
    )
    code = main(["verify", "--file", str(golden), "--report", "json"])
    out = capsys.readouterr().out
    assert code == 1
    mm = json.loads(out)[0]["first_mismatch"]
    assert mm["x_degree"] == 0 and mm["exponent"] == {"num": 7, "den": 1}

    bad = tmp_path / "bad.qid"
    bad.write_text('identity "x" {\n    matrix = [[2]]\n    order = 3;\n}\n')
    code = main(["verify", "--file", str(bad)])
    err = capsys.readouterr().err
    assert code == 2
    assert "line 3" in err and "column" in err
    _pass(11, "catalog run exits 0; corrupted golden exits 1 with location; malformed file exits 2")
