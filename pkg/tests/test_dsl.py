"""Identity-spec language: parsing, diagnostics, round-trips."""

from fractions import Fraction as F

import pytest

from qnahm.dsl import (
    case_to_decl,
    case_to_dsl,
    decl_to_case,
    decl_str,
    document_str,
    parse_spec,
)
from qnahm.errors import InvalidSpecError
from qnahm.identities import (
    case_ag,
    case_andrews,
    case_x_slice,
    case_jtp,
    case_kkmm,
    case_rr,
    case_substituted,
    case_stembridge,
    case_type_d,
    case_deformed,
    case_rank3_bivariate,
    case_zagier_rank2,
    run_case,
)

GOOD = '''
# two demo identities
identity "rr" {
    matrix = [[2]];
    rhs = P(+, 1, 5)^-1 * P(+, 4, 5)^-1;
    order = 50;
}

identity "t12" {
    matrix = tildeA(4, 9/4);
    xweight = [0, 0, 1, -1];
    parity(3, 4) = 0;
    rhs = P(-, 9/2, 9, 2) * P(-, 9/2, 9, -2) * P(+, 9, 9) * invq;
    order = 30;
}
'''


def test_parse_good_document():
    res = parse_spec(GOOD)
    assert res.ok, [str(d) for d in res.diagnostics]
    assert [d.name for d in res.document.items] == ["rr", "t12"]
    t12 = res.document.items[1]
    assert t12.get("matrix") == ("builder", "tildeA", (4, F(9, 4)), F(1))
    assert t12.get("parity") == (3, 4, 0)
    assert t12.get("xweight") == (0, 0, 1, -1)


def test_missing_semicolon_diagnostic():
    res = parse_spec('identity "x" {\n    matrix = [[2]]\n    order = 3;\n}')
    assert not res.ok
    err = next(d for d in res.diagnostics if d.severity == "error")
    assert err.line == 3 and err.column == 5
    assert "';'" in err.message


def test_lexical_error_position():
    res = parse_spec('identity "x" { order = 3; rhs = invq; } $')
    assert not res.ok
    err = res.diagnostics[0]
    assert "$" in err.message and err.line == 1


def test_zero_denominator_rejected():
    res = parse_spec('identity "x" { matrix = [[2]]; a = 1/0; rhs = invq; order = 5; }')
    assert not res.ok
    assert any("zero denominator" in d.message for d in res.diagnostics)


def test_builder_arity_error():
    res = parse_spec('identity "x" { matrix = tildeA(4); rhs = invq; order = 5; }')
    assert not res.ok
    res2 = parse_spec('identity "x" { matrix = G(2, 3); rhs = invq; order = 5; }')
    assert not res2.ok
    assert any("argument" in d.message for d in res2.diagnostics)


def test_unknown_builder_and_factor():
    assert not parse_spec('identity "x" { matrix = Q(2); rhs = invq; order = 5; }').ok
    assert not parse_spec('identity "x" { matrix = [[2]]; rhs = flub(1); order = 5; }').ok


def test_recovery_collects_multiple_errors():
    text = 'identity "x" { order = ; rhs = invq } identity "y" { order = 5; rhs = invq; matrix = [[2]]; }'
    res = parse_spec(text)
    assert not res.ok
    assert sum(d.severity == "error" for d in res.diagnostics) >= 2


def test_theta_weight_forms():
    for w, c0, c1 in (("1", 1, 0), ("2n+1", 1, 2), ("n", 0, 1), ("3n-2", -2, 3), ("1/2", F(1, 2), 0)):
        res = parse_spec(f'identity "x" {{ lhs = theta(1, 0, 0, {w}, 0, 0); rhs = invq; order = 5; }}')
        assert res.ok, (w, [str(d) for d in res.diagnostics])
        tree = res.document.items[0].get("lhs")
        fac = tree[0][1][0]
        assert fac[4] == c0 and fac[5] == c1, w


def test_term_coefficients_and_signs():
    res = parse_spec(
        'identity "x" { matrix = [[2]]; order = 5;'
        ' rhs = 1/2 J(0, 2)^11 - 4 qpow(2) * J(0, 4)^6 + invq; }'
    )
    assert res.ok
    tree = res.document.items[0].get("rhs")
    assert tree[0][0] == F(1, 2)
    assert tree[1][0] == -4
    assert tree[2] == (1, (("invq",),))


def test_matrix_literal_must_be_square():
    res = parse_spec('identity "x" { matrix = [[1, 2]]; rhs = invq; order = 5; }')
    assert not res.ok


def test_scaled_builder():
    res = parse_spec('identity "x" { matrix = D(3) * 1/2; basepow = 2; rhs = invq; order = 5; }')
    assert res.ok
    case = decl_to_case(res.document.items[0])
    assert case.spec.A[0, 0] == 1 and case.spec.base_power == 2


def test_decl_to_case_requires_rhs_and_matrix():
    res = parse_spec('identity "x" { matrix = [[2]]; order = 5; rhs = invq; }')
    case = decl_to_case(res.document.items[0])
    assert case.spec is not None
    res2 = parse_spec('identity "x" { order = 5; rhs = invq; }')
    with pytest.raises(InvalidSpecError):
        decl_to_case(res2.document.items[0])


def test_non_positive_definite_matrix_rejected_at_case_build():
    res = parse_spec('identity "x" { matrix = tildeA(4, 3/2); rhs = invq; order = 5; }')
    assert res.ok
    with pytest.raises(InvalidSpecError):
        decl_to_case(res.document.items[0])


# ---------------------------------------------------------------------------
# round trips
# ---------------------------------------------------------------------------


def test_parse_pretty_parse_round_trip():
    res = parse_spec(GOOD)
    text = document_str(res.document)
    res2 = parse_spec(text)
    assert res2.ok
    assert res2.document == res.document


ALL_BUILTIN_CASES = [
    case_rr(0),
    case_rr(1),
    case_kkmm(3, 1),
    case_ag(2, 3),
    case_stembridge(2),
    case_type_d(3, F(1, 3), 2),
    case_type_d(4, 2, 4),
    case_deformed(3, 2, "odd"),
    case_deformed(2, F(9, 4), "full"),
    case_x_slice(3, 2, -2),
    case_zagier_rank2(2, 1),
    case_rank3_bivariate(),
    case_substituted("halfD3"),
    case_substituted("D3inv"),
    case_jtp(1),
    case_andrews(2, 1, 12),
]


@pytest.mark.parametrize("case", ALL_BUILTIN_CASES, ids=lambda c: c.name + str(c.params))
def test_builtin_catalog_expressible_in_dsl(case):
    text = case_to_dsl(case)
    res = parse_spec(text)
    assert res.ok, [str(d) for d in res.diagnostics]
    # canonical text is stable through a parse/print cycle
    assert parse_spec(document_str(res.document)).document == res.document
    rebuilt = decl_to_case(res.document.items[0])
    order = min(F(12), case.default_order)
    direct = run_case(case, order)
    via_dsl = run_case(rebuilt, order)
    assert direct.status == via_dsl.status == "match"
    trunc = case.trunc_for(order)
    # bit-exact agreement of both sides along both paths
    assert case.lhs_value(trunc) == rebuilt.lhs_value(trunc)
    assert case.rhs_value(trunc) == rebuilt.rhs_value(trunc)


def test_case_to_decl_round_trip_structurally():
    case = case_deformed(3, 2, "even")
    decl = case_to_decl(case)
    res = parse_spec(decl_str(decl))
    assert res.ok and res.document.items[0] == decl
