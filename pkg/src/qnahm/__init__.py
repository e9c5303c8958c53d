"""Exact q-series engine and verification toolkit for type-D Nahm sum identities.

Layers, bottom up:

- qseries: truncated formal series in q (rational coefficients, fractional
  exponent grid) with a Laurent x; Pochhammer products, theta sums, eta
  quotients.
- cartan: exact rational matrices, the type-D / tadpole / deformed
  constructors, LDL^T positivity certificates, Schur complements.
- nahm: Nahm sums as exact truncated series via completed-square lattice
  enumeration, parity splits, and the small proof-step identities.
- bailey: Bailey pairs, the S1 iteration, parameter lift/reduce, the
  limiting identity, and full proof-chain replay.
- identities: the verification catalog (both sides of every identity,
  compared coefficient by coefficient) and batch reports.
- dsl / cli: a small declarative identity language and the `qnahm`
  command-line front end.

All values are immutable; operations are pure functions.
"""

from .errors import (
    DivergenceError,
    FactorizationError,
    InsufficientLengthError,
    InvalidDimensionError,
    InvalidSpecError,
    NotInvertibleError,
    QnahmError,
    ScaleError,
    SingularParameterError,
)
from .qseries import (
    FactorSpec,
    MatchResult,
    Mismatch,
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
from .cartan import (
    RationalMatrix,
    matrix_2Dinv,
    matrix_D,
    matrix_G,
    matrix_T,
    schur_delta,
    tilde_A,
)
from .nahm import (
    NahmSpec,
    dual_data,
    nahm_sum,
    nahm_sum_parity_pair,
    verify_durfee,
    verify_fk_recursion,
    verify_lift_identity,
)
from .bailey import (
    BaileyPair,
    apply_chain,
    beta_from_alpha,
    even_theta_pair,
    lift_param,
    limit_identity,
    make_builtin_pair,
    odd_theta_pair,
    reduce_param,
    replay_type_d_chain,
    replay_deformed_chain,
    rr_even_pair,
    rr_odd_pair,
    s1_transform,
    unit_pair,
    verify_bailey,
)
from .identities import (
    CATALOG,
    IdentityCase,
    VerifyReport,
    eval_rhs,
    run_case,
    run_catalog_case,
    verify_AG,
    verify_andrews_multisum,
    verify_batch,
    verify_x_slice,
    verify_substituted,
    verify_stembridge,
    verify_type_d,
    verify_deformed,
)
from .dsl import case_to_dsl, decl_to_case, parse_spec

__version__ = "0.1.0"
