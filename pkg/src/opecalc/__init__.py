"""Exact operator product expansions for free-field vertex algebras."""
from .algebra import AlgebraDef, AlgebraError, Generator, complete_contractions, make_algebra, serialize_algebra
from .expr import (
    Deriv,
    FieldExpr,
    Gen,
    NormalForm,
    Nop,
    OpecalcError,
    ParityError,
    SingularPart,
    Sum,
    Unit,
    UnknownNameError,
    format_expr,
    format_nf,
    format_poles,
)
from .identities import (
    IdentityError,
    IdentityResidual,
    borcherds_residual,
    identity_pool,
    ncwick_residual,
    newwick_residual,
    skew_residual,
)
from .normal import INHOMOGENEOUS, derive, equals, normal_form, parity_of
from .oracle import OracleError, is_central, oracle_contract
from .parser import ParseError, parse_algebra, parse_expr
from .presets import PRESETS, load_preset
from .wick import OpeResult, check_primary, check_virasoro, contract, nth_product, ope

__version__ = "0.1.0"

__all__ = [
    "AlgebraDef", "AlgebraError", "Generator", "complete_contractions", "make_algebra", "serialize_algebra",
    "Deriv", "FieldExpr", "Gen", "NormalForm", "Nop", "OpecalcError", "ParityError", "SingularPart", "Sum",
    "Unit", "UnknownNameError", "format_expr", "format_nf", "format_poles",
    "IdentityError", "IdentityResidual", "borcherds_residual", "identity_pool", "ncwick_residual",
    "newwick_residual", "skew_residual",
    "INHOMOGENEOUS", "derive", "equals", "normal_form", "parity_of",
    "OracleError", "is_central", "oracle_contract",
    "ParseError", "parse_algebra", "parse_expr",
    "PRESETS", "load_preset",
    "OpeResult", "check_primary", "check_virasoro", "contract", "nth_product", "ope",
]
