"""starfield: an exact symbolic engine for star-products of Poisson
structures and their variational extension to jet spaces.

The package computes with exact rational coefficients throughout: graded
polynomials in jet variables (symcore), oriented bivector graphs and
Leibniz graphs (graphs), finite-dimensional Poisson geometry with the
order-2 star-product expansion and the Moyal series (findim), calculus of
total derivatives, Euler operators and total differential operators
(jetcalc), variational Poisson structures and the variational Moyal
product (varpoisson), and Miura-type factorizations (miura).  Text
formats and the command line live in cli.
"""

from .symcore import (
    DiffPoly,
    Gen,
    HbarSeries,
    ParityError,
    Q,
    StarfieldError,
    SubstitutionError,
    as_poly,
    u,
    xcoord,
    xi,
)
from .jetcalc import (
    JetContext,
    LocalFunctional,
    TotalDiffOp,
    Verdict,
    divergence_witness,
    euler,
    functional_equal,
    is_total_divergence,
    linearize,
    op_adjoint,
    op_apply,
    op_compose,
    reduce_on_equation,
    total_derivative,
)
from .graphs import (
    KontsevichGraph,
    LeibnizGraph,
    SignedGraphSum,
    expand_leibniz,
    is_admissible,
    normalize,
)
from .findim import (
    Bivector,
    FACTORIZATION_CONSTANT,
    StarProductTruncation,
    associator,
    eval_graph,
    factorization_residual,
    jacobiator,
    jacobiator_components,
    moyal,
    poisson_bracket,
    schouten,
    star2,
)
from .varpoisson import (
    FunctionalSum,
    HamiltonianOperator,
    NotSkewAdjoint,
    VariationalBivector,
    bivector_of,
    cme_check,
    var_associator,
    var_bracket,
    var_moyal,
    var_schouten_self,
)
from .miura import (
    MiuraMap,
    kdv_suite,
    liouville_integral_check,
    pushforward_operator,
    verify_factorization,
)
from .cli import parse_expression, print_expression

__version__ = "0.1.0"

__all__ = [
    "Bivector",
    "DiffPoly",
    "FACTORIZATION_CONSTANT",
    "FunctionalSum",
    "Gen",
    "HamiltonianOperator",
    "HbarSeries",
    "JetContext",
    "KontsevichGraph",
    "LeibnizGraph",
    "LocalFunctional",
    "MiuraMap",
    "NotSkewAdjoint",
    "ParityError",
    "Q",
    "SignedGraphSum",
    "StarProductTruncation",
    "StarfieldError",
    "SubstitutionError",
    "TotalDiffOp",
    "VariationalBivector",
    "Verdict",
    "as_poly",
    "associator",
    "bivector_of",
    "cme_check",
    "divergence_witness",
    "euler",
    "eval_graph",
    "expand_leibniz",
    "factorization_residual",
    "functional_equal",
    "is_admissible",
    "is_total_divergence",
    "jacobiator",
    "jacobiator_components",
    "kdv_suite",
    "linearize",
    "liouville_integral_check",
    "moyal",
    "normalize",
    "op_adjoint",
    "op_apply",
    "op_compose",
    "parse_expression",
    "poisson_bracket",
    "print_expression",
    "pushforward_operator",
    "reduce_on_equation",
    "schouten",
    "star2",
    "total_derivative",
    "u",
    "var_associator",
    "var_bracket",
    "var_moyal",
    "var_schouten_self",
    "verify_factorization",
    "xcoord",
    "xi",
]
