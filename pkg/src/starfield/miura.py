"""Miura-type substitutions, factorization of Hamiltonian operators through
linearizations, and the KdV verification suite.

A differential substitution w = w(x,[u]) transports a Hamiltonian operator
B over [u] to ell_w o B o ell_w^dagger over [u]; verifying a claimed
factorization of an operator A over [w] substitutes the prolonged map into
A's coefficients and compares normal-ordered forms exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .jetcalc import (
    TotalDiffOp,
    apply_multi_derivative,
    euler,
    linearize,
    reduce_on_equation,
    total_derivative,
)
from .symcore import DiffPoly, Gen, Q, as_poly
from .varpoisson import HamiltonianOperator, NotSkewAdjoint, cme_check


@dataclass(frozen=True)
class MiuraMap:
    """A substitution w^i = w^i(x,[u]) of positive differential order."""

    substitution: tuple[DiffPoly, ...]

    def __post_init__(self):
        subs = tuple(as_poly(w) for w in self.substitution)
        object.__setattr__(self, "substitution", subs)
        order = 0
        for w in subs:
            for g in w.generators():
                if g.kind == "xi":
                    raise ValueError("Miura substitutions are even")
                if g.kind == "u":
                    order = max(order, len(g.mindex))
            for mono in w.terms:
                if mono[2]:
                    raise ValueError("Miura substitutions are polynomial in the jets")
        if order < 1:
            raise ValueError("the substitution must have positive differential order")

    @property
    def n(self) -> int:
        return len(self.substitution)


def pushforward_operator(B: HamiltonianOperator, M: MiuraMap) -> TotalDiffOp:
    """ell_w o B o ell_w^dagger, normal-ordered, with coefficients in [u]."""
    if B.n != M.n:
        raise ValueError("shape mismatch between operator and substitution")
    ell = linearize(M.substitution, M.n)
    return ell.compose(B.op.compose(ell.adjoint()))


def _substitute_prolonged(op: TotalDiffOp, M: MiuraMap) -> TotalDiffOp:
    """Replace every w-jet in op's coefficients by the prolonged substitution."""
    gens = set()
    for row in op.entries:
        for entry in row:
            for coeff in entry.values():
                gens |= {g for g in coeff.generators() if g.kind == "u"}
    bindings = {
        g: apply_multi_derivative(M.substitution[g.index - 1], g.mindex)
        for g in gens
    }
    return TotalDiffOp(
        [
            [
                {mi: c.substitute(bindings) for mi, c in entry.items()}
                for entry in row
            ]
            for row in op.entries
        ]
    )


def verify_factorization(A: HamiltonianOperator, B: HamiltonianOperator,
                         M: MiuraMap) -> bool:
    """Whether A|_[w <- w(x,[u])] equals ell_w o B o ell_w^dagger exactly."""
    return _substitute_prolonged(A.op, M) == pushforward_operator(B, M)


def liouville_integral_check() -> bool:
    """d/dy of w = (u_x^2 - u_xx)/2 vanishes on the surface u_xy = exp(2u)."""
    ux = DiffPoly.gen(Gen("u", 1, (1,)))
    uxx = DiffPoly.gen(Gen("u", 1, (1, 1)))
    w = Q(1, 2) * (ux * ux - uxx)
    rule = DiffPoly.exp_atom({1: Q(2)})
    return reduce_on_equation(total_derivative(w, 2), 1, rule).is_zero()


def kdv_second_structure() -> HamiltonianOperator:
    """A_2 = -1/2 D^3 + 4w D + 2w_x (field w = u^1)."""
    w = DiffPoly.gen(Gen("u", 1))
    wx = DiffPoly.gen(Gen("u", 1, (1,)))
    return HamiltonianOperator(
        TotalDiffOp([[{(1, 1, 1): DiffPoly.const(Q(-1, 2)), (1,): 4 * w, (): 2 * wx}]])
    )


def mkdv_first_structure() -> HamiltonianOperator:
    """B_1 = 1/2 D (field theta = u^1)."""
    return HamiltonianOperator(TotalDiffOp([[{(1,): DiffPoly.const(Q(1, 2))}]]))


def kdv_miura_map() -> MiuraMap:
    """w = 2 theta^2 - theta_x."""
    th = DiffPoly.gen(Gen("u", 1))
    thx = DiffPoly.gen(Gen("u", 1, (1,)))
    return MiuraMap((2 * th * th - thx,))


@dataclass(frozen=True)
class SuiteReport:
    checks: tuple[tuple[str, bool], ...]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)

    def lines(self):
        return [f"{'PASS' if ok else 'FAIL'}  {name}" for name, ok in self.checks]


def kdv_suite() -> SuiteReport:
    """The five KdV checks: skew-adjointness of both structures, the master
    equation for A_2, the Miura factorization, the Liouville integral, and
    the KdV flow as a Hamiltonian evolution."""
    checks = []

    try:
        A2 = kdv_second_structure()
        B1 = mkdv_first_structure()
        checks.append(("skew-adjointness of A2 and B1", True))
    except NotSkewAdjoint:
        return SuiteReport((("skew-adjointness of A2 and B1", False),))

    checks.append(("classical master-equation for A2", bool(cme_check(A2))))

    M = kdv_miura_map()
    checks.append(("factorization A2 = ell o B1 o ell^dagger", verify_factorization(A2, B1, M)))

    checks.append(("Liouville integral in ker d/dy", liouville_integral_check()))

    w = DiffPoly.gen(Gen("u", 1))
    wx = DiffPoly.gen(Gen("u", 1, (1,)))
    wxxx = DiffPoly.gen(Gen("u", 1, (1, 1, 1)))
    grad = euler(Q(1, 2) * w * w, Gen("u", 1))
    rhs = A2.op.apply([grad])[0]
    checks.append(
        ("KdV flow w_t = A2(delta/delta w int w^2/2 dx)",
         rhs == Q(-1, 2) * wxxx + 6 * w * wx)
    )
    return SuiteReport(tuple(checks))
