import random
from fractions import Fraction as Q

import pytest

from starfield import (
    DiffPoly,
    Gen,
    LocalFunctional,
    TotalDiffOp,
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

from helpers import rand_density, upoly, xipoly

one = DiffPoly.one()


def D(p, a=1):
    return total_derivative(p, a)


def test_total_derivative_leibniz():
    u, ux, uxx = upoly(1), upoly(1, (1,)), upoly(1, (1, 1))
    assert D(u * ux) == ux ** 2 + u * uxx


def test_total_derivative_exp_atom():
    e = DiffPoly.exp_atom({1: Q(2)})
    assert D(e) == 2 * upoly(1, (1,)) * e


def test_total_derivative_odd_square_drop():
    xi, xix, xixx = xipoly(1), xipoly(1, (1,)), xipoly(1, (1, 1))
    assert D(xi * xix) == xi * xixx


def test_total_derivative_base_coordinate():
    x = DiffPoly.gen(Gen("x", 1))
    assert D(x) == one
    assert D(x ** 3) == 3 * x ** 2
    assert total_derivative(x, 2).is_zero()


def test_total_derivatives_commute():
    rng = random.Random(21)
    for _ in range(20):
        p = rand_density(rng, n=2, m=2, odd=True, atoms=True)
        assert D(D(p, 1), 2) == D(D(p, 2), 1)


def test_euler_one_integration_by_parts():
    u, ux, uxx = upoly(1), upoly(1, (1,)), upoly(1, (1, 1))
    assert euler(Q(1, 2) * ux ** 2, Gen("u", 1)) == -uxx
    assert euler(u * uxx, Gen("u", 1)) == 2 * uxx


def test_euler_kills_total_derivatives():
    rng = random.Random(22)
    for _ in range(100):
        q = rand_density(rng, n=2, m=1, odd=True, atoms=True)
        p = D(q)
        for kind, index in sorted(p.fields()):
            assert euler(p, Gen(kind, index)).is_zero()


def test_is_total_divergence_examples():
    ux, uxx = upoly(1, (1,)), upoly(1, (1, 1))
    xi, xix, xixxx = xipoly(1), xipoly(1, (1,)), xipoly(1, (1, 1, 1))
    assert is_total_divergence(ux * uxx)
    assert not is_total_divergence(ux ** 2)
    assert is_total_divergence(-(xi * xix * xixxx))


def test_divergence_witness_on_corpus():
    rng = random.Random(23)
    for _ in range(25):
        q = rand_density(rng, n=2, m=1, odd=True, atoms=True, terms=3)
        p = D(q)
        ws = divergence_witness(p, m=1)
        assert ws is not None
        assert D(ws[0]) == p


def test_multibase_verdicts_are_flagged():
    # d/dx(u u_y) + d/dy(u u_x) has vanishing Euler derivatives and a witness
    u = upoly(1)
    p = D(u * upoly(1, (2,)), 1) + D(u * upoly(1, (1,)), 2)
    v = is_total_divergence(p, m=2)
    assert v and v.complete
    # u_x u_y is not a divergence: one Euler derivative survives
    v2 = is_total_divergence(upoly(1, (1,)) * upoly(1, (2,)), m=2)
    assert not v2 and v2.complete
    # zero Euler derivatives but outside the bounded search: flagged incomplete
    # (a genuinely exact density the search may or may not find is fine; here
    # we only check that a False verdict at m=2 is never claimed complete
    # without Euler evidence)
    q = rand_density(random.Random(5), n=1, m=2)
    p3 = D(q, 1)
    v3 = is_total_divergence(p3, m=2)
    assert v3.value or not v3.complete


def test_functional_equality():
    u, ux, uxx = upoly(1), upoly(1, (1,)), upoly(1, (1, 1))
    F = LocalFunctional(u * uxx)
    G = LocalFunctional(-(ux ** 2))
    assert functional_equal(F, G)
    assert not functional_equal(LocalFunctional(u ** 2), LocalFunctional(DiffPoly.zero()))
    assert functional_equal(F, F)


def test_op_apply():
    u = upoly(1)
    A = TotalDiffOp([[{(1,): one}]])
    assert op_apply(A, [u ** 2])[0] == 2 * u * upoly(1, (1,))
    Z = TotalDiffOp.zero(1, 1)
    assert op_apply(Z, [u])[0].is_zero()


def test_op_compose_normal_ordering():
    w, wx = upoly(1), upoly(1, (1,))
    Dop = TotalDiffOp([[{(1,): one}]])
    Wop = TotalDiffOp([[{(): w}]])
    # D o w = w D + w_x
    assert op_compose(Dop, Wop) == TotalDiffOp([[{(1,): w, (): wx}]])
    # (1/2 D) o (4 theta + D) = 2 theta D + 2 theta_x + 1/2 D^2
    half_d = TotalDiffOp([[{(1,): DiffPoly.const(Q(1, 2))}]])
    rhs = TotalDiffOp([[{(): 4 * w, (1,): one}]])
    expected = TotalDiffOp([[{(1,): 2 * w, (): 2 * wx, (1, 1): DiffPoly.const(Q(1, 2))}]])
    assert op_compose(half_d, rhs) == expected
    assert op_compose(Dop, TotalDiffOp.identity(1)) == Dop


def test_op_adjoint_examples():
    w, wx = upoly(1), upoly(1, (1,))
    Dop = TotalDiffOp([[{(1,): one}]])
    assert op_adjoint(Dop) == -Dop
    # (4 theta - D)^dagger = 4 theta + D
    lin = TotalDiffOp([[{(): 4 * w, (1,): -one}]])
    assert op_adjoint(lin) == TotalDiffOp([[{(): 4 * w, (1,): one}]])
    # the KdV second structure is skew-adjoint
    a2 = TotalDiffOp([[{(1, 1, 1): DiffPoly.const(Q(-1, 2)), (1,): 4 * w, (): 2 * wx}]])
    assert op_adjoint(a2) == -a2


def _rand_scalar_op(rng):
    entry = {}
    for _ in range(rng.randint(1, 3)):
        mind = tuple(sorted(1 for _ in range(rng.randint(0, 2))))
        entry[mind] = rand_density(rng, n=1, m=1, max_order=1, deg=2, terms=2)
    return TotalDiffOp([[entry]])


def test_op_adjoint_involution_and_antihomomorphism():
    rng = random.Random(24)
    for _ in range(15):
        A, B = _rand_scalar_op(rng), _rand_scalar_op(rng)
        assert op_adjoint(op_adjoint(A)) == A
        assert op_adjoint(op_compose(A, B)) == op_compose(op_adjoint(B), op_adjoint(A))


def test_op_compose_matches_sequential_apply():
    rng = random.Random(25)
    for _ in range(15):
        A, B = _rand_scalar_op(rng), _rand_scalar_op(rng)
        v = rand_density(rng, n=1, m=1, terms=2)
        assert op_apply(op_compose(A, B), [v]) == op_apply(A, op_apply(B, [v]))


def test_linearize_examples():
    th, thx = upoly(1), upoly(1, (1,))
    # w = 2 theta^2 - theta_x  ->  4 theta - D
    ell = linearize([2 * th ** 2 - thx], 1)
    assert ell == TotalDiffOp([[{(): 4 * th, (1,): -one}]])
    # theta = u_x / 2  ->  D/2
    ell2 = linearize([Q(1, 2) * upoly(1, (1,))], 1)
    assert ell2 == TotalDiffOp([[{(1,): DiffPoly.const(Q(1, 2))}]])
    assert linearize([upoly(1)], 1) == TotalDiffOp.identity(1)


def test_reduce_on_equation():
    e2u = DiffPoly.exp_atom({1: Q(2)})
    uxy = upoly(1, (1, 2))
    uxxy = upoly(1, (1, 1, 2))
    assert reduce_on_equation(uxy, 1, e2u) == e2u
    assert reduce_on_equation(uxxy, 1, e2u) == 2 * upoly(1, (1,)) * e2u
    # the Liouville integral: D_y(w) reduces to zero on the equation surface
    w = Q(1, 2) * (upoly(1, (1,)) ** 2 - upoly(1, (1, 1)))
    assert reduce_on_equation(total_derivative(w, 2), 1, e2u).is_zero()


def test_reduce_on_equation_rejects_mixed_rhs():
    with pytest.raises(ValueError):
        reduce_on_equation(upoly(1, (1, 2)), 1, upoly(1, (1, 2)))
