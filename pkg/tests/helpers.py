"""Shared random generators for the test suite (seeded, exact rationals)."""

import random
from fractions import Fraction as Q

from starfield import Bivector, DiffPoly, Gen


def upoly(index, mindex=()):
    return DiffPoly.gen(Gen("u", index, tuple(sorted(mindex))))


def xipoly(index, mindex=()):
    return DiffPoly.gen(Gen("xi", index, tuple(sorted(mindex))))


def rand_coeff(rng, lo=-4, hi=4):
    c = Q(rng.randint(lo, hi))
    return c if c else Q(1)


def rand_point_poly(rng, n, deg, terms=4):
    """Random polynomial in the undifferentiated fields u^1..u^n."""
    acc = DiffPoly.zero()
    for _ in range(terms):
        mono = DiffPoly.const(rand_coeff(rng))
        for _ in range(rng.randint(1, deg)):
            mono = mono * upoly(rng.randint(1, n))
        acc = acc + mono
    return acc


def rand_bivector(rng, n, deg):
    comps = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            comps[(i, j)] = rand_point_poly(rng, n, deg)
    return Bivector(n, comps)


def rand_density(rng, n=1, m=1, max_order=2, deg=3, terms=4,
                 odd=False, atoms=False):
    """Random jet-space density: polynomial in jets, optionally with odd
    generators and exponential atoms."""
    acc = DiffPoly.zero()
    for _ in range(terms):
        mono = DiffPoly.const(rand_coeff(rng))
        for _ in range(rng.randint(1, deg)):
            idx = rng.randint(1, n)
            mind = tuple(sorted(rng.randint(1, m)
                                for _ in range(rng.randint(0, max_order))))
            if odd and rng.random() < 0.4:
                mono = mono * xipoly(idx, mind)
            else:
                mono = mono * upoly(idx, mind)
        if atoms and rng.random() < 0.3:
            mono = mono * DiffPoly.exp_atom({rng.randint(1, n): rand_coeff(rng, -2, 2)})
        acc = acc + mono
    return acc


def poisson_examples(n=3):
    """A small zoo of certified Poisson bivectors on R^3."""
    u = upoly
    return [
        Bivector(3, {(1, 2): DiffPoly.const(2), (1, 3): DiffPoly.const(-1),
                     (2, 3): DiffPoly.const(3)}),
        Bivector(3, {(1, 2): DiffPoly.const(1)}),
        Bivector(3, {(1, 2): 3 * u(3), (2, 3): 3 * u(1), (1, 3): -3 * u(2)}),
        Bivector(3, {(1, 2): u(3), (1, 3): 2 * u(1), (2, 3): -2 * u(2)}),
        Bivector(3, {(1, 2): u(3)}),
    ]
