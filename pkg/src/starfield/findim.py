"""Poisson geometry on affine n-space: brackets, Jacobiator, Schouten
bracket, graph evaluation, the order-2 star-product expansion and the
truncated Moyal product, with associators and the associator/Jacobiator
factorization residual.

The order-2 expansion uses the five weighted graphs

    f*g  +  h B1  +  h^2 ( 1/2 G2 + 1/3 (G3 - G4) + 1/6 G5 ),

whose edge orientations below are pinned by two requirements: every term
is the evaluation of an admissible graph, and the h^2 associator
coefficient equals a single engine-wide multiple of the Jacobiator for
arbitrary bivectors.  That multiple is FACTORIZATION_CONSTANT, calibrated
once by brute force and frozen in a golden test.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .graphs import KontsevichGraph
from .symcore import DiffPoly, Gen, HbarSeries, Q, StarfieldError, as_poly


class DimensionMismatch(StarfieldError):
    pass


class NonConstantBivector(StarfieldError):
    pass


def _check_component(p: DiffPoly):
    for g in p.generators():
        if g.kind != "u" or g.mindex:
            raise ValueError("bivector components live in the base fields u^1..u^n")
    for mono in p.terms:
        if mono[2]:
            raise ValueError("bivector components must be polynomial")
    return p


class Bivector:
    """Skew bivector on affine n-space: components P^{ij} for i < j."""

    __slots__ = ("n", "components")

    def __init__(self, n: int, components):
        comps = {}
        for (i, j), val in dict(components).items():
            val = _check_component(as_poly(val))
            if not (1 <= i <= n and 1 <= j <= n):
                raise DimensionMismatch(f"index pair ({i},{j}) out of range")
            if i == j:
                raise ValueError("diagonal components vanish identically")
            if i > j:
                i, j, val = j, i, -val
            if not val.is_zero():
                comps[(i, j)] = comps.get((i, j), DiffPoly.zero()) + val
        self.n = n
        self.components = {k: v for k, v in comps.items() if not v.is_zero()}

    def comp(self, i: int, j: int) -> DiffPoly:
        if i == j:
            return DiffPoly.zero()
        if i < j:
            return self.components.get((i, j), DiffPoly.zero())
        return -self.components.get((j, i), DiffPoly.zero())

    def ordered_pairs(self):
        """All ordered index pairs with a nonzero component."""
        out = []
        for (i, j), val in sorted(self.components.items()):
            out.append(((i, j), val))
            out.append(((j, i), -val))
        return out

    def is_constant(self) -> bool:
        return all(v.constant_value() is not None for v in self.components.values())

    def max_degree(self):
        degs = [v.degree() for v in self.components.values()]
        if any(d is None for d in degs):
            return None
        return max(degs, default=0)

    def __eq__(self, other):
        if not isinstance(other, Bivector):
            return NotImplemented
        return self.n == other.n and self.components == other.components

    __hash__ = None


def _du(i: int) -> Gen:
    return Gen("u", i)


def poisson_bracket(P: Bivector, f, g) -> DiffPoly:
    """{f, g}_P = sum_{i,j} d_i f P^{ij} d_j g."""
    f, g = as_poly(f), as_poly(g)
    acc = DiffPoly.zero()
    for (i, j), pij in P.ordered_pairs():
        df = f.partial(_du(i))
        if df.is_zero():
            continue
        dg = g.partial(_du(j))
        if dg.is_zero():
            continue
        acc = acc + df * pij * dg
    return acc


def jacobiator(P: Bivector, f, g, h) -> DiffPoly:
    """The cyclic sum {{f,g},h} + {{g,h},f} + {{h,f},g} (equal to the
    half-alternating-sum normalization over all six permutations)."""
    br = poisson_bracket
    return (
        br(P, br(P, f, g), h)
        + br(P, br(P, g, h), f)
        + br(P, br(P, h, f), g)
    )


def jacobiator_components(P: Bivector) -> dict:
    """Coefficients of d_i x d_j x d_k (i<j<k) of the Jacobiator trivector."""
    out = {}
    for i in range(1, P.n + 1):
        for j in range(i + 1, P.n + 1):
            for k in range(j + 1, P.n + 1):
                acc = DiffPoly.zero()
                for l in range(1, P.n + 1):
                    for (a, b), c3 in (((i, j), (l, k)), ((j, k), (l, i)), ((k, i), (l, j))):
                        d = P.comp(a, b).partial(_du(l))
                        if not d.is_zero():
                            acc = acc + d * P.comp(*c3)
                if not acc.is_zero():
                    out[(i, j, k)] = acc
    return out


def odd_representation(P: Bivector) -> DiffPoly:
    """The parity-odd form (1/2) <xi_i P^{ij} xi_j> = sum_{i<j} P^{ij} xi_i xi_j."""
    acc = DiffPoly.zero()
    for (i, j), val in sorted(P.components.items()):
        acc = acc + val * DiffPoly.gen(Gen("xi", i)) * DiffPoly.gen(Gen("xi", j))
    return acc


def schouten_poly(P: Bivector, Qb: Bivector) -> DiffPoly:
    """[[P, Q]] on the odd-variable representation,
    (P) d<-/du^i . d->/dxi_i (Q)  -  (P) d<-/dxi_i . d->/du^i (Q)."""
    if P.n != Qb.n:
        raise DimensionMismatch("bivectors live on spaces of different dimension")
    p, q = odd_representation(P), odd_representation(Qb)
    acc = DiffPoly.zero()
    for i in range(1, P.n + 1):
        xg = Gen("xi", i)
        acc = acc + p.partial(_du(i)) * q.partial(xg, "left")
        acc = acc - p.partial(xg, "right") * q.partial(_du(i))
    return acc


def schouten(P: Bivector, Qb: Bivector) -> dict:
    """Trivector components of [[P, Q]]: coefficients of xi_i xi_j xi_k, i<j<k."""
    poly = schouten_poly(P, Qb)
    out = {}
    for (evens, odds, lam), c in poly.terms.items():
        if len(odds) != 3:
            raise StarfieldError("Schouten bracket of two bivectors must be a trivector")
        key = tuple(g.index for g in odds)
        mono = (evens, (), lam)
        cur = out.get(key, DiffPoly.zero())
        out[key] = cur + DiffPoly({mono: c})
    return {k: v for k, v in sorted(out.items()) if not v.is_zero()}


def eval_graph(g: KontsevichGraph, P: Bivector, args) -> DiffPoly:
    """Evaluate a graph at a bivector: sum over all edge index assignments
    of the product of vertex contents, each differentiated by its incoming
    indices; the first/second edge of a vertex matches the first/second
    index of the installed bivector copy."""
    g.check()
    args = [as_poly(a) for a in args]
    if len(args) != g.sinks:
        raise DimensionMismatch("argument count must equal the sink count")
    s, k = g.sinks, g.internal
    pairs = P.ordered_pairs()
    if k and not pairs:
        return DiffPoly.zero()

    # a vertex receiving more derivatives than its content can absorb kills
    # the whole assignment; precompute cheap degree caps (None = no cap)
    caps = [a.degree() for a in args]
    pdeg = P.max_degree()
    caps += [pdeg] * k
    degs = [0] * (s + k)
    for a, b in g.edges:
        degs[a] += 1
        degs[b] += 1
    for v in range(s + k):
        if caps[v] is not None and degs[v] > caps[v]:
            return DiffPoly.zero()

    total = DiffPoly.zero()
    for assignment in product(pairs, repeat=k):
        incoming = [[] for _ in range(s + k)]
        for v, (a, b) in enumerate(g.edges):
            (i, j), _val = assignment[v]
            incoming[a].append(i)
            incoming[b].append(j)
        term = DiffPoly.one()
        for v in range(s + k):
            content = args[v] if v < s else assignment[v - s][1]
            for idx in incoming[v]:
                content = content.partial(_du(idx))
                if content.is_zero():
                    break
            term = term * content
            if term.is_zero():
                break
        if not term.is_zero():
            total = total + term
    return total


# the five graphs of the order-2 expansion
WEDGE = KontsevichGraph(2, ((0, 1),))
GRAPH2 = KontsevichGraph(2, ((0, 1), (0, 1)))
GRAPH3 = KontsevichGraph(2, ((0, 3), (0, 1)))
GRAPH4 = KontsevichGraph(2, ((1, 3), (0, 1)))
GRAPH5 = KontsevichGraph(2, ((0, 3), (2, 1)))

#: calibrated constant c with Assoc_{h^2} = c * Jacobiator, expected 2/3
FACTORIZATION_CONSTANT = Q(2, 3)


@dataclass(frozen=True)
class StarProductTruncation:
    """A truncated star-product: the general order-2 expansion, or the
    Moyal series of a constant bivector at any order."""

    P: Bivector
    order: int
    mode: str = "order2"

    def __post_init__(self):
        if self.mode not in ("order2", "moyal"):
            raise ValueError("mode must be 'order2' or 'moyal'")
        if self.mode == "order2" and self.order > 2:
            raise StarfieldError(
                "general bivectors are only expanded through order 2"
            )
        if self.mode == "moyal" and not self.P.is_constant():
            raise NonConstantBivector(
                "the Moyal series needs a constant-coefficient bivector"
            )

    def bidiff(self, k: int, f: DiffPoly, g: DiffPoly) -> DiffPoly:
        """The bidifferential coefficient of hbar^k."""
        if k == 0:
            return f * g
        if self.mode == "order2":
            if k == 1:
                return eval_graph(WEDGE, self.P, (f, g))
            return (
                Q(1, 2) * eval_graph(GRAPH2, self.P, (f, g))
                + Q(1, 3) * (eval_graph(GRAPH3, self.P, (f, g))
                             - eval_graph(GRAPH4, self.P, (f, g)))
                + Q(1, 6) * eval_graph(GRAPH5, self.P, (f, g))
            )
        return _moyal_term(self.P, f, g, k)

    def star(self, a, b) -> HbarSeries:
        """Star-product of two series (plain values are promoted)."""
        K = self.order
        if not isinstance(a, HbarSeries):
            a = HbarSeries.constant(as_poly(a), K)
        if not isinstance(b, HbarSeries):
            b = HbarSeries.constant(as_poly(b), K)
        a, b = a.truncate(K), b.truncate(K)
        out = [DiffPoly.zero()] * (K + 1)
        for p in range(K + 1):
            if a.coeff(p).is_zero():
                continue
            for q in range(K + 1 - p):
                if b.coeff(q).is_zero():
                    continue
                for k in range(K + 1 - p - q):
                    out[p + q + k] = out[p + q + k] + self.bidiff(
                        k, a.coeff(p), b.coeff(q)
                    )
        return HbarSeries(out)


def _moyal_term(P: Bivector, f: DiffPoly, g: DiffPoly, k: int) -> DiffPoly:
    consts = [((i, j), v.constant_value()) for (i, j), v in P.ordered_pairs()]
    total = [DiffPoly.zero()]

    def rec(depth, fcur, gcur, coeff):
        if depth == k:
            total[0] = total[0] + coeff * fcur * gcur
            return
        for (i, j), c in consts:
            df = fcur.partial(_du(i))
            if df.is_zero():
                continue
            dg = gcur.partial(_du(j))
            if dg.is_zero():
                continue
            rec(depth + 1, df, dg, coeff * c)

    fact = 1
    for t in range(2, k + 1):
        fact *= t
    rec(0, f, g, Q(1, fact))
    return total[0]


def star2(P: Bivector, f, g) -> HbarSeries:
    """The order-2 expansion of the star-product of two functions."""
    S = StarProductTruncation(P, 2, "order2")
    f, g = as_poly(f), as_poly(g)
    return HbarSeries([S.bidiff(k, f, g) for k in range(3)])


def moyal(P: Bivector, f, g, K: int) -> HbarSeries:
    """The Moyal series of a constant bivector, truncated at order K."""
    S = StarProductTruncation(P, K, "moyal")
    f, g = as_poly(f), as_poly(g)
    return HbarSeries([S.bidiff(k, f, g) for k in range(K + 1)])


def associator(S: StarProductTruncation, f, g, h) -> HbarSeries:
    """(f * g) * h - f * (g * h) with truncation-consistent bookkeeping."""
    return S.star(S.star(f, g), h) - S.star(f, S.star(g, h))


def factorization_residual(P: Bivector, f, g, h,
                           constant: Fraction = FACTORIZATION_CONSTANT) -> DiffPoly:
    """h^2 coefficient of the order-2 associator minus constant * Jacobiator."""
    S = StarProductTruncation(P, 2, "order2")
    assoc = associator(S, f, g, h)
    return assoc.coeff(2) - constant * jacobiator(P, f, g, h)
