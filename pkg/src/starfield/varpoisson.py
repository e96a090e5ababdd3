"""Variational Poisson structures: Hamiltonian operators, variational
bivectors, the functional bracket, the classical master-equation, and the
variational Moyal star-product with its associator.

Star-products of functionals are computed by pairing "towers": each order-k
term couples k variational edges between the two arguments.  Every edge
differentiates the bare densities first; the total-derivative transports it
creates are accumulated per integral component and applied only after all
partial derivatives have acted (the inner transports of a nested product
are likewise delayed and then applied innermost first).  With jet-free
operator coefficients this evaluation realizes the closed Moyal-type
formula exactly; jet-dependent coefficients are rejected, since no
constructive weights exist for them beyond first order.

Sign convention of the self-bracket: the master-equation density is taken
as 2 * sum_i (delta P / delta u^i) (delta P / delta xi_i); the KdV fixture
pins this choice (its value reduces to an exact derivative).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .jetcalc import (
    LocalFunctional,
    TotalDiffOp,
    Verdict,
    euler,
    is_total_divergence,
    apply_multi_derivative,
    jet_orders,
)
from .symcore import DiffPoly, Gen, Q, StarfieldError, as_poly


class NotSkewAdjoint(StarfieldError):
    pass


class JetDependentCoefficients(StarfieldError):
    pass


class HamiltonianOperator:
    """A square skew-adjoint matrix of total differential operators."""

    __slots__ = ("op", "n", "m")

    def __init__(self, op: TotalDiffOp, m: int = 1):
        if op.rows != op.cols:
            raise ValueError("Hamiltonian operators are square")
        if not (op.adjoint() + op).is_zero():
            raise NotSkewAdjoint("operator is not skew-adjoint")
        self.op = op
        self.n = op.rows
        self.m = m

    def is_jet_free(self) -> bool:
        """True when no coefficient depends on the jet fibre variables."""
        for row in self.op.entries:
            for entry in row:
                for coeff in entry.values():
                    if any(g.kind != "x" for g in coeff.generators()):
                        return False
                    if any(mono[2] for mono in coeff.terms):
                        return False
        return True

    def __repr__(self):
        return f"HamiltonianOperator({self.op!r})"


@dataclass(frozen=True)
class VariationalBivector:
    """The odd-degree-2 density (1/2) <xi . A(xi)> of a Hamiltonian operator."""

    density: DiffPoly
    operator: HamiltonianOperator

    def __post_init__(self):
        for mono in self.density.terms:
            if len(mono[1]) != 2:
                raise ValueError("a variational bivector has odd degree exactly 2")


def bivector_of(A: HamiltonianOperator) -> VariationalBivector:
    xivec = [DiffPoly.gen(Gen("xi", j)) for j in range(1, A.n + 1)]
    applied = A.op.apply(xivec)
    density = DiffPoly.zero()
    for i in range(A.n):
        density = density + Q(1, 2) * xivec[i] * applied[i]
    return VariationalBivector(density, A)


def var_bracket(A: HamiltonianOperator, F: LocalFunctional,
                G: LocalFunctional) -> LocalFunctional:
    """{F, G}_P as < delta F/delta u . A(delta G/delta u) >, the one-term
    form legitimate by skew-adjointness."""
    if F.m != A.m or G.m != A.m:
        raise ValueError("base dimensions differ")
    dF = [euler(F.density, Gen("u", i)) for i in range(1, A.n + 1)]
    dG = [euler(G.density, Gen("u", i)) for i in range(1, A.n + 1)]
    AdG = A.op.apply(dG)
    density = DiffPoly.zero()
    for i in range(A.n):
        density = density + dF[i] * AdG[i]
    return LocalFunctional(density, A.m)


def var_schouten_self(P: VariationalBivector) -> LocalFunctional:
    """The master-equation density 2 <delta P/delta u . delta P/delta xi>."""
    A = P.operator
    density = DiffPoly.zero()
    for i in range(1, A.n + 1):
        eu = euler(P.density, Gen("u", i))
        if eu.is_zero():
            continue
        exi = euler(P.density, Gen("xi", i))
        density = density + 2 * eu * exi
    return LocalFunctional(density, A.m)


def cme_check(A: HamiltonianOperator) -> Verdict:
    """Classical master-equation [[P, P]] ~ 0 for the bivector of A."""
    return var_schouten_self(bivector_of(A)).is_null()


# ---------------------------------------------------------------------------
# The variational Moyal product
# ---------------------------------------------------------------------------
#
# Working representation for star-product intermediates.  A Block is one
# graph vertex: a density already hit by partial derivatives, plus the
# signed total derivative it still owes (applied only at evaluation).  A
# Comp is one integral component: the blocks restricted to a common base
# point together with the jet-free edge kernels.  An object of the
# functional algebra is a formal product of components.  Keeping the
# transports on the differentiated vertex itself makes the analytic value
# of a multi-edge configuration independent of the order in which nested
# star-products composed it.


@dataclass(frozen=True)
class Block:
    poly: DiffPoly
    tsign: Fraction = Q(1)
    tmind: tuple[int, ...] = ()

    def with_transport(self, sign: Fraction, mind) -> "Block":
        return Block(self.poly, self.tsign * sign,
                     tuple(sorted(self.tmind + tuple(mind))))

    def evaluate(self) -> DiffPoly:
        return self.tsign * apply_multi_derivative(self.poly, self.tmind)


@dataclass(frozen=True)
class Comp:
    blocks: tuple[Block, ...]
    kern: DiffPoly

    @staticmethod
    def of_density(p: DiffPoly) -> "Comp":
        return Comp((Block(p),), DiffPoly.one())

    def evaluate(self) -> DiffPoly:
        acc = self.kern
        for block in self.blocks:
            acc = acc * block.evaluate()
        return acc


def _comp_jets(comp: Comp, index: int):
    """Multi-indices with which field u^index occurs in the bare blocks."""
    sigmas = set()
    for block in comp.blocks:
        sigmas |= jet_orders(block.poly, "u", index)
    return sigmas


def _comp_partials(comp: Comp, gen: Gen):
    """Leibniz alternatives: differentiate one block by gen.

    Yields (new component, block position) so the calling tower can leave
    its transport on the block it actually differentiated."""
    out = []
    for pos, block in enumerate(comp.blocks):
        d = block.poly.partial(gen)
        if not d.is_zero():
            nb = Block(d, block.tsign, block.tmind)
            out.append((Comp(comp.blocks[:pos] + (nb,) + comp.blocks[pos + 1 :],
                             comp.kern), pos))
    return out


def _routes(A: HamiltonianOperator):
    """Variational edge data: (i, j, tau, zeta, kernel) with the kernel
    carrying the +-1/2 weight of the two integration-by-parts routes."""
    routes = []
    for i in range(1, A.n + 1):
        for j in range(1, A.n + 1):
            for zeta, c in sorted(A.op.entry(i - 1, j - 1).items()):
                routes.append((i, j, (), zeta, c * Q(1, 2)))
            for tau, c in sorted(A.op.entry(j - 1, i - 1).items()):
                routes.append((i, j, tau, (), c * Q(-1, 2)))
    return routes


def _require_jet_free(A: HamiltonianOperator):
    if not A.is_jet_free():
        raise JetDependentCoefficients(
            "the variational star-product needs jet-free operator coefficients"
        )


def _star_terms(xcomps: tuple, ycomps: tuple, A: HamiltonianOperator, k: int):
    """All k-tower pairings of two formal products of components.

    Returns a list of (coefficient, tuple-of-components); the 1/k! weight
    is left to the caller.  Touched components of both sides merge, with
    their accumulated transports kept inside the merged component.
    """
    routes = _routes(A)
    results = []

    def transported(comp, pos, sign, mind):
        nb = comp.blocks[pos].with_transport(sign, mind)
        return Comp(comp.blocks[:pos] + (nb,) + comp.blocks[pos + 1 :], comp.kern)

    def rec(t, xs, ys, xtouch, ytouch, kerns, coef):
        if t == k:
            if k == 0:
                results.append((coef, tuple(xs) + tuple(ys)))
                return
            blocks = ()
            kern = DiffPoly.one()
            for ci in sorted(xtouch):
                blocks += xs[ci].blocks
                kern = kern * xs[ci].kern
            for cj in sorted(ytouch):
                blocks += ys[cj].blocks
                kern = kern * ys[cj].kern
            for kp in kerns:
                kern = kern * kp
            merged = Comp(blocks, kern)
            rest = tuple(c for ci, c in enumerate(xs) if ci not in xtouch) + tuple(
                c for cj, c in enumerate(ys) if cj not in ytouch
            )
            results.append((coef, (merged,) + rest))
            return
        for (i, j, tau, zeta, kern) in routes:
            for ci, xc in enumerate(xs):
                for sigma in sorted(_comp_jets(xc, i)):
                    for xd, xpos in _comp_partials(xc, Gen("u", i, sigma)):
                        xd2 = transported(xd, xpos, Q(-1) ** len(sigma), sigma + tau)
                        for cj, yc in enumerate(ys):
                            for chi in sorted(_comp_jets(yc, j)):
                                for yd, ypos in _comp_partials(yc, Gen("u", j, chi)):
                                    yd2 = transported(
                                        yd, ypos, Q(-1) ** len(chi), chi + zeta
                                    )
                                    rec(
                                        t + 1,
                                        xs[:ci] + (xd2,) + xs[ci + 1 :],
                                        ys[:cj] + (yd2,) + ys[cj + 1 :],
                                        xtouch | {ci},
                                        ytouch | {cj},
                                        kerns + (kern,),
                                        coef,
                                    )

    rec(0, tuple(xcomps), tuple(ycomps), frozenset(), frozenset(), (), Q(1))
    return results


class FunctionalSum:
    """A formal rational combination of formal products of integral
    functionals; the value class of star-products of functionals."""

    __slots__ = ("terms", "m")

    def __init__(self, terms=(), m: int = 1):
        # terms: iterable of (coefficient, tuple of densities); a term with
        # a literally zero density is the zero functional and is dropped
        canon = {}
        for coef, densities in terms:
            coef = Q(coef)
            if not coef:
                continue
            ds = [as_poly(d) for d in densities]
            if any(d.is_zero() for d in ds):
                continue
            key = tuple(sorted(ds, key=lambda d: d.sort_key()))
            acc = canon.get(key, Q(0)) + coef
            if acc:
                canon[key] = acc
            else:
                canon.pop(key, None)
        self.terms = canon
        self.m = m

    @staticmethod
    def of(F: LocalFunctional) -> "FunctionalSum":
        return FunctionalSum([(Q(1), (F.density,))], F.m)

    def __add__(self, other):
        if not isinstance(other, FunctionalSum):
            return NotImplemented
        return FunctionalSum(
            [(c, k) for k, c in self.terms.items()]
            + [(c, k) for k, c in other.terms.items()],
            self.m,
        )

    def __neg__(self):
        return FunctionalSum([(-c, k) for k, c in self.terms.items()], self.m)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        return FunctionalSum(
            [(c * Q(scalar), k) for k, c in self.terms.items()], self.m
        )

    __rmul__ = __mul__

    def sole_density(self) -> DiffPoly:
        """The combined density, when every term is a single integral."""
        acc = DiffPoly.zero()
        for key, coef in self.terms.items():
            if len(key) != 1:
                raise StarfieldError("value is a genuine sum of functional products")
            acc = acc + coef * key[0]
        return acc

    def densities(self):
        return sorted({d for key in self.terms for d in key},
                      key=lambda d: d.sort_key())

    def is_strictly_zero(self) -> bool:
        """Zero with every density taken literally (no integrations by parts)."""
        return not self.terms

    def is_zero(self) -> Verdict:
        """Whether the value is the zero functional.

        Each factor is fingerprinted by its stacked Euler derivatives (for
        a one-dimensional base this separates the classes of functionals
        exactly); terms expand multilinearly in a common basis of these
        fingerprints and the symmetric-algebra coefficients must cancel.
        """
        if not self.terms:
            return Verdict(True, complete=True)
        dens = self.densities()
        fingerprints = {}
        for d in dens:
            vec = {}
            for kind, index in sorted(d.fields()):
                e = euler(d, Gen(kind, index))
                for mono, c in e.terms.items():
                    vec[(kind, index, mono)] = c
            fingerprints[d] = vec
        # greedy elimination into a common basis with recorded coordinates
        basis = []  # list of (pivot key, vector)
        coords = {}
        for d in dens:
            vec = dict(fingerprints[d])
            coeffs = [Q(0)] * len(basis)
            for bi, (pivot, bvec) in enumerate(basis):
                f = vec.get(pivot)
                if f:
                    coeffs[bi] = f
                    for kkey, cval in bvec.items():
                        acc = vec.get(kkey, Q(0)) - f * cval
                        if acc:
                            vec[kkey] = acc
                        else:
                            vec.pop(kkey, None)
            if vec:
                pivot = min(vec, key=repr)
                pval = vec[pivot]
                bvec = {kk: cc / pval for kk, cc in vec.items()}
                basis.append((pivot, bvec))
                coeffs.append(pval)
            coords[d] = coeffs
        # expand products multilinearly over the basis symbols
        expanded = {}
        for key, coef in self.terms.items():
            partial = {(): coef}
            for d in key:
                cs = coords[d]
                nxt = {}
                for mono, c in partial.items():
                    for bi, cb in enumerate(cs):
                        if not cb:
                            continue
                        nmono = tuple(sorted(mono + (bi,)))
                        acc = nxt.get(nmono, Q(0)) + c * cb
                        if acc:
                            nxt[nmono] = acc
                        else:
                            nxt.pop(nmono, None)
                partial = nxt
                if not partial:
                    break
            for mono, c in partial.items():
                acc = expanded.get(mono, Q(0)) + c
                if acc:
                    expanded[mono] = acc
                else:
                    expanded.pop(mono, None)
        return Verdict(not expanded, complete=(self.m == 1))


def _obj_of(F: LocalFunctional):
    return (Comp.of_density(F.density),)


def _sum_of_objs(terms, m: int) -> FunctionalSum:
    return FunctionalSum(
        [(coef, tuple(c.evaluate() for c in obj)) for coef, obj in terms], m
    )


def var_moyal(A: HamiltonianOperator, F: LocalFunctional, G: LocalFunctional,
              K: int):
    """The variational Moyal star-product F * G through order K.

    Returns one FunctionalSum per order of the deformation parameter;
    order 0 is the formal product F x G and order 1 reproduces the
    variational bracket up to a total divergence.
    """
    _require_jet_free(A)
    out = []
    for k in range(K + 1):
        terms = _star_terms(_obj_of(F), _obj_of(G), A, k)
        scale = Q(1, factorial(k))
        out.append(_sum_of_objs([(c * scale, obj) for c, obj in terms], A.m))
    return out


def var_associator(A: HamiltonianOperator, F: LocalFunctional,
                   G: LocalFunctional, H: LocalFunctional, K: int):
    """(F * G) * H - F * (G * H) order by order through K.

    Inner star-products keep their total-derivative transports delayed, so
    outer partial derivatives act on the bare densities; each order is a
    FunctionalSum whose vanishing as a functional is the associativity
    statement."""
    _require_jet_free(A)
    orders = [[] for _ in range(K + 1)]
    objF, objG, objH = _obj_of(F), _obj_of(G), _obj_of(H)
    for q in range(K + 1):
        inner_left = _star_terms(objF, objG, A, q)
        inner_right = _star_terms(objG, objH, A, q)
        for p in range(K + 1 - q):
            scale = Q(1, factorial(q) * factorial(p))
            for ci, obj_in in inner_left:
                for cp, obj_out in _star_terms(obj_in, objH, A, p):
                    orders[q + p].append((scale * ci * cp, obj_out))
            for ci, obj_in in inner_right:
                for cp, obj_out in _star_terms(objF, obj_in, A, p):
                    orders[q + p].append((-scale * ci * cp, obj_out))
    return [_sum_of_objs(terms, A.m) for terms in orders]
