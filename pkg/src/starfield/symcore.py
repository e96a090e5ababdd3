"""Exact graded polynomial algebra underlying the whole engine.

Values are polynomials over four kinds of generators:

* even jet generators   ``u^i_sigma``  (commuting),
* odd jet generators    ``xi_{j,tau}`` (anticommuting, square to zero),
* base coordinates      ``x^a``        (commuting),
* at most one exponential atom ``exp(sum_i lam_i u^i)`` per monomial,
  with rational ``lam_i`` and undifferentiated fields only.

All coefficients are exact rationals (:class:`fractions.Fraction`); no
floating point enters anywhere.  Every value is immutable and stored in a
canonical form, so equality of values is equality of term maps.  Odd
generators are kept in a fixed canonical order with the Koszul sign
absorbed into the coefficient.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

Q = Fraction


class StarfieldError(Exception):
    """Base class for engine errors."""


class ParityError(StarfieldError):
    """A substitution binds an odd generator to an even value or vice versa."""


class SubstitutionError(StarfieldError):
    """A substitution cannot be performed on this expression."""


class ExpressionSizeError(StarfieldError):
    """An intermediate expression exceeded the monomial cap."""


def _max_terms() -> int:
    try:
        return int(os.environ.get("STARFIELD_MAX_TERMS", "1000000"))
    except ValueError:
        return 1000000


_KIND_RANK = {"x": 0, "u": 1, "xi": 2}


@dataclass(frozen=True, slots=True)
class Gen:
    """A single generator: even jet ``u``, odd jet ``xi`` or base coordinate ``x``.

    ``mindex`` is the multi-index of total derivatives, stored as a sorted
    tuple of base directions (total derivatives commute, so only the
    multiset matters).  Base coordinates carry an empty multi-index.
    """

    kind: str
    index: int
    mindex: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in _KIND_RANK:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.index < 1:
            raise ValueError("generator indices are 1-based")
        if self.kind == "x" and self.mindex:
            raise ValueError("base coordinates carry no multi-index")
        if tuple(sorted(self.mindex)) != self.mindex:
            raise ValueError("multi-index must be sorted")

    @property
    def parity(self) -> int:
        return 1 if self.kind == "xi" else 0

    @property
    def key(self):
        return (_KIND_RANK[self.kind], self.index, self.mindex)

    def raised(self, direction: int) -> "Gen":
        """The generator with one extra derivative in ``direction``."""
        if self.kind == "x":
            raise ValueError("base coordinates are not jet generators")
        mind = tuple(sorted(self.mindex + (direction,)))
        return Gen(self.kind, self.index, mind)


def u(index: int, mindex: Iterable[int] = ()) -> Gen:
    return Gen("u", index, tuple(sorted(mindex)))


def xi(index: int, mindex: Iterable[int] = ()) -> Gen:
    return Gen("xi", index, tuple(sorted(mindex)))


def xcoord(direction: int) -> Gen:
    return Gen("x", direction)


# A monomial is (evens, odds, lam):
#   evens: tuple of (Gen, exponent), sorted by generator key, exponents > 0,
#          kinds "u" and "x" only;
#   odds:  tuple of distinct odd Gens in canonical (sorted) order;
#   lam:   tuple of (field index, Fraction), sorted, nonzero entries only --
#          the exponent vector of the monomial's exponential atom.
_ONE_MONO = ((), (), ())


def _mono_key(mono):
    evens, odds, lam = mono
    return (
        tuple((g.key, e) for g, e in evens),
        tuple(g.key for g in odds),
        lam,
    )


def _merge_evens(e1, e2):
    if not e1:
        return e2
    if not e2:
        return e1
    out = {}
    for g, e in e1:
        out[g] = e
    for g, e in e2:
        out[g] = out.get(g, 0) + e
    return tuple(sorted(((g, e) for g, e in out.items() if e), key=lambda t: t[0].key))


def _merge_odds(o1, o2):
    """Merge two canonical odd sequences; return (merged, sign) or None if zero."""
    if not o1:
        return o2, 1
    if not o2:
        return o1, 1
    out = []
    sign = 1
    i = j = 0
    n1, n2 = len(o1), len(o2)
    while i < n1 and j < n2:
        a, b = o1[i].key, o2[j].key
        if a == b:
            return None
        if a < b:
            out.append(o1[i])
            i += 1
        else:
            if (n1 - i) % 2:
                sign = -sign
            out.append(o2[j])
            j += 1
    out.extend(o1[i:])
    out.extend(o2[j:])
    return tuple(out), sign


def _merge_lam(l1, l2):
    if not l1:
        return l2
    if not l2:
        return l1
    out = dict(l1)
    for i, c in l2:
        out[i] = out.get(i, Q(0)) + c
    return tuple(sorted((i, c) for i, c in out.items() if c))


def _mul_mono(m1, m2):
    """Product of two monomials: (monomial, sign) or None if it vanishes."""
    merged = _merge_odds(m1[1], m2[1])
    if merged is None:
        return None
    odds, sign = merged
    return (_merge_evens(m1[0], m2[0]), odds, _merge_lam(m1[2], m2[2])), sign


class DiffPoly:
    """An exact graded polynomial, stored as a canonical monomial->coefficient map."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | None = None):
        # terms are trusted to be canonical; use the constructors below.
        t = dict(terms) if terms else {}
        if len(t) > _max_terms():
            raise ExpressionSizeError(
                f"expression has {len(t)} monomials (cap {_max_terms()})"
            )
        object.__setattr__(self, "_terms", t)
        object.__setattr__(self, "_hash", None)

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero() -> "DiffPoly":
        return _ZERO

    @staticmethod
    def one() -> "DiffPoly":
        return _ONE

    @staticmethod
    def const(c) -> "DiffPoly":
        c = Q(c)
        if not c:
            return _ZERO
        return DiffPoly({_ONE_MONO: c})

    @staticmethod
    def gen(g: Gen) -> "DiffPoly":
        if g.parity:
            mono = ((), (g,), ())
        else:
            mono = (((g, 1),), (), ())
        return DiffPoly({mono: Q(1)})

    @staticmethod
    def exp_atom(lam: Mapping[int, Fraction]) -> "DiffPoly":
        """The atom exp(sum_i lam_i * u^i) over undifferentiated fields."""
        tup = tuple(sorted((i, Q(c)) for i, c in lam.items() if Q(c)))
        if not tup:
            return _ONE
        return DiffPoly({((), (), tup): Q(1)})

    # -- basic queries ----------------------------------------------------

    @property
    def terms(self):
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def constant_value(self):
        """The rational value, if the polynomial is a constant; else None."""
        if not self._terms:
            return Q(0)
        if len(self._terms) == 1 and _ONE_MONO in self._terms:
            return self._terms[_ONE_MONO]
        return None

    def parity(self):
        """0 or 1 for homogeneous values (zero counts as even), None if mixed."""
        ps = {len(mono[1]) % 2 for mono in self._terms}
        if not ps:
            return 0
        if len(ps) == 1:
            return ps.pop()
        return None

    def degree(self):
        """Max total polynomial degree, or None when an exp atom is present."""
        deg = 0
        for evens, odds, lam in self._terms:
            if lam:
                return None
            deg = max(deg, sum(e for _, e in evens) + len(odds))
        return deg

    def generators(self):
        """All jet/base generators occurring (exp-atom fields excluded)."""
        seen = set()
        for evens, odds, _lam in self._terms:
            for g, _ in evens:
                seen.add(g)
            for g in odds:
                seen.add(g)
        return seen

    def fields(self):
        """All (kind, index) field labels occurring, including exp-atom fields."""
        out = set()
        for evens, odds, lam in self._terms:
            for g, _ in evens:
                if g.kind != "x":
                    out.add((g.kind, g.index))
            for g in odds:
                out.add((g.kind, g.index))
            for i, _ in lam:
                out.add(("u", i))
        return out

    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda kv: _mono_key(kv[0]))

    def sort_key(self):
        return tuple((_mono_key(m), c) for m, c in self.sorted_terms())

    # -- ring structure ---------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, DiffPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == DiffPoly.const(other)
        return NotImplemented

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(tuple(sorted(((_mono_key(m), c) for m, c in self._terms.items()))))
            object.__setattr__(self, "_hash", h)
        return h

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = DiffPoly.const(other)
        if not isinstance(other, DiffPoly):
            return NotImplemented
        if not self._terms:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        for mono, c in other._terms.items():
            acc = out.get(mono, Q(0)) + c
            if acc:
                out[mono] = acc
            else:
                out.pop(mono, None)
        return DiffPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = DiffPoly.const(other)
        if not isinstance(other, DiffPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Q(other)
            if not c:
                return _ZERO
            return DiffPoly({m: co * c for m, co in self._terms.items()})
        if not isinstance(other, DiffPoly):
            return NotImplemented
        out = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                prod = _mul_mono(m1, m2)
                if prod is None:
                    continue
                mono, sign = prod
                acc = out.get(mono, Q(0)) + c1 * c2 * sign
                if acc:
                    out[mono] = acc
                else:
                    out.pop(mono, None)
        return DiffPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = Q(other)
        return self * (1 / c)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomial")
        acc = _ONE
        for _ in range(n):
            acc = acc * self
        return acc

    # -- derivations ------------------------------------------------------

    def partial(self, g: Gen, side: str = "left") -> "DiffPoly":
        """Partial derivative by a generator.

        For even generators this is the ordinary partial derivative; atoms
        exp(sum lam_i u^i) are differentiated through their exponent when
        ``g`` is an undifferentiated field.  For odd generators the left
        (resp. right) Grassmann derivative is taken.
        """
        if side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        out = {}

        def emit(mono, c):
            acc = out.get(mono, Q(0)) + c
            if acc:
                out[mono] = acc
            else:
                out.pop(mono, None)

        if g.parity == 0:
            undiff = g.kind == "u" and not g.mindex
            for (evens, odds, lam), c in self._terms.items():
                for pos, (gg, e) in enumerate(evens):
                    if gg == g:
                        if e == 1:
                            rest = evens[:pos] + evens[pos + 1 :]
                        else:
                            rest = evens[:pos] + ((gg, e - 1),) + evens[pos + 1 :]
                        emit((rest, odds, lam), c * e)
                        break
                if undiff and lam:
                    for i, lc in lam:
                        if i == g.index:
                            emit((evens, odds, lam), c * lc)
                            break
        else:
            for (evens, odds, lam), c in self._terms.items():
                for pos, gg in enumerate(odds):
                    if gg == g:
                        rest = odds[:pos] + odds[pos + 1 :]
                        if side == "left":
                            sign = -1 if pos % 2 else 1
                        else:
                            sign = -1 if (len(odds) - 1 - pos) % 2 else 1
                        emit((evens, rest, lam), c * sign)
                        break
        return DiffPoly(out)

    def substitute(self, bindings: Mapping[Gen, "DiffPoly"]) -> "DiffPoly":
        """Simultaneous substitution of generators by values, re-canonicalized.

        Bindings must preserve parity.  Substituting a field that occurs in
        an exponential atom's exponent is rejected.
        """
        if not bindings:
            return self
        for g, val in bindings.items():
            p = val.parity()
            if p is None or p != g.parity:
                raise ParityError(f"binding for {g} does not preserve parity")
        bound_fields = {g.index for g in bindings if g.kind == "u" and not g.mindex}
        acc_total = _ZERO
        for (evens, odds, lam), c in self._terms.items():
            for i, _ in lam:
                if i in bound_fields:
                    raise SubstitutionError(
                        "cannot substitute a field occurring in an exp atom"
                    )
            acc = DiffPoly.const(c)
            for g, e in evens:
                val = bindings.get(g)
                if val is not None:
                    acc = acc * val ** e
                else:
                    acc = acc * DiffPoly({(((g, e),), (), ()): Q(1)})
            for g in odds:
                val = bindings.get(g)
                acc = acc * (val if val is not None else DiffPoly.gen(g))
            if lam:
                acc = acc * DiffPoly({((), (), lam): Q(1)})
            acc_total = acc_total + acc
        return acc_total

    def __repr__(self):
        from .cli import print_expression

        return f"DiffPoly({print_expression(self)})"


_ZERO = DiffPoly({})
_ONE = DiffPoly({_ONE_MONO: Q(1)})


def as_poly(value) -> DiffPoly:
    """Coerce ints/Fractions to DiffPoly; pass DiffPoly through."""
    if isinstance(value, DiffPoly):
        return value
    return DiffPoly.const(value)


class HbarSeries:
    """A finite deformation series: coefficients of hbar^0 .. hbar^K.

    The deformation parameter is a series index only and never occurs
    inside a coefficient.  Binary operations truncate to the smaller of
    the two orders.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[DiffPoly]):
        cs = tuple(as_poly(c) for c in coeffs)
        if not cs:
            raise ValueError("a series needs at least the hbar^0 coefficient")
        object.__setattr__(self, "coeffs", cs)

    @staticmethod
    def constant(p, order: int) -> "HbarSeries":
        return HbarSeries([as_poly(p)] + [DiffPoly.zero()] * order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> DiffPoly:
        return self.coeffs[k]

    def truncate(self, order: int) -> "HbarSeries":
        if order >= self.order:
            return self
        return HbarSeries(self.coeffs[: order + 1])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, HbarSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        if isinstance(other, (int, Fraction, DiffPoly)):
            other = HbarSeries.constant(other, self.order)
        k = min(self.order, other.order)
        return HbarSeries([self.coeffs[i] + other.coeffs[i] for i in range(k + 1)])

    __radd__ = __add__

    def __neg__(self):
        return HbarSeries([-c for c in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, DiffPoly)):
            other = HbarSeries.constant(other, self.order)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return HbarSeries([c * other for c in self.coeffs])
        if isinstance(other, DiffPoly):
            return HbarSeries([c * other for c in self.coeffs])
        if not isinstance(other, HbarSeries):
            return NotImplemented
        k = min(self.order, other.order)
        out = [DiffPoly.zero()] * (k + 1)
        for i in range(k + 1):
            for j in range(k + 1 - i):
                out[i + j] = out[i + j] + self.coeffs[i] * other.coeffs[j]
        return HbarSeries(out)

    __rmul__ = __mul__

    def __repr__(self):
        from .cli import print_series

        return f"HbarSeries({print_series(self)})"
