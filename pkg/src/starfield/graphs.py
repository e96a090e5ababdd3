"""Combinatorics of oriented bivector graphs and their Leibniz extensions.

A graph has ``s`` sinks (vertices 0..s-1, out-degree zero) and ``k``
internal vertices (s..s+k-1), each internal vertex emitting an ordered
pair of edges.  Tadpoles and repeated targets within one vertex are
forbidden.  The edge order encodes the index order of the skew bivector
installed at the vertex, so swapping a pair costs a sign.

Leibniz graphs additionally carry trivalent Jacobiator vertices; they
expand into signed sums of ordinary graphs by the cyclic three-term
resolution of the Jacobiator, with incoming arrows distributed over the
two replacement vertices by the Leibniz rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product

from .symcore import Q, StarfieldError


class GraphError(StarfieldError):
    """An inadmissible or malformed graph."""


@dataclass(frozen=True, slots=True)
class KontsevichGraph:
    """Oriented graph with ordered-edge internal vertices over s sinks."""

    sinks: int
    edges: tuple[tuple[int, int], ...]

    @property
    def internal(self) -> int:
        return len(self.edges)

    @property
    def vertex_count(self) -> int:
        return self.sinks + len(self.edges)

    def check(self):
        if self.sinks < 1:
            raise GraphError("at least one sink is required")
        n = self.vertex_count
        for v, (a, b) in enumerate(self.edges, start=self.sinks):
            if not (0 <= a < n and 0 <= b < n):
                raise GraphError(f"edge target out of range at vertex {v}")
            if a == v or b == v:
                raise GraphError(f"tadpole at vertex {v}")
            if a == b:
                raise GraphError(f"double edge at vertex {v}")
        return self


def is_admissible(g: KontsevichGraph) -> bool:
    try:
        g.check()
    except GraphError:
        return False
    return True


def in_degrees(g: KontsevichGraph):
    degs = [0] * g.vertex_count
    for a, b in g.edges:
        degs[a] += 1
        degs[b] += 1
    return degs


def normalize(g: KontsevichGraph):
    """Canonical representative and the sign relating g to it.

    Each internal vertex's pair is sorted ascending (one sign per swap,
    by skew-symmetry of the installed bivector) and internal vertices are
    relabelled, sign-free, to the lexicographically minimal edge list.
    """
    g.check()
    s, k = g.sinks, g.internal
    best = None
    for perm in permutations(range(k)):
        relabel = list(range(s)) + [s + perm[i] for i in range(k)]
        new_edges = [None] * k
        sign = 1
        for i, (a, b) in enumerate(g.edges):
            a2, b2 = relabel[a], relabel[b]
            if a2 > b2:
                a2, b2 = b2, a2
                sign = -sign
            new_edges[perm[i]] = (a2, b2)
        cand = (tuple(new_edges), sign)
        if best is None or cand < best:
            best = cand
    return KontsevichGraph(s, best[0]), best[1]


def has_odd_automorphism(g: KontsevichGraph) -> bool:
    """True when some relabelling maps the graph to itself with sign -1
    (such graphs evaluate to zero at every skew bivector)."""
    s, k = g.sinks, g.internal
    seen = {}
    for perm in permutations(range(k)):
        relabel = list(range(s)) + [s + perm[i] for i in range(k)]
        new_edges = [None] * k
        sign = 1
        for i, (a, b) in enumerate(g.edges):
            a2, b2 = relabel[a], relabel[b]
            if a2 > b2:
                a2, b2 = b2, a2
                sign = -sign
            new_edges[perm[i]] = (a2, b2)
        key = tuple(new_edges)
        if key in seen and seen[key] != sign:
            return True
        seen[key] = sign
    return False


class SignedGraphSum:
    """A formal rational combination of canonical-form graphs."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        out = {}
        if terms:
            for graph, c in dict(terms).items():
                canon, sign = normalize(graph)
                acc = out.get(canon, Q(0)) + Q(c) * sign
                if acc:
                    out[canon] = acc
                else:
                    out.pop(canon, None)
        self.terms = out

    def __eq__(self, other):
        if not isinstance(other, SignedGraphSum):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    def __len__(self):
        return len(self.terms)

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: (kv[0].sinks, kv[0].edges))

    def __add__(self, other):
        out = dict(self.terms)
        for graph, c in other.terms.items():
            acc = out.get(graph, Q(0)) + c
            if acc:
                out[graph] = acc
            else:
                out.pop(graph, None)
        res = SignedGraphSum()
        res.terms = out
        return res

    def __mul__(self, c):
        res = SignedGraphSum()
        res.terms = {g: co * Q(c) for g, co in self.terms.items()}
        return res

    __rmul__ = __mul__


@dataclass(frozen=True, slots=True)
class LeibnizGraph:
    """Graph with wedge vertices and at least one trivalent Jacobiator vertex.

    Vertices are numbered sinks first (0..s-1), wedges next, Jacobiators
    last.
    """

    sinks: int
    wedges: tuple[tuple[int, int], ...]
    jacobiators: tuple[tuple[int, int, int], ...]

    @property
    def vertex_count(self) -> int:
        return self.sinks + len(self.wedges) + len(self.jacobiators)

    def check(self):
        if self.sinks < 1:
            raise GraphError("at least one sink is required")
        if not self.jacobiators:
            raise GraphError("a Leibniz graph needs at least one Jacobiator vertex")
        n = self.vertex_count
        first_jac = self.sinks + len(self.wedges)
        for v, (a, b) in enumerate(self.wedges, start=self.sinks):
            if not (0 <= a < n and 0 <= b < n):
                raise GraphError(f"edge target out of range at vertex {v}")
            if a == v or b == v:
                raise GraphError(f"tadpole at vertex {v}")
            if a == b:
                raise GraphError(f"double edge at vertex {v}")
        for v, triple in enumerate(self.jacobiators, start=first_jac):
            if len(set(triple)) != 3:
                raise GraphError("Jacobiator arrows must land on three distinct vertices")
            for t in triple:
                if not (0 <= t < n):
                    raise GraphError(f"edge target out of range at vertex {v}")
                if t == v:
                    raise GraphError("Jacobiator arrows may not land on the Jacobiator")
        return self


def expand_leibniz(L: LeibnizGraph) -> SignedGraphSum:
    """Resolve every Jacobiator vertex into the cyclic sum of two-wedge
    configurations, distributing incoming arrows by the Leibniz rule.

    The three terms follow the analytic resolution
    d_l P^{ij} P^{lk} + d_l P^{jk} P^{li} + d_l P^{ki} P^{lj}:
    in each term the differentiated copy carries the pair (t_a, t_b) of
    cyclically chosen targets and the undifferentiated copy points first
    at it and second at the remaining target.
    """
    L.check()
    s = L.sinks
    first_jac = s + len(L.wedges)

    # labelled working form: label -> ordered targets (labels)
    def lab(v):
        if v < s:
            return ("s", v)
        if v < first_jac:
            return ("w", v)
        return ("j", v)

    wedge_items = [
        (("w", s + i), [lab(a), lab(b)]) for i, (a, b) in enumerate(L.wedges)
    ]
    jac_items = [
        (("j", first_jac + i), [lab(a), lab(b), lab(c)])
        for i, (a, b, c) in enumerate(L.jacobiators)
    ]

    states = [dict(wedge_items + jac_items)]
    for jac_label, _ in jac_items:
        new_states = []
        for state in states:
            t1, t2, t3 = state[jac_label]
            incoming = [
                (v, pos)
                for v, targets in state.items()
                if v != jac_label
                for pos, t in enumerate(targets)
                if t == jac_label
            ]
            top = ("w", (jac_label, "top"))
            low = ("w", (jac_label, "low"))
            for ta, tb, tc in ((t1, t2, t3), (t2, t3, t1), (t3, t1, t2)):
                for routing in product((top, low), repeat=len(incoming)):
                    ns = {v: list(ts) for v, ts in state.items() if v != jac_label}
                    ns[top] = [ta, tb]
                    ns[low] = [top, tc]
                    for (v, pos), dest in zip(incoming, routing):
                        ns[v][pos] = dest
                    new_states.append(ns)
        states = new_states

    total = SignedGraphSum()
    for state in states:
        labels = sorted(state.keys(), key=repr)
        number = {("s", i): i for i in range(s)}
        for i, v in enumerate(labels):
            number[v] = s + i
        edges = [None] * len(labels)
        for v, (a, b) in state.items():
            edges[number[v] - s] = (number[a], number[b])
        graph = KontsevichGraph(s, tuple(edges))
        total = total + SignedGraphSum({graph: Q(1)})
    return total
