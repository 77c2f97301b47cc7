"""Reversible random walks on measured graphs.

A walk is stored by its symmetric positive edge conductance a; the stationary
measure mu(u) = sum_v a(u,v) and the kernel r(u,v) = a(u,v)/mu(u) are derived
views.  Detailed balance mu(u) r(u,v) = a(u,v) = a(v,u) = mu(v) r(v,u) and
unit row sums then hold identically in rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping

from .cheeger import DEFAULT_CAP, cheeger_conductance, cheeger_vertex
from .graphs import GraphStats, MeasuredGraph, stats


class WalkError(ValueError):
    """Conductance data does not define a reversible walk on the graph."""


@dataclass(frozen=True)
class ReversibleWalk:
    """Reversible random walk given by a conductance on the edges of a graph.

    a maps each edge (u, v) with u < v to a positive rational; mu is the
    per-vertex sum of incident conductances.
    """

    graph: MeasuredGraph
    a: Mapping[tuple[int, int], Fraction]
    mu: tuple[Fraction, ...]

    def conductance(self, u: int, v: int) -> Fraction:
        key = (u, v) if u < v else (v, u)
        return self.a.get(key, Fraction(0))

    def r(self, u: int, v: int) -> Fraction:
        """Transition kernel r(u, v) = a(u, v) / mu(u)."""
        return self.conductance(u, v) / self.mu[u]

    @cached_property
    def total_mu(self) -> Fraction:
        return sum(self.mu, Fraction(0))

    @cached_property
    def total_a(self) -> Fraction:
        """Area a(E) of the full edge set."""
        return sum(self.a.values(), Fraction(0))

    def area(self, edges) -> Fraction:
        """Area a(D) of a set of edges (any orientation)."""
        total = Fraction(0)
        for u, v in edges:
            key = (u, v) if u < v else (v, u)
            if key not in self.a:
                raise WalkError(f"({u},{v}) is not an edge of the walk's graph")
            total += self.a[key]
        return total


def from_conductance(graph: MeasuredGraph, a) -> ReversibleWalk:
    """Build the reversible walk with the given edge conductance.

    a is a mapping keyed by edge pairs (either orientation) or a callable
    (u, v) -> Fraction.  It must be defined and positive exactly on the
    edges of the graph; a vertex with no incident conductance would have
    mu = 0 and is rejected.
    """
    values: dict[tuple[int, int], Fraction] = {}
    if callable(a):
        for u, v in graph.edges:
            values[(u, v)] = Fraction(a(u, v))
    else:
        for key, val in a.items():
            u, v = key
            canon = (u, v) if u < v else (v, u)
            if canon in values and values[canon] != Fraction(val):
                raise WalkError(f"conflicting conductance for edge {canon}")
            values[canon] = Fraction(val)
    edge_set = set(graph.edges)
    for key in values:
        if key not in edge_set:
            raise WalkError(f"conductance given for non-edge {key}")
    for e in graph.edges:
        if e not in values:
            raise WalkError(f"missing conductance for edge {e}")
        if values[e] <= 0:
            raise WalkError(f"conductance on edge {e} must be positive, got {values[e]}")
    mu = [Fraction(0)] * graph.n
    for (u, v), val in values.items():
        mu[u] += val
        mu[v] += val
    for v, m in enumerate(mu):
        if m == 0:
            raise WalkError(f"vertex {graph.labels[v]!r} is isolated (mu = 0)")
    return ReversibleWalk(graph=graph, a=values, mu=tuple(mu))


def auxiliary_walk(graph: MeasuredGraph) -> ReversibleWalk:
    """The canonical walk of a full-support measured graph: a(u,v) = m(u) + m(v).

    For the counting measure this is the simple walk with mu = 2 * valency.
    """
    if not all(m > 0 for m in graph.measure):
        raise WalkError("auxiliary walk needs a measure with full support")
    if not graph.connected:
        raise WalkError("auxiliary walk needs a connected graph")
    return from_conductance(graph, lambda u, v: graph.measure[u] + graph.measure[v])


@dataclass(frozen=True)
class AuxiliaryWalkReport:
    """Exact verification of the defining and derived properties of the
    auxiliary walk on a bounded-ratio measured graph.

    conductance_matches   a(u,v) = m(u) + m(v) on every edge
    support_matches       r(u,v) > 0 exactly on edges
    measure_sandwich      s/(K(1+s)) mu(u) <= m(u) <= mu(u)/(1+s) for all u
    cheeger_bound_holds   conductance Cheeger constant >= c s / K
    """

    conductance_matches: bool
    support_matches: bool
    measure_sandwich: bool
    cheeger_bound_holds: bool
    conductance_cheeger: Fraction
    cheeger_floor: Fraction
    vertex_cheeger: Fraction
    graph_stats: GraphStats

    @property
    def all_hold(self) -> bool:
        return (
            self.conductance_matches
            and self.support_matches
            and self.measure_sandwich
            and self.cheeger_bound_holds
        )


def verify_auxiliary_walk(
    graph: MeasuredGraph,
    walk: ReversibleWalk | None = None,
    cap: int = DEFAULT_CAP,
) -> AuxiliaryWalkReport:
    """Check the four auxiliary-walk conditions in exact rational arithmetic.

    walk defaults to auxiliary_walk(graph); passing a different walk checks
    whether it satisfies the same conditions.
    """
    if walk is None:
        walk = auxiliary_walk(graph)
    st = stats(graph)
    if st.ratio_bound is None:
        raise WalkError("measure-ratio bound undefined (zero-measure edge endpoint)")
    s = st.ratio_bound
    big_k = st.max_valency

    conductance_matches = all(
        walk.a[(u, v)] == graph.measure[u] + graph.measure[v] for u, v in graph.edges
    )
    support_matches = set(walk.a) == set(graph.edges) and all(v > 0 for v in walk.a.values())
    lo = s / (big_k * (1 + s))
    hi = Fraction(1, 1) / (1 + s)
    measure_sandwich = all(
        lo * walk.mu[u] <= graph.measure[u] <= hi * walk.mu[u] for u in range(graph.n)
    )
    vertex_cert = cheeger_vertex(graph, cap=cap)
    cond_cert = cheeger_conductance(walk, graph.measure, cap=cap)
    floor = vertex_cert.value * s / big_k
    return AuxiliaryWalkReport(
        conductance_matches=conductance_matches,
        support_matches=support_matches,
        measure_sandwich=measure_sandwich,
        cheeger_bound_holds=cond_cert.value >= floor,
        conductance_cheeger=cond_cert.value,
        cheeger_floor=floor,
        vertex_cheeger=vertex_cert.value,
        graph_stats=st,
    )


def heat_kernel_measure(graph: MeasuredGraph, x0: int, k: int) -> tuple[Fraction, ...]:
    """Distribution of the simple random walk (uniform over neighbors) after
    k steps from x0, as an exact probability vector."""
    if not 0 <= x0 < graph.n:
        raise IndexError(f"vertex {x0} out of range 0..{graph.n - 1}")
    if k < 0:
        raise ValueError("step count must be nonnegative")
    if not graph.connected:
        raise WalkError("heat kernel measure needs a connected graph")
    p = [Fraction(0)] * graph.n
    p[x0] = Fraction(1)
    for _ in range(k):
        if graph.n == 1:
            break  # a single vertex has nowhere to go
        nxt = [Fraction(0)] * graph.n
        for u in range(graph.n):
            if p[u] == 0:
                continue
            share = p[u] / graph.degree(u)
            for w in graph.neighbors[u]:
                nxt[w] += share
        p = nxt
    return tuple(p)
