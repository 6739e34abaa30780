"""Unique games built from group-valued edge constraints.

An instance assigns to every edge a permutation of a fixed alphabet; an
assignment of symbols to vertices scores the edge-weighted fraction of
constraints it satisfies. Instances arising from a group cochain through a
point action are exactly the ones this library studies: coboundary
cochains yield strongly satisfiable instances (one satisfying assignment
per symbol, jointly covering the alphabet at every vertex), and coboundary
expansion turns near-cocycles into near-satisfying assignments.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .cochain import Cochain, decode_coboundary, delta, weight
from .complexes import PureComplex, WeightedGraph, canonical_face
from .cones import Cone, cone_decode
from .gk import GKDecomposition, brute_closest_coboundary, gk_correct
from .groups import FiniteGroup, cyclic, sym

__all__ = [
    "UGInstance",
    "Assignment",
    "from_cochain",
    "to_cochain",
    "value",
    "is_strongly_satisfiable",
    "StrongSatResult",
    "SolveReport",
    "solve_on_expander",
    "affine_linear_generator",
]


@dataclass(frozen=True)
class Assignment:
    symbols: dict  # vertex -> alphabet symbol


class UGInstance:
    """Permutation constraints over a weighted graph.

    The constraint on the stored edge (u, v) with u < v is a permutation p
    read as: the edge is satisfied by h when p[h(v)] = h(u). The reverse
    orientation uses the inverse permutation, so satisfaction is
    orientation-free.
    """

    def __init__(self, graph: WeightedGraph, alphabet_size: int,
                 constraints, source=None):
        self.graph = graph
        self.alphabet_size = int(alphabet_size)
        if self.alphabet_size < 1:
            raise ValueError("empty alphabet")
        ident = tuple(range(self.alphabet_size))
        self.constraints = {}
        for e, p in dict(constraints).items():
            e = canonical_face(e)
            p = tuple(p)
            if tuple(sorted(p)) != ident:
                raise ValueError(f"constraint on {e} is not a permutation")
            self.constraints[e] = p
        missing = set(graph.edges) - set(self.constraints)
        extra = set(self.constraints) - set(graph.edges)
        if missing or extra:
            raise ValueError("constraints must cover the graph edges "
                             f"exactly (missing {sorted(missing)[:3]}, "
                             f"extra {sorted(extra)[:3]})")
        self.source = source


def _validate_action(G: FiniteGroup, alphabet_size: int):
    if not G.has_action:
        raise ValueError("group carries no point action")
    pairs = itertools.product(range(G.order), repeat=2)
    if G.order > 48:
        rng = random.Random(0)
        pairs = ((rng.randrange(G.order), rng.randrange(G.order))
                 for _ in range(1000))
    for a, b in pairs:
        ab = G.mul(a, b)
        for x in range(alphabet_size):
            if G.act(ab, x) != G.act(a, G.act(b, x)):
                raise ValueError("action is not a homomorphism")


def from_cochain(f: Cochain, alphabet_size: int) -> UGInstance:
    """Instance whose constraint on each edge is the acting permutation of
    the cochain's value there."""
    if f.degree != 1:
        raise ValueError("constraints come from degree-1 cochains")
    G = f.group
    _validate_action(G, alphabet_size)
    graph = f.X.underlying_graph()
    constraints = {}
    for e in graph.edges:
        val = f(*e)
        constraints[e] = tuple(G.act(val, x) for x in range(alphabet_size))
    return UGInstance(graph, alphabet_size, constraints, source=f)


def to_cochain(U: UGInstance, X: PureComplex = None) -> Cochain:
    """The instance's constraints as a cochain over the symmetric group on
    its alphabet. Uses the given complex (whose edges must carry exactly
    the instance's graph) or a one-dimensional one built from the graph."""
    s = U.alphabet_size
    G = sym(s)
    perm_index = {tuple(G.act(e, x) for x in range(s)): e
                  for e in range(G.order)}
    if X is None:
        X = PureComplex(U.graph.vertex_count, 1,
                        sorted(U.graph.edges.items()))
    else:
        edges = {e for e, _ in X.faces(1)}
        if edges != set(U.graph.edges):
            raise ValueError("complex edges do not match the instance")
    vals = {e: perm_index[p] for e, p in U.constraints.items()}
    return Cochain(X, 1, G, vals)


def value(U: UGInstance, h) -> Fraction:
    """Edge-weighted probability that the assignment satisfies a constraint."""
    symbols = h.symbols if isinstance(h, Assignment) else dict(h)
    total = Fraction(0)
    for (u, v), w in U.graph.edges.items():
        if u not in symbols or v not in symbols:
            raise ValueError(f"assignment misses an endpoint of ({u},{v})")
        a, b = symbols[u], symbols[v]
        if not (0 <= a < U.alphabet_size and 0 <= b < U.alphabet_size):
            raise ValueError(f"symbol outside the alphabet on ({u},{v})")
        if U.constraints[(u, v)][b] == a:
            total += w
    return total


@dataclass(frozen=True)
class StrongSatResult:
    family: object  # dict symbol -> Assignment, or None
    witness: object  # inconsistent loop when not strongly satisfiable


def _edge_components(n: int, edges):
    """Connected components spanned by the given edges, zero weight included,
    matching the reach of breadth-first decoding."""
    adj = {v: [] for v in range(n)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = set()
    comps = []
    for s in range(n):
        if s in seen:
            continue
        comp, queue = [], [s]
        seen.add(s)
        while queue:
            v = queue.pop()
            comp.append(v)
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
        comps.append(sorted(comp))
    return comps


def is_strongly_satisfiable(U: UGInstance) -> StrongSatResult:
    """Decode the constraint cochain; a decoded vertex cochain turns into
    one satisfying assignment per symbol, jointly covering the alphabet at
    every vertex. Otherwise the inconsistent loop is returned."""
    f = to_cochain(U)
    G = f.group
    merged = {}
    for comp in _edge_components(U.graph.vertex_count, U.graph.edges):
        g, witness = decode_coboundary(f, comp[0])
        if g is None:
            return StrongSatResult(family=None, witness=witness)
        for u in comp:
            merged[u] = g.values.get((u,), 0)
    s = U.alphabet_size
    family = {}
    for sigma in range(s):
        symbols = {u: G.act(merged[u], sigma)
                   for u in range(U.graph.vertex_count)}
        h = Assignment(symbols=symbols)
        if value(U, h) != 1:
            raise AssertionError("decoded assignment is not satisfying")
        family[sigma] = h
    for u in range(U.graph.vertex_count):
        seen = {family[sigma].symbols[u] for sigma in range(s)}
        if seen != set(range(s)):
            raise AssertionError(f"family does not cover the alphabet at {u}")
    return StrongSatResult(family=family, witness=None)


@dataclass(frozen=True)
class SolveReport:
    assignment: Assignment
    value: Fraction
    epsilon: Fraction  # weight of the constraint cochain's coboundary
    beta: Fraction  # certified expansion of the carrying complex
    certified: Fraction  # 1 - epsilon/beta
    decoder: str


def solve_on_expander(U: UGInstance, X: PureComplex, beta,
                      decoder="brute") -> SolveReport:
    """Decode an assignment through a coboundary-expansion certificate.

    The constraint cochain is read on the 2-complex carrying the instance's
    graph; its coboundary weight epsilon and the certified expansion beta
    of the complex yield the guarantee value >= 1 - epsilon/beta whenever
    the decoder finds a nearest coboundary. Decoders: "brute" (exact
    enumeration), ("cone", C), or ("gk", D).
    """
    beta = Fraction(beta)
    if beta <= 0:
        raise ValueError("expansion certificate must be positive")
    f = to_cochain(U, X)
    G = f.group
    eps = weight(delta(f))
    if decoder == "brute":
        g = brute_closest_coboundary(X, f)
        tag = "brute"
    elif isinstance(decoder, tuple) and decoder[0] == "cone":
        cone = decoder[1]
        if not isinstance(cone, Cone):
            raise ValueError("cone decoder needs a Cone")
        g = cone_decode(cone, f)
        tag = "cone"
    elif isinstance(decoder, tuple) and decoder[0] == "gk":
        D = decoder[1]
        if not isinstance(D, GKDecomposition):
            raise ValueError("gk decoder needs a GKDecomposition")
        g, _ = gk_correct(D, f, G)
        tag = "gk"
    else:
        raise ValueError(f"unknown decoder {decoder!r}")
    symbols = {u: G.act(g.values.get((u,), 0), 0)
               for u in range(U.graph.vertex_count)}
    h = Assignment(symbols=symbols)
    val = value(U, h)
    return SolveReport(assignment=h, value=val, epsilon=eps, beta=beta,
                       certified=1 - eps / beta, decoder=tag)


def affine_linear_generator(X: PureComplex, m: int, planted,
                            rate, seed) -> UGInstance:
    """Planted shift instance over the integers mod m: constraints come from
    the planted assignment's coboundary, then a seeded fraction of edges is
    replaced with uniformly random shifts. Deterministic in the seed."""
    if m < 2:
        raise ValueError("alphabet must have at least two symbols")
    rate = Fraction(rate)
    if not 0 <= rate <= 1:
        raise ValueError("corruption rate must lie in [0, 1]")
    G = cyclic(m)
    if isinstance(planted, Cochain):
        g = planted
    else:
        g = Cochain(X, 0, G, {t: planted[t[0]] % m for t, _ in X.faces(0)})
    f = delta(g)
    rng = random.Random(seed)
    vals = dict(f.values)
    for e in sorted(vals):
        if rng.random() < rate:
            vals[e] = rng.randrange(m)
    corrupted = Cochain(X, 1, G, vals)
    return from_cochain(corrupted, m)
