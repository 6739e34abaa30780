"""Group-valued cochains in degrees -1..2 and the coboundary maps.

Conventions, fixed once and used everywhere:

* degree 0: a map g on vertices; the coboundary on an ordered edge is
  (delta g)(v, u) = g(v) * g(u)^-1.
* degree 1: antisymmetric edge labels; the value is stored on the sorted
  orientation and f(v, u) = f(u, v)^-1. The coboundary on an ordered
  triangle is (delta f)(v, u, w) = f(v, u) * f(u, w) * f(w, v).
* degree 2: values are stored on sorted triangles. Triviality of a value is
  orientation-independent, so weights and distances read the stored
  orientation; evaluation at a permuted orientation applies the permutation
  sign (inverse on odd), which is exact for abelian coefficients and a
  convention otherwise.
* degree -1: a single value at the empty face; its coboundary is the
  constant vertex map.

Weights and distances are probabilities under the complex's face measure,
computed over canonical (sorted) faces with exact rationals.
"""
from __future__ import annotations

from fractions import Fraction

from .complexes import PureComplex, canonical_face
from .groups import FiniteGroup

__all__ = [
    "Cochain",
    "delta",
    "weight",
    "distance",
    "is_cocycle",
    "decode_coboundary",
    "gauge_shift",
    "push_homomorphism",
    "random_cochain",
]


def _perm_parity(perm) -> int:
    n = len(perm)
    seen = [False] * n
    parity = 0
    for i in range(n):
        if seen[i]:
            continue
        j, cyc = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            cyc += 1
        parity ^= (cyc - 1) & 1
    return parity


class Cochain:
    """A k-cochain on a complex with values in a finite group."""

    def __init__(self, X: PureComplex, degree: int, group: FiniteGroup, values):
        if not (-1 <= degree <= X.dimension):
            raise ValueError(f"degree {degree} outside [-1, {X.dimension}]")
        self.X = X
        self.degree = int(degree)
        self.group = group
        faces = [t for t, _ in X.faces(degree)]
        vals = {canonical_face(t): int(v) for t, v in dict(values).items()}
        if set(vals) != set(faces):
            raise ValueError("values must be given on exactly the canonical "
                             f"{degree}-faces")
        if any(not 0 <= v < group.order for v in vals.values()):
            raise ValueError("value out of group range")
        self.values = vals

    @classmethod
    def constant(cls, X, degree, group, element=0):
        return cls(X, degree, group,
                   {t: element for t, _ in X.faces(degree)})

    def __call__(self, *verts):
        """Evaluate at an ordered tuple of vertices."""
        if len(verts) == 1 and isinstance(verts[0], tuple):
            verts = verts[0]
        if len(verts) != self.degree + 1:
            raise ValueError(f"expected {self.degree + 1} vertices")
        key = canonical_face(verts)
        v = self.values[key]
        if self.degree <= 0:
            return v
        pos = {x: i for i, x in enumerate(key)}
        parity = _perm_parity([pos[x] for x in verts])
        return self.group.inv(v) if parity else v

    def with_values(self, values):
        return Cochain(self.X, self.degree, self.group, values)

    def __eq__(self, other):
        return (isinstance(other, Cochain) and self.degree == other.degree
                and self.group is other.group and self.values == other.values
                and self.X == other.X)

    def __repr__(self):
        return (f"Cochain(degree={self.degree}, group order="
                f"{self.group.order}, faces={len(self.values)})")


def delta(f: Cochain) -> Cochain:
    """Coboundary of a cochain of degree -1, 0, or 1."""
    X, G = f.X, f.group
    if f.degree == -1:
        c = f.values[()]
        return Cochain(X, 0, G, {t: c for t, _ in X.faces(0)})
    if f.degree == 0:
        out = {}
        for (u, v), _ in X.faces(1):
            out[(u, v)] = G.mul(f.values[(u,)], G.inv(f.values[(v,)]))
        return Cochain(X, 1, G, out)
    if f.degree == 1:
        out = {}
        for (a, b, c), _ in X.faces(2):
            x = G.mul(f(a, b), f(b, c))
            out[(a, b, c)] = G.mul(x, f(c, a))
        return Cochain(X, 2, G, out)
    raise ValueError(f"no coboundary implemented from degree {f.degree}")


def weight(f: Cochain) -> Fraction:
    """Probability that f is non-trivial on a random face of its degree."""
    out = Fraction(0)
    for t, w in f.X.faces(f.degree):
        if f.values[t] != 0:
            out += w
    return out


def distance(f: Cochain, g: Cochain) -> Fraction:
    """Probability that f and g disagree on a random face."""
    if f.degree != g.degree or f.group is not g.group:
        raise ValueError("cochains live in different spaces")
    out = Fraction(0)
    for t, w in f.X.faces(f.degree):
        if f.values[t] != g.values[t]:
            out += w
    return out


def is_cocycle(f: Cochain) -> bool:
    return weight(delta(f)) == 0


def decode_coboundary(f: Cochain, v0: int = 0, gauge: int = 0):
    """Try to write an edge cochain as a vertex coboundary.

    Propagates values along a breadth-first tree rooted at v0 with
    g(v0) = gauge, then checks every edge in v0's component. Returns
    (g, None) on success, where g is a vertex cochain (vertices outside the
    component get the identity), or (None, loop) where loop is a closed
    vertex walk on which the edge products multiply to a non-identity
    element, certifying that no such g exists.
    """
    if f.degree != 1:
        raise ValueError("decoding expects an edge cochain")
    X, G = f.X, f.group
    adj = {v: [] for v in range(X.vertex_count)}
    for (u, v), _ in X.faces(1):
        adj[u].append(v)
        adj[v].append(u)
    g = {v0: gauge}
    parent = {v0: None}
    order = [v0]
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        for u in sorted(adj[v]):
            if u not in g:
                # want delta g = f on tree edges: f(v,u) = g(v) g(u)^-1
                g[u] = G.mul(G.inv(f(v, u)), g[v])
                parent[u] = v
                order.append(u)
    for (u, v), _ in X.faces(1):
        if u not in g or v not in g:
            continue
        if f(u, v) != G.mul(g[u], G.inv(g[v])):
            path_u, x = [], u
            while x is not None:
                path_u.append(x)
                x = parent[x]
            path_v, x = [], v
            while x is not None:
                path_v.append(x)
                x = parent[x]
            # fundamental cycle v0 -> u -> v -> v0
            loop = tuple(reversed(path_u)) + tuple(path_v)
            return None, loop
    full = {t[0]: g.get(t[0], 0) for t, _ in X.faces(0)}
    return Cochain(X, 0, G, {(v,): x for v, x in full.items()}), None


def gauge_shift(g: Cochain, eta: int) -> Cochain:
    """Right-shift every vertex value by a constant; preserves the coboundary."""
    if g.degree != 0:
        raise ValueError("gauge shifts act on vertex cochains")
    G = g.group
    return g.with_values({t: G.mul(v, eta) for t, v in g.values.items()})


def push_homomorphism(f: Cochain, phi, target: FiniteGroup) -> Cochain:
    """Apply a group homomorphism to every value.

    `phi` maps source element indices to target indices; it is checked on
    all pairs, so coboundaries and cocycles are preserved by construction.
    """
    G = f.group
    phi = [int(phi[a]) for a in range(G.order)]
    if phi[0] != 0:
        raise ValueError("homomorphism must preserve the identity")
    for a in range(G.order):
        for b in range(G.order):
            if phi[G.mul(a, b)] != target.mul(phi[a], phi[b]):
                raise ValueError(f"not a homomorphism at ({a},{b})")
    return Cochain(f.X, f.degree, target,
                   {t: phi[v] for t, v in f.values.items()})


def random_cochain(X: PureComplex, degree: int, group: FiniteGroup, rng) -> Cochain:
    """Uniform cochain: one draw per canonical face, in sorted face order."""
    vals = {}
    for t, _ in X.faces(degree):
        vals[t] = rng.randrange(group.order)
    return Cochain(X, degree, group, vals)
