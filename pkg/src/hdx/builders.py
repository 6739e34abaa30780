"""Constructors for the complex families used throughout the package.

Covers complete and complete-partite complexes, cones, partite tensor
products, partitifications, faces complexes (plain and colored), spherical
buildings from linear subspaces, and edge-labeled blow-ups of 2-dimensional
complexes.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb, factorial

from .complexes import PureComplex, WeightedGraph, canonical_face

__all__ = [
    "complete_complex",
    "complete_partite",
    "cone_complex",
    "partite_tensor",
    "partitification",
    "faces_complex",
    "colored_faces_complex",
    "spherical_building",
    "LabeledComplex",
    "blowup",
    "label_graph",
    "generalized_faces_enumerate",
    "generalized_link_tester",
]


def complete_complex(n: int, d: int) -> PureComplex:
    """The d-skeleton of the full simplex on n vertices, uniform top faces."""
    if not 0 <= d + 1 <= n:
        raise ValueError(f"need 0 <= d+1 <= n, got n={n}, d={d}")
    w = Fraction(1, comb(n, d + 1))
    tops = [(t, w) for t in itertools.combinations(range(n), d + 1)]
    return PureComplex(n, d, tops)


def complete_partite(*sizes) -> PureComplex:
    """Complete multipartite complex: top faces are all transversals."""
    if len(sizes) == 1 and not isinstance(sizes[0], int):
        sizes = tuple(sizes[0])
    if len(sizes) < 1 or any(s < 1 for s in sizes):
        raise ValueError("need at least one part, all sizes positive")
    offsets = [0]
    for s in sizes:
        offsets.append(offsets[-1] + s)
    n = offsets[-1]
    parts = [range(offsets[i], offsets[i + 1]) for i in range(len(sizes))]
    total = 1
    for s in sizes:
        total *= s
    w = Fraction(1, total)
    tops = [(t, w) for t in itertools.product(*parts)]
    coloring = {v: i for i, part in enumerate(parts) for v in part}
    return PureComplex(n, len(sizes) - 1, tops, coloring=coloring)


def cone_complex(X: PureComplex) -> PureComplex:
    """Add an apex joined to every top face; the apex gets a fresh color."""
    if not X.is_partite:
        raise ValueError("cone construction needs a partite complex")
    apex = X.vertex_count
    new_color = max(X.coloring.values()) + 1
    tops = [(t + (apex,), w) for t, w in X.top_faces]
    coloring = dict(X.coloring)
    coloring[apex] = new_color
    labels = {v: (X.labels or {}).get(v, v) for v in range(X.vertex_count)}
    labels[apex] = "apex"
    return PureComplex(apex + 1, X.dimension + 1, tops, coloring=coloring,
                       labels=labels)


def partite_tensor(X: PureComplex, Y: PureComplex) -> PureComplex:
    """Color-paired product: vertices are same-color pairs, measure multiplies."""
    if not (X.is_partite and Y.is_partite):
        raise ValueError("both factors must be partite")
    cx, cy = X.colors(), Y.colors()
    if len(cx) != len(cy):
        raise ValueError(f"part counts differ: {len(cx)} vs {len(cy)}")
    pair_color = dict(zip(cx, cy))
    verts = sorted(
        (X.coloring[a], a, b)
        for a in range(X.vertex_count)
        for b in range(Y.vertex_count)
        if pair_color[X.coloring[a]] == Y.coloring[b])
    ids = {(a, b): i for i, (_, a, b) in enumerate(verts)}
    tops = {}
    for s, ws in X.top_faces:
        by_color_s = {X.coloring[v]: v for v in s}
        for t, wt in Y.top_faces:
            by_color_t = {pair_color[c]: None for c in by_color_s}
            for v in t:
                by_color_t[Y.coloring[v]] = v
            face = tuple(sorted(ids[(by_color_s[c], by_color_t[pair_color[c]])]
                                for c in by_color_s))
            tops[face] = tops.get(face, Fraction(0)) + ws * wt
    coloring = {ids[(a, b)]: X.coloring[a] for _, a, b in verts}
    labels = {ids[(a, b)]: (a, b) for _, a, b in verts}
    return PureComplex(len(verts), X.dimension, sorted(tops.items()),
                       coloring=coloring, labels=labels)


def partitification(X: PureComplex, parts: int) -> PureComplex:
    """Spread each vertex over `parts` colors; a top face takes a random
    (parts-1)-face of X and a uniform assignment of distinct colors."""
    if not 1 <= parts <= X.dimension + 1:
        raise ValueError(f"parts must lie in [1, {X.dimension + 1}]")
    n = X.vertex_count * parts
    tops = {}
    scale = Fraction(1, factorial(parts))
    for s, w in X.faces(parts - 1):
        for perm in itertools.permutations(range(parts)):
            face = tuple(sorted(v * parts + c for v, c in zip(s, perm)))
            tops[face] = tops.get(face, Fraction(0)) + w * scale
    coloring = {v * parts + c: c
                for v in range(X.vertex_count) for c in range(parts)}
    labels = {v * parts + c: (v, c)
              for v in range(X.vertex_count) for c in range(parts)}
    return PureComplex(n, parts - 1, sorted(tops.items()),
                       coloring=coloring, labels=labels)


def faces_complex(X: PureComplex, r: int) -> PureComplex:
    """Vertices are the r-faces of X; faces are disjoint families whose union
    is a face of X. A top face is sampled by packing a random top face of X
    with disjoint (r+1)-subsets, one at a time."""
    if not 0 <= r <= X.dimension:
        raise ValueError(f"r must lie in [0, {X.dimension}]")
    d = X.dimension
    m = (d + 1) // (r + 1)
    r_faces = [t for t, _ in X.faces(r)]
    ids = {t: i for i, t in enumerate(r_faces)}
    # chance of one ordered pick sequence from a fixed top face
    denom = 1
    for i in range(m):
        denom *= comb(d + 1 - i * (r + 1), r + 1)
    per_ordered = Fraction(factorial(m), denom)
    tops = {}
    for t, w in X.top_faces:
        for split in _disjoint_families(t, r + 1, m):
            face = tuple(sorted(ids[s] for s in split))
            tops[face] = tops.get(face, Fraction(0)) + w * per_ordered
    labels = {i: t for t, i in ids.items()}
    return PureComplex(len(r_faces), m - 1, sorted(tops.items()),
                       labels=labels)


def _disjoint_families(t, size, m):
    """Unordered families of m disjoint `size`-subsets of the tuple t."""
    if m == 0:
        yield ()
        return
    # anchor on the smallest remaining vertex to avoid duplicates
    first = t[0]
    rest = t[1:]
    for extra in itertools.combinations(rest, size - 1):
        block = (first,) + extra
        left = tuple(v for v in rest if v not in extra)
        for tail in _disjoint_families(left, size, m - 1):
            yield (block,) + tail


def colored_faces_complex(X: PureComplex, J) -> PureComplex:
    """Faces complex split along color groups.

    Part j consists of the faces of X colored exactly by the j-th color set;
    a top face takes a random transversal of the union of the groups and
    splits it by group. Empty groups contribute a fresh apex vertex that sits
    in every top face.
    """
    if not X.is_partite:
        raise ValueError("needs a partite complex")
    groups = [frozenset(c) for c in J]
    all_colors = set(X.coloring.values())
    union = set()
    for c in groups:
        if c & union:
            raise ValueError("color sets must be pairwise disjoint")
        union |= c
    if not union <= all_colors:
        raise ValueError(f"unknown colors {union - all_colors}")

    part_faces = []  # per group: sorted list of faces (original vertex ids)
    for c in groups:
        if not c:
            part_faces.append([("apex",)])
            continue
        found = set()
        for t, w in X.top_faces:
            sub = tuple(v for v in t if X.coloring[v] in c)
            if len(sub) == len(c):
                found.add(sub)
        part_faces.append(sorted(found))
    ids = {}
    labels = {}
    coloring = {}
    for j, faces in enumerate(part_faces):
        for f in faces:
            ids[(j, f)] = len(ids)
            labels[len(ids) - 1] = (j, f)
            coloring[len(ids) - 1] = j
    tops = {}
    for t, w in X.top_faces:
        parts = []
        ok = True
        for j, c in enumerate(groups):
            if not c:
                parts.append(ids[(j, ("apex",))])
                continue
            sub = tuple(v for v in t if X.coloring[v] in c)
            if len(sub) != len(c):
                ok = False
                break
            parts.append(ids[(j, sub)])
        if not ok:
            continue
        face = tuple(sorted(parts))
        tops[face] = tops.get(face, Fraction(0)) + w
    total = sum(tops.values(), Fraction(0))
    tops = {f: w / total for f, w in tops.items()}
    return PureComplex(len(ids), len(groups) - 1, sorted(tops.items()),
                       coloring=coloring, labels=labels)


# -- spherical buildings ------------------------------------------------------


class _Field:
    """Arithmetic for F_q, q in {2,3,4,5}; 4 = F_2[x]/(x^2+x+1)."""

    def __init__(self, q):
        if q not in (2, 3, 4, 5):
            raise ValueError(f"unsupported field size {q}")
        self.q = q
        if q == 4:
            self._mul = [[0, 0, 0, 0], [0, 1, 2, 3],
                         [0, 2, 3, 1], [0, 3, 1, 2]]
        else:
            self._mul = [[(a * b) % q for b in range(q)] for a in range(q)]
        if q == 4:
            self._add = [[a ^ b for b in range(4)] for a in range(4)]
        else:
            self._add = [[(a + b) % q for b in range(q)] for a in range(q)]
        self._neg = [row.index(0) for row in self._add]
        self._inv = [None] + [self._mul[a].index(1) for a in range(1, q)]

    def add(self, a, b):
        return self._add[a][b]

    def sub(self, a, b):
        return self._add[a][self._neg[b]]

    def mul(self, a, b):
        return self._mul[a][b]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError
        return self._inv[a]


def _rref_subspaces(field, dim_ambient, k):
    """All k-dimensional subspaces as row-reduced echelon bases."""
    q = field.q
    out = []
    for pivots in itertools.combinations(range(dim_ambient), k):
        free = [(i, j) for i in range(k) for j in range(dim_ambient)
                if j > pivots[i] and j not in pivots]
        for fill in itertools.product(range(q), repeat=len(free)):
            rows = [[0] * dim_ambient for _ in range(k)]
            for i, p in enumerate(pivots):
                rows[i][p] = 1
            for (i, j), val in zip(free, fill):
                rows[i][j] = val
            out.append(tuple(tuple(r) for r in rows))
    return sorted(out)


def _subspace_contains(field, big, small):
    """True if span(small) is inside span(big); both in echelon form."""
    pivots = [next(j for j, x in enumerate(row) if x) for row in big]
    for row in small:
        r = list(row)
        for p, brow in zip(pivots, big):
            c = r[p]
            if c:
                r = [field.sub(x, field.mul(c, y)) for x, y in zip(r, brow)]
        if any(r):
            return False
    return True


_FLAG_CAP = 300_000


def spherical_building(dim_ambient: int, q: int, colors=None) -> PureComplex:
    """Flag complex of proper nontrivial subspaces of F_q^dim_ambient.

    Vertices are subspaces colored by dimension; top faces are the maximal
    chains through the requested dimensions, weighted uniformly.
    """
    if not 2 <= dim_ambient <= 5:
        raise ValueError("ambient dimension must lie in [2, 5]")
    field = _Field(q)
    dims = sorted(colors) if colors is not None else list(range(1, dim_ambient))
    if not dims or not all(1 <= c <= dim_ambient - 1 for c in dims):
        raise ValueError("colors must be proper nontrivial dimensions")
    if len(set(dims)) != len(dims):
        raise ValueError("repeated colors")
    layers = [_rref_subspaces(field, dim_ambient, k) for k in dims]
    ids = {}
    labels = {}
    coloring = {}
    for layer, k in zip(layers, dims):
        for sub in layer:
            ids[sub] = len(ids)
            labels[len(ids) - 1] = sub
            coloring[len(ids) - 1] = k
    # adjacency between consecutive layers
    steps = []
    for a, b in zip(layers, layers[1:]):
        adj = {}
        for small in a:
            adj[small] = [big for big in b
                          if _subspace_contains(field, big, small)]
        steps.append(adj)
    flags = []
    chains = [[sub] for sub in layers[0]]
    while chains:
        chain = chains.pop()
        depth = len(chain) - 1
        if depth == len(dims) - 1:
            flags.append(tuple(ids[s] for s in chain))
            if len(flags) > _FLAG_CAP:
                raise ValueError("flag count exceeds the supported scale")
            continue
        for big in steps[depth][chain[-1]]:
            chains.append(chain + [big])
    w = Fraction(1, len(flags))
    tops = [(tuple(sorted(f)), w) for f in flags]
    return PureComplex(len(ids), len(dims) - 1, sorted(tops),
                       coloring=coloring, labels=labels)


# -- blow-ups of 2-dimensional complexes --------------------------------------


class LabeledComplex:
    """A 2-dimensional complex whose edges carry parallel labeled copies.

    The vertex set is the base's. Triangles are base triangles together with
    one label per edge, stored as ((a, b, c), (i, j, k)) with a < b < c and
    labels i on ab, j on bc, k on ac. Their weights sum to 1 and must project
    to the base triangle measure exactly.
    """

    def __init__(self, base: PureComplex, edge_labels, triangles):
        if base.dimension != 2:
            raise ValueError("blow-ups are defined for 2-dimensional bases")
        self.base = base
        base_edges = dict(base.faces(1))
        base_tris = dict(base.faces(2))
        self.edge_labels = {}
        for e, labs in dict(edge_labels).items():
            e = canonical_face(e)
            if e not in base_edges:
                raise ValueError(f"{e} is not a base edge")
            labs = tuple(sorted(set(labs)))
            if not labs:
                raise ValueError(f"edge {e} has no labels")
            self.edge_labels[e] = labs
        if set(self.edge_labels) != set(base_edges):
            raise ValueError("labels must be declared for every base edge")
        tris = {}
        proj = {t: Fraction(0) for t in base_tris}
        for (verts, labs), w in dict(triangles).items():
            t = canonical_face(verts)
            if t not in base_tris:
                raise ValueError(f"{t} is not a base triangle")
            a, b, c = t
            i, j, k = labs
            for e, lab in (((a, b), i), ((b, c), j), ((a, c), k)):
                if lab not in self.edge_labels[e]:
                    raise ValueError(f"label {lab} not declared on edge {e}")
            w = Fraction(w)
            if w < 0:
                raise ValueError("negative triangle weight")
            key = (t, (i, j, k))
            if key in tris:
                raise ValueError(f"duplicate labeled triangle {key}")
            tris[key] = w
            proj[t] += w
        for t, got in proj.items():
            if got != base_tris[t]:
                raise ValueError(f"labeled weights over {t} sum to {got}, "
                                 f"base weight is {base_tris[t]}")
        self.triangles = dict(sorted(tris.items()))
        ew = {}
        for ((a, b, c), (i, j, k)), w in self.triangles.items():
            for e, lab in (((a, b), i), ((b, c), j), ((a, c), k)):
                ew[(e, lab)] = ew.get((e, lab), Fraction(0)) + w / 3
        for e, labs in self.edge_labels.items():
            for lab in labs:
                ew.setdefault((e, lab), Fraction(0))
        self.edge_weights = dict(sorted(ew.items()))

    @property
    def vertex_count(self):
        return self.base.vertex_count

    def labeled_edges(self):
        return list(self.edge_weights.items())

    def labeled_triangles(self):
        return list(self.triangles.items())

    def triangle_edges(self, key):
        """The three (edge, label) pairs of a labeled triangle, in the order
        ab, bc, ca used by the degree-1 coboundary."""
        (a, b, c), (i, j, k) = key
        return ((a, b), i), ((b, c), j), ((a, c), k)

    def is_flat(self):
        return all(len(labs) == 1 for labs in self.edge_labels.values())

    def __repr__(self):
        return (f"LabeledComplex(base={self.base!r}, "
                f"edges={len(self.edge_weights)}, tris={len(self.triangles)})")


def blowup(base: PureComplex, edge_labels, triangles) -> LabeledComplex:
    return LabeledComplex(base, edge_labels, triangles)


def label_graph(Xb: LabeledComplex, e) -> WeightedGraph:
    """Two-step walk on the labels of a base edge through triangle completions.

    A step picks a labeled triangle over the edge, remembers the opposite
    vertex and the two side labels, and returns to a label of the edge
    compatible with that completion.
    """
    e = canonical_face(e)
    if e not in Xb.edge_labels:
        raise ValueError(f"{e} is not a base edge")
    labs = Xb.edge_labels[e]
    index = {lab: i for i, lab in enumerate(labs)}
    # joint weight of (label of e, completion)
    joint = {}
    comp_mass = {}
    total = Fraction(0)
    for key, w in Xb.triangles.items():
        pairs = Xb.triangle_edges(key)
        own = [p for p in pairs if p[0] == e]
        if not own:
            continue
        (_, lab), = own
        others = tuple(p for p in pairs if p[0] != e)
        joint[(lab, others)] = joint.get((lab, others), Fraction(0)) + w
        comp_mass[others] = comp_mass.get(others, Fraction(0)) + w
        total += w
    if total == 0:
        raise ValueError(f"edge {e} has no triangles over it")
    edges = {}
    for (lab1, comp), w1 in joint.items():
        for (lab2, comp2), w2 in joint.items():
            if comp2 != comp:
                continue
            key = tuple(sorted((index[lab1], index[lab2])))
            edges[key] = edges.get(key, Fraction(0)) + \
                (w1 / total) * (w2 / comp_mass[comp])
    return WeightedGraph(len(labs), [(k, w) for k, w in edges.items()])


# -- generalized faces of the faces complex -----------------------------------


def generalized_faces_enumerate(X: PureComplex, faces) -> bool:
    """Does a family of faces of X form a face of the faces complex?

    True exactly when the members are pairwise disjoint and their union is a
    face of X. The empty family is always a face.
    """
    seen = set()
    union = []
    for f in faces:
        f = canonical_face(f)
        if seen & set(f):
            return False
        seen |= set(f)
        union.extend(f)
        if not X.contains(f):
            return False
    return X.contains(union)


def generalized_link_tester(X: PureComplex, faces):
    """Membership test for the link of a generalized face: families t with
    s cup t a generalized face. Matches testing inside the link of union(s)."""
    base = [canonical_face(f) for f in faces]
    if not generalized_faces_enumerate(X, base):
        raise ValueError("not a generalized face")

    def member(more):
        return generalized_faces_enumerate(X, base + [canonical_face(f)
                                                      for f in more])

    return member
