"""Weighted pure simplicial complexes with exact rational measures.

Faces are canonical sorted tuples of dense integer vertex ids. All measure
arithmetic is exact (fractions.Fraction); floating point only enters in the
spectral module.
"""
from __future__ import annotations

import itertools
import json
from collections import deque
from fractions import Fraction
from math import comb

__all__ = [
    "Face",
    "PureComplex",
    "WeightedGraph",
    "canonical_face",
    "face_dim",
    "loads_complex",
    "dumps_complex",
]

Face = tuple  # sorted tuple of vertex ids; () is the unique (-1)-face


def canonical_face(verts) -> Face:
    t = tuple(sorted(verts))
    if len(set(t)) != len(t):
        raise ValueError(f"face has repeated vertices: {verts}")
    return t


def face_dim(t: Face) -> int:
    return len(t) - 1


def _parse_weight(s) -> Fraction:
    if isinstance(s, str) and "/" in s:
        num, den = s.split("/")
        return Fraction(int(num), int(den))
    return Fraction(s)


def _fmt_weight(w: Fraction) -> str:
    return f"{w.numerator}/{w.denominator}"


class PureComplex:
    """A pure d-dimensional complex given by weighted top faces.

    The top-face weights must sum to exactly 1. Lower faces carry the induced
    measure: the probability of a k-face is the chance of seeing it when
    sampling a top face and then a uniform (k+1)-subset.
    """

    def __init__(self, vertex_count, dimension, top_faces, coloring=None,
                 labels=None):
        self.vertex_count = int(vertex_count)
        self.dimension = int(dimension)
        if self.dimension < -1:
            raise ValueError("dimension below -1")
        tops = []
        seen = set()
        total = Fraction(0)
        for verts, w in top_faces:
            t = canonical_face(verts)
            if face_dim(t) != self.dimension:
                raise ValueError(f"top face {t} has dimension {face_dim(t)}, "
                                 f"expected {self.dimension}")
            if t in seen:
                raise ValueError(f"duplicate top face {t}")
            if any(v < 0 or v >= self.vertex_count for v in t):
                raise ValueError(f"vertex id out of range in {t}")
            w = Fraction(w)
            if w < 0:
                raise ValueError(f"negative weight on {t}")
            seen.add(t)
            tops.append((t, w))
            total += w
        if total != 1:
            raise ValueError(f"top-face weights sum to {total}, expected 1")
        tops.sort()
        self.top_faces = tuple(tops)
        self.coloring = dict(coloring) if coloring is not None else None
        self.labels = dict(labels) if labels is not None else None
        if self.coloring is not None:
            missing = [v for v in range(self.vertex_count)
                       if v not in self.coloring]
            if missing:
                raise ValueError(f"coloring missing vertices {missing[:5]}")
        self._face_cache = {}

    # -- basic queries ------------------------------------------------------

    @property
    def is_partite(self) -> bool:
        if self.coloring is None:
            return False
        return all(len({self.coloring[v] for v in t}) == len(t)
                   for t, _ in self.top_faces)

    def colors(self):
        if self.coloring is None:
            return None
        return sorted(set(self.coloring.values()))

    def faces(self, k):
        """All k-faces with their induced probabilities, as a sorted list."""
        if not (-1 <= k <= self.dimension):
            raise ValueError(f"k={k} outside [-1, {self.dimension}]")
        if k not in self._face_cache:
            coef = Fraction(1, comb(self.dimension + 1, k + 1))
            acc = {}
            for t, w in self.top_faces:
                for f in itertools.combinations(t, k + 1):
                    acc[f] = acc.get(f, Fraction(0)) + coef * w
            self._face_cache[k] = sorted(acc.items())
        return list(self._face_cache[k])

    def face_weights(self, k) -> dict:
        return dict(self.faces(k))

    def contains(self, verts) -> bool:
        t = canonical_face(verts)
        if len(t) - 1 > self.dimension:
            return False
        ts = set(t)
        return any(ts <= set(s) for s, w in self.top_faces if w > 0) or t == ()

    def link(self, s) -> "PureComplex":
        s = canonical_face(s)
        ss = set(s)
        incident = [(t, w) for t, w in self.top_faces if ss <= set(t)]
        mass = sum((w for _, w in incident), Fraction(0))
        if mass == 0:
            raise ValueError(f"{s} is not a face of the complex")
        remaining = sorted({v for t, _ in incident for v in t if v not in ss})
        relabel = {v: i for i, v in enumerate(remaining)}
        tops = [(tuple(relabel[v] for v in t if v not in ss), w / mass)
                for t, w in incident]
        coloring = None
        if self.coloring is not None:
            coloring = {relabel[v]: self.coloring[v] for v in remaining}
        labels = {relabel[v]: (self.labels or {}).get(v, v) for v in remaining}
        return PureComplex(len(remaining), self.dimension - len(s), tops,
                           coloring=coloring, labels=labels)

    def skeleton(self, k) -> "PureComplex":
        if not (0 <= k <= self.dimension):
            raise ValueError(f"k={k} outside [0, {self.dimension}]")
        return PureComplex(self.vertex_count, k, self.faces(k),
                           coloring=self.coloring, labels=self.labels)

    def color_restrict(self, colors) -> "PureComplex":
        if not self.is_partite:
            raise ValueError("color restriction needs a partite complex")
        colors = set(colors)
        all_colors = set(self.coloring.values())
        if not colors <= all_colors:
            raise ValueError(f"unknown colors {colors - all_colors}")
        acc = {}
        for t, w in self.top_faces:
            sub = tuple(v for v in t if self.coloring[v] in colors)
            acc[sub] = acc.get(sub, Fraction(0)) + w
        kept = sorted({v for sub in acc for v in sub})
        relabel = {v: i for i, v in enumerate(kept)}
        tops = [(tuple(relabel[v] for v in sub), w) for sub, w in acc.items()]
        coloring = {relabel[v]: self.coloring[v] for v in kept}
        labels = {relabel[v]: (self.labels or {}).get(v, v) for v in kept}
        return PureComplex(len(kept), len(colors) - 1, tops,
                           coloring=coloring, labels=labels)

    def underlying_graph(self) -> "WeightedGraph":
        if self.dimension < 1:
            raise ValueError("needs dimension >= 1")
        return WeightedGraph(self.vertex_count, self.faces(1))

    def diameter(self):
        """Max shortest-path length in the underlying graph; None if disconnected."""
        g = self.underlying_graph()
        adj = g.adjacency_lists()
        best = 0
        for src in range(self.vertex_count):
            dist = {src: 0}
            q = deque([src])
            while q:
                v = q.popleft()
                for u in adj[v]:
                    if u not in dist:
                        dist[u] = dist[v] + 1
                        q.append(u)
            if len(dist) < self.vertex_count:
                return None
            best = max(best, max(dist.values()))
        return best

    # -- dunder helpers -----------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, PureComplex)
                and self.vertex_count == other.vertex_count
                and self.dimension == other.dimension
                and self.top_faces == other.top_faces
                and self.coloring == other.coloring)

    def __repr__(self):
        return (f"PureComplex(n={self.vertex_count}, d={self.dimension}, "
                f"tops={len(self.top_faces)})")


class WeightedGraph:
    """Undirected weighted graph; self-loops allowed.

    Edge weights sum to 1. The vertex measure is mu(v) = half the incident
    edge mass, a self-loop counting twice (so its full weight lands on v).
    """

    def __init__(self, vertex_count, edges):
        self.vertex_count = int(vertex_count)
        acc = {}
        for item in edges:
            if len(item) == 2:
                (u, v), w = item
            else:
                u, v, w = item
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValueError(f"vertex out of range in edge ({u},{v})")
            key = (u, v) if u <= v else (v, u)
            acc[key] = acc.get(key, Fraction(0)) + Fraction(w)
        total = sum(acc.values(), Fraction(0))
        if total != 1:
            raise ValueError(f"edge weights sum to {total}, expected 1")
        if any(w < 0 for w in acc.values()):
            raise ValueError("negative edge weight")
        self.edges = dict(sorted(acc.items()))

    def mu(self, v) -> Fraction:
        out = Fraction(0)
        for (a, b), w in self.edges.items():
            if a == b == v:
                out += w
            elif v in (a, b):
                out += w / 2
        return out

    def vertex_measure(self) -> dict:
        mu = {v: Fraction(0) for v in range(self.vertex_count)}
        for (a, b), w in self.edges.items():
            if a == b:
                mu[a] += w
            else:
                mu[a] += w / 2
                mu[b] += w / 2
        return mu

    def adjacency_lists(self):
        adj = [[] for _ in range(self.vertex_count)]
        for (a, b), w in self.edges.items():
            if w == 0 or a == b:
                continue
            adj[a].append(b)
            adj[b].append(a)
        return [sorted(x) for x in adj]

    def connected_components(self):
        seen = [False] * self.vertex_count
        adj = self.adjacency_lists()
        comps = []
        for s in range(self.vertex_count):
            if seen[s]:
                continue
            comp = []
            q = deque([s])
            seen[s] = True
            while q:
                v = q.popleft()
                comp.append(v)
                for u in adj[v]:
                    if not seen[u]:
                        seen[u] = True
                        q.append(u)
            comps.append(sorted(comp))
        return comps

    def __repr__(self):
        return f"WeightedGraph(n={self.vertex_count}, m={len(self.edges)})"


# -- JSON interchange --------------------------------------------------------


def dumps_complex(X: PureComplex) -> str:
    doc = {
        "dimension": X.dimension,
        "vertices": X.vertex_count,
        "top_faces": [{"verts": list(t), "weight": _fmt_weight(w)}
                      for t, w in X.top_faces],
    }
    if X.coloring is not None:
        doc["colors"] = [X.coloring[v] for v in range(X.vertex_count)]
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def loads_complex(text: str) -> PureComplex:
    doc = json.loads(text)
    tops = [(tuple(e["verts"]), _parse_weight(e["weight"]))
            for e in doc["top_faces"]]
    coloring = None
    if "colors" in doc:
        coloring = {v: c for v, c in enumerate(doc["colors"])}
    return PureComplex(doc["vertices"], doc["dimension"], tops,
                       coloring=coloring)
