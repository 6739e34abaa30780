"""Spectra of weighted graphs and the walk operators derived from complexes.

Floating point is confined to eigensolves (dense, deterministic, tolerance
1e-9); cut-based quantities are exact rationals. Vertices of zero measure are
excluded from operators, since the walk never visits them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, inf, lcm

import numpy as np

from .complexes import PureComplex, WeightedGraph
from .builders import colored_faces_complex

__all__ = [
    "SpectralReport",
    "lambda2",
    "edge_expansion",
    "one_sided_lambda2",
    "LocalSpectralProfile",
    "local_spectral_profile",
    "containment_graph",
    "swap_walk",
    "colored_swap_walk",
    "two_step_partite_walk",
    "TwoStepReport",
    "MajorityStabilityReport",
    "majority_stability",
]

EIG_TOL = 1e-9
_DENSE_CAP = 2000
_CUT_CAP = 24


@dataclass(frozen=True)
class SpectralReport:
    lambda2: float
    abs_lambda: float
    eta: object = None  # Fraction when exact, float for spectral bound, inf/None
    method: str = "dense-eigensolve"
    connected: bool = True


def _support(G: WeightedGraph):
    mu = G.vertex_measure()
    return [v for v in range(G.vertex_count) if mu[v] > 0], mu


def _is_connected(G: WeightedGraph, support):
    if not support:
        return True
    adj = G.adjacency_lists()
    seen = {support[0]}
    stack = [support[0]]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return set(support) <= seen


def _normalized_matrix(G: WeightedGraph, support, mu):
    idx = {v: i for i, v in enumerate(support)}
    n = len(support)
    A = np.zeros((n, n))
    for (u, v), w in G.edges.items():
        if u not in idx or v not in idx or w == 0:
            continue
        if u == v:
            A[idx[u], idx[u]] += float(w)
        else:
            A[idx[u], idx[v]] += float(w) / 2
            A[idx[v], idx[u]] += float(w) / 2
    dinv = np.array([1 / np.sqrt(float(mu[v])) for v in support])
    return dinv[:, None] * A * dinv[None, :]


def lambda2(G: WeightedGraph) -> SpectralReport:
    """Second-largest eigenvalue of the normalized walk operator.

    A disconnected graph is reported with lambda2 = 1 rather than raised: the
    eigenvalue 1 then has multiplicity above one.
    """
    support, mu = _support(G)
    if not support:
        raise ValueError("graph carries no mass")
    if not _is_connected(G, support):
        return SpectralReport(1.0, 1.0, connected=False)
    if len(support) == 1:
        return SpectralReport(-1.0, 0.0)
    if len(support) > _DENSE_CAP:
        raise ValueError(f"dense eigensolve capped at {_DENSE_CAP} vertices")
    N = _normalized_matrix(G, support, mu)
    ev = np.linalg.eigvalsh(N)
    ev = np.sort(ev)[::-1]
    if abs(ev[0] - 1.0) > 1e-6:
        raise AssertionError(f"top eigenvalue {ev[0]} is not 1")
    return SpectralReport(float(ev[1]), float(np.max(np.abs(ev[1:]))))


def one_sided_lambda2(G: WeightedGraph, side) -> SpectralReport:
    """lambda2 of the two-step walk restricted to one side of a bipartite
    graph; the raw bipartite spectrum is symmetric, this squares it away."""
    support, mu = _support(G)
    side = [v for v in side if v in set(support)]
    other = [v for v in support if v not in set(side)]
    if not side or not other:
        raise ValueError("need mass on both sides")
    if not _is_connected(G, support):
        return SpectralReport(1.0, 1.0, connected=False)
    N = _normalized_matrix(G, support, mu)
    pos = {v: i for i, v in enumerate(support)}
    B = N[np.ix_([pos[v] for v in side], [pos[v] for v in other])]
    s = np.linalg.svd(B, compute_uv=False)
    s = np.sort(s)[::-1]
    if abs(s[0] - 1.0) > 1e-6:
        raise AssertionError(f"top singular value {s[0]} is not 1")
    lam = float(s[1] ** 2) if len(s) > 1 else 0.0
    return SpectralReport(lam, lam)


def edge_expansion(G: WeightedGraph) -> SpectralReport:
    """Exact minimum of crossing mass over mu(S)mu(complement), exhaustively.

    The crossing mass of a cut counts the full weight of every edge with one
    endpoint on each side; self-loops never cross. Above 24 supported
    vertices only the spectral lower bound 1 - lambda2 is reported. A graph
    with a single supported vertex has no proper cut and returns infinity.
    """
    support, mu = _support(G)
    if not support:
        raise ValueError("graph carries no mass")
    if not _is_connected(G, support):
        return SpectralReport(1.0, 1.0, eta=Fraction(0),
                              method="exhaustive-cut", connected=False)
    if len(support) == 1:
        return SpectralReport(-1.0, 0.0, eta=inf, method="exhaustive-cut")
    spec = lambda2(G) if len(support) <= _DENSE_CAP else None
    if len(support) > _CUT_CAP:
        if spec is None:
            raise ValueError("graph too large for either expansion method")
        return SpectralReport(spec.lambda2, spec.abs_lambda,
                              eta=1.0 - spec.lambda2, method="spectral-bound")
    idx = {v: i for i, v in enumerate(support)}
    n = len(support)
    cross_edges = [(idx[u], idx[v], w) for (u, v), w in G.edges.items()
                   if u != v and w > 0]
    denom = lcm(*(w.denominator for _, _, w in cross_edges)) if cross_edges else 1
    denom = lcm(denom, *(mu[v].denominator for v in support))
    w_int = [(u, v, int(w * denom)) for u, v, w in cross_edges]
    mu2 = [int(mu[v] * 2 * denom) for v in support]
    total2 = sum(mu2)
    best = None
    chunk = 1 << 20
    for start in range(1, 1 << (n - 1), chunk):
        stop = min(start + chunk, 1 << (n - 1))
        masks = np.arange(start, stop, dtype=np.uint32)
        cross = np.zeros(len(masks), dtype=np.int64)
        for u, v, wi in w_int:
            cross += wi * (((masks >> u) ^ (masks >> v)) & 1).astype(np.int64)
        mus = np.zeros(len(masks), dtype=np.int64)
        for i, m2 in enumerate(mu2):
            mus += m2 * ((masks >> i) & 1).astype(np.int64)
        val = cross.astype(np.float64) / (mus * (total2 - mus))
        floor = val.min()
        for j in np.flatnonzero(val <= floor * (1 + 1e-9) + 1e-300):
            exact = Fraction(4 * denom * int(cross[j]),
                             int(mus[j]) * (total2 - int(mus[j])))
            if best is None or exact < best:
                best = exact
    report_l2 = spec.lambda2 if spec else float("nan")
    report_abs = spec.abs_lambda if spec else float("nan")
    return SpectralReport(report_l2, report_abs, eta=best,
                          method="exhaustive-cut")


@dataclass(frozen=True)
class LocalSpectralProfile:
    entries: tuple  # (face, lambda2, abs_lambda, connected)
    max_lambda2: float
    max_abs_lambda: float
    all_connected: bool


def local_spectral_profile(X: PureComplex) -> LocalSpectralProfile:
    """lambda2 of the underlying graph of every link of codimension >= 2,
    the empty face included."""
    if X.dimension < 1:
        raise ValueError("profile needs dimension >= 1")
    entries = []
    for k in range(-1, X.dimension - 1):
        for s, w in X.faces(k):
            if w == 0:
                continue
            rep = lambda2(X.link(s).underlying_graph())
            entries.append((s, rep.lambda2, rep.abs_lambda, rep.connected))
    return LocalSpectralProfile(
        entries=tuple(entries),
        max_lambda2=max(e[1] for e in entries),
        max_abs_lambda=max(e[2] for e in entries),
        all_connected=all(e[3] for e in entries),
    )


def containment_graph(X: PureComplex, k: int, l: int) -> WeightedGraph:
    """Bipartite walk between k-faces and their l-subfaces: pick a k-face by
    its measure and then a uniform subface. Vertex ids list the k-faces
    first; the `vertex_labels` attribute records the face each id carries."""
    if not 0 <= l <= k <= X.dimension:
        raise ValueError("need 0 <= l <= k <= dim")
    kf = X.faces(k)
    lf = X.faces(l)
    kid = {t: i for i, (t, _) in enumerate(kf)}
    lid = {s: len(kf) + i for i, (s, _) in enumerate(lf)}
    edges = {}
    coef = Fraction(1, comb(k + 1, l + 1))
    for t, w in kf:
        for s in itertools.combinations(t, l + 1):
            key = (kid[t], lid[s])
            edges[key] = edges.get(key, Fraction(0)) + w * coef
    g = WeightedGraph(len(kf) + len(lf), list(edges.items()))
    g.vertex_labels = [("upper", t) for t, _ in kf] + [("lower", s) for s, _ in lf]
    g.sides = (list(range(len(kf))), list(range(len(kf), len(kf) + len(lf))))
    return g


def swap_walk(X: PureComplex, k: int, l: int) -> WeightedGraph:
    """Walk between disjoint faces whose union is a face: sample a
    (k+l+1)-face and split it uniformly. Equal indices give a graph on the
    k-faces; otherwise the graph is bipartite with k-faces listed first."""
    if not 0 <= l <= k <= X.dimension:
        raise ValueError("need 0 <= l <= k <= dim")
    if k + l + 1 > X.dimension:
        raise ValueError("need k + l < dim + 1 so unions are faces")
    kf = X.faces(k)
    kid = {t: i for i, (t, _) in enumerate(kf)}
    if k == l:
        lid = kid
        off = 0
    else:
        lf = X.faces(l)
        lid = {s: len(kf) + i for i, (s, _) in enumerate(lf)}
        off = len(lid)
    coef = Fraction(1, comb(k + l + 2, k + 1))
    edges = {}
    for u, w in X.faces(k + l + 1):
        for t in itertools.combinations(u, k + 1):
            s = tuple(v for v in u if v not in t)
            a, b = kid[t], lid[s]
            key = (a, b) if a <= b else (b, a)
            edges[key] = edges.get(key, Fraction(0)) + w * coef
    n = len(kf) + off
    g = WeightedGraph(n, list(edges.items()))
    labels = [("upper", t) for t, _ in kf]
    if k != l:
        labels += [("lower", s) for s, _ in X.faces(l)]
        g.sides = (list(range(len(kf))), list(range(len(kf), n)))
    g.vertex_labels = labels
    return g


def colored_swap_walk(X: PureComplex, colors1, colors2) -> WeightedGraph:
    """Swap walk between faces of two disjoint color sets of a partite
    complex; realized as the edge graph of the two-part faces complex."""
    if set(colors1) & set(colors2):
        raise ValueError("color sets must be disjoint")
    F = colored_faces_complex(X, [sorted(colors1), sorted(colors2)])
    g = F.underlying_graph()
    g.vertex_labels = [F.labels[v] for v in range(F.vertex_count)]
    g.sides = ([v for v in range(F.vertex_count) if F.coloring[v] == 0],
               [v for v in range(F.vertex_count) if F.coloring[v] == 1])
    return g


@dataclass(frozen=True)
class TwoStepReport:
    graph: WeightedGraph
    report: SpectralReport
    bound: float


def two_step_partite_walk(X: PureComplex, j: int) -> TwoStepReport:
    """Walk on vertices: sample a j-face, then two independent vertices of
    its link. Reported against the bound (1 + max(lambda, 1/(parts-1))) / 2,
    with lambda the two-sided local spectral maximum."""
    if not X.is_partite:
        raise ValueError("needs a partite complex")
    parts = len(set(X.coloring.values()))
    if not 0 <= j <= parts - 2:
        raise ValueError(f"j must lie in [0, {parts - 2}]")
    joint = {}
    for s, w in X.faces(j):
        if w == 0:
            continue
        link = X.link(s)
        verts = link.faces(0)
        for (a,), wa in verts:
            va = link.labels[a]
            for (b,), wb in verts:
                vb = link.labels[b]
                key = (va, vb) if va <= vb else (vb, va)
                joint[key] = joint.get(key, Fraction(0)) + w * wa * wb
    g = WeightedGraph(X.vertex_count, list(joint.items()))
    rep = lambda2(g)
    lam = local_spectral_profile(X).max_abs_lambda
    bound = (1 + max(lam, 1 / (parts - 1))) / 2
    return TwoStepReport(graph=g, report=rep, bound=bound)


@dataclass(frozen=True)
class MajorityStabilityReport:
    crossing: Fraction
    max_mass: Fraction
    eta: object
    bound: object
    holds: bool


def majority_stability(G: WeightedGraph, partition) -> MajorityStabilityReport:
    """Crossing probability of a vertex partition and the mass of its largest
    part, checked against the guarantee that some part has mass at least
    1 - crossing/eta. The guarantee uses the one-directional expansion
    normalization, half the symmetric cut value."""
    part_of = {}
    for i, block in enumerate(partition):
        for v in block:
            if v in part_of:
                raise ValueError(f"vertex {v} appears twice")
            part_of[v] = i
    if set(part_of) != set(range(G.vertex_count)):
        raise ValueError("not a partition of the vertices")
    crossing = Fraction(0)
    for (u, v), w in G.edges.items():
        if part_of[u] != part_of[v]:
            crossing += w
    mu = G.vertex_measure()
    masses = {}
    for v, i in part_of.items():
        masses[i] = masses.get(i, Fraction(0)) + mu[v]
    max_mass = max(masses.values())
    eta = edge_expansion(G).eta
    if eta == inf:
        bound = 1 if crossing == 0 else 0
    else:
        bound = 1 - crossing / (eta / 2) if eta else None
    holds = bound is None or max_mass >= bound
    return MajorityStabilityReport(crossing=crossing, max_mass=max_mass,
                                   eta=eta, bound=bound, holds=holds)
