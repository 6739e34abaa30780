"""Decompositions of a 2-complex into overlapping expanding pieces.

The data is a cover of the complex by pure sub-complexes, a joint
distribution selecting a triangle together with a covering piece, and a
labeled agreement complex whose vertices are the pieces, whose edges are
labeled by shared vertices, and whose triangles project onto triangles of
the underlying complex. From expansion of the pieces, of the agreement
complex, and of the per-vertex local graphs, plus smoothness relations
among the distributions, one gets a global expansion bound realized by an
explicit correction algorithm: solve locally, reconcile the overlaps
through the agreement complex, then take weighted majorities.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import inf

from .builders import LabeledComplex
from .cochain import Cochain, delta, distance, weight
from .complexes import PureComplex, WeightedGraph, canonical_face
from .groups import FiniteGroup
from .oracle import (blowup_coboundary_distance, blowup_delta_weight,
                     blowup_label_eta, h1_bruteforce)
from .spectral import edge_expansion

__all__ = [
    "GKDecomposition",
    "GKMarginals",
    "marginals",
    "smoothness",
    "GammaRoute",
    "agreement_expansion",
    "GKHypotheses",
    "check_hypotheses",
    "GKRunReport",
    "gk_correct",
    "gk_bound",
    "brute_closest_coboundary",
    "vertex_star_decomposition",
]

_PIECE_CAP = 1 << 22


class GKDecomposition:
    """A cover of a 2-complex by pieces, the piece-selection distribution,
    and the labeled agreement complex carrying the overlap structure.

    nu maps (triangle, piece index) to weight; the pieces themselves are the
    nu-supported triangle sets, rebuilt as complexes over the same vertex
    ids with the conditional weights. The agreement complex may be omitted
    when there is a single piece (no overlaps to reconcile).
    """

    def __init__(self, X: PureComplex, nu, agreement: LabeledComplex = None):
        if X.dimension != 2:
            raise ValueError("decompositions are defined for 2-complexes")
        self.X = X
        tri_weights = dict(X.faces(2))
        acc = {}
        total = Fraction(0)
        for (t, i), w in dict(nu).items():
            t = canonical_face(t)
            if t not in tri_weights:
                raise ValueError(f"{t} is not a triangle of the complex")
            w = Fraction(w)
            if w < 0:
                raise ValueError("negative weight in the piece distribution")
            if w:
                acc[(t, int(i))] = acc.get((t, int(i)), Fraction(0)) + w
                total += w
        if total != 1:
            raise ValueError(f"piece distribution sums to {total}, not 1")
        self.nu = dict(sorted(acc.items()))
        ids = sorted({i for _, i in self.nu})
        if ids != list(range(len(ids))):
            raise ValueError("piece indices must be 0..m-1 with no gaps")
        self.piece_count = len(ids)
        piece_tris = {i: {} for i in ids}
        for (t, i), w in self.nu.items():
            piece_tris[i][t] = piece_tris[i].get(t, Fraction(0)) + w
        self.piece_mass = {i: sum(ws.values(), Fraction(0))
                           for i, ws in piece_tris.items()}
        self.pieces = []
        for i in ids:
            tops = [(t, w / self.piece_mass[i])
                    for t, w in sorted(piece_tris[i].items())]
            self.pieces.append(PureComplex(X.vertex_count, 2, tops))
        self.piece_vertices = [frozenset(v for t, _ in Y.faces(0) for v in t)
                               for Y in self.pieces]
        self.agreement = agreement
        if agreement is None:
            if self.piece_count > 1:
                raise ValueError("multi-piece cover needs an agreement "
                                 "complex")
            return
        if agreement.base.vertex_count != self.piece_count:
            raise ValueError("agreement vertices must be the pieces")
        for e, labs in agreement.edge_labels.items():
            i, j = e
            for v in labs:
                if v not in self.piece_vertices[i] \
                        or v not in self.piece_vertices[j]:
                    raise ValueError(f"label {v} on agreement edge {e} is "
                                     "not shared by both pieces")
        for ((a, b, c), (u, v, w)), _ in agreement.triangles.items():
            if canonical_face((u, v, w)) not in tri_weights:
                raise ValueError(f"agreement labels {(u, v, w)} are not a "
                                 "triangle of the complex")

    def shared_vertices(self):
        """Vertices lying in at least two pieces."""
        out = set()
        counts = {}
        for verts in self.piece_vertices:
            for v in verts:
                counts[v] = counts.get(v, 0) + 1
                if counts[v] == 2:
                    out.add(v)
        return out


@dataclass(frozen=True)
class GKMarginals:
    nu_2: dict
    nu_1: dict
    nu_0: dict
    nu_y: dict
    nu_1y: dict
    nu_0y: dict
    nu_cond: dict  # piece -> {triangle: weight}
    pi_2: dict
    pi_1: dict
    pi_0: dict
    pi_1y: dict
    pi_0y: dict


def _add(d, k, w):
    d[k] = d.get(k, Fraction(0)) + w


def marginals(D: GKDecomposition) -> GKMarginals:
    """All marginal tables of the two decomposition distributions.

    The triangle-with-piece distribution marginalizes to faces (uniform
    sub-face of the chosen triangle), to the piece, and to joint
    (face, piece) tables. The agreement distribution marginalizes through
    its label triangle; the (edge, piece) table pairs each label edge with
    the piece shared by its two endpoints' agreement edges, and the
    (vertex, piece) table halves each edge onto its endpoints.
    """
    nu_2, nu_1, nu_0, nu_y, nu_1y, nu_0y = {}, {}, {}, {}, {}, {}
    nu_cond = {i: {} for i in range(D.piece_count)}
    for (t, i), w in D.nu.items():
        _add(nu_2, t, w)
        _add(nu_y, i, w)
        nu_cond[i][t] = nu_cond[i].get(t, Fraction(0)) + w / D.piece_mass[i]
        for e in itertools.combinations(t, 2):
            _add(nu_1, e, w / 3)
            _add(nu_1y, (e, i), w / 3)
            for x in e:
                _add(nu_0y, (x, i), w / 6)
        for x in t:
            _add(nu_0, x, w / 3)
    pi_2, pi_1, pi_0, pi_1y, pi_0y = {}, {}, {}, {}, {}
    if D.agreement is not None:
        for ((a, b, c), (u, v, w_lab)), w in D.agreement.triangles.items():
            if not w:
                continue
            _add(pi_2, canonical_face((u, v, w_lab)), w)
            for e, piece in ((canonical_face((u, v)), b),
                             (canonical_face((v, w_lab)), c),
                             (canonical_face((u, w_lab)), a)):
                _add(pi_1, e, w / 3)
                _add(pi_1y, (e, piece), w / 3)
                for x in e:
                    _add(pi_0, x, w / 6)
                    _add(pi_0y, (x, piece), w / 6)
    return GKMarginals(nu_2=nu_2, nu_1=nu_1, nu_0=nu_0, nu_y=nu_y,
                       nu_1y=nu_1y, nu_0y=nu_0y, nu_cond=nu_cond,
                       pi_2=pi_2, pi_1=pi_1, pi_0=pi_0, pi_1y=pi_1y,
                       pi_0y=pi_0y)


def smoothness(P: dict, Q: dict, restrict=None) -> Fraction:
    """Largest a with a*P <= Q atomwise, over the restriction if given.

    Zero when some P-atom has no Q-mass; vacuously 1 when P has no atoms in
    the restriction. Can exceed 1 on a proper restriction.
    """
    best = None
    for atom, p in P.items():
        if not p or (restrict is not None and atom not in restrict):
            continue
        q = Q.get(atom, Fraction(0))
        if q == 0:
            return Fraction(0)
        ratio = q / p
        if best is None or ratio < best:
            best = ratio
    return Fraction(1) if best is None else best


@dataclass(frozen=True)
class GammaRoute:
    gamma: object  # Fraction
    base_h1: Fraction
    label_eta: object  # Fraction, or inf when every edge is flat
    flat: bool


def agreement_expansion(A: LabeledComplex, group: FiniteGroup) -> GammaRoute:
    """Expansion of a labeled complex via its flattening: the single-edge
    base expansion survives division by five times the inverse label-graph
    expansion; a fully flat complex inherits the base value outright."""
    base_rep = h1_bruteforce(A.base, group, "coboundary")
    if base_rep.value is None:
        raise ValueError("agreement base expansion is unconstrained")
    eta = blowup_label_eta(A)
    if eta == inf:
        return GammaRoute(gamma=base_rep.value, base_h1=base_rep.value,
                          label_eta=eta, flat=True)
    if eta == 0:
        return GammaRoute(gamma=Fraction(0), base_h1=base_rep.value,
                          label_eta=eta, flat=False)
    return GammaRoute(gamma=eta * base_rep.value / 5,
                      base_h1=base_rep.value, label_eta=eta, flat=False)


def local_graph(D: GKDecomposition, v: int) -> WeightedGraph:
    """Graph on the pieces sharing v, weighted by the agreement edge measure
    conditioned on the label v. Pieces containing v but carrying none of
    that measure are dropped (they are never sampled at v)."""
    if D.agreement is None:
        raise ValueError("no agreement complex")
    edges = [(e, w) for (e, lab), w in D.agreement.edge_weights.items()
             if lab == v and w > 0]
    if not edges:
        raise ValueError(f"no agreement edges labeled {v}")
    support = sorted({i for e, _ in edges for i in e})
    index = {i: k for k, i in enumerate(support)}
    total = sum(w for _, w in edges)
    return WeightedGraph(len(support),
                         [((index[a], index[b]), w / total)
                          for (a, b), w in edges])


@dataclass(frozen=True)
class GKHypotheses:
    alpha: Fraction
    beta: object
    gamma: object
    eta: object
    alpha_parts: dict  # the four smoothness comparisons, individually
    beta_by_piece: dict
    eta_by_vertex: dict
    gamma_route: object  # GammaRoute or None
    degenerate_agreement: bool
    unlabeled_shared_vertices: tuple
    bound: object  # Fraction or None


def check_hypotheses(D: GKDecomposition, group: FiniteGroup,
                     local_h1=None) -> GKHypotheses:
    """Evaluate every hypothesis of the decomposition theorem exactly.

    beta is the least piece expansion under each piece's conditional
    triangle distribution, gamma the agreement complex's expansion via its
    flattening, eta the least edge expansion among the per-vertex local
    graphs, and alpha the least of the four smoothness comparisons between
    the decomposition distributions and the complex's own face measures.
    """
    if local_h1 is None:
        def local_h1(Y):
            return h1_bruteforce(Y, group, "coboundary").value
    m = marginals(D)
    beta_by_piece = {}
    for i, Y in enumerate(D.pieces):
        try:
            beta_by_piece[i] = local_h1(Y)
        except Exception as exc:
            raise RuntimeError(f"piece {i} expansion failed: {exc}") from exc
    finite_betas = [b for b in beta_by_piece.values() if b is not None]
    beta = min(finite_betas) if finite_betas else None
    degenerate = D.agreement is None or not D.agreement.triangles
    gamma_route = None
    gamma = None
    eta = None
    eta_by_vertex = {}
    unlabeled = ()
    if not degenerate:
        gamma_route = agreement_expansion(D.agreement, group)
        gamma = gamma_route.gamma
        shared = D.shared_vertices()
        missing = []
        for v in sorted(shared):
            try:
                g = local_graph(D, v)
            except ValueError:
                missing.append(v)
                eta_by_vertex[v] = Fraction(0)
                continue
            eta_by_vertex[v] = edge_expansion(g).eta
        unlabeled = tuple(missing)
        eta = min(eta_by_vertex.values()) if eta_by_vertex else None
    mu_2 = {t: w for t, w in D.X.faces(2)}
    mu_1 = {e: w for e, w in D.X.faces(1)}
    shared = D.shared_vertices()
    restrict = {(v, i) for i in range(D.piece_count)
                for v in D.piece_vertices[i] if v in shared}
    parts = {
        "nu2_vs_mu2": smoothness(m.nu_2, mu_2),
        "pi2_vs_mu2": smoothness(m.pi_2, mu_2) if not degenerate else None,
        "mu1_vs_nu1": smoothness(mu_1, m.nu_1),
        "nu0y_vs_pi0y": (smoothness(m.nu_0y, m.pi_0y, restrict)
                         if not degenerate else None),
        "pi1y_vs_nu1y": (smoothness(m.pi_1y, m.nu_1y)
                         if not degenerate else None),
    }
    alpha = min(v for v in parts.values() if v is not None)
    bound = None
    if not degenerate and beta and gamma and eta and alpha > 0:
        bound = gk_bound(alpha, beta, gamma, eta)
    return GKHypotheses(alpha=alpha, beta=beta, gamma=gamma, eta=eta,
                        alpha_parts=parts, beta_by_piece=beta_by_piece,
                        eta_by_vertex=eta_by_vertex, gamma_route=gamma_route,
                        degenerate_agreement=degenerate,
                        unlabeled_shared_vertices=unlabeled, bound=bound)


def gk_bound(alpha, beta, gamma, eta) -> Fraction:
    """The certified expansion alpha^4 * beta * gamma * eta / 10."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    gamma, eta = Fraction(gamma), Fraction(eta)
    if not 0 < alpha <= 1:
        raise ValueError("smoothness must lie in (0, 1]")
    if beta <= 0 or gamma <= 0 or eta <= 0:
        raise ValueError("expansion constants must be positive")
    return alpha ** 4 * beta * gamma * eta / 10


def brute_closest_coboundary(Y: PureComplex, f: Cochain) -> Cochain:
    """Exact nearest coboundary on a small complex by enumerating all vertex
    assignments with the first vertex pinned to the identity. Ties break
    toward the lexicographically smallest assignment."""
    G = f.group
    verts = [t[0] for t, _ in Y.faces(0)]
    if not verts:
        raise ValueError("empty complex")
    free = verts[1:]
    if G.order ** len(free) > _PIECE_CAP:
        raise ValueError("piece too large for exact enumeration")
    best = None
    best_dist = None
    for combo in itertools.product(range(G.order), repeat=len(free)):
        vals = {(verts[0],): 0}
        for v, x in zip(free, combo):
            vals[(v,)] = x
        g = Cochain(Y, 0, G, vals)
        d = distance(f, delta(g))
        if best_dist is None or d < best_dist:
            best, best_dist = g, d
    return best


@dataclass(frozen=True)
class GKRunReport:
    piece_distances: dict
    agreement_weight: object  # wt of the agreement cochain's coboundary map
    agreement_distance: object  # dist from the agreement cochain to its fit
    ell: object
    majority_masses: dict
    final_distance: Fraction
    stages: tuple


def gk_correct(D: GKDecomposition, f: Cochain, group: FiniteGroup,
               piece_solver=None, agreement_solver=None):
    """Run the decomposition correction: local fits, overlap reconciliation
    on the agreement complex, gauge shifts, and weighted majority.

    Returns the corrected vertex assignment and a report of every
    intermediate distance. Solver errors carry the failing stage.
    """
    if f.X is not D.X and f.X != D.X:
        raise ValueError("cochain lives on a different complex")
    G = group
    if piece_solver is None:
        piece_solver = brute_closest_coboundary
    stages = []
    piece_fits = []
    piece_distances = {}
    for i, Y in enumerate(D.pieces):
        f_i = Cochain(Y, 1, G, {e: f.values[e] for e, _ in Y.faces(1)})
        try:
            g_i = piece_solver(Y, f_i)
        except Exception as exc:
            raise RuntimeError(f"stage local-fit, piece {i}: {exc}") from exc
        piece_fits.append(g_i)
        piece_distances[i] = distance(f_i, delta(g_i))
    stages.append("local-fit")
    if D.agreement is None:
        g = _extend(D, piece_fits[0], G)
        stages.append("single-piece")
        return g, GKRunReport(piece_distances=piece_distances,
                              agreement_weight=None, agreement_distance=None,
                              ell=None, majority_masses={},
                              final_distance=distance(f, delta(g)),
                              stages=tuple(stages))
    A = D.agreement
    h_vals = {}
    for (e, v), _ in A.edge_weights.items():
        i, j = e
        gi = piece_fits[i].values[(v,)]
        gj = piece_fits[j].values[(v,)]
        h_vals[(e, v)] = G.mul(G.inv(gi), gj)
    stages.append("agreement-cochain")
    wt_dh = blowup_delta_weight(A, G, h_vals)
    if agreement_solver is None:
        agreement_solver = blowup_coboundary_distance
    try:
        dist_h, ell = agreement_solver(A, G, h_vals)
    except Exception as exc:
        raise RuntimeError(f"stage agreement-fit: {exc}") from exc
    stages.append("agreement-fit")
    shifted = []
    for i, g_i in enumerate(piece_fits):
        s = Cochain(D.pieces[i], 0, G,
                    {t: G.mul(val, ell[i]) for t, val in g_i.values.items()})
        if delta(s).values != delta(g_i).values:
            raise AssertionError("gauge shift changed the piece coboundary")
        shifted.append(s)
    for (e, v), _ in A.edge_weights.items():
        i, j = e
        agree = shifted[i].values[(v,)] == shifted[j].values[(v,)]
        fit = h_vals[(e, v)] == G.mul(ell[i], G.inv(ell[j]))
        if agree != fit:
            raise AssertionError("agreement equivalence failed on "
                                 f"edge {e} label {v}")
    stages.append("gauge-shift")
    marg = marginals(D)
    g_vals = {}
    majority_masses = {}
    for t, _ in D.X.faces(0):
        v = t[0]
        tallies = {}
        for i in range(D.piece_count):
            if v not in D.piece_vertices[i]:
                continue
            w = marg.pi_0y.get((v, i), Fraction(0))
            _add(tallies, shifted[i].values[(v,)], w)
        if not tallies or not any(tallies.values()):
            tallies = {}
            for i in range(D.piece_count):
                if v in D.piece_vertices[i]:
                    _add(tallies, shifted[i].values[(v,)], Fraction(1))
        if not tallies:
            raise ValueError(f"vertex {v} is covered by no piece")
        winner = max(sorted(tallies), key=lambda x: (tallies[x], -x))
        g_vals[t] = winner
        majority_masses[v] = dict(tallies)
    stages.append("majority")
    g = Cochain(D.X, 0, G, g_vals)
    final = distance(f, delta(g))
    return g, GKRunReport(piece_distances=piece_distances,
                          agreement_weight=wt_dh,
                          agreement_distance=dist_h, ell=ell,
                          majority_masses=majority_masses,
                          final_distance=final, stages=tuple(stages))


def _extend(D: GKDecomposition, g: Cochain, G: FiniteGroup) -> Cochain:
    """Lift a single-piece assignment to the full vertex set (identity off
    the piece), so the final distance is measured on the whole complex."""
    vals = {}
    for t, _ in D.X.faces(0):
        vals[t] = g.values.get(t, 0)
    return Cochain(D.X, 0, G, vals)


def vertex_star_decomposition(X: PureComplex) -> GKDecomposition:
    """The star cover: one piece per vertex holding every triangle through
    it, a uniform choice of (triangle, containing vertex), and the agreement
    complex pairing each piece triple with every ordered triangle of labels.

    Intended for small complete-skeleton fixtures where every vertex lies in
    every piece; the agreement distribution is uniform over all label
    assignments, independent of the piece triple.
    """
    tri_weights = dict(X.faces(2))
    verts = [t[0] for t, _ in X.faces(0)]
    index = {v: i for i, v in enumerate(verts)}
    nu = {}
    for t, w in tri_weights.items():
        for v in t:
            nu[(t, index[v])] = w / 3
    m = len(verts)
    if m < 3:
        raise ValueError("need at least three pieces")
    base_tris = list(itertools.combinations(range(m), 3))
    base = PureComplex(m, 2, [(t, Fraction(1, len(base_tris)))
                              for t in base_tris])
    ordered = []
    for t in tri_weights:
        ordered.extend(itertools.permutations(t))
    share = Fraction(1, len(base_tris) * len(ordered))
    labeled = {}
    for bt in base_tris:
        for labs in ordered:
            labeled[(bt, labs)] = share
    edge_labels = {e: tuple(verts)
                   for e in itertools.combinations(range(m), 2)}
    A = LabeledComplex(base, edge_labels, labeled)
    return GKDecomposition(X, nu, A)
