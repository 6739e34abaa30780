"""Cone certificates for coboundary expansion.

A cone fixes a base vertex, a walk to every vertex, and for each edge a
certified contraction of the closed loop formed by the two walks and the
edge. Contractions shrink loops using two local rewrites: backtracking
removal (u, v, u) <-> (u), and triangle exchange (u, v) <-> (u, w, v) across
a triangle of the complex. Each certified step spends exactly one triangle
exchange plus any number of backtracking moves; the number of steps of the
longest contraction is the cone's diameter, and the multiset of exchanged
triangles drives the smoothness of the resulting expansion bound.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .cochain import Cochain
from .complexes import PureComplex, canonical_face

__all__ = [
    "Move",
    "Contraction",
    "Cone",
    "SearchBudget",
    "compose_path",
    "reverse_path",
    "path_value",
    "bt_reduce",
    "apply_move",
    "validate_cone",
    "ConeValidation",
    "cone_decode",
    "ConeFamilyBound",
    "cone_family_bound",
    "build_cone_complete_faces",
    "search_contraction",
    "auto_cone",
    "AutoConeResult",
    "reverse_contraction",
]

BT_INSERT = "BT-insert"
BT_DELETE = "BT-delete"
TR_EXPAND = "TR-expand"
TR_CONTRACT = "TR-contract"


@dataclass(frozen=True)
class Move:
    kind: str
    pos: int
    triangle: tuple = None  # canonical 3-face for TR moves
    vertex: int = None  # inserted vertex for BT-insert


@dataclass(frozen=True)
class Contraction:
    """Loop sequence with move certificates; step i turns loops[i] into
    loops[i+1] using exactly one triangle exchange."""
    loops: tuple
    moves: tuple  # tuple of move tuples, len == len(loops) - 1

    @property
    def steps(self) -> int:
        return len(self.loops) - 1

    def triangles(self):
        out = []
        for step in self.moves:
            for m in step:
                if m.kind in (TR_EXPAND, TR_CONTRACT):
                    if m.triangle is None:
                        raise ValueError("exchange move lacks its triangle")
                    out.append(canonical_face(m.triangle))
        return out


@dataclass(frozen=True)
class Cone:
    v0: int
    paths: dict  # vertex -> walk from v0, as a vertex tuple
    contractions: dict  # oriented edge (a, b) -> Contraction for that loop


@dataclass(frozen=True)
class SearchBudget:
    max_loop_len: int = 16  # max vertices in any intermediate loop
    max_states: int = 200_000


def compose_path(*paths):
    """Concatenate walks; each must start where the previous one ended."""
    out = list(paths[0])
    for p in paths[1:]:
        if p[0] != out[-1]:
            raise ValueError("walks do not meet end to end")
        out.extend(p[1:])
    return tuple(out)


def reverse_path(p):
    return tuple(reversed(p))


def path_value(f: Cochain, path):
    """Product of f along consecutive edges, first edge leftmost."""
    G = f.group
    acc = 0
    for a, b in zip(path, path[1:]):
        acc = G.mul(acc, f(a, b))
    return acc


def bt_reduce(loop):
    """Remove backtracks (u, v, u) -> (u), leftmost first.

    Returns the reduced loop and the delete moves applied, with positions
    valid at the time each applied.
    """
    cur = list(loop)
    moves = []
    changed = True
    while changed:
        changed = False
        for i in range(len(cur) - 2):
            if cur[i] == cur[i + 2]:
                moves.append(Move(BT_DELETE, i))
                del cur[i + 1:i + 3]
                changed = True
                break
    return tuple(cur), moves


def _edge_set(X: PureComplex):
    if X.dimension < 1:
        return set()
    return {e for e, w in X.faces(1) if w > 0}


def _tri_set(X: PureComplex):
    if X.dimension < 2:
        return set()
    return {t for t, w in X.faces(2) if w > 0}


def apply_move(loop, move: Move, edges, tris):
    """Apply one rewrite to a loop, checking its legality against the
    complex."""
    n = len(loop)
    if move.kind == BT_DELETE:
        i = move.pos
        if not (0 <= i <= n - 3 and loop[i] == loop[i + 2]):
            raise ValueError(f"no backtrack at position {i}")
        return loop[:i + 1] + loop[i + 3:]
    if move.kind == BT_INSERT:
        i = move.pos
        if not 0 <= i <= n - 1:
            raise ValueError(f"position {i} out of range")
        v = move.vertex
        u = loop[i]
        if v is None or canonical_face((u, v)) not in edges:
            raise ValueError(f"({u},{v}) is not an edge")
        return loop[:i + 1] + (v, u) + loop[i + 1:]
    if move.kind == TR_EXPAND:
        i = move.pos
        if not 0 <= i <= n - 2:
            raise ValueError(f"position {i} out of range")
        t = canonical_face(move.triangle)
        u, v = loop[i], loop[i + 1]
        if t not in tris:
            raise ValueError(f"{t} is not a triangle of the complex")
        rest = set(t) - {u, v}
        if len(rest) != 1:
            raise ValueError(f"{t} does not extend edge ({u},{v})")
        (w,) = rest
        return loop[:i + 1] + (w,) + loop[i + 1:]
    if move.kind == TR_CONTRACT:
        i = move.pos
        if not 0 <= i <= n - 3:
            raise ValueError(f"position {i} out of range")
        u, w, v = loop[i:i + 3]
        if len({u, w, v}) != 3:
            raise ValueError(f"vertices at {i} are not distinct")
        t = canonical_face((u, w, v))
        if move.triangle is not None and canonical_face(move.triangle) != t:
            raise ValueError(f"declared triangle mismatches loop at {i}")
        if t not in tris:
            raise ValueError(f"{t} is not a triangle of the complex")
        return loop[:i + 1] + loop[i + 2:]
    raise ValueError(f"unknown move kind {move.kind!r}")


def _check_loop(loop, v0, edges, where):
    if len(loop) < 1 or loop[0] != v0 or loop[-1] != v0:
        raise ValueError(f"{where}: loop not closed at the base vertex")
    for a, b in zip(loop, loop[1:]):
        if canonical_face((a, b)) not in edges:
            raise ValueError(f"{where}: ({a},{b}) is not an edge")


@dataclass(frozen=True)
class ConeValidation:
    diameter: int
    triangle_usage: dict  # canonical triangle -> times exchanged
    steps_per_edge: dict  # oriented edge -> step count


def validate_cone(X: PureComplex, C: Cone) -> ConeValidation:
    """Check every cone invariant; raise with a location on any failure."""
    edges = _edge_set(X)
    tris = _tri_set(X)
    v0 = C.v0
    if C.paths.get(v0) != (v0,):
        raise ValueError("base vertex walk must be trivial")
    for u, p in C.paths.items():
        if p[0] != v0 or p[-1] != u:
            raise ValueError(f"walk to {u} has wrong endpoints")
        for a, b in zip(p, p[1:]):
            if canonical_face((a, b)) not in edges:
                raise ValueError(f"walk to {u}: ({a},{b}) is not an edge")
    seen = set()
    usage = {}
    steps_per_edge = {}
    for (a, b), contr in C.contractions.items():
        e = canonical_face((a, b))
        if e not in edges:
            raise ValueError(f"contraction for non-edge ({a},{b})")
        if e in seen:
            raise ValueError(f"two contractions over edge {e}")
        seen.add(e)
        expected = compose_path(C.paths[a], (a, b), reverse_path(C.paths[b]))
        if contr.loops[0] != expected:
            raise ValueError(f"edge ({a},{b}): first loop is not the walk "
                             "composition")
        if len(contr.moves) != len(contr.loops) - 1:
            raise ValueError(f"edge ({a},{b}): moves/loops length mismatch")
        for si, (step, src, dst) in enumerate(
                zip(contr.moves, contr.loops, contr.loops[1:])):
            cur = src
            tr_count = 0
            for mi, mv in enumerate(step):
                _check_loop(cur, v0, edges, f"edge ({a},{b}) step {si}")
                before = cur
                try:
                    cur = apply_move(cur, mv, edges, tris)
                except ValueError as exc:
                    raise ValueError(f"edge ({a},{b}) step {si} move {mi}: "
                                     f"{exc}") from None
                if mv.kind in (TR_EXPAND, TR_CONTRACT):
                    tr_count += 1
                    if mv.triangle is not None:
                        t = canonical_face(mv.triangle)
                    elif mv.kind == TR_EXPAND:
                        t = canonical_face(cur[mv.pos:mv.pos + 3])
                    else:
                        t = canonical_face(before[mv.pos:mv.pos + 3])
                    usage[t] = usage.get(t, 0) + 1
            if tr_count != 1:
                raise ValueError(f"edge ({a},{b}) step {si}: "
                                 f"{tr_count} triangle exchanges, wanted 1")
            if cur != dst:
                raise ValueError(f"edge ({a},{b}) step {si}: moves do not "
                                 "reach the recorded loop")
        final, _ = bt_reduce(contr.loops[-1])
        if final != (v0,):
            raise ValueError(f"edge ({a},{b}): final loop does not reduce to "
                             "the trivial loop by backtrack removal")
        steps_per_edge[(a, b)] = contr.steps
    missing = {e for e in edges} - seen
    if missing:
        raise ValueError(f"edges without contractions: {sorted(missing)[:5]}")
    diameter = max(steps_per_edge.values(), default=0)
    return ConeValidation(diameter=diameter, triangle_usage=usage,
                          steps_per_edge=steps_per_edge)


def reverse_contraction(contr: Contraction) -> Contraction:
    """The certificate for the opposite edge orientation: every loop is
    walked backwards, moves re-derived by reduction; step count is kept."""
    loops = tuple(reverse_path(p) for p in contr.loops)
    moves = []
    for src, dst, step in zip(loops, loops[1:], contr.moves):
        tr = [m for m in step if m.kind in (TR_EXPAND, TR_CONTRACT)]
        moves.append(_rebuild_step(src, dst, tr[0].triangle))
    return Contraction(loops=loops, moves=tuple(moves))


def _rebuild_step(src, dst, triangle):
    """Find a one-exchange move list from src to dst (helper for reversal)."""
    t = canonical_face(triangle)
    edges = {canonical_face(p) for p in itertools.combinations(t, 2)}
    edges |= {canonical_face((a, b)) for loop in (src, dst)
              for a, b in zip(loop, loop[1:])}
    tris = {t}
    red_dst, _ = bt_reduce(dst)
    src_red, pre = bt_reduce(src)
    for kind in (TR_CONTRACT, TR_EXPAND):
        span = len(src_red) - (2 if kind == TR_CONTRACT else 1)
        for pos in range(span):
            try:
                nxt = apply_move(src_red, Move(kind, pos, t), edges, tris)
            except ValueError:
                continue
            nxt_red, post = bt_reduce(nxt)
            if nxt_red == red_dst:
                # moves from src: pre-reduction, exchange, post-reduction,
                # then re-insertions to reach dst exactly
                tail = _bt_moves_between(nxt_red, dst)
                if tail is None:
                    continue
                return tuple(pre) + (Move(kind, pos, t),) + tuple(post) + tail
    raise ValueError("could not rebuild a reversed step")


def _bt_moves_between(reduced, target):
    """Backtrack insertions taking a reduced loop to a target reducing to it.

    Replays the target's reduction in reverse as insert moves.
    """
    cur = list(target)
    deletes = []
    changed = True
    while changed:
        changed = False
        for i in range(len(cur) - 2):
            if cur[i] == cur[i + 2]:
                deletes.append((i, cur[i + 1]))
                del cur[i + 1:i + 3]
                changed = True
                break
    if tuple(cur) != reduced:
        return None
    return tuple(Move(BT_INSERT, i, vertex=v) for i, v in reversed(deletes))


def cone_decode(C: Cone, f: Cochain) -> Cochain:
    """Vertex assignment read off the cone walks: the base vertex maps to the
    identity, and each vertex to the inverse of f's product along its walk.
    When f is a coboundary this inverts it up to a gauge; when all triangles
    used by an edge's contraction carry trivial coboundary, the decoded
    assignment reproduces f on that edge."""
    G = f.group
    vals = {}
    for t, _ in f.X.faces(0):
        u = t[0]
        if u not in C.paths:
            raise ValueError(f"cone has no walk to vertex {u}")
        vals[t] = G.inv(path_value(f, C.paths[u]))
    return Cochain(f.X, 0, G, vals)


@dataclass(frozen=True)
class ConeFamilyBound:
    p: Fraction
    R: int
    bound: Fraction
    distribution: dict  # canonical triangle -> probability under the family
    support_edge_mass: Fraction  # least renormalizing mass across the family
    closed_form: object  # 1 / C(k+1, 3) when a transitive k is declared


def _cone_distribution(X: PureComplex, C: Cone):
    """Triangle distribution of one cone: a random edge (conditioned on a
    nonempty contraction), then a uniform step's exchanged triangle."""
    mu1 = dict(X.faces(1))
    per_edge = {}
    for (a, b), contr in C.contractions.items():
        ts = contr.triangles()
        if ts:
            per_edge[canonical_face((a, b))] = ts
    mass = sum((mu1[e] for e in per_edge), Fraction(0))
    if mass == 0:
        raise ValueError("cone exchanges no triangles at all")
    D = {}
    for e, ts in per_edge.items():
        share = mu1[e] / mass / len(ts)
        for t in ts:
            D[t] = D.get(t, Fraction(0)) + share
    return D, mass


def _face_orbits(faces, generators):
    """Orbits of canonical faces under vertex permutations."""
    faces = set(faces)
    seen = set()
    orbits = []
    for t in sorted(faces):
        if t in seen:
            continue
        orb = {t}
        queue = deque([t])
        while queue:
            s = queue.popleft()
            for g in generators:
                img = canonical_face(tuple(g[v] for v in s))
                if img not in orb:
                    if img not in faces:
                        raise ValueError(f"permutation does not preserve "
                                         f"faces: {s} -> {img}")
                    orb.add(img)
                    queue.append(img)
        seen |= orb
        orbits.append(sorted(orb))
    return orbits


def cone_family_bound(X: PureComplex, cones, k: int = None,
                      generators=None) -> ConeFamilyBound:
    """Expansion lower bound p/R from a family of cones.

    p is the exact smoothness of the family's triangle distribution against
    the complex's own: the largest p with p * D(t) <= mu(t) everywhere. R is
    the largest step count. Passing vertex-permutation generators averages
    the distribution over the induced triangle orbits, which equals
    enlarging the family by the whole symmetry group. A declared transitive
    face dimension k attaches the closed-form smoothness 1 / C(k+1, 3)."""
    if isinstance(cones, Cone):
        cones = [cones]
    if not cones:
        raise ValueError("empty cone family")
    mu2 = dict(X.faces(2))
    total = {}
    min_mass = None
    R = 0
    for C in cones:
        D, mass = _cone_distribution(X, C)
        min_mass = mass if min_mass is None else min(min_mass, mass)
        for t, p in D.items():
            if t not in mu2:
                raise ValueError(f"cone exchanges {t}, not a triangle of X")
            total[t] = total.get(t, Fraction(0)) + p / len(cones)
        for contr in C.contractions.values():
            R = max(R, contr.steps)
    if generators is not None:
        averaged = {}
        for orb in _face_orbits(mu2.keys(), [list(g) for g in generators]):
            avg = sum((total.get(t, Fraction(0)) for t in orb),
                      Fraction(0)) / len(orb)
            if avg:
                for t in orb:
                    averaged[t] = avg
        total = averaged
    p = min((mu2[t] / d for t, d in total.items() if d), default=None)
    if p is None:
        raise ValueError("family distribution is empty")
    closed = Fraction(1, comb(k + 1, 3)) if k is not None else None
    return ConeFamilyBound(p=p, R=R, bound=p / Fraction(R),
                           distribution=dict(sorted(total.items())),
                           support_edge_mass=min_mass, closed_form=closed)


# -- explicit cone for faces of the complete complex --------------------------


def build_cone_complete_faces(n: int, r: int):
    """The hand-built cone on the complex of disjoint (r+1)-subsets of n
    points: walks of length at most 2 through a disjoint connector, and
    contractions that thread a filler set through the loop, one triangle per
    loop edge. Requires n >= 6(r+1) so fillers always exist. Returns the
    cone together with the complex it certifies."""
    from .builders import complete_complex, faces_complex
    if n < 6 * (r + 1):
        raise ValueError(f"n too small: need n >= {6 * (r + 1)} for r={r}")
    ambient = complete_complex(n, n - 1)
    FX = faces_complex(ambient, r)
    sets = {v: frozenset(FX.labels[v]) for v in range(FX.vertex_count)}
    by_set = {s: v for v, s in sets.items()}
    universe = set(range(n))

    def smallest_disjoint(banned):
        pool = sorted(universe - banned)
        if len(pool) < r + 1:
            raise ValueError("no disjoint filler available")
        return by_set[frozenset(pool[:r + 1])]

    v0 = by_set[frozenset(range(r + 1))]
    paths = {}
    for u in range(FX.vertex_count):
        if u == v0:
            paths[u] = (v0,)
        elif not (sets[u] & sets[v0]):
            paths[u] = (v0, u)
        else:
            w = smallest_disjoint(sets[u] | sets[v0])
            paths[u] = (v0, w, u)
    edges = _edge_set(FX)
    tris = _tri_set(FX)
    contractions = {}
    for (a, b) in sorted(edges):
        loop = compose_path(paths[a], (a, b), reverse_path(paths[b]))
        reduced, pre = bt_reduce(loop)
        if reduced == (v0,):
            contractions[(a, b)] = Contraction(loops=(loop,), moves=())
            continue
        banned = set().union(*(sets[x] for x in reduced))
        x = smallest_disjoint(banned)
        loops = [loop]
        moves = []
        cur = loop
        # thread x through the reduced loop, one exchange per loop edge
        for i in range(len(reduced) - 1):
            step = list(pre) if i == 0 else []
            if i == 0:
                cur = reduced
            pos = 2 * i  # reduced[i] sits at 2i after i insertions
            t = canonical_face((reduced[i], x, reduced[i + 1]))
            mv = Move(TR_EXPAND, pos, t)
            step.append(mv)
            cur = apply_move(cur, mv, edges, tris)
            moves.append(tuple(step))
            loops.append(cur)
        contractions[(a, b)] = Contraction(loops=tuple(loops),
                                           moves=tuple(moves))
    cone = Cone(v0=v0, paths=paths, contractions=contractions)
    return cone, FX


# -- search-based construction -------------------------------------------------


def search_contraction(X: PureComplex, loop, budget: SearchBudget = None):
    """Breadth-first search for a contraction of a closed loop.

    States are backtrack-reduced loops; a transition spends one triangle
    exchange and re-reduces. Returns (status, contraction) with status
    "found", "exhausted" (the whole space within the loop-length cap was
    searched, so no contraction exists there), or "budget" (the state cap
    was hit first).
    """
    budget = budget or SearchBudget()
    loop = tuple(loop)
    edges = _edge_set(X)
    tris = _tri_set(X)
    v0 = loop[0]
    _check_loop(loop, v0, edges, "input")
    thirds = {}
    for t in tris:
        for pair in itertools.combinations(t, 2):
            (w,) = set(t) - set(pair)
            thirds.setdefault(pair, []).append(w)
    start, pre = bt_reduce(loop)
    target = (v0,)
    if start == target:
        return "found", Contraction(loops=(loop,), moves=())
    parent = {start: None}
    queue = deque([start])
    found = False
    truncated = False
    while queue:
        cur = queue.popleft()
        neighbors = []
        for i in range(len(cur) - 2):
            u, w, v = cur[i:i + 3]
            if u != v and len({u, w, v}) == 3 \
                    and canonical_face((u, w, v)) in tris:
                neighbors.append((Move(TR_CONTRACT, i,
                                       canonical_face((u, w, v))),
                                  cur[:i + 1] + cur[i + 2:]))
        if len(cur) + 1 <= budget.max_loop_len:
            for i in range(len(cur) - 1):
                u, v = cur[i], cur[i + 1]
                pair = canonical_face((u, v))
                for w in thirds.get(pair, ()):
                    if w != u and w != v:
                        neighbors.append((Move(TR_EXPAND, i,
                                               canonical_face((u, w, v))),
                                          cur[:i + 1] + (w,) + cur[i + 1:]))
        for mv, raw in neighbors:
            red, post = bt_reduce(raw)
            if red in parent:
                continue
            if len(red) > budget.max_loop_len:
                truncated = True
                continue
            parent[red] = (cur, mv, tuple(post))
            if red == target:
                found = True
                queue.clear()
                break
            if len(parent) >= budget.max_states:
                truncated = True
                queue.clear()
                break
            queue.append(red)
    if not found:
        return ("budget" if truncated else "exhausted"), None
    # reconstruct: chain of (reduced source, move, post reduction)
    chain = []
    node = target
    while parent[node] is not None:
        prev, mv, post = parent[node]
        chain.append((mv, post))
        node = prev
    chain.reverse()
    loops = [loop]
    moves = []
    cur = loop
    for i, (mv, post) in enumerate(chain):
        step = list(pre) if i == 0 else []
        if i == 0:
            cur = start
        step.append(mv)
        cur = apply_move(cur, mv, edges, tris)
        for bmv in post:
            step.append(bmv)
            cur = apply_move(cur, bmv, edges, tris)
        moves.append(tuple(step))
        loops.append(cur)
    return "found", Contraction(loops=tuple(loops), moves=tuple(moves))


@dataclass(frozen=True)
class AutoConeResult:
    cone: object  # Cone or None
    diameter: object  # int or None
    failed_edges: tuple
    statuses: dict  # oriented edge -> search status


def auto_cone(X: PureComplex, v0: int, budget: SearchBudget = None) -> AutoConeResult:
    """Assemble a cone by breadth-first walks plus per-edge contraction
    search. Edges whose search fails are listed; the cone is returned only
    when every edge certifies."""
    budget = budget or SearchBudget()
    g = X.underlying_graph()
    adj = g.adjacency_lists()
    paths = {v0: (v0,)}
    order = deque([v0])
    while order:
        v = order.popleft()
        for u in adj[v]:
            if u not in paths:
                paths[u] = paths[v] + (u,)
                order.append(u)
    if len(paths) != X.vertex_count:
        raise ValueError("complex is disconnected")
    contractions = {}
    failed = []
    statuses = {}
    for (a, b) in sorted(_edge_set(X)):
        loop = compose_path(paths[a], (a, b), reverse_path(paths[b]))
        status, contr = search_contraction(X, loop, budget)
        statuses[(a, b)] = status
        if contr is None:
            failed.append((a, b))
        else:
            contractions[(a, b)] = contr
    if failed:
        return AutoConeResult(cone=None, diameter=None,
                              failed_edges=tuple(failed), statuses=statuses)
    cone = Cone(v0=v0, paths=paths, contractions=contractions)
    report = validate_cone(X, cone)
    return AutoConeResult(cone=cone, diameter=report.diameter,
                          failed_edges=(), statuses=statuses)
