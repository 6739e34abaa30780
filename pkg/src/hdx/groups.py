"""Finite groups presented by explicit multiplication tables.

Elements are dense indices 0..order-1 with 0 the identity. The table
constructor validates the axioms; symmetric and cyclic groups come with a
natural action on points used by the unique-games layer.
"""
from __future__ import annotations

import itertools

import numpy as np

__all__ = ["FiniteGroup", "sym", "cyclic", "from_table"]


class FiniteGroup:
    def __init__(self, table, names=None, action=None):
        """`table[a][b]` is the product a*b; index 0 must be the identity.

        `action`, when given, maps (element index, point) -> point and must be
        a homomorphism to permutations of its point set.
        """
        tab = np.asarray(table, dtype=np.int64)
        n = tab.shape[0]
        if tab.shape != (n, n):
            raise ValueError("multiplication table is not square")
        if tab.min() < 0 or tab.max() >= n:
            raise ValueError("table entries out of range")
        if not (np.array_equal(tab[0], np.arange(n))
                and np.array_equal(tab[:, 0], np.arange(n))):
            raise ValueError("index 0 is not a two-sided identity")
        # associativity: (a*b)*c == a*(b*c), checked in row blocks
        for a in range(n):
            if not np.array_equal(tab[tab[a]], tab[a][tab]):
                raise ValueError("table is not associative")
        inv = np.full(n, -1, dtype=np.int64)
        for a in range(n):
            hits = np.flatnonzero(tab[a] == 0)
            if len(hits) != 1 or tab[hits[0], a] != 0:
                raise ValueError(f"element {a} lacks a two-sided inverse")
            inv[a] = hits[0]
        self.table = tab
        self.order = n
        self.inverse_table = inv
        self.names = list(names) if names is not None else [str(i) for i in range(n)]
        self._action = action

    identity = 0

    def mul(self, a, b):
        return int(self.table[a, b])

    def inv(self, a):
        return int(self.inverse_table[a])

    def elements(self):
        return range(self.order)

    def act(self, a, point):
        if self._action is None:
            raise ValueError("group has no point action")
        return self._action(a, point)

    @property
    def has_action(self):
        return self._action is not None

    def is_abelian(self):
        return np.array_equal(self.table, self.table.T)

    def name_of(self, a):
        return self.names[a]

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"


def sym(points: int) -> FiniteGroup:
    """Symmetric group on `points` symbols, acting on 0..points-1.

    Element 0 is the identity permutation; the rest follow lexicographic
    order of the permutation tuples.
    """
    if points < 1:
        raise ValueError("needs at least one point")
    perms = sorted(itertools.permutations(range(points)))
    index = {p: i for i, p in enumerate(perms)}
    n = len(perms)
    table = [[0] * n for _ in range(n)]
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            # (p*q)(x) = p(q(x))
            table[i][j] = index[tuple(p[q[x]] for x in range(points))]
    names = ["".join(map(str, p)) for p in perms]
    return FiniteGroup(table, names=names,
                       action=lambda a, x, _perms=perms: _perms[a][x])


def cyclic(m: int) -> FiniteGroup:
    """Integers mod m under addition, acting on 0..m-1 by rotation."""
    if m < 1:
        raise ValueError("order must be positive")
    table = [[(a + b) % m for b in range(m)] for a in range(m)]
    return FiniteGroup(table, names=[str(i) for i in range(m)],
                       action=lambda a, x, _m=m: (x + a) % _m)


def from_table(table, names=None) -> FiniteGroup:
    return FiniteGroup(table, names=names)
