"""Enumeration of one-generator extensions of a finite commutative monoid.

Given Q generated by x_1..x_k, every monoid Q+ generated by Q and one new
element t (with Q embedded and t outside Q) is a cyclic act of Q[t] on
itself.  We enumerate such acts as partial "coset tables" over the
generators x_1..x_k, t, in the style of low-index enumeration: the first
undefined entry in scan order is set to every existing state or to one new
state, and commutativity of every generator pair at every state is
propagated as deductions.  New states are only ever created at branch points,
so each act is produced exactly once with a canonical numbering: states of Q
keep their indices and new states follow in order of first appearance.
"""

from __future__ import annotations

import sys


def extension_tables(table, gens, max_order: int):
    """Yield multiplication tables of all simple extensions of size <= max_order.

    ``table`` is Q's table (identity 0), ``gens`` a generating sequence of Q.
    Each yielded table has Q's elements at their original indices and the
    new generator t at index ``len(table)``.
    """
    m = len(table)
    if max_order < m + 1:
        return
    k = len(gens)
    ng = k + 1
    T = k
    act: list[list] = [[table[q][x] for x in gens] + [None] for q in range(m)]
    log: list[tuple[int, int]] = []

    def assign(s, g, d, queue):
        act[s][g] = d
        log.append((s, g))
        queue.append((s, g))

    def propagate(queue) -> bool:
        while queue:
            s, g = queue.pop()
            d = act[s][g]
            rows = act
            rs = rows[s]
            rd = rows[d]
            for h in range(ng):
                if h == g:
                    continue
                e = rs[h]
                if e is not None:
                    u = rd[h]
                    v = rows[e][g]
                    if u is None:
                        if v is not None:
                            assign(d, h, v, queue)
                    elif v is None:
                        assign(e, g, u, queue)
                    elif u != v:
                        return False
                # relations where (s, g) is the second step: r*h = s
                for r in range(len(rows)):
                    rr = rows[r]
                    if rr[h] == s:
                        e2 = rr[g]
                        if e2 is not None:
                            v2 = rows[e2][h]
                            if v2 is None:
                                assign(e2, h, d, queue)
                            elif v2 != d:
                                return False
        return True

    def undo(mark):
        while len(log) > mark:
            s, g = log.pop()
            act[s][g] = None

    def first_undefined(start):
        n = len(act)
        s = start
        while s < n:
            row = act[s]
            for g in range(ng):
                if row[g] is None:
                    return s, g
            s += 1
        return None

    def build_table():
        n = len(act)
        # BFS spanning tree from the identity gives each state a word
        parent = [None] * n
        order = [0]
        parent[0] = (-1, -1)
        i = 0
        while i < len(order):
            s = order[i]
            i += 1
            for g in range(ng):
                d = act[s][g]
                if parent[d] is None:
                    parent[d] = (s, g)
                    order.append(d)
        tab = [[0] * n for _ in range(n)]
        for x in range(n):
            tab[x][0] = x
        for y in order[1:]:
            p, g = parent[y]
            for x in range(n):
                tab[x][y] = act[tab[x][p]][g]
        return tab

    sys.setrecursionlimit(max(10000, sys.getrecursionlimit()))

    def search(start):
        pos = first_undefined(start)
        if pos is None:
            yield build_table()
            return
        s, g = pos
        mark = len(log)
        n = len(act)
        if not (s == 0 and g == T):
            for d in range(n):
                q: list = []
                assign(s, g, d, q)
                if propagate(q):
                    yield from search(s)
                undo(mark)
        if n < max_order:
            act.append([None] * ng)
            q = []
            assign(s, g, n, q)
            if propagate(q):
                yield from search(s)
            undo(mark)
            act.pop()

    yield from search(0)
