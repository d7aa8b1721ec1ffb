"""Canonical forms and isomorphism tests for bipartite monoids.

``canonical_key`` runs an individualization/refinement search: colors are
refined by the multiset of (color of y, color of xy) over all y, a
non-singleton cell is split by individualizing each of its members in turn,
and the lexicographically least relabeled (table, P) over all leaves wins.
Automorphisms found along the way (two leaves giving the same encoding) prune
sibling branches lying in one orbit.

``isomorphic`` is deliberately a different algorithm (generator images plus
word extension) so the two can check each other.
"""

from __future__ import annotations

from .monoid import BipartiteMonoid, generating_sequence, power_sequence


def _initial_colors(b: BipartiteMonoid) -> list[int]:
    table = b.table
    n = b.size
    p = b.pset
    inv = []
    for x in range(n):
        row = table[x]
        inv.append((
            x != b.identity,
            x in p,
            row[x] == x,
            sum(1 for v in row if v in p),
            power_sequence(b, x),
            len(set(row)),
        ))
    return _rank(inv)


def _rank(keys) -> list[int]:
    order = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


def _refine(table, colors: list[int]) -> list[int]:
    """Equitable refinement; colors of the result are canonical given the input."""
    n = len(table)
    ncls = len(set(colors))
    while True:
        keys = []
        for x in range(n):
            row = table[x]
            sig = sorted((colors[y], colors[row[y]]) for y in range(n))
            keys.append((colors[x], tuple(sig)))
        new = _rank(keys)
        k = len(set(new))
        if k == ncls:
            return new
        colors, ncls = new, k


def _encode(b: BipartiteMonoid, perm: list[int]) -> tuple:
    """Relabeled (table, P) as a flat tuple; perm maps old -> new."""
    n = b.size
    inv = [0] * n
    for x, px in enumerate(perm):
        inv[px] = x
    table = b.table
    flat = []
    for i in range(n):
        row = table[inv[i]]
        flat.extend(perm[row[inv[j]]] for j in range(n))
    flat.extend(1 if inv[i] in b.pset else 0 for i in range(n))
    return tuple(flat)


class _Search:
    def __init__(self, b: BipartiteMonoid):
        self.b = b
        self.table = b.table
        self.best = None
        self.best_perm = None
        self.first = None
        self.first_perm = None
        self.autos: list[list[int]] = []

    def run(self):
        colors = _refine(self.table, _initial_colors(self.b))
        self._node(colors, [])
        return self.best, self.best_perm

    def _node(self, colors, path):
        n = len(colors)
        if len(set(colors)) == n:
            self._leaf(colors)
            return
        sizes: dict[int, int] = {}
        for c in colors:
            sizes[c] = sizes.get(c, 0) + 1
        # first smallest non-singleton cell
        target = min((s, c) for c, s in sizes.items() if s > 1)[1]
        cell = [x for x in range(n) if colors[x] == target]
        tried: list[int] = []
        orbit = None
        seen_autos = -1
        for v in cell:
            if tried:
                if seen_autos != len(self.autos):
                    seen_autos = len(self.autos)
                    orbit = self._orbits(path)
                if orbit is not None and any(orbit[v] == orbit[t] for t in tried):
                    continue
            tried.append(v)
            new = [2 * c for c in colors]
            new[v] += 1
            self._node(_refine(self.table, _rank(new)), path + [v])

    def _leaf(self, colors):
        perm = list(colors)
        code = _encode(self.b, perm)
        if self.first is None:
            self.first, self.first_perm = code, perm
            self.best, self.best_perm = code, perm
            return
        for ref, rperm in ((self.first, self.first_perm), (self.best, self.best_perm)):
            if code == ref:
                # rperm^-1 . perm is an automorphism
                inv = [0] * len(rperm)
                for x, px in enumerate(rperm):
                    inv[px] = x
                self.autos.append([inv[perm[x]] for x in range(len(perm))])
                return
        if code < self.best:
            self.best, self.best_perm = code, perm

    def _orbits(self, path):
        """Orbit representative of each element under autos fixing ``path``."""
        gens = [g for g in self.autos if all(g[p] == p for p in path)]
        if not gens:
            return None
        n = self.b.size
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in gens:
            for x in range(n):
                a, c = find(x), find(g[x])
                if a != c:
                    parent[a] = c
        return [find(x) for x in range(n)]


def canonical_form(b: BipartiteMonoid) -> tuple[tuple, list[int]]:
    """(encoding, labeling) where labeling maps element -> canonical index."""
    code, perm = _Search(b).run()
    return code, perm


def canonical_key(b: BipartiteMonoid) -> bytes:
    """Byte string equal for two bipartite monoids iff they are isomorphic."""
    return canonical_key_and_labeling(b)[0]


def canonical_key_and_labeling(b: BipartiteMonoid) -> tuple[bytes, list[int]]:
    n = b.size
    code, perm = canonical_form(b)
    width = 1 if n < 256 else 2
    out = bytearray(n.to_bytes(2, "big"))
    for v in code:
        out += v.to_bytes(width, "big")
    return bytes(out), perm


def canonical_relabel(b: BipartiteMonoid) -> BipartiteMonoid:
    """Isomorphic copy of ``b`` in canonical labeling (identity lands first)."""
    from .monoid import relabel

    _, perm = canonical_form(b)
    return relabel(b, perm)


# ---------------------------------------------------------------------------
# independent isomorphism search


def _invariant(b: BipartiteMonoid, x: int):
    row = b.table[x]
    p = b.pset
    return (x in p, row[x] == x, power_sequence(b, x), sum(1 for v in row if v in p), len(set(row)))


def isomorphic(b1: BipartiteMonoid, b2: BipartiteMonoid) -> dict[int, int] | None:
    """An isomorphism b1 -> b2 as a dict, or None.

    Picks a generating sequence of b1, tries every invariant-compatible image
    for each generator, and extends the map along products.
    """
    n = b1.size
    if n != b2.size or len(b1.pset) != len(b2.pset):
        return None
    inv1 = [_invariant(b1, x) for x in range(n)]
    inv2 = [_invariant(b2, x) for x in range(n)]
    if sorted(inv1) != sorted(inv2):
        return None
    gens = list(generating_sequence(b1))
    t1, t2 = b1.table, b2.table
    p1, p2 = b1.pset, b2.pset

    def extend(phi: dict[int, int], g: int, img: int) -> dict[int, int] | None:
        phi = dict(phi)
        used = set(phi.values())
        if g in phi:
            return phi if phi[g] == img else None
        if img in used or inv1[g] != inv2[img]:
            return None
        phi[g] = img
        stack = [g]
        while stack:
            x = stack.pop()
            for y in list(phi):
                u, v = t1[x][y], t2[phi[x]][phi[y]]
                w = phi.get(u)
                if w is None:
                    if v in phi.values() or inv1[u] != inv2[v]:
                        return None
                    phi[u] = v
                    stack.append(u)
                elif w != v:
                    return None
        return phi

    start = {b1.identity: b2.identity}

    def search(i, phi):
        if i == len(gens):
            if len(phi) != n:
                return None
            for x in range(n):
                if (x in p1) != (phi[x] in p2):
                    return None
                for y in range(x, n):
                    if phi[t1[x][y]] != t2[phi[x]][phi[y]]:
                        return None
            return phi
        g = gens[i]
        if g in phi:
            return search(i + 1, phi)
        for img in range(n):
            nxt = extend(phi, g, img)
            if nxt is not None:
                res = search(i + 1, nxt)
                if res is not None:
                    return res
        return None

    if (b1.identity in p1) != (b2.identity in p2):
        return None
    return search(0, start)
