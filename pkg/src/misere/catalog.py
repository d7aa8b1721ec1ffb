"""The T_n and R_{2^n+4} families, tame extensions and the |P| = 2 classifier."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .canonical import isomorphic
from .monoid import BipartiteMonoid, kernel, trivial


@dataclass(frozen=True)
class GrundyLabeledBM:
    bm: BipartiteMonoid
    labels: dict[int, int] = field(default_factory=dict, hash=False)

    def label(self, x: int) -> int | None:
        return self.labels.get(x)

    def element_with_label(self, g: int, within=None) -> int | None:
        """Element labeled ``g``, restricted to ``within`` when given."""
        for x, v in sorted(self.labels.items()):
            if v == g and (within is None or x in within):
                return x
        return None


@dataclass(frozen=True)
class FamilyLabel:
    family: str  # "T", "R" or "NotApplicable"
    index: int | float | None = None

    def __str__(self) -> str:
        if self.family == "NotApplicable":
            return "not applicable"
        n = self.index
        if n == math.inf:
            return f"{self.family} family, n=inf"
        order = 2 ** n + (2 if self.family == "T" else 4)
        return f"{self.family} family, n={n} (order {order})"


def make_Tn(n: int) -> GrundyLabeledBM:
    """T_n: the kernel Z_2^n (Grundy values 0..2^n-1) plus 1 and a.

    Layout for n >= 2: 0 = 1, 1 = a, 2 + i = z_i.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return GrundyLabeledBM(trivial(), {0: 0})
    if n == 1:
        b = BipartiteMonoid.from_table([[0, 1], [1, 0]], {1}, 0, (1,), ("1", "a"))
        return GrundyLabeledBM(b, {0: 0, 1: 1})
    k = 2 ** n
    size = k + 2
    table = [[0] * size for _ in range(size)]
    for x in range(size):
        table[0][x] = table[x][0] = x
    table[1][1] = 0
    for i in range(k):
        z = 2 + i
        table[1][z] = table[z][1] = 2 + (i ^ 1)
        for j in range(k):
            table[z][2 + j] = 2 + (i ^ j)
    names = ("1", "a") + tuple(f"z{i}" for i in range(k))
    gens = (1,) + tuple(2 + 2 ** j for j in range(1, n))
    b = BipartiteMonoid.from_table(table, {1, 2}, 0, gens, names)
    labels = {0: 0, 1: 1}
    labels.update({2 + i: i for i in range(k)})
    return GrundyLabeledBM(b, labels)


def make_R(n: int) -> GrundyLabeledBM:
    """R_{2^n+4} = T_n plus t and at, with t^2 = z_0 and t z_i = z_i."""
    if n < 2:
        raise ValueError("make_R needs n >= 2")
    base = make_Tn(n)
    k = 2 ** n
    m = k + 2
    t, at = m, m + 1
    size = m + 2
    table = [list(r) + [0, 0] for r in base.bm.table] + [[0] * size, [0] * size]

    def put(x, y, v):
        table[x][y] = table[y][x] = v

    put(0, t, t)
    put(0, at, at)
    put(1, t, at)
    put(1, at, t)
    for i in range(k):
        put(2 + i, t, 2 + i)
        put(2 + i, at, 2 + (i ^ 1))
    put(t, t, 2)
    put(at, at, 2)
    put(t, at, 3)
    names = base.bm.monoid.names + ("t", "at")
    b = BipartiteMonoid.from_table(table, {1, 2}, 0, base.bm.generators + (t,), names)
    labels = dict(base.labels)
    labels[t] = 0
    labels[at] = 1
    return GrundyLabeledBM(b, labels)


def tame_extend(b: BipartiteMonoid) -> BipartiteMonoid:
    """Adjoin a mirror copy of the kernel: x*bar(y) = bar(xy), bar(x)*bar(y) = xy."""
    return _tame_extend(b)[0]


def _tame_extend(b: BipartiteMonoid):
    info = kernel(b)
    ks = sorted(info.kernel)
    n = b.size
    bar = {k: n + i for i, k in enumerate(ks)}
    size = n + len(ks)
    table = [list(r) + [0] * len(ks) for r in b.table] + [[0] * size for _ in ks]
    for x in range(n):
        for k in ks:
            v = bar[b.table[x][k]]
            table[x][bar[k]] = table[bar[k]][x] = v
    for k in ks:
        for j in ks:
            table[bar[k]][bar[j]] = b.table[k][j]
    names = None
    if b.monoid.names is not None:
        names = b.monoid.names + tuple(f"{b.monoid.names[k]}~" for k in ks)
    gens = tuple(g for g in b.generators) + (bar[info.kernel_identity],)
    ext = BipartiteMonoid.from_table(table, b.pset, b.identity, gens, names)
    return ext, bar, info


def tame_extend_labeled(g: GrundyLabeledBM) -> tuple[GrundyLabeledBM, int]:
    """Tame extension carrying Grundy labels: bar(k) gets label(k) + |K|.

    Returns the labeled extension and the new element bar(z).
    """
    ext, bar, info = _tame_extend(g.bm)
    size_k = len(info.kernel)
    labels = dict(g.labels)
    for k, bk in bar.items():
        if k in g.labels:
            labels[bk] = g.labels[k] ^ size_k
    return GrundyLabeledBM(ext, labels), bar[info.kernel_identity]


def tame_power(b: BipartiteMonoid, k: int) -> BipartiteMonoid:
    if k < 0:
        raise ValueError("k must be non-negative")
    for _ in range(k):
        b = tame_extend(b)
    return b


def classify_p2(b: BipartiteMonoid) -> FamilyLabel:
    """Place a reduced b.m. with |P| = 2 in the T or R family."""
    if len(b.pset) != 2:
        return FamilyLabel("NotApplicable")
    size = b.size
    n = (size - 2).bit_length() - 1
    if n >= 2 and 2 ** n + 2 == size and isomorphic(b, make_Tn(n).bm) is not None:
        return FamilyLabel("T", n)
    n = (size - 4).bit_length() - 1 if size > 4 else -1
    if n >= 2 and 2 ** n + 4 == size and isomorphic(b, make_R(n).bm) is not None:
        return FamilyLabel("R", n)
    return FamilyLabel("NotApplicable")
