"""Finite commutative bipartite monoids.

Elements are dense indices ``0..size-1`` and the product is a full
multiplication table.  A bipartite monoid pairs a monoid with a subset
``P`` of its elements.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence


@dataclass(frozen=True)
class Monoid:
    table: tuple[tuple[int, ...], ...]
    identity: int = 0
    generators: tuple[int, ...] = ()
    names: tuple[str, ...] | None = field(default=None, compare=False)

    @classmethod
    def from_table(cls, table, identity=0, generators=(), names=None) -> "Monoid":
        return cls(
            tuple(tuple(int(v) for v in row) for row in table),
            int(identity),
            tuple(int(g) for g in generators),
            tuple(names) if names is not None else None,
        )

    @property
    def size(self) -> int:
        return len(self.table)

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def name(self, x: int) -> str:
        if self.names is not None:
            return self.names[x]
        return str(x)


@dataclass(frozen=True)
class BipartiteMonoid:
    monoid: Monoid
    pset: frozenset[int]

    @classmethod
    def from_table(cls, table, pset, identity=0, generators=(), names=None) -> "BipartiteMonoid":
        return cls(Monoid.from_table(table, identity, generators, names), frozenset(int(p) for p in pset))

    @property
    def size(self) -> int:
        return len(self.monoid.table)

    @property
    def table(self) -> tuple[tuple[int, ...], ...]:
        return self.monoid.table

    @property
    def identity(self) -> int:
        return self.monoid.identity

    @property
    def generators(self) -> tuple[int, ...]:
        return self.monoid.generators

    def mul(self, x: int, y: int) -> int:
        return self.monoid.table[x][y]

    def pmask(self) -> int:
        mask = 0
        for p in self.pset:
            mask |= 1 << p
        return mask

    def name(self, x: int) -> str:
        return self.monoid.name(x)


@dataclass(frozen=True)
class KernelInfo:
    kernel: frozenset[int]
    kernel_identity: int
    group_exponent2: bool


@dataclass(frozen=True)
class Violation:
    kind: str  # shape | range | identity | commutativity | associativity | generators
    detail: str


def trivial() -> BipartiteMonoid:
    """The one-element bipartite monoid ({1}, {})."""
    return BipartiteMonoid.from_table([[0]], (), names=("1",))


# ---------------------------------------------------------------------------
# axioms


def check_axioms(m: Monoid | BipartiteMonoid) -> list[Violation]:
    """Return every violated monoid axiom; an empty list means ``m`` is valid."""
    pset: Iterable[int] = ()
    if isinstance(m, BipartiteMonoid):
        pset = m.pset
        m = m.monoid
    table = m.table
    n = len(table)
    out: list[Violation] = []
    if n == 0:
        return [Violation("shape", "empty table")]
    for x, row in enumerate(table):
        if len(row) != n:
            out.append(Violation("shape", f"row {x} has length {len(row)}, expected {n}"))
    if out:
        return out
    for x in range(n):
        for y in range(n):
            v = table[x][y]
            if not 0 <= v < n:
                out.append(Violation("range", f"table[{x}][{y}] = {v} out of range"))
    if not 0 <= m.identity < n:
        out.append(Violation("range", f"identity {m.identity} out of range"))
    for p in pset:
        if not 0 <= p < n:
            out.append(Violation("range", f"P element {p} out of range"))
    for g in m.generators:
        if not 0 <= g < n:
            out.append(Violation("range", f"generator {g} out of range"))
    if out:
        return out

    e = m.identity
    for x in range(n):
        if table[e][x] != x:
            out.append(Violation("identity", f"{e}*{x} = {table[e][x]}, expected {x}"))
    for x in range(n):
        for y in range(x + 1, n):
            if table[x][y] != table[y][x]:
                out.append(Violation("commutativity", f"{x}*{y} = {table[x][y]} but {y}*{x} = {table[y][x]}"))
    for x in range(n):
        tx = table[x]
        for y in range(n):
            xy = tx[y]
            txy = table[xy]
            ty = table[y]
            for z in range(n):
                if txy[z] != tx[ty[z]]:
                    out.append(Violation("associativity", f"({x}*{y})*{z} != {x}*({y}*{z})"))
    if m.generators:
        reached = closure(m, m.generators)
        if len(reached) != n:
            missing = sorted(set(range(n)) - reached)
            out.append(Violation("generators", f"generators miss elements {missing}"))
    return out


def closure(m: Monoid | BipartiteMonoid, seed: Iterable[int]) -> set[int]:
    """Submonoid generated by ``seed``."""
    if isinstance(m, BipartiteMonoid):
        m = m.monoid
    table = m.table
    gens = list(dict.fromkeys(seed))
    reached = {m.identity}
    frontier = [m.identity]
    while frontier:
        nxt = []
        for x in frontier:
            row = table[x]
            for g in gens:
                y = row[g]
                if y not in reached:
                    reached.add(y)
                    nxt.append(y)
        frontier = nxt
    return reached


def generating_sequence(m: Monoid | BipartiteMonoid) -> tuple[int, ...]:
    """A greedy irredundant-ish generating sequence (stored generators if present)."""
    if isinstance(m, BipartiteMonoid):
        m = m.monoid
    if m.generators:
        return m.generators
    gens: list[int] = []
    reached = {m.identity}
    for x in range(m.size):
        if x not in reached:
            gens.append(x)
            reached = closure(m, gens)
    return tuple(gens)


# ---------------------------------------------------------------------------
# P-related structure


def p_signatures(b: BipartiteMonoid) -> list[int]:
    """For each x the bitmask of z with xz in P."""
    pm = b.pmask()
    out = []
    for row in b.table:
        s = 0
        for z, v in enumerate(row):
            if pm >> v & 1:
                s |= 1 << z
        out.append(s)
    return out


def indistinguishable(b: BipartiteMonoid, x: int, y: int) -> bool:
    _check_index(b, x)
    _check_index(b, y)
    tx, ty, p = b.table[x], b.table[y], b.pset
    return all((tx[z] in p) == (ty[z] in p) for z in range(b.size))


def distinguishing_witness(b: BipartiteMonoid, x: int, y: int) -> int | None:
    tx, ty, p = b.table[x], b.table[y], b.pset
    for z in range(b.size):
        if (tx[z] in p) != (ty[z] in p):
            return z
    return None


def is_reduced(b: BipartiteMonoid) -> bool:
    sigs = p_signatures(b)
    return len(set(sigs)) == len(sigs)


def reduce(b: BipartiteMonoid) -> tuple[BipartiteMonoid, tuple[int, ...]]:
    """Quotient by indistinguishability.

    Returns the reduced bipartite monoid and the projection map (a tuple
    indexed by the elements of ``b``).  Classes are numbered in order of
    first appearance, so the identity class is numbered like the identity.
    """
    sigs = p_signatures(b)
    cls_of_sig: dict[int, int] = {}
    reps: list[int] = []
    proj = []
    for x, s in enumerate(sigs):
        c = cls_of_sig.get(s)
        if c is None:
            c = cls_of_sig[s] = len(reps)
            reps.append(x)
        proj.append(c)
    table = [[proj[b.table[r][s]] for s in reps] for r in reps]
    pset = {proj[p] for p in b.pset}
    gens = tuple(dict.fromkeys(proj[g] for g in b.generators if proj[g] != proj[b.identity]))
    names = None
    if b.monoid.names is not None:
        names = tuple(b.monoid.names[r] for r in reps)
    red = BipartiteMonoid.from_table(table, pset, proj[b.identity], gens, names)
    return red, tuple(proj)


def meximal_set(b: BipartiteMonoid, x: int) -> frozenset[int]:
    """Elements y such that no z puts both xz and yz in P."""
    _check_index(b, x)
    sigs = p_signatures(b)
    sx = sigs[x]
    return frozenset(y for y in range(b.size) if not sigs[y] & sx)


def meximal_masks(b: BipartiteMonoid) -> list[int]:
    sigs = p_signatures(b)
    n = b.size
    out = []
    for sx in sigs:
        m = 0
        for y in range(n):
            if not sigs[y] & sx:
                m |= 1 << y
        out.append(m)
    return out


# ---------------------------------------------------------------------------
# kernel


def kernel(m: Monoid | BipartiteMonoid) -> KernelInfo:
    """Minimal ideal, computed as the intersection of all principal ideals."""
    if isinstance(m, BipartiteMonoid):
        m = m.monoid
    table = m.table
    k = set(range(m.size))
    for row in table:
        k &= set(row)
    # the minimal ideal of a finite commutative monoid is a group; its identity
    # is the idempotent power of any member
    x = min(k)
    seen = []
    y = x
    while True:
        if table[y][y] == y:
            z = y
            break
        seen.append(y)
        y = table[y][x]
        if len(seen) > m.size + 1:  # pragma: no cover - impossible for valid tables
            raise ValueError("no idempotent found in kernel")
    exp2 = all(table[g][g] == z for g in k)
    return KernelInfo(frozenset(k), z, exp2)


def is_regular(b: BipartiteMonoid) -> bool:
    info = kernel(b)
    return len(info.kernel & b.pset) == 1


def is_normal(b: BipartiteMonoid) -> bool:
    info = kernel(b)
    return info.kernel & b.pset == {info.kernel_identity}


# ---------------------------------------------------------------------------
# submonoids


def submonoid(b: BipartiteMonoid, seed: Iterable[int]) -> tuple[BipartiteMonoid, tuple[int, ...]]:
    """Sub-b.m. generated by ``seed``; returns it with its inclusion map."""
    seed = list(seed)
    for s in seed:
        _check_index(b, s)
    elems = closure(b, seed)
    order = [b.identity] + sorted(elems - {b.identity})
    return restrict(b, order, seed)


def restrict(b: BipartiteMonoid, order: Sequence[int], gens: Iterable[int] = ()) -> tuple[BipartiteMonoid, tuple[int, ...]]:
    """Restrict ``b`` to the closed subset ``order`` (identity first)."""
    index = {x: i for i, x in enumerate(order)}
    table = [[index[b.table[x][y]] for y in order] for x in order]
    pset = {index[x] for x in order if x in b.pset}
    new_gens = tuple(dict.fromkeys(index[g] for g in gens if g != b.identity))
    names = None
    if b.monoid.names is not None:
        names = tuple(b.monoid.names[x] for x in order)
    return BipartiteMonoid.from_table(table, pset, 0, new_gens, names), tuple(order)


def relabel(b: BipartiteMonoid, perm: Sequence[int]) -> BipartiteMonoid:
    """Apply the bijection old index ``x`` -> ``perm[x]``."""
    n = b.size
    inv = [0] * n
    for x, px in enumerate(perm):
        inv[px] = x
    table = [[perm[b.table[inv[i]][inv[j]]] for j in range(n)] for i in range(n)]
    names = None
    if b.monoid.names is not None:
        names = tuple(b.monoid.names[inv[i]] for i in range(n))
    return BipartiteMonoid.from_table(
        table, {perm[p] for p in b.pset}, perm[b.identity], tuple(perm[g] for g in b.generators), names
    )


def power_sequence(m: Monoid | BipartiteMonoid, x: int) -> tuple[int, int]:
    """(index, period) of the cyclic subsemigroup generated by ``x``.

    ``x^(index+period) == x^index`` with ``index >= 1`` minimal.
    """
    if isinstance(m, BipartiteMonoid):
        m = m.monoid
    seen: dict[int, int] = {}
    y, i = x, 1
    while y not in seen:
        seen[y] = i
        y = m.table[y][x]
        i += 1
    return seen[y], i - seen[y]


def power(m: Monoid | BipartiteMonoid, x: int, n: int) -> int:
    if isinstance(m, BipartiteMonoid):
        m = m.monoid
    y = m.identity
    for _ in range(n):
        y = m.table[y][x]
    return y


def _check_index(b: BipartiteMonoid, x: int) -> None:
    if not 0 <= x < b.size:
        raise IndexError(f"element {x} out of range for order {b.size}")


# ---------------------------------------------------------------------------
# JSON


def to_json_obj(b: BipartiteMonoid) -> dict:
    obj = {
        "size": b.size,
        "identity": b.identity,
        "table": [list(r) for r in b.table],
        "P": sorted(b.pset),
        "generators": list(b.generators),
    }
    if b.monoid.names is not None:
        obj["names"] = list(b.monoid.names)
    return obj


def from_json_obj(obj: dict) -> BipartiteMonoid:
    try:
        table = obj["table"]
        size = int(obj.get("size", len(table)))
        pset = obj.get("P", [])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed monoid JSON: {exc}") from None
    if size != len(table):
        raise ValueError(f"size {size} does not match table with {len(table)} rows")
    return BipartiteMonoid.from_table(table, pset, obj.get("identity", 0), obj.get("generators", []), obj.get("names"))


def dumps(b: BipartiteMonoid) -> str:
    return json.dumps(to_json_obj(b), sort_keys=True)


def loads(text: str) -> BipartiteMonoid:
    return from_json_obj(json.loads(text))
