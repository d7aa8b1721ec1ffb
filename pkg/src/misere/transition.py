"""Transition algebras: pairs (x, E) closed under (x,E)(y,F) = (xy, xF | yE).

Option sets are bitmasks internally and frozensets at the API boundary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import _fast
from .monoid import BipartiteMonoid, from_json_obj, to_json_obj


@dataclass(frozen=True, order=True)
class TransitionPair:
    value: int
    options: frozenset[int] = frozenset()

    @staticmethod
    def of(x: int, E: Iterable[int] = ()) -> "TransitionPair":
        return TransitionPair(int(x), frozenset(int(e) for e in E))

    def mask(self) -> int:
        m = 0
        for e in self.options:
            m |= 1 << e
        return m

    def sort_key(self):
        return (self.value, sorted(self.options))


def _from_mask(x: int, mask: int) -> TransitionPair:
    return TransitionPair(x, frozenset(i for i in range(mask.bit_length()) if mask >> i & 1))


@dataclass(frozen=True)
class TransitionAlgebra:
    base: BipartiteMonoid
    pairs: frozenset[TransitionPair]
    generator_pairs: tuple[TransitionPair, ...] = ()

    def sorted_pairs(self) -> list[TransitionPair]:
        return sorted(self.pairs, key=TransitionPair.sort_key)


@dataclass
class ValidityReport:
    parity_ok: bool
    completeness_ok: bool
    closure_ok: bool
    wellfounded_ok: bool
    rank: dict[int, int] = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.parity_ok and self.completeness_ok and self.closure_ok and self.wellfounded_ok


class AlgebraTooLarge(OverflowError):
    pass


def pair_product(b: BipartiteMonoid, p: TransitionPair, q: TransitionPair) -> TransitionPair:
    t = b.table
    x, y = p.value, q.value
    opts = {t[x][f] for f in q.options} | {t[y][e] for e in p.options}
    return TransitionPair(t[x][y], frozenset(opts))


def _close(table, identity, gens: list[tuple[int, int]], cap: int | None):
    seen = {(identity, 0)}
    stack = [(identity, 0)]
    cache: dict = {}
    while stack:
        x, e = stack.pop()
        rowx = table[x]
        for g, gm in gens:
            a = cache.get((x, gm))
            if a is None:
                a = cache[(x, gm)] = _fast.translate(rowx, gm)
            c = cache.get((g, e))
            if c is None:
                c = cache[(g, e)] = _fast.translate(table[g], e)
            p = (rowx[g], a | c)
            if p not in seen:
                seen.add(p)
                if cap is not None and len(seen) > cap:
                    raise AlgebraTooLarge(f"transition algebra exceeded {cap} pairs")
                stack.append(p)
    return seen


def generate_algebra(base: BipartiteMonoid, gens: Sequence[TransitionPair], cap: int | None = 200000) -> TransitionAlgebra:
    """Least closed set containing ``gens`` and the identity pair (1, {})."""
    n = base.size
    for g in gens:
        if not 0 <= g.value < n or any(not 0 <= e < n for e in g.options):
            raise ValueError(f"pair {g} has elements outside the monoid")
    raw = _close(base.table, base.identity, [(g.value, g.mask()) for g in gens], cap)
    pairs = frozenset(_from_mask(x, m) for x, m in raw)
    return TransitionAlgebra(base, pairs, tuple(gens))


def validate(t: TransitionAlgebra) -> ValidityReport:
    """Check parity, completeness, closure and well-foundedness.

    Well-foundedness uses the least fixed point: rank 0 holds the x with
    (x, {}) present (the identity must be among them); rank k+1 adds every x
    having a pair whose options all already carry a rank.
    """
    b = t.base
    n = b.size
    table = b.table
    pm = b.pmask()
    pairs = [(p.value, p.mask()) for p in t.sorted_pairs()]
    cex: list = []

    parity_ok = True
    for x, e in pairs:
        if not _fast.pair_parity_ok(x, e, pm):
            parity_ok = False
            cex.append(("parity", x, _bits(e)))
    for x, e in pairs:
        if e == 0 and x != b.identity:
            # legal for the four conditions but such a pair would be realized by
            # the empty game, which only the identity can represent
            cex.append(("empty-options", x, []))

    values = {x for x, _ in pairs}
    missing = sorted(set(range(n)) - values)
    completeness_ok = not missing
    for x in missing:
        cex.append(("completeness", x))

    closure_ok = True
    pset = set(pairs)
    by_val: dict[int, list[int]] = {}
    for x, e in pairs:
        by_val.setdefault(x, []).append(e)
    cache: dict = {}
    for i, (x, e) in enumerate(pairs):
        if not closure_ok:
            break
        rowx = table[x]
        for y, f in pairs[i:]:
            a = cache.get((x, f))
            if a is None:
                a = cache[(x, f)] = _fast.translate(rowx, f)
            c = cache.get((y, e))
            if c is None:
                c = cache[(y, e)] = _fast.translate(table[y], e)
            if (rowx[y], a | c) not in pset:
                closure_ok = False
                cex.append(("closure", (x, _bits(e)), (y, _bits(f))))
                break

    rank: dict[int, int] = {}
    level = 0
    ranked_mask = 0
    while True:
        new = []
        for x, es in sorted(by_val.items()):
            if x in rank:
                continue
            if any(e & ~ranked_mask == 0 for e in es):
                new.append(x)
        if not new:
            break
        for x in new:
            rank[x] = level
        for x in new:
            ranked_mask |= 1 << x
        level += 1
    wellfounded_ok = rank.get(b.identity) == 0 and len(rank) == n
    if rank.get(b.identity) != 0:
        cex.append(("wellfounded", "no pair (1, {})"))
    for x in range(n):
        if x not in rank and x in values:
            cex.append(("wellfounded", x))
    return ValidityReport(parity_ok, completeness_ok, closure_ok, wellfounded_ok, rank, cex)


def _bits(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def minimex_generators(b: BipartiteMonoid, sequence: Sequence[int]) -> list[TransitionPair]:
    """(x_i, M_{x_i} & S_{i-1}) for the construction sequence ``sequence``."""
    level = slice_levels(b, sequence)
    raw = _fast.minimex_generators(b.table, b.pmask(), list(sequence), level)
    return [_from_mask(x, m) for x, m in raw]


def slice_levels(b: BipartiteMonoid, sequence: Sequence[int]) -> list[int]:
    """level[y] = least i with y in the submonoid generated by x_1..x_i."""
    from .monoid import closure

    level = [-1] * b.size
    level[b.identity] = 0
    gens: list[int] = []
    for i, x in enumerate(sequence, start=1):
        gens.append(x)
        for y in closure(b, gens):
            if level[y] < 0:
                level[y] = i
    if min(level) < 0:
        raise ValueError("sequence does not generate the monoid")
    return level


def minimex_algebra(scheme, cap: int | None = 200000) -> TransitionAlgebra:
    """The algebra generated by the minimex pairs of a construction scheme.

    ``scheme`` is a ConstructionScheme or a (BipartiteMonoid, sequence) pair.
    """
    if isinstance(scheme, tuple):
        b, seq = scheme
    else:
        b, seq = scheme.bm, scheme.sequence
    return generate_algebra(b, minimex_generators(b, seq), cap)


# ---------------------------------------------------------------------------
# realization


def realize_games(t: TransitionAlgebra, report: ValidityReport | None = None):
    """Games H_x (by rank) and H_(x,E) = {H_y : y in E} for every pair.

    Returns ``(pair_games, witness_games)``: dicts TransitionPair -> Game and
    element -> Game.  Among the pairs of x whose options have lower rank, the
    witness is the one with the lexicographically least sorted option list.
    """
    from .games import Game

    if report is None:
        report = validate(t)
    if not report.valid:
        raise ValueError("transition algebra is not valid")
    b = t.base
    for p in t.pairs:
        if not p.options and p.value != b.identity:
            raise ValueError(f"pair ({p.value}, {{}}) cannot be realized: only the identity has no options")
    rank = report.rank
    witness: dict[int, Game] = {}
    for x in sorted(range(b.size), key=lambda v: (rank[v], v)):
        cands = [p for p in t.pairs if p.value == x and all(rank[y] < rank[x] for y in p.options)]
        best = min(cands, key=lambda p: sorted(p.options))
        witness[x] = Game.make(witness[y] for y in best.options)
    games = {p: Game.make(witness[y] for y in p.options) for p in t.sorted_pairs()}
    return games, witness


def realized_phi(t: TransitionAlgebra, pair_games, witness) -> dict:
    """Game -> element for every realized game; raises on conflicting values."""
    phi: dict = {}
    for x, g in witness.items():
        phi[g] = x
    for p, g in pair_games.items():
        old = phi.setdefault(g, p.value)
        if old != p.value:
            raise ValueError(f"game {g} realizes both {old} and {p.value}")
    return phi


# ---------------------------------------------------------------------------
# JSON


def algebra_to_json_obj(t: TransitionAlgebra) -> dict:
    return {
        "monoid": to_json_obj(t.base),
        "pairs": [{"x": p.value, "E": sorted(p.options)} for p in t.sorted_pairs()],
        "generators": [{"x": p.value, "E": sorted(p.options)} for p in t.generator_pairs],
    }


def algebra_from_json_obj(obj: dict) -> TransitionAlgebra:
    try:
        b = from_json_obj(obj["monoid"])
        pairs = frozenset(TransitionPair.of(p["x"], p["E"]) for p in obj.get("pairs", []))
        gens = tuple(TransitionPair.of(p["x"], p["E"]) for p in obj.get("generators", []))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed transition JSON: {exc}") from None
    for p in pairs | set(gens):
        if not 0 <= p.value < b.size or any(not 0 <= e < b.size for e in p.options):
            raise ValueError(f"pair {p} has elements outside the monoid")
    if not pairs:
        # generators only: take the closure
        return generate_algebra(b, gens)
    return TransitionAlgebra(b, pairs, gens)


def dumps(t: TransitionAlgebra) -> str:
    return json.dumps(algebra_to_json_obj(t), sort_keys=True)


__all__ = [
    "TransitionPair",
    "TransitionAlgebra",
    "ValidityReport",
    "AlgebraTooLarge",
    "pair_product",
    "generate_algebra",
    "validate",
    "minimex_generators",
    "minimex_algebra",
    "slice_levels",
    "realize_games",
    "realized_phi",
    "algebra_to_json_obj",
    "algebra_from_json_obj",
]
