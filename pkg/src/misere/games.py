"""Impartial games, a brute-force misere/normal oracle, and octal heap games.

Games are hash-consed: ``Game.make`` returns the unique object for a given
set of options, so identity comparison is structural equality.  A Position
is a disjunctive sum, stored as a sorted tuple of non-zero components.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .catalog import GrundyLabeledBM, tame_extend_labeled
from .monoid import BipartiteMonoid, closure, is_normal, kernel, meximal_set, power_sequence


class Game:
    __slots__ = ("options", "id", "birthday", "__weakref__")

    _store: dict[frozenset, "Game"] = {}
    _lock = threading.Lock()

    def __init__(self, options: tuple["Game", ...], gid: int):
        self.options = options
        self.id = gid
        self.birthday = 1 + max((o.birthday for o in options), default=-1)

    @classmethod
    def make(cls, options: Iterable["Game"] = ()) -> "Game":
        opts = {o.id: o for o in options}
        key = frozenset(opts)
        g = cls._store.get(key)
        if g is not None:
            return g
        with cls._lock:
            g = cls._store.get(key)
            if g is None:
                g = Game(tuple(opts[i] for i in sorted(opts)), len(cls._store))
                cls._store[key] = g
        return g

    def __repr__(self) -> str:
        return f"Game#{self.id}"

    def __lt__(self, other: "Game") -> bool:
        return self.id < other.id


ZERO = Game.make()


def nim(n: int) -> Game:
    """The nim-heap *n."""
    g = ZERO
    heaps = [ZERO]
    for _ in range(n):
        g = Game.make(heaps)
        heaps.append(g)
    return g


STAR = nim(1)


def descendants(games: Iterable[Game]) -> set[Game]:
    """All games reachable from ``games`` (including themselves)."""
    seen: set[Game] = set()
    stack = list(games)
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        stack.extend(g.options)
    return seen


def game_sum(*games: Game) -> Game:
    """The disjunctive sum as a single game tree."""
    return _sum_of(tuple(sorted(g for g in games if g is not ZERO)))


_sum_cache: dict[tuple, Game] = {}


def _sum_of(comps: tuple) -> Game:
    if not comps:
        return ZERO
    if len(comps) == 1:
        return comps[0]
    key = tuple(g.id for g in comps)
    g = _sum_cache.get(key)
    if g is None:
        opts = [_sum_of(c.components) for c in Position(comps).moves()]
        g = _sum_cache[key] = Game.make(opts)
    return g


@dataclass(frozen=True)
class Position:
    components: tuple[Game, ...] = ()

    @staticmethod
    def of(*games: Game) -> "Position":
        return Position(tuple(sorted(g for g in games if g is not ZERO)))

    def __add__(self, other: "Position") -> "Position":
        return Position.of(*self.components, *other.components)

    def key(self) -> tuple[int, ...]:
        return tuple(g.id for g in self.components)

    def moves(self) -> list["Position"]:
        comps = self.components
        out = []
        for i, g in enumerate(comps):
            if i and comps[i - 1] is g:
                continue
            rest = comps[:i] + comps[i + 1:]
            for o in g.options:
                out.append(Position.of(*rest, o))
        return out


# ---------------------------------------------------------------------------
# oracle

_misere: dict[tuple, bool] = {}  # True = P-position
_normal: dict[tuple, bool] = {}
_grundy: dict[int, int] = {}


def _as_position(p) -> Position:
    return p if isinstance(p, Position) else Position.of(p)


def _is_p(pos: Position, memo: dict, misere: bool) -> bool:
    """P-position test; an explicit stack replaces recursion on deep games.

    Moves are examined in order and the scan stops at the first P option,
    exactly as the recursive definition with a short-circuiting ``any``.
    """
    key = pos.key()
    if key in memo:
        return memo[key]
    # frames: [position key, moves, index of the next move to look at]
    stack = [[key, pos.moves(), 0]]
    while stack:
        frame = stack[-1]
        ck, moves, i = frame
        if not moves:
            memo[ck] = not misere
            stack.pop()
            continue
        while i < len(moves):
            mk = moves[i].key()
            v = memo.get(mk)
            if v is None:
                break
            if v:
                break
            i += 1
        frame[2] = i
        if i == len(moves):
            memo[ck] = True
            stack.pop()
            continue
        mk = moves[i].key()
        v = memo.get(mk)
        if v is None:
            stack.append([mk, moves[i].moves(), 0])
        else:
            memo[ck] = False
            stack.pop()
    return memo[key]


def outcome_misere(p: Position | Game) -> str:
    """'P' or 'N' when the player making the last move loses."""
    return "P" if _is_p(_as_position(p), _misere, True) else "N"


def outcome_normal(p: Position | Game) -> str:
    return "P" if _is_p(_as_position(p), _normal, False) else "N"


def mex(values: Iterable[int]) -> int:
    s = set(values)
    m = 0
    while m in s:
        m += 1
    return m


def grundy(g: Game | Position) -> int:
    if isinstance(g, Position):
        v = 0
        for c in g.components:
            v ^= grundy(c)
        return v
    v = _grundy.get(g.id)
    if v is None:
        # iterative post-order so deep chains do not hit the recursion limit
        stack = [g]
        while stack:
            h = stack[-1]
            todo = [o for o in h.options if o.id not in _grundy]
            if todo:
                stack.extend(todo)
                continue
            stack.pop()
            _grundy[h.id] = mex(_grundy[o.id] for o in h.options)
        v = _grundy[g.id]
    return v


# ---------------------------------------------------------------------------
# closures, pretending functions and transition data


def closure_positions(gens: Iterable[Game], max_components: int = 4, max_positions: int | None = None) -> set[Position]:
    """Every sum of at most ``max_components`` games from the hereditary closure of ``gens``."""
    if max_components < 0:
        raise ValueError("max_components must be non-negative")
    pool = sorted(g for g in descendants(gens) if g is not ZERO)
    out: set[Position] = set()
    for k in range(max_components + 1):
        for combo in itertools.combinations_with_replacement(pool, k):
            out.add(Position(combo))
            if max_positions is not None and len(out) > max_positions:
                raise OverflowError(f"more than {max_positions} positions")
    return out


def position_value(b: BipartiteMonoid, phi: Mapping[Game, int], pos: Position) -> int:
    x = b.identity
    for g in pos.components:
        x = b.table[x][phi[g]]
    return x


def transition_of_positions(positions: Iterable[Position], phi: Mapping[Game, int], b: BipartiteMonoid) -> set[tuple[int, frozenset[int]]]:
    """The induced (value, option values) pairs."""
    out = set()
    for pos in positions:
        x = position_value(b, phi, pos)
        e = frozenset(position_value(b, phi, m) for m in pos.moves())
        out.add((x, e))
    return out


@dataclass
class PretensionReport:
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_pretension_parity(gens: Iterable[Game], phi: Mapping[Game, int], b: BipartiteMonoid, max_components: int = 4) -> PretensionReport:
    """Compare ``phi(sum) in P`` with the brute-force misere outcome on every bounded sum."""
    phi = dict(phi)
    phi.setdefault(ZERO, b.identity)
    rep = PretensionReport()
    for pos in sorted(closure_positions(gens, max_components), key=lambda p: (len(p.components), p.key())):
        rep.checked += 1
        try:
            x = position_value(b, phi, pos)
        except KeyError as exc:
            rep.violations.append((pos, None, f"phi undefined on {exc.args[0]!r}"))
            continue
        want = outcome_misere(pos)
        if (x in b.pset) != (want == "P"):
            rep.violations.append((pos, x, want))
    return rep


# ---------------------------------------------------------------------------
# Generalized Mex Rule


@dataclass
class MexCheck:
    ok: bool
    reason: str = ""
    counterexample: tuple | None = None


def gen_mex_check(base, x: int, ext: BipartiteMonoid, E: Iterable[int], embed: Sequence[int] | None = None) -> MexCheck:
    """Check conditions (i) and (ii) for a new game with option values ``E`` and value ``x``.

    ``base`` is a transition algebra on the smaller b.m.; each of its pairs
    (y, F) stands for the games Y with that value and option values.
    ``embed`` maps the base elements into ``ext`` (identity map by default);
    ``x`` and ``E`` are elements of ``ext``.  The quantifier over n is cut at
    index + period of x, beyond which the powers of x repeat.
    """
    q = base.base
    if embed is None:
        embed = list(range(q.size))
    E = set(E)
    t = ext.table
    r = ext.pset
    if closure(ext, [embed[g] for g in range(q.size)] + [x]) != set(range(ext.size)):
        return MexCheck(False, "ext is not generated by the base and x")
    mx = meximal_set(ext, x)
    bad = sorted(E - mx)
    if bad:
        return MexCheck(False, "condition (i): options outside the meximal set", (bad[0],))
    index, period = power_sequence(ext, x)
    powers = [ext.identity]
    for _ in range(index + period + 1):
        powers.append(t[powers[-1]][x])
    for pair in sorted(base.pairs, key=lambda p: (p.value, sorted(p.options))):
        y = embed[pair.value]
        fs = [embed[f] for f in pair.options]
        for n in range(index + period):
            xn, xn1 = powers[n], powers[n + 1]
            if t[xn1][y] in r:
                continue
            if any(t[xn1][f] in r for f in fs):
                continue
            if any(t[t[xn][e]][y] in r for e in E):
                continue
            return MexCheck(False, "condition (ii)", (pair.value, tuple(sorted(pair.options)), n))
    return MexCheck(True)


def extend_by_kernel_subset(g: GrundyLabeledBM, E: Iterable[int]) -> tuple[GrundyLabeledBM, int]:
    """Predicted quotient and value of a game whose option values are ``E`` (a kernel subset).

    A proper subset leaves the quotient unchanged and the value is the mex;
    the whole kernel produces the tame extension and the new element bar(z).
    """
    info = kernel(g.bm)
    E = set(E)
    if not E <= info.kernel:
        raise ValueError(f"elements {sorted(E - info.kernel)} are not in the kernel")
    if E == set(info.kernel):
        return tame_extend_labeled(g)
    m = mex(g.labels[e] for e in E)
    x = g.element_with_label(m, info.kernel)
    if x is None:
        raise ValueError(f"no kernel element labeled {m}")
    return g, x


# ---------------------------------------------------------------------------
# discriminant predicates (for the T_n / R families; a, z read off the b.m.)


def special_elements(b: BipartiteMonoid) -> tuple[int, int]:
    """(a, z): z the kernel identity and a the member of P outside the kernel."""
    info = kernel(b)
    outside = sorted(b.pset - info.kernel)
    if len(outside) != 1:
        raise ValueError("expected exactly one P-element outside the kernel")
    return outside[0], info.kernel_identity


def discriminant(b: BipartiteMonoid, E: Iterable[int]) -> frozenset[int]:
    a, z = special_elements(b)
    return frozenset(set(E) & {b.identity, a, z, b.table[a][z]})


def is_complemented(b: BipartiteMonoid, E: Iterable[int]) -> bool:
    a, z = special_elements(b)
    E = set(E)
    return bool(E & {a, z}) and bool(E & {b.identity, b.table[a][z]})


def is_restive(b: BipartiteMonoid, E: Iterable[int]) -> bool:
    a, z = special_elements(b)
    d = discriminant(b, E)
    return d in ({b.identity, z}, {a, b.table[a][z]})


def is_restless(b: BipartiteMonoid, E: Iterable[int]) -> bool:
    a, z = special_elements(b)
    d = discriminant(b, E)
    return d in ({a, z}, {b.identity, b.table[a][z]})


def is_wild(b: BipartiteMonoid, E: Iterable[int]) -> bool:
    E = list(E)
    return is_restive(b, E) or is_restless(b, E)


def is_tame_set(b: BipartiteMonoid, E: Iterable[int]) -> bool:
    return not is_wild(b, E)


# ---------------------------------------------------------------------------
# octal and hexadecimal heap games


@dataclass(frozen=True)
class OctalCode:
    whole_heap_digit: int
    digits: tuple[int, ...]

    @staticmethod
    def parse(text: str) -> "OctalCode":
        text = text.strip()
        head, dot, tail = text.partition(".")
        if not dot or not head or not tail:
            raise ValueError(f"malformed code {text!r}: expected like 0.77")
        try:
            d0 = int(head, 16)
            digits = tuple(int(c, 16) for c in tail)
        except ValueError:
            raise ValueError(f"malformed code {text!r}") from None
        if d0 > 15 or len(head) != 1:
            raise ValueError(f"malformed code {text!r}")
        while digits and digits[-1] == 0:
            digits = digits[:-1]
        if not digits and not d0:
            raise ValueError(f"code {text!r} has no moves")
        return OctalCode(d0, digits)

    def __str__(self) -> str:
        return f"{self.whole_heap_digit:x}." + "".join(f"{d:x}" for d in self.digits)

    @property
    def last_digit_position(self) -> int:
        return len(self.digits)

    def digit(self, i: int) -> int:
        if i == 0:
            return self.whole_heap_digit
        return self.digits[i - 1] if i <= len(self.digits) else 0


def _partitions(total: int, parts: int, least: int = 1):
    """Non-decreasing tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 1:
        if total >= least:
            yield (total,)
        return
    for first in range(least, total // parts + 1):
        for rest in _partitions(total - first, parts - 1, first):
            yield (first,) + rest


def octal_moves(code: OctalCode, heap: int) -> set[tuple[int, ...]]:
    """Options of a heap as sorted tuples of remaining heap sizes.

    Digit i governs removing i tokens; its bit 2^j allows leaving exactly j
    non-empty heaps (j = 0..3).  Removing zero tokens only counts when it
    splits the heap.
    """
    out: set[tuple[int, ...]] = set()
    for i in range(0, max(len(code.digits), 0) + 1):
        d = code.digit(i)
        if not d or i > heap:
            continue
        rest = heap - i
        for j in range(4):
            if not d >> j & 1:
                continue
            if i == 0 and j < 2:
                continue
            if j == 0:
                if rest == 0:
                    out.add(())
            else:
                out.update(_partitions(rest, j))
    return out


_heap_cache: dict[tuple[str, int], Game] = {}


def octal_heap_game(code: OctalCode, n: int) -> Game:
    key = (str(code), n)
    g = _heap_cache.get(key)
    if g is None:
        opts = [game_sum(*(octal_heap_game(code, h) for h in move)) for move in octal_moves(code, n)]
        g = _heap_cache[key] = Game.make(opts)
    return g


def grundy_sequence(code: OctalCode, N: int) -> list[int]:
    """Grundy values of heaps 0..N by the usual mex-of-XOR recursion."""
    g = [0] * (N + 1)
    for n in range(1, N + 1):
        vals = set()
        for move in octal_moves(code, n):
            v = 0
            for h in move:
                v ^= g[h]
            vals.add(v)
        g[n] = mex(vals)
    return g


# ---------------------------------------------------------------------------
# faithfulness and almost-tameness


@dataclass(frozen=True)
class PretendingFunction:
    target: GrundyLabeledBM
    heap_values: dict[int, int] = field(hash=False)

    @property
    def M(self) -> int:
        return max(self.heap_values, default=0)


@dataclass
class FaithfulnessResult:
    ok: bool
    labels: dict[int, int]
    conflict: tuple | None = None


def faithfulness_check(code_or_grundy, phi: PretendingFunction) -> FaithfulnessResult:
    """Label the target by Grundy values of heap images and propagate by XOR.

    ``code_or_grundy`` is an OctalCode or an explicit list of heap Grundy
    values (index = heap size).  Fails with the first conflicting product.
    """
    b = phi.target.bm
    if isinstance(code_or_grundy, OctalCode):
        gs = grundy_sequence(code_or_grundy, phi.M)
    else:
        gs = list(code_or_grundy)
    labels = {b.identity: 0}
    for n in sorted(phi.heap_values):
        x = phi.heap_values[n]
        if not 0 <= x < b.size:
            raise ValueError(f"heap {n} maps to unknown element {x}")
        old = labels.setdefault(x, gs[n])
        if old != gs[n]:
            return FaithfulnessResult(False, labels, ("heap", n, x, old, gs[n]))
    gens = sorted(set(labels))
    frontier = list(gens)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = b.table[x][g]
                v = labels[x] ^ labels[g]
                old = labels.get(y)
                if old is None:
                    labels[y] = v
                    nxt.append(y)
                elif old != v:
                    return FaithfulnessResult(False, labels, ("product", x, g, y, old, v))
        frontier = nxt
    return FaithfulnessResult(True, labels)


VERDICT = "Q(Γ) ≅ T^k(Q,P) for some k ∈ ℕ ∪ {∞}"


@dataclass
class AlmostTameReport:
    applicable: bool
    verdict: str
    failures: list = field(default_factory=list)
    window: list = field(default_factory=list)


def almost_tame_check(code: OctalCode, n0: int, b: GrundyLabeledBM, phi: PretendingFunction, parity_components: int = 3) -> AlmostTameReport:
    """Gate for the almost-tameness ladder.

    Checks that the target is normal, that phi is faithful, that phi agrees
    with the misere oracle on sums of at most ``parity_components`` heaps
    (0 disables this), and that heaps n0 <= n < 2*n0 + d map into the kernel.
    """
    d = code.last_digit_position
    last = 2 * n0 + d - 1
    failures = []
    if n0 < 1:
        failures.append(("usage", "n0 must be at least 1"))
    missing = [n for n in range(1, last + 1) if n not in phi.heap_values]
    if missing:
        failures.append(("undefined", f"phi undefined at heaps {missing}"))
    if not is_normal(b.bm):
        failures.append(("normality", "K ∩ P is not {z}"))
    if not missing:
        faith = faithfulness_check(code, phi)
        if not faith.ok:
            failures.append(("unfaithful", faith.conflict))
    window = []
    info = kernel(b.bm)
    if not missing:
        for n in range(n0, last + 1):
            x = phi.heap_values[n]
            inside = x in info.kernel
            window.append((n, x, inside))
            if not inside:
                failures.append(("window", f"heap {n} maps to {b.bm.name(x)} outside the kernel"))
    if not missing and parity_components:
        # sums of heap games only, not of their descendants
        bm = b.bm
        for k in range(1, parity_components + 1):
            for combo in itertools.combinations_with_replacement(range(1, last + 1), k):
                pos = Position.of(*(octal_heap_game(code, n) for n in combo))
                x = bm.identity
                for n in combo:
                    x = bm.table[x][phi.heap_values[n]]
                if (x in bm.pset) != (outcome_misere(pos) == "P"):
                    failures.append(("parity", f"heaps {list(combo)}"))
                    break
    ok = not failures
    return AlmostTameReport(ok, VERDICT if ok else "inapplicable", failures, window)


# ---------------------------------------------------------------------------
# JSON: {"games": [{"id": k, "options": [ids]}]}, ids in topological order


def games_to_json_obj(roots: Iterable[Game]) -> tuple[dict, dict[Game, int]]:
    """Serialize ``roots`` and their descendants; returns (obj, game -> id).

    Ids are assigned by birthday, then by the sorted ids of the options, so
    every option precedes the games that use it and numbering depends only
    on the game trees.
    """
    by_day: dict[int, list[Game]] = {}
    for g in descendants(roots):
        by_day.setdefault(g.birthday, []).append(g)
    ids: dict[Game, int] = {}
    allg: list[Game] = []
    for day in sorted(by_day):
        for g in sorted(by_day[day], key=lambda h: sorted(ids[o] for o in h.options)):
            ids[g] = len(allg)
            allg.append(g)
    obj = {"games": [{"id": ids[g], "options": sorted(ids[o] for o in g.options)} for g in allg]}
    return obj, ids


def games_from_json_obj(obj: Mapping) -> dict[int, Game]:
    try:
        entries = list(obj["games"])
    except (KeyError, TypeError):
        raise ValueError("game JSON needs a 'games' list") from None
    out: dict[int, Game] = {}
    for ent in entries:
        try:
            gid = int(ent["id"])
            opts = [int(o) for o in ent["options"]]
        except (KeyError, TypeError, ValueError):
            raise ValueError(f"malformed game entry {ent!r}") from None
        if gid in out:
            raise ValueError(f"duplicate game id {gid}")
        for o in opts:
            if o not in out:
                raise ValueError(f"game {gid} lists option {o} before it is defined")
        out[gid] = Game.make(out[o] for o in opts)
    return out


def parse_position(text: str, games: Mapping[int, Game]) -> Position:
    """Parse sums like ``2*g3+g7``; ``0`` is the empty sum."""
    comps: list[Game] = []
    for term in text.replace(" ", "").split("+"):
        if not term:
            raise ValueError(f"empty term in position {text!r}")
        if term == "0":
            continue
        count, star, name = term.rpartition("*")
        try:
            k = int(count) if star else 1
        except ValueError:
            raise ValueError(f"bad multiplicity in {term!r}") from None
        if not name.startswith("g") or not name[1:].isdigit():
            raise ValueError(f"expected a game name like g3, got {name!r}")
        gid = int(name[1:])
        if gid not in games:
            raise ValueError(f"unknown game g{gid}")
        if k < 0:
            raise ValueError(f"negative multiplicity in {term!r}")
        comps.extend([games[gid]] * k)
    return Position.of(*comps)
