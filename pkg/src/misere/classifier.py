"""Enumeration of misere quotients by construction schemes.

A construction scheme is a bipartite monoid with a generator sequence
x_1..x_k; the search grows schemes one generator at a time (simple
extensions) and keeps a scheme only if the transition algebra generated by
its minimex pairs (x_i, M_{x_i} & S_{i-1}) is valid.  Reduced schemes are
recorded, deduplicated by canonical key.

Pruning rules, each of which keeps at least one construction sequence of
every quotient alive (the sequence read off a hereditary ordering of the
games of a realizing set A):

* every proper prefix of that sequence has a valid minimex algebra of its own;
* its generator option sets are non-empty (the game realizing x_i is not 0);
* x_1 is the value of a game all of whose options have value 1, and such a
  game H satisfies H + H == 0 in every closed set, so S_1 = {1, x_1};
* in a reduced quotient a game's value is determined by its set of option
  values, so the real transition algebra maps each E to a single x.  A
  prefix generator whose own minimex set is a singleton has that exact set
  in the real algebra, so pairs generated by such "pinned" generators must
  not give one E two different values.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from . import _fast
from ._extend import extension_tables
from .canonical import canonical_key, canonical_key_and_labeling
from .monoid import BipartiteMonoid, closure, is_reduced, reduce, relabel, restrict, to_json_obj
from .transition import generate_algebra, minimex_generators, validate

JOBS_ENV = "MISERE_JOBS"


@dataclass(frozen=True)
class ConstructionScheme:
    bm: BipartiteMonoid
    sequence: tuple[int, ...]
    slices: tuple[frozenset[int], ...]

    @staticmethod
    def from_sequence(bm: BipartiteMonoid, sequence: Sequence[int]) -> "ConstructionScheme":
        slices = [frozenset({bm.identity})]
        gens: list[int] = []
        for x in sequence:
            if x in slices[-1]:
                raise ValueError(f"x = {x} already lies in the previous slice")
            gens.append(x)
            slices.append(frozenset(closure(bm, gens)))
        if len(slices[-1]) != bm.size:
            raise ValueError("sequence does not generate the monoid")
        return ConstructionScheme(bm, tuple(sequence), tuple(slices))


@dataclass
class QuotientCensus:
    max_order: int
    classes: dict[int, list[tuple[bytes, BipartiteMonoid]]] = field(default_factory=dict)
    complete: bool = True
    stats: dict = field(default_factory=dict)

    @property
    def counts(self) -> dict[int, int]:
        return {n: len(self.classes.get(n, [])) for n in range(2, self.max_order + 1)}

    def to_json_obj(self) -> dict:
        return {
            "max_order": self.max_order,
            "complete": self.complete,
            "counts": {str(n): c for n, c in self.counts.items()},
            "classes": {
                str(n): [{"key": k.hex(), "monoid": to_json_obj(b)} for k, b in self.classes[n]]
                for n in sorted(self.classes)
                if self.classes[n]
            },
        }


class CapReached(Exception):
    pass


# ---------------------------------------------------------------------------
# the search core works on raw tables: identity 0, generators, slice levels


def _functional_on_pinned(table, gen_pairs) -> bool:
    pinned = [(x, e) for x, e in gen_pairs if e & (e - 1) == 0]
    if len(pinned) < 2:
        return True
    seen = {(0, 0)}
    value_of = {0: 0}
    stack = [(0, 0)]
    while stack:
        x, e = stack.pop()
        row = table[x]
        for g, gm in pinned:
            p = (row[g], _fast.translate(row, gm) | _fast.translate(table[g], e))
            if p in seen:
                continue
            if value_of.setdefault(p[1], p[0]) != p[0]:
                return False
            seen.add(p)
            stack.append(p)
    return True


def _scheme_ok(table, pmask, gens, level) -> bool:
    gp = _fast.minimex_generators(table, pmask, gens, level)
    if any(e == 0 for _, e in gp):
        return False
    ok, _, _ = _fast.closure_parity(table, 0, pmask, gp)
    if not ok:
        return False
    return _functional_on_pinned(table, gp)


class _Search:
    def __init__(self, max_order: int, max_schemes: int | None = None, deadline: float | None = None):
        self.N = max_order
        self.max_schemes = max_schemes
        self.deadline = deadline
        self.found: dict[tuple, tuple] = {}  # (table, pmask) -> gens of first witness
        self.reductions: set[tuple] = set()  # reduced (table, pmask) of kept unreduced schemes
        self.kept = 0
        self.extensions = 0

    def run(self, table, gens, level, pmask):
        m = len(table)
        k = len(gens)
        for tab in extension_tables(table, gens, self.N):
            s = len(tab)
            if m == 1 and s != 2:
                continue
            self.extensions += 1
            newlv = level + [k + 1] * (s - m)
            ng = gens + (m,)
            for sub in range(1 << (s - m)):
                pm = pmask | (sub << m)
                if not _scheme_ok(tab, pm, ng, newlv):
                    continue
                self.kept += 1
                if self.max_schemes is not None and self.kept > self.max_schemes:
                    raise CapReached("scheme cap reached")
                if self.deadline is not None and self.kept % 256 == 0 and time.monotonic() > self.deadline:
                    raise CapReached("time limit reached")
                sigs = _fast.signatures(tab, pm)
                if len(set(sigs)) == s:
                    key = (tuple(map(tuple, tab)), pm)
                    self.found.setdefault(key, ng)
                elif s < self.N:
                    self.reductions.add(_reduced_raw(tab, pm, sigs))
                if s < self.N:
                    self.run(tab, ng, newlv, pm)

    def frontier(self, table, gens, level, pmask, min_size):
        """Like run, but stop at schemes of size >= min_size and return them."""
        out = []
        m = len(table)
        k = len(gens)
        for tab in extension_tables(table, gens, self.N):
            s = len(tab)
            if m == 1 and s != 2:
                continue
            self.extensions += 1
            newlv = level + [k + 1] * (s - m)
            ng = gens + (m,)
            for sub in range(1 << (s - m)):
                pm = pmask | (sub << m)
                if not _scheme_ok(tab, pm, ng, newlv):
                    continue
                self.kept += 1
                sigs = _fast.signatures(tab, pm)
                if len(set(sigs)) == s:
                    self.found.setdefault((tuple(map(tuple, tab)), pm), ng)
                elif s < self.N:
                    self.reductions.add(_reduced_raw(tab, pm, sigs))
                if s < self.N:
                    if s >= min_size:
                        out.append((tab, ng, newlv, pm))
                    else:
                        out.extend(self.frontier(tab, ng, newlv, pm, min_size))
        return out


def _reduced_raw(tab, pm, sigs):
    cls: dict[int, int] = {}
    reps = []
    proj = []
    for x, s in enumerate(sigs):
        c = cls.get(s)
        if c is None:
            c = cls[s] = len(reps)
            reps.append(x)
        proj.append(c)
    rt = tuple(tuple(proj[tab[r][c]] for c in reps) for r in reps)
    rp = 0
    for x in range(len(tab)):
        if pm >> x & 1:
            rp |= 1 << proj[x]
    return rt, rp


def _bm_from_raw(table, pmask, gens=()) -> BipartiteMonoid:
    pset = [i for i in range(len(table)) if pmask >> i & 1]
    return BipartiteMonoid.from_table(table, pset, 0, gens)


def _run_task(args):
    table, gens, level, pmask, N, max_schemes, deadline = args
    s = _Search(N, max_schemes, deadline)
    complete = True
    try:
        s.run(table, gens, level, pmask)
    except CapReached:
        complete = False
    return s.found, s.reductions, s.kept, s.extensions, complete


# ---------------------------------------------------------------------------
# public API


def simple_extensions(scheme: ConstructionScheme, max_order: int) -> list[ConstructionScheme]:
    """Every one-generator extension of size <= max_order with every admissible P+.

    The monoid extensions are produced once each up to isomorphism fixing Q
    pointwise and the new generator; P+ ranges over all subsets that agree
    with P on Q (the identity is in Q, so it stays outside P+).
    """
    b = scheme.bm
    if b.identity != 0:
        perm = list(range(b.size))
        perm[0], perm[b.identity] = b.identity, 0
        b = relabel(b, perm)
        seq = tuple(perm[x] for x in scheme.sequence)
    else:
        seq = scheme.sequence
    out = []
    pm = b.pmask()
    m = b.size
    for tab in extension_tables([list(r) for r in b.table], seq, max_order):
        s = len(tab)
        for sub in range(1 << (s - m)):
            bm = _bm_from_raw(tab, pm | (sub << m), seq + (m,))
            out.append(ConstructionScheme.from_sequence(bm, seq + (m,)))
    return out


def scheme_is_valid(scheme: ConstructionScheme) -> bool:
    """Whether the minimex algebra of ``scheme`` is a valid transition algebra."""
    alg = generate_algebra(scheme.bm, minimex_generators(scheme.bm, scheme.sequence))
    return validate(alg).valid


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def enumerate_quotients(
    n: int,
    jobs: int | None = None,
    max_schemes: int | None = None,
    time_limit: float | None = None,
    checkpoint: str | None = None,
    verify: bool = True,
) -> QuotientCensus:
    """All misere quotients of order <= n up to isomorphism.

    ``max_schemes`` and ``time_limit`` cap the search; a capped census has
    ``complete = False``.  ``checkpoint`` names a JSON file recording finished
    subtrees so an interrupted run can resume (parallel and sequential runs
    use the same task split).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    jobs = default_jobs() if jobs is None else max(1, jobs)
    started = time.monotonic()
    deadline = started + time_limit if time_limit is not None else None
    census = QuotientCensus(n)

    root = _Search(n)
    tasks = root.frontier([[0]], (), [0], 0, min_size=min(n, 8))
    found = dict(root.found)
    reductions = set(root.reductions)
    kept, exts = root.kept, root.extensions
    complete = True

    done: dict[int, dict] = {}
    if checkpoint and os.path.exists(checkpoint):
        done = _load_checkpoint(checkpoint, n)

    args = [(t[0], t[1], t[2], t[3], n, max_schemes, deadline) for t in tasks]
    todo = [i for i in range(len(args)) if i not in done]

    def absorb(i, res):
        nonlocal kept, exts, complete
        f, r, k_, e_, ok = res
        for key, g in f.items():
            found.setdefault(key, g)
        reductions.update(r)
        kept += k_
        exts += e_
        complete = complete and ok
        if ok and checkpoint:
            done[i] = {"found": f, "reductions": r}
            _save_checkpoint(checkpoint, n, done)

    for i in sorted(done):
        for key, g in done[i]["found"].items():
            found.setdefault(key, g)
        reductions.update(done[i]["reductions"])

    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            for i, res in zip(todo, ex.map(_run_task, [args[i] for i in todo])):
                absorb(i, res)
    else:
        for i in todo:
            absorb(i, _run_task(args[i]))
            if deadline is not None and time.monotonic() > deadline:
                complete = False

    # deduplicate up to isomorphism; canonical labeling makes the
    # representative independent of search order
    by_key: dict[bytes, tuple] = {}
    for (table, pm), gens in found.items():
        bm = _bm_from_raw(table, pm, gens)
        key, perm = canonical_key_and_labeling(bm)
        seq = tuple(perm[g] for g in gens)
        cur = by_key.get(key)
        if cur is None or seq < cur[1]:
            by_key[key] = (bm, seq, perm)
    classes: dict[int, list] = {}
    for key, (bm, seq, perm) in by_key.items():
        rep = relabel(bm, perm)
        rep = BipartiteMonoid.from_table(rep.table, rep.pset, rep.identity, seq)
        classes.setdefault(bm.size, []).append((key, rep))
    for order in classes:
        classes[order].sort(key=lambda kv: kv[0])
    census.classes = classes
    census.complete = complete

    unknown = 0
    if verify and complete:
        # every kept non-reduced scheme must reduce to a quotient in the census
        known = set(by_key) | {canonical_key(_bm_from_raw([[0]], 0))}
        seen: dict = {}
        for rt, rp in reductions:
            k = seen.get((rt, rp))
            if k is None:
                k = seen[(rt, rp)] = canonical_key(_bm_from_raw(rt, rp))
            if k not in known:
                unknown += 1
        if unknown:
            raise RuntimeError(f"{unknown} kept schemes reduce to no recorded quotient")
    census.stats = {
        "kept_schemes": kept,
        "extensions": exts,
        "tasks": len(args),
        "reduced_witnesses": len(found),
        "distinct_reductions": len(reductions),
        "seconds": round(time.monotonic() - started, 3),
    }
    return census


def _save_checkpoint(path: str, n: int, done: dict) -> None:
    obj = {
        "max_order": n,
        "done": {
            str(i): {
                "found": [[list(map(list, t)), pm, list(g)] for (t, pm), g in v["found"].items()],
                "reductions": [[list(map(list, t)), pm] for t, pm in v["reductions"]],
            }
            for i, v in done.items()
        },
    }
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(obj, fh)
    os.replace(tmp, path)


def _load_checkpoint(path: str, n: int) -> dict:
    with open(path) as fh:
        obj = json.load(fh)
    if obj.get("max_order") != n:
        raise ValueError(f"checkpoint {path} is for max order {obj.get('max_order')}, not {n}")
    done = {}
    for i, v in obj["done"].items():
        found = {(tuple(map(tuple, t)), pm): tuple(g) for t, pm, g in v["found"]}
        reds = {(tuple(map(tuple, t)), pm) for t, pm in v["reductions"]}
        done[int(i)] = {"found": found, "reductions": reds}
    return done


# ---------------------------------------------------------------------------
# recognizing a single quotient


@dataclass
class QuotientWitness:
    ok: bool
    sequence: tuple[int, ...] = ()
    algebra: object = None
    reason: str = ""


def is_quotient(b: BipartiteMonoid) -> QuotientWitness:
    """Search construction sequences of ``b`` for one with a valid minimex algebra."""
    if b.identity in b.pset:
        return QuotientWitness(False, reason="identity lies in P")
    if not is_reduced(b):
        return QuotientWitness(False, reason="not reduced")
    n = b.size
    if n == 1:
        alg = generate_algebra(b, [])
        return QuotientWitness(True, (), alg)
    failed: set = set()

    def prefix_ok(seq, elems) -> bool:
        order = [b.identity] + sorted(elems - {b.identity})
        sub, _ = restrict(b, order, seq)
        idx = {x: i for i, x in enumerate(order)}
        lseq = [idx[x] for x in seq]
        level = _levels(sub.table, lseq)
        return _scheme_ok([list(r) for r in sub.table], sub.pmask(), lseq, level)

    def search(seq: list[int], elems: set[int]):
        if len(elems) == n:
            alg = generate_algebra(b, minimex_generators(b, seq))
            rep = validate(alg)
            return (tuple(seq), alg) if rep.valid else None
        for x in range(n):
            if x in elems:
                continue
            new = closure(b, seq + [x])
            if not seq and len(new) != 2:
                continue
            key = tuple(seq + [x])
            if key in failed:
                continue
            if len(new) < n and not prefix_ok(seq + [x], new):
                continue
            res = search(seq + [x], new)
            if res is not None:
                return res
            failed.add(key)
        return None

    res = search([], {b.identity})
    if res is None:
        return QuotientWitness(False, reason="no construction sequence gives a valid minimex algebra")
    return QuotientWitness(True, res[0], res[1])


def _levels(table, seq) -> list[int]:
    n = len(table)
    level = [-1] * n
    level[0] = 0
    reached = {0}
    frontier = [0]
    gens: list[int] = []
    for i, x in enumerate(seq, start=1):
        gens.append(x)
        frontier = list(reached)
        while frontier:
            nxt = []
            for y in frontier:
                for g in gens:
                    v = table[y][g]
                    if v not in reached:
                        reached.add(v)
                        level[v] = i
                        nxt.append(v)
            frontier = nxt
    return level
