"""Commutative monoid presentations.

Text format, one monoid per block (blocks separated by blank lines)::

    gens: a,b,c
    rels: a2=1, b4=b2, b2c=b3, c2=1
    P: a, b2, ac

Words are products of generator names, each optionally followed by an
exponent; ``1`` is the empty word.  The monoid is built by completing the
relations to a confluent rewriting system on exponent vectors (graded
lexicographic order; completion always terminates for commutative
presentations) and then listing normal forms breadth first.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .monoid import BipartiteMonoid

Word = tuple[int, ...]


class PresentationError(ValueError):
    pass


class SizeCapExceeded(PresentationError):
    pass


@dataclass(frozen=True)
class Presentation:
    generator_names: tuple[str, ...]
    relations: tuple[tuple[Word, Word], ...]
    pset_words: tuple[Word, ...]

    def word_text(self, w: Word) -> str:
        return format_word(w, self.generator_names)


def format_word(w: Word, names) -> str:
    parts = []
    for name, e in zip(names, w):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}{e}")
    return "".join(parts) or "1"


def parse_word(text: str, names) -> Word:
    text = text.strip()
    if not text:
        raise PresentationError("empty word")
    exps = [0] * len(names)
    if text == "1":
        return tuple(exps)
    index = {n: i for i, n in enumerate(names)}
    # longest names first so "ab" is not split when both "a" and "ab" exist
    alternation = "|".join(re.escape(n) for n in sorted(names, key=len, reverse=True))
    token = re.compile(rf"({alternation})(\d*)") if names else None
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = token.match(text, pos) if token else None
        if m is None:
            raise PresentationError(f"unknown symbol at {text[pos:]!r}")
        exps[index[m.group(1)]] += int(m.group(2)) if m.group(2) else 1
        pos = m.end()
    return tuple(exps)


def parse_presentation(block: str) -> Presentation:
    fields: dict[str, str] = {}
    for line in block.strip().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise PresentationError(f"expected 'key: value', got {line!r}")
        key = key.strip().lower()
        if key not in ("gens", "rels", "p"):
            raise PresentationError(f"unknown field {key!r}")
        fields[key] = value.strip()
    if "gens" not in fields:
        raise PresentationError("missing 'gens:' line")
    names = tuple(n.strip() for n in fields["gens"].split(",") if n.strip())
    for n in names:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_]*", n):
            raise PresentationError(f"bad generator name {n!r}")
    if len(set(names)) != len(names):
        raise PresentationError("repeated generator name")
    rels = []
    for item in _split(fields.get("rels", "")):
        lhs, sep, rhs = item.partition("=")
        if not sep:
            raise PresentationError(f"relation without '=': {item!r}")
        rels.append((parse_word(lhs, names), parse_word(rhs, names)))
    pwords = tuple(parse_word(w, names) for w in _split(fields.get("p", "")))
    return Presentation(names, tuple(rels), pwords)


def parse_presentations(text: str) -> list[Presentation]:
    blocks = re.split(r"\n\s*\n", text.strip())
    return [parse_presentation(b) for b in blocks if b.strip()]


def format_presentation(p: Presentation) -> str:
    names = p.generator_names
    rels = ", ".join(f"{format_word(l, names)}={format_word(r, names)}" for l, r in p.relations)
    pw = ", ".join(format_word(w, names) for w in p.pset_words)
    return f"gens: {','.join(names)}\nrels: {rels}\nP: {pw}\n"


def _split(s: str) -> list[str]:
    return [t.strip() for t in s.split(",") if t.strip()]


# ---------------------------------------------------------------------------
# completion


def _key(w: Word):
    return (sum(w), w)


def _divides(a: Word, b: Word) -> bool:
    return all(x <= y for x, y in zip(a, b))


class _Rewriter:
    def __init__(self, k: int):
        self.k = k
        self.rules: list[tuple[Word, Word]] = []

    def normal(self, w: Word) -> Word:
        changed = True
        while changed:
            changed = False
            for l, r in self.rules:
                if _divides(l, w):
                    w = tuple(x - a + b for x, a, b in zip(w, l, r))
                    changed = True
                    break
        return w

    def add(self, u: Word, v: Word) -> bool:
        u, v = self.normal(u), self.normal(v)
        if u == v:
            return False
        if _key(u) < _key(v):
            u, v = v, u
        self.rules.append((u, v))
        return True

    def complete(self, max_rules: int = 10000) -> None:
        while True:
            grew = False
            rules = list(self.rules)
            for a in range(len(rules)):
                for b in range(a + 1, len(rules)):
                    (l1, r1), (l2, r2) = rules[a], rules[b]
                    m = tuple(max(x, y) for x, y in zip(l1, l2))
                    s1 = tuple(x - a_ + b_ for x, a_, b_ in zip(m, l1, r1))
                    s2 = tuple(x - a_ + b_ for x, a_, b_ in zip(m, l2, r2))
                    if self.add(s1, s2):
                        grew = True
                        if len(self.rules) > max_rules:
                            raise SizeCapExceeded("rewriting system grew too large")
            self._interreduce()
            if not grew:
                return

    def _interreduce(self) -> None:
        rules = self.rules
        changed = True
        while changed:
            changed = False
            for idx, (l, r) in enumerate(rules):
                others = rules[:idx] + rules[idx + 1:]
                if any(_divides(l2, l) for l2, _ in others):
                    self.rules = others
                    self.add(l, r)
                    rules = self.rules
                    changed = True
                    break
            if not changed:
                new = [(l, self.normal(r)) for l, r in rules]
                if new != rules:
                    self.rules = rules = new


def build_from_presentation(p: Presentation, size_cap: int = 1000) -> BipartiteMonoid:
    """The finite bipartite monoid presented by ``p``.

    Raises SizeCapExceeded when more than ``size_cap`` elements appear.
    """
    if size_cap < 1:
        raise ValueError("size_cap must be positive")
    k = len(p.generator_names)
    rw = _Rewriter(k)
    for u, v in p.relations:
        rw.add(u, v)
    rw.complete()
    one = tuple([0] * k)
    units = [tuple(1 if j == i else 0 for j in range(k)) for i in range(k)]
    elems = [one]
    index = {one: 0}
    i = 0
    while i < len(elems):
        w = elems[i]
        i += 1
        for u in units:
            nw = rw.normal(tuple(x + y for x, y in zip(w, u)))
            if nw not in index:
                if len(elems) >= size_cap:
                    raise SizeCapExceeded(f"presentation has more than {size_cap} elements")
                index[nw] = len(elems)
                elems.append(nw)
    n = len(elems)
    table = [[index[rw.normal(tuple(x + y for x, y in zip(elems[a], elems[b])))] for b in range(n)] for a in range(n)]
    pset = {index[rw.normal(w)] for w in p.pset_words}
    gens = tuple(dict.fromkeys(index[rw.normal(u)] for u in units if index[rw.normal(u)] != 0))
    names = tuple(format_word(w, p.generator_names) for w in elems)
    return BipartiteMonoid.from_table(table, pset, 0, gens, names)
