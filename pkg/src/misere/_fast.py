"""Bitmask kernels shared by the transition checker and the classifier.

Everything here works on raw tables (lists of lists) and int bitmasks so the
search inner loop stays free of dataclass overhead.
"""

from __future__ import annotations


def signatures(table, pmask: int) -> list[int]:
    """sig[x] = bitmask of z with x*z in P."""
    out = []
    for row in table:
        s = 0
        bit = 1
        for v in row:
            if pmask >> v & 1:
                s |= bit
            bit <<= 1
        out.append(s)
    return out


def meximal(sigs: list[int], x: int, within: int) -> int:
    """Meximal set of x intersected with the element mask ``within``."""
    sx = sigs[x]
    m = 0
    y = 0
    w = within
    while w:
        if w & 1 and not sigs[y] & sx:
            m |= 1 << y
        w >>= 1
        y += 1
    return m


def translate(row, mask: int) -> int:
    """Image of the element set ``mask`` under multiplication by a fixed element."""
    out = 0
    y = 0
    while mask:
        if mask & 1:
            out |= 1 << row[y]
        mask >>= 1
        y += 1
    return out


def minimex_generators(table, pmask: int, gens, level) -> list[tuple[int, int]]:
    """Generator pairs (x_i, M_{x_i} & S_{i-1}) for a construction sequence.

    ``level[y]`` is the least i with y in S_i.
    """
    sigs = signatures(table, pmask)
    out = []
    slice_mask = 0
    for y, lv in enumerate(level):
        if lv == 0:
            slice_mask |= 1 << y
    for i, x in enumerate(gens, start=1):
        out.append((x, meximal(sigs, x, slice_mask)))
        for y, lv in enumerate(level):
            if lv == i:
                slice_mask |= 1 << y
    return out


def pair_parity_ok(x: int, emask: int, pmask: int) -> bool:
    """x in P  <=>  E nonempty and E disjoint from P."""
    return bool(pmask >> x & 1) == (emask != 0 and not emask & pmask)


def closure_parity(table, identity: int, pmask: int, gen_pairs, cap: int | None = None):
    """Close ``gen_pairs`` under the pair product, checking parity as we go.

    Returns ``(ok, pairs, bad)``: ``pairs`` is the set of (x, E-mask) reached
    (complete only when ok), ``bad`` the first pair violating parity.
    Raises OverflowError when more than ``cap`` pairs are generated.
    """
    for x, e in gen_pairs:
        if not pair_parity_ok(x, e, pmask):
            return False, None, (x, e)
    if not pair_parity_ok(identity, 0, pmask):
        return False, None, (identity, 0)
    seen = {(identity, 0)}
    stack = [(identity, 0)]
    cache: dict = {}
    while stack:
        x, e = stack.pop()
        rowx = table[x]
        for g, gm in gen_pairs:
            y = rowx[g]
            key = (x, gm)
            a = cache.get(key)
            if a is None:
                a = cache[key] = translate(rowx, gm)
            key = (g, e)
            b = cache.get(key)
            if b is None:
                b = cache[key] = translate(table[g], e)
            f = a | b
            p = (y, f)
            if p in seen:
                continue
            if bool(pmask >> y & 1) != (f != 0 and not f & pmask):
                return False, None, p
            seen.add(p)
            if cap is not None and len(seen) > cap:
                raise OverflowError(f"transition algebra exceeded {cap} pairs")
            stack.append(p)
    return True, seen, None
