"""Property tests over random relabelings, random sub-monoids and random games."""

from functools import reduce as fold

from hypothesis import given, settings
from hypothesis import strategies as st

from misere.canonical import canonical_key, isomorphic
from misere.catalog import make_R, make_Tn
from misere.classifier import is_quotient
from misere.games import OctalCode, Position, game_sum, grundy, grundy_sequence, nim, octal_heap_game, outcome_misere
from misere.monoid import BipartiteMonoid, check_axioms, is_reduced, kernel, reduce, relabel, submonoid
from misere.transition import TransitionPair, pair_product

BASES = [make_Tn(2).bm, make_Tn(3).bm, make_R(2).bm, make_R(3).bm]


@st.composite
def relabeled(draw):
    b = draw(st.sampled_from(BASES))
    perm = draw(st.permutations(range(b.size)))
    return b, relabel(b, perm)


@st.composite
def random_bm(draw):
    """A sub-monoid of a catalog monoid with an arbitrary P (often unreduced)."""
    b = draw(st.sampled_from(BASES))
    seed = draw(st.sets(st.integers(0, b.size - 1), max_size=3))
    sub, _ = submonoid(b, seed)
    pset = draw(st.sets(st.integers(0, sub.size - 1)))
    return BipartiteMonoid.from_table(sub.table, pset, sub.identity, sub.generators)


@settings(max_examples=60, deadline=None)
@given(relabeled())
def test_relabeling_preserves_key_and_iso(pair):
    b, c = pair
    assert canonical_key(b) == canonical_key(c)
    m = isomorphic(b, c)
    assert m is not None
    assert all(m[b.table[x][y]] == c.table[m[x]][m[y]] for x in range(b.size) for y in range(b.size))


@settings(max_examples=30, deadline=None)
@given(relabeled())
def test_quotient_status_is_relabeling_invariant(pair):
    b, c = pair
    assert is_quotient(c).ok == is_quotient(b).ok == True


@settings(max_examples=150, deadline=None)
@given(random_bm())
def test_reduce_properties(b):
    assert check_axioms(b) == []
    red, proj = reduce(b)
    assert is_reduced(red) and red.size <= b.size
    assert reduce(red)[0].size == red.size
    for x in range(b.size):
        assert (x in b.pset) == (proj[x] in red.pset)
        for y in range(b.size):
            assert proj[b.table[x][y]] == red.table[proj[x]][proj[y]]


@settings(max_examples=150, deadline=None)
@given(random_bm())
def test_kernel_is_ideal_with_identity(b):
    info = kernel(b)
    k = info.kernel
    assert all(b.table[x][y] in k for x in k for y in range(b.size))
    z = info.kernel_identity
    assert b.table[z][z] == z and all(b.table[z][x] == x for x in k)
    # K is the intersection of the principal ideals
    ideals = [set(b.table[x]) for x in range(b.size)]
    assert set(k) == fold(set.__and__, ideals)


@settings(max_examples=100, deadline=None)
@given(random_bm(), random_bm())
def test_key_equality_iff_isomorphic(b, c):
    assert (canonical_key(b) == canonical_key(c)) == (isomorphic(b, c) is not None)


@st.composite
def pairs_over(draw, b):
    x = draw(st.integers(0, b.size - 1))
    e = draw(st.sets(st.integers(0, b.size - 1), max_size=4))
    return TransitionPair.of(x, e)


T3 = make_Tn(3).bm


@settings(max_examples=200, deadline=None)
@given(pairs_over(T3), pairs_over(T3), pairs_over(T3))
def test_pair_product_is_commutative_and_associative(p, q, r):
    assert pair_product(T3, p, q) == pair_product(T3, q, p)
    assert pair_product(T3, pair_product(T3, p, q), r) == pair_product(T3, p, pair_product(T3, q, r))
    assert pair_product(T3, TransitionPair.of(0), p) == p


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 6), max_size=4))
def test_misere_nim_matches_closed_form(heaps):
    # misere nim: with all heaps <= 1 the previous player wins iff an odd
    # number of heaps remain; otherwise iff the nim-sum is zero
    pos = Position.of(*(nim(h) for h in heaps))
    if all(h <= 1 for h in heaps):
        want = sum(heaps) % 2 == 1
    else:
        want = fold(int.__xor__, heaps, 0) == 0
    assert (outcome_misere(pos) == "P") == want


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 7), max_size=3))
def test_grundy_of_nim_sum(heaps):
    g = game_sum(*(nim(h) for h in heaps))
    assert grundy(g) == fold(int.__xor__, heaps, 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 7), st.lists(st.integers(0, 7), min_size=1, max_size=3))
def test_octal_grundy_two_paths(d0, digits):
    text = f"{d0 & 4}." + "".join(map(str, digits))
    try:
        code = OctalCode.parse(text)
    except ValueError:
        return
    seq = grundy_sequence(code, 9)
    assert seq == [grundy(octal_heap_game(code, n)) for n in range(10)]
