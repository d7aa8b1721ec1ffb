import pytest

from misere.catalog import make_R, make_Tn
from misere.classifier import ConstructionScheme
from misere.games import Game, ZERO, STAR, nim, outcome_misere, check_pretension_parity
from misere.monoid import BipartiteMonoid, trivial
from misere.transition import (
    TransitionAlgebra,
    TransitionPair,
    algebra_from_json_obj,
    algebra_to_json_obj,
    generate_algebra,
    minimex_algebra,
    minimex_generators,
    pair_product,
    realize_games,
    realized_phi,
    validate,
)

P = TransitionPair.of
T2 = make_Tn(2).bm
A, B = 1, 4  # a and b = z2 in the T_n layout
Z0, Z1, Z3 = 2, 3, 5


def t2_algebra():
    return minimex_algebra((T2, (A, B)))


def test_pair_product():
    assert pair_product(T2, P(0), P(A, [0])) == P(A, [0])
    assert pair_product(T2, P(A, [0]), P(A, [0])) == P(0, [A])
    # (a,{1})(b,{1,a}) = (ab, a{1,a} | b{1}) = (ab, {a,1,b})
    assert pair_product(T2, P(A, [0]), P(B, [0, A])) == P(T2.table[A][B], [A, 0, B])


def test_generate_algebra():
    assert generate_algebra(T2, []).pairs == frozenset({P(0)})
    g1 = generate_algebra(T2, [P(A, [0]), P(B, [0, A])])
    g2 = generate_algebra(T2, [P(B, [0, A]), P(A, [0])])
    assert g1.pairs == g2.pairs
    assert any(p.value == T2.table[B][B] for p in g1.pairs)


def test_minimex_generators():
    assert minimex_generators(T2, (A, B)) == [P(A, [0]), P(B, [0, A])]
    r8 = make_R(2).bm
    gens = minimex_generators(r8, (A, B, 6))
    assert gens[2] == P(6, [A, B, Z1, Z3])  # (t, {a, b, ab, az})
    assert minimex_algebra(ConstructionScheme.from_sequence(trivial(), ())).pairs == frozenset({P(0)})


def test_t2_minimex_is_valid():
    rep = validate(t2_algebra())
    assert rep.valid and rep.rank[0] == 0


def test_catalog_minimex_algebras_are_valid():
    for g in [make_Tn(n) for n in (2, 3, 4, 5)] + [make_R(n) for n in (2, 3, 4)]:
        b = g.bm
        assert validate(minimex_algebra((b, b.generators))).valid, b.size


def test_missing_identity_pair_is_not_well_founded():
    alg = t2_algebra()
    broken = TransitionAlgebra(T2, alg.pairs - {P(0)})
    rep = validate(broken)
    assert not rep.wellfounded_ok and not rep.valid


def test_parity_failure():
    t1 = make_Tn(1).bm
    rep = validate(TransitionAlgebra(t1, frozenset({P(0), P(1, [1])})))
    assert not rep.parity_ok


def test_closure_failure_reported():
    alg = t2_algebra()
    rep = validate(TransitionAlgebra(T2, alg.pairs - {P(0, [A])}))
    assert not rep.closure_ok
    assert any(c[0] == "closure" for c in rep.counterexamples)


def test_rank_fixed_point_property():
    alg = t2_algebra()
    rep = validate(alg)
    for x in range(T2.size):
        if rep.rank[x] == 0:
            continue
        assert any(p.value == x and all(rep.rank[y] < rep.rank[x] for y in p.options) for p in alg.pairs)


def test_realize_t2():
    alg = t2_algebra()
    games, witness = realize_games(alg)
    assert games[P(0)] is ZERO
    assert games[P(A, [0])] is STAR
    assert games[P(B, [0, A])] is nim(2)
    for p, g in games.items():
        assert (outcome_misere(g) == "P") == (p.value in T2.pset)


def test_realized_games_pass_parity_on_sums():
    for b in (T2, make_R(2).bm, make_Tn(3).bm):
        alg = minimex_algebra((b, b.generators))
        games, witness = realize_games(alg)
        phi = realized_phi(alg, games, witness)
        rep = check_pretension_parity(list(witness.values()), phi, b, 4)
        assert rep.ok and rep.checked > 0


def test_realize_rejects_invalid():
    alg = t2_algebra()
    with pytest.raises(ValueError):
        realize_games(TransitionAlgebra(T2, alg.pairs - {P(0)}))


def test_json_round_trip():
    alg = t2_algebra()
    back = algebra_from_json_obj(algebra_to_json_obj(alg))
    assert back.pairs == alg.pairs and back.generator_pairs == alg.generator_pairs
    obj = algebra_to_json_obj(alg)
    obj["pairs"] = []
    assert algebra_from_json_obj(obj).pairs == alg.pairs
    obj["generators"] = [{"x": 99, "E": []}]
    with pytest.raises(ValueError):
        algebra_from_json_obj(obj)
