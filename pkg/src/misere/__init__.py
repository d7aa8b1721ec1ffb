"""Misere quotients of impartial games: bipartite monoids, transition algebras,
the quotient census, game realization and a brute-force oracle."""

from .monoid import BipartiteMonoid, Monoid, is_reduced, kernel, reduce
from .canonical import canonical_key, isomorphic
from .catalog import classify_p2, make_R, make_Tn, tame_extend, tame_power
from .transition import TransitionAlgebra, TransitionPair, generate_algebra, minimex_algebra, realize_games, validate
from .classifier import ConstructionScheme, enumerate_quotients, is_quotient

__all__ = [
    "BipartiteMonoid",
    "Monoid",
    "is_reduced",
    "kernel",
    "reduce",
    "canonical_key",
    "isomorphic",
    "classify_p2",
    "make_R",
    "make_Tn",
    "tame_extend",
    "tame_power",
    "TransitionAlgebra",
    "TransitionPair",
    "generate_algebra",
    "minimex_algebra",
    "realize_games",
    "validate",
    "ConstructionScheme",
    "enumerate_quotients",
    "is_quotient",
]
