"""One-way machine operations against brute enumeration."""

from __future__ import annotations

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

import oracles
from definability.automata import (
    Dfa,
    Nfa,
    complement,
    determinize,
    dfa_language_equal,
    dfa_run,
    enumerate_language,
    minimize,
    nfa_accepts,
    product_intersect,
    unary_eventually_constant,
    words_over,
)
from conftest import dfa_from_rows


@st.composite
def small_dfas(draw, max_states: int = 4, letters: tuple[str, ...] = ("a", "b")):
    n = draw(st.integers(1, max_states))
    delta = {
        sym: tuple(draw(st.integers(0, n - 1)) for _ in range(n)) for sym in letters
    }
    finals = frozenset(i for i in range(n) if draw(st.booleans()))
    return Dfa(letters, n, 0, finals, delta)


# ---------------------------------------------------------------------------
# minimization


def test_minimize_even_counter_has_two_classes(even_a_dfa):
    data = minimize(even_a_dfa)
    assert len(data.classes) == 2
    assert data.minimal.n_states == 2


def test_minimize_collapses_redundant_states(even_a_dfa):
    fat = dfa_from_rows(("a",), {"a": (1, 2, 3, 0)}, 0, (0, 2))
    data = minimize(fat)
    assert data.minimal.n_states == 2
    assert oracles.same_language_upto(data.minimal, even_a_dfa, 8)


@settings(deadline=None, max_examples=60)
@given(small_dfas())
def test_minimize_preserves_language(dfa):
    assert oracles.same_language_upto(minimize(dfa).minimal, dfa, 5)


# ---------------------------------------------------------------------------
# determinization


def _astar_b_nfa() -> Nfa:
    return Nfa(
        alphabet=("a", "b"),
        n_states=2,
        initials=frozenset([0]),
        finals=frozenset([1]),
        moves={"a": (0b01, 0b00), "b": (0b10, 0b00)},
    )


def test_determinize_matches_nfa_on_examples():
    nfa = _astar_b_nfa()
    assert nfa_accepts(nfa, ("a", "a", "b"))
    assert not nfa_accepts(nfa, ("b", "a"))
    det = determinize(nfa)
    assert dfa_run(det, ("a", "a", "b"))[1]
    assert not dfa_run(det, ("b", "a"))[1]


def test_determinize_keeps_deterministic_input_thin(astar_bstar_dfa):
    as_nfa = Nfa(
        alphabet=astar_bstar_dfa.alphabet,
        n_states=astar_bstar_dfa.n_states,
        initials=frozenset([astar_bstar_dfa.initial]),
        finals=astar_bstar_dfa.finals,
        moves={
            sym: tuple(1 << t for t in row)
            for sym, row in astar_bstar_dfa.delta.items()
        },
    )
    det = determinize(as_nfa)
    assert det.n_states <= astar_bstar_dfa.n_states
    assert oracles.same_language_upto(det, astar_bstar_dfa, 6)


@settings(deadline=None, max_examples=40)
@given(small_dfas(max_states=3))
def test_determinize_agrees_with_nfa_semantics(dfa):
    nfa = Nfa(
        alphabet=dfa.alphabet,
        n_states=dfa.n_states,
        initials=frozenset([dfa.initial]),
        finals=dfa.finals,
        moves={sym: tuple(1 << t for t in row) for sym, row in dfa.delta.items()},
    )
    det = determinize(nfa)
    assert oracles.same_language_upto(det, dfa, 5)


# ---------------------------------------------------------------------------
# boolean operations


def test_intersection_of_even_counter_with_everything(even_a_dfa):
    everything = dfa_from_rows(("a",), {"a": (0,)}, 0, (0,))
    meet = product_intersect(even_a_dfa, everything)
    assert oracles.language_upto(meet, 6) == {
        w for w in oracles.iter_words(("a",), 6) if len(w) % 2 == 0
    }


def test_complement_twice_is_identity(astar_bstar_dfa, even_a_dfa):
    for dfa in (astar_bstar_dfa, even_a_dfa):
        assert oracles.same_language_upto(complement(complement(dfa)), dfa, 6)


def test_complement_of_a_star_accepts_b():
    a_star = dfa_from_rows(("a", "b"), {"a": (0, 1), "b": (1, 1)}, 0, (0,))
    comp = complement(a_star)
    assert dfa_run(comp, ("b",))[1]
    assert not dfa_run(comp, ("a", "a"))[1]


def test_complement_of_even_counter_is_odd_lengths(even_a_dfa):
    comp = complement(even_a_dfa)
    assert oracles.language_upto(comp, 7) == {
        w for w in oracles.iter_words(("a",), 7) if len(w) % 2 == 1
    }


# ---------------------------------------------------------------------------
# enumeration


def test_enumerate_even_counter(even_a_dfa):
    assert enumerate_language(even_a_dfa, 4) == [
        (),
        ("a", "a"),
        ("a", "a", "a", "a"),
    ]


def test_enumerate_empty_language():
    empty = dfa_from_rows(("a",), {"a": (0,)}, 0, ())
    assert enumerate_language(empty, 5) == []


def test_enumerate_seven_cycle(bp_lt):
    words = enumerate_language(bp_lt, 8)
    assert words == [(), ("a",) * 7]


# ---------------------------------------------------------------------------
# one-letter tail profiles


def test_profile_alternating_is_neither(even_a_dfa):
    profile = unary_eventually_constant(even_a_dfa)
    assert profile.kind == "neither"


def test_profile_cofinite():
    nfa = Nfa(
        alphabet=("a",),
        n_states=3,
        initials=frozenset([0]),
        finals=frozenset([2]),
        moves={"a": (0b010, 0b100, 0b100)},
    )
    profile = unary_eventually_constant(nfa)
    assert profile.kind == "cofinite"
    assert set(profile.lengths) == {0, 1}


def test_profile_finite():
    nfa = Nfa(
        alphabet=("a",),
        n_states=4,
        initials=frozenset([0]),
        finals=frozenset([3]),
        moves={"a": (0b0010, 0b0100, 0b1000, 0b0000)},
    )
    profile = unary_eventually_constant(nfa)
    assert profile.kind == "finite"
    assert set(profile.lengths) == {3}


# ---------------------------------------------------------------------------
# word utilities


def test_words_over_matches_reference():
    assert list(words_over(("a", "b"), 3)) == list(oracles.iter_words(("a", "b"), 3))


@settings(deadline=None, max_examples=40)
@given(small_dfas(max_states=3), small_dfas(max_states=3))
def test_language_equality_matches_enumeration(first, second):
    # a shortest distinguishing word is shorter than the product state count
    assert dfa_language_equal(first, second) == oracles.same_language_upto(
        first, second, first.n_states * second.n_states
    )


def test_run_reports_visited_states(even_a_dfa):
    visited, accepted = dfa_run(even_a_dfa, ("a", "a", "a"))
    assert visited == [0, 1, 0, 1]
    assert not accepted
