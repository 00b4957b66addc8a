"""Tests for words module."""

from collections import Counter
from itertools import product

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st
from pydantic import ValidationError

from pincushion_lab.errors import FormatError
from pincushion_lab.errors import WordError
from pincushion_lab.graph_core import SimplicialGraph
from pincushion_lab.graph_core import complete_graph
from pincushion_lab.graph_core import new_graph
from pincushion_lab.words import Permutation
from pincushion_lab.words import Word
from pincushion_lab.words import bfs_class
from pincushion_lab.words import equivalent
from pincushion_lab.words import format_word
from pincushion_lab.words import is_reduced
from pincushion_lab.words import matching_permutation
from pincushion_lab.words import new_word
from pincushion_lab.words import normal_form
from pincushion_lab.words import parse_word
from pincushion_lab.words import reduce
from pincushion_lab.words import reduced_length

VERTICES = ["1", "2", "3", "4"]
PAIRS = [(a, b) for i, a in enumerate(VERTICES) for b in VERTICES[i + 1 :]]


@st.composite
def graphs_and_words(draw: st.DrawFn, max_length: int = 9) -> Word:
    edges = draw(st.lists(st.sampled_from(PAIRS), unique=True))
    g = new_graph(VERTICES, edges)
    letters = draw(st.lists(st.sampled_from(VERTICES), max_size=max_length))
    return new_word(g, letters)


def _small_graphs() -> list[SimplicialGraph]:
    """Graphs with one to four vertices, up to isomorphism."""
    return [
        new_graph([str(v) for v in graph.nodes], [(str(a), str(b)) for a, b in graph.edges])
        for graph in nx.graph_atlas_g()
        if 1 <= graph.number_of_nodes() <= 4
    ]


def _all_words(g: SimplicialGraph, max_length: int) -> list[Word]:
    return [
        Word(graph=g, letters=letters)
        for length in range(max_length + 1)
        for letters in product(g.vertices, repeat=length)
    ]


class TestWordModel:
    """Tests for Word construction."""

    def test_letters_must_be_vertices(self, k2: SimplicialGraph):
        """A Word built directly still only takes vertices of its graph."""
        with pytest.raises(ValidationError, match="not vertices of the graph"):
            Word(graph=k2, letters=("3",))

    def test_new_word_raises_word_error(self, k2: SimplicialGraph):
        """The factory reports unknown letters as a domain error."""
        with pytest.raises(WordError):
            new_word(k2, [1, 3])


class TestIsReduced:
    """Tests for is_reduced."""

    def test_separated_by_non_neighbour(self, edgeless2: SimplicialGraph):
        """A non-adjacent letter between equal letters keeps the word reduced."""
        assert is_reduced(new_word(edgeless2, [1, 2, 1]))

    def test_separated_only_by_neighbour(self, k2: SimplicialGraph):
        """An adjacent letter can be shuffled away, exposing a merge."""
        assert not is_reduced(new_word(k2, [1, 2, 1]))

    def test_empty_word(self, k2: SimplicialGraph):
        """The empty word is reduced."""
        assert is_reduced(new_word(k2, []))

    def test_repeated_letter(self, k2: SimplicialGraph):
        """Two equal neighbouring letters merge."""
        assert not is_reduced(new_word(k2, [2, 2]))


class TestReduce:
    """Tests for reduce and reduced_length."""

    def test_commuting_pair(self, k2: SimplicialGraph):
        """1 2 1 over an edge shortens to two letters."""
        reduced = reduce(new_word(k2, [1, 2, 1]))
        assert len(reduced) == 2
        assert equivalent(reduced, new_word(k2, [1, 2, 1]))

    def test_merge(self, k2: SimplicialGraph):
        """1 1 becomes 1."""
        assert reduce(new_word(k2, [1, 1])).letters == ("1",)

    def test_reduced_input_unchanged(self, edgeless2: SimplicialGraph):
        """Reduced words come back as they are."""
        w = new_word(edgeless2, [1, 2, 1])
        assert reduce(w) == w

    def test_reduced_length(self, p3: SimplicialGraph):
        """Letters separated by a blocker both survive."""
        assert reduced_length(new_word(p3, [1, 3, 1, 2, 2])) == 4


class TestEquivalent:
    """Tests for equivalent."""

    def test_shuffle_along_edge(self, k2: SimplicialGraph):
        """Adjacent letters commute."""
        assert equivalent(new_word(k2, [1, 2]), new_word(k2, [2, 1]))

    def test_no_shuffle_without_edge(self, edgeless2: SimplicialGraph):
        """Non-adjacent letters do not commute."""
        assert not equivalent(new_word(edgeless2, [1, 2]), new_word(edgeless2, [2, 1]))

    def test_reflexive(self, p3: SimplicialGraph):
        """Every word is equivalent to itself."""
        w = new_word(p3, [3, 1, 2, 3])
        assert equivalent(w, w)

    def test_different_graphs(self, k2: SimplicialGraph, edgeless2: SimplicialGraph):
        """Words over different graphs cannot be compared."""
        with pytest.raises(WordError):
            equivalent(new_word(k2, [1]), new_word(edgeless2, [1]))


class TestNormalForm:
    """Tests for normal_form."""

    def test_sorted_over_edge(self, k2: SimplicialGraph):
        """2 1 over an edge becomes 1 2."""
        assert normal_form(new_word(k2, [2, 1])).letters == ("1", "2")

    def test_kept_without_edge(self, edgeless2: SimplicialGraph):
        """2 1 without an edge has nowhere to go."""
        assert normal_form(new_word(edgeless2, [2, 1])).letters == ("2", "1")

    @pytest.mark.parametrize("graph_name", ["k2", "edgeless2"])
    def test_merge_then_order(self, graph_name: str, request: pytest.FixtureRequest):
        """1 1 2 becomes 1 2 on any graph."""
        g = request.getfixturevalue(graph_name)
        assert normal_form(new_word(g, [1, 1, 2])).letters == ("1", "2")

    def test_blocked_letter_stays_behind(self, p3: SimplicialGraph):
        """3 cannot pass 1 in P_3, but 2 can pass both."""
        assert normal_form(new_word(p3, [3, 2, 1])).letters == ("2", "3", "1")


class TestMatchingPermutation:
    """Tests for matching_permutation."""

    def test_identity(self, p3: SimplicialGraph):
        """Equal words match by the identity."""
        w = new_word(p3, [1, 3, 2, 1])
        assert matching_permutation(w, w).is_identity()

    def test_transposition(self, k2: SimplicialGraph):
        """Swapped letters over an edge give a transposition."""
        sigma = matching_permutation(new_word(k2, [1, 2]), new_word(k2, [2, 1]))
        assert sigma.images == (2, 1)
        assert sigma(1) == 2

    def test_not_reduced(self, k2: SimplicialGraph):
        """Both inputs must be reduced."""
        with pytest.raises(WordError, match="not reduced"):
            matching_permutation(new_word(k2, [1, 1]), new_word(k2, [1]))

    def test_not_equivalent(self, edgeless2: SimplicialGraph):
        """Inputs must represent the same element."""
        with pytest.raises(WordError, match="not equivalent"):
            matching_permutation(new_word(edgeless2, [1, 2]), new_word(edgeless2, [2, 1]))

    def test_permutation_model_rejects_non_bijection(self):
        """Images must be a rearrangement of 1..n."""
        with pytest.raises(ValueError, match="Not a permutation"):
            Permutation(images=(1, 1))


class TestBfsClass:
    """Tests for bfs_class."""

    def test_edge(self, k2: SimplicialGraph):
        """1 2 over an edge has exactly two spellings of length two."""
        found = bfs_class(new_word(k2, [1, 2]), 2)
        assert {w.letters for w in found} == {("1", "2"), ("2", "1")}

    def test_single_letter(self, k2: SimplicialGraph):
        """A single letter with cap one is alone."""
        assert {w.letters for w in bfs_class(new_word(k2, [1]), 1)} == {("1",)}

    def test_no_moves(self, edgeless2: SimplicialGraph):
        """1 2 1 without edges admits no moves within length three."""
        found = bfs_class(new_word(edgeless2, [1, 2, 1]), 3)
        assert {w.letters for w in found} == {("1", "2", "1")}

    def test_cap_too_small(self, k2: SimplicialGraph):
        """The cap must fit the starting word."""
        with pytest.raises(WordError):
            bfs_class(new_word(k2, [1, 2]), 1)


class TestExhaustiveAgreement:
    """Normal forms against the rewriting closure on every small graph."""

    def test_partition_lengths_and_matching(self):
        """Classes, reduced lengths and letter matchings agree with the closure."""
        max_length = 6
        for g in _small_graphs():
            words = _all_words(g, max_length)
            class_of: dict[tuple[str, ...], int] = {}
            classes: list[list[Word]] = []
            for w in words:
                if w.letters in class_of:
                    continue
                members = sorted(bfs_class(w, max_length), key=lambda x: x.letters)
                for member in members:
                    class_of[member.letters] = len(classes)
                classes.append(members)

            forms = {w.letters: normal_form(w).letters for w in words}
            form_to_class: dict[tuple[str, ...], int] = {}
            for letters, form in forms.items():
                assert form_to_class.setdefault(form, class_of[letters]) == class_of[letters]
            assert len(form_to_class) == len(classes)

            for members in classes:
                reduced = [w for w in members if is_reduced(w)]
                assert reduced
                shortest = min(len(w) for w in members)
                assert {len(w) for w in reduced} == {shortest}
                assert len({tuple(sorted(Counter(w.letters).items())) for w in reduced}) == 1
                assert normal_form(members[0]) == min(reduced, key=lambda x: x.letters)

                first = reduced[0]
                for other in reduced:
                    sigma = matching_permutation(first, other)
                    assert all(
                        other.letters[i - 1] == first.letters[sigma(i) - 1]
                        for i in range(1, len(other) + 1)
                    )
                    for x in set(first.letters):
                        used = [sigma(i) for i in range(1, len(other) + 1) if other.letters[i - 1] == x]
                        assert used == sorted(used)


class TestWordProperties:
    """Property-based checks of the word calculus."""

    @given(graphs_and_words())
    @settings(max_examples=200, deadline=None)
    def test_normal_form_is_reduced_and_idempotent(self, w: Word):
        """The normal form is reduced and is its own normal form."""
        form = normal_form(w)
        assert is_reduced(form)
        assert normal_form(form) == form
        assert equivalent(form, w)

    @given(graphs_and_words())
    @settings(max_examples=200, deadline=None)
    def test_reduce_keeps_order_and_shortens(self, w: Word):
        """reduce drops letters without reordering the survivors."""
        reduced = reduce(w)
        assert is_reduced(reduced)
        assert len(reduced) <= len(w)
        assert len(reduced) == len(normal_form(w))
        it = iter(w.letters)
        assert all(x in it for x in reduced.letters)

    @given(graphs_and_words(max_length=5), graphs_and_words(max_length=5))
    @settings(max_examples=100, deadline=None)
    def test_complete_graph_collapses_to_support(self, w: Word, other: Word):
        """On a complete graph the normal form is the sorted set of letters."""
        g = complete_graph(4)
        word = new_word(g, w.letters + other.letters)
        assert normal_form(word).letters == tuple(sorted(set(word.letters)))


class TestWordText:
    """Tests for parse_word and format_word."""

    def test_round_trip(self, p3: SimplicialGraph):
        """Tokens read back to the same word."""
        w = parse_word(p3, "3 1  2\t1")
        assert w.letters == ("3", "1", "2", "1")
        assert format_word(w) == "3 1 2 1"

    def test_pre_split_tokens(self, p3: SimplicialGraph):
        """Command-line style argument lists are accepted."""
        assert parse_word(p3, ["3 1", "2"]).letters == ("3", "1", "2")

    def test_unknown_vertex(self, p3: SimplicialGraph):
        """Letters must be vertices."""
        with pytest.raises(FormatError, match="'7'"):
            parse_word(p3, "1 7")

    def test_empty_word_formats_empty(self, p3: SimplicialGraph):
        """The empty word prints as an empty string."""
        assert format_word(parse_word(p3, "")) == ""

    def test_new_word_rejects_unknown(self, p3: SimplicialGraph):
        """new_word validates letters too."""
        with pytest.raises(WordError):
            new_word(p3, [1, 5])
