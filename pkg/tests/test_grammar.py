import pytest

from fraseo.errors import CycleError, GrammarParseError, UndefinedSymbolError
from fraseo.grammar import (
    dfs_paths,
    enumerate_trees,
    match_leaf_sequence,
    parse_grammar,
    propagate_features,
)

SMALL_GRAMMAR = """
S -> NP verb
S -> NP verb NP
NP -> determiner noun
NP -> noun
"""


def test_parse_grammar_structure():
    grammar = parse_grammar(SMALL_GRAMMAR)
    assert grammar.start == "S"
    assert len(grammar.rules) == 4
    assert [rule.head.name for rule in grammar.rules_for["NP"]] == ["NP", "NP"]
    assert str(grammar.rules[0]) == "S -> NP verb"


def test_parse_grammar_rejects_undefined_symbols():
    with pytest.raises(UndefinedSymbolError):
        parse_grammar("S -> NP verb")


def test_parse_grammar_rejects_bad_lines():
    with pytest.raises(GrammarParseError):
        parse_grammar("S NP verb")
    with pytest.raises(GrammarParseError):
        parse_grammar("S -> ")
    with pytest.raises(GrammarParseError):
        parse_grammar("noun -> determiner")
    with pytest.raises(GrammarParseError):
        parse_grammar("S(q) -> verb")
    with pytest.raises(GrammarParseError):
        parse_grammar("")


def test_comments_and_blank_lines_ignored():
    grammar = parse_grammar("# top\n\nS -> verb  # inline\n")
    assert grammar.start == "S"
    assert len(grammar.rules) == 1


def test_enumerate_trees_order_and_leaves():
    grammar = parse_grammar(SMALL_GRAMMAR)
    trees = list(enumerate_trees(grammar))
    sequences = [tree.leaf_sequence() for tree in trees]
    assert sequences == [
        ("determiner", "noun", "verb"),
        ("noun", "verb"),
        ("determiner", "noun", "verb", "determiner", "noun"),
        ("determiner", "noun", "verb", "noun"),
        ("noun", "verb", "determiner", "noun"),
        ("noun", "verb", "noun"),
    ]


def test_recursive_grammar_is_depth_bounded():
    grammar = parse_grammar("X -> noun\nX -> noun X", depth_limit=3)
    trees = list(enumerate_trees(grammar))
    # One tree per nesting level up to the bound.
    assert [len(tree.leaf_sequence()) for tree in trees] == [1, 2, 3]


def test_match_leaf_sequence_agrees_with_enumeration():
    grammar = parse_grammar(SMALL_GRAMMAR)
    wanted = ("noun", "verb", "determiner", "noun")
    matched = match_leaf_sequence(grammar, wanted)
    assert [tree.leaf_sequence() for tree in matched] == [wanted]
    by_filter = [
        tree for tree in enumerate_trees(grammar) if tree.leaf_sequence() == wanted
    ]
    assert [str(tree) for tree in matched] == [str(tree) for tree in by_filter]
    assert match_leaf_sequence(grammar, ("verb",)) == []
    with pytest.raises(ValueError):
        match_leaf_sequence(grammar, ())


def test_bundled_grammar_enumeration_is_stable(grammar):
    first = sum(1 for _ in enumerate_trees(grammar))
    second = sum(1 for _ in enumerate_trees(grammar))
    assert first == second == 66779


def test_propagate_features_links_equated_variables():
    grammar = parse_grammar(
        "S(n) -> NP(n) verb(n)\nNP(n) -> determiner(n) noun(n)\n"
    )
    tree = match_leaf_sequence(grammar, ("determiner", "noun", "verb"))[0]
    assignments = propagate_features(grammar, tree, {"number": "plural"})
    leaf_assignments = [
        assignment for node, assignment in assignments if node.is_leaf
    ]
    assert leaf_assignments == [{"number": "plural"}] * 3


def test_propagate_features_stops_at_unlinked_children():
    grammar = parse_grammar("S(n) -> NP verb(n)\nNP -> noun\n")
    tree = match_leaf_sequence(grammar, ("noun", "verb"))[0]
    by_symbol = {}
    for node, assignment in propagate_features(grammar, tree, {"number": "singular"}):
        if node.is_leaf:
            by_symbol[node.symbol] = assignment
    assert by_symbol["noun"] == {}
    assert by_symbol["verb"] == {"number": "singular"}


def test_dfs_paths_listed_order():
    adjacency = {1: (2, 3, 4), 2: (5, 6), 4: (7,)}
    assert dfs_paths(1, adjacency) == [(1, 2, 5), (1, 2, 6), (1, 3), (1, 4, 7)]


def test_dfs_paths_single_vertex_and_shared_children():
    assert dfs_paths(1, {}) == [(1,)]
    # Diamond: 4 is reachable twice but visited once.
    adjacency = {1: (2, 3), 2: (4,), 3: (4,)}
    assert dfs_paths(1, adjacency) == [(1, 2, 4)]


def test_dfs_paths_detects_cycles():
    with pytest.raises(CycleError):
        dfs_paths(1, {1: (2,), 2: (1,)})
