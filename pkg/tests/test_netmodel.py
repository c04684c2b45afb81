from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clawsched.errors import (
    DuplicateIdError,
    InputError,
    InvalidParameterError,
    MissingPositionError,
    NetworkFormatError,
    TreeStructureError,
    UnknownNodeError,
)
from clawsched.netmodel import (
    Hypergraph,
    Network,
    Node,
    Scenario,
    as_number,
    emit_network,
    format_number,
    forward_neighbors,
    line_network,
    neighbors,
    parse_network,
    tree_network,
    validate_scenario,
)

LINE_DOC = """
r_T: 1
nodes:
  - {id: A, x: 0, y: 0}
  - {id: B, x: 0.5, y: 0}
  - {id: C, x: 1, y: 0}
"""


# ------------------------------------------------------------------ numbers
@pytest.mark.parametrize(
    "raw, expected",
    [(0.1, Fraction(1, 10)), ("2/3", Fraction(2, 3)), (3, Fraction(3)), (" 1/4 ", Fraction(1, 4)), (Fraction(5, 7), Fraction(5, 7))],
)
def test_as_number_is_exact(raw, expected):
    assert as_number(raw) == expected


@pytest.mark.parametrize("raw", [True, "abc", float("nan"), float("inf"), [1], None, "1/0"])
def test_as_number_rejects_non_numbers(raw):
    with pytest.raises(NetworkFormatError):
        as_number(raw)


def test_format_number():
    assert format_number(Fraction(2, 3)) == "2/3"
    assert format_number(Fraction(4, 2)) == "2"
    assert format_number(0.5) == "0.5"
    assert format_number(7) == "7"


# ------------------------------------------------------------------ parsing
def test_parse_minimal_line_defaults():
    net = parse_network(LINE_DOC)
    assert net.topology == "geometric"
    assert net.node_ids == ("A", "B", "C")
    assert net.delta == Fraction(1, 100)
    assert net.reach_limit is None
    assert net.node("B").x == Fraction(1, 2)
    assert net.order == ("A", "B", "C")


def test_fixture_files_load(load):
    assert load("fig3_line.net").sinks == ("E",)
    assert load("fig12_butterfly.net").sinks == ("E", "F")
    tree = load("fig8_tree.net")
    assert tree.topology == "tree"
    assert tree.children("B") == ("D", "E")
    assert tree.parent("D") == "B"
    assert [tree.level(v) for v in ("A", "B", "D", "F")] == [1, 2, 3, 4]


@pytest.mark.parametrize(
    "doc, error",
    [
        ("r_T: 1\nnodes:\n  - {id: A, x: 0, y: 0}\n  - {id: A, x: 1, y: 0}\n", DuplicateIdError),
        ("r_T: 1\ntopology: geometric\nnodes:\n  - {id: A, x: 0}\n", MissingPositionError),
        ("r_T: 1\ntopology: tree\nnodes:\n  - {id: A}\n  - {id: B}\n", TreeStructureError),
        ("r_T: 1\ntopology: tree\nnodes:\n  - {id: R}\n  - {id: A, parent: B}\n  - {id: B, parent: A}\n", TreeStructureError),
        ("r_T: 1\ntopology: tree\nnodes:\n  - {id: A}\n  - {id: B, parent: Z}\n", TreeStructureError),
        ("r_T: 0\nnodes:\n  - {id: A, x: 0, y: 0}\n", InvalidParameterError),
        ("r_T: 1\ndelta: -1\nnodes:\n  - {id: A, x: 0, y: 0}\n", InvalidParameterError),
        ("r_T: 1\nreach_limit: 0\nnodes:\n  - {id: A, x: 0, y: 0}\n", InvalidParameterError),
        ("r_T: 1\nsource: Q\nnodes:\n  - {id: A, x: 0, y: 0}\n", UnknownNodeError),
        ("r_T: 1\nsource: A\nsinks: [A]\nnodes:\n  - {id: A, x: 0, y: 0}\n", InvalidParameterError),
        ("r_T: 1\nbogus: 3\nnodes:\n  - {id: A, x: 0, y: 0}\n", NetworkFormatError),
        ("r_T: [1\n", NetworkFormatError),
        ("- 1\n- 2\n", NetworkFormatError),
        ("nodes: []\n", NetworkFormatError),
        ("r_T: 1\norientation: [A]\nnodes:\n  - {id: A, x: 0, y: 0}\n  - {id: B, x: 1, y: 0}\n", InvalidParameterError),
        (
            "r_T: 1\ncapacities:\n  - {src: A, dst: B, capacity: 0}\nnodes:\n  - {id: A, x: 0, y: 0}\n  - {id: B, x: 1, y: 0}\n",
            InvalidParameterError,
        ),
    ],
)
def test_parse_errors(doc, error):
    with pytest.raises(error):
        parse_network(doc)


def test_input_errors_share_exit_code():
    with pytest.raises(InputError) as info:
        parse_network("r_T: 1\nnodes:\n  - {id: A, x: 0, y: 0}\n  - {id: A, x: 1, y: 0}\n")
    assert info.value.exit_code == 2


def test_unknown_node_lookup():
    net = parse_network(LINE_DOC)
    with pytest.raises(UnknownNodeError):
        net.node("Z")
    with pytest.raises(KeyError):
        neighbors(net, "Z")


def test_emit_parse_round_trip_on_fixtures(load):
    for name in ("fig3_line.net", "fig1_star.net", "fig8_tree.net", "fig12_butterfly.net"):
        net = load(name)
        assert parse_network(emit_network(net)) == net


@settings(max_examples=60, deadline=None)
@given(
    gaps=st.lists(st.fractions(min_value=Fraction(1, 10), max_value=3, max_denominator=50), min_size=1, max_size=8),
    reach=st.one_of(st.none(), st.integers(1, 4)),
    delta=st.fractions(min_value=0, max_value=1, max_denominator=100),
)
def test_emit_parse_round_trip_property(gaps, reach, delta):
    net = line_network(gaps, reach_limit=reach, delta=delta)
    assert parse_network(emit_network(net)) == net


# --------------------------------------------------------------- neighbours
def test_neighbors_inclusive_boundary(load):
    net = load("fig3_line.net")
    assert neighbors(net, "A") == {"B", "C"}  # |AC| = r_T exactly
    assert neighbors(net, "C") == {"A", "B", "D"}
    assert forward_neighbors(net, "A") == ("B", "C")
    assert forward_neighbors(net, "C") == ("D",)
    assert forward_neighbors(net, "E") == ()


def test_forward_neighbors_truncated_by_reach_limit():
    net = line_network([Fraction(1, 4)] * 5)  # everyone within r_T of the next four
    assert forward_neighbors(net, "n1") == ("n2", "n3")
    wide = net.replace(reach_limit=None)
    assert forward_neighbors(wide, "n1") == ("n2", "n3", "n4", "n5")
    assert forward_neighbors(net, "n3", bidirectional=True) == ("n1", "n2")


def test_tree_neighbors_are_children(load):
    net = load("fig8_tree.net")
    assert neighbors(net, "B") == {"D", "E"}
    assert forward_neighbors(net, "B", bidirectional=True) == ("A", "D", "E")


def test_tolerance_rescues_rounded_irrational_boundary(load):
    net = load("fig12_butterfly.net")
    assert neighbors(net, "B") == {"A", "D", "E"}
    strict = net.replace(tolerance=0.0)
    assert neighbors(strict, "B") != neighbors(net, "B")


def test_hypergraph_validation():
    h = Hypergraph(frozenset("ABC"), (("A", frozenset("BC")), ("B", frozenset("C"))))
    assert h.out_neighbors("A") == {"B", "C"}
    assert h.out_neighbors("C") == frozenset()
    with pytest.raises(InvalidParameterError):
        Hypergraph(frozenset("AB"), (("A", frozenset()),))
    with pytest.raises(InvalidParameterError):
        Hypergraph(frozenset("AB"), (("A", frozenset("A")),))
    with pytest.raises(UnknownNodeError):
        Hypergraph(frozenset("AB"), (("A", frozenset("Z")),))


# --------------------------------------------------------------- validation
def test_validate_fixtures(load):
    assert validate_scenario(load("fig3_line.net"), "I").ok
    assert not validate_scenario(load("fig3_line.net"), "I")  # empty report is falsy
    assert validate_scenario(load("fig8_tree.net"), Scenario.II).ok
    assert validate_scenario(load("fig10_tree.net"), "III").ok


def test_branching_level_violation(load):
    report = validate_scenario(load("fig10_tree.net"), "II")
    assert not report.ok
    (v,) = report.blocking
    assert v.code == "branching-level"
    assert v.nodes == ("D", "E")
    assert "level 3" in str(report)


def test_topology_mismatch_is_blocking(load):
    assert [v.code for v in validate_scenario(load("fig8_tree.net"), "I").blocking] == ["topology"]
    assert [v.code for v in validate_scenario(load("fig3_line.net"), "III").blocking] == ["topology"]


def test_line_spacing_and_reach_warnings():
    net = line_network([Fraction(1, 4)] * 5, reach_limit=None)
    report = validate_scenario(net, "I")
    assert report.ok  # warnings do not block
    codes = {v.code for v in report.warnings}
    assert codes == {"line-spacing", "reach-limit"}
    capped = validate_scenario(net.replace(reach_limit=2), "I")
    assert {v.code for v in capped.warnings} == {"line-spacing"}


def test_scenario_parse():
    assert Scenario.parse("ii") is Scenario.II
    assert Scenario.parse(Scenario.III) is Scenario.III
    with pytest.raises(InvalidParameterError):
        Scenario.parse("IV")


def test_network_is_immutable():
    net = Network(nodes=(Node("A", Fraction(0), Fraction(0)),), r_T=1)
    with pytest.raises(AttributeError):
        net.r_T = 2  # type: ignore[misc]


def test_tree_network_helper():
    t = tree_network({"r": None, "a": "r", "b": "r"})
    assert t.children("r") == ("a", "b")
    assert t.level("a") == 2
