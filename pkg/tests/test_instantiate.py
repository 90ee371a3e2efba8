import json
import random

import pytest

from generators import random_registry
from metacompose import (CommunityComposer, CoverEnumerator, InstantiationCursor, Request, enumerate_goal_covers,
                         enumerate_in_covers, find_meta_composition, is_valid_composition, new_cursor, next_composition,
                         refine_meta_composition)
from metacompose.instantiate import CursorStateError
from metacompose.registry import Registry, op


def _refined(reg, known, goal):
    est = CommunityComposer().fit(reg)
    found = find_meta_composition(Request(known, goal), est.interaction_network_)
    return refine_meta_composition(found)


@pytest.fixture
def loop_refined(loop_composer, loop_request):
    found = find_meta_composition(loop_request, loop_composer.interaction_network_)
    return refine_meta_composition(found)


def test_goal_cover_order():
    covers = CoverEnumerator({"x", "y"}, [("A", {"x"}), ("B", {"y"}), ("C", {"x", "y"})])
    assert list(covers) == [("C",), ("A", "B")]


def test_in_cover_order():
    covers = CoverEnumerator({"p", "q"}, [("P", {"p"}), ("Q", {"q"}), ("R", {"p", "q"})])
    assert list(covers) == [("R",), ("P", "Q")]


def test_empty_target_has_one_empty_cover():
    assert list(CoverEnumerator(set(), [("A", {"x"})])) == [()]


def test_uncoverable_target():
    assert list(CoverEnumerator({"x", "z"}, [("A", {"x"})])) == []


def test_cover_enumerator_positions():
    covers = CoverEnumerator({"x"}, [("A", {"x"}), ("B", {"x"})])
    assert covers.current() is None
    assert covers.advance() == ("A",)
    assert covers.advance() == ("B",)
    assert covers.advance() is None and covers.position is None


def test_supplier_loop_goal_covers(loop_refined):
    assert list(enumerate_goal_covers(loop_refined)) == [("m1", "m3"), ("m2", "m3")]


def test_supplier_loop_in_covers(loop_refined, supplier_loop):
    assert list(enumerate_in_covers(supplier_loop["o5"], "m5", loop_refined)) == [("m6",)]
    assert list(enumerate_in_covers(supplier_loop["o1"], "m1", loop_refined)) == [()]


def test_supplier_loop_enumeration(loop_refined, supplier_loop, loop_request):
    cursor = new_cursor(loop_refined)
    seqs = list(cursor)
    assert [set(s) for s in seqs] == [{"o6", "o5", "o3", "o1"}, {"o6", "o5", "o3", "o1p"}, {"o6", "o5", "o3", "o2"}]
    for s in seqs:
        assert is_valid_composition(s, supplier_loop, loop_request)
    assert cursor.exhausted


def test_exhaustion_is_stable(loop_refined):
    cursor = new_cursor(loop_refined)
    list(cursor)
    state = cursor.to_state()
    for _ in range(3):
        assert next_composition(cursor) is None
    assert cursor.to_state() == state


def test_selectors_during_supplier_loop(loop_refined):
    cursor = InstantiationCursor(loop_refined)
    assert cursor.next_op_seq("m1") is True
    cursor.next_composition()
    assert cursor.get_goal_cover() == ("m1", "m3")
    assert cursor.get_instance("m1").id == "o1"
    assert cursor.get_op_seq("m1") == ["o1"]
    assert cursor.get_in_cover("m5") == ("m6",)
    assert cursor.next_op_seq("m1") is True
    assert cursor.get_instance("m1").id == "o1p"

    cursor = InstantiationCursor(loop_refined)
    for _ in range(3):
        cursor.next_composition()
    assert cursor.get_goal_cover() == ("m2", "m3")
    assert cursor.get_op_seq("m2") == ["o6", "o5", "o2"]
    with pytest.raises(KeyError):
        cursor.get_op_seq("m1")


def test_single_node_single_member():
    refined = _refined(Registry((op("p", {"a"}, {"g"}),)), {"a"}, {"g"})
    assert list(new_cursor(refined)) == [("p",)]


def test_single_node_two_members():
    refined = _refined(Registry((op("p", {"a"}, {"g"}), op("q", {"a", "b"}, {"g"}))), {"a", "b"}, {"g"})
    assert len(refined) == 1
    assert list(new_cursor(refined)) == [("p",), ("q",)]


def test_diamond_shares_supplier():
    reg = Registry((op("s", {"a"}, {"u"}), op("l", {"u"}, {"x"}), op("r", {"u"}, {"y"})))
    refined = _refined(reg, {"a"}, {"x", "y"})
    seqs = list(new_cursor(refined))
    assert len(seqs) == 1
    assert seqs[0][0] == "s" and sorted(seqs[0]) == ["l", "r", "s"]


def test_fresh_cursor_advances(loop_refined):
    cursor = new_cursor(loop_refined)
    assert cursor.next_composition() != cursor.next_composition()


def test_needs_refined_composition(loop_composer, loop_request):
    found = find_meta_composition(loop_request, loop_composer.interaction_network_)
    with pytest.raises(ValueError):
        InstantiationCursor(found)


def test_state_round_trip_midway(loop_refined):
    cursor = new_cursor(loop_refined)
    first = cursor.next_composition()
    state = json.loads(json.dumps(cursor.to_state()))
    resumed = InstantiationCursor.from_state(loop_refined, state)
    assert resumed.emitted == (first,)
    assert list(resumed) == list(cursor)


def test_state_of_fresh_cursor(loop_refined):
    resumed = InstantiationCursor.from_state(loop_refined, new_cursor(loop_refined).to_state())
    assert len(list(resumed)) == 3


@pytest.mark.parametrize("mutate, message", [
    (lambda s: s.update(version=99), "version"),
    (lambda s: s.update(request={"known": ["a"], "goal": ["x"]}), "different request"),
    (lambda s: s["nodes"].pop("m1"), "different meta-composition"),
    (lambda s: s.update(goal_cover=7), "out of range"),
    (lambda s: s["decisions"][0].__setitem__(1, 9), "instance position"),
    (lambda s: s["decisions"][0].__setitem__(2, 9), "input cover position"),
    (lambda s: s["decisions"][0].__setitem__(0, "m2"), "expected a decision"),
    (lambda s: s["decisions"].pop(), "unset"),
    (lambda s: s.update(goal_cover=None), "without a goal cover"),
])
def test_state_validation(loop_refined, mutate, message):
    cursor = new_cursor(loop_refined)
    cursor.next_composition()
    state = cursor.to_state()
    mutate(state)
    with pytest.raises(CursorStateError, match=message):
        InstantiationCursor.from_state(loop_refined, state)


def _feasible_instances(count):
    seed = 0
    while count:
        reg, req = random_registry(random.Random(seed))
        seed += 1
        cursor = CommunityComposer().fit(reg).compose(req)
        if cursor is not None:
            count -= 1
            yield seed - 1, reg, req, cursor


@pytest.mark.parametrize("seed, reg, req, cursor", list(_feasible_instances(60)))
def test_random_enumeration_is_sound(seed, reg, req, cursor):
    seqs = list(cursor)
    assert seqs
    assert len(set(seqs)) == len(seqs)
    assert len({frozenset(s) for s in seqs}) == len(seqs)
    for s in seqs:
        assert is_valid_composition(s, reg, req)
    assert cursor.max_depth <= len(cursor.composition)
