import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wfnet_verify.petri import (
    MarkingSizeError,
    Net,
    NetError,
    NotEnabledError,
    UnknownNodeError,
)

import nets


def test_preset_postset_seq2():
    net = nets.seq2()
    assert net.preset("t1") == {"i"}
    assert net.preset("i") == set()
    assert net.postset("t1") == {"p1"}
    assert net.postset("f") == set()


def test_preset_postset_andxor():
    net = nets.andxor()
    assert net.preset("f") == {"t1", "t2"}
    assert net.postset("t0") == {"p1", "p2"}


def test_unknown_node_raises():
    net = nets.seq2()
    with pytest.raises(UnknownNodeError):
        net.preset("nope")
    with pytest.raises(UnknownNodeError):
        net.is_enabled((1, 0, 0), "nope")


def test_is_enabled():
    net = nets.seq2()
    assert net.is_enabled((1, 0, 0), "t1")
    assert not net.is_enabled((0, 0, 0), "t1")


def test_is_enabled_weighted_threshold():
    net = nets.k2net()
    assert not net.is_enabled((1, 0, 0), "t1")
    assert net.is_enabled((2, 0, 0), "t1")


def test_marking_size_mismatch():
    net = nets.seq2()
    with pytest.raises(MarkingSizeError):
        net.is_enabled((1, 0), "t1")
    with pytest.raises(MarkingSizeError):
        net.fire((1, 0, 0, 0), "t1")


def test_fire_seq2():
    net = nets.seq2()
    m = (1, 0, 0)
    assert net.fire(m, "t1") == (0, 1, 0)
    assert m == (1, 0, 0)  # value semantics


def test_fire_andxor_split():
    net = nets.andxor()
    assert net.fire((1, 0, 0, 0), "t0") == (0, 1, 1, 0)


def test_fire_weighted():
    net = nets.k2net()
    m = net.fire((2, 0, 0), "t1")
    assert m == (0, 1, 0)
    assert net.fire(m, "t2") == (0, 0, 2)


def test_fire_disabled_raises():
    net = nets.seq2()
    with pytest.raises(NotEnabledError):
        net.fire((0, 0, 0), "t1")


def test_enabled_transitions_order():
    assert nets.seq2().enabled_transitions((1, 0, 0)) == ["t1"]
    assert nets.andxor().enabled_transitions((0, 1, 1, 0)) == ["t1", "t2"]
    assert nets.seq2().enabled_transitions((0, 0, 0)) == []


def test_construction_rejects_bad_nets():
    with pytest.raises(NetError):
        Net(["p", "p"], ["t"], [])
    with pytest.raises(NetError):
        Net(["p"], ["p"], [])
    with pytest.raises(NetError):
        Net(["a", "b"], ["t"], [("a", "b")])  # place -> place
    with pytest.raises(NetError):
        Net(["a"], ["t"], [("a", "t"), ("a", "t")])  # duplicate arc
    with pytest.raises(NetError):
        Net(["a"], ["t"], [("a", "t", 0)])  # zero weight
    with pytest.raises(UnknownNodeError):
        Net(["a"], ["t"], [("a", "u")])


def test_self_loop_fires_subtract_then_add():
    net = Net(["a"], ["t"], [("a", "t"), ("t", "a")])
    assert net.fire((1,), "t") == (1,)
    assert not net.is_enabled((0,), "t")


# -- random-net properties -------------------------------------------------


@st.composite
def small_nets(draw):
    n_places = draw(st.integers(1, 4))
    n_transitions = draw(st.integers(1, 3))
    places = [f"p{i}" for i in range(n_places)]
    transitions = [f"t{j}" for j in range(n_transitions)]
    arcs = []
    for p in places:
        for t in transitions:
            direction = draw(st.sampled_from(["none", "in", "out", "both"]))
            if direction in ("in", "both"):
                arcs.append((p, t, draw(st.integers(1, 3))))
            if direction in ("out", "both"):
                arcs.append((t, p, draw(st.integers(1, 3))))
    marking = tuple(draw(st.integers(0, 3)) for _ in places)
    return Net(places, transitions, arcs), marking


@settings(max_examples=100, deadline=None)
@given(small_nets())
def test_token_conservation(net_and_marking):
    net, m = net_and_marking
    for t in net.enabled_transitions(m):
        m2 = net.fire(m, t)
        for p in net.places:
            i = net.place_index[p]
            delta = net.arc_weight(t, p) - net.arc_weight(p, t)
            assert m2[i] - m[i] == delta
            assert m2[i] >= 0


@settings(max_examples=100, deadline=None)
@given(small_nets(), st.integers(0, 2))
def test_enabledness_monotone(net_and_marking, bump):
    net, m = net_and_marking
    bigger = tuple(x + bump for x in m)
    for t in net.transitions:
        if net.is_enabled(m, t):
            assert net.is_enabled(bigger, t)


@settings(max_examples=50, deadline=None)
@given(small_nets())
def test_fire_deterministic(net_and_marking):
    net, m = net_and_marking
    for t in net.enabled_transitions(m):
        assert net.fire(m, t) == net.fire(m, t)


@settings(max_examples=50, deadline=None)
@given(small_nets())
def test_ordinary_net_moves_single_tokens(net_and_marking):
    net, m = net_and_marking
    ordinary = Net(
        net.places, net.transitions, [(s, t, 1) for s, t, _ in net.arcs]
    )
    for t in ordinary.enabled_transitions(m):
        m2 = ordinary.fire(m, t)
        for p in ordinary.preset(t) - ordinary.postset(t):
            assert m2[ordinary.place_index[p]] == m[ordinary.place_index[p]] - 1
        for p in ordinary.postset(t) - ordinary.preset(t):
            assert m2[ordinary.place_index[p]] == m[ordinary.place_index[p]] + 1
