import re
from pathlib import Path

import pytest

from wfnet_verify.promela import (
    EmitOptions,
    EmitOptionsError,
    emit_macros,
    emit_model,
    emit_property_defines,
    interpret_model,
    render_index_maps,
)
from wfnet_verify.statespace import explore
from wfnet_verify.wfnet import make_wfrnet, validate_wfnet

import nets

GOLDEN = Path(__file__).parent / "golden"


def _wf(build):
    _, wf = validate_wfnet(build())
    return wf


def _res1(r=1):
    _, wfr = make_wfrnet(nets.res1(), {"r": r})
    return wfr


# -- index maps ------------------------------------------------------------


def test_index_maps_seq2():
    pl, tr = render_index_maps(_wf(nets.seq2))
    assert pl == {"i": 0, "p1": 1, "f": 2}
    assert tr == {"t1": 0, "t2": 1}


def test_index_maps_closure():
    pl, tr = render_index_maps(_wf(nets.seq2), with_closure=True)
    assert tr == {"t1": 0, "t2": 1, "t*": 2}


def test_index_maps_sink_always_last():
    # declaration order is i,p1,f,r: the sink must still land at |P|-1
    pl, _ = render_index_maps(_res1())
    assert pl == {"i": 0, "p1": 1, "r": 2, "f": 3}


# -- macros and defines ------------------------------------------------------


def test_fire_macro_exact():
    assert emit_macros(1, 1, False).splitlines()[0] == "#define fire(t) TR[t]++"


def test_remove_macro_guard_and_decrement():
    text = emit_macros(2, 2, False)
    assert "#define remove1(p1) (PL[p1] > 0) -> PL[p1]--" in text
    assert (
        "#define remove2(p1,p2) (PL[p1] > 0 && PL[p2] > 0) -> PL[p1]--; PL[p2]--"
        in text
    )
    assert "#define add2(p1,p2) PL[p1]++; PL[p2]++" in text


def test_weighted_macros():
    text = emit_macros(2, 1, True)
    assert (
        "#define removeW2(p1,p2,n1,n2) (PL[p1] >= n1 && PL[p2] >= n2) -> "
        "PL[p1] = PL[p1] - n1; PL[p2] = PL[p2] - n2" in text
    )
    assert "#define addW1(p1,n1) PL[p1] = PL[p1] + n1" in text


def test_property_defines_k1():
    text = emit_property_defines(_wf(nets.seq2), 1)
    assert "#define term (PL[2] >= 1)" in text
    assert "#define prop (PL[0]==0 && PL[1]==0 && PL[2]==1)" in text
    assert "#define live (TR[0]>=1 && TR[1]>=1 && TR[2]>=1)" in text


def test_property_defines_k3():
    text = emit_property_defines(_wf(nets.seq2), 3)
    assert "#define kterm (PL[2] >= 3)" in text
    assert text.splitlines()[1].endswith("PL[2]==3)")


def test_property_defines_five_places():
    _, wf = validate_wfnet(nets.andxor())  # 4 places
    net5 = nets.res1()  # 4 places + declared resource keeps 4; build 5-place net
    from wfnet_verify.petri import Net

    net = Net(
        ["i", "a", "b", "c", "f"],
        ["t1", "t2", "t3", "t4"],
        [
            ("i", "t1"),
            ("t1", "a"),
            ("a", "t2"),
            ("t2", "b"),
            ("b", "t3"),
            ("t3", "c"),
            ("c", "t4"),
            ("t4", "f"),
        ],
    )
    _, wf5 = validate_wfnet(net)
    assert "#define term (PL[4] >= 1)" in emit_property_defines(wf5, 1)


def test_property_defines_resources_restored():
    text = emit_property_defines(_res1(1), 2)
    # r sits at PL[2] and must be back at its initial count of 1
    assert "#define kprop (PL[0]==0 && PL[1]==0 && PL[2]==1 && PL[3]==2)" in text


# -- model emission ----------------------------------------------------------


def test_emit_seq2_branches():
    em = emit_model(_wf(nets.seq2), EmitOptions(k=1, properties=("termination",)))
    assert ":: atomic { remove1(0) -> fire(0); add1(1) }" in em.text
    assert ":: atomic { remove1(1) -> fire(1); add1(2) }" in em.text
    assert em.text.count(":: atomic") == 2
    assert "ltl termination { <> term }" in em.text
    assert "ltl proper" not in em.text


def test_emit_seq2_closure_adds_loop_branch():
    em = emit_model(
        _wf(nets.seq2),
        EmitOptions(k=1, closure=True, properties=("termination", "no_dead")),
    )
    assert ":: atomic { remove1(2) -> fire(2); add1(0) }" in em.text
    assert "int TR[3];" in em.text
    assert "ltl nodead { <> live }" in em.text


def test_emit_k2net_weighted_branch():
    em = emit_model(_wf(nets.k2net), EmitOptions(k=1, weighted=True))
    assert ":: atomic { removeW1(0,2) -> fire(0); addW1(1,1) }" in em.text


def test_emit_option_errors():
    with pytest.raises(EmitOptionsError):
        emit_model(_wf(nets.seq2), EmitOptions(k=0))
    with pytest.raises(EmitOptionsError):  # no_dead needs the closure variant
        emit_model(_wf(nets.seq2), EmitOptions(properties=("no_dead",)))
    with pytest.raises(EmitOptionsError):  # weights > 1 need weighted macros
        emit_model(_wf(nets.k2net), EmitOptions())
    with pytest.raises(EmitOptionsError):
        emit_model(_wf(nets.seq2), EmitOptions(properties=("bogus",)))


def test_emit_deterministic():
    opts = EmitOptions(k=2, closure=True, properties=("termination", "proper", "no_dead"))
    assert emit_model(_wf(nets.andxor), opts).text == emit_model(_wf(nets.andxor), opts).text


def test_emit_resource_init_lines():
    em = emit_model(_res1(1), EmitOptions(k=2))
    assert "\tPL[0] = 2;" in em.text
    assert "\tPL[2] = 1;" in em.text


def test_emitted_indices_in_bounds():
    for build, opts in [
        (nets.seq2, EmitOptions(closure=True, properties=("termination", "proper", "no_dead"))),
        (nets.andxor, EmitOptions()),
    ]:
        em = emit_model(_wf(build), opts)
        n_places = len(em.place_index_map)
        assert sorted(em.place_index_map.values()) == list(range(n_places))
        assert f"int PL[{n_places}];" in em.text
        body = em.text.replace(f"int PL[{n_places}];", "")
        for idx in re.findall(r"PL\[(\d+)\]", body):
            assert int(idx) < n_places


def test_lf_line_endings():
    em = emit_model(_wf(nets.seq2), EmitOptions())
    assert "\r" not in em.text
    assert em.text.endswith("\n")


# -- golden files ------------------------------------------------------------


GOLDEN_CASES = [
    ("seq2_plain_k1.pml", nets.seq2, EmitOptions(k=1, properties=("termination", "proper"))),
    (
        "seq2_closure_k1.pml",
        nets.seq2,
        EmitOptions(k=1, closure=True, properties=("termination", "proper", "no_dead")),
    ),
    ("seq2_plain_k3.pml", nets.seq2, EmitOptions(k=3, properties=("termination", "proper"))),
    (
        "seq2_closure_k3.pml",
        nets.seq2,
        EmitOptions(k=3, closure=True, properties=("termination", "proper", "no_dead")),
    ),
    (
        "k2net_weighted_k1.pml",
        nets.k2net,
        EmitOptions(k=1, weighted=True, properties=("termination", "proper")),
    ),
]


@pytest.mark.parametrize("name,build,opts", GOLDEN_CASES)
def test_golden_files(name, build, opts):
    em = emit_model(_wf(build), opts)
    assert em.text == (GOLDEN / name).read_text()


# -- micro-interpreter round trip ---------------------------------------------


def _pl_vector(marking, net, place_map):
    out = [0] * len(marking)
    for pid, pl_idx in place_map.items():
        out[pl_idx] = marking[net.place_index[pid]]
    return tuple(out)


def assert_roundtrip(wf_or_wfr, opts, net, m0):
    em = emit_model(wf_or_wfr, opts)
    sim_nodes, sim_edges = interpret_model(em.text).explore()
    g = explore(net, m0)
    assert g.status == "complete"
    expected_nodes = {_pl_vector(m, net, em.place_index_map) for m in g.markings}
    expected_edges = {
        (
            _pl_vector(g.markings[a], net, em.place_index_map),
            ti,
            _pl_vector(g.markings[b], net, em.place_index_map),
        )
        for a, ti, b in g.edges
    }
    assert set(sim_nodes) == expected_nodes
    assert sim_nodes[0] == _pl_vector(m0, net, em.place_index_map)
    assert {
        (sim_nodes[a], ti, sim_nodes[b]) for a, ti, b in sim_edges
    } == expected_edges


def test_roundtrip_seq2_plain():
    wf = _wf(nets.seq2)
    assert_roundtrip(wf, EmitOptions(k=1), wf.net, (1, 0, 0))


def test_roundtrip_seq2_closure():
    from wfnet_verify.wfnet import closure

    wf = _wf(nets.seq2)
    star = closure(wf)
    assert_roundtrip(
        wf,
        EmitOptions(k=1, closure=True, properties=("termination", "proper", "no_dead")),
        star,
        (1, 0, 0),
    )


def test_roundtrip_andxor():
    wf = _wf(nets.andxor)
    assert_roundtrip(wf, EmitOptions(k=1), wf.net, (1, 0, 0, 0))


def test_roundtrip_k2net_weighted():
    wf = _wf(nets.k2net)
    assert_roundtrip(wf, EmitOptions(k=2, weighted=True), wf.net, (2, 0, 0))


def test_roundtrip_res1():
    wfr = _res1(1)
    assert_roundtrip(wfr, EmitOptions(k=2), wfr.net, (2, 0, 0, 1))
