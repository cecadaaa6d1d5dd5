"""Graph model, file I/O, collapse, and the coupled-encoding round trip."""

import itertools

import numpy as np
import pytest

from mrk.errors import CoupledGraphError, GraphFormatError
from mrk.graph import (
    ATTR_DEFAULT,
    MultiplexGraph,
    collapse,
    from_coupled,
    load_graph,
    to_coupled,
    write_attr_file,
    write_edge_file,
)
from tests.conftest import pad_names, rand_host


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


# -- loading ----------------------------------------------------------------


def test_load_two_directed_edges(tmp_path):
    p = write(tmp_path / "g.txt", "1 2 a\n2 1 a\n")
    g = load_graph(p, directed=True)
    assert g.n_nodes == 2
    assert g.n_edges == 2
    assert g.n_layers == 1
    assert g.name_triples() == [("1", "2", "a"), ("2", "1", "a")]


def test_load_self_loop_dropped(tmp_path):
    p = write(tmp_path / "g.txt", "3 3 b\n")
    g = load_graph(p)
    assert g.n_nodes == 1
    assert g.n_edges == 0
    assert g.load_report.self_loops == 1


def test_load_duplicates_and_comments(tmp_path):
    p = write(
        tmp_path / "g.txt",
        "# header comment\n1 2 a\n1 2 a  # repeated on purpose\n\n2 3 a\n",
    )
    g = load_graph(p)
    assert g.n_edges == 2
    assert g.load_report.duplicates == 1


def test_load_malformed_line_reports_position(tmp_path):
    p = write(tmp_path / "g.txt", "1 2 a\n1 2\n")
    with pytest.raises(GraphFormatError) as err:
        load_graph(p)
    assert ":2:" in str(err.value)


def test_load_comune_ordering(tmp_path):
    p = write(tmp_path / "g.txt", "a 1 2 0.7\nb 2 3 1\nb 3 4\n")
    g = load_graph(p, comune=True)
    assert g.name_triples() == [
        ("1", "2", "a"), ("2", "3", "b"), ("3", "4", "b")
    ]


def test_load_attrs_with_unknown_node(tmp_path):
    ep = write(tmp_path / "g.txt", "1 2 a\n")
    ap = write(tmp_path / "g.attrs", "1 x\n9 y\n")
    g = load_graph(ep, ap)
    assert g.attrs[g.node_id("1")] == "x"
    assert g.attrs[g.node_id("2")] == ATTR_DEFAULT
    assert g.load_report.unknown_attr_nodes == 1


def test_load_attr_file_malformed(tmp_path):
    ep = write(tmp_path / "g.txt", "1 2 a\n")
    ap = write(tmp_path / "g.attrs", "1 x extra\n")
    with pytest.raises(GraphFormatError):
        load_graph(ep, ap)


def test_load_order_insensitive(tmp_path, rng):
    g0 = rand_host(rng, 9, 3, 18, directed=True, attr_values="xy")
    lines = [f"{u} {v} {l}" for u, v, l in g0.name_triples()]
    perm = list(lines)
    rng.shuffle(perm)
    p1 = write(tmp_path / "a.txt", "\n".join(lines) + "\n")
    p2 = write(tmp_path / "b.txt", "\n".join(perm) + "\n")
    ap = write(
        tmp_path / "g.attrs",
        "\n".join(f"{n} {a}" for n, a in g0.attr_map().items()) + "\n",
    )
    assert load_graph(p1, ap) == load_graph(p2, ap)


def test_undirected_storage_is_symmetric():
    g = MultiplexGraph([("1", "2", "a")], directed=False)
    u, v, l = g.node_id("1"), g.node_id("2"), g.layer_id("a")
    assert g.has_edge(u, v, l) and g.has_edge(v, u, l)
    assert g.n_edges == 2
    assert g.unit_triples() == [("1", "2", "a")]


def test_undirected_reversed_input_collapses():
    a = MultiplexGraph([("2", "1", "a")], directed=False)
    b = MultiplexGraph([("1", "2", "a")], directed=False)
    assert a == b


def test_edge_file_round_trip(tmp_path, rng):
    for directed in (True, False):
        g = rand_host(rng, 8, 2, 14, directed=directed, attr_values="pq")
        ep, ap = str(tmp_path / "e.txt"), str(tmp_path / "a.txt")
        write_edge_file(g, ep)
        write_attr_file(g, ap)
        assert load_graph(ep, ap, directed=directed) == g


def test_smallest_layer_size():
    g = MultiplexGraph(
        [("1", "2", "a"), ("2", "3", "a"), ("1", "2", "b")], directed=True
    )
    assert g.smallest_layer_size() == 2


# -- collapse ---------------------------------------------------------------


def test_collapse_merges_parallel_layers():
    g = MultiplexGraph([("1", "2", "a"), ("1", "2", "b")], directed=True)
    sg = collapse(g)
    assert sg.n_edges == 1
    assert sg.edges == frozenset({(g.node_id("1"), g.node_id("2"))})


def test_collapse_empty():
    g = MultiplexGraph([], directed=True)
    assert collapse(g).n_edges == 0


def test_collapse_matches_pair_scan(rng):
    g = rand_host(rng, 12, 3, 30, directed=True)
    expected = set()
    for u, v, l in g.name_triples():
        expected.add((min(u, v), max(u, v)))
    sg = collapse(g)
    nn = sg.node_names
    got = {(nn[u], nn[v]) for u, v in sg.edges}
    assert got == expected


def test_collapse_idempotent_on_single_layer(rng):
    g = rand_host(rng, 10, 3, 24, directed=False)
    once = collapse(g)
    twice = collapse(once.as_multiplex())
    assert twice.node_names == once.node_names
    assert twice.edges == once.edges


# -- coupled encoding -------------------------------------------------------


def test_to_coupled_single_edge():
    g = MultiplexGraph([("1", "2", "a")], directed=True)
    cg = to_coupled(g)
    inner = cg.graph
    assert inner.n_nodes == 2
    assert sorted(inner.node_names) == ["1::a", "2::a"]
    trips = inner.name_triples()
    assert trips == [("1::a", "2::a", "2")]


def test_to_coupled_two_layers_couples_replicas():
    g = MultiplexGraph([("1", "2", "a"), ("1", "3", "b")], directed=True)
    inner = to_coupled(g).graph
    coupling = [t for t in inner.name_triples() if t[2] == "1"]
    intra = [t for t in inner.name_triples() if t[2] == "2"]
    assert sorted(coupling) == [("1::a", "1::b", "1"), ("1::b", "1::a", "1")]
    assert len(intra) == 2
    assert inner.attrs[inner.node_id("1::a")] == "a"
    assert inner.attrs[inner.node_id("1::b")] == "b"


def test_round_trip_examples():
    for triples, directed in [
        ([("1", "2", "a")], True),
        ([("1", "2", "a"), ("1", "3", "b")], True),
        ([("1", "2", "a"), ("1", "3", "b")], False),
    ]:
        g = MultiplexGraph(triples, directed=directed)
        assert from_coupled(to_coupled(g)) == g


def test_round_trip_with_isolated_node():
    g = MultiplexGraph([("1", "2", "a")], directed=True, extra_nodes=["7"])
    assert from_coupled(to_coupled(g)) == g


def test_round_trip_random(rng):
    for directed in (True, False):
        g = rand_host(rng, 50, 3, 120, directed=directed)
        assert from_coupled(to_coupled(g)) == g


def test_from_coupled_rejects_mixed_intra_edge():
    cg = to_coupled(MultiplexGraph([("1", "2", "a"), ("2", "3", "b")]))
    inner = cg.graph
    bad = list(inner.name_triples()) + [("1::a", "2::b", "2")]
    cg.graph = MultiplexGraph(bad, attrs=dict(inner.attr_map()), directed=True)
    with pytest.raises(CoupledGraphError):
        from_coupled(cg)


def test_from_coupled_rejects_same_layer_coupling():
    g = MultiplexGraph(
        [("a::x", "b::x", "1")],
        attrs={"a::x": "x", "b::x": "x"},
        directed=True,
    )
    from mrk.graph import CoupledMultigraph

    with pytest.raises(CoupledGraphError):
        from_coupled(CoupledMultigraph(g, source_directed=True))


def test_from_coupled_rejects_alien_layer():
    g = MultiplexGraph([("a", "b", "weird")], directed=True)
    from mrk.graph import CoupledMultigraph

    with pytest.raises(CoupledGraphError):
        from_coupled(CoupledMultigraph(g, source_directed=True))
