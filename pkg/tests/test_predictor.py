"""Link and new-neighbor scoring from rule collections."""

import itertools
import math

import numpy as np
import pytest

from mrk.errors import MrkError
from mrk.graph import ATTR_DEFAULT, MultiplexGraph
from mrk.miner import MinerConfig, Pattern, SupportedPattern, mine
from mrk.predictor import (
    OldNewScoreTable,
    ScoreTable,
    WEIGHTING_SCHEMES,
    read_scores_csv,
    score_links,
    score_old_new,
    write_old_new_csv,
    write_scores_csv,
)
from mrk.rules import Rule, build_rules
from tests.conftest import rand_host

D = ATTR_DEFAULT


def mk_rule(ant_edges, cons_edges, delta, amap, new_node,
            conf=0.5, lift=2.0, ant_attrs=None, cons_attrs=None):
    k1 = 1 + max(max(a, b) for a, b, _ in ant_edges)
    k2 = 1 + max(max(a, b) for a, b, _ in cons_edges)
    return Rule(
        antecedent=SupportedPattern(
            tuple(ant_attrs) if ant_attrs else (D,) * k1,
            frozenset(ant_edges), 10,
        ),
        consequent=SupportedPattern(
            tuple(cons_attrs) if cons_attrs else (D,) * k2,
            frozenset(cons_edges), 5,
        ),
        delta_edge=delta,
        antecedent_map=amap,
        new_node=new_node,
        confidence=conf,
        lift=lift,
    )


# -- link scoring: worked examples ------------------------------------------


def test_empty_rules_empty_table():
    g = MultiplexGraph([("1", "2", "a")], directed=True)
    t = score_links(g, [], scheme="count")
    assert t.scores == {} and t.provenance == {}


def test_single_reciprocal_proposal():
    g = MultiplexGraph([("1", "2", "a"), ("5", "6", "b")], directed=True)
    r = mk_rule(
        [(0, 1, "a")], [(0, 1, "a"), (1, 0, "b")],
        (1, 0, "b"), (0, 1), new_node=False, conf=0.5,
    )
    assert score_links(g, [r], scheme="conf").scores == {("2", "1", "b"): 0.5}
    t = score_links(g, [r], scheme="count")
    assert t.scores == {("2", "1", "b"): 1.0}
    assert t.provenance == {("2", "1", "b"): (r.rid,)}


def test_existing_edge_not_proposed():
    g = MultiplexGraph([("1", "2", "a"), ("2", "1", "b")], directed=True)
    r = mk_rule(
        [(0, 1, "a")], [(0, 1, "a"), (1, 0, "b")],
        (1, 0, "b"), (0, 1), new_node=False,
    )
    assert score_links(g, [r], scheme="count").scores == {}


def test_delta_layer_absent_from_host():
    g = MultiplexGraph([("1", "2", "a")], directed=True)
    r = mk_rule(
        [(0, 1, "a")], [(0, 1, "a"), (1, 0, "zz")],
        (1, 0, "zz"), (0, 1), new_node=False,
    )
    assert score_links(g, [r], scheme="count").scores == {}


def test_new_node_rules_ignored_by_link_scoring():
    g = MultiplexGraph([("1", "2", "a")], directed=True)
    r = mk_rule(
        [(0, 1, "a")], [(0, 1, "a"), (1, 2, "a")],
        (1, 2, "a"), (0, 1), new_node=True,
    )
    assert score_links(g, [r], scheme="count").scores == {}


def test_per_embedding_multiplicity():
    g = MultiplexGraph(
        [
            ("1", "2", "a"), ("2", "3", "a"),
            ("1", "4", "a"), ("4", "3", "a"),
            ("7", "8", "b"),
        ],
        directed=True,
    )
    r = mk_rule(
        [(0, 1, "a"), (1, 2, "a")],
        [(0, 1, "a"), (1, 2, "a"), (0, 2, "b")],
        (0, 2, "b"), (0, 1, 2), new_node=False, conf=0.5,
    )
    per_rule = score_links(g, [r], scheme="count")
    per_emb = score_links(g, [r], scheme="count", per_embedding=True)
    assert per_rule.scores[("1", "3", "b")] == 1.0
    assert per_emb.scores[("1", "3", "b")] == 2.0
    assert score_links(g, [r], scheme="conf", per_embedding=True).scores[
        ("1", "3", "b")
    ] == pytest.approx(1.0)


def test_undirected_keys_canonicalized():
    g = MultiplexGraph(
        [("1", "2", "a"), ("2", "3", "a")], directed=False
    )
    r = mk_rule(
        [(0, 1, "a"), (1, 2, "a")],
        [(0, 1, "a"), (1, 2, "a"), (0, 2, "a")],
        (0, 2, "a"), (0, 1, 2), new_node=False,
    )
    t = score_links(g, [r], scheme="count")
    assert set(t.scores) == {("1", "3", "a")}
    assert t.scores[("1", "3", "a")] == 1.0


def test_undirected_reciprocal_rule_proposes_nothing():
    # Symmetric storage means the reciprocal of any present edge is present,
    # so a close rule predicting it never finds a missing target.
    g = MultiplexGraph([("1", "2", "a")], directed=False)
    r = mk_rule(
        [(0, 1, "a")], [(0, 1, "a"), (1, 0, "a")],
        (1, 0, "a"), (0, 1), new_node=False,
    )
    assert score_links(g, [r], scheme="count").scores == {}


# -- scheme arithmetic ------------------------------------------------------


@pytest.fixture
def three_rule_setup():
    g = MultiplexGraph(
        [("1", "2", "a"), ("1", "2", "c"), ("5", "6", "b")], directed=True
    )
    r1 = mk_rule(
        [(0, 1, "a")], [(0, 1, "a"), (1, 0, "b")],
        (1, 0, "b"), (0, 1), new_node=False, conf=0.5, lift=2.0,
    )
    r2 = mk_rule(
        [(0, 1, "c")], [(0, 1, "c"), (1, 0, "b")],
        (1, 0, "b"), (0, 1), new_node=False, conf=0.25, lift=math.nan,
    )
    r3 = mk_rule(
        [(0, 1, "c")], [(0, 1, "c"), (0, 1, "b")],
        (0, 1, "b"), (0, 1), new_node=False, conf=0.125, lift=math.nan,
    )
    return g, [r1, r2, r3]


def test_scheme_arithmetic(three_rule_setup):
    g, rules = three_rule_setup
    shared, nan_only = ("2", "1", "b"), ("1", "2", "b")
    got = {
        s: score_links(g, rules, scheme=s).scores for s in WEIGHTING_SCHEMES
    }
    assert got["count"] == {shared: 2.0, nan_only: 1.0}
    assert got["conf"][shared] == pytest.approx(0.75)
    assert got["conf"][nan_only] == pytest.approx(0.125)
    assert got["conf-mean"][shared] == pytest.approx(0.375)
    # Rules with undefined lift are excluded; a key with no finite-lift
    # contributor disappears from lift-weighted tables entirely.
    assert got["lift"] == {shared: 2.0}
    assert got["lift-mean"] == {shared: 2.0}


def test_provenance_tracks_surviving_keys(three_rule_setup):
    g, rules = three_rule_setup
    for scheme in WEIGHTING_SCHEMES:
        t = score_links(g, rules, scheme=scheme)
        assert set(t.provenance) == set(t.scores)


def test_unknown_scheme_rejected():
    g = MultiplexGraph([("1", "2", "a")], directed=True)
    with pytest.raises(MrkError):
        score_links(g, [], scheme="bogus")
    with pytest.raises(MrkError):
        score_old_new(g, [], scheme="jaccard")


# -- insert-and-match oracle on a mined host --------------------------------


@pytest.fixture(scope="module")
def mined_directed():
    rng = np.random.default_rng(20240817)
    g = rand_host(rng, 15, 2, 34, directed=True, attr_values="mn")
    pats = mine(g, MinerConfig(min_support=2, max_nodes=3))
    rules = build_rules(pats, g)
    return g, rules


def inserted_graph(g, key):
    u, v, lay = key
    return MultiplexGraph(
        list(g.name_triples()) + [(u, v, lay)],
        attrs=dict(g.attr_map()),
        directed=g.directed,
        extra_nodes=g.node_names,
    )


def oracle_contributes(rule, key, g):
    """Does the consequent embed in host+edge with the delta on that edge?

    Direct transcription of the prediction semantics for directed hosts
    (symmetric insertion would also admit reciprocal matches).
    """
    u, v, lay = key
    ds, dd, dl = rule.delta_edge
    if dl != lay:
        return False
    g2 = inserted_graph(g, key)
    cons = rule.consequent
    uid, vid = g2.node_id(u), g2.node_id(v)
    if cons.attrs[ds] != g2.attrs[uid] or cons.attrs[dd] != g2.attrs[vid]:
        return False
    try:
        lids = {l: g2.layer_id(l) for _, _, l in cons.edges}
    except KeyError:
        return False
    rest = [i for i in range(cons.n_slots) if i not in (ds, dd)]
    others = [x for x in range(g2.n_nodes) if x not in (uid, vid)]
    for assign in itertools.permutations(others, len(rest)):
        img = {ds: uid, dd: vid, **dict(zip(rest, assign))}
        if any(cons.attrs[i] != g2.attrs[img[i]] for i in rest):
            continue
        if all(
            g2.has_edge(img[a], img[b], lids[l]) for a, b, l in cons.edges
        ):
            return True
    return False


def test_count_scores_match_insertion_oracle(mined_directed, rng):
    g, rules = mined_directed
    close = [r for r in rules if not r.new_node]
    assert close
    table = score_links(g, rules, scheme="count")
    assert table.scores
    keys = sorted(table.scores)
    picked = [keys[i] for i in rng.choice(len(keys), min(25, len(keys)),
                                          replace=False)]
    for key in picked:
        expected = sum(1 for r in close if oracle_contributes(r, key, g))
        assert table.scores[key] == float(expected) > 0


def test_unscored_absent_triples_have_no_contributor(mined_directed, rng):
    g, rules = mined_directed
    close = [r for r in rules if not r.new_node]
    table = score_links(g, rules, scheme="count")
    existing = set(g.name_triples())
    tried = 0
    names, layers = g.node_names, g.layer_names
    while tried < 20:
        u = names[rng.integers(len(names))]
        v = names[rng.integers(len(names))]
        lay = layers[rng.integers(len(layers))]
        key = (u, v, lay)
        if u == v or key in existing or key in table.scores:
            continue
        tried += 1
        assert not any(oracle_contributes(r, key, g) for r in close)


def test_table_smaller_than_candidate_space(mined_directed):
    g, rules = mined_directed
    table = score_links(g, rules, scheme="count")
    n, L = g.n_nodes, g.n_layers
    negatives = n * (n - 1) * L - g.n_edges
    assert 0 < len(table.scores) < negatives


def test_adding_rules_grows_scores(mined_directed):
    g, rules = mined_directed
    close = [r for r in rules if not r.new_node]
    half = score_links(g, close[: len(close) // 2], scheme="count")
    full = score_links(g, close, scheme="count")
    assert set(half.scores) <= set(full.scores)
    for k, s in half.scores.items():
        assert full.scores[k] >= s


def test_scoring_deterministic(mined_directed):
    g, rules = mined_directed
    a = score_links(g, rules, scheme="conf")
    b = score_links(g, rules, scheme="conf")
    assert a.scores == b.scores and a.provenance == b.provenance


def test_count_and_conf_orderings_agree_broadly(mined_directed):
    scipy_stats = pytest.importorskip("scipy.stats")
    g, rules = mined_directed
    count = score_links(g, rules, scheme="count").scores
    conf = score_links(g, rules, scheme="conf").scores
    keys = sorted(count)
    tau = scipy_stats.kendalltau(
        [count[k] for k in keys], [conf[k] for k in keys]
    ).statistic
    assert tau > 0.2


# -- old-new scoring --------------------------------------------------------


def test_old_new_empty():
    g = MultiplexGraph([("1", "2", "a")], directed=True)
    t = score_old_new(g, [], scheme="count")
    assert t.scores == {} and t.new_attrs == {}


def test_old_new_out_direction():
    g = MultiplexGraph([("1", "2", "a")], directed=True)
    r = mk_rule(
        [(0, 1, "a")], [(0, 1, "a"), (1, 2, "a")],
        (1, 2, "a"), (0, 1), new_node=True, conf=0.4,
    )
    t = score_old_new(g, [r], scheme="conf")
    assert t.scores == {("2", "a", "out"): pytest.approx(0.4)}
    assert t.new_attrs == {}


def test_old_new_in_direction():
    g = MultiplexGraph([("1", "2", "a")], directed=True)
    r = mk_rule(
        [(0, 1, "a")], [(0, 1, "a"), (2, 0, "a")],
        (2, 0, "a"), (0, 1), new_node=True,
    )
    t = score_old_new(g, [r], scheme="count")
    assert t.scores == {("1", "a", "in"): 1.0}


def test_old_new_undirected_collapses_direction():
    g = MultiplexGraph([("1", "2", "a")], directed=False)
    r = mk_rule(
        [(0, 1, "a")], [(0, 1, "a"), (2, 0, "a")],
        (2, 0, "a"), (0, 1), new_node=True,
    )
    t = score_old_new(g, [r], scheme="count")
    assert set(t.scores) == {("1", "a", "out"), ("2", "a", "out")}


def test_old_new_records_wanted_attr():
    g = MultiplexGraph(
        [("1", "2", "a")], attrs={"1": "h"}, directed=True
    )
    r = mk_rule(
        [(0, 1, "a")],
        [(0, 1, "a"), (1, 2, "a")],
        (1, 2, "a"), (0, 1), new_node=True,
        ant_attrs=("h", D), cons_attrs=("h", D, "x"),
    )
    t = score_old_new(g, [r], scheme="count")
    assert t.scores == {("2", "a", "out"): 1.0}
    assert t.new_attrs == {("2", "a", "out"): ("x",)}


def test_old_new_per_embedding():
    g = MultiplexGraph(
        [("1", "3", "a"), ("2", "3", "a")], directed=True
    )
    r = mk_rule(
        [(0, 1, "a")], [(0, 1, "a"), (1, 2, "a")],
        (1, 2, "a"), (0, 1), new_node=True,
    )
    per_rule = score_old_new(g, [r], scheme="count")
    per_emb = score_old_new(g, [r], scheme="count", per_embedding=True)
    assert per_rule.scores[("3", "a", "out")] == 1.0
    assert per_emb.scores[("3", "a", "out")] == 2.0


def test_old_new_on_mined_rules(mined_directed):
    g, rules = mined_directed
    growth = [r for r in rules if r.new_node]
    assert growth
    t = score_old_new(g, rules, scheme="conf")
    assert t.scores
    dirs = {d for _, _, d in t.scores}
    assert dirs <= {"out", "in"}
    for key, score in t.scores.items():
        assert score > 0.0
        assert key[0] in g.node_names
        assert key[1] in g.layer_names


# -- score table access and CSV ---------------------------------------------


def test_score_of_pair_fallback():
    t = ScoreTable("count", {("1", "2"): 3.0})
    assert t.score_of(("1", "2")) == 3.0
    assert t.score_of(("2", "1", "x")) == 3.0
    assert t.score_of(("1", "2", "q")) == 3.0
    assert t.score_of(("9", "9", "q")) == 0.0


def test_scores_csv_round_trip(tmp_path, mined_directed):
    g, rules = mined_directed
    t = score_links(g, rules, scheme="conf")
    p = str(tmp_path / "scores.csv")
    write_scores_csv(t, p)
    back = read_scores_csv(p)
    assert back.scores == t.scores


def test_scores_csv_pair_keys(tmp_path):
    t = ScoreTable("count", {("1", "2"): 1.5, ("a", "b", "x"): 2.0})
    p = str(tmp_path / "s.csv")
    write_scores_csv(t, p)
    back = read_scores_csv(p)
    assert back.scores == t.scores


def test_read_scores_csv_errors(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("", encoding="utf-8")
    with pytest.raises(MrkError):
        read_scores_csv(str(empty))
    bad = tmp_path / "bad.csv"
    bad.write_text("src,dst,layer,score\n1,2\n", encoding="utf-8")
    with pytest.raises(MrkError):
        read_scores_csv(str(bad))


def test_old_new_csv_format(tmp_path):
    t = OldNewScoreTable("count", {("7", "a", "out"): 2.0})
    p = tmp_path / "on.csv"
    write_old_new_csv(t, str(p))
    assert p.read_text(encoding="utf-8").splitlines() == [
        "node,layer,direction,score",
        "7,a,out,2.0",
    ]
