"""Link scoring by rule application.

Every embedding of a rule's antecedent proposes the rule's delta edge at
concrete host nodes.  Proposals that already exist in the graph are skipped;
the rest are aggregated into a score table under one of several weighting
schemes.  By default a rule contributes at most once per target, however
many embeddings propose it.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .errors import MrkError
from .graph import ATTR_DEFAULT, MultiplexGraph
from .miner import DEFAULT_BUDGET, iter_embeddings
from .rules import Rule

WEIGHTING_SCHEMES = ("count", "conf", "lift", "conf-mean", "lift-mean")

LinkKey = Tuple[str, str, str]      # (src, dst, layer) names
OldNewKey = Tuple[str, str, str]    # (node, layer, direction)


@dataclass
class ScoreTable:
    """Candidate links with scores and contributing rule ids."""

    scheme: str
    scores: Dict[Tuple, float]
    provenance: Dict[Tuple, Tuple[str, ...]] = field(default_factory=dict)

    def score_of(self, key: Tuple) -> float:
        """Score for a key, falling back to the layer-less pair.

        Lets single-layer tables (2-tuple keys) answer multiplex-style
        (src, dst, layer) queries.  Unknown keys score 0.
        """
        if key in self.scores:
            return self.scores[key]
        if len(key) == 3:
            u, v = key[0], key[1]
            pair = (u, v) if u < v else (v, u)
            if pair in self.scores:
                return self.scores[pair]
        return 0.0


@dataclass
class OldNewScoreTable:
    """Scores keyed by (node, layer, direction) for new-neighbor prediction.

    ``new_attrs`` keeps, per key, the non-default attributes that the
    contributing rules expect of the incoming node; scoring ignores them.
    """

    scheme: str
    scores: Dict[OldNewKey, float]
    provenance: Dict[OldNewKey, Tuple[str, ...]] = field(default_factory=dict)
    new_attrs: Dict[OldNewKey, Tuple[str, ...]] = field(default_factory=dict)


class _Accumulator:
    """Shared aggregation for both prediction targets."""

    def __init__(self, scheme: str):
        if scheme not in WEIGHTING_SCHEMES:
            raise MrkError(
                f"unknown weighting scheme {scheme!r}; "
                f"expected one of {', '.join(WEIGHTING_SCHEMES)}"
            )
        self.scheme = scheme
        self.n: Dict[Tuple, int] = {}
        self.conf: Dict[Tuple, float] = {}
        self.lift: Dict[Tuple, float] = {}
        self.lift_n: Dict[Tuple, int] = {}
        self.rids: Dict[Tuple, List[str]] = {}

    def add(self, key: Tuple, rule: Rule, times: int = 1) -> None:
        self.n[key] = self.n.get(key, 0) + times
        self.conf[key] = self.conf.get(key, 0.0) + rule.confidence * times
        if not math.isnan(rule.lift):
            self.lift[key] = self.lift.get(key, 0.0) + rule.lift * times
            self.lift_n[key] = self.lift_n.get(key, 0) + times
        self.rids.setdefault(key, []).append(rule.rid)

    def finalize(self) -> Tuple[Dict[Tuple, float], Dict[Tuple, Tuple[str, ...]]]:
        s = self.scheme
        out: Dict[Tuple, float] = {}
        for key, n in self.n.items():
            if s == "count":
                out[key] = float(n)
            elif s == "conf":
                out[key] = self.conf[key]
            elif s == "conf-mean":
                out[key] = self.conf[key] / n
            elif s == "lift":
                # Rules without a finite lift contribute nothing here.
                if key in self.lift:
                    out[key] = self.lift[key]
            elif s == "lift-mean":
                if key in self.lift:
                    out[key] = self.lift[key] / self.lift_n[key]
        prov = {k: tuple(v) for k, v in self.rids.items() if k in out}
        return out, prov


def _antecedent_cache(
    g: MultiplexGraph, rules: Sequence[Rule], budget: int
) -> Dict[str, List[Tuple[int, ...]]]:
    """Embeddings per distinct antecedent code, computed once."""
    cache: Dict[str, List[Tuple[int, ...]]] = {}
    for r in rules:
        code = r.antecedent.code
        if code not in cache:
            cache[code] = sorted(iter_embeddings(r.antecedent, g, budget))
    return cache


def _inverse_map(rule: Rule) -> Dict[int, int]:
    """Consequent slot -> antecedent slot, for slots in the map's image."""
    return {c: a for a, c in enumerate(rule.antecedent_map)}


def score_links(
    g: MultiplexGraph,
    rules: Sequence[Rule],
    scheme: str = "conf",
    per_embedding: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> ScoreTable:
    """Score missing links proposed by rules whose consequent adds no slot.

    For each embedding of a rule's antecedent, the delta edge names two
    mapped slots; the proposal is that concrete (src, dst, layer) triple.
    Existing edges are skipped.  In undirected graphs proposals are
    canonicalized to one orientation.  With ``per_embedding`` every
    proposing embedding contributes instead of each rule once.
    """
    acc = _Accumulator(scheme)
    cache = _antecedent_cache(
        g, [r for r in rules if not r.new_node], budget
    )
    for rule in rules:
        if rule.new_node:
            continue
        inv = _inverse_map(rule)
        ds, dd, dl = rule.delta_edge
        sa, da = inv[ds], inv[dd]
        try:
            lid = g.layer_id(dl)
        except KeyError:
            continue
        hits: Dict[Tuple[int, int], int] = {}
        for emb in cache[rule.antecedent.code]:
            u, v = emb[sa], emb[da]
            if g.has_edge(u, v, lid):
                continue
            if not g.directed and u > v:
                u, v = v, u
            hits[(u, v)] = hits.get((u, v), 0) + 1
        nn, ln = g.node_names, dl
        for (u, v), times in hits.items():
            key = (nn[u], nn[v], ln)
            acc.add(key, rule, times if per_embedding else 1)
    scores, prov = acc.finalize()
    return ScoreTable(scheme, scores, prov)


def score_old_new(
    g: MultiplexGraph,
    rules: Sequence[Rule],
    scheme: str = "conf",
    per_embedding: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> OldNewScoreTable:
    """Score (node, layer, direction) slots for edges toward unseen nodes.

    Only rules whose consequent adds a fresh slot apply: the delta edge
    joins a mapped anchor slot to the fresh one, so each antecedent
    embedding proposes that the anchor's host node will gain an edge on the
    delta layer toward some new node.  Direction is the delta edge's
    orientation at the anchor ("out" when the anchor is the source);
    undirected graphs collapse both orientations to "out".
    """
    acc = _Accumulator(scheme)
    cache = _antecedent_cache(g, [r for r in rules if r.new_node], budget)
    wanted_attrs: Dict[OldNewKey, Set[str]] = {}
    for rule in rules:
        if not rule.new_node:
            continue
        inv = _inverse_map(rule)
        ds, dd, dl = rule.delta_edge
        if ds in inv:
            anchor, direction = inv[ds], "out"
            fresh = dd
        elif dd in inv:
            anchor, direction = inv[dd], "in"
            fresh = ds
        else:
            continue
        if not g.directed:
            direction = "out"
        fresh_attr = rule.consequent.attrs[fresh]
        hits: Dict[int, int] = {}
        for emb in cache[rule.antecedent.code]:
            u = emb[anchor]
            hits[u] = hits.get(u, 0) + 1
        nn = g.node_names
        for u, times in hits.items():
            key = (nn[u], dl, direction)
            acc.add(key, rule, times if per_embedding else 1)
            if fresh_attr != ATTR_DEFAULT:
                wanted_attrs.setdefault(key, set()).add(fresh_attr)
    scores, prov = acc.finalize()
    new_attrs = {
        k: tuple(sorted(v)) for k, v in wanted_attrs.items() if k in scores
    }
    return OldNewScoreTable(scheme, scores, prov, new_attrs)


# -- serialization ----------------------------------------------------------


def write_scores_csv(table: ScoreTable, path: str) -> None:
    """Write link scores as ``src,dst,layer,score`` rows, sorted by key."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["src", "dst", "layer", "score"])
        for key in sorted(table.scores):
            if len(key) == 3:
                src, dst, lay = key
            else:
                src, dst = key
                lay = ""
            w.writerow([src, dst, lay, repr(table.scores[key])])


def write_old_new_csv(table: OldNewScoreTable, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "layer", "direction", "score"])
        for key in sorted(table.scores):
            node, lay, direction = key
            w.writerow([node, lay, direction, repr(table.scores[key])])


def read_scores_csv(path: str) -> ScoreTable:
    scores: Dict[Tuple, float] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        r = csv.reader(fh)
        header = next(r, None)
        if header is None:
            raise MrkError(f"{path}: empty score file")
        for row in r:
            if len(row) != 4:
                raise MrkError(f"{path}: bad score row {row!r}")
            src, dst, lay, score = row
            key = (src, dst, lay) if lay else (src, dst)
            scores[key] = float(score)
    return ScoreTable("file", scores)
