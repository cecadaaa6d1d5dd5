"""Multiplex graph model and file I/O.

A multiplex graph is a node-attributed directed graph whose edges live on
named layers: an edge is a (src, dst, layer) triple and the same node pair
may be linked on several layers.  Undirected graphs are stored as symmetric
directed pairs behind the same interface.

Node names, layer names and attribute values are strings in every public
interface.  Internally they are interned to dense integers; interning sorts
the names first, so loading the same edges in any order yields an identical
graph and integer comparisons agree with name-string comparisons.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from .errors import CoupledGraphError, GraphFormatError

log = logging.getLogger(__name__)

# Attribute assigned to nodes that none of the attribute sources mention.
ATTR_DEFAULT = "·"

# Layer names of the coupled (node-colored) encoding: "1" couples the
# replicas of one entity across layers, "2" carries the original edges.
COUPLING_LAYER = "1"
INTRA_LAYER = "2"
_REPLICA_SEP = "::"


@dataclass
class LoadReport:
    """Counts of the irregularities tolerated while building a graph."""

    self_loops: int = 0
    duplicates: int = 0
    unknown_attr_nodes: int = 0


class MultiplexGraph:
    """Immutable multiplex graph with per-layer adjacency indexes."""

    def __init__(
        self,
        triples: Iterable[Tuple[str, str, str]],
        attrs: Optional[Dict[str, str]] = None,
        directed: bool = True,
        extra_nodes: Iterable[str] = (),
        report: Optional[LoadReport] = None,
    ):
        """Build a graph from (src, dst, layer) name triples.

        Self loops are dropped and duplicate triples collapsed, counted in
        the report.  When ``directed`` is false each kept edge is stored in
        both orientations.  ``extra_nodes`` adds nodes that no edge touches.
        """
        self.directed = directed
        self.load_report = report if report is not None else LoadReport()

        seen: Set[Tuple[str, str, str]] = set()
        names: Set[str] = set(extra_nodes)
        layers: Set[str] = set()
        for src, dst, lay in triples:
            names.add(src)
            names.add(dst)
            if src == dst:
                self.load_report.self_loops += 1
                continue
            if not directed and src > dst:
                src, dst = dst, src
            if (src, dst, lay) in seen:
                self.load_report.duplicates += 1
                continue
            seen.add((src, dst, lay))
            layers.add(lay)

        self.node_names: Tuple[str, ...] = tuple(sorted(names))
        self.layer_names: Tuple[str, ...] = tuple(sorted(layers))
        self._node_id = {n: i for i, n in enumerate(self.node_names)}
        self._layer_id = {l: i for i, l in enumerate(self.layer_names)}

        attrs = attrs or {}
        self.attrs: Tuple[str, ...] = tuple(
            attrs.get(n, ATTR_DEFAULT) for n in self.node_names
        )

        edge_ids: Set[Tuple[int, int, int]] = set()
        for src, dst, lay in seen:
            u, v, l = self._node_id[src], self._node_id[dst], self._layer_id[lay]
            edge_ids.add((u, v, l))
            if not directed:
                edge_ids.add((v, u, l))
        self.edges: FrozenSet[Tuple[int, int, int]] = frozenset(edge_ids)

        n, nl = len(self.node_names), len(self.layer_names)
        self._out: List[Dict[int, Set[int]]] = [dict() for _ in range(n)]
        self._in: List[Dict[int, Set[int]]] = [dict() for _ in range(n)]
        self.layer_edge_counts: List[int] = [0] * nl
        self.layer_nodes: List[Set[int]] = [set() for _ in range(nl)]
        for u, v, l in edge_ids:
            self._out[u].setdefault(l, set()).add(v)
            self._in[v].setdefault(l, set()).add(u)
            self.layer_edge_counts[l] += 1
            self.layer_nodes[l].add(u)
            self.layer_nodes[l].add(v)

        by_attr: Dict[str, List[int]] = {}
        for i, a in enumerate(self.attrs):
            by_attr.setdefault(a, []).append(i)
        self.nodes_by_attr: Dict[str, Tuple[int, ...]] = {
            a: tuple(ids) for a, ids in by_attr.items()
        }

    # -- basic accessors ---------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.node_names)

    @property
    def n_layers(self) -> int:
        return len(self.layer_names)

    @property
    def n_edges(self) -> int:
        """Stored directed edge count (symmetric pairs count twice)."""
        return len(self.edges)

    def node_id(self, name: str) -> int:
        return self._node_id[name]

    def layer_id(self, name: str) -> int:
        return self._layer_id[name]

    def has_node(self, name: str) -> bool:
        return name in self._node_id

    def has_edge(self, u: int, v: int, l: int) -> bool:
        return (u, v, l) in self.edges

    def out_neighbors(self, u: int, l: int) -> Set[int]:
        return self._out[u].get(l, _EMPTY)

    def in_neighbors(self, v: int, l: int) -> Set[int]:
        return self._in[v].get(l, _EMPTY)

    def attr_of(self, u: int) -> str:
        return self.attrs[u]

    def node_layers(self, u: int) -> Tuple[int, ...]:
        """Layers on which node ``u`` has at least one incident edge."""
        return tuple(sorted(set(self._out[u]) | set(self._in[u])))

    def smallest_layer_size(self) -> int:
        """Node count of the layer with fewest participating nodes."""
        if not self.layer_names:
            return 0
        return min(len(s) for s in self.layer_nodes)

    # -- name-space views --------------------------------------------------

    def name_triples(self) -> List[Tuple[str, str, str]]:
        """All stored edges as sorted (src, dst, layer) name triples."""
        nn, ln = self.node_names, self.layer_names
        return sorted((nn[u], nn[v], ln[l]) for u, v, l in self.edges)

    def unit_triples(self) -> List[Tuple[str, str, str]]:
        """Edge units for splitting and serialization, sorted.

        Directed graphs: every stored triple.  Undirected graphs: one
        canonical (min, max, layer) triple per symmetric pair.
        """
        if self.directed:
            return self.name_triples()
        nn, ln = self.node_names, self.layer_names
        return sorted((nn[u], nn[v], ln[l]) for u, v, l in self.edges if u < v)

    def attr_map(self) -> Dict[str, str]:
        """Node name to attribute, only for non-default attributes."""
        return {
            n: a for n, a in zip(self.node_names, self.attrs) if a != ATTR_DEFAULT
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiplexGraph):
            return NotImplemented
        return (
            self.directed == other.directed
            and self.node_names == other.node_names
            and self.attrs == other.attrs
            and self.layer_names == other.layer_names
            and self.name_triples() == other.name_triples()
        )

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return (
            f"MultiplexGraph({kind}, {self.n_nodes} nodes, "
            f"{self.n_layers} layers, {self.n_edges} stored edges)"
        )


_EMPTY: FrozenSet[int] = frozenset()


# -- file I/O ---------------------------------------------------------------


def _parse_edge_file(
    path: str, comune: bool
) -> List[Tuple[str, str, str]]:
    triples = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            if comune:
                # CoMuNe archive layout: layer src dst [weight]
                if len(tok) not in (3, 4):
                    raise GraphFormatError(
                        f"{path}:{lineno}: expected 'layer src dst [weight]', "
                        f"got {len(tok)} fields"
                    )
                lay, src, dst = tok[0], tok[1], tok[2]
            else:
                if len(tok) != 3:
                    raise GraphFormatError(
                        f"{path}:{lineno}: expected 'src dst layer', "
                        f"got {len(tok)} fields"
                    )
                src, dst, lay = tok
            triples.append((src, dst, lay))
    return triples


def _parse_attr_file(path: str) -> Dict[str, str]:
    attrs: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            if len(tok) != 2:
                raise GraphFormatError(
                    f"{path}:{lineno}: expected 'node attribute', "
                    f"got {len(tok)} fields"
                )
            attrs[tok[0]] = tok[1]
    return attrs


def load_graph(
    edge_path: str,
    attr_path: Optional[str] = None,
    directed: bool = True,
    comune: bool = False,
) -> MultiplexGraph:
    """Load a multiplex graph from whitespace-separated text files.

    The edge file holds one ``src dst layer`` triple per line (``#`` starts
    a comment); with ``comune`` the field order is ``layer src dst`` with an
    ignored trailing weight.  The optional attribute file holds ``node
    attribute`` lines; entries for nodes absent from the edge file are
    ignored with a warning count.
    """
    triples = _parse_edge_file(edge_path, comune)
    report = LoadReport()
    attrs: Dict[str, str] = {}
    if attr_path is not None:
        raw_attrs = _parse_attr_file(attr_path)
        known = {s for s, _, _ in triples} | {d for _, d, _ in triples}
        for node, a in raw_attrs.items():
            if node in known:
                attrs[node] = a
            else:
                report.unknown_attr_nodes += 1
    g = MultiplexGraph(triples, attrs=attrs, directed=directed, report=report)
    rep = g.load_report
    if rep.self_loops or rep.duplicates or rep.unknown_attr_nodes:
        log.warning(
            "%s: dropped %d self loops, %d duplicate edges; "
            "%d attribute lines referenced unknown nodes",
            edge_path, rep.self_loops, rep.duplicates, rep.unknown_attr_nodes,
        )
    return g


def write_edge_file(g: MultiplexGraph, path: str) -> None:
    """Write the graph's edge units, one canonical triple per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for src, dst, lay in g.unit_triples():
            fh.write(f"{src} {dst} {lay}\n")


def write_attr_file(g: MultiplexGraph, path: str) -> None:
    """Write every node's attribute, including defaults.

    Listing all nodes keeps isolated nodes recoverable from the file pair.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for name, a in zip(g.node_names, g.attrs):
            fh.write(f"{name} {a}\n")


# -- collapsed single-layer view -------------------------------------------


@dataclass
class SimpleGraph:
    """Undirected single-layer graph: the layer-collapsed view.

    ``edges`` holds one (u, v) id pair per link with u < v; ``adj`` is the
    symmetric adjacency index.  Node names and ids coincide with the source
    multiplex graph.
    """

    node_names: Tuple[str, ...]
    edges: FrozenSet[Tuple[int, int]]
    adj: List[Set[int]] = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return len(self.node_names)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def as_multiplex(self, layer: str = "flat") -> MultiplexGraph:
        """View this graph as an undirected one-layer multiplex graph."""
        nn = self.node_names
        triples = [(nn[u], nn[v], layer) for u, v in self.edges]
        return MultiplexGraph(
            triples, directed=False, extra_nodes=nn,
        )


def collapse(g: MultiplexGraph) -> SimpleGraph:
    """Merge all layers into one undirected simple graph.

    A pair is linked iff some layer links it in either direction; layer
    multiplicity and edge direction are discarded.  The node set (including
    isolated nodes) is preserved.
    """
    pairs: Set[Tuple[int, int]] = set()
    for u, v, _ in g.edges:
        pairs.add((u, v) if u < v else (v, u))
    adj: List[Set[int]] = [set() for _ in range(g.n_nodes)]
    for u, v in pairs:
        adj[u].add(v)
        adj[v].add(u)
    return SimpleGraph(g.node_names, frozenset(pairs), adj)


# -- coupled (node-colored) encoding ---------------------------------------


@dataclass
class CoupledMultigraph:
    """Single-attribute encoding of a multiplex graph.

    Every (node, layer) participation becomes a replica node whose
    attribute is the layer name; layer "1" couples the replicas of one
    entity (always symmetric), layer "2" carries the original edges between
    replicas of the same layer.  Entities with no edges keep one replica
    with the default attribute.
    """

    graph: MultiplexGraph
    source_directed: bool


def _replica(name: str, layer: str) -> str:
    return f"{name}{_REPLICA_SEP}{layer}"


def to_coupled(g: MultiplexGraph) -> CoupledMultigraph:
    """Encode a multiplex graph as a coupled node-colored multigraph."""
    triples: List[Tuple[str, str, str]] = []
    attrs: Dict[str, str] = {}
    isolated: List[str] = []
    ln = g.layer_names
    for u in range(g.n_nodes):
        lays = g.node_layers(u)
        if not lays:
            isolated.append(_replica(g.node_names[u], ATTR_DEFAULT))
            continue
        reps = [_replica(g.node_names[u], ln[l]) for l in lays]
        for r, l in zip(reps, lays):
            attrs[r] = ln[l]
        # Coupling clique over this entity's replicas, both orientations.
        for i in range(len(reps)):
            for j in range(i + 1, len(reps)):
                triples.append((reps[i], reps[j], COUPLING_LAYER))
                triples.append((reps[j], reps[i], COUPLING_LAYER))
    nn = g.node_names
    for u, v, l in g.edges:
        triples.append(
            (_replica(nn[u], ln[l]), _replica(nn[v], ln[l]), INTRA_LAYER)
        )
    cg = MultiplexGraph(
        triples, attrs=attrs, directed=True, extra_nodes=isolated
    )
    return CoupledMultigraph(cg, source_directed=g.directed)


def from_coupled(cg: CoupledMultigraph) -> MultiplexGraph:
    """Invert :func:`to_coupled`.

    Replicas joined by coupling edges merge back into one entity; each
    intra edge's layer is read off its endpoints' shared attribute.  A
    coupled graph whose intra edge endpoints carry different attributes is
    structurally invalid.
    """
    g = cg.graph
    try:
        coupling = g.layer_id(COUPLING_LAYER)
    except KeyError:
        coupling = None
    try:
        intra = g.layer_id(INTRA_LAYER)
    except KeyError:
        intra = None
    for l in range(g.n_layers):
        if l not in (coupling, intra):
            raise CoupledGraphError(
                f"unexpected layer {g.layer_names[l]!r} in coupled graph"
            )

    # Union replicas along coupling edges.
    parent = list(range(g.n_nodes))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    if coupling is not None:
        for u, v, l in g.edges:
            if l != coupling:
                continue
            if g.attrs[u] == g.attrs[v]:
                raise CoupledGraphError(
                    f"coupling edge joins two replicas of layer "
                    f"{g.attrs[u]!r}: {g.node_names[u]} -> {g.node_names[v]}"
                )
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)

    names: Dict[int, str] = {}
    for i in range(g.n_nodes):
        r = find(i)
        stem = g.node_names[i].rsplit(_REPLICA_SEP, 1)[0]
        if r not in names or stem < names[r]:
            names[r] = stem

    triples = []
    if intra is not None:
        for u, v, l in g.edges:
            if l != intra:
                continue
            au, av = g.attrs[u], g.attrs[v]
            if au != av or au == ATTR_DEFAULT:
                raise CoupledGraphError(
                    f"intra edge endpoints disagree on layer: "
                    f"{g.node_names[u]}({au}) -> {g.node_names[v]}({av})"
                )
            triples.append((names[find(u)], names[find(v)], au))
    extra = sorted(set(names.values()))
    return MultiplexGraph(
        triples, directed=cg.source_directed, extra_nodes=extra
    )
