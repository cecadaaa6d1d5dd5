"""Frequent pattern mining on multiplex graphs.

Patterns are small connected directed graphs whose nodes ("slots") carry an
attribute and whose edges carry a layer name.  Pattern frequency is measured
by minimum image support: over all embeddings of the pattern, count the
distinct host nodes each slot maps to and take the minimum over slots.  This
support never grows when a pattern is extended, which lets the miner prune
level by level.
"""

from __future__ import annotations

import itertools
import multiprocessing
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

from .errors import MiningBudgetError, MiningInvariantError
from .graph import MultiplexGraph

DEFAULT_BUDGET = 10 ** 6

PatternEdge = Tuple[int, int, str]  # (src slot, dst slot, layer name)


@dataclass(frozen=True)
class Pattern:
    """A connected attributed pattern with layer-labeled directed edges."""

    attrs: Tuple[str, ...]
    edges: FrozenSet[PatternEdge]

    def __post_init__(self):
        k = len(self.attrs)
        for a, b, _ in self.edges:
            if a == b:
                raise ValueError(f"pattern edge {a}->{b} is a self-loop")
            if not (0 <= a < k and 0 <= b < k):
                raise ValueError(
                    f"pattern edge {a}->{b} references a slot outside 0..{k - 1}"
                )
        object.__setattr__(self, "_code", None)

    @property
    def n_slots(self) -> int:
        return len(self.attrs)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def code(self) -> str:
        """Canonical code, cached after first computation."""
        c = self._code
        if c is None:
            c = canonical_code(self)
            object.__setattr__(self, "_code", c)
        return c

    def is_connected(self) -> bool:
        if self.n_slots == 0:
            return False
        adj: List[Set[int]] = [set() for _ in range(self.n_slots)]
        for a, b, _ in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.n_slots

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pattern):
            return NotImplemented
        return self.code == other.code

    def __hash__(self) -> int:
        return hash(self.code)

    def __repr__(self) -> str:
        return f"Pattern({self.code})"


def _serialize(attrs: Sequence[str], edges: Sequence[PatternEdge]) -> str:
    vpart = "|".join(attrs)
    epart = ",".join(f"{a}>{b}:{l}" for a, b, l in sorted(edges))
    return f"v={vpart};e={epart}"


def canonical_code(p: Pattern) -> str:
    """Minimum serialization over all slot permutations.

    Two patterns get the same code iff they are isomorphic respecting
    attributes, edge directions and layers.  Patterns are tiny (at most a
    handful of slots), so scanning every permutation is cheap and avoids
    the usual canonical-ordering subtleties.
    """
    k = len(p.attrs)
    best = None
    for perm in itertools.permutations(range(k)):
        attrs = tuple(p.attrs[_inv(perm, i)] for i in range(k))
        edges = [(perm[a], perm[b], l) for a, b, l in p.edges]
        cand = _serialize(attrs, edges)
        if best is None or cand < best:
            best = cand
    assert best is not None
    return best


def _inv(perm: Sequence[int], i: int) -> int:
    # perm maps old slot -> new slot; find the old slot landing on i.
    return perm.index(i)


def single_edge_pattern(src_attr: str, dst_attr: str, layer: str) -> Pattern:
    return Pattern((src_attr, dst_attr), frozenset({(0, 1, layer)}))


@dataclass(frozen=True)
class Embedding:
    """One injective occurrence of a pattern: slot i maps to nodes[i]."""

    pattern_code: str
    nodes: Tuple[int, ...]


class _Matcher:
    """Backtracking subgraph matcher for one pattern on one host graph.

    Matching is homomorphic on edges (extra host edges are allowed) and
    injective on nodes; attributes, directions and layers must agree.  Every
    candidate node considered counts as one partial state against the
    budget.
    """

    def __init__(self, p: Pattern, g: MultiplexGraph, budget: int):
        self.g = g
        self.budget = budget
        self.states = 0
        self.code = p.code
        k = p.n_slots
        self.k = k
        self.attrs = p.attrs
        self.ok = True
        try:
            edges = [(a, b, g.layer_id(l)) for a, b, l in p.edges]
        except KeyError:
            # A pattern layer the host lacks: no embeddings.
            self.ok = False
            return
        nbr: List[List[Tuple[int, int, bool]]] = [[] for _ in range(k)]
        for a, b, l in edges:
            nbr[a].append((b, l, True))   # slot is the source
            nbr[b].append((a, l, False))  # slot is the target
        # Place well-connected slots first, keeping the prefix connected.
        order: List[int] = []
        placed: Set[int] = set()
        while len(order) < k:
            def score(x: int) -> Tuple[int, int, int]:
                back = sum(1 for o, _, _ in nbr[x] if o in placed)
                return (1 if placed and back else 0, len(nbr[x]), -x)
            rest = [x for x in range(k) if x not in placed]
            nxt = max(rest, key=score)
            order.append(nxt)
            placed.add(nxt)
        self.order = order
        # For each position: constraints against already placed slots.
        pos_of = {s: i for i, s in enumerate(order)}
        self.anchors: List[List[Tuple[int, int, bool]]] = []
        for i, s in enumerate(order):
            self.anchors.append(
                [(pos_of[o], l, out) for o, l, out in nbr[s] if pos_of[o] < i]
            )

    def _spend(self, n: int) -> None:
        self.states += n
        if self.states > self.budget:
            raise MiningBudgetError(self.code, self.budget)

    def _candidates(self, pos: int, image: List[int]) -> List[int]:
        g = self.g
        slot = self.order[pos]
        want = self.attrs[slot]
        anchors = self.anchors[pos]
        if not anchors:
            base: Sequence[int] = g.nodes_by_attr.get(want, ())
            self._spend(len(base))
            return [n for n in base if n not in image]
        sets = []
        for opos, l, out in anchors:
            host = image[opos]
            s = g.in_neighbors(host, l) if out else g.out_neighbors(host, l)
            sets.append(s)
        sets.sort(key=len)
        cand = sets[0]
        for s in sets[1:]:
            cand = cand & s
            if not cand:
                break
        self._spend(len(cand))
        used = set(image)
        return sorted(
            n for n in cand if g.attrs[n] == want and n not in used
        )

    def run(self) -> Iterator[Tuple[int, ...]]:
        if not self.ok:
            return
        yield from self._extend(0, [])

    def _extend(self, pos: int, image: List[int]) -> Iterator[Tuple[int, ...]]:
        if pos == self.k:
            out = [0] * self.k
            for i, s in enumerate(self.order):
                out[s] = image[i]
            yield tuple(out)
            return
        for n in self._candidates(pos, image):
            image.append(n)
            yield from self._extend(pos + 1, image)
            image.pop()


def iter_embeddings(
    p: Pattern, g: MultiplexGraph, budget: int = DEFAULT_BUDGET
) -> Iterator[Tuple[int, ...]]:
    """Stream raw slot-to-node tuples without materializing the list."""
    return _Matcher(p, g, budget).run()


def embeddings(
    p: Pattern, g: MultiplexGraph, budget: int = DEFAULT_BUDGET
) -> List[Embedding]:
    """All embeddings of ``p`` in ``g``, sorted by mapped node tuple."""
    code = p.code
    found = sorted(iter_embeddings(p, g, budget))
    return [Embedding(code, nodes) for nodes in found]


def min_image_support(
    p: Pattern, g: MultiplexGraph, budget: int = DEFAULT_BUDGET
) -> int:
    """Minimum over slots of the number of distinct host images.

    Embeddings are streamed; only the per-slot image sets are kept.
    """
    images: List[Set[int]] = [set() for _ in range(p.n_slots)]
    for nodes in iter_embeddings(p, g, budget):
        for i, n in enumerate(nodes):
            images[i].add(n)
    if not images or not images[0]:
        return 0
    return min(len(s) for s in images)


# -- level-wise mining ------------------------------------------------------


@dataclass
class MinerConfig:
    """Mining parameters: support threshold, size cap, state budget."""

    min_support: int
    max_nodes: int = 4
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.min_support < 1:
            raise ValueError(
                f"support threshold must be >= 1, got {self.min_support}"
            )
        if self.max_nodes < 2:
            raise ValueError(
                f"max pattern size must be >= 2, got {self.max_nodes}"
            )


@dataclass
class MiningStats:
    """Counters filled by :func:`mine` when a sink is passed in."""

    frequent_per_level: List[int] = field(default_factory=list)
    candidates_tested: int = 0
    antimonotone_checks: int = 0
    antimonotone_violations: int = 0
    support_pairs: List[Tuple[int, int]] = field(default_factory=list)


def _frequent_single_edges(
    g: MultiplexGraph, sigma: int
) -> Dict[Tuple[str, str, str], int]:
    """Support of every single-edge pattern present in the host, in one scan.

    For a one-edge pattern the slot images are exactly the distinct sources
    and targets of the matching host edges, so the support is the smaller of
    the two counts.
    """
    srcs: Dict[Tuple[str, str, str], Set[int]] = {}
    dsts: Dict[Tuple[str, str, str], Set[int]] = {}
    ln = g.layer_names
    for u, v, l in g.edges:
        key = (g.attrs[u], g.attrs[v], ln[l])
        srcs.setdefault(key, set()).add(u)
        dsts.setdefault(key, set()).add(v)
    return {
        key: min(len(srcs[key]), len(dsts[key]))
        for key in srcs
        if min(len(srcs[key]), len(dsts[key])) >= sigma
    }


def _grow(
    p: Pattern,
    max_slots: int,
    by_pair: Dict[Tuple[str, str], List[str]],
    by_src: Dict[str, List[Tuple[str, str]]],
    by_dst: Dict[str, List[Tuple[str, str]]],
) -> List[Pattern]:
    """One-edge extensions of ``p`` whose new edge is a frequent edge type.

    Either closes an edge between two existing slots or attaches a brand-new
    slot, mirroring the two growth moves of the search.
    """
    out: List[Pattern] = []
    k = p.n_slots
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            for lay in by_pair.get((p.attrs[i], p.attrs[j]), ()):
                e = (i, j, lay)
                if e not in p.edges:
                    out.append(Pattern(p.attrs, p.edges | {e}))
    if k < max_slots:
        for i in range(k):
            for dst_attr, lay in by_src.get(p.attrs[i], ()):
                out.append(
                    Pattern(p.attrs + (dst_attr,), p.edges | {(i, k, lay)})
                )
            for src_attr, lay in by_dst.get(p.attrs[i], ()):
                out.append(
                    Pattern(p.attrs + (src_attr,), p.edges | {(k, i, lay)})
                )
    return out


# Pool workers inherit the host graph through fork.
_POOL_GRAPH: Optional[MultiplexGraph] = None
_POOL_BUDGET: int = DEFAULT_BUDGET


def _pool_init(g: MultiplexGraph, budget: int) -> None:
    global _POOL_GRAPH, _POOL_BUDGET
    _POOL_GRAPH = g
    _POOL_BUDGET = budget


def _pool_support(p: Pattern) -> int:
    assert _POOL_GRAPH is not None
    return min_image_support(p, _POOL_GRAPH, _POOL_BUDGET)


def mine(
    g: MultiplexGraph,
    cfg: MinerConfig,
    workers: int = 1,
    stats: Optional[MiningStats] = None,
) -> List[Pattern]:
    """Enumerate all frequent patterns up to ``cfg.max_nodes`` slots.

    Level k holds the frequent patterns with k edges.  Children are grown
    one edge at a time from every frequent parent, deduplicated by canonical
    code, counted, and kept when their support reaches the threshold.  The
    support of each child is checked against every parent that produced it;
    a child exceeding a parent's support would contradict the anti-monotone
    support measure and raises immediately.

    Returns the frequent patterns with supports attached, sorted by code.
    """
    sigma = cfg.min_support
    singles = _frequent_single_edges(g, sigma)

    by_pair: Dict[Tuple[str, str], List[str]] = {}
    by_src: Dict[str, List[Tuple[str, str]]] = {}
    by_dst: Dict[str, List[Tuple[str, str]]] = {}
    for (sa, da, lay) in sorted(singles):
        by_pair.setdefault((sa, da), []).append(lay)
        by_src.setdefault(sa, []).append((da, lay))
        by_dst.setdefault(da, []).append((sa, lay))

    supports: Dict[str, int] = {}
    frontier: List[Pattern] = []
    for (sa, da, lay), sup in sorted(singles.items()):
        p = single_edge_pattern(sa, da, lay)
        if p.code not in supports:
            supports[p.code] = sup
            frontier.append(p)
    frontier.sort(key=lambda p: p.code)
    result: List[Pattern] = list(frontier)
    if stats is not None:
        stats.frequent_per_level.append(len(frontier))
        stats.candidates_tested += len(singles)

    pool = None
    if workers > 1:
        ctx = multiprocessing.get_context("fork")
        pool = ctx.Pool(workers, initializer=_pool_init, initargs=(g, cfg.budget))
    try:
        while frontier:
            children: Dict[str, Pattern] = {}
            parents_of: Dict[str, List[int]] = {}
            for p in frontier:
                psup = supports[p.code]
                for child in _grow(p, cfg.max_nodes, by_pair, by_src, by_dst):
                    code = child.code
                    if code in supports:
                        continue  # already counted at an earlier level
                    if code not in children:
                        children[code] = child
                        parents_of[code] = []
                    parents_of[code].append(psup)
            ordered = sorted(children)
            cands = [children[c] for c in ordered]
            if pool is not None:
                sups = pool.map(_pool_support, cands)
            else:
                sups = [min_image_support(p, g, cfg.budget) for p in cands]
            nxt: List[Pattern] = []
            for code, child, sup in zip(ordered, cands, sups):
                if stats is not None:
                    stats.candidates_tested += 1
                    for psup in parents_of[code]:
                        stats.antimonotone_checks += 1
                        stats.support_pairs.append((psup, sup))
                        if sup > psup:
                            stats.antimonotone_violations += 1
                bad = [ps for ps in parents_of[code] if sup > ps]
                if bad:
                    raise MiningInvariantError(
                        f"support of {code!r} ({sup}) exceeds parent support "
                        f"({min(bad)}): anti-monotonicity violated"
                    )
                if sup >= sigma:
                    supports[code] = sup
                    nxt.append(child)
            if stats is not None:
                stats.frequent_per_level.append(len(nxt))
            result.extend(nxt)
            frontier = nxt
    finally:
        if pool is not None:
            pool.close()
            pool.join()

    result.sort(key=lambda p: p.code)
    return [_with_support(p, supports[p.code]) for p in result]


@dataclass(frozen=True, eq=False)
class SupportedPattern(Pattern):
    """A pattern annotated with its minimum image support in the host."""

    support: int = 0


def _with_support(p: Pattern, sup: int) -> SupportedPattern:
    sp = SupportedPattern(p.attrs, p.edges, sup)
    object.__setattr__(sp, "_code", p.code)
    return sp


# -- serialization ----------------------------------------------------------


def pattern_to_dict(p: Pattern) -> dict:
    d = {
        "nodes": list(p.attrs),
        "edges": sorted([a, b, l] for a, b, l in p.edges),
        "code": p.code,
    }
    sup = getattr(p, "support", None)
    if sup is not None:
        d["support"] = sup
    return d


def pattern_from_dict(d: dict) -> Pattern:
    attrs = tuple(d["nodes"])
    edges = frozenset((a, b, l) for a, b, l in d["edges"])
    if "support" in d:
        return SupportedPattern(attrs, edges, d["support"])
    return Pattern(attrs, edges)


def patterns_to_lg(patterns: Sequence[Pattern]) -> str:
    """Render patterns in the plain-text transaction format.

    Each block: ``t # <idx> s <support>``, ``v <slot> <attr>`` lines,
    then ``e <src> <dst> <layer>`` lines.
    """
    lines: List[str] = []
    for idx, p in enumerate(patterns):
        sup = getattr(p, "support", 0)
        lines.append(f"t # {idx} s {sup}")
        for i, a in enumerate(p.attrs):
            lines.append(f"v {i} {a}")
        for a, b, l in sorted(p.edges):
            lines.append(f"e {a} {b} {l}")
    return "\n".join(lines) + "\n"
