"""Shared fixtures and independent brute-force oracles.

The oracles intentionally avoid the library's search machinery: embeddings
come from scanning every injective node tuple, supports from materialized
image sets, AUC from explicit pairwise comparisons.  Library results are
checked against these, never the other way round.
"""

import itertools
import sys
from typing import Dict, Iterable, List, Sequence, Set, Tuple

import numpy as np
import pytest

from mrk.graph import MultiplexGraph
from mrk.miner import Pattern


# -- random hosts -----------------------------------------------------------


def pad_names(n: int, prefix: str = "") -> List[str]:
    width = len(str(n))
    return [f"{prefix}{str(i + 1).zfill(width)}" for i in range(n)]


def rand_host(
    rng: np.random.Generator,
    n: int,
    n_layers: int,
    n_units: int,
    directed: bool,
    attr_values: Sequence[str] = (),
) -> MultiplexGraph:
    """Random multiplex graph with ``n_units`` distinct edge units."""
    names = pad_names(n)
    layers = [f"L{i}" for i in range(n_layers)]
    units: Set[Tuple[str, str, str]] = set()
    cap = n * (n - 1) * n_layers
    if not directed:
        cap //= 2
    n_units = min(n_units, cap)
    while len(units) < n_units:
        u, v = rng.integers(n), rng.integers(n)
        if u == v:
            continue
        if not directed and u > v:
            u, v = v, u
        units.add((names[u], names[v], layers[int(rng.integers(n_layers))]))
    attrs = {}
    if attr_values:
        for name in names:
            attrs[name] = str(rng.choice(list(attr_values)))
    return MultiplexGraph(
        sorted(units), attrs=attrs, directed=directed, extra_nodes=names
    )


# -- embedding / support oracles -------------------------------------------


def oracle_embeddings(p: Pattern, g: MultiplexGraph) -> List[Tuple[int, ...]]:
    """Every injective, structure-preserving slot assignment, by full scan."""
    k = p.n_slots
    try:
        edge_ids = {(a, b, g.layer_id(l)) for a, b, l in p.edges}
    except KeyError:
        return []
    out = []
    for nodes in itertools.permutations(range(g.n_nodes), k):
        if any(g.attrs[nodes[i]] != p.attrs[i] for i in range(k)):
            continue
        if all((nodes[a], nodes[b], l) in g.edges for a, b, l in edge_ids):
            out.append(nodes)
    return sorted(out)


def oracle_mis(p: Pattern, g: MultiplexGraph) -> int:
    embs = oracle_embeddings(p, g)
    if not embs:
        return 0
    images = [set(col) for col in zip(*embs)]
    return min(len(s) for s in images)


def oracle_isomorphic(p1: Pattern, p2: Pattern) -> bool:
    """Attribute/direction/layer-preserving bijection, by brute force."""
    if p1.n_slots != p2.n_slots or len(p1.edges) != len(p2.edges):
        return False
    k = p1.n_slots
    for perm in itertools.permutations(range(k)):
        if any(p1.attrs[i] != p2.attrs[perm[i]] for i in range(k)):
            continue
        mapped = {(perm[a], perm[b], l) for a, b, l in p1.edges}
        if mapped == p2.edges:
            return True
    return False


def oracle_frequent(
    g: MultiplexGraph, sigma: int, max_nodes: int, induced_cap: int = 20
) -> Dict[str, int]:
    """Exhaustive generate-and-filter mining on a small host.

    Every connected sub-multigraph on at most ``max_nodes`` host nodes is
    materialized from host edge subsets, deduplicated by canonical code,
    and kept when its brute-force minimum image support reaches ``sigma``.
    Any frequent pattern has at least one embedding, whose image is such a
    subset, so this enumeration is complete.
    """
    ln = g.layer_names
    by_code: Dict[str, int] = {}
    nodes = range(g.n_nodes)
    for size in range(2, max_nodes + 1):
        for subset in itertools.combinations(nodes, size):
            inside = set(subset)
            triples = [
                (u, v, l) for u, v, l in g.edges if u in inside and v in inside
            ]
            if len(triples) > induced_cap:
                raise AssertionError(
                    f"host too dense for the oracle: {len(triples)} induced"
                )
            pos = {u: i for i, u in enumerate(subset)}
            attrs = tuple(g.attrs[u] for u in subset)
            for r in range(1, len(triples) + 1):
                for chosen in itertools.combinations(triples, r):
                    touched = {pos[u] for u, _, _ in chosen}
                    touched |= {pos[v] for _, v, _ in chosen}
                    if len(touched) != size:
                        continue  # smaller node subsets cover this one
                    p = Pattern(
                        attrs,
                        frozenset((pos[u], pos[v], ln[l]) for u, v, l in chosen),
                    )
                    if not p.is_connected():
                        continue
                    code = p.code
                    if code in by_code:
                        continue
                    sup = oracle_mis(p, g)
                    by_code[code] = sup
    return {c: s for c, s in by_code.items() if s >= sigma}


# -- AUC oracle -------------------------------------------------------------


def oracle_auc(pos: Sequence[float], neg: Sequence[float]) -> float:
    """Pairwise win/tie counting, chunked to bound memory."""
    pos_a = np.asarray(pos, dtype=float)
    neg_a = np.asarray(neg, dtype=float)
    wins = 0.0
    for start in range(0, pos_a.size, 256):
        block = pos_a[start:start + 256, None]
        wins += (block > neg_a[None, :]).sum()
        wins += 0.5 * (block == neg_a[None, :]).sum()
    return wins / (pos_a.size * neg_a.size)


# -- acceptance reporting ---------------------------------------------------


_ACCEPT_LINES: List[str] = []


def accept_line(criterion: int, status: str, detail: str = "") -> None:
    """One line per acceptance criterion.

    Echoed immediately when running uncaptured and repeated in a terminal
    summary section, so the report survives pytest's fd-level capture.
    """
    tail = f" - {detail}" if detail else ""
    line = f"[criterion {criterion:02d}] {status}{tail}"
    _ACCEPT_LINES.append(line)
    print(line, file=sys.__stdout__, flush=True)


def pytest_terminal_summary(terminalreporter) -> None:
    if _ACCEPT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPT_LINES):
            terminalreporter.line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
