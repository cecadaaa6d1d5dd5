"""Link-prediction evaluation: splits, negative candidates, ROC and AUC.

All keys are name triples (src, dst, layer); undirected graphs use the
canonical orientation with src < dst.  Scores for candidates a predictor
never mentions are imputed as 0.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .errors import EvaluationError
from .graph import MultiplexGraph, load_graph
from .predictor import OldNewScoreTable, ScoreTable

log = logging.getLogger(__name__)

_trapezoid = getattr(np, "trapezoid", None) or np.trapz  # numpy < 2.0

Triple = Tuple[str, str, str]

CAT_OLD_OLD = "old-old"
CAT_OLD_NEW = "old-new"
CAT_NEW_NEW = "new-new"


@dataclass
class EvalSplit:
    """One train/test division of a multiplex graph.

    ``train`` is a full graph over the training edges; ``positives`` are
    the held-out edge units, categorized by whether their endpoints exist
    in the training graph.  ``negatives`` is filled by :func:`candidates`
    (or lazily by :func:`roc_auc`, which enumerates everything).
    """

    train: MultiplexGraph
    positives: FrozenSet[Triple]
    categories: Dict[Triple, str]
    layer_universe: Tuple[str, ...]
    directed: bool
    fold: int = 0
    seed: Optional[int] = None
    negatives: Optional[FrozenSet[Triple]] = None

    @property
    def old_nodes(self) -> Tuple[str, ...]:
        return self.train.node_names

    def positives_of(self, category: str) -> List[Triple]:
        return sorted(
            t for t, c in self.categories.items() if c == category
        )


def _canon(u: str, v: str, lay: str, directed: bool) -> Triple:
    if not directed and u > v:
        u, v = v, u
    return (u, v, lay)


def _build_split(
    g: MultiplexGraph,
    train_units: Sequence[Triple],
    test_units: Iterable[Triple],
    fold: int,
    seed: Optional[int],
) -> EvalSplit:
    attrs = g.attr_map()
    train = MultiplexGraph(train_units, attrs=attrs, directed=g.directed)
    positives = frozenset(
        _canon(u, v, l, g.directed) for u, v, l in test_units
    )
    cats: Dict[Triple, str] = {}
    for u, v, l in positives:
        known = train.has_node(u) + train.has_node(v)
        cats[(u, v, l)] = (CAT_NEW_NEW, CAT_OLD_NEW, CAT_OLD_OLD)[known]
    return EvalSplit(
        train=train,
        positives=positives,
        categories=cats,
        layer_universe=g.layer_names,
        directed=g.directed,
        fold=fold,
        seed=seed,
    )


def split_random(
    g: MultiplexGraph, folds: int = 10, seed: int = 0
) -> List[EvalSplit]:
    """Partition the edge units into ``folds`` disjoint test sets.

    Undirected graphs split on canonical pairs so both orientations of an
    edge leave the training graph together.  Folds differ in size by at
    most one unit.
    """
    if folds < 2:
        raise EvaluationError(f"need at least 2 folds, got {folds}")
    units = g.unit_triples()
    if len(units) < folds:
        raise EvaluationError(
            f"cannot make {folds} folds from {len(units)} edge units"
        )
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(units))
    splits = []
    for fold, idx in enumerate(np.array_split(perm, folds)):
        test_set = {units[i] for i in idx}
        train_units = [u for u in units if u not in test_set]
        splits.append(_build_split(g, train_units, test_set, fold, seed))
    return splits


def split_from_graphs(
    train_g: MultiplexGraph, test_g: MultiplexGraph
) -> EvalSplit:
    """Temporal split: positives are test edges absent from training.

    The layer universe is the union of both snapshots' layers.
    """
    if train_g.directed != test_g.directed:
        raise EvaluationError("train and test graphs disagree on directedness")
    train_units = train_g.unit_triples()
    known = set(train_units)
    test_units = [t for t in test_g.unit_triples() if t not in known]
    split = _build_split(train_g, train_units, test_units, 0, None)
    split.layer_universe = tuple(
        sorted(set(train_g.layer_names) | set(test_g.layer_names))
    )
    return split


def load_temporal(
    train_path: str,
    test_path: str,
    directed: bool = True,
    comune: bool = False,
    attr_path: Optional[str] = None,
) -> EvalSplit:
    train_g = load_graph(train_path, attr_path, directed=directed, comune=comune)
    test_g = load_graph(test_path, attr_path, directed=directed, comune=comune)
    return split_from_graphs(train_g, test_g)


# -- negative candidates ----------------------------------------------------


def _pair_count(n: int, directed: bool) -> int:
    return n * (n - 1) if directed else n * (n - 1) // 2


def candidates(
    split: EvalSplit,
    mode: str = "full",
    k: Optional[int] = None,
    seed: Optional[int] = None,
) -> FrozenSet[Triple]:
    """Negative candidates: old-node pairs on any layer, known absent.

    ``full`` enumerates every (pair, layer) combination over the training
    node set that is neither a training edge nor a held-out positive.
    ``sampled`` draws ``k`` distinct such combinations uniformly; ``k``
    larger than the population falls back to full enumeration with a
    warning.
    """
    nodes = split.old_nodes
    layers = split.layer_universe
    n = len(nodes)
    train_units = set(split.train.unit_triples())
    pos = split.positives
    population = (
        _pair_count(n, split.directed) * len(layers)
        - len(train_units)
        - sum(1 for t, c in split.categories.items() if c == CAT_OLD_OLD)
    )

    def all_triples() -> Iterable[Triple]:
        for lay in layers:
            for i in range(n):
                for j in range(n):
                    if i == j or (not split.directed and i > j):
                        continue
                    t = (nodes[i], nodes[j], lay)
                    if t not in train_units and t not in pos:
                        yield t

    if mode == "full":
        return frozenset(all_triples())
    if mode != "sampled":
        raise EvaluationError(f"unknown candidate mode {mode!r}")
    if k is None or k < 1:
        raise EvaluationError("sampled mode needs a positive sample size k")
    if k >= population:
        log.warning(
            "sample size %d covers the whole population of %d negatives; "
            "falling back to full enumeration", k, population,
        )
        return frozenset(all_triples())
    rng = np.random.default_rng(seed)
    out: Set[Triple] = set()
    while len(out) < k:
        i = int(rng.integers(n))
        j = int(rng.integers(n))
        l = int(rng.integers(len(layers)))
        if i == j:
            continue
        if not split.directed and i > j:
            i, j = j, i
        t = (nodes[i], nodes[j], layers[l])
        if t in train_units or t in pos or t in out:
            continue
        out.add(t)
    return frozenset(out)


# -- ROC and AUC ------------------------------------------------------------


def mann_whitney_auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """AUC as the tie-corrected rank statistic.

    Equals the probability that a random positive outscores a random
    negative, ties counting half.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=bool)
    n_pos = int(labels.sum())
    n_neg = int(labels.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise EvaluationError("AUC needs at least one positive and one negative")
    order = np.argsort(scores, kind="mergesort")
    s = scores[order]
    ranks = np.empty(scores.size, dtype=float)
    # Average ranks over tie groups (1-based).
    _, inv, counts = np.unique(s, return_inverse=True, return_counts=True)
    ends = np.cumsum(counts)
    starts = ends - counts
    avg = (starts + ends + 1) / 2.0
    ranks[order] = avg[inv]
    r_pos = ranks[labels].sum()
    return (r_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


@dataclass
class EvalReport:
    """ROC points, area, and the counts behind them.

    ``raw`` keeps the (scores, labels) arrays so several folds can be
    pooled into one curve; it stays out of the serialized form.
    """

    predictor: str
    auc: float
    n_pos: int
    n_neg: int
    roc: List[Tuple[float, float, float]]  # (fpr, tpr, threshold)
    fold: int = 0
    old_new: bool = False
    raw: Optional[Tuple[np.ndarray, np.ndarray]] = field(
        default=None, repr=False
    )

    def to_dict(self) -> dict:
        return {
            "predictor": self.predictor,
            "auc": self.auc,
            "n_pos": self.n_pos,
            "n_neg": self.n_neg,
            "fold": self.fold,
            "old_new": self.old_new,
        }

    def roc_csv(self) -> str:
        lines = ["fpr,tpr,threshold"]
        for fpr, tpr, thr in self.roc:
            lines.append(f"{fpr!r},{tpr!r},{thr!r}")
        return "\n".join(lines) + "\n"


def _roc_points(
    scores: np.ndarray, labels: np.ndarray
) -> List[Tuple[float, float, float]]:
    """ROC curve with one point per distinct score, descending.

    Tied scores collapse into a single point, giving the diagonal segment
    a random tie-break would average over.
    """
    order = np.argsort(-scores, kind="mergesort")
    s = scores[order]
    y = labels[order].astype(float)
    tp = np.cumsum(y)
    fp = np.cumsum(1.0 - y)
    # Last index of each tie group.
    distinct = np.nonzero(np.diff(s))[0]
    idx = np.r_[distinct, s.size - 1]
    n_pos, n_neg = tp[-1], fp[-1]
    pts = [(0.0, 0.0, float("inf"))]
    for i in idx:
        pts.append((float(fp[i] / n_neg), float(tp[i] / n_pos), float(s[i])))
    return pts


def _score_arrays(
    get_score, positives: Sequence, negatives: Sequence
) -> Tuple[np.ndarray, np.ndarray]:
    keys = list(positives) + list(negatives)
    scores = np.array([get_score(k) for k in keys], dtype=float)
    labels = np.zeros(len(keys), dtype=bool)
    labels[: len(positives)] = True
    return scores, labels


def roc_auc(
    table: ScoreTable,
    split: EvalSplit,
    negatives: Optional[Iterable[Triple]] = None,
    predictor: Optional[str] = None,
) -> EvalReport:
    """Evaluate a link score table on one split.

    Positives are the split's held-out old-old edges (both endpoints known
    to the predictor); negatives default to the split's candidate set,
    enumerating it in full if absent.  The area is the trapezoid rule over
    the tie-grouped ROC, identical to the rank-statistic AUC.
    """
    pos = split.positives_of(CAT_OLD_OLD)
    if negatives is None:
        negatives = split.negatives
    if negatives is None:
        negatives = candidates(split, "full")
    neg = sorted(negatives)
    if not pos or not neg:
        raise EvaluationError(
            f"fold {split.fold}: need positives and negatives "
            f"(got {len(pos)} / {len(neg)})"
        )
    scores, labels = _score_arrays(table.score_of, pos, neg)
    pts = _roc_points(scores, labels)
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    auc = float(_trapezoid(ys, xs))
    return EvalReport(
        predictor=predictor or table.scheme,
        auc=auc,
        n_pos=len(pos),
        n_neg=len(neg),
        roc=pts,
        fold=split.fold,
        raw=(scores, labels),
    )


def evaluate_old_new(
    table: OldNewScoreTable,
    split: EvalSplit,
    predictor: Optional[str] = None,
) -> EvalReport:
    """Evaluate new-neighbor prediction on one split.

    Each old-new positive reduces to its known endpoint: the slot
    (node, layer, direction) gains an edge to a node unseen in training.
    Negatives are all other slots over old nodes, layers, and directions.
    """
    dirs = ("out", "in") if split.directed else ("out",)
    pos_keys: Set[Tuple[str, str, str]] = set()
    for u, v, lay in split.positives_of(CAT_OLD_NEW):
        if split.train.has_node(u):
            old, direction = u, "out"
        else:
            old, direction = v, "in"
        if not split.directed:
            direction = "out"
        pos_keys.add((old, lay, direction))
    if not pos_keys:
        raise EvaluationError(
            f"fold {split.fold}: no old-new positives to evaluate"
        )
    neg_keys = [
        (u, lay, d)
        for u in split.old_nodes
        for lay in split.layer_universe
        for d in dirs
        if (u, lay, d) not in pos_keys
    ]
    pos = sorted(pos_keys)
    scores, labels = _score_arrays(
        lambda k: table.scores.get(k, 0.0), pos, neg_keys
    )
    pts = _roc_points(scores, labels)
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    auc = float(_trapezoid(ys, xs))
    return EvalReport(
        predictor=predictor or table.scheme,
        auc=auc,
        n_pos=len(pos),
        n_neg=len(neg_keys),
        roc=pts,
        fold=split.fold,
        old_new=True,
        raw=(scores, labels),
    )


def pooled_auc(reports: Sequence[EvalReport]) -> Optional[float]:
    """AUC of all folds' scored candidates thrown on one pile."""
    raws = [r.raw for r in reports if r.raw is not None]
    if not raws:
        return None
    scores = np.concatenate([s for s, _ in raws])
    labels = np.concatenate([l for _, l in raws])
    return mann_whitney_auc(scores, labels)


def summary_dict(reports: Sequence[EvalReport]) -> dict:
    """Cross-fold summary: per-fold AUCs, their mean (the headline
    number), spread, and the pooled-curve AUC."""
    aucs = [r.auc for r in reports]
    return {
        "predictor": reports[0].predictor if reports else "",
        "folds": len(reports),
        "auc_mean": float(np.mean(aucs)) if aucs else None,
        "auc_std": float(np.std(aucs)) if aucs else None,
        "auc_pooled": pooled_auc(reports),
        "per_fold": [r.to_dict() for r in reports],
    }
