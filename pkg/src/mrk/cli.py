"""Command-line front end.

Every writing subcommand produces its output atomically and drops a JSON
manifest next to it recording the command, resolved parameters, input file
digests, seed, tool version, and stage timings.  All flags can be supplied
through MRK_-prefixed environment variables.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import click

from . import __version__
from .baselines import (
    CLASSICAL_METHODS,
    classical_on_multiplex,
    ensemble,
    sharma_scores,
)
from .errors import MrkError
from .evaluation import (
    EvalReport,
    EvalSplit,
    candidates,
    evaluate_old_new,
    load_temporal,
    roc_auc,
    split_random,
    summary_dict,
)
from .graph import (
    ATTR_DEFAULT,
    CoupledMultigraph,
    MultiplexGraph,
    from_coupled,
    load_graph,
    to_coupled,
    write_attr_file,
    write_edge_file,
)
from .miner import (
    DEFAULT_BUDGET,
    MinerConfig,
    mine,
    pattern_from_dict,
    pattern_to_dict,
    patterns_to_lg,
)
from .predictor import (
    WEIGHTING_SCHEMES,
    score_links,
    score_old_new,
    write_old_new_csv,
    write_scores_csv,
)
from .rules import Rule, build_rules, rule_from_dict, rule_to_dict
from .synth import SynthConfig, generate

PREDICTORS = (
    "rules", "sharma", "cn", "aa", "ra", "pa", "ja",
    "ensemble-base", "ensemble-over",
)

CTX = {"auto_envvar_prefix": "MRK", "help_option_names": ["-h", "--help"]}


# -- manifest and atomic output ---------------------------------------------


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Reproducibility record written alongside every output artifact."""

    command: str
    params: Dict[str, object]
    seed: Optional[int] = None
    inputs: Dict[str, str] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    version: str = __version__

    def add_input(self, path: str) -> None:
        self.inputs[path] = _sha256(path)

    def add_output(self, path: str) -> None:
        self.outputs[path] = _sha256(path)

    def write(self, path: str) -> None:
        doc = {
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "timings": {k: round(v, 6) for k, v in self.timings.items()},
            "version": self.version,
        }
        _atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _atomic_write_text(path: str, text: str) -> None:
    """Write via a sibling temp file so failures never leave partial output."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class _Stage:
    """Context helper collecting wall-clock stage timings."""

    def __init__(self, manifest: RunManifest):
        self.manifest = manifest

    def __call__(self, name: str):
        return _StageTimer(self.manifest, name)


class _StageTimer:
    def __init__(self, manifest: RunManifest, name: str):
        self.manifest = manifest
        self.name = name

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.manifest.timings[self.name] = time.perf_counter() - self.t0
        return False


def _load(
    edge_path: str, attr_path: Optional[str], directed: bool, comune: bool
) -> MultiplexGraph:
    return load_graph(edge_path, attr_path, directed=directed, comune=comune)


def _write_patterns(patterns, path: str, fmt: str) -> None:
    if fmt == "lg":
        _atomic_write_text(path, patterns_to_lg(patterns))
    else:
        doc = [pattern_to_dict(p) for p in patterns]
        _atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _read_rules(path: str) -> List[Rule]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return [rule_from_dict(d) for d in doc]


def _miner_config(sigma: int, max_nodes: int, budget: int) -> MinerConfig:
    try:
        return MinerConfig(min_support=sigma, max_nodes=max_nodes, budget=budget)
    except ValueError as exc:
        raise MrkError(str(exc))


def _atomic_csv(path: str, writer_fn) -> None:
    """Run a CSV-writing function against a temp path, then move it in."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    os.close(fd)
    try:
        writer_fn(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- shared options ---------------------------------------------------------


def _graph_options(fn):
    fn = click.option(
        "--attrs", "attr_path", type=click.Path(exists=True, dir_okay=False),
        default=None, help="Optional node attribute file.",
    )(fn)
    fn = click.option(
        "--directed/--undirected", "directed", default=False,
        help="Edge semantics of the input (default undirected).",
    )(fn)
    fn = click.option(
        "--comune", is_flag=True, default=False,
        help="Input lines are 'layer src dst [weight]'.",
    )(fn)
    return fn


@click.group(context_settings=CTX)
@click.version_option(__version__, prog_name="mrk")
def main():
    """Multiplex pattern mining, association rules, and link prediction."""


# -- mine -------------------------------------------------------------------


@main.command("mine", context_settings=CTX)
@click.option("--input", "edge_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@_graph_options
@click.option("--support", "sigma", type=int, default=None,
              help="Support threshold; default: smallest layer's node count.")
@click.option("--max-size", "max_nodes", type=int, default=4, show_default=True,
              help="Pattern size cap in nodes.")
@click.option("--budget", type=int, default=DEFAULT_BUDGET, show_default=True,
              help="Embedding enumeration budget per pattern.")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "lg"]),
              default="json", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def mine_cmd(edge_path, attr_path, directed, comune, sigma, max_nodes,
             budget, workers, fmt, out_path):
    """Mine frequent multiplex patterns from an edge file."""
    manifest = RunManifest(
        command="mine",
        params={
            "input": edge_path, "attrs": attr_path, "directed": directed,
            "comune": comune, "support": sigma, "max_size": max_nodes,
            "budget": budget, "workers": workers, "format": fmt,
            "out": out_path,
        },
    )
    manifest.add_input(edge_path)
    if attr_path:
        manifest.add_input(attr_path)
    stage = _Stage(manifest)
    with stage("load"):
        g = _load(edge_path, attr_path, directed, comune)
    if sigma is None:
        sigma = max(g.smallest_layer_size(), 1)
        manifest.params["support"] = sigma
    with stage("mine"):
        cfg = _miner_config(sigma, max_nodes, budget)
        patterns = mine(g, cfg, workers=workers)
    with stage("write"):
        _write_patterns(patterns, out_path, fmt)
    manifest.add_output(out_path)
    manifest.write(out_path + ".manifest.json")
    click.echo(f"{len(patterns)} frequent patterns (support >= {sigma})")


# -- rules ------------------------------------------------------------------


@main.command("rules", context_settings=CTX)
@click.option("--input", "edge_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@_graph_options
@click.option("--patterns", "patterns_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--min-conf", type=float, default=0.0, show_default=True)
@click.option("--min-lift", type=float, default=None)
@click.option("--layer", "layer_filter", default=None,
              help="Keep only rules predicting an edge on this layer.")
@click.option("--out", "out_path", required=True, type=click.Path())
def rules_cmd(edge_path, attr_path, directed, comune, patterns_path,
              min_conf, min_lift, layer_filter, out_path):
    """Build association rules from a mined pattern file."""
    manifest = RunManifest(
        command="rules",
        params={
            "input": edge_path, "attrs": attr_path, "directed": directed,
            "comune": comune, "patterns": patterns_path,
            "min_conf": min_conf, "min_lift": min_lift,
            "layer": layer_filter, "out": out_path,
        },
    )
    manifest.add_input(edge_path)
    manifest.add_input(patterns_path)
    if attr_path:
        manifest.add_input(attr_path)
    stage = _Stage(manifest)
    with stage("load"):
        g = _load(edge_path, attr_path, directed, comune)
        with open(patterns_path, "r", encoding="utf-8") as fh:
            patterns = [pattern_from_dict(d) for d in json.load(fh)]
    with stage("rules"):
        rs = build_rules(patterns, g, min_conf=min_conf, min_lift=min_lift)
        if layer_filter is not None:
            rs = [r for r in rs if r.delta_edge[2] == layer_filter]
    with stage("write"):
        doc = [rule_to_dict(r) for r in rs]
        _atomic_write_text(
            out_path, json.dumps(doc, indent=2, sort_keys=True) + "\n"
        )
    manifest.add_output(out_path)
    manifest.write(out_path + ".manifest.json")
    click.echo(f"{len(rs)} rules")


# -- predict ----------------------------------------------------------------


@main.command("predict", context_settings=CTX)
@click.option("--graph", "edge_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@_graph_options
@click.option("--rules", "rules_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--weighting", type=click.Choice(WEIGHTING_SCHEMES),
              default="conf", show_default=True)
@click.option("--per-embedding", is_flag=True, default=False,
              help="Count every embedding instead of each rule once.")
@click.option("--old-new", "old_new", is_flag=True, default=False,
              help="Score (node, layer, direction) slots for links to "
                   "unseen nodes instead of node pairs.")
@click.option("--budget", type=int, default=DEFAULT_BUDGET, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def predict_cmd(edge_path, attr_path, directed, comune, rules_path, weighting,
                per_embedding, old_new, budget, out_path):
    """Apply rules to a graph and write a score table."""
    manifest = RunManifest(
        command="predict",
        params={
            "graph": edge_path, "attrs": attr_path, "directed": directed,
            "comune": comune, "rules": rules_path, "weighting": weighting,
            "per_embedding": per_embedding, "old_new": old_new,
            "budget": budget, "out": out_path,
        },
    )
    manifest.add_input(edge_path)
    manifest.add_input(rules_path)
    if attr_path:
        manifest.add_input(attr_path)
    stage = _Stage(manifest)
    with stage("load"):
        g = _load(edge_path, attr_path, directed, comune)
        rs = _read_rules(rules_path)
    with stage("score"):
        if old_new:
            table = score_old_new(
                g, rs, weighting, per_embedding=per_embedding, budget=budget
            )
        else:
            table = score_links(
                g, rs, weighting, per_embedding=per_embedding, budget=budget
            )
    with stage("write"):
        writer = write_old_new_csv if old_new else write_scores_csv
        _atomic_csv(out_path, lambda tmp: writer(table, tmp))
    manifest.add_output(out_path)
    manifest.write(out_path + ".manifest.json")
    click.echo(f"{len(table.scores)} scored candidates")


# -- baseline ---------------------------------------------------------------


@main.command("baseline", context_settings=CTX)
@click.option("--graph", "edge_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@_graph_options
@click.option("--method", required=True,
              type=click.Choice(("sharma",) + CLASSICAL_METHODS))
@click.option("--out", "out_path", required=True, type=click.Path())
def baseline_cmd(edge_path, attr_path, directed, comune, method, out_path):
    """Run a baseline predictor (classical methods collapse the layers)."""
    manifest = RunManifest(
        command="baseline",
        params={
            "graph": edge_path, "attrs": attr_path, "directed": directed,
            "comune": comune, "method": method, "out": out_path,
        },
    )
    manifest.add_input(edge_path)
    if attr_path:
        manifest.add_input(attr_path)
    stage = _Stage(manifest)
    with stage("load"):
        g = _load(edge_path, attr_path, directed, comune)
    with stage("score"):
        if method == "sharma":
            table = sharma_scores(g)
        else:
            table = classical_on_multiplex(g, method)
    with stage("write"):
        _atomic_csv(out_path, lambda tmp: write_scores_csv(table, tmp))
    manifest.add_output(out_path)
    manifest.write(out_path + ".manifest.json")
    click.echo(f"{len(table.scores)} scored candidates")


# -- evaluate ---------------------------------------------------------------


def _fold_tables(
    g: MultiplexGraph,
    predictor: str,
    weighting: str,
    sigma: int,
    max_nodes: int,
    budget: int,
    workers: int,
):
    """Build the score table(s) a predictor needs on one training graph."""
    if predictor == "rules":
        cfg = _miner_config(sigma, max_nodes, budget)
        patterns = mine(g, cfg, workers=workers)
        rs = build_rules(patterns, g)
        return score_links(g, rs, weighting, budget=budget)
    if predictor == "sharma":
        return sharma_scores(g)
    if predictor in CLASSICAL_METHODS:
        return classical_on_multiplex(g, predictor)
    raise MrkError(f"unknown predictor {predictor!r}")


def _parse_negatives(spec: str) -> Tuple[str, Optional[int]]:
    if spec == "full":
        return "full", None
    if spec.startswith("sampled:"):
        try:
            k = int(spec.split(":", 1)[1])
        except ValueError:
            raise MrkError(f"bad sample size in --negatives {spec!r}")
        return "sampled", k
    raise MrkError(f"--negatives must be 'full' or 'sampled:K', got {spec!r}")


@main.command("evaluate", context_settings=CTX)
@click.option("--input", "edge_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@_graph_options
@click.option("--test-input", "test_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="Later snapshot: temporal split instead of random folds.")
@click.option("--predictor", type=click.Choice(PREDICTORS), default="rules",
              show_default=True)
@click.option("--folds", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--negatives", default="full", show_default=True,
              help="'full' or 'sampled:K'.")
@click.option("--support", "sigma", type=int, default=None,
              help="Mining support; default: smallest layer's node count.")
@click.option("--max-size", "max_nodes", type=int, default=4, show_default=True)
@click.option("--weighting", type=click.Choice(WEIGHTING_SCHEMES),
              default="conf", show_default=True)
@click.option("--old-new", "old_new", is_flag=True, default=False,
              help="Evaluate old-new slot prediction instead of links.")
@click.option("--budget", type=int, default=DEFAULT_BUDGET, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out-dir", "out_dir", required=True, type=click.Path())
def evaluate_cmd(edge_path, attr_path, directed, comune, test_path, predictor,
                 folds, seed, negatives, sigma, max_nodes, weighting, old_new,
                 budget, workers, out_dir):
    """Cross-validate a predictor; write per-fold ROC CSVs and a summary."""
    manifest = RunManifest(
        command="evaluate",
        seed=seed,
        params={
            "input": edge_path, "attrs": attr_path, "directed": directed,
            "comune": comune, "test_input": test_path, "predictor": predictor,
            "folds": folds, "seed": seed, "negatives": negatives,
            "support": sigma, "max_size": max_nodes, "weighting": weighting,
            "old_new": old_new, "budget": budget, "workers": workers,
            "out_dir": out_dir,
        },
    )
    manifest.add_input(edge_path)
    if attr_path:
        manifest.add_input(attr_path)
    if test_path:
        manifest.add_input(test_path)
    neg_mode, neg_k = _parse_negatives(negatives)
    stage = _Stage(manifest)
    with stage("load"):
        g = _load(edge_path, attr_path, directed, comune)
        if test_path:
            splits = [load_temporal(edge_path, test_path,
                                    directed=directed, comune=comune,
                                    attr_path=attr_path)]
        else:
            splits = split_random(g, folds=folds, seed=seed)
    if sigma is None:
        sigma = max(g.smallest_layer_size(), 1)
        manifest.params["support"] = sigma
    reports: List[EvalReport] = []
    with stage("evaluate"):
        for split in splits:
            reports.append(
                _evaluate_fold(
                    split, predictor, weighting, sigma, max_nodes,
                    budget, workers, neg_mode, neg_k, seed, old_new,
                )
            )
    with stage("write"):
        os.makedirs(out_dir, exist_ok=True)
        for r in reports:
            roc_path = os.path.join(out_dir, f"roc_fold{r.fold:02d}.csv")
            _atomic_write_text(roc_path, r.roc_csv())
            manifest.add_output(roc_path)
        summary = summary_dict(reports)
        sum_path = os.path.join(out_dir, "summary.json")
        _atomic_write_text(
            sum_path, json.dumps(summary, indent=2, sort_keys=True) + "\n"
        )
        manifest.add_output(sum_path)
    manifest.write(os.path.join(out_dir, "manifest.json"))
    mean = summary["auc_mean"]
    click.echo(f"{predictor}: mean AUC {mean:.4f} over {len(reports)} fold(s)")


def _evaluate_fold(
    split: EvalSplit,
    predictor: str,
    weighting: str,
    sigma: int,
    max_nodes: int,
    budget: int,
    workers: int,
    neg_mode: str,
    neg_k: Optional[int],
    seed: int,
    old_new: bool,
) -> EvalReport:
    train = split.train
    if old_new:
        if predictor != "rules":
            raise MrkError("old-new evaluation only applies to --predictor rules")
        cfg = _miner_config(sigma, max_nodes, budget)
        patterns = mine(train, cfg, workers=workers)
        rs = build_rules(patterns, train)
        table = score_old_new(train, rs, weighting, budget=budget)
        return evaluate_old_new(table, split, predictor=predictor)
    split.negatives = candidates(split, neg_mode, k=neg_k, seed=seed)
    if predictor.startswith("ensemble-"):
        mode = predictor.split("-", 1)[1]
        parts = [
            _fold_tables(train, p, weighting, sigma, max_nodes, budget, workers)
            for p in ("rules", "sharma") + CLASSICAL_METHODS
        ]
        pos = split.positives_of("old-old")
        keys = list(pos) + sorted(split.negatives)
        table = ensemble(parts, keys, pos, mode=mode, seed=seed)
    else:
        table = _fold_tables(
            train, predictor, weighting, sigma, max_nodes, budget, workers
        )
    return roc_auc(table, split, predictor=predictor)


# -- gen-synth --------------------------------------------------------------


def _float_list(text: str) -> Sequence[float]:
    parts = [p for p in text.split(",") if p]
    vals = [float(p) for p in parts]
    return vals[0] if len(vals) == 1 else vals


def _parse_backbone(text: str) -> tuple:
    if ";" in text:
        return tuple(
            tuple(int(s) for s in part.split(",") if s)
            for part in text.split(";") if part
        )
    return tuple(int(s) for s in text.split(",") if s)


@main.command("gen-synth", context_settings=CTX)
@click.option("--sizes", default="200,150,100,50", show_default=True,
              help="Comma-separated layer node counts, non-increasing.")
@click.option("--communities", type=int, default=4, show_default=True)
@click.option("--pin", default="0.3", show_default=True,
              help="Intra-community probability (one value or one per layer).")
@click.option("--pout", default="0.02", show_default=True,
              help="Inter-community probability (one value or one per layer).")
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--backbone", default="", show_default=True,
              help="Comma-separated circulant steps planted inside every "
                   "community block (e.g. 1,2); semicolons separate "
                   "per-layer step groups (e.g. 1,2;3,6); empty for none.")
@click.option("--out", "out_path", required=True, type=click.Path())
def gen_synth_cmd(sizes, communities, pin, pout, seed, backbone, out_path):
    """Generate a planted-partition multiplex benchmark."""
    manifest = RunManifest(
        command="gen-synth",
        seed=seed,
        params={
            "sizes": sizes, "communities": communities, "pin": pin,
            "pout": pout, "seed": seed, "backbone": backbone,
            "out": out_path,
        },
    )
    stage = _Stage(manifest)
    with stage("generate"):
        try:
            cfg = SynthConfig(
                layer_sizes=tuple(int(s) for s in sizes.split(",") if s),
                communities=communities,
                p_in=_float_list(pin),
                p_out=_float_list(pout),
                seed=seed,
                backbone=_parse_backbone(backbone),
            )
        except ValueError as exc:
            raise MrkError(str(exc))
        g = generate(cfg)
    with stage("write"):
        _atomic_csv(out_path, lambda tmp: write_edge_file(g, tmp))
    manifest.add_output(out_path)
    manifest.write(out_path + ".manifest.json")
    click.echo(
        f"{g.n_nodes} nodes, {len(g.unit_triples())} edges, "
        f"{g.n_layers} layers"
    )


# -- transform --------------------------------------------------------------


@main.command("transform", context_settings=CTX)
@click.option("--input", "edge_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@_graph_options
@click.option("--to", "target", required=True,
              type=click.Choice(["coupled", "multiplex"]),
              help="coupled: encode; multiplex: decode a coupled pair.")
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Edge file target; attributes land at <out>.attrs.")
def transform_cmd(edge_path, attr_path, directed, comune, target, out_path):
    """Convert between a multiplex graph and its coupled encoding."""
    manifest = RunManifest(
        command="transform",
        params={
            "input": edge_path, "attrs": attr_path, "directed": directed,
            "comune": comune, "to": target, "out": out_path,
        },
    )
    manifest.add_input(edge_path)
    if attr_path:
        manifest.add_input(attr_path)
    stage = _Stage(manifest)
    attrs_out = out_path + ".attrs"
    with stage("transform"):
        if target == "coupled":
            g = _load(edge_path, attr_path, directed, comune)
            if any(a != ATTR_DEFAULT for a in g.attrs):
                click.echo(
                    "note: node attributes do not survive the coupled "
                    "encoding; the replica attribute carries the layer",
                    err=True,
                )
            cg = to_coupled(g)
            out_g = cg.graph
        else:
            inner = load_graph(edge_path, attr_path, directed=True,
                               comune=comune)
            out_g = from_coupled(
                CoupledMultigraph(inner, source_directed=directed)
            )
    with stage("write"):
        _atomic_csv(out_path, lambda tmp: write_edge_file(out_g, tmp))
        _atomic_csv(attrs_out, lambda tmp: write_attr_file(out_g, tmp))
    manifest.add_output(out_path)
    manifest.add_output(attrs_out)
    manifest.write(out_path + ".manifest.json")
    click.echo(
        f"{out_g.n_nodes} nodes, {len(out_g.unit_triples())} edges, "
        f"{out_g.n_layers} layers"
    )


# -- inspect ----------------------------------------------------------------


@main.command("inspect", context_settings=CTX)
@click.option("--rules", "rules_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--min-lift", type=float, default=None)
@click.option("--min-conf", type=float, default=None)
@click.option("--layer", "layer_filter", default=None)
@click.option("--new-node/--no-new-node", "new_node", default=None,
              help="Keep only rules with (or without) a fresh node slot.")
@click.option("--limit", type=int, default=None,
              help="Print at most this many rules.")
def inspect_cmd(rules_path, min_lift, min_conf, layer_filter, new_node, limit):
    """List rules sorted by lift, highest first."""
    rs = _read_rules(rules_path)
    if min_lift is not None:
        rs = [r for r in rs if r.lift >= min_lift]
    if min_conf is not None:
        rs = [r for r in rs if r.confidence >= min_conf]
    if layer_filter is not None:
        rs = [r for r in rs if r.delta_edge[2] == layer_filter]
    if new_node is not None:
        rs = [r for r in rs if r.new_node == new_node]
    rs.sort(key=lambda r: (-(r.lift if r.lift == r.lift else -1),
                           r.antecedent.code, r.consequent.code))
    if limit is not None:
        rs = rs[:limit]
    for r in rs:
        lift = "nan" if r.lift != r.lift else f"{r.lift:.3f}"
        kind = "new-node" if r.new_node else "close"
        click.echo(
            f"lift={lift} conf={r.confidence:.3f} [{kind}] "
            f"{r.antecedent.code}  =>  {r.consequent.code}  "
            f"+({r.delta_edge[0]}>{r.delta_edge[1]}:{r.delta_edge[2]})"
        )
    click.echo(f"{len(rs)} rule(s)", err=True)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Programmatic entry point returning the exit status."""
    try:
        main.main(args=list(argv) if argv is not None else None,
                  standalone_mode=False)
        return 0
    except MrkError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Abort:
        return 130


def entry() -> None:
    """Console-script shim."""
    sys.exit(run())


if __name__ == "__main__":
    entry()
