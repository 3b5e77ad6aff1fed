"""Command-line pipeline driver.

Subcommands: embed (network file -> embedding TSV), simulate (synthetic
multilayer networks to disk), evaluate (clustering / classification / MSD
reports from an embedding), oracle-check (walk engine vs closed-form
co-occurrence limits), sweep (seeded replication grids).  Every run writes
a JSON manifest recording parameters, paths, timestamps, and per-phase
wall-clock.  Exit codes: 0 success, 2 input error, 3 numeric failure,
4 resource cap.
"""

from __future__ import annotations

import argparse
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, evaluation, fileio
from .factorization import (
    ResourceCapError,
    edge_stationary,
    empirical_cooccurrence,
    limit_matrix_general,
    second_order_kernel,
)
from .generators import (
    PlantedPartitionSpec,
    add_noise_layers,
    average_edge_density,
    gen_multilayer_er,
    gen_planted_partition,
)
from .graph import EXPLICIT_COUPLING, IDENTITY_COUPLING, adjusted_aggregate
from .skipgram import SkipGramConfig, train
from .walks import NeighborhoodCorpus, WalkConfig, generate_corpus, sample_walk, walk_substream, write_corpus

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_RESOURCE = 4


@dataclass
class RunManifest:
    """Reproducibility record written next to every produced artifact."""

    subcommand: str
    parameters: dict
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    started_at: str = ""
    finished_at: str = ""
    phase_seconds: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    package_version: str = __version__

    def write(self, path) -> None:
        payload = {
            "subcommand": self.subcommand,
            "parameters": self.parameters,
            "inputs": [str(p) for p in self.inputs],
            "outputs": [str(p) for p in self.outputs],
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "phase_seconds": self.phase_seconds,
            "warnings": self.warnings,
            "package_version": self.package_version,
        }
        fileio.write_metadata_json(payload, path)


class PhaseTimer:
    def __init__(self):
        self.seconds: dict = {}

    @contextmanager
    def phase(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.seconds[name] = self.seconds.get(name, 0.0) + (time.perf_counter() - t0)


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat()


def _seed_type(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _float_list(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad comma-separated float list {text!r}") from None


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad comma-separated integer list {text!r}") from None


def _add_walk_flags(sub, include_r_grid=False):
    sub.add_argument("--p", type=float, default=1.0, help="return parameter p (default 1)")
    sub.add_argument("--q", type=float, default=0.5, help="in-out parameter q (default 0.5)")
    sub.add_argument("--r", type=float, default=0.25, help="layer walk parameter r (default 0.25)")
    if include_r_grid:
        sub.add_argument(
            "--r-grid", type=_float_list, default=None,
            help="comma-separated r values; runs one embedding per value",
        )
    sub.add_argument("--walk-length", type=int, default=30, help="walk length l (default 30)")
    sub.add_argument("--walks-per-node", type=int, default=10, help="walks s per node (default 10)")
    sub.add_argument("--min-samples", type=int, default=1, help="minimum samples a per node (default 1)")
    sub.add_argument("--sampler", choices=["cdf", "alias"], default="cdf", help="transition sampler")


def _add_sgns_flags(sub, dim_default=100):
    sub.add_argument("--dim", type=int, default=dim_default, help=f"embedding dimension D (default {dim_default})")
    sub.add_argument("--context", type=int, default=10, help="window radius k (default 10)")
    sub.add_argument("--negatives", type=int, default=5, help="negative samples b per pair (default 5)")
    sub.add_argument("--lr", type=float, default=0.025, help="initial learning rate (default 0.025)")
    sub.add_argument("--epochs", type=int, default=5, help="training epochs (default 5)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="layerwalk",
        description="Node feature learning on multilayer networks via biased random walks",
    )
    parser.add_argument("--version", action="version", version=f"layerwalk {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    embed = subs.add_parser("embed", help="learn node features from a multilayer network file")
    embed.add_argument("input", help="edge-list TSV or per-layer directory")
    embed.add_argument("--seed", type=_seed_type, required=True, help="u64 seed (required)")
    embed.add_argument("--format", choices=["auto", "edgelist", "layers"], default="auto")
    embed.add_argument("--identity-coupling", action="store_true",
                       help="treat inter-layer coupling as identity (unit self-coupling)")
    embed.add_argument("--num-layers", type=int, default=None, help="override layer count (edge-list)")
    _add_walk_flags(embed, include_r_grid=True)
    _add_sgns_flags(embed)
    embed.add_argument("--threads", type=int, default=1)
    embed.add_argument("--deterministic", action="store_true", help="force single-threaded everywhere")
    embed.add_argument("--dump-walks", default=None, help="write the walk corpus to this path")
    embed.add_argument("--output", default=None, help="embedding TSV path")

    sim = subs.add_parser("simulate", help="generate a synthetic multilayer network")
    sim.add_argument("--model", choices=["planted", "er"], required=True)
    sim.add_argument("--seed", type=_seed_type, required=True)
    sim.add_argument("--nodes", type=int, default=264)
    sim.add_argument("--layers", type=int, default=20)
    sim.add_argument("--communities", type=int, default=2)
    sim.add_argument("--p-in", type=float, default=0.49)
    sim.add_argument("--p-out", type=float, default=0.35)
    sim.add_argument("--p-edge", type=float, default=0.4, help="edge probability for the er model")
    sim.add_argument("--noise-layers", type=int, default=0, help="append b ER noise layers")
    sim.add_argument("--noise-density", type=float, default=None,
                     help="noise layer density (default: average density of the base network)")
    sim.add_argument("--output-dir", required=True)

    ev = subs.add_parser("evaluate", help="score an embedding against labels")
    ev.add_argument("--task", choices=["cluster", "classify", "msd", "subject-classify"], required=True)
    ev.add_argument("--embedding", default=None, help="embedding TSV (cluster/classify/msd)")
    ev.add_argument("--labels", required=True, help="CSV node_id,label")
    ev.add_argument("--clusters", type=int, default=None, help="k for k-means (default: #categories)")
    ev.add_argument("--restarts", type=int, default=10)
    ev.add_argument("--train-fraction", type=float, default=0.8)
    ev.add_argument("--embedding-a", action="append", default=None,
                    help="repeatable: group-A embedding replications (msd test)")
    ev.add_argument("--embedding-b", action="append", default=None,
                    help="repeatable: group-B embedding replications (msd test)")
    ev.add_argument("--alpha", type=float, default=0.05)
    ev.add_argument("--features", default=None, help="subject feature TSV (subject-classify)")
    ev.add_argument("--method", choices=["knn", "logistic"], default="knn")
    ev.add_argument("--folds", type=int, default=10)
    ev.add_argument("--seed", type=_seed_type, default=0)
    ev.add_argument("--output", default=None, help="metrics TSV (default stdout)")

    oc = subs.add_parser("oracle-check", help="walk engine vs closed-form co-occurrence limits")
    oc.add_argument("--seed", type=_seed_type, default=0)
    oc.add_argument("--graphs", type=int, default=3)
    oc.add_argument("--nodes", type=int, default=12)
    oc.add_argument("--walk-lengths", type=_int_list, default=[1000, 10000, 100000])
    oc.add_argument("--context", type=int, default=2)
    oc.add_argument("--p", type=float, default=1.0)
    oc.add_argument("--q", type=float, default=0.5)
    oc.add_argument("--r", type=float, default=1.0)
    oc.add_argument("--output", default=None)

    sw = subs.add_parser("sweep", help="seeded replication grids (snr, layers, context, scale)")
    sw.add_argument("experiment", choices=["snr", "layers", "context", "scale"])
    sw.add_argument("--seed", type=_seed_type, required=True)
    sw.add_argument("--reps", type=int, default=30)
    sw.add_argument("--grid", type=_float_list, default=None, help="override the cell grid")
    sw.add_argument("--nodes", type=int, default=264)
    sw.add_argument("--layers", type=int, default=20)
    sw.add_argument("--communities", type=int, default=None)
    sw.add_argument("--p-in", type=float, default=0.49)
    sw.add_argument("--p-out", type=float, default=0.245)
    _add_walk_flags(sw)
    _add_sgns_flags(sw, dim_default=20)
    sw.add_argument("--threads", type=int, default=1)
    sw.add_argument("--deterministic", action="store_true")
    sw.add_argument("--output", default=None)
    return parser


def _emit_table(rows: list, columns: list, output) -> None:
    lines = ["\t".join(columns)]
    for row in rows:
        lines.append("\t".join(str(row.get(c, "")) for c in columns))
    text = "\n".join(lines) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_any_network(path, fmt, coupling_mode, num_layers):
    p = Path(path)
    if fmt == "auto":
        fmt = "layers" if p.is_dir() else "edgelist"
    if fmt == "layers":
        return fileio.load_layer_directory(p, coupling_mode=coupling_mode)
    return fileio.load_network_tsv(p, coupling_mode=coupling_mode, num_layers=num_layers)


def _embed_once(net, r, args, threads, timer):
    with timer.phase("aggregate"):
        agg = adjusted_aggregate(net, r)
    wcfg = WalkConfig(
        return_p=args.p, inout_q=args.q, layer_r=r,
        walk_length=args.walk_length, walks_per_node=args.walks_per_node,
        min_samples_per_node=args.min_samples, seed=args.seed,
    )
    if args.context >= args.walk_length:
        raise ValueError(
            f"context radius {args.context} must be smaller than walk length {args.walk_length}"
        )
    with timer.phase("walks"):
        corpus = generate_corpus(agg, wcfg, sampler=args.sampler)
    scfg = SkipGramConfig(
        dim_d=args.dim, context_k=args.context, negative_b=args.negatives,
        initial_lr=args.lr, epochs=args.epochs, seed=args.seed,
    )
    with timer.phase("train"):
        model = train(corpus, scfg, threads=threads)
    return agg, corpus, model


def cmd_embed(args) -> int:
    timer = PhaseTimer()
    manifest = RunManifest(subcommand="embed", parameters={}, started_at=_utcnow())
    coupling = IDENTITY_COUPLING if args.identity_coupling else EXPLICIT_COUPLING
    threads = 1 if args.deterministic else max(1, args.threads)
    with timer.phase("load"):
        net = _load_any_network(args.input, args.format, coupling, args.num_layers)
    if net.duplicate_count:
        msg = f"{net.duplicate_count} duplicate edge records (last write wins)"
        print(f"warning: {msg}", file=sys.stderr)
        manifest.warnings.append(msg)

    r_values = args.r_grid if args.r_grid else [args.r]
    base_out = Path(args.output) if args.output else Path(args.input).with_suffix("").with_name(
        Path(args.input).stem + ".embedding.tsv"
    )
    if len(r_values) > 1 and args.output:
        raise ValueError("--output is only valid for a single r; use --r-grid without --output")

    outputs = []
    for r in r_values:
        agg, corpus, model = _embed_once(net, r, args, threads, timer)
        out_path = base_out if len(r_values) == 1 else base_out.with_name(
            base_out.stem.replace(".embedding", "") + f".r{r:g}.embedding.tsv"
        )
        with timer.phase("write"):
            fileio.write_embedding_tsv(model, out_path)
            sidecar = {
                "subcommand": "embed",
                "input": str(args.input),
                "coupling": coupling,
                "num_layers": net.num_layers,
                "num_nodes": net.num_nodes,
                "p": args.p, "q": args.q, "r": r,
                "walk_length": args.walk_length,
                "walks_per_node": args.walks_per_node,
                "min_samples_per_node": args.min_samples,
                "sampler": args.sampler,
                "dim": args.dim, "context": args.context,
                "negatives": args.negatives, "lr": args.lr, "epochs": args.epochs,
                "seed": args.seed, "threads": threads,
                "deterministic": bool(args.deterministic or threads == 1),
                "corpus_walks": corpus.num_walks,
                "corpus_tokens": corpus.total_tokens,
                "duplicate_records": net.duplicate_count,
                "zero_occurrence_nodes": [str(u) for u in model.zero_occurrence],
                "loss_history": model.loss_history,
                "manifest": str(out_path) + ".manifest.json",
            }
            fileio.write_metadata_json(sidecar, str(out_path) + ".meta.json")
            if args.dump_walks:
                write_corpus(corpus, args.dump_walks)
                outputs.append(args.dump_walks)
        outputs.extend([str(out_path), str(out_path) + ".meta.json"])

    manifest.parameters = {
        "input": str(args.input), "format": args.format, "coupling": coupling,
        "p": args.p, "q": args.q, "r_values": r_values,
        "walk_length": args.walk_length, "walks_per_node": args.walks_per_node,
        "min_samples_per_node": args.min_samples, "sampler": args.sampler,
        "dim": args.dim, "context": args.context, "negatives": args.negatives,
        "lr": args.lr, "epochs": args.epochs, "seed": args.seed,
        "threads": threads, "deterministic": bool(args.deterministic),
    }
    manifest.inputs = [str(args.input)]
    manifest.outputs = outputs
    manifest.phase_seconds = timer.seconds
    manifest.finished_at = _utcnow()
    manifest.write(str(base_out) + ".manifest.json")
    return EXIT_OK


def cmd_simulate(args) -> int:
    timer = PhaseTimer()
    manifest = RunManifest(subcommand="simulate", parameters=dict(vars(args)), started_at=_utcnow())
    manifest.parameters.pop("subcommand", None)
    out_dir = Path(args.output_dir)
    labels = None
    with timer.phase("generate"):
        if args.model == "planted":
            spec = PlantedPartitionSpec(
                nodes_n=args.nodes, layers_m=args.layers, communities_c=args.communities,
                p_in=args.p_in, p_out=args.p_out, seed=args.seed,
            )
            net, partition = gen_planted_partition(spec)
            labels = {u: f"community_{partition.label_of(u)}" for u in partition.nodes}
        else:
            net = gen_multilayer_er(args.nodes, args.layers, args.p_edge, args.seed)
        if args.noise_layers:
            density = args.noise_density
            if density is None:
                density = average_edge_density(net)
            net = add_noise_layers(net, args.noise_layers, density, args.seed + 1)
    with timer.phase("write"):
        fileio.write_layer_directory(net, out_dir)
        outputs = [str(out_dir / f"layer_{i}.tsv") for i in range(net.num_layers)]
        if labels is not None:
            fileio.write_labels_csv(labels, out_dir / "labels.csv")
            outputs.append(str(out_dir / "labels.csv"))
    manifest.outputs = outputs
    manifest.phase_seconds = timer.seconds
    manifest.finished_at = _utcnow()
    manifest.write(out_dir / "manifest.json")
    return EXIT_OK


def _load_labeled_embedding(embedding_path, labels_path):
    nodes, feats = fileio.read_embedding_tsv(embedding_path)
    label_set = evaluation.LabelSet(fileio.read_labels_csv(labels_path))
    labs, mask = label_set.aligned(nodes)
    if not mask.any():
        raise ValueError(f"no embedded node carries a label from {labels_path}")
    idx = np.flatnonzero(mask)
    kept_nodes = [nodes[i] for i in idx]
    kept_labels = [labs[i] for i in idx]
    return kept_nodes, feats[idx], kept_labels, label_set


def cmd_evaluate(args) -> int:
    if args.task in ("cluster", "classify", "msd") and args.embedding is None and not (
        args.task == "msd" and args.embedding_a and args.embedding_b
    ):
        raise ValueError(f"--embedding is required for task {args.task}")

    rows, columns = [], []
    if args.task == "cluster":
        nodes, feats, labs, _ = _load_labeled_embedding(args.embedding, args.labels)
        truth = evaluation.LabelSet({u: lab for u, lab in zip(nodes, labs)}).to_partition(nodes)
        k = args.clusters or truth.num_communities
        found = evaluation.kmeans(feats, k, seed=args.seed, restarts=args.restarts, node_ids=nodes)
        ari = evaluation.adjusted_rand(found, truth)
        columns = ["task", "clusters", "nodes", "ari"]
        rows = [{"task": "cluster", "clusters": k, "nodes": len(nodes), "ari": repr(ari)}]
    elif args.task == "classify":
        nodes, feats, labs, label_set = _load_labeled_embedding(args.embedding, args.labels)
        columns = ["task", "category", "members", "auc"]
        aucs = []
        for cat in label_set.categories():
            members = sum(1 for lab in labs if lab == cat)
            if members < 2:
                rows.append({"task": "classify", "category": cat, "members": members, "auc": "nan"})
                continue
            auc = evaluation.one_vs_all_auc(
                feats, labs, cat, train_fraction=args.train_fraction, seed=args.seed
            )
            aucs.append(auc)
            rows.append({"task": "classify", "category": cat, "members": members, "auc": repr(auc)})
        rows.append({"task": "classify", "category": "__mean__", "members": "",
                     "auc": repr(float(np.mean(aucs))) if aucs else "nan"})
    elif args.task == "msd":
        if args.embedding_a and args.embedding_b:
            label_set = evaluation.LabelSet(fileio.read_labels_csv(args.labels))
            group_samples = {}
            for group, paths in (("a", args.embedding_a), ("b", args.embedding_b)):
                per_region: dict = {}
                for path in paths:
                    nodes, feats = fileio.read_embedding_tsv(path)
                    labs, mask = label_set.aligned(nodes)
                    for cat in label_set.categories():
                        idx = [i for i in range(len(nodes)) if mask[i] and labs[i] == cat]
                        if idx:
                            per_region.setdefault(cat, []).append(evaluation.msd(feats, idx))
                group_samples[group] = per_region
            columns = ["task", "region", "msd_a", "msd_b", "difference", "ci_low", "ci_high",
                       "p_value", "degenerate"]
            for cat in label_set.categories():
                sa = group_samples["a"].get(cat, [])
                sb = group_samples["b"].get(cat, [])
                if len(sa) < 2 or len(sb) < 2:
                    continue
                res = evaluation.msd_group_test(sa, sb, alpha=args.alpha)
                rows.append({
                    "task": "msd", "region": cat,
                    "msd_a": repr(float(np.mean(sa))), "msd_b": repr(float(np.mean(sb))),
                    "difference": repr(res.difference), "ci_low": repr(res.ci_low),
                    "ci_high": repr(res.ci_high), "p_value": repr(res.p_value),
                    "degenerate": res.degenerate,
                })
        else:
            nodes, feats, labs, label_set = _load_labeled_embedding(args.embedding, args.labels)
            columns = ["task", "region", "size", "msd"]
            for cat in label_set.categories():
                idx = [i for i, lab in enumerate(labs) if lab == cat]
                if not idx:
                    continue
                rows.append({"task": "msd", "region": cat, "size": len(idx),
                             "msd": repr(evaluation.msd(feats, idx))})
    else:  # subject-classify
        if not args.features:
            raise ValueError("--features is required for task subject-classify")
        subjects, feats = fileio.read_embedding_tsv(args.features)
        label_map = fileio.read_labels_csv(args.labels)
        missing = [s for s in subjects if s not in label_map]
        if missing:
            raise ValueError(f"subjects without labels: {missing[:10]}")
        labs = [label_map[s] for s in subjects]
        result = evaluation.subject_classify(
            feats, labs, method=args.method, folds=args.folds, seed=args.seed
        )
        columns = ["task", "method", "fold", "accuracy", "mean_accuracy", "std_error", "best_k"]
        for i, acc in enumerate(result.fold_accuracies):
            rows.append({"task": "subject-classify", "method": result.method, "fold": i,
                         "accuracy": repr(acc)})
        rows.append({"task": "subject-classify", "method": result.method, "fold": "__summary__",
                     "accuracy": "", "mean_accuracy": repr(result.mean_accuracy),
                     "std_error": repr(result.std_error),
                     "best_k": result.best_k if result.best_k is not None else ""})
    _emit_table(rows, columns, args.output)
    return EXIT_OK


def _random_connected_aggregate(n, seed, r):
    """Single-layer planted graph, retried until connected and non-bipartite."""
    from .factorization import _is_bipartite, _support_components

    for attempt in range(64):
        spec = PlantedPartitionSpec(
            nodes_n=n, layers_m=1, communities_c=2, p_in=0.8, p_out=0.45,
            seed=seed + 7919 * attempt,
        )
        net, _ = gen_planted_partition(spec)
        agg = adjusted_aggregate(net, r)
        if np.all(agg.degrees > 0) and len(_support_components(agg)) == 1 and not _is_bipartite(agg):
            return agg
    raise ValueError("could not draw a connected non-bipartite test graph")


def cmd_oracle_check(args) -> int:
    rows = []
    for g in range(args.graphs):
        agg = _random_connected_aggregate(args.nodes, args.seed + 1000 * g, args.r)
        kernel = second_order_kernel(agg, args.p, args.q)
        stationary = edge_stationary(kernel)
        limit = limit_matrix_general(kernel, stationary, args.context)
        start = int(np.argmax(agg.degrees))
        cfg_seed = args.seed + 1000 * g
        for length in args.walk_lengths:
            wcfg = WalkConfig(
                return_p=args.p, inout_q=args.q, layer_r=args.r,
                walk_length=int(length), walks_per_node=1, seed=cfg_seed,
            )
            walk = sample_walk(agg, agg.node_ids[start], wcfg, walk_substream(cfg_seed, start, 0))
            index = {u: i for i, u in enumerate(agg.node_ids)}
            corpus = NeighborhoodCorpus(
                walks_idx=[np.array([index[u] for u in walk], dtype=np.int32)],
                node_ids=agg.node_ids, total_tokens=len(walk),
            )
            _, ratio = empirical_cooccurrence(corpus, args.context)
            mask = np.isfinite(limit) & (limit > 0)
            rel = np.abs(ratio[mask] - limit[mask]) / limit[mask]
            rows.append({
                "graph": g, "nodes": args.nodes, "length": int(length),
                "max_rel_error": repr(float(np.nanmax(rel))),
            })
    _emit_table(rows, ["graph", "nodes", "length", "max_rel_error"], args.output)
    return EXIT_OK


def _sweep_cell_recovery(n, m, c, p_in, p_out, args, seed, threads):
    spec = PlantedPartitionSpec(nodes_n=n, layers_m=m, communities_c=c,
                                p_in=p_in, p_out=p_out, seed=seed)
    net, truth = gen_planted_partition(spec)
    agg = adjusted_aggregate(net, args.r)
    wcfg = WalkConfig(return_p=args.p, inout_q=args.q, layer_r=args.r,
                      walk_length=args.walk_length, walks_per_node=args.walks_per_node,
                      min_samples_per_node=args.min_samples, seed=seed)
    corpus = generate_corpus(agg, wcfg, sampler=args.sampler)
    scfg = SkipGramConfig(dim_d=args.dim, context_k=args.context, negative_b=args.negatives,
                          initial_lr=args.lr, epochs=args.epochs, seed=seed)
    model = train(corpus, scfg, threads=threads)
    found = evaluation.kmeans(model.input_weights, c, seed=seed, node_ids=list(range(n)))
    return evaluation.adjusted_rand(found, truth)


def _sweep_cell_runtime(n, m, c, p_in, p_out, args, seed, threads):
    """Wall-clock of the algorithm phases (aggregate + walks + train)."""
    spec = PlantedPartitionSpec(nodes_n=n, layers_m=m, communities_c=c,
                                p_in=p_in, p_out=p_out, seed=seed)
    net, _ = gen_planted_partition(spec)
    t0 = time.perf_counter()
    agg = adjusted_aggregate(net, args.r)
    wcfg = WalkConfig(return_p=args.p, inout_q=args.q, layer_r=args.r,
                      walk_length=args.walk_length, walks_per_node=args.walks_per_node,
                      min_samples_per_node=args.min_samples, seed=seed)
    corpus = generate_corpus(agg, wcfg, sampler=args.sampler)
    scfg = SkipGramConfig(dim_d=args.dim, context_k=args.context, negative_b=args.negatives,
                          initial_lr=args.lr, epochs=args.epochs, seed=seed)
    train(corpus, scfg, threads=threads)
    return time.perf_counter() - t0


def cmd_sweep(args) -> int:
    threads = 1 if args.deterministic else max(1, args.threads)
    if args.context >= args.walk_length:
        raise ValueError("context radius must be smaller than walk length")
    rows = []
    if args.experiment == "snr":
        c = args.communities or 2
        grid = args.grid or [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
        for frac in grid:
            p_out = frac * args.p_in
            snr = args.p_in / p_out - 1.0
            vals = [_sweep_cell_recovery(args.nodes, args.layers, c, args.p_in, p_out,
                                         args, args.seed + rep, threads)
                    for rep in range(args.reps)]
            rows.append({"experiment": "snr", "cell": repr(float(frac)), "snr": repr(float(snr)),
                         "metric": "ari", "mean": repr(float(np.mean(vals))),
                         "std": repr(float(np.std(vals))), "reps": args.reps})
    elif args.experiment == "layers":
        c = args.communities or 12
        grid = [int(x) for x in (args.grid or [5, 15, 25, 50])]
        for m in grid:
            vals = [_sweep_cell_recovery(args.nodes, m, c, args.p_in, args.p_out,
                                         args, args.seed + rep, threads)
                    for rep in range(args.reps)]
            rows.append({"experiment": "layers", "cell": m, "snr": "",
                         "metric": "ari", "mean": repr(float(np.mean(vals))),
                         "std": repr(float(np.std(vals))), "reps": args.reps})
    elif args.experiment == "context":
        c = args.communities or 12
        grid = [int(x) for x in (args.grid or [8, 10, 12, 14, 16, 18, 20])]
        for k in grid:
            if k >= args.walk_length:
                raise ValueError(f"grid context {k} must be smaller than walk length {args.walk_length}")
            vals = []
            for rep in range(args.reps):
                cell_args = argparse.Namespace(**vars(args))
                cell_args.context = k
                vals.append(_sweep_cell_recovery(args.nodes, args.layers, c, args.p_in,
                                                 args.p_out, cell_args, args.seed + rep, threads))
            rows.append({"experiment": "context", "cell": k, "snr": "",
                         "metric": "ari", "mean": repr(float(np.mean(vals))),
                         "std": repr(float(np.std(vals))), "reps": args.reps})
    else:  # scale
        c = args.communities or 2
        grid = [int(x) for x in (args.grid or [100, 1000, 10000, 100000])]
        for m in grid:
            vals = [_sweep_cell_runtime(args.nodes, m, c, args.p_in, args.p_out,
                                        args, args.seed + rep, threads)
                    for rep in range(args.reps)]
            rows.append({"experiment": "scale", "cell": m, "snr": "",
                         "metric": "seconds", "mean": repr(float(np.mean(vals))),
                         "std": repr(float(np.std(vals))), "reps": args.reps})
    _emit_table(rows, ["experiment", "cell", "snr", "metric", "mean", "std", "reps"], args.output)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "embed": cmd_embed,
        "simulate": cmd_simulate,
        "evaluate": cmd_evaluate,
        "oracle-check": cmd_oracle_check,
        "sweep": cmd_sweep,
    }
    try:
        return handlers[args.subcommand](args)
    except ResourceCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except FloatingPointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entry() -> None:
    sys.exit(main())
