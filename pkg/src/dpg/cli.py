"""Command-line interface.

Subcommands: train, build, metrics, communities, constraints, dot, report.
Exit codes: 0 success, 1 usage problem, 2 data/processing error.  Every run
writes a RunManifest next to its primary output.  The DPG_SEED environment
variable overrides any --seed flag.
"""

from __future__ import annotations

import argparse
import csv
import io as _stringio
import os
import sys

from . import __version__
from .build import build_dpg
from .constraints import evaluate_constraints, extract_constraints
from .dot import export_dot
from .errors import DPGError, DatasetError
from .graph import load_dpg, save_dpg
from .io import RunManifest, load_csv
from .metrics import (
    CommunityReport,
    betweenness_centrality,
    community_classes,
    detect_communities,
    local_reaching_centrality,
)
from .model import (
    CanonicalizationPolicy,
    atomic_write_text,
    dump_json,
    load_ensemble,
    save_ensemble,
)
from .report import ALL_METRICS, centrality_rows, constraints_to_json, report
from .train import TrainConfig, evaluate, fit_forest, train_test_split


def _resolve_seed(flag_value: int) -> int:
    env = os.environ.get("DPG_SEED")
    if env is None:
        return flag_value
    try:
        return int(env)
    except ValueError:
        raise ValueError(f"DPG_SEED must be an integer, got {env!r}") from None


def _eval_json(rep, classes, extra: dict) -> dict:
    return {"accuracy": rep.accuracy, "confusion": rep.confusion.tolist(),
            "classes": list(classes), **extra}


def _sibling(out_path: str, suffix: str) -> str:
    base, _ = os.path.splitext(out_path)
    return base + suffix


def cmd_train(args) -> int:
    seed = _resolve_seed(args.seed)
    manifest = RunManifest.start(
        "train",
        {"data": args.data},
        {"trees": args.trees, "seed": seed, "test_fraction": args.test_fraction,
         "max_depth": args.max_depth},
    )
    d = load_csv(args.data)
    if d.labels is None:
        raise DatasetError(f"{args.data}: training data needs a trailing 'label' column")
    split = train_test_split(d, args.test_fraction, seed)
    cfg = TrainConfig(n_trees=args.trees, max_depth=args.max_depth, seed=seed)
    m = fit_forest(d, cfg, rows=split.train_indices)
    rep = evaluate(m, d, split.test_indices)
    save_ensemble(m, args.out)
    eval_path = _sibling(args.out, ".eval.json")
    atomic_write_text(
        eval_path,
        dump_json(
            _eval_json(
                rep,
                m.classes.labels,
                {"n_train": len(split.train_indices), "n_test": len(split.test_indices),
                 "seed": seed, "test_fraction": args.test_fraction},
            )
        ),
    )
    manifest.finish([args.out, eval_path])
    manifest.write(args.out)
    print(f"wrote {args.out} and {eval_path} (test accuracy {rep.accuracy:.4f})")
    return 0


def cmd_build(args) -> int:
    manifest = RunManifest.start(
        "build", {"model": args.model, "data": args.data}, {"precision": args.precision}
    )
    m = load_ensemble(args.model)
    d = load_csv(args.data)
    g = build_dpg(m, d, CanonicalizationPolicy(decimals=args.precision))
    save_dpg(g, args.out)
    manifest.finish([args.out])
    manifest.write(args.out)
    print(f"wrote {args.out} ({len(g.nodes)} nodes, {len(g.edges)} edges)")
    return 0


def cmd_metrics(args) -> int:
    manifest = RunManifest.start(
        "metrics", {"dpg": args.dpg},
        {"metric": args.metric, "top": args.top, "weighted": args.weighted},
    )
    g = load_dpg(args.dpg)
    if args.metric == "bc":
        r = betweenness_centrality(g, weighted=args.weighted)
    else:
        r = local_reaching_centrality(g, weighted=not args.unweighted)
    buf = _stringio.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["rank", "label", "score"])
    for row in centrality_rows(r, g, args.top):
        writer.writerow([row["rank"], row["label"], repr(row["score"])])
    atomic_write_text(args.out, buf.getvalue())
    manifest.finish([args.out])
    manifest.write(args.out)
    print(f"wrote {args.out}")
    return 0


def _communities_json(r: CommunityReport, g) -> dict:
    return {
        "seed": r.seed,
        "iterations": r.iterations,
        "communities": [
            {"nodes": sorted(comm), "classes": list(r.class_labels[i])}
            for i, comm in enumerate(r.communities)
        ],
        "table": community_classes(r, g),
    }


def cmd_communities(args) -> int:
    seed = _resolve_seed(args.seed)
    manifest = RunManifest.start("communities", {"dpg": args.dpg}, {"seed": seed})
    g = load_dpg(args.dpg)
    r = detect_communities(g, seed=seed)
    atomic_write_text(args.out, dump_json(_communities_json(r, g)))
    manifest.finish([args.out])
    manifest.write(args.out)
    print(f"wrote {args.out} ({len(r.communities)} communities)")
    return 0


def cmd_constraints(args) -> int:
    inputs = {"dpg": args.dpg}
    if args.evaluate:
        inputs["evaluate"] = args.evaluate
    manifest = RunManifest.start("constraints", inputs, {})
    g = load_dpg(args.dpg)
    names = g.feature_names()
    per_class = [
        extract_constraints(g, n.predicate.class_index) for n in g.class_nodes()
    ]
    out = {"classes": [constraints_to_json(cc, names) for cc in per_class]}
    if args.evaluate:
        d = load_csv(args.evaluate)
        out["evaluation"] = [
            evaluate_constraints(d, range(len(d)), cc) for cc in per_class
        ]
    atomic_write_text(args.out, dump_json(out))
    manifest.finish([args.out])
    manifest.write(args.out)
    print(f"wrote {args.out}")
    return 0


def _load_communities(path, g) -> CommunityReport:
    import json

    try:
        with open(path) as fh:
            obj = json.load(fh)
        communities = tuple(frozenset(c["nodes"]) for c in obj["communities"])
        class_labels = tuple(
            tuple(str(x) for x in c.get("classes", ())) for c in obj["communities"]
        )
        return CommunityReport(
            communities=communities,
            class_labels=class_labels,
            seed=int(obj.get("seed", 0)),
            iterations=int(obj.get("iterations", 0)),
        )
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise DatasetError(f"cannot read communities file {path}: {exc}") from exc


def cmd_dot(args) -> int:
    inputs = {"dpg": args.dpg}
    if args.communities:
        inputs["communities"] = args.communities
    manifest = RunManifest.start(
        "dot", inputs, {"highlight_classes": args.highlight_classes}
    )
    g = load_dpg(args.dpg)
    comms = _load_communities(args.communities, g) if args.communities else None
    doc = export_dot(g, communities=comms, highlight_classes=args.highlight_classes)
    atomic_write_text(args.out, doc.text)
    manifest.finish([args.out])
    manifest.write(args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_report(args) -> int:
    seed = _resolve_seed(args.seed)
    metrics = tuple(m for m in args.metrics.split(",") if m) if args.metrics else ()
    manifest = RunManifest.start(
        "report", {"dpg": args.dpg},
        {"metrics": list(metrics), "top": args.top, "seed": seed, "hop_bc": args.hop_bc},
    )
    g = load_dpg(args.dpg)
    bundle = report(g, metrics=metrics, top=args.top, seed=seed, weighted_bc=not args.hop_bc)
    atomic_write_text(args.out, dump_json(bundle))
    manifest.finish([args.out])
    manifest.write(args.out)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpg",
        description="Convert tree-ensemble classifiers into decision predicate "
        "graphs and analyse them.",
    )
    parser.add_argument("--version", action="version", version=f"dpg {__version__}")
    sub = parser.add_subparsers(dest="subcommand", metavar="subcommand")

    p = sub.add_parser("train", help="train a random forest on a labeled CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--trees", type=int, required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("build", help="build the predicate graph from model + data")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--precision", type=int, default=2)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("metrics", help="rank nodes by a centrality metric")
    p.add_argument("--dpg", required=True)
    p.add_argument("--metric", choices=("bc", "lrc"), required=True)
    p.add_argument("--top", type=int, default=8)
    p.add_argument("--weighted", action="store_true",
                   help="bc only: use edge weights as path lengths")
    p.add_argument("--unweighted", action="store_true",
                   help="lrc only: plain reachable fraction")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("communities", help="label-propagation communities")
    p.add_argument("--dpg", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_communities)

    p = sub.add_parser("constraints", help="per-class feature intervals")
    p.add_argument("--dpg", required=True)
    p.add_argument("--evaluate", default=None,
                   help="labeled CSV to score against the constraints")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_constraints)

    p = sub.add_parser("dot", help="export the graph as Graphviz DOT")
    p.add_argument("--dpg", required=True)
    p.add_argument("--communities", default=None,
                   help="communities JSON used to color nodes")
    p.add_argument("--no-highlight-classes", dest="highlight_classes",
                   action="store_false")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dot)

    p = sub.add_parser("report", help="combined constraints/centrality/community bundle")
    p.add_argument("--dpg", required=True)
    p.add_argument("--metrics", default=",".join(ALL_METRICS))
    p.add_argument("--top", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hop-bc", action="store_true",
                   help="rank bc by hop-count shortest paths instead of weighted")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if (exc.code or 0) == 0 else 1
    if getattr(args, "func", None) is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except DPGError as exc:
        print(f"dpg: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"dpg: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"dpg: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
