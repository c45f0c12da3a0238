"""Command-line interface.

Subcommands:

  gen barbell / gen synthetic   write edge-list CSVs (plus a .meta.json sidecar)
  importance                    per-node importance for one snapshot
  analyze                       spectra, communities, measure distributions
  predict                       the full prediction pipeline with benchmarks

Inputs are edge-list CSVs (``time,src,dst,value``) or network JSON documents.
Every output carries the tool version, the resolved arguments, and the seed,
either embedded (JSON) or in a sidecar. Exit codes: 0 success, 2 usage error,
3 data error, 4 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import __version__
from .errors import DataError, NumericalError
from .features import MEASURE_COLUMNS, TARGETS, label_presence, snapshot_measures
from .generators import barbell, repeat_snapshot, synthetic_temporal
from .importance import DIRECTED_SCHEME, SCHEMES, STRENGTH_MODES, node_importance, node_importance_directed
from .ingest import load_network, write_edge_csv
from .netstats import detect_communities, mean_diff_ttest, modularity
from .pipeline import L2_GRID, run_prediction
from .spectral import eig_sym, select_eigencomponent
from .svgplot import bar_chart, line_chart, violin_chart


def _meta(args: argparse.Namespace, command: str) -> dict:
    """Run configuration echoed into every artifact: command plus every
    resolved parameter, including defaulted seeds."""
    resolved = {k: v for k, v in vars(args).items() if k != "func"}
    return {"tool": "structim", "version": __version__, "command": command, "config": resolved}


def _wants(args, ext: str) -> bool:
    fmt = getattr(args, "format", "all")
    return fmt == "all" or fmt == ext


def _write_json(path: str, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _add_io_args(sub, with_aggregation=True):
    sub.add_argument("input", help="edge-list CSV or network JSON")
    if with_aggregation:
        sub.add_argument("--aggregation", type=int, default=1, help="time labels per snapshot (default 1)")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--format", choices=("all", "csv", "json", "svg"), default="all",
                     help="restrict emitted artifact formats")


def cmd_gen(args) -> int:
    if args.family == "barbell":
        snap = barbell(args.n_left, args.bridge, args.n_right, weight=args.weight)
        tn = repeat_snapshot(snap, args.repeats)
    else:
        tn = synthetic_temporal(
            args.n, args.communities, args.hubs, args.coupling, args.horizon, seed=args.seed
        )
    write_edge_csv(tn, args.out)
    meta = _meta(args, f"gen {args.family}")
    meta["n_snapshots"] = tn.n_snapshots
    meta["n_nodes"] = tn.n_nodes
    meta["n_edges_total"] = sum(s.n_edges for s in tn.snapshots)
    _write_json(args.out + ".meta.json", meta)
    print(f"wrote {args.out} ({meta['n_snapshots']} snapshots, {meta['n_nodes']} nodes)")
    return 0


def cmd_importance(args) -> int:
    if args.scheme == DIRECTED_SCHEME and not args.directed:
        print("error: scheme 'directed' requires --directed input", file=sys.stderr)
        return 2
    if args.scheme != DIRECTED_SCHEME and args.directed:
        print(f"error: scheme {args.scheme!r} is undirected; drop --directed", file=sys.stderr)
        return 2
    tn = load_network(args.input, aggregation=args.aggregation, directed=args.directed)
    if not 0 <= args.snapshot < tn.n_snapshots:
        raise DataError(f"snapshot {args.snapshot} out of range 0..{tn.n_snapshots - 1}")
    snap = tn.snapshots[args.snapshot]
    if args.scheme == DIRECTED_SCHEME:
        vec = node_importance_directed(snap, strength_mode=args.strength_mode)
    else:
        vec = node_importance(snap, args.scheme)

    meta = _meta(args, "importance")
    if args.out.endswith(".json"):
        _write_json(
            args.out,
            {
                "meta": meta,
                "scheme": vec.scheme,
                "snapshot": args.snapshot,
                "values": [
                    {
                        "node": node,
                        "value": val,
                        "eig_rank": vec.eig_rank.get(node) if vec.eig_rank else None,
                    }
                    for node, val in vec.values.items()
                ],
                "excluded_zero_strength": list(vec.excluded),
            },
        )
    else:
        rows = [
            [node, vec.scheme, repr(val), vec.eig_rank.get(node, "") if vec.eig_rank else ""]
            for node, val in vec.values.items()
        ]
        _write_csv(args.out, ["node", "scheme", "value", "eig_rank"], rows)
        _write_json(args.out + ".meta.json", meta)
    print(f"wrote {args.out} ({len(vec.values)} nodes, {len(vec.excluded)} excluded)")
    return 0


def cmd_analyze(args) -> int:
    tn = load_network(args.input, aggregation=args.aggregation)
    os.makedirs(args.out, exist_ok=True)
    written = []

    spectra = []
    mod_rows = []
    rank_rows = []
    for t, snap in enumerate(tn.snapshots):
        if snap.n_edges == 0:
            spectra.append({"snapshot": t, "n_nodes": snap.n_nodes, "n_edges": 0,
                            "eigenvalues": [], "positive_count": 0})
            continue
        spec = eig_sym(snap.adjacency())
        spectra.append(
            {
                "snapshot": t,
                "n_nodes": snap.n_nodes,
                "n_edges": snap.n_edges,
                "eigenvalues": spec.eigenvalues.tolist(),
                "positive_count": spec.positive_count(),
            }
        )
        labels = detect_communities(snap, seed=args.seed)
        mod_rows.append([t, repr(modularity(snap, labels)), int(labels.max()) + 1])
        for node, rank in zip(snap.node_ids, select_eigencomponent(spec)):
            rank_rows.append([t, node, int(rank)])

    if _wants(args, "json"):
        _write_json(os.path.join(args.out, "spectra.json"), {"meta": _meta(args, "analyze"), "snapshots": spectra})
        written.append("spectra.json")
    if _wants(args, "csv"):
        _write_csv(os.path.join(args.out, "modularity.csv"), ["snapshot", "modularity", "n_communities"], mod_rows)
        _write_csv(os.path.join(args.out, "eigen_ranks.csv"), ["snapshot", "node", "eig_rank"], rank_rows)
        written += ["modularity.csv", "eigen_ranks.csv"]
    if _wants(args, "svg") and mod_rows:
        svg = line_chart(
            [r[0] for r in mod_rows],
            [float(r[1]) for r in mod_rows],
            title="Modularity over time",
            xlabel="snapshot",
            ylabel="Q",
        )
        with open(os.path.join(args.out, "modularity.svg"), "w") as fh:
            fh.write(svg)
        written.append("modularity.svg")

    # Measure distributions split by presence in the next snapshot.
    measure_rows = []
    by_measure = {name: {0: [], 1: []} for name in MEASURE_COLUMNS}
    for t in range(tn.n_snapshots - 1):
        labels = label_presence(tn, t)
        if not labels:
            continue
        measures = snapshot_measures(tn, t, seed=args.seed)
        for node, present in labels.items():
            g = tn.universe_index[node]
            for name in MEASURE_COLUMNS:
                val = measures[name][g]
                if val == val:  # skip NaN
                    measure_rows.append([t, node, name, repr(float(val)), present])
                    by_measure[name][present].append(float(val))

    ttests = []
    for name in MEASURE_COLUMNS:
        absent, present = by_measure[name][0], by_measure[name][1]
        entry = {"measure": name, "n_present": len(present), "n_absent": len(absent)}
        try:
            res = mean_diff_ttest(present, absent)
            entry.update(t_stat=res.t_stat, dof=res.dof, p_value=res.p_value)
        except DataError as exc:
            entry.update(t_stat=None, dof=None, p_value=None, note=str(exc))
        ttests.append(entry)

    if measure_rows:
        if _wants(args, "csv"):
            _write_csv(
                os.path.join(args.out, "measures.csv"),
                ["snapshot", "node", "measure", "value", "next_present"],
                measure_rows,
            )
            written.append("measures.csv")
        if _wants(args, "json"):
            alpha = 0.05
            _write_json(
                os.path.join(args.out, "ttests.json"),
                {
                    "meta": _meta(args, "analyze"),
                    "alpha": alpha,
                    "bonferroni_alpha": alpha / len(MEASURE_COLUMNS),
                    "tests": ttests,
                },
            )
            written.append("ttests.json")
        if _wants(args, "svg"):
            for name in MEASURE_COLUMNS:
                groups = [
                    ("absent next", by_measure[name][0]),
                    ("present next", by_measure[name][1]),
                ]
                svg = violin_chart(groups, title=f"{name} by next-snapshot presence", ylabel=name)
                fname = f"violin_{name}.svg"
                with open(os.path.join(args.out, fname), "w") as fh:
                    fh.write(svg)
                written.append(fname)

    run_meta = _meta(args, "analyze")
    run_meta["artifacts"] = written
    _write_json(os.path.join(args.out, "run.json"), run_meta)
    print(f"wrote {len(written) + 1} artifacts to {args.out}")
    return 0


def cmd_predict(args) -> int:
    tn = load_network(args.input, aggregation=args.aggregation)
    if tn.n_snapshots < 5:
        raise DataError(f"prediction needs at least 5 snapshots, got {tn.n_snapshots}")
    try:
        grid = tuple(float(v) for v in args.l2_grid.split(","))
    except ValueError:
        print(f"error: cannot parse --l2-grid {args.l2_grid!r}", file=sys.stderr)
        return 2
    if not grid or any(v < 0 for v in grid):
        print("error: --l2-grid needs nonnegative values", file=sys.stderr)
        return 2

    result = run_prediction(
        tn,
        args.target,
        seed=args.seed,
        l2_grid=grid,
        change_threshold=args.change_threshold,
        corr_threshold=args.corr_threshold,
        null_trials=args.trials,
        bootstrap_iters=args.bootstrap_iters,
    )
    os.makedirs(args.out, exist_ok=True)
    written = []

    if _wants(args, "json"):
        payload = {"meta": _meta(args, "predict")}
        payload.update(result.to_json_dict())
        _write_json(os.path.join(args.out, "prediction.json"), payload)
        written.append("prediction.json")
    if _wants(args, "csv"):
        _write_csv(
            os.path.join(args.out, "coefficients.csv"),
            ["feature", "coef", "se", "pvalue", "ci_lo", "ci_hi"],
            [
                [c["feature"], repr(c["coef"]), repr(c["se"]), repr(c["pvalue"]), repr(c["ci_lo"]), repr(c["ci_hi"])]
                for c in result.coefficients
            ],
        )
        written.append("coefficients.csv")
    if result.report is not None:
        perm = result.report.permutation_importance or {}
        if _wants(args, "csv") and perm:
            _write_csv(
                os.path.join(args.out, "permutation_importance.csv"),
                ["feature", "importance"],
                [[k, repr(v)] for k, v in perm.items()],
            )
            written.append("permutation_importance.csv")
        if _wants(args, "svg") and perm:
            svg = bar_chart(list(perm), list(perm.values()),
                            title="Permutation importance", ylabel="mean increase in 1-AUC")
            with open(os.path.join(args.out, "permutation_importance.svg"), "w") as fh:
                fh.write(svg)
            written.append("permutation_importance.svg")
        if _wants(args, "csv") and result.shap_values is not None:
            rows = []
            for r, node in enumerate(result.shap_rows):
                for j, feat in enumerate(result.columns):
                    rows.append([node, feat, repr(float(result.shap_values[r, j]))])
            _write_csv(os.path.join(args.out, "shap.csv"), ["node", "feature", "phi"], rows)
            written.append("shap.csv")

    if result.report is not None:
        auc = result.report.auc
        ci = result.report.auc_ci
        null_auc = (result.report.null_prior or {}).get("auc", {}).get("mean")
        print(
            f"target={result.target} l2={result.chosen_l2} test AUC={auc if auc is None else f'{auc:.4f}'}"
            f" ci95={ci} null prior AUC={null_auc if null_auc is None else f'{null_auc:.4f}'}"
        )
    else:
        reg = result.regression or {}
        print(f"target={result.target} heldout R2={reg.get('r2_heldout'):.4f}")
    print(f"wrote {len(written)} artifacts to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="structim",
                                     description="Spectral structural importance for weighted temporal networks")
    parser.add_argument("--version", action="version", version=f"structim {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("gen", help="generate benchmark networks")
    gen_subs = gen.add_subparsers(dest="family", required=True)
    gb = gen_subs.add_parser("barbell", help="two cliques joined by a path")
    gb.add_argument("--n-left", type=int, default=4)
    gb.add_argument("--bridge", type=int, default=2)
    gb.add_argument("--n-right", type=int, default=5)
    gb.add_argument("--weight", type=float, default=1.0)
    gb.add_argument("--repeats", type=int, default=1, help="emit the graph at this many time steps")
    gb.add_argument("--seed", type=int, default=0)
    gb.add_argument("--out", required=True)
    gb.set_defaults(func=cmd_gen)
    gs = gen_subs.add_parser("synthetic", help="temporal network with importance-coupled dropout")
    gs.add_argument("--n", type=int, default=120)
    gs.add_argument("--communities", type=int, default=4)
    gs.add_argument("--hubs", type=int, default=4)
    gs.add_argument("--coupling", type=float, default=0.0)
    gs.add_argument("--horizon", type=int, default=30)
    gs.add_argument("--seed", type=int, default=0)
    gs.add_argument("--out", required=True)
    gs.set_defaults(func=cmd_gen)

    imp = subs.add_parser("importance", help="per-node importance for one snapshot")
    _add_io_args(imp)
    imp.add_argument("--scheme", choices=SCHEMES + (DIRECTED_SCHEME,), default="mb")
    imp.add_argument("--snapshot", type=int, default=0)
    imp.add_argument("--directed", action="store_true", help="treat input arcs as directed")
    imp.add_argument("--strength-mode", choices=STRENGTH_MODES, default="total")
    imp.add_argument("--out", required=True)
    imp.set_defaults(func=cmd_importance)

    ana = subs.add_parser("analyze", help="spectra, communities, measure distributions")
    _add_io_args(ana)
    ana.add_argument("--out", required=True, help="output directory")
    ana.set_defaults(func=cmd_analyze)

    pred = subs.add_parser("predict", help="fit and benchmark activity prediction")
    _add_io_args(pred)
    pred.add_argument("--target", choices=TARGETS, default="presence")
    pred.add_argument("--l2-grid", default=",".join(str(v) for v in L2_GRID))
    pred.add_argument("--change-threshold", type=float, default=0.05)
    pred.add_argument("--corr-threshold", type=float, default=0.8)
    pred.add_argument("--trials", type=int, default=100, help="null-model trials")
    pred.add_argument("--bootstrap-iters", type=int, default=1000)
    pred.add_argument("--out", required=True, help="output directory")
    pred.set_defaults(func=cmd_predict)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
