"""Command-line interface.

Subcommands: simplify, measure, nullmodel, infer-sbm, fit, run, fetch-corpus,
plot-data. All randomized commands take --seed and are reproducible.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__, sbm
from .fitting import MODEL_NAMES, ensemble_records, fit_with_uncertainty
from .geodesic import EstimatorConfig, estimate_mean_geodesic
from .graph import read_edge_list, simplify, write_label_map
from .measures import CSV_FIELDS, compute_measures, mean_geodesic_exact
from .pipeline import (
    CorpusManifest,
    RunConfig,
    emit_plot_data,
    fetch_corpus,
    load_result,
    run_corpus,
    write_outputs,
)

POWER_FORMS = ("power-law", "logarithmic")


def _add_estimator_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--batch-size", type=int, default=1000)
    parser.add_argument("--threshold", type=float, default=0.1)
    parser.add_argument("--max-batches", type=int, default=1000)


def _load_graph(args):
    raw = read_edge_list(args.input, delimiter=args.delimiter, weights=args.weights)
    return simplify(raw)


def _add_input_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="edge-list file (optionally .gz)")
    parser.add_argument("--delimiter", default=None)
    parser.add_argument("--weights", choices=("auto", "required", "ignore"), default="auto")


def _write_rows(path: str | None, header, rows) -> None:
    out = open(path, "w", newline="") if path else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if path:
            out.close()


def _record_row(record, method: str, batches: int, converged: bool) -> list:
    row = record.to_csv_row()
    row += [method, str(batches), str(int(converged))]
    return row


def cmd_simplify(args) -> int:
    g = _load_graph(args)
    out = open(args.output, "w") if args.output else sys.stdout
    try:
        out.write(f"# n={g.n} m={g.m}\n")
        u, v = g.edge_arrays()
        for a, b in zip(u.tolist(), v.tolist()):
            out.write(f"{a} {b}\n")
    finally:
        if args.output:
            out.close()
    if args.label_map:
        write_label_map(g, args.label_map)
    if g.stats is not None and args.verbose:
        print(
            f"collapsed={g.stats.multi_edges_collapsed} loops={g.stats.self_loops_removed} "
            f"fractional_weights={g.stats.fractional_weights_seen} "
            f"loop_only_nodes={g.stats.loop_only_nodes}",
            file=sys.stderr,
        )
    return 0


def cmd_measure(args) -> int:
    g = _load_graph(args)
    if g.n <= args.exact_path_cutoff:
        record = compute_measures(g, mean_geodesic=mean_geodesic_exact(g))
        method, batches, converged = "exact", 0, True
    else:
        estimate = estimate_mean_geodesic(
            g,
            EstimatorConfig(
                batch_size=args.batch_size,
                threshold=args.threshold,
                max_batches=args.max_batches,
                seed=args.seed,
            ),
        )
        record = compute_measures(g, mean_geodesic=estimate.value)
        method, batches, converged = "estimator", estimate.batches, estimate.converged
    header = CSV_FIELDS + ("geodesic_method", "geodesic_batches", "geodesic_converged")
    if args.format == "json":
        payload = record.to_json_dict()
        payload.update(
            geodesic_method=method, geodesic_batches=batches, geodesic_converged=converged
        )
        text = json.dumps(payload, indent=2, sort_keys=True)
        if args.output:
            Path(args.output).write_text(text + "\n")
        else:
            print(text)
    else:
        _write_rows(args.output, header, [_record_row(record, method, batches, converged)])
    return 0


def cmd_nullmodel(args) -> int:
    g = _load_graph(args)
    estimator = EstimatorConfig(
        batch_size=args.batch_size, threshold=args.threshold, max_batches=args.max_batches
    )
    records = ensemble_records(
        g,
        args.model,
        sample_count=args.samples,
        seed=args.seed,
        estimator_config=estimator,
        swaps_per_edge=args.swaps_per_edge,
        max_attempts=args.max_attempts,
        inference_runs=args.runs,
    )
    header = CSV_FIELDS + ("geodesic_method", "geodesic_batches", "geodesic_converged")
    rows = [
        _record_row(record, "estimator", est.batches, est.converged) for record, est in records
    ]
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_rows(str(out_dir / "draws.csv"), header, rows)
        expectations = {}
        for name in ("mean_geodesic", "clustering", "assortativity"):
            values = [getattr(r, name) for r, _ in records if getattr(r, name) is not None]
            expectations[name] = sum(values) / len(values) if values else None
        (out_dir / "expectations.json").write_text(
            json.dumps({"model": args.model, "samples": args.samples, "expected": expectations},
                       indent=2, sort_keys=True) + "\n"
        )
    else:
        _write_rows(None, header, rows)
    return 0


def cmd_infer_sbm(args) -> int:
    g = _load_graph(args)
    runs, selected = sbm.sample_parameter_sets_detailed(
        g, runs=args.runs, samples=args.posterior_samples, seed=args.seed,
        weighting=args.weighting,
    )
    payload = {
        "runs": [
            {
                "run_index": r.run_index,
                "seed": r.seed,
                "description_length": r.description_length,
                "n_blocks": r.params.n_blocks,
            }
            for r in runs
        ],
        "samples": [p.to_json_dict() for p in selected],
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def cmd_fit(args) -> int:
    points = []
    with open(args.points, newline="") as fh:
        for row in csv.DictReader(fh):
            y = row["y"].strip()
            points.append((float(row["n"]), float(y) if y else None))
    fit = fit_with_uncertainty(points, args.form, resamples=args.resamples, seed=args.seed)
    text = json.dumps(fit.to_json_dict(), indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def cmd_run(args) -> int:
    manifest = CorpusManifest.load(args.manifest)
    models = tuple(m for m in (args.models or "").split(",") if m)
    config = RunConfig(
        models=models,
        samples=args.samples,
        group_by=args.group_by,
        seed=args.seed,
        exact_cutoff=args.exact_path_cutoff,
        batch_size=args.batch_size,
        threshold=args.threshold,
        max_batches=args.max_batches,
        swaps_per_edge=args.swaps_per_edge,
        max_attempts=args.max_attempts,
        inference_runs=args.runs,
        bootstrap_resamples=args.resamples,
    )
    result = run_corpus(manifest, config)
    write_outputs(result, args.out)
    if args.plot_data:
        emit_plot_data(result, Path(args.out) / "plot_data")
    for network_id, error in result.failures:
        print(f"FAILED {network_id}: {error}", file=sys.stderr)
    print(
        f"processed {len(result.results)} networks, {len(result.failures)} failures -> {args.out}",
        file=sys.stderr,
    )
    return 0 if result.ok else 1


def cmd_fetch_corpus(args) -> int:
    manifest = fetch_corpus(args.source, args.checksums, args.dest)
    print(manifest)
    return 0


def cmd_plot_data(args) -> int:
    result = load_result(args.results)
    out = args.out or str(Path(args.results) / "plot_data")
    written = emit_plot_data(result, out, line_points=args.line_points)
    print(f"wrote {len(written)} files -> {out}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netscale", description="Network scaling-law analysis toolkit"
    )
    parser.add_argument("--version", action="version", version=f"netscale {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simplify", help="parse and simplify an edge list")
    _add_input_args(p)
    p.add_argument("--output", default=None, help="simplified edge list (default stdout)")
    p.add_argument("--label-map", default=None, help="write index->label map here")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_simplify)

    p = sub.add_parser("measure", help="compute the four structural measures")
    _add_input_args(p)
    p.add_argument("--exact-path-cutoff", type=int, default=20000)
    _add_estimator_args(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("nullmodel", help="sample a null-model ensemble and measure it")
    _add_input_args(p)
    p.add_argument("--model", choices=MODEL_NAMES, required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--swaps-per-edge", type=int, default=20)
    p.add_argument("--max-attempts", type=int, default=100)
    p.add_argument("--runs", type=int, default=100, help="inference runs for DC-SBM models")
    _add_estimator_args(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="output directory (default stdout)")
    p.set_defaults(func=cmd_nullmodel)

    p = sub.add_parser("infer-sbm", help="sample DC-SBM parameter sets by repeated inference")
    _add_input_args(p)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--posterior-samples", type=int, default=50)
    p.add_argument("--weighting", choices=("inverse-dl", "boltzmann"), default="inverse-dl")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_infer_sbm)

    p = sub.add_parser("fit", help="fit a scaling law to an n,y point table")
    p.add_argument("--points", required=True, help="CSV with columns n,y")
    p.add_argument("--form", choices=POWER_FORMS, required=True)
    p.add_argument("--resamples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("run", help="run the full pipeline over a corpus manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--models", default="", help="comma-separated null models")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--group-by", choices=("domain", "subdomain"), default="domain")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact-path-cutoff", type=int, default=20000)
    _add_estimator_args(p)
    p.add_argument("--swaps-per-edge", type=int, default=20)
    p.add_argument("--max-attempts", type=int, default=100)
    p.add_argument("--runs", type=int, default=100, help="inference runs for DC-SBM models")
    p.add_argument("--resamples", type=int, default=10000, help="bootstrap resamples")
    p.add_argument("--plot-data", action="store_true", help="also emit plot data")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("fetch-corpus", help="download/verify/unpack a corpus archive")
    p.add_argument("--source", required=True, help="archive URL or local path")
    p.add_argument("--checksums", default=None, help="sha256sum-format checksum file")
    p.add_argument("--dest", required=True)
    p.set_defaults(func=cmd_fetch_corpus)

    p = sub.add_parser("plot-data", help="emit scatter and fit-line CSVs from run outputs")
    p.add_argument("--results", required=True, help="directory written by `run`")
    p.add_argument("--out", default=None)
    p.add_argument("--line-points", type=int, default=100)
    p.set_defaults(func=cmd_plot_data)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
