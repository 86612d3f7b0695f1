"""Command-line interface.

Subcommands:
  score    evaluate one table against a source text
  graph    show the fact graph of a table or a source text
  perturb  write a labeled benchmark directory for one table
  bench    score a benchmark directory and report detection quality

Results go to stdout as JSON; diagnostics go to stderr.  Exit codes:
0 success, 2 unusable input, 3 extraction/refinement backend failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .align import align_deterministic
from .errors import (
    AuthFailure,
    BackendProtocolError,
    BackendUnavailable,
    DegenerateRanking,
    GridfactError,
    MalformedResponse,
    Unreachable,
)
from .graphify import FactLineBackend, table_to_graph, text_to_graph
from .model import Table, Weights, graph_counts
from .normalize import DEFAULT_UNITS, UnitTable
from .perturb import (
    PerturbationSpec,
    PerturbedInstance,
    PerturbGroup,
    PerturbTier,
    rubric_rank,
    write_bench,
)
from .pipeline import evaluate_table
from .rankstats import (
    Ranking,
    footrule,
    kendall_tau,
    rbo,
    sens_spec,
    spearman_rho,
    tie_ratio,
    weighted_kendall,
)
from .score import penalty_score
from .table_io import parse_html, parse_markdown

logger = logging.getLogger(__name__)

_BACKEND_ERRORS = (
    AuthFailure,
    BackendProtocolError,
    BackendUnavailable,
    MalformedResponse,
    Unreachable,
)


def _emit(payload: dict, *, pretty: bool, out: str | None) -> None:
    if pretty:
        text = json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True)
    else:
        text = json.dumps(payload, ensure_ascii=False, separators=(",", ":"), sort_keys=True)
    text += "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_table(path: str, fmt: str) -> Table:
    text = Path(path).read_text(encoding="utf-8")
    if fmt == "auto":
        fmt = "html" if Path(path).suffix.lower() in (".html", ".htm") else "markdown"
    result = parse_html(text) if fmt == "html" else parse_markdown(text)
    for lineno, message in result.diagnostics.warnings:
        logger.warning("%s:%d: %s", path, lineno, message)
    return result.table


def _load_weights(path: str | None) -> Weights:
    if path is None:
        return Weights()
    known = {f.name for f in dataclasses.fields(Weights)}
    values: dict = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        name, eq, value = stripped.partition("=")
        name, value = name.strip(), value.strip()
        if not eq or not name or not value:
            raise ValueError(f"{path}:{lineno}: expected 'name = value'")
        if name not in known:
            raise ValueError(f"{path}:{lineno}: unknown weight {name!r}")
        try:
            values[name] = float(value)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: {value!r} is not a number") from None
    return Weights(**values)


def _load_units(path: str | None) -> UnitTable:
    if path is None:
        return DEFAULT_UNITS
    return UnitTable.from_config(path)


def _make_backends(args):
    """(extraction, refinement) per --backend; the llm module loads lazily."""
    if args.backend == "offline":
        return FactLineBackend(), None
    from . import llm

    config = llm.BackendConfig(
        base_url=args.base_url,
        model=args.model,
        cache_dir=args.cache_dir,
        temperature=0.0 if args.deterministic_sampling else None,
    )
    client = llm.ChatClient(config)
    refinement = llm.LlmRefinementBackend(client) if args.refine else None
    return llm.LlmExtractionBackend(client), refinement


def _add_backend_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", choices=("offline", "llm"), default="offline",
                   help="fact extraction: offline fact-lines or a hosted model")
    p.add_argument("--model", default="gpt-4o", help="hosted model name (llm backend)")
    p.add_argument("--base-url", default="https://api.openai.com/v1",
                   help="chat-completions endpoint base (llm backend)")
    p.add_argument("--cache-dir", default=None,
                   help="directory for cached model replies (llm backend)")
    p.add_argument("--refine", action="store_true",
                   help="second alignment pass over leftovers via the hosted model")
    p.add_argument("--deterministic-sampling", action="store_true",
                   help="request temperature 0 from the hosted model")


def cmd_score(args) -> int:
    if args.refine and args.backend != "llm":
        raise ValueError("--refine requires --backend llm")
    table = _load_table(args.table, args.format)
    source_text = Path(args.source).read_text(encoding="utf-8")
    extraction, refinement = _make_backends(args)
    result = evaluate_table(
        table,
        source_text,
        extraction=extraction,
        refinement=refinement,
        weights=_load_weights(args.weights),
        subject_col=args.subject_col,
        units=_load_units(args.units),
        include_trace=not args.no_trace,
    )
    _emit(result.to_json_dict(include_trace=not args.no_trace),
          pretty=args.pretty, out=args.out)
    return 0


def cmd_graph(args) -> int:
    units = _load_units(args.units)
    if (args.table is None) == (args.source is None):
        raise ValueError("pass exactly one of --table or --source")
    if args.table is not None:
        g = table_to_graph(_load_table(args.table, args.format), args.subject_col, units)
    else:
        extraction, _ = _make_backends(args)
        g = text_to_graph(Path(args.source).read_text(encoding="utf-8"), extraction, units)
    subjects, predicates, facts = graph_counts(g)
    payload = {
        "graph": g.to_json_dict(),
        "n_subjects": subjects,
        "n_predicates": predicates,
        "n_facts": facts,
    }
    _emit(payload, pretty=args.pretty, out=args.out)
    return 0


def cmd_perturb(args) -> int:
    table = _load_table(args.table, args.format)
    manifest = write_bench(table, args.seed, args.out_dir, args.subject_col)
    _emit(manifest, pretty=args.pretty, out=args.out)
    return 0


def _instance_from_entry(entry: dict, table: Table) -> PerturbedInstance:
    spec = PerturbationSpec(
        id=entry["id"],
        group=PerturbGroup(entry["group"]),
        tier=PerturbTier(entry["tier"]),
        kind=entry["kind"],
        rng_seed=entry["rng_seed"],
        parameters=entry.get("parameters", {}),
        substituted_from=entry.get("substituted_from"),
    )
    return PerturbedInstance(
        table=table,
        spec=spec,
        label=int(entry["label"]),
        edit_log=tuple(entry.get("edit_log", ())),
    )


def cmd_bench(args) -> int:
    bench = Path(args.bench_dir)
    try:
        manifest = json.loads((bench / "manifest.json").read_text(encoding="utf-8"))
    except ValueError as exc:
        raise ValueError(f"unreadable manifest.json: {exc}") from exc
    for required in ("gt_file", "entries", "subject_col"):
        if required not in manifest:
            raise ValueError(f"manifest.json lacks {required!r}")
    weights = _load_weights(args.weights)
    gt_table = _load_table(str(bench / manifest["gt_file"]), "markdown")
    gt_subject_col = int(manifest["subject_col"])
    gt_graph = table_to_graph(gt_table, gt_subject_col)

    entries = list(manifest["entries"])
    instances = []
    for entry in entries:
        table = _load_table(str(bench / entry["file"]), "markdown")
        instances.append(_instance_from_entry(entry, table))

    def score_one(pair) -> float:
        entry, inst = pair
        g_var = table_to_graph(inst.table, int(entry.get("subject_col", gt_subject_col)))
        report = align_deterministic(g_var, gt_graph)
        return penalty_score(report, g_var, gt_graph, weights, include_trace=False).final

    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        scores = list(pool.map(score_one, zip(entries, instances)))

    ids = [e["id"] for e in entries]
    labels = [int(e["label"]) for e in entries]
    per_variant = [
        {
            "id": e["id"],
            "kind": e["kind"],
            "group": e["group"],
            "tier": e["tier"],
            "label": labels[i],
            "file": e["file"],
            "score": repr(scores[i]),
            "flagged": scores[i] > args.threshold,
        }
        for i, e in enumerate(entries)
    ]
    per_variant.sort(key=lambda d: d["id"])

    by_tier = {}
    for tier in ("easy", "medium", "hard"):
        idx = [i for i, e in enumerate(entries) if e["tier"] == tier]
        if idx:
            counts = sens_spec([scores[i] for i in idx], [labels[i] for i in idx], args.threshold)
            by_tier[tier] = counts.to_json_dict()
    confusion = {
        "overall": sens_spec(scores, labels, args.threshold).to_json_dict(),
        "by_tier": by_tier,
    }

    metric = Ranking.from_scores(ids, scores)
    oracle = Ranking(tuple(rubric_rank(gt_table, instances, gt_subject_col)))

    def guarded(fn, *fn_args):
        try:
            return fn(*fn_args)
        except DegenerateRanking as exc:
            logger.warning("rank statistic unavailable: %s", exc)
            return None

    rank_stats = {
        "spearman_rho": guarded(spearman_rho, metric, oracle),
        "kendall_tau": guarded(kendall_tau, metric, oracle),
        "weighted_kendall": guarded(weighted_kendall, oracle, metric),
        "rbo": guarded(rbo, oracle, metric, args.rbo_persistence),
        "footrule": guarded(footrule, oracle, metric),
        "tie_ratio": guarded(tie_ratio, scores),
    }

    payload = {
        "threshold": args.threshold,
        "weights": weights.to_json_dict(),
        "per_variant": per_variant,
        "confusion": confusion,
        "rank_stats": rank_stats,
        "oracle_order": list(oracle.items),
        "metric_order": list(metric.items),
    }
    _emit(payload, pretty=args.pretty, out=args.out)
    return 0


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pretty", action="store_true", help="indent the JSON output")
    p.add_argument("--out", default=None, help="write the JSON to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridfact",
        description="Reference-free table scoring against a source text.",
    )
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="show informational diagnostics on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="score a table against a source text")
    p_score.add_argument("--table", required=True, help="table file (markdown or html)")
    p_score.add_argument("--source", required=True, help="source text file")
    p_score.add_argument("--format", choices=("auto", "markdown", "html"), default="auto")
    p_score.add_argument("--subject-col", type=int, default=0,
                         help="index of the entity-name column (default 0)")
    p_score.add_argument("--weights", default=None, help="weight overrides, 'name = value' lines")
    p_score.add_argument("--units", default=None, help="JSON overrides for value parsing")
    p_score.add_argument("--no-trace", action="store_true",
                         help="omit the per-fact alignment trace from the output")
    _add_backend_flags(p_score)
    _add_output_flags(p_score)
    p_score.set_defaults(fn=cmd_score)

    p_graph = sub.add_parser("graph", help="print the fact graph of a table or text")
    p_graph.add_argument("--table", default=None, help="table file (markdown or html)")
    p_graph.add_argument("--source", default=None, help="source text file")
    p_graph.add_argument("--format", choices=("auto", "markdown", "html"), default="auto")
    p_graph.add_argument("--subject-col", type=int, default=0)
    p_graph.add_argument("--units", default=None, help="JSON overrides for value parsing")
    _add_backend_flags(p_graph)
    _add_output_flags(p_graph)
    p_graph.set_defaults(fn=cmd_graph)

    p_perturb = sub.add_parser("perturb", help="write a labeled benchmark for one table")
    p_perturb.add_argument("--table", required=True, help="table file (markdown or html)")
    p_perturb.add_argument("--format", choices=("auto", "markdown", "html"), default="auto")
    p_perturb.add_argument("--seed", type=int, default=0)
    p_perturb.add_argument("--subject-col", type=int, default=0)
    p_perturb.add_argument("--out-dir", required=True, help="directory for the benchmark files")
    _add_output_flags(p_perturb)
    p_perturb.set_defaults(fn=cmd_perturb)

    p_bench = sub.add_parser("bench", help="score a benchmark directory")
    p_bench.add_argument("bench_dir", help="directory produced by the perturb command")
    p_bench.add_argument("--threshold", type=float, default=0.0,
                         help="flag variants whose score exceeds this (default 0)")
    p_bench.add_argument("--jobs", type=int, default=4, help="concurrent scoring workers")
    p_bench.add_argument("--weights", default=None, help="weight overrides, 'name = value' lines")
    p_bench.add_argument("--rbo-persistence", type=float, default=0.9,
                         help="top-weightedness of the overlap statistic (0..1)")
    _add_output_flags(p_bench)
    p_bench.set_defaults(fn=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.fn(args)
    except _BACKEND_ERRORS as exc:
        print(f"gridfact: backend failure: {exc}", file=sys.stderr)
        return 3
    except (GridfactError, OSError, ValueError) as exc:
        print(f"gridfact: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
