"""Command-line interface: samples -> dependency graph -> cover -> model.

Subcommands mirror the library pipeline stages (udg, ecc, mcm, stats,
simulate). Every command is deterministic given its inputs, flags and
--seed. Exit codes: 0 success, 1 input error, 2 solver budget exceeded,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis, ecc, graph, independence, mcm

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BUDGET = 2
EXIT_INTERNAL = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 1 on bad usage, not 2
        raise _UsageError(message)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default: 0)")
    p.add_argument(
        "--threads",
        type=int,
        default=0,
        help="worker threads; 0 = all cores (results are identical either way)",
    )
    p.add_argument(
        "--format",
        choices=("text", "json"),
        default="text",
        help="stdout format (default: text)",
    )


def _add_test_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--dcorr-threshold",
        type=float,
        default=0.1,
        help="independence needs distance correlation below this (default: 0.1)",
    )
    p.add_argument(
        "--p-threshold",
        type=float,
        default=0.1,
        help="independence needs permutation p-value above this (default: 0.1)",
    )
    p.add_argument(
        "--permutations",
        type=int,
        default=1000,
        help="permutations per pair test (default: 1000)",
    )
    p.add_argument(
        "--strict-exceedance",
        action="store_true",
        help="count only strictly larger permuted statistics in the p-value",
    )
    p.add_argument(
        "--header",
        action="store_true",
        help="sample file starts with a header row",
    )


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--objective",
        choices=("clique", "assignment"),
        default="clique",
        help="minimize clique count or total assignments (default: clique)",
    )
    p.add_argument(
        "--budget-seconds",
        type=float,
        default=None,
        help="abort the exact solver after this much wall time",
    )
    p.add_argument(
        "--budget-nodes",
        type=int,
        default=None,
        help="abort the exact solver after this many search nodes",
    )


def _apply_threads(threads: int) -> None:
    if threads > 0:
        import numba

        numba.set_num_threads(max(1, min(threads, numba.config.NUMBA_NUM_THREADS)))


def _objective(name: str) -> graph.Objective:
    return (
        graph.Objective.CLIQUE_COUNT
        if name == "clique"
        else graph.Objective.ASSIGNMENT_COUNT
    )


def _budget(args) -> ecc.SolverBudget | None:
    if args.budget_seconds is None and args.budget_nodes is None:
        return None
    return ecc.SolverBudget(args.budget_seconds, args.budget_nodes)


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")


def _load_model(path: str) -> mcm.MeDILCausalModel:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: line {exc.lineno}: invalid JSON") from exc
    return mcm.MeDILCausalModel.from_json_dict(data)


def _sniff_input(path: str, declared: str) -> str:
    if declared != "auto":
        return declared
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: line 1: empty input file")
    if lines[0].startswith("n ") or lines[0] == "n":
        return "graph"
    cells = [c.strip() for c in lines[0].split(",")]
    if all(c in ("0", "1") for c in cells) and len(lines) == len(cells):
        return "graph"
    return "samples"


# -- subcommands ---------------------------------------------------------------


def _cmd_udg(args) -> int:
    _apply_threads(args.threads)
    samples = independence.SampleMatrix.load(args.samples, args.header)
    udg, report = independence.estimate_udg(
        samples,
        dcorr_threshold=args.dcorr_threshold,
        p_threshold=args.p_threshold,
        num_permutations=args.permutations,
        seed=args.seed,
        strict=args.strict_exceedance,
    )
    edge_text = graph.format_edge_list(udg)
    _write(args.out_graph, edge_text)
    _write(args.out_report, json.dumps(report.to_json_dict(), indent=2) + "\n")
    if args.format == "json":
        payload = {
            "num_vertices": udg.num_vertices,
            "edges": [list(e) for e in udg.edges()],
            "report": report.to_json_dict(),
        }
        print(json.dumps(payload, indent=2))
    else:
        sys.stdout.write(edge_text)
    return EXIT_OK


def _cmd_ecc(args) -> int:
    _apply_threads(args.threads)
    g = graph.load_graph(args.graph)
    objective = _objective(args.objective)
    solver = (
        ecc.min_clique_ecc
        if objective is graph.Objective.CLIQUE_COUNT
        else ecc.min_assignment_ecc
    )
    cover = solver(g, _budget(args))
    doc = json.dumps(cover.to_json_dict(), indent=2) + "\n"
    _write(args.out, doc)
    if args.format == "json":
        sys.stdout.write(doc)
    else:
        print(
            f"objective {cover.objective.value}: value {cover.objective_value}, "
            f"{cover.num_cliques} cliques"
        )
        for c in cover.cliques:
            print("  " + " ".join(str(v) for v in c.members))
    return EXIT_OK


def _cmd_mcm(args) -> int:
    _apply_threads(args.threads)
    kind = _sniff_input(args.input, args.input_type)
    if kind == "samples":
        samples = independence.SampleMatrix.load(args.input, args.header)
        result = mcm.run_pipeline(
            samples,
            objective=_objective(args.objective),
            dcorr_threshold=args.dcorr_threshold,
            p_threshold=args.p_threshold,
            num_permutations=args.permutations,
            seed=args.seed,
            strict=args.strict_exceedance,
            budget=_budget(args),
        )
        if result.budget_error is not None:
            _write(args.out_graph, graph.format_edge_list(result.udg))
            print(f"error: {result.budget_error}", file=sys.stderr)
            return EXIT_BUDGET
        udg, cover, model = result.udg, result.cover, result.model
    else:
        udg = graph.load_graph(args.input)
        solver = (
            ecc.min_clique_ecc
            if _objective(args.objective) is graph.Objective.CLIQUE_COUNT
            else ecc.min_assignment_ecc
        )
        cover = solver(udg, _budget(args))
        model = mcm.build_mcm(cover, udg.num_vertices, udg.vertex_labels)
        if not mcm.is_observationally_consistent(model, udg):
            raise RuntimeError("constructed model failed to reproduce the input graph")
    _write(args.out_graph, graph.format_edge_list(udg))
    _write(args.out_model, json.dumps(model.to_json_dict(), indent=2) + "\n")
    _write(args.out_dot, model.to_dot())
    if args.format == "json":
        print(json.dumps(model.to_json_dict(), indent=2))
    else:
        print(
            f"{model.num_latents} latents over {model.num_measurements} "
            f"measurements, {model.num_edges} edges, cover value "
            f"{cover.objective_value} ({cover.objective.value})"
        )
        labels = model.latent_labels or ()
        for a in range(model.num_latents):
            name = labels[a] if labels else f"L{a}"
            kids = ",".join(str(b) for b in model.children_of_latent(a))
            print(f"  {name} -> {kids}")
    return EXIT_OK


def _cmd_stats(args) -> int:
    model = _load_model(args.model)
    stats = analysis.structure_stats_dict(model)
    if args.out_prefix:
        prefix = args.out_prefix
        _write(
            prefix + "indegree.csv",
            analysis.histogram_to_csv(analysis.indegree_histogram(model), "indegree"),
        )
        _write(
            prefix + "outdegree.csv",
            analysis.histogram_to_csv(
                analysis.outdegree_histogram(model), "outdegree"
            ),
        )
        _write(
            prefix + "shared_latents.csv",
            analysis.matrix_to_csv(analysis.shared_latents_matrix(model)),
        )
        _write(
            prefix + "shared_measurements.csv",
            analysis.matrix_to_csv(analysis.shared_measurements_matrix(model)),
        )
        _write(prefix + "stats.json", json.dumps(stats, indent=2) + "\n")
    if args.format == "json":
        print(json.dumps(stats, indent=2))
    else:
        print(f"latents: {stats['num_latents']}")
        print(f"measurements: {stats['num_measurements']}")
        print(f"edges: {stats['num_edges']}")
        print("indegree histogram: " + str(stats["indegree_histogram"]))
        print("outdegree histogram: " + str(stats["outdegree_histogram"]))
    return EXIT_OK


def _cmd_simulate(args) -> int:
    if args.structure == "triangle-tail":
        structure = analysis.triangle_tail_structure()
    elif args.structure == "cycle-chord":
        structure = analysis.cycle_chord_structure()
    else:
        structure = _load_model(args.structure)
    model = analysis.synthetic_from_mcm(
        structure, weight=args.weight, noise_sd=args.noise_sd, link=args.link
    )
    samples = analysis.simulate(model, args.samples, seed=args.seed)
    csv = samples.to_csv(include_header=args.header)
    _write(args.out, csv)
    if not args.out:
        sys.stdout.write(csv)
    else:
        print(f"wrote {samples.num_observations} observations of "
              f"{samples.num_variables} variables to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="latentcover",
        description=(
            "Learn minimal latent causal models from raw samples: estimate "
            "pairwise dependence nonparametrically, cover the dependency "
            "graph with a provably minimum set of cliques, and emit the "
            "latent-to-measurement DAG with structural analyses."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "udg",
        help="estimate the undirected dependency graph from samples",
        description=(
            "Estimate the undirected dependency graph from a CSV of samples "
            "(rows = observations, columns = variables) via distance "
            "correlation with a seeded permutation test."
        ),
    )
    p.add_argument("samples", help="CSV sample file")
    p.add_argument("--out-graph", help="write the graph as an edge list here")
    p.add_argument("--out-report", help="write the per-pair test report (JSON) here")
    _add_test_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_udg)

    p = sub.add_parser(
        "ecc",
        help="exact minimum edge clique cover of a dependency graph",
        description=(
            "Compute a provably minimum edge clique cover (fewest cliques or "
            "fewest assignments) of a graph given as an edge list or dense "
            "0/1 matrix."
        ),
    )
    p.add_argument("graph", help="graph file (edge list or dense 0/1 rows)")
    p.add_argument("--out", help="write the cover document (JSON) here")
    _add_solver_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_ecc)

    p = sub.add_parser(
        "mcm",
        help="build the minimal latent causal model",
        description=(
            "Build a minimal latent-to-measurement causal model from samples "
            "(full pipeline) or directly from a dependency graph file."
        ),
    )
    p.add_argument("input", help="sample CSV or graph file")
    p.add_argument(
        "--input-type",
        choices=("auto", "samples", "graph"),
        default="auto",
        help="how to read the input (default: sniff)",
    )
    p.add_argument("--out-graph", help="write the (estimated) dependency graph here")
    p.add_argument("--out-model", help="write the model document (JSON) here")
    p.add_argument("--out-dot", help="write a Graphviz rendering here")
    _add_test_flags(p)
    _add_solver_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_mcm)

    p = sub.add_parser(
        "stats",
        help="structural statistics of a model",
        description=(
            "Degree histograms and shared-parent/shared-child count matrices "
            "for a model document produced by the mcm subcommand."
        ),
    )
    p.add_argument("model", help="model document (JSON)")
    p.add_argument(
        "--out-prefix",
        help="write indegree/outdegree/shared_* CSVs and stats.json with this prefix",
    )
    _add_common(p)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser(
        "simulate",
        help="draw samples from a synthetic model",
        description=(
            "Generate joint samples of the measurement variables from a "
            "built-in or saved structure with a linear or quadratic link."
        ),
    )
    p.add_argument(
        "--structure",
        default="triangle-tail",
        help=(
            "'triangle-tail', 'cycle-chord', or a path to a model document "
            "(default: triangle-tail)"
        ),
    )
    p.add_argument(
        "--samples", type=int, default=1000, help="observations to draw (default: 1000)"
    )
    p.add_argument(
        "--link",
        choices=("linear", "quadratic"),
        default="linear",
        help="functional link from latents to measurements (default: linear)",
    )
    p.add_argument(
        "--weight", type=float, default=1.0, help="edge weight (default: 1.0)"
    )
    p.add_argument(
        "--noise-sd", type=float, default=0.1, help="noise level (default: 0.1)"
    )
    p.add_argument("--out", help="write the sample CSV here (default: stdout)")
    p.add_argument(
        "--header", action="store_true", help="include a header row in the CSV"
    )
    _add_common(p)
    p.set_defaults(func=_cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except ecc.BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # invariant violations and genuine bugs
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
