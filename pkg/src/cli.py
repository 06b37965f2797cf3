"""
Command-line entry point: generate, detect, evaluate, profile, experiment, schema.
"""

import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional

import yaml

from data_loader import (
    EDGES_FILE,
    NetworkLoader,
    read_edge_list,
    read_membership,
    to_builtin,
    write_json,
    write_membership,
)
from detection import ALGORITHMS, CommunityDetector
from evaluation import evaluate_partition
from experiment import (
    ENV_OUTPUT_DIR,
    ExperimentRunner,
    load_experiment_config,
    resolve_output_dir,
)
from generator import (
    REGIME_PRESETS,
    BimodalMixing,
    ConstantMixing,
    LfrGenerator,
    LfrParams,
    preset_params,
)
from graph_core import Graph
from schemas.config_schema import ExperimentConfig
from topo_measures import TopologyProfiler
from utils.logger import setup_logging

logger = logging.getLogger(__name__)


def _load_logging_config(config_path: str) -> Dict[str, Any]:
    if not os.path.exists(config_path):
        return {}
    with open(config_path, "r") as file:
        return (yaml.safe_load(file) or {}).get("logging", {}) or {}


def _read_graph(path: str, config_path: str) -> Graph:
    """Accept an edge-list file or a network directory."""
    if os.path.isdir(path):
        graph, _, _ = NetworkLoader(config_path).load_network(path)
        return graph
    return read_edge_list(path)


def _mixing(args: argparse.Namespace, generator: LfrGenerator):
    if args.mixing == "constant":
        if args.mu is None:
            raise ValueError("--mixing constant requires --mu")
        return ConstantMixing(args.mu)
    default = generator.default_mixing()
    return BimodalMixing(
        args.mixing_mean if args.mixing_mean is not None else default.mean,
        args.mixing_sd if args.mixing_sd is not None else default.sd,
    )


def cmd_generate(args: argparse.Namespace) -> int:
    generator = LfrGenerator(args.config)
    mixing = _mixing(args, generator)
    if args.preset is not None:
        params = preset_params(args.preset, seed=args.seed, mixing=mixing)
    else:
        if args.n is None or args.avg_degree is None or args.max_degree is None:
            raise ValueError("--n, --avg-degree and --max-degree are required without --preset")
        params = LfrParams(
            n=args.n,
            avg_degree=args.avg_degree,
            max_degree=args.max_degree,
            gamma=args.gamma,
            beta=args.beta,
            mixing=mixing,
            seed=args.seed,
        )

    network = generator.generate(params)
    output_dir = resolve_output_dir(args.output)
    generator.save(network, output_dir)

    meta = network.metadata
    print("\n=== Generated Network ===")
    print(f"Nodes: {meta['node_count']:,}")
    print(f"Edges: {meta['edge_count']:,}")
    print(f"Mean degree: {meta['achieved_mean_degree']:.3f}")
    print(f"Max degree: {meta['achieved_max_degree']}")
    print(f"Communities: {meta['community_count']}")
    print(f"Mixing deviation: {meta['mixing_deviation']:.4f}")
    print(f"Output path: {output_dir}")
    return 0


def cmd_detect(args: argparse.Namespace) -> int:
    graph = _read_graph(args.graph, args.config)
    detector = CommunityDetector(args.config)
    overrides = {
        "walktrap_steps": args.walktrap_steps,
        "mcl_inflation": args.mcl_inflation,
        "mcl_expansion": args.mcl_expansion,
        "mcl_prune_threshold": args.mcl_prune_threshold,
        "lpa_max_sweeps": args.lpa_max_sweeps,
    }
    config = detector.make_config(args.algorithm, seed=args.seed, **overrides)
    result = detector.detect(graph, config)

    output_dir = resolve_output_dir(args.output)
    membership_path = os.path.join(output_dir, f"{args.algorithm}.membership")
    write_membership(result.partition, membership_path)
    write_json(
        {**result.to_metadata(), "config": config.to_dict()},
        os.path.join(output_dir, f"{args.algorithm}.meta.json"),
    )

    print("\n=== Detection ===")
    print(f"Algorithm: {args.algorithm}")
    print(f"Communities: {result.partition.community_count}")
    q_text = f"{result.modularity:.4f}" if result.modularity is not None else "n/a"
    print(f"Modularity: {q_text}")
    print(f"Converged: {result.converged}")
    print(f"Membership: {membership_path}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    reference = read_membership(args.reference)
    estimated = read_membership(args.estimated, reference.node_count)
    scores = evaluate_partition(reference, estimated)
    if args.output:
        write_json(scores, os.path.join(args.output, "scores.json"))
    print(json.dumps(to_builtin(scores), indent=2, sort_keys=True))
    return 0


def cmd_profile(args: argparse.Namespace) -> int:
    graph = _read_graph(args.graph, args.config)
    partition = read_membership(args.membership, graph.node_count)
    profiler = TopologyProfiler(args.config)

    output_dir = resolve_output_dir(args.output)
    profiles = profiler.profile(graph, partition, seed=args.seed)
    series = profiler.curves(profiles, args.source)
    paths = profiler.write_curves(series.values(), os.path.join(output_dir, "curves"))

    histogram = profiler.embeddedness_summary(graph, partition, args.source)
    histogram_path = os.path.join(output_dir, f"embeddedness__{args.source}.csv")
    histogram.to_csv(histogram_path, index=False, float_format="%.12g")

    fit = profiler.fit_sizes(partition, seed=args.seed)
    write_json(fit, os.path.join(output_dir, f"power_law__{args.source}.json"))

    print("\n=== Community Profile ===")
    print(f"Communities: {partition.community_count}")
    print(f"Curve files: {len(paths)}")
    if fit["reliable"]:
        print(f"Size exponent: {fit['exponent']:.3f} (x_min={fit['x_min']}, p={fit['p_value']})")
    else:
        print("Size exponent: fit unreliable")
    print(f"Output path: {output_dir}")
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    cfg = load_experiment_config(args.experiment)
    if args.seed is not None:
        cfg = cfg.model_copy(update={"master_seed": args.seed})
    if args.workers is not None:
        cfg = cfg.model_copy(update={"workers": args.workers})

    report = ExperimentRunner(args.config).run(cfg, args.output)

    print("\n=== Experiment ===")
    print(f"Score rows: {len(report.scores)}")
    print(f"Curves: {len(report.curves)}")
    print(f"Failures: {len(report.failures)}")
    if not report.ranking.empty:
        columns = ["regime", "source", "nmi", "nmi_rank"]
        print(report.ranking[columns].to_string(index=False))
    return 0


def cmd_schema(args: argparse.Namespace) -> int:
    print(json.dumps(ExperimentConfig.model_json_schema(), indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default="config.yaml", help="Path to config file")
    common.add_argument("--log-level", help="Override the logging level from config")
    common.add_argument(
        "--output",
        help=f"Output directory (default: ${ENV_OUTPUT_DIR}, then config, then data/runs)",
    )
    seeded = argparse.ArgumentParser(add_help=False, parents=[common])
    seeded.add_argument("--seed", type=int, default=0, help="Random seed")

    parser = argparse.ArgumentParser(
        description="LFR benchmark generation and community detection evaluation"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", parents=[seeded], help="Generate an LFR network")
    gen.add_argument("--preset", type=int, choices=sorted(REGIME_PRESETS))
    gen.add_argument("--n", type=int, help="Number of nodes")
    gen.add_argument("--avg-degree", type=float, help="Target average degree")
    gen.add_argument("--max-degree", type=int, help="Maximal degree")
    gen.add_argument("--gamma", type=float, default=3.0, help="Degree exponent")
    gen.add_argument("--beta", type=float, default=2.0, help="Community size exponent")
    gen.add_argument("--mixing", choices=["constant", "bimodal"], default="bimodal")
    gen.add_argument("--mu", type=float, help="Mixing coefficient for constant mixing")
    gen.add_argument("--mixing-mean", type=float, help="Bimodal normal mean")
    gen.add_argument("--mixing-sd", type=float, help="Bimodal normal standard deviation")
    gen.set_defaults(func=cmd_generate)

    det = sub.add_parser("detect", parents=[seeded], help="Run a detection algorithm")
    det.add_argument("--graph", required=True, help=f"Edge list or directory with {EDGES_FILE}")
    det.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    det.add_argument("--walktrap-steps", type=int)
    det.add_argument("--mcl-expansion", type=int)
    det.add_argument("--mcl-inflation", type=float)
    det.add_argument("--mcl-prune-threshold", type=float)
    det.add_argument("--lpa-max-sweeps", type=int)
    det.set_defaults(func=cmd_detect)

    ev = sub.add_parser("evaluate", parents=[seeded], help="Score a partition")
    ev.add_argument("--reference", required=True, help="Reference membership file")
    ev.add_argument("--estimated", required=True, help="Estimated membership file")
    ev.set_defaults(func=cmd_evaluate)

    prof = sub.add_parser("profile", parents=[seeded], help="Community profile curves")
    prof.add_argument("--graph", required=True, help=f"Edge list or directory with {EDGES_FILE}")
    prof.add_argument("--membership", required=True, help="Membership file")
    prof.add_argument("--source", default="reference", help="Source tag in file names")
    prof.set_defaults(func=cmd_profile)

    exp = sub.add_parser("experiment", parents=[common], help="Run a full experiment")
    exp.add_argument("experiment", help="Experiment config file (JSON or YAML)")
    exp.add_argument("--seed", type=int, help="Override master_seed of the experiment file")
    exp.add_argument("--workers", type=int, help="Parallel cells")
    exp.set_defaults(func=cmd_experiment)

    schema = sub.add_parser(
        "schema", parents=[seeded], help="Print the experiment config JSON schema"
    )
    schema.set_defaults(func=cmd_schema)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    log_config = _load_logging_config(args.config)
    setup_logging(args.log_level or log_config.get("level", "INFO"), log_config.get("file"))

    try:
        return args.func(args)
    except Exception as e:
        logger.error(f"Error in {args.command}: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
