"""
Batch experiment driver: generate network samples per regime, run the
configured algorithms, score them against the reference with both
evaluation families and write the report tables.
"""

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import yaml
from pydantic import ValidationError
from tqdm import tqdm

from data_loader import NetworkLoader, write_json, write_membership
from detection import CommunityDetector, load_external_partition
from evaluation import (
    CellResult,
    EvaluationReport,
    ReportError,
    assemble_report,
    evaluate_partition,
)
from generator import LfrGenerator
from graph_core import Graph
from partition import Partition
from schemas.config_schema import AlgorithmSchema, ExperimentConfig, RegimeSchema
from topo_measures import TopologyProfiler, write_curves
from utils.monitoring import RunMonitor

logger = logging.getLogger(__name__)

ENV_OUTPUT_DIR = "COMMUNITY_BENCH_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "data/runs"
DEFAULT_REGIME_STRIDE = 1000

__all__ = [
    "ExperimentConfigError",
    "ExperimentRunner",
    "ReportError",
    "emit_tables",
    "load_experiment_config",
    "run_experiment",
]


class ExperimentConfigError(ValueError):
    """Raised when an experiment configuration file is invalid."""


def load_experiment_config(path: str) -> ExperimentConfig:
    """Read a JSON or YAML experiment file and validate it."""
    try:
        with open(path, "r") as file:
            data = yaml.safe_load(file)
    except (OSError, yaml.YAMLError) as e:
        raise ExperimentConfigError(f"Cannot read experiment config {path}: {e}")
    return validate_experiment_config(data or {})


def validate_experiment_config(data: Dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ExperimentConfigError(f"Invalid experiment config: {e}")


def resolve_output_dir(
    explicit: Optional[str] = None, configured: Optional[str] = None
) -> str:
    """--output, then the environment variable, then config.yaml, then data/runs."""
    return explicit or os.environ.get(ENV_OUTPUT_DIR) or configured or DEFAULT_OUTPUT_DIR


def sample_seed(
    master_seed: int, regime: int, sample: int, stride: int = DEFAULT_REGIME_STRIDE
) -> int:
    return master_seed + stride * regime + sample


@dataclass
class CellTask:
    regime: int
    sample: int
    seed: int
    regime_config: Dict[str, Any]
    algorithms: List[Dict[str, Any]]
    external_partitions: List[Dict[str, Any]]
    output_dir: str
    config_path: str


def _record_structure(
    result: CellResult,
    profiler: TopologyProfiler,
    graph: Graph,
    partition: Partition,
    source: str,
):
    """Community profiles, size-distribution fit and embeddedness histogram."""
    tag = {"regime": result.regime, "sample": result.sample, "source": source}
    result.profiles[source] = profiler.profile(graph, partition, seed=result.seed)
    result.size_fits.append({**tag, **profiler.fit_sizes(partition, seed=result.seed)})
    histogram = profiler.embeddedness_summary(graph, partition, source)
    for row in histogram.to_dict(orient="records"):
        row.pop("source")
        result.embeddedness.append({**tag, **row})


def _failure(result: CellResult, source: str, error: Exception) -> Dict[str, Any]:
    entry = {
        "regime": result.regime,
        "sample": result.sample,
        "source": source,
        "error": f"{type(error).__name__}: {error}",
    }
    result.failures.append(entry)
    return entry


def run_cell(task: CellTask) -> CellResult:
    """Generate one network and evaluate every source on it.

    Failures are recorded in the result and never propagate.
    """
    result = CellResult(task.regime, task.sample, task.seed)
    monitor = RunMonitor()
    cell_dir = os.path.join(task.output_dir, f"regime_{task.regime}", f"sample_{task.sample}")
    partitions_dir = os.path.join(cell_dir, "partitions")

    generator = LfrGenerator(task.config_path)
    loader = NetworkLoader(task.config_path)
    detector = CommunityDetector(task.config_path)
    profiler = TopologyProfiler(task.config_path)

    try:
        params = RegimeSchema.model_validate(task.regime_config).to_params(task.seed)
        with monitor.time("generate"):
            network = generator.generate(params)
        generator.save(network, cell_dir)
        graph, reference, _ = loader.load_network(cell_dir)
        with monitor.time("profile.reference"):
            _record_structure(result, profiler, graph, reference, "reference")
    except Exception as e:
        logger.error(f"Error generating regime {task.regime} sample {task.sample}: {e}")
        _failure(result, "generator", e)
        result.timings = dict(monitor.timings)
        return result

    def evaluate(source: str, estimated: Partition):
        scores = evaluate_partition(reference, estimated)
        result.scores.append(
            {"regime": task.regime, "sample": task.sample, "source": source, **scores}
        )
        with monitor.time(f"profile.{source}"):
            _record_structure(result, profiler, graph, estimated, source)

    for entry in task.algorithms:
        run = AlgorithmSchema.model_validate(entry)
        source = run.source
        try:
            seed = run.seed if run.seed is not None else task.seed
            config = detector.make_config(run.algorithm, seed=seed, **run.overrides())
            with monitor.time(f"detect.{source}"):
                detection = detector.detect(graph, config)
            write_membership(
                detection.partition, os.path.join(partitions_dir, f"{source}.membership")
            )
            write_json(
                {**detection.to_metadata(), "config": config.to_dict()},
                os.path.join(partitions_dir, f"{source}.meta.json"),
            )
            evaluate(source, detection.partition)
        except Exception as e:
            logger.error(
                f"Error running {source} on regime {task.regime} sample {task.sample}: {e}"
            )
            _failure(result, source, e)

    for entry in task.external_partitions:
        name = entry["name"]
        try:
            path = entry["path_template"].format(regime=task.regime, sample=task.sample)
            evaluate(name, load_external_partition(path, graph.node_count))
        except Exception as e:
            logger.error(f"Error evaluating external partition {name}: {e}")
            _failure(result, name, e)

    result.timings = dict(monitor.timings)
    return result


def emit_tables(report: EvaluationReport, directory: str) -> List[str]:
    """Write report.json, the CSV tables, curve CSVs and the failure manifest."""
    if report.is_empty():
        raise ReportError("Report holds no scores and no curves; nothing written")
    try:
        os.makedirs(directory, exist_ok=True)
        paths = [os.path.join(directory, "report.json")]
        write_json(report.to_dict(), paths[0])

        tables = {
            "scores_partition.csv": report.scores,
            "scores_mean.csv": report.mean_scores,
            "ranking.csv": report.ranking,
            "power_law_fits.csv": report.power_law_fits,
            "embeddedness_histograms.csv": report.embeddedness,
        }
        for name, frame in tables.items():
            path = os.path.join(directory, name)
            frame.to_csv(path, index=False, float_format="%.12g")
            paths.append(path)

        paths.extend(write_curves(report.curves.values(), os.path.join(directory, "curves")))

        failures_path = os.path.join(directory, "failures.json")
        write_json({"failures": report.failures}, failures_path)
        paths.append(failures_path)
    except OSError as e:
        raise ReportError(f"Cannot write report to {directory}: {e}")
    logger.info(f"Wrote {len(paths)} report files to {directory}")
    return paths


class ExperimentRunner:
    """Fans (regime, sample) cells out, reduces them and writes the report."""

    def __init__(self, config_path: str = "config.yaml"):
        """Initialize runner with configuration."""
        self.config_path = config_path
        self.config = self._load_config(config_path)

    def _load_config(self, config_path: str) -> Dict[str, Any]:
        """Load the experiment section of the YAML configuration."""
        if not os.path.exists(config_path):
            logger.warning(f"Config file {config_path} not found, using defaults")
            return {}
        with open(config_path, "r") as file:
            return (yaml.safe_load(file) or {}).get("experiment", {}) or {}

    def tasks(self, cfg: ExperimentConfig, output_dir: str) -> List[CellTask]:
        stride = int(self.config.get("seed_regime_stride", DEFAULT_REGIME_STRIDE))
        algorithms = [algo.model_dump() for algo in cfg.algorithms]
        externals = [ext.model_dump() for ext in cfg.external_partitions]
        return [
            CellTask(
                regime=r,
                sample=s,
                seed=sample_seed(cfg.master_seed, r, s, stride),
                regime_config=regime.model_dump(),
                algorithms=algorithms,
                external_partitions=externals,
                output_dir=output_dir,
                config_path=self.config_path,
            )
            for r, regime in enumerate(cfg.regimes)
            for s in range(cfg.sample_count)
        ]

    def run(self, cfg: ExperimentConfig, output_dir: Optional[str] = None) -> EvaluationReport:
        output_dir = resolve_output_dir(
            output_dir or cfg.output_dir, self.config.get("output_dir")
        )
        tasks = self.tasks(cfg, output_dir)
        logger.info(f"Running {len(tasks)} cells into {output_dir} with {cfg.workers} worker(s)")

        if cfg.workers > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                futures = [pool.submit(run_cell, task) for task in tasks]
                cells = [future.result() for future in tqdm(futures, desc="cells")]
        else:
            cells = [run_cell(task) for task in tqdm(tasks, desc="cells")]

        report = assemble_report(
            cells, TopologyProfiler(self.config_path), cfg.model_dump(mode="json")
        )
        emit_tables(report, output_dir)

        monitor = RunMonitor()
        for cell in cells:
            monitor.merge(cell.timings)
        monitor.dump(os.path.join(output_dir, "timings.json"))
        return report


def run_experiment(
    cfg: ExperimentConfig,
    config_path: str = "config.yaml",
    output_dir: Optional[str] = None,
) -> EvaluationReport:
    return ExperimentRunner(config_path).run(cfg, output_dir)
