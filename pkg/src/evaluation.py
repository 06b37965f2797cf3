"""
Evaluation of detection results: per-cell scoring, range checks, ranking and
assembly of the experiment report from per-cell results.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Sequence, Union

import numpy as np
import pandas as pd

from partition import Partition
from partition_measures import MEASURE_RANGES, MEASURES, score_all
from topo_measures import BinnedSeries, CommunityProfile, TopologyProfiler

logger = logging.getLogger(__name__)

_RANGE_SLACK = 1e-12


class ReportError(RuntimeError):
    """Raised when a report violates score ranges or cannot be written."""


@dataclass
class CellResult:
    """Everything one (regime, sample) cell produced."""

    regime: int
    sample: int
    seed: int
    scores: List[Dict[str, Any]] = field(default_factory=list)
    profiles: Dict[str, List[CommunityProfile]] = field(default_factory=dict)
    size_fits: List[Dict[str, Any]] = field(default_factory=list)
    embeddedness: List[Dict[str, Any]] = field(default_factory=list)
    failures: List[Dict[str, Any]] = field(default_factory=list)
    timings: Dict[str, List[float]] = field(default_factory=dict)


@dataclass
class EvaluationReport:
    scores: pd.DataFrame
    mean_scores: pd.DataFrame
    ranking: pd.DataFrame
    power_law_fits: pd.DataFrame
    embeddedness: pd.DataFrame
    curves: Dict[str, BinnedSeries]
    failures: List[Dict[str, Any]]
    config: Dict[str, Any] = field(default_factory=dict)

    def is_empty(self) -> bool:
        return self.scores.empty and not self.curves

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config,
            "scores": _records(self.scores),
            "mean_scores": _records(self.mean_scores),
            "ranking": _records(self.ranking),
            "power_law_fits": _records(self.power_law_fits),
            "failures": self.failures,
            "curves": {
                key: _records(series.to_frame()) for key, series in sorted(self.curves.items())
            },
        }


def _records(frame: pd.DataFrame) -> List[Dict[str, Any]]:
    """Row dicts with NaN/NA mapped to None."""
    cleaned = frame.astype(object).where(pd.notna(frame), None)
    return cleaned.to_dict(orient="records")


def check_score_ranges(scores: Mapping[str, float], context: str = ""):
    for measure, (low, high) in MEASURE_RANGES.items():
        value = scores.get(measure)
        if value is None or (isinstance(value, float) and np.isnan(value)):
            continue
        if not low - _RANGE_SLACK <= value <= high + _RANGE_SLACK:
            raise ReportError(f"{measure}={value} outside [{low}, {high}] {context}".rstrip())


def evaluate_partition(reference: Partition, estimated: Partition) -> Dict[str, float]:
    """The four traditional measures, range-checked."""
    scores = score_all(reference, estimated)
    check_score_ranges(scores)
    return scores


def rank_algorithms(
    scores: Union[pd.DataFrame, Mapping[str, Mapping[str, float]]],
    measures: Sequence[str] = MEASURES,
) -> pd.DataFrame:
    """Rank sources per measure: 1 = highest; ties share the lower rank and are flagged.

    `scores` maps source -> {measure: value} or is a frame indexed by source.
    """
    frame = scores if isinstance(scores, pd.DataFrame) else pd.DataFrame.from_dict(
        {source: dict(values) for source, values in scores.items()}, orient="index"
    )
    table = pd.DataFrame(index=frame.index)
    table.index.name = "source"
    for measure in measures:
        column = frame[measure].astype(float)
        table[measure] = column
        table[f"{measure}_rank"] = column.rank(method="min", ascending=False).astype("Int64")
        table[f"{measure}_tie"] = column.duplicated(keep=False) & column.notna()
    return table


def _mean_scores(scores: pd.DataFrame) -> pd.DataFrame:
    if scores.empty:
        return pd.DataFrame(columns=["regime", "source", *MEASURES, "samples"])
    grouped = scores.groupby(["regime", "source"], sort=True)
    means = grouped[list(MEASURES)].mean()
    means["samples"] = grouped.size()
    return means.reset_index()


def _ranking(mean_scores: pd.DataFrame) -> pd.DataFrame:
    frames = []
    for regime, group in mean_scores.groupby("regime", sort=True):
        ranked = rank_algorithms(group.set_index("source")[list(MEASURES)])
        ranked.insert(0, "regime", regime)
        frames.append(ranked.reset_index())
    if not frames:
        return pd.DataFrame(columns=["regime", "source"])
    return pd.concat(frames, ignore_index=True)


def assemble_report(
    cells: Sequence[CellResult],
    profiler: TopologyProfiler,
    config: Dict[str, Any],
) -> EvaluationReport:
    """Reduce per-cell results, in cell order, into one report.

    Curves pool the community profiles of all samples of a regime, per source.
    """
    cells = sorted(cells, key=lambda cell: (cell.regime, cell.sample))
    score_rows = [row for cell in cells for row in cell.scores]
    for row in score_rows:
        context = f"(regime {row['regime']}, sample {row['sample']}, {row['source']})"
        check_score_ranges(row, context)

    columns = ["regime", "sample", "source", *MEASURES]
    scores = pd.DataFrame(score_rows, columns=columns)
    if not scores.empty:
        scores = scores.sort_values(["regime", "sample", "source"], kind="stable")
        scores = scores.reset_index(drop=True)
    mean_scores = _mean_scores(scores)

    pooled: Dict[str, List[CommunityProfile]] = defaultdict(list)
    for cell in cells:
        for source, profiles in cell.profiles.items():
            pooled[f"regime{cell.regime}_{source}"].extend(profiles)
    curves: Dict[str, BinnedSeries] = {}
    for source in sorted(pooled):
        for name, series in profiler.curves(pooled[source], source).items():
            curves[f"{name}__{source}"] = series

    fits = pd.DataFrame([row for cell in cells for row in cell.size_fits])
    embeddedness = pd.DataFrame([row for cell in cells for row in cell.embeddedness])
    failures = [failure for cell in cells for failure in cell.failures]
    if failures:
        logger.warning(f"Report assembled with {len(failures)} failed cells")

    return EvaluationReport(
        scores=scores,
        mean_scores=mean_scores,
        ranking=_ranking(mean_scores),
        power_law_fits=fits,
        embeddedness=embeddedness,
        curves=curves,
        failures=failures,
        config=config,
    )
