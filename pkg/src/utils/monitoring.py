"""
Monitoring utilities: wall-clock timing of pipeline stages.
Timings never enter deterministic artifacts; they are dumped to their own file.
"""

import json
import logging
import os
import time
from collections import defaultdict
from typing import Dict, List

logger = logging.getLogger(__name__)


class Timer:
    """Context manager measuring elapsed wall time in seconds."""

    def __init__(self, label: str = ""):
        self.label = label
        self.elapsed = 0.0
        self._start = None

    def __enter__(self) -> "Timer":
        self._start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.elapsed = time.perf_counter() - self._start
        if self.label:
            logger.debug(f"{self.label} took {self.elapsed:.3f}s")
        return False


class RunMonitor:
    """Accumulates named timings over a run."""

    def __init__(self):
        self.timings: Dict[str, List[float]] = defaultdict(list)

    def record(self, name: str, seconds: float):
        self.timings[name].append(seconds)

    def time(self, name: str) -> "_MonitoredTimer":
        return _MonitoredTimer(self, name)

    def merge(self, timings: Dict[str, List[float]]):
        for name, values in timings.items():
            self.timings[name].extend(values)

    def summary(self) -> Dict[str, Dict[str, float]]:
        return {
            name: {"count": len(values), "total": sum(values), "max": max(values)}
            for name, values in sorted(self.timings.items())
            if values
        }

    def dump(self, path: str):
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w") as file:
            json.dump(self.summary(), file, indent=2, sort_keys=True)
        logger.info(f"Saved timings to: {path}")


class _MonitoredTimer(Timer):
    def __init__(self, monitor: RunMonitor, name: str):
        super().__init__(name)
        self.monitor = monitor

    def __exit__(self, exc_type, exc, tb):
        super().__exit__(exc_type, exc, tb)
        self.monitor.record(self.label, self.elapsed)
        return False
