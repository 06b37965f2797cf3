"""
Tests for logging setup and run monitoring.
"""

import json
import logging
import os
import sys

# Add src to path
sys.path.append(os.path.join(os.path.dirname(__file__), "..", "src"))

from utils.logger import setup_logging
from utils.monitoring import RunMonitor, Timer


class TestMonitoring:
    """Test cases for Timer and RunMonitor."""

    def test_timer(self):
        with Timer("stage") as timer:
            sum(range(1000))
        assert timer.elapsed >= 0.0

    def test_monitor_summary(self, temp_dir):
        monitor = RunMonitor()
        with monitor.time("detect.louvain"):
            pass
        monitor.merge({"detect.louvain": [2.0], "generate": [1.5]})
        summary = monitor.summary()
        assert summary["detect.louvain"]["count"] == 2
        assert summary["generate"] == {"count": 1, "total": 1.5, "max": 1.5}

        path = os.path.join(temp_dir, "timings.json")
        monitor.dump(path)
        with open(path) as file:
            assert list(json.load(file)) == ["detect.louvain", "generate"]


class TestLogging:
    """Test cases for setup_logging."""

    def test_log_file(self, temp_dir):
        log_file = os.path.join(temp_dir, "logs", "bench.log")
        setup_logging("debug", log_file)
        logging.getLogger("bench").debug("hello")
        for handler in logging.getLogger().handlers:
            handler.flush()
        with open(log_file) as file:
            assert "hello" in file.read()
        assert logging.getLogger().level == logging.DEBUG
        setup_logging("WARNING")
