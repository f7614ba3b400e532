import json
import logging
import time
from collections import deque
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np

logger = logging.getLogger(__name__)


@dataclass
class JobMetrics:
    """Counters for one job"""
    entries_checked: int = 0
    entries_skipped: int = 0
    cache_hits: int = 0
    cache_misses: int = 0


@dataclass
class StageTiming:
    calls: int = 0
    total_ms: float = 0.0
    durations: deque = field(default_factory=lambda: deque(maxlen=1000))


class TimingCollector:
    """Collects wall-clock timings per stage of a job"""

    def __init__(self):
        self.start_time = time.perf_counter()
        self.job = JobMetrics()
        self.stages: Dict[str, StageTiming] = {}

    @contextmanager
    def measure(self, stage: str):
        started = time.perf_counter()
        try:
            yield
        finally:
            elapsed = (time.perf_counter() - started) * 1000
            timing = self.stages.setdefault(stage, StageTiming())
            timing.calls += 1
            timing.total_ms += elapsed
            timing.durations.append(elapsed)
            logger.debug(f"{stage} took {elapsed:.1f} ms")

    def record_entry(self, skipped: bool = False):
        if skipped:
            self.job.entries_skipped += 1
        else:
            self.job.entries_checked += 1

    @property
    def elapsed_ms(self) -> float:
        return (time.perf_counter() - self.start_time) * 1000

    def get_current_metrics(self) -> Dict[str, Any]:
        """Get current metrics snapshot"""
        return {
            "elapsed_ms": round(self.elapsed_ms, 1),
            "job": dict(self.job.__dict__),
            "stages": {
                name: {
                    "calls": t.calls,
                    "total_ms": round(t.total_ms, 1),
                    "p95_ms": round(float(np.percentile(list(t.durations), 95)), 1) if t.durations else 0.0,
                }
                for name, t in sorted(self.stages.items())
            },
        }

    def export_metrics(self, format: str = "json") -> str:
        metrics = self.get_current_metrics()
        if format == "json":
            return json.dumps(metrics, indent=2, sort_keys=True)
        else:
            raise ValueError(f"Unsupported format: {format}")
