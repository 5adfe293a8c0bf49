"""
Simulation Pipeline - Base Classes
==================================
A run is a list of steps sharing one `PipelineContext`: the instance, the
seeded generator, and whatever the steps produce (histogram, sampled
outcomes, solver results, report). Each step is timed and leaves its
figures in `context.metadata[step.name]`.
"""

import logging
import time
import uuid
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from dlog_simulator.histogram.builder import Histogram
from dlog_simulator.histogram.sampler import SampledOutcome
from dlog_simulator.kernel.schemas import ProblemInstance
from dlog_simulator.outputs import git_commit
from dlog_simulator.solver.postprocess import SolveResult

logger = logging.getLogger(__name__)


@dataclass
class PipelineContext:
    inst: ProblemInstance
    rng: np.random.Generator

    histogram: Histogram | None = None
    outcomes: list[SampledOutcome] = field(default_factory=list)
    # None where the outcome fell outside the histogram
    results: list[SolveResult | None] = field(default_factory=list)
    report: object | None = None

    run_id: str = field(default_factory=lambda: uuid.uuid4().hex[:12])
    git_commit: str = field(default_factory=git_commit)
    config: dict = field(default_factory=dict)
    metadata: dict[str, dict] = field(default_factory=dict)

    def add_metadata(self, step_name: str, data: dict) -> None:
        self.metadata.setdefault(step_name, {}).update(data)

    def to_summary(self) -> dict:
        return {
            "run_id": self.run_id,
            "commit": self.git_commit,
            "instance": self.inst.fingerprint(),
            "steps": list(self.metadata),
            "samples": len(self.outcomes),
        }


class PipelineStep(ABC):
    """Template method: `run` times and logs, subclasses implement `execute`."""

    def __init__(self, name: str):
        self.name = name
        self.logger = logging.getLogger(f"pipeline.{name}")

    @abstractmethod
    def execute(self, context: PipelineContext) -> PipelineContext: ...

    def run(self, context: PipelineContext) -> PipelineContext:
        extra = {"run_id": context.run_id}
        self.logger.info(f"▶️  Step {self.name}", extra=extra)
        started = time.perf_counter()
        try:
            context = self.execute(context)
        except Exception as e:
            self.logger.error(f"❌ Step {self.name} failed: {e}", extra=extra)
            raise
        elapsed = time.perf_counter() - started
        context.add_metadata(self.name, {"elapsed_s": round(elapsed, 3)})
        self.logger.info(f"✅ Step {self.name} done in {elapsed:.2f}s", extra=extra)
        return context


class SimulationPipeline:
    def __init__(self, steps: list[PipelineStep]):
        self.steps = steps

    def execute(self, context: PipelineContext) -> PipelineContext:
        names = " -> ".join(step.name for step in self.steps)
        logger.info(
            f"🚀 Simulation {context.run_id} ({names}) "
            f"for {context.inst.fingerprint()} at commit {context.git_commit}"
        )
        for step in self.steps:
            context = step.run(context)
        logger.info(f"🎉 Simulation {context.run_id} finished")
        logger.debug(f"Summary: {context.to_summary()}")
        return context
