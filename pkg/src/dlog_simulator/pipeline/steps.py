"""
Simulation Pipeline - Steps
===========================
Histogram -> sampling -> post-processing -> report.
"""

from collections import Counter
from pathlib import Path

from pydantic import BaseModel

from dlog_simulator.histogram.builder import build
from dlog_simulator.histogram.codec import deserialize
from dlog_simulator.histogram.sampler import OutsideCapture, sample
from dlog_simulator.kernel.schemas import FrequencyPair
from dlog_simulator.pipeline.base import PipelineContext, PipelineStep
from dlog_simulator.quadrature.integrate import QuadratureConfig
from dlog_simulator.solver.postprocess import DEFAULT_TAU_BOUND, FailureReason, solve
from dlog_simulator.solver.verifier import EqualityVerifier


class SimulationReport(BaseModel):
    m: int
    ell: int
    r: int
    d: int
    B: int
    B_max: int
    count: int
    seed: int | None
    histogram_mass: float
    success_rate: float
    outside_rate: float
    no_inverse_rate: float
    exhausted_rate: float
    tau_too_large_rate: float
    mean_candidates_tested: float
    max_candidates_tested: int
    group_operations_per_run: int
    padding_overhead: int


class HistogramStep(PipelineStep):
    """Builds the histogram, or loads it when a file is given."""

    def __init__(
        self,
        B_max: int,
        cells_per_unit: int,
        cfg: QuadratureConfig,
        path: str | Path | None = None,
    ):
        super().__init__("histogram")
        self.B_max = B_max
        self.cells_per_unit = cells_per_unit
        self.cfg = cfg
        self.path = path

    def execute(self, context: PipelineContext) -> PipelineContext:
        if self.path is not None:
            self.logger.info(f"📂 Loading histogram from {self.path}")
            hist = deserialize(Path(self.path).read_bytes())
            if hist.instance != context.inst:
                raise ValueError(
                    f"histogram was built for {hist.instance.fingerprint()}, "
                    f"not {context.inst.fingerprint()}"
                )
        else:
            hist = build(context.inst, self.B_max, self.cells_per_unit, self.cfg)

        context.histogram = hist
        context.add_metadata(
            self.name,
            {
                "cells": len(hist),
                "B_max": hist.B_max,
                "total_mass": float(hist.total_mass),
            },
        )
        return context


class SamplingStep(PipelineStep):
    def __init__(self, count: int):
        super().__init__("sampling")
        self.count = count

    def execute(self, context: PipelineContext) -> PipelineContext:
        if context.histogram is None:
            raise ValueError("No histogram to sample. Run the histogram step first.")
        self.logger.info(f"🎲 Drawing {self.count} samples...")
        context.outcomes = sample(
            context.inst, context.histogram, context.rng, self.count
        )
        outside = sum(1 for o in context.outcomes if o is OutsideCapture)
        context.add_metadata(self.name, {"count": self.count, "outside": outside})
        return context


class PostProcessingStep(PipelineStep):
    """Runs the solver with the known-d verifier on every captured sample."""

    def __init__(self, B: int, tau_bound: int = DEFAULT_TAU_BOUND):
        super().__init__("postprocessing")
        self.B = B
        self.tau_bound = tau_bound

    def execute(self, context: PipelineContext) -> PipelineContext:
        pub = context.inst.public
        verifier = EqualityVerifier(context.inst.d)
        results = []
        for outcome in context.outcomes:
            if outcome is OutsideCapture:
                results.append(None)
                continue
            pair = FrequencyPair(j=outcome.j, k=outcome.k)
            results.append(solve(pub, pair, self.B, verifier, self.tau_bound))
        context.results = results

        solved = sum(1 for r in results if r is not None and r.success)
        self.logger.info(f"🔑 Recovered d for {solved}/{len(results)} samples")
        context.add_metadata(self.name, {"B": self.B, "solved": solved})
        return context


class ReportStep(PipelineStep):
    def __init__(self, B: int, seed: int | None):
        super().__init__("report")
        self.B = B
        self.seed = seed

    def execute(self, context: PipelineContext) -> PipelineContext:
        inst = context.inst
        count = len(context.outcomes)
        reasons = Counter(
            r.reason for r in context.results if r is not None and not r.success
        )
        tested = [r.candidates_tested for r in context.results if r is not None]

        def rate(n: int) -> float:
            return n / count if count else 0.0

        context.report = SimulationReport(
            m=inst.m,
            ell=inst.ell,
            r=inst.r,
            d=inst.d,
            B=self.B,
            B_max=context.histogram.B_max,
            count=count,
            seed=self.seed,
            histogram_mass=float(context.histogram.total_mass),
            success_rate=rate(sum(1 for r in context.results if r and r.success)),
            outside_rate=rate(sum(1 for r in context.results if r is None)),
            no_inverse_rate=rate(reasons[FailureReason.Z_ZERO]),
            exhausted_rate=rate(reasons[FailureReason.EXHAUSTED]),
            tau_too_large_rate=rate(reasons[FailureReason.TAU_TOO_LARGE]),
            mean_candidates_tested=sum(tested) / len(tested) if tested else 0.0,
            max_candidates_tested=max(tested, default=0),
            group_operations_per_run=2 * (inst.m + inst.ell),
            padding_overhead=2 * inst.ell,
        )
        self.logger.info(f"📊 Success rate: {context.report.success_rate:.4f}")
        return context
