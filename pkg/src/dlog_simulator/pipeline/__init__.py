from dlog_simulator.pipeline.base import (
    PipelineContext,
    PipelineStep,
    SimulationPipeline,
)
from dlog_simulator.pipeline.steps import (
    HistogramStep,
    PostProcessingStep,
    ReportStep,
    SamplingStep,
    SimulationReport,
)

__all__ = [
    "HistogramStep",
    "PipelineContext",
    "PipelineStep",
    "PostProcessingStep",
    "ReportStep",
    "SamplingStep",
    "SimulationPipeline",
    "SimulationReport",
]
