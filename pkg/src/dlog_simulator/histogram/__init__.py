from dlog_simulator.histogram.builder import (
    Histogram,
    HistogramCell,
    build,
    cell_edges,
)
from dlog_simulator.histogram.codec import deserialize, serialize
from dlog_simulator.histogram.sampler import (
    OUTSIDE,
    OutsideCapture,
    SampledOutcome,
    SampledPair,
    cell_to_pair,
    realizable_alpha_r,
    sample,
    sample_cell,
    sample_cells,
)

__all__ = [
    "OUTSIDE",
    "Histogram",
    "HistogramCell",
    "OutsideCapture",
    "SampledOutcome",
    "SampledPair",
    "build",
    "cell_edges",
    "cell_to_pair",
    "deserialize",
    "realizable_alpha_r",
    "sample",
    "sample_cell",
    "sample_cells",
    "serialize",
]
