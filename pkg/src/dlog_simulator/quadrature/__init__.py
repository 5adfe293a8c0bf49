from dlog_simulator.quadrature.capture import (
    CaptureTable,
    alpha_r_integral,
    capture_probability,
    capture_table,
    delta_integral,
    delta_order,
    half_range,
    normalized_delta_integral,
    outer_integral,
    outer_mass,
)
from dlog_simulator.quadrature.integrate import QuadratureConfig, integrate, simpson

__all__ = [
    "CaptureTable",
    "QuadratureConfig",
    "alpha_r_integral",
    "capture_probability",
    "capture_table",
    "delta_integral",
    "delta_order",
    "half_range",
    "integrate",
    "normalized_delta_integral",
    "outer_integral",
    "outer_mass",
    "simpson",
]
