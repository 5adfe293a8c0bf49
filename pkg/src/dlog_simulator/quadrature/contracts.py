"""
Data Contracts
==============
Pandera schemas for the probability tables written by the simulator.
"""

from pandera import Check, Column, DataFrameSchema
from pandera.typing import DataFrame

# --- CAPTURE TABLE ---
# Long format: one row per (ell, B) cell

CaptureTableSchema = DataFrameSchema(
    {
        "ell": Column(int, checks=Check.ge(0), description="padding length"),
        "B": Column(int, checks=Check.ge(0), description="search bound on |Delta|"),
        "capture": Column(
            float,
            checks=[
                Check.ge(0, error="capture probability must be >= 0"),
                Check.le(1, error="capture probability must be <= 1"),
            ],
            description="probability mass on B-good pairs",
        ),
    },
    name="CaptureTableSchema",
    unique=["ell", "B"],
    strict=True,
    coerce=True,
)


# --- ORACLE COMPARISON ---

CaptureReportSchema = DataFrameSchema(
    {
        "B": Column(int, checks=Check.ge(0)),
        "exact": Column(float, checks=Check.ge(0, error="exact capture must be >= 0")),
        "heuristic": Column(float, checks=Check.ge(0)),
        "difference": Column(float),
    },
    name="CaptureReportSchema",
    unique=["B"],
    strict=True,
    coerce=True,
)

DeltaMassSchema = DataFrameSchema(
    {
        "Delta": Column(int),
        "exact": Column(float, checks=Check.ge(0)),
        "heuristic": Column(float, checks=Check.ge(0)),
    },
    name="DeltaMassSchema",
    unique=["Delta"],
    strict=True,
    coerce=True,
)


# --- HELPER FUNCTIONS ---


def validate_capture_table(df) -> DataFrame:
    return CaptureTableSchema.validate(df, lazy=True)


def validate_capture_report(df) -> DataFrame:
    return CaptureReportSchema.validate(df, lazy=True)


def validate_delta_masses(df) -> DataFrame:
    return DeltaMassSchema.validate(df, lazy=True)
