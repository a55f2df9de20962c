"""Python access to the bansim simulator core."""

from ._core import (
    BansimError,
    build_frame,
    cli,
    config_names,
    data_rate,
    efficiency,
    efficiency_curve,
    kasami,
    parse_frame,
    rates_csv,
    simulate,
    table_names,
)

__all__ = [
    "BansimError",
    "build_frame",
    "cli",
    "config_names",
    "data_rate",
    "efficiency",
    "efficiency_curve",
    "kasami",
    "parse_frame",
    "rates_csv",
    "simulate",
    "table_names",
]
