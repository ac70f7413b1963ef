"""Unidirectional regulator simulation and gain tuning."""

from ._unireg import (
    DivergenceError,
    IterationLimitError,
    PlantParams,
    RegulatorGains,
    Trajectory,
    control_output,
    feedforward_offset,
    golden_section_1d,
    golden_section_2d,
    plant_step,
    run_session,
    shc_minimize,
    stability_check,
)

__all__ = [
    "DivergenceError",
    "IterationLimitError",
    "PlantParams",
    "RegulatorGains",
    "Trajectory",
    "control_output",
    "feedforward_offset",
    "golden_section_1d",
    "golden_section_2d",
    "plant_step",
    "run_session",
    "shc_minimize",
    "stability_check",
]
