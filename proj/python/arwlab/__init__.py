"""Activated-random-walk simulation laboratory."""

from ._core import (
    Configuration,
    Domain,
    InstructionField,
    JumpKernel,
    Odometer,
    SiteState,
    apply_sequence,
    coupled_stabilize,
    drive,
    fit_breakpoint,
    generate,
    gillespie_run,
    is_acceptable,
    is_legal,
    measured_density,
    snapshot_dump,
    snapshot_parse,
    stabilize,
    topple,
)

__all__ = [
    "Configuration",
    "Domain",
    "InstructionField",
    "JumpKernel",
    "Odometer",
    "SiteState",
    "apply_sequence",
    "coupled_stabilize",
    "drive",
    "fit_breakpoint",
    "generate",
    "gillespie_run",
    "is_acceptable",
    "is_legal",
    "measured_density",
    "snapshot_dump",
    "snapshot_parse",
    "stabilize",
    "topple",
]
