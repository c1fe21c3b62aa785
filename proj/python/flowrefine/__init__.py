"""Bounded refinement checking for dataflow architectures."""

from ._flowrefine import (
    Error,
    apply_script,
    canonical_architecture,
    case_study,
    check_refinement,
    delta,
    rho,
    simulate,
    validate,
)

__all__ = [
    "Error",
    "apply_script",
    "canonical_architecture",
    "case_study",
    "check_refinement",
    "delta",
    "rho",
    "simulate",
    "validate",
]
