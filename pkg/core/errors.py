#!/usr/bin/env python3
"""
Error Types
Validation problems map to CLI exit code 2, numerical failures to exit code 3.
"""


class SimulationError(Exception):
    """Base class for every failure raised by the simulation core."""
    exit_code = 1
    error_type = "simulation_error"


class ValidationError(SimulationError, ValueError):
    """Inputs violate a precondition (bad grid, clipped packet, malformed config)."""
    exit_code = 2
    error_type = "validation_error"


class EmptyComponentError(ValidationError):
    error_type = "empty_component"


class BoundaryContactError(ValidationError):
    error_type = "boundary_contact"


class NumericalFailure(SimulationError, RuntimeError):
    """Norm drift, NaN/overflow or a runaway iteration."""
    exit_code = 3
    error_type = "numerical_error"
