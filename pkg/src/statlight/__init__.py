"""Mean-field simulator of two-color stationary light in a double-lambda medium.

Two counterpropagating field channels ride on a shared spin coherence; a pair
of control beams sets whether the bound polariton walks, stands still, or is
parked entirely in the medium. The package integrates the coupled transport
equations directly, evolves the adiabatically slaved branch spectrally, and
checks both against closed-form envelope laws.
"""

__version__ = "0.1.0"

from .config import RunConfig, parse_config, render_config
from .errors import SimulationError
from .medium import (MediumModel, build_medium, build_pulse, build_schedule,
                     coefficients, group_velocity)
from .oracle import (conversion_probability, gaussian_envelope,
                     spreading_velocity, width_b)
from .presets import get_preset, list_presets
from .scenario import RunResult, run_scenario

__all__ = [
    "MediumModel", "RunConfig", "RunResult", "SimulationError", "__version__",
    "build_medium", "build_pulse", "build_schedule", "coefficients",
    "conversion_probability", "gaussian_envelope", "get_preset",
    "group_velocity", "list_presets", "parse_config", "render_config",
    "run_scenario", "spreading_velocity", "width_b",
]
