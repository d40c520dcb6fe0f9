"""Zero level set extraction, curve geometry and the sharp-interface checks."""
from .extract import InterfaceCurve, extract_interface, match_loops
from .geometry import (curvature, gauss_bonnet, measured_normal_velocity,
                       predicted_normal_velocity, resample_uniform)
from .fronttrack import FrontTracker, oracle_decay_rate, perturbed_circle
from .experiment import ModeDecayResult, mode_decay_experiment, perturbed_circle_field
from .geometry import mode_amplitude

__all__ = [
    "InterfaceCurve", "extract_interface", "match_loops", "curvature", "gauss_bonnet",
    "measured_normal_velocity", "predicted_normal_velocity", "resample_uniform",
    "FrontTracker", "perturbed_circle", "oracle_decay_rate", "ModeDecayResult",
    "mode_amplitude", "mode_decay_experiment", "perturbed_circle_field",
]
