"""Frequency-resolved two-photon correlations of resonance fluorescence.

Sensor-method spectra and two-photon landscapes of a driven two-level
emitter and of a squeezed-driven cavity, with the closed forms they are
checked against.
"""

__version__ = "0.1.0"

from .algebra import Operator, SpaceSignature, Superoperator, build_liouvillian, embed, expectation
from .models import (
    CavityParams,
    QuantumModel,
    RFParams,
    SensorConfig,
    attach_sensors,
    homodyne,
    resonance_fluorescence,
    squeezed_cavity,
)
from .steadystate import DensityMatrix, SensorExpansion, steady_state, two_time_correlator

__all__ = [
    "CavityParams", "DensityMatrix", "Operator", "QuantumModel", "RFParams", "SensorConfig",
    "SensorExpansion", "SpaceSignature", "Superoperator", "attach_sensors", "build_liouvillian",
    "embed", "expectation", "homodyne", "resonance_fluorescence", "squeezed_cavity",
    "steady_state", "two_time_correlator",
]
