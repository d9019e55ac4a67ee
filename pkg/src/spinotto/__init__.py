"""Spin-1/2 measurement engine simulator.

Computes the radiative decay rate of a trapped spin precessing around
crossed magnetic fields, evolves the spin through its non-Markovian memory
equations, reconstructs the radiated-field measurement record, and evaluates
engine work, efficiency, and power across parameter sweeps.
"""

__version__ = "0.1.0"

from .constants import CONSTANTS_VERSION
from .cycle import CycleMetrics, SweepTable, efficiency_c, run_cycle, sweep
from .dynamics import (
    BlochState,
    EarlyTimeCoeffs,
    TrajectoryTrace,
    crossing_time,
    early_time_coeffs,
    engine_initial_state,
    evolve_full,
    evolve_linearized,
    matching_point,
)
from .modes import (
    KernelTable,
    PoleData,
    SpectralDensity,
    decay_rate_xi,
    frequency_shift_phi,
    memory_kernel,
    spectral_density,
    structure_function,
)
from .otto import OttoMetrics, otto_cycle
from .params import (
    DerivedParams,
    EngineConfig,
    GridSpec,
    NumericsConfig,
    derive_params,
    load_config,
    thermal_polarization,
)
from .radiation import (
    LinearizedHistory,
    RadiationRecord,
    SampledHistory,
    build_record,
    coherent_amplitude,
    omega_eff,
    radiated_energy,
    record_overlap,
)

__all__ = [
    "CONSTANTS_VERSION",
    "__version__",
    "BlochState",
    "CycleMetrics",
    "DerivedParams",
    "EarlyTimeCoeffs",
    "EngineConfig",
    "GridSpec",
    "KernelTable",
    "LinearizedHistory",
    "NumericsConfig",
    "OttoMetrics",
    "PoleData",
    "RadiationRecord",
    "SampledHistory",
    "SpectralDensity",
    "SweepTable",
    "TrajectoryTrace",
    "build_record",
    "coherent_amplitude",
    "crossing_time",
    "decay_rate_xi",
    "derive_params",
    "early_time_coeffs",
    "efficiency_c",
    "engine_initial_state",
    "evolve_full",
    "evolve_linearized",
    "frequency_shift_phi",
    "load_config",
    "matching_point",
    "memory_kernel",
    "omega_eff",
    "otto_cycle",
    "radiated_energy",
    "record_overlap",
    "run_cycle",
    "spectral_density",
    "structure_function",
    "sweep",
    "thermal_polarization",
]
