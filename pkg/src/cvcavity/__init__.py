"""Two-mode squeezed-thermal-state dynamics in lossy cavities.

Closed-form state functions, the reduced squeezing/thermal equations of
motion with fixed-step integration, microring pump models with optimum-pulse
and optimum-coupling solvers, entanglement landscape sweeps, and a
brute-force truncated-Fock master-equation oracle that certifies the closed
form.
"""

from .analysis import (G0Curve, GlobalMinimum, GridSpec, SweepGrid, g0_curve,
                       refine_global_minimum, sweep_min_variance, sweep_offset)
from .dynamics import (IntegratorConfig, MinimumVariance, Trajectory,
                       TrajectoryPoint, find_minimum_variance, integrate,
                       rhs_general, rhs_reduced, squeezing_phase)
from .errors import (FockTruncationError, FockTruncationWarning, IntegrationError,
                     PhaseSingularityError, RingRegimeWarning,
                     WindowBoundaryWarning)
from .fock import (FockDensityMatrix, OracleMoments, OracleRun,
                   annihilation_operator, build_hamiltonian,
                   build_squeezed_thermal, evolve, extract_moments, lindblad_step)
from .pump import (ConstantPump, GaussianPump, PumpModel, RingGaussianPump,
                   RingParams, buildup, channel_field_envelope, g0_from_physical,
                   optimum_sigma, optimum_tau, peak_strength,
                   peak_strength_coefficient, predicted_min_variance,
                   pump_strength, ring_field_factor, ring_round_trip_time)
from .states import (CavityParams, SqueezedThermalState, ThermalOccupation,
                     correlation_variance, correlation_variance_offset,
                     difference_quadrature_variance, is_entangled,
                     quadrature_noise, sum_quadrature_variance, thermal_decay)

__version__ = "0.1.0"

__all__ = [
    "CavityParams", "SqueezedThermalState", "ThermalOccupation",
    "thermal_decay", "quadrature_noise", "correlation_variance",
    "correlation_variance_offset", "is_entangled",
    "sum_quadrature_variance", "difference_quadrature_variance",
    "IntegratorConfig", "Trajectory", "TrajectoryPoint", "MinimumVariance",
    "rhs_reduced", "rhs_general", "squeezing_phase", "integrate",
    "find_minimum_variance",
    "RingParams", "PumpModel", "ConstantPump", "GaussianPump",
    "RingGaussianPump", "pump_strength", "peak_strength",
    "channel_field_envelope", "buildup", "ring_field_factor", "optimum_tau",
    "optimum_sigma", "peak_strength_coefficient", "predicted_min_variance",
    "g0_from_physical", "ring_round_trip_time",
    "FockDensityMatrix", "OracleMoments", "OracleRun",
    "annihilation_operator", "build_hamiltonian", "build_squeezed_thermal",
    "extract_moments", "lindblad_step", "evolve",
    "GridSpec", "SweepGrid", "GlobalMinimum", "G0Curve",
    "sweep_min_variance", "sweep_offset", "refine_global_minimum", "g0_curve",
    "IntegrationError", "PhaseSingularityError", "FockTruncationError",
    "FockTruncationWarning", "RingRegimeWarning", "WindowBoundaryWarning",
]
