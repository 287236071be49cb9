"""cavoptics: optical-path simulation of 1D cavities with moving walls.

The library traces massless rays between a static wall at x = 0 and moving
mirrors, turning wall motion into billiard maps, cumulative Doppler
factors, resonance censuses, classical energy evolution and the quantum
vacuum energy (Moore / Schwarzian layer).  All quantities use c = 1 units
with the rest length L as the natural scale.
"""

from .billiard import BilliardMap, RayPath, schwarzian_from_derivatives
from .classical_energy import (
    BounceEnergies,
    ProfileFunction,
    asymptotic_peak_profile,
    count_local_maxima,
    density_at,
    density_field,
    energy_at_bounces,
    evolve_density,
    fit_log_slope,
    gaussian_seed,
    mode_seed,
    total_energy,
    uniform_seed,
)
from .errors import (
    CavopticsError,
    ClassificationError,
    ConfigError,
    ConstraintViolation,
    DomainError,
    NumericError,
)
from .quantum import (
    MooreFunction,
    anomaly_direct,
    cumulative_anomaly,
    quantum_density,
    quantum_energy_at_bounces,
    quantum_evolution,
    quantum_total_energy,
    quantum_total_energy_direct,
    schwarzian,
    static_casimir_density,
    static_casimir_energy,
)
from .resonance import (
    PeakCensus,
    PeriodicTrajectory,
    ResonanceReport,
    ReturnPointScan,
    Sign,
    analyze_resonance,
    classify,
    extended_series_condition,
    find_return_points,
    peak_census,
    principal_starting_points,
    resonance_window,
    two_wall_resonance_window,
    window_scan,
)
from .trajectory import OffsetSinusoidal, Sinusoidal, Static, Tabulated, WallTrajectory
from .twowall import (
    TwoWallCavity,
    TwoWallDensity,
    TwoWallExponent,
    TwoWallRayPath,
    effective_point,
    effective_trajectory,
    trace_two_wall,
    two_wall_exponents,
    two_wall_return_points,
    two_wall_window_scan,
)

__version__ = "0.1.0"
