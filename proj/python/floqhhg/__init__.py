"""Floquet complex-spectral HHG of a driven two-level atom."""

from ._core import (
    CertificationError,
    ConfigError,
    ConvergenceError,
    DomainError,
    Error,
    FitError,
    IoError,
    LambShift,
    PoleMethod,
    ResolutionError,
    Sheet,
    SingularityError,
    SpectralSetup,
    SystemParams,
    amplitude,
    bessel_j,
    bessel_row,
    integrate_oracle,
    jittered_grid,
    run_scenario,
    scenario_names,
    sigma_plus,
    stationary_spectrum,
    survival_amplitude,
    temporal_spectrum,
)

__version__ = "0.1.0"
