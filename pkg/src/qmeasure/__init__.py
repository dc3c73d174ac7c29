"""Measurement as a linear transform of probability density and current.

An intrinsic reading (rho, J) of a one-dimensional state is mapped by a pair
of normalized kernels onto a recorded reading. The package computes the
statistical parameters of both readings, the error and entropy indicators
between them, draws position samples, and checks everything against closed
forms for Gaussian packets and the harmonic oscillator.
"""

from .analytic import (
    AnalyticReport, GaussianProfile, analytic_oscillator_report, analytic_scenario_report,
    momentum_radicand, recorded_momentum_variance, recorded_oscillator_energy,
)
from .errors import (
    ConfigError, DivergenceError, DomainError, GridMismatchError, InsufficientSampleError,
    LabelMismatchError, NormalizationError, ParameterError, QMeasureError, ResolutionError,
    TailDecayError, ValidityError,
)
from .estimators import (
    OperatorSpec, ParameterSet, UncertaintyCheck, check_uncertainty_relations, correlation_xp,
    mean_momentum, mean_position, momentum_second_moment, momentum_variance,
    operator_mean_and_variance, parameter_set, position_moment, position_variance,
)
from .grid import NATURAL_UNITS, Grid, UnitSystem, centered_grid, make_grid
from .indicators import (
    EntropyPair, IndicatorReport, entropy_deltas, entropy_pair, error_indicators,
    motional_entropy, positional_entropy,
)
from .sampling import SampleSet, empirical_parameters, read_samples_csv, sample_positions, write_samples_csv
from .scenario import (
    ScenarioConfig, ScenarioResult, default_scenario, load_config, simulate, sweep, verify,
)
from .state import (
    GaussianPacketParams, Reading, WaveFunction, gaussian_packet, oscillator_ground_state,
    oscillator_width, read_reading_csv, reading_of, reconstruct_wavefunction, write_reading_csv,
)
from .transform import (
    DeviceParams, Kernel, NormalizationReport, apply_current_transform, apply_density_transform,
    check_normalization, gaussian_kernel, identity_kernel, load_kernel, measure, save_kernel,
)

__version__ = "0.1.0"
