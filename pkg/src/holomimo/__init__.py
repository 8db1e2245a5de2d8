"""holomimo: wavenumber-domain holographic MIMO channel and capacity simulation."""

from .errors import ConfigurationError, HoloMimoError, NumericError
from .geometry import (FourierBasis, PlanarArrayConfig, WavenumberCell,
                       WavenumberLattice, axial_wavenumber, build_fourier_basis,
                       enumerate_lattice)
from .spectrum import (AngleDistribution, AngularSpectrum, cell_variance,
                       cell_variance_oracle, compute_normalizers,
                       compute_spectrum, eval_pdf)
from .channel import (AngularChannel, SpatialChannel, derive_trial_seed,
                      load_channel, sample_angular_channel, save_channel,
                      synthesize_spatial)
from .capacity import (CapacityEstimate, LinkBudget, antenna_gain,
                       capacity_continuous_aperture, capacity_discrete_aperture,
                       capacity_from_eigenvalues, capacity_low_snr,
                       capacity_upper_bound, cardinality_estimate,
                       continuous_aperture_budget, discrete_aperture_budget,
                       eigenvalue_trials, ergodic_capacity, hermitian_eigenvalues)
from .scenarios import (ScenarioConfig, ScenarioPreset, builtin_preset,
                        parse_scenario, with_aperture_scale)
from .sweep import (SweepResult, SweepRow, SweepSeries, SweepSpec,
                    derive_point_seed, emit_csv, emit_svg, evaluate_point,
                    fig4_spec, fig5_spec, fig6_spec, format_csv, format_svg,
                    parse_csv, parse_sweep_spec, run_point, run_sweep)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
