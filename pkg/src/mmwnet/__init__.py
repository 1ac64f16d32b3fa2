"""Coverage, rate, and ergodic spectral efficiency for finite millimeter-wave
device-to-device networks with human-body blockage: exact conditional
analysis, closed-form spatial averaging, and a cross-validating Monte Carlo
engine."""

__version__ = "0.1.0"

from .antenna import (AntennaPattern, mainlobe_prob, radiated_power_integral,
                      upa_pattern)
from .blockage import (BlockProbProfile, LosBall, TabulatedBlockProfile,
                       block_prob, los_ball, pairwise_block_prob)
from .channel import (GainPmf, LinkModel, OmegaVector, ReferenceLink, beta0,
                      interferer_gain_pmf, omega_from_arrays, omega_vector)
from .coverage import (CoverageCurve, MultinomialPlan, beta_grid,
                       coverage_conditional, coverage_curve,
                       ergodic_spectral_efficiency, g_ti, multinomial_plan,
                       rate_ccdf, rate_curve)
from .geometry import (AnnulusRegion, BlockageReport, BlockingCone,
                       PlanarPoint, UserSet, blocked_set, grid_placement,
                       load_placements_csv, orbital_positions, sample_bpp,
                       save_placements_csv)
from .montecarlo import (AssumptionLevel, ComparisonResult, Estimate,
                         MonteCarloResult, compare_levels,
                         empirical_block_profile, run_trials)
from .scenario import ConfigError, GridSpec, ScenarioConfig, parse_scenario
from .spatial import (OmegaDensity, OmegaSegment, calibrate_los_ball_radius,
                      coverage_spatial, coverage_spatial_curve,
                      ergodic_spatial, expected_g_ti, expected_gain_series,
                      omega_density, throughput)
from .specfun import gamma_sf, hyp2f1_bplus1, log_gamma
