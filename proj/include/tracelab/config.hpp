#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tracelab {

/// Every numeric threshold used by the checks. Defaults are the acceptance
/// values; data/config.json mirrors them.
struct Tolerances {
  double disc_ratio = 1e-8;            ///< |ratio - 2/a| for disc modes
  double rectangle_agreement = 1e-8;   ///< analytic vs quadrature ratio
  double rectangle_infimum = 0.01;     ///< inf over n at m = 1 vs 4/b
  double cylinder_threshold = 0.01;    ///< ratio must drop below this
  double hemisphere_slope = 0.75;
  double hemisphere_slope_tol = 0.05;
  double rellich_closed_form = 1e-6;
  double rellich_fem = 2e-2;
  double sobolev_growth = 3.0;         ///< max / median over the top decade
  double ozawa_band = 0.15;            ///< |empirical / leading - 1|
  double ozawa_lambda_max = 2000.0;
  double weyl_guard = 0.10;
  double profile_uniformity = 2.0;     ///< top / bottom decade
  double profile_energy_match = 1e-6;  ///< |E(0) - psi^2 / 2| relative
  double profile_energy_match_band = 1e-2;  ///< same for spline-interpolated band profiles
  double fem_lambda = 0.01;
  double fem_flux = 0.03;
  double fem_richardson = 0.30;        ///< |ratio / 4 - 1|
  double fem_residual = 1e-8;
  double fem_resolution = 0.05;        ///< lambda_max h^2
  double fem_cluster_gap = 1e-6;
  double fem_audit_ratio = 0.05;
  double band_correlation = -0.99;
  double band_slope_stability = 0.03;
  double band_hyperbolic_ratio = 5.0;
  double band_refinement_gap = 1e-4;
  double neumann_identity = 1e-6;
  double runtime_disc_s = 10.0;
  double runtime_hemisphere_s = 30.0;
  double runtime_fem_s = 60.0;
  double runtime_band_s = 120.0;

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct Config {
  static constexpr int kVersion = 1;
  int version = kVersion;
  Tolerances tol;

  friend bool operator==(const Config&, const Config&) = default;
};

/// Names of all tolerance keys, in file order.
std::vector<std::string> tolerance_names();
double tolerance_value(const Tolerances& tol, const std::string& name);

/// JSON object {"config_version": 1, "tolerances": {...}}. Missing keys keep
/// their defaults; unknown keys or a different version throw
/// std::invalid_argument.
Config read_config(std::istream& in);
Config load_config(const std::string& path);
void write_config(std::ostream& out, const Config& config);

}  // namespace tracelab
