#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tracelab/band1d.hpp"
#include "tracelab/domain.hpp"

namespace tracelab::profile {

/// E(r) and L(r) sampled over the boundary collar 0 <= r <= delta.
///
/// Collar coordinates: r is the distance to the boundary and y the arc length
/// on the boundary, so dg = k^2 dr dy with k = 1 at r = 0. With v = k u,
///   E(r) = 1/2 int_{Y_r} (v_r^2 + (lambda + f) v^2 - h^{yy} v_y^2) dy,
///   L(r) = int_{Y_r} v^2 dy.
struct RadialProfile {
  DomainSpec domain;
  std::vector<int> indices;
  double lambda = 0.0;
  double psi_norm_sq = 0.0;  ///< ||psi||^2 over the part of Y carrying the collar
  double delta = 0.0;
  std::vector<double> r_grid;
  std::vector<double> E_values;
  std::vector<double> L_values;
  std::vector<double> dL_values;  ///< L'(r) = int 2 v v_r dy
  std::vector<double> k_factor;
  std::vector<double> f_potential;
  bool heuristic = false;  ///< rectangle: single side, corners cut away
};

/// Uniform grid on [0, delta] with `points` samples.
std::vector<double> collar_grid(double delta, int points);

/// Supremum of admissible collar widths (disc a, rectangle a/2, hemisphere
/// pi/2, band a). Throws for domains without a collar model.
double max_collar_width(const DomainSpec& domain);

/// Closed-form records (disc, Neumann disc, rectangle, hemisphere) and band
/// records. Band records are re-solved with the default grid.
RadialProfile collar_profile(const EigenmodeRecord& mode, const std::vector<double>& r_grid);
RadialProfile collar_profile(const band1d::BandMode& mode, const std::vector<double>& r_grid);

/// max over profiles and r of |E(r)| / lambda.
double energy_bound_audit(const std::vector<RadialProfile>& profiles);

/// max over profiles and r in (0, delta/3] of L(r) / (lambda r^2).
double l_bound_audit(const std::vector<RadialProfile>& profiles);

/// ((L')^2 / L - L'') / lambda at every grid point; NaN at the ends and where
/// L < 1e-12 max L. L' comes from quadrature, L'' from centred differences of L'.
std::vector<double> diff_ineq_series(const RadialProfile& profile);

/// Maximum of diff_ineq_series. Needs at least 64 grid points.
double diff_ineq_audit(const RadialProfile& profile);

/// Ratio (max over the top decade of lambda) / (max over the bottom decade)
/// for each empirical constant; values near 1 mean lambda-uniform.
struct UniformityReport {
  double energy = 0.0;
  double l_bound = 0.0;
  double diff_ineq = 0.0;
  double lambda_decades = 0.0;  ///< log10(lambda_max / lambda_min)
  int top_count = 0;
  int bottom_count = 0;
};

/// Throws std::invalid_argument if lambda spans less than one decade.
UniformityReport audit_uniformity(const std::vector<RadialProfile>& profiles);

/// int_0^delta L(r) dr by the trapezoid rule; bounded by ||u||^2 = 1.
double collar_mass(const RadialProfile& profile);

/// CSV with header `r,E,L`, full round-trip precision.
void write_profile_csv(std::ostream& out, const RadialProfile& profile);

}  // namespace tracelab::profile
