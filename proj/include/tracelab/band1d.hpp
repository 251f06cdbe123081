#pragma once

#include <string>
#include <vector>

#include "tracelab/domain.hpp"

namespace tracelab::band1d {

/// Separated problem on the band [-a, a] x S^1 with metric dy^2 + w(y)^2 dphi^2.
/// Curvature::Flat (w = 1) is kept as a solver control.
struct BandSpec {
  Curvature curvature = Curvature::Spherical;
  double half_width = 0.5;
  int l = 0;
  int grid_size = 1024;  ///< intervals on [-a, a] for the coarse solve

  void validate() const;
};

double weight(Curvature c, double y);
double weight_prime(Curvature c, double y);

/// u = e^{i l phi} v(y), normalized by 2 pi int v^2 w dy = 1.
struct BandMode {
  BandSpec spec;
  int transverse_index = 1;
  double lambda = 0.0;            ///< Richardson-extrapolated eigenvalue
  double lambda_coarse = 0.0;     ///< grid_size intervals
  double lambda_fine = 0.0;       ///< 2 * grid_size intervals
  double psi_norm_sq = 0.0;       ///< over both boundary circles, extrapolated
  std::vector<double> y;          ///< fine grid, endpoints included
  std::vector<double> v;          ///< transverse profile on y, v(+-a) = 0
  std::string family = "transverse ground state";

  /// 2 pi int v^2 w dy by the trapezoid rule on the stored grid.
  double interior_norm_sq() const;
  EigenmodeRecord record() const;
};

/// Raw discrete solve on n intervals: eigenvalue, psi norm and profile.
struct GridSolution {
  double lambda = 0.0;
  double psi_norm_sq = 0.0;
  std::vector<double> y;
  std::vector<double> v;
};
GridSolution solve_on_grid(const BandSpec& spec, int intervals, int transverse_index);

/// Solves on grid_size and 2 * grid_size intervals and extrapolates.
/// Throws specfun::ConvergenceError when the two eigenvalues differ by more
/// than `max_refinement_gap` relative.
BandMode band_mode(const BandSpec& spec, int transverse_index = 1, double max_refinement_gap = 1e-4);

struct ScalingRow {
  int l = 0;
  double lambda = 0.0;
  double psi_norm_sq = 0.0;
  double audit = 0.0;  ///< psi_norm_sq * log(lambda) / lambda
};

struct ScalingReport {
  Curvature curvature = Curvature::Spherical;
  double half_width = 0.0;
  int grid_size = 0;
  std::vector<ScalingRow> rows;
  double top_decade_ratio = 0.0;  ///< max / min of audit over lambda >= lambda_max / 10
  double slope = 0.0;             ///< least-squares slope of log psi_norm_sq against l
  double correlation = 0.0;       ///< Pearson correlation of log psi_norm_sq with l
  double lambda_decades = 0.0;    ///< log10(lambda_max / lambda_min)
};

/// Sweep over l with transverse index 1.
ScalingReport trapping_scaling_audit(Curvature curvature, double half_width, const std::vector<int>& l_values,
                                     int grid_size = 1024);

}  // namespace tracelab::band1d
