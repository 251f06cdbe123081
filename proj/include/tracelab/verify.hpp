#pragma once

#include <vector>

#include "tracelab/domain.hpp"
#include "tracelab/trace.hpp"

namespace tracelab::verify {

/// sum_i w_i psi_i^2, the quadrature value of ||psi||^2_{L^2(Y)}.
double quad_trace_norm(const BoundaryTrace& trace);

struct RellichResult {
  double residual = 0.0;          ///< |2 lambda - int (nu . x) psi^2| / (2 lambda)
  double boundary_integral = 0.0;  ///< int (nu . x) psi^2
  bool sign_change = false;        ///< nu . x changes sign on the boundary
};

/// Rellich identity check with A = x . grad, origin at the domain centroid.
/// Only Euclidean domains (disc, rectangle, polygon) are accepted.
RellichResult rellich_check(const DomainSpec& domain, double lambda, const BoundaryTrace& trace);
RellichResult rellich_check(const EigenmodeRecord& mode, const BoundaryTrace& trace);

/// ||psi||^2_{H^k} = sum_{j<=k} ||d^j psi / ds^j||^2 with s the arc length,
/// by spectral differentiation. Requires a uniform periodic sampling.
double boundary_sobolev_norm(const BoundaryTrace& trace, int k);

/// Growth check for ||psi||^2_{H^k} / lambda^{k+1} over disc modes. The top
/// decade [lambda_max / 10, lambda_max] is cut into `bins` log-spaced bins;
/// `growth` is max / median of the per-bin maxima.
struct SobolevTrend {
  int order = 0;
  double lambda_max = 0.0;
  int modes = 0;                    ///< records in the top decade
  std::vector<double> bin_maxima;   ///< empty bins omitted
  double overall_max = 0.0;         ///< over every record, not just the top decade
  double growth = 0.0;
};

/// Scaled norm ||psi||^2_{H^k} / lambda^{k+1} of one disc record, using
/// 4 n + 64 trapezoid nodes.
double scaled_sobolev_norm(const EigenmodeRecord& record, int k);

SobolevTrend sobolev_trend(const std::vector<EigenmodeRecord>& disc_records, int k, int bins = 10);

struct OzawaResult {
  double empirical = 0.0;     ///< sum_{lambda_j < Lambda} psi_j(y)^2
  double leading_term = 0.0;  ///< Lambda^2 / (8 pi)
  int mode_count = 0;         ///< eigenvalues below Lambda, with multiplicity
  double weyl_count = 0.0;    ///< |M| Lambda / (4 pi)
  bool enumeration_complete = false;  ///< |mode_count / weyl_count - 1| <= 10%
};

/// Pointwise averaged trace sum at boundary point y (disc or rectangle).
/// Degenerate eigenspaces are summed in full (cos and sin pairs on the disc).
OzawaResult ozawa_sum(const DomainSpec& domain, double lambda_max, Point2 y);

struct RatioSummary {
  DomainSpec domain;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  int count = 0;

  friend bool operator==(const RatioSummary&, const RatioSummary&) = default;
};

/// Statistics of psi_norm_sq / lambda over records with lambda in
/// [lambda_min, lambda_max]. Throws std::invalid_argument for an empty window.
RatioSummary ratio_summary(const std::vector<EigenmodeRecord>& records, double lambda_min, double lambda_max);

/// ||u||^2 over the domain by quadrature of the closed-form eigenfunction.
double interior_norm_sq(const EigenmodeRecord& record);

struct NeumannIdentity {
  double lambda = 0.0;
  double boundary_norm_sq = 0.0;  ///< ||chi||^2 from quadrature
  double residual = 0.0;          ///< |(lambda - n^2) ||chi||^2 - 2 lambda| / (2 lambda)
};

/// Independent check of (lambda - n^2) ||chi||^2 = 2 lambda on the unit disc:
/// the eigenfunction is normalized by Gauss-Legendre quadrature in rho and
/// its boundary values integrated with the trapezoid rule.
NeumannIdentity neumann_identity(int n, int k, int radial_nodes = 0, int boundary_nodes = 0);

}  // namespace tracelab::verify
