#pragma once

#include <optional>
#include <vector>

#include "tracelab/domain.hpp"

namespace tracelab {

/// Sampled normal derivative psi on the boundary with quadrature weights.
///
/// `normals` are outward unit normals at the nodes (zero vectors for
/// non-planar boundaries). `arclength` holds the boundary parameter of each
/// node when the sampling is uniform in arc length on a closed curve; it is
/// empty for unstructured (FEM) traces, which the Sobolev norm rejects.
struct BoundaryTrace {
  std::vector<Point2> nodes;
  std::vector<Point2> normals;
  std::vector<double> weights;
  std::vector<double> values;
  std::vector<double> arclength;
  std::optional<int> tangential_wavenumber;

  std::size_t size() const { return values.size(); }

  /// Sum of weights (boundary length).
  double total_weight() const;

  /// Throws std::invalid_argument when sizes disagree or a weight is <= 0.
  void validate() const;
};

}  // namespace tracelab
