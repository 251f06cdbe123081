#include "tracelab/trace.hpp"

#include <numeric>
#include <stdexcept>

namespace tracelab {

double BoundaryTrace::total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

void BoundaryTrace::validate() const {
  const std::size_t n = values.size();
  if (n == 0) throw std::invalid_argument("boundary trace is empty");
  if (nodes.size() != n || weights.size() != n || normals.size() != n) {
    throw std::invalid_argument("boundary trace arrays have mismatched lengths");
  }
  if (!arclength.empty() && arclength.size() != n) {
    throw std::invalid_argument("boundary trace arclength has the wrong length");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("boundary trace weights must be positive");
  }
}

}  // namespace tracelab
