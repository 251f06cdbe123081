#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tracelab::specfun {

/// Raised when a root bracket cannot be found or refinement stalls.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ZeroKind {
  J,       ///< zeros of J_n
  JPrime,  ///< zeros of J_n'
};

const char* to_string(ZeroKind kind);

/// J_n(x) for integer n >= 0 and x >= 0.
double bessel_j(int n, double x);

/// dJ_n/dx.
double bessel_j_prime(int n, double x);

/// The k-th positive root (k >= 1) of J_n or J_n'.
///
/// Positive roots only: for kind == JPrime and n == 0 the trivial critical
/// point at x = 0 is not counted, so bessel_zero(0, 1, JPrime) == j_{1,1}.
double bessel_zero(int n, int k, ZeroKind kind);

/// Immutable table of the first `count` positive roots of one (order, kind).
struct BesselZeroTable {
  int order = 0;
  ZeroKind kind = ZeroKind::J;
  std::vector<double> zeros;

  static BesselZeroTable compute(int order, int count, ZeroKind kind);

  /// All positive roots strictly below `limit`.
  static BesselZeroTable below(int order, double limit, ZeroKind kind);
};

/// Associated Legendre function P_l^m(t), unnormalized Ferrers convention
/// WITHOUT the Condon-Shortley phase:
///
///   P_l^m(t) = (1 - t^2)^{m/2} d^m/dt^m P_l(t),
///
/// so P_1^1(t) = +sqrt(1 - t^2) and P_l^l(t) = (2l-1)!! (1 - t^2)^{l/2}.
/// Throws std::range_error when the value is outside double range (large m).
double legendre_plm(int l, int m, double t);

/// sqrt((2l+1)/2 * (l-m)!/(l+m)!) * P_l^m(t): orthonormal on [-1, 1] for
/// fixed m, representable for every l, m.
double legendre_plm_normalized(int l, int m, double t);

/// Normalization of the hemisphere mode
///   u = c e^{i(l-1)phi} sin^{l-1}(theta) cos(theta),  0 <= theta <= pi/2,
/// with lambda = l(l+1). Odd l only.
struct HemisphereNormalization {
  int degree = 1;
  double c_sq = 0.0;
  double lambda = 0.0;
};

HemisphereNormalization hemisphere_c_sq(int l);

}  // namespace tracelab::specfun
