#include "tracelab/specfun.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace tracelab::specfun {

namespace {

constexpr double kPi = std::numbers::pi;

// Neighbouring roots of J_n and J_n' are always more than pi/2 apart, so a
// scan with this step sees every sign change exactly once.
constexpr double kScanStep = kPi / 4.0;

void require_order(int n) {
  if (n < 0) throw std::domain_error("Bessel order must be non-negative, got " + std::to_string(n));
}

double eval(int n, double x, ZeroKind kind) {
  return kind == ZeroKind::J ? bessel_j(n, x) : bessel_j_prime(n, x);
}

// Derivative of eval() with respect to x; uses Bessel's equation for J''.
double eval_slope(int n, double x, ZeroKind kind) {
  if (kind == ZeroKind::J) return bessel_j_prime(n, x);
  const double nn = static_cast<double>(n) * n;
  return -bessel_j_prime(n, x) / x - (1.0 - nn / (x * x)) * bessel_j(n, x);
}

double scan_start(int n, ZeroKind kind) {
  // j_{n,1} > n and j'_{n,1} > n for n >= 1; both functions keep one sign
  // on (0, n]. For n == 0 step off the origin (J_0'(0) = 0).
  if (n == 0) return kind == ZeroKind::J ? 0.0 : 1e-3;
  return static_cast<double>(n);
}

// Bisection down to a narrow bracket, then safeguarded Newton.
double refine(int n, double lo, double hi, ZeroKind kind) {
  double flo = eval(n, lo, kind);
  for (int it = 0; it < 200 && (hi - lo) > 1e-9 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = eval(n, mid, kind);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 50; ++it) {
    const double f = eval(n, x, kind);
    const double df = eval_slope(n, x, kind);
    if (f == 0.0 || df == 0.0) return x;
    const double next = x - f / df;
    if (!(next > lo && next < hi)) {
      throw ConvergenceError("Newton step left the bracket while refining a Bessel root");
    }
    const double step = std::abs(next - x);
    x = next;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * x) return x;
  }
  return x;
}

}  // namespace

const char* to_string(ZeroKind kind) { return kind == ZeroKind::J ? "J" : "J'"; }

double bessel_j(int n, double x) {
  require_order(n);
  if (x < 0.0) throw std::domain_error("bessel_j: x must be non-negative");
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  return boost::math::cyl_bessel_j(n, x);
}

double bessel_j_prime(int n, double x) {
  require_order(n);
  if (x < 0.0) throw std::domain_error("bessel_j_prime: x must be non-negative");
  if (x == 0.0) return n == 1 ? 0.5 : 0.0;
  return boost::math::cyl_bessel_j_prime(n, x);
}

BesselZeroTable BesselZeroTable::compute(int order, int count, ZeroKind kind) {
  require_order(order);
  if (count < 0) throw std::domain_error("zero count must be non-negative");
  BesselZeroTable table{order, kind, {}};
  table.zeros.reserve(static_cast<std::size_t>(count));
  if (count == 0) return table;

  const double limit = (count + 0.5 * order + 2.0) * kPi + order + 10.0;
  double x = scan_start(order, kind);
  double fx = eval(order, x == 0.0 ? 1e-300 : x, kind);
  while (static_cast<int>(table.zeros.size()) < count) {
    const double next = x + kScanStep;
    if (next > limit) {
      throw ConvergenceError("failed to bracket root " + std::to_string(table.zeros.size() + 1) +
                             " of " + to_string(kind) + "_" + std::to_string(order));
    }
    const double fn = eval(order, next, kind);
    if ((fx < 0.0) != (fn < 0.0)) table.zeros.push_back(refine(order, x, next, kind));
    x = next;
    fx = fn;
  }
  return table;
}

BesselZeroTable BesselZeroTable::below(int order, double limit, ZeroKind kind) {
  require_order(order);
  BesselZeroTable table{order, kind, {}};
  double x = scan_start(order, kind);
  if (x >= limit) return table;
  double fx = eval(order, x == 0.0 ? 1e-300 : x, kind);
  while (x < limit) {
    const double next = x + kScanStep;
    const double fn = eval(order, next, kind);
    if ((fx < 0.0) != (fn < 0.0)) {
      const double root = refine(order, x, next, kind);
      if (root >= limit) break;
      table.zeros.push_back(root);
    }
    x = next;
    fx = fn;
  }
  return table;
}

double bessel_zero(int n, int k, ZeroKind kind) {
  require_order(n);
  if (k < 1) throw std::domain_error("root index k must be >= 1");
  return BesselZeroTable::compute(n, k, kind).zeros.back();
}

double legendre_plm_normalized(int l, int m, double t) {
  if (m < 0 || m > l) throw std::domain_error("legendre: require 0 <= m <= l");
  if (!(std::abs(t) <= 1.0)) throw std::domain_error("legendre: |t| must not exceed 1");

  const double s = std::sqrt((1.0 - t) * (1.0 + t));
  double pmm = std::sqrt(0.5);
  for (int i = 1; i <= m; ++i) pmm *= s * std::sqrt((2.0 * i + 1.0) / (2.0 * i));
  if (l == m) return pmm;

  double prev = pmm;
  double cur = t * std::sqrt(2.0 * m + 3.0) * pmm;
  const double mm = static_cast<double>(m) * m;
  for (int ll = m + 2; ll <= l; ++ll) {
    const double l2 = static_cast<double>(ll) * ll;
    const double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - mm));
    const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
    const double next = a * (t * cur - b * prev);
    prev = cur;
    cur = next;
  }
  return cur;
}

double legendre_plm(int l, int m, double t) {
  const double scaled = legendre_plm_normalized(l, m, t);
  if (scaled == 0.0) return 0.0;
  // log of sqrt((2l+1)/2 * (l-m)!/(l+m)!)
  const double log_norm =
      0.5 * (std::log((2.0 * l + 1.0) / 2.0) + std::lgamma(l - m + 1.0) - std::lgamma(l + m + 1.0));
  const double log_value = std::log(std::abs(scaled)) - log_norm;
  if (log_value > std::log(std::numeric_limits<double>::max())) {
    throw std::range_error("legendre_plm: P_" + std::to_string(l) + "^" + std::to_string(m) +
                           " exceeds double range; use legendre_plm_normalized");
  }
  return std::copysign(std::exp(log_value), scaled);
}

HemisphereNormalization hemisphere_c_sq(int l) {
  if (l < 1 || l % 2 == 0) throw std::domain_error("hemisphere_c_sq: l must be odd and >= 1");
  // c^{-2} = 2 pi * int_0^{pi/2} sin^{2l-1} cos^2 = 2 pi * I_{2l-1} / (2l + 1),
  // I_{2l-1} = prod_{j=1}^{l-1} 2j / (2j + 1) = 4^{l-1} ((l-1)!)^2 / (2l-1)!.
  const double log_wallis = (2.0 * l - 2.0) * std::numbers::ln2 + 2.0 * std::lgamma(l) - std::lgamma(2.0 * l);
  const double log_inv_c_sq = std::log(2.0 * kPi) + log_wallis - std::log(2.0 * l + 1.0);
  return {l, std::exp(-log_inv_c_sq), static_cast<double>(l) * (l + 1)};
}

}  // namespace tracelab::specfun
