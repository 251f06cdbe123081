#include "tracelab/specfun.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "tracelab/quadrature.hpp"

using namespace tracelab::specfun;

namespace {

constexpr double kPi = std::numbers::pi;

// Test-only oracle: truncated power series
//   J_n(x) = sum_m (-1)^m (x/2)^{2m+n} / (m! (m+n)!)
// in long double. Accurate to ~1e-15 for x <= 20.
long double series_j(int n, long double x) {
  long double term = 1.0L;
  for (int i = 1; i <= n; ++i) term *= (x / 2.0L) / i;
  long double sum = term;
  for (int m = 1; m < 120; ++m) {
    term *= -(x / 2.0L) * (x / 2.0L) / (static_cast<long double>(m) * (m + n));
    sum += term;
    if (std::fabs(term) < 1e-30L) break;
  }
  return sum;
}

template <class F>
long double bisect(F f, long double lo, long double hi) {
  long double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    const long double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5L * (lo + hi);
}

// Rodrigues oracle: P_l^m(t) = (1-t^2)^{m/2} d^{l+m}/dt^{l+m} (t^2-1)^l / (2^l l!).
long double rodrigues(int l, int m, long double t) {
  std::vector<long double> c(2 * l + 1, 0.0L);  // coefficients of (t^2 - 1)^l
  long double binom = 1.0L;
  for (int i = 0; i <= l; ++i) {
    c[2 * i] = binom * (((l - i) % 2) ? -1.0L : 1.0L);
    binom = binom * (l - i) / (i + 1);
  }
  for (int d = 0; d < l + m; ++d) {
    for (std::size_t p = 0; p + 1 < c.size(); ++p) c[p] = c[p + 1] * static_cast<long double>(p + 1);
    c.back() = 0.0L;
  }
  long double value = 0.0L;
  for (std::size_t p = c.size(); p-- > 0;) value = value * t + c[p];
  long double denom = 1.0L;
  for (int i = 1; i <= l; ++i) denom *= 2.0L * i;
  return std::pow(1.0L - t * t, m / 2.0L) * value / denom;
}

}  // namespace

TEST(BesselJ, TrivialValues) {
  EXPECT_EQ(bessel_j(0, 0.0), 1.0);
  EXPECT_EQ(bessel_j(1, 0.0), 0.0);
  EXPECT_EQ(bessel_j(7, 0.0), 0.0);
}

TEST(BesselJ, MatchesSeriesOracle) {
  for (int n : {0, 1, 2, 5, 10}) {
    for (double x : {0.1, 1.0, 2.5, 7.3, 12.0, 18.0}) {
      EXPECT_NEAR(bessel_j(n, x), static_cast<double>(series_j(n, x)), 1e-12) << n << " " << x;
    }
  }
}

TEST(BesselJ, LargeArgumentWronskian) {
  // J_{n+1} Y_n - J_n Y_{n+1} = 2 / (pi x) is awkward without Y; instead check
  // the three-term recurrence J_{n-1} + J_{n+1} = (2n / x) J_n at large x.
  for (double x : {500.0, 3000.0, 9999.0}) {
    for (int n : {1, 10, 40}) {
      const double lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x);
      const double rhs = 2.0 * n / x * bessel_j(n, x);
      EXPECT_NEAR(lhs, rhs, 1e-12);
    }
  }
}

TEST(BesselJ, RejectsNegativeOrder) { EXPECT_THROW(bessel_j(-1, 1.0), std::domain_error); }

TEST(BesselZero, FirstZeroOfJ0) {
  const double oracle = static_cast<double>(bisect([](long double x) { return series_j(0, x); }, 2.0L, 3.0L));
  EXPECT_NEAR(oracle, 2.404825557695773, 1e-14);
  EXPECT_NEAR(bessel_zero(0, 1, ZeroKind::J), oracle, 1e-10 * oracle);
  EXPECT_NEAR(bessel_j(0, 2.404825557695773), 0.0, 1e-10);
}

TEST(BesselZero, FirstCriticalPointOfJ1) {
  // Oracle: bisection on a centered finite difference of the series J_1.
  const auto fd = [](long double x) {
    const long double h = 1e-5L;
    return (series_j(1, x + h) - series_j(1, x - h)) / (2.0L * h);
  };
  const double oracle = static_cast<double>(bisect(fd, 1.5L, 2.5L));
  EXPECT_NEAR(oracle, 1.841183781340659, 1e-9);
  EXPECT_NEAR(bessel_zero(1, 1, ZeroKind::JPrime), 1.841183781340659, 1e-10 * 1.85);
}

TEST(BesselZero, SeriesOracleAgreesOnSeveralRoots) {
  for (int n : {0, 1, 3, 6}) {
    const auto table = BesselZeroTable::compute(n, 4, ZeroKind::J);
    for (double z : table.zeros) {
      if (z > 20.0) continue;  // outside the oracle's accurate range
      const double oracle = static_cast<double>(
          bisect([n](long double x) { return series_j(n, x); }, static_cast<long double>(z) - 0.1L,
                 static_cast<long double>(z) + 0.1L));
      EXPECT_NEAR(z, oracle, 1e-10 * oracle);
    }
  }
}

TEST(BesselZero, Interlacing) {
  EXPECT_LT(bessel_zero(0, 1, ZeroKind::J), bessel_zero(1, 1, ZeroKind::J));
  EXPECT_LT(bessel_zero(1, 1, ZeroKind::J), bessel_zero(0, 2, ZeroKind::J));
  for (int n = 0; n < 30; ++n) {
    const auto a = BesselZeroTable::compute(n, 12, ZeroKind::J).zeros;
    const auto b = BesselZeroTable::compute(n + 1, 12, ZeroKind::J).zeros;
    for (int k = 0; k + 1 < 12; ++k) {
      EXPECT_LT(a[k], b[k]);
      EXPECT_LT(b[k], a[k + 1]);
    }
  }
}

TEST(BesselZero, TablesIncreaseAndDerivativeRootsExceedOrder) {
  for (int n = 0; n <= 60; n += 3) {
    for (auto kind : {ZeroKind::J, ZeroKind::JPrime}) {
      const auto zs = BesselZeroTable::compute(n, 10, kind).zeros;
      for (std::size_t i = 1; i < zs.size(); ++i) EXPECT_LT(zs[i - 1], zs[i]);
      if (n >= 1 && kind == ZeroKind::JPrime) {
        EXPECT_GT(zs.front(), n);
      }
    }
  }
}

TEST(BesselZero, DerivativeRootsOfOrderZeroAreRootsOfJ1) {
  // J_0' = -J_1; the trivial root at the origin is not counted.
  for (int k = 1; k <= 5; ++k) {
    EXPECT_NEAR(bessel_zero(0, k, ZeroKind::JPrime), bessel_zero(1, k, ZeroKind::J), 1e-12);
  }
}

TEST(BesselZero, DerivativeRootAsymptoticShape) {
  // (j'_{1,n} - n) / n^{1/3} settles to a constant; compare over the top octave.
  std::vector<double> q;
  for (int n = 200; n <= 400; n += 25) {
    const double z = bessel_zero(n, 1, ZeroKind::JPrime);
    q.push_back((z - n) / std::cbrt(static_cast<double>(n)));
  }
  const auto [lo, hi] = std::minmax_element(q.begin(), q.end());
  EXPECT_GT(*lo, 0.0);
  EXPECT_LT((*hi - *lo) / *lo, 0.05);
  // Value produced by the zero finder itself: about 0.8086 (the Airy constant
  // |a'_1| / 2^{1/3}).
  EXPECT_NEAR(q.back(), 0.8086, 0.01);
}

TEST(BesselZero, ErrorsOnBadIndex) {
  EXPECT_THROW(bessel_zero(0, 0, ZeroKind::J), std::domain_error);
  EXPECT_THROW(bessel_zero(-2, 1, ZeroKind::J), std::domain_error);
}

TEST(Legendre, LowOrderClosedForms) {
  for (double t : {-0.9, -0.3, 0.0, 0.4, 1.0}) EXPECT_NEAR(legendre_plm(1, 0, t), t, 1e-15);
  // No Condon-Shortley phase: P_1^1(t) = +sqrt(1 - t^2).
  EXPECT_NEAR(legendre_plm(1, 1, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(legendre_plm(1, 1, 0.6), 0.8, 1e-15);
}

TEST(Legendre, MatchesRodriguesOracle) {
  EXPECT_NEAR(static_cast<double>(rodrigues(3, 2, 0.5L)), 5.625, 1e-14);
  EXPECT_NEAR(legendre_plm(3, 2, 0.5), 5.625, 1e-10 * 5.625);
  for (int l = 0; l <= 14; ++l) {
    for (int m = 0; m <= l; ++m) {
      for (double t : {-0.77, -0.1, 0.33, 0.95}) {
        const double ref = static_cast<double>(rodrigues(l, m, t));
        EXPECT_NEAR(legendre_plm(l, m, t), ref, 1e-10 * std::max(1.0, std::abs(ref))) << l << "," << m << "," << t;
      }
    }
  }
}

TEST(Legendre, RecurrenceResidualProperty) {
  // (l - m + 1) P_{l+1}^m = (2l + 1) t P_l^m - (l + m) P_{l-1}^m on random samples.
  std::mt19937 rng(1234);
  std::uniform_int_distribution<int> ldist(2, 480);
  std::uniform_real_distribution<double> tdist(-1.0, 1.0);
  for (int trial = 0; trial < 400; ++trial) {
    const int l = ldist(rng);
    const int m = std::uniform_int_distribution<int>(0, l - 1)(rng);
    const double t = tdist(rng);
    // Normalized values avoid overflow; ratio(i, j) = N_i / N_j for the
    // normalization N_l = sqrt((2l+1)/2 (l-m)!/(l+m)!).
    auto pn = [&](int ll) { return legendre_plm_normalized(ll, m, t); };
    auto log_n = [&](int ll) {
      return 0.5 * (std::log((2.0 * ll + 1.0) / 2.0) + std::lgamma(ll - m + 1.0) - std::lgamma(ll + m + 1.0));
    };
    auto ratio = [&](int i, int j) { return std::exp(log_n(i) - log_n(j)); };
    const double lhs = (l - m + 1.0) * pn(l + 1) * ratio(l, l + 1);
    const double rhs = (2.0 * l + 1.0) * t * pn(l) - (l - 1 >= m ? (l + m) * pn(l - 1) * ratio(l, l - 1) : 0.0);
    const double mag = std::max({std::abs(lhs), std::abs((2.0 * l + 1.0) * t * pn(l)), 1e-300});
    EXPECT_LT(std::abs(lhs - rhs) / mag, 1e-9) << l << " " << m << " " << t;
  }
}

TEST(Legendre, NormalizedIsOrthonormal) {
  const auto rule = tracelab::gauss_legendre(80);
  for (int m : {0, 3, 20}) {
    for (int l1 = m; l1 < m + 5; ++l1) {
      for (int l2 = m; l2 < m + 5; ++l2) {
        double s = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
          s += rule.weights[i] * legendre_plm_normalized(l1, m, rule.nodes[i]) *
               legendre_plm_normalized(l2, m, rule.nodes[i]);
        EXPECT_NEAR(s, l1 == l2 ? 1.0 : 0.0, 1e-12);
      }
    }
  }
}

TEST(Legendre, DomainAndRangeErrors) {
  EXPECT_THROW(legendre_plm(2, 3, 0.1), std::domain_error);
  EXPECT_THROW(legendre_plm(2, 1, 1.5), std::domain_error);
  EXPECT_THROW(legendre_plm(400, 400, 0.0), std::range_error);
}

TEST(Hemisphere, DegreeOneIsAnalytic) {
  // int_hemisphere cos^2(theta) dOmega = 2 pi / 3.
  const auto h = hemisphere_c_sq(1);
  EXPECT_NEAR(h.c_sq, 3.0 / (2.0 * kPi), 1e-14);
  EXPECT_EQ(h.lambda, 2.0);
}

TEST(Hemisphere, QuadratureInvariant) {
  // 2D Gauss oracle over (theta, phi) of |sin^{l-1} cos e^{i(l-1) phi}|^2.
  for (int l : {3, 5, 11, 41}) {
    const auto gt = tracelab::gauss_legendre(2 * l + 20, 0.0, kPi / 2);
    const auto gp = tracelab::gauss_legendre(8, 0.0, 2.0 * kPi);
    double s = 0.0;
    for (std::size_t i = 0; i < gt.nodes.size(); ++i)
      for (std::size_t j = 0; j < gp.nodes.size(); ++j) {
        const double th = gt.nodes[i];
        const double u = std::pow(std::sin(th), l - 1) * std::cos(th);
        s += gt.weights[i] * gp.weights[j] * u * u * std::sin(th);
      }
    EXPECT_NEAR(hemisphere_c_sq(l).c_sq * s, 1.0, 1e-8) << l;
  }
}

TEST(Hemisphere, AgreesWithLegendreMode) {
  // P_3^2(cos theta) = 15 sin^2 cos, so c_3^2 * 225 normalizes Y_{3,2}/15.
  const auto gt = tracelab::gauss_legendre(40, 0.0, 1.0);
  double s = 0.0;
  for (std::size_t i = 0; i < gt.nodes.size(); ++i) {
    const double p = legendre_plm(3, 2, gt.nodes[i]);
    s += gt.weights[i] * p * p;
  }
  EXPECT_NEAR(hemisphere_c_sq(3).c_sq * 2.0 * kPi * s / 225.0, 1.0, 1e-12);
}

TEST(Hemisphere, InverseNormalizationScalesLikeMinusThreeHalves) {
  double lo = 1e300;
  double hi = 0.0;
  for (int l = 21; l <= 201; l += 2) {
    const double v = std::pow(static_cast<double>(l), 1.5) / hemisphere_c_sq(l).c_sq;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Limit is pi^{3/2} / 2 ~ 2.784.
  EXPECT_GT(lo, 2.6);
  EXPECT_LT(hi, 2.9);
}

TEST(Hemisphere, RejectsEvenDegree) {
  EXPECT_THROW(hemisphere_c_sq(2), std::domain_error);
  EXPECT_THROW(hemisphere_c_sq(0), std::domain_error);
}

TEST(Hemisphere, LargeDegreeDoesNotOverflow) {
  const auto h = hemisphere_c_sq(100001);
  EXPECT_TRUE(std::isfinite(h.c_sq));
  EXPECT_GT(h.c_sq, 0.0);
}
