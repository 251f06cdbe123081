#include "tracelab/band1d.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tracelab/closedform.hpp"
#include "tracelab/specfun.hpp"

using namespace tracelab;
using namespace tracelab::band1d;

namespace {

constexpr double kPi = std::numbers::pi;

// Shooting oracle: RK4 on v' = p / w, p' = (l^2 / w - lambda w) v from
// v(-a) = 0, p(-a) = 1; returns v(a).
double shoot(Curvature c, double a, int l, double lambda, int steps = 20000) {
  const double h = 2 * a / steps;
  double v = 0.0;
  double p = 1.0;
  auto rhs = [&](double y, double vv, double pp, double& dv, double& dp) {
    const double w = weight(c, y);
    dv = pp / w;
    dp = (l * l / w - lambda * w) * vv;
  };
  for (int i = 0; i < steps; ++i) {
    const double y = -a + i * h;
    double k1v, k1p, k2v, k2p, k3v, k3p, k4v, k4p;
    rhs(y, v, p, k1v, k1p);
    rhs(y + h / 2, v + h / 2 * k1v, p + h / 2 * k1p, k2v, k2p);
    rhs(y + h / 2, v + h / 2 * k2v, p + h / 2 * k2p, k3v, k3p);
    rhs(y + h, v + h * k3v, p + h * k3p, k4v, k4p);
    v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
  }
  return v;
}

double shoot_root(Curvature c, double a, int l, double lo, double hi) {
  double flo = shoot(c, a, l, lo);
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = shoot(c, a, l, mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Band, ShootingOracleAgrees) {
  for (auto [c, a, l] : {std::tuple{Curvature::Hyperbolic, 1.0, 5}, std::tuple{Curvature::Spherical, 0.5, 12}}) {
    const auto mode = band_mode({c, a, l, 1024});
    const double root = shoot_root(c, a, l, 0.99 * mode.lambda, 1.01 * mode.lambda);
    EXPECT_NEAR(mode.lambda, root, 1e-6 * root);
  }
}

TEST(Band, FlatControlReproducesCylinder) {
  const double a = 0.5;
  for (int m : {1, 2}) {
    for (int l : {0, 3, 17}) {
      const auto mode = band_mode({Curvature::Flat, a, l, 512}, m);
      const auto ref = closedform::cylinder_mode(2 * a, 2 * kPi, m, l);
      EXPECT_NEAR(mode.lambda, ref.lambda, 1e-8 * ref.lambda);
      EXPECT_NEAR(mode.psi_norm_sq, ref.psi_norm_sq, 1e-6 * ref.psi_norm_sq);
    }
  }
}

TEST(Band, NormalizedProfile) {
  for (auto c : {Curvature::Spherical, Curvature::Hyperbolic, Curvature::Flat}) {
    const auto mode = band_mode({c, 0.7, 9, 512});
    EXPECT_NEAR(mode.interior_norm_sq(), 1.0, 1e-8);
    EXPECT_EQ(mode.v.front(), 0.0);
    EXPECT_EQ(mode.v.back(), 0.0);
    EXPECT_EQ(mode.record().provenance, Provenance::Band1d);
  }
}

TEST(Band, EigenvaluesIncreaseWithTransverseIndex) {
  double prev = 0.0;
  for (int j = 1; j <= 6; ++j) {
    const double lam = band_mode({Curvature::Hyperbolic, 1.0, 10, 512}, j).lambda;
    EXPECT_GT(lam, prev);
    prev = lam;
  }
}

TEST(Band, DomainMonotonicity) {
  for (int l : {0, 4}) {
    double prev = INFINITY;
    for (double a : {0.3, 0.6, 0.9, 1.2, 1.5}) {
      const double lam = band_mode({Curvature::Spherical, a, l, 1024}).lambda;
      EXPECT_LT(lam, prev);
      prev = lam;
    }
  }
}

TEST(Band, SecondOrderRichardsonRatio) {
  const BandSpec spec{Curvature::Hyperbolic, 1.0, 50, 256};
  const double l1 = solve_on_grid(spec, 256, 1).lambda;
  const double l2 = solve_on_grid(spec, 512, 1).lambda;
  const double l3 = solve_on_grid(spec, 1024, 1).lambda;
  EXPECT_NEAR((l1 - l2) / (l2 - l3), 4.0, 0.8);
}

TEST(Band, SphericalExponentialDecay) {
  std::vector<int> ls;
  for (int l = 10; l <= 60; ++l) ls.push_back(l);
  const auto coarse = trapping_scaling_audit(Curvature::Spherical, 0.5, ls, 1024);
  const auto fine = trapping_scaling_audit(Curvature::Spherical, 0.5, ls, 2048);
  EXPECT_LT(coarse.slope, 0.0);
  EXPECT_LE(coarse.correlation, -0.99);
  EXPECT_LT(std::abs(fine.slope / coarse.slope - 1.0), 0.03);
  for (std::size_t i = 1; i < coarse.rows.size(); ++i) EXPECT_LT(coarse.rows[i].psi_norm_sq, coarse.rows[i - 1].psi_norm_sq);
  EXPECT_LT(coarse.rows.back().audit, 1e-2 * coarse.rows.front().audit);
}

TEST(Band, HyperbolicAuditBounded) {
  std::vector<int> ls;
  for (int l = 20; l <= 200; l += 10) ls.push_back(l);
  const auto rep = trapping_scaling_audit(Curvature::Hyperbolic, 1.0, ls, 1024);
  EXPECT_LT(rep.top_decade_ratio, 5.0);
  EXPECT_GT(rep.lambda_decades, 1.5);
}

TEST(Band, FlatAuditVanishes) {
  const auto rep = trapping_scaling_audit(Curvature::Flat, 0.5, {10, 40, 160, 640}, 512);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    EXPECT_NEAR(rep.rows[i].psi_norm_sq, rep.rows[0].psi_norm_sq, 1e-6 * rep.rows[0].psi_norm_sq);
    EXPECT_LT(rep.rows[i].audit, rep.rows[i - 1].audit);
  }
}

TEST(Band, InvalidSpecsRejected) {
  EXPECT_THROW(band_mode({Curvature::Spherical, 1.6, 1, 512}), std::invalid_argument);
  EXPECT_THROW(band_mode({Curvature::Hyperbolic, -1.0, 1, 512}), std::invalid_argument);
  EXPECT_THROW(band_mode({Curvature::Hyperbolic, 1.0, 1, 128}), std::invalid_argument);
  EXPECT_THROW(band_mode({Curvature::Hyperbolic, 1.0, -2, 512}), std::invalid_argument);
}

TEST(Band, CoarseGridDetected) {
  EXPECT_THROW(band_mode({Curvature::Hyperbolic, 1.0, 200, 256}, 1, 1e-9), specfun::ConvergenceError);
}
