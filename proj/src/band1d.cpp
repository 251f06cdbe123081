#include "tracelab/band1d.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tracelab/specfun.hpp"

namespace tracelab::band1d {

namespace {

constexpr double kPi = std::numbers::pi;

// Fourth-order one-sided derivative (up to sign) at an end where the value
// vanishes; s1..s4 are the neighbours moving inward.
double end_slope(double s1, double s2, double s3, double s4, double h) {
  return (-48.0 * s1 + 36.0 * s2 - 16.0 * s3 + 3.0 * s4) / (12.0 * h);
}

}  // namespace

void BandSpec::validate() const {
  if (!(half_width > 0.0)) throw std::invalid_argument("band half width must be positive");
  if (curvature == Curvature::Spherical && !(half_width < kPi / 2))
    throw std::invalid_argument("spherical band needs half width below pi/2");
  if (l < 0) throw std::invalid_argument("angular index l must be non-negative");
  if (grid_size < 256) throw std::invalid_argument("band grid_size must be at least 256");
}

double weight(Curvature c, double y) {
  switch (c) {
    case Curvature::Flat: return 1.0;
    case Curvature::Spherical: return std::cos(y);
    case Curvature::Hyperbolic: return std::cosh(y);
  }
  return 1.0;
}

double weight_prime(Curvature c, double y) {
  switch (c) {
    case Curvature::Flat: return 0.0;
    case Curvature::Spherical: return -std::sin(y);
    case Curvature::Hyperbolic: return std::sinh(y);
  }
  return 0.0;
}

GridSolution solve_on_grid(const BandSpec& spec, int intervals, int transverse_index) {
  spec.validate();
  if (intervals < 8) throw std::invalid_argument("too few intervals");
  const int m = intervals - 1;
  if (transverse_index < 1 || transverse_index > m) throw std::invalid_argument("transverse index out of range");
  const double a = spec.half_width;
  const double h = 2.0 * a / intervals;
  const double l2 = static_cast<double>(spec.l) * spec.l;

  // Conservative form -(w v')' + l^2 v / w = lambda w v, symmetrized by W^{-1/2}.
  std::vector<double> w(intervals + 1);
  std::vector<double> y(intervals + 1);
  for (int i = 0; i <= intervals; ++i) {
    y[i] = -a + i * h;
    w[i] = weight(spec.curvature, y[i]);
  }
  y[intervals] = a;
  std::vector<double> d(m);
  std::vector<double> e(std::max(m - 1, 1));
  for (int j = 0; j < m; ++j) {
    const int i = j + 1;
    const double wl = weight(spec.curvature, y[i] - 0.5 * h);
    const double wr = weight(spec.curvature, y[i] + 0.5 * h);
    d[j] = ((wl + wr) / (h * h) + l2 / w[i]) / w[i];
    if (j + 1 < m) e[j] = -wr / (h * h) / std::sqrt(w[i] * w[i + 1]);
  }

  lapack_int found = 0;
  lapack_int nsplit = 0;
  std::vector<double> eig(m);
  std::vector<lapack_int> iblock(m);
  std::vector<lapack_int> isplit(m);
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  lapack_int info = LAPACKE_dstebz('I', 'E', m, 0.0, 0.0, transverse_index, transverse_index, abstol, d.data(),
                                   e.data(), &found, &nsplit, eig.data(), iblock.data(), isplit.data());
  if (info != 0 || found != 1) throw specfun::ConvergenceError("tridiagonal bisection failed");
  std::vector<double> z(m);
  lapack_int ifail = 0;
  info = LAPACKE_dstein(LAPACK_COL_MAJOR, m, d.data(), e.data(), 1, eig.data(), iblock.data(), isplit.data(),
                        z.data(), m, &ifail);
  if (info != 0) throw specfun::ConvergenceError("inverse iteration failed");

  GridSolution out;
  out.lambda = eig[0];
  out.y = std::move(y);
  out.v.assign(intervals + 1, 0.0);
  double mass = 0.0;
  std::size_t peak = 0;
  for (int j = 0; j < m; ++j) {
    const double vi = z[j] / std::sqrt(w[j + 1]);
    out.v[j + 1] = vi;
    mass += w[j + 1] * vi * vi * h;
    if (std::abs(vi) > std::abs(out.v[peak])) peak = j + 1;
  }
  const double scale = (out.v[peak] < 0 ? -1.0 : 1.0) / std::sqrt(2.0 * kPi * mass);
  for (double& vi : out.v) vi *= scale;

  const auto& v = out.v;
  const int n = intervals;
  const double right = end_slope(v[n - 1], v[n - 2], v[n - 3], v[n - 4], h);
  const double left = end_slope(v[1], v[2], v[3], v[4], h);
  out.psi_norm_sq = 2.0 * kPi * weight(spec.curvature, a) * (right * right + left * left);
  return out;
}

BandMode band_mode(const BandSpec& spec, int transverse_index, double max_refinement_gap) {
  spec.validate();
  const auto coarse = solve_on_grid(spec, spec.grid_size, transverse_index);
  auto fine = solve_on_grid(spec, 2 * spec.grid_size, transverse_index);
  const double gap = std::abs(fine.lambda - coarse.lambda) / std::abs(fine.lambda);
  if (gap > max_refinement_gap)
    throw specfun::ConvergenceError("band grid too coarse: refinement changes lambda by " + std::to_string(gap));

  BandMode mode;
  mode.spec = spec;
  mode.transverse_index = transverse_index;
  mode.lambda_coarse = coarse.lambda;
  mode.lambda_fine = fine.lambda;
  mode.lambda = (4.0 * fine.lambda - coarse.lambda) / 3.0;
  mode.psi_norm_sq = std::max(0.0, (4.0 * fine.psi_norm_sq - coarse.psi_norm_sq) / 3.0);
  mode.y = std::move(fine.y);
  mode.v = std::move(fine.v);
  return mode;
}

double BandMode::interior_norm_sq() const {
  double s = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double f0 = weight(spec.curvature, y[i - 1]) * v[i - 1] * v[i - 1];
    const double f1 = weight(spec.curvature, y[i]) * v[i] * v[i];
    s += 0.5 * (f0 + f1) * (y[i] - y[i - 1]);
  }
  return 2.0 * kPi * s;
}

EigenmodeRecord BandMode::record() const {
  auto rec = make_record(make_band(spec.curvature, spec.half_width), {spec.l, transverse_index}, lambda,
                         psi_norm_sq, Provenance::Band1d);
  rec.interior_norm_sq = interior_norm_sq();
  return rec;
}

ScalingReport trapping_scaling_audit(Curvature curvature, double half_width, const std::vector<int>& l_values,
                                     int grid_size) {
  if (l_values.size() < 2) throw std::invalid_argument("scaling audit needs at least two l values");
  ScalingReport rep;
  rep.curvature = curvature;
  rep.half_width = half_width;
  rep.grid_size = grid_size;
  for (int l : l_values) {
    const auto mode = band_mode(BandSpec{curvature, half_width, l, grid_size});
    ScalingRow row;
    row.l = l;
    row.lambda = mode.lambda;
    row.psi_norm_sq = mode.psi_norm_sq;
    row.audit = mode.lambda > 1.0 ? mode.psi_norm_sq * std::log(mode.lambda) / mode.lambda : 0.0;
    rep.rows.push_back(row);
  }

  double lmin = rep.rows.front().lambda;
  double lmax = lmin;
  for (const auto& r : rep.rows) {
    lmin = std::min(lmin, r.lambda);
    lmax = std::max(lmax, r.lambda);
  }
  rep.lambda_decades = std::log10(lmax / lmin);
  double amin = INFINITY;
  double amax = 0.0;
  for (const auto& r : rep.rows) {
    if (r.lambda < lmax / 10.0) continue;
    amin = std::min(amin, r.audit);
    amax = std::max(amax, r.audit);
  }
  rep.top_decade_ratio = amin > 0.0 ? amax / amin : INFINITY;

  // log psi^2 against l
  const double n = static_cast<double>(rep.rows.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (const auto& r : rep.rows) {
    const double x = r.l;
    const double yv = std::log(r.psi_norm_sq);
    sx += x;
    sy += yv;
    sxx += x * x;
    syy += yv * yv;
    sxy += x * yv;
  }
  const double cxx = sxx - sx * sx / n;
  const double cyy = syy - sy * sy / n;
  const double cxy = sxy - sx * sy / n;
  rep.slope = cxy / cxx;
  rep.correlation = cyy > 0.0 ? cxy / std::sqrt(cxx * cyy) : 0.0;
  return rep;
}

}  // namespace tracelab::band1d
