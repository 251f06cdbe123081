#include "tracelab/profile.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "tracelab/closedform.hpp"
#include "tracelab/quadrature.hpp"

namespace tracelab::profile {

namespace {

constexpr double kPi = std::numbers::pi;

// Integrals over Y_r at a single radius.
struct Slice {
  double v2 = 0.0;   // int v^2
  double vr2 = 0.0;  // int v_r^2
  double tan = 0.0;  // int h^{yy} v_y^2
  double vvr = 0.0;  // int v v_r
  double k = 1.0;
  double f = 0.0;
};

void check_grid(const std::vector<double>& r, double limit) {
  if (r.empty()) throw std::invalid_argument("empty collar grid");
  if (r.front() != 0.0) throw std::invalid_argument("collar grid must start at r = 0");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) throw std::invalid_argument("collar grid must be strictly increasing");
  if (!(r.back() < limit)) throw std::invalid_argument("collar width exceeds the smooth range of the distance function");
}

RadialProfile assemble(const std::vector<double>& r_grid, double lambda, const std::vector<Slice>& slices) {
  RadialProfile p;
  p.lambda = lambda;
  p.r_grid = r_grid;
  p.delta = r_grid.back();
  for (const auto& s : slices) {
    p.E_values.push_back(0.5 * (s.vr2 + (lambda + s.f) * s.v2 - s.tan));
    p.L_values.push_back(s.v2);
    p.dL_values.push_back(2.0 * s.vvr);
    p.k_factor.push_back(s.k);
    p.f_potential.push_back(s.f);
  }
  return p;
}

// Disc of radius a: rho = a - r, sigma = rho / a, k = sigma^{1/2}, f = 1/(4 rho^2).
Slice disc_slice(const closedform::DiscEigenfunction& u, double r) {
  const double a = u.radius;
  const double rho = a - r;
  const double sigma = rho / a;
  Slice s;
  s.k = std::sqrt(sigma);
  s.f = 0.25 / (rho * rho);
  const double kr = -0.5 / (a * s.k);
  const int nodes = 4 * u.n + 16;
  const double dy = a * 2.0 * kPi / nodes;
  for (int i = 0; i < nodes; ++i) {
    const double th = 2.0 * kPi * i / nodes;
    const double val = u.value(rho, th);
    const double ur = -u.d_rho(rho, th);
    const double ut = u.d_theta(rho, th);
    const double v = s.k * val;
    const double vr = kr * val + s.k * ur;
    s.v2 += v * v * dy;
    s.vr2 += vr * vr * dy;
    s.vvr += v * vr * dy;
    s.tan += ut * ut / (sigma * a * a) * dy;
  }
  return s;
}

// Side x = 0 of the rectangle, tangential range [delta, b - delta].
Slice rectangle_slice(const closedform::RectangleEigenfunction& u, const QuadratureRule& rule, double r) {
  Slice s;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const Point2 p{r, rule.nodes[i]};
    const double v = u.value(p);
    const Point2 g = u.gradient(p);
    s.v2 += rule.weights[i] * v * v;
    s.vr2 += rule.weights[i] * g.x * g.x;
    s.vvr += rule.weights[i] * v * g.x;
    s.tan += rule.weights[i] * g.y * g.y;
  }
  return s;
}

// Equator of the upper hemisphere: r = pi/2 - theta, sigma = cos r, y = phi.
Slice hemisphere_slice(const closedform::HemisphereEigenfunction& u, double r) {
  const double theta = 0.5 * kPi - r;
  const double sigma = std::cos(r);
  const int m = u.l - 1;
  Slice s;
  s.k = std::sqrt(sigma);
  const double t = std::tan(r);
  s.f = 0.25 * t * t + 0.5;
  const double kr = -0.5 * std::sin(r) / s.k;
  const double val = u.modulus(theta);
  const double ur = -u.d_theta(theta);
  const double v = s.k * val;
  const double vr = kr * val + s.k * ur;
  const double len = 2.0 * kPi;
  s.v2 = len * v * v;
  s.vr2 = len * vr * vr;
  s.vvr = len * v * vr;
  s.tan = len * m * m * val * val / sigma;
  return s;
}

}  // namespace

std::vector<double> collar_grid(double delta, int points) {
  if (!(delta > 0.0) || points < 2) throw std::invalid_argument("collar grid needs delta > 0 and >= 2 points");
  std::vector<double> r(points);
  for (int i = 0; i < points; ++i) r[i] = delta * i / (points - 1);
  r.back() = delta;
  return r;
}

double max_collar_width(const DomainSpec& domain) {
  if (const auto* d = std::get_if<Disc>(&domain)) return d->radius;
  if (std::holds_alternative<NeumannDisc>(domain)) return 1.0;
  if (const auto* r = std::get_if<Rectangle>(&domain)) return 0.5 * r->a;
  if (std::holds_alternative<Hemisphere>(domain)) return 0.5 * kPi;
  if (const auto* b = std::get_if<CurvedBand>(&domain)) return b->half_width;
  throw std::invalid_argument("no collar model for domain " + domain_kind(domain));
}

RadialProfile collar_profile(const EigenmodeRecord& mode, const std::vector<double>& r_grid) {
  if (const auto* b = std::get_if<CurvedBand>(&mode.domain)) {
    const band1d::BandSpec spec{b->curvature, b->half_width, mode.indices.at(0)};
    return collar_profile(band1d::band_mode(spec, mode.indices.at(1)), r_grid);
  }
  check_grid(r_grid, max_collar_width(mode.domain));
  std::vector<Slice> slices;
  slices.reserve(r_grid.size());
  double psi = 0.0;
  bool heuristic = false;

  if (std::holds_alternative<Disc>(mode.domain) || std::holds_alternative<NeumannDisc>(mode.domain)) {
    const auto u = closedform::disc_eigenfunction(mode);
    for (double r : r_grid) slices.push_back(disc_slice(u, r));
    psi = mode.psi_norm_sq;
  } else if (const auto* rect = std::get_if<Rectangle>(&mode.domain)) {
    const closedform::RectangleEigenfunction u{rect->a, rect->b, mode.indices.at(0), mode.indices.at(1)};
    const double delta = r_grid.back();
    const int nodes = 2 * (u.m + u.n) + 64;
    const auto rule = gauss_legendre(nodes, delta, rect->b - delta);
    for (double r : r_grid) slices.push_back(rectangle_slice(u, rule, r));
    psi = slices.front().vr2;
    heuristic = true;
  } else if (std::holds_alternative<Hemisphere>(mode.domain)) {
    const auto u = closedform::HemisphereEigenfunction::make(mode.indices.at(0));
    for (double r : r_grid) slices.push_back(hemisphere_slice(u, r));
    psi = mode.psi_norm_sq;
  } else {
    throw std::invalid_argument("no collar model for domain " + domain_kind(mode.domain));
  }

  auto p = assemble(r_grid, mode.lambda, slices);
  p.domain = mode.domain;
  p.indices = mode.indices;
  p.psi_norm_sq = psi;
  p.heuristic = heuristic;
  return p;
}

RadialProfile collar_profile(const band1d::BandMode& mode, const std::vector<double>& r_grid) {
  const auto& spec = mode.spec;
  const double a = spec.half_width;
  check_grid(r_grid, a);
  const auto c = spec.curvature;
  const double wa = band1d::weight(c, a);
  const double h = mode.y[1] - mode.y[0];
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline(mode.v.begin(), mode.v.end(), mode.y.front(), h);

  std::vector<Slice> slices;
  for (double r : r_grid) {
    const double s0 = a - r;
    const double w = band1d::weight(c, s0);
    const double wp = band1d::weight_prime(c, s0);
    // sigma(r) = w(a - r) / w(a); w''/w is -1, 1, 0 for the three curvatures.
    const double sigma = w / wa;
    const double wpp_over_w = c == Curvature::Spherical ? -1.0 : (c == Curvature::Hyperbolic ? 1.0 : 0.0);
    Slice s;
    s.k = std::sqrt(sigma);
    s.f = 0.25 * (wp / w) * (wp / w) - 0.5 * wpp_over_w;
    const double kr = -0.5 * (wp / wa) / s.k;
    const double len = 2.0 * kPi * wa;  // each boundary circle in arc length
    for (int side : {1, -1}) {
      const double yy = side * s0;
      const double val = spline(yy);
      const double ur = -side * spline.prime(yy);  // d/dr = -d/dy on the top circle
      const double v = s.k * val;
      const double vr = kr * val + s.k * ur;
      s.v2 += len * v * v;
      s.vr2 += len * vr * vr;
      s.vvr += len * v * vr;
      s.tan += len * static_cast<double>(spec.l) * spec.l * val * val / (sigma * wa * wa);
    }
    slices.push_back(s);
  }
  auto p = assemble(r_grid, mode.lambda, slices);
  p.domain = make_band(c, a);
  p.indices = {spec.l, mode.transverse_index};
  p.psi_norm_sq = mode.psi_norm_sq;
  return p;
}

namespace {

void check_family(const std::vector<RadialProfile>& profiles) {
  if (profiles.empty()) throw std::invalid_argument("audit needs at least one profile");
  for (const auto& p : profiles) {
    if (!(p.domain == profiles.front().domain) || p.delta != profiles.front().delta)
      throw std::invalid_argument("audited profiles must share a domain and collar");
  }
}

}  // namespace

double energy_bound_audit(const std::vector<RadialProfile>& profiles) {
  check_family(profiles);
  double c = 0.0;
  for (const auto& p : profiles)
    for (double e : p.E_values) c = std::max(c, std::abs(e) / p.lambda);
  return c;
}

double l_bound_audit(const std::vector<RadialProfile>& profiles) {
  check_family(profiles);
  double c = 0.0;
  for (const auto& p : profiles) {
    for (std::size_t i = 0; i < p.r_grid.size(); ++i) {
      const double r = p.r_grid[i];
      if (r <= 0.0 || r > p.delta / 3.0) continue;
      c = std::max(c, p.L_values[i] / (p.lambda * r * r));
    }
  }
  return c;
}

std::vector<double> diff_ineq_series(const RadialProfile& p) {
  const std::size_t n = p.r_grid.size();
  std::vector<double> q(n, std::numeric_limits<double>::quiet_NaN());
  const double lmax = *std::max_element(p.L_values.begin(), p.L_values.end());
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double L = p.L_values[i];
    if (!(L >= 1e-12 * lmax) || L <= 0.0) continue;
    const double hl = p.r_grid[i] - p.r_grid[i - 1];
    const double hr = p.r_grid[i + 1] - p.r_grid[i];
    const double d2 = (hl * hl * p.dL_values[i + 1] - hr * hr * p.dL_values[i - 1] -
                       (hl * hl - hr * hr) * p.dL_values[i]) /
                      (hl * hr * (hl + hr));
    const double d1 = p.dL_values[i];
    q[i] = (d1 * d1 / L - d2) / p.lambda;
  }
  return q;
}

double diff_ineq_audit(const RadialProfile& profile) {
  if (profile.r_grid.size() < 64) throw std::invalid_argument("diff_ineq_audit needs at least 64 grid points");
  double c = -std::numeric_limits<double>::infinity();
  for (double q : diff_ineq_series(profile))
    if (!std::isnan(q)) c = std::max(c, q);
  return c;
}

UniformityReport audit_uniformity(const std::vector<RadialProfile>& profiles) {
  check_family(profiles);
  double lo = INFINITY;
  double hi = 0.0;
  for (const auto& p : profiles) {
    lo = std::min(lo, p.lambda);
    hi = std::max(hi, p.lambda);
  }
  UniformityReport r;
  r.lambda_decades = std::log10(hi / lo);
  if (!(r.lambda_decades >= 1.0)) throw std::invalid_argument("uniformity audit needs lambda spanning a decade");
  std::vector<RadialProfile> top;
  std::vector<RadialProfile> bottom;
  for (const auto& p : profiles) {
    if (p.lambda >= hi / 10.0) top.push_back(p);
    if (p.lambda <= lo * 10.0) bottom.push_back(p);
  }
  r.top_count = static_cast<int>(top.size());
  r.bottom_count = static_cast<int>(bottom.size());
  r.energy = energy_bound_audit(top) / energy_bound_audit(bottom);
  r.l_bound = l_bound_audit(top) / l_bound_audit(bottom);
  double dt = 0.0;
  double db = 0.0;
  for (const auto& p : top) dt = std::max(dt, diff_ineq_audit(p));
  for (const auto& p : bottom) db = std::max(db, diff_ineq_audit(p));
  r.diff_ineq = dt / db;
  return r;
}

double collar_mass(const RadialProfile& p) {
  double s = 0.0;
  for (std::size_t i = 1; i < p.r_grid.size(); ++i)
    s += 0.5 * (p.L_values[i] + p.L_values[i - 1]) * (p.r_grid[i] - p.r_grid[i - 1]);
  return s;
}

void write_profile_csv(std::ostream& out, const RadialProfile& p) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "r,E,L\n";
  for (std::size_t i = 0; i < p.r_grid.size(); ++i) out << p.r_grid[i] << ',' << p.E_values[i] << ',' << p.L_values[i] << '\n';
  out.precision(old);
}

}  // namespace tracelab::profile
