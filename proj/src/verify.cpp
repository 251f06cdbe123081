#include "tracelab/verify.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "tracelab/closedform.hpp"
#include "tracelab/quadrature.hpp"
#include "tracelab/specfun.hpp"

namespace tracelab::verify {

namespace {

constexpr double kPi = std::numbers::pi;

int radial_nodes_for(double zero) { return 2 * static_cast<int>(std::ceil(zero)) + 48; }

// Fourier coefficients c_q = (1/N) sum_i v_i e^{-2 pi i q i / N}, q = 0..N/2.
std::vector<std::complex<double>> half_spectrum(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  std::vector<double> in(values);
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n / 2 + 1));
  fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  std::unique_ptr<fftw_plan_s, decltype(&fftw_destroy_plan)> guard(plan, &fftw_destroy_plan);
  fftw_execute(plan);
  for (auto& c : out) c /= static_cast<double>(n);
  return out;
}

}  // namespace

double quad_trace_norm(const BoundaryTrace& trace) {
  trace.validate();
  double s = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) s += trace.weights[i] * trace.values[i] * trace.values[i];
  return s;
}

RellichResult rellich_check(const DomainSpec& domain, double lambda, const BoundaryTrace& trace) {
  if (!is_euclidean(domain)) {
    throw std::invalid_argument("Rellich check needs a Euclidean domain, got " + domain_kind(domain));
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("Rellich check needs a positive eigenvalue");
  trace.validate();
  const Point2 origin = domain_centroid(domain);
  const double scale = std::sqrt(domain_area(domain));
  RellichResult out;
  bool pos = false;
  bool neg = false;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const Point2 x{trace.nodes[i].x - origin.x, trace.nodes[i].y - origin.y};
    const double nx = trace.normals[i].x * x.x + trace.normals[i].y * x.y;
    pos |= nx > 1e-12 * scale;
    neg |= nx < -1e-12 * scale;
    out.boundary_integral += trace.weights[i] * nx * trace.values[i] * trace.values[i];
  }
  out.sign_change = pos && neg;
  out.residual = std::abs(2.0 * lambda - out.boundary_integral) / (2.0 * lambda);
  return out;
}

RellichResult rellich_check(const EigenmodeRecord& mode, const BoundaryTrace& trace) {
  return rellich_check(mode.domain, mode.lambda, trace);
}

double boundary_sobolev_norm(const BoundaryTrace& trace, int k) {
  if (k < 0) throw std::invalid_argument("Sobolev order must be non-negative");
  trace.validate();
  if (trace.arclength.empty()) throw std::invalid_argument("Sobolev norm needs an arc-length parameterized trace");
  const std::size_t n = trace.size();
  const double h = trace.weights.front();
  const double length = h * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(trace.weights[i] - h) > 1e-12 * h ||
        std::abs(trace.arclength[i] - trace.arclength[0] - h * static_cast<double>(i)) > 1e-9 * length) {
      throw std::invalid_argument("Sobolev norm needs a uniform sampling of a closed boundary");
    }
  }

  const auto coeffs = half_spectrum(trace.values);
  const int nn = static_cast<int>(n);
  double total = 0.0;
  for (int q = 0; q <= nn / 2; ++q) {
    // Modes q and N - q share a magnitude; count both except q = 0 and Nyquist.
    const bool paired = q != 0 && !(nn % 2 == 0 && q == nn / 2);
    const double power = std::norm(coeffs[static_cast<std::size_t>(q)]) * (paired ? 2.0 : 1.0);
    const double omega2 = std::pow(2.0 * kPi * q / length, 2);
    double weight = 0.0;
    double term = 1.0;
    for (int j = 0; j <= k; ++j) {
      weight += term;
      term *= omega2;
    }
    total += power * weight;
  }
  return total * length;
}

OzawaResult ozawa_sum(const DomainSpec& domain, double lambda_max, Point2 y) {
  if (!(lambda_max > 0.0)) throw std::invalid_argument("Ozawa sum needs a positive spectral cutoff");
  OzawaResult out;
  out.leading_term = lambda_max * lambda_max / (8.0 * kPi);
  out.weyl_count = domain_area(domain) * lambda_max / (4.0 * kPi);

  if (const auto* r = std::get_if<Rectangle>(&domain)) {
    const double tol = 1e-12 * r->b;
    Point2 normal;
    const bool on_left = std::abs(y.x) < tol;
    const bool on_right = std::abs(y.x - r->a) < tol;
    const bool on_bottom = std::abs(y.y) < tol;
    const bool on_top = std::abs(y.y - r->b) < tol;
    if (on_left + on_right + on_bottom + on_top != 1) {
      throw std::invalid_argument("Ozawa point must lie on exactly one side of the rectangle");
    }
    normal = on_left ? Point2{-1, 0} : on_right ? Point2{1, 0} : on_bottom ? Point2{0, -1} : Point2{0, 1};
    const int m_max = static_cast<int>(std::sqrt(lambda_max) * r->a / kPi) + 1;
    for (int m = 1; m <= m_max; ++m) {
      for (int n = 1;; ++n) {
        const closedform::RectangleEigenfunction u{r->a, r->b, m, n};
        if (u.lambda() >= lambda_max) break;
        const Point2 g = u.gradient(y);
        const double psi = g.x * normal.x + g.y * normal.y;
        out.empirical += psi * psi;
        ++out.mode_count;
      }
    }
  } else if (const auto* d = std::get_if<Disc>(&domain)) {
    const double a = d->radius;
    const double rho = std::hypot(y.x, y.y);
    if (std::abs(rho - a) > 1e-10 * a) throw std::invalid_argument("Ozawa point must lie on the disc boundary");
    const double theta = std::atan2(y.y, y.x);
    const double limit = a * std::sqrt(lambda_max);
    for (int n = 0;; ++n) {
      const auto table = specfun::BesselZeroTable::below(n, limit, specfun::ZeroKind::J);
      if (table.zeros.empty()) break;
      for (std::size_t k = 0; k < table.zeros.size(); ++k) {
        const int kk = static_cast<int>(k) + 1;
        const auto cos_mode = closedform::DiscEigenfunction::dirichlet(a, n, kk, closedform::Parity::Cos);
        const double pc = cos_mode.d_rho(a, theta);
        out.empirical += pc * pc;
        ++out.mode_count;
        if (n > 0) {
          auto sin_mode = cos_mode;
          sin_mode.parity = closedform::Parity::Sin;
          const double ps = sin_mode.d_rho(a, theta);
          out.empirical += ps * ps;
          ++out.mode_count;
        }
      }
    }
  } else {
    throw std::invalid_argument("Ozawa sum supports disc and rectangle domains only, got " + domain_kind(domain));
  }
  out.enumeration_complete = std::abs(out.mode_count / out.weyl_count - 1.0) <= 0.10;
  return out;
}

RatioSummary ratio_summary(const std::vector<EigenmodeRecord>& records, double lambda_min, double lambda_max) {
  if (!(lambda_min <= lambda_max)) throw std::invalid_argument("ratio window is inverted");
  RatioSummary s;
  s.lambda_min = lambda_min;
  s.lambda_max = lambda_max;
  s.min_ratio = std::numeric_limits<double>::infinity();
  s.max_ratio = -std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    if (r.lambda < lambda_min || r.lambda > lambda_max) continue;
    if (s.count == 0) s.domain = r.domain;
    s.min_ratio = std::min(s.min_ratio, r.ratio);
    s.max_ratio = std::max(s.max_ratio, r.ratio);
    ++s.count;
  }
  if (s.count == 0) throw std::invalid_argument("no eigenmodes in the ratio window");
  return s;
}

double interior_norm_sq(const EigenmodeRecord& record) {
  const auto& idx = record.indices;
  if (const auto* d = std::get_if<Disc>(&record.domain)) {
    const auto u = closedform::DiscEigenfunction::dirichlet(d->radius, idx.at(0), idx.at(1));
    const auto rule = gauss_legendre(radial_nodes_for(u.zero), 0.0, d->radius);
    double radial = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double v = u.value(rule.nodes[i], 0.0);
      radial += rule.weights[i] * v * v * rule.nodes[i];
    }
    return radial * (u.n == 0 ? 2.0 * kPi : kPi);
  }
  if (const auto* r = std::get_if<Rectangle>(&record.domain)) {
    const closedform::RectangleEigenfunction u{r->a, r->b, idx.at(0), idx.at(1)};
    const auto gx = gauss_legendre(u.m + 16, 0.0, r->a);
    const auto gy = gauss_legendre(u.n + 16, 0.0, r->b);
    double s = 0.0;
    for (std::size_t i = 0; i < gx.nodes.size(); ++i)
      for (std::size_t j = 0; j < gy.nodes.size(); ++j) {
        const double v = u.value({gx.nodes[i], gy.nodes[j]});
        s += gx.weights[i] * gy.weights[j] * v * v;
      }
    return s;
  }
  if (const auto* c = std::get_if<FlatCylinder>(&record.domain)) {
    const int m = idx.at(0);
    const auto gx = gauss_legendre(m + 16, 0.0, c->length);
    double s = 0.0;
    for (std::size_t i = 0; i < gx.nodes.size(); ++i) {
      const double v = std::sin(m * kPi * gx.nodes[i] / c->length);
      s += gx.weights[i] * v * v;
    }
    // |e^{2 pi i n theta / b}|^2 = 1 integrates to b.
    return 2.0 / (c->length * c->circumference) * s * c->circumference;
  }
  if (std::holds_alternative<Hemisphere>(record.domain)) {
    const auto u = closedform::HemisphereEigenfunction::make(idx.at(0));
    const auto rule = gauss_legendre(u.l + 8, 0.0, 1.0);  // t = cos(theta)
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double theta = std::acos(rule.nodes[i]);
      const double v = u.modulus(theta);
      s += rule.weights[i] * v * v;
    }
    return 2.0 * kPi * s;
  }
  if (std::holds_alternative<NeumannDisc>(record.domain)) {
    const int n = idx.at(0);
    const int root = n == 0 ? idx.at(1) - 1 : idx.at(1);
    const auto u = closedform::DiscEigenfunction::neumann_mode(1.0, n, root);
    const auto rule = gauss_legendre(radial_nodes_for(u.zero), 0.0, 1.0);
    double radial = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double v = u.value(rule.nodes[i], 0.0);
      radial += rule.weights[i] * v * v * rule.nodes[i];
    }
    return radial * (n == 0 ? 2.0 * kPi : kPi);
  }
  throw std::invalid_argument("interior norm needs a closed-form domain, got " + domain_kind(record.domain));
}

NeumannIdentity neumann_identity(int n, int k, int radial_nodes, int boundary_nodes) {
  if (n < 0 || k < 1 || (n == 0 && k == 1)) throw std::invalid_argument("invalid Neumann disc mode index");
  const int root = n == 0 ? k - 1 : k;
  const double j = specfun::bessel_zero(n, root, specfun::ZeroKind::JPrime);
  if (radial_nodes <= 0) radial_nodes = radial_nodes_for(j);
  if (boundary_nodes <= 0) boundary_nodes = 4 * n + 16;

  const auto rule = gauss_legendre(radial_nodes, 0.0, 1.0);
  double radial = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double v = specfun::bessel_j(n, j * rule.nodes[i]);
    radial += rule.weights[i] * v * v * rule.nodes[i];
  }
  // u = J_n(j rho) cos(n theta) / sqrt(R * A) with A = int cos^2(n theta);
  // the trapezoid rule integrates the boundary cos^2 exactly, so A cancels.
  double angular = 0.0;
  const double w = 2.0 * kPi / boundary_nodes;
  for (int i = 0; i < boundary_nodes; ++i) {
    const double c = std::cos(n * w * i);
    angular += w * c * c;
  }
  const double edge = specfun::bessel_j(n, j);

  NeumannIdentity out;
  out.lambda = j * j;
  out.boundary_norm_sq = edge * edge * angular / (radial * angular);
  const double nn = static_cast<double>(n) * n;
  out.residual = std::abs((out.lambda - nn) * out.boundary_norm_sq - 2.0 * out.lambda) / (2.0 * out.lambda);
  return out;
}

double scaled_sobolev_norm(const EigenmodeRecord& record, int k) {
  if (!std::holds_alternative<Disc>(record.domain)) throw std::invalid_argument("Sobolev trend is defined for disc records");
  const auto u = closedform::disc_eigenfunction(record);
  const auto trace = closedform::disc_trace(u, 4 * u.n + 64);
  return boundary_sobolev_norm(trace, k) / std::pow(record.lambda, k + 1);
}

SobolevTrend sobolev_trend(const std::vector<EigenmodeRecord>& records, int k, int bins) {
  if (records.empty()) throw std::invalid_argument("Sobolev trend needs records");
  if (bins < 1) throw std::invalid_argument("Sobolev trend needs at least one bin");
  SobolevTrend t;
  t.order = k;
  for (const auto& r : records) t.lambda_max = std::max(t.lambda_max, r.lambda);
  const double lo = t.lambda_max / 10.0;
  std::vector<double> bmax(bins, -1.0);
  for (const auto& r : records) {
    const double v = scaled_sobolev_norm(r, k);
    t.overall_max = std::max(t.overall_max, v);
    if (r.lambda < lo) continue;
    ++t.modes;
    const int b = std::min(bins - 1, static_cast<int>(bins * std::log10(r.lambda / lo)));
    bmax[b] = std::max(bmax[b], v);
  }
  for (double v : bmax)
    if (v >= 0.0) t.bin_maxima.push_back(v);
  std::vector<double> sorted = t.bin_maxima;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  const double median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  t.growth = sorted.back() / median;
  return t;
}

}  // namespace tracelab::verify
