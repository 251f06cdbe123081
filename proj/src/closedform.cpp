#include "tracelab/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tracelab/specfun.hpp"

namespace tracelab::closedform {

namespace {

constexpr double kPi = std::numbers::pi;

using specfun::ZeroKind;

void require_nodes(int nodes) {
  if (nodes < 4) throw std::invalid_argument("trace needs at least 4 nodes");
}

// Positive J_n' root used by a Neumann (n, k) pair where (0, 1) is the constant mode.
int neumann_root_index(int n, int k) {
  if (n < 0 || k < 1) throw std::invalid_argument("neumann mode requires n >= 0, k >= 1");
  if (n == 0) {
    if (k == 1) throw std::invalid_argument("neumann (n, k) = (0, 1) is the constant mode with lambda = 0");
    return k - 1;
  }
  return k;
}

}  // namespace

// --- DiscEigenfunction -----------------------------------------------------

DiscEigenfunction DiscEigenfunction::dirichlet(double radius, int n, int k, Parity parity) {
  if (!(radius > 0.0)) throw std::invalid_argument("disc radius must be positive");
  if (n < 0 || k < 1) throw std::invalid_argument("disc mode requires n >= 0, k >= 1");
  DiscEigenfunction u;
  u.radius = radius;
  u.n = n;
  u.k = k;
  u.parity = parity;
  u.zero = specfun::bessel_zero(n, k, ZeroKind::J);
  // int_0^a J_n(j rho/a)^2 rho drho = a^2/2 J_n'(j)^2
  const double jp = specfun::bessel_j_prime(n, u.zero);
  const double angular_mass = n == 0 ? 2.0 * kPi : kPi;
  u.amplitude = 1.0 / std::sqrt(angular_mass * 0.5 * radius * radius * jp * jp);
  return u;
}

DiscEigenfunction DiscEigenfunction::neumann_mode(double radius, int n, int k, Parity parity) {
  if (!(radius > 0.0)) throw std::invalid_argument("disc radius must be positive");
  if (n < 0 || k < 1) throw std::invalid_argument("disc mode requires n >= 0, k >= 1");
  DiscEigenfunction u;
  u.radius = radius;
  u.n = n;
  u.k = k;
  u.parity = parity;
  u.neumann = true;
  u.zero = specfun::bessel_zero(n, k, ZeroKind::JPrime);
  // int_0^a J_n(j rho/a)^2 rho drho = a^2/2 (1 - n^2/j^2) J_n(j)^2 at a root of J_n'
  const double jn = specfun::bessel_j(n, u.zero);
  const double angular_mass = n == 0 ? 2.0 * kPi : kPi;
  const double radial = 0.5 * radius * radius * (1.0 - static_cast<double>(n) * n / (u.zero * u.zero)) * jn * jn;
  u.amplitude = 1.0 / std::sqrt(angular_mass * radial);
  return u;
}

double DiscEigenfunction::angular(double theta) const {
  if (n == 0) return 1.0;
  return parity == Parity::Cos ? std::cos(n * theta) : std::sin(n * theta);
}

double DiscEigenfunction::angular_derivative(double theta) const {
  if (n == 0) return 0.0;
  return parity == Parity::Cos ? -n * std::sin(n * theta) : n * std::cos(n * theta);
}

double DiscEigenfunction::value(double rho, double theta) const {
  return amplitude * specfun::bessel_j(n, zero * rho / radius) * angular(theta);
}

double DiscEigenfunction::d_rho(double rho, double theta) const {
  return amplitude * (zero / radius) * specfun::bessel_j_prime(n, zero * rho / radius) * angular(theta);
}

double DiscEigenfunction::d_theta(double rho, double theta) const {
  return amplitude * specfun::bessel_j(n, zero * rho / radius) * angular_derivative(theta);
}

// --- RectangleEigenfunction ------------------------------------------------

double RectangleEigenfunction::lambda() const {
  const double kx = m * kPi / a;
  const double ky = n * kPi / b;
  return kx * kx + ky * ky;
}

double RectangleEigenfunction::value(Point2 p) const {
  return std::sqrt(4.0 / (a * b)) * std::sin(m * kPi * p.x / a) * std::sin(n * kPi * p.y / b);
}

Point2 RectangleEigenfunction::gradient(Point2 p) const {
  const double c = std::sqrt(4.0 / (a * b));
  const double kx = m * kPi / a;
  const double ky = n * kPi / b;
  return {c * kx * std::cos(kx * p.x) * std::sin(ky * p.y), c * ky * std::sin(kx * p.x) * std::cos(ky * p.y)};
}

// --- HemisphereEigenfunction -----------------------------------------------

HemisphereEigenfunction HemisphereEigenfunction::make(int l) {
  return {l, std::sqrt(specfun::hemisphere_c_sq(l).c_sq)};
}

double HemisphereEigenfunction::modulus(double theta) const {
  return c * std::pow(std::sin(theta), l - 1) * std::cos(theta);
}

double HemisphereEigenfunction::d_theta(double theta) const {
  const double s = std::sin(theta);
  const double co = std::cos(theta);
  const double lower = l >= 2 ? (l - 1) * std::pow(s, l - 2) * co * co : 0.0;
  return c * (lower - std::pow(s, l));
}

// --- records ---------------------------------------------------------------

EigenmodeRecord disc_mode(double a, int n, int k) {
  const Disc disc = make_disc(a);
  if (n < 0 || k < 1) throw std::invalid_argument("disc mode requires n >= 0, k >= 1");
  const double j = specfun::bessel_zero(n, k, ZeroKind::J);
  const double lambda = (j / a) * (j / a);
  return make_record(disc, {n, k}, lambda, 2.0 * lambda / a, Provenance::ClosedForm);
}

EigenmodeRecord rectangle_mode(double a, double b, int m, int n) {
  if (m < 1 || n < 1) throw std::invalid_argument("rectangle mode requires m, n >= 1");
  if (a > b) {
    std::swap(a, b);
    std::swap(m, n);
  }
  const Rectangle rect = make_rectangle(a, b);
  const double kx = m * kPi / a;
  const double ky = n * kPi / b;
  const double lambda = kx * kx + ky * ky;
  const double psi = 4.0 / (a * b) * (ky * ky * a + kx * kx * b);
  return make_record(rect, {m, n}, lambda, psi, Provenance::ClosedForm);
}

EigenmodeRecord cylinder_mode(double a, double b, int m, int n) {
  const FlatCylinder cyl = make_flat_cylinder(a, b);
  if (m < 1) throw std::invalid_argument("cylinder mode requires m >= 1");
  const double kx = m * kPi / a;
  const double kt = 2.0 * kPi * n / b;
  return make_record(cyl, {m, n}, kx * kx + kt * kt, 4.0 / a * kx * kx, Provenance::ClosedForm);
}

EigenmodeRecord hemisphere_mode(int l) {
  const auto norm = specfun::hemisphere_c_sq(l);
  return make_record(Hemisphere{}, {l}, norm.lambda, 2.0 * kPi * norm.c_sq, Provenance::ClosedForm);
}

EigenmodeRecord neumann_disc_mode(int n, int k) {
  const int root = neumann_root_index(n, k);
  const double j = specfun::bessel_zero(n, root, ZeroKind::JPrime);
  const double lambda = j * j;
  const double nn = static_cast<double>(n) * n;
  // j'_{k,n} > n strictly, so the denominator is positive.
  return make_record(NeumannDisc{}, {n, k}, lambda, 2.0 * lambda / (lambda - nn), Provenance::Neumann);
}

namespace {

void require_range(IndexRange r, const char* name) {
  if (r.empty()) throw std::invalid_argument(std::string("empty index range for ") + name);
}

}  // namespace

void sort_records(std::vector<EigenmodeRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const EigenmodeRecord& x, const EigenmodeRecord& y) {
    if (x.lambda != y.lambda) return x.lambda < y.lambda;
    return x.indices < y.indices;
  });
}

std::vector<EigenmodeRecord> disc_modes(double a, IndexRange n, IndexRange k) {
  require_range(n, "n");
  require_range(k, "k");
  if (n.first < 0 || k.first < 1) throw std::invalid_argument("disc modes need n >= 0, k >= 1");
  std::vector<EigenmodeRecord> out;
  for (int nn = n.first; nn <= n.last; ++nn) {
    const auto table = specfun::BesselZeroTable::compute(nn, k.last, ZeroKind::J);
    for (int kk = k.first; kk <= k.last; ++kk) {
      const double j = table.zeros[static_cast<std::size_t>(kk - 1)];
      const double lambda = (j / a) * (j / a);
      out.push_back(make_record(make_disc(a), {nn, kk}, lambda, 2.0 * lambda / a, Provenance::ClosedForm));
    }
  }
  sort_records(out);
  return out;
}

std::vector<EigenmodeRecord> rectangle_modes(double a, double b, IndexRange m, IndexRange n) {
  require_range(m, "m");
  require_range(n, "n");
  std::vector<EigenmodeRecord> out;
  for (int mm = m.first; mm <= m.last; ++mm)
    for (int nn = n.first; nn <= n.last; ++nn) out.push_back(rectangle_mode(a, b, mm, nn));
  sort_records(out);
  return out;
}

std::vector<EigenmodeRecord> cylinder_modes(double a, double b, IndexRange m, IndexRange n) {
  require_range(m, "m");
  require_range(n, "n");
  std::vector<EigenmodeRecord> out;
  for (int mm = m.first; mm <= m.last; ++mm)
    for (int nn = n.first; nn <= n.last; ++nn) out.push_back(cylinder_mode(a, b, mm, nn));
  sort_records(out);
  return out;
}

std::vector<EigenmodeRecord> hemisphere_modes(IndexRange l) {
  require_range(l, "l");
  std::vector<EigenmodeRecord> out;
  for (int ll = l.first; ll <= l.last; ++ll) {
    if (ll % 2 == 1) out.push_back(hemisphere_mode(ll));
  }
  if (out.empty()) throw std::invalid_argument("hemisphere range contains no odd degree");
  sort_records(out);
  return out;
}

std::vector<EigenmodeRecord> neumann_disc_modes(IndexRange n, IndexRange k) {
  require_range(n, "n");
  require_range(k, "k");
  std::vector<EigenmodeRecord> out;
  for (int nn = n.first; nn <= n.last; ++nn)
    for (int kk = k.first; kk <= k.last; ++kk) {
      if (nn == 0 && kk == 1) continue;
      out.push_back(neumann_disc_mode(nn, kk));
    }
  sort_records(out);
  return out;
}

EigenmodeRecord mode_for(const DomainSpec& domain, const std::vector<int>& idx) {
  auto need = [&](std::size_t count) {
    if (idx.size() != count) {
      throw std::invalid_argument(domain_kind(domain) + " modes take " + std::to_string(count) + " indices");
    }
  };
  if (const auto* d = std::get_if<Disc>(&domain)) {
    need(2);
    return disc_mode(d->radius, idx[0], idx[1]);
  }
  if (const auto* r = std::get_if<Rectangle>(&domain)) {
    need(2);
    return rectangle_mode(r->a, r->b, idx[0], idx[1]);
  }
  if (const auto* c = std::get_if<FlatCylinder>(&domain)) {
    need(2);
    return cylinder_mode(c->length, c->circumference, idx[0], idx[1]);
  }
  if (std::holds_alternative<Hemisphere>(domain)) {
    need(1);
    return hemisphere_mode(idx[0]);
  }
  if (std::holds_alternative<NeumannDisc>(domain)) {
    need(2);
    return neumann_disc_mode(idx[0], idx[1]);
  }
  throw std::invalid_argument("no closed form for domain " + domain_kind(domain));
}

// --- traces ----------------------------------------------------------------

BoundaryTrace disc_trace(const DiscEigenfunction& u, int nodes) {
  require_nodes(nodes);
  BoundaryTrace t;
  const double a = u.radius;
  const double w = 2.0 * kPi * a / nodes;
  for (int i = 0; i < nodes; ++i) {
    const double theta = 2.0 * kPi * i / nodes;
    const Point2 nu{std::cos(theta), std::sin(theta)};
    t.nodes.push_back({a * nu.x, a * nu.y});
    t.normals.push_back(nu);
    t.weights.push_back(w);
    t.values.push_back(u.d_rho(a, theta));
    t.arclength.push_back(a * theta);
  }
  t.tangential_wavenumber = u.n;
  return t;
}

BoundaryTrace neumann_boundary_values(const DiscEigenfunction& u, int nodes) {
  BoundaryTrace t = disc_trace(u, nodes);
  for (int i = 0; i < nodes; ++i) t.values[i] = u.value(u.radius, 2.0 * kPi * i / nodes);
  return t;
}

BoundaryTrace rectangle_trace(const RectangleEigenfunction& u, int nodes) {
  require_nodes(nodes);
  const double perimeter = 2.0 * (u.a + u.b);
  const double target = perimeter / nodes;
  const int na = std::max(1, static_cast<int>(std::lround(u.a / target)));
  const int nb = std::max(1, static_cast<int>(std::lround(u.b / target)));
  const double ha = u.a / na;
  const double hb = u.b / nb;
  const bool uniform = std::abs(ha - hb) <= 1e-12 * std::max(ha, hb);

  BoundaryTrace t;
  double s0 = 0.0;
  auto side = [&](int count, double h, Point2 start, Point2 dir, Point2 normal) {
    for (int i = 0; i < count; ++i) {
      const double s = (i + 0.5) * h;
      const Point2 p{start.x + s * dir.x, start.y + s * dir.y};
      const Point2 g = u.gradient(p);
      t.nodes.push_back(p);
      t.normals.push_back(normal);
      t.weights.push_back(h);
      t.values.push_back(g.x * normal.x + g.y * normal.y);
      t.arclength.push_back(s0 + s);
    }
    s0 += count * h;
  };
  side(na, ha, {0.0, 0.0}, {1.0, 0.0}, {0.0, -1.0});
  side(nb, hb, {u.a, 0.0}, {0.0, 1.0}, {1.0, 0.0});
  side(na, ha, {u.a, u.b}, {-1.0, 0.0}, {0.0, 1.0});
  side(nb, hb, {0.0, u.b}, {0.0, -1.0}, {-1.0, 0.0});
  if (!uniform) t.arclength.clear();
  return t;
}

BoundaryTrace cylinder_trace(double a, double b, int m, int n, int nodes) {
  require_nodes(nodes);
  (void)n;  // |psi| does not depend on the angular wavenumber
  const double amp = std::sqrt(2.0 / (a * b)) * m * kPi / a;
  const int per_circle = nodes / 2;
  const double w = b / per_circle;
  BoundaryTrace t;
  for (int side = 0; side < 2; ++side) {
    const double x = side == 0 ? 0.0 : a;
    for (int i = 0; i < per_circle; ++i) {
      t.nodes.push_back({x, (i + 0.5) * w});
      t.normals.push_back({side == 0 ? -1.0 : 1.0, 0.0});
      t.weights.push_back(w);
      t.values.push_back(amp);
    }
  }
  return t;
}

BoundaryTrace hemisphere_trace(const HemisphereEigenfunction& u, int nodes) {
  require_nodes(nodes);
  BoundaryTrace t;
  const double w = 2.0 * kPi / nodes;
  const double psi = std::abs(u.d_theta(kPi / 2));
  for (int i = 0; i < nodes; ++i) {
    const double phi = w * i;
    t.nodes.push_back({std::cos(phi), std::sin(phi)});
    t.normals.push_back({0.0, 0.0});
    t.weights.push_back(w);
    t.values.push_back(psi);
    t.arclength.push_back(phi);
  }
  t.tangential_wavenumber = u.l - 1;
  return t;
}

BoundaryTrace trace_for(const EigenmodeRecord& record, int nodes) {
  const auto& idx = record.indices;
  if (const auto* d = std::get_if<Disc>(&record.domain)) {
    return disc_trace(DiscEigenfunction::dirichlet(d->radius, idx.at(0), idx.at(1)), nodes);
  }
  if (const auto* r = std::get_if<Rectangle>(&record.domain)) {
    return rectangle_trace(RectangleEigenfunction{r->a, r->b, idx.at(0), idx.at(1)}, nodes);
  }
  if (const auto* c = std::get_if<FlatCylinder>(&record.domain)) {
    return cylinder_trace(c->length, c->circumference, idx.at(0), idx.at(1), nodes);
  }
  if (std::holds_alternative<Hemisphere>(record.domain)) {
    return hemisphere_trace(HemisphereEigenfunction::make(idx.at(0)), nodes);
  }
  if (std::holds_alternative<NeumannDisc>(record.domain)) {
    const int n = idx.at(0);
    return neumann_boundary_values(DiscEigenfunction::neumann_mode(1.0, n, neumann_root_index(n, idx.at(1))), nodes);
  }
  throw std::invalid_argument("no closed-form trace for domain " + domain_kind(record.domain));
}

DiscEigenfunction disc_eigenfunction(const EigenmodeRecord& record) {
  const auto& idx = record.indices;
  if (const auto* d = std::get_if<Disc>(&record.domain)) return DiscEigenfunction::dirichlet(d->radius, idx.at(0), idx.at(1));
  if (std::holds_alternative<NeumannDisc>(record.domain)) {
    const int n = idx.at(0);
    return DiscEigenfunction::neumann_mode(1.0, n, neumann_root_index(n, idx.at(1)));
  }
  throw std::invalid_argument("not a disc record: " + domain_kind(record.domain));
}

}  // namespace tracelab::closedform
