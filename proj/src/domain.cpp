#include "tracelab/domain.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace tracelab {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double polygon_signed_area(const std::vector<Point2>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& u = p[i];
    const auto& v = p[(i + 1) % p.size()];
    s += u.x * v.y - v.x * u.y;
  }
  return 0.5 * s;
}

}  // namespace

Disc make_disc(double radius) {
  require_positive(radius, "disc radius");
  return Disc{radius};
}

Rectangle make_rectangle(double a, double b) {
  require_positive(a, "rectangle side a");
  require_positive(b, "rectangle side b");
  if (a > b) std::swap(a, b);
  return Rectangle{a, b};
}

FlatCylinder make_flat_cylinder(double length, double circumference) {
  require_positive(length, "cylinder length");
  require_positive(circumference, "cylinder circumference");
  return FlatCylinder{length, circumference};
}

CurvedBand make_band(Curvature curvature, double half_width) {
  require_positive(half_width, "band half-width");
  if (curvature == Curvature::Spherical && half_width >= kPi / 2) {
    throw std::invalid_argument("spherical band half-width must be below pi/2");
  }
  return CurvedBand{curvature, half_width};
}

std::string domain_kind(const DomainSpec& domain) {
  return std::visit(overloaded{
                        [](const Disc&) { return std::string("disc"); },
                        [](const Rectangle&) { return std::string("rectangle"); },
                        [](const FlatCylinder&) { return std::string("flat_cylinder"); },
                        [](const Hemisphere&) { return std::string("hemisphere"); },
                        [](const NeumannDisc&) { return std::string("neumann_disc"); },
                        [](const CurvedBand&) { return std::string("band"); },
                        [](const Polygon&) { return std::string("polygon"); },
                    },
                    domain);
}

bool is_euclidean(const DomainSpec& domain) {
  return std::holds_alternative<Disc>(domain) || std::holds_alternative<Rectangle>(domain) ||
         std::holds_alternative<Polygon>(domain);
}

double domain_area(const DomainSpec& domain) {
  return std::visit(overloaded{
                        [](const Disc& d) { return kPi * d.radius * d.radius; },
                        [](const Rectangle& r) { return r.a * r.b; },
                        [](const FlatCylinder& c) { return c.length * c.circumference; },
                        [](const Hemisphere&) { return 2.0 * kPi; },
                        [](const NeumannDisc&) { return kPi; },
                        [](const CurvedBand& b) {
                          switch (b.curvature) {
                            case Curvature::Flat: return 4.0 * kPi * b.half_width;
                            case Curvature::Spherical: return 4.0 * kPi * std::sin(b.half_width);
                            case Curvature::Hyperbolic: return 4.0 * kPi * std::sinh(b.half_width);
                          }
                          return 0.0;
                        },
                        [](const Polygon& p) { return std::abs(polygon_signed_area(p.vertices)); },
                    },
                    domain);
}

double boundary_length(const DomainSpec& domain) {
  return std::visit(overloaded{
                        [](const Disc& d) { return 2.0 * kPi * d.radius; },
                        [](const Rectangle& r) { return 2.0 * (r.a + r.b); },
                        [](const FlatCylinder& c) { return 2.0 * c.circumference; },
                        [](const Hemisphere&) { return 2.0 * kPi; },
                        [](const NeumannDisc&) { return 2.0 * kPi; },
                        [](const CurvedBand& b) {
                          switch (b.curvature) {
                            case Curvature::Flat: return 4.0 * kPi;
                            case Curvature::Spherical: return 4.0 * kPi * std::cos(b.half_width);
                            case Curvature::Hyperbolic: return 4.0 * kPi * std::cosh(b.half_width);
                          }
                          return 0.0;
                        },
                        [](const Polygon& p) {
                          double s = 0.0;
                          for (std::size_t i = 0; i < p.vertices.size(); ++i) {
                            const auto& u = p.vertices[i];
                            const auto& v = p.vertices[(i + 1) % p.vertices.size()];
                            s += std::hypot(v.x - u.x, v.y - u.y);
                          }
                          return s;
                        },
                    },
                    domain);
}

Point2 domain_centroid(const DomainSpec& domain) {
  if (const auto* d = std::get_if<Disc>(&domain)) {
    (void)d;
    return {0.0, 0.0};
  }
  if (const auto* r = std::get_if<Rectangle>(&domain)) return {0.5 * r->a, 0.5 * r->b};
  if (const auto* p = std::get_if<Polygon>(&domain)) {
    const auto& v = p->vertices;
    const double area = polygon_signed_area(v);
    if (area == 0.0) throw std::invalid_argument("degenerate polygon has no centroid");
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto& u = v[i];
      const auto& w = v[(i + 1) % v.size()];
      const double cross = u.x * w.y - w.x * u.y;
      cx += (u.x + w.x) * cross;
      cy += (u.y + w.y) * cross;
    }
    return {cx / (6.0 * area), cy / (6.0 * area)};
  }
  throw std::invalid_argument("centroid is only defined for Euclidean domains, not " + domain_kind(domain));
}

const char* to_string(Curvature c) {
  switch (c) {
    case Curvature::Flat: return "flat";
    case Curvature::Spherical: return "spherical";
    case Curvature::Hyperbolic: return "hyperbolic";
  }
  return "?";
}

Curvature curvature_from_string(const std::string& name) {
  if (name == "flat") return Curvature::Flat;
  if (name == "spherical") return Curvature::Spherical;
  if (name == "hyperbolic") return Curvature::Hyperbolic;
  throw std::invalid_argument("unknown curvature '" + name + "'");
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::ClosedForm: return "closed-form";
    case Provenance::Neumann: return "neumann";
    case Provenance::Band1d: return "band1d";
    case Provenance::Fem: return "fem";
  }
  return "?";
}

Provenance provenance_from_string(const std::string& name) {
  if (name == "closed-form") return Provenance::ClosedForm;
  if (name == "neumann") return Provenance::Neumann;
  if (name == "band1d") return Provenance::Band1d;
  if (name == "fem") return Provenance::Fem;
  throw std::invalid_argument("unknown provenance '" + name + "'");
}

EigenmodeRecord make_record(DomainSpec domain, std::vector<int> indices, double lambda, double psi_norm_sq,
                            Provenance provenance) {
  if (!(lambda > 0.0)) throw std::invalid_argument("eigenvalue must be positive");
  if (psi_norm_sq < 0.0) throw std::invalid_argument("trace norm must be non-negative");
  EigenmodeRecord rec;
  rec.domain = std::move(domain);
  rec.indices = std::move(indices);
  rec.lambda = lambda;
  rec.psi_norm_sq = psi_norm_sq;
  rec.ratio = psi_norm_sq / lambda;
  rec.provenance = provenance;
  return rec;
}

}  // namespace tracelab
