#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tracelab {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct Disc {
  double radius = 1.0;
  friend bool operator==(const Disc&, const Disc&) = default;
};

/// [0, a] x [0, b] with a <= b; make_rectangle() swaps when needed.
struct Rectangle {
  double a = 1.0;
  double b = 1.0;
  friend bool operator==(const Rectangle&, const Rectangle&) = default;
};

/// [0, length] x (circle of circumference `circumference`).
struct FlatCylinder {
  double length = 1.0;
  double circumference = 1.0;
  friend bool operator==(const FlatCylinder&, const FlatCylinder&) = default;
};

/// Upper unit hemisphere; boundary is the equator.
struct Hemisphere {
  friend bool operator==(const Hemisphere&, const Hemisphere&) = default;
};

/// Unit disc with Neumann boundary condition.
struct NeumannDisc {
  friend bool operator==(const NeumannDisc&, const NeumannDisc&) = default;
};

enum class Curvature { Flat, Spherical, Hyperbolic };

/// Surface of revolution [-a, a]_y x S^1 with metric dy^2 + w(y)^2 dphi^2,
/// w = 1, cos y or cosh y.
struct CurvedBand {
  Curvature curvature = Curvature::Spherical;
  double half_width = 0.5;
  friend bool operator==(const CurvedBand&, const CurvedBand&) = default;
};

/// User-supplied simple polygon solved with finite elements.
struct Polygon {
  std::vector<Point2> vertices;
  std::string source;  ///< file the polygon was read from, if any
  friend bool operator==(const Polygon&, const Polygon&) = default;
};

using DomainSpec = std::variant<Disc, Rectangle, FlatCylinder, Hemisphere, NeumannDisc, CurvedBand, Polygon>;

Disc make_disc(double radius);
Rectangle make_rectangle(double a, double b);
FlatCylinder make_flat_cylinder(double length, double circumference);
CurvedBand make_band(Curvature curvature, double half_width);

/// Stable lowercase tag: "disc", "rectangle", "flat_cylinder", ...
std::string domain_kind(const DomainSpec& domain);

/// True for planar subdomains of R^2 where x . grad is a global vector field.
bool is_euclidean(const DomainSpec& domain);

/// Area (or Riemannian area) of the domain.
double domain_area(const DomainSpec& domain);

/// Length of the boundary.
double boundary_length(const DomainSpec& domain);

/// Centroid for Euclidean domains (origin used by the Rellich check).
Point2 domain_centroid(const DomainSpec& domain);

const char* to_string(Curvature c);
Curvature curvature_from_string(const std::string& name);

enum class Provenance { ClosedForm, Neumann, Band1d, Fem };

const char* to_string(Provenance p);
Provenance provenance_from_string(const std::string& name);

/// One eigenpair with its boundary-trace norm.
///
/// `psi_norm_sq` is the claimed (analytic) value for closed-form records and
/// the computed value otherwise. For Neumann records the slot holds the
/// boundary-value norm ||u|_Y||^2 instead of a normal derivative.
struct EigenmodeRecord {
  DomainSpec domain;
  std::vector<int> indices;
  double lambda = 0.0;
  double psi_norm_sq = 0.0;
  double ratio = 0.0;
  Provenance provenance = Provenance::ClosedForm;
  std::optional<double> interior_norm_sq;  ///< measured ||u||^2 when checked

  friend bool operator==(const EigenmodeRecord&, const EigenmodeRecord&) = default;
};

EigenmodeRecord make_record(DomainSpec domain, std::vector<int> indices, double lambda, double psi_norm_sq,
                            Provenance provenance);

}  // namespace tracelab
