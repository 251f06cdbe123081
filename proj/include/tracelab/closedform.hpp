#pragma once

#include <vector>

#include "tracelab/domain.hpp"
#include "tracelab/trace.hpp"

namespace tracelab::closedform {

/// Angular factor for disc modes with n >= 1. n == 0 modes are radial and
/// ignore the parity.
enum class Parity { Cos, Sin };

/// L^2-normalized disc eigenfunction
///   u = c J_n(j rho / a) cos(n theta)   (or sin, or radial for n == 0)
/// with j = j_{n,k} (Dirichlet) or j'_{n,k} (Neumann).
struct DiscEigenfunction {
  double radius = 1.0;
  int n = 0;
  int k = 1;
  double zero = 0.0;
  double amplitude = 0.0;
  Parity parity = Parity::Cos;
  bool neumann = false;

  static DiscEigenfunction dirichlet(double radius, int n, int k, Parity parity = Parity::Cos);
  /// Neumann mode on the disc. k counts positive roots of J_n'; for n == 0
  /// index k corresponds to the k-th positive root (the constant mode is
  /// excluded from this type).
  static DiscEigenfunction neumann_mode(double radius, int n, int k, Parity parity = Parity::Cos);

  double lambda() const { return zero * zero / (radius * radius); }
  double angular(double theta) const;
  double angular_derivative(double theta) const;
  double value(double rho, double theta) const;
  double d_rho(double rho, double theta) const;
  double d_theta(double rho, double theta) const;
};

/// sqrt(4/(ab)) sin(m pi x / a) sin(n pi y / b) on [0,a] x [0,b].
struct RectangleEigenfunction {
  double a = 1.0;
  double b = 1.0;
  int m = 1;
  int n = 1;

  double lambda() const;
  double value(Point2 p) const;
  Point2 gradient(Point2 p) const;
};

/// Hemisphere mode with m = l - 1, written as a modulus
///   |u| = c sin^{l-1}(theta) cos(theta)
/// (the phase e^{i(l-1)phi} has unit modulus).
struct HemisphereEigenfunction {
  int l = 1;
  double c = 0.0;

  static HemisphereEigenfunction make(int l);
  double lambda() const { return static_cast<double>(l) * (l + 1); }
  double modulus(double theta) const;
  double d_theta(double theta) const;
};

// --- records -------------------------------------------------------------

EigenmodeRecord disc_mode(double a, int n, int k);
EigenmodeRecord rectangle_mode(double a, double b, int m, int n);

/// Flat cylinder [0, a] x S^1_b. The angular factor is e^{2 pi i n theta / b},
/// n any integer, so lambda = (m pi / a)^2 + (2 pi n / b)^2.
EigenmodeRecord cylinder_mode(double a, double b, int m, int n);

/// Hemisphere mode with m = l - 1 (l odd). psi_norm_sq = 2 pi c_l^2.
EigenmodeRecord hemisphere_mode(int l);

/// Neumann disc mode (unit radius); psi_norm_sq slot holds ||u|_Y||^2 =
/// 2 lambda / (lambda - n^2). k indexes J_n' roots with the
/// convention that (n, k) = (0, 1) is the excluded constant mode.
EigenmodeRecord neumann_disc_mode(int n, int k);

struct IndexRange {
  int first = 0;
  int last = 0;
  bool empty() const { return last < first; }
};

/// Catalogues sorted by (lambda, indices).
std::vector<EigenmodeRecord> disc_modes(double a, IndexRange n, IndexRange k);
std::vector<EigenmodeRecord> rectangle_modes(double a, double b, IndexRange m, IndexRange n);
std::vector<EigenmodeRecord> cylinder_modes(double a, double b, IndexRange m, IndexRange n);
std::vector<EigenmodeRecord> hemisphere_modes(IndexRange l);
std::vector<EigenmodeRecord> neumann_disc_modes(IndexRange n, IndexRange k);

/// Closed-form record for (domain, indices), dispatching on the domain kind.
EigenmodeRecord mode_for(const DomainSpec& domain, const std::vector<int>& indices);

void sort_records(std::vector<EigenmodeRecord>& records);

// --- boundary traces -----------------------------------------------------

/// psi on `nodes` equispaced points of the circle rho = a (trapezoid rule).
BoundaryTrace disc_trace(const DiscEigenfunction& u, int nodes);

/// Boundary values (not normal derivative) of a Neumann disc mode.
BoundaryTrace neumann_boundary_values(const DiscEigenfunction& u, int nodes);

/// psi on the rectangle boundary, midpoint rule with spacing close to
/// perimeter / nodes on every side.
BoundaryTrace rectangle_trace(const RectangleEigenfunction& u, int nodes);

/// |psi| on both boundary circles of the flat cylinder.
BoundaryTrace cylinder_trace(double a, double b, int m, int n, int nodes);

/// |psi| on the equator.
BoundaryTrace hemisphere_trace(const HemisphereEigenfunction& u, int nodes);

/// Exact trace for a closed-form record (disc, rectangle, cylinder, hemisphere,
/// neumann disc). Disc modes use the cos parity.
BoundaryTrace trace_for(const EigenmodeRecord& record, int nodes);

/// Cos-parity eigenfunction behind a disc or Neumann-disc record.
DiscEigenfunction disc_eigenfunction(const EigenmodeRecord& record);

}  // namespace tracelab::closedform
