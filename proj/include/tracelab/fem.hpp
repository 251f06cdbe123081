#pragma once

#include <Eigen/Sparse>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "tracelab/domain.hpp"
#include "tracelab/trace.hpp"
#include "tracelab/verify.hpp"

namespace tracelab::fem {

/// Raised when bounds_audit is asked for eigenvalues the mesh cannot resolve.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Planar triangulation. Triangles are counter-clockwise; each boundary edge
/// (i, j) has the domain on its left and `edge_normals` holds its outward
/// unit normal.
struct Mesh {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> boundary_edges;
  std::vector<Point2> edge_normals;
  std::vector<bool> boundary_flag;

  double max_edge() const;
  double area() const;
  /// Throws std::invalid_argument on any broken invariant.
  void validate() const;
};

/// Rebuilds edge orientation, normals and boundary flags from triangles and
/// an unordered list of boundary edges.
Mesh make_mesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> triangles,
               std::vector<std::array<int, 2>> boundary_edges);

/// Counter-clockwise copy of a simple polygon. Throws std::invalid_argument
/// for fewer than three vertices, repeated points, zero area or
/// self-intersection.
std::vector<Point2> checked_polygon(const std::vector<Point2>& polygon);

struct MeshOptions {
  double jitter = 0.0;     ///< interior lattice perturbation, fraction of the spacing
  std::uint64_t seed = 0;  ///< used only when jitter > 0
};

/// Coarse conforming Delaunay mesh at spacing max(target_h, diam/16), then
/// uniform 4-way refinement until max edge <= target_h. Meshes for target_h
/// and target_h / 2 are therefore nested.
Mesh mesh_polygon(const std::vector<Point2>& polygon, double target_h, const MeshOptions& options = {});

/// Splits every triangle into four through its edge midpoints.
Mesh refine_uniform(const Mesh& mesh);

/// Regular n-gon inscribed in the circle of radius a about the origin.
std::vector<Point2> regular_polygon(int n, double a = 1.0);

std::vector<Point2> read_polygon(std::istream& in);
void write_polygon(std::ostream& out, const std::vector<Point2>& polygon);
Mesh read_mesh(std::istream& in);
void write_mesh(std::ostream& out, const Mesh& mesh);

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Linear-element matrices. Full matrices include boundary rows; the
/// interior blocks carry the Dirichlet problem.
struct FemSystem {
  Mesh mesh;
  std::vector<int> interior;  ///< vertex index of each interior dof
  std::vector<int> boundary;  ///< vertex index of each boundary dof
  std::vector<int> dof;       ///< vertex -> interior dof or -1
  std::vector<int> bdof;      ///< vertex -> boundary dof or -1
  SparseMatrix K;             ///< full stiffness
  SparseMatrix M;             ///< full mass
  SparseMatrix K_ii;
  SparseMatrix M_ii;
};

FemSystem assemble(const Mesh& mesh);

struct FemEigenpair {
  double lambda_h = 0.0;
  Eigen::VectorXd u_h;    ///< interior dofs, u^T M u = 1
  Eigen::VectorXd psi_h;  ///< boundary dofs, filled by recover_flux
  double h = 0.0;
  double residual = 0.0;  ///< ||K u - lambda M u|| / ||u||
};

struct SolveOptions {
  double tolerance = 1e-8;
  std::uint64_t seed = 1;
  int max_restarts = 20;
};

/// The `count` smallest eigenpairs above `shift`, increasing. Shift-invert
/// Lanczos with full reorthogonalisation and locking; completeness is
/// confirmed by a Sylvester inertia count.
std::vector<FemEigenpair> solve_eigs(const FemSystem& system, int count, double shift = 0.0,
                                     const SolveOptions& options = {});
std::vector<FemEigenpair> solve_eigs(const Mesh& mesh, int count, double shift = 0.0, const SolveOptions& options = {});

/// Number of discrete Dirichlet eigenvalues below `tau`, from the inertia of K - tau M.
int count_below(const FemSystem& system, double tau);

/// Variational normal derivative: solves M_Y psi = (K u - lambda M u)|_Y.
/// The returned trace has two entries per boundary edge (trapezoid rule with
/// that edge's normal). Also stores psi in pair.psi_h.
BoundaryTrace recover_flux(const FemSystem& system, FemEigenpair& pair);

struct AuditResult {
  verify::RatioSummary summary;
  std::vector<EigenmodeRecord> records;  ///< one per cluster
  double h = 0.0;
  double resolution = 0.0;  ///< lambda_max h^2
  int eigenpairs = 0;
};

/// Ratio statistics over every discrete eigenvalue below lambda_max, with
/// clusters (relative gap < cluster_gap) merged before forming ratios.
/// Throws ResolutionError if lambda_max h^2 > max_resolution.
AuditResult bounds_audit(const Mesh& mesh, double lambda_max, const DomainSpec& domain, double max_resolution = 0.05,
                         double cluster_gap = 1e-6);

}  // namespace tracelab::fem
