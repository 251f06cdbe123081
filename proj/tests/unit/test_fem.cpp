#include "tracelab/fem.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tracelab/specfun.hpp"
#include "tracelab/verify.hpp"

using namespace tracelab;
using namespace tracelab::fem;

namespace {

constexpr double kPi = std::numbers::pi;

const std::vector<Point2> kSquare{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
const std::vector<Point2> kLShape{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};

// Sorted Dirichlet eigenvalues of the unit square, pi^2 (m^2 + n^2).
std::vector<double> square_spectrum(int count) {
  std::vector<double> lam;
  for (int m = 1; m <= 40; ++m)
    for (int n = 1; n <= 40; ++n) lam.push_back(kPi * kPi * (m * m + n * n));
  std::sort(lam.begin(), lam.end());
  lam.resize(count);
  return lam;
}

// L2 distance on the boundary between psi_h and the exact flux of
// u = 2 sin(pi x) sin(pi y).
double square_flux_error(const BoundaryTrace& t) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto p = t.nodes[i];
    const auto n = t.normals[i];
    const double ux = 2 * kPi * std::cos(kPi * p.x) * std::sin(kPi * p.y);
    const double uy = 2 * kPi * std::sin(kPi * p.x) * std::cos(kPi * p.y);
    const double e = t.values[i] - (n.x * ux + n.y * uy);
    s += t.weights[i] * e * e;
  }
  return std::sqrt(s);
}

}  // namespace

TEST(Mesh, UnitSquareValid) {
  const auto m = mesh_polygon(kSquare, 0.1);
  EXPECT_NO_THROW(m.validate());
  EXPECT_LE(m.max_edge(), 0.1);
  EXPECT_NEAR(m.area(), 1.0, 1e-12);
  double len = 0.0;
  for (const auto& e : m.boundary_edges) len += std::hypot(m.vertices[e[1]].x - m.vertices[e[0]].x, m.vertices[e[1]].y - m.vertices[e[0]].y);
  EXPECT_NEAR(len, 4.0, 1e-12);
}

TEST(Mesh, LShapeKeepsReentrantCorner) {
  const auto m = mesh_polygon(kLShape, 0.1);
  EXPECT_NO_THROW(m.validate());
  EXPECT_NEAR(m.area(), 3.0, 1e-12);
  const auto it = std::find_if(m.vertices.begin(), m.vertices.end(), [](Point2 p) { return p.x == 1.0 && p.y == 1.0; });
  ASSERT_NE(it, m.vertices.end());
  EXPECT_TRUE(m.boundary_flag[it - m.vertices.begin()]);
}

TEST(Mesh, ClockwiseInputIsReoriented) {
  std::vector<Point2> cw(kSquare.rbegin(), kSquare.rend());
  const auto m = mesh_polygon(cw, 0.2);
  EXPECT_NEAR(m.area(), 1.0, 1e-12);
  for (std::size_t k = 0; k < m.boundary_edges.size(); ++k) {
    const auto a = m.vertices[m.boundary_edges[k][0]];
    const auto b = m.vertices[m.boundary_edges[k][1]];
    const Point2 mid{0.5 * (a.x + b.x) - 0.5, 0.5 * (a.y + b.y) - 0.5};
    EXPECT_GT(mid.x * m.edge_normals[k].x + mid.y * m.edge_normals[k].y, 0.0);
  }
}

TEST(Mesh, JitteredMeshIsValidAndSeeded) {
  const auto a = mesh_polygon(kLShape, 0.1, {0.2, 7});
  const auto b = mesh_polygon(kLShape, 0.1, {0.2, 7});
  EXPECT_NO_THROW(a.validate());
  EXPECT_EQ(a.vertices.size(), b.vertices.size());
  for (std::size_t i = 0; i < a.vertices.size(); ++i) EXPECT_EQ(a.vertices[i].x, b.vertices[i].x);
}

TEST(Mesh, DegeneratePolygonsRejected) {
  EXPECT_THROW(mesh_polygon({{0, 0}, {1, 0}, {1, 0}, {0, 1}}, 0.1), std::invalid_argument);
  EXPECT_THROW(mesh_polygon({{0, 0}, {1, 0}, {2, 0}}, 0.1), std::invalid_argument);
  EXPECT_THROW(mesh_polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}, 0.1), std::invalid_argument);
  EXPECT_THROW(mesh_polygon({{0, 0}, {1, 0}}, 0.1), std::invalid_argument);
  EXPECT_THROW(mesh_polygon({{0, 0}, {2, 0}, {1, 0}, {1, 1}}, 0.1), std::invalid_argument);
  EXPECT_THROW(mesh_polygon(kSquare, 0.0), std::invalid_argument);
}

TEST(Mesh, RefinementIsNested) {
  const auto coarse = mesh_polygon(kSquare, 1.0 / 32);
  const auto fine = mesh_polygon(kSquare, 1.0 / 64);
  ASSERT_GT(fine.vertices.size(), coarse.vertices.size());
  for (std::size_t i = 0; i < coarse.vertices.size(); ++i) {
    EXPECT_EQ(fine.vertices[i].x, coarse.vertices[i].x);
    EXPECT_EQ(fine.vertices[i].y, coarse.vertices[i].y);
  }
  EXPECT_NEAR(fine.max_edge(), 0.5 * coarse.max_edge(), 1e-12);
}

TEST(Mesh, TextRoundTrip) {
  const auto m = mesh_polygon(regular_polygon(7, 1.3), 0.3, {0.15, 3});
  std::stringstream ss;
  write_mesh(ss, m);
  const auto r = read_mesh(ss);
  ASSERT_EQ(r.vertices.size(), m.vertices.size());
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    EXPECT_EQ(r.vertices[i].x, m.vertices[i].x);
    EXPECT_EQ(r.vertices[i].y, m.vertices[i].y);
  }
  EXPECT_EQ(r.triangles, m.triangles);
  EXPECT_EQ(r.boundary_edges, m.boundary_edges);
  EXPECT_EQ(r.boundary_flag, m.boundary_flag);

  std::stringstream ps;
  const auto poly = regular_polygon(5, 0.7);
  write_polygon(ps, poly);
  const auto back = read_polygon(ps);
  ASSERT_EQ(back.size(), poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) EXPECT_EQ(back[i].x, poly[i].x);
}

TEST(Mesh, MalformedFilesRejected) {
  std::stringstream bad_header("points 3 triangles 1 boundary 3\n");
  EXPECT_THROW(read_mesh(bad_header), std::invalid_argument);
  std::stringstream truncated("vertices 3 triangles 1 boundary 3\n0 0\n1 0\n0 1\n0 1 2\n0 1\n");
  EXPECT_THROW(read_mesh(truncated), std::invalid_argument);
  std::stringstream open_loop("vertices 3 triangles 1 boundary 2\n0 0\n1 0\n0 1\n0 1 2\n0 1\n1 2\n");
  EXPECT_THROW(read_mesh(open_loop), std::invalid_argument);
  std::stringstream ok("vertices 3 triangles 1 boundary 3\n0 0\n1 0\n0 1\n0 2 1\n1 0\n2 1\n0 2\n");
  const auto m = read_mesh(ok);
  EXPECT_NEAR(m.area(), 0.5, 1e-15);
  std::stringstream bad_poly("0 0\n1 0 5\n");
  EXPECT_THROW(read_polygon(bad_poly), std::invalid_argument);
}

TEST(Assembly, MatricesAreConsistent) {
  const auto s = assemble(mesh_polygon(kLShape, 0.2));
  EXPECT_NEAR(s.M.sum(), 3.0, 1e-12);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(s.K.rows());
  EXPECT_LT((s.K * ones).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((SparseMatrix(s.K.transpose()) - s.K).norm(), 1e-13);
  EXPECT_LT((SparseMatrix(s.M.transpose()) - s.M).norm(), 1e-15);
  EXPECT_EQ(s.K_ii.rows(), static_cast<Eigen::Index>(s.interior.size()));
  EXPECT_EQ(s.interior.size() + s.boundary.size(), s.mesh.vertices.size());
}

TEST(Eigen, SquareSpectrumFromAbove) {
  const auto s = assemble(mesh_polygon(kSquare, 1.0 / 32));
  const auto pairs = solve_eigs(s, 10);
  const auto exact = square_spectrum(10);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_GE(pairs[i].lambda_h, exact[i]);
    EXPECT_LT(pairs[i].lambda_h / exact[i] - 1.0, 0.01);
    EXPECT_LE(pairs[i].residual, 1e-8);
    EXPECT_NEAR(pairs[i].u_h.dot(s.M_ii * pairs[i].u_h), 1.0, 1e-12);
    if (i > 0) {
      EXPECT_GE(pairs[i].lambda_h, pairs[i - 1].lambda_h);
    }
  }
  EXPECT_GT((s.M_ii * pairs[0].u_h).sum(), 0.0);
  EXPECT_EQ(count_below(s, 0.5 * (pairs[9].lambda_h + solve_eigs(s, 11)[10].lambda_h)), 10);
}

TEST(Eigen, ShiftSelectsUpperPart) {
  const auto s = assemble(mesh_polygon(kSquare, 1.0 / 16));
  const auto all = solve_eigs(s, 6);
  const auto upper = solve_eigs(s, 2, 0.5 * (all[2].lambda_h + all[3].lambda_h));
  EXPECT_NEAR(upper[0].lambda_h, all[3].lambda_h, 1e-9 * all[3].lambda_h);
  EXPECT_NEAR(upper[1].lambda_h, all[4].lambda_h, 1e-9 * all[4].lambda_h);
  // A shift sitting on an eigenvalue is perturbed, not fatal.
  EXPECT_NO_THROW(solve_eigs(s, 1, all[0].lambda_h));
}

TEST(Eigen, SolveIsDeterministic) {
  const auto s = assemble(mesh_polygon(kLShape, 0.1));
  const auto a = solve_eigs(s, 5);
  const auto b = solve_eigs(s, 5);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(a[i].lambda_h, b[i].lambda_h);
    EXPECT_EQ(a[i].u_h, b[i].u_h);
  }
}

TEST(Eigen, RichardsonRatioOnSquare) {
  const double exact = 2 * kPi * kPi;
  std::vector<double> err;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) err.push_back(solve_eigs(mesh_polygon(kSquare, h), 1)[0].lambda_h - exact);
  EXPECT_NEAR(err[0] / err[1], 4.0, 1.2);
  EXPECT_NEAR(err[1] / err[2], 4.0, 1.2);
  EXPECT_LT(err[2] / exact, 0.01);
}

TEST(Eigen, PolygonalDisc) {
  const double j01 = specfun::bessel_zero(0, 1, specfun::ZeroKind::J);
  const auto pairs = solve_eigs(mesh_polygon(regular_polygon(256), 1.0 / 32), 1);
  EXPECT_NEAR(pairs[0].lambda_h / (j01 * j01), 1.0, 0.02);
}

TEST(Eigen, InvalidCountRejected) {
  const auto s = assemble(mesh_polygon(kSquare, 0.25));
  EXPECT_THROW(solve_eigs(s, 0), std::invalid_argument);
  EXPECT_THROW(solve_eigs(s, static_cast<int>(s.interior.size()) + 1), std::invalid_argument);
}

TEST(Flux, GroundStateFluxIsInward) {
  for (const auto& poly : {kSquare, regular_polygon(6), regular_polygon(64, 2.0)}) {
    const auto s = assemble(mesh_polygon(poly, 0.05));
    auto pairs = solve_eigs(s, 1);
    recover_flux(s, pairs[0]);
    const double scale = pairs[0].psi_h.cwiseAbs().maxCoeff();
    EXPECT_LE(pairs[0].psi_h.maxCoeff(), 1e-8 * scale);
  }
}

TEST(Flux, SquareTraceNormAndRellich) {
  const auto s = assemble(mesh_polygon(kSquare, 1.0 / 32));
  auto pairs = solve_eigs(s, 1);
  const auto trace = recover_flux(s, pairs[0]);
  EXPECT_NO_THROW(trace.validate());
  EXPECT_NEAR(verify::quad_trace_norm(trace) / (8 * kPi * kPi), 1.0, 0.03);
  EXPECT_LE(verify::rellich_check(Polygon{kSquare, ""}, pairs[0].lambda_h, trace).residual, 0.02);
}

TEST(Flux, ErrorsDecreaseUnderRefinement) {
  double prev_flux = INFINITY;
  std::vector<double> prev_rellich(4, INFINITY);
  for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    const auto s = assemble(mesh_polygon(kSquare, h));
    auto pairs = solve_eigs(s, 4);
    const double e = square_flux_error(recover_flux(s, pairs[0]));
    EXPECT_LT(e, prev_flux);
    prev_flux = e;
    for (int i = 0; i < 4; ++i) {
      const auto rel = verify::rellich_check(Polygon{kSquare, ""}, pairs[i].lambda_h, recover_flux(s, pairs[i])).residual;
      EXPECT_LT(rel, prev_rellich[i]) << "mode " << i;
      prev_rellich[i] = rel;
    }
  }
}

TEST(Audit, SquareRatiosNearFour) {
  const auto m = mesh_polygon(kSquare, 1.0 / 32);
  const auto res = bounds_audit(m, 0.04 / (m.max_edge() * m.max_edge()), Polygon{kSquare, ""});
  EXPECT_GE(res.eigenpairs, 6);
  EXPECT_LE(res.resolution, 0.05);
  EXPECT_NEAR(res.summary.min_ratio, 4.0, 0.2);
  EXPECT_NEAR(res.summary.max_ratio, 4.0, 0.2);
}

TEST(Audit, DegenerateClustersMerged) {
  const auto m = mesh_polygon(kSquare, 1.0 / 32);
  const auto res = bounds_audit(m, 60.0, Polygon{kSquare, ""}, 0.05, 1e-2);
  // lambda_1 alone, then the (1,2)/(2,1) pair.
  ASSERT_EQ(res.records.size(), 2u);
  EXPECT_EQ(res.records[1].indices, (std::vector<int>{2, 2}));
  EXPECT_EQ(res.eigenpairs, 3);
}

TEST(Audit, LShapeBoundedBelow) {
  const auto m = mesh_polygon(kLShape, 1.0 / 64);
  const auto res = bounds_audit(m, 170.0, Polygon{kLShape, ""});
  EXPECT_GE(res.eigenpairs, 30);
  EXPECT_GT(res.summary.min_ratio, 0.5);
}

TEST(Audit, ResolutionGuard) {
  const auto m = mesh_polygon(kSquare, 0.1);
  EXPECT_THROW(bounds_audit(m, 1000.0, Polygon{kSquare, ""}), ResolutionError);
}
