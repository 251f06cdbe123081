#include "tracelab/fem.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "tracelab/specfun.hpp"

namespace tracelab::fem {

namespace {

constexpr double kPi = std::numbers::pi;

double cross(Point2 o, Point2 a, Point2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

double dist(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double signed_area(const std::vector<Point2>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& a = p[i];
    const auto& b = p[(i + 1) % p.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

bool inside_polygon(const std::vector<Point2>& poly, Point2 q) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y > q.y) != (b.y > q.y) && q.x < (b.x - a.x) * (q.y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

double segment_distance(Point2 q, Point2 a, Point2 b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((q.x - a.x) * dx + (q.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return dist(q, {a.x + t * dx, a.y + t * dy});
}

// Closed segments [a,b] and [c,d] intersect.
bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d, double eps) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  if (((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps)))
    return true;
  auto on = [eps](Point2 p, Point2 q, Point2 r, double o) {
    return std::abs(o) <= eps && std::min(p.x, q.x) - 1e-12 <= r.x && r.x <= std::max(p.x, q.x) + 1e-12 &&
           std::min(p.y, q.y) - 1e-12 <= r.y && r.y <= std::max(p.y, q.y) + 1e-12;
  };
  return on(c, d, a, d1) || on(c, d, b, d2) || on(a, b, c, d3) || on(a, b, d, d4);
}

std::uint64_t edge_key(int i, int j) {
  const auto lo = static_cast<std::uint64_t>(std::min(i, j));
  const auto hi = static_cast<std::uint64_t>(std::max(i, j));
  return (hi << 32) | lo;
}

std::uint64_t directed_key(int i, int j) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) | static_cast<std::uint32_t>(j);
}

// Bowyer-Watson Delaunay triangulation, counter-clockwise output.
std::vector<std::array<int, 3>> delaunay(const std::vector<Point2>& pts) {
  const int n = static_cast<int>(pts.size());
  double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
  for (const auto& p : pts) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double span = std::max(xmax - xmin, ymax - ymin);
  const Point2 mid{0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
  std::vector<Point2> v = pts;
  v.push_back({mid.x - 40 * span, mid.y - 30 * span});
  v.push_back({mid.x + 40 * span, mid.y - 30 * span});
  v.push_back({mid.x, mid.y + 40 * span});

  struct Tri {
    int a, b, c;
    bool alive;
  };
  std::vector<Tri> tris{{n, n + 1, n + 2, true}};

  auto in_circle = [&](const Tri& t, Point2 p) {
    const double ax = v[t.a].x - p.x, ay = v[t.a].y - p.y;
    const double bx = v[t.b].x - p.x, by = v[t.b].y - p.y;
    const double cx = v[t.c].x - p.x, cy = v[t.c].y - p.y;
    const double det = (ax * ax + ay * ay) * (bx * cy - cx * by) - (bx * bx + by * by) * (ax * cy - cx * ay) +
                       (cx * cx + cy * cy) * (ax * by - bx * ay);
    return det > 0.0;
  };

  std::vector<int> bad;
  std::vector<std::array<int, 2>> edges;
  for (int i = 0; i < n; ++i) {
    const Point2 p = v[i];
    bad.clear();
    for (int t = 0; t < static_cast<int>(tris.size()); ++t)
      if (tris[t].alive && in_circle(tris[t], p)) bad.push_back(t);
    // Round-off in the circle test can make the cavity non-star-shaped; drop
    // triangles owning an edge that p does not see strictly.
    std::vector<std::array<int, 3>> owned;  // edge u, v, owner
    for (;;) {
      owned.clear();
      for (int t : bad) {
        const auto& tr = tris[t];
        for (auto e : {std::array<int, 2>{tr.a, tr.b}, std::array<int, 2>{tr.b, tr.c}, std::array<int, 2>{tr.c, tr.a}}) {
          auto it = std::find_if(owned.begin(), owned.end(), [&](const auto& o) { return o[0] == e[1] && o[1] == e[0]; });
          if (it != owned.end())
            owned.erase(it);
          else
            owned.push_back({e[0], e[1], t});
        }
      }
      auto blind = std::find_if(owned.begin(), owned.end(),
                                [&](const auto& o) { return cross(v[o[0]], v[o[1]], p) <= 1e-13 * span * span; });
      if (blind == owned.end() || bad.size() == 1) break;
      std::erase(bad, (*blind)[2]);
    }
    for (int t : bad) tris[t].alive = false;
    edges.clear();
    for (const auto& o : owned) edges.push_back({o[0], o[1]});
    for (const auto& e : edges) tris.push_back({e[0], e[1], i, true});
    if (tris.size() > 4 * static_cast<std::size_t>(n) + 64) {
      std::erase_if(tris, [](const Tri& t) { return !t.alive; });
    }
  }
  std::vector<std::array<int, 3>> out;
  for (const auto& t : tris) {
    if (!t.alive || t.a >= n || t.b >= n || t.c >= n) continue;
    out.push_back({t.a, t.b, t.c});
  }
  return out;
}

}  // namespace

// --- polygons ----------------------------------------------------------------

std::vector<Point2> checked_polygon(const std::vector<Point2>& polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) throw std::invalid_argument("polygon needs at least three vertices");
  for (const auto& p : polygon)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw std::invalid_argument("polygon has non-finite coordinates");
  double xmin = polygon[0].x, xmax = xmin, ymin = polygon[0].y, ymax = ymin;
  for (const auto& p : polygon) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double diam = std::hypot(xmax - xmin, ymax - ymin);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (dist(polygon[i], polygon[j]) <= 1e-12 * diam) throw std::invalid_argument("polygon has repeated points");
  const double area = signed_area(polygon);
  if (std::abs(area) <= 1e-12 * diam * diam) throw std::invalid_argument("polygon has zero area");

  const double eps = 1e-14 * diam * diam;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = polygon[i];
    const Point2 b = polygon[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point2 c = polygon[j];
      const Point2 d = polygon[(j + 1) % n];
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        // Neighbouring edges share one vertex; they may not fold back on each other.
        const Point2 shared = j == i + 1 ? b : a;
        const Point2 p = j == i + 1 ? a : b;
        const Point2 q = j == i + 1 ? d : c;
        const double o = cross(shared, p, q);
        const double dot = (p.x - shared.x) * (q.x - shared.x) + (p.y - shared.y) * (q.y - shared.y);
        if (std::abs(o) <= eps && dot > 0.0) throw std::invalid_argument("polygon folds back on itself");
        continue;
      }
      if (segments_intersect(a, b, c, d, eps)) throw std::invalid_argument("polygon is self-intersecting");
    }
  }
  std::vector<Point2> out = polygon;
  if (area < 0.0) std::reverse(out.begin(), out.end());
  return out;
}

std::vector<Point2> regular_polygon(int n, double a) {
  if (n < 3 || !(a > 0.0)) throw std::invalid_argument("regular polygon needs n >= 3 and a > 0");
  std::vector<Point2> p(n);
  for (int i = 0; i < n; ++i) p[i] = {a * std::cos(2 * kPi * i / n), a * std::sin(2 * kPi * i / n)};
  return p;
}

// --- mesh --------------------------------------------------------------------

double Mesh::max_edge() const {
  double h = 0.0;
  for (const auto& t : triangles)
    for (int e = 0; e < 3; ++e) h = std::max(h, dist(vertices[t[e]], vertices[t[(e + 1) % 3]]));
  return h;
}

double Mesh::area() const {
  double s = 0.0;
  for (const auto& t : triangles) s += 0.5 * cross(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
  return s;
}

void Mesh::validate() const {
  const int n = static_cast<int>(vertices.size());
  if (n < 3 || triangles.empty()) throw std::invalid_argument("mesh is empty");
  if (boundary_flag.size() != vertices.size()) throw std::invalid_argument("boundary_flag size mismatch");
  if (edge_normals.size() != boundary_edges.size()) throw std::invalid_argument("edge_normals size mismatch");
  double scale = 0.0;
  for (const auto& t : triangles) {
    for (int i : t)
      if (i < 0 || i >= n) throw std::invalid_argument("triangle index out of range");
  }
  scale = max_edge();
  std::map<std::uint64_t, int> count;
  std::map<std::uint64_t, int> directed;
  for (const auto& t : triangles) {
    const double a = 0.5 * cross(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
    if (!(a > 1e-14 * scale * scale)) throw std::invalid_argument("triangle is not positively oriented");
    for (int e = 0; e < 3; ++e) {
      const int i = t[e];
      const int j = t[(e + 1) % 3];
      ++count[edge_key(i, j)];
      ++directed[directed_key(i, j)];
    }
  }
  std::map<std::uint64_t, int> bcount;
  std::vector<int> in(n, 0);
  std::vector<int> out(n, 0);
  std::vector<bool> flag(n, false);
  for (std::size_t k = 0; k < boundary_edges.size(); ++k) {
    const int i = boundary_edges[k][0];
    const int j = boundary_edges[k][1];
    if (i < 0 || i >= n || j < 0 || j >= n || i == j) throw std::invalid_argument("boundary edge index out of range");
    auto it = count.find(edge_key(i, j));
    if (it == count.end() || it->second != 1) throw std::invalid_argument("boundary edge must belong to exactly one triangle");
    if (!directed.contains(directed_key(i, j))) throw std::invalid_argument("boundary edge orientation does not match its triangle");
    ++bcount[edge_key(i, j)];
    ++out[i];
    ++in[j];
    flag[i] = flag[j] = true;
    const Point2 nv = edge_normals[k];
    const double dx = vertices[j].x - vertices[i].x;
    const double dy = vertices[j].y - vertices[i].y;
    if (std::abs(std::hypot(nv.x, nv.y) - 1.0) > 1e-12 || std::abs(nv.x * dx + nv.y * dy) > 1e-12 * std::hypot(dx, dy) ||
        nv.x * dy - nv.y * dx <= 0.0)
      throw std::invalid_argument("boundary normal is not the outward unit normal");
  }
  for (const auto& [key, c] : count) {
    if (c > 2) throw std::invalid_argument("edge shared by more than two triangles");
    if (c == 1 && !bcount.contains(key)) throw std::invalid_argument("unlisted boundary edge");
  }
  for (int v = 0; v < n; ++v) {
    if (flag[v] && (in[v] != 1 || out[v] != 1)) throw std::invalid_argument("boundary edges do not form closed loops");
    if (flag[v] != boundary_flag[v]) throw std::invalid_argument("boundary_flag inconsistent with boundary edges");
  }
}

Mesh make_mesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> triangles,
               std::vector<std::array<int, 2>> boundary_edges) {
  const int n = static_cast<int>(vertices.size());
  std::map<std::uint64_t, int> directed;
  for (auto& t : triangles) {
    for (int i : t)
      if (i < 0 || i >= n) throw std::invalid_argument("triangle index out of range");
    if (cross(vertices[t[0]], vertices[t[1]], vertices[t[2]]) < 0.0) std::swap(t[1], t[2]);
    for (int e = 0; e < 3; ++e) directed[directed_key(t[e], t[(e + 1) % 3])] = 1;
  }
  Mesh m;
  m.boundary_flag.assign(vertices.size(), false);
  for (auto e : boundary_edges) {
    if (e[0] < 0 || e[0] >= n || e[1] < 0 || e[1] >= n) throw std::invalid_argument("boundary edge index out of range");
    if (!directed.contains(directed_key(e[0], e[1]))) std::swap(e[0], e[1]);
    const Point2 a = vertices[e[0]];
    const Point2 b = vertices[e[1]];
    const double len = dist(a, b);
    m.boundary_edges.push_back(e);
    m.edge_normals.push_back(len > 0.0 ? Point2{(b.y - a.y) / len, -(b.x - a.x) / len} : Point2{0.0, 0.0});
    m.boundary_flag[e[0]] = m.boundary_flag[e[1]] = true;
  }
  m.vertices = std::move(vertices);
  m.triangles = std::move(triangles);
  m.validate();
  return m;
}

Mesh refine_uniform(const Mesh& mesh) {
  std::vector<Point2> v = mesh.vertices;
  std::map<std::uint64_t, int> mid;
  auto midpoint = [&](int i, int j) {
    const auto key = edge_key(i, j);
    auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    const int id = static_cast<int>(v.size());
    v.push_back({0.5 * (v[i].x + v[j].x), 0.5 * (v[i].y + v[j].y)});
    mid.emplace(key, id);
    return id;
  };
  std::vector<std::array<int, 3>> tris;
  tris.reserve(4 * mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    const int ab = midpoint(t[0], t[1]);
    const int bc = midpoint(t[1], t[2]);
    const int ca = midpoint(t[2], t[0]);
    tris.push_back({t[0], ab, ca});
    tris.push_back({ab, t[1], bc});
    tris.push_back({ca, bc, t[2]});
    tris.push_back({ab, bc, ca});
  }
  Mesh out;
  out.vertices = std::move(v);
  out.triangles = std::move(tris);
  out.boundary_flag.assign(out.vertices.size(), false);
  for (std::size_t k = 0; k < mesh.boundary_edges.size(); ++k) {
    const auto e = mesh.boundary_edges[k];
    const int c = mid.at(edge_key(e[0], e[1]));
    out.boundary_edges.push_back({e[0], c});
    out.boundary_edges.push_back({c, e[1]});
    out.edge_normals.push_back(mesh.edge_normals[k]);
    out.edge_normals.push_back(mesh.edge_normals[k]);
    out.boundary_flag[e[0]] = out.boundary_flag[e[1]] = out.boundary_flag[c] = true;
  }
  return out;
}

Mesh mesh_polygon(const std::vector<Point2>& polygon, double target_h, const MeshOptions& options) {
  if (!(target_h > 0.0)) throw std::invalid_argument("target_h must be positive");
  const auto poly = checked_polygon(polygon);
  double xmin = poly[0].x, xmax = xmin, ymin = poly[0].y, ymax = ymin;
  for (const auto& p : poly) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double diam = std::hypot(xmax - xmin, ymax - ymin);
  const double H = std::max(target_h, diam / 16.0);

  // Boundary loop subdivided to spacing <= H.
  std::vector<Point2> loop;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % poly.size()];
    const int pieces = std::max(1, static_cast<int>(std::ceil(dist(a, b) / H - 1e-9)));
    for (int k = 0; k < pieces; ++k)
      loop.push_back({a.x + (b.x - a.x) * k / pieces, a.y + (b.y - a.y) * k / pieces});
  }

  // Hexagonal lattice kept clear of the boundary so it cannot encroach on a segment.
  std::vector<Point2> lattice;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> jit(-options.jitter * H, options.jitter * H);
  const double dy = H * std::sqrt(3.0) / 2.0;
  for (int j = 0; ymin + (j + 0.5) * dy < ymax; ++j) {
    const double y = ymin + (j + 0.5) * dy;
    for (int i = 0; xmin + (i + 0.25 + 0.5 * (j % 2)) * H < xmax; ++i) {
      Point2 q{xmin + (i + 0.25 + 0.5 * (j % 2)) * H, y};
      if (options.jitter > 0.0) {
        q.x += jit(rng);
        q.y += jit(rng);
      }
      if (!inside_polygon(poly, q)) continue;
      double dmin = INFINITY;
      for (std::size_t k = 0; k < poly.size(); ++k) dmin = std::min(dmin, segment_distance(q, poly[k], poly[(k + 1) % poly.size()]));
      if (dmin >= 0.55 * H) lattice.push_back(q);
    }
  }

  // Conforming Delaunay: split boundary segments missing from the triangulation.
  std::vector<std::array<int, 3>> tris;
  std::vector<Point2> pts;
  for (int pass = 0;; ++pass) {
    if (pass > 40) throw std::runtime_error("mesh_polygon could not recover the boundary");
    pts = loop;
    pts.insert(pts.end(), lattice.begin(), lattice.end());
    tris = delaunay(pts);
    std::map<std::uint64_t, int> present;
    for (const auto& t : tris)
      for (int e = 0; e < 3; ++e) present[edge_key(t[e], t[(e + 1) % 3])] = 1;
    std::vector<Point2> next;
    bool missing = false;
    const int nb = static_cast<int>(loop.size());
    for (int i = 0; i < nb; ++i) {
      next.push_back(loop[i]);
      const int j = (i + 1) % nb;
      if (!present.contains(edge_key(i, j))) {
        missing = true;
        next.push_back({0.5 * (loop[i].x + loop[j].x), 0.5 * (loop[i].y + loop[j].y)});
      }
    }
    if (!missing) break;
    loop = std::move(next);
  }

  std::vector<std::array<int, 3>> kept;
  for (const auto& t : tris) {
    const Point2 c{(pts[t[0]].x + pts[t[1]].x + pts[t[2]].x) / 3.0, (pts[t[0]].y + pts[t[1]].y + pts[t[2]].y) / 3.0};
    if (inside_polygon(poly, c)) kept.push_back(t);
  }
  std::vector<std::array<int, 2>> bedges;
  const int nb = static_cast<int>(loop.size());
  for (int i = 0; i < nb; ++i) bedges.push_back({i, (i + 1) % nb});
  Mesh mesh = make_mesh(std::move(pts), std::move(kept), std::move(bedges));
  for (int level = 0; mesh.max_edge() > target_h; ++level) {
    if (level >= 12) throw std::runtime_error("mesh_polygon exceeded the refinement limit");
    mesh = refine_uniform(mesh);
  }
  return mesh;
}

// --- I/O ---------------------------------------------------------------------

namespace {

bool content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

std::vector<Point2> read_polygon(std::istream& in) {
  std::vector<Point2> p;
  std::string line;
  while (content_line(in, line)) {
    std::istringstream row(line);
    Point2 q;
    std::string extra;
    if (!(row >> q.x >> q.y) || (row >> extra)) throw std::invalid_argument("bad polygon line: " + line);
    p.push_back(q);
  }
  return p;
}

void write_polygon(std::ostream& out, const std::vector<Point2>& polygon) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& p : polygon) out << p.x << ' ' << p.y << '\n';
  out.precision(old);
}

Mesh read_mesh(std::istream& in) {
  std::string line;
  if (!content_line(in, line)) throw std::invalid_argument("empty mesh file");
  std::istringstream head(line);
  std::string w1, w2, w3;
  long nv = -1, nt = -1, nb = -1;
  if (!(head >> w1 >> nv >> w2 >> nt >> w3 >> nb) || w1 != "vertices" || w2 != "triangles" || w3 != "boundary" ||
      nv < 0 || nt < 0 || nb < 0)
    throw std::invalid_argument("bad mesh header: " + line);
  std::vector<Point2> v(nv);
  std::vector<std::array<int, 3>> t(nt);
  std::vector<std::array<int, 2>> b(nb);
  for (auto& p : v) {
    if (!content_line(in, line)) throw std::invalid_argument("mesh file truncated in vertices");
    std::istringstream row(line);
    if (!(row >> p.x >> p.y)) throw std::invalid_argument("bad vertex line: " + line);
  }
  for (auto& tri : t) {
    if (!content_line(in, line)) throw std::invalid_argument("mesh file truncated in triangles");
    std::istringstream row(line);
    if (!(row >> tri[0] >> tri[1] >> tri[2])) throw std::invalid_argument("bad triangle line: " + line);
  }
  for (auto& e : b) {
    if (!content_line(in, line)) throw std::invalid_argument("mesh file truncated in boundary");
    std::istringstream row(line);
    if (!(row >> e[0] >> e[1])) throw std::invalid_argument("bad boundary line: " + line);
  }
  return make_mesh(std::move(v), std::move(t), std::move(b));
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "vertices " << mesh.vertices.size() << " triangles " << mesh.triangles.size() << " boundary "
      << mesh.boundary_edges.size() << '\n';
  for (const auto& p : mesh.vertices) out << p.x << ' ' << p.y << '\n';
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.boundary_edges) out << e[0] << ' ' << e[1] << '\n';
  out.precision(old);
}

// --- assembly ----------------------------------------------------------------

FemSystem assemble(const Mesh& mesh) {
  FemSystem s;
  s.mesh = mesh;
  const int n = static_cast<int>(mesh.vertices.size());
  s.dof.assign(n, -1);
  s.bdof.assign(n, -1);
  for (int v = 0; v < n; ++v) {
    if (mesh.boundary_flag[v]) {
      s.bdof[v] = static_cast<int>(s.boundary.size());
      s.boundary.push_back(v);
    } else {
      s.dof[v] = static_cast<int>(s.interior.size());
      s.interior.push_back(v);
    }
  }
  std::vector<Eigen::Triplet<double>> kt, mt, kit, mit;
  for (const auto& t : mesh.triangles) {
    const Point2 p[3] = {mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]};
    const double area = 0.5 * cross(p[0], p[1], p[2]);
    // Gradients of barycentric coordinates.
    double gx[3], gy[3];
    for (int i = 0; i < 3; ++i) {
      const Point2 a = p[(i + 1) % 3];
      const Point2 b = p[(i + 2) % 3];
      gx[i] = (a.y - b.y) / (2 * area);
      gy[i] = (b.x - a.x) / (2 * area);
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double k = area * (gx[i] * gx[j] + gy[i] * gy[j]);
        const double m = area / 12.0 * (i == j ? 2.0 : 1.0);
        kt.emplace_back(t[i], t[j], k);
        mt.emplace_back(t[i], t[j], m);
        const int di = s.dof[t[i]];
        const int dj = s.dof[t[j]];
        if (di >= 0 && dj >= 0) {
          kit.emplace_back(di, dj, k);
          mit.emplace_back(di, dj, m);
        }
      }
    }
  }
  const int ni = static_cast<int>(s.interior.size());
  s.K.resize(n, n);
  s.M.resize(n, n);
  s.K.setFromTriplets(kt.begin(), kt.end());
  s.M.setFromTriplets(mt.begin(), mt.end());
  s.K_ii.resize(ni, ni);
  s.M_ii.resize(ni, ni);
  s.K_ii.setFromTriplets(kit.begin(), kit.end());
  s.M_ii.setFromTriplets(mit.begin(), mit.end());
  return s;
}

// --- eigensolver -------------------------------------------------------------

namespace {

using Solver = Eigen::SimplicialLDLT<SparseMatrix>;

bool factor(Solver& solver, const FemSystem& s, double shift) {
  SparseMatrix A = s.K_ii - shift * s.M_ii;
  solver.compute(A);
  if (solver.info() != Eigen::Success) return false;
  const auto d = solver.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  return d.cwiseAbs().minCoeff() > 1e-13 * dmax;
}

int negative_pivots(const Solver& solver) {
  const auto d = solver.vectorD();
  int c = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) c += d[i] < 0.0;
  return c;
}

double residual(const FemSystem& s, const Eigen::VectorXd& u, double lambda) {
  return (s.K_ii * u - lambda * (s.M_ii * u)).norm() / u.norm();
}

}  // namespace

int count_below(const FemSystem& system, double tau) {
  Solver solver;
  double t = tau;
  for (int attempt = 0; attempt < 6; ++attempt) {
    if (factor(solver, system, t)) return negative_pivots(solver);
    t = tau * (1.0 + 1e-9 * (attempt + 1)) + 1e-12;
  }
  throw specfun::ConvergenceError("inertia count: factorization failed near " + std::to_string(tau));
}

std::vector<FemEigenpair> solve_eigs(const FemSystem& s, int count, double shift, const SolveOptions& options) {
  const int n = static_cast<int>(s.interior.size());
  if (count < 1) throw std::invalid_argument("count must be at least 1");
  if (count > n) throw std::invalid_argument("count exceeds the number of interior degrees of freedom");

  Solver solver;
  double sigma = shift;
  bool ok = factor(solver, s, sigma);
  for (int attempt = 1; !ok && attempt <= 5; ++attempt) {
    sigma = shift + 1e-6 * attempt * (1.0 + std::abs(shift));
    ok = factor(solver, s, sigma);
  }
  if (!ok) throw specfun::ConvergenceError("shifted factorization failed");
  const int below_shift = negative_pivots(solver);

  const SparseMatrix& M = s.M_ii;
  // Column blocks with their M-images, so reorthogonalisation is two
  // matrix-vector products per pass.
  struct Basis {
    Eigen::MatrixXd V, MV;
    int cols = 0;
    void reserve(Eigen::Index rows, int capacity) {
      if (V.cols() >= capacity) return;
      V.conservativeResize(rows, capacity);
      MV.conservativeResize(rows, capacity);
    }
    void push(const Eigen::VectorXd& v, const Eigen::VectorXd& mv) {
      V.col(cols) = v;
      MV.col(cols) = mv;
      ++cols;
    }
    void project_out(Eigen::VectorXd& w) const {
      if (cols == 0) return;
      // Second pass only when the first cancelled most of w.
      for (int pass = 0; pass < 2; ++pass) {
        const double before = w.norm();
        const Eigen::VectorXd c = MV.leftCols(cols).transpose() * w;
        w.noalias() -= V.leftCols(cols) * c;
        if (w.norm() > 0.7 * before) break;
      }
    }
  };
  Basis locked;
  std::vector<double> locked_lambda;
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;

  for (int restart = 0; restart < options.max_restarts; ++restart) {
    // Completeness check on what is locked so far.
    if (locked.cols >= count) {
      std::vector<double> lam = locked_lambda;
      std::sort(lam.begin(), lam.end());
      const double top = lam[count - 1];
      const double next = static_cast<int>(lam.size()) > count ? lam[count] : INFINITY;
      const double tau = std::min(top + 1e-9 * std::abs(top) + 1e-12, 0.5 * (top + next));
      if (count_below(s, tau) - below_shift == count) break;
    }
    const int have = locked.cols;
    const int need = std::max(count - have, 1) + 2;
    const int mmax = std::min(n - have, std::max(2 * need + 30, 60));
    if (mmax <= 0) break;
    locked.reserve(n, have + mmax);

    Basis Q;
    Q.reserve(n, mmax);
    std::vector<double> alpha;
    std::vector<double> beta;
    Eigen::VectorXd q(n);
    for (int i = 0; i < n; ++i) q[i] = gauss(rng);
    locked.project_out(q);
    q /= std::sqrt(q.dot(M * q));
    double b_last = 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz;
    int m = 0;
    for (int j = 0; j < mmax; ++j) {
      const Eigen::VectorXd mq = M * q;
      Q.push(q, mq);
      Eigen::VectorXd w = solver.solve(mq);
      const double a = w.dot(mq);
      alpha.push_back(a);
      locked.project_out(w);
      Q.project_out(w);
      const double b = std::sqrt(std::max(w.dot(M * w), 0.0));
      m = j + 1;
      const bool last = m == mmax || b < 1e-14 * std::abs(a);
      if (m % 10 == 0 || last) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
          T(i, i) = alpha[i];
          if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        ritz.compute(T);
        int converged = 0;
        for (int k = m - 1; k >= 0 && converged < need; --k) {
          const double theta = ritz.eigenvalues()[k];
          if (theta <= 0.0) break;
          if (b * std::abs(ritz.eigenvectors()(m - 1, k)) <= 1e-11 * theta)
            ++converged;
          else
            break;
        }
        if (converged >= std::min(need, m) || last) {
          b_last = b;
          break;
        }
      }
      beta.push_back(b);
      q = w / b;
    }

    // Lock every converged positive Ritz pair.
    for (int k = m - 1; k >= 0; --k) {
      const double theta = ritz.eigenvalues()[k];
      if (theta <= 0.0) break;
      if (b_last * std::abs(ritz.eigenvectors()(m - 1, k)) > 1e-9 * theta) continue;
      Eigen::VectorXd u = Q.V.leftCols(m) * ritz.eigenvectors().col(k);
      locked.project_out(u);
      const double nrm = std::sqrt(u.dot(M * u));
      if (!(nrm > 0.5)) continue;  // mostly inside the locked space already
      u /= nrm;
      double lam = u.dot(s.K_ii * u);
      for (int it = 0; it < 3 && residual(s, u, lam) > options.tolerance; ++it) {
        u = solver.solve(M * u);
        locked.project_out(u);
        u /= std::sqrt(u.dot(M * u));
        lam = u.dot(s.K_ii * u);
      }
      if (residual(s, u, lam) > options.tolerance) continue;
      locked.reserve(n, locked.cols + 1);
      locked.push(u, M * u);
      locked_lambda.push_back(lam);
    }
    if (restart + 1 == options.max_restarts) throw specfun::ConvergenceError("eigensolver did not converge");
  }

  std::vector<int> order(locked.cols);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return locked_lambda[a] < locked_lambda[b]; });
  if (static_cast<int>(order.size()) < count) throw specfun::ConvergenceError("eigensolver found too few eigenpairs");

  const double h = s.mesh.max_edge();
  std::vector<FemEigenpair> out;
  for (int i = 0; i < count; ++i) {
    FemEigenpair p;
    p.lambda_h = locked_lambda[order[i]];
    p.u_h = locked.V.col(order[i]);
    // Deterministic sign: positive mean, else positive largest entry.
    const double mean = locked.MV.col(order[i]).sum();
    Eigen::Index arg = 0;
    p.u_h.cwiseAbs().maxCoeff(&arg);
    const double sgn = std::abs(mean) > 1e-8 ? mean : p.u_h[arg];
    if (sgn < 0.0) p.u_h = -p.u_h;
    p.h = h;
    p.residual = residual(s, p.u_h, p.lambda_h);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<FemEigenpair> solve_eigs(const Mesh& mesh, int count, double shift, const SolveOptions& options) {
  return solve_eigs(assemble(mesh), count, shift, options);
}

// --- flux --------------------------------------------------------------------

BoundaryTrace recover_flux(const FemSystem& s, FemEigenpair& pair) {
  const int n = static_cast<int>(s.mesh.vertices.size());
  const int nb = static_cast<int>(s.boundary.size());
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < s.interior.size(); ++i) u[s.interior[i]] = pair.u_h[static_cast<Eigen::Index>(i)];
  const Eigen::VectorXd r = s.K * u - pair.lambda_h * (s.M * u);
  Eigen::VectorXd rb(nb);
  for (int b = 0; b < nb; ++b) rb[b] = r[s.boundary[b]];

  // Row-summed (lumped) boundary mass. The consistent mass overshoots at
  // polygon corners, where the exact flux vanishes, and flips the sign of psi
  // there; the lumped system keeps psi <= 0 for a positive ground state.
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(nb);
  for (const auto& e : s.mesh.boundary_edges) {
    const double len = dist(s.mesh.vertices[e[0]], s.mesh.vertices[e[1]]);
    mass[s.bdof[e[0]]] += 0.5 * len;
    mass[s.bdof[e[1]]] += 0.5 * len;
  }
  if (!(mass.minCoeff() > 0.0)) throw std::runtime_error("singular boundary mass matrix");
  pair.psi_h = rb.cwiseQuotient(mass);

  BoundaryTrace t;
  for (std::size_t k = 0; k < s.mesh.boundary_edges.size(); ++k) {
    const auto e = s.mesh.boundary_edges[k];
    const double len = dist(s.mesh.vertices[e[0]], s.mesh.vertices[e[1]]);
    for (int v : {e[0], e[1]}) {
      t.nodes.push_back(s.mesh.vertices[v]);
      t.normals.push_back(s.mesh.edge_normals[k]);
      t.weights.push_back(0.5 * len);
      t.values.push_back(pair.psi_h[s.bdof[v]]);
    }
  }
  return t;
}

// --- audit -------------------------------------------------------------------

AuditResult bounds_audit(const Mesh& mesh, double lambda_max, const DomainSpec& domain, double max_resolution,
                         double cluster_gap) {
  if (!(lambda_max > 0.0)) throw std::invalid_argument("lambda_max must be positive");
  AuditResult out;
  out.h = mesh.max_edge();
  out.resolution = lambda_max * out.h * out.h;
  if (out.resolution > max_resolution)
    throw ResolutionError("resolution guard: lambda_max h^2 = " + std::to_string(out.resolution) + " exceeds " +
                          std::to_string(max_resolution));
  const auto system = assemble(mesh);
  const int count = count_below(system, lambda_max);
  if (count < 1) throw std::invalid_argument("no eigenvalues below lambda_max");
  auto pairs = solve_eigs(system, count);
  out.eigenpairs = count;

  std::vector<double> psi(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) psi[i] = verify::quad_trace_norm(recover_flux(system, pairs[i]));

  std::size_t start = 0;
  for (std::size_t i = 1; i <= pairs.size(); ++i) {
    const bool split = i == pairs.size() || pairs[i].lambda_h - pairs[i - 1].lambda_h > cluster_gap * pairs[i].lambda_h;
    if (!split) continue;
    double lam = 0.0;
    double p = 0.0;
    for (std::size_t j = start; j < i; ++j) {
      lam += pairs[j].lambda_h;
      p += psi[j];
    }
    const double size = static_cast<double>(i - start);
    out.records.push_back(make_record(domain, {static_cast<int>(start) + 1, static_cast<int>(i - start)}, lam / size,
                                      p / size, Provenance::Fem));
    start = i;
  }
  out.summary = verify::ratio_summary(out.records, 0.0, lambda_max);
  return out;
}

}  // namespace tracelab::fem
