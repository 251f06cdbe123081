#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include "tracelab/band1d.hpp"
#include "tracelab/closedform.hpp"
#include "tracelab/config.hpp"
#include "tracelab/fem.hpp"
#include "tracelab/profile.hpp"
#include "tracelab/records.hpp"
#include "tracelab/specfun.hpp"
#include "tracelab/verify.hpp"

namespace tracelab::cli {

namespace {

using records::CheckReport;
using records::CheckStatus;
using records::RunRecord;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

closedform::IndexRange parse_range(const std::string& text, const char* name) {
  static const std::regex single(R"(\s*(-?\d+)\s*)");
  static const std::regex span(R"(\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*)");
  std::smatch m;
  if (std::regex_match(text, m, span)) return {std::stoi(m[1]), std::stoi(m[2])};
  if (std::regex_match(text, m, single)) return {std::stoi(m[1]), std::stoi(m[1])};
  throw UsageError(std::string("--") + name + " expects N or N..M, got '" + text + "'");
}

std::vector<int> range_values(closedform::IndexRange r, const char* name) {
  if (r.empty()) throw UsageError(std::string("empty index range for --") + name);
  std::vector<int> v;
  for (int i = r.first; i <= r.last; ++i) v.push_back(i);
  return v;
}

Point2 parse_point(const std::string& text) {
  std::stringstream ss(text);
  Point2 p;
  char comma = 0;
  std::string rest;
  if (!(ss >> p.x >> comma >> p.y) || comma != ',' || (ss >> rest)) throw UsageError("--point expects x,y");
  return p;
}

// Shared state for one invocation.
struct Context {
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
  bool timestamp = true;
  std::uint64_t seed = 1;
  Config config;
  bool failed = false;

  void emit(RunRecord r) {
    if (timestamp) r.timestamp = records::utc_timestamp();
    *out << records::to_line(r) << '\n';
  }

  void report(const std::string& command, const DomainSpec& domain, CheckReport rep) {
    if (rep.status == CheckStatus::Fail) failed = true;
    std::map<std::string, double> tol{{rep.check, rep.tolerance}};
    auto r = records::make_run_record(command, std::move(rep), std::move(tol));
    r.domain = domain;
    emit(std::move(r));
  }
};

std::string format(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

CheckStatus status(bool ok) { return ok ? CheckStatus::Pass : CheckStatus::Fail; }

std::vector<RunRecord> read_inputs(const std::vector<std::string>& paths) {
  std::vector<RunRecord> all;
  for (const auto& p : paths) {
    std::ifstream in(p);
    if (!in) throw UsageError("cannot open " + p);
    auto recs = records::read_records(in);
    all.insert(all.end(), recs.begin(), recs.end());
  }
  return all;
}

std::vector<Point2> read_polygon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open polygon file " + path);
  return fem::read_polygon(in);
}

// --- modes -------------------------------------------------------------------

struct ModesArgs {
  std::string domain;
  double radius = 1.0;
  std::optional<double> a, b;
  std::optional<std::string> n, k, m, l;
};

int cmd_modes(Context& ctx, const ModesArgs& args) {
  auto need = [&](const std::optional<std::string>& v, const char* name) {
    if (!v) throw UsageError(std::string("--domain ") + args.domain + " requires --" + name);
    return parse_range(*v, name);
  };
  auto forbid = [&](bool given, const char* name) {
    if (given) throw UsageError(std::string("--") + name + " does not apply to --domain " + args.domain);
  };
  std::vector<EigenmodeRecord> recs;
  if (args.domain == "disc") {
    forbid(args.m.has_value(), "m");
    forbid(args.l.has_value(), "l");
    forbid(args.a || args.b, "a/--b");
    recs = closedform::disc_modes(args.radius, need(args.n, "n"), need(args.k, "k"));
  } else if (args.domain == "rectangle" || args.domain == "cylinder") {
    forbid(args.k.has_value(), "k");
    forbid(args.l.has_value(), "l");
    const double a = args.a.value_or(1.0);
    const double b = args.b.value_or(args.domain == "rectangle" ? 1.0 : 2 * std::numbers::pi);
    recs = args.domain == "rectangle" ? closedform::rectangle_modes(a, b, need(args.m, "m"), need(args.n, "n"))
                                      : closedform::cylinder_modes(a, b, need(args.m, "m"), need(args.n, "n"));
  } else if (args.domain == "hemisphere") {
    forbid(args.n || args.k || args.m, "n/--k/--m");
    recs = closedform::hemisphere_modes(need(args.l, "l"));
  } else if (args.domain == "neumann-disc") {
    forbid(args.m || args.l, "m/--l");
    recs = closedform::neumann_disc_modes(need(args.n, "n"), need(args.k, "k"));
  } else {
    throw UsageError("unknown domain " + args.domain);
  }
  for (auto& r : recs) ctx.emit(records::make_run_record("modes", std::move(r)));
  return kPass;
}

// --- verify ------------------------------------------------------------------

struct VerifyArgs {
  std::vector<std::string> inputs;
  std::string checks = "rellich";
  std::optional<double> lambda_max;
  std::optional<std::string> point;
  std::optional<double> delta;
  int points = 512;
};

int trace_nodes(const EigenmodeRecord& r) {
  int top = 0;
  for (int i : r.indices) top = std::max(top, std::abs(i));
  return 8 * top + 256;
}

std::string group_key(const DomainSpec& d) { return records::domain_to_json(d); }

void check_rellich(Context& ctx, const std::vector<EigenmodeRecord>& modes) {
  const double tol = ctx.config.tol.rellich_closed_form;
  for (const auto& r : modes) {
    CheckReport rep{"rellich", r.indices, 0.0, tol, CheckStatus::Skip, ""};
    if (!is_euclidean(r.domain)) {
      rep.detail = "not a Euclidean domain";
    } else if (r.provenance != Provenance::ClosedForm) {
      rep.detail = "no exact trace for provenance " + std::string(to_string(r.provenance));
    } else {
      const auto res = verify::rellich_check(r, closedform::trace_for(r, trace_nodes(r)));
      rep.value = res.residual;
      rep.status = status(res.residual <= tol);
      rep.detail = "boundary integral " + format(res.boundary_integral);
    }
    ctx.report("verify", r.domain, std::move(rep));
  }
}

// The records of a disc set up to the first closed-form mode the set is
// missing. Bin maxima over a partial spectrum measure the sampling, not the
// modes.
std::vector<EigenmodeRecord> complete_prefix(const std::vector<EigenmodeRecord>& recs) {
  const double a = std::get<Disc>(recs.front().domain).radius;
  std::set<std::vector<int>> have;
  double top = 0.0;
  for (const auto& r : recs) {
    have.insert(r.indices);
    top = std::max(top, r.lambda);
  }
  const double s = std::sqrt(top) * a;
  auto catalogue = closedform::disc_modes(a, {0, static_cast<int>(s) + 1},
                                          {1, static_cast<int>(s / std::numbers::pi) + 2});
  closedform::sort_records(catalogue);
  double limit = INFINITY;
  for (const auto& c : catalogue) {
    if (c.lambda > top) break;
    if (!have.count(c.indices)) {
      limit = c.lambda;
      break;
    }
  }
  std::vector<EigenmodeRecord> out;
  for (const auto& r : recs)
    if (r.lambda < limit) out.push_back(r);
  return out;
}

void check_sobolev(Context& ctx, const std::vector<EigenmodeRecord>& modes) {
  std::map<std::string, std::vector<EigenmodeRecord>> groups;
  for (const auto& r : modes) {
    CheckReport rep{"sobolev", r.indices, 0.0, 0.0, CheckStatus::Skip, ""};
    if (!std::holds_alternative<Disc>(r.domain) || r.provenance != Provenance::ClosedForm) {
      rep.detail = "Sobolev scaling is audited on Dirichlet disc modes only";
    } else {
      double worst = 0.0;
      std::string detail;
      for (int k = 0; k <= 2; ++k) {
        const double v = verify::scaled_sobolev_norm(r, k);
        worst = std::max(worst, v);
        detail += (k ? " " : "") + std::string("k") + std::to_string(k) + "=" + format(v);
      }
      rep.value = worst;
      rep.status = status(std::isfinite(worst));
      rep.detail = detail;
      groups[group_key(r.domain)].push_back(r);
    }
    ctx.report("verify", r.domain, std::move(rep));
  }
  for (const auto& [key, all] : groups) {
    const double tol = ctx.config.tol.sobolev_growth;
    const auto recs = complete_prefix(all);
    double lo = INFINITY;
    double hi = 0.0;
    for (const auto& r : recs) {
      lo = std::min(lo, r.lambda);
      hi = std::max(hi, r.lambda);
    }
    if (recs.empty() || hi < 10.0 * lo) {
      ctx.report("verify", all.front().domain,
                 {"sobolev_trend", {}, 0.0, tol, CheckStatus::Skip,
                  "input does not hold every mode over a full decade of lambda"});
      continue;
    }
    double growth = 0.0;
    std::string detail;
    for (int k = 0; k <= 2; ++k) {
      const auto t = verify::sobolev_trend(recs, k);
      growth = std::max(growth, t.growth);
      detail += (k ? " " : "") + std::string("k") + std::to_string(k) + "=" + format(t.growth);
    }
    ctx.report("verify", recs.front().domain,
               {"sobolev_trend", {}, growth, tol, status(growth < tol), "top-decade max/median " + detail});
  }
}

Point2 default_point(const DomainSpec& d) {
  if (const auto* disc = std::get_if<Disc>(&d)) return {disc->radius, 0.0};
  if (const auto* rect = std::get_if<Rectangle>(&d)) return {0.5 * rect->a, 0.0};
  return {};
}

void check_ozawa(Context& ctx, const VerifyArgs& args, const std::vector<EigenmodeRecord>& modes) {
  std::map<std::string, DomainSpec> domains;
  for (const auto& r : modes) domains.emplace(group_key(r.domain), r.domain);
  const double lambda_max = args.lambda_max.value_or(ctx.config.tol.ozawa_lambda_max);
  const double tol = ctx.config.tol.ozawa_band;
  for (const auto& [key, d] : domains) {
    CheckReport rep{"ozawa", {}, 0.0, tol, CheckStatus::Skip, ""};
    if (!std::holds_alternative<Disc>(d) && !std::holds_alternative<Rectangle>(d)) {
      rep.detail = "pointwise sums need a disc or rectangle";
    } else {
      const Point2 y = args.point ? parse_point(*args.point) : default_point(d);
      const auto res = verify::ozawa_sum(d, lambda_max, y);
      const double weyl = std::abs(res.mode_count / res.weyl_count - 1.0);
      rep.value = res.empirical / res.leading_term;
      rep.status = status(std::abs(rep.value - 1.0) <= tol && weyl <= ctx.config.tol.weyl_guard);
      rep.detail = "Lambda=" + format(lambda_max) + " y=(" + format(y.x) + "," + format(y.y) +
                   ") modes=" + std::to_string(res.mode_count) + " weyl=" + format(res.weyl_count);
    }
    ctx.report("verify", d, std::move(rep));
  }
}

void check_profile(Context& ctx, const VerifyArgs& args, const std::vector<EigenmodeRecord>& modes) {
  std::map<std::string, std::vector<profile::RadialProfile>> groups;
  for (const auto& r : modes) {
    CheckReport rep{"profile", r.indices, 0.0, 0.0, CheckStatus::Skip, ""};
    const bool band = std::holds_alternative<CurvedBand>(r.domain);
    const bool supported = std::holds_alternative<Disc>(r.domain) || std::holds_alternative<Rectangle>(r.domain) ||
                           std::holds_alternative<Hemisphere>(r.domain) || band;
    if (!supported || r.provenance == Provenance::Fem) {
      rep.detail = "no collar model for this record";
    } else {
      const double delta = args.delta.value_or(0.5 * profile::max_collar_width(r.domain));
      const auto p = profile::collar_profile(r, profile::collar_grid(delta, args.points));
      const double tol = band ? ctx.config.tol.profile_energy_match_band : ctx.config.tol.profile_energy_match;
      const double mismatch = std::abs(p.E_values.front() - 0.5 * p.psi_norm_sq) / p.psi_norm_sq;
      const double mass = profile::collar_mass(p);
      rep.value = mismatch;
      rep.tolerance = tol;
      rep.status = status(mismatch <= tol && mass <= 1.0 + 1e-6);
      rep.detail = "collar_mass=" + format(mass) + " energy_audit=" + format(profile::energy_bound_audit({p}));
      groups[group_key(r.domain)].push_back(p);
    }
    ctx.report("verify", r.domain, std::move(rep));
  }
  for (const auto& [key, profiles] : groups) {
    double lo = INFINITY;
    double hi = 0.0;
    for (const auto& p : profiles) {
      lo = std::min(lo, p.lambda);
      hi = std::max(hi, p.lambda);
    }
    if (hi < 10.0 * lo) continue;
    const double tol = ctx.config.tol.profile_uniformity;
    const auto u = profile::audit_uniformity(profiles);
    const double worst = std::max({u.energy, u.l_bound, u.diff_ineq});
    ctx.report("verify", profiles.front().domain,
               {"profile_uniformity",
                {},
                worst,
                tol,
                status(worst < tol),
                "energy=" + format(u.energy) + " l_bound=" + format(u.l_bound) + " diff_ineq=" + format(u.diff_ineq) +
                    " decades=" + format(u.lambda_decades)});
  }
}

int cmd_verify(Context& ctx, const VerifyArgs& args) {
  std::vector<std::string> checks;
  std::stringstream ss(args.checks);
  for (std::string c; std::getline(ss, c, ',');) {
    if (c != "rellich" && c != "sobolev" && c != "ozawa" && c != "profile") throw UsageError("unknown check " + c);
    if (std::find(checks.begin(), checks.end(), c) == checks.end()) checks.push_back(c);
  }
  if (checks.empty()) throw UsageError("--checks is empty");
  std::vector<EigenmodeRecord> modes;
  for (const auto& r : read_inputs(args.inputs))
    if (const auto* m = std::get_if<EigenmodeRecord>(&r.payload)) modes.push_back(*m);
  if (modes.empty()) throw UsageError("no eigenmode records in the input");
  for (const auto& c : checks) {
    if (c == "rellich") check_rellich(ctx, modes);
    if (c == "sobolev") check_sobolev(ctx, modes);
    if (c == "ozawa") check_ozawa(ctx, args, modes);
    if (c == "profile") check_profile(ctx, args, modes);
  }
  return ctx.failed ? kCheckFailure : kPass;
}

// --- fem ---------------------------------------------------------------------

struct FemArgs {
  std::optional<std::string> polygon, mesh, write_mesh;
  std::optional<double> h, lambda_max;
  int count = 10;
  double shift = 0.0;
  double jitter = 0.0;
  bool audit = false;
};

// Boundary loop of a mesh with a single boundary component.
std::vector<Point2> boundary_loop(const fem::Mesh& mesh) {
  std::map<int, int> next;
  for (const auto& e : mesh.boundary_edges) next[e[0]] = e[1];
  std::vector<Point2> loop;
  int v = mesh.boundary_edges.front()[0];
  do {
    loop.push_back(mesh.vertices[v]);
    v = next.at(v);
  } while (v != mesh.boundary_edges.front()[0] && loop.size() <= next.size());
  if (loop.size() != next.size()) throw UsageError("mesh boundary must be a single loop");
  // Keep corners only.
  std::vector<Point2> corners;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = loop[(i + n - 1) % n], b = loop[i], c = loop[(i + 1) % n];
    const double ux = b.x - a.x, uy = b.y - a.y, vx = c.x - b.x, vy = c.y - b.y;
    if (std::abs(ux * vy - uy * vx) > 1e-12 * std::hypot(ux, uy) * std::hypot(vx, vy)) corners.push_back(b);
  }
  return corners;
}

std::optional<Rectangle> axis_rectangle(const std::vector<Point2>& poly) {
  if (poly.size() != 4) return std::nullopt;
  std::vector<double> xs, ys;
  for (const auto& p : poly) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  if (xs[0] != xs[1] || xs[2] != xs[3] || ys[0] != ys[1] || ys[2] != ys[3]) return std::nullopt;
  for (const auto& p : poly) {
    const int on_x = (p.x == xs[0]) + (p.x == xs[3]);
    const int on_y = (p.y == ys[0]) + (p.y == ys[3]);
    if (on_x != 1 || on_y != 1) return std::nullopt;
  }
  return Rectangle{xs[3] - xs[0], ys[3] - ys[0]};
}

// Largest relative deviation of FEM cluster ratios from the analytic ratios of
// an axis-aligned rectangle, matching degenerate analytic eigenspaces.
std::optional<double> rectangle_deviation(const Rectangle& rect, const std::vector<EigenmodeRecord>& clusters,
                                          std::string& detail) {
  int total = 0;
  for (const auto& c : clusters) total += c.indices[1];
  std::vector<EigenmodeRecord> exact;
  const int span = static_cast<int>(std::ceil(std::sqrt(4.0 * total))) + 4;
  for (int m = 1; m <= span; ++m)
    for (int n = 1; n <= span; ++n) exact.push_back(closedform::rectangle_mode(rect.a, rect.b, m, n));
  closedform::sort_records(exact);
  double worst = 0.0;
  std::size_t ci = 0;
  std::size_t ei = 0;
  int groups = 0;
  while (ci < clusters.size()) {
    std::size_t ej = ei + 1;
    while (ej < exact.size() && exact[ej].lambda - exact[ei].lambda <= 1e-9 * exact[ei].lambda) ++ej;
    const int need = static_cast<int>(ej - ei);
    double psi = 0.0, lam = 0.0;
    int got = 0;
    while (ci < clusters.size() && got < need) {
      const int size = clusters[ci].indices[1];
      psi += size * clusters[ci].psi_norm_sq;
      lam += size * clusters[ci].lambda;
      got += size;
      ++ci;
    }
    if (got != need) {
      detail = "cluster structure does not match the analytic multiplicities";
      return std::nullopt;
    }
    double epsi = 0.0, elam = 0.0;
    for (std::size_t i = ei; i < ej; ++i) {
      epsi += exact[i].psi_norm_sq;
      elam += exact[i].lambda;
    }
    worst = std::max(worst, std::abs((psi / lam) / (epsi / elam) - 1.0));
    ++groups;
    ei = ej;
  }
  detail = std::to_string(groups) + " analytic eigenspaces compared";
  return worst;
}

int cmd_fem(Context& ctx, const FemArgs& args) {
  if (args.polygon.has_value() == args.mesh.has_value()) throw UsageError("give exactly one of --polygon and --mesh");
  if (args.count < 1) throw UsageError("--count must be at least 1");
  const auto& tol = ctx.config.tol;
  fem::Mesh mesh;
  Polygon domain;
  if (args.polygon) {
    if (!args.h) throw UsageError("--polygon requires --h");
    domain.vertices = fem::checked_polygon(read_polygon_file(*args.polygon));
    domain.source = *args.polygon;
    mesh = fem::mesh_polygon(domain.vertices, *args.h, {args.jitter, ctx.seed});
  } else {
    if (args.h) throw UsageError("--h applies to --polygon input only");
    std::ifstream in(*args.mesh);
    if (!in) throw UsageError("cannot open mesh file " + *args.mesh);
    mesh = fem::read_mesh(in);
    domain.vertices = boundary_loop(mesh);
    domain.source = *args.mesh;
  }
  const std::map<std::string, double> used{{"fem_residual", tol.fem_residual},
                                           {"fem_resolution", tol.fem_resolution},
                                           {"fem_cluster_gap", tol.fem_cluster_gap}};

  fem::SolveOptions opts;
  opts.tolerance = tol.fem_residual;
  opts.seed = ctx.seed;
  auto system = fem::assemble(mesh);
  auto pairs = fem::solve_eigs(system, args.count, args.shift, opts);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto trace = fem::recover_flux(system, pairs[i]);
    if (pairs[i].residual > tol.fem_residual) ctx.failed = true;
    auto rec = make_record(domain, {static_cast<int>(i) + 1}, pairs[i].lambda_h, verify::quad_trace_norm(trace),
                           Provenance::Fem);
    ctx.emit(records::make_run_record("fem", std::move(rec), used));
  }

  if (args.audit) {
    const double lambda_max = args.lambda_max.value_or(pairs.back().lambda_h * (1.0 + 10 * tol.fem_cluster_gap));
    // Refine until the resolution guard admits lambda_max.
    for (int level = 0; lambda_max * mesh.max_edge() * mesh.max_edge() > tol.fem_resolution; ++level) {
      if (level == 4) throw fem::ResolutionError("--audit would need more than four refinements; lower --lambda-max");
      mesh = fem::refine_uniform(mesh);
      *ctx.err << "tracelab: refined mesh to h = " << mesh.max_edge() << " so that lambda_max h^2 <= "
               << tol.fem_resolution << '\n';
    }
    const auto res = fem::bounds_audit(mesh, lambda_max, domain, tol.fem_resolution, tol.fem_cluster_gap);
    for (const auto& c : res.records) ctx.emit(records::make_run_record("fem-audit", c, used));
    records::RatioPayload rp{res.summary, res.h, res.resolution, res.eigenpairs};
    ctx.emit(records::make_run_record("fem-audit", rp, used));
    ctx.report("fem-audit", domain,
               {"fem_lower_bound", {}, res.summary.min_ratio, 0.0, status(res.summary.min_ratio > 0.0),
                "min ratio over " + std::to_string(res.eigenpairs) + " eigenpairs below " + format(lambda_max)});
    if (const auto rect = axis_rectangle(domain.vertices)) {
      std::string detail;
      const auto dev = rectangle_deviation(*rect, res.records, detail);
      ctx.report("fem-audit", domain,
                 {"fem_analytic_ratio", {}, dev.value_or(0.0), tol.fem_audit_ratio,
                  dev ? status(*dev <= tol.fem_audit_ratio) : CheckStatus::Skip, detail});
    }
  }
  if (args.write_mesh) {
    std::ofstream m(*args.write_mesh);
    if (!m) throw UsageError("cannot write " + *args.write_mesh);
    fem::write_mesh(m, mesh);
  }
  return ctx.failed ? kCheckFailure : kPass;
}

// --- band --------------------------------------------------------------------

struct BandArgs {
  std::string curvature;
  double a = 0.5;
  std::string l;
  int index = 1;
  int grid = 1024;
  bool audit = false;
};

int cmd_band(Context& ctx, const BandArgs& args) {
  const Curvature c = curvature_from_string(args.curvature);
  const auto ls = range_values(parse_range(args.l, "l"), "l");
  const auto& tol = ctx.config.tol;
  const DomainSpec domain = make_band(c, args.a);
  const std::map<std::string, double> used{{"band_refinement_gap", tol.band_refinement_gap}};
  for (int l : ls) {
    const auto m = band1d::band_mode({c, args.a, l, args.grid}, args.index, tol.band_refinement_gap);
    records::BandRow row{l, args.index, args.grid, m.lambda, m.lambda_coarse, m.lambda_fine, m.psi_norm_sq,
                         std::log(m.psi_norm_sq), m.psi_norm_sq * std::log(m.lambda) / m.lambda};
    auto r = records::make_run_record("band", row, used);
    r.domain = domain;
    ctx.emit(std::move(r));
  }
  if (args.audit) {
    if (args.index != 1) throw UsageError("--audit sweeps the transverse ground state; drop --index");
    if (ls.size() < 3) throw UsageError("--audit needs at least three l values");
    const auto rep = band1d::trapping_scaling_audit(c, args.a, ls, args.grid);
    records::ScalingSummary s{rep.grid_size, static_cast<int>(rep.rows.size()), rep.slope, rep.correlation,
                              rep.top_decade_ratio, rep.lambda_decades};
    auto r = records::make_run_record("band-audit", s, used);
    r.domain = domain;
    ctx.emit(std::move(r));
    if (c == Curvature::Spherical) {
      ctx.report("band-audit", domain,
                 {"band_correlation", {}, rep.correlation, tol.band_correlation,
                  status(rep.correlation <= tol.band_correlation && rep.slope < 0.0),
                  "slope " + format(rep.slope) + " of log psi^2 against l"});
      const auto fine = band1d::trapping_scaling_audit(c, args.a, ls, 2 * args.grid);
      const double drift = std::abs(fine.slope / rep.slope - 1.0);
      ctx.report("band-audit", domain,
                 {"band_slope_stability", {}, drift, tol.band_slope_stability, status(drift <= tol.band_slope_stability),
                  "slope at grid " + std::to_string(2 * args.grid) + ": " + format(fine.slope)});
    } else if (c == Curvature::Hyperbolic) {
      ctx.report("band-audit", domain,
                 {"band_hyperbolic_ratio", {}, rep.top_decade_ratio, tol.band_hyperbolic_ratio,
                  status(rep.top_decade_ratio < tol.band_hyperbolic_ratio),
                  "max/min of psi^2 log(lambda)/lambda over the top decade; lambda spans " +
                      format(rep.lambda_decades) + " decades"});
    }
  }
  return ctx.failed ? kCheckFailure : kPass;
}

// --- profile -----------------------------------------------------------------

struct ProfileArgs {
  std::string domain;
  double radius = 1.0;
  std::optional<double> a, b, delta;
  std::optional<int> n, k, m, l;
  std::string curvature = "spherical";
  int index = 1;
  int grid = 1024;
  int points = 1024;
  std::optional<std::string> csv;
};

int cmd_profile(Context& ctx, const ProfileArgs& args) {
  auto need = [&](const std::optional<int>& v, const char* name) {
    if (!v) throw UsageError(std::string("--domain ") + args.domain + " requires --" + name);
    return *v;
  };
  if (args.points < 2) throw UsageError("--points must be at least 2");
  profile::RadialProfile p;
  DomainSpec domain;
  auto grid_for = [&](const DomainSpec& d) {
    return profile::collar_grid(args.delta.value_or(0.5 * profile::max_collar_width(d)), args.points);
  };
  if (args.domain == "band") {
    const auto mode = band1d::band_mode({curvature_from_string(args.curvature), args.a.value_or(0.5), need(args.l, "l"), args.grid},
                                        args.index, ctx.config.tol.band_refinement_gap);
    domain = mode.record().domain;
    p = profile::collar_profile(mode, grid_for(domain));
  } else {
    EigenmodeRecord rec;
    if (args.domain == "disc")
      rec = closedform::disc_mode(args.radius, need(args.n, "n"), need(args.k, "k"));
    else if (args.domain == "rectangle")
      rec = closedform::rectangle_mode(args.a.value_or(1.0), args.b.value_or(1.0), need(args.m, "m"), need(args.n, "n"));
    else if (args.domain == "hemisphere")
      rec = closedform::hemisphere_mode(need(args.l, "l"));
    else if (args.domain == "neumann-disc")
      rec = closedform::neumann_disc_mode(need(args.n, "n"), need(args.k, "k"));
    else
      throw UsageError("unknown domain " + args.domain);
    domain = rec.domain;
    p = profile::collar_profile(rec, grid_for(domain));
  }
  records::ProfileSummary s;
  s.indices = p.indices;
  s.lambda = p.lambda;
  s.psi_norm_sq = p.psi_norm_sq;
  s.delta = p.delta;
  s.points = static_cast<int>(p.r_grid.size());
  s.energy_at_boundary = p.E_values.front();
  s.energy_audit = profile::energy_bound_audit({p});
  s.l_audit = profile::l_bound_audit({p});
  if (p.r_grid.size() >= 64) s.diff_ineq_audit = profile::diff_ineq_audit(p);
  s.collar_mass = profile::collar_mass(p);
  s.heuristic = p.heuristic;
  auto r = records::make_run_record("profile", s);
  r.domain = domain;
  ctx.emit(std::move(r));
  if (args.csv) {
    std::ofstream f(*args.csv);
    if (!f) throw UsageError("cannot write " + *args.csv);
    profile::write_profile_csv(f, p);
  }
  return kPass;
}

// --- report ------------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> inputs;
  std::optional<std::string> csv;
};

int cmd_report(Context& ctx, const ReportArgs& args) {
  const auto recs = read_inputs(args.inputs);
  std::ostream& out = *ctx.out;
  std::map<std::string, int> counts;
  struct RatioRange {
    double lo = INFINITY, hi = -INFINITY, lam_lo = INFINITY, lam_hi = -INFINITY;
    int n = 0;
  };
  std::map<std::string, RatioRange> ratios;
  std::map<std::string, std::array<int, 3>> checks;
  bool failed = false;
  for (const auto& r : recs) {
    ++counts[r.command + " " + records::payload_kind(r.payload) + " " + domain_kind(r.domain)];
    if (const auto* m = std::get_if<EigenmodeRecord>(&r.payload)) {
      auto& rr = ratios[records::domain_to_json(r.domain)];
      rr.lo = std::min(rr.lo, m->ratio);
      rr.hi = std::max(rr.hi, m->ratio);
      rr.lam_lo = std::min(rr.lam_lo, m->lambda);
      rr.lam_hi = std::max(rr.lam_hi, m->lambda);
      ++rr.n;
    }
    if (const auto* c = std::get_if<CheckReport>(&r.payload)) {
      ++checks[c->check][static_cast<int>(c->status)];
      failed |= c->status == CheckStatus::Fail;
    }
  }
  out << "records " << recs.size() << "\n\n";
  out << "command kind domain count\n";
  for (const auto& [k, n] : counts) out << k << ' ' << n << '\n';
  if (!ratios.empty()) {
    out << "\ndomain modes lambda_min lambda_max ratio_min ratio_max\n";
    for (const auto& [d, rr] : ratios)
      out << d << ' ' << rr.n << ' ' << format(rr.lam_lo) << ' ' << format(rr.lam_hi) << ' ' << format(rr.lo) << ' '
          << format(rr.hi) << '\n';
  }
  if (!checks.empty()) {
    out << "\ncheck pass fail skip\n";
    for (const auto& [c, n] : checks) out << c << ' ' << n[0] << ' ' << n[1] << ' ' << n[2] << '\n';
  }
  out << "\nstatus " << (failed ? "FAIL" : "PASS") << '\n';
  if (args.csv) {
    std::ofstream f(*args.csv);
    if (!f) throw UsageError("cannot write " + *args.csv);
    f << std::setprecision(std::numeric_limits<double>::max_digits10);
    f << "command,domain,indices,lambda,psi_norm_sq,ratio\n";
    for (const auto& r : recs) {
      auto idx = [](const std::vector<int>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
        return s;
      };
      if (const auto* m = std::get_if<EigenmodeRecord>(&r.payload))
        f << r.command << ',' << domain_kind(r.domain) << ',' << idx(m->indices) << ',' << m->lambda << ','
          << m->psi_norm_sq << ',' << m->ratio << '\n';
      if (const auto* b = std::get_if<records::BandRow>(&r.payload))
        f << r.command << ',' << domain_kind(r.domain) << ',' << b->l << ';' << b->transverse_index << ',' << b->lambda
          << ',' << b->psi_norm_sq << ',' << b->psi_norm_sq / b->lambda << '\n';
    }
  }
  return failed ? kCheckFailure : kPass;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"tracelab: boundary trace norms of Laplace eigenfunctions"};
  app.name("tracelab");
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_path;
  std::string config_path;
  bool no_timestamp = false;
  std::uint64_t seed = 1;
  app.add_option("--out", out_path, "append records to this file instead of stdout");
  app.add_option("--config", config_path, "tolerance file (JSON, config_version 1)");
  app.add_flag("--no-timestamp", no_timestamp, "write null timestamps for byte-identical reruns");
  app.add_option("--seed", seed, "seed for mesh jitter and the eigensolver start vector");

  ModesArgs modes;
  auto* sm = app.add_subcommand("modes", "closed-form eigenmode catalogue");
  sm->add_option("--domain", modes.domain, "disc, rectangle, cylinder, hemisphere or neumann-disc")->required();
  sm->add_option("--radius", modes.radius, "disc radius");
  sm->add_option("--a", modes.a, "rectangle side / cylinder length");
  sm->add_option("--b", modes.b, "rectangle side / cylinder circumference");
  sm->add_option("--n", modes.n, "index range N or N..M");
  sm->add_option("--k", modes.k, "index range");
  sm->add_option("--m", modes.m, "index range");
  sm->add_option("--l", modes.l, "index range");

  VerifyArgs verify_args;
  auto* sv = app.add_subcommand("verify", "run checks on eigenmode records");
  sv->add_option("--in", verify_args.inputs, "record files")->required();
  sv->add_option("--checks", verify_args.checks, "comma list of rellich, sobolev, ozawa, profile");
  sv->add_option("--lambda-max", verify_args.lambda_max, "ozawa truncation");
  sv->add_option("--point", verify_args.point, "ozawa boundary point x,y");
  sv->add_option("--delta", verify_args.delta, "collar width for the profile check");
  sv->add_option("--points", verify_args.points, "collar samples for the profile check");

  FemArgs fem_args;
  auto* sf = app.add_subcommand("fem", "finite-element eigenpairs of a polygon");
  sf->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
  sf->add_option("--polygon", fem_args.polygon, "polygon file, one 'x y' per line");
  sf->add_option("--mesh", fem_args.mesh, "mesh file");
  sf->add_option("--h", fem_args.h, "target max edge length");
  sf->add_option("--count", fem_args.count, "number of eigenpairs");
  sf->add_option("--shift", fem_args.shift, "spectral shift");
  sf->add_option("--jitter", fem_args.jitter, "interior lattice jitter, fraction of the spacing");
  sf->add_option("--lambda-max", fem_args.lambda_max, "audit window (default: just above the last eigenvalue)");
  sf->add_option("--write-mesh", fem_args.write_mesh, "save the final mesh");
  sf->add_flag("--audit", fem_args.audit, "ratio audit over every eigenvalue below lambda-max");

  BandArgs band_args;
  auto* sb = app.add_subcommand("band", "curved-band transverse ground states");
  sb->add_option("--curvature", band_args.curvature, "flat, spherical or hyperbolic")->required();
  sb->add_option("--a", band_args.a, "half width");
  sb->add_option("--l", band_args.l, "angular range N..M")->required();
  sb->add_option("--index", band_args.index, "transverse index");
  sb->add_option("--grid", band_args.grid, "coarse grid intervals");
  sb->add_flag("--audit", band_args.audit, "scaling audit over the sweep");

  ProfileArgs profile_args;
  auto* sp = app.add_subcommand("profile", "collar profile E(r), L(r) of one mode");
  sp->add_option("--domain", profile_args.domain, "disc, rectangle, hemisphere, neumann-disc or band")->required();
  sp->add_option("--radius", profile_args.radius, "disc radius");
  sp->add_option("--a", profile_args.a, "rectangle side or band half width");
  sp->add_option("--b", profile_args.b, "rectangle side");
  sp->add_option("--n", profile_args.n, "index");
  sp->add_option("--k", profile_args.k, "index");
  sp->add_option("--m", profile_args.m, "index");
  sp->add_option("--l", profile_args.l, "index");
  sp->add_option("--curvature", profile_args.curvature, "band curvature");
  sp->add_option("--index", profile_args.index, "band transverse index");
  sp->add_option("--grid", profile_args.grid, "band grid intervals");
  sp->add_option("--delta", profile_args.delta, "collar width (default half the maximum)");
  sp->add_option("--points", profile_args.points, "samples on [0, delta]");
  sp->add_option("--csv", profile_args.csv, "write r,E,L samples here");

  ReportArgs report_args;
  auto* sr = app.add_subcommand("report", "summarize record files");
  sr->add_option("--in", report_args.inputs, "record files")->required();
  sr->add_option("--csv", report_args.csv, "plot data: one row per eigenmode or band record");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  Context ctx;
  ctx.timestamp = !no_timestamp;
  ctx.seed = seed;
  ctx.err = &err;
  std::unique_ptr<std::ofstream> file;
  try {
    if (!config_path.empty()) ctx.config = load_config(config_path);
    if (!out_path.empty()) {
      file = std::make_unique<std::ofstream>(out_path, std::ios::app);
      if (!*file) throw UsageError("cannot open " + out_path);
      ctx.out = file.get();
    } else {
      ctx.out = &out;
    }
    if (sm->parsed()) return cmd_modes(ctx, modes);
    if (sv->parsed()) return cmd_verify(ctx, verify_args);
    if (sf->parsed()) return cmd_fem(ctx, fem_args);
    if (sb->parsed()) return cmd_band(ctx, band_args);
    if (sp->parsed()) return cmd_profile(ctx, profile_args);
    if (sr->parsed()) return cmd_report(ctx, report_args);
  } catch (const std::invalid_argument& e) {
    err << "tracelab: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "tracelab: " << e.what() << '\n';
    return kCheckFailure;
  }
  return kUsage;
}

}  // namespace tracelab::cli
