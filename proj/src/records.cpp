#include "tracelab/records.hpp"

#include <chrono>
#include <ctime>
#include <istream>
#include <json.hpp>
#include <ostream>
#include <stdexcept>

namespace tracelab::records {

namespace {

using Json = nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument("bad record: " + what); }

const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) bad(std::string("expected an object around ") + name);
  auto it = j.find(name);
  if (it == j.end()) bad(std::string("missing field ") + name);
  return *it;
}

double num(const Json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_number()) bad(std::string(name) + " must be a number");
  return v.get<double>();
}

int integer(const Json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_number_integer()) bad(std::string(name) + " must be an integer");
  return v.get<int>();
}

std::string str(const Json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_string()) bad(std::string(name) + " must be a string");
  return v.get<std::string>();
}

bool boolean(const Json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_boolean()) bad(std::string(name) + " must be a boolean");
  return v.get<bool>();
}

std::vector<int> ints(const Json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_array()) bad(std::string(name) + " must be an array");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) bad(std::string(name) + " must hold integers");
    out.push_back(e.get<int>());
  }
  return out;
}

template <class T>
std::optional<T> opt(const Json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) bad(std::string(name) + " must be a number or null");
  return it->get<T>();
}

template <class T>
Json opt_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json domain_json(const DomainSpec& d) {
  Json j;
  j["kind"] = domain_kind(d);
  std::visit(overloaded{
                 [&](const Disc& x) { j["radius"] = x.radius; },
                 [&](const Rectangle& x) {
                   j["a"] = x.a;
                   j["b"] = x.b;
                 },
                 [&](const FlatCylinder& x) {
                   j["length"] = x.length;
                   j["circumference"] = x.circumference;
                 },
                 [](const Hemisphere&) {},
                 [](const NeumannDisc&) {},
                 [&](const CurvedBand& x) {
                   j["curvature"] = to_string(x.curvature);
                   j["half_width"] = x.half_width;
                 },
                 [&](const Polygon& x) {
                   Json v = Json::array();
                   for (const auto& p : x.vertices) v.push_back({p.x, p.y});
                   j["vertices"] = v;
                   j["source"] = x.source;
                 },
             },
             d);
  return j;
}

DomainSpec domain_parse(const Json& j) {
  const std::string kind = str(j, "kind");
  if (kind == "disc") return Disc{num(j, "radius")};
  if (kind == "rectangle") return Rectangle{num(j, "a"), num(j, "b")};
  if (kind == "flat_cylinder") return FlatCylinder{num(j, "length"), num(j, "circumference")};
  if (kind == "hemisphere") return Hemisphere{};
  if (kind == "neumann_disc") return NeumannDisc{};
  if (kind == "band") return CurvedBand{curvature_from_string(str(j, "curvature")), num(j, "half_width")};
  if (kind == "polygon") {
    Polygon p;
    const auto& v = field(j, "vertices");
    if (!v.is_array()) bad("polygon vertices must be an array");
    for (const auto& q : v) {
      if (!q.is_array() || q.size() != 2 || !q[0].is_number() || !q[1].is_number()) bad("polygon vertex must be [x, y]");
      p.vertices.push_back({q[0].get<double>(), q[1].get<double>()});
    }
    p.source = str(j, "source");
    return p;
  }
  bad("unknown domain kind " + kind);
}

Json payload_json(const Payload& p) {
  Json j;
  std::visit(overloaded{
                 [&](const EigenmodeRecord& r) {
                   j["indices"] = r.indices;
                   j["lambda"] = r.lambda;
                   j["psi_norm_sq"] = r.psi_norm_sq;
                   j["ratio"] = r.ratio;
                   j["provenance"] = to_string(r.provenance);
                   j["interior_norm_sq"] = opt_json(r.interior_norm_sq);
                 },
                 [&](const RatioPayload& r) {
                   j["lambda_min"] = r.summary.lambda_min;
                   j["lambda_max"] = r.summary.lambda_max;
                   j["min_ratio"] = r.summary.min_ratio;
                   j["max_ratio"] = r.summary.max_ratio;
                   j["count"] = r.summary.count;
                   j["h"] = opt_json(r.h);
                   j["resolution"] = opt_json(r.resolution);
                   j["eigenpairs"] = opt_json(r.eigenpairs);
                 },
                 [&](const ProfileSummary& r) {
                   j["indices"] = r.indices;
                   j["lambda"] = r.lambda;
                   j["psi_norm_sq"] = r.psi_norm_sq;
                   j["delta"] = r.delta;
                   j["points"] = r.points;
                   j["energy_at_boundary"] = r.energy_at_boundary;
                   j["energy_audit"] = r.energy_audit;
                   j["l_audit"] = r.l_audit;
                   j["diff_ineq_audit"] = opt_json(r.diff_ineq_audit);
                   j["collar_mass"] = r.collar_mass;
                   j["heuristic"] = r.heuristic;
                 },
                 [&](const BandRow& r) {
                   j["l"] = r.l;
                   j["transverse_index"] = r.transverse_index;
                   j["grid_size"] = r.grid_size;
                   j["lambda"] = r.lambda;
                   j["lambda_coarse"] = r.lambda_coarse;
                   j["lambda_fine"] = r.lambda_fine;
                   j["psi_norm_sq"] = r.psi_norm_sq;
                   j["log_psi_norm_sq"] = r.log_psi_norm_sq;
                   j["audit"] = r.audit;
                 },
                 [&](const ScalingSummary& r) {
                   j["grid_size"] = r.grid_size;
                   j["rows"] = r.rows;
                   j["slope"] = r.slope;
                   j["correlation"] = r.correlation;
                   j["top_decade_ratio"] = r.top_decade_ratio;
                   j["lambda_decades"] = r.lambda_decades;
                 },
                 [&](const CheckReport& r) {
                   j["check"] = r.check;
                   j["indices"] = r.indices;
                   j["value"] = r.value;
                   j["tolerance"] = r.tolerance;
                   j["status"] = to_string(r.status);
                   j["detail"] = r.detail;
                 },
             },
             p);
  return j;
}

Payload payload_parse(const std::string& kind, const Json& j, const DomainSpec& domain) {
  if (!j.is_object()) bad("payload must be an object");
  if (kind == "eigenmode") {
    EigenmodeRecord r;
    r.domain = domain;
    r.indices = ints(j, "indices");
    r.lambda = num(j, "lambda");
    r.psi_norm_sq = num(j, "psi_norm_sq");
    r.ratio = num(j, "ratio");
    r.provenance = provenance_from_string(str(j, "provenance"));
    r.interior_norm_sq = opt<double>(j, "interior_norm_sq");
    return r;
  }
  if (kind == "ratio_summary") {
    RatioPayload r;
    r.summary.domain = domain;
    r.summary.lambda_min = num(j, "lambda_min");
    r.summary.lambda_max = num(j, "lambda_max");
    r.summary.min_ratio = num(j, "min_ratio");
    r.summary.max_ratio = num(j, "max_ratio");
    r.summary.count = integer(j, "count");
    r.h = opt<double>(j, "h");
    r.resolution = opt<double>(j, "resolution");
    r.eigenpairs = opt<int>(j, "eigenpairs");
    return r;
  }
  if (kind == "profile_summary") {
    ProfileSummary r;
    r.indices = ints(j, "indices");
    r.lambda = num(j, "lambda");
    r.psi_norm_sq = num(j, "psi_norm_sq");
    r.delta = num(j, "delta");
    r.points = integer(j, "points");
    r.energy_at_boundary = num(j, "energy_at_boundary");
    r.energy_audit = num(j, "energy_audit");
    r.l_audit = num(j, "l_audit");
    r.diff_ineq_audit = opt<double>(j, "diff_ineq_audit");
    r.collar_mass = num(j, "collar_mass");
    r.heuristic = boolean(j, "heuristic");
    return r;
  }
  if (kind == "band_row") {
    BandRow r;
    r.l = integer(j, "l");
    r.transverse_index = integer(j, "transverse_index");
    r.grid_size = integer(j, "grid_size");
    r.lambda = num(j, "lambda");
    r.lambda_coarse = num(j, "lambda_coarse");
    r.lambda_fine = num(j, "lambda_fine");
    r.psi_norm_sq = num(j, "psi_norm_sq");
    r.log_psi_norm_sq = num(j, "log_psi_norm_sq");
    r.audit = num(j, "audit");
    return r;
  }
  if (kind == "scaling_summary") {
    ScalingSummary r;
    r.grid_size = integer(j, "grid_size");
    r.rows = integer(j, "rows");
    r.slope = num(j, "slope");
    r.correlation = num(j, "correlation");
    r.top_decade_ratio = num(j, "top_decade_ratio");
    r.lambda_decades = num(j, "lambda_decades");
    return r;
  }
  if (kind == "check_report") {
    CheckReport r;
    r.check = str(j, "check");
    r.indices = ints(j, "indices");
    r.value = num(j, "value");
    r.tolerance = num(j, "tolerance");
    const std::string s = str(j, "status");
    if (s == "pass")
      r.status = CheckStatus::Pass;
    else if (s == "fail")
      r.status = CheckStatus::Fail;
    else if (s == "skip")
      r.status = CheckStatus::Skip;
    else
      bad("unknown check status " + s);
    r.detail = str(j, "detail");
    return r;
  }
  bad("unknown payload kind " + kind);
}

}  // namespace

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skip: return "skip";
  }
  return "?";
}

std::string payload_kind(const Payload& payload) {
  static const char* names[] = {"eigenmode", "ratio_summary", "profile_summary", "band_row", "scaling_summary", "check_report"};
  return names[payload.index()];
}

RunRecord make_run_record(std::string command, Payload payload, std::map<std::string, double> tolerances) {
  RunRecord r;
  r.command = std::move(command);
  if (const auto* m = std::get_if<EigenmodeRecord>(&payload)) r.domain = m->domain;
  if (const auto* s = std::get_if<RatioPayload>(&payload)) r.domain = s->summary.domain;
  r.payload = std::move(payload);
  r.tolerances = std::move(tolerances);
  return r;
}

std::string to_line(const RunRecord& r) {
  if (const auto* m = std::get_if<EigenmodeRecord>(&r.payload); m && !(m->domain == r.domain))
    throw std::invalid_argument("eigenmode payload domain differs from the record domain");
  if (const auto* s = std::get_if<RatioPayload>(&r.payload); s && !(s->summary.domain == r.domain))
    throw std::invalid_argument("ratio payload domain differs from the record domain");
  Json j;
  j["schema_version"] = r.schema_version;
  j["timestamp"] = r.timestamp ? Json(*r.timestamp) : Json(nullptr);
  j["command"] = r.command;
  j["domain"] = domain_json(r.domain);
  j["kind"] = payload_kind(r.payload);
  j["payload"] = payload_json(r.payload);
  j["tolerances"] = r.tolerances;
  return j.dump();
}

RunRecord from_line(const std::string& line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::exception& e) {
    bad(std::string("not JSON: ") + e.what());
  }
  if (!j.is_object()) bad("record must be an object");
  RunRecord r;
  r.schema_version = integer(j, "schema_version");
  if (r.schema_version != kSchemaVersion) bad("unsupported schema_version " + std::to_string(r.schema_version));
  const auto& ts = field(j, "timestamp");
  if (ts.is_string())
    r.timestamp = ts.get<std::string>();
  else if (!ts.is_null())
    bad("timestamp must be a string or null");
  r.command = str(j, "command");
  r.domain = domain_parse(field(j, "domain"));
  r.payload = payload_parse(str(j, "kind"), field(j, "payload"), r.domain);
  const auto& tol = field(j, "tolerances");
  if (!tol.is_object()) bad("tolerances must be an object");
  for (const auto& [k, v] : tol.items()) {
    if (!v.is_number()) bad("tolerance " + k + " must be a number");
    r.tolerances[k] = v.get<double>();
  }
  return r;
}

void write_records(std::ostream& out, const std::vector<RunRecord>& records) {
  for (const auto& r : records) out << to_line(r) << '\n';
}

std::vector<RunRecord> read_records(std::istream& in) {
  std::vector<RunRecord> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(from_line(line));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::string domain_to_json(const DomainSpec& domain) { return domain_json(domain).dump(); }

DomainSpec domain_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    bad(std::string("not JSON: ") + e.what());
  }
  return domain_parse(j);
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace tracelab::records
