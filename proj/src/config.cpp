#include "tracelab/config.hpp"

#include <fstream>
#include <json.hpp>
#include <stdexcept>
#include <utility>

namespace tracelab {

namespace {

using Field = std::pair<const char*, double Tolerances::*>;

constexpr Field kFields[] = {
    {"disc_ratio", &Tolerances::disc_ratio},
    {"rectangle_agreement", &Tolerances::rectangle_agreement},
    {"rectangle_infimum", &Tolerances::rectangle_infimum},
    {"cylinder_threshold", &Tolerances::cylinder_threshold},
    {"hemisphere_slope", &Tolerances::hemisphere_slope},
    {"hemisphere_slope_tol", &Tolerances::hemisphere_slope_tol},
    {"rellich_closed_form", &Tolerances::rellich_closed_form},
    {"rellich_fem", &Tolerances::rellich_fem},
    {"sobolev_growth", &Tolerances::sobolev_growth},
    {"ozawa_band", &Tolerances::ozawa_band},
    {"ozawa_lambda_max", &Tolerances::ozawa_lambda_max},
    {"weyl_guard", &Tolerances::weyl_guard},
    {"profile_uniformity", &Tolerances::profile_uniformity},
    {"profile_energy_match", &Tolerances::profile_energy_match},
    {"profile_energy_match_band", &Tolerances::profile_energy_match_band},
    {"fem_lambda", &Tolerances::fem_lambda},
    {"fem_flux", &Tolerances::fem_flux},
    {"fem_richardson", &Tolerances::fem_richardson},
    {"fem_residual", &Tolerances::fem_residual},
    {"fem_resolution", &Tolerances::fem_resolution},
    {"fem_cluster_gap", &Tolerances::fem_cluster_gap},
    {"fem_audit_ratio", &Tolerances::fem_audit_ratio},
    {"band_correlation", &Tolerances::band_correlation},
    {"band_slope_stability", &Tolerances::band_slope_stability},
    {"band_hyperbolic_ratio", &Tolerances::band_hyperbolic_ratio},
    {"band_refinement_gap", &Tolerances::band_refinement_gap},
    {"neumann_identity", &Tolerances::neumann_identity},
    {"runtime_disc_s", &Tolerances::runtime_disc_s},
    {"runtime_hemisphere_s", &Tolerances::runtime_hemisphere_s},
    {"runtime_fem_s", &Tolerances::runtime_fem_s},
    {"runtime_band_s", &Tolerances::runtime_band_s},
};

}  // namespace

std::vector<std::string> tolerance_names() {
  std::vector<std::string> out;
  for (const auto& f : kFields) out.emplace_back(f.first);
  return out;
}

double tolerance_value(const Tolerances& tol, const std::string& name) {
  for (const auto& f : kFields)
    if (name == f.first) return tol.*(f.second);
  throw std::invalid_argument("unknown tolerance: " + name);
}

Config read_config(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  Config c;
  for (const auto& [key, value] : j.items()) {
    if (key == "config_version") {
      if (!value.is_number_integer() || value.get<int>() != Config::kVersion)
        throw std::invalid_argument("unsupported config_version");
    } else if (key == "tolerances") {
      if (!value.is_object()) throw std::invalid_argument("tolerances must be an object");
      for (const auto& [name, v] : value.items()) {
        bool found = false;
        for (const auto& f : kFields) {
          if (name != f.first) continue;
          if (!v.is_number()) throw std::invalid_argument("tolerance " + name + " must be a number");
          c.tol.*(f.second) = v.get<double>();
          found = true;
        }
        if (!found) throw std::invalid_argument("unknown tolerance: " + name);
      }
    } else if (key != "description") {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  if (!j.contains("config_version")) throw std::invalid_argument("config_version missing");
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  return read_config(in);
}

void write_config(std::ostream& out, const Config& config) {
  nlohmann::ordered_json j;
  j["config_version"] = config.version;
  nlohmann::ordered_json t = nlohmann::ordered_json::object();
  for (const auto& f : kFields) t[f.first] = config.tol.*(f.second);
  j["tolerances"] = t;
  out << j.dump(2) << '\n';
}

}  // namespace tracelab
