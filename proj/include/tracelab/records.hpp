#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tracelab/domain.hpp"
#include "tracelab/verify.hpp"

namespace tracelab::records {

inline constexpr int kSchemaVersion = 1;

/// Ratio statistics plus the mesh data behind them (FEM audits only).
struct RatioPayload {
  verify::RatioSummary summary;
  std::optional<double> h;
  std::optional<double> resolution;
  std::optional<int> eigenpairs;

  friend bool operator==(const RatioPayload&, const RatioPayload&) = default;
};

/// Collar-profile audit constants for one mode; the samples go to CSV.
struct ProfileSummary {
  std::vector<int> indices;
  double lambda = 0.0;
  double psi_norm_sq = 0.0;
  double delta = 0.0;
  int points = 0;
  double energy_at_boundary = 0.0;  ///< E(0)
  double energy_audit = 0.0;
  double l_audit = 0.0;
  std::optional<double> diff_ineq_audit;  ///< absent below 64 points
  double collar_mass = 0.0;
  bool heuristic = false;

  friend bool operator==(const ProfileSummary&, const ProfileSummary&) = default;
};

struct BandRow {
  int l = 0;
  int transverse_index = 1;
  int grid_size = 0;
  double lambda = 0.0;
  double lambda_coarse = 0.0;
  double lambda_fine = 0.0;
  double psi_norm_sq = 0.0;
  double log_psi_norm_sq = 0.0;
  double audit = 0.0;  ///< ||psi||^2 log(lambda) / lambda

  friend bool operator==(const BandRow&, const BandRow&) = default;
};

struct ScalingSummary {
  int grid_size = 0;
  int rows = 0;
  double slope = 0.0;        ///< of log ||psi||^2 against l
  double correlation = 0.0;
  double top_decade_ratio = 0.0;
  double lambda_decades = 0.0;

  friend bool operator==(const ScalingSummary&, const ScalingSummary&) = default;
};

enum class CheckStatus { Pass, Fail, Skip };
const char* to_string(CheckStatus s);

struct CheckReport {
  std::string check;
  std::vector<int> indices;  ///< empty for set-level checks
  double value = 0.0;
  double tolerance = 0.0;
  CheckStatus status = CheckStatus::Skip;
  std::string detail;

  friend bool operator==(const CheckReport&, const CheckReport&) = default;
};

using Payload = std::variant<EigenmodeRecord, RatioPayload, ProfileSummary, BandRow, ScalingSummary, CheckReport>;

/// "eigenmode", "ratio_summary", "profile_summary", "band_row",
/// "scaling_summary" or "check_report".
std::string payload_kind(const Payload& payload);

/// One line of output. The domain lives at the top level; payloads that
/// carry a domain field (eigenmode, ratio summary) are kept consistent with it.
struct RunRecord {
  int schema_version = kSchemaVersion;
  std::optional<std::string> timestamp;
  std::string command;
  DomainSpec domain;
  Payload payload;
  std::map<std::string, double> tolerances;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

RunRecord make_run_record(std::string command, Payload payload, std::map<std::string, double> tolerances = {});

/// Single-line JSON with sorted keys; doubles round-trip exactly.
std::string to_line(const RunRecord& record);

/// Throws std::invalid_argument on malformed input, a schema_version other
/// than 1, or a kind tag that does not match the payload.
RunRecord from_line(const std::string& line);

void write_records(std::ostream& out, const std::vector<RunRecord>& records);
/// Skips blank lines.
std::vector<RunRecord> read_records(std::istream& in);

std::string domain_to_json(const DomainSpec& domain);
DomainSpec domain_from_json(const std::string& text);

/// ISO-8601 UTC time, second resolution.
std::string utc_timestamp();

}  // namespace tracelab::records
