#include "tracelab/records.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "tracelab/closedform.hpp"
#include "tracelab/config.hpp"

using namespace tracelab;
using namespace tracelab::records;

namespace {

std::vector<RunRecord> sample_records() {
  std::vector<RunRecord> out;
  auto mode = closedform::disc_mode(1.3, 4, 2);
  mode.interior_norm_sq = 1.0 - 1e-13;
  out.push_back(make_run_record("modes", mode, {{"disc_ratio", 1e-8}}));
  out.back().timestamp = "2026-01-02T03:04:05Z";

  RatioPayload rp;
  rp.summary = verify::ratio_summary(closedform::rectangle_modes(1, 2, {1, 3}, {1, 3}), 0, 1e9);
  rp.h = 0.1 / 3.0;
  rp.eigenpairs = 9;
  out.push_back(make_run_record("fem", rp));

  ProfileSummary ps;
  ps.indices = {0, 3};
  ps.lambda = 74.887006790;
  ps.psi_norm_sq = 2 * ps.lambda;
  ps.delta = 0.5;
  ps.points = 32;
  ps.energy_at_boundary = ps.lambda;
  ps.energy_audit = 1.0000000000000002;
  ps.l_audit = 2.1;
  ps.collar_mass = 0.3;
  auto pr = make_run_record("profile", ps);
  pr.domain = make_disc(1.0);
  out.push_back(pr);

  BandRow row{37, 1, 1024, 1234.5678901234567, 1234.6, 1234.57, 1e-300, std::log(1e-300), 3.5e-301};
  auto br = make_run_record("band", row, {{"band_refinement_gap", 1e-4}});
  br.domain = make_band(Curvature::Hyperbolic, 1.0);
  out.push_back(br);

  auto sr = make_run_record("band", ScalingSummary{1024, 19, -0.25, -0.9999, 1.4, 1.85});
  sr.domain = make_band(Curvature::Spherical, 0.5);
  out.push_back(sr);

  auto cr = make_run_record("verify", CheckReport{"rellich", {2, 1}, 3.3e-15, 1e-6, CheckStatus::Pass, "ok"});
  cr.domain = make_rectangle(1, 2);
  out.push_back(cr);

  Polygon poly{{{0, 0}, {1.0 / 3.0, 0}, {0.1, 0.7}}, "tri.txt"};
  auto fem_mode = make_record(poly, {1}, 98.76543210987654, 321.0, Provenance::Fem);
  out.push_back(make_run_record("fem", fem_mode));

  auto hemi = make_run_record("modes", closedform::hemisphere_mode(21));
  out.push_back(hemi);
  auto cyl = make_run_record("modes", closedform::cylinder_mode(1, 2 * 3.14159, 1, -4));
  out.push_back(cyl);
  out.push_back(make_run_record("modes", closedform::neumann_disc_mode(3, 2)));
  return out;
}

}  // namespace

TEST(Records, RoundTripEveryPayloadKind) {
  const auto recs = sample_records();
  std::stringstream ss;
  write_records(ss, recs);
  const auto back = read_records(ss);
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(back[i], recs[i]) << to_line(recs[i]);
    EXPECT_EQ(to_line(back[i]), to_line(recs[i]));
  }
}

TEST(Records, LineShape) {
  const auto line = to_line(sample_records()[0]);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_NE(line.find("\"schema_version\":1"), std::string::npos);
  EXPECT_NE(line.find("\"kind\":\"eigenmode\""), std::string::npos);
  EXPECT_NE(line.find("\"timestamp\":\"2026-01-02T03:04:05Z\""), std::string::npos);
}

TEST(Records, RejectsBadInput) {
  auto good = to_line(sample_records()[0]);
  auto with = [&](const std::string& from, const std::string& to) {
    auto s = good;
    const auto pos = s.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    return s.replace(pos, from.size(), to);
  };
  EXPECT_THROW(from_line(with("\"schema_version\":1", "\"schema_version\":2")), std::invalid_argument);
  EXPECT_THROW(from_line(with("\"kind\":\"eigenmode\"", "\"kind\":\"band_row\"")), std::invalid_argument);
  EXPECT_THROW(from_line(with("\"kind\":\"eigenmode\"", "\"kind\":\"mystery\"")), std::invalid_argument);
  EXPECT_THROW(from_line(with("\"kind\":\"disc\"", "\"kind\":\"torus\"")), std::invalid_argument);
  EXPECT_THROW(from_line("{not json"), std::invalid_argument);
  EXPECT_THROW(from_line("[1,2]"), std::invalid_argument);
  std::stringstream ss(good + "\n\n" + "{}\n");
  EXPECT_THROW(read_records(ss), std::invalid_argument);
}

TEST(Records, DomainMismatchRefused) {
  auto r = make_run_record("modes", closedform::disc_mode(1, 0, 1));
  r.domain = make_disc(2.0);
  EXPECT_THROW(to_line(r), std::invalid_argument);
}

TEST(Records, DomainJson) {
  for (const DomainSpec& d : std::vector<DomainSpec>{make_disc(0.3), make_rectangle(2, 1), FlatCylinder{1, 6.5}, Hemisphere{},
                                                     NeumannDisc{}, make_band(Curvature::Flat, 0.25),
                                                     Polygon{{{0, 0}, {1, 0}, {0, 1}}, ""}})
    EXPECT_EQ(domain_from_json(domain_to_json(d)), d);
}

TEST(Config, ShippedFileMatchesDefaults) {
  const auto c = load_config(TRACELAB_SOURCE_DIR "/data/config.json");
  EXPECT_EQ(c, Config{});
  EXPECT_EQ(c.version, 1);
}

TEST(Config, DefaultsAreAcceptanceValues) {
  const Tolerances t;
  EXPECT_EQ(t.disc_ratio, 1e-8);
  EXPECT_EQ(t.rectangle_infimum, 0.01);
  EXPECT_EQ(t.cylinder_threshold, 0.01);
  EXPECT_EQ(t.hemisphere_slope_tol, 0.05);
  EXPECT_EQ(t.rellich_closed_form, 1e-6);
  EXPECT_EQ(t.rellich_fem, 2e-2);
  EXPECT_EQ(t.sobolev_growth, 3.0);
  EXPECT_EQ(t.ozawa_band, 0.15);
  EXPECT_EQ(t.weyl_guard, 0.10);
  EXPECT_EQ(t.profile_uniformity, 2.0);
  EXPECT_EQ(t.fem_flux, 0.03);
  EXPECT_EQ(t.fem_richardson, 0.30);
  EXPECT_EQ(t.band_hyperbolic_ratio, 5.0);
  EXPECT_EQ(t.neumann_identity, 1e-6);
}

TEST(Config, PartialOverridesAndErrors) {
  std::stringstream partial(R"({"config_version": 1, "tolerances": {"ozawa_band": 0.2}})");
  const auto c = read_config(partial);
  EXPECT_EQ(c.tol.ozawa_band, 0.2);
  EXPECT_EQ(c.tol.rellich_fem, 2e-2);
  EXPECT_EQ(tolerance_value(c.tol, "ozawa_band"), 0.2);
  std::stringstream unknown(R"({"config_version": 1, "tolerances": {"ozawa_bnd": 0.2}})");
  EXPECT_THROW(read_config(unknown), std::invalid_argument);
  std::stringstream version(R"({"config_version": 2})");
  EXPECT_THROW(read_config(version), std::invalid_argument);
  std::stringstream missing(R"({"tolerances": {}})");
  EXPECT_THROW(read_config(missing), std::invalid_argument);
  std::stringstream garbage("tolerances = 3");
  EXPECT_THROW(read_config(garbage), std::invalid_argument);
}

TEST(Config, WriteReadRoundTrip) {
  Config c;
  c.tol.fem_lambda = 0.0123456789012345;
  std::stringstream ss;
  write_config(ss, c);
  EXPECT_EQ(read_config(ss), c);
}
