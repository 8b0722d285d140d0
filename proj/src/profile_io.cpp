// SPDX-License-Identifier: Apache-2.0
#include "bodyauth/profile_io.hpp"

#include <fstream>
#include <json.hpp>

#include "bodyauth/error.hpp"
#include "bodyauth/keyvalue.hpp"

namespace bodyauth {
namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json to_json_array(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd from_json_array(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void expect(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::Parse, "profile: " + what);
}

}  // namespace

std::string profile_to_json(const RegisteredProfile& p) {
  json basis = json::array();
  for (Eigen::Index r = 0; r < p.pca.basis.rows(); ++r) basis.push_back(to_json_array(p.pca.basis.row(r).transpose()));
  json periods = json::array();
  for (const auto& period : p.periods)
    periods.push_back({{"mean", to_json_array(period.mean)},
                       {"variance", to_json_array(period.variance)},
                       {"threshold", period.threshold},
                       {"sample_count", period.sample_count}});
  const json doc = {
      {"format", "bodyauth-profile"},
      {"version", kFormatVersion},
      {"t", p.periods.size()},
      {"period_secs", p.period_secs},
      {"created_at_us", p.created_at_us},
      {"features",
       {{"window_s", p.features.window_s},
        {"filter_order", p.features.filter.order},
        {"cutoff_hz", p.features.filter.cutoff_hz},
        {"rate_hz", p.features.filter.rate_hz}}},
      {"pca",
       {{"retain", p.pca.retain},
        {"retained_fraction", p.pca.retained_fraction},
        {"mean", to_json_array(p.pca.mean)},
        {"basis", basis},
        {"variances", to_json_array(p.pca.variances)}}},
      {"normalizer", {{"min", to_json_array(p.normalizer.min)}, {"max", to_json_array(p.normalizer.max)}}},
      {"periods", periods},
  };
  return doc.dump(1) + "\n";
}

RegisteredProfile profile_from_json(const std::string& text) {
  RegisteredProfile p;
  try {
    const json doc = json::parse(text);
    expect(doc.at("format") == "bodyauth-profile", "not a profile document");
    expect(doc.at("version") == kFormatVersion, "unsupported version");
    p.period_secs = doc.at("period_secs").get<double>();
    p.created_at_us = doc.at("created_at_us").get<std::int64_t>();
    const auto& f = doc.at("features");
    p.features.window_s = f.at("window_s").get<double>();
    p.features.filter.order = f.at("filter_order").get<int>();
    p.features.filter.cutoff_hz = f.at("cutoff_hz").get<double>();
    p.features.filter.rate_hz = f.at("rate_hz").get<double>();

    const auto& pca = doc.at("pca");
    p.pca.retain = pca.at("retain").get<double>();
    p.pca.retained_fraction = pca.at("retained_fraction").get<double>();
    p.pca.mean = from_json_array(pca.at("mean"));
    p.pca.variances = from_json_array(pca.at("variances"));
    const auto& rows = pca.at("basis");
    const auto d = p.pca.mean.size();
    p.pca.basis.resize(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto row = from_json_array(rows[r]);
      expect(row.size() == d, "PCA basis row has wrong length");
      p.pca.basis.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    expect(p.pca.variances.size() == p.pca.basis.rows(), "PCA variances do not match basis");

    p.normalizer.min = from_json_array(doc.at("normalizer").at("min"));
    p.normalizer.max = from_json_array(doc.at("normalizer").at("max"));
    const auto k = p.pca.basis.rows();
    expect(p.normalizer.min.size() == k && p.normalizer.max.size() == k, "normalizer does not match PCA");

    for (const auto& jp : doc.at("periods")) {
      PeriodModel m;
      m.mean = from_json_array(jp.at("mean"));
      m.variance = from_json_array(jp.at("variance"));
      m.threshold = jp.at("threshold").get<double>();
      m.sample_count = jp.at("sample_count").get<std::size_t>();
      expect(m.mean.size() == k && m.variance.size() == k, "period dimension does not match PCA");
      expect((m.variance.array() > 0.0).all(), "period variance must be positive");
      p.periods.push_back(std::move(m));
    }
    expect(!p.periods.empty(), "profile has no periods");
    expect(doc.at("t").get<std::size_t>() == p.periods.size(), "t does not match period count");
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("profile: ") + e.what());
  }
  return p;
}

void save_profile(const std::string& path, const RegisteredProfile& profile) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
  out << profile_to_json(profile);
  if (!out) fail(ErrorCode::Io, "write failed for '" + path + "'");
}

RegisteredProfile load_profile(const std::string& path) { return profile_from_json(read_text_file(path)); }

}  // namespace bodyauth
