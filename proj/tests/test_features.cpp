// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bodyauth/error.hpp"
#include "bodyauth/features.hpp"
#include "support.hpp"

using namespace bodyauth;

namespace {

ProcessedSeries random_processed(std::mt19937_64& rng, std::size_t subcarriers, std::size_t frames) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::exponential_distribution<double> e(1.0);
  ProcessedSeries p;
  p.rate_hz = 50.0;
  for (std::size_t k = 0; k < subcarriers; ++k) {
    std::vector<double> a(frames), d(frames - 1);
    for (auto& v : a) v = 20.0 + 3.0 * e(rng);
    for (auto& v : d) v = 0.1 * g(rng);
    p.filtered_amplitudes.push_back(std::move(a));
    p.filtered_phase_diffs.push_back(std::move(d));
  }
  return p;
}

}  // namespace

TEST_CASE("track statistics on hand examples") {
  const std::vector<double> x{1, 2, 3, 4};
  const auto s = track_statistics(x);
  CHECK(s[0] == doctest::Approx(2.5));
  CHECK(s[1] == 4);
  CHECK(s[2] == 1);
  CHECK(s[3] == doctest::Approx(1.0));
  CHECK(s[4] == doctest::Approx(1.5));
  CHECK(s[5] == doctest::Approx(std::sqrt(7.5)));
  CHECK(s[6] == doctest::Approx(0.0));
  CHECK(s[7] == doctest::Approx(1.64));

  const std::vector<double> c(50, -2.5);
  const auto cs = track_statistics(c);
  CHECK(cs[0] == -2.5);
  CHECK(cs[1] == -2.5);
  CHECK(cs[2] == -2.5);
  CHECK(cs[3] == 0.0);
  CHECK(cs[4] == 0.0);
  CHECK(cs[5] == doctest::Approx(2.5));
  CHECK(cs[6] == 0.0);
  CHECK(cs[7] == 0.0);

  CHECK_THROWS_AS(track_statistics(std::vector<double>{}), Error);
}

TEST_CASE("track statistics match the brute-force oracle") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> len(2, 120);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> x(static_cast<std::size_t>(len(rng)));
    const double shift = 10.0 * g(rng);
    for (auto& v : x) v = shift + std::exp(g(rng));
    const auto s = track_statistics(x);
    const auto r = testsupport::reference_stats(x);
    const double expected[] = {r.mean, r.max, r.min, r.mad, r.iqr, r.rms, r.skew, r.kurt};
    for (std::size_t i = 0; i < 8; ++i) CHECK(testsupport::relative_error(s[i], expected[i]) <= 1e-9);
  }
}

TEST_CASE("feature layout") {
  CHECK(feature_dimension(30) == 480);
  CHECK(feature_index(Statistic::Mean, 0, 0, 30) == 0);
  CHECK(feature_index(Statistic::Mean, 0, 1, 30) == 1);
  CHECK(feature_index(Statistic::Mean, 1, 0, 30) == 2);
  CHECK(feature_index(Statistic::Kurtosis, 29, 1, 30) == 479);
  CHECK(statistic_name(Statistic::InterquartileRange) == "iqr");

  std::mt19937_64 rng(3);
  const auto w = random_processed(rng, 30, 50);
  const auto v = extract_stats(w, 7);
  CHECK(v.window_id == 7);
  REQUIRE(v.values.size() == 480);
  for (std::size_t k = 0; k < 30; ++k) {
    const auto ra = testsupport::reference_stats(w.filtered_amplitudes[k]);
    const auto rp = testsupport::reference_stats(w.filtered_phase_diffs[k]);
    CHECK(v.values[feature_index(Statistic::Mean, k, 0, 30)] == doctest::Approx(ra.mean));
    CHECK(v.values[feature_index(Statistic::Max, k, 1, 30)] == doctest::Approx(rp.max));
    CHECK(v.values[feature_index(Statistic::Kurtosis, k, 1, 30)] == doctest::Approx(rp.kurt));
  }
}

TEST_CASE("windowing") {
  std::mt19937_64 rng(4);
  SUBCASE("30 s at 50 Hz") {
    const auto p = random_processed(rng, 3, 1500);
    const auto ws = window(p, 1.0);
    REQUIRE(ws.size() == 30);
    for (const auto& w : ws) {
      CHECK(w.frames() == 50);
      CHECK(w.filtered_phase_diffs.front().size() == 49);
    }
    CHECK(ws[1].filtered_amplitudes[2][0] == p.filtered_amplitudes[2][50]);
    CHECK(ws[1].filtered_phase_diffs[2][0] == p.filtered_phase_diffs[2][50]);
  }
  SUBCASE("remainder dropped") { CHECK(window(random_processed(rng, 3, 75), 1.0).size() == 1); }
  SUBCASE("empty input") {
    ProcessedSeries empty;
    empty.rate_hz = 50;
    CHECK_THROWS_AS(window(empty, 1.0), Error);
  }
  SUBCASE("capture windows") {
    const auto s = testsupport::person_capture(1, 1, 3.5);
    CHECK(window_count(s, 1.0) == 3);
    const auto features = series_features(s);
    REQUIRE(features.size() == 3);
    CHECK(features[2].window_id == 2);
    const auto direct = window_features(s.slice(100, 50), FeatureConfig{}, 2);
    CHECK(direct.values == features[2].values);
    CHECK_THROWS_AS(frames_per_window(50.0, 0.1), Error);
  }
}

TEST_CASE("PCA") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 1.0);

  SUBCASE("rank-one data") {
    Eigen::VectorXd axis(4);
    axis << 1, 2, -2, 0.5;
    axis.normalize();
    Eigen::MatrixXd x(50, 4);
    for (int i = 0; i < 50; ++i) x.row(i) = (3.0 + g(rng)) * axis.transpose() + Eigen::RowVector4d(1, 1, 1, 1);
    const auto m = fit_pca(x, 0.9);
    REQUIRE(m.components() == 1);
    CHECK(std::abs(std::abs(m.basis.row(0).dot(axis.transpose())) - 1.0) < 1e-10);
    // Largest-magnitude entry is positive.
    Eigen::Index at;
    m.basis.row(0).cwiseAbs().maxCoeff(&at);
    CHECK(m.basis(0, at) > 0);
  }
  SUBCASE("isotropic data keeps every component") {
    Eigen::MatrixXd x(3000, 3);
    for (int i = 0; i < x.rows(); ++i)
      for (int j = 0; j < 3; ++j) x(i, j) = g(rng);
    CHECK(fit_pca(x, 0.9).components() == 3);
  }
  SUBCASE("full retention equals the rank") {
    Eigen::MatrixXd base(40, 3);
    for (int i = 0; i < 40; ++i)
      for (int j = 0; j < 3; ++j) base(i, j) = g(rng);
    Eigen::MatrixXd mix(3, 6);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 6; ++j) mix(i, j) = g(rng);
    CHECK(fit_pca(base * mix, 1.0).components() == 3);
  }
  SUBCASE("projection properties") {
    Eigen::MatrixXd x(60, 8);
    for (int i = 0; i < 60; ++i)
      for (int j = 0; j < 8; ++j) x(i, j) = g(rng) * (j + 1);
    const auto m = fit_pca(x, 0.95);
    CHECK(project(m, m.mean).norm() < 1e-12);
    for (Eigen::Index r = 0; r < m.basis.rows(); ++r) {
      const Eigen::VectorXd y = project(m, m.mean + m.basis.row(r).transpose());
      for (Eigen::Index c = 0; c < y.size(); ++c) CHECK(y(c) == doctest::Approx(r == c ? 1.0 : 0.0).epsilon(1e-12));
    }
    CHECK(m.retained_fraction >= 0.95);
    // Variance kept by the reconstruction.
    const Eigen::MatrixXd centered = x.rowwise() - m.mean.transpose();
    double total = centered.squaredNorm(), kept = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      kept += (reconstruct(m, project(m, x.row(i).transpose())) - m.mean).squaredNorm();
    CHECK(kept / total >= 0.95 - 1e-12);
    CHECK(kept / total == doctest::Approx(m.retained_fraction).epsilon(1e-9));
    const Eigen::MatrixXd rows = project_rows(m, x);
    CHECK((rows.row(5).transpose() - project(m, x.row(5).transpose())).norm() < 1e-12);
  }
  SUBCASE("errors") {
    Eigen::MatrixXd constant = Eigen::MatrixXd::Constant(10, 4, 2.0);
    CHECK_THROWS_AS(fit_pca(constant, 0.9), Error);
    CHECK_THROWS_AS(fit_pca(Eigen::MatrixXd(1, 4), 0.9), Error);
    Eigen::MatrixXd ok(5, 2);
    ok << 1, 2, 3, 4, 5, 7, 1, 1, 0, 3;
    CHECK_THROWS_AS(fit_pca(ok, 0.0), Error);
    CHECK_THROWS_AS(fit_pca(ok, 1.5), Error);
    const auto m = fit_pca(ok, 0.9);
    CHECK_THROWS_AS(project(m, Eigen::VectorXd::Zero(3)), Error);
  }
}

TEST_CASE("normalizer") {
  Eigen::MatrixXd x(3, 3);
  x << 0, 5, 1, 10, 5, 2, 4, 5, 3;
  const auto n = fit_normalizer(x);
  Eigen::Vector3d v(5, 5, 12);
  const auto y = apply_normalizer(n, v);
  CHECK(y(0) == doctest::Approx(0.0));
  CHECK(y(1) == 0.0);
  CHECK(y(2) == 1.0);
  CHECK(apply_normalizer(n, Eigen::Vector3d(-4, 7, 0))(0) == -1.0);

  const auto rows = apply_normalizer_rows(n, x);
  CHECK(rows.col(0).minCoeff() == -1.0);
  CHECK(rows.col(0).maxCoeff() == 1.0);
  CHECK(rows.col(2).minCoeff() == -1.0);
  CHECK(rows.col(2).maxCoeff() == 1.0);
  CHECK(rows.col(1).cwiseAbs().maxCoeff() == 0.0);

  SUBCASE("affine invariance") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd a(20, 4);
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 4; ++j) a(i, j) = g(rng);
    Eigen::MatrixXd b = a;
    const double scales[] = {3.0, 0.01, 250.0, 7.5};
    const double shifts[] = {-1.0, 4.0, 0.0, 1e3};
    for (int j = 0; j < 4; ++j) b.col(j) = b.col(j) * scales[j] + Eigen::VectorXd::Constant(20, shifts[j]);
    const auto na = apply_normalizer_rows(fit_normalizer(a), a);
    const auto nb = apply_normalizer_rows(fit_normalizer(b), b);
    CHECK((na - nb).cwiseAbs().maxCoeff() < 1e-9);
  }
  CHECK_THROWS_AS(apply_normalizer(n, Eigen::Vector2d(1, 2)), Error);
}
