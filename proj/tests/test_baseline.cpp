#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "plantsim/baseline.hpp"
#include "plantsim/dataset.hpp"
#include "plantsim/error.hpp"
#include "plantsim/random.hpp"

using namespace plantsim;
using namespace plantsim::baseline;

namespace {

std::vector<FeatureVector> random_features(Rng& rng, std::size_t n) {
  std::vector<FeatureVector> rows(n);
  for (auto& f : rows) {
    f[0] = 100 + rng.uniform() * 20000;
    f[1] = f[0] * (1.0 + rng.uniform());
    f[2] = 10 + rng.uniform() * 200;
    f[3] = 10 + rng.uniform() * 200;
    f[4] = static_cast<double>(1 + rng.below(27));
    f[5] = 1.0;
  }
  return rows;
}

double dot(const std::vector<double>& w, const FeatureVector& f) {
  double s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i];
  return s;
}

}  // namespace

TEST_SUITE("baseline") {
  TEST_CASE("features from masks") {
    BinaryMask empty(10, 10);
    CHECK(extract_features(empty, 3) == FeatureVector{0, 0, 0, 0, 3, 1});
    BinaryMask block(10, 10);
    block.at(4, 4) = block.at(5, 4) = block.at(4, 5) = block.at(5, 5) = 1;
    CHECK(extract_features(block, 5) == FeatureVector{4, 1.0, 2, 2, 5, 1});
  }

  TEST_CASE("features from a rendered image are deterministic") {
    const auto preset = models::maize_preset();
    const auto inst = models::sample_plant(preset, 6);
    const auto rd = dataset::render_plant_day(preset, inst, 18, 128, 128);
    const auto a = extract_features(rd.result.image, render::kDefaultBackground, 18);
    const auto b = extract_features(rd.result.image, render::kDefaultBackground, 18);
    CHECK(a == b);
    std::size_t fg = 0;
    for (std::size_t i = 0; i < rd.result.ids.size(); ++i) fg += rd.result.ids[i] != 0;
    CHECK(a[0] == doctest::Approx(static_cast<double>(fg)).epsilon(0.05));
    CHECK(a[1] >= a[0] * 0.5);
    CHECK(a[4] == 18);
  }

  TEST_CASE("exact linear targets recover the coefficients") {
    Rng rng(1);
    const auto rows = random_features(rng, 80);
    const std::vector<double> w{0.002, -0.0007, 0.03, 0.011, 0.4, 1.5};
    std::vector<double> y;
    for (const auto& f : rows) y.push_back(dot(w, f));
    const auto m = fit(std::span<const FeatureVector>(rows), y);
    REQUIRE(m.weights.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(std::fabs(m.weights[i] - w[i]) <= 1e-8 * std::max(1.0, std::fabs(w[i])));
    CHECK_FALSE(m.ridge_used);
  }

  TEST_CASE("constant targets give a bias-only model") {
    Rng rng(2);
    const auto rows = random_features(rng, 30);
    const std::vector<double> y(30, 4.25);
    const auto m = fit(std::span<const FeatureVector>(rows), y);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::fabs(m.weights[i]) < 1e-9);
    CHECK(m.weights[5] == doctest::Approx(4.25).epsilon(1e-9));
  }

  TEST_CASE("noisy fit matches a direct normal-equation solve") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const auto rows = random_features(rng, 50 + rng.below(100));
      std::vector<double> y;
      for (const auto& f : rows) y.push_back(0.001 * f[0] + 0.2 * f[4] + 2 + rng.normal() * 1.5);
      const auto m = fit(std::span<const FeatureVector>(rows), y);

      Eigen::MatrixXd X(rows.size(), 6);
      Eigen::VectorXd Y(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int j = 0; j < 6; ++j) X(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
        Y(static_cast<Eigen::Index>(i)) = y[i];
      }
      const Eigen::VectorXd w = X.colPivHouseholderQr().solve(Y);
      for (int j = 0; j < 6; ++j)
        CHECK(std::fabs(m.weights[static_cast<std::size_t>(j)] - w(j)) <= 1e-6 * std::max(1.0, std::fabs(w(j))));

      // residual orthogonal to every feature column
      const Eigen::VectorXd r = Y - X * Eigen::Map<const Eigen::VectorXd>(m.weights.data(), 6);
      for (int j = 0; j < 6; ++j) CHECK(std::fabs(X.col(j).dot(r)) <= 1e-6 * X.col(j).norm() * Y.norm());

      // training MSE never exceeds the constant-mean predictor's
      double mean = 0;
      for (double v : y) mean += v;
      mean /= static_cast<double>(y.size());
      double mse = 0, mse0 = 0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const double e = predict(m, rows[i]) - y[i];
        mse += e * e;
        mse0 += (mean - y[i]) * (mean - y[i]);
      }
      CHECK(mse <= mse0 + 1e-9);
    }
  }

  TEST_CASE("singular systems fall back to ridge") {
    // two identical columns
    std::vector<std::vector<double>> rows;
    std::vector<double> y;
    for (int i = 0; i < 12; ++i) {
      const double x = i;
      rows.push_back({x, x, 1.0});
      y.push_back(3 * x + 1);
    }
    const auto m = fit(std::span<const std::vector<double>>(rows), y);
    CHECK(m.ridge_used);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(predict(m, rows[i]) == doctest::Approx(y[i]).epsilon(1e-6));
  }

  TEST_CASE("fit input errors") {
    std::vector<std::vector<double>> rows{{1, 2}, {3, 4}};
    CHECK_THROWS_AS(fit(std::span<const std::vector<double>>(rows), std::vector<double>{1}), Error);
    std::vector<std::vector<double>> few{{1, 2, 3}};
    CHECK_THROWS_AS(fit(std::span<const std::vector<double>>(few), std::vector<double>{1}), Error);
    std::vector<std::vector<double>> ragged{{1, 2}, {3}, {4, 5}};
    CHECK_THROWS_AS(fit(std::span<const std::vector<double>>(ragged), std::vector<double>{1, 2, 3}), Error);
  }

  TEST_CASE("predict is linear and checks arity") {
    Rng rng(9);
    LinearModel m;
    for (int i = 0; i < 5; ++i) m.weights.push_back(rng.normal());
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> f1(5), f2(5), mix(5);
      const double a = rng.normal(), b = rng.normal();
      for (int i = 0; i < 5; ++i) {
        f1[static_cast<std::size_t>(i)] = rng.normal();
        f2[static_cast<std::size_t>(i)] = rng.normal();
        mix[static_cast<std::size_t>(i)] = a * f1[static_cast<std::size_t>(i)] + b * f2[static_cast<std::size_t>(i)];
      }
      CHECK(predict(m, mix) == doctest::Approx(a * predict(m, f1) + b * predict(m, f2)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(predict(m, std::vector<double>{1, 2}), Error);
    LinearModel zero{{0, 0, 0}, false};
    CHECK(predict(zero, std::vector<double>{5, 6, 7}) == 0.0);
    LinearModel bias{{0, 0, 2.5}, false};
    CHECK(predict(bias, std::vector<double>{5, 6, 1}) == 2.5);
  }

  TEST_CASE("model JSON round trip") {
    LinearModel m{{0.1, -2e-7, 3.25, 1.0 / 3.0, 0, 7}, true};
    const auto back = model_from_json(model_to_json(m));
    CHECK(back.weights == m.weights);
    CHECK(back.ridge_used);
    CHECK_THROWS_AS(model_from_json("{\"weights\": \"x\"}"), Error);
    CHECK_THROWS_AS(model_from_json("not json"), Error);
  }
}
