#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "plantsim/error.hpp"
#include "plantsim/evaluate.hpp"
#include "plantsim/metrics.hpp"
#include "plantsim/random.hpp"

using namespace plantsim;
using namespace plantsim::metrics;

namespace {

using Vec = std::vector<double>;

// Deliberately naive two-pass formulas, written without reference to the
// library code.
struct Oracle {
  double mae, sd, r2, pearson, rmse;
  std::map<long long, double> hist;
};

Oracle oracle(const Vec& p, const Vec& t) {
  const double n = static_cast<double>(p.size());
  Oracle o{};
  double abs_sum = 0, sq_sum = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    abs_sum += std::fabs(t[i] - p[i]);
    sq_sum += (t[i] - p[i]) * (t[i] - p[i]);
  }
  o.mae = abs_sum / n;
  double v = 0;
  for (std::size_t i = 0; i < p.size(); ++i) v += (std::fabs(t[i] - p[i]) - o.mae) * (std::fabs(t[i] - p[i]) - o.mae);
  o.sd = std::sqrt(v / n);
  o.rmse = std::sqrt(sq_sum / n);
  double mt = 0, mp = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    mt += t[i];
    mp += p[i];
  }
  mt /= n;
  mp /= n;
  double stt = 0, spp = 0, spt = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    spp += (p[i] - mp) * (p[i] - mp);
    spt += (p[i] - mp) * (t[i] - mt);
  }
  o.r2 = 1.0 - sq_sum / stt;
  o.pearson = spt * spt / (spp * stt);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = t[i] - p[i];
    const long long b = d >= 0 ? static_cast<long long>(std::floor(d + 0.5)) : -static_cast<long long>(std::floor(-d + 0.5));
    o.hist[b] += 1;
  }
  return o;
}

void check_close(double a, double b) {
  CHECK(std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(b)));
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("hand examples") {
    const Vec p{4, 5, 9}, t{3, 5, 7};
    CHECK(mean_absolute_loss(p, t) == 1.0);
    CHECK(rmse(p, t) == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
    CHECK(abs_loss_sd(p, t) == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
    CHECK(r_squared(Vec{3, 2, 1}, Vec{1, 2, 3}) == -3.0);
    CHECK(mean_absolute_loss(Vec{2}, Vec{5}) == 3.0);
    CHECK(abs_loss_sd(Vec{2}, Vec{5}) == 0.0);
    CHECK(abs_loss_sd(Vec{1, 2, 3}, Vec{3, 4, 5}) == 0.0);
    CHECK(r_squared(t, t) == 1.0);
    CHECK(r_squared(Vec{5, 5, 5}, t) == doctest::Approx(0.0));
    CHECK(pearson_r2(Vec{7, 11, 15}, Vec{3, 5, 7}) == doctest::Approx(1.0));
    CHECK(pearson_r2(Vec{-3, -5, -7}, Vec{3, 5, 7}) == doctest::Approx(1.0));
  }

  TEST_CASE("input errors") {
    CHECK_THROWS_AS(mean_absolute_loss(Vec{}, Vec{}), Error);
    CHECK_THROWS_AS(rmse(Vec{1, 2}, Vec{1}), Error);
    CHECK_THROWS_AS(r_squared(Vec{1, 2}, Vec{4, 4}), Error);
    CHECK_THROWS_AS(pearson_r2(Vec{1, 1}, Vec{1, 2}), Error);
    const auto rep = compute_report(Vec{1, 2}, Vec{4, 4});
    CHECK(std::isnan(rep.r_squared));
    CHECK(rep.mae == 2.5);
  }

  TEST_CASE("brute-force oracle on 1000 random pairs") {
    Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t n = 2 + rng.below(60);
      Vec p(n), t(n);
      for (std::size_t i = 0; i < n; ++i) {
        t[i] = static_cast<double>(rng.below(30));
        p[i] = t[i] + rng.normal() * 3.0;
      }
      t[0] = t[1] + 1;  // never constant
      const auto o = oracle(p, t);
      check_close(mean_absolute_loss(p, t), o.mae);
      check_close(abs_loss_sd(p, t), o.sd);
      check_close(r_squared(p, t), o.r2);
      check_close(pearson_r2(p, t), o.pearson);
      check_close(rmse(p, t), o.rmse);
      CHECK(count_difference_histogram(p, t) == o.hist);
      CHECK(rmse(p, t) >= mean_absolute_loss(p, t) - 1e-15);
    }
  }

  TEST_CASE("permutation invariance") {
    Rng rng(5);
    Vec p(40), t(40);
    for (std::size_t i = 0; i < 40; ++i) {
      t[i] = rng.uniform() * 10;
      p[i] = rng.uniform() * 10;
    }
    const auto a = compute_report(p, t);
    std::vector<std::size_t> idx(40);
    std::iota(idx.begin(), idx.end(), 0);
    std::reverse(idx.begin(), idx.end());
    std::swap(idx[3], idx[17]);
    Vec p2, t2;
    for (auto i : idx) {
      p2.push_back(p[i]);
      t2.push_back(t[i]);
    }
    const auto b = compute_report(p2, t2);
    check_close(a.mae, b.mae);
    check_close(a.abs_loss_sd, b.abs_loss_sd);
    check_close(a.r_squared, b.r_squared);
    check_close(a.pearson_r2, b.pearson_r2);
    check_close(a.rmse, b.rmse);
    CHECK(a.count_difference == b.count_difference);
  }

  TEST_CASE("uncorrelated data has small squared correlation") {
    Rng rng(77);
    Vec p(1000), t(1000);
    for (std::size_t i = 0; i < 1000; ++i) {
      p[i] = rng.uniform();
      t[i] = rng.uniform();
    }
    CHECK(pearson_r2(p, t) < 0.05);
  }

  TEST_CASE("coefficient of determination equals squared correlation for the OLS fit") {
    Rng rng(8);
    Vec x(200), t(200);
    for (std::size_t i = 0; i < 200; ++i) {
      x[i] = rng.uniform() * 5;
      t[i] = 2 * x[i] + rng.normal();
    }
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / 200, mt = std::accumulate(t.begin(), t.end(), 0.0) / 200;
    double sxt = 0, sxx = 0;
    for (std::size_t i = 0; i < 200; ++i) {
      sxt += (x[i] - mx) * (t[i] - mt);
      sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double b = sxt / sxx, a = mt - b * mx;
    Vec p(200);
    for (std::size_t i = 0; i < 200; ++i) p[i] = a + b * x[i];
    CHECK(r_squared(p, t) == doctest::Approx(pearson_r2(p, t)).epsilon(1e-10));
  }

  TEST_CASE("count-difference histogram rounds half away from zero") {
    const auto h = count_difference_histogram(Vec{0, 1.6}, Vec{1.4, 1.0});
    CHECK(h == Histogram{{-1, 1}, {1, 1}});
    CHECK(count_difference_histogram(Vec{0, 0}, Vec{0.5, -0.5}) == Histogram{{-1, 1}, {1, 1}});
    CHECK(count_difference_histogram(Vec{3, 4, 5}, Vec{3, 4, 5}) == Histogram{{0, 3}});
  }

  TEST_CASE("histogram distance") {
    CHECK(histogram_distance({{1, 1}, {2, 1}}, {{1, 2}, {2, 0}}) == 0.5);
    CHECK(histogram_distance({{1, 3}}, {{2, 7}}) == 1.0);
    CHECK(histogram_distance({{1, 3}, {4, 1}}, {{1, 6}, {4, 2}}) == 0.0);
    CHECK_THROWS_AS(histogram_distance({}, {{1, 1}}), Error);
    CHECK_THROWS_AS(histogram_distance({{1, 0}}, {{1, 1}}), Error);

    Rng rng(13);
    auto random_hist = [&] {
      Histogram h;
      for (int k = 0; k < 6; ++k) h[static_cast<long long>(rng.below(8))] += 1 + static_cast<double>(rng.below(5));
      return h;
    };
    for (int i = 0; i < 300; ++i) {
      const auto a = random_hist(), b = random_hist(), c = random_hist();
      const double ab = histogram_distance(a, b);
      CHECK(ab == histogram_distance(b, a));
      CHECK(ab >= 0.0);
      CHECK(ab <= 1.0);
      CHECK(ab <= histogram_distance(a, c) + histogram_distance(c, b) + 1e-12);
    }
  }

  TEST_CASE("report formatting") {
    const Vec t{1, 2, 3, 4};
    const auto r = compute_report(t, t);
    CHECK(r.table_cell() == "0.00 (0.00, 1.00)");
    CHECK(compute_report(Vec{3, 2, 1}, Vec{1, 2, 3}).table_cell() == "1.33 (0.94, -3.00)");
    const auto json = report_to_json(r);
    CHECK(json.find("\"mae\"") != std::string::npos);
    CHECK(histogram_to_csv({{-1, 2}, {0, 5}}) == "bin,frequency\n-1,2\n0,5\n");
  }

  TEST_CASE("evaluate joins predictions to the test split") {
    const auto real = testutil::fake_maize_real();
    const auto split = dataset::split_experiment(real, {}, 4, dataset::SplitPolicy{}, 3);
    Predictions perfect;
    for (const auto& r : real.records) perfect[r.image_id] = r.count;
    CHECK(evaluate(perfect, real, split).table_cell() == "0.00 (0.00, 1.00)");
    CHECK(evaluate(perfect, real, split).n == split.test.size());

    // known errors: +0.5 on every test image
    Predictions shifted;
    for (const auto& id : split.test) shifted[id] = real.find(id)->count + 0.5;
    const auto rep = evaluate(shifted, real, split);
    check_close(rep.mae, 0.5);
    check_close(rep.abs_loss_sd, 0.0);
    check_close(rep.rmse, 0.5);

    Predictions missing = perfect;
    missing.erase(split.test[7]);
    try {
      evaluate(missing, real, split);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find(split.test[7]) != std::string::npos);
    }
  }

  TEST_CASE("prediction files") {
    const auto csv = predictions_to_csv({{"a", 1.5}, {"b", 2.0}});
    const auto p = parse_predictions(csv);
    CHECK(p.size() == 2);
    CHECK(p.at("a") == 1.5);
    CHECK_THROWS_AS(parse_predictions("image_id,predicted_count\na,1\na,2\n"), Error);
    CHECK_THROWS_AS(parse_predictions("image_id,count\na,1\n"), Error);
    CHECK_THROWS_AS(parse_predictions("image_id,predicted_count\na,notnum\n"), Error);
    // full precision survives the round trip
    const double x = 0.1 + 0.2;
    CHECK(parse_predictions(predictions_to_csv({{"x", x}})).at("x") == x);
  }
}
