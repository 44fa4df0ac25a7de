#pragma once

#include <map>
#include <span>
#include <string>

namespace plantsim::metrics {

// signed bin -> frequency
using Histogram = std::map<long long, double>;

// All functions below take (pred, truth) and throw plantsim::Error on
// length mismatch or empty input.
double mean_absolute_loss(std::span<const double> pred, std::span<const double> truth);
// Population standard deviation (divisor n) of |truth - pred|.
double abs_loss_sd(std::span<const double> pred, std::span<const double> truth);
// Coefficient of determination 1 - SS_res / SS_tot; negative for predictors
// worse than the mean. Throws when truth is constant.
double r_squared(std::span<const double> pred, std::span<const double> truth);
// Squared sample Pearson correlation. Throws on zero variance.
double pearson_r2(std::span<const double> pred, std::span<const double> truth);
double rmse(std::span<const double> pred, std::span<const double> truth);
// Bins round(truth - pred), rounding half away from zero.
Histogram count_difference_histogram(std::span<const double> pred, std::span<const double> truth);

// Total variation distance between the normalized histograms, in [0, 1].
// Throws when either histogram has zero (or negative) total mass.
double histogram_distance(const Histogram& a, const Histogram& b);

struct MetricsReport {
  std::size_t n = 0;
  double mae = 0.0;
  double abs_loss_sd = 0.0;
  double r_squared = 0.0;  // NaN when truth is constant
  double pearson_r2 = 0.0;  // NaN when either side is constant
  double rmse = 0.0;
  Histogram count_difference;

  // "MAE (SD, R2)" with two decimals, as used in result tables.
  std::string table_cell() const;
};

MetricsReport compute_report(std::span<const double> pred, std::span<const double> truth);

std::string report_to_json(const MetricsReport& report);
std::string histogram_to_csv(const Histogram& h, const std::string& header = "bin,frequency");

}  // namespace plantsim::metrics
