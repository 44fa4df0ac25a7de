#include "plantsim/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "plantsim/error.hpp"

namespace plantsim::metrics {

namespace {

void check(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) {
    throw Error("length mismatch: " + std::to_string(pred.size()) + " predictions vs " +
                std::to_string(truth.size()) + " ground-truth values");
  }
  if (pred.empty()) throw Error("empty input");
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double mean_absolute_loss(std::span<const double> pred, std::span<const double> truth) {
  check(pred, truth);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::fabs(truth[i] - pred[i]);
  return s / static_cast<double>(pred.size());
}

double abs_loss_sd(std::span<const double> pred, std::span<const double> truth) {
  const double m = mean_absolute_loss(pred, truth);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = std::fabs(truth[i] - pred[i]) - m;
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(pred.size()));
}

double r_squared(std::span<const double> pred, std::span<const double> truth) {
  check(pred, truth);
  if (pred.size() < 2) throw Error("r_squared needs at least 2 samples");
  const double mt = mean(truth);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    ss_tot += (truth[i] - mt) * (truth[i] - mt);
  }
  if (ss_tot == 0.0) throw Error("r_squared undefined: ground truth is constant");
  return 1.0 - ss_res / ss_tot;
}

double pearson_r2(std::span<const double> pred, std::span<const double> truth) {
  check(pred, truth);
  const double mp = mean(pred);
  const double mt = mean(truth);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sxy += (pred[i] - mp) * (truth[i] - mt);
    sxx += (pred[i] - mp) * (pred[i] - mp);
    syy += (truth[i] - mt) * (truth[i] - mt);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error("pearson correlation undefined: zero variance");
  const double r2 = (sxy * sxy) / (sxx * syy);
  return r2 > 1.0 ? 1.0 : r2;
}

double rmse(std::span<const double> pred, std::span<const double> truth) {
  check(pred, truth);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (truth[i] - pred[i]) * (truth[i] - pred[i]);
  return std::sqrt(s / static_cast<double>(pred.size()));
}

Histogram count_difference_histogram(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) throw Error("length mismatch");
  Histogram h;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    h[std::llround(truth[i] - pred[i])] += 1.0;  // llround rounds half away from zero
  }
  return h;
}

double histogram_distance(const Histogram& a, const Histogram& b) {
  double ta = 0.0, tb = 0.0;
  for (const auto& [k, v] : a) {
    if (v < 0.0) throw Error("negative histogram frequency");
    ta += v;
  }
  for (const auto& [k, v] : b) {
    if (v < 0.0) throw Error("negative histogram frequency");
    tb += v;
  }
  if (!(ta > 0.0) || !(tb > 0.0)) throw Error("empty histogram");
  std::set<long long> keys;
  for (const auto& [k, v] : a) keys.insert(k);
  for (const auto& [k, v] : b) keys.insert(k);
  double d = 0.0;
  for (long long k : keys) {
    const auto ia = a.find(k);
    const auto ib = b.find(k);
    const double pa = ia == a.end() ? 0.0 : ia->second / ta;
    const double pb = ib == b.end() ? 0.0 : ib->second / tb;
    d += std::fabs(pa - pb);
  }
  return std::min(1.0, 0.5 * d);
}

MetricsReport compute_report(std::span<const double> pred, std::span<const double> truth) {
  MetricsReport r;
  r.n = pred.size();
  r.mae = mean_absolute_loss(pred, truth);
  r.abs_loss_sd = abs_loss_sd(pred, truth);
  r.rmse = rmse(pred, truth);
  r.count_difference = count_difference_histogram(pred, truth);
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    r.r_squared = r_squared(pred, truth);
  } catch (const Error&) {
    r.r_squared = nan;
  }
  try {
    r.pearson_r2 = pearson_r2(pred, truth);
  } catch (const Error&) {
    r.pearson_r2 = nan;
  }
  return r;
}

std::string MetricsReport::table_cell() const {
  char buf[96];
  const double shown_r2 = std::isnan(r_squared) ? 0.0 : r_squared;
  std::snprintf(buf, sizeof buf, "%.2f (%.2f, %.2f)", mae + 0.0, abs_loss_sd + 0.0, shown_r2 + 0.0);
  return buf;
}

std::string report_to_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  auto num = [](double v) -> nlohmann::ordered_json {
    if (std::isnan(v)) return nullptr;
    return v;
  };
  j["n"] = report.n;
  j["mae"] = report.mae;
  j["abs_loss_sd"] = report.abs_loss_sd;
  j["r_squared"] = num(report.r_squared);
  j["pearson_r2"] = num(report.pearson_r2);
  j["rmse"] = report.rmse;
  nlohmann::ordered_json hist = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.count_difference) hist[std::to_string(k)] = v;
  j["count_difference_histogram"] = hist;
  j["table_cell"] = report.table_cell();
  return j.dump(2);
}

std::string histogram_to_csv(const Histogram& h, const std::string& header) {
  std::ostringstream out;
  out << header << '\n';
  for (const auto& [k, v] : h) out << k << ',' << v << '\n';
  return out.str();
}

}  // namespace plantsim::metrics
