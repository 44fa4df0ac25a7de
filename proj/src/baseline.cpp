#include "plantsim/baseline.hpp"

#include <cmath>

#include <json.hpp>

#include "plantsim/error.hpp"

namespace plantsim::baseline {

FeatureVector extract_features(const BinaryMask& mask, int day) {
  const auto box = preprocess::mask_bounds(mask);
  return {static_cast<double>(mask.count()), preprocess::convex_hull_area(mask), static_cast<double>(box.height),
          static_cast<double>(box.width), static_cast<double>(day), 1.0};
}

FeatureVector extract_features(const RasterImage& image, Rgb background, int day,
                               const preprocess::SegmentOptions& options) {
  return extract_features(preprocess::segment_plant(image, background, options), day);
}

namespace {

// Gaussian elimination with partial pivoting; false when a pivot vanishes.
bool solve(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
  const std::size_t n = b.size();
  double scale = 0.0;
  for (const auto& row : a)
    for (double v : row) scale = std::max(scale, std::fabs(v));
  const double tiny = scale * 1e-13;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    if (!(std::fabs(a[piv][c]) > tiny)) return false;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

LinearModel fit(std::span<const std::vector<double>> rows, std::span<const double> targets) {
  if (rows.size() != targets.size()) throw Error("feature and target counts differ");
  if (rows.empty()) throw Error("no training samples");
  const std::size_t p = rows.front().size();
  if (p == 0) throw Error("empty feature vectors");
  if (rows.size() < p)
    throw Error("need at least " + std::to_string(p) + " samples, got " + std::to_string(rows.size()));
  for (const auto& r : rows) {
    if (r.size() != p) throw Error("feature vectors have different lengths");
    for (double v : r)
      if (!std::isfinite(v)) throw Error("non-finite feature value");
  }
  for (double t : targets)
    if (!std::isfinite(t)) throw Error("non-finite target value");

  // Scale columns to unit max magnitude so pixel counts and the bias share a range.
  std::vector<double> colscale(p, 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < p; ++j) colscale[j] = std::max(colscale[j], std::fabs(r[j]));
  for (double& s : colscale)
    if (s == 0.0) s = 1.0;

  std::vector<std::vector<double>> a(p, std::vector<double>(p, 0.0));
  std::vector<double> b(p, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const double xj = rows[i][j] / colscale[j];
      b[j] += xj * targets[i];
      for (std::size_t k = 0; k < p; ++k) a[j][k] += xj * (rows[i][k] / colscale[k]);
    }
  }

  LinearModel m;
  std::vector<double> w;
  if (!solve(a, b, w)) {
    for (std::size_t j = 0; j < p; ++j) a[j][j] += 1e-8;
    if (!solve(a, b, w)) throw Error("least-squares system is singular even with ridge regularization");
    m.ridge_used = true;
  }
  m.weights.resize(p);
  for (std::size_t j = 0; j < p; ++j) m.weights[j] = w[j] / colscale[j];
  return m;
}

LinearModel fit(std::span<const FeatureVector> rows, std::span<const double> targets) {
  std::vector<std::vector<double>> r;
  r.reserve(rows.size());
  for (const auto& f : rows) r.emplace_back(f.begin(), f.end());
  return fit(std::span<const std::vector<double>>(r), targets);
}

double predict(const LinearModel& model, std::span<const double> features) {
  if (features.size() != model.weights.size())
    throw Error("feature arity " + std::to_string(features.size()) + " does not match model arity " +
                std::to_string(model.weights.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) s += model.weights[i] * features[i];
  return s;
}

std::string model_to_json(const LinearModel& model) {
  nlohmann::ordered_json j;
  if (model.weights.size() == kFeatureCount)
    j["features"] = std::vector<std::string>(kFeatureNames.begin(), kFeatureNames.end());
  j["weights"] = model.weights;
  j["ridge_used"] = model.ridge_used;
  return j.dump(2) + "\n";
}

LinearModel model_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    LinearModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.ridge_used = j.value("ridge_used", false);
    if (m.weights.empty()) throw Error("model has no weights");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace plantsim::baseline
