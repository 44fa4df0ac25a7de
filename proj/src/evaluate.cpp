#include "plantsim/evaluate.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "plantsim/csv.hpp"
#include "plantsim/error.hpp"

namespace plantsim::metrics {

Predictions parse_predictions(std::string_view text) {
  const csv::Table t = csv::parse(text);
  const auto id_col = t.column("image_id");
  const auto p_col = t.column("predicted_count");
  if (!id_col || !p_col) throw Error("prediction file needs columns image_id, predicted_count");
  Predictions out;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& id = t.rows[k][*id_col];
    const auto& v = t.rows[k][*p_col];
    double x = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
      throw ParseError(t.lines[k], 1, "bad predicted_count '" + v + "'");
    if (!out.emplace(id, x).second) throw ParseError(t.lines[k], 1, "duplicate prediction for " + id);
  }
  return out;
}

Predictions read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_predictions(ss.str());
  } catch (const ParseError& e) {
    throw Error(path.string() + ":" + std::to_string(e.line()) + ": " + e.detail());
  }
}

std::string predictions_to_csv(const std::vector<std::pair<std::string, double>>& rows) {
  std::string out = "image_id,predicted_count\n";
  char buf[64];
  for (const auto& [id, v] : rows) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out += csv::escape(id) + "," + std::string(buf, end) + "\n";
  }
  return out;
}

MetricsReport evaluate(const Predictions& predictions, const dataset::DatasetManifest& manifest,
                       const dataset::ExperimentSplit& split) {
  if (split.test.empty()) throw Error("split has no test images");
  std::unordered_map<std::string, int> truth_of;
  for (const auto& r : manifest.records) truth_of.emplace(r.image_id, r.count);
  std::vector<double> pred, truth;
  std::vector<std::string> missing_pred, missing_truth;
  for (const auto& id : split.test) {
    const auto t = truth_of.find(id);
    if (t == truth_of.end()) {
      missing_truth.push_back(id);
      continue;
    }
    const auto p = predictions.find(id);
    if (p == predictions.end()) {
      missing_pred.push_back(id);
      continue;
    }
    pred.push_back(p->second);
    truth.push_back(t->second);
  }
  auto join = [](const std::vector<std::string>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? ", " : "") + ids[i];
    return s;
  };
  if (!missing_truth.empty()) throw Error("test ids not in manifest: " + join(missing_truth));
  if (!missing_pred.empty()) throw Error("missing predictions for: " + join(missing_pred));
  return compute_report(pred, truth);
}

}  // namespace plantsim::metrics
