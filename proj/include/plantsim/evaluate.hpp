#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "plantsim/dataset.hpp"
#include "plantsim/metrics.hpp"

namespace plantsim::metrics {

using Predictions = std::map<std::string, double, std::less<>>;

// CSV with columns image_id, predicted_count. Duplicate ids are an error.
Predictions parse_predictions(std::string_view text);
Predictions read_predictions(const std::filesystem::path& path);
std::string predictions_to_csv(const std::vector<std::pair<std::string, double>>& rows);

// Joins predictions to ground truth over the split's test ids. Throws
// naming every test id without a prediction.
MetricsReport evaluate(const Predictions& predictions, const dataset::DatasetManifest& manifest,
                       const dataset::ExperimentSplit& split);

}  // namespace plantsim::metrics
