#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plantsim/image.hpp"
#include "plantsim/preprocess.hpp"

namespace plantsim::baseline {

inline constexpr std::size_t kFeatureCount = 6;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "foreground_pixels", "hull_area", "bbox_height", "bbox_width", "day", "bias"};

// (foreground pixel count, convex hull area, bbox height, bbox width, day, 1)
using FeatureVector = std::array<double, kFeatureCount>;

FeatureVector extract_features(const BinaryMask& mask, int day);
FeatureVector extract_features(const RasterImage& image, Rgb background, int day,
                               const preprocess::SegmentOptions& options = {});

struct LinearModel {
  std::vector<double> weights;
  bool ridge_used = false;
};

// Ordinary least squares through the normal equations on column-scaled
// features. Falls back to a ridge term of 1e-8 when the system is singular.
LinearModel fit(std::span<const std::vector<double>> rows, std::span<const double> targets);
LinearModel fit(std::span<const FeatureVector> rows, std::span<const double> targets);

double predict(const LinearModel& model, std::span<const double> features);

std::string model_to_json(const LinearModel& model);
LinearModel model_from_json(std::string_view text);

}  // namespace plantsim::baseline
