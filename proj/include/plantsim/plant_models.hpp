#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plantsim/lsystem.hpp"
#include "plantsim/render.hpp"
#include "plantsim/turtle.hpp"

namespace plantsim::models {

enum class Species { maize, canola };

const char* species_name(Species s);
Species parse_species(std::string_view name);

// Branch-count histogram: count -> frequency (weights need not be normalized).
using Histogram = std::map<long long, double>;

// Per-plant parameter drawn from Normal(mean, sd), clamped to mean +- 3 sd and
// to [lower, upper]. The drawn value replaces the model constant of the same
// name.
struct StochasticParam {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double lower = -1e300;
  double upper = 1e300;
  bool operator==(const StochasticParam&) const = default;
};

struct ViewSpec {
  enum class Kind { side, top };
  Kind kind = Kind::side;
  double min_extent = 10.0;  // cm; the camera frames the plant but never tighter than this
  bool operator==(const ViewSpec&) const = default;
};

// Named constants the calibration routine and the UI address.
inline constexpr std::string_view kBranchVigour = "branch_vigour";
inline constexpr std::string_view kBranchThreshold = "branch_threshold";

struct PlantModelPreset {
  std::string name;  // "maize", "canola3", ...
  Species species = Species::maize;
  int variant = 1;
  int timeline_days = 1;
  lsys::ModelDefinition model;
  std::vector<StochasticParam> params;
  Histogram target_histogram;  // canola variants >= 3
  ViewSpec view;
  turtle::Material stem_material = turtle::Material::flat_color({70, 120, 40});
  std::vector<turtle::Material> leaf_materials{turtle::Material{}};
  std::vector<turtle::Material> petal_materials{turtle::Material::flat_color({250, 220, 40})};
  turtle::Material flower_center = turtle::Material::flat_color({200, 150, 20});
  std::vector<std::string> notes;  // variant change ledger

  void validate() const;

  const StochasticParam* param(std::string_view name) const;
  StochasticParam* param(std::string_view name);
  double phyllotaxy() const { return model.constant("phyllotaxy"); }
  // Stretch of the organ growth curves (largest across growth functions that
  // drive organ size).
  double growth_stretch() const;

  turtle::InterpretConfig interpret_config() const;

  bool operator==(const PlantModelPreset&) const = default;
};

// Preset file = model file plus header directives:
//   species: canola
//   variant: 3
//   timeline: 38
//   param: branch_vigour mean 1.2 sd 0.3 bounds 0 10
//   target: 1:4 2:10 3:18
//   view: top 20
//   material: leaf0 midvein 60 140 50 240 240 240 | stem flat r g b | petal0 texture name
//   note: free text
PlantModelPreset parse_preset(std::string_view text, std::string name = {});
std::string serialize_preset(const PlantModelPreset& preset);

// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string preset_hash(const PlantModelPreset& preset);

std::vector<std::string> builtin_preset_names();
std::string builtin_preset_text(std::string_view name);
// Accepts "maize", "canola1".."canola5", "canola_v3" or a path to a preset file.
PlantModelPreset load_preset(std::string_view name_or_path);

PlantModelPreset maize_preset();
PlantModelPreset canola_preset(int variant);

// Keys: "<param>.mean", "<param>.sd" for stochastic parameters, or a model
// constant name. Throws plantsim::Error naming the first unknown key.
using Overrides = std::map<std::string, double>;
PlantModelPreset apply_overrides(const PlantModelPreset& preset, const Overrides& overrides);

// ---------------------------------------------------------------------------
// Topology of a derived string.

struct DayTopology {
  int day = 0;
  int leaf_count = 0;
  int branch_count = 1;  // main raceme + qualifying first-order laterals
  int open_flowers = 0;
  bool operator==(const DayTopology&) const = default;
};

int count_leaves(const lsys::SymbolString& s);
int count_open_flowers(const lsys::SymbolString& s);
// Main axis counts as 1; each first-order branch (a bracket directly off the
// main axis) counts when it contains an internode F and at least one Flower.
// Leaf and pedicel brackets carry no internode and so never count.
int count_inflorescence_branches(const lsys::SymbolString& s);

struct PlantInstance {
  std::string preset_name;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> sampled;
  std::vector<double> constants;       // model constants with sampled values bound
  std::vector<lsys::SymbolString> days;  // days[d - 1] is the string on day d
  std::vector<DayTopology> topology;   // parallel to days

  int timeline() const { return static_cast<int>(days.size()); }
  const lsys::SymbolString& day(int d) const { return days.at(static_cast<std::size_t>(d - 1)); }
  const DayTopology& day_topology(int d) const { return topology.at(static_cast<std::size_t>(d - 1)); }
  const DayTopology& final_topology() const { return topology.back(); }
  bool flowering(int d) const { return day_topology(d).open_flowers > 0; }
};

// Parameter draws come from mix64(seed, 0) and derivation draws from
// mix64(seed, 1); one rewriting step per simulated day.
PlantInstance sample_plant(const PlantModelPreset& preset, std::uint64_t seed);

// Final-day branch count without keeping intermediate strings; equals
// sample_plant(preset, seed).final_topology().branch_count.
int simulate_branch_count(const PlantModelPreset& preset, std::uint64_t seed);

// Histogram of final branch counts over n plants seeded mix64(seed, i).
Histogram simulate_branch_histogram(const PlantModelPreset& preset, std::size_t n, std::uint64_t seed,
                                    unsigned threads = 1);

// ---------------------------------------------------------------------------
// Calibration

struct CalibrationGrid {
  std::vector<double> vigour_mean;
  std::vector<double> vigour_sd;
  std::vector<double> threshold;
};

struct GridEvaluation {
  double vigour_mean = 0.0;
  double vigour_sd = 0.0;
  double threshold = 0.0;
  double distance = 0.0;
  Histogram histogram;
};

struct CalibrationResult {
  PlantModelPreset preset;
  GridEvaluation best;
  std::vector<GridEvaluation> evaluated;  // lexicographic grid order
};

// Exhaustive grid search minimizing the total-variation distance between the
// simulated branch-count histogram and `target`. Every grid point uses the
// same plant seeds. Ties go to the lexicographically smallest
// (mean, sd, threshold).
CalibrationResult calibrate_branch_distribution(const PlantModelPreset& preset, const Histogram& target,
                                                const CalibrationGrid& grid, std::size_t n_samples,
                                                std::uint64_t seed, unsigned threads = 1);

}  // namespace plantsim::models
