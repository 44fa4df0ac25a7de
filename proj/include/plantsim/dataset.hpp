#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "plantsim/annotation.hpp"
#include "plantsim/image.hpp"
#include "plantsim/plant_models.hpp"
#include "plantsim/render.hpp"

namespace plantsim::dataset {

const char* tool_version();

enum class Source { real, synthetic };
const char* source_name(Source s);

struct Record {
  std::string image_id;
  std::string path;  // relative to the manifest directory (or absolute)
  int plant_id = 0;
  std::string genotype_id;  // blank for synthetic plants
  int day = 0;
  std::string view;  // "side" or "top"
  models::Species species = models::Species::maize;
  Source source = Source::synthetic;
  int variant = 1;
  annotation::Task task = annotation::Task::leaf_count;
  int count = 0;

  bool operator==(const Record&) const = default;
};

struct DroppedDay {
  int plant_id = 0;
  int day = 0;
  std::string reason;
  int count = 0;  // annotation count at the time it was dropped
};

struct Provenance {
  std::uint64_t seed = 0;
  std::string preset;
  std::string preset_hash;
  std::string tool_version;
  int n_plants = 0;
  int resolution = 0;
  int min_pixels = 0;
  int max_days_per_plant = 0;
};

struct DatasetManifest {
  std::vector<Record> records;
  Provenance provenance;
  std::vector<DroppedDay> dropped;
  std::vector<std::string> warnings;

  const Record* find(std::string_view image_id) const;
};

inline constexpr const char* kManifestColumns[] = {"image_id", "path", "plant_id", "genotype_id", "day", "view",
                                                   "species",  "source", "variant", "task",  "count"};

std::string manifest_to_csv(const DatasetManifest& m);
// Parses a manifest CSV (all columns required). Throws ParseError naming the
// line of the first malformed row.
DatasetManifest manifest_from_csv(std::string_view text);
std::string provenance_to_json(const DatasetManifest& m);

// Writes manifest.csv and manifest.json into `dir`.
void write_manifest(const std::filesystem::path& dir, const DatasetManifest& m);
// Reads a manifest CSV; the JSON sidecar next to it is loaded when present.
DatasetManifest read_manifest(const std::filesystem::path& csv_path);

// Resolves a record's image path against the manifest location.
std::filesystem::path image_path(const std::filesystem::path& manifest_csv, const Record& r);

// ---------------------------------------------------------------------------
// Synthetic generation

struct GenerateOptions {
  int n_plants = 1;
  std::uint64_t seed = 0;
  int resolution = 256;
  int min_pixels = 0;          // 0 selects annotation::default_min_pixels
  int max_days_per_plant = -1;  // -1: 6 for canola, unlimited for maize; 0: unlimited
  unsigned threads = 1;
  bool write_id_buffers = false;  // debug dumps under ids/
};

struct RenderedDay {
  turtle::Scene scene;
  render::Camera camera;
  render::RenderResult result;
};

render::ViewDirection view_direction(const models::PlantModelPreset& preset);
RenderedDay render_plant_day(const models::PlantModelPreset& preset, const models::PlantInstance& instance, int day,
                             int width, int height);

std::string synthetic_image_id(const models::PlantModelPreset& preset, int plant, int day);

// Plant p uses seed mix64(seed, p). Maize keeps days with at least one
// visible leaf; canola keeps flowering days, at most max_days_per_plant of
// them per plant (chosen at random from mix64(seed_p, 2)). Output does not
// depend on options.threads.
DatasetManifest generate_dataset(const models::PlantModelPreset& preset, const GenerateOptions& options,
                                 const std::filesystem::path& out_dir);

// Hex FNV-1a of the manifest CSV text.
std::string manifest_hash(const DatasetManifest& m);

// Real annotation table: columns image_id, path, plant_id, day, species,
// task, count are required; genotype_id, view, variant optional; source, if
// present, must be "real". Missing image files are listed in warnings.
DatasetManifest ingest_real_annotations(const std::filesystem::path& csv_path, const std::filesystem::path& image_root);

// ---------------------------------------------------------------------------
// Experiment splits

enum class UnitType { plant, genotype };
enum class TestPolicy { fixed_100, all_remaining };
enum class Augmentation { none, all, equal_count };

const char* unit_type_name(UnitType u);
const char* test_policy_name(TestPolicy p);
const char* augmentation_name(Augmentation a);
TestPolicy parse_test_policy(std::string_view s);
Augmentation parse_augmentation(std::string_view s);

struct SplitPolicy {
  TestPolicy test = TestPolicy::fixed_100;
  Augmentation synthetic = Augmentation::none;
  int maize_test_plants = 5;
  std::size_t test_images = 100;
};

struct ExperimentSplit {
  std::vector<std::string> train;
  std::vector<std::string> test;
  UnitType unit = UnitType::plant;
  std::vector<std::string> train_units;
  std::vector<std::string> test_units;
  SplitPolicy policy;
  std::uint64_t seed = 0;
  int i_units = 0;
  std::size_t real_train_images = 0;
  std::size_t real_train_plants = 0;
  std::size_t synthetic_train_images = 0;
  std::vector<std::string> warnings;

  // "2 real plant (51)", "3 genotypes (9, 32)", "0 real plant", "0 real data"
  std::string row_label() const;
};

// Maize units are plants and the test pool is every image of
// policy.maize_test_plants held-out plants; canola units are genotypes and
// the pool is every remaining image.
ExperimentSplit split_experiment(const DatasetManifest& real, const DatasetManifest& synthetic, int i_units,
                                 const SplitPolicy& policy, std::uint64_t seed);

std::string split_to_json(const ExperimentSplit& s);
ExperimentSplit split_from_json(std::string_view text);

// ---------------------------------------------------------------------------
// Augmentation

struct AugmentOp {
  enum class Kind { crop, hflip, brightness, contrast };
  Kind kind = Kind::hflip;
  int x = 0, y = 0, width = 0, height = 0;  // crop box
  double amount = 0.0;                      // brightness delta or contrast factor

  static AugmentOp crop(int x, int y, int w, int h) { return {Kind::crop, x, y, w, h, 0.0}; }
  static AugmentOp hflip() { return {Kind::hflip, 0, 0, 0, 0, 0.0}; }
  static AugmentOp brightness(double delta) { return {Kind::brightness, 0, 0, 0, 0, delta}; }
  static AugmentOp contrast(double factor) { return {Kind::contrast, 0, 0, 0, 0, factor}; }
};

// Applies ops in order. Contrast scales about mid-grey 128; channel values
// are rounded and clamped to 0..255.
RasterImage augment(const RasterImage& image, std::span<const AugmentOp> ops);

// Random crop (at least 80% per side), flip with probability 1/2,
// brightness in [-20, 20] and contrast in [0.8, 1.2].
std::vector<AugmentOp> random_augmentation(int width, int height, std::uint64_t seed);

}  // namespace plantsim::dataset
