#pragma once

#include <filesystem>
#include <random>
#include <string>

namespace testutil {

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("plantsim_" + tag + "_" + std::to_string(rd()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil

#include "plantsim/dataset.hpp"
#include "plantsim/random.hpp"

namespace testutil {

// Annotation table shaped like the real maize data: 13 plants imaged on
// most of 27 days.
inline plantsim::dataset::DatasetManifest fake_maize_real(std::uint64_t seed = 1, int plants = 13) {
  using namespace plantsim;
  dataset::DatasetManifest m;
  Rng rng(seed);
  for (int p = 0; p < plants; ++p) {
    const int first = 1 + static_cast<int>(rng.below(5));
    for (int d = first; d <= 27; ++d) {
      dataset::Record r;
      r.plant_id = 100 + p;
      r.day = d;
      r.image_id = "real_maize_p" + std::to_string(r.plant_id) + "_d" + std::to_string(d);
      r.path = "images/" + r.image_id + ".png";
      r.view = "side";
      r.species = models::Species::maize;
      r.source = dataset::Source::real;
      r.task = annotation::Task::leaf_count;
      r.count = 1 + d / 3;
      m.records.push_back(r);
    }
  }
  return m;
}

// Canola-shaped table: `genotypes` genotypes with 3 plants each and 3-4
// flowering images per plant.
inline plantsim::dataset::DatasetManifest fake_canola_real(std::uint64_t seed = 1, int genotypes = 42) {
  using namespace plantsim;
  dataset::DatasetManifest m;
  Rng rng(seed);
  int plant = 0;
  for (int g = 0; g < genotypes; ++g) {
    for (int k = 0; k < 3; ++k, ++plant) {
      const int n = 3 + static_cast<int>(rng.below(2));
      for (int i = 0; i < n; ++i) {
        dataset::Record r;
        r.plant_id = plant;
        r.genotype_id = "G" + std::to_string(g);
        r.day = 30 + i;
        r.image_id = "real_canola_p" + std::to_string(plant) + "_d" + std::to_string(r.day);
        r.path = "images/" + r.image_id + ".png";
        r.view = "top";
        r.species = models::Species::canola;
        r.source = dataset::Source::real;
        r.task = annotation::Task::inflorescence_branch_count;
        r.count = 1 + static_cast<int>(rng.below(8));
        m.records.push_back(r);
      }
    }
  }
  return m;
}

// Synthetic-looking manifest without image files.
inline plantsim::dataset::DatasetManifest fake_synthetic(plantsim::models::Species species, int n) {
  using namespace plantsim;
  dataset::DatasetManifest m;
  for (int i = 0; i < n; ++i) {
    dataset::Record r;
    r.plant_id = i / 10;
    r.day = 1 + i % 10;
    r.image_id = "syn_" + std::to_string(i);
    r.path = "images/" + r.image_id + ".png";
    r.view = species == models::Species::maize ? "side" : "top";
    r.species = species;
    r.task = annotation::task_for(species);
    r.count = 1 + i % 7;
    m.records.push_back(r);
  }
  return m;
}

}  // namespace testutil
