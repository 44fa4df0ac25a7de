#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "plantsim/image.hpp"
#include "plantsim/plant_models.hpp"
#include "plantsim/turtle.hpp"

namespace plantsim::annotation {

enum class Task { leaf_count, inflorescence_branch_count };

const char* task_name(Task t);
Task parse_task(std::string_view name);
// maize -> leaf_count, canola -> inflorescence_branch_count
Task task_for(models::Species species);

struct OrganVisibility {
  std::uint32_t organ_id = 0;
  std::size_t pixels = 0;
  bool operator==(const OrganVisibility&) const = default;
};

struct VisibleLeaves {
  int count = 0;
  std::vector<OrganVisibility> leaves;  // every leaf organ in scene order, including hidden ones
};

// 25 pixels at 256x256, scaled with the pixel count; never below 1.
int default_min_pixels(int width, int height);

// A leaf counts iff at least min_pixels pixels of the id buffer carry its id.
VisibleLeaves count_visible_leaves(const OrganIdBuffer& ids, const turtle::Scene& scene, int min_pixels);

// Topological count for day `day` (0 = final day); see
// models::count_inflorescence_branches for the convention.
int count_inflorescence_branches(const models::PlantInstance& instance, int day = 0);

struct AnnotationRecord {
  std::string image_id;
  int plant_id = 0;
  int day = 0;
  models::Species species = models::Species::maize;
  Task task = Task::leaf_count;
  int count = 0;
  std::vector<OrganVisibility> visibility;
};

// Throws plantsim::Error when the task does not fit the species or the id
// buffer does not match the scene's render.
AnnotationRecord annotate(const models::PlantInstance& instance, models::Species species, int day,
                          const turtle::Scene& scene, const OrganIdBuffer& ids, Task task, int min_pixels);

}  // namespace plantsim::annotation
