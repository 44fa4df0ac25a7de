#include "plantsim/annotation.hpp"

#include <cmath>
#include <unordered_map>

#include "plantsim/error.hpp"

namespace plantsim::annotation {

const char* task_name(Task t) {
  return t == Task::leaf_count ? "leaf_count" : "inflorescence_branch_count";
}

Task parse_task(std::string_view name) {
  if (name == "leaf_count") return Task::leaf_count;
  if (name == "inflorescence_branch_count") return Task::inflorescence_branch_count;
  throw Error("unknown task '" + std::string(name) + "'");
}

Task task_for(models::Species species) {
  return species == models::Species::maize ? Task::leaf_count : Task::inflorescence_branch_count;
}

int default_min_pixels(int width, int height) {
  const double scaled = 25.0 * static_cast<double>(width) * static_cast<double>(height) / (256.0 * 256.0);
  return std::max(1, static_cast<int>(std::lround(scaled)));
}

VisibleLeaves count_visible_leaves(const OrganIdBuffer& ids, const turtle::Scene& scene, int min_pixels) {
  if (min_pixels <= 0) throw Error("min_pixels must be positive");
  std::unordered_map<std::uint32_t, std::size_t> pixels;
  for (std::uint32_t id : ids.cells())
    if (id != 0) ++pixels[id];
  VisibleLeaves out;
  for (const auto& m : scene.meshes) {
    if (m.kind != turtle::OrganKind::leaf) continue;
    const auto it = pixels.find(m.organ_id);
    const std::size_t n = it == pixels.end() ? 0 : it->second;
    out.leaves.push_back({m.organ_id, n});
    if (n >= static_cast<std::size_t>(min_pixels)) ++out.count;
  }
  return out;
}

int count_inflorescence_branches(const models::PlantInstance& instance, int day) {
  if (instance.days.empty()) return 1;
  if (day == 0) return instance.final_topology().branch_count;
  return instance.day_topology(day).branch_count;
}

AnnotationRecord annotate(const models::PlantInstance& instance, models::Species species, int day,
                          const turtle::Scene& scene, const OrganIdBuffer& ids, Task task, int min_pixels) {
  if (task != task_for(species))
    throw Error(std::string("task ") + task_name(task) + " does not apply to " + models::species_name(species));
  if (day < 1 || day > instance.timeline()) throw Error("day " + std::to_string(day) + " outside the timeline");
  AnnotationRecord r;
  r.day = day;
  r.species = species;
  r.task = task;
  if (task == Task::leaf_count) {
    for (std::uint32_t id : ids.cells())
      if (id > scene.organ_count) throw Error("id buffer does not belong to this scene");
    auto v = count_visible_leaves(ids, scene, min_pixels);
    r.count = v.count;
    r.visibility = std::move(v.leaves);
  } else {
    r.count = count_inflorescence_branches(instance, day);
  }
  return r;
}

}  // namespace plantsim::annotation
