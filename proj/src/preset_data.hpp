#pragma once

#include <cstddef>
#include <string_view>

namespace plantsim::models::detail {

struct PresetFile {
  std::string_view name;
  std::string_view text;
};

extern const PresetFile kPresetFiles[];
extern const std::size_t kPresetFileCount;

}  // namespace plantsim::models::detail
