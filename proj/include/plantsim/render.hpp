#pragma once

#include <string_view>

#include "plantsim/geometry.hpp"
#include "plantsim/image.hpp"
#include "plantsim/turtle.hpp"

namespace plantsim::render {

struct Camera {
  enum class Kind { orthographic, perspective };

  Kind kind = Kind::orthographic;
  Vec3 position{0, 0, 10};
  Vec3 target{0, 0, 0};
  Vec3 up{0, 1, 0};
  double extent = 2.0;  // orthographic: visible world height
  double fov_deg = 45.0;  // perspective: vertical field of view
  int width = 256;
  int height = 256;

  void validate() const;
};

struct DirectionalLight {
  Vec3 direction{-0.3, -0.4, -1.0};  // direction the light travels
  double ambient = 0.45;
  double diffuse = 0.55;
};

// Outside every material's gamut (blue dominant), so pixel colour alone
// tells foreground from background.
constexpr Rgb kDefaultBackground{30, 40, 120};

struct RenderResult {
  RasterImage image;
  OrganIdBuffer ids;
};

// Z-buffered rasterization. Vertices are snapped to a 1/256 sub-pixel grid
// and coverage is decided with exact integer edge functions, sampling pixel
// centres with a top-left fill rule. Nearer surface wins; on equal depth the
// earlier triangle is kept.
RenderResult render(const turtle::Scene& scene, const Camera& camera,
                    const DirectionalLight& light = {}, Rgb background = kDefaultBackground);

// Procedural textures addressable by name from materials ("canola_leaf").
const RasterImage& builtin_texture(std::string_view name);

// Side view along -x for maize (leaves alternate in the y-z plane); top view
// along -z for canola.
Camera side_camera(double plant_height, int width, int height);
Camera top_camera(double canopy_span, int width, int height);

// Orthographic camera framing the scene's bounding box with a 10% margin,
// never showing less than `min_extent` world units vertically. Side views
// look along -x with +z up; top views look down -z with +y up.
enum class ViewDirection { side, top };
Camera frame_scene(const turtle::Scene& scene, ViewDirection view, double min_extent, int width, int height);

}  // namespace plantsim::render
