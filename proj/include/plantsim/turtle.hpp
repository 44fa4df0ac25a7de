#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "plantsim/geometry.hpp"
#include "plantsim/lsystem.hpp"

namespace plantsim::turtle {

enum class OrganKind : std::uint8_t { internode, leaf, flower, petal };

const char* organ_kind_name(OrganKind kind);

struct Material {
  enum class Kind : std::uint8_t { flat, midvein, texture };

  Kind kind = Kind::flat;
  Rgb color{60, 140, 50};
  Rgb vein{240, 240, 240};  // midvein stripe colour (Kind::midvein)
  std::string texture;      // built-in texture name (Kind::texture)

  static Material flat_color(Rgb c) { return Material{Kind::flat, c, {}, {}}; }

  bool operator==(const Material&) const = default;
};

struct Vertex {
  Vec3 position;
  double u = 0.0;  // along the organ, 0 at base
  double v = 0.0;  // across the organ, 0.5 on the midline
};

struct Triangle {
  Vertex a, b, c;
};

struct Mesh {
  std::uint32_t organ_id = 0;
  OrganKind kind = OrganKind::internode;
  Material material;
  std::vector<Triangle> triangles;
  // Turtle position and heading when the organ was emitted.
  Vec3 origin;
  Vec3 direction;
};

struct Scene {
  std::vector<Mesh> meshes;
  std::uint32_t organ_count = 0;  // ids run 1..organ_count
  std::vector<std::string> warnings;

  std::size_t triangle_count() const;
};

// Orthonormal frame; left = up x heading.
struct TurtleState {
  Vec3 position;
  Vec3 heading{0, 0, 1};
  Vec3 left{1, 0, 0};
  Vec3 up{0, 1, 0};
  double width = 0.1;
  std::uint32_t organ_id = 0;
  OrganKind organ_kind = OrganKind::internode;

  void yaw(double degrees);    // about up; positive turns heading toward left
  void pitch(double degrees);  // about left; positive turns heading toward -up
  void roll(double degrees);   // about heading; positive turns left toward up
  void renormalize();
  double orthonormality_error() const;
};

struct InterpretConfig {
  double default_step = 1.0;
  double default_angle = 30.0;
  double initial_width = 0.1;
  int internode_sides = 8;
  int leaf_segments = 8;
  int renormalize_every = 64;

  Material stem_material = Material::flat_color({70, 120, 40});
  // Indexed by the Leaf texid parameter; index 0 is used when out of range.
  std::vector<Material> leaf_materials{Material{}};
  // Indexed by the Flower colour parameter.
  std::vector<Material> petal_materials{Material::flat_color({250, 220, 40})};
  Material flower_center = Material::flat_color({200, 150, 20});
  // Leaf width profile over normalized length; constant 1 when unset.
  lsys::GrowthFunction leaf_width{"leafwidth", {{0.0, 1.0}, {1.0, 1.0}}, 1.0};
};

// Turtle commands:
//   F(l) f(l)  move forward drawing / not drawing an internode
//   + - & ^ / \ (a)  yaw, pitch, roll by a degrees
//   [ ]  push / pop state;  !(w)  set width
//   Leaf(len, wid, curv, texid[, twist])  leaf blade
//   Flower(size, colour)
// F, Leaf and Flower each allocate a fresh organ id. Other identifiers are
// control symbols and are ignored; unknown single-character symbols add a
// warning. Parameters beyond those listed are ignored.
Scene interpret(const lsys::SymbolString& s, const InterpretConfig& config = {});

// Leaf blade in the local frame: x = left, y = up, z = heading. The midrib
// follows a circular arc of total bend `curvature_deg` in the y-z plane,
// curling toward -y. The blade spans width_fn(u) * width across the
// direction obtained by rotating +x by `twist_deg` about the midrib tangent.
std::vector<Triangle> leaf_surface(double length, double width, const lsys::GrowthFunction& width_fn,
                                   double curvature_deg, int segments, double twist_deg = 0.0);

// Midrib point at arc-length fraction u of a leaf_surface blade.
Vec3 leaf_midrib_point(double length, double curvature_deg, double u);

double triangle_area(const Triangle& t);

// "organ_id kind ax ay az bx by bz cx cy cz" per line.
void write_triangle_soup(std::ostream& out, const Scene& scene);

}  // namespace plantsim::turtle
