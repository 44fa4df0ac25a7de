#include "plantsim/turtle.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>

#include "plantsim/error.hpp"

namespace plantsim::turtle {

const char* organ_kind_name(OrganKind kind) {
  switch (kind) {
    case OrganKind::internode: return "internode";
    case OrganKind::leaf: return "leaf";
    case OrganKind::flower: return "flower";
    case OrganKind::petal: return "petal";
  }
  return "?";
}

std::size_t Scene::triangle_count() const {
  std::size_t n = 0;
  for (const auto& m : meshes) n += m.triangles.size();
  return n;
}

void TurtleState::yaw(double deg) {
  const double c = std::cos(radians(deg));
  const double s = std::sin(radians(deg));
  const Vec3 h = heading * c + left * s;
  left = left * c - heading * s;
  heading = h;
}

void TurtleState::pitch(double deg) {
  const double c = std::cos(radians(deg));
  const double s = std::sin(radians(deg));
  const Vec3 h = heading * c - up * s;
  up = up * c + heading * s;
  heading = h;
}

void TurtleState::roll(double deg) {
  const double c = std::cos(radians(deg));
  const double s = std::sin(radians(deg));
  const Vec3 l = left * c + up * s;
  up = up * c - left * s;
  left = l;
}

void TurtleState::renormalize() {
  heading = normalized(heading);
  left = normalized(left - heading * dot(left, heading));
  up = cross(heading, left);
}

double TurtleState::orthonormality_error() const {
  double e = 0.0;
  e = std::max(e, std::fabs(dot(heading, heading) - 1.0));
  e = std::max(e, std::fabs(dot(left, left) - 1.0));
  e = std::max(e, std::fabs(dot(up, up) - 1.0));
  e = std::max(e, std::fabs(dot(heading, left)));
  e = std::max(e, std::fabs(dot(heading, up)));
  e = std::max(e, std::fabs(dot(left, up)));
  // Right-handedness: left = up x heading.
  e = std::max(e, norm(cross(up, heading) - left));
  return e;
}

double triangle_area(const Triangle& t) {
  return 0.5 * norm(cross(t.b.position - t.a.position, t.c.position - t.a.position));
}

Vec3 leaf_midrib_point(double length, double curvature_deg, double u) {
  const double kappa = radians(curvature_deg);
  if (std::fabs(kappa) < 1e-12) return {0.0, 0.0, length * u};
  const double r = length / kappa;
  const double theta = kappa * u;
  return {0.0, -r * (1.0 - std::cos(theta)), r * std::sin(theta)};
}

std::vector<Triangle> leaf_surface(double length, double width, const lsys::GrowthFunction& width_fn,
                                   double curvature_deg, int segments, double twist_deg) {
  if (!(length > 0.0) || !std::isfinite(length)) throw Error("leaf length must be positive");
  if (segments < 2) throw Error("leaf needs at least 2 segments");
  const double kappa = radians(curvature_deg);
  const double ct = std::cos(radians(twist_deg));
  const double st = std::sin(radians(twist_deg));

  std::vector<Vertex> left_edge, right_edge;
  left_edge.reserve(segments + 1);
  right_edge.reserve(segments + 1);
  for (int i = 0; i <= segments; ++i) {
    const double u = static_cast<double>(i) / segments;
    const Vec3 mid = leaf_midrib_point(length, curvature_deg, u);
    const double theta = kappa * u;
    const Vec3 normal{0.0, std::cos(theta), std::sin(theta)};
    const Vec3 across = Vec3{1.0, 0.0, 0.0} * ct + normal * st;
    const double half = 0.5 * width * width_fn.at(u);
    left_edge.push_back({mid + across * half, u, 1.0});
    right_edge.push_back({mid - across * half, u, 0.0});
  }
  std::vector<Triangle> tris;
  tris.reserve(2 * segments);
  for (int i = 0; i < segments; ++i) {
    tris.push_back({right_edge[i], left_edge[i], left_edge[i + 1]});
    tris.push_back({right_edge[i], left_edge[i + 1], right_edge[i + 1]});
  }
  return tris;
}

namespace {

double param_or(const lsys::ModuleSymbol& m, std::size_t i, double fallback) {
  return i < m.params.size() ? m.params[i] : fallback;
}

Vec3 to_world(const TurtleState& t, const Vec3& local) {
  return t.position + t.left * local.x + t.up * local.y + t.heading * local.z;
}

std::vector<Triangle> prism(const TurtleState& t, double length, int sides) {
  const double r = 0.5 * t.width;
  std::vector<Triangle> tris;
  tris.reserve(2 * sides);
  auto ring = [&](int k, double along) {
    const double phi = 2.0 * kPi * k / sides;
    const Vec3 p = t.position + t.left * (r * std::cos(phi)) + t.up * (r * std::sin(phi)) +
                   t.heading * along;
    return Vertex{p, along / length, static_cast<double>(k) / sides};
  };
  for (int k = 0; k < sides; ++k) {
    const Vertex a0 = ring(k, 0.0), a1 = ring(k + 1, 0.0);
    const Vertex b0 = ring(k, length), b1 = ring(k + 1, length);
    tris.push_back({a0, a1, b1});
    tris.push_back({a0, b1, b0});
  }
  return tris;
}

void flower_meshes(const TurtleState& t, double size, std::uint32_t id, const Material& petal,
                   const Material& center, std::vector<Mesh>& out) {
  Mesh disc;
  disc.organ_id = id;
  disc.kind = OrganKind::flower;
  disc.material = center;
  disc.origin = t.position;
  disc.direction = t.heading;
  const Vec3 c = t.position + t.heading * (0.02 * size);
  const double rc = 0.2 * size;
  constexpr int kDisc = 8;
  for (int k = 0; k < kDisc; ++k) {
    const double p0 = 2.0 * kPi * k / kDisc;
    const double p1 = 2.0 * kPi * (k + 1) / kDisc;
    const Vec3 a = c + t.left * (rc * std::cos(p0)) + t.up * (rc * std::sin(p0));
    const Vec3 b = c + t.left * (rc * std::cos(p1)) + t.up * (rc * std::sin(p1));
    disc.triangles.push_back({{c, 0.0, 0.5}, {a, 1.0, 0.0}, {b, 1.0, 1.0}});
  }
  out.push_back(std::move(disc));

  Mesh petals;
  petals.organ_id = id;
  petals.kind = OrganKind::petal;
  petals.material = petal;
  petals.origin = t.position;
  petals.direction = t.heading;
  const double len = 0.5 * size;
  const double half = 0.17 * size;
  for (int k = 0; k < 4; ++k) {
    const double phi = kPi / 4.0 + kPi / 2.0 * k;
    const Vec3 dir = t.left * std::cos(phi) + t.up * std::sin(phi);
    const Vec3 side = t.left * -std::sin(phi) + t.up * std::cos(phi);
    const Vec3 base = t.position;
    const Vec3 tip = base + dir * len;
    const Vec3 l = base + dir * (0.6 * len) + side * half;
    const Vec3 r = base + dir * (0.6 * len) - side * half;
    petals.triangles.push_back({{base, 0.0, 0.5}, {r, 0.6, 0.0}, {tip, 1.0, 0.5}});
    petals.triangles.push_back({{base, 0.0, 0.5}, {tip, 1.0, 0.5}, {l, 0.6, 1.0}});
  }
  out.push_back(std::move(petals));
}

}  // namespace

Scene interpret(const lsys::SymbolString& s, const InterpretConfig& config) {
  if (!lsys::brackets_balanced(s.modules())) throw Error("unbalanced brackets in symbol string");
  Scene scene;
  TurtleState state;
  state.width = config.initial_width;
  std::vector<TurtleState> stack;
  int rotations = 0;

  auto rotated = [&] {
    if (config.renormalize_every > 0 && ++rotations % config.renormalize_every == 0) {
      state.renormalize();
    }
  };

  for (const auto& m : s) {
    const std::string& n = m.name;
    if (n.size() == 1) {
      const char c = n[0];
      switch (c) {
        case 'F': {
          const double l = param_or(m, 0, config.default_step);
          Mesh mesh;
          mesh.organ_id = ++scene.organ_count;
          mesh.kind = OrganKind::internode;
          mesh.material = config.stem_material;
          mesh.origin = state.position;
          mesh.direction = state.heading;
          if (l > 0.0 && state.width > 0.0) mesh.triangles = prism(state, l, config.internode_sides);
          scene.meshes.push_back(std::move(mesh));
          state.organ_id = scene.organ_count;
          state.organ_kind = OrganKind::internode;
          state.position += state.heading * l;
          continue;
        }
        case 'f':
          state.position += state.heading * param_or(m, 0, config.default_step);
          continue;
        case '+': state.yaw(param_or(m, 0, config.default_angle)); rotated(); continue;
        case '-': state.yaw(-param_or(m, 0, config.default_angle)); rotated(); continue;
        case '&': state.pitch(param_or(m, 0, config.default_angle)); rotated(); continue;
        case '^': state.pitch(-param_or(m, 0, config.default_angle)); rotated(); continue;
        case '/': state.roll(param_or(m, 0, config.default_angle)); rotated(); continue;
        case '\\': state.roll(-param_or(m, 0, config.default_angle)); rotated(); continue;
        case '[': stack.push_back(state); continue;
        case ']':
          state = stack.back();
          stack.pop_back();
          continue;
        case '!': state.width = param_or(m, 0, state.width); continue;
        default:
          break;
      }
      if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) {
        scene.warnings.push_back("unknown drawing symbol '" + n + "' skipped");
      }
      continue;
    }
    if (n == "Leaf") {
      const double len = param_or(m, 0, config.default_step);
      const double wid = param_or(m, 1, 0.1 * len);
      const double curv = param_or(m, 2, 0.0);
      const auto texid = static_cast<std::size_t>(std::max(0.0, param_or(m, 3, 0.0)));
      const double twist = param_or(m, 4, 0.0);
      Mesh mesh;
      mesh.organ_id = ++scene.organ_count;
      mesh.kind = OrganKind::leaf;
      mesh.material = config.leaf_materials.at(texid < config.leaf_materials.size() ? texid : 0);
      mesh.origin = state.position;
      mesh.direction = state.heading;
      if (len > 0.0) {
        mesh.triangles = leaf_surface(len, wid, config.leaf_width, curv, config.leaf_segments, twist);
        for (auto& t : mesh.triangles) {
          for (Vertex* v : {&t.a, &t.b, &t.c}) v->position = to_world(state, v->position);
        }
      }
      scene.meshes.push_back(std::move(mesh));
      state.organ_id = scene.organ_count;
      state.organ_kind = OrganKind::leaf;
      continue;
    }
    if (n == "Flower") {
      const double size = param_or(m, 0, 1.0);
      const auto color = static_cast<std::size_t>(std::max(0.0, param_or(m, 1, 0.0)));
      const std::uint32_t id = ++scene.organ_count;
      const Material& petal =
          config.petal_materials.at(color < config.petal_materials.size() ? color : 0);
      if (size > 0.0) {
        flower_meshes(state, size, id, petal, config.flower_center, scene.meshes);
      } else {
        Mesh empty;
        empty.organ_id = id;
        empty.kind = OrganKind::flower;
        empty.origin = state.position;
        empty.direction = state.heading;
        scene.meshes.push_back(std::move(empty));
      }
      state.organ_id = id;
      state.organ_kind = OrganKind::flower;
      continue;
    }
  }
  return scene;
}

void write_triangle_soup(std::ostream& out, const Scene& scene) {
  for (const auto& m : scene.meshes) {
    for (const auto& t : m.triangles) {
      out << m.organ_id << ' ' << organ_kind_name(m.kind);
      for (const Vertex* v : {&t.a, &t.b, &t.c}) {
        out << ' ' << v->position.x << ' ' << v->position.y << ' ' << v->position.z;
      }
      out << '\n';
    }
  }
}

}  // namespace plantsim::turtle
