#include "plantsim/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <string>

namespace plantsim::render {

void Camera::validate() const {
  if (width < 16 || height < 16) throw Error("camera resolution must be at least 16x16");
  if (norm(target - position) <= 0.0) throw Error("camera look direction is zero");
  if (norm(cross(target - position, up)) <= 0.0) throw Error("camera up vector is parallel to the view");
  if (kind == Kind::orthographic && !(extent > 0.0)) throw Error("orthographic extent must be positive");
  if (kind == Kind::perspective && !(fov_deg > 0.0 && fov_deg < 180.0))
    throw Error("field of view must be in (0, 180)");
}

namespace {

constexpr std::int64_t kSubpixel = 256;
constexpr double kMaxScreen = 1 << 20;
constexpr double kNear = 1e-3;

struct Projected {
  std::int64_t x = 0;
  std::int64_t y = 0;
  double depth = 0.0;
  double u = 0.0;
  double v = 0.0;
};

struct View {
  Vec3 origin, right, up, forward;
  Camera::Kind kind;
  double scale;  // pixels per world unit (orthographic) or focal length in pixels
  double cx, cy;

  explicit View(const Camera& c)
      : origin(c.position), kind(c.kind), cx(0.5 * c.width), cy(0.5 * c.height) {
    forward = normalized(c.target - c.position);
    right = normalized(cross(forward, c.up));
    up = cross(right, forward);
    scale = kind == Camera::Kind::orthographic ? c.height / c.extent
                                               : (0.5 * c.height) / std::tan(radians(0.5 * c.fov_deg));
  }

  bool project(const turtle::Vertex& v, Projected& out) const {
    const Vec3 d = v.position - origin;
    const double depth = dot(d, forward);
    double sx, sy;
    if (kind == Camera::Kind::orthographic) {
      sx = cx + dot(d, right) * scale;
      sy = cy - dot(d, up) * scale;
    } else {
      if (depth < kNear) return false;
      sx = cx + dot(d, right) / depth * scale;
      sy = cy - dot(d, up) / depth * scale;
    }
    if (!(std::fabs(sx) < kMaxScreen && std::fabs(sy) < kMaxScreen)) return false;
    out.x = std::llround(sx * kSubpixel);
    out.y = std::llround(sy * kSubpixel);
    out.depth = depth;
    out.u = v.u;
    out.v = v.v;
    return true;
  }
};

std::int64_t edge(const Projected& a, const Projected& b, std::int64_t px, std::int64_t py) {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

bool top_left(const Projected& a, const Projected& b) {
  const std::int64_t dx = b.x - a.x;
  const std::int64_t dy = b.y - a.y;
  return (dy == 0 && dx > 0) || dy < 0;
}

bool covers(std::int64_t w, bool tl) { return w > 0 || (w == 0 && tl); }

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::uint8_t shade_channel(unsigned char c, double intensity) {
  const double v = c * intensity;
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

Rgb base_color(const turtle::Material& m, double u, double v) {
  switch (m.kind) {
    case turtle::Material::Kind::flat:
      return m.color;
    case turtle::Material::Kind::midvein:
      return std::fabs(v - 0.5) < 0.06 ? m.vein : m.color;
    case turtle::Material::Kind::texture: {
      const RasterImage& tex = builtin_texture(m.texture);
      const int tx = std::clamp(static_cast<int>(std::floor(v * tex.width())), 0, tex.width() - 1);
      const int ty = std::clamp(static_cast<int>(std::floor(u * tex.height())), 0, tex.height() - 1);
      return tex.at(tx, ty);
    }
  }
  return m.color;
}

}  // namespace

RenderResult render(const turtle::Scene& scene, const Camera& camera, const DirectionalLight& light,
                    Rgb background) {
  camera.validate();
  const int W = camera.width;
  const int H = camera.height;
  RenderResult out{RasterImage(W, H, background), OrganIdBuffer(W, H, 0)};
  std::vector<double> zbuf(static_cast<std::size_t>(W) * H, std::numeric_limits<double>::infinity());
  const View view(camera);
  const Vec3 to_light = normalized(-light.direction);
  const bool perspective = camera.kind == Camera::Kind::perspective;

  for (const auto& mesh : scene.meshes) {
    for (const auto& tri : mesh.triangles) {
      Projected p[3];
      if (!view.project(tri.a, p[0]) || !view.project(tri.b, p[1]) || !view.project(tri.c, p[2]))
        continue;
      std::int64_t area = edge(p[0], p[1], p[2].x, p[2].y);
      if (area == 0) continue;
      if (area < 0) {
        std::swap(p[1], p[2]);
        area = -area;
      }
      const Vec3 n = normalized(cross(tri.b.position - tri.a.position, tri.c.position - tri.a.position));
      const double lambert = std::fabs(dot(n, to_light));
      const double intensity = std::min(1.0, light.ambient + light.diffuse * lambert);

      const bool tl0 = top_left(p[1], p[2]);
      const bool tl1 = top_left(p[2], p[0]);
      const bool tl2 = top_left(p[0], p[1]);

      const std::int64_t min_x = std::min({p[0].x, p[1].x, p[2].x});
      const std::int64_t max_x = std::max({p[0].x, p[1].x, p[2].x});
      const std::int64_t min_y = std::min({p[0].y, p[1].y, p[2].y});
      const std::int64_t max_y = std::max({p[0].y, p[1].y, p[2].y});
      const int x0 = static_cast<int>(std::max<std::int64_t>(0, floor_div(min_x, kSubpixel)));
      const int x1 = static_cast<int>(std::min<std::int64_t>(W - 1, floor_div(max_x, kSubpixel)));
      const int y0 = static_cast<int>(std::max<std::int64_t>(0, floor_div(min_y, kSubpixel)));
      const int y1 = static_cast<int>(std::min<std::int64_t>(H - 1, floor_div(max_y, kSubpixel)));
      const double inv_area = 1.0 / static_cast<double>(area);

      for (int y = y0; y <= y1; ++y) {
        const std::int64_t py = y * kSubpixel + kSubpixel / 2;
        for (int x = x0; x <= x1; ++x) {
          const std::int64_t px = x * kSubpixel + kSubpixel / 2;
          const std::int64_t w0 = edge(p[1], p[2], px, py);
          const std::int64_t w1 = edge(p[2], p[0], px, py);
          const std::int64_t w2 = edge(p[0], p[1], px, py);
          if (!covers(w0, tl0) || !covers(w1, tl1) || !covers(w2, tl2)) continue;
          const double l0 = w0 * inv_area;
          const double l1 = w1 * inv_area;
          const double l2 = w2 * inv_area;
          double depth, u, v;
          if (perspective) {
            const double i0 = l0 / p[0].depth, i1 = l1 / p[1].depth, i2 = l2 / p[2].depth;
            const double inv = i0 + i1 + i2;
            depth = 1.0 / inv;
            u = (i0 * p[0].u + i1 * p[1].u + i2 * p[2].u) / inv;
            v = (i0 * p[0].v + i1 * p[1].v + i2 * p[2].v) / inv;
          } else {
            depth = l0 * p[0].depth + l1 * p[1].depth + l2 * p[2].depth;
            u = l0 * p[0].u + l1 * p[1].u + l2 * p[2].u;
            v = l0 * p[0].v + l1 * p[1].v + l2 * p[2].v;
          }
          double& z = zbuf[static_cast<std::size_t>(y) * W + x];
          if (!(depth < z)) continue;
          z = depth;
          const Rgb base = base_color(mesh.material, u, v);
          out.image.set(x, y,
                        {shade_channel(base.r, intensity), shade_channel(base.g, intensity),
                         shade_channel(base.b, intensity)});
          out.ids.at(x, y) = mesh.organ_id;
        }
      }
    }
  }
  return out;
}

namespace {

std::uint32_t hash32(std::uint32_t x) {
  x ^= x >> 16;
  x *= 0x7feb352dU;
  x ^= x >> 15;
  x *= 0x846ca68bU;
  x ^= x >> 16;
  return x;
}

// Leaf texture resembling a canola leaf photograph: blue-green lamina with
// mottling, a pale midrib and pinnate lateral veins. Columns run across the
// leaf, rows along it.
RasterImage make_canola_leaf() {
  constexpr int kW = 64;
  constexpr int kH = 128;
  RasterImage tex(kW, kH);
  for (int y = 0; y < kH; ++y) {
    for (int x = 0; x < kW; ++x) {
      const double across = (x + 0.5) / kW - 0.5;
      const double along = (y + 0.5) / kH;
      const int noise = static_cast<int>(hash32(static_cast<std::uint32_t>(y * kW + x)) % 21) - 10;
      const int blotch = static_cast<int>(hash32(static_cast<std::uint32_t>((y / 8) * 97 + x / 8) + 7u) % 17) - 8;
      int r = 78 + noise / 2 + blotch;
      int g = 122 + noise + blotch;
      int b = 84 + noise / 2 + blotch / 2;
      const double lateral = std::fmod(along * 9.0 + std::fabs(across) * 3.0, 1.0);
      if (std::fabs(across) < 0.035) {
        r = 150 + noise / 2;
        g = 172 + noise / 2;
        b = 128 + noise / 2;
      } else if (lateral < 0.07 && std::fabs(across) < 0.42) {
        r += 22;
        g += 24;
        b += 14;
      }
      tex.set(x, y,
              {static_cast<unsigned char>(std::clamp(r, 0, 255)),
               static_cast<unsigned char>(std::clamp(g, 0, 255)),
               static_cast<unsigned char>(std::clamp(std::min(b, g), 0, 255))});
    }
  }
  return tex;
}

}  // namespace

const RasterImage& builtin_texture(std::string_view name) {
  static std::mutex mu;
  static std::map<std::string, RasterImage, std::less<>> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(name); it != cache.end()) return it->second;
  if (name == "canola_leaf") return cache.emplace(std::string(name), make_canola_leaf()).first->second;
  throw Error("unknown texture '" + std::string(name) + "'");
}

Camera side_camera(double plant_height, int width, int height) {
  Camera c;
  c.kind = Camera::Kind::orthographic;
  c.position = {1000.0, 0.0, 0.5 * plant_height};
  c.target = {0.0, 0.0, 0.5 * plant_height};
  c.up = {0.0, 0.0, 1.0};
  c.extent = plant_height;
  c.width = width;
  c.height = height;
  return c;
}

Camera top_camera(double canopy_span, int width, int height) {
  Camera c;
  c.kind = Camera::Kind::orthographic;
  c.position = {0.0, 0.0, 1000.0};
  c.target = {0.0, 0.0, 0.0};
  c.up = {0.0, 1.0, 0.0};
  c.extent = canopy_span;
  c.width = width;
  c.height = height;
  return c;
}

Camera frame_scene(const turtle::Scene& scene, ViewDirection view, double min_extent, int width,
                   int height) {
  if (!(min_extent > 0.0)) throw Error("minimum view extent must be positive");
  Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  bool any = false;
  for (const auto& m : scene.meshes) {
    for (const auto& t : m.triangles) {
      for (const auto* v : {&t.a, &t.b, &t.c}) {
        lo = {std::min(lo.x, v->position.x), std::min(lo.y, v->position.y), std::min(lo.z, v->position.z)};
        hi = {std::max(hi.x, v->position.x), std::max(hi.y, v->position.y), std::max(hi.z, v->position.z)};
        any = true;
      }
    }
  }
  if (!any) lo = hi = Vec3{};
  const double aspect = static_cast<double>(width) / height;
  Camera c;
  c.kind = Camera::Kind::orthographic;
  c.width = width;
  c.height = height;
  if (view == ViewDirection::side) {
    const double cy = 0.5 * (lo.y + hi.y), cz = 0.5 * (lo.z + hi.z);
    c.extent = std::max(min_extent, 1.1 * std::max(hi.z - lo.z, (hi.y - lo.y) / aspect));
    c.target = {0.0, cy, cz};
    c.position = {1000.0, cy, cz};
    c.up = {0.0, 0.0, 1.0};
  } else {
    const double cx = 0.5 * (lo.x + hi.x), cy = 0.5 * (lo.y + hi.y);
    c.extent = std::max(min_extent, 1.1 * std::max(hi.y - lo.y, (hi.x - lo.x) / aspect));
    c.target = {cx, cy, 0.0};
    c.position = {cx, cy, 1000.0};
    c.up = {0.0, 1.0, 0.0};
  }
  return c;
}

}  // namespace plantsim::render
