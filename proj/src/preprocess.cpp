#include "plantsim/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>

namespace plantsim::preprocess {

namespace {

void check_same_size(const RasterImage& a, const RasterImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error("dimension mismatch: " + std::to_string(a.width()) + "x" + std::to_string(a.height()) + " vs " +
                std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
}

bool near(Rgb a, Rgb b, int tol) {
  return std::abs(a.r - b.r) <= tol && std::abs(a.g - b.g) <= tol && std::abs(a.b - b.b) <= tol;
}

}  // namespace

RasterImage subtract_background(const RasterImage& image, const RasterImage& background, int tol) {
  check_same_size(image, background);
  if (tol < 0) throw Error("background tolerance must be nonnegative");
  RasterImage out = image;
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x)
      if (near(image.at(x, y), background.at(x, y), tol)) out.set(x, y, {0, 0, 0});
  return out;
}

RasterImage subtract_background(const RasterImage& image, Rgb background, int tol) {
  return subtract_background(image, RasterImage(image.width(), image.height(), background), tol);
}

GrayImage to_gray(const RasterImage& image, GrayMode mode) {
  GrayImage g(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const Rgb c = image.at(x, y);
      if (mode == GrayMode::mean) {
        g.at(x, y) = static_cast<std::uint8_t>((c.r + c.g + c.b) / 3);
      } else {
        const double l = 0.299 * c.r + 0.587 * c.g + 0.114 * c.b;
        g.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(l), 0L, 255L));
      }
    }
  }
  return g;
}

namespace {

std::array<std::uint64_t, 256> histogram(const GrayImage& gray) {
  std::array<std::uint64_t, 256> h{};
  for (std::uint8_t v : gray.cells()) ++h[v];
  return h;
}

double variance_at(const std::array<std::uint64_t, 256>& h, double total, double sum, int t) {
  double w0 = 0.0, s0 = 0.0;
  for (int i = 0; i <= t; ++i) {
    w0 += static_cast<double>(h[i]);
    s0 += static_cast<double>(h[i]) * i;
  }
  const double w1 = total - w0;
  if (w0 == 0.0 || w1 == 0.0) return 0.0;
  const double m0 = s0 / w0;
  const double m1 = (sum - s0) / w1;
  return (w0 / total) * (w1 / total) * (m0 - m1) * (m0 - m1);
}

}  // namespace

double between_class_variance(const GrayImage& gray, int t) {
  if (gray.size() == 0) throw Error("empty image");
  if (t < 0 || t > 255) throw Error("threshold outside 0..255");
  const auto h = histogram(gray);
  double sum = 0.0;
  for (int i = 0; i < 256; ++i) sum += static_cast<double>(h[i]) * i;
  return variance_at(h, static_cast<double>(gray.size()), sum, t);
}

OtsuResult otsu_threshold(const GrayImage& gray) {
  if (gray.size() == 0) throw Error("otsu threshold of an empty image");
  const auto h = histogram(gray);
  const double total = static_cast<double>(gray.size());
  double sum = 0.0;
  for (int i = 0; i < 256; ++i) sum += static_cast<double>(h[i]) * i;

  int best = -1;
  double best_var = 0.0;
  for (int t = 0; t < 256; ++t) {
    const double v = variance_at(h, total, sum, t);
    if (v > best_var) {
      best_var = v;
      best = t;
    }
  }
  if (best < 0) best = gray.cells().front();  // single grey level

  OtsuResult r{best, BinaryMask(gray.width(), gray.height())};
  for (std::size_t i = 0; i < gray.size(); ++i) r.mask[i] = gray[i] > best ? 1 : 0;
  return r;
}

Grid<int> excess_green(const RasterImage& image) {
  Grid<int> out(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const Rgb c = image.at(x, y);
      out.at(x, y) = 2 * c.g - c.r - c.b;
    }
  }
  return out;
}

BinaryMask segment_plant(const RasterImage& image, const RasterImage& background, const SegmentOptions& options) {
  const RasterImage fg = subtract_background(image, background, options.background_tol);
  const OtsuResult otsu = otsu_threshold(to_gray(fg, options.gray));
  const Grid<int> exg = excess_green(fg);
  BinaryMask mask(image.width(), image.height());
  for (std::size_t i = 0; i < mask.size(); ++i)
    mask[i] = (otsu.mask[i] && exg[i] > options.exg_threshold) ? 1 : 0;
  return mask;
}

BinaryMask segment_plant(const RasterImage& image, Rgb background, const SegmentOptions& options) {
  return segment_plant(image, RasterImage(image.width(), image.height(), background), options);
}

namespace {

std::int64_t cross(const Point& o, const Point& a, const Point& b) {
  const auto ax = static_cast<std::int64_t>(a.x - o.x), ay = static_cast<std::int64_t>(a.y - o.y);
  const auto bx = static_cast<std::int64_t>(b.x - o.x), by = static_cast<std::int64_t>(b.y - o.y);
  return ax * by - ay * bx;
}

}  // namespace

std::vector<Point> convex_hull(const BinaryMask& mask) {
  // Only the extreme pixels of each row can be hull vertices.
  std::vector<Point> pts;
  for (int y = 0; y < mask.height(); ++y) {
    int lo = -1, hi = -1;
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y)) {
        if (lo < 0) lo = x;
        hi = x;
      }
    }
    if (lo < 0) continue;
    pts.push_back({static_cast<double>(lo), static_cast<double>(y)});
    if (hi != lo) pts.push_back({static_cast<double>(hi), static_cast<double>(y)});
  }
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  if (pts.size() < 3) return pts;
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double polygon_area(const std::vector<Point>& polygon) {
  if (polygon.size() < 3) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Point& a = polygon[i];
    const Point& b = polygon[(i + 1) % polygon.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * std::fabs(s);
}

double convex_hull_area(const BinaryMask& mask) { return polygon_area(convex_hull(mask)); }

BoundingBox mask_bounds(const BinaryMask& mask) {
  int x0 = mask.width(), x1 = -1, y0 = mask.height(), y1 = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) return {};
  return {x1 - x0 + 1, y1 - y0 + 1};
}

int select_best_view(const RasterImage& view0, const RasterImage& view1, const RasterImage& background0,
                     const RasterImage& background1, const SegmentOptions& options) {
  const double a0 = convex_hull_area(segment_plant(view0, background0, options));
  const double a1 = convex_hull_area(segment_plant(view1, background1, options));
  return a1 > a0 ? 1 : 0;
}

int select_best_view(const RasterImage& view0, const RasterImage& view1, Rgb background,
                     const SegmentOptions& options) {
  return select_best_view(view0, view1, RasterImage(view0.width(), view0.height(), background),
                          RasterImage(view1.width(), view1.height(), background), options);
}

}  // namespace plantsim::preprocess
