#pragma once

#include <optional>
#include <vector>

#include "plantsim/image.hpp"

namespace plantsim::preprocess {

enum class GrayMode { mean, luma };

// Pixels whose every channel is within `tol` of the reference become black.
RasterImage subtract_background(const RasterImage& image, const RasterImage& background, int tol);
RasterImage subtract_background(const RasterImage& image, Rgb background, int tol);

// mean: floor((R + G + B) / 3); luma: round(0.299 R + 0.587 G + 0.114 B).
GrayImage to_gray(const RasterImage& image, GrayMode mode = GrayMode::mean);

struct OtsuResult {
  int threshold = 0;
  BinaryMask mask;  // pixel > threshold
};

// Maximizes between-class variance over the 256-bin histogram; ties go to
// the lowest threshold. A single-valued image returns that value and an
// empty mask.
OtsuResult otsu_threshold(const GrayImage& gray);
// Between-class variance for splitting at t (classes <= t and > t).
double between_class_variance(const GrayImage& gray, int t);

// 2G - R - B per pixel, row-major.
Grid<int> excess_green(const RasterImage& image);

struct SegmentOptions {
  int background_tol = 10;
  int exg_threshold = 20;
  GrayMode gray = GrayMode::mean;
};

// subtract_background -> gray -> Otsu, intersected with ExG > threshold.
BinaryMask segment_plant(const RasterImage& image, const RasterImage& background,
                         const SegmentOptions& options = {});
BinaryMask segment_plant(const RasterImage& image, Rgb background, const SegmentOptions& options = {});

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

// Convex hull of the foreground pixel centres, counter-clockwise (in x-right,
// y-down coordinates, clockwise on screen); collinear points dropped.
std::vector<Point> convex_hull(const BinaryMask& mask);
double polygon_area(const std::vector<Point>& polygon);
double convex_hull_area(const BinaryMask& mask);

struct BoundingBox {
  int width = 0;
  int height = 0;
};
BoundingBox mask_bounds(const BinaryMask& mask);

// Index of the view with the larger segmented hull area; ties go to 0.
int select_best_view(const RasterImage& view0, const RasterImage& view1, const RasterImage& background0,
                     const RasterImage& background1, const SegmentOptions& options = {});
int select_best_view(const RasterImage& view0, const RasterImage& view1, Rgb background,
                     const SegmentOptions& options = {});

}  // namespace plantsim::preprocess
