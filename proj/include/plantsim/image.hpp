#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "plantsim/error.hpp"
#include "plantsim/geometry.hpp"

namespace plantsim {

// 8-bit RGB, row-major, no alpha.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, Rgb fill = {0, 0, 0});

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  Rgb at(int x, int y) const {
    const std::size_t i = index(x, y);
    return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
  }
  void set(int x, int y, Rgb c) {
    const std::size_t i = index(x, y);
    pixels_[i] = c.r;
    pixels_[i + 1] = c.g;
    pixels_[i + 2] = c.b;
  }

  std::span<const std::uint8_t> bytes() const { return pixels_; }
  std::span<std::uint8_t> bytes() { return pixels_; }

  Rgb background() const { return background_; }
  void set_background(Rgb c) { background_ = c; }

  bool operator==(const RasterImage& o) const {
    return width_ == o.width_ && height_ == o.height_ && pixels_ == o.pixels_;
  }

 private:
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
  Rgb background_{};
};

// Generic single-channel raster.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height),
        cells_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    if (width < 0 || height < 0) throw Error("negative grid dimensions");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return cells_.size(); }

  T at(int x, int y) const { return cells_[static_cast<std::size_t>(y) * width_ + x]; }
  T& at(int x, int y) { return cells_[static_cast<std::size_t>(y) * width_ + x]; }
  T operator[](std::size_t i) const { return cells_[i]; }
  T& operator[](std::size_t i) { return cells_[i]; }

  const std::vector<T>& cells() const { return cells_; }

  bool operator==(const Grid&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> cells_;
};

// Per-pixel organ id; 0 is background.
using OrganIdBuffer = Grid<std::uint32_t>;
using GrayImage = Grid<std::uint8_t>;

class BinaryMask : public Grid<std::uint8_t> {
 public:
  using Grid<std::uint8_t>::Grid;
  std::size_t count() const;
};

// PNG codec (8-bit RGB, no alpha). Encoding is deterministic: fixed
// compression settings and no timestamp chunks.
std::vector<std::uint8_t> encode_png(const RasterImage& image);
RasterImage decode_png(std::span<const std::uint8_t> bytes);
// 16-bit grayscale; ids above 65535 are rejected.
std::vector<std::uint8_t> encode_png_gray16(const OrganIdBuffer& ids);
OrganIdBuffer decode_png_gray16(std::span<const std::uint8_t> bytes);
// 1-bit grayscale.
std::vector<std::uint8_t> encode_png_mask(const BinaryMask& mask);
BinaryMask decode_png_mask(std::span<const std::uint8_t> bytes);

RasterImage decode_jpeg(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

// Loads PNG or JPEG by signature.
RasterImage load_image(const std::filesystem::path& path);
void save_png(const std::filesystem::path& path, const RasterImage& image);

}  // namespace plantsim
